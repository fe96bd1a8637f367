//! Removal of candidate fragments that cannot be part of any feasible path.
//!
//! A pair of fragments at consecutive locations is feasible when the
//! minimum network travel time between them at `v_max` fits in the time gap.
//! Sequence pruning keeps only fragments on some fully feasible combination.

use std::collections::HashMap;

use crate::netmodel::{EdgeFragment, RoadNetwork, VertexIdx};
use crate::prob::ShortestPaths;
use crate::ttdist::{measure_travel_time, TravelTimeSample};

/// Slack for floating-point noise in the feasibility comparison.
const FEASIBILITY_SLACK_M: f64 = 1e-6;

/// Feasibility matrix `m[i][j]`: can `b[j]` be reached from `a[i]` within
/// `dt` seconds at `v_max`?
pub fn feasibility(
    net: &RoadNetwork,
    a: &[EdgeFragment],
    b: &[EdgeFragment],
    dt: f64,
    v_max: f64,
) -> Vec<Vec<bool>> {
    let budget = v_max * dt + FEASIBILITY_SLACK_M;
    let mut trees: HashMap<VertexIdx, ShortestPaths> = HashMap::new();
    a.iter()
        .map(|fa| {
            let ea = net.edge(fa.edge);
            let tail = ea.length_m - fa.end_m;
            b.iter()
                .map(|fb| {
                    if fa.edge == fb.edge && fb.end_m >= fa.start_m {
                        return (fb.start_m - fa.end_m).max(0.0) <= budget;
                    }
                    let rest = budget - tail - fb.start_m;
                    if rest < 0.0 {
                        return false;
                    }
                    let sp = trees
                        .entry(ea.to)
                        .or_insert_with(|| ShortestPaths::from_vertex(net, ea.to, budget));
                    sp.distance(net.edge(fb.edge).from)
                        .is_some_and(|d| d <= rest)
                })
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairPrune {
    pub first: Vec<EdgeFragment>,
    pub second: Vec<EdgeFragment>,
    /// Set when pruning would have emptied the set and the original was kept.
    pub first_degraded: bool,
    pub second_degraded: bool,
}

/// Drops fragments of `a` with no feasible successor in `b`, and fragments
/// of `b` with no feasible predecessor in `a`.
pub fn pairwise_prune(
    a: &[EdgeFragment],
    b: &[EdgeFragment],
    dt: f64,
    net: &RoadNetwork,
    v_max: f64,
) -> PairPrune {
    assert!(dt > 0.0, "pairwise pruning needs a positive time gap");
    let m = feasibility(net, a, b, dt, v_max);
    let keep_a: Vec<bool> = m.iter().map(|row| row.iter().any(|&f| f)).collect();
    let keep_b: Vec<bool> = (0..b.len()).map(|j| m.iter().any(|row| row[j])).collect();
    let (first, first_degraded) = filter_or_restore(a, &keep_a);
    let (second, second_degraded) = filter_or_restore(b, &keep_b);
    PairPrune {
        first,
        second,
        first_degraded,
        second_degraded,
    }
}

fn filter_or_restore(set: &[EdgeFragment], keep: &[bool]) -> (Vec<EdgeFragment>, bool) {
    let kept: Vec<_> = set
        .iter()
        .zip(keep)
        .filter(|(_, &k)| k)
        .map(|(f, _)| *f)
        .collect();
    if kept.is_empty() && !set.is_empty() {
        (set.to_vec(), true)
    } else {
        (kept, false)
    }
}

/// Pruned candidate sets of one trajectory.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CandidateSequence {
    pub sets: Vec<Vec<EdgeFragment>>,
    pub times: Vec<i64>,
    /// Per location: pairwise pruning had to restore the set.
    pub degraded: Vec<bool>,
    /// No feasible combination spans the sequence; sets were left as given.
    pub infeasible: bool,
}

impl CandidateSequence {
    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Locations whose candidate set holds exactly one fragment.
    pub fn compact(&self) -> Vec<bool> {
        self.sets.iter().map(|s| s.len() == 1).collect()
    }

    pub fn is_degraded(&self) -> bool {
        self.infeasible || self.degraded.iter().any(|&d| d)
    }
}

/// Keeps exactly the fragments lying on at least one feasible combination
/// over the whole sequence (forward then backward reachability sweep).
pub fn sequence_prune(
    candidates: &[Vec<EdgeFragment>],
    times: &[i64],
    net: &RoadNetwork,
    v_max: f64,
) -> CandidateSequence {
    assert_eq!(
        candidates.len(),
        times.len(),
        "one timestamp per candidate set"
    );
    let n = candidates.len();
    let mats: Vec<Vec<Vec<bool>>> = (1..n)
        .map(|k| {
            let dt = (times[k] - times[k - 1]) as f64;
            feasibility(net, &candidates[k - 1], &candidates[k], dt, v_max)
        })
        .collect();
    let (sets, infeasible) = match sweep(candidates, &mats) {
        Some(keep) => (
            candidates
                .iter()
                .zip(&keep)
                .map(|(set, k)| {
                    set.iter()
                        .zip(k)
                        .filter(|(_, &x)| x)
                        .map(|(f, _)| *f)
                        .collect()
                })
                .collect(),
            false,
        ),
        None => (candidates.to_vec(), n > 0),
    };
    CandidateSequence {
        sets,
        times: times.to_vec(),
        degraded: vec![false; n],
        infeasible,
    }
}

/// Forward and backward reachability over the layered feasibility graph.
/// `None` when some layer has no surviving fragment.
fn sweep(candidates: &[Vec<EdgeFragment>], mats: &[Vec<Vec<bool>>]) -> Option<Vec<Vec<bool>>> {
    let n = candidates.len();
    if n == 0 {
        return Some(Vec::new());
    }
    let mut fwd = vec![vec![true; candidates[0].len()]];
    for (k, m) in mats.iter().enumerate() {
        let prev = &fwd[k];
        let next = (0..candidates[k + 1].len())
            .map(|j| prev.iter().zip(m).any(|(&r, row)| r && row[j]))
            .collect();
        fwd.push(next);
    }
    let mut bwd = vec![Vec::new(); n];
    bwd[n - 1] = vec![true; candidates[n - 1].len()];
    for k in (0..n - 1).rev() {
        bwd[k] = mats[k]
            .iter()
            .map(|row| row.iter().zip(&bwd[k + 1]).any(|(&f, &r)| f && r))
            .collect();
    }
    let keep: Vec<Vec<bool>> = fwd
        .iter()
        .zip(&bwd)
        .map(|(f, b)| f.iter().zip(b).map(|(&x, &y)| x && y).collect())
        .collect();
    keep.iter().all(|k| k.iter().any(|&x| x)).then_some(keep)
}

/// Pairwise pruning over every adjacent pair followed by sequence pruning.
pub fn prune_trajectory(
    candidates: &[Vec<EdgeFragment>],
    times: &[i64],
    net: &RoadNetwork,
    v_max: f64,
) -> CandidateSequence {
    let n = candidates.len();
    let mut sets = candidates.to_vec();
    let mut degraded = vec![false; n];
    for k in 1..n {
        let dt = (times[k] - times[k - 1]) as f64;
        let p = pairwise_prune(&sets[k - 1], &sets[k], dt, net, v_max);
        sets[k - 1] = p.first;
        sets[k] = p.second;
        degraded[k - 1] |= p.first_degraded;
        degraded[k] |= p.second_degraded;
    }
    let mut seq = sequence_prune(&sets, times, net, v_max);
    seq.degraded = degraded;
    seq
}

/// Most-compact locations and the travel-time samples they yield.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CompactRuns {
    /// `(location index, fragment)` for every singleton set.
    pub singletons: Vec<(usize, EdgeFragment)>,
    /// Successive singleton pairs on the same edge, as location indices.
    pub same_edge_pairs: Vec<(usize, usize)>,
    pub ratio: f64,
}

pub fn extract_compact_runs(seq: &CandidateSequence) -> CompactRuns {
    let singletons: Vec<(usize, EdgeFragment)> = seq
        .sets
        .iter()
        .enumerate()
        .filter(|(_, s)| s.len() == 1)
        .map(|(i, s)| (i, s[0]))
        .collect();
    let same_edge_pairs = singletons
        .windows(2)
        .filter(|w| w[0].1.edge == w[1].1.edge)
        .map(|w| (w[0].0, w[1].0))
        .collect();
    let ratio = if seq.is_empty() {
        0.0
    } else {
        singletons.len() as f64 / seq.len() as f64
    };
    CompactRuns {
        singletons,
        same_edge_pairs,
        ratio,
    }
}

/// Travel-time samples measured from the same-edge compact pairs; pairs the
/// measurement rejects are skipped.
pub fn compact_samples(
    seq: &CandidateSequence,
    runs: &CompactRuns,
    net: &RoadNetwork,
    window_id: u64,
) -> Vec<TravelTimeSample> {
    runs.same_edge_pairs
        .iter()
        .filter_map(|&(i, j)| {
            let (a, b) = (&seq.sets[i][0], &seq.sets[j][0]);
            measure_travel_time(
                a,
                seq.times[i],
                b,
                seq.times[j],
                net.edge(a.edge),
                window_id,
            )
            .ok()
        })
        .collect()
}
