//! Most probable edge sequence over a (fragment, remaining duration) trellis.
//!
//! At each location the hidden state is a candidate fragment plus the whole
//! seconds left on its edge. If the previous state still had at least `dt`
//! seconds left, the object stays on the same edge with `d - dt` left;
//! otherwise it moves according to the transition estimate and starts a new
//! duration drawn from the target edge's (scaled) travel-time distribution.

use std::collections::BTreeMap;

use crate::netmodel::{Edge, EdgeFragment, EdgeIdx, RoadNetwork};
use crate::prob::emission;
use crate::ttdist::{DistributionStore, TravelTimeDistribution};

/// Probability mass over whole-second remaining durations, sorted by duration.
pub type DurationPmf = Vec<(u32, f64)>;

fn round_half_up(x: f64) -> u32 {
    (x + 0.5).floor().max(0.0) as u32
}

/// Remaining-duration distribution when starting to travel on `frag`'s edge:
/// each full-edge time `t` is scaled by the share of the edge left after the
/// fragment centre, rounded half up. Outcomes that round to the same value
/// are merged.
pub fn begin_durations(
    frag: &EdgeFragment,
    edge: &Edge,
    dist: &TravelTimeDistribution,
) -> DurationPmf {
    let share = (edge.length_m - frag.center()).max(0.0) / edge.length_m;
    let total = dist.total() as f64;
    let mut acc: BTreeMap<u32, f64> = BTreeMap::new();
    for &(t, c) in dist.entries() {
        *acc.entry(round_half_up(f64::from(t) * share)).or_default() += c as f64 / total;
    }
    acc.into_iter().collect()
}

/// `p(d_k = j | d_{k-1} = i)` for a gap of `dt` seconds. A state with time
/// left keeps counting down; otherwise a fresh duration is drawn.
pub fn duration_prob(i: u32, j: u32, dt: u32, begin: &[(u32, f64)]) -> f64 {
    if i >= dt {
        if j == i - dt {
            1.0
        } else {
            0.0
        }
    } else {
        begin.iter().find(|(d, _)| *d == j).map_or(0.0, |&(_, p)| p)
    }
}

/// `p(e_k | e_{k-1}, d_{k-1})`: forced stay while time is left, otherwise the
/// estimated fragment transition probability.
pub fn edge_transition_prob(
    e_prev: EdgeIdx,
    e_next: EdgeIdx,
    d_prev: u32,
    dt: u32,
    transition: f64,
) -> f64 {
    if d_prev >= dt {
        if e_prev == e_next {
            1.0
        } else {
            0.0
        }
    } else {
        transition
    }
}

/// Supplies `p(R_k[j] | R_{k-1}[i], dt_k)` for all `j`, for step `k >= 1`.
/// Only called for sources that can actually leave their edge.
pub trait TransitionSource {
    fn probabilities(&mut self, k: usize, i: usize) -> Vec<f64>;
}

/// Fixed transition tables: `tables[k][i][j]`, with `tables[0]` unused.
#[derive(Debug, Clone, Default)]
pub struct TableTransitions {
    pub tables: Vec<Vec<Vec<f64>>>,
}

impl TransitionSource for TableTransitions {
    fn probabilities(&mut self, k: usize, i: usize) -> Vec<f64> {
        self.tables[k][i].clone()
    }
}

/// Everything the dynamic program needs besides transitions.
#[derive(Debug, Clone, Default)]
pub struct Trellis {
    pub times: Vec<i64>,
    /// Edge of every candidate, per location.
    pub edges: Vec<Vec<EdgeIdx>>,
    pub emissions: Vec<Vec<f64>>,
    pub begins: Vec<Vec<DurationPmf>>,
}

impl Trellis {
    pub fn build(
        sets: &[Vec<EdgeFragment>],
        times: &[i64],
        net: &RoadNetwork,
        dists: &DistributionStore,
    ) -> Self {
        assert_eq!(sets.len(), times.len());
        Self {
            times: times.to_vec(),
            edges: sets
                .iter()
                .map(|s| s.iter().map(|f| f.edge).collect())
                .collect(),
            emissions: sets
                .iter()
                .map(|s| emission(s).expect("candidate sets must be non-empty"))
                .collect(),
            begins: sets
                .iter()
                .map(|s| {
                    s.iter()
                        .map(|f| begin_durations(f, net.edge(f.edge), dists.get(f.edge)))
                        .collect()
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    fn gap(&self, k: usize) -> u32 {
        u32::try_from(self.times[k] - self.times[k - 1]).expect("timestamps must increase")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ViterbiPath {
    /// `(candidate index, remaining duration)` per location.
    pub states: Vec<(usize, u32)>,
    pub log_prob: f64,
    /// No path had non-zero probability; states hold per-location
    /// max-emission candidates with zero durations.
    pub fallback: bool,
}

#[derive(Debug, Clone, Copy)]
struct Node {
    lp: f64,
    back: (usize, u32),
}

/// Keeps the better of two candidate nodes; ties go to the smaller
/// predecessor `(candidate, duration)`.
fn offer(slot: &mut BTreeMap<u32, Node>, d: u32, cand: Node) {
    if cand.lp == f64::NEG_INFINITY {
        return;
    }
    slot.entry(d)
        .and_modify(|cur| {
            if cand.lp > cur.lp || (cand.lp == cur.lp && cand.back < cur.back) {
                *cur = cand;
            }
        })
        .or_insert(cand);
}

pub fn viterbi<T: TransitionSource + ?Sized>(tr: &Trellis, src: &mut T) -> ViterbiPath {
    let n = tr.len();
    if n == 0 {
        return ViterbiPath {
            states: Vec::new(),
            log_prob: 0.0,
            fallback: false,
        };
    }
    let mut layers: Vec<Vec<BTreeMap<u32, Node>>> = Vec::with_capacity(n);
    let init = -(tr.edges[0].len() as f64).ln();
    layers.push(
        (0..tr.edges[0].len())
            .map(|j| {
                let mut slot = BTreeMap::new();
                let le = tr.emissions[0][j].ln();
                for &(d, p) in &tr.begins[0][j] {
                    offer(
                        &mut slot,
                        d,
                        Node {
                            lp: init + le + p.ln(),
                            back: (0, 0),
                        },
                    );
                }
                slot
            })
            .collect(),
    );

    for k in 1..n {
        let dt = tr.gap(k);
        let prev = &layers[k - 1];
        let m = tr.edges[k].len();
        let mut next: Vec<BTreeMap<u32, Node>> = vec![BTreeMap::new(); m];

        // Best "leaving" state of every source: lowest d wins ties.
        let mut best_in: Vec<Option<Node>> = vec![None; m];
        for (i, slot) in prev.iter().enumerate() {
            let leaving =
                slot.range(..dt)
                    .fold(None::<(u32, f64)>, |best, (&d, node)| match best {
                        Some((_, lp)) if lp >= node.lp => best,
                        _ => Some((d, node.lp)),
                    });
            let Some((d_best, lp_best)) = leaving else {
                continue;
            };
            let probs = src.probabilities(k, i);
            for (j, &p) in probs.iter().enumerate() {
                let lp = lp_best + p.ln();
                if lp == f64::NEG_INFINITY {
                    continue;
                }
                let cand = Node {
                    lp,
                    back: (i, d_best),
                };
                match &best_in[j] {
                    Some(cur) if cur.lp >= lp => {}
                    _ => best_in[j] = Some(cand),
                }
            }
        }
        for (j, best) in best_in.iter().enumerate() {
            if let Some(b) = best {
                for &(d, p) in &tr.begins[k][j] {
                    offer(
                        &mut next[j],
                        d,
                        Node {
                            lp: b.lp + p.ln(),
                            back: b.back,
                        },
                    );
                }
            }
        }

        // Staying on the same edge.
        for (i, slot) in prev.iter().enumerate() {
            let Some(j) = tr.edges[k].iter().position(|&e| e == tr.edges[k - 1][i]) else {
                continue;
            };
            for (&d, node) in slot.range(dt..) {
                offer(
                    &mut next[j],
                    d - dt,
                    Node {
                        lp: node.lp,
                        back: (i, d),
                    },
                );
            }
        }

        for (j, slot) in next.iter_mut().enumerate() {
            let le = tr.emissions[k][j].ln();
            for node in slot.values_mut() {
                node.lp += le;
            }
            slot.retain(|_, n| n.lp > f64::NEG_INFINITY);
        }
        layers.push(next);
    }

    let mut best: Option<(usize, u32, f64)> = None;
    for (j, slot) in layers[n - 1].iter().enumerate() {
        for (&d, node) in slot {
            if best.is_none_or(|(_, _, lp)| node.lp > lp) {
                best = Some((j, d, node.lp));
            }
        }
    }
    let Some((mut j, mut d, log_prob)) = best else {
        return fallback_path(tr);
    };
    let mut states = vec![(0, 0); n];
    for k in (0..n).rev() {
        states[k] = (j, d);
        let back = layers[k][j][&d].back;
        (j, d) = back;
    }
    ViterbiPath {
        states,
        log_prob,
        fallback: false,
    }
}

fn fallback_path(tr: &Trellis) -> ViterbiPath {
    let states = tr
        .emissions
        .iter()
        .map(|e| {
            let j = e
                .iter()
                .enumerate()
                .fold(0, |b, (j, &p)| if p > e[b] { j } else { b });
            (j, 0)
        })
        .collect();
    ViterbiPath {
        states,
        log_prob: f64::NEG_INFINITY,
        fallback: true,
    }
}

/// Joint log-probability of one complete state path, evaluated in the same
/// order as the dynamic program.
pub fn joint_log_prob<T: TransitionSource + ?Sized>(
    tr: &Trellis,
    src: &mut T,
    states: &[(usize, u32)],
) -> f64 {
    assert_eq!(states.len(), tr.len());
    if states.is_empty() {
        return 0.0;
    }
    let (j0, d0) = states[0];
    let begin0 = duration_prob(0, d0, 1, &tr.begins[0][j0]);
    let mut lp = -(tr.edges[0].len() as f64).ln() + tr.emissions[0][j0].ln() + begin0.ln();
    for k in 1..states.len() {
        let dt = tr.gap(k);
        let (i, d_prev) = states[k - 1];
        let (j, d) = states[k];
        let trans = if d_prev >= dt {
            1.0
        } else {
            src.probabilities(k, i)[j]
        };
        let pe = edge_transition_prob(tr.edges[k - 1][i], tr.edges[k][j], d_prev, dt, trans);
        let pd = duration_prob(d_prev, d, dt, &tr.begins[k][j]);
        if pe == 0.0 || pd == 0.0 {
            return f64::NEG_INFINITY;
        }
        // A forced stay contributes a factor of exactly one.
        if d_prev < dt {
            lp = lp + pe.ln() + pd.ln();
        }
        lp += tr.emissions[k][j].ln();
    }
    lp
}
