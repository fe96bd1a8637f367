//! Per-edge discrete travel-time distributions and their online learning.
//!
//! A distribution is a multiset of integer travel times (seconds) with
//! counts. New measurements are merged in once per service window and the
//! support is then narrowed from its extremes until its range is compatible
//! with the Hoeffding bound for the remaining sample count.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netmodel::network::Edge;
use crate::netmodel::{EdgeFragment, EdgeIdx, RoadNetwork};
use crate::rng;

/// Lower speed bound for initial sampling, in m/s.
pub const INIT_MIN_SPEED_MPS: f64 = 1.0;
/// Speeds below this are treated as a stationary object.
pub const STATIONARY_SPEED_MPS: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TravelTimeDistribution {
    /// `(seconds, count)`, strictly increasing in seconds, counts ≥ 1.
    entries: Vec<(u32, u64)>,
}

impl TravelTimeDistribution {
    /// Builds a distribution from `(t, count)` pairs in any order; duplicate
    /// times are merged and zero counts dropped.
    pub fn from_counts<I: IntoIterator<Item = (u32, u64)>>(pairs: I) -> Self {
        let mut map = BTreeMap::new();
        for (t, c) in pairs {
            if c > 0 {
                *map.entry(t).or_insert(0u64) += c;
            }
        }
        Self {
            entries: map.into_iter().collect(),
        }
    }

    pub fn single(t: u32) -> Self {
        Self {
            entries: vec![(t, 1)],
        }
    }

    pub fn entries(&self) -> &[(u32, u64)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of distinct travel-time values.
    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn total(&self) -> u64 {
        self.entries.iter().map(|&(_, c)| c).sum()
    }

    pub fn range(&self) -> u32 {
        match (self.entries.first(), self.entries.last()) {
            (Some(a), Some(b)) => b.0 - a.0,
            _ => 0,
        }
    }

    pub fn probability(&self, t: u32) -> f64 {
        match self.entries.binary_search_by_key(&t, |&(v, _)| v) {
            Ok(i) => self.entries[i].1 as f64 / self.total() as f64,
            Err(_) => 0.0,
        }
    }

    /// `(t, p_t)` pairs.
    pub fn probabilities(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        let n = self.total() as f64;
        self.entries.iter().map(move |&(t, c)| (t, c as f64 / n))
    }

    pub fn expected_mean(&self) -> f64 {
        let n = self.total() as f64;
        self.entries
            .iter()
            .map(|&(t, c)| f64::from(t) * c as f64)
            .sum::<f64>()
            / n
    }

    /// Draws a travel time with probability `count / total`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        assert!(!self.entries.is_empty(), "sampling an empty distribution");
        let mut k = rng.gen_range(0..self.total());
        for &(t, c) in &self.entries {
            if k < c {
                return t;
            }
            k -= c;
        }
        unreachable!()
    }
}

/// Initial distribution from the edge's speed limit: `n_samples` speeds drawn
/// from `U(min_speed, limit)` become travel times `ceil(length / speed)`.
pub fn init_distribution<R: Rng + ?Sized>(
    edge: &Edge,
    n_samples: usize,
    min_speed_mps: f64,
    rng: &mut R,
) -> TravelTimeDistribution {
    let hi = edge.speed_limit_mps;
    let lo = min_speed_mps.min(hi);
    TravelTimeDistribution::from_counts((0..n_samples.max(1)).map(|_| {
        let s = rng.gen_range(lo..=hi);
        (ceil_secs(edge.length_m / s), 1)
    }))
}

fn ceil_secs(t: f64) -> u32 {
    (t.ceil() as u32).max(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TravelTimeSample {
    pub edge: EdgeIdx,
    /// Full-edge travel time in (real) seconds.
    pub seconds: f64,
    pub window_id: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum MeasureRejection {
    #[error("fragments lie on different edges")]
    EdgeMismatch,
    #[error("timestamps are not increasing")]
    NonIncreasingTime,
    #[error("object moved backwards along the edge")]
    Backward,
    #[error("object is stationary")]
    Stationary,
}

/// Full-edge travel time implied by two most-compact fragments on the same
/// edge observed at `t_a < t_b`.
pub fn measure_travel_time(
    frag_a: &EdgeFragment,
    t_a: i64,
    frag_b: &EdgeFragment,
    t_b: i64,
    edge: &Edge,
    window_id: u64,
) -> std::result::Result<TravelTimeSample, MeasureRejection> {
    if frag_a.edge != frag_b.edge {
        return Err(MeasureRejection::EdgeMismatch);
    }
    if t_b <= t_a {
        return Err(MeasureRejection::NonIncreasingTime);
    }
    let moved = frag_b.center() - frag_a.center();
    if moved < 0.0 {
        return Err(MeasureRejection::Backward);
    }
    let speed = moved / (t_b - t_a) as f64;
    if speed < STATIONARY_SPEED_MPS {
        return Err(MeasureRejection::Stationary);
    }
    Ok(TravelTimeSample {
        edge: frag_a.edge,
        seconds: edge.length_m / speed,
        window_id,
    })
}

/// Admissible support range for `n` samples: `sqrt(2 n eps^2 / ln(1/delta))`.
pub fn hoeffding_range(n: u64, epsilon: f64, delta: f64) -> f64 {
    (2.0 * n as f64 * epsilon * epsilon / (1.0 / delta).ln()).sqrt()
}

/// Iteratively drops the extreme value whose removal shrinks the range most,
/// as long as the range left behind still exceeds the Hoeffding range of the
/// remaining count. Input must be sorted by time with distinct times.
pub fn narrow(entries: &[(u32, u64)], epsilon: f64, delta: f64) -> Vec<(u32, u64)> {
    let mut lo = 0usize;
    let mut hi = entries.len();
    let mut n: u64 = entries.iter().map(|&(_, c)| c).sum();
    while hi - lo > 2 {
        let (tl, cl) = entries[lo];
        let tl_next = entries[lo + 1].0;
        let (tr, cr) = entries[hi - 1];
        let tr_prev = entries[hi - 2].0;
        let left_gap = tl_next - tl;
        let right_gap = tr - tr_prev;
        if left_gap > right_gap {
            if f64::from(tr - tl_next) > hoeffding_range(n - cl, epsilon, delta) {
                lo += 1;
                n -= cl;
                continue;
            }
        } else if f64::from(tr_prev - tl) > hoeffding_range(n - cr, epsilon, delta) {
            hi -= 1;
            n -= cr;
            continue;
        }
        break;
    }
    entries[lo..hi].to_vec()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistributionUpdate {
    pub distribution: TravelTimeDistribution,
    pub mean: f64,
}

/// Merges new measurements (ceiled to whole seconds) into `dist` and narrows
/// the result. An empty batch leaves the distribution untouched.
pub fn update_distribution(
    dist: &TravelTimeDistribution,
    new_samples: &[TravelTimeSample],
    epsilon: f64,
    delta: f64,
) -> DistributionUpdate {
    if new_samples.is_empty() {
        return DistributionUpdate {
            distribution: dist.clone(),
            mean: dist.expected_mean(),
        };
    }
    let merged = TravelTimeDistribution::from_counts(
        dist.entries
            .iter()
            .copied()
            .chain(new_samples.iter().map(|s| (ceil_secs(s.seconds), 1))),
    );
    let distribution = TravelTimeDistribution {
        entries: narrow(&merged.entries, epsilon, delta),
    };
    let mean = distribution.expected_mean();
    DistributionUpdate { distribution, mean }
}

/// One serialized distribution record: `{"eid": id, "entries": [[t, count], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionRecord {
    pub eid: u64,
    pub entries: Vec<(u32, u64)>,
}

/// The mapping from edges to travel-time distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionStore {
    dists: Vec<TravelTimeDistribution>,
    rounds: u64,
}

impl DistributionStore {
    /// Initializes every edge from its speed limit. Each edge draws from its
    /// own stream keyed by its id.
    pub fn initialize(net: &RoadNetwork, n_samples: usize, seed: u64) -> Self {
        let dists = net
            .edges()
            .iter()
            .map(|e| {
                let mut r = rng::stream(seed, &[0x1a17, e.id]);
                init_distribution(e, n_samples, INIT_MIN_SPEED_MPS, &mut r)
            })
            .collect();
        Self { dists, rounds: 0 }
    }

    pub fn from_vec(dists: Vec<TravelTimeDistribution>) -> Self {
        Self { dists, rounds: 0 }
    }

    pub fn get(&self, edge: EdgeIdx) -> &TravelTimeDistribution {
        &self.dists[edge]
    }

    pub fn set(&mut self, edge: EdgeIdx, dist: TravelTimeDistribution) {
        self.dists[edge] = dist;
    }

    pub fn len(&self) -> usize {
        self.dists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dists.is_empty()
    }

    /// Number of batch update rounds applied so far.
    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    /// Applies one window's worth of samples. Edges are processed in index
    /// order; returns the number of edges that received samples.
    pub fn apply_batch(&mut self, samples: &[TravelTimeSample], epsilon: f64, delta: f64) -> usize {
        let mut by_edge: BTreeMap<EdgeIdx, Vec<TravelTimeSample>> = BTreeMap::new();
        for s in samples {
            by_edge.entry(s.edge).or_default().push(*s);
        }
        for (&edge, batch) in &by_edge {
            let upd = update_distribution(&self.dists[edge], batch, epsilon, delta);
            self.dists[edge] = upd.distribution;
        }
        self.rounds += 1;
        by_edge.len()
    }

    pub fn to_records(&self, net: &RoadNetwork) -> Vec<DistributionRecord> {
        self.dists
            .iter()
            .enumerate()
            .map(|(i, d)| DistributionRecord {
                eid: net.edge(i).id,
                entries: d.entries.clone(),
            })
            .collect()
    }

    /// Overrides distributions for the edges named in `records`.
    pub fn apply_records(
        &mut self,
        net: &RoadNetwork,
        records: &[DistributionRecord],
    ) -> Result<()> {
        for r in records {
            let idx = net
                .edge_index(r.eid)
                .ok_or_else(|| Error::Input(format!("distribution for unknown edge {}", r.eid)))?;
            let d = TravelTimeDistribution::from_counts(r.entries.iter().copied());
            if d.is_empty() || d.entries[0].0 == 0 {
                return Err(Error::Input(format!(
                    "invalid distribution for edge {}",
                    r.eid
                )));
            }
            self.dists[idx] = d;
        }
        Ok(())
    }

    pub fn save(&self, net: &RoadNetwork, path: impl AsRef<Path>) -> Result<()> {
        let w = BufWriter::new(File::create(path)?);
        serde_json::to_writer(w, &self.to_records(net))?;
        Ok(())
    }

    pub fn load_records(path: impl AsRef<Path>) -> Result<Vec<DistributionRecord>> {
        let r = BufReader::new(File::open(path)?);
        Ok(serde_json::from_reader(r)?)
    }
}
