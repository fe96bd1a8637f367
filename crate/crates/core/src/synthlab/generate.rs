//! Ground-truth movement and raw observation generation.

use std::collections::BTreeMap;

use rand::distributions::WeightedIndex;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netmodel::{
    uncertainty_radius, CellularLocation, EdgeIdx, NetworkRecord, Point, RoadNetwork,
};
use crate::prob::ShortestPaths;
use crate::rng::stream;
use crate::synthlab::scenario::{Dropout, Scenario};
use crate::ttdist::{DistributionStore, TravelTimeDistribution};

/// True position of an object at one second.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthRow {
    pub object_id: String,
    pub t: i64,
    pub lat: f64,
    pub lon: f64,
    pub eid: u64,
    pub offset_m: f64,
}

#[derive(Debug, Clone)]
pub struct Generated {
    pub network: RoadNetwork,
    pub records: Vec<NetworkRecord>,
    /// Raw observations sorted by time, then object.
    pub raw: Vec<CellularLocation>,
    /// Truth sorted by object, then time.
    pub truth: Vec<TruthRow>,
    /// True speed per edge index before the per-object factor.
    pub edge_speeds: Vec<f64>,
    pub object_factors: BTreeMap<String, f64>,
    /// Edge index per truth row, aligned with `truth`.
    pub truth_edges: Vec<EdgeIdx>,
    /// Planar truth position per truth row, aligned with `truth`.
    pub truth_points: Vec<Point>,
}

pub fn object_id(i: usize) -> String {
    format!("obj{i:04}")
}

impl Generated {
    /// Travel-time distributions implied by the true speeds, covering the
    /// per-object speed factor range with `steps` evenly spaced factors.
    pub fn true_distributions(&self, scenario: &Scenario, steps: usize) -> DistributionStore {
        let (lo, hi) = scenario.object_speed_factor;
        let steps = steps.max(1);
        let dists = self
            .network
            .edges()
            .iter()
            .zip(&self.edge_speeds)
            .map(|(e, &v)| {
                TravelTimeDistribution::from_counts((0..steps).map(|s| {
                    let f = if steps == 1 {
                        0.5 * (lo + hi)
                    } else {
                        lo + (hi - lo) * s as f64 / (steps - 1) as f64
                    };
                    (((e.length_m / (v * f)).ceil() as u32).max(1), 1)
                }))
            })
            .collect();
        DistributionStore::from_vec(dists)
    }

    /// Truth rows grouped per object, each sorted by time.
    pub fn truth_by_object(&self) -> BTreeMap<&str, Vec<usize>> {
        let mut m: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, r) in self.truth.iter().enumerate() {
            m.entry(r.object_id.as_str()).or_default().push(i);
        }
        m
    }
}

/// Moves every object along chained shortest paths between random
/// destinations and observes it according to the scenario.
pub fn generate(scenario: &Scenario, seed: u64) -> Result<Generated> {
    scenario.validate()?;
    let builder = scenario.network.builder();
    let records = builder.records().to_vec();
    let network = builder.build()?;
    let n_v = network.vertices().len();

    let mut speed_rng = stream(seed, &[0x5eed, 1]);
    let (slo, shi) = scenario.speed_fraction;
    let edge_speeds: Vec<f64> = network
        .edges()
        .iter()
        .map(|e| e.speed_limit_mps * speed_rng.gen_range(slo..=shi))
        .collect();

    let u_dist = WeightedIndex::new(scenario.noise.u_weights)
        .map_err(|e| Error::Config(format!("uncertainty weights: {e}")))?;
    let span = i64::from(scenario.duration_s) + i64::from(scenario.truth_tail_s);

    let mut raw = Vec::new();
    let mut truth = Vec::new();
    let mut truth_edges = Vec::new();
    let mut truth_points = Vec::new();
    let mut object_factors = BTreeMap::new();
    for i in 0..scenario.objects {
        let id = object_id(i);
        let mut rng = stream(seed, &[0x0b1e, i as u64]);
        let (flo, fhi) = scenario.object_speed_factor;
        let factor = rng.gen_range(flo..=fhi);
        object_factors.insert(id.clone(), factor);
        let warmup = rng.gen_range(0.0..60.0);
        let needed = warmup + span as f64 + 1.0;

        // Route: chained shortest paths with per-edge traversal times.
        let mut legs: Vec<(EdgeIdx, f64)> = Vec::new();
        let mut total = 0.0;
        let mut at = rng.gen_range(0..n_v);
        let mut attempts = 0;
        while total < needed {
            attempts += 1;
            if attempts > 10_000 {
                return Err(Error::Config(
                    "network too poorly connected to route objects".into(),
                ));
            }
            let dest = rng.gen_range(0..n_v);
            if dest == at {
                continue;
            }
            let sp = ShortestPaths::from_vertex(&network, at, f64::INFINITY);
            let Some(path) = sp.path_to(&network, dest) else {
                continue;
            };
            for e in path {
                let dt = network.edge(e).length_m / (edge_speeds[e] * factor);
                legs.push((e, dt));
                total += dt;
            }
            at = dest;
        }

        // Per-second positions.
        let mut leg = 0usize;
        let mut leg_start = 0.0f64;
        for s in 0..span {
            let clock = warmup + s as f64;
            while clock >= leg_start + legs[leg].1 {
                leg_start += legs[leg].1;
                leg += 1;
            }
            let (e, dt) = legs[leg];
            let edge = network.edge(e);
            let offset = edge.length_m * ((clock - leg_start) / dt).clamp(0.0, 1.0);
            let p = edge.point_at(offset);
            let (lat, lon) = network.unproject(p);
            truth.push(TruthRow {
                object_id: id.clone(),
                t: scenario.start_t + s,
                lat,
                lon,
                eid: edge.id,
                offset_m: offset,
            });
            truth_edges.push(e);
            truth_points.push(p);
        }

        let base = truth.len() - span as usize;
        let observe = |s: i64, rng: &mut rand_chacha::ChaCha8Rng| -> CellularLocation {
            let u = (u_dist.sample(rng) + 1) as u8;
            let r = uncertainty_radius(u).expect("u in 1..=5");
            let p = truth_points[base + s as usize];
            let q = displace(p, r, scenario.noise.sigma_fraction, rng);
            let (lat, lon) = network.unproject(q);
            CellularLocation {
                object_id: id.clone(),
                t: scenario.start_t + s,
                lat,
                lon,
                u,
            }
        };
        let duration = i64::from(scenario.duration_s);
        match scenario.dropout {
            Dropout::None => {
                for s in 0..duration {
                    raw.push(observe(s, &mut rng));
                }
            }
            Dropout::Bernoulli { p } => {
                for s in 0..duration {
                    if rng.gen_bool(p) {
                        raw.push(observe(s, &mut rng));
                    }
                }
            }
            Dropout::FixedGap { gap_s } => {
                let gap = i64::from(gap_s);
                let mut s = rng.gen_range(0..gap);
                while s < duration {
                    raw.push(observe(s, &mut rng));
                    s += gap;
                }
            }
        }
    }
    raw.sort_by(|a, b| a.t.cmp(&b.t).then_with(|| a.object_id.cmp(&b.object_id)));
    Ok(Generated {
        network,
        records,
        raw,
        truth,
        edge_speeds,
        object_factors,
        truth_edges,
        truth_points,
    })
}

/// Moves `p` in a uniform direction by a half-normal distance with scale
/// `sigma_fraction * r`, redrawn until it is at most `r - 1`. The metre of
/// slack keeps the true position inside a retrievable (≥ 1 m) fragment.
fn displace<R: Rng + ?Sized>(p: Point, r: f64, sigma_fraction: f64, rng: &mut R) -> Point {
    if sigma_fraction <= 0.0 {
        return p;
    }
    let normal = Normal::new(0.0, sigma_fraction * r).expect("positive scale");
    let dist = loop {
        let d: f64 = normal.sample(rng);
        if d.abs() <= r - 1.0 {
            break d.abs();
        }
    };
    let a = rng.gen_range(0.0..std::f64::consts::TAU);
    Point::new(p.x + dist * a.cos(), p.y + dist * a.sin())
}
