//! Physical locations for every second of a window.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::netmodel::{EdgeFragment, Point, RoadNetwork};
use crate::prob::{shortest_route, NetPos, ParticleTrace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    ObservedCleansed,
    InferredMissing,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::ObservedCleansed => "observed_cleansed",
            Self::InferredMissing => "inferred_missing",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CleanedRecord {
    pub t: i64,
    pub lat: f64,
    pub lon: f64,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CleanedTrajectory {
    pub object_id: String,
    pub records: Vec<CleanedRecord>,
    /// Fragment assigned to each location used for inference.
    pub assignment: Vec<EdgeFragment>,
}

/// Position of one inferred location sequence at the seconds in `[start, end)`.
///
/// Observation times map to their fragment centres. Seconds between two
/// locations read the breadcrumb of one randomly chosen particle that made the
/// corresponding move (`gap_traces[k]` covers locations `k` and `k + 1`); with
/// no such particle the object moves at constant speed along the shortest
/// route between the two centres. Seconds outside the located span hold the
/// nearest location.
pub fn infer_locations<R: Rng + ?Sized>(
    object_id: &str,
    net: &RoadNetwork,
    assignment: &[EdgeFragment],
    times: &[i64],
    gap_traces: &[&[ParticleTrace]],
    window: (i64, i64),
    rng: &mut R,
) -> CleanedTrajectory {
    assert_eq!(assignment.len(), times.len());
    assert!(!assignment.is_empty(), "at least one location is needed");
    assert!(gap_traces.len() + 1 >= assignment.len());
    let centre = |k: usize| {
        let f = &assignment[k];
        net.edge(f.edge).point_at(f.center())
    };
    let (start, end) = window;
    let mut records = Vec::with_capacity((end - start).max(0) as usize);
    let last = assignment.len() - 1;
    let mut k = 0usize;
    let mut fill: Option<Vec<Point>> = None;
    for t in start..end {
        while k < last && times[k + 1] <= t {
            k += 1;
            fill = None;
        }
        let (p, provenance) = if times[k] == t {
            (centre(k), Provenance::ObservedCleansed)
        } else if t < times[0] {
            (centre(0), Provenance::InferredMissing)
        } else if k == last {
            (centre(last), Provenance::InferredMissing)
        } else {
            let path =
                fill.get_or_insert_with(|| gap_path(net, assignment, times, k, gap_traces[k], rng));
            (path[(t - times[k]) as usize], Provenance::InferredMissing)
        };
        let (lat, lon) = net.unproject(p);
        records.push(CleanedRecord {
            t,
            lat,
            lon,
            provenance,
        });
    }
    CleanedTrajectory {
        object_id: object_id.to_string(),
        records,
        assignment: assignment.to_vec(),
    }
}

/// Planar positions for every second from `times[k]` to `times[k + 1]`.
fn gap_path<R: Rng + ?Sized>(
    net: &RoadNetwork,
    assignment: &[EdgeFragment],
    times: &[i64],
    k: usize,
    traces: &[ParticleTrace],
    rng: &mut R,
) -> Vec<Point> {
    let dt = (times[k + 1] - times[k]) as usize;
    if let Some(trace) = traces.choose(rng) {
        return trace
            .crumbs
            .iter()
            .take(dt + 1)
            .map(|c| net.edge(c.edge).point_at(c.offset))
            .collect();
    }
    let (a, b) = (&assignment[k], &assignment[k + 1]);
    let from = NetPos {
        edge: a.edge,
        offset: a.center(),
    };
    let to = NetPos {
        edge: b.edge,
        offset: b.center(),
    };
    match shortest_route(net, from, to) {
        Some(route) => (0..=dt)
            .map(|s| route.point_at(net, route.length_m * s as f64 / dt as f64))
            .collect(),
        // Unreachable: hold each end for the nearer half of the gap.
        None => {
            let (pa, pb) = (
                net.edge(a.edge).point_at(a.center()),
                net.edge(b.edge).point_at(b.center()),
            );
            (0..=dt).map(|s| if 2 * s < dt { pa } else { pb }).collect()
        }
    }
}
