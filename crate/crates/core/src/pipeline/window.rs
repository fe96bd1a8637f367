//! Cleansing of one service window.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::motion::{
    infer_edge_sequence, infer_locations, CleanedRecord, CleanedTrajectory, ParticleTransitions,
    Provenance,
};
use crate::netmodel::{retrieve_fragments, CellularLocation, EdgeFragment, Point, RoadNetwork};
use crate::pipeline::Config;
use crate::pruning::{compact_samples, extract_compact_runs, prune_trajectory, CandidateSequence};
use crate::rng::{stable_hash, stream};
use crate::ttdist::{DistributionStore, TravelTimeSample};

/// Time slice `[start_t, end_t)` with each object's raw locations inside it,
/// sorted by time.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ServiceWindow {
    pub id: u64,
    pub start_t: i64,
    pub end_t: i64,
    pub objects: BTreeMap<String, Vec<CellularLocation>>,
}

/// Context an object carries across a window boundary. It only shapes
/// inference inside the window; nothing outside the window is emitted.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ObjectContext {
    /// Last fragment assigned in the previous window, pinned as a fixed
    /// starting location.
    pub anchor: Option<(i64, EdgeFragment)>,
    /// First raw location after the window.
    pub lookahead: Option<CellularLocation>,
}

/// Accumulated per-phase processing time: data acquisition (candidate
/// retrieval and pruning), online learning, probability computation and
/// inference.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PhaseTimings {
    pub da: Duration,
    pub ol: Duration,
    pub pc: Duration,
    pub inference: Duration,
}

impl PhaseTimings {
    pub fn add(&mut self, other: &PhaseTimings) {
        self.da += other.da;
        self.ol += other.ol;
        self.pc += other.pc;
        self.inference += other.inference;
    }
}

impl Serialize for PhaseTimings {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = BTreeMap::new();
        m.insert("DA", self.da.as_secs_f64());
        m.insert("OL", self.ol.as_secs_f64());
        m.insert("PC", self.pc.as_secs_f64());
        m.insert("IN", self.inference.as_secs_f64());
        m.serialize(s)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct WindowStats {
    pub objects: usize,
    /// Objects skipped for lack of in-window locations.
    pub skipped: usize,
    pub locations: usize,
    /// Locations with no candidate fragment at all.
    pub unmatched: usize,
    /// Locations whose pruned set is a singleton.
    pub compact: usize,
    pub degraded: usize,
    pub fallback: usize,
}

impl WindowStats {
    pub fn add(&mut self, o: &WindowStats) {
        self.objects += o.objects;
        self.skipped += o.skipped;
        self.locations += o.locations;
        self.unmatched += o.unmatched;
        self.compact += o.compact;
        self.degraded += o.degraded;
        self.fallback += o.fallback;
    }
}

#[derive(Debug, Clone, Default)]
pub struct WindowResult {
    /// One trajectory per object with in-window locations, by object id.
    pub trajectories: Vec<CleanedTrajectory>,
    pub samples: Vec<TravelTimeSample>,
    /// Last in-window assignment per object, for the next window.
    pub anchors: BTreeMap<String, (i64, EdgeFragment)>,
    pub stats: WindowStats,
    pub timings: PhaseTimings,
}

struct ObjectResult {
    trajectory: CleanedTrajectory,
    samples: Vec<TravelTimeSample>,
    anchor: Option<(i64, EdgeFragment)>,
    stats: WindowStats,
    timings: PhaseTimings,
}

/// Cleanses every object of the window against one distribution snapshot.
/// Objects run on the current rayon pool; the result does not depend on
/// scheduling. Learning from the returned samples is left to the caller.
pub fn run_window(
    window: &ServiceWindow,
    context: &BTreeMap<String, ObjectContext>,
    net: &RoadNetwork,
    dists: &DistributionStore,
    config: &Config,
) -> WindowResult {
    let none = ObjectContext::default();
    let results: Vec<Option<ObjectResult>> = window
        .objects
        .par_iter()
        .map(|(id, obs)| {
            let ctx = context.get(id).unwrap_or(&none);
            process_object(window, id, obs, ctx, net, dists, config)
        })
        .collect();
    let mut out = WindowResult::default();
    for (r, id) in results.into_iter().zip(window.objects.keys()) {
        let Some(r) = r else {
            log::debug!(
                "window {}: object {id} has no locations, skipped",
                window.id
            );
            out.stats.skipped += 1;
            continue;
        };
        out.samples.extend(r.samples);
        if let Some(a) = r.anchor {
            out.anchors.insert(id.clone(), a);
        }
        out.stats.add(&r.stats);
        out.timings.add(&r.timings);
        out.trajectories.push(r.trajectory);
    }
    out
}

fn process_object(
    window: &ServiceWindow,
    id: &str,
    obs: &[CellularLocation],
    ctx: &ObjectContext,
    net: &RoadNetwork,
    dists: &DistributionStore,
    config: &Config,
) -> Option<ObjectResult> {
    let obs: Vec<&CellularLocation> = obs
        .iter()
        .filter(|cl| cl.t >= window.start_t && cl.t < window.end_t)
        .collect();
    if obs.is_empty() {
        return None;
    }
    let mut stats = WindowStats {
        objects: 1,
        locations: obs.len(),
        ..WindowStats::default()
    };
    let mut timings = PhaseTimings::default();
    let clock = Instant::now();

    let mut sets = Vec::new();
    let mut times = Vec::new();
    let mut points = Vec::new();
    if let Some((t, f)) = ctx.anchor {
        sets.push(vec![f]);
        times.push(t);
        points.push(net.edge(f.edge).point_at(f.center()));
    }
    let first_obs = sets.len();
    let mut add = |cl: &CellularLocation, sets: &mut Vec<Vec<EdgeFragment>>| -> bool {
        let cands = retrieve_fragments(cl, net, config.min_fragment_m).unwrap_or_default();
        if cands.is_empty() {
            return false;
        }
        sets.push(cands);
        times.push(cl.t);
        points.push(net.project(cl.lat, cl.lon));
        true
    };
    for cl in &obs {
        if !add(cl, &mut sets) {
            stats.unmatched += 1;
        }
    }
    let end_obs = sets.len();
    if end_obs == first_obs {
        timings.da = clock.elapsed();
        return Some(ObjectResult {
            trajectory: hold_raw(window, id, &obs, net),
            samples: Vec::new(),
            anchor: None,
            stats,
            timings,
        });
    }
    if let Some(cl) = &ctx.lookahead {
        add(cl, &mut sets);
    }
    let seq = prune_trajectory(&sets, &times, net, config.v_max);
    timings.da = clock.elapsed();

    let clock = Instant::now();
    let keys = [window.id, stable_hash(id)];
    let mut transitions = ParticleTransitions::new(
        net,
        dists,
        &seq.sets,
        &times,
        &points,
        config.transition_params(),
        config.policy,
        config.seed,
        &keys,
    );
    let inferred = infer_edge_sequence(&seq.sets, &times, net, dists, &mut transitions);
    let gaps: Vec<_> = (1..inferred.candidates.len())
        .map(|k| {
            let (i, j) = (inferred.candidates[k - 1], inferred.candidates[k]);
            transitions.estimate(k, i).traces[j].clone()
        })
        .collect();
    let gap_refs: Vec<&[_]> = gaps.iter().map(Vec::as_slice).collect();
    let mut rng = stream(config.seed, &[window.id, stable_hash(id), 0xf111]);
    let trajectory = infer_locations(
        id,
        net,
        &inferred.fragments,
        &times,
        &gap_refs,
        (window.start_t, window.end_t),
        &mut rng,
    );
    timings.pc = transitions.elapsed();
    timings.inference = clock.elapsed().saturating_sub(timings.pc);

    let own = CandidateSequence {
        sets: seq.sets[first_obs..end_obs].to_vec(),
        times: times[first_obs..end_obs].to_vec(),
        degraded: seq.degraded[first_obs..end_obs].to_vec(),
        infeasible: seq.infeasible,
    };
    let runs = extract_compact_runs(&own);
    stats.compact = runs.singletons.len();
    stats.degraded = usize::from(seq.is_degraded());
    stats.fallback = usize::from(inferred.fallback);
    let samples = compact_samples(&own, &runs, net, window.id);
    let anchor = Some((times[end_obs - 1], inferred.fragments[end_obs - 1]));
    Some(ObjectResult {
        trajectory,
        samples,
        anchor,
        stats,
        timings,
    })
}

/// Output for an object none of whose locations is near the network: raw
/// positions, held between observations.
fn hold_raw(
    window: &ServiceWindow,
    id: &str,
    obs: &[&CellularLocation],
    net: &RoadNetwork,
) -> CleanedTrajectory {
    let mut k = 0;
    let records = (window.start_t..window.end_t)
        .map(|t| {
            while k + 1 < obs.len() && obs[k + 1].t <= t {
                k += 1;
            }
            let p: Point = net.project(obs[k].lat, obs[k].lon);
            let (lat, lon) = net.unproject(p);
            CleanedRecord {
                t,
                lat,
                lon,
                provenance: if obs[k].t == t {
                    Provenance::ObservedCleansed
                } else {
                    Provenance::InferredMissing
                },
            }
        })
        .collect();
    CleanedTrajectory {
        object_id: id.to_string(),
        records,
        assignment: Vec::new(),
    }
}
