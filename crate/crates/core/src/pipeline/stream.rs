//! Windowed processing of a whole trajectory stream.

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::netmodel::{CellularLocation, RoadNetwork};
use crate::pipeline::io::OutputRow;
use crate::pipeline::window::{
    run_window, ObjectContext, PhaseTimings, ServiceWindow, WindowStats,
};
use crate::pipeline::Config;
use crate::ttdist::DistributionStore;

#[derive(Debug, Clone, Default, Serialize)]
pub struct StreamReport {
    pub windows: usize,
    /// Records dropped because their time did not increase within the object.
    pub dropped: usize,
    pub samples: usize,
    pub stats: WindowStats,
    pub timings: PhaseTimings,
}

#[derive(Debug, Clone, Default)]
pub struct StreamOutput {
    pub rows: Vec<OutputRow>,
    pub report: StreamReport,
}

/// Keeps, per object and in input order, only records whose time exceeds
/// the object's last kept time. Returns the kept records grouped by object
/// and the number dropped.
pub fn group_monotonic(
    locations: Vec<CellularLocation>,
) -> (BTreeMap<String, Vec<CellularLocation>>, usize) {
    let mut by_obj: BTreeMap<String, Vec<CellularLocation>> = BTreeMap::new();
    let mut dropped = 0;
    for cl in locations {
        let list = by_obj.entry(cl.object_id.clone()).or_default();
        if list.last().is_some_and(|last| cl.t <= last.t) {
            log::debug!(
                "dropping non-monotonic record of {} at t={}",
                cl.object_id,
                cl.t
            );
            dropped += 1;
        } else {
            list.push(cl);
        }
    }
    (by_obj, dropped)
}

fn slice_between(list: &[CellularLocation], from: i64, to: i64) -> &[CellularLocation] {
    let a = list.partition_point(|c| c.t < from);
    let b = list.partition_point(|c| c.t < to);
    &list[a..b]
}

/// Cleanses a stream window by window. Windows are contiguous and start at
/// the earliest timestamp; distributions learn from each window's samples
/// after all of its objects are cleansed.
pub fn run_stream(
    locations: Vec<CellularLocation>,
    net: &RoadNetwork,
    dists: &mut DistributionStore,
    config: &Config,
) -> Result<StreamOutput> {
    config.validate()?;
    if dists.len() != net.edges().len() {
        return Err(Error::Config(format!(
            "distribution store covers {} edges, network has {}",
            dists.len(),
            net.edges().len()
        )));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;

    let (by_obj, dropped) = group_monotonic(locations);
    let mut out = StreamOutput::default();
    out.report.dropped = dropped;
    if dropped > 0 {
        log::warn!("dropped {dropped} records with non-increasing timestamps");
    }
    let (Some(t0), Some(t1)) = (
        by_obj.values().filter_map(|v| v.first()).map(|c| c.t).min(),
        by_obj.values().filter_map(|v| v.last()).map(|c| c.t).max(),
    ) else {
        return Ok(out);
    };
    let w = i64::from(config.window_len);
    let n_windows = (t1 - t0) / w + 1;
    let mut anchors: HashMap<String, (i64, crate::netmodel::EdgeFragment)> = HashMap::new();

    for wi in 0..n_windows {
        let start = t0 + wi * w;
        let end = start + w;
        let mut window = ServiceWindow {
            id: wi as u64,
            start_t: start,
            end_t: end,
            objects: BTreeMap::new(),
        };
        let mut context = BTreeMap::new();
        for (id, list) in &by_obj {
            let inside = slice_between(list, start, end);
            if inside.is_empty() {
                continue;
            }
            window.objects.insert(id.clone(), inside.to_vec());
            let ctx = ObjectContext {
                anchor: anchors.get(id).copied().filter(|&(t, _)| t >= start - w),
                lookahead: slice_between(list, end, end + w).first().cloned(),
            };
            context.insert(id.clone(), ctx);
        }
        let res = pool.install(|| run_window(&window, &context, net, dists, config));

        let clock = Instant::now();
        dists.apply_batch(&res.samples, config.epsilon, config.delta);
        out.report.timings.ol += clock.elapsed();

        out.report.windows += 1;
        out.report.samples += res.samples.len();
        out.report.stats.add(&res.stats);
        out.report.timings.add(&res.timings);
        anchors.extend(res.anchors);
        for traj in res.trajectories {
            out.rows.extend(traj.records.iter().map(|r| OutputRow {
                object_id: traj.object_id.clone(),
                t: r.t,
                lat: r.lat,
                lon: r.lon,
                provenance: r.provenance,
            }));
        }
    }
    Ok(out)
}
