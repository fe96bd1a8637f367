//! Accuracy metrics against ground truth.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netmodel::Projection;

/// Upper edges of the deviation buckets in metres; the last bucket is open.
pub const BUCKET_EDGES_M: [f64; 5] = [50.0, 100.0, 150.0, 200.0, 300.0];
pub const BUCKET_LABELS: [&str; 6] = ["<=50", "50-100", "100-150", "150-200", "200-300", ">300"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationReport {
    pub count: usize,
    pub mean_m: f64,
    pub median_m: f64,
    pub labels: Vec<String>,
    /// Fraction of points per bucket; sums to 1 when `count > 0`.
    pub fractions: Vec<f64>,
}

impl DeviationReport {
    pub fn from_deviations(mut devs: Vec<f64>) -> Self {
        let mut counts = [0usize; 6];
        for &d in &devs {
            let b = BUCKET_EDGES_M.iter().position(|&e| d <= e).unwrap_or(5);
            counts[b] += 1;
        }
        let n = devs.len();
        devs.sort_by(f64::total_cmp);
        let median = match n {
            0 => 0.0,
            _ if n % 2 == 1 => devs[n / 2],
            _ => 0.5 * (devs[n / 2 - 1] + devs[n / 2]),
        };
        Self {
            count: n,
            mean_m: if n == 0 {
                0.0
            } else {
                devs.iter().sum::<f64>() / n as f64
            },
            median_m: median,
            labels: BUCKET_LABELS.iter().map(|s| s.to_string()).collect(),
            fractions: counts
                .iter()
                .map(|&c| if n == 0 { 0.0 } else { c as f64 / n as f64 })
                .collect(),
        }
    }

    /// Share of points within 50 m.
    pub fn within_50(&self) -> f64 {
        self.fractions[0]
    }
}

/// A timestamped position of an object.
pub trait Located {
    fn key(&self) -> (&str, i64);
    fn lat_lon(&self) -> (f64, f64);
}

impl Located for crate::pipeline::OutputRow {
    fn key(&self) -> (&str, i64) {
        (&self.object_id, self.t)
    }
    fn lat_lon(&self) -> (f64, f64) {
        (self.lat, self.lon)
    }
}

impl Located for crate::netmodel::CellularLocation {
    fn key(&self) -> (&str, i64) {
        (&self.object_id, self.t)
    }
    fn lat_lon(&self) -> (f64, f64) {
        (self.lat, self.lon)
    }
}

impl Located for crate::synthlab::TruthRow {
    fn key(&self) -> (&str, i64) {
        (&self.object_id, self.t)
    }
    fn lat_lon(&self) -> (f64, f64) {
        (self.lat, self.lon)
    }
}

/// Planar distance of every point to the truth at the same object and
/// second, using a local projection at each truth point. A point with no
/// truth counterpart is an error.
pub fn deviations<A: Located, B: Located>(points: &[A], truth: &[B]) -> Result<Vec<f64>> {
    let index: HashMap<(&str, i64), (f64, f64)> =
        truth.iter().map(|r| (r.key(), r.lat_lon())).collect();
    points
        .iter()
        .map(|p| {
            let (id, t) = p.key();
            let &(tlat, tlon) = index
                .get(&(id, t))
                .ok_or_else(|| Error::Input(format!("no truth for object {id} at t={t}")))?;
            let (lat, lon) = p.lat_lon();
            Ok(Projection::new(tlat, tlon).project(lat, lon).norm())
        })
        .collect()
}

pub fn deviation_report<A: Located, B: Located>(
    points: &[A],
    truth: &[B],
) -> Result<DeviationReport> {
    Ok(DeviationReport::from_deviations(deviations(points, truth)?))
}

/// Mean of `(p_max - p_truth) / p_max` over the cases whose truth is among
/// the candidates. Each case is `(probabilities, truth index)`; a `None`
/// index marks the truth as absent. Returns the ratio and the number of
/// excluded cases.
pub fn probability_difference_ratio(cases: &[(Vec<f64>, Option<usize>)]) -> (f64, usize) {
    let mut sum = 0.0;
    let mut used = 0usize;
    let mut excluded = 0usize;
    for (probs, truth) in cases {
        let Some(j) = *truth else {
            excluded += 1;
            continue;
        };
        let max = probs.iter().copied().fold(0.0, f64::max);
        if max <= 0.0 {
            excluded += 1;
            continue;
        }
        sum += (max - probs[j]) / max;
        used += 1;
    }
    (if used == 0 { 0.0 } else { sum / used as f64 }, excluded)
}

/// Emission variant of [`probability_difference_ratio`].
pub fn pdr_ep(cases: &[(Vec<f64>, Option<usize>)]) -> (f64, usize) {
    probability_difference_ratio(cases)
}

/// Transition variant of [`probability_difference_ratio`].
pub fn pdr_tp(cases: &[(Vec<f64>, Option<usize>)]) -> (f64, usize) {
    probability_difference_ratio(cases)
}

/// Relative error `|narrowed - full| / full` of a narrowed mean.
pub fn accuracy_loss(narrowed_mean: f64, full_mean: f64) -> f64 {
    (narrowed_mean - full_mean).abs() / full_mean
}
