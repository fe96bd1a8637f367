//! Synthetic cities with ground truth, and accuracy metrics.

pub mod generate;
pub mod metrics;
pub mod scenario;

pub use generate::{generate, object_id, Generated, TruthRow};
pub use metrics::{
    accuracy_loss, deviation_report, deviations, pdr_ep, pdr_tp, DeviationReport, Located,
};
pub use scenario::{Dropout, NetworkSpec, NoiseSpec, Scenario};

use std::path::Path;

use crate::error::{Error, Result};

pub fn write_truth(path: impl AsRef<Path>, rows: &[TruthRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_truth(path: impl AsRef<Path>) -> Result<Vec<TruthRow>> {
    let path = path.as_ref();
    let mut rdr = csv::Reader::from_path(path)?;
    rdr.deserialize()
        .enumerate()
        .map(|(i, r)| {
            r.map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line: i + 2,
                msg: e.to_string(),
            })
        })
        .collect()
}
