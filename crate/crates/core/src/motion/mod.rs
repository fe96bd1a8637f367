//! Travel-time-aware semi-Markov inference of edge sequences and locations.

pub mod locations;
pub mod particles;
pub mod viterbi;

pub use locations::{infer_locations, CleanedRecord, CleanedTrajectory, Provenance};
pub use particles::ParticleTransitions;
pub use viterbi::{
    begin_durations, duration_prob, edge_transition_prob, joint_log_prob, viterbi, DurationPmf,
    TableTransitions, TransitionSource, Trellis, ViterbiPath,
};

use crate::netmodel::{EdgeFragment, RoadNetwork};
use crate::ttdist::DistributionStore;

/// Inferred fragment per location with its winning remaining duration.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSequence {
    pub fragments: Vec<EdgeFragment>,
    pub candidates: Vec<usize>,
    pub durations: Vec<u32>,
    pub log_prob: f64,
    pub fallback: bool,
}

/// Most probable fragment per location for pruned candidate sets.
pub fn infer_edge_sequence<T: TransitionSource + ?Sized>(
    sets: &[Vec<EdgeFragment>],
    times: &[i64],
    net: &RoadNetwork,
    dists: &DistributionStore,
    transitions: &mut T,
) -> EdgeSequence {
    let tr = Trellis::build(sets, times, net, dists);
    let path = viterbi(&tr, transitions);
    EdgeSequence {
        fragments: path
            .states
            .iter()
            .enumerate()
            .map(|(k, &(j, _))| sets[k][j])
            .collect(),
        candidates: path.states.iter().map(|&(j, _)| j).collect(),
        durations: path.states.iter().map(|&(_, d)| d).collect(),
        log_prob: path.log_prob,
        fallback: path.fallback,
    }
}
