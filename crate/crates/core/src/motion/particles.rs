//! Transition source backed by particle simulation, with cached estimates
//! so their traces can be reused to fill missing seconds.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use crate::motion::viterbi::TransitionSource;
use crate::netmodel::{EdgeFragment, Point, RoadNetwork};
use crate::prob::{
    prior_mean, simulate_transition, DiffusionPolicy, TransitionEstimate, TransitionParams,
};
use crate::rng::stream;
use crate::ttdist::DistributionStore;

/// Lazily simulated transition estimates for one trajectory.
pub struct ParticleTransitions<'a> {
    net: &'a RoadNetwork,
    dists: &'a DistributionStore,
    sets: &'a [Vec<EdgeFragment>],
    times: &'a [i64],
    /// Observed planar positions, used by the directional prior.
    points: &'a [Point],
    params: TransitionParams,
    policy: DiffusionPolicy,
    seed: u64,
    keys: Vec<u64>,
    cache: BTreeMap<(usize, usize), TransitionEstimate>,
    elapsed: Duration,
}

impl<'a> ParticleTransitions<'a> {
    /// `keys` identify the trajectory (window, object) in the RNG stream
    /// space; each estimate additionally keys on its step and source.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        net: &'a RoadNetwork,
        dists: &'a DistributionStore,
        sets: &'a [Vec<EdgeFragment>],
        times: &'a [i64],
        points: &'a [Point],
        params: TransitionParams,
        policy: DiffusionPolicy,
        seed: u64,
        keys: &[u64],
    ) -> Self {
        assert!(sets.len() == times.len() && sets.len() == points.len());
        Self {
            net,
            dists,
            sets,
            times,
            points,
            params,
            policy,
            seed,
            keys: keys.to_vec(),
            cache: BTreeMap::new(),
            elapsed: Duration::ZERO,
        }
    }

    /// Estimate for moving from `sets[k - 1][i]` to the candidates of `k`.
    pub fn estimate(&mut self, k: usize, i: usize) -> &TransitionEstimate {
        let clock = Instant::now();
        let elapsed = &mut self.elapsed;
        let est = self.cache.entry((k, i)).or_insert_with(|| {
            let targets = &self.sets[k];
            let prior = prior_mean(
                self.policy,
                targets,
                self.net,
                self.points[k - 1],
                self.points[k],
            );
            let dt =
                u32::try_from(self.times[k] - self.times[k - 1]).expect("timestamps must increase");
            let mut keys = self.keys.clone();
            keys.extend([k as u64, i as u64]);
            let mut rng = stream(self.seed, &keys);
            simulate_transition(
                &self.sets[k - 1][i],
                targets,
                dt,
                self.net,
                self.dists,
                self.params,
                &prior,
                &mut rng,
            )
        });
        *elapsed += clock.elapsed();
        est
    }

    pub fn computed(&self) -> usize {
        self.cache.len()
    }

    /// Time spent in lookups and simulations so far.
    pub fn elapsed(&self) -> Duration {
        self.elapsed
    }
}

impl TransitionSource for ParticleTransitions<'_> {
    fn probabilities(&mut self, k: usize, i: usize) -> Vec<f64> {
        self.estimate(k, i).probabilities.clone()
    }
}
