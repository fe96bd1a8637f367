use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netmodel::DEFAULT_MIN_FRAGMENT_M;
use crate::prob::{DiffusionPolicy, TransitionParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    /// Service window length in seconds.
    pub window_len: u32,
    pub n_particles: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub gamma0: f64,
    /// Global speed bound for pruning, m/s.
    pub v_max: f64,
    pub policy: DiffusionPolicy,
    pub seed: u64,
    pub min_fragment_m: f64,
    /// Samples per edge when distributions are initialised from speed limits.
    pub init_samples: usize,
    /// Worker threads; 0 uses all available cores.
    pub workers: usize,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            window_len: 70,
            n_particles: 15,
            epsilon: 2.0,
            delta: 0.05,
            gamma0: 1.0,
            v_max: 50.0,
            policy: DiffusionPolicy::Even,
            seed: 0,
            min_fragment_m: DEFAULT_MIN_FRAGMENT_M,
            init_samples: 20,
            workers: 0,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Config(msg.to_string()));
        if self.window_len == 0 {
            return bad("window length must be positive");
        }
        if self.n_particles == 0 {
            return bad("particle count must be positive");
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad("epsilon must be positive");
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad("delta must lie in (0, 1)");
        }
        if !(self.gamma0 > 0.0 && self.gamma0.is_finite()) {
            return bad("gamma0 must be positive");
        }
        if !(self.v_max > 0.0 && self.v_max.is_finite()) {
            return bad("vmax must be positive");
        }
        if !(self.min_fragment_m > 0.0 && self.min_fragment_m.is_finite()) {
            return bad("minimum fragment length must be positive");
        }
        if self.init_samples == 0 {
            return bad("init samples must be positive");
        }
        Ok(())
    }

    pub fn transition_params(&self) -> TransitionParams {
        TransitionParams {
            n_particles: self.n_particles,
            gamma0: self.gamma0,
        }
    }
}
