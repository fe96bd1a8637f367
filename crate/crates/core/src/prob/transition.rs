//! Transition estimation by particle diffusion over the network.
//!
//! Particles start evenly spread over a source fragment and travel edge by
//! edge with travel times drawn from the current distributions. The counts
//! of particles that stop inside each target fragment are smoothed with a
//! Dirichlet prior `Dir(gamma0 * m)`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::netmodel::{EdgeFragment, EdgeIdx, Point, RoadNetwork};
use crate::ttdist::DistributionStore;

/// How the Dirichlet prior mean is spread over the targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiffusionPolicy {
    #[default]
    Even,
    Direction,
}

impl FromStr for DiffusionPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "even" | "evenp" => Ok(Self::Even),
            "direction" | "directionp" => Ok(Self::Direction),
            other => Err(format!(
                "unknown diffusion policy '{other}' (expected even|direction)"
            )),
        }
    }
}

impl fmt::Display for DiffusionPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Even => "even",
            Self::Direction => "direction",
        })
    }
}

/// Prior mean vector `m` over `targets`.
///
/// The directional policy weights fragments heading along the displacement
/// `from -> to` by `2a`, against it by `a/2`, and perpendicular ones by 1
/// (all divided by the target count), with `a` fixed by `sum(m) = 1`. A zero
/// displacement falls back to the even policy.
pub fn prior_mean(
    policy: DiffusionPolicy,
    targets: &[EdgeFragment],
    net: &RoadNetwork,
    from: Point,
    to: Point,
) -> Vec<f64> {
    let k = targets.len();
    if k == 0 {
        return Vec::new();
    }
    let even = vec![1.0 / k as f64; k];
    let disp = to.sub(from);
    if policy == DiffusionPolicy::Even || disp.norm() == 0.0 {
        return even;
    }
    let signs: Vec<i8> = targets
        .iter()
        .map(|f| {
            let cos = net.edge(f.edge).direction().dot(disp) / disp.norm();
            if cos.abs() <= 1e-12 {
                0
            } else if cos > 0.0 {
                1
            } else {
                -1
            }
        })
        .collect();
    let pos = signs.iter().filter(|&&s| s > 0).count() as f64;
    let neg = signs.iter().filter(|&&s| s < 0).count() as f64;
    let neutral = k as f64 - pos - neg;
    if pos + neg == 0.0 {
        return even;
    }
    let alpha = (k as f64 - neutral) / (2.0 * pos + 0.5 * neg);
    signs
        .iter()
        .map(|&s| match s {
            1 => 2.0 * alpha / k as f64,
            -1 => 0.5 * alpha / k as f64,
            _ => 1.0 / k as f64,
        })
        .collect()
}

/// Lemma-style smoothed estimate `(N_j + gamma0 * m_j) / (N + gamma0)`.
/// With no counts and no prior strength, the prior mean itself is returned.
pub fn smoothed_probabilities(counts: &[u32], prior: &[f64], gamma0: f64) -> Vec<f64> {
    let n: f64 = counts.iter().map(|&c| f64::from(c)).sum();
    if n + gamma0 <= 0.0 {
        return prior.to_vec();
    }
    counts
        .iter()
        .zip(prior)
        .map(|(&c, &m)| (f64::from(c) + gamma0 * m) / (n + gamma0))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Breadcrumb {
    /// Seconds since the source observation.
    pub t: u32,
    pub edge: EdgeIdx,
    pub offset: f64,
}

/// Per-second positions of one particle, from `t = 0` to `t = dt` inclusive.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParticleTrace {
    pub crumbs: Vec<Breadcrumb>,
}

impl ParticleTrace {
    pub fn at(&self, t: u32) -> Option<&Breadcrumb> {
        self.crumbs.get(t as usize).filter(|c| c.t == t)
    }

    pub fn last(&self) -> &Breadcrumb {
        self.crumbs.last().expect("trace is never empty")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionParams {
    pub n_particles: usize,
    pub gamma0: f64,
}

impl Default for TransitionParams {
    fn default() -> Self {
        Self {
            n_particles: 15,
            gamma0: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionEstimate {
    pub source: EdgeFragment,
    pub targets: Vec<EdgeFragment>,
    /// Particles stopping in each target.
    pub counts: Vec<u32>,
    pub prior: Vec<f64>,
    pub gamma0: f64,
    pub probabilities: Vec<f64>,
    /// Traces of the particles that stopped in each target.
    pub traces: Vec<Vec<ParticleTrace>>,
}

/// Moves one particle for `dt` seconds. Dead ends hold the particle at the
/// end of its edge.
pub fn diffuse_particle<R: Rng + ?Sized>(
    net: &RoadNetwork,
    dists: &DistributionStore,
    edge: EdgeIdx,
    offset: f64,
    dt: u32,
    rng: &mut R,
) -> ParticleTrace {
    let mut crumbs = Vec::with_capacity(dt as usize + 1);
    let end_time = f64::from(dt);
    let mut edge = edge;
    let mut offset = offset;
    let mut clock = 0.0f64;
    let mut next_crumb = 0u32;
    let mut halted = false;
    loop {
        let e = net.edge(edge);
        let remaining = e.length_m - offset;
        let (speed, leg_time) = if halted {
            (0.0, f64::INFINITY)
        } else {
            let full = f64::from(dists.get(edge).sample(rng));
            let speed = e.length_m / full;
            (speed, full * remaining / e.length_m)
        };
        let leg_end = clock + leg_time;
        let last_leg = leg_end >= end_time;
        while next_crumb <= dt {
            let s = f64::from(next_crumb);
            if s > leg_end || (!last_leg && s == leg_end) {
                break;
            }
            crumbs.push(Breadcrumb {
                t: next_crumb,
                edge,
                offset: (offset + speed * (s - clock)).min(e.length_m),
            });
            next_crumb += 1;
        }
        if last_leg {
            break;
        }
        clock = leg_end;
        let outs = net.out_edges(e.to);
        if outs.is_empty() {
            offset = e.length_m;
            halted = true;
        } else {
            edge = outs[rng.gen_range(0..outs.len())];
            offset = 0.0;
        }
    }
    ParticleTrace { crumbs }
}

/// Estimates `p(target | source, dt)` for every target by particle diffusion.
pub fn simulate_transition<R: Rng + ?Sized>(
    source: &EdgeFragment,
    targets: &[EdgeFragment],
    dt: u32,
    net: &RoadNetwork,
    dists: &DistributionStore,
    params: TransitionParams,
    prior: &[f64],
    rng: &mut R,
) -> TransitionEstimate {
    assert_eq!(prior.len(), targets.len(), "prior must cover every target");
    let n = params.n_particles.max(1);
    let mut counts = vec![0u32; targets.len()];
    let mut traces = vec![Vec::new(); targets.len()];
    let step = source.length() / n as f64;
    for i in 0..n {
        let start = source.start_m + (i as f64 + 0.5) * step;
        let trace = diffuse_particle(net, dists, source.edge, start, dt, rng);
        let stop = *trace.last();
        if let Some(j) = targets
            .iter()
            .position(|f| f.edge == stop.edge && f.contains(stop.offset))
        {
            counts[j] += 1;
            traces[j].push(trace);
        }
    }
    let probabilities = smoothed_probabilities(&counts, prior, params.gamma0);
    TransitionEstimate {
        source: *source,
        targets: targets.to_vec(),
        counts,
        prior: prior.to_vec(),
        gamma0: params.gamma0,
        probabilities,
        traces,
    }
}
