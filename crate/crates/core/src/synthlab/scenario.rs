//! Scenario description for synthetic city generation.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netmodel::{EdgeType, NetworkBuilder};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NetworkSpec {
    /// `rows x cols` intersections joined by two-way streets; every
    /// `arterial_every`-th row and column is a faster trunk road.
    Grid {
        rows: usize,
        cols: usize,
        block_m: f64,
        #[serde(default = "default_street_speed")]
        street_speed_mps: f64,
        #[serde(default = "default_trunk_speed")]
        trunk_speed_mps: f64,
        #[serde(default = "default_arterial_every")]
        arterial_every: usize,
    },
    /// Concentric rings around a hub, joined by radial spokes.
    RingRadial {
        rings: usize,
        spokes: usize,
        ring_spacing_m: f64,
        #[serde(default = "default_street_speed")]
        street_speed_mps: f64,
        #[serde(default = "default_trunk_speed")]
        trunk_speed_mps: f64,
    },
}

fn default_street_speed() -> f64 {
    13.9
}

fn default_trunk_speed() -> f64 {
    22.2
}

fn default_arterial_every() -> usize {
    3
}

impl NetworkSpec {
    /// Builds the network in planar metres around the default projection
    /// origin. Each street gets ids `2k` and `2k + 1`, one per direction.
    pub fn builder(&self) -> NetworkBuilder {
        let mut b = NetworkBuilder::default();
        let mut next_edge = 0u64;
        let mut street = |b: &mut NetworkBuilder, s: u64, d: u64, kind: EdgeType, speed: f64| {
            b.two_way(next_edge, s, d, kind, speed);
            next_edge += 2;
        };
        match *self {
            NetworkSpec::Grid {
                rows,
                cols,
                block_m,
                street_speed_mps,
                trunk_speed_mps,
                arterial_every,
            } => {
                let vid = |r: usize, c: usize| (r * cols + c) as u64;
                let x0 = -block_m * (cols as f64 - 1.0) / 2.0;
                let y0 = -block_m * (rows as f64 - 1.0) / 2.0;
                for r in 0..rows {
                    for c in 0..cols {
                        b.vertex(vid(r, c), x0 + c as f64 * block_m, y0 + r as f64 * block_m);
                    }
                }
                let every = arterial_every.max(1);
                let pick = |line: usize| {
                    if line % every == 0 {
                        (EdgeType::Trunk, trunk_speed_mps)
                    } else {
                        (EdgeType::Other, street_speed_mps)
                    }
                };
                for r in 0..rows {
                    for c in 0..cols {
                        if c + 1 < cols {
                            let (k, s) = pick(r);
                            street(&mut b, vid(r, c), vid(r, c + 1), k, s);
                        }
                        if r + 1 < rows {
                            let (k, s) = pick(c);
                            street(&mut b, vid(r, c), vid(r + 1, c), k, s);
                        }
                    }
                }
            }
            NetworkSpec::RingRadial {
                rings,
                spokes,
                ring_spacing_m,
                street_speed_mps,
                trunk_speed_mps,
            } => {
                b.vertex(0, 0.0, 0.0);
                let vid = |ring: usize, s: usize| (1 + (ring - 1) * spokes + s) as u64;
                for ring in 1..=rings {
                    for s in 0..spokes {
                        let a = std::f64::consts::TAU * s as f64 / spokes as f64;
                        let rad = ring as f64 * ring_spacing_m;
                        b.vertex(vid(ring, s), rad * a.cos(), rad * a.sin());
                    }
                }
                for s in 0..spokes {
                    street(&mut b, 0, vid(1, s), EdgeType::Trunk, trunk_speed_mps);
                    for ring in 1..rings {
                        street(
                            &mut b,
                            vid(ring, s),
                            vid(ring + 1, s),
                            EdgeType::Trunk,
                            trunk_speed_mps,
                        );
                    }
                }
                for ring in 1..=rings {
                    for s in 0..spokes {
                        street(
                            &mut b,
                            vid(ring, s),
                            vid(ring, (s + 1) % spokes),
                            EdgeType::Other,
                            street_speed_mps,
                        );
                    }
                }
            }
        }
        b
    }
}

/// How positions turn into raw observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Relative weights of uncertainty degrees 1..=5.
    pub u_weights: [f64; 5],
    /// Half-normal scale as a fraction of `r(u)`; 0 disables noise.
    pub sigma_fraction: f64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self {
            u_weights: [0.05, 0.08, 0.17, 0.36, 0.34],
            sigma_fraction: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Dropout {
    /// Every second is observed.
    None,
    /// Each second is observed independently with probability `p`.
    Bernoulli { p: f64 },
    /// Observations exactly `gap_s` apart, starting at a random phase.
    FixedGap { gap_s: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub network: NetworkSpec,
    pub objects: usize,
    pub start_t: i64,
    /// Seconds with raw observations.
    pub duration_s: u32,
    /// Ground truth continues this long past the observed span, so windows
    /// opened near its end are still fully covered.
    #[serde(default = "default_tail")]
    pub truth_tail_s: u32,
    /// Per-edge true speed as a fraction of the limit, drawn uniformly.
    #[serde(default = "default_speed_range")]
    pub speed_fraction: (f64, f64),
    /// Per-object multiplier on true speeds, drawn uniformly.
    #[serde(default = "default_object_range")]
    pub object_speed_factor: (f64, f64),
    #[serde(default)]
    pub noise: NoiseSpec,
    pub dropout: Dropout,
}

fn default_tail() -> u32 {
    70
}

fn default_speed_range() -> (f64, f64) {
    (0.5, 0.9)
}

fn default_object_range() -> (f64, f64) {
    (0.9, 1.1)
}

impl Scenario {
    /// A 10x10 grid city with cellular-like noise and sparse observations.
    pub fn city(objects: usize, duration_s: u32, dropout: Dropout) -> Self {
        Self {
            network: NetworkSpec::Grid {
                rows: 10,
                cols: 10,
                block_m: 150.0,
                street_speed_mps: default_street_speed(),
                trunk_speed_mps: default_trunk_speed(),
                arterial_every: default_arterial_every(),
            },
            objects,
            start_t: 1_500_000_000,
            duration_s,
            truth_tail_s: default_tail(),
            speed_fraction: default_speed_range(),
            object_speed_factor: default_object_range(),
            noise: NoiseSpec::default(),
            dropout,
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
        let s: Scenario = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        match &self.network {
            NetworkSpec::Grid {
                rows,
                cols,
                block_m,
                ..
            } => {
                if *rows < 2 || *cols < 2 || !(*block_m > 0.0) {
                    return bad("grid needs at least 2x2 intersections and a positive block size");
                }
            }
            NetworkSpec::RingRadial {
                rings,
                spokes,
                ring_spacing_m,
                ..
            } => {
                if *rings < 1 || *spokes < 3 || !(*ring_spacing_m > 0.0) {
                    return bad(
                        "ring-radial needs at least one ring, three spokes and a positive spacing",
                    );
                }
            }
        }
        if self.noise.u_weights.iter().any(|&w| w < 0.0)
            || self.noise.u_weights.iter().sum::<f64>() <= 0.0
        {
            return bad("uncertainty weights must be non-negative with a positive sum");
        }
        if !(self.noise.sigma_fraction >= 0.0) {
            return bad("sigma fraction must be non-negative");
        }
        let (lo, hi) = self.speed_fraction;
        if !(lo > 0.0 && lo <= hi) {
            return bad("speed fraction range must be positive and ordered");
        }
        let (lo, hi) = self.object_speed_factor;
        if !(lo > 0.0 && lo <= hi) {
            return bad("object speed range must be positive and ordered");
        }
        match self.dropout {
            Dropout::Bernoulli { p } if !(p > 0.0 && p <= 1.0) => {
                bad("dropout p must lie in (0, 1]")
            }
            Dropout::FixedGap { gap_s: 0 } => bad("fixed gap must be positive"),
            _ => Ok(()),
        }
    }
}
