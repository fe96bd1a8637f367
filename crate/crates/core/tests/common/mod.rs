#![allow(dead_code)]

pub mod pruning;
pub mod scenarios;
pub mod viterbi;

use dtnc::netmodel::{EdgeFragment, EdgeType, NetworkBuilder, Point, RoadNetwork};
use dtnc::ttdist::{update_distribution, TravelTimeDistribution, TravelTimeSample};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Straight chain of `n` edges of `len` metres along the x axis.
pub fn chain(n: usize, len: f64) -> RoadNetwork {
    let mut b = NetworkBuilder::default();
    for i in 0..=n {
        b.vertex(i as u64, i as f64 * len, 0.0);
    }
    for i in 0..n {
        b.edge(i as u64, i as u64, i as u64 + 1, EdgeType::Other, 10.0);
    }
    b.build().unwrap()
}

/// Jittered grid with random one-way and two-way streets plus a few
/// diagonals; every vertex keeps at least one edge.
pub fn random_network<R: Rng>(rng: &mut R, side: usize, spacing: f64) -> RoadNetwork {
    let mut b = NetworkBuilder::default();
    let vid = |r: usize, c: usize| (r * side + c) as u64;
    for r in 0..side {
        for c in 0..side {
            let jx = rng.gen_range(-0.2..0.2) * spacing;
            let jy = rng.gen_range(-0.2..0.2) * spacing;
            b.vertex(vid(r, c), c as f64 * spacing + jx, r as f64 * spacing + jy);
        }
    }
    let mut id = 0u64;
    let mut add = |b: &mut NetworkBuilder, rng: &mut R, s: u64, d: u64| {
        let speed = rng.gen_range(5.0..20.0);
        match rng.gen_range(0..3) {
            0 => {
                b.edge(id, s, d, EdgeType::Other, speed);
            }
            1 => {
                b.edge(id, d, s, EdgeType::Trunk, speed);
            }
            _ => {
                b.two_way(id, s, d, EdgeType::Other, speed);
            }
        }
        id += 2;
    };
    for r in 0..side {
        for c in 0..side {
            if c + 1 < side {
                add(&mut b, rng, vid(r, c), vid(r, c + 1));
            }
            if r + 1 < side {
                add(&mut b, rng, vid(r, c), vid(r + 1, c));
            }
            if r + 1 < side && c + 1 < side && rng.gen_bool(0.15) {
                add(&mut b, rng, vid(r, c), vid(r + 1, c + 1));
            }
        }
    }
    b.build().unwrap()
}

/// All-pairs vertex distances by Floyd–Warshall.
pub fn floyd_warshall(net: &RoadNetwork) -> Vec<Vec<f64>> {
    let n = net.vertices().len();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for e in net.edges() {
        if e.length_m < d[e.from][e.to] {
            d[e.from][e.to] = e.length_m;
        }
    }
    for k in 0..n {
        for i in 0..n {
            if d[i][k].is_infinite() {
                continue;
            }
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// Network distance from offset `x` on edge `ea` to offset `y` on edge `eb`.
pub fn point_distance(
    net: &RoadNetwork,
    apsp: &[Vec<f64>],
    ea: usize,
    x: f64,
    eb: usize,
    y: f64,
) -> f64 {
    let a = net.edge(ea);
    let b = net.edge(eb);
    let around = (a.length_m - x) + apsp[a.to][b.from] + y;
    if ea == eb && y >= x {
        (y - x).min(around)
    } else {
        around
    }
}

pub fn planar_dist(a: Point, b: Point) -> f64 {
    ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt()
}

/// E[ceil(X)] for X ~ U(lo, hi), exactly.
pub fn mean_ceil_uniform(lo: f64, hi: f64) -> f64 {
    let mut acc = 0.0;
    let mut k = lo.floor();
    while k < hi {
        let a = lo.max(k);
        let b = hi.min(k + 1.0);
        if b > a {
            acc += (k + 1.0) * (b - a);
        }
        k += 1.0;
    }
    acc / (hi - lo)
}

#[derive(Debug, Clone, Copy)]
pub struct Coverage {
    pub narrowed: f64,
    pub raw: f64,
}

/// Online streams of measurements: inliers `mu + U(-w, w)` with `w ≤ 4 s`
/// (a spread the Hoeffding range admits at these sample sizes) mixed with 8%
/// gross outliers from `U(mu/2, 2 mu)`. The known mean is that of the
/// ceiled inliers. Returns the fraction of streams whose final mean is within
/// ε = 2 s, for the narrowed distribution and for the plain sample mean.
pub fn hoeffding_coverage(streams: usize, seed: u64) -> Coverage {
    let (eps, delta) = (2.0, 0.05);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut ok, mut ok_raw) = (0usize, 0usize);
    for _ in 0..streams {
        let mu = rng.gen_range(15.0..80.0);
        let w = rng.gen_range(0.5..4.0);
        let truth = mean_ceil_uniform(mu - w, mu + w);
        let mut d = TravelTimeDistribution::from_counts([]);
        let (mut sum, mut n) = (0.0, 0usize);
        for _ in 0..rng.gen_range(5..15) {
            let batch: Vec<_> = (0..rng.gen_range(2..6))
                .map(|_| {
                    let s = if rng.gen_bool(0.08) {
                        rng.gen_range(mu * 0.5..mu * 2.0)
                    } else {
                        mu + rng.gen_range(-w..w)
                    };
                    sum += f64::ceil(s);
                    n += 1;
                    TravelTimeSample {
                        edge: 0,
                        seconds: s,
                        window_id: 0,
                    }
                })
                .collect();
            d = update_distribution(&d, &batch, eps, delta).distribution;
        }
        ok += usize::from((d.expected_mean() - truth).abs() <= eps);
        ok_raw += usize::from((sum / n as f64 - truth).abs() <= eps);
    }
    Coverage {
        narrowed: ok as f64 / streams as f64,
        raw: ok_raw as f64 / streams as f64,
    }
}

/// Closest-point network gap between two fragments, by scanning sampled
/// offsets of both (plus the start of any overlap).
pub fn gap_oracle(net: &RoadNetwork, apsp: &[Vec<f64>], a: &EdgeFragment, b: &EdgeFragment) -> f64 {
    let shared = a.start_m.max(b.start_m);
    let grid = |f: &EdgeFragment| {
        let mut v: Vec<f64> = (0..=8)
            .map(|i| f.start_m + (f.end_m - f.start_m) * i as f64 / 8.0)
            .collect();
        if a.edge == b.edge && f.contains(shared) {
            v.push(shared);
        }
        v
    };
    let mut best = f64::INFINITY;
    for x in grid(a) {
        for y in grid(b) {
            best = best.min(point_distance(net, apsp, a.edge, x, b.edge, y));
        }
    }
    best
}

/// A random sub-interval (at least 1 m) of a random edge.
pub fn random_fragment<R: Rng>(rng: &mut R, net: &RoadNetwork) -> EdgeFragment {
    let e = rng.gen_range(0..net.edges().len());
    let len = net.edge(e).length_m;
    let a = rng.gen_range(0.0..len - 1.0);
    EdgeFragment::new(e, a, rng.gen_range(a + 1.0..=len))
}
