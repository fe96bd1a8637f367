#![allow(dead_code)]

use dtnc::motion::{infer_edge_sequence, ParticleTransitions};
use dtnc::netmodel::{EdgeFragment, EdgeType, NetworkBuilder, Point, RoadNetwork};
use dtnc::prob::{
    prior_mean, simulate_transition, DiffusionPolicy, TransitionEstimate, TransitionParams,
};
use dtnc::ttdist::{DistributionStore, TravelTimeDistribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Three 100 m edges A -> B -> C, C a dead end, every edge taking exactly 10 s.
pub fn chain_scenario() -> (
    RoadNetwork,
    DistributionStore,
    EdgeFragment,
    Vec<EdgeFragment>,
) {
    let net = super::chain(3, 100.0);
    let dists = DistributionStore::from_vec(vec![TravelTimeDistribution::single(10); 3]);
    let la = net.edge(0).length_m;
    let lb = net.edge(1).length_m;
    let lc = net.edge(2).length_m;
    let source = EdgeFragment::new(0, 0.25 * la, 0.75 * la);
    let targets = vec![
        EdgeFragment::new(1, 0.0, lb),
        EdgeFragment::new(2, 0.7 * lc, 0.9 * lc),
        EdgeFragment::new(2, 0.9 * lc, lc),
    ];
    (net, dists, source, targets)
}

/// Where each of `n` evenly spaced particles ends after 25 s, in edge units:
/// a start at fraction f of A moves 2.5 edges, stopping at the end of C.
pub fn chain_oracle_counts(n: usize) -> [u32; 3] {
    let mut counts = [0u32; 3];
    for i in 0..n {
        let f = 0.25 + (i as f64 + 0.5) * 0.5 / n as f64;
        let u = (f + 2.5).min(3.0);
        let on_c = u - 2.0;
        if u < 2.0 {
            counts[0] += 1;
        } else if (0.7..=0.9).contains(&on_c) {
            counts[1] += 1;
        } else if on_c > 0.9 {
            counts[2] += 1;
        }
    }
    counts
}

pub fn chain_estimate(n: usize, gamma0: f64, seed: u64) -> TransitionEstimate {
    let (net, dists, source, targets) = chain_scenario();
    let prior = prior_mean(
        DiffusionPolicy::Even,
        &targets,
        &net,
        Point::default(),
        Point::default(),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = TransitionParams {
        n_particles: n,
        gamma0,
    };
    simulate_transition(
        &source, &targets, 25, &net, &dists, params, &prior, &mut rng,
    )
}

/// A road A-B-C-D and a parallel subway A'-B'-C'-D', each 100 m per hop.
/// The BC link is usually congested; the subway runs on schedule.
pub fn fig2_choice() -> (Vec<EdgeFragment>, [EdgeFragment; 4]) {
    let mut b = NetworkBuilder::default();
    for (i, x) in [0.0, 100.0, 200.0, 300.0].into_iter().enumerate() {
        b.vertex(i as u64, x, 0.0);
        b.vertex(10 + i as u64, x, 60.0);
    }
    b.edge(0, 0, 1, EdgeType::Trunk, 20.0)
        .edge(1, 1, 2, EdgeType::Trunk, 20.0)
        .edge(2, 2, 3, EdgeType::Trunk, 20.0)
        .edge(3, 10, 11, EdgeType::Subway, 20.0)
        .edge(4, 11, 12, EdgeType::Subway, 20.0)
        .edge(5, 12, 13, EdgeType::Subway, 20.0);
    let net: RoadNetwork = b.build().unwrap();
    let steady = TravelTimeDistribution::from_counts([(15, 10)]);
    let mut dists = vec![steady; 6];
    dists[1] = TravelTimeDistribution::from_counts([(9, 1), (33, 10), (35, 10)]);
    let dists = DistributionStore::from_vec(dists);
    let half = |e: usize| {
        let l = net.edge(e).length_m;
        EdgeFragment::new(e, 0.25 * l, 0.75 * l)
    };
    let ef_a = half(3);
    let ef_b = half(0);
    let ef_c = EdgeFragment::whole(2, net.edge(2));
    let ef_d = EdgeFragment::whole(5, net.edge(5));
    let sets = vec![vec![ef_b, ef_a], vec![ef_c, ef_d]];
    let times = [0, 30];
    let points = [Point::new(150.0, 30.0), Point::new(250.0, 30.0)];
    let mut src = ParticleTransitions::new(
        &net,
        &dists,
        &sets,
        &times,
        &points,
        TransitionParams::default(),
        DiffusionPolicy::Even,
        0,
        &[0],
    );
    let seq = infer_edge_sequence(&sets, &times, &net, &dists, &mut src);
    (seq.fragments, [ef_a, ef_b, ef_c, ef_d])
}
