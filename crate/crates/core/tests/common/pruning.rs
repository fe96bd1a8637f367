#![allow(dead_code)]

use std::collections::BTreeMap;

use dtnc::netmodel::{retrieve_fragments, EdgeFragment, RoadNetwork};
use dtnc::pruning::{prune_trajectory, sequence_prune};
use dtnc::synthlab::{generate, Dropout, Scenario};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub struct Instance {
    pub sets: Vec<Vec<EdgeFragment>>,
    pub times: Vec<i64>,
}

pub fn random_instance(rng: &mut ChaCha8Rng, net: &RoadNetwork) -> Instance {
    let n = rng.gen_range(2..=8);
    let mut t = 0i64;
    let mut times = Vec::new();
    let sets = (0..n)
        .map(|_| {
            t += rng.gen_range(1..25);
            times.push(t);
            let mut set: Vec<EdgeFragment> = Vec::new();
            for _ in 0..rng.gen_range(1..=4) {
                let f = super::random_fragment(rng, net);
                if !set.iter().any(|g| g.edge == f.edge) {
                    set.push(f);
                }
            }
            set
        })
        .collect();
    Instance { sets, times }
}

pub fn oracle_feasible(
    net: &RoadNetwork,
    apsp: &[Vec<f64>],
    a: &EdgeFragment,
    b: &EdgeFragment,
    dt: f64,
    v: f64,
) -> bool {
    super::gap_oracle(net, apsp, a, b) <= v * dt + 1e-6
}

/// Fragments appearing in at least one fully feasible combination, found by
/// enumerating every combination. `None` if there is no such combination.
pub fn enumerate_survivors(
    inst: &Instance,
    net: &RoadNetwork,
    apsp: &[Vec<f64>],
    v: f64,
) -> Option<Vec<Vec<EdgeFragment>>> {
    let n = inst.sets.len();
    let pair: Vec<Vec<Vec<bool>>> = (1..n)
        .map(|k| {
            let dt = (inst.times[k] - inst.times[k - 1]) as f64;
            inst.sets[k - 1]
                .iter()
                .map(|a| {
                    inst.sets[k]
                        .iter()
                        .map(|b| oracle_feasible(net, apsp, a, b, dt, v))
                        .collect()
                })
                .collect()
        })
        .collect();
    let mut used: Vec<Vec<bool>> = inst.sets.iter().map(|s| vec![false; s.len()]).collect();
    let mut any = false;
    let mut idx = vec![0usize; n];
    'outer: loop {
        if (1..n).all(|k| pair[k - 1][idx[k - 1]][idx[k]]) {
            any = true;
            for (k, &i) in idx.iter().enumerate() {
                used[k][i] = true;
            }
        }
        for k in (0..n).rev() {
            idx[k] += 1;
            if idx[k] < inst.sets[k].len() {
                continue 'outer;
            }
            idx[k] = 0;
        }
        break;
    }
    any.then(|| {
        inst.sets
            .iter()
            .zip(&used)
            .map(|(s, u)| {
                s.iter()
                    .zip(u)
                    .filter(|(_, &x)| x)
                    .map(|(f, _)| *f)
                    .collect()
            })
            .collect()
    })
}

/// Summary of pruning over generated trajectories: truth fragments lost and
/// instances checked against enumeration.
pub struct Soundness {
    pub trajectories: usize,
    pub locations: usize,
    pub truth_lost: usize,
    pub enumerated: usize,
    pub enumeration_mismatches: usize,
}

pub fn pruning_soundness(objects: usize, max_trajectories: usize, seed: u64) -> Soundness {
    let scenario = Scenario::city(objects, 140, Dropout::Bernoulli { p: 1.0 / 14.0 });
    let g = generate(&scenario, seed).unwrap();
    let net = &g.network;
    let apsp = super::floyd_warshall(net);
    let v_max = 50.0;
    let truth: BTreeMap<(&str, i64), usize> = g
        .truth
        .iter()
        .enumerate()
        .map(|(i, r)| ((r.object_id.as_str(), r.t), i))
        .collect();
    let mut per_object: BTreeMap<&str, Vec<_>> = BTreeMap::new();
    for cl in &g.raw {
        per_object
            .entry(cl.object_id.as_str())
            .or_default()
            .push(cl);
    }
    let mut out = Soundness {
        trajectories: 0,
        locations: 0,
        truth_lost: 0,
        enumerated: 0,
        enumeration_mismatches: 0,
    };
    for (id, obs) in per_object {
        // One service window's worth of observations.
        let obs: Vec<_> = obs
            .into_iter()
            .filter(|c| c.t < scenario.start_t + 70)
            .collect();
        if obs.len() < 2 || out.trajectories == max_trajectories {
            continue;
        }
        out.trajectories += 1;
        let sets: Vec<Vec<EdgeFragment>> = obs
            .iter()
            .map(|c| retrieve_fragments(c, net, 1.0).unwrap())
            .collect();
        let times: Vec<i64> = obs.iter().map(|c| c.t).collect();
        let seq = prune_trajectory(&sets, &times, net, v_max);
        assert!(!seq.infeasible);
        for (k, c) in obs.iter().enumerate() {
            out.locations += 1;
            let row = truth[&(id, c.t)];
            let (edge, off) = (g.truth_edges[row], g.truth[row].offset_m);
            if !seq.sets[k]
                .iter()
                .any(|f| f.edge == edge && f.start_m - 1e-6 <= off && off <= f.end_m + 1e-6)
            {
                out.truth_lost += 1;
            }
        }
        let combos: f64 = sets.iter().map(|s| s.len() as f64).product();
        if combos <= 4f64.powi(8) {
            out.enumerated += 1;
            let inst = Instance { sets, times };
            let plain = sequence_prune(&inst.sets, &inst.times, net, v_max);
            if enumerate_survivors(&inst, net, &apsp, v_max) != Some(plain.sets) {
                out.enumeration_mismatches += 1;
            }
        }
    }
    out
}
