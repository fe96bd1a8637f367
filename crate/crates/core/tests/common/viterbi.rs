#![allow(dead_code)]

use dtnc::motion::{joint_log_prob, viterbi, DurationPmf, TableTransitions, Trellis};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Instance {
    pub trellis: Trellis,
    pub tables: TableTransitions,
}

fn random_pmf(rng: &mut ChaCha8Rng, support: usize, max_d: u32) -> DurationPmf {
    let mut ds: Vec<u32> = (0..=max_d).collect();
    ds.shuffle(rng);
    let mut ds: Vec<u32> = ds.into_iter().take(support).collect();
    ds.sort_unstable();
    let w: Vec<f64> = ds.iter().map(|_| rng.gen_range(0.1..1.0)).collect();
    let s: f64 = w.iter().sum();
    ds.into_iter().zip(w).map(|(d, x)| (d, x / s)).collect()
}

pub fn random_instance(rng: &mut ChaCha8Rng, n: usize, width: usize, support: usize) -> Instance {
    let mut t = 0i64;
    let mut times = Vec::new();
    let mut edges = Vec::new();
    let mut emissions = Vec::new();
    let mut begins = Vec::new();
    for _ in 0..n {
        t += rng.gen_range(1..12);
        times.push(t);
        // A small edge pool so that stays on the same edge actually occur.
        let mut pool: Vec<usize> = (0..6).collect();
        pool.shuffle(rng);
        let m = rng.gen_range(1..=width);
        edges.push(pool[..m].to_vec());
        let w: Vec<f64> = (0..m).map(|_| rng.gen_range(0.05..1.0)).collect();
        let s: f64 = w.iter().sum();
        emissions.push(w.iter().map(|x| x / s).collect());
        begins.push(
            (0..m)
                .map(|_| {
                    let k = rng.gen_range(1..=support);
                    random_pmf(rng, k, 25)
                })
                .collect(),
        );
    }
    let tables = (0..n)
        .map(|k| {
            if k == 0 {
                return Vec::new();
            }
            let (a, b) = (edges[k - 1].len(), edges[k].len());
            (0..a)
                .map(|_| {
                    let w: Vec<f64> = (0..b)
                        .map(|_| {
                            if rng.gen_bool(0.2) {
                                0.0
                            } else {
                                rng.gen_range(0.01..1.0)
                            }
                        })
                        .collect();
                    let s: f64 = w.iter().sum();
                    if s == 0.0 {
                        w
                    } else {
                        w.iter().map(|x| x / s).collect()
                    }
                })
                .collect()
        })
        .collect();
    Instance {
        trellis: Trellis {
            times,
            edges,
            emissions,
            begins,
        },
        tables: TableTransitions { tables },
    }
}

/// Best joint log-probability over every (candidate, duration) sequence,
/// built path by path from the model definition.
pub fn brute_force(tr: &Trellis, tables: &TableTransitions) -> f64 {
    fn go(tr: &Trellis, tables: &TableTransitions, k: usize, j: usize, d: u32, lp: f64) -> f64 {
        if k + 1 == tr.times.len() {
            return lp;
        }
        let gap = (tr.times[k + 1] - tr.times[k]) as u32;
        let mut best = f64::NEG_INFINITY;
        if d >= gap {
            // Still travelling the same edge: it must be a candidate again.
            for (jn, &e) in tr.edges[k + 1].iter().enumerate() {
                if e == tr.edges[k][j] {
                    let next = lp + tr.emissions[k + 1][jn].ln();
                    best = best.max(go(tr, tables, k + 1, jn, d - gap, next));
                }
            }
        } else {
            for jn in 0..tr.edges[k + 1].len() {
                let t = tables.tables[k + 1][j][jn];
                for &(dn, p) in &tr.begins[k + 1][jn] {
                    let next = lp + t.ln() + p.ln() + tr.emissions[k + 1][jn].ln();
                    best = best.max(go(tr, tables, k + 1, jn, dn, next));
                }
            }
        }
        best
    }
    let init = -(tr.edges[0].len() as f64).ln();
    let mut best = f64::NEG_INFINITY;
    for j in 0..tr.edges[0].len() {
        for &(d, p) in &tr.begins[0][j] {
            let lp = init + tr.emissions[0][j].ln() + p.ln();
            best = best.max(go(tr, tables, 0, j, d, lp));
        }
    }
    best
}

pub fn oracle_agreement(instances: usize, seed: u64) -> (usize, usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut ok, mut dead, mut bit_equal) = (0, 0, 0);
    for _ in 0..instances {
        let n = rng.gen_range(1..=6);
        let mut inst = random_instance(&mut rng, n, 4, 3);
        let want = brute_force(&inst.trellis, &inst.tables);
        let got = viterbi(&inst.trellis, &mut inst.tables);
        if want == f64::NEG_INFINITY {
            dead += 1;
            ok += usize::from(got.fallback);
            continue;
        }
        let joint = joint_log_prob(&inst.trellis, &mut inst.tables, &got.states);
        if !got.fallback && (got.log_prob - want).abs() <= 1e-9 && joint == got.log_prob {
            ok += 1;
            bit_equal += usize::from(got.log_prob == want);
        }
    }
    let _ = dead;
    (ok, instances, bit_equal)
}
