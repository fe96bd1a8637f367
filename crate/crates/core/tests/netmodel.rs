mod common;

use dtnc::netmodel::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Disk–segment intersection by solving |s + t(d - s) - c|^2 = r^2 for t.
fn oracle_clip(e: &Edge, c: Point, r: f64) -> Option<(f64, f64)> {
    let (s, d) = (e.start(), e.end());
    let (dx, dy) = (d.x - s.x, d.y - s.y);
    let (fx, fy) = (s.x - c.x, s.y - c.y);
    let a = dx * dx + dy * dy;
    let b = 2.0 * (fx * dx + fy * dy);
    let k = fx * fx + fy * fy - r * r;
    let disc = b * b - 4.0 * a * k;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let t0 = ((-b - sq) / (2.0 * a)).max(0.0);
    let t1 = ((-b + sq) / (2.0 * a)).min(1.0);
    if t0 >= t1 {
        return None;
    }
    Some((t0 * e.length_m, t1 * e.length_m))
}

#[test]
fn grid_index_matches_full_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let net = common::random_network(&mut rng, 12, 180.0);
    let min_len = DEFAULT_MIN_FRAGMENT_M;
    for _ in 0..1000 {
        let c = Point::new(rng.gen_range(-300.0..2300.0), rng.gen_range(-300.0..2300.0));
        let u = rng.gen_range(1..=5u8);
        let r = uncertainty_radius(u).unwrap();
        let got = retrieve_fragments_at(&net, c, r, min_len);
        let mut want = Vec::new();
        for (i, e) in net.edges().iter().enumerate() {
            if let Some((lo, hi)) = oracle_clip(e, c, r) {
                if (hi - lo - min_len).abs() < 1e-6 {
                    continue;
                }
                if hi - lo >= min_len {
                    want.push((i, lo, hi));
                }
            }
        }
        let got_edges: Vec<_> = got
            .iter()
            .filter(|f| (f.length() - min_len).abs() >= 1e-6)
            .collect();
        assert_eq!(got_edges.len(), want.len(), "query at {c:?} r={r}");
        for (f, (i, lo, hi)) in got_edges.iter().zip(&want) {
            assert_eq!(f.edge, *i);
            assert!((f.start_m - lo).abs() < 1e-6 && (f.end_m - hi).abs() < 1e-6);
        }
    }
}

#[test]
fn fragments_lie_inside_the_disk() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let net = common::random_network(&mut rng, 8, 150.0);
    for _ in 0..200 {
        let c = Point::new(rng.gen_range(0.0..1050.0), rng.gen_range(0.0..1050.0));
        let r = uncertainty_radius(rng.gen_range(1..=5)).unwrap();
        for f in retrieve_fragments_at(&net, c, r, 1.0) {
            let e = net.edge(f.edge);
            for off in [f.start_m, f.center(), f.end_m] {
                assert!(common::planar_dist(e.point_at(off), c) <= r + 1e-6);
            }
        }
    }
}

#[test]
fn radius_formula_and_domain() {
    assert_eq!(uncertainty_radius(1).unwrap(), 150.0);
    assert_eq!(uncertainty_radius(3).unwrap(), 250.0);
    assert_eq!(uncertainty_radius(5).unwrap(), 350.0);
    assert!(uncertainty_radius(0).is_err());
    assert!(uncertainty_radius(6).is_err());
}

#[test]
fn network_file_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let net = common::random_network(&mut rng, 5, 200.0);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("net.jsonl");
    write_records(&path, &net.to_records()).unwrap();
    let back = RoadNetwork::load(&path, DEFAULT_CELL_SIZE_M).unwrap();
    assert_eq!(back.edges().len(), net.edges().len());
    for (a, b) in net.edges().iter().zip(back.edges()) {
        assert_eq!((a.id, a.edge_type), (b.id, b.edge_type));
        assert!((a.length_m - b.length_m).abs() < 1e-3);
    }
}

#[test]
fn load_reports_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.jsonl");
    std::fs::write(
        &path,
        "{\"v\": 1, \"lat\": 1.3, \"lon\": 103.8}\n{\"v\": 2, \"lat\": 1.31, \"lon\": 103.8}\n{\"e\": 1, \"s\": 1, \"d\": 9, \"type\": \"trunk\", \"speed_mps\": 10}\n",
    )
    .unwrap();
    let err = RoadNetwork::load(&path, DEFAULT_CELL_SIZE_M).unwrap_err();
    assert_eq!(err.exit_code(), 1);
    std::fs::write(&path, "{\"v\": 1, \"lat\": 1.3}\n").unwrap();
    let err = RoadNetwork::load(&path, DEFAULT_CELL_SIZE_M).unwrap_err();
    assert!(err.to_string().contains(":1:"), "{err}");
}
