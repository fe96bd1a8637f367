//! Cellular locations, uncertainty radii and candidate edge fragments.

use serde::{Deserialize, Serialize};

use super::geo::Point;
use super::network::{Edge, EdgeIdx, RoadNetwork};
use crate::error::{Error, Result};

/// Circle clippings shorter than this are dropped.
pub const DEFAULT_MIN_FRAGMENT_M: f64 = 1.0;

/// Spatial error bound in meters implied by an uncertainty degree in `1..=5`.
pub fn uncertainty_radius(u: u8) -> Result<f64> {
    if !(1..=5).contains(&u) {
        return Err(Error::Domain(format!(
            "uncertainty degree {u} not in 1..=5"
        )));
    }
    Ok(150.0 + 50.0 * f64::from(u - 1))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellularLocation {
    pub object_id: String,
    pub t: i64,
    pub lat: f64,
    pub lon: f64,
    pub u: u8,
}

impl CellularLocation {
    pub fn validate(&self) -> Result<()> {
        if !(-90.0..=90.0).contains(&self.lat) || !(-180.0..=180.0).contains(&self.lon) {
            return Err(Error::Input(format!(
                "object {} at t={} has invalid coordinates ({}, {})",
                self.object_id, self.t, self.lat, self.lon
            )));
        }
        uncertainty_radius(self.u).map(|_| ())
    }

    pub fn radius(&self) -> f64 {
        uncertainty_radius(self.u).unwrap_or(350.0)
    }
}

/// A sub-segment `[start_m, end_m]` of one directed edge, in arc-length
/// offsets from the edge start.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeFragment {
    pub edge: EdgeIdx,
    pub start_m: f64,
    pub end_m: f64,
}

impl EdgeFragment {
    pub fn new(edge: EdgeIdx, start_m: f64, end_m: f64) -> Self {
        debug_assert!(start_m < end_m, "empty fragment [{start_m}, {end_m}]");
        Self {
            edge,
            start_m,
            end_m,
        }
    }

    /// The whole edge as one fragment.
    pub fn whole(edge: EdgeIdx, e: &Edge) -> Self {
        Self::new(edge, 0.0, e.length_m)
    }

    pub fn length(&self) -> f64 {
        self.end_m - self.start_m
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.start_m + self.end_m)
    }

    pub fn contains(&self, offset: f64) -> bool {
        offset >= self.start_m && offset <= self.end_m
    }
}

/// Offset interval where the disk around `center` meets the edge, if any.
pub fn clip_edge_to_disk(e: &Edge, center: Point, radius: f64) -> Option<(f64, f64)> {
    let rel = center.sub(e.start());
    let along = rel.dot(e.direction());
    let perp_sq = rel.dot(rel) - along * along;
    let r_sq = radius * radius;
    if perp_sq > r_sq {
        return None;
    }
    let half = (r_sq - perp_sq).max(0.0).sqrt();
    let lo = (along - half).max(0.0);
    let hi = (along + half).min(e.length_m);
    (lo < hi).then_some((lo, hi))
}

/// Candidate fragments for a planar point and radius, using the grid index.
/// A straight edge meets a disk in at most one interval, so touching pieces
/// never need merging. Sorted by edge index.
pub fn retrieve_fragments_at(
    net: &RoadNetwork,
    center: Point,
    radius: f64,
    min_fragment_m: f64,
) -> Vec<EdgeFragment> {
    net.grid()
        .edges_near(center, radius)
        .into_iter()
        .filter_map(|idx| {
            let (lo, hi) = clip_edge_to_disk(net.edge(idx), center, radius)?;
            (hi - lo >= min_fragment_m).then(|| EdgeFragment::new(idx, lo, hi))
        })
        .collect()
}

/// Candidate fragment set `R_cl` of a cellular location.
pub fn retrieve_fragments(
    cl: &CellularLocation,
    net: &RoadNetwork,
    min_fragment_m: f64,
) -> Result<Vec<EdgeFragment>> {
    let radius = uncertainty_radius(cl.u)?;
    let center = net.project(cl.lat, cl.lon);
    Ok(retrieve_fragments_at(net, center, radius, min_fragment_m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::network::{EdgeType, NetworkBuilder};

    #[test]
    fn radius_formula() {
        assert_eq!(uncertainty_radius(1).unwrap(), 150.0);
        assert_eq!(uncertainty_radius(3).unwrap(), 250.0);
        assert_eq!(uncertainty_radius(5).unwrap(), 350.0);
        assert!(matches!(uncertainty_radius(0), Err(Error::Domain(_))));
        assert!(matches!(uncertainty_radius(6), Err(Error::Domain(_))));
    }

    fn isolated_edge() -> RoadNetwork {
        let mut b = NetworkBuilder::default();
        b.vertex(1, 0.0, 0.0)
            .vertex(2, 1000.0, 0.0)
            .edge(1, 1, 2, EdgeType::Trunk, 15.0);
        b.build().unwrap()
    }

    #[test]
    fn midpoint_query_gives_300m_fragment() {
        let net = isolated_edge();
        let frags = retrieve_fragments_at(&net, Point::new(500.0, 0.0), 150.0, 1.0);
        assert_eq!(frags.len(), 1);
        assert!((frags[0].length() - 300.0).abs() < 1e-9);
        assert!((frags[0].center() - 500.0).abs() < 1e-9);
    }

    #[test]
    fn far_query_is_empty() {
        let net = isolated_edge();
        assert!(retrieve_fragments_at(&net, Point::new(500.0, 351.0), 350.0, 1.0).is_empty());
    }

    #[test]
    fn tiny_clippings_are_dropped() {
        let net = isolated_edge();
        // Chord length 2 * sqrt(150^2 - 149.9995^2) ~ 0.77 m.
        assert!(retrieve_fragments_at(&net, Point::new(500.0, 149.9995), 150.0, 1.0).is_empty());
        assert_eq!(
            retrieve_fragments_at(&net, Point::new(500.0, 149.9995), 150.0, 0.1).len(),
            1
        );
    }

    #[test]
    fn fragment_basics() {
        let f = EdgeFragment::new(0, 0.0, 100.0);
        assert_eq!(f.center(), 50.0);
        assert!(f.contains(100.0) && !f.contains(100.1));
    }
}
