//! Local planar geometry.
//!
//! All metric work happens on an equirectangular tangent plane centred on the
//! network's bounding box. At city scale the distortion is far below the
//! noise of cellular positioning.

use serde::{Deserialize, Serialize};

/// Mean Earth radius in meters.
pub const EARTH_RADIUS_M: f64 = 6_371_008.8;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn sub(self, other: Point) -> Point {
        Point::new(self.x - other.x, self.y - other.y)
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// `self + t * dir`
    pub fn offset(self, dir: Point, t: f64) -> Point {
        Point::new(self.x + t * dir.x, self.y + t * dir.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    lat0: f64,
    lon0: f64,
    cos_lat0: f64,
}

impl Projection {
    pub fn new(lat0: f64, lon0: f64) -> Self {
        Self {
            lat0,
            lon0,
            cos_lat0: lat0.to_radians().cos(),
        }
    }

    /// Projection centred on the bounding box of the given `(lat, lon)` pairs.
    pub fn centered_on<I: IntoIterator<Item = (f64, f64)>>(coords: I) -> Self {
        let mut bounds: Option<(f64, f64, f64, f64)> = None;
        for (lat, lon) in coords {
            bounds = Some(match bounds {
                None => (lat, lat, lon, lon),
                Some((a, b, c, d)) => (a.min(lat), b.max(lat), c.min(lon), d.max(lon)),
            });
        }
        let (lat_min, lat_max, lon_min, lon_max) = bounds.unwrap_or_default();
        Self::new((lat_min + lat_max) / 2.0, (lon_min + lon_max) / 2.0)
    }

    pub fn origin(&self) -> (f64, f64) {
        (self.lat0, self.lon0)
    }

    pub fn project(&self, lat: f64, lon: f64) -> Point {
        Point::new(
            EARTH_RADIUS_M * (lon - self.lon0).to_radians() * self.cos_lat0,
            EARTH_RADIUS_M * (lat - self.lat0).to_radians(),
        )
    }

    /// Inverse of [`Projection::project`]; returns `(lat, lon)`.
    pub fn unproject(&self, p: Point) -> (f64, f64) {
        let lat = self.lat0 + (p.y / EARTH_RADIUS_M).to_degrees();
        let lon = self.lon0 + (p.x / (EARTH_RADIUS_M * self.cos_lat0)).to_degrees();
        (lat, lon)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn haversine(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
        let (p1, p2) = (lat1.to_radians(), lat2.to_radians());
        let dp = p2 - p1;
        let dl = (lon2 - lon1).to_radians();
        let a = (dp / 2.0).sin().powi(2) + p1.cos() * p2.cos() * (dl / 2.0).sin().powi(2);
        2.0 * EARTH_RADIUS_M * a.sqrt().asin()
    }

    #[test]
    fn origin_maps_to_zero() {
        let p = Projection::new(1.3, 103.8);
        assert_eq!(p.project(1.3, 103.8), Point::new(0.0, 0.0));
    }

    #[test]
    fn latitude_step_matches_great_circle() {
        let p = Projection::new(1.3, 103.8);
        let a = p.project(1.3, 103.8);
        let b = p.project(1.301, 103.8);
        let gc = haversine(1.3, 103.8, 1.301, 103.8);
        assert!((b.y - a.y - gc).abs() < 0.5);
        assert!((b.y - a.y - 111.2).abs() < 0.5);
    }

    #[test]
    fn round_trip_over_box() {
        let p = Projection::centered_on([(1.25, 103.6), (1.45, 104.0)]);
        for i in 0..=20 {
            for j in 0..=20 {
                let lat = 1.25 + 0.01 * i as f64;
                let lon = 103.6 + 0.02 * j as f64;
                let (la, lo) = p.unproject(p.project(lat, lon));
                assert!((la - lat).abs() < 1e-6 && (lo - lon).abs() < 1e-6);
            }
        }
    }
}
