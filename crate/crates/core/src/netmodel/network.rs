//! Directed road graph with straight-segment edges.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::geo::{Point, Projection};
use super::grid::GridIndex;
use crate::error::{Error, Result};

/// Dense index of a vertex inside a [`RoadNetwork`].
pub type VertexIdx = usize;
/// Dense index of an edge inside a [`RoadNetwork`]. Edges are stored sorted by
/// their external id, so index order equals id order.
pub type EdgeIdx = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeType {
    Trunk,
    Motorway,
    Subway,
    Footway,
    Other,
}

impl FromStr for EdgeType {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "trunk" => EdgeType::Trunk,
            "motorway" => EdgeType::Motorway,
            "subway" => EdgeType::Subway,
            "footway" => EdgeType::Footway,
            _ => EdgeType::Other,
        })
    }
}

impl fmt::Display for EdgeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EdgeType::Trunk => "trunk",
            EdgeType::Motorway => "motorway",
            EdgeType::Subway => "subway",
            EdgeType::Footway => "footway",
            EdgeType::Other => "other",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
pub struct Vertex {
    pub id: u64,
    pub lat: f64,
    pub lon: f64,
    pub pos: Point,
}

#[derive(Debug, Clone)]
pub struct Edge {
    pub id: u64,
    pub from: VertexIdx,
    pub to: VertexIdx,
    pub edge_type: EdgeType,
    pub length_m: f64,
    pub speed_limit_mps: f64,
    start: Point,
    dir: Point,
}

impl Edge {
    /// Planar point at `offset` meters from the edge start.
    pub fn point_at(&self, offset: f64) -> Point {
        self.start.offset(self.dir, offset)
    }

    pub fn start(&self) -> Point {
        self.start
    }

    pub fn end(&self) -> Point {
        self.point_at(self.length_m)
    }

    /// Unit direction vector from start to end.
    pub fn direction(&self) -> Point {
        self.dir
    }

    /// Arc-length offset of the orthogonal projection of `p`, clamped to the edge.
    pub fn project_offset(&self, p: Point) -> f64 {
        p.sub(self.start).dot(self.dir).clamp(0.0, self.length_m)
    }
}

/// Raw records of the JSON Lines network format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NetworkRecord {
    Vertex {
        v: u64,
        lat: f64,
        lon: f64,
    },
    Edge {
        e: u64,
        s: u64,
        d: u64,
        #[serde(rename = "type")]
        kind: String,
        speed_mps: f64,
    },
}

pub const DEFAULT_CELL_SIZE_M: f64 = 100.0;

/// The static part of the dynamic transportation network: graph, geometry and
/// grid index. Immutable once built.
#[derive(Debug, Clone)]
pub struct RoadNetwork {
    projection: Projection,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    out_edges: Vec<Vec<EdgeIdx>>,
    vertex_lookup: HashMap<u64, VertexIdx>,
    edge_lookup: HashMap<u64, EdgeIdx>,
    grid: GridIndex,
}

impl RoadNetwork {
    /// Reads a JSON Lines network file.
    pub fn load(path: impl AsRef<Path>, cell_size_m: f64) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path)
            .map_err(|e| Error::Input(format!("cannot open {}: {e}", path.display())))?;
        let reader = BufReader::new(file);
        let mut records = Vec::new();
        let mut seen_edge = false;
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parse_err = |msg: String| Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                msg,
            };
            let rec: NetworkRecord = serde_json::from_str(&line)
                .map_err(|e| parse_err(format!("malformed record: {e}")))?;
            match rec {
                NetworkRecord::Edge { .. } => seen_edge = true,
                NetworkRecord::Vertex { .. } if seen_edge => {
                    return Err(parse_err("vertex record after the first edge".into()))
                }
                _ => {}
            }
            records.push(rec);
        }
        Self::from_records(&records, cell_size_m)
    }

    pub fn from_records(records: &[NetworkRecord], cell_size_m: f64) -> Result<Self> {
        let projection = Projection::centered_on(records.iter().filter_map(|r| match r {
            NetworkRecord::Vertex { lat, lon, .. } => Some((*lat, *lon)),
            _ => None,
        }));
        Self::with_projection(records, projection, cell_size_m)
    }

    /// Builds a network using an explicit projection instead of the bounding
    /// box centre.
    pub fn with_projection(
        records: &[NetworkRecord],
        projection: Projection,
        cell_size_m: f64,
    ) -> Result<Self> {
        if !(cell_size_m > 0.0) {
            return Err(Error::Config(format!(
                "grid cell size must be positive, got {cell_size_m}"
            )));
        }
        let mut vertices = Vec::new();
        let mut raw_edges = Vec::new();
        for r in records {
            match r {
                NetworkRecord::Vertex { v, lat, lon } => {
                    if !(-90.0..=90.0).contains(lat) || !(-180.0..=180.0).contains(lon) {
                        return Err(Error::Validation(format!(
                            "vertex {v} has invalid coordinates ({lat}, {lon})"
                        )));
                    }
                    vertices.push(Vertex {
                        id: *v,
                        lat: *lat,
                        lon: *lon,
                        pos: projection.project(*lat, *lon),
                    });
                }
                NetworkRecord::Edge {
                    e,
                    s,
                    d,
                    kind,
                    speed_mps,
                } => raw_edges.push((*e, *s, *d, kind.parse::<EdgeType>().unwrap(), *speed_mps)),
            }
        }
        vertices.sort_by_key(|v| v.id);
        let mut vertex_lookup = HashMap::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            if vertex_lookup.insert(v.id, i).is_some() {
                return Err(Error::Validation(format!("duplicate vertex id {}", v.id)));
            }
        }

        raw_edges.sort_by_key(|e| e.0);
        let mut edges = Vec::with_capacity(raw_edges.len());
        let mut edge_lookup = HashMap::with_capacity(raw_edges.len());
        let mut out_edges = vec![Vec::new(); vertices.len()];
        for (id, s, d, edge_type, speed) in raw_edges {
            let from = *vertex_lookup.get(&s).ok_or_else(|| {
                Error::Validation(format!("edge {id} references undefined vertex {s}"))
            })?;
            let to = *vertex_lookup.get(&d).ok_or_else(|| {
                Error::Validation(format!("edge {id} references undefined vertex {d}"))
            })?;
            if from == to {
                return Err(Error::Validation(format!(
                    "edge {id} is a loop on vertex {s}"
                )));
            }
            if !(speed > 0.0) {
                return Err(Error::Validation(format!(
                    "edge {id} has non-positive speed {speed}"
                )));
            }
            let start = vertices[from].pos;
            let delta = vertices[to].pos.sub(start);
            let length = delta.norm();
            if !(length > 0.0) {
                return Err(Error::Validation(format!("edge {id} has zero length")));
            }
            let idx = edges.len();
            if edge_lookup.insert(id, idx).is_some() {
                return Err(Error::Validation(format!("duplicate edge id {id}")));
            }
            out_edges[from].push(idx);
            edges.push(Edge {
                id,
                from,
                to,
                edge_type,
                length_m: length,
                speed_limit_mps: speed,
                start,
                dir: Point::new(delta.x / length, delta.y / length),
            });
        }
        let grid = GridIndex::build(&edges, cell_size_m);
        Ok(Self {
            projection,
            vertices,
            edges,
            out_edges,
            vertex_lookup,
            edge_lookup,
            grid,
        })
    }

    pub fn projection(&self) -> &Projection {
        &self.projection
    }

    pub fn project(&self, lat: f64, lon: f64) -> Point {
        self.projection.project(lat, lon)
    }

    pub fn unproject(&self, p: Point) -> (f64, f64) {
        self.projection.unproject(p)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, idx: EdgeIdx) -> &Edge {
        &self.edges[idx]
    }

    pub fn vertex(&self, idx: VertexIdx) -> &Vertex {
        &self.vertices[idx]
    }

    pub fn out_edges(&self, v: VertexIdx) -> &[EdgeIdx] {
        &self.out_edges[v]
    }

    pub fn edge_index(&self, id: u64) -> Option<EdgeIdx> {
        self.edge_lookup.get(&id).copied()
    }

    pub fn vertex_index(&self, id: u64) -> Option<VertexIdx> {
        self.vertex_lookup.get(&id).copied()
    }

    pub fn grid(&self) -> &GridIndex {
        &self.grid
    }

    /// Records suitable for writing back out as a network file.
    pub fn to_records(&self) -> Vec<NetworkRecord> {
        let vs = self.vertices.iter().map(|v| NetworkRecord::Vertex {
            v: v.id,
            lat: v.lat,
            lon: v.lon,
        });
        let es = self.edges.iter().map(|e| NetworkRecord::Edge {
            e: e.id,
            s: self.vertices[e.from].id,
            d: self.vertices[e.to].id,
            kind: e.edge_type.to_string(),
            speed_mps: e.speed_limit_mps,
        });
        vs.chain(es).collect()
    }
}

pub fn write_records(path: impl AsRef<Path>, records: &[NetworkRecord]) -> Result<()> {
    let mut w = std::io::BufWriter::new(File::create(path)?);
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

/// Convenience builder working directly in planar meters. Coordinates are
/// converted to lat/lon through a fixed projection, which the resulting
/// network keeps, so planar positions survive exactly.
#[derive(Debug, Clone)]
pub struct NetworkBuilder {
    projection: Projection,
    records: Vec<NetworkRecord>,
    cell_size_m: f64,
}

impl Default for NetworkBuilder {
    fn default() -> Self {
        Self::new(Projection::new(1.3521, 103.8198))
    }
}

impl NetworkBuilder {
    pub fn new(projection: Projection) -> Self {
        Self {
            projection,
            records: Vec::new(),
            cell_size_m: DEFAULT_CELL_SIZE_M,
        }
    }

    pub fn cell_size(mut self, cell_size_m: f64) -> Self {
        self.cell_size_m = cell_size_m;
        self
    }

    pub fn vertex(&mut self, id: u64, x: f64, y: f64) -> &mut Self {
        let (lat, lon) = self.projection.unproject(Point::new(x, y));
        self.records.push(NetworkRecord::Vertex { v: id, lat, lon });
        self
    }

    pub fn edge(&mut self, id: u64, s: u64, d: u64, kind: EdgeType, speed_mps: f64) -> &mut Self {
        self.records.push(NetworkRecord::Edge {
            e: id,
            s,
            d,
            kind: kind.to_string(),
            speed_mps,
        });
        self
    }

    /// Adds edges in both directions; the reverse edge gets id `id + 1`.
    pub fn two_way(
        &mut self,
        id: u64,
        a: u64,
        b: u64,
        kind: EdgeType,
        speed_mps: f64,
    ) -> &mut Self {
        self.edge(id, a, b, kind, speed_mps);
        self.edge(id + 1, b, a, kind, speed_mps)
    }

    pub fn records(&self) -> &[NetworkRecord] {
        &self.records
    }

    pub fn build(&self) -> Result<RoadNetwork> {
        RoadNetwork::with_projection(&self.records, self.projection, self.cell_size_m)
    }
}
