//! Network model: graph, projection, grid index and candidate retrieval.

pub mod fragment;
pub mod geo;
pub mod grid;
pub mod network;

pub use fragment::{
    clip_edge_to_disk, retrieve_fragments, retrieve_fragments_at, uncertainty_radius,
    CellularLocation, EdgeFragment, DEFAULT_MIN_FRAGMENT_M,
};
pub use geo::{Point, Projection};
pub use grid::GridIndex;
pub use network::{
    write_records, Edge, EdgeIdx, EdgeType, NetworkBuilder, NetworkRecord, RoadNetwork, Vertex,
    VertexIdx, DEFAULT_CELL_SIZE_M,
};
