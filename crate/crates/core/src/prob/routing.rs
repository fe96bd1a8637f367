//! Shortest-path helpers over the directed network.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use crate::netmodel::{EdgeFragment, EdgeIdx, Point, RoadNetwork, VertexIdx};

#[derive(Debug, Clone, Copy, PartialEq)]
struct HeapItem {
    dist: f64,
    vertex: VertexIdx,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Result of a single-source Dijkstra run, limited to distances ≤ `cutoff`.
#[derive(Debug, Clone)]
pub struct ShortestPaths {
    dist: HashMap<VertexIdx, f64>,
    pred: HashMap<VertexIdx, EdgeIdx>,
}

impl ShortestPaths {
    pub fn from_vertex(net: &RoadNetwork, source: VertexIdx, cutoff: f64) -> Self {
        let mut dist = HashMap::new();
        let mut pred = HashMap::new();
        let mut heap = BinaryHeap::new();
        dist.insert(source, 0.0);
        heap.push(HeapItem {
            dist: 0.0,
            vertex: source,
        });
        while let Some(HeapItem { dist: d, vertex }) = heap.pop() {
            if d > dist[&vertex] {
                continue;
            }
            for &e in net.out_edges(vertex) {
                let edge = net.edge(e);
                let nd = d + edge.length_m;
                if nd > cutoff {
                    continue;
                }
                if dist.get(&edge.to).is_none_or(|&old| nd < old) {
                    dist.insert(edge.to, nd);
                    pred.insert(edge.to, e);
                    heap.push(HeapItem {
                        dist: nd,
                        vertex: edge.to,
                    });
                }
            }
        }
        Self { dist, pred }
    }

    pub fn distance(&self, v: VertexIdx) -> Option<f64> {
        self.dist.get(&v).copied()
    }

    /// Edge sequence from the source to `v`, if reached.
    pub fn path_to(&self, net: &RoadNetwork, v: VertexIdx) -> Option<Vec<EdgeIdx>> {
        self.dist.get(&v)?;
        let mut edges = Vec::new();
        let mut cur = v;
        while let Some(&e) = self.pred.get(&cur) {
            edges.push(e);
            cur = net.edge(e).from;
        }
        edges.reverse();
        Some(edges)
    }
}

/// Smallest network distance from any point of `a` to any point of `b`,
/// travelling along edge directions. Infinite if `b` cannot be reached
/// within `cutoff` meters.
pub fn fragment_gap(net: &RoadNetwork, a: &EdgeFragment, b: &EdgeFragment, cutoff: f64) -> f64 {
    if a.edge == b.edge && b.end_m >= a.start_m {
        return (b.start_m - a.end_m).max(0.0);
    }
    let ea = net.edge(a.edge);
    let eb = net.edge(b.edge);
    let tail = ea.length_m - a.end_m;
    let budget = cutoff - tail - b.start_m;
    if budget < 0.0 {
        return f64::INFINITY;
    }
    let sp = ShortestPaths::from_vertex(net, ea.to, budget);
    match sp.distance(eb.from) {
        Some(d) => tail + d + b.start_m,
        None => f64::INFINITY,
    }
}

/// Lower bound on the time needed to get from fragment `a` to fragment `b`
/// at speed `v_max`. Infinite when unreachable.
pub fn min_travel_time(net: &RoadNetwork, a: &EdgeFragment, b: &EdgeFragment, v_max: f64) -> f64 {
    fragment_gap(net, a, b, f64::INFINITY) / v_max
}

/// A position on the network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetPos {
    pub edge: EdgeIdx,
    pub offset: f64,
}

/// A drivable route between two network positions.
#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    /// `(edge, from_offset, to_offset)` legs in travel order.
    pub legs: Vec<(EdgeIdx, f64, f64)>,
    pub length_m: f64,
}

impl Route {
    /// Position after travelling `dist` meters (clamped to the route).
    pub fn position_at(&self, dist: f64) -> NetPos {
        let mut left = dist.max(0.0);
        for &(edge, a, b) in &self.legs {
            let len = b - a;
            if left <= len {
                return NetPos {
                    edge,
                    offset: a + left,
                };
            }
            left -= len;
        }
        let &(edge, _, b) = self.legs.last().expect("route has at least one leg");
        NetPos { edge, offset: b }
    }

    pub fn point_at(&self, net: &RoadNetwork, dist: f64) -> Point {
        let p = self.position_at(dist);
        net.edge(p.edge).point_at(p.offset)
    }
}

/// Shortest route from `from` to `to`, or `None` if unreachable.
pub fn shortest_route(net: &RoadNetwork, from: NetPos, to: NetPos) -> Option<Route> {
    if from.edge == to.edge && to.offset >= from.offset {
        return Some(Route {
            legs: vec![(from.edge, from.offset, to.offset)],
            length_m: to.offset - from.offset,
        });
    }
    let ea = net.edge(from.edge);
    let sp = ShortestPaths::from_vertex(net, ea.to, f64::INFINITY);
    let mid = sp.path_to(net, net.edge(to.edge).from)?;
    let mut legs = vec![(from.edge, from.offset, ea.length_m)];
    legs.extend(mid.into_iter().map(|e| (e, 0.0, net.edge(e).length_m)));
    legs.push((to.edge, 0.0, to.offset));
    let length_m = legs.iter().map(|&(_, a, b)| b - a).sum();
    Some(Route { legs, length_m })
}
