//! Shortest-path machinery on the transfer graph: one-to-many searches for
//! initial/final transfers and a cached distance oracle for canonical
//! transfer times.

use crate::timetable::{Network, TransferGraph};
use crate::types::*;
use crate::util::TimestampedVec;
use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::sync::{Arc, RwLock};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Distances from the given vertex to every vertex.
    Forward,
    /// Distances from every vertex to the given vertex.
    Backward,
}

/// Exact shortest-path distances between `from` and all vertices.
/// `Forward` relaxes outgoing edges, `Backward` incoming ones.
pub fn one_to_many(graph: &TransferGraph, from: VertexId, direction: Direction) -> Vec<Time> {
    let mut dist = vec![INFINITY; graph.num_vertices()];
    let mut heap: BinaryHeap<Reverse<(Time, u32)>> = BinaryHeap::new();
    dist[from.idx()] = 0;
    heap.push(Reverse((0, from.0)));
    while let Some(Reverse((d, v))) = heap.pop() {
        if d > dist[v as usize] {
            continue;
        }
        let edges = match direction {
            Direction::Forward => graph.out_edges(VertexId(v)),
            Direction::Backward => graph.in_edges(VertexId(v)),
        };
        for e in edges {
            let nd = d + e.transfer_time;
            if nd < dist[e.to.idx()] {
                dist[e.to.idx()] = nd;
                heap.push(Reverse((nd, e.to.0)));
            }
        }
    }
    dist
}

/// Reusable Dijkstra scratch state for repeated one-to-many runs without
/// reallocation. Ties in the queue break by vertex id for determinism.
pub struct DijkstraScratch {
    dist: TimestampedVec<Time>,
    heap: BinaryHeap<Reverse<(Time, u32)>>,
}

impl DijkstraScratch {
    pub fn new(num_vertices: usize) -> Self {
        DijkstraScratch {
            dist: TimestampedVec::new(num_vertices, INFINITY),
            heap: BinaryHeap::new(),
        }
    }

    pub fn run(&mut self, graph: &TransferGraph, from: VertexId, direction: Direction) {
        self.dist.reset();
        self.heap.clear();
        self.dist.set(from.idx(), 0);
        self.heap.push(Reverse((0, from.0)));
        while let Some(Reverse((d, v))) = self.heap.pop() {
            if d > self.dist.get(v as usize) {
                continue;
            }
            let edges = match direction {
                Direction::Forward => graph.out_edges(VertexId(v)),
                Direction::Backward => graph.in_edges(VertexId(v)),
            };
            for e in edges {
                let nd = d + e.transfer_time;
                if nd < self.dist.get(e.to.idx()) {
                    self.dist.set(e.to.idx(), nd);
                    self.heap.push(Reverse((nd, e.to.0)));
                }
            }
        }
    }

    #[inline]
    pub fn dist(&self, v: VertexId) -> Time {
        self.dist.get(v.idx())
    }
}

/// Canonical transfer times: since transfers in journeys are shortest
/// paths, a transfer is determined by its endpoints. Caches one-to-many
/// results per endpoint; shareable across threads.
pub struct DistanceOracle {
    graph: TransferGraph,
    forward: RwLock<Vec<Option<Arc<Vec<Time>>>>>,
    backward: RwLock<Vec<Option<Arc<Vec<Time>>>>>,
}

impl DistanceOracle {
    pub fn new(net: &Network) -> Self {
        let n = net.num_vertices();
        DistanceOracle {
            graph: net.transfers.clone(),
            forward: RwLock::new(vec![None; n]),
            backward: RwLock::new(vec![None; n]),
        }
    }

    pub fn from_vertex(&self, v: VertexId) -> Arc<Vec<Time>> {
        if let Some(d) = &self.forward.read().unwrap()[v.idx()] {
            return Arc::clone(d);
        }
        let d = Arc::new(one_to_many(&self.graph, v, Direction::Forward));
        self.forward.write().unwrap()[v.idx()] = Some(Arc::clone(&d));
        d
    }

    pub fn to_vertex(&self, v: VertexId) -> Arc<Vec<Time>> {
        if let Some(d) = &self.backward.read().unwrap()[v.idx()] {
            return Arc::clone(d);
        }
        let d = Arc::new(one_to_many(&self.graph, v, Direction::Backward));
        self.backward.write().unwrap()[v.idx()] = Some(Arc::clone(&d));
        d
    }

    /// Shortest transfer time from `u` to `v`, `INFINITY` if unreachable.
    pub fn dist(&self, u: VertexId, v: VertexId) -> Time {
        if u == v {
            return 0;
        }
        self.from_vertex(u)[v.idx()]
    }
}
