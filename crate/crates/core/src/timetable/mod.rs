//! The static public transit network: stops, stop events, trips, FIFO
//! routes and the weighted transfer graph.

mod builder;
mod io;
mod partition;

pub use builder::NetworkBuilder;
pub use io::{load_network, save_network, NetworkIoError};
pub use partition::{fifo_pair, partition_routes, TripRecord, TripTimes};

use crate::types::*;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StopEvent {
    pub stop: StopId,
    pub scheduled_arrival: Time,
    pub scheduled_departure: Time,
    pub trip: TripId,
    pub index_in_trip: u32,
}

/// Events of a trip are stored contiguously; a trip is a range into the
/// event array.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trip {
    pub first_event: EventId,
    pub num_events: u32,
    pub route: RouteId,
}

impl Trip {
    #[inline]
    pub fn len(&self) -> usize {
        self.num_events as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.num_events == 0
    }

    #[inline]
    pub fn event(&self, i: usize) -> EventId {
        debug_assert!(i < self.len());
        EventId(self.first_event.0 + i as u32)
    }

    pub fn events(&self) -> impl Iterator<Item = EventId> + '_ {
        (0..self.len()).map(|i| self.event(i))
    }
}

/// Trips of a route are consecutive `TripId`s ordered by the FIFO order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Route {
    pub stop_sequence: Vec<StopId>,
    pub first_trip: TripId,
    pub num_trips: u32,
}

impl Route {
    #[inline]
    pub fn num_trips(&self) -> usize {
        self.num_trips as usize
    }

    #[inline]
    pub fn trip(&self, i: usize) -> TripId {
        debug_assert!(i < self.num_trips());
        TripId(self.first_trip.0 + i as u32)
    }

    pub fn trips(&self) -> impl Iterator<Item = TripId> + '_ {
        (0..self.num_trips()).map(|i| self.trip(i))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TransferEdge {
    pub to: VertexId,
    pub transfer_time: Time,
}

/// Static directed transfer graph in adjacency-array form, with the
/// reverse adjacency kept alongside for backward searches.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransferGraph {
    num_vertices: usize,
    first_out: Vec<u32>,
    out_edges: Vec<TransferEdge>,
    first_in: Vec<u32>,
    in_edges: Vec<TransferEdge>,
}

impl TransferGraph {
    /// Builds the adjacency arrays from an edge list. Edges are stored in
    /// canonical (from, to, time) order so that structurally equal graphs
    /// compare equal regardless of input order.
    pub fn new(num_vertices: usize, edges: &[(VertexId, VertexId, Time)]) -> Self {
        let mut edges = edges.to_vec();
        edges.sort_unstable();
        let edges = &edges[..];
        let build = |endpoint: fn(&(VertexId, VertexId, Time)) -> VertexId,
                     other: fn(&(VertexId, VertexId, Time)) -> VertexId| {
            let mut first = vec![0u32; num_vertices + 1];
            for e in edges {
                first[endpoint(e).idx() + 1] += 1;
            }
            for i in 0..num_vertices {
                first[i + 1] += first[i];
            }
            let mut slots = first.clone();
            let mut list = vec![
                TransferEdge {
                    to: VertexId(0),
                    transfer_time: 0
                };
                edges.len()
            ];
            for e in edges {
                let v = endpoint(e).idx();
                list[slots[v] as usize] = TransferEdge {
                    to: other(e),
                    transfer_time: e.2,
                };
                slots[v] += 1;
            }
            (first, list)
        };
        let (first_out, out_edges) = build(|e| e.0, |e| e.1);
        let (first_in, in_edges) = build(|e| e.1, |e| e.0);
        TransferGraph {
            num_vertices,
            first_out,
            out_edges,
            first_in,
            in_edges,
        }
    }

    #[inline]
    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    #[inline]
    pub fn num_edges(&self) -> usize {
        self.out_edges.len()
    }

    #[inline]
    pub fn out_edges(&self, v: VertexId) -> &[TransferEdge] {
        &self.out_edges[self.first_out[v.idx()] as usize..self.first_out[v.idx() + 1] as usize]
    }

    #[inline]
    pub fn in_edges(&self, v: VertexId) -> &[TransferEdge] {
        &self.in_edges[self.first_in[v.idx()] as usize..self.first_in[v.idx() + 1] as usize]
    }

    pub fn edge_list(&self) -> Vec<(VertexId, VertexId, Time)> {
        let mut edges = Vec::with_capacity(self.out_edges.len());
        for v in 0..self.num_vertices {
            for e in self.out_edges(VertexId::new(v)) {
                edges.push((VertexId::new(v), e.to, e.transfer_time));
            }
        }
        edges
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Network {
    pub num_stops: usize,
    pub stop_names: Vec<String>,
    pub events: Vec<StopEvent>,
    pub trips: Vec<Trip>,
    pub routes: Vec<Route>,
    pub transfers: TransferGraph,
    /// Trips grouped by identical stop sequence, in first-appearance order.
    /// Route repartitioning under delays regroups within these groups.
    pub stop_sequence_groups: Vec<Vec<TripId>>,
}

impl Network {
    #[inline]
    pub fn num_vertices(&self) -> usize {
        self.transfers.num_vertices()
    }

    #[inline]
    pub fn num_events(&self) -> usize {
        self.events.len()
    }

    #[inline]
    pub fn event(&self, e: EventId) -> &StopEvent {
        &self.events[e.idx()]
    }

    #[inline]
    pub fn trip(&self, t: TripId) -> &Trip {
        &self.trips[t.idx()]
    }

    #[inline]
    pub fn route(&self, r: RouteId) -> &Route {
        &self.routes[r.idx()]
    }

    #[inline]
    pub fn trip_of(&self, e: EventId) -> TripId {
        self.events[e.idx()].trip
    }

    #[inline]
    pub fn stop_of(&self, e: EventId) -> StopId {
        self.events[e.idx()].stop
    }

    #[inline]
    pub fn index_in_trip(&self, e: EventId) -> usize {
        self.events[e.idx()].index_in_trip as usize
    }

    /// Events preceding `e` within its trip.
    pub fn preceding_events(&self, e: EventId) -> impl Iterator<Item = EventId> + '_ {
        let trip = self.trip(self.trip_of(e));
        let i = self.index_in_trip(e);
        (0..i).map(move |k| trip.event(k))
    }

    /// Events succeeding `e` within its trip.
    pub fn succeeding_events(&self, e: EventId) -> impl Iterator<Item = EventId> + '_ {
        let trip = self.trip(self.trip_of(e));
        let i = self.index_in_trip(e);
        (i + 1..trip.len()).map(move |k| trip.event(k))
    }

    /// Routes (with the stop's position in the sequence) serving a stop.
    /// Precomputed views are built by the engines; this is the plain scan.
    pub fn routes_at_stop(&self, stop: StopId) -> Vec<(RouteId, usize)> {
        let mut out = Vec::new();
        for (ri, route) in self.routes.iter().enumerate() {
            for (pos, &s) in route.stop_sequence.iter().enumerate() {
                if s == stop {
                    out.push((RouteId::new(ri), pos));
                }
            }
        }
        out
    }

    /// A content hash used to tie shortcut files to the network they were
    /// computed for. FNV-1a over times, ids and edges.
    pub fn content_hash(&self) -> u64 {
        let mut h = Fnv::new();
        h.word(self.num_stops as u64);
        h.word(self.num_vertices() as u64);
        for ev in &self.events {
            h.word(ev.stop.0 as u64);
            h.word(ev.scheduled_arrival as u64);
            h.word(ev.scheduled_departure as u64);
            h.word(ev.trip.0 as u64);
        }
        for r in &self.routes {
            h.word(r.num_trips as u64);
            for &s in &r.stop_sequence {
                h.word(s.0 as u64);
            }
        }
        for v in 0..self.num_vertices() {
            for e in self.transfers.out_edges(VertexId::new(v)) {
                h.word(v as u64);
                h.word(e.to.0 as u64);
                h.word(e.transfer_time as u64);
            }
        }
        h.0
    }
}

struct Fnv(u64);

impl Fnv {
    fn new() -> Self {
        Fnv(0xcbf29ce484222325)
    }

    fn word(&mut self, w: u64) {
        for byte in w.to_le_bytes() {
            self.0 ^= byte as u64;
            self.0 = self.0.wrapping_mul(0x100000001b3);
        }
    }
}

/// A contiguous view over events `i..=j` of one trip.
#[derive(Clone, Copy, Debug)]
pub struct TripSegmentView<'a> {
    pub trip: TripId,
    pub enter: usize,
    pub exit: usize,
    events: &'a [StopEvent],
    first_event: EventId,
}

impl<'a> TripSegmentView<'a> {
    pub fn len(&self) -> usize {
        self.exit - self.enter + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn event_ids(&self) -> impl Iterator<Item = EventId> + 'a {
        let first = self.first_event.0 + self.enter as u32;
        (0..self.len() as u32).map(move |k| EventId(first + k))
    }

    pub fn events(&self) -> &'a [StopEvent] {
        &self.events[self.enter..=self.exit]
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SegmentError {
    #[error("segment indices {enter}..{exit} out of range for trip of length {len}")]
    OutOfRange { enter: usize, exit: usize, len: usize },
}

/// The contiguous subsequence of a trip from index `enter` to `exit`.
pub fn trip_segment(net: &Network, trip: TripId, enter: usize, exit: usize) -> Result<TripSegmentView<'_>, SegmentError> {
    let t = net.trip(trip);
    if enter > exit || exit >= t.len() {
        return Err(SegmentError::OutOfRange { enter, exit, len: t.len() });
    }
    let first = t.first_event.idx();
    Ok(TripSegmentView {
        trip,
        enter,
        exit,
        events: &net.events[first..first + t.len()],
        first_event: t.first_event,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::six_stop_trip_network;

    #[test]
    fn trip_segment_views() {
        let net = six_stop_trip_network();
        let t = TripId(0);
        let whole = trip_segment(&net, t, 0, net.trip(t).len() - 1).unwrap();
        assert_eq!(whole.len(), 6);
        let single = trip_segment(&net, t, 2, 2).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single.events()[0].scheduled_arrival, 9 * 3600 + 8 * 60);
        let mid = trip_segment(&net, t, 2, 4).unwrap();
        let ids: Vec<_> = mid.event_ids().collect();
        assert_eq!(ids, vec![EventId(2), EventId(3), EventId(4)]);
        assert!(trip_segment(&net, t, 3, 2).is_err());
        assert!(trip_segment(&net, t, 0, 6).is_err());
    }

    #[test]
    fn transfer_graph_adjacency_and_reverse() {
        let g = TransferGraph::new(
            4,
            &[
                (VertexId(0), VertexId(1), 60),
                (VertexId(0), VertexId(2), 30),
                (VertexId(2), VertexId(3), 10),
            ],
        );
        assert_eq!(g.out_edges(VertexId(0)).len(), 2);
        assert_eq!(g.in_edges(VertexId(3)).len(), 1);
        assert_eq!(g.in_edges(VertexId(3))[0].to, VertexId(2));
        assert_eq!(g.out_edges(VertexId(1)).len(), 0);
        assert_eq!(g.edge_list().len(), 3);
    }
}
