//! Trip-segment query engine over a filtered shortcut adjacency: rounds of
//! segment scans connected by precomputed transfers, with initial and
//! final transfers resolved by one-to-many searches on the raw transfer
//! graph.

use crate::delay::DelayEval;
use crate::journey::{pareto_labels, Journey, Label, Seg};
use crate::mr::ScanRoutes;
use crate::timetable::Network;
use crate::transfers::DistanceOracle;
use crate::types::*;
use crate::util::TimestampedVec;
use std::sync::Arc;

/// Forward shortcut adjacency: outgoing shortcuts per origin event, sorted
/// by destination event id.
#[derive(Clone, Debug, Default)]
pub struct ShortcutAdjacency {
    first: Vec<u32>,
    list: Vec<(EventId, Time)>,
}

impl ShortcutAdjacency {
    pub fn build(net: &Network, mut edges: Vec<(EventId, EventId, Time)>) -> Self {
        edges.sort_by_key(|&(o, d, _)| (o, d));
        edges.dedup_by_key(|e| (e.0, e.1));
        let mut first = vec![0u32; net.num_events() + 1];
        for &(o, _, _) in &edges {
            first[o.idx() + 1] += 1;
        }
        for i in 0..net.num_events() {
            first[i + 1] += first[i];
        }
        let list = edges.into_iter().map(|(_, d, t)| (d, t)).collect();
        ShortcutAdjacency { first, list }
    }

    #[inline]
    pub fn outgoing(&self, ev: EventId) -> &[(EventId, Time)] {
        &self.list[self.first[ev.idx()] as usize..self.first[ev.idx() + 1] as usize]
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }
}

/// Per-snapshot structures the query engine runs on: the scenario-current
/// route grouping (FIFO restored, so the earliest-trip lookup can binary
/// search) and the filtered shortcut adjacency.
pub struct TbStructures<'a> {
    pub net: &'a Network,
    pub routes: &'a ScanRoutes,
    pub shortcuts: &'a ShortcutAdjacency,
    /// (group, index within group) per trip.
    trip_slot: Vec<(u32, u32)>,
}

impl<'a> TbStructures<'a> {
    pub fn new(net: &'a Network, routes: &'a ScanRoutes, shortcuts: &'a ShortcutAdjacency) -> Self {
        let mut trip_slot = vec![(u32::MAX, u32::MAX); net.trips.len()];
        for (g, group) in routes.groups.iter().enumerate() {
            for (k, &t) in group.trips.iter().enumerate() {
                trip_slot[t.idx()] = (g as u32, k as u32);
            }
        }
        TbStructures {
            net,
            routes,
            shortcuts,
            trip_slot,
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Segment {
    trip: TripId,
    from: u32,
    to: u32,
    id: u32,
}

#[derive(Clone, Copy, Debug)]
enum SegmentParent {
    /// Boarded from the initial transfer.
    Initial { board: u32 },
    /// Reached via a shortcut from `segment`, exiting it at `exit_pos`.
    Via { segment: u32, exit_pos: u32, board: u32 },
}

/// Query scratch, reusable across queries on one snapshot. Initial and
/// final transfer distances come from the shared distance oracle, so
/// repeated endpoints across queries hit its cache.
pub struct TbEngine<'s, E> {
    structures: &'s TbStructures<'s>,
    eval: &'s E,
    dist: Arc<DistanceOracle>,
    pub max_rounds: usize,
    /// Disable reached-index truncation (exhaustive scan, tests only).
    pub reached_pruning: bool,
    reached: TimestampedVec<u32>,
    parents: Vec<(TripId, SegmentParent)>,
}

#[derive(Clone, Debug)]
pub struct TbResult {
    pub labels: Vec<Label>,
    pub journeys: Vec<Journey>,
}

impl<'s, E: DelayEval> TbEngine<'s, E> {
    pub fn new(structures: &'s TbStructures<'s>, eval: &'s E) -> Self {
        Self::with_distances(
            structures,
            eval,
            Arc::new(DistanceOracle::new(structures.net)),
        )
    }

    pub fn with_distances(
        structures: &'s TbStructures<'s>,
        eval: &'s E,
        dist: Arc<DistanceOracle>,
    ) -> Self {
        TbEngine {
            structures,
            eval,
            dist,
            max_rounds: crate::mr::DEFAULT_MAX_ROUNDS,
            reached_pruning: true,
            reached: TimestampedVec::new(structures.net.trips.len(), u32::MAX),
            parents: Vec::new(),
        }
    }

    pub fn query(&mut self, source: VertexId, target: VertexId, departure: Time) -> TbResult {
        let net = self.structures.net;
        let eval = self.eval;
        let shortcuts: &ShortcutAdjacency = self.structures.shortcuts;
        self.reached.reset();
        self.parents.clear();

        let dist_s = self.dist.from_vertex(source);
        let dist_t = self.dist.to_vertex(target);

        // per-round best target arrival with the witness segment/exit
        let mut best: Vec<(Time, Option<(u32, u32)>)> = vec![(INFINITY, None); self.max_rounds + 1];
        best[0].0 = sat_add(departure, dist_s[target.idx()]);

        let mut queue: Vec<Segment> = Vec::new();
        let mut next: Vec<Segment> = Vec::new();
        // exhaustive mode needs duplicate suppression to terminate
        let mut seen: std::collections::HashSet<(TripId, u32)> = std::collections::HashSet::new();

        // seed round 1 from initial transfers: the earliest boardable trip
        // per (group, position)
        for (g, group) in self.structures.routes.groups.iter().enumerate() {
            for (pos, stop) in group.stops.iter().enumerate() {
                let walk = dist_s[stop.vertex().idx()];
                if !is_finite(walk) {
                    continue;
                }
                let earliest = sat_add(departure, walk);
                // departures at one position are non-decreasing over trips
                let ti = group
                    .trips
                    .partition_point(|&t| eval.departure(net, net.trip(t).event(pos)) < earliest);
                if ti < group.trips.len() {
                    self.enqueue(
                        g,
                        ti,
                        pos as u32,
                        SegmentParent::Initial { board: pos as u32 },
                        &mut queue,
                        &mut seen,
                    );
                }
            }
        }

        let mut round = 1;
        while !queue.is_empty() && round <= self.max_rounds {
            for qi in 0..queue.len() {
                let seg = queue[qi];
                let trip = net.trip(seg.trip);
                for i in seg.from..=seg.to {
                    let ev = trip.event(i as usize);
                    let arr = eval.arrival(net, ev);
                    // final transfer
                    let total = sat_add(arr, dist_t[net.stop_of(ev).vertex().idx()]);
                    if total < best[round].0 {
                        best[round].0 = total;
                        best[round].1 = Some((seg.id, i));
                    }
                    // relax outgoing shortcuts
                    for &(dest, _tt) in shortcuts.outgoing(ev) {
                        let (g, ti) = self.structures.trip_slot[net.trip_of(dest).idx()];
                        if g == u32::MAX {
                            continue;
                        }
                        let board = net.index_in_trip(dest) as u32;
                        self.enqueue(
                            g as usize,
                            ti as usize,
                            board,
                            SegmentParent::Via {
                                segment: seg.id,
                                exit_pos: i,
                                board,
                            },
                            &mut next,
                            &mut seen,
                        );
                    }
                }
            }
            queue.clear();
            std::mem::swap(&mut queue, &mut next);
            round += 1;
        }

        let mut labels_raw: Vec<Label> = Vec::new();
        for (n, &(t, _)) in best.iter().enumerate() {
            if is_finite(t) {
                labels_raw.push((t, n));
            }
        }
        let labels = pareto_labels(labels_raw);
        let journeys = labels
            .iter()
            .map(|&(_, n)| self.extract(source, target, &best, n))
            .collect();
        TbResult { labels, journeys }
    }

    fn enqueue(
        &mut self,
        group: usize,
        trip_index: usize,
        board: u32,
        parent: SegmentParent,
        queue: &mut Vec<Segment>,
        seen: &mut std::collections::HashSet<(TripId, u32)>,
    ) {
        let net = self.structures.net;
        let g = &self.structures.routes.groups[group];
        let trip = g.trips[trip_index];
        let len = net.trip(trip).num_events;
        let (from, to);
        if self.reached_pruning {
            let reached = self.reached.get(trip.idx()).min(len);
            if board >= reached {
                return;
            }
            from = board + 1;
            to = reached.min(len - 1);
            // reached indices are non-increasing along the trip order, so
            // the propagation can stop at the first trip it cannot improve
            for &t in &g.trips[trip_index..] {
                if board < self.reached.get(t.idx()) {
                    self.reached.set(t.idx(), board);
                } else {
                    break;
                }
            }
        } else {
            if !seen.insert((trip, board)) {
                return;
            }
            from = board + 1;
            to = len - 1;
        }
        if from > to {
            return;
        }
        let id = self.parents.len() as u32;
        self.parents.push((trip, parent));
        queue.push(Segment { trip, from, to, id });
    }

    fn extract(
        &self,
        source: VertexId,
        target: VertexId,
        best: &[(Time, Option<(u32, u32)>)],
        n: usize,
    ) -> Journey {
        let mut legs: Vec<Seg> = Vec::new();
        let Some((seg_id, exit_pos)) = best[n].1 else {
            return Journey::walk(source, target);
        };
        let (mut seg_id, mut exit_pos) = (seg_id, exit_pos);
        loop {
            let (trip, parent) = self.parents[seg_id as usize];
            match parent {
                SegmentParent::Initial { board } => {
                    legs.push(Seg::new(trip, board as usize, exit_pos as usize));
                    break;
                }
                SegmentParent::Via {
                    segment,
                    exit_pos: parent_exit,
                    board,
                } => {
                    legs.push(Seg::new(trip, board as usize, exit_pos as usize));
                    seg_id = segment;
                    exit_pos = parent_exit;
                }
            }
        }
        legs.reverse();
        debug_assert_eq!(legs.len(), n);
        Journey {
            source,
            target,
            legs,
        }
    }
}
