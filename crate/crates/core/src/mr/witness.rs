//! Restricted forward searches (at most a few rounds) with optional
//! departure windows, carried labels from a previous run, prefix seeding
//! and per-round pruning bounds. The replacement search drives this with
//! bounds from a backward search; tests use the window/resume modes.

use super::backward::BackwardLabels;
use super::ScanRoutes;
use crate::delay::DelayEval;
use crate::journey::{Journey, Seg};
use crate::timetable::Network;
use crate::types::*;
use std::cmp::Reverse;
use std::collections::BinaryHeap;

#[derive(Clone, Copy, Debug)]
pub enum ParentLink {
    Walk { from: VertexId },
    Ride { trip: TripId, enter_pos: u32, exit_pos: u32 },
}

#[derive(Clone, Debug)]
pub enum Init<'a> {
    /// Start at a vertex with a departure time (round 0 walks from here).
    Source { vertex: VertexId, departure: Time },
    /// Extend a fixed journey prefix: per-stop arrival seeds relaxed into
    /// round 1 (the prefix already used one trip).
    PrefixExits(&'a [(StopId, Time)]),
}

#[derive(Clone)]
pub struct SearchConfig<'a, E> {
    pub eval: &'a E,
    pub routes: &'a ScanRoutes,
    pub max_rounds: usize,
    pub init: Init<'a>,
    /// Only explore journeys departing strictly before this bound; pair
    /// with `carried` to resume a previous wider run.
    pub window_end: Time,
    pub carried: Option<&'a RoundLabels>,
    /// Prune when a round-`n` label exceeds `bounds(v, max_rounds - n)`.
    pub bounds: Option<&'a BackwardLabels>,
}

#[derive(Clone, Debug)]
pub struct RoundLabels {
    pub source: Option<VertexId>,
    pub rounds: Vec<Vec<Time>>,
    pub parents: Vec<Vec<Option<ParentLink>>>,
}

impl RoundLabels {
    #[inline]
    pub fn arrival(&self, v: VertexId, round: usize) -> Time {
        self.rounds[round.min(self.rounds.len() - 1)][v.idx()]
    }

    /// Unwinds the parent links of `(target, round)` into a journey. Only
    /// available for source-initialized searches.
    pub fn extract(&self, net: &Network, target: VertexId, round: usize) -> Option<Journey> {
        let source = self.source?;
        if !is_finite(self.rounds[round][target.idx()]) {
            return None;
        }
        let mut legs: Vec<Seg> = Vec::new();
        let mut v = target;
        let mut n = round;
        loop {
            match self.parents[n][v.idx()] {
                Some(ParentLink::Walk { from }) => v = from,
                Some(ParentLink::Ride { trip, enter_pos, exit_pos }) => {
                    legs.push(Seg::new(trip, enter_pos as usize, exit_pos as usize));
                    v = net.stop_of(net.trip(trip).event(enter_pos as usize)).vertex();
                    n -= 1;
                }
                None => {
                    if n == 0 {
                        break;
                    }
                    n -= 1;
                }
            }
        }
        legs.reverse();
        Some(Journey { source, target, legs })
    }
}

/// Runs the configured search and returns per-round labels.
pub fn witness_search_forward<E: DelayEval>(net: &Network, cfg: &SearchConfig<'_, E>) -> RoundLabels {
    let n_vertices = net.num_vertices();
    let n_rounds = cfg.max_rounds;
    let mut rounds: Vec<Vec<Time>>;
    let mut parents: Vec<Vec<Option<ParentLink>>>;
    match cfg.carried {
        Some(prev) => {
            rounds = prev.rounds.clone();
            parents = prev.parents.clone();
            assert_eq!(rounds.len(), n_rounds + 1);
        }
        None => {
            rounds = vec![vec![INFINITY; n_vertices]; n_rounds + 1];
            parents = vec![vec![None; n_vertices]; n_rounds + 1];
        }
    }

    let mut marked = vec![false; n_vertices];
    let mut marked_list: Vec<VertexId> = Vec::new();
    let mut heap: BinaryHeap<Reverse<(Time, u32)>> = BinaryHeap::new();

    // the walk distance offset used by the departure window, per vertex
    let (source, first_round) = match cfg.init {
        Init::Source { vertex, departure } => {
            if departure < rounds[0][vertex.idx()] {
                rounds[0][vertex.idx()] = departure;
                mark(&mut marked, &mut marked_list, vertex);
            }
            relax(
                net, cfg, 0, &mut rounds, &mut parents, &mut marked, &mut marked_list, &mut heap,
            );
            (Some(vertex), 1)
        }
        Init::PrefixExits(seeds) => {
            for &(stop, arrival) in seeds {
                let v = stop.vertex();
                if arrival < rounds[1][v.idx()] {
                    rounds[1][v.idx()] = arrival;
                    parents[1][v.idx()] = None;
                    mark(&mut marked, &mut marked_list, v);
                }
            }
            relax(
                net, cfg, 1, &mut rounds, &mut parents, &mut marked, &mut marked_list, &mut heap,
            );
            (None, 2)
        }
    };

    for n in first_round..=n_rounds {
        if marked_list.is_empty() {
            break;
        }
        // fold the previous round into this one
        for v in 0..n_vertices {
            if rounds[n - 1][v] < rounds[n][v] {
                rounds[n][v] = rounds[n - 1][v];
                parents[n][v] = None;
            }
        }
        let mut first_pos: Vec<u32> = vec![u32::MAX; cfg.routes.groups.len()];
        for &v in &marked_list {
            if let Some(stop) = v.as_stop(net.num_stops) {
                for &(g, pos) in &cfg.routes.at_stop[stop.idx()] {
                    first_pos[g as usize] = first_pos[g as usize].min(pos);
                }
            }
        }
        for v in marked_list.drain(..) {
            marked[v.idx()] = false;
        }

        for (g, &start) in first_pos.iter().enumerate() {
            if start == u32::MAX {
                continue;
            }
            scan_group(
                net, cfg, g, start as usize, n, &mut rounds, &mut parents, &mut marked,
                &mut marked_list,
            );
        }
        relax(
            net, cfg, n, &mut rounds, &mut parents, &mut marked, &mut marked_list, &mut heap,
        );
    }

    RoundLabels {
        source,
        rounds,
        parents,
    }
}

#[allow(clippy::too_many_arguments)]
fn scan_group<E: DelayEval>(
    net: &Network,
    cfg: &SearchConfig<'_, E>,
    g: usize,
    start: usize,
    n: usize,
    rounds: &mut [Vec<Time>],
    parents: &mut [Vec<Option<ParentLink>>],
    marked: &mut [bool],
    marked_list: &mut Vec<VertexId>,
) {
    let group = &cfg.routes.groups[g];
    let eval = cfg.eval;
    let windowed = n == 1 && is_finite(cfg.window_end);
    let source_departure = match cfg.init {
        Init::Source { departure, .. } => departure,
        Init::PrefixExits(_) => NEG_INFINITY,
    };
    let mut active: Option<(usize, usize)> = None;
    for pos in start..group.stops.len() {
        let v = group.stops[pos].vertex();
        if let Some((ti, enter_pos)) = active {
            let trip = group.trips[ti];
            let arr = eval.arrival(net, net.trip(trip).event(pos));
            if arr < rounds[n][v.idx()] {
                rounds[n][v.idx()] = arr;
                parents[n][v.idx()] = Some(ParentLink::Ride {
                    trip,
                    enter_pos: enter_pos as u32,
                    exit_pos: pos as u32,
                });
                if !pruned(cfg, v, n, arr) {
                    mark(marked, marked_list, v);
                }
            }
        }
        let reach = rounds[n - 1][v.idx()];
        if reach < INFINITY {
            let upper = active.map_or(group.trips.len(), |(ti, _)| ti);
            for (ti, &trip) in group.trips.iter().enumerate().take(upper) {
                let dep = eval.departure(net, net.trip(trip).event(pos));
                if dep >= reach {
                    // the window bounds the journey's departure at the
                    // source: boarding time minus the initial walk
                    if windowed {
                        let walk = reach - source_departure;
                        if dep - walk >= cfg.window_end {
                            continue;
                        }
                    }
                    active = Some((ti, pos));
                    break;
                }
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn relax<E: DelayEval>(
    net: &Network,
    cfg: &SearchConfig<'_, E>,
    n: usize,
    rounds: &mut [Vec<Time>],
    parents: &mut [Vec<Option<ParentLink>>],
    marked: &mut [bool],
    marked_list: &mut Vec<VertexId>,
    heap: &mut BinaryHeap<Reverse<(Time, u32)>>,
) {
    heap.clear();
    for &v in marked_list.iter() {
        heap.push(Reverse((rounds[n][v.idx()], v.0)));
    }
    while let Some(Reverse((d, v))) = heap.pop() {
        if d > rounds[n][v as usize] {
            continue;
        }
        for e in net.transfers.out_edges(VertexId(v)) {
            let nd = d + e.transfer_time;
            if nd < rounds[n][e.to.idx()] {
                rounds[n][e.to.idx()] = nd;
                parents[n][e.to.idx()] = Some(ParentLink::Walk { from: VertexId(v) });
                if !pruned(cfg, e.to, n, nd) {
                    mark(marked, marked_list, e.to);
                    heap.push(Reverse((nd, e.to.0)));
                }
            }
        }
    }
}

#[inline]
fn pruned<E: DelayEval>(cfg: &SearchConfig<'_, E>, v: VertexId, n: usize, label: Time) -> bool {
    match cfg.bounds {
        Some(b) => label > b.latest(v, cfg.max_rounds - n),
        None => false,
    }
}

fn mark(marked: &mut [bool], list: &mut Vec<VertexId>, v: VertexId) {
    if !marked[v.idx()] {
        marked[v.idx()] = true;
        list.push(v);
    }
}
