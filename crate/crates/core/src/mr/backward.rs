//! Backward round-based search: latest departure times towards a set of
//! target stops with per-stop arrival bounds. Used by the replacement
//! search to prune its forward searches.

use super::ScanRoutes;
use crate::delay::DelayEval;
use crate::timetable::Network;
use crate::types::*;
use std::collections::BinaryHeap;

/// τ(v, n): the latest departure at `v` from which some target stop is
/// reached within its bound using at most `n` trips.
#[derive(Clone, Debug)]
pub struct BackwardLabels {
    pub rounds: Vec<Vec<Time>>,
}

impl BackwardLabels {
    #[inline]
    pub fn latest(&self, v: VertexId, round: usize) -> Time {
        self.rounds[round][v.idx()]
    }
}

/// Runs the backward search for `max_rounds` rounds (`<= 2` in the
/// replacement search). Labels below `min_time` are recorded but not
/// propagated when `prune` is set; `min_time` is the earliest delayed
/// departure of any relevant source event.
pub fn backward_mr(
    net: &Network,
    eval: &impl DelayEval,
    routes: &ScanRoutes,
    targets: &[(StopId, Time)],
    min_time: Time,
    max_rounds: usize,
    prune: bool,
) -> BackwardLabels {
    let n_vertices = net.num_vertices();
    let mut rounds: Vec<Vec<Time>> = Vec::with_capacity(max_rounds + 1);
    let mut marked = vec![false; n_vertices];
    let mut marked_list: Vec<VertexId> = Vec::new();
    let mut heap: BinaryHeap<(Time, u32)> = BinaryHeap::new();

    let prunable = |t: Time| prune && t < min_time;

    // round 0: final transfers (walking backward from the targets)
    let mut round0 = vec![NEG_INFINITY; n_vertices];
    for &(stop, bound) in targets {
        let v = stop.vertex();
        if bound > round0[v.idx()] {
            round0[v.idx()] = bound;
            mark(&mut marked, &mut marked_list, v);
        }
    }
    relax_backward(net, &mut round0, &mut marked, &mut marked_list, &mut heap, min_time, prune);
    rounds.push(round0);

    for _ in 1..=max_rounds {
        let prev = rounds.last().unwrap().clone();
        let mut cur = prev.clone();

        let mut last_pos: Vec<u32> = vec![u32::MAX; routes.groups.len()];
        for &v in &marked_list {
            if prunable(prev[v.idx()]) {
                continue;
            }
            if let Some(stop) = v.as_stop(net.num_stops) {
                for &(g, pos) in &routes.at_stop[stop.idx()] {
                    let cur_pos = &mut last_pos[g as usize];
                    if *cur_pos == u32::MAX || pos > *cur_pos {
                        *cur_pos = pos;
                    }
                }
            }
        }
        for v in marked_list.drain(..) {
            marked[v.idx()] = false;
        }

        for (g, &end) in last_pos.iter().enumerate() {
            if end == u32::MAX {
                continue;
            }
            let group = &routes.groups[g];
            // scan positions from the last marked one down to the first;
            // the active trip is the latest one exitable so far
            let mut active: Option<usize> = None;
            for pos in (0..=end as usize).rev() {
                let stop = group.stops[pos];
                let v = stop.vertex();
                if let Some(ti) = active {
                    let dep = eval.departure(net, net.trip(group.trips[ti]).event(pos));
                    if dep > cur[v.idx()] {
                        cur[v.idx()] = dep;
                        if !prunable(dep) {
                            mark(&mut marked, &mut marked_list, v);
                        }
                    }
                }
                let bound = prev[v.idx()];
                if bound > NEG_INFINITY && !prunable(bound) {
                    let lower = active.map_or(0, |ti| ti + 1);
                    for ti in (lower..group.trips.len()).rev() {
                        let arr = eval.arrival(net, net.trip(group.trips[ti]).event(pos));
                        if arr <= bound {
                            active = Some(ti);
                            break;
                        }
                    }
                }
            }
        }
        relax_backward(net, &mut cur, &mut marked, &mut marked_list, &mut heap, min_time, prune);
        rounds.push(cur);
    }
    BackwardLabels { rounds }
}

/// Max-label Dijkstra over incoming edges: departing earlier leaves time
/// to walk to the already-labeled vertex.
fn relax_backward(
    net: &Network,
    labels: &mut [Time],
    marked: &mut [bool],
    marked_list: &mut Vec<VertexId>,
    heap: &mut BinaryHeap<(Time, u32)>,
    min_time: Time,
    prune: bool,
) {
    heap.clear();
    for &v in marked_list.iter() {
        heap.push((labels[v.idx()], v.0));
    }
    while let Some((d, v)) = heap.pop() {
        if d < labels[v as usize] {
            continue;
        }
        if prune && d < min_time {
            continue;
        }
        for e in net.transfers.in_edges(VertexId(v)) {
            let nd = d - e.transfer_time;
            if nd > labels[e.to.idx()] {
                labels[e.to.idx()] = nd;
                if !(prune && nd < min_time) {
                    mark(marked, marked_list, e.to);
                    heap.push((nd, e.to.0));
                }
            }
        }
    }
}

fn mark(marked: &mut [bool], list: &mut Vec<VertexId>, v: VertexId) {
    if !marked[v.idx()] {
        marked[v.idx()] = true;
        list.push(v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delay::DelayScenario;
    use crate::testutil::two_witness_network;

    #[test]
    fn targets_initialize_round_zero() {
        let inst = two_witness_network();
        let net = &inst.net;
        let s = DelayScenario::punctual(net);
        let routes = ScanRoutes::repartitioned(net, &s);
        let labels = backward_mr(net, &s, &routes, &[(StopId(3), 100)], NEG_INFINITY, 2, false);
        assert_eq!(labels.latest(VertexId(3), 0), 100);
        // walking backward over the edge 7 -> 3 (time 1)
        assert_eq!(labels.latest(VertexId(7), 0), 99);
    }

    #[test]
    fn one_round_rides_trips_backward() {
        let inst = two_witness_network();
        let net = &inst.net;
        let s = DelayScenario::punctual(net);
        let routes = ScanRoutes::repartitioned(net, &s);
        let labels = backward_mr(net, &s, &routes, &[(StopId(3), 100)], NEG_INFINITY, 2, false);
        // ride the split witness trip (dep 24 at stop 6, arrives 40, walk 1
        // to stop 3 by 41 <= 100): latest departure at stop 6 is 24
        assert_eq!(labels.latest(VertexId(6), 1), 24);
        // ride the second candidate trip (dep 19 at stop 2, arr 50 at stop 3)
        assert_eq!(labels.latest(VertexId(2), 1), 19);
        // the same round also walks backward over 1 -> 6: depart stop 1 at
        // 23, walk to stop 6, ride the fourth trip
        assert_eq!(labels.latest(VertexId(1), 1), 23);
    }

    #[test]
    fn pruning_preserves_labels_above_min_time() {
        let inst = two_witness_network();
        let net = &inst.net;
        let s = DelayScenario::punctual(net);
        let routes = ScanRoutes::repartitioned(net, &s);
        let unpruned = backward_mr(net, &s, &routes, &[(StopId(3), 100)], NEG_INFINITY, 2, false);
        let pruned = backward_mr(net, &s, &routes, &[(StopId(3), 100)], 19, 2, true);
        for n in 0..=2 {
            for v in 0..net.num_vertices() {
                let u = unpruned.latest(VertexId::new(v), n);
                if u >= 19 {
                    assert_eq!(pruned.latest(VertexId::new(v), n), u, "v={v} n={n}");
                }
            }
        }
    }
}
