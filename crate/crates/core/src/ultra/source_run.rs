//! Per-source-stop shortcut computation: staggered witness searches over
//! descending departure groups, candidate exploration per origin event,
//! and the limit formulas that decide which shortcuts are kept.
//!
//! Scenario conventions inside this module (delay limit `dmax`):
//! worst case evaluates arrivals as `arr + dmax` and departures as
//! scheduled; the per-prefix best cases only differ on the prefix events,
//! which are handled by seeding (source prefix) and by the candidate
//! arrival labels (origin prefix) instead of explicit overlays.

use super::{BuildOptions, Shortcut, ShortcutSet};
use crate::timetable::Network;
use crate::transfers::{one_to_many, Direction};
use crate::types::*;
use crate::util::TimestampedVec;
use std::cmp::Reverse;
use std::collections::BinaryHeap;

/// Diagnostic record for one candidate, produced by `analyze_candidate`.
#[derive(Clone, Copy, Debug)]
pub struct CandidateReport {
    /// Candidate arrival at the destination stop (origin arrival + walk).
    pub candidate_arrival_destination: Time,
    /// Join limit of the destination stop.
    pub join_limit: Time,
    /// Feasibility limit of the destination event.
    pub feasibility_limit: Time,
    /// Split limit from earlier destination events on the same trip.
    pub d_split_limit: Time,
    /// Max witness delay of the best indirect witness at the target stop.
    pub sigma_at_target_stop: Time,
    /// Split limit from the direct (walk) witness at the target stop.
    pub direct_split_limit: Time,
    /// Split limit bound from the best indirect witness at the target.
    pub indirect_split_limit: Time,
    /// Lower bound for the minimum origin delay (first split-avoiding
    /// delay; the highest delay a split witness still dominates is one
    /// less).
    pub min_origin_delay_bound: Time,
    /// Maximum origin delay (feasibility, join and time-travel bound).
    pub max_origin_delay: Time,
    /// The no-time-travel component of the maximum.
    pub time_travel_bound: Time,
    pub emitted: bool,
}

impl CandidateReport {
    /// The highest origin delay at which some split witness still
    /// dominates, `0` if none does.
    pub fn max_split_witness_delay(&self) -> Time {
        (self.min_origin_delay_bound - 1).max(0)
    }
}

struct Probe {
    source: EventId,
    origin: EventId,
    destination: EventId,
    target: EventId,
    report: Option<CandidateReport>,
}

pub(super) struct SourceRun<'a> {
    net: &'a Network,
    dmax: Time,
    opts: BuildOptions,
    /// (route, position) pairs per stop.
    routes_at_stop: Vec<Vec<(u32, u32)>>,

    // per source stop
    dist_s: Vec<Time>,
    reachable_routes: Vec<(u32, u32)>,

    // worst-case witness labels, carried across departure groups
    wc_r1: Vec<Time>,
    wc_r2: Vec<Time>,
    entry_shared: Vec<u32>,

    // source-prefix labels, cloned per source event
    s_r1: Vec<Time>,
    s_r2: Vec<Time>,
    entry_local: Vec<u32>,

    // per origin event
    tau_c: TimestampedVec<Time>,
    tt_walk: TimestampedVec<Time>,
    r2_o: TimestampedVec<Time>,
    sigma: TimestampedVec<Time>,
    phi: TimestampedVec<Time>,
    dsplit: TimestampedVec<Time>,

    // registration state per origin event
    origin_stamp: u32,
    trip_stamp: Vec<u32>,
    min_reg: Vec<u32>,
    registered_trips: Vec<TripId>,
    cand_route_stamp: Vec<u32>,
    cand_route_pos: Vec<u32>,
    cand_routes: Vec<u32>,
    o_improved: Vec<StopId>,

    // exit indices, memoized per source event
    source_stamp: u32,
    exit_idx: Vec<u32>,
    exit_route_stamp: Vec<u32>,

    // scratch
    heap: BinaryHeap<Reverse<(Time, u32)>>,
    marked: Vec<bool>,
    marked_list: Vec<VertexId>,

    probe: Option<Probe>,
}

impl<'a> SourceRun<'a> {
    pub fn new(net: &'a Network, dmax: Time, opts: BuildOptions) -> Self {
        let n_vertices = net.num_vertices();
        let n_trips = net.trips.len();
        let n_events = net.num_events();
        let n_routes = net.routes.len();
        let mut routes_at_stop = vec![Vec::new(); net.num_stops];
        for (ri, route) in net.routes.iter().enumerate() {
            for (pos, &s) in route.stop_sequence.iter().enumerate() {
                routes_at_stop[s.idx()].push((ri as u32, pos as u32));
            }
        }
        SourceRun {
            net,
            dmax,
            opts,
            routes_at_stop,
            dist_s: vec![INFINITY; n_vertices],
            reachable_routes: Vec::new(),
            wc_r1: vec![INFINITY; n_vertices],
            wc_r2: vec![INFINITY; n_vertices],
            entry_shared: vec![0; n_trips],
            s_r1: vec![INFINITY; n_vertices],
            s_r2: vec![INFINITY; n_vertices],
            entry_local: vec![0; n_trips],
            tau_c: TimestampedVec::new(n_vertices, INFINITY),
            tt_walk: TimestampedVec::new(n_vertices, INFINITY),
            r2_o: TimestampedVec::new(n_vertices, INFINITY),
            sigma: TimestampedVec::new(n_vertices, dmax),
            phi: TimestampedVec::new(n_events, NEG_INFINITY),
            dsplit: TimestampedVec::new(n_events, 0),
            origin_stamp: 0,
            trip_stamp: vec![0; n_trips],
            min_reg: vec![0; n_trips],
            registered_trips: Vec::new(),
            cand_route_stamp: vec![0; n_routes],
            cand_route_pos: vec![0; n_routes],
            cand_routes: Vec::new(),
            o_improved: Vec::new(),
            source_stamp: 0,
            exit_idx: vec![0; n_trips],
            exit_route_stamp: vec![0; n_routes],
            heap: BinaryHeap::new(),
            marked: vec![false; n_vertices],
            marked_list: Vec::new(),
            probe: None,
        }
    }

    pub fn probe(&mut self, source: EventId, origin: EventId, destination: EventId, target: EventId) {
        self.probe = Some(Probe {
            source,
            origin,
            destination,
            target,
            report: None,
        });
    }

    pub fn take_report(&mut self) -> Option<CandidateReport> {
        self.probe.as_mut().and_then(|p| p.report.take())
    }

    #[inline]
    fn floor(&self, t_j: Time, v: usize) -> Time {
        sat_add(t_j, self.dist_s[v])
    }

    /// One-trip witness arrival in the source-prefix scenario.
    #[inline]
    fn w1s(&self, t_j: Time, v: usize) -> Time {
        self.s_r1[v].min(self.floor(t_j, v))
    }

    /// Two-trip witness arrival in the source-prefix scenario.
    #[inline]
    fn w2s(&self, t_j: Time, v: usize) -> Time {
        self.s_r2[v].min(self.w1s(t_j, v))
    }

    /// Best trip-borne witness arrival in the origin-prefix scenario: the
    /// source-prefix two-trip labels plus second trips boarded through the
    /// candidate transfer. The plain walk from the origin prefix is
    /// excluded: its arrival moves with the origin delay, so it is
    /// accounted for by the direct split limit instead.
    #[inline]
    fn w2o(&self, t_j: Time, v: usize) -> Time {
        self.r2_o.get(v).min(self.w2s(t_j, v))
    }

    pub fn run_source(&mut self, source_stop: StopId, out: &mut ShortcutSet) {
        let net = self.net;
        // departures of trips at the source stop, grouped by the delayed
        // best-case departure time, descending
        let mut groups: Vec<(Time, Vec<EventId>)> = Vec::new();
        {
            let mut events: Vec<(Time, EventId)> = Vec::new();
            for &(r, pos) in &self.routes_at_stop[source_stop.idx()] {
                let route = net.route(RouteId(r));
                for trip in route.trips() {
                    let t = net.trip(trip);
                    if (pos as usize) + 1 < t.len() {
                        let ev = t.event(pos as usize);
                        events.push((net.event(ev).scheduled_departure + self.dmax, ev));
                    }
                }
            }
            events.sort();
            for (t, ev) in events {
                match groups.last_mut() {
                    Some((key, list)) if *key == t => list.push(ev),
                    _ => groups.push((t, vec![ev])),
                }
            }
            groups.reverse();
        }
        if groups.is_empty() {
            return;
        }

        self.dist_s = one_to_many(&net.transfers, source_stop.vertex(), Direction::Forward);
        self.reachable_routes.clear();
        for (ri, route) in net.routes.iter().enumerate() {
            let first = route
                .stop_sequence
                .iter()
                .position(|s| is_finite(self.dist_s[s.idx()]));
            if let Some(pos) = first {
                self.reachable_routes.push((ri as u32, pos as u32));
            }
        }

        self.wc_r1.fill(INFINITY);
        self.wc_r2.fill(INFINITY);
        for (t, trip) in self.entry_shared.iter_mut().enumerate() {
            *trip = net.trip(TripId::new(t)).num_events;
        }

        let mut window_hi = INFINITY;
        for gi in 0..groups.len() {
            let (t_j, ref source_events) = groups[gi];
            let source_events = source_events.clone();
            if !self.opts.staggered {
                self.wc_r1.fill(INFINITY);
                self.wc_r2.fill(INFINITY);
                for (t, trip) in self.entry_shared.iter_mut().enumerate() {
                    *trip = net.trip(TripId::new(t)).num_events;
                }
            }
            let hi = if self.opts.staggered { window_hi } else { INFINITY };
            self.worst_case_run(t_j, hi);
            window_hi = t_j;

            for s_ev in source_events {
                self.source_stamp += 1;
                self.s_r1.copy_from_slice(&self.wc_r1);
                self.s_r2.copy_from_slice(&self.wc_r2);
                self.entry_local.copy_from_slice(&self.entry_shared);
                self.prefix_run(s_ev);
                let t1 = net.trip(net.trip_of(s_ev));
                let s_idx = net.index_in_trip(s_ev);
                for o_idx in s_idx + 1..t1.len() {
                    let o_ev = t1.event(o_idx);
                    self.solve_origin(s_ev, o_ev, t_j, out);
                }
            }
        }
    }

    /// The two-round witness search in the worst case for departure group
    /// `t_j`: journeys departing in `[t_j, window_hi)` are newly explored,
    /// labels and entry indices carry over from later groups.
    fn worst_case_run(&mut self, t_j: Time, window_hi: Time) {
        let net = self.net;
        debug_assert!(self.marked_list.is_empty());

        // round 1: board first trips within the departure window
        for ri in 0..self.reachable_routes.len() {
            let (r, start) = self.reachable_routes[ri];
            let route = net.route(RouteId(r));
            let mut active: Option<(usize, usize)> = None;
            for pos in start as usize..route.stop_sequence.len() {
                let stop = route.stop_sequence[pos];
                let v = stop.idx();
                if let Some((ti, _)) = active {
                    let ev = net.trip(route.trip(ti)).event(pos);
                    let arr = net.event(ev).scheduled_arrival + self.dmax;
                    if arr < self.wc_r1[v] {
                        self.wc_r1[v] = arr;
                        mark(&mut self.marked, &mut self.marked_list, stop.vertex());
                    }
                }
                let lo = self.floor(t_j, v);
                if is_finite(lo) {
                    let hi = sat_add(window_hi, self.dist_s[v]);
                    let upper = active.map_or(route.num_trips(), |(ti, _)| ti);
                    for ti in 0..upper {
                        let ev = net.trip(route.trip(ti)).event(pos);
                        let dep = net.event(ev).scheduled_departure;
                        if dep >= lo {
                            if dep < hi {
                                active = Some((ti, pos));
                                entry_update(route, ti, pos, &mut self.entry_shared);
                            }
                            break;
                        }
                    }
                }
            }
        }
        self.relax_plain_r1();

        // round 2: rescan routes at stops whose one-trip label improved
        let improved: Vec<VertexId> = std::mem::take(&mut self.marked_list);
        for &v in &improved {
            self.marked[v.idx()] = false;
        }
        let mut scan_list: Vec<(u32, u32)> = Vec::new();
        self.collect_routes(&improved, &mut scan_list);
        for (r, start) in scan_list {
            self.scan_second_round_wc(RouteId(r), start as usize);
        }
        self.relax_plain_r2();
        let done: Vec<VertexId> = std::mem::take(&mut self.marked_list);
        for v in done {
            self.marked[v.idx()] = false;
        }
    }

    fn collect_routes(&self, stops: &[VertexId], out: &mut Vec<(u32, u32)>) {
        let mut first: std::collections::HashMap<u32, u32> = std::collections::HashMap::new();
        for &v in stops {
            if let Some(stop) = v.as_stop(self.net.num_stops) {
                for &(r, pos) in &self.routes_at_stop[stop.idx()] {
                    first
                        .entry(r)
                        .and_modify(|p| *p = (*p).min(pos))
                        .or_insert(pos);
                }
            }
        }
        out.clear();
        out.extend(first.into_iter());
        out.sort_unstable();
    }

    fn scan_second_round_wc(&mut self, r: RouteId, start: usize) {
        let net = self.net;
        let route = net.route(r);
        let mut active: Option<(usize, usize)> = None;
        for pos in start..route.stop_sequence.len() {
            let stop = route.stop_sequence[pos];
            let v = stop.idx();
            if let Some((ti, _)) = active {
                let ev = net.trip(route.trip(ti)).event(pos);
                let arr = net.event(ev).scheduled_arrival + self.dmax;
                if arr < self.wc_r2[v] {
                    self.wc_r2[v] = arr;
                    mark(&mut self.marked, &mut self.marked_list, stop.vertex());
                }
            }
            let reach = self.wc_r1[v];
            if is_finite(reach) {
                let upper = active.map_or(route.num_trips(), |(ti, _)| ti);
                for ti in 0..upper {
                    let ev = net.trip(route.trip(ti)).event(pos);
                    if net.event(ev).scheduled_departure >= reach {
                        active = Some((ti, pos));
                        entry_update(route, ti, pos, &mut self.entry_shared);
                        break;
                    }
                }
            }
        }
    }

    fn relax_plain_r1(&mut self) {
        let net = self.net;
        self.heap.clear();
        for &v in &self.marked_list {
            self.heap.push(Reverse((self.wc_r1[v.idx()], v.0)));
        }
        while let Some(Reverse((d, v))) = self.heap.pop() {
            if d > self.wc_r1[v as usize] {
                continue;
            }
            for e in net.transfers.out_edges(VertexId(v)) {
                let nd = d + e.transfer_time;
                if nd < self.wc_r1[e.to.idx()] {
                    self.wc_r1[e.to.idx()] = nd;
                    mark(&mut self.marked, &mut self.marked_list, e.to);
                    self.heap.push(Reverse((nd, e.to.0)));
                }
            }
        }
    }

    fn relax_plain_r2(&mut self) {
        let net = self.net;
        self.heap.clear();
        for &v in &self.marked_list {
            self.heap.push(Reverse((self.wc_r2[v.idx()], v.0)));
        }
        while let Some(Reverse((d, v))) = self.heap.pop() {
            if d > self.wc_r2[v as usize] {
                continue;
            }
            for e in net.transfers.out_edges(VertexId(v)) {
                let nd = d + e.transfer_time;
                if nd < self.wc_r2[e.to.idx()] {
                    self.wc_r2[e.to.idx()] = nd;
                    mark(&mut self.marked, &mut self.marked_list, e.to);
                    self.heap.push(Reverse((nd, e.to.0)));
                }
            }
        }
    }

    /// The source-prefix search: seeds the exits of the source event's
    /// trip (witnesses riding the first candidate trip) on top of the
    /// carried worst-case labels, then runs the second round.
    fn prefix_run(&mut self, s_ev: EventId) {
        let net = self.net;
        debug_assert!(self.marked_list.is_empty());
        let t1 = net.trip(net.trip_of(s_ev));
        let s_idx = net.index_in_trip(s_ev);
        for m in s_idx + 1..t1.len() {
            let ev = t1.event(m);
            let v = net.stop_of(ev).vertex();
            let arr = net.event(ev).scheduled_arrival + self.dmax;
            if arr < self.s_r1[v.idx()] {
                self.s_r1[v.idx()] = arr;
                mark(&mut self.marked, &mut self.marked_list, v);
            }
        }
        // relax round 1
        self.heap.clear();
        for &v in &self.marked_list {
            self.heap.push(Reverse((self.s_r1[v.idx()], v.0)));
        }
        while let Some(Reverse((d, v))) = self.heap.pop() {
            if d > self.s_r1[v as usize] {
                continue;
            }
            for e in net.transfers.out_edges(VertexId(v)) {
                let nd = d + e.transfer_time;
                if nd < self.s_r1[e.to.idx()] {
                    self.s_r1[e.to.idx()] = nd;
                    mark(&mut self.marked, &mut self.marked_list, e.to);
                    self.heap.push(Reverse((nd, e.to.0)));
                }
            }
        }
        let improved: Vec<VertexId> = std::mem::take(&mut self.marked_list);
        for &v in &improved {
            self.marked[v.idx()] = false;
        }
        let mut scan_list: Vec<(u32, u32)> = Vec::new();
        self.collect_routes(&improved, &mut scan_list);
        for (r, start) in scan_list {
            self.scan_second_round_s(RouteId(r), start as usize);
        }
        // relax round 2
        self.heap.clear();
        for &v in &self.marked_list {
            self.heap.push(Reverse((self.s_r2[v.idx()], v.0)));
        }
        while let Some(Reverse((d, v))) = self.heap.pop() {
            if d > self.s_r2[v as usize] {
                continue;
            }
            for e in net.transfers.out_edges(VertexId(v)) {
                let nd = d + e.transfer_time;
                if nd < self.s_r2[e.to.idx()] {
                    self.s_r2[e.to.idx()] = nd;
                    mark(&mut self.marked, &mut self.marked_list, e.to);
                    self.heap.push(Reverse((nd, e.to.0)));
                }
            }
        }
        let done: Vec<VertexId> = std::mem::take(&mut self.marked_list);
        for v in done {
            self.marked[v.idx()] = false;
        }
    }

    fn scan_second_round_s(&mut self, r: RouteId, start: usize) {
        let net = self.net;
        let route = net.route(r);
        let mut active: Option<(usize, usize)> = None;
        for pos in start..route.stop_sequence.len() {
            let stop = route.stop_sequence[pos];
            let v = stop.idx();
            if let Some((ti, _)) = active {
                let ev = net.trip(route.trip(ti)).event(pos);
                let arr = net.event(ev).scheduled_arrival + self.dmax;
                if arr < self.s_r2[v] {
                    self.s_r2[v] = arr;
                    mark(&mut self.marked, &mut self.marked_list, stop.vertex());
                }
            }
            let reach = self.s_r1[v];
            if is_finite(reach) {
                let upper = active.map_or(route.num_trips(), |(ti, _)| ti);
                for ti in 0..upper {
                    let ev = net.trip(route.trip(ti)).event(pos);
                    if net.event(ev).scheduled_departure >= reach {
                        active = Some((ti, pos));
                        entry_update(route, ti, pos, &mut self.entry_local);
                        break;
                    }
                }
            }
        }
    }

    /// Solves the per-origin-event subproblem: candidate transfers from
    /// the origin stop, destination events and all limit formulas.
    fn solve_origin(&mut self, s_ev: EventId, o_ev: EventId, t_j: Time, out: &mut ShortcutSet) {
        let net = self.net;
        let dmax = self.dmax;
        self.origin_stamp = self.origin_stamp.wrapping_add(1);
        self.tau_c.reset();
        self.r2_o.reset();
        self.sigma.reset();
        self.phi.reset();
        self.dsplit.reset();
        self.registered_trips.clear();
        self.cand_routes.clear();
        self.o_improved.clear();

        let arr_o = net.event(o_ev).scheduled_arrival;
        let v_o = net.stop_of(o_ev).vertex();

        // time-travel walk bound: witnesses exiting the first trip early,
        // with arrival delays capped by the gap to the origin's arrival
        if self.opts.time_travel_pruning {
            self.tt_walk.reset();
            self.heap.clear();
            let t1 = net.trip(net.trip_of(s_ev));
            let s_idx = net.index_in_trip(s_ev);
            let o_idx = net.index_in_trip(o_ev);
            for j in s_idx + 1..o_idx {
                let ev = t1.event(j);
                let v = net.stop_of(ev).vertex();
                let seed = (net.event(ev).scheduled_arrival + dmax).min(arr_o);
                if seed < self.tt_walk.get(v.idx()) {
                    self.tt_walk.set(v.idx(), seed);
                    self.heap.push(Reverse((seed, v.0)));
                }
            }
            while let Some(Reverse((d, v))) = self.heap.pop() {
                if d > self.tt_walk.get(v as usize) {
                    continue;
                }
                for e in net.transfers.out_edges(VertexId(v)) {
                    let nd = d + e.transfer_time;
                    if nd < self.tt_walk.get(e.to.idx()) {
                        self.tt_walk.set(e.to.idx(), nd);
                        self.heap.push(Reverse((nd, e.to.0)));
                    }
                }
            }
        }

        // candidate transfer exploration from the origin stop, pruned
        // where a one-trip witness (or a time-travel-capped one) is at
        // least as fast
        self.heap.clear();
        self.tau_c.set(v_o.idx(), arr_o);
        self.heap.push(Reverse((arr_o, v_o.0)));
        while let Some(Reverse((d, v))) = self.heap.pop() {
            if d > self.tau_c.get(v as usize) {
                continue;
            }
            let mut bound = self.w1s(t_j, v as usize);
            if self.opts.time_travel_pruning {
                bound = bound.min(self.tt_walk.get(v as usize));
            }
            if d > bound {
                continue; // prune: no candidate through here survives
            }
            if let Some(stop) = VertexId(v).as_stop(net.num_stops) {
                if d < self.w1s(t_j, v as usize) {
                    self.o_improved.push(stop);
                }
                for &(r, pos) in &self.routes_at_stop[stop.idx()] {
                    if self.cand_route_stamp[r as usize] != self.origin_stamp {
                        self.cand_route_stamp[r as usize] = self.origin_stamp;
                        self.cand_route_pos[r as usize] = pos;
                        self.cand_routes.push(r);
                    } else if pos < self.cand_route_pos[r as usize] {
                        self.cand_route_pos[r as usize] = pos;
                    }
                }
            }
            for e in net.transfers.out_edges(VertexId(v)) {
                let nd = d + e.transfer_time;
                if nd < self.tau_c.get(e.to.idx()) {
                    self.tau_c.set(e.to.idx(), nd);
                    self.heap.push(Reverse((nd, e.to.0)));
                }
            }
        }

        // exit indices for every candidate-reachable route, memoized per
        // source event
        for k in 0..self.cand_routes.len() {
            let r = self.cand_routes[k];
            if self.exit_route_stamp[r as usize] == self.source_stamp {
                continue;
            }
            self.exit_route_stamp[r as usize] = self.source_stamp;
            let route = net.route(RouteId(r));
            for trip in route.trips() {
                let t = net.trip(trip);
                let mut exit = t.len() as u32;
                for i in (0..t.len()).rev() {
                    let ev = t.event(i);
                    let arr = net.event(ev).scheduled_arrival;
                    if arr <= self.w2s(t_j, net.stop_of(ev).vertex().idx()) {
                        exit = i as u32;
                        break;
                    }
                }
                self.exit_idx[trip.idx()] = exit;
            }
        }

        // destination events per route: positions before the witness
        // index with non-negative feasibility limit
        for k in 0..self.cand_routes.len() {
            let r = self.cand_routes[k];
            let route = net.route(RouteId(r));
            let n_trips = route.num_trips();
            let r_wit = |run: &Self, ti: usize| {
                let trip = route.trip(ti);
                run.entry_local[trip.idx()].min(run.exit_idx[trip.idx()])
            };
            let start = self.cand_route_pos[r as usize] as usize;
            let bound = r_wit(self, 0) as usize;
            let mut t_end = n_trips as isize - 1;
            for i in start..bound {
                while t_end >= 0 && (r_wit(self, t_end as usize) as usize) <= i {
                    t_end -= 1;
                }
                if t_end < 0 {
                    break;
                }
                for ti in (0..=t_end as usize).rev() {
                    let trip = route.trip(ti);
                    if trip == net.trip_of(o_ev) {
                        // re-entering the candidate's own trip is never
                        // better than staying on it
                        continue;
                    }
                    let d_ev = net.trip(trip).event(i);
                    let tc = self.tau_c.get(net.stop_of(d_ev).vertex().idx());
                    let slack = sat_sub(net.event(d_ev).scheduled_departure, tc);
                    let phi_v = sat_add(slack.min(0), dmax);
                    if phi_v < 0 {
                        break;
                    }
                    self.phi.set(d_ev.idx(), phi_v);
                    if self.trip_stamp[trip.idx()] != self.origin_stamp {
                        self.trip_stamp[trip.idx()] = self.origin_stamp;
                        self.registered_trips.push(trip);
                        self.min_reg[trip.idx()] = i as u32;
                    } else if (i as u32) < self.min_reg[trip.idx()] {
                        self.min_reg[trip.idx()] = i as u32;
                    }
                }
            }
        }

        // destination split limits: sweep each registered trip from first
        // to last, carrying the highest witness delay seen so far
        for k in 0..self.registered_trips.len() {
            let trip = self.registered_trips[k];
            let t = net.trip(trip);
            let mut lim: Time = 0;
            for i in self.min_reg[trip.idx()] as usize..t.len() {
                let d_ev = t.event(i);
                if self.phi.get(d_ev.idx()) <= NEG_INFINITY {
                    continue;
                }
                self.dsplit.set(d_ev.idx(), lim);
                let tc = self.tau_c.get(net.stop_of(d_ev).vertex().idx());
                let sigma_ev =
                    (-1i64).max(sat_sub(net.event(d_ev).scheduled_departure, tc).min(dmax));
                lim = lim.max(sigma_ev + 1);
            }
        }

        // origin-prefix witness search: second trips boardable through
        // the candidate transfer, tracking the max witness delay of the
        // label-defining witness per vertex
        let improved: Vec<StopId> = self.o_improved.clone();
        {
            let mut first: std::collections::HashMap<u32, u32> = std::collections::HashMap::new();
            for &stop in &improved {
                for &(r, pos) in &self.routes_at_stop[stop.idx()] {
                    first.entry(r).and_modify(|p| *p = (*p).min(pos)).or_insert(pos);
                }
            }
            let mut list: Vec<(u32, u32)> = first.into_iter().collect();
            list.sort_unstable();
            for (r, start) in list {
                self.scan_origin_round(RouteId(r), start as usize, s_ev, o_ev, t_j);
            }
        }
        // relax the origin-prefix round-2 labels, dragging sigma along
        self.heap.clear();
        for &v in &self.marked_list {
            self.heap.push(Reverse((self.r2_o.get(v.idx()), v.0)));
        }
        while let Some(Reverse((d, v))) = self.heap.pop() {
            if d > self.r2_o.get(v as usize) {
                continue;
            }
            let sig = self.sigma.get(v as usize);
            for e in net.transfers.out_edges(VertexId(v)) {
                let nd = d + e.transfer_time;
                if nd < self.w2o(t_j, e.to.idx()) {
                    self.r2_o.set(e.to.idx(), nd);
                    self.sigma.set(e.to.idx(), sig);
                    self.heap.push(Reverse((nd, e.to.0)));
                }
            }
        }
        let done: Vec<VertexId> = std::mem::take(&mut self.marked_list);
        for v in done {
            self.marked[v.idx()] = false;
        }

        // second candidate trip scan: one reverse sweep per trip with a
        // registered destination event
        for k in 0..self.registered_trips.len() {
            let trip = self.registered_trips[k];
            let t = net.trip(trip);
            let r_x = self.exit_idx[trip.idx()] as usize;
            if r_x >= t.len() {
                continue; // no undominated candidate exits on this trip
            }
            let j_min = self.min_reg[trip.idx()] as usize;
            let mut agg_t = INFINITY;
            let mut tau_max = NEG_INFINITY;
            for i in (j_min..r_x).rev() {
                let t_ev = t.event(i + 1);
                let v_t = net.stop_of(t_ev).vertex().idx();
                let arr_t = net.event(t_ev).scheduled_arrival;
                if arr_t <= self.w2s(t_j, v_t) {
                    let tc_t = self.tau_c.get(v_t);
                    let l1 = (dmax + 1).min(sat_sub(arr_t, tc_t));
                    let l2 = if arr_t <= self.w2o(t_j, v_t) {
                        0
                    } else {
                        self.sigma.get(v_t) + 1
                    };
                    agg_t = agg_t.min(l1.max(l2));
                    tau_max = tau_max.max(self.w2s(t_j, v_t));
                    if let Some(p) = &mut self.probe {
                        if p.source == s_ev && p.origin == o_ev && p.target == t_ev {
                            let r = p.report.get_or_insert_with(empty_report);
                            r.sigma_at_target_stop = self.sigma.get(v_t);
                            r.direct_split_limit = l1;
                            r.indirect_split_limit = l2;
                        }
                    }
                }
                let d_ev = t.event(i);
                if self.phi.get(d_ev.idx()) <= NEG_INFINITY {
                    continue;
                }
                let v_d = net.stop_of(d_ev).vertex().idx();
                let tc = self.tau_c.get(v_d);
                let lam_hat = self.dsplit.get(d_ev.idx()).max(agg_t);
                let join = sat_sub(self.w1s(t_j, v_d), tc);
                let rho_tt = sat_sub(tau_max, tc);
                let rho = self.phi.get(d_ev.idx()).min(join).min(rho_tt);
                let emitted = lam_hat <= rho;
                if let Some(p) = &mut self.probe {
                    if p.source == s_ev && p.origin == o_ev && p.destination == d_ev {
                        let r = p.report.get_or_insert_with(empty_report);
                        r.candidate_arrival_destination = tc;
                        r.join_limit = join;
                        r.feasibility_limit = self.phi.get(d_ev.idx());
                        r.d_split_limit = self.dsplit.get(d_ev.idx());
                        r.min_origin_delay_bound = lam_hat;
                        r.max_origin_delay = rho;
                        r.time_travel_bound = rho_tt;
                        r.emitted |= emitted;
                    }
                }
                if emitted {
                    out.insert(Shortcut {
                        origin: o_ev,
                        destination: d_ev,
                        transfer_time: tc - arr_o,
                        min_origin_delay: lam_hat,
                        max_origin_delay: rho,
                    });
                }
            }
        }
    }

    /// Route scan of the origin-prefix second round: boardings enabled by
    /// the candidate arrival labels, with the active maximum witness delay
    /// attached to every improvement.
    fn scan_origin_round(&mut self, r: RouteId, start: usize, s_ev: EventId, o_ev: EventId, t_j: Time) {
        let net = self.net;
        let dmax = self.dmax;
        let route = net.route(r);
        let mut active: Option<(usize, Time)> = None; // (trip index, active sigma)
        for pos in start..route.stop_sequence.len() {
            let stop = route.stop_sequence[pos];
            let v = stop.idx();
            if let Some((ti, sig)) = active {
                let ev = net.trip(route.trip(ti)).event(pos);
                let arr = if ev == s_ev || ev == o_ev {
                    net.event(ev).scheduled_arrival
                } else {
                    net.event(ev).scheduled_arrival + dmax
                };
                if arr < self.w2o(t_j, v) {
                    self.r2_o.set(v, arr);
                    self.sigma.set(v, sig);
                    mark(&mut self.marked, &mut self.marked_list, stop.vertex());
                }
            }
            let tc = self.tau_c.get(v);
            let reach = tc.min(self.w1s(t_j, v));
            if is_finite(reach) {
                let upper = active.map_or(route.num_trips(), |(ti, _)| ti);
                for ti in 0..upper {
                    let ev = net.trip(route.trip(ti)).event(pos);
                    let dep = net.event(ev).scheduled_departure;
                    if dep >= reach {
                        let sig = if dep >= self.w1s(t_j, v) {
                            dmax
                        } else {
                            (-1i64).max(sat_sub(dep, tc).min(dmax))
                        };
                        active = Some((ti, sig));
                        break;
                    }
                }
            }
        }
    }
}

fn empty_report() -> CandidateReport {
    CandidateReport {
        candidate_arrival_destination: INFINITY,
        join_limit: NEG_INFINITY,
        feasibility_limit: NEG_INFINITY,
        d_split_limit: 0,
        sigma_at_target_stop: NEG_INFINITY,
        direct_split_limit: NEG_INFINITY,
        indirect_split_limit: NEG_INFINITY,
        min_origin_delay_bound: INFINITY,
        max_origin_delay: NEG_INFINITY,
        time_travel_bound: INFINITY,
        emitted: false,
    }
}

/// Entering trip `ti` of `route` at position `pos` makes `pos` a witness
/// boarding point of that trip and every later trip of the route. Entry
/// indices follow the boarded-position-plus-one convention, with the trip
/// length as the nothing-boardable sentinel.
fn entry_update(route: &crate::timetable::Route, ti: usize, pos: usize, entry: &mut [u32]) {
    for t in ti..route.num_trips() {
        let trip = route.trip(t);
        if (pos as u32) + 1 < entry[trip.idx()] {
            entry[trip.idx()] = pos as u32 + 1;
        }
    }
}

fn mark(marked: &mut [bool], list: &mut Vec<VertexId>, v: VertexId) {
    if !marked[v.idx()] {
        marked[v.idx()] = true;
        list.push(v);
    }
}
