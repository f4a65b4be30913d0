//! Update phases: fold new delay updates into the scenario, restore FIFO
//! route groups, filter the precomputed shortcuts against the scenario,
//! and (in the advanced variant) search for replacement shortcuts for
//! connections broken by delays above the limit.

mod replacement;

pub use replacement::{find_replacements, ReplacementRequest};

use crate::delay::{apply_update, DelayScenario, DelayUpdate};
use crate::mr::ScanRoutes;
use crate::tb::ShortcutAdjacency;
use crate::timetable::Network;
use crate::transfers::DistanceOracle;
use crate::types::*;
use crate::ultra::ShortcutSet;
use std::collections::HashMap;
use std::sync::Arc;
use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UpdateMode {
    /// Never rebuild: queries keep running on the initial snapshot.
    None,
    /// Apply updates, regroup routes, filter shortcuts.
    Basic,
    /// Basic plus the replacement search for broken connections.
    Advanced,
}

/// Wall-clock splits and counters of one update phase.
#[derive(Clone, Copy, Debug, Default)]
pub struct PhaseMetrics {
    pub updates: usize,
    pub full_shortcuts: usize,
    pub infeasible: usize,
    pub out_of_interval: usize,
    pub query_shortcuts: usize,
    pub replacements_added: usize,
    pub replacements_total: usize,
    pub update_seconds: f64,
    pub search_seconds: f64,
    pub merge_seconds: f64,
}

impl PhaseMetrics {
    pub fn total_seconds(&self) -> f64 {
        self.update_seconds + self.search_seconds + self.merge_seconds
    }
}

/// Immutable query data produced by one update phase. Queries run against
/// a snapshot while the next one is being built.
pub struct Snapshot {
    pub version: u64,
    pub scenario: DelayScenario,
    pub routes: ScanRoutes,
    pub shortcuts: ShortcutAdjacency,
    pub metrics: PhaseMetrics,
}

/// Applies update batches on top of a precomputed shortcut set, keeping
/// the replacement shortcuts found so far.
pub struct UpdateEngine<'a> {
    net: &'a Network,
    base: &'a ShortcutSet,
    pub mode: UpdateMode,
    dist: Arc<DistanceOracle>,
    /// Replacement shortcuts persist across phases and are re-filtered
    /// for feasibility like everything else (they carry no interval).
    replacements: HashMap<(EventId, EventId), Time>,
    /// Unfiltered adjacency over the precomputed set, for looking up the
    /// outgoing shortcuts of a delayed origin event.
    full_adjacency: ShortcutAdjacency,
    /// Trip -> group of trips with the same stop sequence.
    seq_group: Vec<u32>,
    version: u64,
}

impl<'a> UpdateEngine<'a> {
    pub fn new(net: &'a Network, base: &'a ShortcutSet, mode: UpdateMode) -> Self {
        let mut seq_group = vec![0u32; net.trips.len()];
        for (g, group) in net.stop_sequence_groups.iter().enumerate() {
            for &t in group {
                seq_group[t.idx()] = g as u32;
            }
        }
        let full_adjacency = ShortcutAdjacency::build(
            net,
            base.iter_sorted()
                .into_iter()
                .map(|s| (s.origin, s.destination, s.transfer_time))
                .collect(),
        );
        UpdateEngine {
            net,
            base,
            mode,
            dist: Arc::new(DistanceOracle::new(net)),
            replacements: HashMap::new(),
            full_adjacency,
            seq_group,
            version: 0,
        }
    }

    pub fn distances(&self) -> Arc<DistanceOracle> {
        Arc::clone(&self.dist)
    }

    /// The snapshot for the scenario before any update arrived.
    pub fn initial_snapshot(&mut self) -> Snapshot {
        self.build(DelayScenario::punctual(self.net), 0)
    }

    /// Processes one batch of buffered updates on top of `prev`.
    pub fn apply_batch(&mut self, prev: &Snapshot, batch: &[DelayUpdate]) -> Snapshot {
        let mut scenario = prev.scenario.clone();
        for u in batch {
            scenario = apply_update(self.net, &scenario, u).expect("invalid update in batch");
        }
        if self.mode == UpdateMode::None {
            let mut snap = self.build(prev.scenario.clone(), batch.len());
            // queries keep the stale scenario; only bookkeeping advances
            snap.metrics.updates = batch.len();
            return snap;
        }
        if self.mode == UpdateMode::Advanced {
            let search_start = Instant::now();
            let new_shortcuts = self.replacement_search(prev, &scenario);
            let search_seconds = search_start.elapsed().as_secs_f64();
            let merge_start = Instant::now();
            let mut added = 0;
            for (key, tt) in new_shortcuts {
                if self.replacements.insert(key, tt).is_none() {
                    added += 1;
                }
            }
            let merge_seconds = merge_start.elapsed().as_secs_f64();
            let mut snap = self.build(scenario, batch.len());
            snap.metrics.search_seconds = search_seconds;
            snap.metrics.merge_seconds = merge_seconds;
            snap.metrics.replacements_added = added;
            return snap;
        }
        self.build(scenario, batch.len())
    }

    /// Rebuilds routes and the filtered adjacency for `scenario`.
    fn build(&mut self, scenario: DelayScenario, updates: usize) -> Snapshot {
        let start = Instant::now();
        let net = self.net;
        let routes = ScanRoutes::repartitioned(net, &scenario);

        let mut edges: Vec<(EventId, EventId, Time)> = Vec::new();
        let mut infeasible = 0usize;
        let mut out_of_interval = 0usize;
        for s in self.base.iter_sorted() {
            if !shortcut_feasible(net, &scenario, s.origin, s.destination, s.transfer_time) {
                infeasible += 1;
                continue;
            }
            if !s.interval_contains(scenario.arrival_delay(s.origin)) {
                out_of_interval += 1;
                continue;
            }
            edges.push((s.origin, s.destination, s.transfer_time));
        }
        for (&(o, d), &tt) in &self.replacements {
            if shortcut_feasible(net, &scenario, o, d, tt) {
                edges.push((o, d, tt));
            }
        }
        let query_shortcuts = edges.len();
        let shortcuts = ShortcutAdjacency::build(net, edges);
        self.version += 1;
        Snapshot {
            version: self.version,
            scenario,
            routes,
            shortcuts,
            metrics: PhaseMetrics {
                updates,
                full_shortcuts: self.base.len(),
                infeasible,
                out_of_interval,
                query_shortcuts,
                replacements_added: 0,
                replacements_total: self.replacements.len(),
                update_seconds: start.elapsed().as_secs_f64(),
                search_seconds: 0.0,
                merge_seconds: 0.0,
            },
        }
    }

    /// Collects the stop events whose arrival delay increased, batches
    /// them per trip and runs the replacement routine for each batch.
    fn replacement_search(
        &self,
        prev: &Snapshot,
        scenario: &DelayScenario,
    ) -> Vec<((EventId, EventId), Time)> {
        let net = self.net;
        // delayed origin events, grouped by trip
        let mut delayed_by_trip: HashMap<TripId, Vec<EventId>> = HashMap::new();
        for e in 0..net.num_events() {
            let ev = EventId::new(e);
            if scenario.arrival_delay(ev) > prev.scenario.arrival_delay(ev) {
                delayed_by_trip.entry(net.trip_of(ev)).or_default().push(ev);
            }
        }
        if delayed_by_trip.is_empty() {
            return Vec::new();
        }
        let routes = ScanRoutes::repartitioned(net, scenario);
        let mut requests: Vec<ReplacementRequest> = Vec::new();
        for (_, origins) in delayed_by_trip {
            if let Some(req) = self.batch_request(scenario, &origins) {
                requests.push(req);
            }
        }
        // the individual calls are independent; run them in parallel
        use rayon::prelude::*;
        let mut found: Vec<((EventId, EventId), Time)> = requests
            .par_iter()
            .flat_map(|req| {
                find_replacements(net, scenario, &routes, &self.dist, req)
                    .into_par_iter()
                    .map(|(o, d, tt)| ((o, d), tt))
            })
            .collect();
        found.sort();
        found.dedup();
        found
    }

    /// Builds the merged request for all delayed origin events of one
    /// trip: source events preceding the origins, target stops from the
    /// successors of broken shortcut destinations, and per-stop arrival
    /// bounds from the direct transfer and the next same-sequence trip.
    fn batch_request(&self, scenario: &DelayScenario, origins: &[EventId]) -> Option<ReplacementRequest> {
        let net = self.net;
        let mut source_events: Vec<EventId> = Vec::new();
        let mut bounds: HashMap<StopId, Time> = HashMap::new();
        let mut any = false;
        for &o_ev in origins {
            // shortcuts out of the origin that the new delays break
            let broken: Vec<(EventId, Time)> = self
                .full_adjacency
                .outgoing(o_ev)
                .iter()
                .copied()
                .filter(|&(d, tt)| !shortcut_feasible(net, scenario, o_ev, d, tt))
                .collect();
            if broken.is_empty() {
                continue;
            }
            any = true;
            for e in net.preceding_events(o_ev) {
                if !source_events.contains(&e) {
                    source_events.push(e);
                }
            }
            let from = self.dist.from_vertex(net.stop_of(o_ev).vertex());
            let direct = |stop: StopId| sat_add(scenario.arrival(net, o_ev), from[stop.vertex().idx()]);
            // per-origin bounds: the direct walk, tightened by waiting for
            // the next trip with the destination's stop sequence
            let mut local: HashMap<StopId, Time> = HashMap::new();
            for &(d_ev, _) in &broken {
                for t_ev in net.succeeding_events(d_ev) {
                    let stop = net.stop_of(t_ev);
                    let bound = direct(stop);
                    local.entry(stop).or_insert(bound);
                }
                let i = net.index_in_trip(d_ev);
                let reach = direct(net.stop_of(d_ev));
                if let Some(next_trip) = self.find_earliest_trip(scenario, net.trip_of(d_ev), i, reach) {
                    for t_ev in net.succeeding_events(net.trip(next_trip).event(i)) {
                        let stop = net.stop_of(t_ev);
                        let arr = scenario.arrival(net, t_ev);
                        local.entry(stop).and_modify(|b| *b = (*b).min(arr)).or_insert(arr);
                    }
                }
            }
            // batching merges per-origin requests with the weaker bound
            for (stop, bound) in local {
                bounds
                    .entry(stop)
                    .and_modify(|b| *b = (*b).max(bound))
                    .or_insert(bound);
            }
        }
        if !any || source_events.is_empty() {
            return None;
        }
        let min_time = source_events
            .iter()
            .map(|&e| scenario.departure(net, e))
            .min()
            .unwrap();
        Some(ReplacementRequest {
            source_events,
            targets: bounds.into_iter().collect(),
            min_time,
        })
    }

    /// The earliest trip with the same stop sequence as `trip` whose
    /// delayed departure at index `i` is not before `bound`.
    fn find_earliest_trip(
        &self,
        scenario: &DelayScenario,
        trip: TripId,
        i: usize,
        bound: Time,
    ) -> Option<TripId> {
        let net = self.net;
        let group = &net.stop_sequence_groups[self.seq_group[trip.idx()] as usize];
        group
            .iter()
            .copied()
            .filter(|&t| scenario.departure(net, net.trip(t).event(i)) >= bound)
            .min_by_key(|&t| (scenario.departure(net, net.trip(t).event(i)), t))
    }
}

/// A shortcut is feasible when the destination departs no earlier than
/// the origin's arrival plus the transfer time.
#[inline]
pub fn shortcut_feasible(
    net: &Network,
    scenario: &DelayScenario,
    origin: EventId,
    destination: EventId,
    transfer_time: Time,
) -> bool {
    scenario.departure(net, destination) >= sat_add(scenario.arrival(net, origin), transfer_time)
}
