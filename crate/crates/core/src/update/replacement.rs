//! The replacement routine: given source events, target stops and
//! per-stop arrival bounds, finds two-trip journeys in the current
//! scenario and emits their intermediate transfers as shortcuts.

use crate::delay::DelayScenario;
use crate::mr::backward::backward_mr;
use crate::mr::witness::{witness_search_forward, Init, SearchConfig};
use crate::mr::ScanRoutes;
use crate::timetable::Network;
use crate::transfers::DistanceOracle;
use crate::types::*;

#[derive(Clone, Debug)]
pub struct ReplacementRequest {
    pub source_events: Vec<EventId>,
    /// Target stops with the latest useful arrival per stop.
    pub targets: Vec<(StopId, Time)>,
    /// Earliest delayed departure among the source events; the backward
    /// search prunes below it.
    pub min_time: Time,
}

/// For each (source event, target stop) pair, searches for a two-trip
/// journey departing no earlier than the source event and arriving within
/// the target bound; returns the intermediate transfers found, as
/// (origin event, destination event, transfer time) triples.
pub fn find_replacements(
    net: &Network,
    scenario: &DelayScenario,
    routes: &ScanRoutes,
    dist: &DistanceOracle,
    req: &ReplacementRequest,
) -> Vec<(EventId, EventId, Time)> {
    if req.targets.is_empty() || req.source_events.is_empty() {
        return Vec::new();
    }
    let backward = backward_mr(net, scenario, routes, &req.targets, req.min_time, 2, true);

    let mut out: Vec<(EventId, EventId, Time)> = Vec::new();
    for &s_ev in &req.source_events {
        let cfg = SearchConfig {
            eval: scenario,
            routes,
            max_rounds: 2,
            init: Init::Source {
                vertex: net.stop_of(s_ev).vertex(),
                departure: scenario.departure(net, s_ev),
            },
            window_end: INFINITY,
            carried: None,
            bounds: Some(&backward),
        };
        let labels = witness_search_forward(net, &cfg);
        for &(stop, bound) in &req.targets {
            let v = stop.vertex();
            let two = labels.arrival(v, 2);
            if two > bound || !is_finite(two) {
                continue;
            }
            // only journeys with exactly two trips carry a new transfer
            if two >= labels.arrival(v, 1) {
                continue;
            }
            if let Some(journey) = labels.extract(net, v, 2) {
                if journey.legs.len() == 2 {
                    let from = journey.legs[0].exit_event(net);
                    let to = journey.legs[1].enter_event(net);
                    let walk = dist.dist(net.stop_of(from).vertex(), net.stop_of(to).vertex());
                    debug_assert!(is_finite(walk));
                    out.push((from, to, walk));
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delay::{replay_updates, DelayUpdate};
    use crate::timetable::NetworkBuilder;

    /// A line with a 10-minute headway feeding a connection with 2 minutes
    /// of slack: delaying the feeder by 6 minutes breaks the transfer, and
    /// the replacement must board the next trip of the target line.
    fn headway_instance() -> Network {
        let mut b = NetworkBuilder::new(4);
        // feeder: stop 0 -> stop 1, dep 1000, arr 1600
        b.add_trip(&[0, 1], &[(900, 1000), (1600, 1600)]);
        // target line every 600s from stop 2: dep 1720 (slack 2 min after
        // the 60s walk), 2320, 2920
        for k in 0..3 {
            let dep = 1720 + 600 * k;
            b.add_trip(&[2, 3], &[(dep - 10, dep), (dep + 900, dep + 900)]);
        }
        b.add_edge(1, 2, 60);
        b.build()
    }

    #[test]
    fn finds_next_trip_replacement() {
        let net = headway_instance();
        let feeder = net.trip_of(
            net.trips
                .iter()
                .map(|t| t.event(0))
                .find(|&e| net.stop_of(e) == StopId(0))
                .unwrap(),
        );
        // 6-minute delay on the feeder's arrival breaks the first transfer
        let update = DelayUpdate::constant(&net, feeder, 1, 360, 0);
        let scenario = replay_updates(&net, [&update]).unwrap();
        let routes = ScanRoutes::repartitioned(&net, &scenario);
        let dist = DistanceOracle::new(&net);
        let o_ev = net.trip(feeder).event(1);
        let s_ev = net.trip(feeder).event(0);
        // the broken shortcut pointed at the 1720 departure; targets are
        // the stops behind it, bounded by the next trip's arrival
        let req = ReplacementRequest {
            source_events: vec![s_ev],
            targets: vec![(StopId(3), 2320 + 900)],
            min_time: scenario.departure(&net, s_ev),
        };
        let found = find_replacements(&net, &scenario, &routes, &dist, &req);
        assert_eq!(found.len(), 1);
        let (from, to, walk) = found[0];
        assert_eq!(from, o_ev);
        assert_eq!(walk, 60);
        // boards the second trip of the target line (dep 2320)
        assert_eq!(net.event(to).scheduled_departure, 2320);
    }

    #[test]
    fn empty_request_is_empty() {
        let net = headway_instance();
        let scenario = crate::delay::DelayScenario::punctual(&net);
        let routes = ScanRoutes::repartitioned(&net, &scenario);
        let dist = DistanceOracle::new(&net);
        let req = ReplacementRequest {
            source_events: vec![],
            targets: vec![],
            min_time: 0,
        };
        assert!(find_replacements(&net, &scenario, &routes, &dist, &req).is_empty());
    }

    #[test]
    fn pruned_and_unpruned_forward_agree() {
        let net = headway_instance();
        let feeder = net.trip_of(net.trips[0].event(0));
        let update = DelayUpdate::constant(&net, feeder, 1, 360, 0);
        let scenario = replay_updates(&net, [&update]).unwrap();
        let routes = ScanRoutes::repartitioned(&net, &scenario);
        let dist = DistanceOracle::new(&net);
        let s_ev = net.trip(feeder).event(0);
        let req = ReplacementRequest {
            source_events: vec![s_ev],
            targets: vec![(StopId(3), 4000)],
            min_time: scenario.departure(&net, s_ev),
        };
        let pruned = find_replacements(&net, &scenario, &routes, &dist, &req);
        // unpruned: run the same extraction without backward bounds
        let cfg = SearchConfig {
            eval: &scenario,
            routes: &routes,
            max_rounds: 2,
            init: Init::Source {
                vertex: net.stop_of(s_ev).vertex(),
                departure: scenario.departure(&net, s_ev),
            },
            window_end: INFINITY,
            carried: None,
            bounds: None,
        };
        let labels = witness_search_forward(&net, &cfg);
        let mut unpruned = Vec::new();
        for &(stop, bound) in &req.targets {
            let v = stop.vertex();
            let two = labels.arrival(v, 2);
            if two <= bound && two < labels.arrival(v, 1) {
                if let Some(j) = labels.extract(&net, v, 2) {
                    if j.legs.len() == 2 {
                        let from = j.legs[0].exit_event(&net);
                        let to = j.legs[1].enter_event(&net);
                        unpruned.push((
                            from,
                            to,
                            dist.dist(net.stop_of(from).vertex(), net.stop_of(to).vertex()),
                        ));
                    }
                }
            }
        }
        unpruned.sort();
        unpruned.dedup();
        assert_eq!(pruned, unpruned);
    }
}
