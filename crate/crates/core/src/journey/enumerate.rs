//! Exhaustive journey enumeration on tiny instances, the foundation of the
//! brute-force oracles.

use super::{Journey, Seg};
use crate::delay::DelayEval;
use crate::timetable::Network;
use crate::transfers::DistanceOracle;
use crate::types::*;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum EnumerateError {
    #[error("instance too large for exhaustive enumeration: {events} events > cap {cap}")]
    TooLarge { events: usize, cap: usize },
}

#[derive(Clone, Copy, Debug)]
pub struct EnumerateLimits {
    pub max_events: usize,
}

impl Default for EnumerateLimits {
    fn default() -> Self {
        EnumerateLimits { max_events: 48 }
    }
}

/// A feasible sequence of complete trip segments starting at some source
/// vertex (transfers implied). `end_vertex`/`end_time` describe the state
/// after the last exit; for the empty chain they are the source and the
/// departure time.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    pub legs: Vec<Seg>,
    pub end_vertex: VertexId,
    pub end_time: Time,
}

/// All feasible chains with at most `max_trips` segments, departing from
/// `source` no earlier than `departure_time` under `eval`. Consecutive
/// segments use different trips and segments have strictly positive
/// length. Deterministic order.
pub fn enumerate_chains(
    net: &Network,
    dist: &DistanceOracle,
    source: VertexId,
    departure_time: Time,
    eval: &impl DelayEval,
    max_trips: usize,
) -> Vec<Chain> {
    let events_at_stop = events_by_stop(net);
    let mut out = Vec::new();
    let mut legs = Vec::new();
    rec(
        net,
        dist,
        eval,
        &events_at_stop,
        source,
        departure_time,
        max_trips,
        &mut legs,
        &mut out,
        source,
        departure_time,
    );
    out
}

fn events_by_stop(net: &Network) -> Vec<Vec<EventId>> {
    let mut at = vec![Vec::new(); net.num_stops];
    for e in 0..net.num_events() {
        at[net.stop_of(EventId::new(e)).idx()].push(EventId::new(e));
    }
    at
}

#[allow(clippy::too_many_arguments)]
fn rec(
    net: &Network,
    dist: &DistanceOracle,
    eval: &impl DelayEval,
    events_at_stop: &[Vec<EventId>],
    at: VertexId,
    time: Time,
    max_trips: usize,
    legs: &mut Vec<Seg>,
    out: &mut Vec<Chain>,
    source: VertexId,
    departure_time: Time,
) {
    out.push(Chain {
        legs: legs.clone(),
        end_vertex: at,
        end_time: time,
    });
    if legs.len() == max_trips {
        return;
    }
    let last_trip = legs.last().map(|l| l.trip);
    for stop in 0..net.num_stops {
        let d = dist.dist(at, StopId::new(stop).vertex());
        if !is_finite(d) {
            continue;
        }
        for &ev in &events_at_stop[stop] {
            let trip = net.trip_of(ev);
            if last_trip == Some(trip) {
                continue;
            }
            if eval.departure(net, ev) < sat_add(time, d) {
                continue;
            }
            let enter = net.index_in_trip(ev);
            let t = net.trip(trip);
            for exit in enter + 1..t.len() {
                legs.push(Seg::new(trip, enter, exit));
                let exit_ev = t.event(exit);
                rec(
                    net,
                    dist,
                    eval,
                    events_at_stop,
                    net.stop_of(exit_ev).vertex(),
                    eval.arrival(net, exit_ev),
                    max_trips,
                    legs,
                    out,
                    source,
                    departure_time,
                );
                legs.pop();
            }
        }
    }
}

/// Every feasible structurally distinct journey from `source` to `target`
/// with at most `max_trips` trips, departing no earlier than
/// `departure_time` in `eval`. Transfers are shortest paths by
/// construction. Guarded against large instances.
pub fn enumerate_journeys(
    net: &Network,
    dist: &DistanceOracle,
    source: VertexId,
    target: VertexId,
    departure_time: Time,
    max_trips: usize,
    eval: &impl DelayEval,
    limits: EnumerateLimits,
) -> Result<Vec<Journey>, EnumerateError> {
    if net.num_events() > limits.max_events {
        return Err(EnumerateError::TooLarge {
            events: net.num_events(),
            cap: limits.max_events,
        });
    }
    let chains = enumerate_chains(net, dist, source, departure_time, eval, max_trips);
    Ok(chains
        .into_iter()
        .filter(|c| is_finite(dist.dist(c.end_vertex, target)))
        .map(|c| Journey {
            source,
            target,
            legs: c.legs,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delay::DelayScenario;
    use crate::testutil::two_witness_network;

    #[test]
    fn source_equals_target_gives_empty_journey() {
        let inst = two_witness_network();
        let net = &inst.net;
        let dist = DistanceOracle::new(net);
        let s = DelayScenario::punctual(net);
        let js = enumerate_journeys(
            net,
            &dist,
            VertexId(0),
            VertexId(0),
            0,
            2,
            &s,
            EnumerateLimits::default(),
        )
        .unwrap();
        assert!(js.contains(&Journey::walk(VertexId(0), VertexId(0))));
        let walk = &js[0];
        assert_eq!(walk.arrival(net, &dist, &s, 123), 123);
    }

    #[test]
    fn finds_candidate_and_witness_shapes() {
        let inst = two_witness_network();
        let net = &inst.net;
        let dist = DistanceOracle::new(net);
        // best case with limit 5: the candidate transfer (slack -2) works
        let s = crate::delay::Overlay::best_case(5);
        let js = enumerate_journeys(
            net,
            &dist,
            VertexId(0),
            VertexId(3),
            0,
            2,
            &s,
            EnumerateLimits::default(),
        )
        .unwrap();
        let t_first = net.trip_of(inst.source_event);
        let t_second = net.trip_of(inst.destination_event);
        let t_split = net.trip_of(inst.split_witness_destination);
        let candidate = Journey {
            source: VertexId(0),
            target: VertexId(3),
            legs: vec![Seg::new(t_first, 0, 1), Seg::new(t_second, 0, 1)],
        };
        let split_witness = Journey {
            source: VertexId(0),
            target: VertexId(3),
            legs: vec![Seg::new(t_first, 0, 1), Seg::new(t_split, 0, 1)],
        };
        assert!(js.contains(&candidate));
        assert!(js.contains(&split_witness));
        // all enumerated journeys are feasible and distinct
        let mut sorted = js.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), js.len());
        for j in &js {
            assert!(j.feasible(net, &dist, &s, 0), "{}", j.debug_string());
        }
    }

    #[test]
    fn guard_rejects_large_instances() {
        let inst = two_witness_network();
        let dist = DistanceOracle::new(&inst.net);
        let s = DelayScenario::punctual(&inst.net);
        let err = enumerate_journeys(
            &inst.net,
            &dist,
            VertexId(0),
            VertexId(3),
            0,
            2,
            &s,
            EnumerateLimits { max_events: 4 },
        )
        .unwrap_err();
        assert!(matches!(err, EnumerateError::TooLarge { .. }));
    }
}
