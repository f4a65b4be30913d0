//! Small fixture networks shared by unit, integration and acceptance tests.

use crate::timetable::{Network, NetworkBuilder};
use crate::types::*;

/// A single six-event trip (9:00 to 9:25) whose stop times exercise the
/// per-trip entry/exit/witness index computation: with the witness labels
/// from [`six_stop_trip_witness_labels`], the entry index is 2, the exit
/// index 4 and the witness index 2.
pub fn six_stop_trip_network() -> Network {
    let m = |h: Time, min: Time| h * 3600 + min * 60;
    NetworkBuilder::new(6)
        .trip(
            &[0, 1, 2, 3, 4, 5],
            &[
                (m(9, 0), m(9, 2)),
                (m(9, 5), m(9, 6)),
                (m(9, 8), m(9, 10)),
                (m(9, 15), m(9, 16)),
                (m(9, 20), m(9, 21)),
                (m(9, 24), m(9, 25)),
            ],
        )
        .build()
}

/// Witness arrival labels (rounds 1 and 2, per stop) matching the trip of
/// [`six_stop_trip_network`]: the one-trip labels make stops 1, 4 and 5
/// boardable by a witness, the two-trip labels leave stops 2 and 4 as the
/// only non-dominated candidate exits.
pub fn six_stop_trip_witness_labels() -> (Vec<Time>, Vec<Time>) {
    let m = |h: Time, min: Time| h * 3600 + min * 60;
    let round1 = vec![m(9, 30), m(8, 54), m(9, 12), m(9, 18), m(9, 21), m(9, 7)];
    let round2 = vec![m(8, 59), m(8, 54), m(9, 12), m(9, 14), m(9, 21), m(9, 7)];
    (round1, round2)
}

/// Vertex/stop layout of the worked two-witness instance built by
/// [`two_witness_network`].
pub struct TwoWitnessInstance {
    pub net: Network,
    pub source_event: EventId,
    pub origin_event: EventId,
    pub destination_event: EventId,
    pub target_event: EventId,
    /// Boarding event of the one-trip witness that bounds the origin delay
    /// from above (arrives at the destination stop via stop 5).
    pub join_witness_origin: EventId,
    /// Boarding event of the two-trip witness that bounds it from below.
    pub split_witness_destination: EventId,
}

/// A compact instance with one candidate (trip A to trip B over a transfer
/// with slack -2) plus one join-type and one split-type witness. With a
/// delay limit of 5 the candidate's limits come out as: join limit 2,
/// feasibility limit 3, highest dominating split-witness delay 3, and an
/// empty origin delay interval; no shortcut between origin and destination
/// event is required.
///
/// Stops: 0 = source, 1 = origin, 2 = destination, 3 = target,
///        4/5 = witness first trip, 6 = witness second trip start,
///        7 = witness second trip end.
pub fn two_witness_network() -> TwoWitnessInstance {
    let net = NetworkBuilder::new(8)
        // candidate first trip: dep 0 at stop 0, arr 20 at stop 1
        .trip(&[0, 1], &[(0, 0), (20, 20)])
        // candidate second trip: dep 19 at stop 2, arr 50 at stop 3
        .trip(&[2, 3], &[(19, 19), (50, 50)])
        // join witness trip: dep 6 at stop 4, arr 17 at stop 5
        .trip(&[4, 5], &[(6, 6), (17, 17)])
        // split witness trip: dep 24 at stop 6, arr 40 at stop 7
        .trip(&[6, 7], &[(24, 24), (40, 40)])
        .edge(1, 2, 1) // origin -> destination (the candidate transfer)
        .edge(0, 4, 1) // source -> join witness start
        .edge(5, 2, 1) // join witness end -> destination stop
        .edge(1, 6, 1) // origin -> split witness start
        .edge(7, 3, 1) // split witness end -> target stop
        .build();

    let find = |stop: usize, pos: usize| {
        let trip = net
            .trips
            .iter()
            .position(|t| net.event(t.event(pos)).stop == StopId::new(stop))
            .unwrap();
        net.trips[trip].event(pos)
    };
    let source_event = find(0, 0);
    let origin_event = find(1, 1);
    let destination_event = find(2, 0);
    let target_event = find(3, 1);
    let join_witness_origin = find(4, 0);
    let split_witness_destination = find(6, 0);
    TwoWitnessInstance {
        net,
        source_event,
        origin_event,
        destination_event,
        target_event,
        join_witness_origin,
        split_witness_destination,
    }
}

/// Canonical time helper for tests: `hm(9, 30)` = 9:30 am in seconds.
pub fn hm(h: Time, min: Time) -> Time {
    h * 3600 + min * 60
}

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Parameters for tiny random instances used by the brute-force oracles.
/// Times are small integers so that delay limits of a few units cover
/// interesting fractions of the slack.
#[derive(Clone, Debug)]
pub struct TinyParams {
    pub stops: usize,
    pub routes: usize,
    pub trips_per_route: (usize, usize),
    pub route_len: (usize, usize),
    pub edges: usize,
    pub seed: u64,
}

impl Default for TinyParams {
    fn default() -> Self {
        TinyParams {
            stops: 8,
            routes: 4,
            trips_per_route: (1, 3),
            route_len: (2, 4),
            edges: 10,
            seed: 0,
        }
    }
}

pub fn random_tiny_network(p: &TinyParams) -> Network {
    let mut rng = ChaCha12Rng::seed_from_u64(p.seed ^ 0x7494e59);
    let mut b = NetworkBuilder::new(p.stops);
    for _ in 0..p.routes {
        let len = rng.gen_range(p.route_len.0..=p.route_len.1).min(p.stops);
        let mut stops: Vec<usize> = Vec::new();
        while stops.len() < len {
            let s = rng.gen_range(0..p.stops);
            if !stops.contains(&s) {
                stops.push(s);
            }
        }
        let trips = rng.gen_range(p.trips_per_route.0..=p.trips_per_route.1);
        let rides: Vec<Time> = (1..len).map(|_| rng.gen_range(2..10)).collect();
        let dwells: Vec<Time> = (0..len).map(|_| rng.gen_range(0..3)).collect();
        let mut start: Time = rng.gen_range(0..40);
        for _ in 0..trips {
            let mut times = Vec::with_capacity(len);
            let mut t = start;
            for k in 0..len {
                times.push((t, t + dwells[k]));
                if k + 1 < len {
                    t += dwells[k] + rides[k];
                }
            }
            b.add_trip(&stops, &times);
            start += rng.gen_range(4..20);
        }
    }
    let mut placed = std::collections::HashSet::new();
    let mut guard = 0;
    while placed.len() < p.edges && guard < p.edges * 20 {
        guard += 1;
        let u = rng.gen_range(0..p.stops);
        let v = rng.gen_range(0..p.stops);
        if u == v || !placed.insert((u, v)) {
            continue;
        }
        b.add_edge(u, v, rng.gen_range(1..6));
    }
    b.build()
}

/// A random scenario where every delay is at most `max_delay` and each
/// trip carries one constant-suffix update (so arrivals stay monotone
/// along each trip: no time travel).
pub fn random_within_limit_scenario(
    net: &Network,
    max_delay: Time,
    seed: u64,
) -> crate::delay::DelayScenario {
    let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0x5ce9a710);
    let mut updates = Vec::new();
    for (ti, trip) in net.trips.iter().enumerate() {
        if max_delay == 0 || rng.gen_bool(0.4) {
            continue;
        }
        let first = rng.gen_range(0..trip.len());
        let delay = rng.gen_range(0..=max_delay);
        updates.push(crate::delay::DelayUpdate::constant(
            net,
            crate::types::TripId::new(ti),
            first,
            delay,
            0,
        ));
    }
    crate::delay::replay_updates(net, &updates).unwrap()
}
