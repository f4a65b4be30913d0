//! Reproducible synthetic networks with controllable headways, used by the
//! benchmark harness and by the randomized test suites.

use crate::timetable::{Network, NetworkBuilder};
use crate::types::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Headway distribution: weighted (lo, hi) intervals in seconds; a route
/// draws one headway uniformly from its chosen interval.
#[derive(Clone, Debug)]
pub struct SynthParams {
    pub stops: usize,
    pub routes: usize,
    /// Weighted headway intervals (weight, lo seconds, hi seconds).
    pub headways: Vec<(u32, Time, Time)>,
    /// Stops per route are drawn uniformly from this range.
    pub route_len: (usize, usize),
    /// Average number of outgoing transfer edges per stop.
    pub avg_degree: f64,
    /// Transfer times are drawn uniformly from this range.
    pub transfer_time: (Time, Time),
    /// Ride time between consecutive stops.
    pub ride_time: (Time, Time),
    /// Dwell time at a stop (arrival to departure).
    pub dwell_time: (Time, Time),
    /// Trips start uniformly within this window and repeat every headway
    /// until the window ends.
    pub service_start: Time,
    pub service_end: Time,
    /// Extra non-stop vertices spliced into transfer edges.
    pub extra_vertices: usize,
    pub seed: u64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            stops: 40,
            routes: 15,
            headways: vec![(2, 300, 600), (3, 600, 1800), (2, 1800, 3600)],
            route_len: (3, 6),
            avg_degree: 2.0,
            transfer_time: (30, 400),
            ride_time: (120, 600),
            dwell_time: (0, 60),
            service_start: 6 * 3600,
            service_end: 22 * 3600,
            extra_vertices: 0,
            seed: 0,
        }
    }
}

impl SynthParams {
    /// A dense low-headway profile; transfers have little slack, so delays
    /// break many of them.
    pub fn low_headway(stops: usize, routes: usize, seed: u64) -> Self {
        SynthParams {
            stops,
            routes,
            headways: vec![(7, 300, 900), (3, 900, 1500)],
            seed,
            ..SynthParams::default()
        }
    }

    /// A sparse high-headway profile.
    pub fn high_headway(stops: usize, routes: usize, seed: u64) -> Self {
        SynthParams {
            stops,
            routes,
            headways: vec![(1, 2400, 3600), (1, 3600, 7200)],
            seed,
            ..SynthParams::default()
        }
    }
}

fn draw_weighted(rng: &mut impl Rng, items: &[(u32, Time, Time)]) -> (Time, Time) {
    let total: u32 = items.iter().map(|i| i.0).sum();
    let mut x = rng.gen_range(0..total);
    for &(w, lo, hi) in items {
        if x < w {
            return (lo, hi);
        }
        x -= w;
    }
    unreachable!()
}

/// Generates a network. Routes get a random distinct-stop sequence, a
/// headway drawn from the distribution and trips repeating across the
/// service window; the transfer graph is random with the requested
/// density. Deterministic for a fixed seed.
pub fn synthetic_network(params: &SynthParams) -> Network {
    let mut rng = ChaCha12Rng::seed_from_u64(params.seed ^ 0x53594e54);
    let mut builder = NetworkBuilder::new(params.stops).extra_vertices(params.extra_vertices);
    assert!(params.routes == 0 || params.stops >= 2);

    for _ in 0..params.routes {
        let len = rng.gen_range(params.route_len.0..=params.route_len.1).min(params.stops);
        // distinct stops along the route
        let mut stops: Vec<usize> = Vec::with_capacity(len);
        while stops.len() < len {
            let s = rng.gen_range(0..params.stops);
            if !stops.contains(&s) {
                stops.push(s);
            }
        }
        let (hlo, hhi) = draw_weighted(&mut rng, &params.headways);
        let headway = rng.gen_range(hlo..=hhi);
        let rides: Vec<Time> = (1..len)
            .map(|_| rng.gen_range(params.ride_time.0..=params.ride_time.1))
            .collect();
        let dwells: Vec<Time> = (0..len)
            .map(|_| rng.gen_range(params.dwell_time.0..=params.dwell_time.1))
            .collect();
        let mut start = params.service_start + rng.gen_range(0..headway.max(1));
        while start < params.service_end {
            let mut times = Vec::with_capacity(len);
            let mut t = start;
            for k in 0..len {
                let arr = t;
                let dep = arr + dwells[k];
                times.push((arr, dep));
                if k + 1 < len {
                    t = dep + rides[k];
                }
            }
            builder.add_trip(&stops, &times);
            start += headway;
        }
    }

    let num_edges = (params.stops as f64 * params.avg_degree).round() as usize;
    let mut edges_seen = std::collections::HashSet::new();
    let mut placed = 0;
    let mut guard = 0;
    while placed < num_edges && guard < num_edges * 20 {
        guard += 1;
        let u = rng.gen_range(0..params.stops);
        let v = rng.gen_range(0..params.stops);
        if u == v || !edges_seen.insert((u, v)) {
            continue;
        }
        let w = rng.gen_range(params.transfer_time.0..=params.transfer_time.1);
        builder.add_edge(u, v, w);
        placed += 1;
    }

    // street layer: a connected ring of non-stop vertices with chords,
    // with every stop attached to it in both directions
    if params.extra_vertices > 0 {
        let m = params.extra_vertices;
        for k in 0..m {
            let a = params.stops + k;
            let b = params.stops + (k + 1) % m;
            let w = rng.gen_range(20..90);
            builder.add_edge(a, b, w);
            builder.add_edge(b, a, w);
        }
        for _ in 0..m / 4 {
            let a = params.stops + rng.gen_range(0..m);
            let b = params.stops + rng.gen_range(0..m);
            if a != b {
                let w = rng.gen_range(40..180);
                builder.add_edge(a, b, w);
                builder.add_edge(b, a, w);
            }
        }
        for stop in 0..params.stops {
            let anchors = 1 + usize::from(rng.gen_bool(0.3));
            for _ in 0..anchors {
                let v = params.stops + rng.gen_range(0..m);
                let w = rng.gen_range(30..150);
                builder.add_edge(stop, v, w);
                builder.add_edge(v, stop, w);
            }
        }
    }

    builder.build()
}

/// Mean headway per generated route, for distribution checks.
pub fn route_headways(net: &Network) -> Vec<f64> {
    net.routes
        .iter()
        .filter(|r| r.num_trips() >= 2)
        .map(|r| {
            let deps: Vec<Time> = r
                .trips()
                .map(|t| net.event(net.trip(t).event(0)).scheduled_departure)
                .collect();
            let diffs: Vec<Time> = deps.windows(2).map(|w| w[1] - w[0]).collect();
            diffs.iter().sum::<Time>() as f64 / diffs.len() as f64
        })
        .collect()
}
