//! Per-operation tests from the contract examples: loading and buffer
//! handling, the scenario order laws, the time-reversal check for the
//! backward search, and update-phase semantics.

use transit_core::delay::{
    compare_scenarios, replay_updates, DelayUpdate, ScenarioOrder,
};
use transit_core::mr::{backward::backward_mr, mr_query, ScanRoutes};
use transit_core::testutil::{hm, random_tiny_network, random_within_limit_scenario, TinyParams};
use transit_core::timetable::{load_network, save_network, NetworkBuilder, NetworkIoError};
use transit_core::types::*;
use transit_core::ultra::{compute_shortcuts, BuildOptions};
use transit_core::update::{UpdateEngine, UpdateMode};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

fn write_dir(files: &[(&str, &str)]) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    for (name, content) in files {
        std::fs::write(dir.path().join(name), content).unwrap();
    }
    dir
}

#[test]
fn load_applies_departure_buffer() {
    let dir = write_dir(&[
        ("stops", "stop_id,vertex_id,name\n0,0,a\n1,1,b\n"),
        (
            "trips",
            "trip_id,seq,stop_id,arr_seconds,dep_seconds\n7,0,0,32400,32520\n7,1,1,33000,33060\n",
        ),
        ("transfers", "from_vertex,to_vertex,travel_seconds\n0,1,60\n"),
    ]);
    // buffer 0: unchanged
    let net = load_network(dir.path(), 0).unwrap();
    assert_eq!(net.event(EventId(0)).scheduled_departure, hm(9, 2));
    // buffer 60: dep 9:02 becomes 9:01
    let net = load_network(dir.path(), 60).unwrap();
    assert_eq!(net.event(EventId(0)).scheduled_departure, hm(9, 1));
    // buffer larger than the dwell floors at the arrival
    let net = load_network(dir.path(), 100000).unwrap();
    assert_eq!(net.event(EventId(0)).scheduled_departure, hm(9, 0));
}

#[test]
fn load_six_event_trip_indices() {
    let mut trips = String::from("trip_id,seq,stop_id,arr_seconds,dep_seconds\n");
    let arrivals = [hm(9, 0), hm(9, 5), hm(9, 8), hm(9, 15), hm(9, 20), hm(9, 24)];
    let deps = [hm(9, 2), hm(9, 6), hm(9, 10), hm(9, 16), hm(9, 21), hm(9, 25)];
    for i in 0..6 {
        trips.push_str(&format!("3,{i},{i},{},{}\n", arrivals[i], deps[i]));
    }
    let mut stops = String::from("stop_id,vertex_id,name\n");
    for i in 0..6 {
        stops.push_str(&format!("{i},{i},s{i}\n"));
    }
    let dir = write_dir(&[
        ("stops", &stops),
        ("trips", &trips),
        ("transfers", "from_vertex,to_vertex,travel_seconds\n"),
    ]);
    let net = load_network(dir.path(), 0).unwrap();
    assert_eq!(net.num_events(), 6);
    for i in 0..6 {
        let ev = net.event(EventId::new(i));
        assert_eq!(ev.index_in_trip as usize, i);
        assert_eq!(ev.scheduled_arrival, arrivals[i]);
    }
}

#[test]
fn load_error_classes() {
    // malformed record
    let dir = write_dir(&[
        ("stops", "stop_id,vertex_id,name\n0,0,a\n"),
        ("trips", "trip_id,seq,stop_id,arr_seconds,dep_seconds\n0,zero,0,1,2\n"),
        ("transfers", "from_vertex,to_vertex,travel_seconds\n"),
    ]);
    assert!(matches!(
        load_network(dir.path(), 0),
        Err(NetworkIoError::Parse { .. })
    ));
    // dangling stop id
    let dir = write_dir(&[
        ("stops", "stop_id,vertex_id,name\n0,0,a\n"),
        (
            "trips",
            "trip_id,seq,stop_id,arr_seconds,dep_seconds\n0,0,0,0,1\n0,1,5,10,11\n",
        ),
        ("transfers", "from_vertex,to_vertex,travel_seconds\n"),
    ]);
    assert!(matches!(
        load_network(dir.path(), 0),
        Err(NetworkIoError::Integrity(_))
    ));
    // times decreasing along the trip
    let dir = write_dir(&[
        ("stops", "stop_id,vertex_id,name\n0,0,a\n1,1,b\n"),
        (
            "trips",
            "trip_id,seq,stop_id,arr_seconds,dep_seconds\n0,0,0,100,200\n0,1,1,150,160\n",
        ),
        ("transfers", "from_vertex,to_vertex,travel_seconds\n"),
    ]);
    assert!(matches!(
        load_network(dir.path(), 0),
        Err(NetworkIoError::Ordering(_))
    ));
}

#[test]
fn save_load_roundtrip_is_identity() {
    for seed in 0..12u64 {
        let net = random_tiny_network(&TinyParams {
            seed: seed + 7,
            stops: 7,
            routes: 4,
            edges: 10,
            ..TinyParams::default()
        });
        let dir = tempfile::tempdir().unwrap();
        save_network(&net, dir.path()).unwrap();
        let back = load_network(dir.path(), 0).unwrap();
        assert_eq!(net, back, "seed {seed}");
        assert_eq!(net.content_hash(), back.content_hash());
    }
}

#[test]
fn scenario_order_is_a_partial_order() {
    let net = random_tiny_network(&TinyParams::default());
    let mut checked = 0;
    for seed in 0..40u64 {
        let a = random_within_limit_scenario(&net, 4, seed * 3);
        let b = random_within_limit_scenario(&net, 4, seed * 3 + 1);
        let c = random_within_limit_scenario(&net, 4, seed * 3 + 2);
        // reflexivity
        assert_eq!(compare_scenarios(&a, &a), ScenarioOrder::Equal);
        // antisymmetry up to equality of the delay maps
        if compare_scenarios(&a, &b) == ScenarioOrder::ABetterEq
            && compare_scenarios(&b, &a) == ScenarioOrder::ABetterEq
        {
            assert_eq!(a, b);
        }
        // transitivity
        let ab = compare_scenarios(&a, &b);
        let bc = compare_scenarios(&b, &c);
        if matches!(ab, ScenarioOrder::ABetterEq | ScenarioOrder::Equal)
            && matches!(bc, ScenarioOrder::ABetterEq | ScenarioOrder::Equal)
        {
            assert!(matches!(
                compare_scenarios(&a, &c),
                ScenarioOrder::ABetterEq | ScenarioOrder::Equal
            ));
            checked += 1;
        }
    }
    let _ = checked;
}

/// Backward search against the forward search on the time-reversed
/// network: reverse every trip (arr/dep swapped and negated), reverse
/// every edge, and latest-departure labels become earliest-arrival ones.
#[test]
fn backward_search_matches_time_reversed_forward() {
    for seed in 0..10u64 {
        let net = random_tiny_network(&TinyParams {
            seed: seed + 1,
            ..TinyParams::default()
        });
        if net.num_events() == 0 {
            continue;
        }
        let scenario = transit_core::delay::DelayScenario::punctual(&net);

        // reversed network: trip events in reverse order with times
        // mirrored around 0
        let mut b = NetworkBuilder::new(net.num_stops);
        for trip in &net.trips {
            let stops: Vec<usize> = (0..trip.len())
                .rev()
                .map(|i| net.stop_of(trip.event(i)).idx())
                .collect();
            let times: Vec<(Time, Time)> = (0..trip.len())
                .rev()
                .map(|i| {
                    let ev = net.event(trip.event(i));
                    (-ev.scheduled_departure, -ev.scheduled_arrival)
                })
                .collect();
            b.add_trip(&stops, &times);
        }
        for (u, v, w) in net.transfers.edge_list() {
            b.add_edge(v.idx(), u.idx(), w);
        }
        let rev = b.build();
        let rev_scenario = transit_core::delay::DelayScenario::punctual(&rev);

        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let target = StopId::new(rng.gen_range(0..net.num_stops));
        let bound = rng.gen_range(20..60);

        let routes = ScanRoutes::repartitioned(&net, &scenario);
        let labels = backward_mr(
            &net,
            &scenario,
            &routes,
            &[(target, bound)],
            NEG_INFINITY,
            2,
            false,
        );
        let rev_routes = ScanRoutes::repartitioned(&rev, &rev_scenario);
        let mut fwd = transit_core::mr::MrEngine::new(&rev, &rev_scenario, &rev_routes)
            .with_max_rounds(2);
        for v in 0..net.num_stops {
            let res = fwd.query(target.vertex(), VertexId::new(v), -bound);
            for n in 0..=2 {
                let best_fwd = res
                    .labels
                    .iter()
                    .filter(|&&(_, k)| k <= n)
                    .map(|&(t, _)| t)
                    .min()
                    .unwrap_or(INFINITY);
                let lat = labels.latest(VertexId::new(v), n);
                let expect = if is_finite(best_fwd) { -best_fwd } else { NEG_INFINITY };
                assert_eq!(lat, expect, "seed {seed} v={v} n={n}");
            }
        }
    }
}

#[test]
fn applying_the_same_batch_twice_is_idempotent() {
    let net = random_tiny_network(&TinyParams {
        stops: 8,
        routes: 4,
        ..TinyParams::default()
    });
    let set = compute_shortcuts(&net, 3, BuildOptions::default());
    let batch = vec![DelayUpdate::constant(&net, TripId(0), 0, 7, 0)];
    let mut engine = UpdateEngine::new(&net, &set, UpdateMode::Advanced);
    let s0 = engine.initial_snapshot();
    let s1 = engine.apply_batch(&s0, &batch);
    let s2 = engine.apply_batch(&s1, &batch);
    assert_eq!(s1.scenario, s2.scenario);
    for e in 0..net.num_events() {
        assert_eq!(
            s1.shortcuts.outgoing(EventId::new(e)),
            s2.shortcuts.outgoing(EventId::new(e))
        );
    }
}

/// Round-0 labels of the exact engine are a correct one-to-many
/// relaxation from the source.
#[test]
fn round_zero_equals_standalone_shortest_paths() {
    let net = random_tiny_network(&TinyParams::default());
    let scenario = transit_core::delay::DelayScenario::punctual(&net);
    for s in 0..net.num_stops {
        let res = mr_query(&net, &scenario, VertexId::new(s), VertexId::new(0), 100, 0);
        let dist = transit_core::transfers::one_to_many(
            &net.transfers,
            VertexId::new(s),
            transit_core::transfers::Direction::Forward,
        );
        let expect = sat_add(100, dist[0]);
        match res.labels.first() {
            Some(&(t, 0)) => assert_eq!(t, expect),
            None => assert!(!is_finite(dist[0])),
            other => panic!("unexpected {other:?}"),
        }
    }
}

/// Replay oracle for sequential updates: the stream applied through the
/// scenario equals a per-event recomputation from the last covering
/// update.
#[test]
fn update_replay_matches_last_writer() {
    let net = random_tiny_network(&TinyParams::default());
    let mut rng = ChaCha12Rng::seed_from_u64(99);
    let updates: Vec<DelayUpdate> = (0..30)
        .map(|k| {
            let trip = TripId::new(rng.gen_range(0..net.trips.len()));
            let len = net.trip(trip).len();
            let first = rng.gen_range(0..len);
            DelayUpdate {
                trip,
                first_index: first,
                delays: (first..len)
                    .map(|_| (rng.gen_range(0..10), rng.gen_range(0..10)))
                    .collect(),
                reveal_time: k,
            }
        })
        .collect();
    let scenario = replay_updates(&net, &updates).unwrap();
    for e in 0..net.num_events() {
        let ev = EventId::new(e);
        let trip = net.trip_of(ev);
        let idx = net.index_in_trip(ev);
        // last update covering this event wins
        let expect = updates
            .iter()
            .rev()
            .find(|u| u.trip == trip && u.first_index <= idx)
            .map(|u| u.delays[idx - u.first_index])
            .unwrap_or((0, 0));
        assert_eq!(
            (scenario.arrival_delay(ev), scenario.departure_delay(ev)),
            expect
        );
    }
}
