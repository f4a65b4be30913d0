//! Randomized cross-validation of the engines against the brute-force
//! oracles on tiny instances. These are the inner loops of the acceptance
//! suite, run here at a smaller scale to catch regressions early.

use transit_core::delay::DelayScenario;
use transit_core::journey::{
    enumerate_candidates, enumerate_journeys, oracle_origin_delay_interval, pareto_filter,
    pareto_labels, EnumerateLimits,
};
use transit_core::mr::mr_query;
use transit_core::tb::{TbEngine, TbStructures};
use transit_core::testutil::{random_tiny_network, random_within_limit_scenario, TinyParams};
use transit_core::transfers::DistanceOracle;
use transit_core::types::*;
use transit_core::ultra::{compute_shortcuts, BuildOptions};
use transit_core::update::{shortcut_feasible, UpdateEngine, UpdateMode};

fn tiny(seed: u64) -> transit_core::timetable::Network {
    random_tiny_network(&TinyParams {
        seed,
        ..TinyParams::default()
    })
}

/// Exact engine vs exhaustive enumeration plus Pareto filter.
#[test]
fn mr_matches_enumeration_oracle() {
    let mut checked = 0;
    for seed in 0..40 {
        let net = tiny(seed);
        if net.num_events() == 0 {
            continue;
        }
        let dist = DistanceOracle::new(&net);
        let scenario = random_within_limit_scenario(&net, if seed % 2 == 0 { 0 } else { 4 }, seed);
        for (s, t, dep) in [(0usize, 1usize, 0i64), (2, 5, 5), (1, 7, 10), (3, 0, 0)] {
            let source = VertexId::new(s.min(net.num_stops - 1));
            let target = VertexId::new(t.min(net.num_stops - 1));
            let res = mr_query(&net, &scenario, source, target, dep, 3);
            let all = enumerate_journeys(
                &net,
                &dist,
                source,
                target,
                dep,
                3,
                &scenario,
                EnumerateLimits { max_events: 64 },
            )
            .unwrap();
            let best = pareto_filter(&net, &dist, &all, &scenario, dep);
            let oracle_labels = pareto_labels(
                best.iter()
                    .map(|j| (j.arrival(&net, &dist, &scenario, dep), j.num_trips()))
                    .collect(),
            );
            let engine_labels: Vec<_> = res.labels.into_iter().filter(|&(_, n)| n <= 3).collect();
            assert_eq!(engine_labels, oracle_labels, "seed {seed} {s}->{t} dep {dep}");
            checked += 1;
        }
    }
    assert!(checked > 100);
}

/// Within-limit exactness: after a basic update, the trip engine over the
/// filtered shortcuts equals the exact engine for every query.
#[test]
fn tb_matches_mr_within_limit() {
    for seed in 0..25 {
        let net = tiny(seed);
        if net.num_events() == 0 {
            continue;
        }
        for dmax in [0i64, 2, 5] {
            let set = compute_shortcuts(&net, dmax, BuildOptions::default());
            let mut engine = UpdateEngine::new(&net, &set, UpdateMode::Basic);
            let mut snap = engine.initial_snapshot();
            for round in 0..3 {
                let scenario = random_within_limit_scenario(&net, dmax, seed * 31 + round);
                snap = Snapshotter::rebuild(&mut engine, &snap, &net, scenario);
                let structures = TbStructures::new(&net, &snap.routes, &snap.shortcuts);
                let mut tb = TbEngine::new(&structures, &snap.scenario);
                for s in 0..net.num_stops {
                    for t in 0..net.num_stops {
                        for dep in [0i64, 7] {
                            let got = tb.query(VertexId::new(s), VertexId::new(t), dep);
                            let want =
                                mr_query(&net, &snap.scenario, VertexId::new(s), VertexId::new(t), dep, 8);
                            assert_eq!(
                                got.labels, want.labels,
                                "seed {seed} dmax {dmax} round {round} {s}->{t} dep {dep}"
                            );
                        }
                    }
                }
            }
        }
    }
}

/// Helper: rebuild a snapshot for an externally constructed scenario by
/// expressing it as one batch of per-trip updates.
struct Snapshotter;

impl Snapshotter {
    fn rebuild<'a>(
        engine: &mut UpdateEngine<'a>,
        prev: &transit_core::update::Snapshot,
        net: &transit_core::timetable::Network,
        scenario: DelayScenario,
    ) -> transit_core::update::Snapshot {
        let mut batch = Vec::new();
        for (ti, trip) in net.trips.iter().enumerate() {
            let delays: Vec<(Time, Time)> = (0..trip.len())
                .map(|k| {
                    let e = trip.event(k);
                    (scenario.arrival_delay(e), scenario.departure_delay(e))
                })
                .collect();
            batch.push(transit_core::delay::DelayUpdate {
                trip: TripId::new(ti),
                first_index: 0,
                delays,
                reveal_time: 0,
            });
        }
        engine.apply_batch(prev, &batch)
    }
}

/// Every candidate's exact origin delay interval is contained in the kept
/// shortcut's interval, and the stored lower bound undercuts the exact
/// minimum.
#[test]
fn kept_intervals_cover_oracle_intervals() {
    let mut non_empty = 0;
    for seed in 100..130 {
        let net = random_tiny_network(&TinyParams {
            stops: 6,
            routes: 3,
            edges: 8,
            seed,
            ..TinyParams::default()
        });
        if net.num_events() == 0 {
            continue;
        }
        let dist = DistanceOracle::new(&net);
        let dmax = 4;
        let set = compute_shortcuts(&net, dmax, BuildOptions::default());
        for cand in enumerate_candidates(&net, &dist, dmax) {
            let interval = oracle_origin_delay_interval(&net, &dist, &cand, dmax, true);
            let o = cand.origin_event(&net);
            let d = cand.destination_event(&net);
            if interval.is_empty() {
                continue;
            }
            non_empty += 1;
            let kept = set.get(o, d).unwrap_or_else(|| {
                panic!("seed {seed}: candidate {cand:?} with interval {interval:?} has no shortcut")
            });
            assert!(
                kept.min_origin_delay <= interval.lo && interval.hi <= kept.max_origin_delay,
                "seed {seed}: oracle {interval:?} not within [{}, {}] for {cand:?}",
                kept.min_origin_delay,
                kept.max_origin_delay
            );
        }
    }
    assert!(non_empty > 20, "only {non_empty} nonempty intervals checked");
}

/// Advanced updates only ever add journeys over basic ones.
#[test]
fn advanced_update_adds_replacements_feasibly() {
    let dist_check = |net: &transit_core::timetable::Network,
                      snap: &transit_core::update::Snapshot| {
        // every kept shortcut must be feasible in the snapshot scenario
        for e in 0..net.num_events() {
            for &(d, tt) in snap.shortcuts.outgoing(EventId::new(e)) {
                assert!(shortcut_feasible(net, &snap.scenario, EventId::new(e), d, tt));
            }
        }
    };
    for seed in 0..12 {
        let net = tiny(seed);
        if net.num_events() == 0 {
            continue;
        }
        let set = compute_shortcuts(&net, 2, BuildOptions::default());
        let mut engine = UpdateEngine::new(&net, &set, UpdateMode::Advanced);
        let snap0 = engine.initial_snapshot();
        let scenario = random_within_limit_scenario(&net, 9, seed + 5);
        let snap1 = Snapshotter::rebuild(&mut engine, &snap0, &net, scenario);
        dist_check(&net, &snap1);
    }
}
