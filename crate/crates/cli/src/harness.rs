//! The simulation protocol: replay a delay stream through update phases
//! on a simulated clock, answer queries against the exact engine and the
//! shortcut engine, and account for the differences.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use std::time::Instant;
use transit_core::delay::{DelayScenario, DelayStream};
use transit_core::journey::{Journey, Label};
use transit_core::mr::{MrEngine, ScanRoutes};
use transit_core::tb::{TbEngine, TbStructures};
use transit_core::timetable::Network;
use transit_core::transfers::DistanceOracle;
use transit_core::types::*;
use transit_core::ultra::ShortcutSet;
use transit_core::update::{Snapshot, UpdateEngine, UpdateMode};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuerySpec {
    pub source: VertexId,
    pub target: VertexId,
    pub departure: Time,
    pub execution: Time,
}

impl QuerySpec {
    pub fn new(source: VertexId, target: VertexId, departure: Time, execution: Time) -> Self {
        assert!(execution <= departure, "execution time after departure");
        QuerySpec {
            source,
            target,
            departure,
            execution,
        }
    }
}

/// How the simulated clock advances while an update phase builds.
#[derive(Clone, Copy, Debug)]
pub enum PhaseCost {
    /// Wall-clock build time scaled by a factor.
    Measured { scale: f64 },
    /// A fixed duration per phase; keeps whole reports reproducible.
    Fixed { seconds: f64 },
}

impl PhaseCost {
    pub fn parse(s: &str) -> anyhow::Result<Self> {
        if let Some(rest) = s.strip_prefix("fixed:") {
            return Ok(PhaseCost::Fixed {
                seconds: rest.parse()?,
            });
        }
        if s == "measured" {
            return Ok(PhaseCost::Measured { scale: 1.0 });
        }
        if let Some(rest) = s.strip_prefix("measured:") {
            return Ok(PhaseCost::Measured {
                scale: rest.parse()?,
            });
        }
        anyhow::bail!("phase cost must be fixed:<sec> or measured[:<scale>], got {s}")
    }
}

#[derive(Clone, Debug)]
pub struct SimConfig {
    pub window: (Time, Time),
    pub mode: UpdateMode,
    pub phase_cost: PhaseCost,
    pub max_rounds: usize,
}

/// One built phase on the simulated clock.
struct Phase {
    start: f64,
    finish: f64,
    snapshot: Arc<Snapshot>,
}

/// Aggregated outcome of one simulation run.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SimulationReport {
    pub delay_limit: Time,
    pub mode: String,
    pub queries: usize,
    pub affected_queries: usize,
    /// Queries for which the shortcut engine missed at least one
    /// Pareto-optimal journey, over data finished before execution.
    pub query_errors: usize,
    pub journey_total: usize,
    pub journey_errors: usize,
    /// Same, pretending every phase finished the instant it started.
    pub hypo_query_errors: usize,
    pub hypo_journey_errors: usize,
    pub infeasible_journeys: usize,
    pub infeasible_queries: usize,
    pub median_detour: f64,
    pub shortcut_full: usize,
    pub shortcut_infeasible_initial: usize,
    pub shortcut_filtered_initial: usize,
    pub phases: usize,
    pub mean_update_seconds: f64,
    pub mean_search_seconds: f64,
    pub mean_merge_seconds: f64,
    /// Hash over the timing-independent outcome columns.
    pub determinism_hash: u64,
}

impl SimulationReport {
    pub fn query_error_rate(&self) -> f64 {
        self.query_errors as f64 / self.queries.max(1) as f64
    }

    pub fn journey_error_rate(&self) -> f64 {
        self.journey_errors as f64 / self.journey_total.max(1) as f64
    }

    pub fn hypo_query_error_rate(&self) -> f64 {
        self.hypo_query_errors as f64 / self.queries.max(1) as f64
    }

    pub fn hypo_journey_error_rate(&self) -> f64 {
        self.hypo_journey_errors as f64 / self.journey_total.max(1) as f64
    }
}

/// Uniform random queries with departures in the window and execution at
/// the departure time.
pub fn random_queries(net: &Network, window: (Time, Time), count: usize, seed: u64) -> Vec<QuerySpec> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0x9ae5);
    (0..count)
        .map(|_| {
            let s = rng.gen_range(0..net.num_vertices());
            let t = rng.gen_range(0..net.num_vertices());
            let dep = rng.gen_range(window.0..window.1);
            QuerySpec::new(VertexId::new(s), VertexId::new(t), dep, dep)
        })
        .collect()
}

/// Whether delays change the exact answer of a query: some journey of the
/// undelayed Pareto set is infeasible under the delayed scenario or beaten
/// by a journey with no more trips.
pub fn query_affected(
    net: &Network,
    dist: &DistanceOracle,
    base: &[Journey],
    delayed: &DelayScenario,
    delayed_labels: &[Label],
    departure: Time,
) -> bool {
    base.iter().any(|j| {
        if !j.feasible(net, dist, delayed, departure) {
            return true;
        }
        let arr = j.arrival(net, dist, delayed, departure);
        delayed_labels
            .iter()
            .any(|&(a, n)| n <= j.num_trips() && a < arr)
    })
}

/// Generates random queries until `count` delay-affected ones are found
/// (or the attempt budget is exhausted); returns the affected ones.
/// Candidates are processed in chunks sorted by execution time so the
/// delayed scenario and its route grouping fold incrementally.
pub fn mine_affected_queries(
    net: &Network,
    stream: &DelayStream,
    window: (Time, Time),
    count: usize,
    seed: u64,
) -> (Vec<QuerySpec>, usize) {
    let dist = DistanceOracle::new(net);
    let base_scenario = DelayScenario::punctual(net);
    let base_routes = ScanRoutes::scheduled(net);
    let mut base_engine = MrEngine::new(net, &base_scenario, &base_routes);

    let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0xaffec7ed);
    let mut found = Vec::new();
    let mut attempts = 0usize;
    let budget = count.saturating_mul(400).max(1000);
    let chunk = count.max(64);
    while found.len() < count && attempts < budget {
        let mut candidates: Vec<QuerySpec> = (0..chunk)
            .map(|_| {
                let s = rng.gen_range(0..net.num_vertices());
                let t = rng.gen_range(0..net.num_vertices());
                let dep = rng.gen_range(window.0..window.1);
                QuerySpec::new(VertexId::new(s), VertexId::new(t), dep, dep)
            })
            .collect();
        candidates.sort_by_key(|q| q.execution);
        let mut scenario = DelayScenario::punctual(net);
        let mut routes = ScanRoutes::repartitioned(net, &scenario);
        let mut ptr = 0usize;
        for q in candidates {
            if found.len() >= count || attempts >= budget {
                break;
            }
            attempts += 1;
            let base = base_engine.query(q.source, q.target, q.departure);
            if base.labels.is_empty() {
                continue;
            }
            let mut changed = false;
            while ptr < stream.updates.len() && stream.updates[ptr].reveal_time <= q.execution {
                scenario =
                    transit_core::delay::apply_update(net, &scenario, &stream.updates[ptr]).unwrap();
                ptr += 1;
                changed = true;
            }
            if changed {
                routes = ScanRoutes::repartitioned(net, &scenario);
            }
            let mut engine = MrEngine::new(net, &scenario, &routes);
            let delayed = engine.query(q.source, q.target, q.departure);
            if query_affected(net, &dist, &base.journeys, &scenario, &delayed.labels, q.departure) {
                found.push(q);
            }
        }
    }
    (found, attempts)
}

/// Replays the stream through update phases and evaluates every query
/// against the exact engine on the scenario current at its execution time
/// and against the shortcut engine on the last finished (and, separately,
/// last started) snapshot.
pub fn simulate(
    net: &Network,
    shortcuts: &ShortcutSet,
    stream: &DelayStream,
    queries: &[QuerySpec],
    cfg: &SimConfig,
) -> SimulationReport {
    let mut engine = UpdateEngine::new(net, shortcuts, cfg.mode);
    let dist = engine.distances();

    // updates known before the window fold into the initial snapshot
    let pre: Vec<_> = stream
        .updates
        .iter()
        .filter(|u| u.reveal_time < cfg.window.0)
        .cloned()
        .collect();
    let pending: Vec<_> = stream
        .updates
        .iter()
        .filter(|u| u.reveal_time >= cfg.window.0)
        .cloned()
        .collect();

    let base = engine.initial_snapshot();
    let initial = if pre.is_empty() {
        base
    } else {
        engine.apply_batch(&base, &pre)
    };
    let mut phases: Vec<Phase> = vec![Phase {
        start: cfg.window.0 as f64 - 1.0,
        finish: cfg.window.0 as f64,
        snapshot: Arc::new(initial),
    }];

    if cfg.mode != UpdateMode::None {
        let mut clock = cfg.window.0 as f64;
        let mut i = 0;
        while i < pending.len() {
            let start = clock.max(pending[i].reveal_time as f64);
            let mut j = i;
            while j < pending.len() && (pending[j].reveal_time as f64) <= start {
                j += 1;
            }
            let wall = Instant::now();
            let snapshot = engine.apply_batch(&phases.last().unwrap().snapshot, &pending[i..j]);
            let duration = match cfg.phase_cost {
                PhaseCost::Measured { scale } => wall.elapsed().as_secs_f64() * scale,
                PhaseCost::Fixed { seconds } => seconds,
            };
            phases.push(Phase {
                start,
                finish: start + duration,
                snapshot: Arc::new(snapshot),
            });
            clock = start + duration;
            i = j;
        }
    }

    let snapshot_before = |time: f64, by_finish: bool| -> &Phase {
        let mut chosen = &phases[0];
        for p in &phases {
            let at = if by_finish { p.finish } else { p.start };
            if at <= time {
                chosen = p;
            } else {
                break;
            }
        }
        chosen
    };

    // evaluate queries in execution order, folding the exact scenario
    let mut order: Vec<usize> = (0..queries.len()).collect();
    order.sort_by_key(|&i| (queries[i].execution, i));

    let mut report = SimulationReport {
        delay_limit: shortcuts.max_delay,
        mode: format!("{:?}", cfg.mode).to_lowercase(),
        queries: queries.len(),
        shortcut_full: shortcuts.len(),
        shortcut_infeasible_initial: phases[0].snapshot.metrics.infeasible,
        shortcut_filtered_initial: phases[0].snapshot.metrics.query_shortcuts,
        phases: phases.len() - 1,
        ..Default::default()
    };
    for p in &phases[1..] {
        report.mean_update_seconds += p.snapshot.metrics.update_seconds;
        report.mean_search_seconds += p.snapshot.metrics.search_seconds;
        report.mean_merge_seconds += p.snapshot.metrics.merge_seconds;
    }
    let n_phases = (phases.len() - 1).max(1) as f64;
    report.mean_update_seconds /= n_phases;
    report.mean_search_seconds /= n_phases;
    report.mean_merge_seconds /= n_phases;

    let mut detours: Vec<f64> = Vec::new();
    let mut hash = Fnv::new();

    let mut update_ptr = 0usize;
    let mut scenario = phases[0].snapshot.scenario.clone();
    let mut routes = ScanRoutes::repartitioned(net, &scenario);
    for &qi in &order {
        let q = queries[qi];
        // advance the exact scenario to the execution time
        let mut changed = false;
        while update_ptr < pending.len() && pending[update_ptr].reveal_time <= q.execution {
            scenario =
                transit_core::delay::apply_update(net, &scenario, &pending[update_ptr]).unwrap();
            update_ptr += 1;
            changed = true;
        }
        if changed {
            routes = ScanRoutes::repartitioned(net, &scenario);
        }
        let mut exact = MrEngine::new(net, &scenario, &routes).with_max_rounds(cfg.max_rounds);
        let reference = exact.query(q.source, q.target, q.departure);

        let real = snapshot_before(q.execution as f64, true).snapshot.clone();
        let hypo = snapshot_before(q.execution as f64, false).snapshot.clone();

        let (real_missed, infeasible, detour_samples) = evaluate_tb(
            net, &dist, &real, &scenario, &reference.labels, q, cfg.max_rounds, true,
        );
        let (hypo_missed, _, _) = evaluate_tb(
            net, &dist, &hypo, &scenario, &reference.labels, q, cfg.max_rounds, false,
        );

        report.journey_total += reference.labels.len();
        report.journey_errors += real_missed;
        report.hypo_journey_errors += hypo_missed;
        if real_missed > 0 {
            report.query_errors += 1;
        }
        if hypo_missed > 0 {
            report.hypo_query_errors += 1;
        }
        if infeasible > 0 {
            report.infeasible_queries += 1;
        }
        report.infeasible_journeys += infeasible;
        detours.extend(detour_samples);

        hash.word(qi as u64);
        hash.word(real_missed as u64);
        hash.word(hypo_missed as u64);
        hash.word(infeasible as u64);
        for &(a, n) in &reference.labels {
            hash.word(a as u64);
            hash.word(n as u64);
        }
    }

    detours.sort_by(|a, b| a.partial_cmp(b).unwrap());
    report.median_detour = if detours.is_empty() {
        0.0
    } else {
        detours[detours.len() / 2]
    };
    report.determinism_hash = hash.0;
    report
}

/// Runs the shortcut engine on a snapshot and scores its journeys against
/// the exact labels under the current scenario. Returns (missed labels,
/// infeasible journeys, detour samples).
#[allow(clippy::too_many_arguments)]
fn evaluate_tb(
    net: &Network,
    dist: &Arc<DistanceOracle>,
    snapshot: &Snapshot,
    now: &DelayScenario,
    exact_labels: &[Label],
    q: QuerySpec,
    max_rounds: usize,
    collect_detours: bool,
) -> (usize, usize, Vec<f64>) {
    let structures = TbStructures::new(net, &snapshot.routes, &snapshot.shortcuts);
    let mut tb = TbEngine::with_distances(&structures, &snapshot.scenario, Arc::clone(dist));
    tb.max_rounds = max_rounds;
    let res = tb.query(q.source, q.target, q.departure);

    // re-evaluate the returned journeys in the current scenario
    let mut achieved: Vec<Label> = Vec::new();
    let mut infeasible = 0usize;
    let mut detours = Vec::new();
    for j in &res.journeys {
        if !j.feasible(net, dist, now, q.departure) {
            infeasible += 1;
            continue;
        }
        let arr = j.arrival(net, dist, now, q.departure);
        achieved.push((arr, j.num_trips()));
        if collect_detours {
            // optimal counterpart: best exact arrival with as many trips
            let best = exact_labels
                .iter()
                .filter(|&&(_, n)| n <= j.num_trips())
                .map(|&(a, _)| a)
                .min();
            if let Some(best) = best {
                if arr > best && best > q.departure {
                    detours.push((arr - best) as f64 / (best - q.departure) as f64);
                }
            }
        }
    }
    let missed = exact_labels
        .iter()
        .filter(|&&(a, n)| !achieved.iter().any(|&(a2, n2)| n2 <= n && a2 <= a))
        .count();
    (missed, infeasible, detours)
}

/// Timing comparison of the two engines on identical queries against the
/// final state of the stream.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BenchReport {
    pub queries: usize,
    pub mean_mr_ms: f64,
    pub median_mr_ms: f64,
    pub mean_tb_ms: f64,
    pub median_tb_ms: f64,
    pub speedup: f64,
    pub query_shortcuts: usize,
}

pub fn bench_queries(
    net: &Network,
    shortcuts: &ShortcutSet,
    stream: &DelayStream,
    window: (Time, Time),
    count: usize,
    seed: u64,
    mode: UpdateMode,
) -> BenchReport {
    // updates finish before any timing starts
    let mut engine = UpdateEngine::new(net, shortcuts, mode);
    let base = engine.initial_snapshot();
    let updates: Vec<_> = stream
        .updates
        .iter()
        .filter(|u| u.reveal_time <= window.1)
        .cloned()
        .collect();
    let snapshot = if updates.is_empty() {
        base
    } else {
        engine.apply_batch(&base, &updates)
    };

    // departures within the hour after the update window
    let queries = random_queries(net, (window.1, window.1 + 3600), count, seed);

    let mut mr_times = Vec::with_capacity(count);
    let mut tb_times = Vec::with_capacity(count);
    let routes = ScanRoutes::repartitioned(net, &snapshot.scenario);
    let mut mr = MrEngine::new(net, &snapshot.scenario, &routes);
    let structures = TbStructures::new(net, &snapshot.routes, &snapshot.shortcuts);
    let mut tb = TbEngine::with_distances(&structures, &snapshot.scenario, engine.distances());
    for q in &queries {
        let t0 = Instant::now();
        let a = mr.query(q.source, q.target, q.departure);
        mr_times.push(t0.elapsed().as_secs_f64() * 1e3);
        let t1 = Instant::now();
        let b = tb.query(q.source, q.target, q.departure);
        tb_times.push(t1.elapsed().as_secs_f64() * 1e3);
        std::hint::black_box((a.labels.len(), b.labels.len()));
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len().max(1) as f64;
    let median = |v: &mut Vec<f64>| {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if v.is_empty() {
            0.0
        } else {
            v[v.len() / 2]
        }
    };
    let mut mr_sorted = mr_times.clone();
    let mut tb_sorted = tb_times.clone();
    BenchReport {
        queries: count,
        mean_mr_ms: mean(&mr_times),
        median_mr_ms: median(&mut mr_sorted),
        mean_tb_ms: mean(&tb_times),
        median_tb_ms: median(&mut tb_sorted),
        speedup: mean(&mr_times) / mean(&tb_times).max(1e-9),
        query_shortcuts: snapshot.metrics.query_shortcuts,
    }
}

struct Fnv(u64);

impl Fnv {
    fn new() -> Self {
        Fnv(0xcbf29ce484222325)
    }

    fn word(&mut self, w: u64) {
        for byte in w.to_le_bytes() {
            self.0 ^= byte as u64;
            self.0 = self.0.wrapping_mul(0x100000001b3);
        }
    }
}
