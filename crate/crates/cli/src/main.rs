use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use transit_bench::{
    bench_queries, mine_affected_queries, random_queries, simulate, HarnessConfig, PhaseCost,
    SimConfig,
};
use transit_core::delay::{generate_delay_stream, parse_delay_stream, write_delay_stream, GeneratorParams};
use transit_core::mr::mr_query;
use transit_core::synth::{synthetic_network, SynthParams};
use transit_core::tb::{TbEngine, TbStructures};
use transit_core::timetable::{load_network, save_network, Network};
use transit_core::types::*;
use transit_core::ultra::{compute_shortcuts, read_shortcuts, write_shortcuts, write_shortcuts_text, BuildOptions};
use transit_core::update::{UpdateEngine, UpdateMode};

#[derive(Parser)]
#[command(name = "transit-bench", about = "Delay-robust transit engine harness", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a reproducible synthetic network directory.
    GenNetwork {
        #[arg(long, default_value_t = 60)]
        stops: usize,
        #[arg(long, default_value_t = 25)]
        routes: usize,
        /// Headway profile: low, high or default.
        #[arg(long, default_value = "default")]
        profile: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: String,
    },
    /// Generate a delay update stream for a network.
    GenDelays {
        #[arg(long)]
        network: String,
        #[arg(long, default_value_t = 12 * 3600)]
        window_start: Time,
        #[arg(long, default_value_t = 13 * 3600)]
        window_end: Time,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: String,
    },
    /// Precompute the delay-robust shortcut set.
    BuildShortcuts {
        #[arg(long)]
        network: String,
        /// Delay limit in seconds.
        #[arg(long)]
        delta: Time,
        #[arg(long)]
        out: String,
        /// Disable time-travel pruning.
        #[arg(long)]
        no_time_travel: bool,
        /// Single-threaded, from-scratch witness searches.
        #[arg(long)]
        serial: bool,
        /// Also write a text export next to the binary file.
        #[arg(long)]
        text: bool,
    },
    /// Replay a stream against queries and report error rates.
    Simulate {
        #[arg(long)]
        config: Option<String>,
        #[arg(long)]
        network: Option<String>,
        #[arg(long)]
        shortcuts: String,
        #[arg(long)]
        stream: String,
        /// basic | advanced | none
        #[arg(long)]
        mode: Option<String>,
        #[arg(long)]
        queries: Option<usize>,
        /// Mine queries affected by the stream instead of uniform ones.
        #[arg(long)]
        affected: bool,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        window_start: Option<Time>,
        #[arg(long)]
        window_end: Option<Time>,
        /// fixed:<sec> or measured[:<scale>]
        #[arg(long)]
        phase_cost: Option<String>,
        #[arg(long)]
        report: Option<String>,
        #[arg(long)]
        json: Option<String>,
        /// Exit nonzero if accounting invariants fail (and, for streams
        /// within the delay limit, if any error is observed).
        #[arg(long)]
        check: bool,
    },
    /// Answer a single query with both engines.
    Query {
        #[arg(long)]
        network: String,
        #[arg(long)]
        shortcuts: String,
        #[arg(long)]
        stream: Option<String>,
        /// Execution time: the scenario current at this time is used.
        #[arg(long)]
        at: Option<Time>,
        #[arg(long)]
        from: u32,
        #[arg(long)]
        to: u32,
        #[arg(long)]
        dep: Time,
        #[arg(long, default_value = "both")]
        engine: String,
        #[arg(long, default_value = "advanced")]
        mode: String,
    },
    /// Time both engines on identical random queries.
    Bench {
        #[arg(long)]
        network: String,
        #[arg(long)]
        shortcuts: String,
        #[arg(long)]
        stream: Option<String>,
        #[arg(long, default_value_t = 10000)]
        queries: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 12 * 3600)]
        window_start: Time,
        #[arg(long, default_value_t = 13 * 3600)]
        window_end: Time,
        #[arg(long, default_value = "basic")]
        mode: String,
        /// Exit nonzero unless the shortcut engine is at least as fast on
        /// average.
        #[arg(long)]
        check: bool,
    },
}

fn parse_mode(s: &str) -> Result<UpdateMode> {
    Ok(match s {
        "none" => UpdateMode::None,
        "basic" => UpdateMode::Basic,
        "advanced" => UpdateMode::Advanced,
        other => bail!("unknown update mode {other}"),
    })
}

fn load(network: &str) -> Result<Network> {
    load_network(network, 0).with_context(|| format!("loading network from {network}"))
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::GenNetwork {
            stops,
            routes,
            profile,
            seed,
            out,
        } => {
            let params = match profile.as_str() {
                "low" => SynthParams::low_headway(stops, routes, seed),
                "high" => SynthParams::high_headway(stops, routes, seed),
                "default" => SynthParams {
                    stops,
                    routes,
                    seed,
                    ..SynthParams::default()
                },
                other => bail!("unknown profile {other}"),
            };
            let net = synthetic_network(&params);
            save_network(&net, &out)?;
            println!(
                "wrote {} stops, {} trips, {} events, {} transfer edges to {}",
                net.num_stops,
                net.trips.len(),
                net.num_events(),
                net.transfers.num_edges(),
                out
            );
        }
        Command::GenDelays {
            network,
            window_start,
            window_end,
            seed,
            out,
        } => {
            let net = load(&network)?;
            let stream = generate_delay_stream(
                &net,
                &GeneratorParams {
                    window_start,
                    window_end,
                    seed,
                },
            );
            std::fs::write(&out, write_delay_stream(&stream))?;
            println!("wrote {} updates to {}", stream.len(), out);
        }
        Command::BuildShortcuts {
            network,
            delta,
            out,
            no_time_travel,
            serial,
            text,
        } => {
            let net = load(&network)?;
            let opts = BuildOptions {
                time_travel_pruning: !no_time_travel,
                staggered: !serial,
                parallel: !serial,
            };
            let t0 = std::time::Instant::now();
            let set = compute_shortcuts(&net, delta, opts);
            println!(
                "computed {} shortcuts for delta={}s in {:.2}s",
                set.len(),
                delta,
                t0.elapsed().as_secs_f64()
            );
            write_shortcuts(&set, &out)?;
            if text {
                std::fs::write(format!("{out}.txt"), write_shortcuts_text(&set))?;
            }
        }
        Command::Simulate {
            config,
            network,
            shortcuts,
            stream,
            mode,
            queries,
            affected,
            seed,
            window_start,
            window_end,
            phase_cost,
            report,
            json,
            check,
        } => {
            let mut cfg = match config {
                Some(path) => HarnessConfig::from_file(&path)?,
                None => HarnessConfig::default(),
            };
            if let Some(n) = network {
                cfg.network = n;
            }
            if let Some(m) = mode {
                cfg.update_mode = m;
            }
            if let Some(q) = queries {
                cfg.query_count = q;
            }
            if affected {
                cfg.affected_only = true;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(w) = window_start {
                cfg.window_start = w;
            }
            if let Some(w) = window_end {
                cfg.window_end = w;
            }
            if let Some(p) = phase_cost {
                cfg.phase_cost = p;
            }
            let net = load(&cfg.network)?;
            let set = read_shortcuts(&shortcuts, Some(net.content_hash()))?;
            let stream = parse_delay_stream(&std::fs::read_to_string(&stream)?)?;
            let window = (cfg.window_start, cfg.window_end);
            let qs = if cfg.affected_only {
                let (qs, attempts) = mine_affected_queries(&net, &stream, window, cfg.query_count, cfg.seed);
                println!("mined {} affected queries out of {attempts} attempts", qs.len());
                qs
            } else {
                random_queries(&net, window, cfg.query_count, cfg.seed)
            };
            let sim_cfg = SimConfig {
                window,
                mode: parse_mode(&cfg.update_mode)?,
                phase_cost: PhaseCost::parse(&cfg.phase_cost)?,
                max_rounds: 8,
            };
            let rep = simulate(&net, &set, &stream, &qs, &sim_cfg);
            let table = transit_bench::report::write_reports(
                std::slice::from_ref(&rep),
                report.as_deref().or(Some(cfg.report_path.as_str())),
                json.as_deref().or(Some(cfg.json_path.as_str())),
            )?;
            print!("{table}");
            if check {
                if rep.journey_errors > rep.journey_total {
                    bail!("accounting mismatch");
                }
                let within_limit = stream
                    .updates
                    .iter()
                    .all(|u| u.delays.iter().all(|&(a, d)| a <= set.max_delay && d <= set.max_delay));
                if within_limit
                    && sim_cfg.mode != UpdateMode::None
                    && matches!(sim_cfg.phase_cost, PhaseCost::Fixed { seconds } if seconds == 0.0)
                    && rep.journey_errors > 0
                {
                    bail!(
                        "within-limit stream produced {} journey errors",
                        rep.journey_errors
                    );
                }
            }
        }
        Command::Query {
            network,
            shortcuts,
            stream,
            at,
            from,
            to,
            dep,
            engine,
            mode,
        } => {
            let net = load(&network)?;
            let set = read_shortcuts(&shortcuts, Some(net.content_hash()))?;
            let updates = match stream {
                Some(p) => {
                    let s = parse_delay_stream(&std::fs::read_to_string(&p)?)?;
                    let cutoff = at.unwrap_or(dep);
                    s.updates
                        .into_iter()
                        .filter(|u| u.reveal_time <= cutoff)
                        .collect()
                }
                None => Vec::new(),
            };
            let mut upd = UpdateEngine::new(&net, &set, parse_mode(&mode)?);
            let base = upd.initial_snapshot();
            let snap = if updates.is_empty() {
                base
            } else {
                upd.apply_batch(&base, &updates)
            };
            let source = VertexId(from);
            let target = VertexId(to);
            if engine == "mr" || engine == "both" {
                let res = mr_query(&net, &snap.scenario, source, target, dep, 8);
                println!("exact: {:?}", res.labels);
                for j in &res.journeys {
                    println!("  {}", j.debug_string());
                }
            }
            if engine == "tb" || engine == "both" {
                let structures = TbStructures::new(&net, &snap.routes, &snap.shortcuts);
                let mut tb = TbEngine::new(&structures, &snap.scenario);
                let res = tb.query(source, target, dep);
                println!("shortcut engine: {:?}", res.labels);
                for j in &res.journeys {
                    println!("  {}", j.debug_string());
                }
            }
        }
        Command::Bench {
            network,
            shortcuts,
            stream,
            queries,
            seed,
            window_start,
            window_end,
            mode,
            check,
        } => {
            let net = load(&network)?;
            let set = read_shortcuts(&shortcuts, Some(net.content_hash()))?;
            let stream = match stream {
                Some(p) => parse_delay_stream(&std::fs::read_to_string(&p)?)?,
                None => Default::default(),
            };
            let rep = bench_queries(
                &net,
                &set,
                &stream,
                (window_start, window_end),
                queries,
                seed,
                parse_mode(&mode)?,
            );
            println!(
                "queries={} exact mean={:.3}ms median={:.3}ms | shortcut mean={:.3}ms median={:.3}ms | speedup={:.2} | query shortcuts={}",
                rep.queries, rep.mean_mr_ms, rep.median_mr_ms, rep.mean_tb_ms, rep.median_tb_ms, rep.speedup, rep.query_shortcuts
            );
            if check && rep.mean_tb_ms > rep.mean_mr_ms {
                bail!("shortcut engine slower than the exact engine");
            }
        }
    }
    Ok(())
}
