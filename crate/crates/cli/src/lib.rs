//! Library surface of the benchmark harness: query generation, the
//! simulation protocol, timing runs and report emission. The binary in
//! `main.rs` is a thin argument-parsing layer over this.

pub mod config;
pub mod harness;
pub mod report;

pub use config::HarnessConfig;
pub use harness::{
    bench_queries, mine_affected_queries, query_affected, random_queries, simulate, BenchReport,
    PhaseCost, QuerySpec, SimConfig, SimulationReport,
};
