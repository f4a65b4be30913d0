//! Delay-robust multimodal journey planning over public transit plus an
//! unrestricted transfer graph.
//!
//! The crate models a timetable with delays, precomputes transfer shortcuts
//! that stay sufficient for all delay scenarios up to a configurable limit,
//! keeps the query data structures current against a stream of delay
//! updates (with an optional heuristic replacement search for delays above
//! the limit), and answers bicriteria (arrival time, number of trips)
//! queries either exactly (round-based search with transfer relaxation) or
//! via the shortcut-based trip engine.

pub mod types;
pub mod util;

pub mod delay;
pub mod journey;
pub mod mr;
pub mod synth;
pub mod tb;
pub mod testutil;
pub mod timetable;
pub mod transfers;
pub mod ultra;
pub mod update;

pub use types::{Time, INFINITY, NEG_INFINITY};
