//! Synthetic delay stream generator. One candidate update per trip; the
//! magnitude distribution follows aggregated real-world punctuality data,
//! with zero-delay draws discarded.

use super::{DelayStream, DelayUpdate};
use crate::timetable::Network;
use crate::types::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::fmt::Write as _;

/// Update magnitude buckets in minutes, with weights in per mille:
/// 50% zero, 30% (0,3], 10% (3,5], 6% (5,10], 2% (10,15], 1% (15,20],
/// 0.6% (20,30], 0.4% (30,60].
pub const UPDATE_BUCKETS: [(Time, Time, u32); 8] = [
    (0, 0, 500),
    (0, 3, 300),
    (3, 5, 100),
    (5, 10, 60),
    (10, 15, 20),
    (15, 20, 10),
    (20, 30, 6),
    (30, 60, 4),
];

#[derive(Clone, Copy, Debug)]
pub struct GeneratorParams {
    pub window_start: Time,
    pub window_end: Time,
    pub seed: u64,
}

/// Draws a bucket index according to `UPDATE_BUCKETS`.
fn draw_bucket(rng: &mut impl Rng) -> usize {
    let x = rng.gen_range(0u32..1000);
    let mut acc = 0;
    for (i, &(_, _, w)) in UPDATE_BUCKETS.iter().enumerate() {
        acc += w;
        if x < acc {
            return i;
        }
    }
    unreachable!("bucket weights sum to 1000")
}

/// Uniform integer delay in seconds within bucket `b`: (lo*60, hi*60].
fn draw_magnitude(rng: &mut impl Rng, b: usize) -> Time {
    let (lo, hi, _) = UPDATE_BUCKETS[b];
    rng.gen_range(lo * 60 + 1..=hi * 60)
}

/// One draw per trip: a uniformly random first affected index and a
/// magnitude from the bucket distribution. Zero draws produce no update.
/// Updates revealing after the window end are discarded; for updates
/// revealing before the window start, affected events that arrive before
/// the window start are omitted.
pub fn generate_delay_stream(net: &Network, params: &GeneratorParams) -> DelayStream {
    assert!(params.window_start < params.window_end);
    let mut rng = ChaCha12Rng::seed_from_u64(params.seed);
    let mut updates = Vec::new();
    for (ti, trip) in net.trips.iter().enumerate() {
        let first_index = rng.gen_range(0..trip.len());
        let bucket = draw_bucket(&mut rng);
        if bucket == 0 {
            continue;
        }
        let delay = draw_magnitude(&mut rng, bucket);
        let reveal = net.event(trip.event(first_index)).scheduled_arrival;
        if reveal > params.window_end {
            continue;
        }
        let mut start = first_index;
        while start < trip.len() && net.event(trip.event(start)).scheduled_arrival < params.window_start {
            start += 1;
        }
        if start == trip.len() {
            continue;
        }
        updates.push(DelayUpdate::constant(net, TripId::new(ti), start, delay, reveal));
    }
    DelayStream::new(updates)
}

/// One record per line: `trip_id,first_index,reveal_seconds` followed by
/// an (arr_delay, dep_delay) pair per affected event.
pub fn write_delay_stream(stream: &DelayStream) -> String {
    let mut out = String::new();
    for u in &stream.updates {
        let _ = write!(out, "{},{},{}", u.trip, u.first_index, u.reveal_time);
        for &(a, d) in &u.delays {
            let _ = write!(out, ",{a},{d}");
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, thiserror::Error)]
#[error("delay stream line {line}: {msg}")]
pub struct StreamParseError {
    pub line: usize,
    pub msg: String,
}

pub fn parse_delay_stream(text: &str) -> Result<DelayStream, StreamParseError> {
    let mut updates = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Result<Vec<i64>, _> = line.split(',').map(|f| f.trim().parse::<i64>()).collect();
        let fields = fields.map_err(|e| StreamParseError {
            line: ln + 1,
            msg: format!("invalid integer: {e}"),
        })?;
        if fields.len() < 5 || (fields.len() - 3) % 2 != 0 {
            return Err(StreamParseError {
                line: ln + 1,
                msg: format!("expected trip,first_index,reveal plus delay pairs, got {} fields", fields.len()),
            });
        }
        let delays = fields[3..]
            .chunks(2)
            .map(|c| (c[0], c[1]))
            .collect::<Vec<_>>();
        updates.push(DelayUpdate {
            trip: TripId(fields[0] as u32),
            first_index: fields[1] as usize,
            delays,
            reveal_time: fields[2],
        });
    }
    Ok(DelayStream::new(updates))
}
