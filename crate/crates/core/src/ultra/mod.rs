//! Delay-robust transfer shortcut precomputation.
//!
//! For every source stop, candidates (two trips joined by one intermediate
//! transfer) are enumerated against three staggered witness searches; the
//! per-candidate join/feasibility/split limits combine into an origin
//! delay interval per (origin event, destination event) pair. A shortcut
//! is kept iff its interval is nonempty; the stored interval later lets
//! the update phase discard shortcuts that the current delays make
//! irrelevant. With a delay limit of zero this degenerates to the classic
//! undelayed shortcut set.

mod io;
mod source_run;

pub use io::{read_shortcuts, write_shortcuts, write_shortcuts_text, ShortcutIoError};
pub use source_run::CandidateReport;

use crate::timetable::Network;
use crate::types::*;
use rayon::prelude::*;
use source_run::SourceRun;
use std::collections::HashMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Shortcut {
    pub origin: EventId,
    pub destination: EventId,
    pub transfer_time: Time,
    /// Lower bound for the least origin arrival delay that needs this
    /// shortcut.
    pub min_origin_delay: Time,
    /// Highest origin arrival delay under which the shortcut is relevant.
    pub max_origin_delay: Time,
}

impl Shortcut {
    #[inline]
    pub fn interval_contains(&self, delta: Time) -> bool {
        self.min_origin_delay <= delta && delta <= self.max_origin_delay
    }
}

/// The merged result of a shortcut computation, keyed by (origin,
/// destination) event pair.
#[derive(Clone, Debug, Default)]
pub struct ShortcutSet {
    pub max_delay: Time,
    pub network_hash: u64,
    map: HashMap<(EventId, EventId), (Time, Time, Time)>,
}

impl ShortcutSet {
    pub fn new(max_delay: Time, network_hash: u64) -> Self {
        ShortcutSet {
            max_delay,
            network_hash,
            map: HashMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn get(&self, origin: EventId, destination: EventId) -> Option<Shortcut> {
        self.map.get(&(origin, destination)).map(|&(tt, lo, hi)| Shortcut {
            origin,
            destination,
            transfer_time: tt,
            min_origin_delay: lo,
            max_origin_delay: hi,
        })
    }

    pub fn contains(&self, origin: EventId, destination: EventId) -> bool {
        self.map.contains_key(&(origin, destination))
    }

    /// Inserts one shortcut, widening the interval if the pair exists.
    pub fn insert(&mut self, s: Shortcut) {
        let entry = self
            .map
            .entry((s.origin, s.destination))
            .or_insert((s.transfer_time, s.min_origin_delay, s.max_origin_delay));
        debug_assert_eq!(entry.0, s.transfer_time);
        entry.1 = entry.1.min(s.min_origin_delay);
        entry.2 = entry.2.max(s.max_origin_delay);
    }

    /// Per-key interval union: minimum of the lower bounds, maximum of the
    /// upper bounds. Commutative and associative with the empty set as
    /// identity.
    pub fn merge(mut self, other: ShortcutSet) -> ShortcutSet {
        debug_assert_eq!(self.max_delay, other.max_delay);
        for ((o, d), (tt, lo, hi)) in other.map {
            self.insert(Shortcut {
                origin: o,
                destination: d,
                transfer_time: tt,
                min_origin_delay: lo,
                max_origin_delay: hi,
            });
        }
        self
    }

    /// Shortcuts in (origin, destination) order.
    pub fn iter_sorted(&self) -> Vec<Shortcut> {
        let mut keys: Vec<_> = self.map.keys().copied().collect();
        keys.sort();
        keys.into_iter()
            .map(|(o, d)| self.get(o, d).unwrap())
            .collect()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct BuildOptions {
    /// Prune candidates that could only be optimal if their first trip
    /// travelled backwards in time.
    pub time_travel_pruning: bool,
    /// Reuse witness labels and entry indices across the descending
    /// departure groups of one source stop. Turning this off recomputes
    /// every run from scratch (for equivalence testing).
    pub staggered: bool,
    pub parallel: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            time_travel_pruning: true,
            staggered: true,
            parallel: true,
        }
    }
}

/// Computes the shortcut set sufficient for every delay scenario with
/// delays up to `max_delay` (without time travel when pruning is on).
pub fn compute_shortcuts(net: &Network, max_delay: Time, opts: BuildOptions) -> ShortcutSet {
    assert!(max_delay >= 0);
    let hash = net.content_hash();
    let stops: Vec<usize> = (0..net.num_stops).collect();
    let fold = |mut acc: ShortcutSet, stop: &usize| {
        let mut run = SourceRun::new(net, max_delay, opts);
        run.run_source(StopId::new(*stop), &mut acc);
        acc
    };
    if opts.parallel {
        stops
            .par_iter()
            .fold(
                || ShortcutSet::new(max_delay, hash),
                |acc, s| fold(acc, s),
            )
            .reduce(|| ShortcutSet::new(max_delay, hash), ShortcutSet::merge)
    } else {
        stops
            .iter()
            .fold(ShortcutSet::new(max_delay, hash), |acc, s| fold(acc, s))
    }
}

/// Per-trip witness indices computed directly from their definitions,
/// given one-trip and two-trip witness arrival labels per stop: the entry
/// index is the first boardable position plus one, the exit index the last
/// non-dominated exit position, the witness index their minimum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WitnessIndices {
    pub entry: usize,
    pub exit: usize,
    pub witness: usize,
}

pub fn trip_witness_indices(
    net: &Network,
    trip: TripId,
    round1_by_stop: &[Time],
    round2_by_stop: &[Time],
) -> WitnessIndices {
    let t = net.trip(trip);
    let len = t.len();
    let mut entry = len;
    for i in 0..len {
        let ev = net.event(t.event(i));
        if ev.scheduled_departure >= round1_by_stop[ev.stop.idx()] {
            entry = i + 1;
            break;
        }
    }
    let mut exit = len;
    for i in (0..len).rev() {
        let ev = net.event(t.event(i));
        if ev.scheduled_arrival <= round2_by_stop[ev.stop.idx()] {
            exit = i;
            break;
        }
    }
    WitnessIndices {
        entry,
        exit,
        witness: entry.min(exit),
    }
}

/// Analyzes a single candidate through the same pipeline as the full
/// computation and reports its limits; used by tests and debugging.
pub fn analyze_candidate(
    net: &Network,
    max_delay: Time,
    candidate: &crate::journey::Candidate,
    opts: BuildOptions,
) -> Option<CandidateReport> {
    let source_stop = net.stop_of(candidate.source_event(net));
    let mut acc = ShortcutSet::new(max_delay, net.content_hash());
    let mut run = SourceRun::new(net, max_delay, opts);
    run.probe(
        candidate.source_event(net),
        candidate.origin_event(net),
        candidate.destination_event(net),
        candidate.target_event(net),
    );
    run.run_source(source_stop, &mut acc);
    run.take_report()
}


#[cfg(test)]
mod pipeline_tests {
    use super::*;
    use crate::journey::{Candidate, Seg};
    use crate::testutil::two_witness_network;

    #[test]
    fn worked_instance_limits_and_no_shortcut() {
        let inst = two_witness_network();
        let net = &inst.net;
        let cand = Candidate {
            first: Seg::new(net.trip_of(inst.source_event), 0, 1),
            second: Seg::new(net.trip_of(inst.destination_event), 0, 1),
        };
        let report = analyze_candidate(net, 5, &cand, BuildOptions::default()).unwrap();
        assert_eq!(report.candidate_arrival_destination, 21);
        assert_eq!(report.join_limit, 2);
        assert_eq!(report.feasibility_limit, 3);
        assert_eq!(report.d_split_limit, 0);
        assert_eq!(report.sigma_at_target_stop, 3);
        assert_eq!(report.indirect_split_limit, 4);
        assert_eq!(report.min_origin_delay_bound, 4);
        assert_eq!(report.max_split_witness_delay(), 3);
        assert_eq!(report.max_origin_delay, 2);
        assert!(!report.emitted);

        let set = compute_shortcuts(net, 5, BuildOptions::default());
        assert!(!set.contains(inst.origin_event, inst.destination_event));
        // the shortcut onto the split-witness trip is genuinely needed
        let kept = set.get(inst.origin_event, inst.split_witness_destination).unwrap();
        assert_eq!(kept.transfer_time, 1);
        assert_eq!((kept.min_origin_delay, kept.max_origin_delay), (0, 5));
    }

    #[test]
    fn zero_limit_intervals_are_degenerate() {
        let inst = two_witness_network();
        let set = compute_shortcuts(&inst.net, 0, BuildOptions::default());
        for s in set.iter_sorted() {
            assert_eq!((s.min_origin_delay, s.max_origin_delay), (0, 0));
        }
        // the candidate transfer has slack -2 and is infeasible undelayed
        assert!(!set.contains(inst.origin_event, inst.destination_event));
    }

    #[test]
    fn single_route_network_has_no_shortcuts() {
        let net = crate::testutil::six_stop_trip_network();
        let set = compute_shortcuts(&net, 300, BuildOptions::default());
        assert!(set.is_empty());
    }

    #[test]
    fn staggered_equals_from_scratch_on_fixture() {
        let inst = two_witness_network();
        for dmax in [0, 3, 5, 60] {
            let a = compute_shortcuts(
                &inst.net,
                dmax,
                BuildOptions {
                    staggered: true,
                    parallel: false,
                    ..BuildOptions::default()
                },
            );
            let b = compute_shortcuts(
                &inst.net,
                dmax,
                BuildOptions {
                    staggered: false,
                    parallel: false,
                    ..BuildOptions::default()
                },
            );
            assert_eq!(a.iter_sorted(), b.iter_sorted(), "dmax={dmax}");
        }
    }
}
