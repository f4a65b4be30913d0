//! Brute-force prefix-optimality oracle: for a two-trip candidate, the
//! exact set of origin arrival delays under which it is prefix-optimal,
//! checked delay by delay against exhaustively enumerated hook witnesses.

use super::enumerate::enumerate_chains;
use super::{dominates, DomMode, Journey, Prefix, PrefixEnd, Seg};
use crate::delay::{DelayEval, Overlay};
use crate::timetable::Network;
use crate::transfers::DistanceOracle;
use crate::types::*;

/// A candidate: two trips joined by one intermediate transfer, with empty
/// initial and final transfers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub first: Seg,
    pub second: Seg,
}

impl Candidate {
    pub fn source_event(&self, net: &Network) -> EventId {
        self.first.enter_event(net)
    }

    pub fn origin_event(&self, net: &Network) -> EventId {
        self.first.exit_event(net)
    }

    pub fn destination_event(&self, net: &Network) -> EventId {
        self.second.enter_event(net)
    }

    pub fn target_event(&self, net: &Network) -> EventId {
        self.second.exit_event(net)
    }

    pub fn journey(&self, net: &Network) -> Journey {
        Journey {
            source: net.stop_of(self.source_event(net)).vertex(),
            target: net.stop_of(self.target_event(net)).vertex(),
            legs: vec![self.first, self.second],
        }
    }

    /// Stop events of the candidate, `<source, origin, destination, target>`.
    pub fn prefix_events(&self, net: &Network) -> Vec<EventId> {
        self.journey(net).event_sequence(net)
    }
}

/// Closed interval of origin arrival delays; empty iff `lo > hi`. An empty
/// result is reported as `[hi + 1, hi]` where `hi` is the largest delay
/// that survives the upper-bounding (feasibility/join/full) checks, so the
/// two bounds remain individually meaningful.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OriginInterval {
    pub lo: Time,
    pub hi: Time,
}

impl OriginInterval {
    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn contains(&self, delta: Time) -> bool {
        self.lo <= delta && delta <= self.hi
    }
}

/// Wraps a scenario for witness evaluation without time travel on the
/// candidate's first trip: arrival delays of events before the origin on
/// that trip are capped by the arrival-time difference to the origin.
struct FirstTripCapped<'a, E> {
    inner: &'a E,
    trip: TripId,
    origin_index: usize,
    origin_sched_arrival: Time,
}

impl<E: DelayEval> DelayEval for FirstTripCapped<'_, E> {
    fn arrival(&self, net: &Network, e: EventId) -> Time {
        let base = self.inner.arrival(net, e);
        if net.trip_of(e) == self.trip && net.index_in_trip(e) < self.origin_index {
            let sched = net.event(e).scheduled_arrival;
            base.min(sched + (self.origin_sched_arrival - sched).max(0))
                .max(sched)
        } else {
            base
        }
    }

    fn departure(&self, net: &Network, e: EventId) -> Time {
        self.inner.departure(net, e)
    }
}

/// One enumerated witness shape: a prefix-form partial journey from the
/// candidate's source vertex, plus a flag for the pure-walk witness whose
/// arrival is the departure bound plus the walking distance.
struct WitnessPool {
    witnesses: Vec<(usize, Prefix)>, // (standard prefix index 1..=3, witness)
    walk_targets: Vec<(usize, VertexId)>,
}

/// Enumerates every witness shape against the candidate's standard
/// prefixes (the source prefix is assumed Pareto-optimal and skipped):
/// proper partial journeys to the prefix's end vertex, partial journeys
/// pending on the prefix's trip, and the pure walk. Shapes are collected
/// under the scenario `eval` purely for boarding feasibility; dominance
/// is re-evaluated per delay later.
fn witness_pool(
    net: &Network,
    dist: &DistanceOracle,
    cand: &Candidate,
    departure_bound: Time,
    eval: &impl DelayEval,
) -> WitnessPool {
    let journey = cand.journey(net);
    let prefixes = super::standard_prefixes(net, &journey);
    debug_assert_eq!(prefixes.len(), 4);
    let mut witnesses = Vec::new();
    let mut walk_targets = Vec::new();
    let chains = enumerate_chains(net, dist, journey.source, departure_bound, eval, 2);
    for (pi, prefix) in prefixes.iter().enumerate().skip(1) {
        match prefix.end {
            PrefixEnd::Proper(v) => {
                walk_targets.push((pi, v));
                for chain in &chains {
                    if !chain.legs.is_empty() && chain.legs.len() <= prefix.num_trips() {
                        witnesses.push((
                            pi,
                            Prefix {
                                source: journey.source,
                                legs: chain.legs.clone(),
                                end: PrefixEnd::Proper(v),
                            },
                        ));
                    }
                }
            }
            PrefixEnd::Pending { trip, .. } => {
                for chain in &chains {
                    if chain.legs.len() + 1 > prefix.num_trips()
                        || chain.legs.last().map(|l| l.trip) == Some(trip)
                    {
                        continue;
                    }
                    let t = net.trip(trip);
                    for enter in 0..t.len() {
                        witnesses.push((
                            pi,
                            Prefix {
                                source: journey.source,
                                legs: chain.legs.clone(),
                                end: PrefixEnd::Pending {
                                    trip,
                                    enter: enter as u32,
                                },
                            },
                        ));
                    }
                }
            }
        }
    }
    WitnessPool {
        witnesses,
        walk_targets,
    }
}

struct WitnessScan<'a> {
    net: &'a Network,
    dist: &'a DistanceOracle,
    departure_bound: Time,
}

impl WitnessScan<'_> {
    /// Whether `witness` strongly dominates the `pi`-th standard prefix in
    /// (candidate scenario, witness scenario).
    fn kills(
        &self,
        cand: &Candidate,
        pi: usize,
        witness: &Prefix,
        candidate_eval: &impl DelayEval,
        witness_eval: &impl DelayEval,
    ) -> bool {
        let net = self.net;
        let journey = cand.journey(net);
        let prefix = &super::standard_prefixes(net, &journey)[pi];
        if !prefix.feasible(net, self.dist, candidate_eval, self.departure_bound) {
            return false;
        }
        witness.feasible(net, self.dist, witness_eval, self.departure_bound)
            && dominates(
                net,
                self.dist,
                witness,
                witness_eval,
                prefix,
                candidate_eval,
                DomMode::Strong,
            )
    }

    /// Whether the witness's dominance stops at high origin delays: its
    /// feasibility hinges on a transfer leaving the origin event, or its
    /// own arrival grows with the delay while the compared prefix's does
    /// not. Such witnesses bound the origin delay from below (split side);
    /// all others keep dominating upward (join/full side).
    fn kill_upper_bounded(&self, cand: &Candidate, pi: usize, witness: &Prefix) -> bool {
        let net = self.net;
        let origin = cand.origin_event(net);
        let legs = &witness.legs;
        let transfers_from_origin = legs
            .windows(2)
            .any(|w| w[0].exit_event(net) == origin)
            || (matches!(witness.end, PrefixEnd::Pending { .. })
                && legs.last().map(|l| l.exit_event(net)) == Some(origin));
        let witness_arrival_moves = matches!(witness.end, PrefixEnd::Proper(_))
            && legs.last().map(|l| l.exit_event(net)) == Some(origin);
        let prefix_arrival_moves = pi == 1; // the origin prefix
        transfers_from_origin || (witness_arrival_moves && !prefix_arrival_moves)
    }

    fn walk_kills(
        &self,
        cand: &Candidate,
        pi: usize,
        v: VertexId,
        candidate_eval: &impl DelayEval,
    ) -> bool {
        let net = self.net;
        let journey = cand.journey(net);
        let prefix = &super::standard_prefixes(net, &journey)[pi];
        if !prefix.feasible(net, self.dist, candidate_eval, self.departure_bound) {
            return false;
        }
        let walk = self.dist.dist(journey.source, v);
        if !is_finite(walk) {
            return false;
        }
        let arr_w = sat_add(self.departure_bound, walk);
        prefix
            .arrival(net, self.dist, candidate_eval)
            .map_or(false, |arr_p| arr_w <= arr_p)
    }
}

/// Whether the candidate is prefix-optimal in the parameterized scenario
/// with origin delay `delta` (hook witnesses only, source prefix assumed
/// optimal). Exposed for the law tests.
pub fn prefix_optimal_in(
    net: &Network,
    dist: &DistanceOracle,
    cand: &Candidate,
    max_delay: Time,
    delta: Time,
    respect_time_travel: bool,
) -> bool {
    let dep_bound = net.event(cand.source_event(net)).scheduled_departure + max_delay;
    let scenario = Overlay::parameterized(
        max_delay,
        cand.prefix_events(net),
        cand.origin_event(net),
        delta,
    );
    if !cand.journey(net).feasible(net, dist, &scenario, dep_bound) {
        return false;
    }
    let scan = WitnessScan {
        net,
        dist,
        departure_bound: dep_bound,
    };
    let pool = witness_pool(net, dist, cand, dep_bound, &scenario);
    let killed = |witness_eval: &dyn Fn(&Prefix, usize) -> bool| {
        pool.walk_targets
            .iter()
            .any(|&(pi, v)| scan.walk_kills(cand, pi, v, &scenario))
            || pool.witnesses.iter().any(|(pi, w)| witness_eval(w, *pi))
    };
    if respect_time_travel {
        let capped = FirstTripCapped {
            inner: &scenario,
            trip: cand.first.trip,
            origin_index: cand.first.exit as usize,
            origin_sched_arrival: net.event(cand.origin_event(net)).scheduled_arrival,
        };
        !killed(&|w, pi| scan.kills(cand, pi, w, &scenario, &capped))
    } else {
        !killed(&|w, pi| scan.kills(cand, pi, w, &scenario, &scenario))
    }
}

/// The exact set of origin arrival delays in `[0, max_delay]` for which
/// the candidate is prefix-optimal in the corresponding parameterized
/// best-case scenario, reported as a closed interval.
///
/// With `respect_time_travel`, witnesses exiting the candidate's first
/// trip early are evaluated with arrival delays capped by the arrival-time
/// difference, and delays above the second-trip no-time-travel bound are
/// excluded.
pub fn oracle_origin_delay_interval(
    net: &Network,
    dist: &DistanceOracle,
    cand: &Candidate,
    max_delay: Time,
    respect_time_travel: bool,
) -> OriginInterval {
    let dep_bound = net.event(cand.source_event(net)).scheduled_departure + max_delay;
    let scan = WitnessScan {
        net,
        dist,
        departure_bound: dep_bound,
    };

    // Second-trip no-time-travel bound: the best two-trip witness arrival
    // at the target stop (source prefix best-cased) minus the candidate's
    // arrival at the destination stop.
    let tt_cap = if respect_time_travel {
        let s_pre = Overlay::best_case_for(max_delay, vec![cand.source_event(net)]);
        let target_v = net.stop_of(cand.target_event(net)).vertex();
        let chains = enumerate_chains(net, dist, cand.journey(net).source, dep_bound, &s_pre, 2);
        let best_witness_arrival = chains
            .iter()
            .map(|c| sat_add(c.end_time, dist.dist(c.end_vertex, target_v)))
            .min()
            .unwrap_or(INFINITY);
        let origin = cand.origin_event(net);
        let dest_v = net.stop_of(cand.destination_event(net)).vertex();
        let candidate_arrival = sat_add(
            net.event(origin).scheduled_arrival,
            dist.dist(net.stop_of(origin).vertex(), dest_v),
        );
        sat_sub(best_witness_arrival, candidate_arrival)
    } else {
        INFINITY
    };

    // feasible deltas, then: a delta is optimal if no witness kills it; it
    // stays on the upper-bounded side if no witness kills both it and the
    // top feasible delta (join and full witnesses have upward-closed kill
    // ranges, split witnesses downward-closed ones)
    let scenario_at = |delta: Time| {
        Overlay::parameterized(
            max_delay,
            cand.prefix_events(net),
            cand.origin_event(net),
            delta,
        )
    };
    let feasible: Vec<Time> = (0..=max_delay)
        .filter(|&d| {
            d <= tt_cap && cand.journey(net).feasible(net, dist, &scenario_at(d), dep_bound)
        })
        .collect();
    let Some(&top) = feasible.last() else {
        return OriginInterval {
            lo: -max_delay,
            hi: -1 - max_delay,
        };
    };

    let kills_at = |w: &Prefix, pi: usize, delta: Time| {
        let scenario = scenario_at(delta);
        if respect_time_travel {
            let capped = FirstTripCapped {
                inner: &scenario,
                trip: cand.first.trip,
                origin_index: cand.first.exit as usize,
                origin_sched_arrival: net.event(cand.origin_event(net)).scheduled_arrival,
            };
            scan.kills(cand, pi, w, &scenario, &capped)
        } else {
            scan.kills(cand, pi, w, &scenario, &scenario)
        }
    };

    let mut optimal: Vec<Time> = Vec::new();
    let mut upper_ok: Vec<Time> = Vec::new();
    let _ = top;
    for &delta in &feasible {
        let scenario = scenario_at(delta);
        let pool = witness_pool(net, dist, cand, dep_bound, &scenario);
        let mut killed = false;
        let mut upper_killed = false;
        for &(pi, v) in &pool.walk_targets {
            if scan.walk_kills(cand, pi, v, &scenario) {
                killed = true;
                // the walk witness's arrival is fixed, so its dominance
                // extends upward (join against the origin prefix, full
                // against the rest)
                upper_killed = true;
            }
        }
        for (pi, w) in &pool.witnesses {
            if killed && upper_killed {
                break;
            }
            if kills_at(w, *pi, delta) {
                killed = true;
                if !scan.kill_upper_bounded(cand, *pi, w) {
                    upper_killed = true;
                }
            }
        }
        if !upper_killed {
            upper_ok.push(delta);
        }
        if !killed {
            optimal.push(delta);
        }
    }

    if optimal.is_empty() {
        let hi = upper_ok.iter().max().copied().unwrap_or(-1 - max_delay);
        OriginInterval { lo: hi + 1, hi }
    } else {
        // kill ranges are anchored at an end, so the optimal set is a
        // contiguous range
        debug_assert!(optimal.windows(2).all(|w| w[1] == w[0] + 1));
        OriginInterval {
            lo: *optimal.first().unwrap(),
            hi: *optimal.last().unwrap(),
        }
    }
}

/// Every two-trip candidate of a tiny network: distinct trips joined by a
/// finite intermediate transfer that is feasible for some origin delay in
/// `[0, max_delay]`.
pub fn enumerate_candidates(
    net: &Network,
    dist: &DistanceOracle,
    max_delay: Time,
) -> Vec<Candidate> {
    let mut out = Vec::new();
    for t1 in 0..net.trips.len() {
        let first = net.trip(TripId::new(t1));
        for t2 in 0..net.trips.len() {
            if t1 == t2 {
                continue;
            }
            let second = net.trip(TripId::new(t2));
            for s in 0..first.len() - 1 {
                for o in s + 1..first.len() {
                    for d in 0..second.len() - 1 {
                        let walk = dist.dist(
                            net.stop_of(first.event(o)).vertex(),
                            net.stop_of(second.event(d)).vertex(),
                        );
                        if !is_finite(walk) {
                            continue;
                        }
                        let slack = net.event(second.event(d)).scheduled_departure
                            - (net.event(first.event(o)).scheduled_arrival + walk);
                        if slack + max_delay < 0 {
                            continue;
                        }
                        for t in d + 1..second.len() {
                            out.push(Candidate {
                                first: Seg::new(TripId::new(t1), s, o),
                                second: Seg::new(TripId::new(t2), d, t),
                            });
                        }
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::two_witness_network;
    use crate::timetable::NetworkBuilder;

    fn candidate_of(inst: &crate::testutil::TwoWitnessInstance) -> Candidate {
        let net = &inst.net;
        Candidate {
            first: Seg::new(net.trip_of(inst.source_event), 0, 1),
            second: Seg::new(net.trip_of(inst.destination_event), 0, 1),
        }
    }

    #[test]
    fn worked_instance_interval_is_empty_three_two() {
        let inst = two_witness_network();
        let dist = DistanceOracle::new(&inst.net);
        let cand = candidate_of(&inst);
        let interval = oracle_origin_delay_interval(&inst.net, &dist, &cand, 5, false);
        assert_eq!(interval, OriginInterval { lo: 3, hi: 2 });
        assert!(interval.is_empty());
    }

    #[test]
    fn no_witnesses_full_interval() {
        // single-line network plus disconnected second trip: candidate has
        // no competitors, positive slack
        let net = NetworkBuilder::new(4)
            .trip(&[0, 1], &[(0, 0), (100, 100)])
            .trip(&[2, 3], &[(150, 150), (200, 200)])
            .edge(1, 2, 10)
            .build();
        let dist = DistanceOracle::new(&net);
        let first = net.trip_of(
            net.trips
                .iter()
                .map(|t| t.event(0))
                .find(|&e| net.stop_of(e) == StopId(0))
                .unwrap(),
        );
        let second = net.trip_of(
            net.trips
                .iter()
                .map(|t| t.event(0))
                .find(|&e| net.stop_of(e) == StopId(2))
                .unwrap(),
        );
        let cand = Candidate {
            first: Seg::new(first, 0, 1),
            second: Seg::new(second, 0, 1),
        };
        // slack = 150 - (100 + 10) = 40 >= 0, no witnesses at all
        let interval = oracle_origin_delay_interval(&net, &dist, &cand, 30, false);
        assert_eq!(interval, OriginInterval { lo: 0, hi: 30 });
    }

    #[test]
    fn respecting_time_travel_never_grows_the_interval() {
        let inst = two_witness_network();
        let dist = DistanceOracle::new(&inst.net);
        let cand = candidate_of(&inst);
        let plain = oracle_origin_delay_interval(&inst.net, &dist, &cand, 5, false);
        let tt = oracle_origin_delay_interval(&inst.net, &dist, &cand, 5, true);
        assert!(tt.is_empty() || (plain.lo <= tt.lo && tt.hi <= plain.hi));
    }
}
