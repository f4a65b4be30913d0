//! Journeys, partial journeys, dominance and Pareto sets.
//!
//! Transfers are shortest paths and hence determined by their endpoints, so
//! a journey stores only its trip segments plus source and target vertex;
//! all transfer times come from the distance oracle.

mod enumerate;
mod oracle;

pub use enumerate::{enumerate_chains, enumerate_journeys, Chain, EnumerateError, EnumerateLimits};
pub use oracle::{
    enumerate_candidates, oracle_origin_delay_interval, prefix_optimal_in, Candidate,
    OriginInterval,
};

use crate::delay::DelayEval;
use crate::timetable::Network;
use crate::transfers::DistanceOracle;
use crate::types::*;

/// One ridden trip segment: enter at `enter`, exit at `exit` (inclusive).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Seg {
    pub trip: TripId,
    pub enter: u32,
    pub exit: u32,
}

impl Seg {
    pub fn new(trip: TripId, enter: usize, exit: usize) -> Self {
        debug_assert!(enter <= exit);
        Seg {
            trip,
            enter: enter as u32,
            exit: exit as u32,
        }
    }

    pub fn enter_event(&self, net: &Network) -> EventId {
        net.trip(self.trip).event(self.enter as usize)
    }

    pub fn exit_event(&self, net: &Network) -> EventId {
        net.trip(self.trip).event(self.exit as usize)
    }
}

/// A proper journey from `source` to `target`. An empty `legs` vector is
/// the pure-walk journey.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Journey {
    pub source: VertexId,
    pub target: VertexId,
    pub legs: Vec<Seg>,
}

impl Journey {
    pub fn walk(source: VertexId, target: VertexId) -> Self {
        Journey {
            source,
            target,
            legs: Vec::new(),
        }
    }

    pub fn num_trips(&self) -> usize {
        self.legs.len()
    }

    /// Stop events at which a trip is entered or exited, in order.
    pub fn event_sequence(&self, net: &Network) -> Vec<EventId> {
        let mut out = Vec::with_capacity(2 * self.legs.len());
        for leg in &self.legs {
            let a = leg.enter_event(net);
            let b = leg.exit_event(net);
            out.push(a);
            if b != a {
                out.push(b);
            }
        }
        out
    }

    /// Latest possible departure at the source; `INFINITY` for a pure walk.
    pub fn latest_departure(&self, net: &Network, dist: &DistanceOracle, eval: &impl DelayEval) -> Time {
        match self.legs.first() {
            None => INFINITY,
            Some(leg) => {
                let enter = leg.enter_event(net);
                let walk = dist.dist(self.source, net.stop_of(enter).vertex());
                sat_sub(eval.departure(net, enter), walk)
            }
        }
    }

    /// Arrival at the target when departing at `departure_time`.
    pub fn arrival(
        &self,
        net: &Network,
        dist: &DistanceOracle,
        eval: &impl DelayEval,
        departure_time: Time,
    ) -> Time {
        match self.legs.last() {
            None => sat_add(departure_time, dist.dist(self.source, self.target)),
            Some(leg) => {
                let exit = leg.exit_event(net);
                sat_add(
                    eval.arrival(net, exit),
                    dist.dist(net.stop_of(exit).vertex(), self.target),
                )
            }
        }
    }

    /// True iff the journey departs no earlier than `departure_time`,
    /// every transfer exists, and every intermediate transfer is feasible
    /// under `eval`.
    pub fn feasible(
        &self,
        net: &Network,
        dist: &DistanceOracle,
        eval: &impl DelayEval,
        departure_time: Time,
    ) -> bool {
        if self.legs.is_empty() {
            return is_finite(dist.dist(self.source, self.target));
        }
        if self.latest_departure(net, dist, eval) < departure_time {
            return false;
        }
        for pair in self.legs.windows(2) {
            if !transfer_feasible(net, dist, eval, pair[0].exit_event(net), pair[1].enter_event(net)) {
                return false;
            }
        }
        let last_exit = self.legs.last().unwrap().exit_event(net);
        is_finite(dist.dist(net.stop_of(last_exit).vertex(), self.target))
    }

    /// Line-oriented debug form, used by golden tests.
    pub fn debug_string(&self) -> String {
        use std::fmt::Write;
        let mut s = format!("{} ->", self.source);
        for leg in &self.legs {
            let _ = write!(s, " T{}[{},{}]", leg.trip, leg.enter, leg.exit);
        }
        let _ = write!(s, " -> {}", self.target);
        s
    }
}

/// An intermediate transfer between two stop events is feasible if the
/// destination departs no earlier than the origin's arrival plus the
/// transfer time.
pub fn transfer_feasible(
    net: &Network,
    dist: &DistanceOracle,
    eval: &impl DelayEval,
    from: EventId,
    to: EventId,
) -> bool {
    let walk = dist.dist(net.stop_of(from).vertex(), net.stop_of(to).vertex());
    if !is_finite(walk) {
        return false;
    }
    eval.departure(net, to) >= sat_add(eval.arrival(net, from), walk)
}

/// How a journey prefix ends: with a final transfer to a vertex, or midway
/// through a trip entered at some index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrefixEnd {
    Proper(VertexId),
    Pending { trip: TripId, enter: u32 },
}

/// A journey prefix: complete legs, then either a final transfer or a
/// trailing trip-segment prefix. The incomplete segment counts as a trip.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Prefix {
    pub source: VertexId,
    pub legs: Vec<Seg>,
    pub end: PrefixEnd,
}

impl Prefix {
    pub fn num_trips(&self) -> usize {
        self.legs.len()
            + match self.end {
                PrefixEnd::Proper(_) => 0,
                PrefixEnd::Pending { .. } => 1,
            }
    }

    pub fn event_sequence(&self, net: &Network) -> Vec<EventId> {
        let mut out = Vec::new();
        for leg in &self.legs {
            let a = leg.enter_event(net);
            let b = leg.exit_event(net);
            out.push(a);
            if b != a {
                out.push(b);
            }
        }
        if let PrefixEnd::Pending { trip, enter } = self.end {
            out.push(net.trip(trip).event(enter as usize));
        }
        out
    }

    /// Arrival for proper prefixes with at least one leg; `None` otherwise.
    pub fn arrival(&self, net: &Network, dist: &DistanceOracle, eval: &impl DelayEval) -> Option<Time> {
        match self.end {
            PrefixEnd::Pending { .. } => None,
            PrefixEnd::Proper(v) => self.legs.last().map(|leg| {
                let exit = leg.exit_event(net);
                sat_add(eval.arrival(net, exit), dist.dist(net.stop_of(exit).vertex(), v))
            }),
        }
    }

    pub fn latest_departure(&self, net: &Network, dist: &DistanceOracle, eval: &impl DelayEval) -> Time {
        let first = match (self.legs.first(), self.end) {
            (Some(leg), _) => leg.enter_event(net),
            (None, PrefixEnd::Pending { trip, enter }) => net.trip(trip).event(enter as usize),
            (None, PrefixEnd::Proper(_)) => return INFINITY,
        };
        let walk = dist.dist(self.source, net.stop_of(first).vertex());
        sat_sub(eval.departure(net, first), walk)
    }

    /// Feasibility: departure bound, all intermediate transfers, and the
    /// transfer into the pending trip (if any).
    pub fn feasible(
        &self,
        net: &Network,
        dist: &DistanceOracle,
        eval: &impl DelayEval,
        departure_time: Time,
    ) -> bool {
        if self.latest_departure(net, dist, eval) < departure_time {
            return false;
        }
        for pair in self.legs.windows(2) {
            if !transfer_feasible(net, dist, eval, pair[0].exit_event(net), pair[1].enter_event(net)) {
                return false;
            }
        }
        match self.end {
            PrefixEnd::Proper(v) => match self.legs.last() {
                None => is_finite(dist.dist(self.source, v)),
                Some(leg) => is_finite(dist.dist(net.stop_of(leg.exit_event(net)).vertex(), v)),
            },
            PrefixEnd::Pending { trip, enter } => match self.legs.last() {
                None => true, // boards directly at the source; departure bound checked above
                Some(leg) => transfer_feasible(
                    net,
                    dist,
                    eval,
                    leg.exit_event(net),
                    net.trip(trip).event(enter as usize),
                ),
            },
        }
    }
}

/// The standard prefixes of a journey, shortest first; the journey itself
/// is the last entry. The proper prefix after segment `k` ends at the next
/// boarding stop (or the target for the last segment).
pub fn standard_prefixes(net: &Network, journey: &Journey) -> Vec<Prefix> {
    let mut out = Vec::with_capacity(2 * journey.legs.len());
    for k in 0..journey.legs.len() {
        let leg = journey.legs[k];
        out.push(Prefix {
            source: journey.source,
            legs: journey.legs[..k].to_vec(),
            end: PrefixEnd::Pending {
                trip: leg.trip,
                enter: leg.enter,
            },
        });
        let end_vertex = if k + 1 < journey.legs.len() {
            net.stop_of(journey.legs[k + 1].enter_event(net)).vertex()
        } else {
            journey.target
        };
        out.push(Prefix {
            source: journey.source,
            legs: journey.legs[..=k].to_vec(),
            end: PrefixEnd::Proper(end_vertex),
        });
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DomMode {
    Weak,
    Strong,
}

/// Whether `a` (evaluated in `a_eval`) dominates `b` (evaluated in
/// `b_eval`). Proper prefixes compare by arrival time and trips when they
/// end at the same vertex; prefixes pending on the same trip compare by
/// trips and entry index. All other combinations are incomparable.
pub fn dominates(
    net: &Network,
    dist: &DistanceOracle,
    a: &Prefix,
    a_eval: &impl DelayEval,
    b: &Prefix,
    b_eval: &impl DelayEval,
    mode: DomMode,
) -> bool {
    match (a.end, b.end) {
        (PrefixEnd::Proper(va), PrefixEnd::Proper(vb)) => {
            if va != vb {
                return false;
            }
            let (Some(arr_a), Some(arr_b)) = (a.arrival(net, dist, a_eval), b.arrival(net, dist, b_eval))
            else {
                return false;
            };
            let weak = arr_a <= arr_b && a.num_trips() <= b.num_trips();
            match mode {
                DomMode::Weak => weak,
                DomMode::Strong => weak && (arr_a < arr_b || a.num_trips() < b.num_trips()),
            }
        }
        (PrefixEnd::Pending { trip: ta, enter: ia }, PrefixEnd::Pending { trip: tb, enter: ib }) => {
            if ta != tb {
                return false;
            }
            let weak = a.num_trips() <= b.num_trips() && ia <= ib;
            match mode {
                DomMode::Weak => weak,
                DomMode::Strong => weak && (a.num_trips() < b.num_trips() || ia < ib),
            }
        }
        _ => false,
    }
}

/// An (arrival time, number of trips) label.
pub type Label = (Time, usize);

/// Reduces labels to the canonical Pareto set: sorted by trips ascending
/// with strictly decreasing arrival times.
pub fn pareto_labels(mut labels: Vec<Label>) -> Vec<Label> {
    labels.sort_by_key(|&(arr, trips)| (trips, arr));
    let mut out: Vec<Label> = Vec::new();
    for (arr, trips) in labels {
        if out.last().map_or(true, |&(a, _)| arr < a) {
            out.push((arr, trips));
        }
    }
    out
}

/// Selects a minimal Pareto set among `journeys` under `eval` for the
/// given departure time. Infeasible journeys are dropped first. Ties break
/// by earliest arrival, then fewest trips, then input order.
pub fn pareto_filter(
    net: &Network,
    dist: &DistanceOracle,
    journeys: &[Journey],
    eval: &impl DelayEval,
    departure_time: Time,
) -> Vec<Journey> {
    let mut evaluated: Vec<(Time, usize, usize)> = journeys
        .iter()
        .enumerate()
        .filter(|(_, j)| j.feasible(net, dist, eval, departure_time))
        .map(|(i, j)| (j.arrival(net, dist, eval, departure_time), j.num_trips(), i))
        .collect();
    evaluated.sort();
    let mut out = Vec::new();
    let mut best_trips = usize::MAX;
    for (_, trips, i) in evaluated {
        if trips < best_trips {
            out.push(journeys[i].clone());
            best_trips = trips;
        }
    }
    out
}

/// Concatenation via matching transfer endpoints: `a` must end where `b`
/// starts; the final and initial transfers merge into one intermediate
/// transfer.
pub fn concat_journeys(a: &Journey, b: &Journey) -> Option<Journey> {
    if a.target != b.source {
        return None;
    }
    let mut legs = a.legs.clone();
    legs.extend(b.legs.iter().copied());
    Some(Journey {
        source: a.source,
        target: b.target,
        legs,
    })
}

/// Concatenation via a shared trip: `a` ends with a trip-segment prefix
/// entered at `enter`, the suffix exits the same trip at `exit > enter`
/// and continues with `rest`.
pub fn concat_through_trip(a: &Prefix, exit: u32, rest: &[Seg], target: VertexId) -> Option<Journey> {
    let PrefixEnd::Pending { trip, enter } = a.end else {
        return None;
    };
    if exit <= enter {
        return None;
    }
    let mut legs = a.legs.clone();
    legs.push(Seg { trip, enter, exit });
    legs.extend(rest.iter().copied());
    Some(Journey {
        source: a.source,
        target,
        legs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delay::{DelayScenario, Overlay};
    use crate::testutil::two_witness_network;

    #[test]
    fn candidate_feasibility_depends_on_origin_delay() {
        let inst = two_witness_network();
        let net = &inst.net;
        let dist = DistanceOracle::new(net);
        let candidate = Journey {
            source: VertexId(0),
            target: VertexId(3),
            legs: vec![
                Seg::new(net.trip_of(inst.source_event), 0, 1),
                Seg::new(net.trip_of(inst.destination_event), 0, 1),
            ],
        };
        let events = candidate.event_sequence(net);
        let dep0 = 5; // best-case departure of the first trip with limit 5
        // delay 2: origin arrives 22, +1 transfer = 23 <= departure 24
        let o2 = Overlay::parameterized(5, events.clone(), inst.origin_event, 2);
        assert!(candidate.feasible(net, &dist, &o2, dep0));
        assert_eq!(candidate.arrival(net, &dist, &o2, dep0), 50);
        // delay 4: origin arrives 24, +1 transfer = 25 > 24
        let o4 = Overlay::parameterized(5, events, inst.origin_event, 4);
        assert!(!candidate.feasible(net, &dist, &o4, dep0));
    }

    #[test]
    fn walk_journey_always_feasible_if_connected() {
        let inst = two_witness_network();
        let dist = DistanceOracle::new(&inst.net);
        let w = Journey::walk(VertexId(1), VertexId(2));
        let s = DelayScenario::punctual(&inst.net);
        assert!(w.feasible(&inst.net, &dist, &s, 1000));
        assert_eq!(w.arrival(&inst.net, &dist, &s, 1000), 1001);
        let unreachable = Journey::walk(VertexId(3), VertexId(0));
        assert!(!unreachable.feasible(&inst.net, &dist, &s, 0));
    }

    #[test]
    fn strong_dominance_is_irreflexive() {
        let inst = two_witness_network();
        let net = &inst.net;
        let dist = DistanceOracle::new(net);
        let s = DelayScenario::punctual(net);
        let j = Journey {
            source: VertexId(0),
            target: VertexId(1),
            legs: vec![Seg::new(net.trip_of(inst.source_event), 0, 1)],
        };
        let p = standard_prefixes(net, &j).pop().unwrap();
        assert!(!dominates(net, &dist, &p, &s, &p, &s, DomMode::Strong));
        assert!(dominates(net, &dist, &p, &s, &p, &s, DomMode::Weak));
    }

    #[test]
    fn pending_prefix_dominance_uses_entry_index() {
        let inst = two_witness_network();
        let net = &inst.net;
        let dist = DistanceOracle::new(net);
        let s = DelayScenario::punctual(net);
        let trip = net.trip_of(inst.source_event);
        let early = Prefix {
            source: VertexId(0),
            legs: vec![],
            end: PrefixEnd::Pending { trip, enter: 0 },
        };
        let late = Prefix {
            source: VertexId(0),
            legs: vec![],
            end: PrefixEnd::Pending { trip, enter: 1 },
        };
        assert!(dominates(net, &dist, &early, &s, &late, &s, DomMode::Strong));
        assert!(!dominates(net, &dist, &late, &s, &early, &s, DomMode::Weak));
    }

    #[test]
    fn pareto_label_reduction() {
        let labels = vec![(1000, 2), (1000, 1), (900, 3), (1200, 0), (950, 3)];
        assert_eq!(pareto_labels(labels), vec![(1200, 0), (1000, 1), (900, 3)]);
        assert_eq!(pareto_labels(vec![(5, 1)]), vec![(5, 1)]);
    }
}
