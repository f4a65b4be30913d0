//! Delay scenarios: concrete per-event delays, analytic overlays used by
//! the shortcut computation, delay updates and the synthetic generator.

mod generate;
mod overlay;

pub use generate::{generate_delay_stream, parse_delay_stream, write_delay_stream, GeneratorParams};
pub use overlay::{DelayEval, Overlay};

use crate::timetable::Network;
use crate::types::*;

/// Per-stop-event arrival/departure delays, dense over all events.
/// Scenarios are immutable values; applying an update yields a new one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DelayScenario {
    arrival_delay: Vec<Time>,
    departure_delay: Vec<Time>,
}

impl DelayScenario {
    /// The punctual scenario: every delay is zero.
    pub fn punctual(net: &Network) -> Self {
        DelayScenario {
            arrival_delay: vec![0; net.num_events()],
            departure_delay: vec![0; net.num_events()],
        }
    }

    #[inline]
    pub fn arrival_delay(&self, e: EventId) -> Time {
        self.arrival_delay[e.idx()]
    }

    #[inline]
    pub fn departure_delay(&self, e: EventId) -> Time {
        self.departure_delay[e.idx()]
    }

    #[inline]
    pub fn arrival(&self, net: &Network, e: EventId) -> Time {
        net.event(e).scheduled_arrival + self.arrival_delay[e.idx()]
    }

    #[inline]
    pub fn departure(&self, net: &Network, e: EventId) -> Time {
        net.event(e).scheduled_departure + self.departure_delay[e.idx()]
    }

    pub fn max_delay(&self) -> Time {
        self.arrival_delay
            .iter()
            .chain(self.departure_delay.iter())
            .copied()
            .max()
            .unwrap_or(0)
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum UpdateError {
    #[error("update refers to invalid trip {0}")]
    InvalidTrip(u32),
    #[error("update first_index {first_index} out of range for trip of length {len}")]
    InvalidIndex { first_index: usize, len: usize },
    #[error("update carries {got} event delays, trip suffix needs {want}")]
    WrongLength { got: usize, want: usize },
    #[error("negative delay {0} is not representable")]
    NegativeDelay(Time),
}

/// New delays for the suffix of one trip, revealed at `reveal_time`.
/// `delays[k]` holds (arrival delay, departure delay) of the event at
/// index `first_index + k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DelayUpdate {
    pub trip: TripId,
    pub first_index: usize,
    pub delays: Vec<(Time, Time)>,
    pub reveal_time: Time,
}

impl DelayUpdate {
    /// One constant delay from `first_index` to the end of the trip, the
    /// shape produced by the synthetic generator.
    pub fn constant(net: &Network, trip: TripId, first_index: usize, delay: Time, reveal_time: Time) -> Self {
        let len = net.trip(trip).len();
        DelayUpdate {
            trip,
            first_index,
            delays: vec![(delay, delay); len - first_index],
            reveal_time,
        }
    }

    pub fn validate(&self, net: &Network) -> Result<(), UpdateError> {
        if self.trip.idx() >= net.trips.len() {
            return Err(UpdateError::InvalidTrip(self.trip.0));
        }
        let len = net.trip(self.trip).len();
        if self.first_index >= len {
            return Err(UpdateError::InvalidIndex {
                first_index: self.first_index,
                len,
            });
        }
        if self.delays.len() != len - self.first_index {
            return Err(UpdateError::WrongLength {
                got: self.delays.len(),
                want: len - self.first_index,
            });
        }
        if let Some(&(a, d)) = self.delays.iter().find(|(a, d)| *a < 0 || *d < 0) {
            return Err(UpdateError::NegativeDelay(a.min(d)));
        }
        Ok(())
    }
}

/// Applies `update` to `scenario`, returning the new scenario. Only the
/// affected suffix of the trip changes.
pub fn apply_update(
    net: &Network,
    scenario: &DelayScenario,
    update: &DelayUpdate,
) -> Result<DelayScenario, UpdateError> {
    update.validate(net)?;
    let mut next = scenario.clone();
    let trip = net.trip(update.trip);
    for (k, &(arr, dep)) in update.delays.iter().enumerate() {
        let e = trip.event(update.first_index + k);
        next.arrival_delay[e.idx()] = arr;
        next.departure_delay[e.idx()] = dep;
    }
    Ok(next)
}

/// Folds a sequence of updates over the punctual scenario.
pub fn replay_updates<'a>(
    net: &Network,
    updates: impl IntoIterator<Item = &'a DelayUpdate>,
) -> Result<DelayScenario, UpdateError> {
    let mut scenario = DelayScenario::punctual(net);
    for u in updates {
        scenario = apply_update(net, &scenario, u)?;
    }
    Ok(scenario)
}

/// Outcome of comparing two scenarios under the evaluation order: `a` is
/// better-or-equal when every departure of `a` is at least as late and
/// every arrival at most as late as in `b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScenarioOrder {
    Equal,
    ABetterEq,
    BBetterEq,
    Incomparable,
}

pub fn compare_scenarios(a: &DelayScenario, b: &DelayScenario) -> ScenarioOrder {
    assert_eq!(a.arrival_delay.len(), b.arrival_delay.len(), "scenarios over different networks");
    let mut a_better = true;
    let mut b_better = true;
    for i in 0..a.arrival_delay.len() {
        if !(a.departure_delay[i] >= b.departure_delay[i] && a.arrival_delay[i] <= b.arrival_delay[i]) {
            a_better = false;
        }
        if !(b.departure_delay[i] >= a.departure_delay[i] && b.arrival_delay[i] <= a.arrival_delay[i]) {
            b_better = false;
        }
        if !a_better && !b_better {
            return ScenarioOrder::Incomparable;
        }
    }
    match (a_better, b_better) {
        (true, true) => ScenarioOrder::Equal,
        (true, false) => ScenarioOrder::ABetterEq,
        (false, true) => ScenarioOrder::BBetterEq,
        (false, false) => ScenarioOrder::Incomparable,
    }
}

/// A stream of updates ordered by reveal time.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DelayStream {
    pub updates: Vec<DelayUpdate>,
}

impl DelayStream {
    pub fn new(mut updates: Vec<DelayUpdate>) -> Self {
        updates.sort_by_key(|u| u.reveal_time);
        DelayStream { updates }
    }

    pub fn len(&self) -> usize {
        self.updates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.updates.is_empty()
    }

    /// The scenario after applying every update revealed up to `time`.
    pub fn scenario_at(&self, net: &Network, time: Time) -> DelayScenario {
        let mut scenario = DelayScenario::punctual(net);
        for u in self.updates.iter().take_while(|u| u.reveal_time <= time) {
            scenario = apply_update(net, &scenario, u).expect("stream update must be valid");
        }
        scenario
    }
}
