//! Virtual delay scenarios. The shortcut computation evaluates millions of
//! per-prefix scenarios, so overlays compute delayed times on demand
//! instead of materializing delay arrays.

use super::DelayScenario;
use crate::timetable::Network;
use crate::types::*;

/// Delayed arrival/departure lookup, implemented by concrete scenarios and
/// by the analytic overlays.
pub trait DelayEval {
    fn arrival(&self, net: &Network, e: EventId) -> Time;
    fn departure(&self, net: &Network, e: EventId) -> Time;
}

impl DelayEval for DelayScenario {
    #[inline]
    fn arrival(&self, net: &Network, e: EventId) -> Time {
        DelayScenario::arrival(self, net, e)
    }

    #[inline]
    fn departure(&self, net: &Network, e: EventId) -> Time {
        DelayScenario::departure(self, net, e)
    }
}

impl<T: DelayEval + ?Sized> DelayEval for &T {
    #[inline]
    fn arrival(&self, net: &Network, e: EventId) -> Time {
        (**self).arrival(net, e)
    }

    #[inline]
    fn departure(&self, net: &Network, e: EventId) -> Time {
        (**self).departure(net, e)
    }
}

/// Analytic scenarios, all parameterized by the delay limit.
///
/// The best case maximizes departure delays and zeroes arrival delays; the
/// worst case is the opposite. `BestCaseFor` best-cases exactly the listed
/// events (a candidate prefix) and worst-cases everything else.
/// `Parameterized` additionally pins the origin event's arrival delay.
/// `TimeTravel` caps the arrival delays of events preceding `index` on
/// `trip` by the arrival-time difference, ruling out witnesses that would
/// need the trip to run backwards.
#[derive(Clone, Debug)]
pub enum Overlay<'a> {
    Concrete(&'a DelayScenario),
    BestCase {
        max_delay: Time,
    },
    WorstCase {
        max_delay: Time,
    },
    BestCaseFor {
        max_delay: Time,
        prefix_events: Vec<EventId>,
    },
    Parameterized {
        max_delay: Time,
        prefix_events: Vec<EventId>,
        origin: EventId,
        delta: Time,
    },
    TimeTravel {
        max_delay: Time,
        trip: TripId,
        index: usize,
        prefix_events: Vec<EventId>,
    },
}

impl<'a> Overlay<'a> {
    pub fn best_case(max_delay: Time) -> Self {
        Overlay::BestCase { max_delay }
    }

    pub fn worst_case(max_delay: Time) -> Self {
        Overlay::WorstCase { max_delay }
    }

    pub fn best_case_for(max_delay: Time, prefix_events: Vec<EventId>) -> Self {
        Overlay::BestCaseFor {
            max_delay,
            prefix_events,
        }
    }

    pub fn parameterized(max_delay: Time, prefix_events: Vec<EventId>, origin: EventId, delta: Time) -> Self {
        debug_assert!(prefix_events.contains(&origin));
        Overlay::Parameterized {
            max_delay,
            prefix_events,
            origin,
            delta,
        }
    }

    pub fn time_travel(net: &Network, max_delay: Time, origin: EventId, prefix_events: Vec<EventId>) -> Self {
        Overlay::TimeTravel {
            max_delay,
            trip: net.trip_of(origin),
            index: net.index_in_trip(origin),
            prefix_events,
        }
    }
}

#[inline]
fn in_prefix(prefix: &[EventId], e: EventId) -> bool {
    prefix.contains(&e)
}

impl DelayEval for Overlay<'_> {
    fn arrival(&self, net: &Network, e: EventId) -> Time {
        let scheduled = net.event(e).scheduled_arrival;
        match self {
            Overlay::Concrete(s) => s.arrival(net, e),
            Overlay::BestCase { .. } => scheduled,
            Overlay::WorstCase { max_delay } => scheduled + max_delay,
            Overlay::BestCaseFor {
                max_delay,
                prefix_events,
            } => {
                if in_prefix(prefix_events, e) {
                    scheduled
                } else {
                    scheduled + max_delay
                }
            }
            Overlay::Parameterized {
                max_delay,
                prefix_events,
                origin,
                delta,
            } => {
                if e == *origin {
                    scheduled + delta
                } else if in_prefix(prefix_events, e) {
                    scheduled
                } else {
                    scheduled + max_delay
                }
            }
            Overlay::TimeTravel {
                max_delay,
                trip,
                index,
                ..
            } => {
                if net.trip_of(e) == *trip && net.index_in_trip(e) < *index {
                    let origin_arrival = net.event(net.trip(*trip).event(*index)).scheduled_arrival;
                    scheduled + (*max_delay).min(origin_arrival - scheduled)
                } else {
                    scheduled + max_delay
                }
            }
        }
    }

    fn departure(&self, net: &Network, e: EventId) -> Time {
        let scheduled = net.event(e).scheduled_departure;
        match self {
            Overlay::Concrete(s) => s.departure(net, e),
            Overlay::BestCase { max_delay } => scheduled + max_delay,
            Overlay::WorstCase { .. } => scheduled,
            Overlay::BestCaseFor {
                max_delay,
                prefix_events,
            }
            | Overlay::Parameterized {
                max_delay,
                prefix_events,
                ..
            }
            | Overlay::TimeTravel {
                max_delay,
                prefix_events,
                ..
            } => {
                if in_prefix(prefix_events, e) {
                    scheduled + max_delay
                } else {
                    scheduled
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{hm, six_stop_trip_network};

    #[test]
    fn extreme_overlays() {
        let net = six_stop_trip_network();
        let e = EventId(2);
        let best = Overlay::best_case(300);
        let worst = Overlay::worst_case(300);
        assert_eq!(best.arrival(&net, e), hm(9, 8));
        assert_eq!(best.departure(&net, e), hm(9, 10) + 300);
        assert_eq!(worst.arrival(&net, e), hm(9, 8) + 300);
        assert_eq!(worst.departure(&net, e), hm(9, 10));
    }

    #[test]
    fn prefix_overlay_splits_best_and_worst() {
        let net = six_stop_trip_network();
        let o = Overlay::best_case_for(60, vec![EventId(1)]);
        assert_eq!(o.arrival(&net, EventId(1)), hm(9, 5));
        assert_eq!(o.departure(&net, EventId(1)), hm(9, 6) + 60);
        assert_eq!(o.arrival(&net, EventId(2)), hm(9, 8) + 60);
        assert_eq!(o.departure(&net, EventId(2)), hm(9, 10));
    }

    #[test]
    fn parameterized_pins_origin_arrival() {
        let net = six_stop_trip_network();
        let o = Overlay::parameterized(60, vec![EventId(0), EventId(3)], EventId(3), 42);
        assert_eq!(o.arrival(&net, EventId(3)), hm(9, 15) + 42);
        assert_eq!(o.arrival(&net, EventId(0)), hm(9, 0));
        assert_eq!(o.departure(&net, EventId(3)), hm(9, 16) + 60);
    }

    #[test]
    fn time_travel_caps_earlier_arrivals() {
        let net = six_stop_trip_network();
        // origin at index 3 (arrival 9:15); event 2 arrives 9:08, gap 420s
        let o = Overlay::time_travel(&net, 300, EventId(3), vec![EventId(0)]);
        // gap 420 >= 300, so the cap does not bite
        assert_eq!(o.arrival(&net, EventId(2)), hm(9, 8) + 300);
        // event 1 arrives 9:05, gap 600, cap still 300
        assert_eq!(o.arrival(&net, EventId(1)), hm(9, 5) + 300);
        // with a origin at index 2 (arrival 9:08): event 1 gap is 180 < 300
        let o = Overlay::time_travel(&net, 300, EventId(2), vec![EventId(0)]);
        assert_eq!(o.arrival(&net, EventId(1)), hm(9, 5) + 180);
        // events at or after the origin index keep the worst case
        assert_eq!(o.arrival(&net, EventId(4)), hm(9, 20) + 300);
    }
}
