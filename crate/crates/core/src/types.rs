//! Dense integer identifiers and the time axis shared by all modules.

use std::fmt;

/// Seconds since midnight of service day 0. Trips crossing midnight simply
/// use values above 86400; a two-day timetable stays below 2 * 86400.
pub type Time = i64;

/// Unreachable / not-yet-found sentinel. Chosen well below `i64::MAX` so
/// that sums of two sentinels (or sentinel plus any realistic time) never
/// overflow.
pub const INFINITY: Time = i64::MAX / 4;

/// Sentinel for "no bound from below" (latest-departure searches etc.).
pub const NEG_INFINITY: Time = -INFINITY;

#[inline]
pub fn is_finite(t: Time) -> bool {
    t > NEG_INFINITY && t < INFINITY
}

/// Addition that keeps sentinels saturated instead of wrapping.
#[inline]
pub fn sat_add(a: Time, b: Time) -> Time {
    let s = a + b;
    s.clamp(NEG_INFINITY, INFINITY)
}

/// Subtraction with the same saturation rule, `a - b`.
#[inline]
pub fn sat_sub(a: Time, b: Time) -> Time {
    let s = a - b;
    s.clamp(NEG_INFINITY, INFINITY)
}

macro_rules! id_type {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub u32);

        impl $name {
            #[inline]
            pub fn idx(self) -> usize {
                self.0 as usize
            }

            #[inline]
            pub fn new(i: usize) -> Self {
                $name(i as u32)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!(stringify!($name), "({})"), self.0)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }
    };
}

id_type!(
    /// A stop. Stops occupy the vertex ids `0..num_stops`, so a `StopId`
    /// converts to a `VertexId` without a lookup table.
    StopId
);
id_type!(
    /// A vertex of the transfer graph. The first `num_stops` vertices are
    /// the stops.
    VertexId
);
id_type!(
    /// A trip. Trip ids of one route are consecutive and ordered by the
    /// route's FIFO order.
    TripId
);
id_type!(RouteId);
id_type!(
    /// A stop event. Event ids of one trip are consecutive and ordered by
    /// position within the trip.
    EventId
);

impl StopId {
    #[inline]
    pub fn vertex(self) -> VertexId {
        VertexId(self.0)
    }
}

impl VertexId {
    /// The stop with the same id, if this vertex is a stop.
    #[inline]
    pub fn as_stop(self, num_stops: usize) -> Option<StopId> {
        (self.idx() < num_stops).then_some(StopId(self.0))
    }
}
