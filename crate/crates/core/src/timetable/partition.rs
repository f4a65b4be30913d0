//! Grouping trips into routes so that all trips of a route share one stop
//! sequence and never overtake each other.

use crate::types::*;

/// Per-event times used for the FIFO check. The static partition uses the
/// scheduled times; the update phase re-partitions under delayed times.
pub trait TripTimes {
    fn arrival(&self, trip: TripId, index: usize) -> Time;
    fn departure(&self, trip: TripId, index: usize) -> Time;
}

/// A trip record as seen by the partitioner: its stop sequence plus an
/// opaque id used to query `times`.
#[derive(Clone, Debug)]
pub struct TripRecord {
    pub trip: TripId,
    pub stops: Vec<StopId>,
}

/// `earlier` never overtakes `later`: arrivals and departures of `earlier`
/// are <= those of `later` at every index. Departures are included so that
/// boarding the earliest feasible trip of a route stays a monotone search.
pub fn fifo_pair(times: &impl TripTimes, earlier: TripId, later: TripId, len: usize) -> bool {
    (0..len).all(|i| {
        times.arrival(earlier, i) <= times.arrival(later, i)
            && times.departure(earlier, i) <= times.departure(later, i)
    })
}

/// Greedy minimal partition of `trips` into FIFO groups.
///
/// Trips with equal stop sequences are sorted by departure at index 0
/// (ties by input order) and greedily assigned to the first group whose
/// last trip does not overtake them. Within a group, trips are therefore
/// chained pointwise, which makes the pairwise FIFO check transitive.
///
/// Returns the groups in order of first assignment; each group lists trips
/// in FIFO order. Input order determines everything, so the result is
/// deterministic.
pub fn partition_routes(trips: &[TripRecord], times: &impl TripTimes) -> Vec<Vec<TripId>> {
    // Group by stop sequence, keeping first-appearance order of sequences.
    let mut seq_order: Vec<&[StopId]> = Vec::new();
    let mut by_seq: Vec<Vec<(usize, TripId)>> = Vec::new();
    for (input_pos, rec) in trips.iter().enumerate() {
        match seq_order.iter().position(|s| *s == rec.stops.as_slice()) {
            Some(k) => by_seq[k].push((input_pos, rec.trip)),
            None => {
                seq_order.push(&rec.stops);
                by_seq.push(vec![(input_pos, rec.trip)]);
            }
        }
    }

    let mut groups: Vec<Vec<TripId>> = Vec::new();
    for (k, mut members) in by_seq.into_iter().enumerate() {
        let len = seq_order[k].len();
        members.sort_by_key(|&(pos, trip)| (times.departure(trip, 0), pos));
        let first_group_of_seq = groups.len();
        for (_, trip) in members {
            let slot = groups[first_group_of_seq..]
                .iter()
                .position(|g| fifo_pair(times, *g.last().unwrap(), trip, len));
            match slot {
                Some(s) => groups[first_group_of_seq + s].push(trip),
                None => groups.push(vec![trip]),
            }
        }
    }
    groups
}

#[cfg(test)]
mod tests {
    use super::*;

    struct FlatTimes {
        // (arr, dep) rows per trip
        rows: Vec<Vec<(Time, Time)>>,
    }

    impl TripTimes for FlatTimes {
        fn arrival(&self, trip: TripId, index: usize) -> Time {
            self.rows[trip.idx()][index].0
        }
        fn departure(&self, trip: TripId, index: usize) -> Time {
            self.rows[trip.idx()][index].1
        }
    }

    fn rec(id: u32, stops: &[u32]) -> TripRecord {
        TripRecord {
            trip: TripId(id),
            stops: stops.iter().map(|&s| StopId(s)).collect(),
        }
    }

    #[test]
    fn fifo_pair_stays_one_route() {
        let times = FlatTimes {
            rows: vec![
                vec![(0, 10), (100, 110)],
                vec![(50, 60), (150, 160)],
            ],
        };
        let groups = partition_routes(&[rec(0, &[0, 1]), rec(1, &[0, 1])], &times);
        assert_eq!(groups, vec![vec![TripId(0), TripId(1)]]);
    }

    #[test]
    fn overtaking_pair_splits() {
        // Trip 1 departs later at index 0 but arrives earlier at index 1.
        let times = FlatTimes {
            rows: vec![
                vec![(0, 10), (100, 110)],
                vec![(20, 30), (90, 95)],
            ],
        };
        let groups = partition_routes(&[rec(0, &[0, 1]), rec(1, &[0, 1])], &times);
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[0], vec![TripId(0)]);
    }

    #[test]
    fn different_sequences_never_mix() {
        let times = FlatTimes {
            rows: vec![vec![(0, 0), (10, 10)], vec![(0, 0), (10, 10)]],
        };
        let groups = partition_routes(&[rec(0, &[0, 1]), rec(1, &[0, 2])], &times);
        assert_eq!(groups.len(), 2);
    }

    #[test]
    fn covers_all_trips_exactly_once() {
        let times = FlatTimes {
            rows: (0..6i64)
                .map(|t| vec![((t * 7) % 5, (t * 7) % 5 + 1), ((t * 3) % 11 + 10, (t * 3) % 11 + 11)])
                .collect(),
        };
        let recs: Vec<_> = (0..6u32).map(|t| rec(t, &[1, 2])).collect();
        let groups = partition_routes(&recs, &times);
        let mut seen: Vec<TripId> = groups.concat();
        seen.sort();
        assert_eq!(seen, (0..6).map(TripId).collect::<Vec<_>>());
        // exhaustive pairwise FIFO inside each group
        for g in &groups {
            for a in 0..g.len() {
                for b in a + 1..g.len() {
                    assert!(fifo_pair(&times, g[a], g[b], 2));
                }
            }
        }
    }
}
