//! Programmatic network construction (tests, generators).

use super::partition::{partition_routes, TripRecord, TripTimes};
use super::{Network, Route, StopEvent, TransferGraph, Trip};
use crate::types::*;

#[derive(Default)]
pub struct NetworkBuilder {
    num_stops: usize,
    num_extra_vertices: usize,
    edges: Vec<(VertexId, VertexId, Time)>,
    trips: Vec<(Vec<StopId>, Vec<(Time, Time)>)>,
}

struct BuilderTimes<'a>(&'a [(Vec<StopId>, Vec<(Time, Time)>)]);

impl TripTimes for BuilderTimes<'_> {
    fn arrival(&self, trip: TripId, index: usize) -> Time {
        self.0[trip.idx()].1[index].0
    }
    fn departure(&self, trip: TripId, index: usize) -> Time {
        self.0[trip.idx()].1[index].1
    }
}

impl NetworkBuilder {
    pub fn new(num_stops: usize) -> Self {
        NetworkBuilder {
            num_stops,
            ..Default::default()
        }
    }

    pub fn extra_vertices(mut self, n: usize) -> Self {
        self.num_extra_vertices = n;
        self
    }

    pub fn edge(mut self, from: usize, to: usize, transfer_time: Time) -> Self {
        self.edges.push((VertexId::new(from), VertexId::new(to), transfer_time));
        self
    }

    pub fn add_edge(&mut self, from: usize, to: usize, transfer_time: Time) {
        self.edges.push((VertexId::new(from), VertexId::new(to), transfer_time));
    }

    /// Adds a trip visiting `stops` with per-stop (arrival, departure) times.
    pub fn trip(mut self, stops: &[usize], times: &[(Time, Time)]) -> Self {
        self.add_trip(stops, times);
        self
    }

    pub fn add_trip(&mut self, stops: &[usize], times: &[(Time, Time)]) {
        assert_eq!(stops.len(), times.len());
        assert!(stops.len() >= 2, "trips need at least two events");
        assert!(stops.iter().all(|&s| s < self.num_stops));
        self.trips
            .push((stops.iter().map(|&s| StopId::new(s)).collect(), times.to_vec()));
    }

    pub fn build(self) -> Network {
        let records: Vec<TripRecord> = self
            .trips
            .iter()
            .enumerate()
            .map(|(i, (stops, _))| TripRecord {
                trip: TripId::new(i),
                stops: stops.clone(),
            })
            .collect();
        let groups = partition_routes(&records, &BuilderTimes(&self.trips));

        let mut events = Vec::new();
        let mut trips = Vec::new();
        let mut routes = Vec::new();
        for group in &groups {
            let route_id = RouteId::new(routes.len());
            let first_trip = TripId::new(trips.len());
            for &old in group {
                let (stops, times) = &self.trips[old.idx()];
                let trip_id = TripId::new(trips.len());
                let first_event = EventId::new(events.len());
                for (k, (&stop, &(arr, dep))) in stops.iter().zip(times.iter()).enumerate() {
                    assert!(arr <= dep, "arrival after departure within an event");
                    events.push(StopEvent {
                        stop,
                        scheduled_arrival: arr,
                        scheduled_departure: dep,
                        trip: trip_id,
                        index_in_trip: k as u32,
                    });
                }
                trips.push(Trip {
                    first_event,
                    num_events: stops.len() as u32,
                    route: route_id,
                });
            }
            routes.push(Route {
                stop_sequence: self.trips[group[0].idx()].0.clone(),
                first_trip,
                num_trips: group.len() as u32,
            });
        }

        let mut stop_sequence_groups: Vec<Vec<TripId>> = Vec::new();
        let mut seqs: Vec<Vec<StopId>> = Vec::new();
        for route in &routes {
            let k = match seqs.iter().position(|s| *s == route.stop_sequence) {
                Some(k) => k,
                None => {
                    seqs.push(route.stop_sequence.clone());
                    stop_sequence_groups.push(Vec::new());
                    seqs.len() - 1
                }
            };
            stop_sequence_groups[k].extend(route.trips());
        }

        Network {
            num_stops: self.num_stops,
            stop_names: (0..self.num_stops).map(|i| format!("stop{i}")).collect(),
            events,
            trips,
            routes,
            transfers: TransferGraph::new(self.num_stops + self.num_extra_vertices, &self.edges),
            stop_sequence_groups,
        }
    }
}
