//! Loading and saving the network interchange format: a directory with
//! three (optionally four) comma-separated tables.
//!
//! `stops`      stop_id,vertex_id,name
//! `trips`      trip_id,seq,stop_id,arr_seconds,dep_seconds
//! `transfers`  from_vertex,to_vertex,travel_seconds
//! `vertices`   vertex_id            (optional, for non-stop vertices)

use super::partition::{partition_routes, TripRecord, TripTimes};
use super::{Network, Route, StopEvent, TransferGraph, Trip};
use crate::types::*;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum NetworkIoError {
    #[error("io error on {file}: {source}")]
    Io {
        file: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}:{line}: malformed record: {msg}")]
    Parse { file: String, line: usize, msg: String },
    #[error("integrity error: {0}")]
    Integrity(String),
    #[error("ordering error: {0}")]
    Ordering(String),
}

fn read_table(dir: &Path, name: &str) -> Result<Option<Vec<(usize, String)>>, NetworkIoError> {
    let path = dir.join(name);
    if !path.exists() {
        return Ok(None);
    }
    let text = std::fs::read_to_string(&path).map_err(|source| NetworkIoError::Io {
        file: name.to_string(),
        source,
    })?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            continue; // header row, required
        }
        if line.trim().is_empty() {
            continue;
        }
        rows.push((i + 1, line.to_string()));
    }
    if text.lines().next().is_none() {
        return Err(NetworkIoError::Parse {
            file: name.to_string(),
            line: 1,
            msg: "missing header row".to_string(),
        });
    }
    Ok(Some(rows))
}

fn parse_int<T: std::str::FromStr>(file: &str, line: usize, field: &str, s: &str) -> Result<T, NetworkIoError> {
    s.trim().parse().map_err(|_| NetworkIoError::Parse {
        file: file.to_string(),
        line,
        msg: format!("invalid integer in field {field}: {s:?}"),
    })
}

struct RawTrip {
    stops: Vec<StopId>,
    times: Vec<(Time, Time)>,
}

struct RawTimes<'a>(&'a [RawTrip]);

impl TripTimes for RawTimes<'_> {
    fn arrival(&self, trip: TripId, index: usize) -> Time {
        self.0[trip.idx()].times[index].0
    }
    fn departure(&self, trip: TripId, index: usize) -> Time {
        self.0[trip.idx()].times[index].1
    }
}

/// Loads a network directory. Every scheduled departure is reduced by
/// `buffer_time` (floored at the arrival), then trips are partitioned into
/// FIFO routes and renumbered so that ids are consecutive per route/trip.
pub fn load_network(dir: impl AsRef<Path>, buffer_time: Time) -> Result<Network, NetworkIoError> {
    let dir = dir.as_ref();

    // stops
    let stop_rows = read_table(dir, "stops")?.ok_or_else(|| NetworkIoError::Io {
        file: "stops".to_string(),
        source: std::io::Error::new(std::io::ErrorKind::NotFound, "missing table"),
    })?;
    let mut stops: Vec<(u32, u32, String)> = Vec::new();
    for (line, row) in &stop_rows {
        let mut parts = row.splitn(3, ',');
        let stop_id: u32 = parse_int("stops", *line, "stop_id", parts.next().unwrap_or(""))?;
        let vertex_id: u32 =
            parse_int("stops", *line, "vertex_id", parts.next().ok_or_else(|| NetworkIoError::Parse {
                file: "stops".to_string(),
                line: *line,
                msg: "expected stop_id,vertex_id,name".to_string(),
            })?)?;
        let name = parts.next().unwrap_or("").to_string();
        stops.push((stop_id, vertex_id, name));
    }
    stops.sort_by_key(|s| s.0);
    let num_stops = stops.len();
    let mut stop_names = vec![String::new(); num_stops];
    for (i, (stop_id, vertex_id, name)) in stops.into_iter().enumerate() {
        if stop_id as usize != i || vertex_id != stop_id {
            return Err(NetworkIoError::Integrity(format!(
                "stops must occupy vertex ids 0..{num_stops} densely; found stop_id={stop_id}, vertex_id={vertex_id}"
            )));
        }
        stop_names[i] = name;
    }

    // optional extra vertices
    let mut num_vertices = num_stops;
    if let Some(rows) = read_table(dir, "vertices")? {
        for (line, row) in &rows {
            let v: u32 = parse_int("vertices", *line, "vertex_id", row.split(',').next().unwrap_or(""))?;
            num_vertices = num_vertices.max(v as usize + 1);
        }
    }

    // transfers
    let mut edges: Vec<(VertexId, VertexId, Time)> = Vec::new();
    if let Some(rows) = read_table(dir, "transfers")? {
        for (line, row) in &rows {
            let fields: Vec<&str> = row.split(',').collect();
            if fields.len() != 3 {
                return Err(NetworkIoError::Parse {
                    file: "transfers".to_string(),
                    line: *line,
                    msg: "expected from_vertex,to_vertex,travel_seconds".to_string(),
                });
            }
            let from: u32 = parse_int("transfers", *line, "from_vertex", fields[0])?;
            let to: u32 = parse_int("transfers", *line, "to_vertex", fields[1])?;
            let tt: Time = parse_int("transfers", *line, "travel_seconds", fields[2])?;
            if tt <= 0 {
                return Err(NetworkIoError::Integrity(format!(
                    "transfer time must be strictly positive, got {tt} at transfers:{line}"
                )));
            }
            num_vertices = num_vertices.max(from as usize + 1).max(to as usize + 1);
            edges.push((VertexId(from), VertexId(to), tt));
        }
    }

    // trips
    let trip_rows = read_table(dir, "trips")?.ok_or_else(|| NetworkIoError::Io {
        file: "trips".to_string(),
        source: std::io::Error::new(std::io::ErrorKind::NotFound, "missing table"),
    })?;
    let mut order: Vec<u64> = Vec::new();
    let mut by_id: HashMap<u64, Vec<(u32, StopId, Time, Time)>> = HashMap::new();
    for (line, row) in &trip_rows {
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != 5 {
            return Err(NetworkIoError::Parse {
                file: "trips".to_string(),
                line: *line,
                msg: "expected trip_id,seq,stop_id,arr_seconds,dep_seconds".to_string(),
            });
        }
        let trip_id: u64 = parse_int("trips", *line, "trip_id", fields[0])?;
        let seq: u32 = parse_int("trips", *line, "seq", fields[1])?;
        let stop: u32 = parse_int("trips", *line, "stop_id", fields[2])?;
        let arr: Time = parse_int("trips", *line, "arr_seconds", fields[3])?;
        let dep: Time = parse_int("trips", *line, "dep_seconds", fields[4])?;
        if stop as usize >= num_stops {
            return Err(NetworkIoError::Integrity(format!(
                "trips:{line}: dangling stop id {stop} (only {num_stops} stops)"
            )));
        }
        by_id.entry(trip_id).or_insert_with(|| {
            order.push(trip_id);
            Vec::new()
        });
        by_id.get_mut(&trip_id).unwrap().push((seq, StopId(stop), arr, dep));
    }

    let mut raw_trips: Vec<RawTrip> = Vec::with_capacity(order.len());
    for input_id in order {
        let mut rows = by_id.remove(&input_id).unwrap();
        rows.sort_by_key(|r| r.0);
        if rows.len() < 2 {
            return Err(NetworkIoError::Integrity(format!(
                "trip {input_id} has {} events; at least 2 required",
                rows.len()
            )));
        }
        for (k, r) in rows.iter().enumerate() {
            if r.0 as usize != k {
                return Err(NetworkIoError::Integrity(format!(
                    "trip {input_id}: seq values must be 0..{} without gaps",
                    rows.len() - 1
                )));
            }
        }
        let mut stops = Vec::with_capacity(rows.len());
        let mut times = Vec::with_capacity(rows.len());
        let mut prev_dep: Option<Time> = None;
        for (seq, stop, arr, dep) in rows {
            if dep < arr {
                return Err(NetworkIoError::Ordering(format!(
                    "trip {input_id} seq {seq}: departure {dep} before arrival {arr}"
                )));
            }
            if let Some(p) = prev_dep {
                if arr < p {
                    return Err(NetworkIoError::Ordering(format!(
                        "trip {input_id} seq {seq}: arrival {arr} before previous departure {p}"
                    )));
                }
            }
            prev_dep = Some(dep);
            stops.push(stop);
            // departure buffer, floored at the arrival
            times.push((arr, (dep - buffer_time).max(arr)));
        }
        raw_trips.push(RawTrip { stops, times });
    }

    let records: Vec<TripRecord> = raw_trips
        .iter()
        .enumerate()
        .map(|(i, t)| TripRecord {
            trip: TripId::new(i),
            stops: t.stops.clone(),
        })
        .collect();
    let groups = partition_routes(&records, &RawTimes(&raw_trips));

    build_network(num_stops, stop_names, num_vertices, edges, raw_trips, groups)
}

fn build_network(
    num_stops: usize,
    stop_names: Vec<String>,
    num_vertices: usize,
    edges: Vec<(VertexId, VertexId, Time)>,
    raw_trips: Vec<RawTrip>,
    groups: Vec<Vec<TripId>>,
) -> Result<Network, NetworkIoError> {
    let mut events = Vec::new();
    let mut trips = Vec::new();
    let mut routes = Vec::new();
    for group in &groups {
        let first = &raw_trips[group[0].idx()];
        let route_id = RouteId::new(routes.len());
        let first_trip = TripId::new(trips.len());
        for &old in group {
            let raw = &raw_trips[old.idx()];
            let trip_id = TripId::new(trips.len());
            let first_event = EventId::new(events.len());
            for (k, (&stop, &(arr, dep))) in raw.stops.iter().zip(raw.times.iter()).enumerate() {
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
                num_events: raw.stops.len() as u32,
                route: route_id,
            });
        }
        routes.push(Route {
            stop_sequence: first.stops.clone(),
            first_trip,
            num_trips: group.len() as u32,
        });
    }

    // identical-stop-sequence trip groups, in route order
    let mut stop_sequence_groups: Vec<Vec<TripId>> = Vec::new();
    let mut seq_index: Vec<&[StopId]> = Vec::new();
    for route in &routes {
        let pos = seq_index.iter().position(|s| *s == route.stop_sequence.as_slice());
        let k = match pos {
            Some(k) => k,
            None => {
                seq_index.push(&route.stop_sequence);
                stop_sequence_groups.push(Vec::new());
                seq_index.len() - 1
            }
        };
        stop_sequence_groups[k].extend(route.trips());
    }

    Ok(Network {
        num_stops,
        stop_names,
        events,
        trips,
        routes,
        transfers: TransferGraph::new(num_vertices, &edges),
        stop_sequence_groups,
    })
}

/// Writes `net` as a network directory; `load_network(dir, 0)` restores it.
pub fn save_network(net: &Network, dir: impl AsRef<Path>) -> Result<(), NetworkIoError> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|source| NetworkIoError::Io {
        file: dir.display().to_string(),
        source,
    })?;
    let write = |name: &str, content: String| -> Result<(), NetworkIoError> {
        std::fs::write(dir.join(name), content).map_err(|source| NetworkIoError::Io {
            file: name.to_string(),
            source,
        })
    };

    let mut s = String::from("stop_id,vertex_id,name\n");
    for i in 0..net.num_stops {
        let name = net.stop_names[i].replace(',', ";");
        let _ = writeln!(s, "{i},{i},{name}");
    }
    write("stops", s)?;

    let mut s = String::from("trip_id,seq,stop_id,arr_seconds,dep_seconds\n");
    for (ti, trip) in net.trips.iter().enumerate() {
        for k in 0..trip.len() {
            let ev = net.event(trip.event(k));
            let _ = writeln!(
                s,
                "{ti},{k},{},{},{}",
                ev.stop, ev.scheduled_arrival, ev.scheduled_departure
            );
        }
    }
    write("trips", s)?;

    let mut s = String::from("from_vertex,to_vertex,travel_seconds\n");
    for (from, to, tt) in net.transfers.edge_list() {
        let _ = writeln!(s, "{from},{to},{tt}");
    }
    write("transfers", s)?;

    if net.num_vertices() > net.num_stops {
        let mut s = String::from("vertex_id\n");
        for v in net.num_stops..net.num_vertices() {
            let _ = writeln!(s, "{v}");
        }
        write("vertices", s)?;
    }
    Ok(())
}
