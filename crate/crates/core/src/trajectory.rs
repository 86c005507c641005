//! Departures, the merged ±1 event stream, and the piecewise-constant state path.

use std::cmp::Ordering;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mark {
    Arrival,
    Departure,
}

impl Mark {
    /// `+1` for an arrival, `-1` for a departure.
    pub fn delta(self) -> i64 {
        match self {
            Mark::Arrival => 1,
            Mark::Departure => -1,
        }
    }

    // departures sort first on equal timestamps
    fn rank(self) -> u8 {
        match self {
            Mark::Departure => 0,
            Mark::Arrival => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event<T> {
    pub time: T,
    pub mark: Mark,
}

/// Time-ordered arrival/departure marks for `n_arrivals` customers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventStream<T> {
    pub events: Vec<Event<T>>,
    pub n_arrivals: usize,
}

impl<T: Real> EventStream<T> {
    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Writes `timestamp,mark,state` rows, one per event.
    pub fn write_trace<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "timestamp,mark,state")?;
        let mut state = 0i64;
        for e in &self.events {
            state += e.mark.delta();
            writeln!(out, "{},{},{}", e.time, e.mark.delta(), state)?;
        }
        Ok(())
    }
}

/// One constant-state piece of the path: state `state` on `[start, start + duration)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment<T> {
    pub state: u32,
    pub start: T,
    pub duration: T,
}

/// Piecewise-constant number-in-system path N(t) over `[start_time, end_time]`.
///
/// There is one segment between each pair of consecutive events. `final_state`
/// is the state after the last event, which is 0 for a complete run and may be
/// positive for a window cut short by [`Trajectory::truncate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory<T> {
    pub segments: Vec<Segment<T>>,
    pub start_time: T,
    pub end_time: T,
    pub final_state: u32,
    pub max_state: u32,
}

impl<T: Real> Trajectory<T> {
    pub fn window(&self) -> T {
        self.end_time - self.start_time
    }

    /// Restricts the path to `[start_time, until]`. The busy period open at
    /// `until`, if any, becomes censored.
    pub fn truncate(&self, until: T) -> Trajectory<T> {
        if until >= self.end_time {
            return self.clone();
        }
        let until = until.max(self.start_time);
        let mut segments = Vec::new();
        for seg in &self.segments {
            if seg.start >= until && !segments.is_empty() {
                break;
            }
            let end = seg.start + seg.duration;
            let duration = if end > until { until - seg.start } else { seg.duration };
            segments.push(Segment { duration: duration.max(T::zero()), ..*seg });
            if end > until {
                break;
            }
        }
        let final_state = segments.last().map_or(0, |s| s.state);
        let max_state = segments.iter().map(|s| s.state).max().unwrap_or(0);
        Trajectory {
            segments,
            start_time: self.start_time,
            end_time: until,
            final_state,
            max_state,
        }
    }
}

/// Arrival instants as the running sum of inter-arrival gaps.
pub fn cumulate_arrivals<T: Real>(gaps: &[T]) -> Vec<T> {
    gaps.iter()
        .scan(T::zero(), |clock, &g| {
            *clock = *clock + g;
            Some(*clock)
        })
        .collect()
}

/// Departure instants `arrival + service`, element-wise.
///
/// If rounding makes a sum collapse onto its arrival instant, the departure is
/// moved to the next value above it so every customer stays a positive time.
pub fn build_departures<T: Real>(arrivals: &[T], services: &[T]) -> Result<Vec<T>> {
    if arrivals.len() != services.len() {
        return Err(Error::LengthMismatch {
            left: arrivals.len(),
            right: services.len(),
        });
    }
    arrivals
        .iter()
        .zip(services)
        .enumerate()
        .map(|(index, (&a, &s))| {
            if !(s > T::zero()) || !s.is_finite() {
                return Err(Error::NonPositiveService {
                    index,
                    value: s.to_f64().unwrap_or(f64::NAN),
                });
            }
            let d = a + s;
            Ok(if d > a {
                d
            } else {
                a + (a.abs() * T::epsilon()).max(T::min_positive_value())
            })
        })
        .collect()
}

fn event_order<T: Real>(a: &Event<T>, b: &Event<T>) -> Ordering {
    a.time
        .partial_cmp(&b.time)
        .unwrap_or(Ordering::Equal)
        .then(a.mark.rank().cmp(&b.mark.rank()))
}

/// Merges arrival and departure instants into one time-ordered stream.
/// At equal timestamps departures come before arrivals.
pub fn merge_events<T: Real>(arrivals: &[T], departures: &[T]) -> EventStream<T> {
    let mut events: Vec<Event<T>> = arrivals
        .iter()
        .map(|&time| Event { time, mark: Mark::Arrival })
        .chain(departures.iter().map(|&time| Event { time, mark: Mark::Departure }))
        .collect();
    events.sort_by(event_order);
    EventStream {
        events,
        n_arrivals: arrivals.len(),
    }
}

/// Running sum of the marks, one segment per inter-event gap.
pub fn build_trajectory<T: Real>(stream: &EventStream<T>) -> Result<Trajectory<T>> {
    let events = &stream.events;
    let first = events.first().ok_or(Error::Empty("event stream"))?;
    let last = events.last().expect("non-empty");

    let mut segments = Vec::with_capacity(events.len().saturating_sub(1));
    let mut state = 0i64;
    let mut max_state = 0u32;
    for (index, pair) in events.windows(2).enumerate() {
        state += pair[0].mark.delta();
        if state < 0 {
            return Err(Error::NegativeState { index });
        }
        let s = state as u32;
        max_state = max_state.max(s);
        segments.push(Segment {
            state: s,
            start: pair[0].time,
            duration: pair[1].time - pair[0].time,
        });
    }
    state += last.mark.delta();
    if state < 0 {
        return Err(Error::NegativeState { index: events.len() - 1 });
    }
    if events.len() == 1 {
        max_state = state as u32;
    }
    Ok(Trajectory {
        segments,
        start_time: first.time,
        end_time: last.time,
        final_state: state as u32,
        max_state,
    })
}
