//! Occupancy, busy-period and idle-period statistics of a state path.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::trajectory::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateOccupancy<T> {
    pub state: u32,
    pub visits: u64,
    pub total_sojourn: T,
    /// `total_sojourn / visits`, or 0 for a state never visited.
    pub mean_sojourn: T,
    /// Fraction of the observation window spent in this state.
    pub pmf: T,
}

/// Per-state visit counts and sojourn times, indexed by state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccupancyStats<T> {
    pub states: Vec<StateOccupancy<T>>,
    pub total_time: T,
    pub mean_in_system: T,
}

impl<T: Real> OccupancyStats<T> {
    fn from_totals(visits: Vec<u64>, totals: Vec<T>) -> Self {
        let total_time = totals.iter().fold(T::zero(), |a, &b| a + b);
        let states: Vec<StateOccupancy<T>> = visits
            .iter()
            .zip(&totals)
            .enumerate()
            .map(|(k, (&v, &t))| StateOccupancy {
                state: k as u32,
                visits: v,
                total_sojourn: t,
                mean_sojourn: if v > 0 { t / T::lit(v as f64) } else { T::zero() },
                pmf: if total_time > T::zero() { t / total_time } else { T::zero() },
            })
            .collect();
        let mean_in_system = states
            .iter()
            .fold(T::zero(), |acc, s| acc + T::lit(f64::from(s.state)) * s.pmf);
        Self {
            states,
            total_time,
            mean_in_system,
        }
    }

    /// Time-weighted pooling: visits and sojourn totals are summed per state.
    pub fn pool<'a, I>(parts: I) -> Self
    where
        I: IntoIterator<Item = &'a OccupancyStats<T>>,
    {
        let mut visits: Vec<u64> = Vec::new();
        let mut totals: Vec<T> = Vec::new();
        for part in parts {
            if part.states.len() > visits.len() {
                visits.resize(part.states.len(), 0);
                totals.resize(part.states.len(), T::zero());
            }
            for s in &part.states {
                visits[s.state as usize] += s.visits;
                totals[s.state as usize] = totals[s.state as usize] + s.total_sojourn;
            }
        }
        Self::from_totals(visits, totals)
    }

    pub fn pmf(&self) -> Vec<T> {
        self.states.iter().map(|s| s.pmf).collect()
    }

    pub fn get(&self, state: u32) -> Option<&StateOccupancy<T>> {
        self.states.get(state as usize)
    }

    /// State with the largest time-weighted probability (lowest on ties).
    pub fn mode(&self) -> u32 {
        let mut best = 0usize;
        for (k, s) in self.states.iter().enumerate() {
            if s.pmf > self.states[best].pmf {
                best = k;
            }
        }
        best as u32
    }
}

/// One busy period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BusyPeriodRecord<T> {
    /// 1-based position in the run.
    pub index: usize,
    pub start: T,
    pub length: T,
    /// Customers who arrived during the period (Y).
    pub customers_served: u64,
    /// Largest number of customers in service at once (X).
    pub max_simultaneous: u32,
    /// The observation window ended before the period did.
    pub censored: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdleStats<T> {
    pub count: u64,
    pub total: T,
    pub mean: T,
}

impl<T: Real> IdleStats<T> {
    pub fn pool<'a, I>(parts: I) -> Self
    where
        I: IntoIterator<Item = &'a IdleStats<T>>,
    {
        let (count, total) = parts
            .into_iter()
            .fold((0u64, T::zero()), |(c, t), p| (c + p.count, t + p.total));
        Self::new(count, total)
    }

    fn new(count: u64, total: T) -> Self {
        let mean = if count > 0 { total / T::lit(count as f64) } else { T::zero() };
        Self { count, total, mean }
    }
}

/// Visits, total and mean sojourn per state, and the time-weighted distribution.
pub fn occupancy<T: Real>(traj: &Trajectory<T>) -> OccupancyStats<T> {
    let n = traj.max_state as usize + 1;
    let mut visits = vec![0u64; n];
    let mut totals = vec![T::zero(); n];
    for seg in &traj.segments {
        let k = seg.state as usize;
        visits[k] += 1;
        totals[k] = totals[k] + seg.duration;
    }
    OccupancyStats::from_totals(visits, totals)
}

/// Splits the path into busy periods (maximal runs with state >= 1) and
/// aggregates the state-0 segments between them as idle periods.
pub fn segment_busy_periods<T: Real>(traj: &Trajectory<T>) -> (Vec<BusyPeriodRecord<T>>, IdleStats<T>) {
    struct Open<T> {
        start: T,
        customers: u64,
        max: u32,
    }

    let mut records = Vec::new();
    let mut idle_count = 0u64;
    let mut idle_total = T::zero();
    let mut open: Option<Open<T>> = None;
    let mut prev = 0u32;

    for seg in &traj.segments {
        if seg.state == 0 {
            if let Some(bp) = open.take() {
                records.push(BusyPeriodRecord {
                    index: records.len() + 1,
                    start: bp.start,
                    length: seg.start - bp.start,
                    customers_served: bp.customers,
                    max_simultaneous: bp.max,
                    censored: false,
                });
            }
            idle_count += 1;
            idle_total = idle_total + seg.duration;
        } else {
            let bp = open.get_or_insert(Open {
                start: seg.start,
                customers: 0,
                max: 0,
            });
            if seg.state > prev {
                bp.customers += 1;
            }
            bp.max = bp.max.max(seg.state);
        }
        prev = seg.state;
    }
    if let Some(bp) = open {
        records.push(BusyPeriodRecord {
            index: records.len() + 1,
            start: bp.start,
            length: traj.end_time - bp.start,
            customers_served: bp.customers,
            max_simultaneous: bp.max,
            censored: traj.final_state > 0,
        });
    }

    (records, IdleStats::new(idle_count, idle_total))
}

pub fn mean_busy_period<T: Real>(records: &[BusyPeriodRecord<T>]) -> Result<T> {
    if records.is_empty() {
        return Err(Error::Empty("busy period records"));
    }
    let total = records.iter().fold(T::zero(), |a, r| a + r.length);
    Ok(total / T::from_count(records.len()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin<T> {
    pub bin_start: T,
    pub count: u64,
}

/// Fixed-width histogram over `[k * width, (k + 1) * width)` bins; only
/// non-empty bins are returned, in increasing order.
pub fn histogram<T: Real>(values: &[T], bin_width: T) -> Result<Vec<HistogramBin<T>>> {
    if !(bin_width > T::zero()) || !bin_width.is_finite() {
        return Err(Error::Domain(format!("histogram bin width must be positive, got {bin_width}")));
    }
    let mut bins: BTreeMap<i64, u64> = BTreeMap::new();
    for &v in values {
        let k = (v / bin_width)
            .floor()
            .to_i64()
            .ok_or_else(|| Error::Domain(format!("value {v} cannot be binned")))?;
        *bins.entry(k).or_default() += 1;
    }
    Ok(bins
        .into_iter()
        .map(|(k, count)| HistogramBin {
            bin_start: T::lit(k as f64) * bin_width,
            count,
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountBin {
    pub value: u64,
    pub count: u64,
}

/// Frequency table of integer observations, sorted by value.
pub fn value_counts<I: IntoIterator<Item = u64>>(values: I) -> Vec<CountBin> {
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for v in values {
        *counts.entry(v).or_default() += 1;
    }
    counts.into_iter().map(|(value, count)| CountBin { value, count }).collect()
}
