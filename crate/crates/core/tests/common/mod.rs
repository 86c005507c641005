//! Brute-force reference computations taken straight from (arrival, departure)
//! pairs, without sorting events or integrating marks.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

pub struct Instance {
    pub arrivals: Vec<f64>,
    pub services: Vec<f64>,
    pub departures: Vec<f64>,
}

/// Random instance with 1..=20 customers and continuous (tie-free) times.
pub fn random_instance(seed: u64) -> Instance {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=20);
    let mean_gap = rng.gen_range(0.2..3.0);
    let mean_service = rng.gen_range(0.2..6.0);
    let mut clock = 0.0;
    let mut arrivals = Vec::with_capacity(n);
    let mut services = Vec::with_capacity(n);
    for _ in 0..n {
        let u: f64 = rng.gen_range(f64::EPSILON..1.0);
        clock += -mean_gap * u.ln();
        arrivals.push(clock);
        let v: f64 = rng.gen_range(f64::EPSILON..1.0);
        services.push(-mean_service * v.ln());
    }
    let departures = arrivals.iter().zip(&services).map(|(a, s)| a + s).collect();
    Instance {
        arrivals,
        services,
        departures,
    }
}

pub fn state_at(inst: &Instance, t: f64) -> u32 {
    inst.arrivals
        .iter()
        .zip(&inst.departures)
        .filter(|(&a, &d)| a <= t && t < d)
        .count() as u32
}

/// Sorted distinct event instants.
pub fn instants(inst: &Instance) -> Vec<f64> {
    let mut ts: Vec<f64> = inst.arrivals.iter().chain(&inst.departures).copied().collect();
    ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ts.dedup();
    ts
}

/// `(state, start, duration)` of every elementary interval between instants.
pub fn elementary_segments(inst: &Instance) -> Vec<(u32, f64, f64)> {
    let ts = instants(inst);
    ts.windows(2).map(|w| (state_at(inst, w[0]), w[0], w[1] - w[0])).collect()
}

pub struct OracleOccupancy {
    pub visits: Vec<u64>,
    pub totals: Vec<f64>,
}

pub fn occupancy(inst: &Instance) -> OracleOccupancy {
    let segs = elementary_segments(inst);
    let max = segs.iter().map(|s| s.0).max().unwrap_or(0) as usize;
    let mut visits = vec![0; max + 1];
    let mut totals = vec![0.0; max + 1];
    for (k, _, d) in segs {
        visits[k as usize] += 1;
        totals[k as usize] += d;
    }
    OracleOccupancy { visits, totals }
}

#[derive(Debug, PartialEq)]
pub struct OracleBusyPeriod {
    pub start: f64,
    pub length: f64,
    pub customers: u64,
    pub max_simultaneous: u32,
}

/// Busy periods as connected components of the customers' service intervals.
/// An arrival exactly at a departure instant starts a new component.
pub fn busy_periods(inst: &Instance) -> (Vec<OracleBusyPeriod>, u64, f64) {
    let mut order: Vec<usize> = (0..inst.arrivals.len()).collect();
    order.sort_by(|&i, &j| inst.arrivals[i].partial_cmp(&inst.arrivals[j]).unwrap());

    let mut components: Vec<Vec<usize>> = Vec::new();
    let mut reach = f64::NEG_INFINITY;
    for i in order {
        if inst.arrivals[i] < reach {
            components.last_mut().unwrap().push(i);
            reach = reach.max(inst.departures[i]);
        } else {
            components.push(vec![i]);
            reach = inst.departures[i];
        }
    }

    let mut out = Vec::new();
    let mut idle_count = 0;
    let mut idle_total = 0.0;
    let mut prev_end: Option<f64> = None;
    for c in &components {
        let start = c.iter().map(|&i| inst.arrivals[i]).fold(f64::INFINITY, f64::min);
        let end = c.iter().map(|&i| inst.departures[i]).fold(f64::NEG_INFINITY, f64::max);
        let peak = c.iter().map(|&i| state_at(inst, inst.arrivals[i])).max().unwrap();
        if let Some(e) = prev_end {
            idle_count += 1;
            idle_total += start - e;
        }
        prev_end = Some(end);
        out.push(OracleBusyPeriod {
            start,
            length: end - start,
            customers: c.len() as u64,
            max_simultaneous: peak,
        });
    }
    (out, idle_count, idle_total)
}

/// Runs the library pipeline on instance `seed` and compares trajectory,
/// occupancy and busy-period metrics against the brute-force computations.
pub fn check_instance(seed: u64) -> Result<(), String> {
    use gginf_core::{build_departures, build_trajectory, merge_events, occupancy as lib_occupancy, segment_busy_periods};

    let inst = random_instance(seed);
    let departures = build_departures(&inst.arrivals, &inst.services).map_err(|e| e.to_string())?;
    if departures != inst.departures {
        return Err(format!("seed {seed}: departures differ"));
    }
    let traj = build_trajectory(&merge_events(&inst.arrivals, &departures)).map_err(|e| e.to_string())?;

    let expected = elementary_segments(&inst);
    let got: Vec<(u32, f64, f64)> = traj.segments.iter().map(|s| (s.state, s.start, s.duration)).collect();
    if got != expected {
        return Err(format!("seed {seed}: segments {got:?} != {expected:?}"));
    }
    if traj.final_state != 0 {
        return Err(format!("seed {seed}: final state {}", traj.final_state));
    }
    // dense grid over the window, including the instants themselves
    let ts = instants(&inst);
    for w in ts.windows(2) {
        for frac in [0.0, 0.25, 0.5, 0.75] {
            let t = w[0] + frac * (w[1] - w[0]);
            let seg = traj
                .segments
                .iter()
                .rev()
                .find(|s| s.start <= t)
                .ok_or_else(|| format!("seed {seed}: no segment at {t}"))?;
            if seg.state != state_at(&inst, t) {
                return Err(format!("seed {seed}: state at {t}"));
            }
        }
    }

    let occ = lib_occupancy(&traj);
    let oracle = occupancy(&inst);
    let visits: Vec<u64> = occ.states.iter().map(|s| s.visits).collect();
    let totals: Vec<f64> = occ.states.iter().map(|s| s.total_sojourn).collect();
    if visits != oracle.visits || totals != oracle.totals {
        return Err(format!("seed {seed}: occupancy {visits:?}/{totals:?} != {:?}/{:?}", oracle.visits, oracle.totals));
    }
    let window: f64 = oracle.totals.iter().sum();
    for (s, &t) in occ.states.iter().zip(&oracle.totals) {
        let pmf = t / window;
        if (s.pmf - pmf).abs() > 1e-12 {
            return Err(format!("seed {seed}: pmf of state {}", s.state));
        }
        let mean = if s.visits > 0 { t / s.visits as f64 } else { 0.0 };
        if s.mean_sojourn != mean {
            return Err(format!("seed {seed}: mean sojourn of state {}", s.state));
        }
    }

    let (records, idle) = segment_busy_periods(&traj);
    let (bps, idle_count, idle_total) = busy_periods(&inst);
    let got: Vec<OracleBusyPeriod> = records
        .iter()
        .map(|r| OracleBusyPeriod {
            start: r.start,
            length: r.length,
            customers: r.customers_served,
            max_simultaneous: r.max_simultaneous,
        })
        .collect();
    if got != bps {
        return Err(format!("seed {seed}: busy periods {got:?} != {bps:?}"));
    }
    if records.iter().any(|r| r.censored) {
        return Err(format!("seed {seed}: complete run has a censored period"));
    }
    if idle.count != idle_count || idle.total != idle_total {
        return Err(format!("seed {seed}: idle ({}, {}) != ({idle_count}, {idle_total})", idle.count, idle.total));
    }
    Ok(())
}
