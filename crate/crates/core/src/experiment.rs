//! End-to-end pipeline: generate, merge, build the path, measure, compare to
//! theory, and pool replications into a report.

use log::{debug, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::SimulationConfig;
use crate::error::{Error, Result};
use crate::metrics::{
    histogram, mean_busy_period, occupancy, segment_busy_periods, value_counts, BusyPeriodRecord, CountBin,
    HistogramBin, IdleStats, OccupancyStats,
};
use crate::rng::SeedPlan;
use crate::sampling::{generate_interarrivals, generate_service_times, ArrivalLaw, ServiceLaw};
use crate::scalar::Real;
use crate::theory::{
    compare_distributions, fit_regression, mginf_mean_busy_period, DistributionComparison, RegressionResult,
    TheoreticalOccupancy,
};
use crate::trajectory::{build_departures, build_trajectory, cumulate_arrivals, merge_events, EventStream, Trajectory};

/// Everything one replication produces before summarising.
#[derive(Debug, Clone)]
pub struct SimulationRun<T> {
    pub arrivals: Vec<T>,
    pub departures: Vec<T>,
    pub events: EventStream<T>,
    pub trajectory: Trajectory<T>,
}

/// Runs one replication of the pipeline at scalar precision `T`.
pub fn simulate<T: Real>(
    arrival_law: &ArrivalLaw<T>,
    service_law: &ServiceLaw<T>,
    n_arrivals: usize,
    seeds: &SeedPlan,
    replication: usize,
) -> Result<SimulationRun<T>> {
    let gaps = generate_interarrivals(arrival_law, n_arrivals, seeds, replication)?;
    let services = generate_service_times(service_law, n_arrivals, seeds, replication)?;
    let arrivals = cumulate_arrivals(&gaps);
    let departures = build_departures(&arrivals, &services)?;
    let events = merge_events(&arrivals, &departures);
    let trajectory = build_trajectory(&events)?;
    Ok(SimulationRun {
        arrivals,
        departures,
        events,
        trajectory,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BusySummary {
    pub count: usize,
    pub mean_length: f64,
    pub max_simultaneous: u32,
    pub length_histogram: Vec<HistogramBin<f64>>,
    /// Distribution of X, the per-period peak occupancy.
    pub x_distribution: Vec<CountBin>,
    /// Distribution of Y, the per-period customer count.
    pub y_distribution: Vec<CountBin>,
}

impl BusySummary {
    fn from_records<'a, I>(records: I, bin_width: f64) -> Result<Self>
    where
        I: IntoIterator<Item = &'a BusyPeriodRecord<f64>> + Clone,
    {
        let all: Vec<&BusyPeriodRecord<f64>> = records.into_iter().collect();
        let lengths: Vec<f64> = all.iter().map(|r| r.length).collect();
        let owned: Vec<BusyPeriodRecord<f64>> = all.iter().map(|r| **r).collect();
        Ok(Self {
            count: all.len(),
            mean_length: mean_busy_period(&owned)?,
            max_simultaneous: all.iter().map(|r| r.max_simultaneous).max().unwrap_or(0),
            length_histogram: histogram(&lengths, bin_width)?,
            x_distribution: value_counts(all.iter().map(|r| u64::from(r.max_simultaneous))),
            y_distribution: value_counts(all.iter().map(|r| r.customers_served)),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationReport {
    pub index: usize,
    pub salt: u64,
    pub window: f64,
    pub occupancy: OccupancyStats<f64>,
    pub idle: IdleStats<f64>,
    pub busy: BusySummary,
    pub regression: Option<RegressionResult<f64>>,
    pub records: Vec<BusyPeriodRecord<f64>>,
}

/// Empirical results set against the closed forms.
///
/// The Poisson law and the busy/idle means hold for Poisson arrivals
/// (M/G/∞); the per-state mean sojourn only for M/M/∞. Fields that do not
/// apply to the simulated system are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryComparison {
    pub rho: f64,
    pub closed_form: bool,
    pub poisson_pmf: Vec<f64>,
    pub distribution: DistributionComparison<f64>,
    pub empirical_mode: u32,
    pub theoretical_mode: u32,
    pub mean_sojourn: Option<Vec<f64>>,
    pub expected_idle_mean: Option<f64>,
    pub expected_busy_mean: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PooledReport {
    pub occupancy: OccupancyStats<f64>,
    pub idle: IdleStats<f64>,
    pub busy: BusySummary,
    pub regression: Option<RegressionResult<f64>>,
    pub theory: TheoryComparison,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub label: String,
    pub rho: f64,
    pub config: SimulationConfig,
    pub replications: Vec<ReplicationReport>,
    pub pooled: PooledReport,
}

impl ExperimentReport {
    pub fn busy_period_counts(&self) -> Vec<usize> {
        self.replications.iter().map(|r| r.busy.count).collect()
    }

    pub fn all_records(&self) -> impl Iterator<Item = &BusyPeriodRecord<f64>> + Clone {
        self.replications.iter().flat_map(|r| r.records.iter())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

fn regress(records: &[&BusyPeriodRecord<f64>]) -> Option<RegressionResult<f64>> {
    let xs: Vec<f64> = records.iter().map(|r| f64::from(r.max_simultaneous)).collect();
    let ys: Vec<f64> = records.iter().map(|r| r.customers_served as f64).collect();
    match fit_regression(&xs, &ys) {
        Ok(r) => Some(r),
        Err(e) => {
            debug!("regression skipped: {e}");
            None
        }
    }
}

fn run_replication(config: &SimulationConfig, index: usize) -> Result<ReplicationReport> {
    let run = simulate(
        &config.arrival_law,
        &config.service_law,
        config.n_arrivals,
        &config.seeds,
        index,
    )?;
    let traj = &run.trajectory;
    let (records, idle) = segment_busy_periods(traj);
    let refs: Vec<&BusyPeriodRecord<f64>> = records.iter().collect();
    Ok(ReplicationReport {
        index,
        salt: config.seeds.replication_salt(index),
        window: traj.window(),
        occupancy: occupancy(traj),
        idle,
        busy: BusySummary::from_records(refs.iter().copied(), config.histogram_bin_width)?,
        regression: regress(&refs),
        records,
    })
}

fn theory_comparison(config: &SimulationConfig, occ: &OccupancyStats<f64>) -> TheoryComparison {
    let rho = config.rho();
    let poisson_arrivals = config.arrival_law.is_poisson();
    let table = TheoreticalOccupancy::new(
        config.service_law.mean_service,
        rho,
        occ.states.len().saturating_sub(1) as u32,
    );
    let sample_size: u64 = occ.states.iter().map(|s| s.visits).sum();
    let distribution = compare_distributions(&occ.pmf(), &table.pmf, sample_size as f64);
    let mm = poisson_arrivals && config.service_law.is_exponential();
    TheoryComparison {
        rho,
        closed_form: poisson_arrivals,
        empirical_mode: occ.mode(),
        theoretical_mode: table.mode(),
        distribution,
        mean_sojourn: mm.then(|| table.mean_sojourn.clone()),
        expected_idle_mean: poisson_arrivals.then_some(config.arrival_law.mean_interarrival),
        expected_busy_mean: poisson_arrivals
            .then(|| mginf_mean_busy_period(config.arrival_law.mean_interarrival, rho)),
        poisson_pmf: table.pmf,
    }
}

/// Validates `config`, runs every replication (in parallel), and pools them.
pub fn run_experiment(config: &SimulationConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let replications: Vec<ReplicationReport> = (0..config.replications)
        .into_par_iter()
        .map(|i| run_replication(config, i))
        .collect::<Result<_>>()?;

    let occupancy = OccupancyStats::pool(replications.iter().map(|r| &r.occupancy));
    let idle = IdleStats::pool(replications.iter().map(|r| &r.idle));
    let records: Vec<&BusyPeriodRecord<f64>> = replications.iter().flat_map(|r| r.records.iter()).collect();
    let busy = BusySummary::from_records(records.iter().copied(), config.histogram_bin_width)?;
    let regression = regress(&records);
    let theory = theory_comparison(config, &occupancy);

    Ok(ExperimentReport {
        label: config.label(),
        rho: config.rho(),
        config: config.clone(),
        replications,
        pooled: PooledReport {
            occupancy,
            idle,
            busy,
            regression,
            theory,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub label: String,
    pub rho: f64,
    pub busy_periods: usize,
    pub busy_periods_per_replication: Vec<usize>,
    pub mean_busy_length: f64,
    pub mean_in_system: f64,
    pub max_simultaneous: u32,
    pub empirical_mode: u32,
    pub regression: Option<RegressionResult<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemComparison {
    pub rows: Vec<ComparisonRow>,
    pub warnings: Vec<String>,
}

/// Side-by-side summary of several runs. Mixing traffic intensities is
/// allowed but produces a warning.
pub fn compare_systems(reports: &[ExperimentReport]) -> Result<SystemComparison> {
    if reports.len() < 2 {
        return Err(Error::TooFewReports(reports.len()));
    }
    let reference = reports[0].rho;
    let mut warnings = Vec::new();
    for r in &reports[1..] {
        if (r.rho - reference).abs() > 1e-9 * reference.abs().max(1.0) {
            let msg = format!(
                "{} has rho = {:.3} but {} has rho = {:.3}",
                r.label, r.rho, reports[0].label, reference
            );
            warn!("{msg}");
            warnings.push(msg);
        }
    }
    let rows = reports
        .iter()
        .map(|r| ComparisonRow {
            label: r.label.clone(),
            rho: r.rho,
            busy_periods: r.pooled.busy.count,
            busy_periods_per_replication: r.busy_period_counts(),
            mean_busy_length: r.pooled.busy.mean_length,
            mean_in_system: r.pooled.occupancy.mean_in_system,
            max_simultaneous: r.pooled.busy.max_simultaneous,
            empirical_mode: r.pooled.occupancy.mode(),
            regression: r.pooled.regression,
        })
        .collect();
    Ok(SystemComparison { rows, warnings })
}
