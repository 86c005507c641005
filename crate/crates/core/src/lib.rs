//! Discrete-event simulation of infinite-server queues.
//!
//! A run draws inter-arrival and service times from seeded streams, merges the
//! arrival and departure instants into a ±1 event stream, integrates it into
//! the number-in-system path, and measures occupancy, busy periods and idle
//! periods. Results are compared with the M/G/∞ closed forms and pooled over
//! replications into a serializable report.
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the common instantiations.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod report;
pub mod rng;
pub mod sampling;
pub mod scalar;
pub mod theory;
pub mod trajectory;

pub use config::{preset, presets, ConfigBuilder, Preset, SimulationConfig, SystemSpec};
pub use error::{Error, Result};
pub use experiment::{compare_systems, run_experiment, simulate, ExperimentReport, SimulationRun, SystemComparison};
pub use metrics::{
    histogram, mean_busy_period, occupancy, segment_busy_periods, BusyPeriodRecord, IdleStats, OccupancyStats,
};
pub use report::{emit_comparison, emit_report, read_report, ReportFormat};
pub use rng::{Role, SeedPlan, UniformStream};
pub use sampling::{ArrivalKind, ArrivalLaw, ServiceKind, ServiceLaw};
pub use scalar::Real;
pub use theory::{
    compare_distributions, fit_regression, poisson_pmf, theoretical_mean_sojourn, RegressionResult,
    TheoreticalOccupancy,
};
pub use trajectory::{build_departures, build_trajectory, merge_events, EventStream, Mark, Trajectory};

pub type ArrivalLaw64 = ArrivalLaw<f64>;
pub type ServiceLaw64 = ServiceLaw<f64>;
pub type EventStream64 = EventStream<f64>;
pub type Trajectory64 = Trajectory<f64>;
pub type OccupancyStats64 = OccupancyStats<f64>;
pub type BusyPeriodRecord64 = BusyPeriodRecord<f64>;
pub type RegressionResult64 = RegressionResult<f64>;

pub type ArrivalLaw32 = ArrivalLaw<f32>;
pub type ServiceLaw32 = ServiceLaw<f32>;
pub type EventStream32 = EventStream<f32>;
pub type Trajectory32 = Trajectory<f32>;
pub type OccupancyStats32 = OccupancyStats<f32>;
pub type BusyPeriodRecord32 = BusyPeriodRecord<f32>;
pub type RegressionResult32 = RegressionResult<f32>;
