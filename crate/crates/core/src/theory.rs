//! Closed-form references for the infinite-server queue and the regression of
//! log busy-period size on its peak occupancy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Mean sojourn time in state `i` of an M/M/∞ queue: `mean_service / (i + rho)`.
pub fn theoretical_mean_sojourn<T: Real>(i: u32, mean_service: T, rho: T) -> T {
    mean_service / (T::lit(f64::from(i)) + rho)
}

/// Poisson probability `e^-rho rho^n / n!`, evaluated in log space.
pub fn poisson_pmf<T: Real>(n: u32, rho: T) -> T {
    if n == 0 {
        return (-rho).exp();
    }
    let log_fact = (1..=n).fold(T::zero(), |acc, k| acc + T::lit(f64::from(k)).ln());
    (-rho + T::lit(f64::from(n)) * rho.ln() - log_fact).exp()
}

/// Expected busy-period length of an M/G/∞ queue, `(e^rho - 1) / lambda`.
pub fn mginf_mean_busy_period<T: Real>(mean_interarrival: T, rho: T) -> T {
    rho.exp_m1() * mean_interarrival
}

/// Equilibrium number-in-system law and per-state mean sojourn for a given load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoreticalOccupancy<T> {
    pub rho: T,
    pub pmf: Vec<T>,
    pub mean_sojourn: Vec<T>,
}

impl<T: Real> TheoreticalOccupancy<T> {
    /// Tabulates states `0..=max(min_states, n*)` where `n*` is the first state
    /// past the mode whose upper tail mass is below 1e-12.
    pub fn new(mean_service: T, rho: T, min_states: u32) -> Self {
        let tail_floor = T::lit(1e-12);
        let mut pmf = Vec::new();
        let mut cumulative = T::zero();
        let mut n = 0u32;
        loop {
            let p = poisson_pmf(n, rho);
            pmf.push(p);
            cumulative = cumulative + p;
            let past_mode = T::lit(f64::from(n)) > rho;
            if n >= min_states && past_mode && T::one() - cumulative < tail_floor {
                break;
            }
            n += 1;
        }
        let mean_sojourn = (0..pmf.len() as u32)
            .map(|i| theoretical_mean_sojourn(i, mean_service, rho))
            .collect();
        Self { rho, pmf, mean_sojourn }
    }

    pub fn mode(&self) -> u32 {
        let mut best = 0usize;
        for (k, &p) in self.pmf.iter().enumerate() {
            if p > self.pmf[best] {
                best = k;
            }
        }
        best as u32
    }
}

/// Least-squares fit of `Z = ln Y` on `X`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult<T> {
    pub intercept: T,
    pub slope: T,
    pub correlation: T,
    pub n_points: usize,
}

impl<T: Real> RegressionResult<T> {
    pub fn predict(&self, x: T) -> T {
        self.intercept + self.slope * x
    }
}

/// Ordinary least squares of `ln y` on `x`.
pub fn fit_regression<T: Real>(xs: &[T], ys: &[T]) -> Result<RegressionResult<T>> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    if xs.len() < 2 {
        return Err(Error::Domain(format!("regression needs at least 2 points, got {}", xs.len())));
    }
    if let Some(y) = ys.iter().find(|&&y| !(y >= T::one())) {
        return Err(Error::Domain(format!("regression needs every Y >= 1, got {y}")));
    }
    let zs: Vec<T> = ys.iter().map(|y| y.ln()).collect();
    let n = T::from_count(xs.len());
    let mean = |v: &[T]| v.iter().fold(T::zero(), |a, &b| a + b) / n;
    let (mx, mz) = (mean(xs), mean(&zs));
    let (mut sxx, mut sxz, mut szz) = (T::zero(), T::zero(), T::zero());
    for (&x, &z) in xs.iter().zip(&zs) {
        let (dx, dz) = (x - mx, z - mz);
        sxx = sxx + dx * dx;
        sxz = sxz + dx * dz;
        szz = szz + dz * dz;
    }
    if sxx <= T::zero() {
        return Err(Error::DegenerateRegression);
    }
    let slope = sxz / sxx;
    let correlation = if szz > T::zero() {
        (sxz / (sxx * szz).sqrt()).max(-T::one()).min(T::one())
    } else {
        T::zero()
    };
    Ok(RegressionResult {
        intercept: mz - slope * mx,
        slope,
        correlation,
        n_points: xs.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionComparison<T> {
    pub total_variation: T,
    pub chi_square: T,
    /// Cells in the chi-square sum after pooling sparse cells.
    pub chi_square_cells: usize,
}

/// Total variation distance and Pearson chi-square between an empirical and a
/// theoretical pmf. Supports of different length are zero-filled. Cells whose
/// expected count `sample_size * q` is below 5 are pooled into one tail cell.
pub fn compare_distributions<T: Real>(empirical: &[T], theoretical: &[T], sample_size: T) -> DistributionComparison<T> {
    let len = empirical.len().max(theoretical.len());
    let at = |v: &[T], k: usize| v.get(k).copied().unwrap_or_else(T::zero);
    let min_expected = T::lit(5.0);

    let mut tv = T::zero();
    let mut chi = T::zero();
    let mut cells = 0usize;
    let (mut tail_obs, mut tail_exp) = (T::zero(), T::zero());
    for k in 0..len {
        let (p, q) = (at(empirical, k), at(theoretical, k));
        tv = tv + (p - q).abs();
        let (obs, exp) = (sample_size * p, sample_size * q);
        if exp >= min_expected {
            chi = chi + (obs - exp) * (obs - exp) / exp;
            cells += 1;
        } else {
            tail_obs = tail_obs + obs;
            tail_exp = tail_exp + exp;
        }
    }
    if tail_exp > T::zero() {
        chi = chi + (tail_obs - tail_exp) * (tail_obs - tail_exp) / tail_exp;
        cells += 1;
    }
    DistributionComparison {
        total_variation: tv / T::lit(2.0),
        chi_square: chi,
        chi_square_cells: cells,
    }
}
