//! Random variate generators for inter-arrival and service times.
//!
//! Each sampler is a pure function of its parameters and the uniforms it is
//! handed, so the same uniforms always give the same variate. Every law is
//! parameterized by its mean; shape constants are rescaled to hit it exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{Role, SeedPlan, UniformStream};
use crate::scalar::Real;

/// Erlang mixture components as `(selector upper bound, stages, stage scale)`.
/// Stage scales are relative; they are multiplied by a common calibration
/// factor so the mixture mean matches the requested mean.
const ERLANG_MIXTURE: [(f64, usize, f64); 3] = [
    (0.40, 4, 10.0 / 2.7 / 4.0),
    (0.75, 2, 10.0 / 4.2 / 2.0),
    (1.00, 3, 10.0 / 3.6 / 3.0),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ArrivalKind {
    Exponential,
    Erlang2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrivalLaw<T> {
    pub kind: ArrivalKind,
    pub mean_interarrival: T,
}

impl<T: Real> ArrivalLaw<T> {
    pub fn exponential(mean_interarrival: T) -> Self {
        Self {
            kind: ArrivalKind::Exponential,
            mean_interarrival,
        }
    }

    pub fn erlang2(mean_interarrival: T) -> Self {
        Self {
            kind: ArrivalKind::Erlang2,
            mean_interarrival,
        }
    }

    pub fn is_poisson(&self) -> bool {
        self.kind == ArrivalKind::Exponential
    }

    /// Kendall symbol of the law.
    pub fn symbol(&self) -> &'static str {
        match self.kind {
            ArrivalKind::Exponential => "M",
            ArrivalKind::Erlang2 => "E2",
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive_mean(self.mean_interarrival, "mean inter-arrival time")
    }

    pub fn sample(&self, streams: &mut [UniformStream]) -> Result<T> {
        match self.kind {
            ArrivalKind::Exponential => sample_exponential(self.mean_interarrival, streams[0].draw()),
            ArrivalKind::Erlang2 => {
                let u1 = streams[0].draw();
                let u2 = streams[1].draw();
                sample_erlang2(self.mean_interarrival, u1, u2)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ServiceKind<T> {
    Pareto { gamma: T },
    Exponential,
    Erlang2,
    Lognormal,
    ExpMixture { p: T },
    ErlangMixture,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ServiceLaw<T> {
    pub kind: ServiceKind<T>,
    pub mean_service: T,
}

impl<T: Real> ServiceLaw<T> {
    pub fn new(kind: ServiceKind<T>, mean_service: T) -> Self {
        Self { kind, mean_service }
    }

    pub fn exponential(mean_service: T) -> Self {
        Self::new(ServiceKind::Exponential, mean_service)
    }

    pub fn erlang2(mean_service: T) -> Self {
        Self::new(ServiceKind::Erlang2, mean_service)
    }

    pub fn is_exponential(&self) -> bool {
        matches!(self.kind, ServiceKind::Exponential)
    }

    pub fn symbol(&self) -> &'static str {
        match self.kind {
            ServiceKind::Pareto { .. } => "Pareto",
            ServiceKind::Exponential => "M",
            ServiceKind::Erlang2 => "E2",
            ServiceKind::Lognormal => "LN",
            ServiceKind::ExpMixture { .. } => "H2",
            ServiceKind::ErlangMixture => "EM",
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive_mean(self.mean_service, "mean service time")?;
        match self.kind {
            ServiceKind::Pareto { gamma } => {
                if !(gamma > T::one()) {
                    return Err(Error::Domain(format!("pareto gamma must exceed 1, got {gamma}")));
                }
            }
            ServiceKind::ExpMixture { p } => check_probability(p)?,
            _ => {}
        }
        Ok(())
    }

    /// Roles whose streams this law draws from, in the order `sample` expects.
    pub fn roles(&self) -> &'static [Role] {
        match self.kind {
            ServiceKind::Erlang2 => &[Role::G, Role::H],
            _ => &[Role::G],
        }
    }

    pub fn sample(&self, streams: &mut [UniformStream]) -> Result<T> {
        let m = self.mean_service;
        match self.kind {
            ServiceKind::Exponential => sample_exponential(m, streams[0].draw()),
            ServiceKind::Erlang2 => {
                let u1 = streams[0].draw();
                let u2 = streams[1].draw();
                sample_erlang2(m, u1, u2)
            }
            ServiceKind::Pareto { gamma } => sample_pareto(gamma, m, streams[0].draw()),
            ServiceKind::Lognormal => {
                let s = &mut streams[0];
                let u1 = s.draw();
                let u2 = s.draw();
                sample_lognormal(m, u1, u2)
            }
            ServiceKind::ExpMixture { p } => {
                let s = &mut streams[0];
                let (sel, u1, u2) = (s.draw(), s.draw(), s.draw());
                sample_exp_mixture(p, m, sel, u1, u2)
            }
            ServiceKind::ErlangMixture => {
                let s = &mut streams[0];
                let u: [T; 6] = std::array::from_fn(|_| s.draw());
                sample_erlang_mixture(m, &u)
            }
        }
    }
}

impl<T: Real> ArrivalLaw<T> {
    pub fn roles(&self) -> &'static [Role] {
        match self.kind {
            ArrivalKind::Exponential => &[Role::E],
            ArrivalKind::Erlang2 => &[Role::E, Role::F],
        }
    }
}

fn positive_mean<T: Real>(mean: T, what: &str) -> Result<()> {
    if mean > T::zero() && mean.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} must be positive and finite, got {mean}")))
    }
}

fn check_probability<T: Real>(p: T) -> Result<()> {
    if p > T::zero() && p < T::one() {
        Ok(())
    } else {
        Err(Error::Domain(format!("mixture probability must lie in (0, 1), got {p}")))
    }
}

fn check_uniform<T: Real>(u: T) -> Result<()> {
    if u > T::zero() && u < T::one() {
        Ok(())
    } else {
        Err(Error::Domain(format!("uniform draw must lie in (0, 1), got {u}")))
    }
}

/// Inverse transform: `-mean * ln(u)`.
pub fn sample_exponential<T: Real>(mean: T, u: T) -> Result<T> {
    positive_mean(mean, "mean")?;
    check_uniform(u)?;
    Ok(-mean * u.ln())
}

/// Sum of two exponential stages with mean `mean / 2` each.
pub fn sample_erlang2<T: Real>(mean: T, u1: T, u2: T) -> Result<T> {
    positive_mean(mean, "mean")?;
    check_uniform(u1)?;
    check_uniform(u2)?;
    let half = mean / T::lit(2.0);
    Ok(-half * (u1.ln() + u2.ln()))
}

/// Pareto variate `k / (1 - u)^(1/alpha)` with `alpha = 2 gamma / (gamma - 1)` and
/// the scale `k` fixed by the mean. `u = 0` is accepted and returns `k`.
pub fn sample_pareto<T: Real>(gamma: T, mean: T, u: T) -> Result<T> {
    if !(gamma > T::one()) {
        return Err(Error::Domain(format!("pareto gamma must exceed 1, got {gamma}")));
    }
    positive_mean(mean, "mean")?;
    if !(u >= T::zero() && u < T::one()) {
        return Err(Error::Domain(format!("uniform draw must lie in [0, 1), got {u}")));
    }
    let alpha = pareto_alpha(gamma);
    let scale = pareto_scale(gamma, mean);
    Ok(scale / (T::one() - u).powf(alpha.recip()))
}

pub fn pareto_alpha<T: Real>(gamma: T) -> T {
    T::lit(2.0) * gamma / (gamma - T::one())
}

/// Minimum of the Pareto law with the given mean.
pub fn pareto_scale<T: Real>(gamma: T, mean: T) -> T {
    let alpha = pareto_alpha(gamma);
    mean * (alpha - T::one()) / alpha
}

/// Lognormal with unit log-scale deviation. The normal deviate comes from the
/// Box-Muller cosine branch; the result is scaled by `mean / e^{1/2}`.
pub fn sample_lognormal<T: Real>(mean: T, u1: T, u2: T) -> Result<T> {
    positive_mean(mean, "mean")?;
    check_uniform(u1)?;
    check_uniform(u2)?;
    let z = (-T::lit(2.0) * u1.ln()).sqrt() * (T::TAU() * u2).cos();
    let scale = mean / T::lit(0.5).exp();
    Ok(scale * z.exp())
}

/// Two-branch hyperexponential. With probability `p` (selector `u_sel <= p`) the
/// variate is exponential with mean `(mean/2)/p` drawn from `u1`, otherwise
/// exponential with mean `(mean/2)/(1-p)` drawn from `u2`.
pub fn sample_exp_mixture<T: Real>(p: T, mean: T, u_sel: T, u1: T, u2: T) -> Result<T> {
    check_probability(p)?;
    positive_mean(mean, "mean")?;
    check_uniform(u_sel)?;
    let half = mean / T::lit(2.0);
    if u_sel <= p {
        sample_exponential(half / p, u1)
    } else {
        sample_exponential(half / (T::one() - p), u2)
    }
}

/// Index of the Erlang mixture component picked by `selector`.
pub fn erlang_mixture_component<T: Real>(selector: T) -> usize {
    let s = selector.as_f64();
    ERLANG_MIXTURE
        .iter()
        .position(|&(bound, _, _)| s < bound)
        .unwrap_or(ERLANG_MIXTURE.len() - 1)
}

/// Stage count of each Erlang mixture component.
pub fn erlang_mixture_stages(component: usize) -> usize {
    ERLANG_MIXTURE[component].1
}

/// Three-component Erlang mixture (Erlang-4 / Erlang-2 / Erlang-3 with weights
/// 0.40 / 0.35 / 0.25). `u[0]` selects the component, `u[1..]` feed its stages.
pub fn sample_erlang_mixture<T: Real>(mean: T, u: &[T; 6]) -> Result<T> {
    positive_mean(mean, "mean")?;
    for &v in u {
        check_uniform(v)?;
    }
    let component = erlang_mixture_component(u[0]);
    let (_, stages, stage_scale) = ERLANG_MIXTURE[component];
    let calibration = mean.as_f64() / erlang_mixture_raw_mean();
    let stage_mean = T::lit(stage_scale * calibration);
    let log_sum = u[1..=stages].iter().fold(T::zero(), |acc, &v| acc + v.ln());
    Ok(-stage_mean * log_sum)
}

fn erlang_mixture_raw_mean() -> f64 {
    let mut lower = 0.0;
    let mut total = 0.0;
    for &(bound, stages, scale) in &ERLANG_MIXTURE {
        total += (bound - lower) * stages as f64 * scale;
        lower = bound;
    }
    total
}

fn open_streams(plan: &SeedPlan, roles: &[Role], replication: usize) -> Result<Vec<UniformStream>> {
    roles.iter().map(|&r| plan.stream(r, replication)).collect()
}

/// Draws `n` inter-arrival gaps from stream E (and F for Erlang-2).
pub fn generate_interarrivals<T: Real>(
    law: &ArrivalLaw<T>,
    n: usize,
    plan: &SeedPlan,
    replication: usize,
) -> Result<Vec<T>> {
    law.validate()?;
    let mut streams = open_streams(plan, law.roles(), replication)?;
    (0..n).map(|_| law.sample(&mut streams)).collect()
}

/// Draws `n` service times from stream G (and H for Erlang-2).
pub fn generate_service_times<T: Real>(
    law: &ServiceLaw<T>,
    n: usize,
    plan: &SeedPlan,
    replication: usize,
) -> Result<Vec<T>> {
    law.validate()?;
    let mut streams = open_streams(plan, law.roles(), replication)?;
    (0..n).map(|_| law.sample(&mut streams)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const E_INV: f64 = 0.367_879_441_171_442_33;

    fn monte_carlo(n: usize, seed: i64, mut f: impl FnMut(&mut UniformStream) -> f64) -> (f64, f64) {
        let mut s = UniformStream::new(seed, 0).unwrap();
        let xs: Vec<f64> = (0..n).map(|_| f(&mut s)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
        (mean, var)
    }

    #[test]
    fn exponential_examples() {
        assert_relative_eq!(sample_exponential(1.0, E_INV).unwrap(), 1.0, epsilon = 1e-15);
        // -0.996 ln 0.5
        assert_relative_eq!(sample_exponential(0.996, 0.5).unwrap(), 0.690_374_591_837_705_5, epsilon = 1e-15);
        let tiny = sample_exponential(4.0, 1.0 - 1e-12).unwrap();
        assert!(tiny > 0.0 && tiny < 1e-10);
        assert!(sample_exponential(1.0, 0.0).is_err());
        assert!(sample_exponential(1.0, 1.0).is_err());
    }

    #[test]
    fn erlang2_examples() {
        assert_relative_eq!(sample_erlang2(4.0, E_INV, E_INV).unwrap(), 4.0, epsilon = 1e-14);
        // -0.498 (ln 0.5 + ln 0.25) = 0.498 * 3 ln 2
        assert_relative_eq!(sample_erlang2(0.996, 0.5, 0.25).unwrap(), 1.035_561_887_756_558_3, epsilon = 1e-14);
        assert!(sample_erlang2(1.0, 0.5, 1.5).is_err());
    }

    #[test]
    fn erlang2_mean_and_cv() {
        let (mean, var) = monte_carlo(1_000_000, 11, |s| sample_erlang2(5.0, s.draw(), s.draw()).unwrap());
        assert!((mean - 5.0).abs() < 0.011, "mean {mean}");
        assert!((var / (mean * mean) - 0.5).abs() < 0.01, "cv2 {}", var / (mean * mean));
    }

    #[test]
    fn pareto_examples() {
        assert_relative_eq!(sample_pareto(3.0, 4.0, 0.0).unwrap(), 8.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(sample_pareto(3.0, 4.0, 0.875).unwrap(), 16.0 / 3.0, epsilon = 1e-14);
        assert!(sample_pareto(1.0, 4.0, 0.5).is_err());
        assert!(sample_pareto(0.5, 4.0, 0.5).is_err());
    }

    #[test]
    fn pareto_mean() {
        let (mean, _) = monte_carlo(1_000_000, 12, |s| sample_pareto(3.0, 4.0, s.draw()).unwrap());
        assert!((mean - 4.0).abs() < 0.03, "mean {mean}");
    }

    #[test]
    fn lognormal_examples() {
        let m = 0.5f64.exp();
        assert_relative_eq!(sample_lognormal(m, 0.5, 0.25).unwrap(), 1.0, epsilon = 1e-14);
        // u2 -> 0: cos -> 1, z = sqrt(2 ln 2)
        let z = (2.0 * 2f64.ln()).sqrt();
        let expected = 4.0 / 0.5f64.exp() * z.exp();
        assert_relative_eq!(sample_lognormal(4.0, 0.5, f64::MIN_POSITIVE).unwrap(), expected, epsilon = 1e-12);
        assert!(sample_lognormal(4.0, 0.0, 0.5).is_err());
    }

    #[test]
    fn lognormal_mean() {
        let (mean, _) = monte_carlo(1_000_000, 13, |s| sample_lognormal(4.0, s.draw(), s.draw()).unwrap());
        assert!((mean - 4.0).abs() < 0.05, "mean {mean}");
    }

    #[test]
    fn exp_mixture_examples() {
        assert_relative_eq!(sample_exp_mixture(0.5, 4.0, 0.3, E_INV, 0.9).unwrap(), 4.0, epsilon = 1e-14);
        assert_relative_eq!(sample_exp_mixture(0.5, 4.0, 0.7, 0.9, E_INV).unwrap(), 4.0, epsilon = 1e-14);
        // branch means 8 and 8/3
        assert_relative_eq!(sample_exp_mixture(0.25, 4.0, 0.1, E_INV, 0.5).unwrap(), 8.0, epsilon = 1e-14);
        assert_relative_eq!(sample_exp_mixture(0.25, 4.0, 0.9, 0.5, E_INV).unwrap(), 8.0 / 3.0, epsilon = 1e-14);
        assert!(sample_exp_mixture(1.2, 4.0, 0.5, 0.5, 0.5).is_err());
        assert!(sample_exp_mixture(0.0, 4.0, 0.5, 0.5, 0.5).is_err());
    }

    #[test]
    fn exp_mixture_mean() {
        let (mean, _) = monte_carlo(1_000_000, 14, |s| {
            sample_exp_mixture(0.25, 4.0, s.draw(), s.draw(), s.draw()).unwrap()
        });
        // variance = 2 * (0.25 * 64 + 0.75 * 64 / 9) - 16 = 32.67, 3 sigma / 1000 ~ 0.017
        assert!((mean - 4.0).abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn erlang_mixture_selection() {
        assert_eq!(erlang_mixture_stages(erlang_mixture_component(0.10)), 4);
        assert_eq!(erlang_mixture_stages(erlang_mixture_component(0.60)), 2);
        assert_eq!(erlang_mixture_stages(erlang_mixture_component(0.90)), 3);
    }

    #[test]
    fn erlang_mixture_mean() {
        // Oracle: component means proportional to 10/2.7, 10/4.2, 10/3.6; an
        // Erlang-k with mean m has second moment m^2 (1 + 1/k).
        let weights = [0.40, 0.35, 0.25];
        let raw = [10.0 / 2.7, 10.0 / 4.2, 10.0 / 3.6];
        let stages = [4.0, 2.0, 3.0];
        let raw_mean: f64 = weights.iter().zip(&raw).map(|(w, m)| w * m).sum();
        let c = 5.0 / raw_mean;
        let second: f64 = (0..3).map(|i| weights[i] * (c * raw[i]).powi(2) * (1.0 + 1.0 / stages[i])).sum();
        let sd = (second - 25.0).sqrt();
        let band = 3.0 * sd / 1000.0;

        let (mean, _) = monte_carlo(1_000_000, 15, |s| {
            let u: [f64; 6] = std::array::from_fn(|_| s.draw());
            sample_erlang_mixture(5.0, &u).unwrap()
        });
        assert!((mean - 5.0).abs() < band, "mean {mean}, band {band}");
    }

    #[test]
    fn erlang2_is_less_variable_than_exponential() {
        let (_, v_erl) = monte_carlo(100_000, 16, |s| sample_erlang2(4.0, s.draw(), s.draw()).unwrap());
        let (_, v_exp) = monte_carlo(100_000, 17, |s| sample_exponential(4.0, s.draw()).unwrap());
        assert!(v_erl < v_exp);
    }

    #[test]
    fn interarrival_generation() {
        let plan = SeedPlan::new(7528, 7548).with_f(7549);
        let gaps: Vec<f64> = generate_interarrivals(&ArrivalLaw::exponential(0.996), 25_000, &plan, 0).unwrap();
        assert_eq!(gaps.len(), 25_000);
        let mean = gaps.iter().sum::<f64>() / 25_000.0;
        assert!((mean - 0.996).abs() < 0.02, "mean {mean}");

        let gaps: Vec<f64> = generate_interarrivals(&ArrivalLaw::erlang2(0.996), 25_000, &plan, 0).unwrap();
        let mean = gaps.iter().sum::<f64>() / 25_000.0;
        let var = gaps.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / 24_999.0;
        assert!((var / (mean * mean) - 0.5).abs() < 0.03);

        let one: Vec<f64> = generate_interarrivals(&ArrivalLaw::exponential(0.996), 1, &plan, 0).unwrap();
        assert_eq!(one.len(), 1);
        assert!(one[0] > 0.0);
    }

    #[test]
    fn erlang2_arrivals_need_f_seed() {
        let plan = SeedPlan::new(7528, 7548);
        let r: Result<Vec<f64>> = generate_interarrivals(&ArrivalLaw::erlang2(0.996), 10, &plan, 0);
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn law_validation() {
        assert!(ServiceLaw::new(ServiceKind::Pareto { gamma: 1.0 }, 4.0).validate().is_err());
        assert!(ServiceLaw::new(ServiceKind::ExpMixture { p: 1.0 }, 4.0).validate().is_err());
        assert!(ServiceLaw::exponential(0.0).validate().is_err());
        assert!(ArrivalLaw::exponential(-1.0).validate().is_err());
        assert!(ServiceLaw::new(ServiceKind::Pareto { gamma: 3.0 }, 4.0).validate().is_ok());
    }

    #[test]
    fn f32_samplers() {
        let x: f32 = sample_erlang2(4.0, 0.5, 0.5).unwrap();
        assert!((x - 4.0 * 2f32.ln()).abs() < 1e-5);
        let plan = SeedPlan::new(1, 2);
        let xs: Vec<f32> =
            generate_service_times(&ServiceLaw::exponential(4.0f32), 10_000, &plan, 0).unwrap();
        assert!(xs.iter().all(|&x| x > 0.0));
    }

    proptest! {
        #[test]
        fn every_law_is_positive(seed in 1i64..100_000, kind in 0usize..6) {
            let kind = match kind {
                0 => ServiceKind::Pareto { gamma: 3.0 },
                1 => ServiceKind::Exponential,
                2 => ServiceKind::Erlang2,
                3 => ServiceKind::Lognormal,
                4 => ServiceKind::ExpMixture { p: 0.3 },
                _ => ServiceKind::ErlangMixture,
            };
            let plan = SeedPlan::new(seed, seed + 1).with_h(seed + 2);
            let xs: Vec<f64> = generate_service_times(&ServiceLaw::new(kind, 4.0), 200, &plan, 0).unwrap();
            prop_assert!(xs.iter().all(|&x| x > 0.0 && x.is_finite()));
        }

        #[test]
        fn exponential_decreases_in_u(a in 1e-9f64..1.0, b in 1e-9f64..1.0) {
            prop_assume!(a < b && b < 1.0);
            prop_assert!(sample_exponential(2.0, a).unwrap() > sample_exponential(2.0, b).unwrap());
        }

        #[test]
        fn pareto_increases_in_u(a in 0.0f64..0.999, b in 0.0f64..0.999) {
            prop_assume!(a < b);
            prop_assert!(sample_pareto(3.0, 4.0, a).unwrap() < sample_pareto(3.0, 4.0, b).unwrap());
        }
    }
}
