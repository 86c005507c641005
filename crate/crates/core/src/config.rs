//! Experiment configuration: the six named presets, the flat `key = value`
//! file format, and command-line overrides.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SeedPlan;
use crate::sampling::{ArrivalKind, ArrivalLaw, ServiceKind, ServiceLaw};

pub const DEFAULT_MEAN_INTERARRIVAL: f64 = 0.996;
pub const DEFAULT_ARRIVALS: usize = 25_000;
pub const DEFAULT_REPLICATIONS: usize = 10;
pub const DEFAULT_BIN_WIDTH: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub arrival_law: ArrivalLaw<f64>,
    pub service_law: ServiceLaw<f64>,
    pub n_arrivals: usize,
    pub seeds: SeedPlan,
    pub replications: usize,
    /// Bin width, in seconds, of the busy-period length histogram.
    pub histogram_bin_width: f64,
}

impl SimulationConfig {
    pub fn new(arrival_law: ArrivalLaw<f64>, service_law: ServiceLaw<f64>, seeds: SeedPlan) -> Self {
        Self {
            arrival_law,
            service_law,
            n_arrivals: DEFAULT_ARRIVALS,
            seeds,
            replications: DEFAULT_REPLICATIONS,
            histogram_bin_width: DEFAULT_BIN_WIDTH,
        }
    }

    /// Traffic intensity `mean_service / mean_interarrival`.
    pub fn rho(&self) -> f64 {
        self.service_law.mean_service / self.arrival_law.mean_interarrival
    }

    /// Kendall label such as `M/E2/inf`.
    pub fn label(&self) -> String {
        format!("{}/{}/inf", self.arrival_law.symbol(), self.service_law.symbol())
    }

    /// Rejects every configuration the simulation would fail on.
    pub fn validate(&self) -> Result<()> {
        self.arrival_law.validate().map_err(into_config)?;
        self.service_law.validate().map_err(into_config)?;
        if self.n_arrivals == 0 {
            return Err(Error::Config("arrival count must be at least 1".into()));
        }
        if self.replications == 0 {
            return Err(Error::Config("replication count must be at least 1".into()));
        }
        if !(self.histogram_bin_width > 0.0 && self.histogram_bin_width.is_finite()) {
            return Err(Error::Config(format!(
                "histogram bin width must be positive, got {}",
                self.histogram_bin_width
            )));
        }
        self.seeds.validate()?;
        for &role in self.arrival_law.roles().iter().chain(self.service_law.roles()) {
            if self.seeds.seed(role).is_none() {
                return Err(Error::Config(format!(
                    "{} needs seed {} but none was given",
                    self.label(),
                    role.name()
                )));
            }
        }
        Ok(())
    }
}

fn into_config(e: Error) -> Error {
    match e {
        Error::Domain(msg) => Error::Config(msg),
        other => other,
    }
}

/// A named configuration mirroring one of the reference experiments.
#[derive(Debug, Clone)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub config: SimulationConfig,
}

/// The six reference experiments. Seeds are carried over for traceability;
/// the generator differs from the original, so counts will not match.
pub fn presets() -> Vec<Preset> {
    let m = ArrivalLaw::exponential(DEFAULT_MEAN_INTERARRIVAL);
    let e2 = ArrivalLaw::erlang2(DEFAULT_MEAN_INTERARRIVAL);
    let make = |name, description, arrival, service, seeds| Preset {
        name,
        description,
        config: SimulationConfig::new(arrival, service, seeds),
    };
    vec![
        make(
            "MM-rho4",
            "M/M/inf, mean service 4, rho = 4.016",
            m,
            ServiceLaw::exponential(4.0),
            SeedPlan::new(7528, 7548),
        ),
        make(
            "MM-rho5",
            "M/M/inf, mean service 5, rho = 5.020",
            m,
            ServiceLaw::exponential(5.0),
            SeedPlan::new(7529, 7549),
        ),
        make(
            "ME2-rho4",
            "M/E2/inf, mean service 4, rho = 4.016",
            m,
            ServiceLaw::erlang2(4.0),
            SeedPlan::new(7528, 7552).with_h(6666),
        ),
        make(
            "ME2-rho5",
            "M/E2/inf, mean service 5, rho = 5.020",
            m,
            ServiceLaw::erlang2(5.0),
            SeedPlan::new(7529, 6552).with_h(6667),
        ),
        make(
            "E2E2-rho4",
            "E2/E2/inf, mean service 4, rho = 4.016",
            e2,
            ServiceLaw::erlang2(4.0),
            SeedPlan::new(4536, 5224).with_f(4537).with_h(6225),
        ),
        make(
            "E2E2-rho5",
            "E2/E2/inf, mean service 5, rho = 5.020",
            e2,
            ServiceLaw::erlang2(5.0),
            SeedPlan::new(4538, 5228).with_f(4539).with_h(6229),
        ),
    ]
}

pub fn preset(name: &str) -> Option<SimulationConfig> {
    presets()
        .into_iter()
        .find(|p| p.name.eq_ignore_ascii_case(name))
        .map(|p| p.config)
}

/// Service law family without its numeric parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ServiceFamily {
    Pareto,
    Exponential,
    Erlang2,
    Lognormal,
    ExpMixture,
    ErlangMixture,
}

/// Arrival and service families, parsed from labels such as `M/E2` or `E2/E2/inf`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SystemSpec {
    pub arrival: ArrivalKind,
    pub service: ServiceFamily,
}

impl FromStr for SystemSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<String> = s.split('/').map(|p| p.trim().to_ascii_uppercase()).collect();
        let parts: &[String] = match parts.as_slice() {
            [_, _, inf] if inf == "INF" || inf == "∞" => &parts[..2],
            [_, _] => &parts,
            _ => return Err(Error::Config(format!("system must look like `M/E2`, got `{s}`"))),
        };
        let arrival = match parts[0].as_str() {
            "M" => ArrivalKind::Exponential,
            "E2" => ArrivalKind::Erlang2,
            other => return Err(Error::Config(format!("unknown arrival law `{other}` (expected M or E2)"))),
        };
        let service = match parts[1].as_str() {
            "M" => ServiceFamily::Exponential,
            "E2" => ServiceFamily::Erlang2,
            "PARETO" => ServiceFamily::Pareto,
            "LN" | "LOGNORMAL" => ServiceFamily::Lognormal,
            "H2" | "HYPEREXP" => ServiceFamily::ExpMixture,
            "EM" | "ERLANGMIX" => ServiceFamily::ErlangMixture,
            other => {
                return Err(Error::Config(format!(
                    "unknown service law `{other}` (expected M, E2, PARETO, LN, H2 or EM)"
                )))
            }
        };
        Ok(Self { arrival, service })
    }
}

impl fmt::Display for SystemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = match self.arrival {
            ArrivalKind::Exponential => "M",
            ArrivalKind::Erlang2 => "E2",
        };
        let s = match self.service {
            ServiceFamily::Pareto => "PARETO",
            ServiceFamily::Exponential => "M",
            ServiceFamily::Erlang2 => "E2",
            ServiceFamily::Lognormal => "LN",
            ServiceFamily::ExpMixture => "H2",
            ServiceFamily::ErlangMixture => "EM",
        };
        write!(f, "{a}/{s}")
    }
}

/// Partial configuration. Later layers override earlier ones; whatever is
/// still unset at [`ConfigBuilder::build`] comes from the preset (if named)
/// or from the M/M/∞, rho = 4.016 defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigBuilder {
    pub preset: Option<String>,
    pub system: Option<SystemSpec>,
    pub mean_interarrival: Option<f64>,
    pub mean_service: Option<f64>,
    pub pareto_gamma: Option<f64>,
    pub mixture_p: Option<f64>,
    pub arrivals: Option<usize>,
    pub replications: Option<usize>,
    pub seed_e: Option<i64>,
    pub seed_f: Option<i64>,
    pub seed_g: Option<i64>,
    pub seed_h: Option<i64>,
    pub master_salt: Option<u64>,
    pub histogram_bin_width: Option<f64>,
}

fn parse_value<V: FromStr>(key: &str, value: &str) -> Result<V> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("invalid value `{value}` for `{key}`")))
}

impl ConfigBuilder {
    /// Parses the flat `key = value` format. `#` starts a comment.
    pub fn from_kv_str(text: &str) -> Result<Self> {
        let mut b = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
            b.set(key.trim(), value.trim())
                .map_err(|e| Error::Config(format!("line {}: {}", lineno + 1, strip_prefix(&e))))?;
        }
        Ok(b)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key_norm = key.to_ascii_lowercase().replace('-', "_");
        match key_norm.as_str() {
            "preset" => self.preset = Some(value.to_string()),
            "system" => self.system = Some(value.parse()?),
            "mean_interarrival" => self.mean_interarrival = Some(parse_value(key, value)?),
            "mean_service" => self.mean_service = Some(parse_value(key, value)?),
            "pareto_gamma" => self.pareto_gamma = Some(parse_value(key, value)?),
            "mixture_p" => self.mixture_p = Some(parse_value(key, value)?),
            "arrivals" | "n_arrivals" => self.arrivals = Some(parse_value(key, value)?),
            "replications" => self.replications = Some(parse_value(key, value)?),
            "seed_e" => self.seed_e = Some(parse_value(key, value)?),
            "seed_f" => self.seed_f = Some(parse_value(key, value)?),
            "seed_g" => self.seed_g = Some(parse_value(key, value)?),
            "seed_h" => self.seed_h = Some(parse_value(key, value)?),
            "master_salt" => self.master_salt = Some(parse_value(key, value)?),
            "histogram_bin_width" => self.histogram_bin_width = Some(parse_value(key, value)?),
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Applies every field set in `other` on top of `self`.
    pub fn merge(mut self, other: ConfigBuilder) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(
            preset,
            system,
            mean_interarrival,
            mean_service,
            pareto_gamma,
            mixture_p,
            arrivals,
            replications,
            seed_e,
            seed_f,
            seed_g,
            seed_h,
            master_salt,
            histogram_bin_width
        );
        self
    }

    pub fn build(&self) -> Result<SimulationConfig> {
        let base = match &self.preset {
            Some(name) => preset(name).ok_or_else(|| Error::Config(format!("unknown preset `{name}`")))?,
            None => presets().remove(0).config,
        };

        let mean_interarrival = self.mean_interarrival.unwrap_or(base.arrival_law.mean_interarrival);
        let mean_service = self.mean_service.unwrap_or(base.service_law.mean_service);

        let arrival_law = match self.system.map(|s| s.arrival) {
            Some(kind) => ArrivalLaw { kind, mean_interarrival },
            None => ArrivalLaw { mean_interarrival, ..base.arrival_law },
        };

        let base_family = match base.service_law.kind {
            ServiceKind::Exponential => ServiceFamily::Exponential,
            ServiceKind::Erlang2 => ServiceFamily::Erlang2,
            _ => ServiceFamily::Exponential,
        };
        let family = self.system.map_or(base_family, |s| s.service);
        let kind = match family {
            ServiceFamily::Exponential => ServiceKind::Exponential,
            ServiceFamily::Erlang2 => ServiceKind::Erlang2,
            ServiceFamily::Lognormal => ServiceKind::Lognormal,
            ServiceFamily::ErlangMixture => ServiceKind::ErlangMixture,
            ServiceFamily::Pareto => ServiceKind::Pareto {
                gamma: self
                    .pareto_gamma
                    .ok_or_else(|| Error::Config("Pareto service needs `pareto_gamma`".into()))?,
            },
            ServiceFamily::ExpMixture => ServiceKind::ExpMixture {
                p: self
                    .mixture_p
                    .ok_or_else(|| Error::Config("exponential mixture service needs `mixture_p`".into()))?,
            },
        };

        let mut seeds = base.seeds;
        if let Some(s) = self.seed_e {
            seeds.e_seed = s;
        }
        if let Some(s) = self.seed_g {
            seeds.g_seed = s;
        }
        if self.seed_f.is_some() {
            seeds.f_seed = self.seed_f;
        }
        if self.seed_h.is_some() {
            seeds.h_seed = self.seed_h;
        }
        if let Some(s) = self.master_salt {
            seeds.master_salt = s;
        }

        let config = SimulationConfig {
            arrival_law,
            service_law: ServiceLaw::new(kind, mean_service),
            n_arrivals: self.arrivals.unwrap_or(base.n_arrivals),
            seeds,
            replications: self.replications.unwrap_or(base.replications),
            histogram_bin_width: self.histogram_bin_width.unwrap_or(base.histogram_bin_width),
        };
        config.validate()?;
        Ok(config)
    }
}

fn strip_prefix(e: &Error) -> String {
    match e {
        Error::Config(msg) => msg.clone(),
        other => other.to_string(),
    }
}
