use std::fs;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gginf_core::{
    compare_systems, emit_comparison, emit_report, presets, read_report, run_experiment, simulate, ConfigBuilder,
    Error, ReportFormat, SimulationConfig,
};
use log::info;

const EXIT_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(name = "gginf", version, about = "Infinite-server queue simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its report.
    Run {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value = "json")]
        format: String,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
    },
    /// List the built-in presets.
    Presets,
    /// Tabulate busy-period and occupancy statistics of several JSON reports.
    Compare {
        #[arg(required = true, num_args = 2..)]
        reports: Vec<PathBuf>,
        #[arg(long, default_value = "csv")]
        format: String,
        #[arg(long, default_value = "out")]
        out_dir: PathBuf,
    },
    /// Dump the event stream of one replication as `timestamp,mark,state` CSV.
    Trace {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value_t = 0)]
        replication: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct ConfigArgs {
    /// Start from a named preset (see `gginf presets`).
    #[arg(long)]
    preset: Option<String>,
    /// Flat `key = value` config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// System such as `M/M`, `M/E2`, `E2/E2`, `M/PARETO`, `M/LN`, `M/H2`, `M/EM`.
    #[arg(long)]
    system: Option<String>,
    #[arg(long)]
    mean_service: Option<f64>,
    #[arg(long)]
    mean_interarrival: Option<f64>,
    #[arg(long)]
    pareto_gamma: Option<f64>,
    #[arg(long)]
    mixture_p: Option<f64>,
    #[arg(long)]
    arrivals: Option<usize>,
    #[arg(long)]
    replications: Option<usize>,
    #[arg(long)]
    seed_e: Option<i64>,
    #[arg(long)]
    seed_f: Option<i64>,
    #[arg(long)]
    seed_g: Option<i64>,
    #[arg(long)]
    seed_h: Option<i64>,
    #[arg(long)]
    master_salt: Option<u64>,
    /// Busy-period length histogram bin width, in seconds.
    #[arg(long)]
    bin_width: Option<f64>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<SimulationConfig, Error> {
        let file = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|source| Error::Io {
                    path: path.clone(),
                    source,
                })?;
                ConfigBuilder::from_kv_str(&text)?
            }
            None => ConfigBuilder::default(),
        };
        let flags = ConfigBuilder {
            preset: self.preset.clone(),
            system: self.system.as_deref().map(str::parse).transpose()?,
            mean_interarrival: self.mean_interarrival,
            mean_service: self.mean_service,
            pareto_gamma: self.pareto_gamma,
            mixture_p: self.mixture_p,
            arrivals: self.arrivals,
            replications: self.replications,
            seed_e: self.seed_e,
            seed_f: self.seed_f,
            seed_g: self.seed_g,
            seed_h: self.seed_h,
            master_salt: self.master_salt,
            histogram_bin_width: self.bin_width,
        };
        file.merge(flags).build()
    }
}

fn fail(err: Error, code: u8) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(code)
}

/// Config and input-file problems exit with 2, everything else with 3.
fn classify(err: Error) -> ExitCode {
    let code = if err.is_config() { EXIT_CONFIG } else { EXIT_RUNTIME };
    fail(err, code)
}

fn run(cli: Cli) -> Result<(), ExitCode> {
    match cli.command {
        Command::Presets => {
            for p in presets() {
                println!("{:<10} {}", p.name, p.description);
            }
        }
        Command::Run {
            config,
            format,
            out_dir,
        } => {
            let format: ReportFormat = format.parse().map_err(classify)?;
            let config = config.resolve().map_err(|e| fail(e, EXIT_CONFIG))?;
            info!(
                "running {} with {} arrivals x {} replications",
                config.label(),
                config.n_arrivals,
                config.replications
            );
            let report = run_experiment(&config).map_err(classify)?;
            for path in emit_report(&report, format, &out_dir).map_err(|e| fail(e, EXIT_RUNTIME))? {
                println!("{}", path.display());
            }
        }
        Command::Compare {
            reports,
            format,
            out_dir,
        } => {
            let format: ReportFormat = format.parse().map_err(classify)?;
            let loaded = reports
                .iter()
                .map(|p| read_report(p))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| fail(e, EXIT_CONFIG))?;
            let cmp = compare_systems(&loaded).map_err(|e| fail(e, EXIT_CONFIG))?;
            for w in &cmp.warnings {
                eprintln!("warning: {w}");
            }
            for path in emit_comparison(&cmp, format, &out_dir).map_err(|e| fail(e, EXIT_RUNTIME))? {
                println!("{}", path.display());
            }
        }
        Command::Trace {
            config,
            replication,
            out,
        } => {
            let config = config.resolve().map_err(|e| fail(e, EXIT_CONFIG))?;
            let run = simulate(
                &config.arrival_law,
                &config.service_law,
                config.n_arrivals,
                &config.seeds,
                replication,
            )
            .map_err(classify)?;
            let io_err = |source| Error::Io {
                path: out.clone(),
                source,
            };
            let file = fs::File::create(&out).map_err(|e| fail(io_err(e), EXIT_RUNTIME))?;
            run.events
                .write_trace(BufWriter::new(file))
                .map_err(|e| fail(io_err(e), EXIT_RUNTIME))?;
            println!("{}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => code,
    }
}
