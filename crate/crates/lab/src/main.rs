use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use cattaneo_lab::config::{DataKind, ExperimentConfig};
use cattaneo_lab::experiments::{self, Outcome};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "cattaneo", version, about = "Decay-rate laboratory for compressible Navier-Stokes with Cattaneo heat conduction")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

/// Flags that override values from the config file.
#[derive(Args)]
struct Common {
    /// TOML config; every section is optional.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long = "R", global = true)]
    r_gas: Option<f64>,
    #[arg(long, global = true)]
    gamma: Option<f64>,
    #[arg(long, global = true)]
    kappa: Option<f64>,
    #[arg(long, global = true)]
    tau: Option<f64>,
    #[arg(long, global = true)]
    nu_tilde: Option<f64>,
    #[arg(long, global = true)]
    eta_tilde: Option<f64>,
    #[arg(long, global = true)]
    rho_star: Option<f64>,
    #[arg(long, global = true)]
    theta_star: Option<f64>,
    #[arg(long, global = true)]
    t_min: Option<f64>,
    #[arg(long, global = true)]
    t_max: Option<f64>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Periodic grid points per axis.
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    dt: Option<f64>,
    #[arg(long, global = true)]
    t_final: Option<f64>,
    #[arg(long, global = true)]
    amplitude: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    data: Option<DataArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum DataArg {
    Lowerbound,
    Indicator,
    Gaussian,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalue branches over a log grid of radii, with gap constants.
    Spectrum,
    /// Convergence orders of the low/high-frequency eigenvalue expansions.
    VerifyExpansions,
    /// Green matrix at one frequency and time by every method.
    Green {
        /// Frequency vector `x,y,z`.
        #[arg(long, value_delimiter = ',', default_values_t = [0.3, 0.0, 0.0])]
        xi: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        time: f64,
    },
    /// Whole-space norm series and fitted decay exponents.
    LinearDecay,
    /// Compensated norms of the lower-bound data and the Z1 integral.
    LowerBound,
    /// Cattaneo vs Fourier-law norm series and the relaxation limit.
    CompareFourier,
    /// Periodic nonlinear run with conservation/entropy monitors.
    Nonlinear,
    /// Fit an algebraic decay exponent to one column of a CSV with a `t` column.
    Fit {
        input: PathBuf,
        #[arg(long)]
        column: String,
        /// Fit window `t_min,t_max`.
        #[arg(long, value_delimiter = ',')]
        window: Option<Vec<f64>>,
    },
    /// Run the acceptance criteria; exit status 0 iff all executed ones pass.
    Accept {
        /// Criterion numbers to run (default: all).
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
        /// Worker threads (default: available parallelism).
        #[arg(long)]
        jobs: Option<usize>,
    },
}

fn resolve(c: &Common) -> Result<ExperimentConfig> {
    let mut cfg = match &c.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    let ph = &mut cfg.physical;
    let set = |dst: &mut f64, v: Option<f64>| {
        if let Some(v) = v {
            *dst = v;
        }
    };
    set(&mut ph.r_gas, c.r_gas);
    set(&mut ph.gamma, c.gamma);
    set(&mut ph.kappa, c.kappa);
    set(&mut ph.tau, c.tau);
    set(&mut ph.nu_tilde, c.nu_tilde);
    set(&mut ph.eta_tilde, c.eta_tilde);
    set(&mut ph.rho_star, c.rho_star);
    set(&mut ph.theta_star, c.theta_star);
    set(&mut cfg.time.t_min, c.t_min);
    set(&mut cfg.time.t_max, c.t_max);
    set(&mut cfg.time.dt, c.dt);
    set(&mut cfg.time.t_final, c.t_final);
    set(&mut cfg.data.amplitude, c.amplitude);
    if let Some(v) = c.samples {
        cfg.time.samples = v;
    }
    if let Some(v) = c.n {
        cfg.grid.n = v;
    }
    if let Some(v) = c.seed {
        cfg.data.seed = v;
    }
    if let Some(d) = c.data {
        cfg.data.kind = match d {
            DataArg::Lowerbound => DataKind::Lowerbound,
            DataArg::Indicator => DataKind::Indicator,
            DataArg::Gaussian => DataKind::Gaussian,
        };
    }
    if let Some(o) = &c.out {
        cfg.output.dir = o.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cli: Cli) -> Result<bool> {
    let cfg = resolve(&cli.common).context("configuration")?;
    let outcome: Outcome = match cli.command {
        Command::Spectrum => experiments::spectrum(&cfg)?,
        Command::VerifyExpansions => experiments::verify_expansions_cmd(&cfg)?,
        Command::Green { xi, time } => {
            let xi: [f64; 3] = xi.try_into().map_err(|v: Vec<f64>| anyhow::anyhow!("--xi needs 3 components, got {}", v.len()))?;
            experiments::green(&cfg, xi, time)?
        }
        Command::LinearDecay => experiments::linear_decay(&cfg)?,
        Command::LowerBound => experiments::lower_bound(&cfg)?,
        Command::CompareFourier => experiments::compare_fourier(&cfg)?,
        Command::Nonlinear => experiments::nonlinear(&cfg)?,
        Command::Fit { input, column, window } => {
            let window = window
                .map(|w| <[f64; 2]>::try_from(w).map_err(|v| anyhow::anyhow!("--window needs 2 values, got {}", v.len())))
                .transpose()?;
            experiments::fit(&cfg, &input, &column, window)?
        }
        Command::Accept { only, jobs } => {
            let workers = jobs.unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
            let (rep, outcome) = experiments::accept(&cfg, &only, workers)?;
            for c in &rep.criteria {
                eprintln!("{}", c.line());
            }
            outcome
        }
    };
    println!("{}", serde_json::to_string_pretty(&outcome.summary)?);
    Ok(outcome.pass)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
