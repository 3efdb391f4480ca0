use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cgsme::config::{validate, Format, Model, RunConfig, Severity, Task};
use cgsme::driver::run;
use cgsme::exact3::ConvolutionScheme;
use cgsme::{Error, Result};

#[derive(Parser)]
#[command(name = "cgsme", version, about = "Coarse-grained vs rotating-wave master equations against exact dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact V-system trajectory.
    Exact(Flags),
    /// Coarse-grained master-equation trajectory at a given --dt.
    Cg(Flags),
    /// Rotating-wave master-equation trajectory.
    Rwa(Flags),
    /// Exact, coarse-grained and rotating-wave trajectories plus their distances.
    Compare(Flags),
    /// Search for the coarse-graining time closest to the exact dynamics.
    Optimize(Flags),
    /// Rate and Lamb-shift matrices over a range of coarse-graining times.
    RatesScan(Flags),
    /// Two-level pure-dephasing decay functions.
    Dephasing(Flags),
    /// Run every override listed under `sweep` in the config file.
    Sweep(Flags),
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct Flags {
    /// JSON config document; flags override its fields.
    #[arg(long)]
    config: Option<String>,
    #[arg(long)]
    omega1: Option<f64>,
    #[arg(long)]
    omega2: Option<f64>,
    #[arg(long)]
    omega0: Option<f64>,
    #[arg(long)]
    g: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    omega_c: Option<f64>,
    /// Inverse temperature, or `inf`.
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    /// Comma-separated coarse-graining times.
    #[arg(long, value_delimiter = ',')]
    dt_values: Option<Vec<f64>>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    subsample: Option<usize>,
    /// riemann or trapezoid.
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    initial_level: Option<usize>,
    #[arg(long)]
    search_lo: Option<f64>,
    #[arg(long)]
    search_hi: Option<f64>,
    #[arg(long)]
    n_grid: Option<usize>,
    #[arg(long)]
    cache_dir: Option<String>,
    /// Output path stem.
    #[arg(long)]
    out: Option<String>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
}

fn build_config(task: Task, f: Flags) -> Result<RunConfig> {
    let mut cfg = match &f.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::config("config", format!("{path}: {e}")))?;
            RunConfig::from_json(&text)?
        }
        None => RunConfig::default(),
    };
    cfg.task = task;
    if task == Task::Dephasing {
        cfg.model = Model::Twolevel;
    }
    macro_rules! set {
        ($($field:ident),*) => { $(if let Some(v) = f.$field { cfg.$field = v; })* };
    }
    set!(omega1, omega2, omega0, g, omega_c, beta, step, subsample, initial_level, n_grid, out);
    macro_rules! set_opt {
        ($($field:ident),*) => { $(if f.$field.is_some() { cfg.$field = f.$field; })* };
    }
    set_opt!(eta, dt, dt_values, t_max, search_lo, search_hi, cache_dir);
    if let Some(s) = &f.scheme {
        cfg.scheme = s.parse::<ConvolutionScheme>()?;
    }
    if let Some(s) = &f.format {
        cfg.format = s.parse::<Format>()?;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (task, flags) = match cli.command {
        Command::Exact(f) => (Task::Exact, f),
        Command::Cg(f) => (Task::Cg, f),
        Command::Rwa(f) => (Task::Rwa, f),
        Command::Compare(f) => (Task::Compare, f),
        Command::Optimize(f) => (Task::Optimize, f),
        Command::RatesScan(f) => (Task::RatesScan, f),
        Command::Dephasing(f) => (Task::Dephasing, f),
        Command::Sweep(f) => (Task::Sweep, f),
    };
    let outcome = build_config(task, flags).and_then(|cfg| {
        for issue in validate(&cfg).iter().filter(|i| i.severity == Severity::Warning) {
            eprintln!("{issue}");
        }
        run(&cfg)
    });
    match outcome {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
