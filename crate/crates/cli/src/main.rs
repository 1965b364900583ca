#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

mod commands;
mod config;
mod error;
mod output;
mod problem;

use config::RawConfig;
use error::CliError;
use output::Output;
use problem::Problem;

/// Batch runs of critical-radius experiments on uniform grids.
#[derive(Debug, Parser)]
#[command(name = "critrad", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Worker threads (defaults to one per core).
    #[arg(long, env = "CRITRAD_THREADS")]
    threads: Option<usize>,
    /// Output directory; overrides `[output] dir`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Luxemburg norm of `f w` in the variable exponent `p`.
    Norm(Common),
    /// Maximal functions of `f`.
    Maximal(Common),
    /// Critical radius constants, from `rho` or from a potential `v`.
    Rho(Common),
    /// Critical and sub-critical coverings.
    Cover(Common),
    /// Weight-class constants over a ball sweep.
    WeightClass(Common),
    /// Boundedness ratios of the maximal operators.
    Verify(Common),
    /// Potential to critical radius to boundedness ratios.
    Schrodinger(Common),
}

impl Command {
    fn parts(&self) -> (&'static str, &Common) {
        match self {
            Command::Norm(c) => ("norm", c),
            Command::Maximal(c) => ("maximal", c),
            Command::Rho(c) => ("rho", c),
            Command::Cover(c) => ("cover", c),
            Command::WeightClass(c) => ("weight-class", c),
            Command::Verify(c) => ("verify", c),
            Command::Schrodinger(c) => ("schrodinger", c),
        }
    }
}

fn run(name: &str, common: &Common) -> Result<PathBuf, CliError> {
    if let Some(n) = common.threads {
        if n == 0 {
            return Err(CliError::Validation("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Validation(format!("thread pool: {e}")))?;
    }
    let bytes = std::fs::read(&common.config).map_err(|e| {
        CliError::Validation(format!("cannot read {}: {e}", common.config.display()))
    })?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| CliError::Validation(format!("{} is not UTF-8", common.config.display())))?;
    let raw = RawConfig::parse(&text)?;
    let dir = match (&common.out, raw.text("output", "dir")) {
        (Some(d), _) => d.clone(),
        (None, Some(d)) => Path::new(d).to_path_buf(),
        (None, None) => PathBuf::from("critrad-out"),
    };
    let pb = Problem::new(raw)?;
    let radii = pb.radii()?;
    let mut out = Output::create(&dir)?;
    let outcome = match name {
        "norm" => commands::norm(&pb, &mut out),
        "maximal" => commands::maximal(&pb, &mut out),
        "rho" => commands::rho(&pb, &mut out),
        "cover" => commands::cover(&pb, &mut out),
        "weight-class" => commands::weight_class(&pb, &mut out),
        "verify" => commands::verify(&pb, &mut out),
        "schrodinger" => commands::schrodinger(&pb, &mut out),
        _ => unreachable!("clap only yields known subcommands"),
    }?;
    let d = pb.domain;
    let sweep = pb.sweep_spec().ok().map(|(stride, interior, r)| {
        json!({ "stride": stride, "interior": interior, "radii": r.radii() })
    });
    let provenance = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "config_path": common.config.display().to_string(),
        "config_sha256": output::config_hash(&bytes),
        "config": pb.raw.to_map(),
        "seeds": outcome.seeds,
        "threads": rayon::current_num_threads(),
        "timestamp": output::timestamp(),
        "domain": {
            "dim": d.dim(),
            "half_width": d.half_width(),
            "n": d.cells_per_axis(),
            "spacing": d.spacing(),
        },
        "radii": radii.radii(),
        "sweep": sweep,
        "measure": format!("{:?}", pb.measure()?),
    });
    out.report(name, outcome.summary, provenance)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, common) = cli.command.parts();
    match run(name, common) {
        Ok(path) => {
            println!("{}", path.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("critrad {name}: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
