use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use uniserial_lab::experiments::{self, Experiment, ExperimentConfig, Report};
use uniserial_lab::valuation::{RingConfig, RingFlavor};
use uniserial_lab::{Error, Ordinal};

#[derive(Parser)]
#[command(name = "uniserial-lab", version, about = "Exact experiments with ordinal-indexed valuation rings, special trees and uniserial presentations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Coefficient field: Q or GF(p) for p in 2, 3, 5, 7, 11, 13.
    #[arg(long, global = true, default_value = "Q")]
    field: String,
    #[arg(long, global = true, value_parser = parse_flavor, default_value = "R2")]
    flavor: RingFlavor,
    /// Largest generator index of the type.
    #[arg(long, global = true, value_parser = parse_ordinal, default_value = "w^2")]
    level_bound: Ordinal,
    /// Stand-in top index shifting every generator.
    #[arg(long, global = true, value_parser = parse_ordinal)]
    lambda: Option<Ordinal>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file; defaults to $TA_REPORT_DIR/<experiment>.json, else stdout.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Record wall-clock time in the report (breaks byte-for-byte determinism).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Gap witnesses in R1 and the truncation-key census in R2.
    RingDemo {
        /// Length of the 0/1 strings; 2^N witnesses are compared.
        #[arg(long, default_value_t = 8)]
        r1_witnesses: usize,
        #[arg(long, value_parser = parse_ordinal, default_value = "0")]
        sigma: Ordinal,
        #[arg(long, value_parser = parse_ordinal, default_value = "1")]
        tau: Ordinal,
        #[arg(long, default_value_t = 10)]
        census_reps: usize,
    },
    /// Cauchy families at a limit: congruences, separation and triviality.
    GammaCheck {
        #[arg(long, value_parser = parse_ordinal, default_value = "w")]
        delta: Ordinal,
        #[arg(long, default_value_t = 6)]
        zeta_len: usize,
        #[arg(long, default_value_t = experiments_depth())]
        depth: usize,
    },
    /// Materialize the special tree up to a bound.
    TreeBuild {
        #[arg(long, value_parser = parse_ordinal)]
        bound: Ordinal,
        #[arg(long)]
        budget: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long)]
        check: bool,
    },
    /// Build the non-standard presentation up to a bound (inclusive).
    UniserialBuild {
        #[arg(long, value_parser = parse_ordinal)]
        bound: Ordinal,
        #[arg(long)]
        budget: usize,
        #[arg(long, default_value_t = uniserial_lab::uniserial::DEFAULT_SPAN)]
        span: usize,
        /// Restrict to the sector of a unit z0 (default 1).
        #[arg(long)]
        general: bool,
        #[arg(long, requires = "general")]
        z0: Option<String>,
        #[arg(long, default_value_t = 50)]
        candidates: usize,
        #[arg(long)]
        check: bool,
    },
    /// The full invariant suite at desk scale.
    Invariants,
    /// Run a saved configuration.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

fn experiments_depth() -> usize {
    uniserial_lab::gamma::DEFAULT_DEPTH
}

fn parse_ordinal(s: &str) -> Result<Ordinal, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_flavor(s: &str) -> Result<RingFlavor, String> {
    match s.to_ascii_uppercase().as_str() {
        "R1" => Ok(RingFlavor::R1),
        "R2" => Ok(RingFlavor::R2),
        _ => Err(format!("unknown ring flavor {s:?}; expected R1 or R2")),
    }
}

fn config_of(cli: Cli) -> Result<(ExperimentConfig, Common), Error> {
    let c = cli.common;
    let experiment = match cli.command {
        Command::RingDemo { r1_witnesses, sigma, tau, census_reps } => {
            Experiment::RingDemo { r1_witnesses, sigma, tau, census_reps }
        }
        Command::GammaCheck { delta, zeta_len, depth } => Experiment::GammaCheck { delta, zeta_len, depth },
        Command::TreeBuild { bound, budget, samples, check } => Experiment::TreeBuild { bound, budget, samples, check },
        Command::UniserialBuild { bound, budget, span, general, z0, candidates, check } => {
            Experiment::UniserialBuild { bound, budget, span, general, z0, candidates, check }
        }
        Command::Invariants => Experiment::Invariants,
        Command::Run { config } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| Error::Config(format!("{}: {e}", config.display())))?;
            let cfg: ExperimentConfig =
                serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", config.display())))?;
            return Ok((cfg, c));
        }
    };
    let ring = RingConfig { field: c.field.clone(), flavor: c.flavor, level_bound: c.level_bound.clone(), lambda: c.lambda.clone() };
    Ok((ExperimentConfig::new(experiment, ring, c.seed), c))
}

fn emit(report: &Report, target: Option<PathBuf>) -> std::io::Result<()> {
    let target = target.or_else(|| {
        std::env::var_os("TA_REPORT_DIR").map(|d| PathBuf::from(d).join(format!("{}.json", report.experiment)))
    });
    match target {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(&path, report.to_json())?;
            eprintln!("{}: {} -> {}", report.experiment, if report.pass { "pass" } else { "FAIL" }, path.display());
            Ok(())
        }
        None => {
            print!("{}", report.to_json());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (config, common) = match config_of(cli) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let start = Instant::now();
    let mut report = match experiments::run(&config) {
        Ok(r) => r,
        Err(e @ (Error::Invariant(_) | Error::Budget(_))) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if common.timing {
        report.elapsed_ms = Some(start.elapsed().as_millis());
    }
    if let Err(e) = emit(&report, common.report) {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(2);
    }
    for c in report.checks.iter().filter(|c| !c.pass) {
        eprintln!("failed: {}", c.name);
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
