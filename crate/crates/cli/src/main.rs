use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use fsmorse::geometry::SurfacePair;
use fsmorse::index::{EfsOptions, FsOptions, IndexMode};

mod commands;
mod config;
mod output;
mod selftest;

use config::{mode_name, parse_ratio, CommandConfig, Format, RunConfig};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

/// Morse index computations for the Fraser-Sargent minimal surfaces.
#[derive(Debug, Parser)]
#[command(name = "fsmorse", version)]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Run the quick acceptance subset and ignore any subcommand.
    #[arg(long)]
    selftest: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Index and nullity of the complete surface.
    FsIndex {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        l: u32,
        /// Skip the numerics and report closed forms only.
        #[arg(long)]
        closed_form: bool,
        #[arg(long, default_value_t = 1e-4)]
        zero_tol: f64,
        #[arg(long, value_delimiter = ',', default_values_t = [2.0, 4.0, 8.0, 16.0])]
        truncations: Vec<f64>,
        #[arg(long)]
        skip_nullity: bool,
        #[arg(long, default_value_t = 512)]
        nullity_nt: usize,
        #[arg(long, default_value_t = 256)]
        nullity_ntheta: usize,
        #[arg(long, default_value_t = 1 << 18)]
        max_intervals: usize,
    },
    /// Eigenvalue table of the interior problem.
    IfsTable {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        l: u32,
        #[arg(long, default_value_t = 12)]
        mmax: u32,
        #[arg(long, default_value_t = 5)]
        imax: usize,
        #[arg(long, default_value_t = 1e-4)]
        zero_tol: f64,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
        /// Significant digits in CSV cells instead of three decimals.
        #[arg(long)]
        digits: Option<usize>,
    },
    /// Stability certificates for the exterior surface with ratio p.
    EfsStability {
        /// Ratio such as 3/2 or 10.
        #[arg(long)]
        p: String,
        #[arg(long, default_value_t = 50.0)]
        tmax: f64,
        #[arg(long)]
        mmax: Option<u32>,
        #[arg(long, value_delimiter = ',', default_values_t = [2.0, 5.0, 10.0, 20.0])]
        ladder: Vec<f64>,
        #[arg(long, default_value_t = 1e-4)]
        margin: f64,
    },
    /// Steklov spectrum, spectral index and index upper bound.
    Steklov {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        l: u32,
        /// Defaults to k + l.
        #[arg(long)]
        mmax: Option<u32>,
    },
    /// Lipschitz-certified sweeps of the inequality chain.
    VerifyInequalities {
        #[arg(long, default_value_t = 50.0)]
        bmax: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[arg(long, default_value_t = 100.0)]
        tmax: f64,
        #[arg(long, value_delimiter = ',', default_values_t = ["3/2".to_string(), "2".into(), "3".into(), "10".into()])]
        p: Vec<String>,
    },
    /// Closed-form and topological index bounds.
    Bounds {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        l: u32,
        /// Also count negative table entries numerically.
        #[arg(long)]
        numeric: bool,
    },
}

fn build(cli: Cli) -> Result<RunConfig> {
    let command = match cli.command {
        _ if cli.selftest => CommandConfig::Selftest,
        None => anyhow::bail!("a subcommand or --selftest is required"),
        Some(Command::FsIndex {
            k,
            l,
            closed_form,
            zero_tol,
            truncations,
            skip_nullity,
            nullity_nt,
            nullity_ntheta,
            max_intervals,
        }) => {
            let mut options = FsOptions {
                truncations,
                zero_tol,
                skip_nullity,
                nullity_grid: [nullity_nt, nullity_ntheta],
                ..FsOptions::default()
            };
            options.solver.max_intervals = max_intervals;
            let mode = if closed_form {
                IndexMode::ClosedForm
            } else {
                IndexMode::Numeric
            };
            CommandConfig::FsIndex {
                pair: SurfacePair::new(k, l)?,
                mode: mode_name(mode),
                options,
            }
        }
        Some(Command::IfsTable {
            k,
            l,
            mmax,
            imax,
            zero_tol,
            tol,
            digits,
        }) => CommandConfig::IfsTable {
            pair: SurfacePair::new(k, l)?,
            m_max: mmax,
            i_max: imax,
            zero_tol,
            tol,
            digits,
        },
        Some(Command::EfsStability {
            p,
            tmax,
            mmax,
            ladder,
            margin,
        }) => CommandConfig::EfsStability {
            pair: parse_ratio(&p)?,
            options: EfsOptions {
                t_max: tmax,
                m_max: mmax,
                ladder,
                margin,
                ..EfsOptions::default()
            },
        },
        Some(Command::Steklov { k, l, mmax }) => CommandConfig::Steklov {
            pair: SurfacePair::new(k, l)?,
            m_max: mmax.unwrap_or(k + l),
        },
        Some(Command::VerifyInequalities {
            bmax,
            step,
            tmax,
            p,
        }) => CommandConfig::VerifyInequalities {
            b_max: bmax,
            step,
            t_max: tmax,
            p_list: p.iter().map(|s| parse_ratio(s)).collect::<Result<_>>()?,
        },
        Some(Command::Bounds { k, l, numeric }) => CommandConfig::Bounds {
            pair: SurfacePair::new(k, l)?,
            numeric,
        },
    };
    let cfg = RunConfig {
        format: cli.format,
        output: cli.output,
        command,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn exit_code(e: &anyhow::Error) -> u8 {
    use fsmorse::Error as E;
    match e.downcast_ref::<E>() {
        Some(E::Domain(_)) => EXIT_USAGE,
        Some(E::Convergence { .. } | E::Indeterminate { .. } | E::Stiffness { .. }) => EXIT_NUMERIC,
        Some(E::Verification { .. } | E::Consistency(_) | E::Hypothesis { .. }) => EXIT_FAIL,
        None => EXIT_FAIL,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    let cfg = match build(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let outcome = match commands::run(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(exit_code(&e));
        }
    };
    if let Err(e) = outcome.emit(cfg.format, cfg.output.as_deref()) {
        eprintln!("error: {e:#}");
        return ExitCode::from(EXIT_FAIL);
    }
    if outcome.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    }
}
