//! Effective run configuration, embedded verbatim in every report.

use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::ValueEnum;
use fsmorse::geometry::SurfacePair;
use fsmorse::index::{EfsOptions, FsOptions, IndexMode};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub format: Format,
    pub output: Option<PathBuf>,
    #[serde(flatten)]
    pub command: CommandConfig,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum CommandConfig {
    FsIndex {
        pair: SurfacePair,
        mode: &'static str,
        options: FsOptions,
    },
    IfsTable {
        pair: SurfacePair,
        m_max: u32,
        i_max: usize,
        zero_tol: f64,
        tol: f64,
        /// Significant digits in CSV cells; fixed three decimals when absent.
        digits: Option<usize>,
    },
    EfsStability {
        pair: SurfacePair,
        options: EfsOptions,
    },
    Steklov {
        pair: SurfacePair,
        m_max: u32,
    },
    VerifyInequalities {
        b_max: f64,
        step: f64,
        t_max: f64,
        p_list: Vec<SurfacePair>,
    },
    Bounds {
        pair: SurfacePair,
        numeric: bool,
    },
    Selftest,
}

pub const MAX_GRID: usize = 1 << 18;

pub(crate) fn mode_name(mode: IndexMode) -> &'static str {
    match mode {
        IndexMode::ClosedForm => "closed-form",
        IndexMode::Numeric => "numeric",
    }
}

fn check_tol(name: &str, v: f64) -> Result<()> {
    if !(1e-14..=1e-2).contains(&v) {
        bail!("{name} = {v} is outside [1e-14, 1e-2]");
    }
    Ok(())
}

fn check_grid(name: &str, v: usize) -> Result<()> {
    if v == 0 || v > MAX_GRID {
        bail!("{name} = {v} is outside [1, 2^18]");
    }
    Ok(())
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        bail!("{name} must be positive and finite, got {v}");
    }
    Ok(())
}

impl RunConfig {
    /// Range checks on user overrides; failures are usage errors.
    pub fn validate(&self) -> Result<()> {
        match &self.command {
            CommandConfig::FsIndex { options, .. } => {
                check_tol("zero-tol", options.zero_tol)?;
                check_grid("max-intervals", options.solver.max_intervals)?;
                check_grid("nullity grid", options.nullity_grid[0])?;
                check_grid("nullity grid", options.nullity_grid[1])?;
                if options.truncations.len() < 3 {
                    bail!("at least three truncations are needed");
                }
                for &t in &options.truncations {
                    check_positive("truncation", t)?;
                }
            }
            CommandConfig::IfsTable {
                i_max,
                zero_tol,
                tol,
                digits,
                ..
            } => {
                if *i_max == 0 {
                    bail!("imax must be at least 1");
                }
                check_tol("zero-tol", *zero_tol)?;
                check_tol("tol", *tol)?;
                if let Some(d) = digits {
                    if !(1..=17).contains(d) {
                        bail!("digits must lie in 1..=17");
                    }
                }
            }
            CommandConfig::EfsStability { options, .. } => {
                check_positive("tmax", options.t_max)?;
                check_tol("margin", options.margin)?;
                check_tol("eigen-tol", options.eigen_tol)?;
                for &t in &options.ladder {
                    check_positive("ladder rung", t)?;
                }
            }
            CommandConfig::VerifyInequalities {
                b_max, step, t_max, ..
            } => {
                check_positive("bmax", *b_max)?;
                check_positive("tmax", *t_max)?;
                if !(*step > 0.0 && *step <= 0.1) {
                    bail!("step must lie in (0, 0.1], got {step}");
                }
            }
            CommandConfig::Steklov { .. }
            | CommandConfig::Bounds { .. }
            | CommandConfig::Selftest => {}
        }
        Ok(())
    }
}

/// `"3/2"` or `"10"`.
pub fn parse_ratio(s: &str) -> Result<SurfacePair> {
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim().parse::<u32>()?, b.trim().parse::<u32>()?),
        None => (s.trim().parse::<u32>()?, 1),
    };
    Ok(SurfacePair::from_ratio(num, den)?)
}
