//! Scenario configuration, parameter sweeps and CSV emission.
//!
//! A sweep varies one axis (amplitude, transmittivity, detector efficiency,
//! modal purity, or variance scale), maximizes the chosen Bell functional at
//! every grid point, and writes one CSV row per point. Identical config and
//! seed give a byte-identical file; interrupted runs are resumed by skipping
//! axis values already present in the output.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Deserialize;

use crate::bell::{optimize, BellResult, DisplacementSet, Functional, OptimizeOptions};
use crate::fidelity::optimal_r;
use crate::fock::click_probability;
use crate::states::{correlation_matrix, GaussianVariances, Parity, StateModel};
use crate::two_mode::for_bell;
use crate::{Error, Result};

/// Quadrature variance relative to vacuum for a squeezing level in dB.
pub fn db_to_variance(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// The swept parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Alpha,
    Transmittivity,
    Epsilon,
    Pm,
    VarianceScale,
}

impl Axis {
    fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "alpha" => Axis::Alpha,
            "T" => Axis::Transmittivity,
            "epsilon" => Axis::Epsilon,
            "pm" => Axis::Pm,
            "variance_scale" => Axis::VarianceScale,
            _ => return Err(Error::Config(format!("unknown sweep_axis '{s}'"))),
        })
    }
}

/// How a variance-scale axis deforms the input variances (A, B).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScaleMode {
    /// A -> k A, B -> k B.
    #[default]
    Multiplicative,
    /// A -> A + s, B -> B + s.
    Additive,
}

/// The state family driven by the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Odd coherent-state superposition; alpha axis.
    Scs,
    /// Squeezed single photon with the fidelity-optimal squeezing for each
    /// amplitude; alpha axis.
    Psgs,
    /// Ideal-click conditional state; T or variance-scale axis.
    Kim,
    /// Inefficient-detector conditional state; T or epsilon axis.
    Lossy,
    /// Dark-count mixture of the lossy state and the transmitted squeezed
    /// vacuum; pm axis.
    DarkMix,
}

/// A fully resolved sweep scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub family: Family,
    pub functional: Functional,
    pub axis: Axis,
    pub grid: Vec<f64>,
    pub starts: usize,
    pub seed: u64,
    pub output: Option<PathBuf>,
    /// Fixed squeezing; ignored for the alpha axis.
    pub r: Option<f64>,
    /// Fixed input variances, overriding `r` (dB pairs resolve to this).
    pub variances: Option<GaussianVariances>,
    pub t: Option<f64>,
    pub epsilon: Option<f64>,
    pub scale_mode: ScaleMode,
}

/// One output row of a sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub axis_value: f64,
    pub bell_value: f64,
    pub success_prob: Option<f64>,
    pub argmax: DisplacementSet,
    pub converged: bool,
}

const CSV_HEADER: &str = "axis,bell,p_success,z1r,z1i,z2r,z2i,z1pr,z1pi,z2pr,z2pi,converged";
/// Fock cutoff for the oracle-derived click probability column.
const CLICK_CUTOFF: usize = 32;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    scenario: BTreeMap<String, RawScenario>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    state: String,
    functional: String,
    sweep_axis: String,
    axis_grid: Vec<f64>,
    starts: Option<usize>,
    seed: Option<u64>,
    output: Option<String>,
    r: Option<f64>,
    db_below: Option<f64>,
    db_above: Option<f64>,
    t: Option<f64>,
    epsilon: Option<f64>,
    scale_mode: Option<String>,
}

/// Parse a TOML config with `[scenario.<name>]` sections. Unknown keys are
/// hard errors.
pub fn parse_config(text: &str) -> Result<Vec<Scenario>> {
    let file: ConfigFile =
        toml::from_str(text).map_err(|e| Error::Config(format!("config parse error: {e}")))?;
    file.scenario
        .into_iter()
        .map(|(name, raw)| resolve(name, raw))
        .collect()
}

pub fn load_config(path: &Path) -> Result<Vec<Scenario>> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}

fn resolve(name: String, raw: RawScenario) -> Result<Scenario> {
    let family = match raw.state.as_str() {
        "scs" => Family::Scs,
        "psgs" => Family::Psgs,
        "kim" => Family::Kim,
        "lossy" => Family::Lossy,
        "dark_mix" => Family::DarkMix,
        other => return Err(Error::Config(format!("unknown state '{other}'"))),
    };
    let functional = match raw.functional.as_str() {
        "chsh" => Functional::Chsh,
        "ch" => Functional::Ch,
        other => return Err(Error::Config(format!("unknown functional '{other}'"))),
    };
    let axis = Axis::parse(&raw.sweep_axis)?;
    let scale_mode = match raw.scale_mode.as_deref() {
        None | Some("multiplicative") => ScaleMode::Multiplicative,
        Some("additive") => ScaleMode::Additive,
        Some(other) => return Err(Error::Config(format!("unknown scale_mode '{other}'"))),
    };
    let variances = match (raw.db_below, raw.db_above) {
        (Some(lo), Some(hi)) => Some(
            GaussianVariances::new(db_to_variance(hi), db_to_variance(lo))
                .map_err(|e| Error::Config(e.to_string()))?,
        ),
        (None, None) => raw.r.map(GaussianVariances::pure),
        _ => {
            return Err(Error::Config(
                "db_below and db_above must be given together".into(),
            ))
        }
    };
    let s = Scenario {
        name,
        family,
        functional,
        axis,
        grid: raw.axis_grid,
        starts: raw.starts.unwrap_or(80),
        seed: raw.seed.unwrap_or(0),
        output: raw.output.map(PathBuf::from),
        r: raw.r,
        variances,
        t: raw.t,
        epsilon: raw.epsilon,
        scale_mode,
    };
    s.validate()?;
    Ok(s)
}

impl Scenario {
    fn validate(&self) -> Result<()> {
        let need = |cond: bool, what: &str| -> Result<()> {
            if cond {
                Ok(())
            } else {
                Err(Error::Config(format!(
                    "scenario '{}': {what}",
                    self.name
                )))
            }
        };
        match (self.family, self.axis) {
            (Family::Scs | Family::Psgs, Axis::Alpha) => Ok(()),
            (Family::Kim, Axis::Transmittivity) => {
                need(self.variances.is_some(), "kim needs r or a dB pair")
            }
            (Family::Kim, Axis::VarianceScale) => {
                need(self.variances.is_some(), "kim needs r or a dB pair")?;
                need(self.t.is_some(), "variance_scale sweep needs a fixed t")
            }
            (Family::Lossy, Axis::Transmittivity) => {
                need(self.r.is_some(), "lossy needs r")?;
                need(self.epsilon.is_some(), "lossy T sweep needs a fixed epsilon")
            }
            (Family::Lossy, Axis::Epsilon) => {
                need(self.r.is_some(), "lossy needs r")?;
                need(self.t.is_some(), "epsilon sweep needs a fixed t")
            }
            (Family::DarkMix, Axis::Pm) => {
                need(self.r.is_some(), "dark_mix needs r")?;
                need(self.t.is_some(), "dark_mix needs a fixed t")?;
                need(self.epsilon.is_some(), "dark_mix needs a fixed epsilon")
            }
            (f, a) => Err(Error::Config(format!(
                "scenario '{}': state {f:?} cannot sweep axis {a:?}",
                self.name
            ))),
        }
    }

    /// The state and (when defined) heralding success probability at one
    /// axis value.
    fn state_at(&self, x: f64) -> Result<(StateModel, Option<f64>)> {
        match (self.family, self.axis) {
            (Family::Scs, Axis::Alpha) => Ok((
                StateModel::Scs {
                    alpha: x,
                    parity: Parity::Odd,
                },
                None,
            )),
            (Family::Psgs, Axis::Alpha) => Ok((StateModel::PurePsgs { r: optimal_r(x)? }, None)),
            (Family::Kim, Axis::Transmittivity) => {
                let v = self.variances.unwrap();
                let p = crate::states::success_prob_ideal(v, x)?;
                Ok((StateModel::KimConditional { variances: v, t: x }, Some(p)))
            }
            (Family::Kim, Axis::VarianceScale) => {
                let base = self.variances.unwrap();
                let v = match self.scale_mode {
                    ScaleMode::Multiplicative => GaussianVariances::new(x * base.a, x * base.b)?,
                    ScaleMode::Additive => GaussianVariances::new(base.a + x, base.b + x)?,
                };
                let t = self.t.unwrap();
                let p = crate::states::success_prob_ideal(v, t)?;
                Ok((StateModel::KimConditional { variances: v, t }, Some(p)))
            }
            (Family::Lossy, Axis::Transmittivity) => {
                let (r, eps) = (self.r.unwrap(), self.epsilon.unwrap());
                let p = click_probability(GaussianVariances::pure(r), x, eps, CLICK_CUTOFF)?;
                Ok((
                    StateModel::LossyPsgs {
                        r,
                        t: x,
                        epsilon: eps,
                    },
                    Some(p),
                ))
            }
            (Family::Lossy, Axis::Epsilon) => {
                let (r, t) = (self.r.unwrap(), self.t.unwrap());
                let p = click_probability(GaussianVariances::pure(r), t, x, CLICK_CUTOFF)?;
                Ok((StateModel::LossyPsgs { r, t, epsilon: x }, Some(p)))
            }
            (Family::DarkMix, Axis::Pm) => {
                let (r, t, eps) = (self.r.unwrap(), self.t.unwrap(), self.epsilon.unwrap());
                let cm = correlation_matrix(GaussianVariances::pure(r), t)?;
                let transmitted = GaussianVariances::new(cm.n1, cm.n2)?;
                let state = StateModel::dark_mix(
                    StateModel::LossyPsgs { r, t, epsilon: eps },
                    StateModel::Squeezed {
                        variances: transmitted,
                    },
                    x,
                )?;
                let p = click_probability(GaussianVariances::pure(r), t, eps, CLICK_CUTOFF)?;
                Ok((state, Some(p)))
            }
            _ => unreachable!("validated in Scenario::validate"),
        }
    }

    fn row_at(&self, x: f64) -> Result<SweepRow> {
        let (state, success_prob) = self.state_at(x)?;
        let two = for_bell(&state, self.functional.kind())?;
        let opts = OptimizeOptions {
            starts: self.starts,
            seed: self.seed,
            ..OptimizeOptions::default()
        };
        match optimize(self.functional, &two, opts) {
            Ok(BellResult {
                value,
                argmax,
                converged,
                ..
            }) => Ok(SweepRow {
                axis_value: x,
                bell_value: value,
                success_prob,
                argmax,
                converged,
            }),
            Err(Error::NonConvergence) => Ok(SweepRow {
                axis_value: x,
                bell_value: f64::NAN,
                success_prob,
                argmax: DisplacementSet::ZERO,
                converged: false,
            }),
            Err(e) => Err(e),
        }
    }
}

/// Run every grid point of a scenario; rows come back in axis order. Optimizer
/// non-convergence is flagged per row, any other failure aborts the run.
pub fn run_scenario(s: &Scenario) -> Result<Vec<SweepRow>> {
    s.validate()?;
    s.grid.par_iter().map(|&x| s.row_at(x)).collect()
}

fn fmt(v: f64) -> String {
    format!("{v:.11e}")
}

fn format_row(row: &SweepRow) -> String {
    let a = row.argmax.to_array();
    let p = row.success_prob.map(fmt).unwrap_or_default();
    let mut s = format!("{},{},{p}", fmt(row.axis_value), fmt(row.bell_value));
    for v in a {
        s.push(',');
        s.push_str(&fmt(v));
    }
    s.push(',');
    s.push_str(if row.converged { "true" } else { "false" });
    s
}

fn write_lines(path: &Path, lines: &[String]) -> Result<()> {
    let io_err = |source: std::io::Error| Error::Io {
        path: path.display().to_string(),
        source,
    };
    let mut f = std::fs::File::create(path).map_err(io_err)?;
    for line in lines {
        writeln!(f, "{line}").map_err(io_err)?;
    }
    Ok(())
}

/// Write rows as CSV: fixed header, 12 significant digits, LF line endings,
/// empty success-probability field when undefined.
pub fn emit_csv(rows: &[SweepRow], path: &Path) -> Result<()> {
    let mut lines = vec![CSV_HEADER.to_string()];
    lines.extend(rows.iter().map(format_row));
    write_lines(path, &lines)
}

/// Reduced two-column schema used for the fidelity curve.
pub fn emit_fidelity_csv(rows: &[(f64, f64)], path: &Path) -> Result<()> {
    let mut lines = vec!["alpha,F".to_string()];
    lines.extend(rows.iter().map(|(a, f)| format!("{},{}", fmt(*a), fmt(*f))));
    write_lines(path, &lines)
}

/// Run a scenario into a CSV file, skipping axis values already present in
/// the file. The finished file is byte-identical to an uninterrupted run.
pub fn run_scenario_to_file(s: &Scenario, path: &Path) -> Result<Vec<SweepRow>> {
    s.validate()?;
    let mut existing: BTreeMap<String, String> = BTreeMap::new();
    if path.exists() {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        for line in text.lines().skip(1) {
            if let Some((axis, _)) = line.split_once(',') {
                existing.insert(axis.to_string(), line.to_string());
            }
        }
    }
    let missing: Vec<f64> = s
        .grid
        .iter()
        .copied()
        .filter(|x| !existing.contains_key(&fmt(*x)))
        .collect();
    let fresh: Vec<SweepRow> = missing.par_iter().map(|&x| s.row_at(x)).collect::<Result<_>>()?;
    let fresh_by_axis: BTreeMap<String, String> = fresh
        .iter()
        .map(|r| (fmt(r.axis_value), format_row(r)))
        .collect();

    let mut lines = vec![CSV_HEADER.to_string()];
    for &x in &s.grid {
        let key = fmt(x);
        let line = existing
            .get(&key)
            .or_else(|| fresh_by_axis.get(&key))
            .expect("every grid value is either existing or freshly computed");
        lines.push(line.clone());
    }
    write_lines(path, &lines)?;
    Ok(fresh)
}

/// A preconfigured figure scenario.
#[derive(Debug, Clone)]
pub enum FigurePreset {
    /// Maximized fidelity against amplitude; reduced two-column CSV schema.
    FidelityCurve { alphas: Vec<f64> },
    Sweep(Scenario),
}

fn step_grid(from: f64, step: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| from + step * i as f64).collect()
}

fn t_grid() -> Vec<f64> {
    step_grid(0.55, 0.01, 45)
}

/// The preconfigured scenario behind a numbered figure panel.
pub fn figure(n: u8, variant: &str) -> Result<FigurePreset> {
    let bad = || Error::UnknownFigure(format!("{n}:{variant}"));
    let sweep = |name: &str,
                 family: Family,
                 functional: Functional,
                 axis: Axis,
                 grid: Vec<f64>,
                 r: Option<f64>,
                 variances: Option<GaussianVariances>,
                 t: Option<f64>,
                 epsilon: Option<f64>| {
        FigurePreset::Sweep(Scenario {
            name: name.to_string(),
            family,
            functional,
            axis,
            grid,
            starts: 80,
            seed: 0,
            output: None,
            r,
            variances,
            t,
            epsilon,
            scale_mode: ScaleMode::Multiplicative,
        })
    };
    let db_pair = |lo: f64, hi: f64| {
        GaussianVariances::new(db_to_variance(hi), db_to_variance(lo))
            .expect("preset dB pairs are physical")
    };
    let alpha_grid = step_grid(0.05, 0.05, 40);
    Ok(match (n, variant) {
        (1, "") => FigurePreset::FidelityCurve {
            alphas: step_grid(0.01, 0.01, 250),
        },
        (2, "" | "a" | "a-psgs") => sweep(
            "fig2a-psgs",
            Family::Psgs,
            Functional::Chsh,
            Axis::Alpha,
            alpha_grid,
            None,
            None,
            None,
            None,
        ),
        (2, "a-scs") => sweep(
            "fig2a-scs",
            Family::Scs,
            Functional::Chsh,
            Axis::Alpha,
            alpha_grid,
            None,
            None,
            None,
            None,
        ),
        (2, "b" | "b-psgs") => sweep(
            "fig2b-psgs",
            Family::Psgs,
            Functional::Ch,
            Axis::Alpha,
            alpha_grid,
            None,
            None,
            None,
            None,
        ),
        (2, "b-scs") => sweep(
            "fig2b-scs",
            Family::Scs,
            Functional::Ch,
            Axis::Alpha,
            alpha_grid,
            None,
            None,
            None,
            None,
        ),
        (3, "" | "pure") => sweep(
            "fig3-pure",
            Family::Kim,
            Functional::Chsh,
            Axis::Transmittivity,
            t_grid(),
            Some(0.3),
            Some(GaussianVariances::pure(0.3)),
            None,
            None,
        ),
        (3, "mixed") => sweep(
            "fig3-mixed",
            Family::Kim,
            Functional::Chsh,
            Axis::Transmittivity,
            t_grid(),
            None,
            Some(db_pair(-2.56, 2.65)),
            None,
            None,
        ),
        (4, "" | "pure") => sweep(
            "fig4-pure",
            Family::Kim,
            Functional::Ch,
            Axis::Transmittivity,
            t_grid(),
            Some(0.3),
            Some(GaussianVariances::pure(0.3)),
            None,
            None,
        ),
        (4, "mixed104") => sweep(
            "fig4-mixed104",
            Family::Kim,
            Functional::Ch,
            Axis::Transmittivity,
            t_grid(),
            None,
            Some(db_pair(-2.52, 2.69)),
            None,
            None,
        ),
        (4, "mixed108") => sweep(
            "fig4-mixed108",
            Family::Kim,
            Functional::Ch,
            Axis::Transmittivity,
            t_grid(),
            None,
            Some(db_pair(-2.43, 2.78)),
            None,
            None,
        ),
        (4, "experimental") => sweep(
            "fig4-experimental",
            Family::Kim,
            Functional::Ch,
            Axis::Transmittivity,
            t_grid(),
            None,
            Some(db_pair(-3.57, 4.26)),
            None,
            None,
        ),
        (5, "" | "eps1.0" | "eps0.8" | "eps0.6") => {
            let eps = match variant {
                "" | "eps1.0" => 1.0,
                "eps0.8" => 0.8,
                _ => 0.6,
            };
            sweep(
                &format!("fig5-eps{eps}"),
                Family::Lossy,
                Functional::Chsh,
                Axis::Transmittivity,
                t_grid(),
                Some(0.3),
                None,
                None,
                Some(eps),
            )
        }
        (6, "" | "a-eps1.0" | "a-eps0.8" | "a-eps0.6") => {
            let eps = match variant {
                "" | "a-eps1.0" => 1.0,
                "a-eps0.8" => 0.8,
                _ => 0.6,
            };
            sweep(
                &format!("fig6a-eps{eps}"),
                Family::Lossy,
                Functional::Ch,
                Axis::Transmittivity,
                t_grid(),
                Some(0.3),
                None,
                None,
                Some(eps),
            )
        }
        (6, "b-t0.95" | "b-t0.98") => {
            let t = if variant == "b-t0.95" { 0.95 } else { 0.98 };
            sweep(
                &format!("fig6b-t{t}"),
                Family::Lossy,
                Functional::Ch,
                Axis::Epsilon,
                step_grid(0.3, 0.02, 36),
                Some(0.3),
                None,
                Some(t),
                None,
            )
        }
        (7, "" | "t0.99" | "t0.95") => {
            let t = if variant == "t0.95" { 0.95 } else { 0.99 };
            sweep(
                &format!("fig7-t{t}"),
                Family::DarkMix,
                Functional::Ch,
                Axis::Pm,
                step_grid(0.5, 0.02, 26),
                Some(0.3),
                None,
                Some(t),
                Some(0.6),
            )
        }
        _ => return Err(bad()),
    })
}
