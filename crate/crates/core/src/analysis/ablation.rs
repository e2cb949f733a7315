//! Paired runs with and without the null structure.

use serde::{Deserialize, Serialize};

use super::fit::{default_window, fit_quantity};
use crate::energies::monitor::DecaySample;
use crate::energies::report::EnergyReport;
use crate::error::{Error, Result};
use crate::pipeline::RunArtifacts;
use crate::solver::{Ablation, RunSummary, SolverConfig, Termination};

/// Energy whose growth is compared: order-0 interior energy of both components.
pub const ABLATION_FUNCTIONAL: &str = "E_in[W.W]";
/// Decay quantity whose exponent is recorded.
pub const ABLATION_QUANTITY: &str = "dW0_weighted";

/// What [`ablation_compare`] needs from one run.
pub struct AblationInput<'a> {
    pub config: &'a SolverConfig,
    pub summary: &'a RunSummary,
    pub hyperboloid_reports: &'a [EnergyReport],
    pub decay: &'a [DecaySample],
}

impl<'a> AblationInput<'a> {
    pub fn new<T>(config: &'a SolverConfig, run: &'a RunArtifacts<T>) -> Self {
        AblationInput { config, summary: &run.summary, hyperboloid_reports: &run.hyperboloid_reports, decay: &run.decay }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationSide {
    /// `E(s_end)/E(2)`; infinite if the run blew up.
    pub ratio: f64,
    /// Last hyperboloid reached.
    pub s_end: f64,
    pub blowup_t: Option<f64>,
    pub exponent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationReport {
    pub epsilon: f64,
    pub null_on: AblationSide,
    pub null_off: AblationSide,
    /// `null_off.ratio > null_on.ratio`.
    pub off_worse: bool,
}

fn side(run: &AblationInput<'_>) -> Result<AblationSide> {
    let blowup_t = match run.summary.termination {
        Termination::BlowUp { t, .. } => Some(t),
        Termination::Completed => None,
    };
    let energies: Vec<(f64, f64)> = run
        .hyperboloid_reports
        .iter()
        .filter_map(|r| r.get0(ABLATION_FUNCTIONAL).map(|v| (r.leaf.param(), v)))
        .collect();
    let first = energies.first().ok_or_else(|| Error::Domain("run has no hyperboloid reports".into()))?;
    let last = energies.last().unwrap_or(first);
    let ratio = if blowup_t.is_some() {
        f64::INFINITY
    } else if first.1 == 0.0 {
        1.0
    } else {
        last.1 / first.1
    };
    let exponent =
        fit_quantity(run.decay, ABLATION_QUANTITY, default_window(run.config.t_end)).ok().filter(|f| !f.degenerate).map(|f| f.exponent);
    Ok(AblationSide { ratio, s_end: last.0, blowup_t, exponent })
}

/// Compares a `NullOn` run with a `NullOff` run of otherwise identical configuration.
pub fn ablation_compare(on: &AblationInput<'_>, off: &AblationInput<'_>) -> Result<AblationReport> {
    if on.config.nonlinearity.ablation != Ablation::NullOn || off.config.nonlinearity.ablation != Ablation::NullOff {
        return Err(Error::ConfigMismatch("first run must be null_on, second null_off".into()));
    }
    let mut a = on.config.clone();
    a.nonlinearity.ablation = Ablation::NullOff;
    if &a != off.config {
        let (ta, tb) = (a.to_text(), off.config.to_text());
        let diff: Vec<String> =
            ta.lines().zip(tb.lines()).filter(|(x, y)| x != y).map(|(x, y)| format!("`{x}` vs `{y}`")).collect();
        return Err(Error::ConfigMismatch(diff.join("; ")));
    }
    let null_on = side(on)?;
    let null_off = side(off)?;
    Ok(AblationReport { epsilon: on.config.epsilon, off_worse: null_off.ratio > null_on.ratio, null_on, null_off })
}
