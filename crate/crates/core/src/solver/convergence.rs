//! Error of a manufactured-solution run against its closed form.

use serde::{Deserialize, Serialize};

use super::{run, SolverConfig, StepHook, Termination};
use crate::error::{Error, Result};
use crate::fields::{Level, StateHistory};
use crate::geometry::radial_weight;
use crate::scalar::Real;

struct LastLevel<T>(Option<Level<T>>);

impl<T: Real> StepHook<T> for LastLevel<T> {
    fn on_level(&mut self, history: &StateHistory<T>, _step: usize, last: bool) -> Result<()> {
        if last {
            self.0 = history.latest().cloned();
        }
        Ok(())
    }
}

/// `(Σ_c ∫ |W_c - W_c^exact|² dx dy)^{1/2}` at `t_end` for a configuration
/// with a manufactured case.
pub fn manufactured_error<T: Real>(cfg: &SolverConfig) -> Result<f64> {
    let case = cfg.case.ok_or_else(|| Error::Domain("configuration has no manufactured case".into()))?;
    let mut last = LastLevel(None);
    let summary = run::<T>(cfg, &mut [&mut last])?;
    if let Termination::BlowUp { t, norm } = summary.termination {
        return Err(Error::BlowUp { t, norm });
    }
    let level = last.0.ok_or_else(|| Error::Domain("run produced no levels".into()))?;
    let field = case.field::<T>();
    let grid = level.w[0].grid();
    let mut acc = 0.0;
    for (c, w) in level.w.iter().enumerate() {
        let (exact, _) = field.modes(c, level.t, grid, cfg.k_max);
        for j in 0..grid.len() {
            let wgt = radial_weight(j, grid.jmax, grid.dr).to_f64_();
            let e: f64 = w.ks().map(|k| (w.at(k, j) - exact.at(k, j)).norm_sqr().to_f64_()).sum();
            acc += wgt * std::f64::consts::TAU * e;
        }
    }
    Ok(acc.sqrt())
}

/// One resolution of a refinement study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefinementLevel {
    pub dr: f64,
    pub dt: f64,
    pub error: f64,
}

/// Errors at `levels` successive halvings of `(dr, dt)`, doubling `jmax`.
pub fn refinement_study<T: Real>(base: &SolverConfig, levels: usize) -> Result<Vec<RefinementLevel>> {
    (0..levels)
        .map(|i| {
            let f = (1usize << i) as f64;
            let cfg = SolverConfig { dr: base.dr / f, dt: base.dt / f, jmax: base.jmax << i, ..base.clone() };
            Ok(RefinementLevel { dr: cfg.dr, dt: cfg.dt, error: manufactured_error::<T>(&cfg)? })
        })
        .collect()
}

/// `e_i / e_{i+1}` for consecutive levels.
pub fn error_ratios(levels: &[RefinementLevel]) -> Vec<f64> {
    levels.windows(2).map(|w| w[0].error / w[1].error).collect()
}

/// Reference setup for the smooth bump case: full nonlinearity, `K = 2`.
pub fn bump_reference() -> SolverConfig {
    SolverConfig {
        case: Some(crate::fields::manufactured::ManufacturedCase::Bump),
        k_max: 2,
        jmax: 40,
        dr: 0.2,
        dt: 0.1,
        t_end: 4.0,
        leaves: vec![],
        ..Default::default()
    }
}
