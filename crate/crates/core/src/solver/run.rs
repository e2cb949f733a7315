//! Time loop with diagnostic hooks.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{initial_data, step, EvolvedPair, Rhs, SolverConfig};
use crate::error::{Error, Result};
use crate::fields::snapshot::Snapshot;
use crate::fields::{Level, StateHistory};
use crate::geometry::T0;
use crate::scalar::{lit, Real};

/// Depth of the level buffer handed to hooks.
pub const HISTORY_DEPTH: usize = 4;

/// One line of the run log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRecord {
    pub step: usize,
    pub t: f64,
    pub cfl: f64,
    pub max_w: f64,
    pub flat_energy: f64,
    /// Seconds per step since the previous record (wall clock, log only).
    pub wall_per_step: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Termination {
    Completed,
    BlowUp { t: f64, norm: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub termination: Termination,
    pub steps: usize,
    pub t_final: f64,
    pub initial_energy: f64,
    pub final_energy: f64,
}

/// Observer of the evolution. Every method has a no-op default.
pub trait StepHook<T: Real> {
    /// Called after each level (with `∂_t²W` filled) enters the history.
    /// `last` marks the final level of the run.
    fn on_level(&mut self, _history: &StateHistory<T>, _step: usize, _last: bool) -> Result<()> {
        Ok(())
    }

    fn on_snapshot(&mut self, _snap: &Snapshot<T>) -> Result<()> {
        Ok(())
    }

    fn on_log(&mut self, _rec: &LogRecord) {}
}

fn level_of<T: Real>(t: T, s: &EvolvedPair<T>, acc: &EvolvedPair<T>) -> Level<T> {
    Level { t, w: s.w.to_vec(), dw: s.dw.to_vec(), ddw: Some(acc.dw.to_vec()) }
}

/// Evolves from `t = 2` to `t_end`.
///
/// A non-finite state or a flat energy above `blowup_factor` times its
/// initial value ends the run with [`Termination::BlowUp`]; hooks still see
/// the last finite level with `last = true`.
pub fn run<T: Real>(cfg: &SolverConfig, hooks: &mut [&mut dyn StepHook<T>]) -> Result<RunSummary> {
    cfg.validate()?;
    let rhs = Rhs::<T>::from_config(cfg);
    let mut state = initial_data::<T>(cfg);
    let dt = lit::<T>(cfg.dt);
    let n_steps = cfg.n_steps();
    let mut history = StateHistory::new(HISTORY_DEPTH);
    let e0 = state.flat_energy(rhs.laplacian()).to_f64_();
    let ceiling = e0 * cfg.blowup_factor;
    let mut clock = Instant::now();
    let mut since_log = 0usize;
    let mut n = 0usize;
    let mut termination = Termination::Completed;
    let mut energy = e0;
    let t_of = |n: usize| lit::<T>(T0) + dt * T::from_usize_(n);
    loop {
        let t = t_of(n);
        let k1 = rhs.eval(&state, t)?;
        history.push(level_of(t, &state, &k1))?;
        let done = n == n_steps;
        if cfg.snapshot_every > 0 && (n % cfg.snapshot_every == 0 || done) {
            let snap = Snapshot { t, w: state.w.to_vec(), dw: state.dw.to_vec() };
            for h in hooks.iter_mut() {
                h.on_snapshot(&snap)?;
            }
        }
        if n % cfg.diag_every == 0 || done {
            let wall = clock.elapsed().as_secs_f64() / since_log.max(1) as f64;
            clock = Instant::now();
            since_log = 0;
            let rec = LogRecord {
                step: n,
                t: t.to_f64_(),
                cfl: cfg.cfl(),
                max_w: state.max_abs().to_f64_(),
                flat_energy: energy,
                wall_per_step: wall,
            };
            for h in hooks.iter_mut() {
                h.on_log(&rec);
            }
        }
        for h in hooks.iter_mut() {
            h.on_level(&history, n, done)?;
        }
        if done {
            break;
        }
        let next = match step(&rhs, &state, t, dt, Some(k1)) {
            Ok(s) => s,
            Err(Error::NonFinite(_)) => {
                termination = Termination::BlowUp { t: t_of(n + 1).to_f64_(), norm: f64::INFINITY };
                break;
            }
            Err(e) => return Err(e),
        };
        let e = next.flat_energy(rhs.laplacian()).to_f64_();
        if e0 > 0.0 && (e > ceiling || !e.is_finite()) {
            termination = Termination::BlowUp { t: t_of(n + 1).to_f64_(), norm: e };
            break;
        }
        state = next;
        energy = e;
        n += 1;
        since_log += 1;
    }
    if let Termination::BlowUp { .. } = termination {
        // mark the last finite level as final for streaming collectors
        for h in hooks.iter_mut() {
            h.on_level(&history, n, true)?;
        }
    }
    Ok(RunSummary {
        termination,
        steps: n,
        t_final: t_of(n).to_f64_(),
        initial_energy: e0,
        final_energy: energy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::Nonlinearity;

    #[derive(Default)]
    struct Recorder {
        levels: usize,
        lasts: usize,
        logs: Vec<LogRecord>,
        snaps: Vec<f64>,
    }

    impl StepHook<f64> for Recorder {
        fn on_level(&mut self, h: &StateHistory<f64>, _step: usize, last: bool) -> Result<()> {
            assert!(h.latest().unwrap().ddw.is_some());
            self.levels += 1;
            self.lasts += usize::from(last);
            Ok(())
        }
        fn on_snapshot(&mut self, s: &Snapshot<f64>) -> Result<()> {
            self.snaps.push(s.t);
            Ok(())
        }
        fn on_log(&mut self, r: &LogRecord) {
            self.logs.push(r.clone());
        }
    }

    #[test]
    fn zero_data_stays_zero() {
        let cfg = SolverConfig { epsilon: 0.0, t_end: 2.5, jmax: 100, ..Default::default() };
        let mut rec = Recorder::default();
        let s = run::<f64>(&cfg, &mut [&mut rec]).unwrap();
        assert_eq!(s.termination, Termination::Completed);
        assert_eq!(s.final_energy, 0.0);
        assert!(rec.logs.iter().all(|l| l.max_w == 0.0));
    }

    #[test]
    fn hooks_see_every_level_once() {
        let cfg = SolverConfig { t_end: 2.5, jmax: 100, snapshot_every: 5, diag_every: 4, ..Default::default() };
        let mut rec = Recorder::default();
        let s = run::<f64>(&cfg, &mut [&mut rec]).unwrap();
        assert_eq!(s.steps, 20);
        assert_eq!(rec.levels, 21);
        assert_eq!(rec.lasts, 1);
        assert_eq!(rec.snaps.len(), 5);
        assert_eq!(rec.logs.len(), 6);
        assert!((s.t_final - 2.5).abs() < 1e-12);
    }

    #[test]
    fn blow_up_is_reported() {
        // strongly focusing non-null source
        let mut cfg = SolverConfig { t_end: 6.0, jmax: 200, epsilon: 2.0, blowup_factor: 10.0, ..Default::default() };
        cfg.nonlinearity = Nonlinearity { q0: [[[-20.0, 0.0], [0.0, 0.0]], [[0.0; 2]; 2]], quasilinear: false, ablation: crate::solver::Ablation::NullOff };
        let mut rec = Recorder::default();
        let s = run::<f64>(&cfg, &mut [&mut rec]).unwrap();
        assert!(matches!(s.termination, Termination::BlowUp { .. }), "{s:?}");
        assert_eq!(rec.lasts, 1);
    }
}
