//! Time-slice diagnostics collected during a run.

use serde::{Deserialize, Serialize};

use super::report::{time_slice_report, EnergyReport};
use super::Leaf;
use crate::error::Result;
use crate::fields::StateHistory;
use crate::scalar::Real;
use crate::solver::StepHook;

/// Pointwise decay quantities of one component, sup over `r < t - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecaySample {
    pub t: f64,
    /// `sup |∂W_0| ⟨t - r⟩^{1/2}`, `|∂W_0|² = |∂_t W_0|² + |∂_r W_0|²`.
    pub dw0_weighted: f64,
    /// `sup ‖W̃‖_{L²_y}`.
    pub wt_l2y: f64,
    /// `sup ‖∂_y W̃‖_{L²_y}`.
    pub dy_wt_l2y: f64,
    /// `sup |B W_0|`.
    pub zw0: f64,
}

impl DecaySample {
    pub const QUANTITIES: [&'static str; 4] = ["dW0_weighted", "Wt_L2y", "dyWt_L2y", "ZW0"];

    pub fn get(&self, quantity: &str) -> Option<f64> {
        match quantity {
            "dW0_weighted" => Some(self.dw0_weighted),
            "Wt_L2y" => Some(self.wt_l2y),
            "dyWt_L2y" => Some(self.dy_wt_l2y),
            "ZW0" => Some(self.zw0),
            _ => None,
        }
    }
}

/// Decay quantities of component `comp` on a time slice.
pub fn decay_sample<T: Real>(leaf: &Leaf<T>, comp: usize) -> DecaySample {
    let t = leaf.kind.param();
    let mut s = DecaySample { t, dw0_weighted: 0.0, wt_l2y: 0.0, dy_wt_l2y: 0.0, zw0: 0.0 };
    for n in leaf.nodes.iter().filter(|n| n.r.to_f64_() < t - 1.0) {
        let nj = &n.comps[comp];
        let r = n.r.to_f64_();
        let d0 = nj.mode(0);
        let (wt, wr) = (d0[1][0].re.to_f64_(), d0[0][1].re.to_f64_());
        let bracket = (1.0 + (t - r) * (t - r)).sqrt();
        s.dw0_weighted = s.dw0_weighted.max((wt * wt + wr * wr).sqrt() * bracket.sqrt());
        s.zw0 = s.zw0.max((t * wr + r * wt).abs());
        let (mut a, mut b) = (0.0, 0.0);
        for k in nj.ks().filter(|k| *k != 0) {
            let m = nj.mode(k)[0][0].norm_sqr().to_f64_();
            a += m;
            b += (k * k) as f64 * m;
        }
        s.wt_l2y = s.wt_l2y.max((std::f64::consts::TAU * a).sqrt());
        s.dy_wt_l2y = s.dy_wt_l2y.max((std::f64::consts::TAU * b).sqrt());
    }
    s
}

/// Evaluates time-slice reports and decay samples every `every` steps and
/// on the final level. The X-norm bulk uses the sampling interval as `dt`.
pub struct SliceMonitor {
    every: usize,
    alpha: f64,
    comp: usize,
    with_reports: bool,
    pub reports: Vec<EnergyReport>,
    pub decay: Vec<DecaySample>,
    /// Running X-norm bulk per component.
    pub x_bulk: Vec<f64>,
    last_t: Option<f64>,
}

impl SliceMonitor {
    pub fn new(every: usize, alpha: f64, comp: usize, with_reports: bool) -> Self {
        SliceMonitor {
            every: every.max(1),
            alpha,
            comp,
            with_reports,
            reports: Vec::new(),
            decay: Vec::new(),
            x_bulk: Vec::new(),
            last_t: None,
        }
    }
}

impl<T: Real> StepHook<T> for SliceMonitor {
    fn on_level(&mut self, history: &StateHistory<T>, step: usize, last: bool) -> Result<()> {
        let Some(level) = history.latest() else { return Ok(()) };
        let t = level.t.to_f64_();
        if (step % self.every != 0 && !last) || self.last_t == Some(t) {
            return Ok(());
        }
        let interval = self.last_t.map_or(0.0, |t0| t - t0);
        self.last_t = Some(t);
        let leaf = Leaf::time_slice(level);
        self.decay.push(decay_sample(&leaf, self.comp));
        if self.with_reports {
            let rep = time_slice_report(&leaf, self.alpha, interval)?;
            self.x_bulk.resize(level.n_components(), 0.0);
            for (c, name) in super::report::COMPONENT_NAMES.iter().enumerate().take(level.n_components()) {
                self.x_bulk[c] += rep.get0(&format!("X_bulk[{name}.W]")).unwrap_or(0.0);
            }
            self.reports.push(rep);
        }
        Ok(())
    }
}
