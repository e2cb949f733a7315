//! Method-of-lines evolution of the mode-reduced system.
//!
//! For each component `W ∈ {u, v}` and mode `|k| <= K`:
//!
//! `∂_t² W_k = Δ_r W_k - k² W_k + [u ∂_y² W]_k - [N(W, W)]_k + F_k`
//!
//! which is `□W + u∂_y²W = N(W, W)` with `□ = -∂_t² + Δ + ∂_y²`. The
//! bracketed products are formed pointwise on the oversampled `y`-grid.

pub mod config;
pub mod convergence;
pub mod run;

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fields::manufactured::AnalyticField;
use crate::fields::radial::{stencil_at, Parity};
use crate::fields::{ModeField, RadialGrid, RadialLaplacian, SpectralY};
use crate::geometry::T0;
use crate::scalar::{lit, Real};

pub use config::{Ablation, Nonlinearity, SolverConfig};
pub use run::{run, LogRecord, RunSummary, StepHook, Termination};

/// `(u, v)` and their time derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolvedPair<T> {
    pub w: [ModeField<T>; 2],
    pub dw: [ModeField<T>; 2],
}

impl<T: Real> EvolvedPair<T> {
    pub fn zeros(k_max: usize, grid: RadialGrid<T>) -> Self {
        let z = ModeField::zeros(k_max, grid, true);
        EvolvedPair { w: [z.clone(), z.clone()], dw: [z.clone(), z] }
    }

    pub fn u(&self) -> &ModeField<T> {
        &self.w[0]
    }

    pub fn v(&self) -> &ModeField<T> {
        &self.w[1]
    }

    pub fn grid(&self) -> RadialGrid<T> {
        self.w[0].grid()
    }

    pub fn k_max(&self) -> usize {
        self.w[0].k_max()
    }

    pub fn all_finite(&self) -> bool {
        self.w.iter().chain(&self.dw).all(|f| f.all_finite())
    }

    pub fn max_abs(&self) -> T {
        self.w.iter().fold(T::zero(), |m, f| m.max(f.max_abs()))
    }

    /// `self + a * d`, with `d` a time derivative `(∂_t W, ∂_t² W)`.
    fn advanced(&self, a: T, d: &EvolvedPair<T>) -> Self {
        let mut out = self.clone();
        for c in 0..2 {
            out.w[c].axpy(a, &d.w[c]);
            out.dw[c].axpy(a, &d.dw[c]);
        }
        out
    }

    /// Discrete flat energy of both components, conserved by the linear
    /// semi-discrete flow.
    pub fn flat_energy(&self, lap: &RadialLaplacian<T>) -> T {
        (0..2).map(|c| lap.energy(&self.w[c], &self.dw[c])).sum()
    }
}

/// Time-dependent source added to the right-hand side.
pub trait Forcing<T>: Send + Sync {
    fn at(&self, t: T) -> Vec<ModeField<T>>;
}

/// Forcing of a closed-form field under a given operator.
pub struct AnalyticForcing<T> {
    pub field: AnalyticField<T>,
    pub grid: RadialGrid<T>,
    pub k_max: usize,
    pub nl: Nonlinearity,
}

impl<T: Real> Forcing<T> for AnalyticForcing<T> {
    fn at(&self, t: T) -> Vec<ModeField<T>> {
        self.field.forcing(t, self.grid, self.k_max, &self.nl)
    }
}

/// Data at `t = 2`: `ε exp(-r²/w²)(a_0 + Σ a_k cos ky)`, or the closed-form
/// case when one is configured.
pub fn initial_data<T: Real>(cfg: &SolverConfig) -> EvolvedPair<T> {
    let grid = RadialGrid::new(lit::<T>(cfg.dr), cfg.jmax);
    if let Some(case) = cfg.case {
        let f = case.field::<T>();
        let (u, du) = f.modes(0, lit(T0), grid, cfg.k_max);
        let (v, dv) = f.modes(1, lit(T0), grid, cfg.k_max);
        return EvolvedPair { w: [u, v], dw: [du, dv] };
    }
    let eps = lit::<T>(cfg.epsilon);
    let inv_w2 = lit::<T>(1.0 / (cfg.width * cfg.width));
    let build = |coefs: &[f64]| {
        ModeField::from_fn(cfg.k_max, grid, true, |k, r| {
            let a = coefs.get(k.unsigned_abs() as usize).copied().unwrap_or(0.0);
            if a == 0.0 || cfg.epsilon == 0.0 {
                return Complex::new(T::zero(), T::zero());
            }
            let a = if k == 0 { a } else { 0.5 * a };
            Complex::new(eps * lit::<T>(a) * (-r * r * inv_w2).exp(), T::zero())
        })
    };
    EvolvedPair {
        w: [build(&cfg.data_u), build(&cfg.data_v)],
        dw: [build(&cfg.data_du), build(&cfg.data_dv)],
    }
}

/// Squared amplitude below which a node is treated as quiescent by the
/// nonlinear terms.
pub const NEGLIGIBLE: f64 = 1e-60;

/// Right-hand side evaluator with its precomputed operators.
pub struct Rhs<T: Real> {
    grid: RadialGrid<T>,
    k_max: usize,
    lap: RadialLaplacian<T>,
    sp: SpectralY<T>,
    nl: Nonlinearity,
    forcing: Option<Box<dyn Forcing<T>>>,
}

impl<T: Real> Rhs<T> {
    pub fn new(grid: RadialGrid<T>, k_max: usize, nl: Nonlinearity) -> Self {
        Rhs { grid, k_max, lap: RadialLaplacian::new(grid), sp: SpectralY::new(k_max), nl, forcing: None }
    }

    pub fn from_config(cfg: &SolverConfig) -> Self {
        let grid = RadialGrid::new(lit::<T>(cfg.dr), cfg.jmax);
        let mut rhs = Self::new(grid, cfg.k_max, cfg.nonlinearity);
        if let Some(case) = cfg.case {
            rhs.forcing = Some(Box::new(AnalyticForcing { field: case.field(), grid, k_max: cfg.k_max, nl: cfg.nonlinearity }));
        }
        rhs
    }

    pub fn with_forcing(mut self, f: Box<dyn Forcing<T>>) -> Self {
        self.forcing = Some(f);
        self
    }

    pub fn laplacian(&self) -> &RadialLaplacian<T> {
        &self.lap
    }

    pub fn nonlinearity(&self) -> &Nonlinearity {
        &self.nl
    }

    /// `∂_t² W` for both components.
    pub fn acceleration(&self, state: &EvolvedPair<T>, t: T) -> Result<[ModeField<T>; 2]> {
        let mut out = [
            ModeField::zeros(self.k_max, self.grid, true),
            ModeField::zeros(self.k_max, self.grid, true),
        ];
        for (c, acc) in out.iter_mut().enumerate() {
            for k in state.w[c].ks() {
                let kk = T::from_i64_(k * k);
                let src = state.w[c].mode(k);
                let dst = acc.mode_mut(k);
                self.lap.apply_profile(src, dst);
                for (d, s) in dst.iter_mut().zip(src) {
                    *d = *d - *s * kk;
                }
            }
        }
        if !self.nl.is_linear() {
            let cols = self.nonlinear_columns(state);
            for (j, col) in cols.iter().enumerate() {
                let Some(col) = col else { continue };
                for c in 0..2 {
                    for (i, k) in (-(self.k_max as i64)..=(self.k_max as i64)).enumerate() {
                        out[c].set(k, j, out[c].at(k, j) + col[c][i]);
                    }
                }
            }
        }
        if let Some(f) = &self.forcing {
            for (acc, f) in out.iter_mut().zip(f.at(t)) {
                acc.axpy(T::one(), &f);
            }
        }
        if !out.iter().all(|f| f.all_finite()) {
            return Err(Error::NonFinite(format!("right-hand side at t = {t}")));
        }
        Ok(out)
    }

    /// Time derivative of `(W, ∂_tW)`.
    pub fn eval(&self, state: &EvolvedPair<T>, t: T) -> Result<EvolvedPair<T>> {
        Ok(EvolvedPair { w: state.dw.clone(), dw: self.acceleration(state, t)? })
    }

    /// `[u ∂_y² W]_k - [N(W, W)]_k` at every node, per component, with the
    /// reality symmetry imposed. `None` marks nodes whose fields and
    /// neighbours are all below [`NEGLIGIBLE`], where the quadratic terms
    /// are far below roundoff of the linear ones.
    fn nonlinear_columns(&self, state: &EvolvedPair<T>) -> Vec<Option<[Vec<Complex<T>>; 2]>> {
        let n_modes = 2 * self.k_max + 1;
        let m = self.sp.m();
        let dr = self.grid.dr;
        let nl = self.nl;
        let need_grad = nl.has_sources();
        let tiny = lit::<T>(NEGLIGIBLE);
        let jmax = self.grid.jmax;
        // (c, a, b, coef) of the nonzero Q0 couplings
        let terms: Vec<(usize, usize, usize, T)> = (0..2)
            .flat_map(|c| (0..2).flat_map(move |a| (0..2).map(move |b| (c, a, b))))
            .filter(|&(c, a, b)| nl.q0[c][a][b] != 0.0)
            .map(|(c, a, b)| (c, a, b, lit::<T>(nl.q0[c][a][b])))
            .collect();
        let null_on = nl.ablation == Ablation::NullOn;
        (0..self.grid.len())
            .into_par_iter()
            .map_init(
                || {
                    let z = Complex::new(T::zero(), T::zero());
                    (self.sp.workspace(), vec![z; n_modes], vec![vec![T::zero(); m]; 8])
                },
                |(work, col, bufs), j| {
                    let quiet = (j.saturating_sub(2)..=(j + 2).min(jmax)).all(|i| {
                        (0..2).all(|c| {
                            state.w[c].ks().all(|k| state.w[c].at(k, i).norm_sqr() < tiny && state.dw[c].at(k, i).norm_sqr() < tiny)
                        })
                    });
                    if quiet {
                        return None;
                    }
                    // bufs: 0,1 w_t; 2,3 w_r; 4,5 w_yy; 6 u; 7 scratch
                    let mut out = [vec![Complex::new(T::zero(), T::zero()); n_modes], vec![Complex::new(T::zero(), T::zero()); n_modes]];
                    for c in 0..2 {
                        let w = &state.w[c];
                        if need_grad {
                            for (i, k) in w.ks().enumerate() {
                                col[i] = state.dw[c].at(k, j);
                            }
                            self.sp.to_physical(col, &mut bufs[c], work);
                            for (i, k) in w.ks().enumerate() {
                                col[i] = stencil_at(w.mode(k), j, 1, Parity::Even, dr);
                            }
                            self.sp.to_physical(col, &mut bufs[2 + c], work);
                        }
                        if nl.quasilinear {
                            for (i, k) in w.ks().enumerate() {
                                col[i] = w.at(k, j) * (-T::from_i64_(k * k));
                            }
                            self.sp.to_physical(col, &mut bufs[4 + c], work);
                        }
                    }
                    if nl.quasilinear {
                        for (i, k) in state.w[0].ks().enumerate() {
                            col[i] = state.w[0].at(k, j);
                        }
                        self.sp.to_physical(col, &mut bufs[6], work);
                    }
                    let (phys, acc) = bufs.split_at_mut(7);
                    let acc = &mut acc[0];
                    for (c, out_c) in out.iter_mut().enumerate() {
                        if nl.quasilinear {
                            for ((v, u), wyy) in acc.iter_mut().zip(&phys[6]).zip(&phys[4 + c]) {
                                *v = *u * *wyy;
                            }
                        } else {
                            acc.iter_mut().for_each(|v| *v = T::zero());
                        }
                        for &(_, a, b, coef) in terms.iter().filter(|t| t.0 == c) {
                            let (ta, tb, ra, rb) = (&phys[a], &phys[b], &phys[2 + a], &phys[2 + b]);
                            for y in 0..m {
                                let mut q = ta[y] * tb[y];
                                if null_on {
                                    q = q - ra[y] * rb[y];
                                }
                                acc[y] = acc[y] - coef * q;
                            }
                        }
                        self.sp.to_modes(acc, out_c, work);
                        let half = lit::<T>(0.5);
                        for i in 0..=self.k_max {
                            let (p, q) = (self.k_max + i, self.k_max - i);
                            let avg = (out_c[p] + out_c[q].conj()) * half;
                            out_c[p] = avg;
                            out_c[q] = avg.conj();
                        }
                    }
                    Some(out)
                },
            )
            .collect()
    }
}

/// One classical RK4 step. `k1` may be supplied when already known.
pub fn step<T: Real>(rhs: &Rhs<T>, state: &EvolvedPair<T>, t: T, dt: T, k1: Option<EvolvedPair<T>>) -> Result<EvolvedPair<T>> {
    let half = lit::<T>(0.5);
    let k1 = match k1 {
        Some(k) => k,
        None => rhs.eval(state, t)?,
    };
    let k2 = rhs.eval(&state.advanced(dt * half, &k1), t + dt * half)?;
    let k3 = rhs.eval(&state.advanced(dt * half, &k2), t + dt * half)?;
    let k4 = rhs.eval(&state.advanced(dt, &k3), t + dt)?;
    let sixth = dt / lit(6.0);
    let mut out = state.clone();
    for c in 0..2 {
        for (k, wgt) in [(&k1, T::one()), (&k2, lit(2.0)), (&k3, lit(2.0)), (&k4, T::one())] {
            out.w[c].axpy(sixth * wgt, &k.w[c]);
            out.dw[c].axpy(sixth * wgt, &k.dw[c]);
        }
    }
    if !out.all_finite() {
        return Err(Error::NonFinite(format!("state after step at t = {t}")));
    }
    Ok(out)
}
