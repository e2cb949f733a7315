//! Closed-form fields used to verify the solver and the diagnostics.
//!
//! An [`AnalyticField`] is a finite sum `Σ g(t, r) cos(k y + φ)` per
//! component, with each radial profile `g` returned as a [`Jet`], so every
//! derivative the operators need is exact.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex;

use super::spectral::SpectralY;
use super::{ModeField, RadialGrid};
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::scalar::{lit, Real};
use crate::solver::{Ablation, Nonlinearity};

pub type Profile<T> = Arc<dyn Fn(T, T) -> Jet<T> + Send + Sync>;

/// `g(t, r) cos(k y + phase)`.
#[derive(Clone)]
pub struct Term<T> {
    pub k: i64,
    pub phase: T,
    pub g: Profile<T>,
}

/// `(t, r)`-jets of `W`, `∂_y W` and `∂_y² W` at one `(t, r, y)`.
#[derive(Debug, Clone, Copy)]
pub struct YJets<T> {
    pub w: Jet<T>,
    pub wy: Jet<T>,
    pub wyy: Jet<T>,
}

#[derive(Clone)]
pub struct AnalyticField<T> {
    pub components: Vec<Vec<Term<T>>>,
}

impl<T: Real> AnalyticField<T> {
    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    pub fn max_mode(&self) -> usize {
        self.components.iter().flatten().map(|t| t.k.unsigned_abs() as usize).max().unwrap_or(0)
    }

    pub fn at(&self, comp: usize, t: T, r: T, y: T) -> YJets<T> {
        let mut out = YJets { w: Jet::zero(), wy: Jet::zero(), wyy: Jet::zero() };
        for term in &self.components[comp] {
            let g = (term.g)(t, r);
            let kk = T::from_i64_(term.k);
            let (s, c) = (kk * y + term.phase).sin_cos();
            out.w = out.w + g * c;
            out.wy = out.wy + g * (-kk * s);
            out.wyy = out.wyy + g * (-kk * kk * c);
        }
        out
    }

    /// Mode towers of `W` and `∂_t W` at time `t`.
    pub fn modes(&self, comp: usize, t: T, grid: RadialGrid<T>, k_max: usize) -> (ModeField<T>, ModeField<T>) {
        let mut w = ModeField::zeros(k_max, grid, true);
        let mut dw = ModeField::zeros(k_max, grid, true);
        let half = lit::<T>(0.5);
        for term in &self.components[comp] {
            assert!(term.k.unsigned_abs() as usize <= k_max, "term mode {} beyond cutoff", term.k);
            let e = Complex::new(term.phase.cos(), term.phase.sin());
            let (kp, cp, cm) = if term.k == 0 {
                (0, Complex::new(term.phase.cos(), T::zero()), None)
            } else {
                (term.k.abs(), if term.k > 0 { e * half } else { e.conj() * half }, Some(()))
            };
            for j in 0..grid.len() {
                let g = (term.g)(t, grid.r(j));
                let (v, vt) = (g.value(), g.d(1, 0));
                w.set(kp, j, w.at(kp, j) + cp * v);
                dw.set(kp, j, dw.at(kp, j) + cp * vt);
                if cm.is_some() {
                    w.set(-kp, j, w.at(-kp, j) + cp.conj() * v);
                    dw.set(-kp, j, dw.at(-kp, j) + cp.conj() * vt);
                }
            }
        }
        (w, dw)
    }

    /// Forcing `F` such that `∂_t² W = Δ W + (1 + u) ∂_y² W - N(W, W) + F`
    /// holds for this field (`u` is component 0), projected on `|k| <= K`.
    pub fn forcing(&self, t: T, grid: RadialGrid<T>, k_max: usize, nl: &Nonlinearity) -> Vec<ModeField<T>> {
        let ncomp = self.n_components();
        let sp = SpectralY::new(k_max.max(self.max_mode()));
        let m = sp.m();
        let ys: Vec<T> = super::spectral::y_nodes(m);
        let mut work = sp.workspace();
        let mut out: Vec<ModeField<T>> = (0..ncomp).map(|_| ModeField::zeros(k_max, grid, true)).collect();
        let mut samples = vec![vec![T::zero(); m]; ncomp];
        let mut col = vec![Complex::new(T::zero(), T::zero()); 2 * sp.k_max() + 1];
        for j in 0..grid.len() {
            let r = grid.r(j);
            for (i, &y) in ys.iter().enumerate() {
                let jets: Vec<YJets<T>> = (0..ncomp).map(|c| self.at(c, t, r, y)).collect();
                for c in 0..ncomp {
                    samples[c][i] = pointwise_residual(&jets, c, r, nl);
                }
            }
            for c in 0..ncomp {
                sp.to_modes(&samples[c], &mut col, &mut work);
                let off = sp.k_max() - k_max;
                out[c].set_column(j, &col[off..off + 2 * k_max + 1]);
            }
        }
        out
    }
}

/// `W_tt - ΔW - (1+u)W_yy + N(W,W)` for component `c` at one point.
pub fn pointwise_residual<T: Real>(jets: &[YJets<T>], c: usize, r: T, nl: &Nonlinearity) -> T {
    let w = &jets[c].w;
    let lap = if r > T::zero() {
        w.d(0, 2) + lit::<T>(2.0) * w.d(0, 1) / r
    } else {
        lit::<T>(3.0) * w.d(0, 2)
    };
    let u = if nl.quasilinear { jets[0].w.value() } else { T::zero() };
    let mut res = w.d(2, 0) - lap - (T::one() + u) * jets[c].wyy.value();
    for a in 0..jets.len().min(2) {
        for b in 0..jets.len().min(2) {
            let coef = nl.q0[c][a][b];
            if coef == 0.0 {
                continue;
            }
            let (pa, pb) = (&jets[a].w, &jets[b].w);
            let q = match nl.ablation {
                Ablation::NullOn => pa.d(1, 0) * pb.d(1, 0) - pa.d(0, 1) * pb.d(0, 1),
                Ablation::NullOff => pa.d(1, 0) * pb.d(1, 0),
            };
            res = res + lit::<T>(coef) * q;
        }
    }
    res
}

/// Compactly supported polynomial bump `(1 - ((z - c)/a)²)^8` on `|z - c| < a`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Bump {
    pub center: f64,
    pub half_width: f64,
}

impl Bump {
    const POWER: usize = 8;

    /// `f^{(n)}(z)`.
    pub fn derivative<T: Real>(&self, z: T, n: usize) -> T {
        let a = lit::<T>(self.half_width);
        let x = (z - lit(self.center)) / a;
        if x.abs() >= T::one() {
            return T::zero();
        }
        // (1 - x²)^8 = Σ_m C(8,m) (-1)^m x^{2m}
        let mut acc = T::zero();
        let mut binom = 1.0f64;
        for m in 0..=Self::POWER {
            let p = 2 * m;
            if p >= n {
                let mut fall = 1.0f64;
                for q in 0..n {
                    fall *= (p - q) as f64;
                }
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                acc = acc + lit::<T>(sign * binom * fall) * x.powi((p - n) as i32);
            }
            binom = binom * (Self::POWER - m) as f64 / (m + 1) as f64;
        }
        acc / a.powi(n as i32)
    }

    pub fn value<T: Real>(&self, z: T) -> T {
        self.derivative(z, 0)
    }

    /// `f(z)` as a jet composed with an affine jet `z`.
    fn compose<T: Real>(&self, z: Jet<T>) -> Jet<T> {
        let z0 = z.value();
        let mut h = z;
        h = h + (-z0);
        let h2 = h * h;
        let h3 = h2 * h;
        Jet::constant(self.derivative(z0, 0))
            + h * self.derivative(z0, 1)
            + h2 * (self.derivative::<T>(z0, 2) / lit(2.0))
            + h3 * (self.derivative::<T>(z0, 3) / lit(6.0))
    }
}

/// `(f(t - r) - f(t + r)) / r`, regular at the origin.
pub fn radial_wave_profile<T: Real>(f: Bump, t: T, r: T) -> Jet<T> {
    let small = lit::<T>(0.02);
    if r > small {
        let (jt, jr) = (Jet::var_t(t), Jet::var_r(r));
        (f.compose(jt - jr) - f.compose(jt + jr)) * jr.recip()
    } else {
        // odd Taylor expansion: -2 Σ_m f^{(2m+1)}(t) r^{2m} / (2m+1)!
        let mut d = [[T::zero(); 4]; 4];
        let fact = |n: usize| (1..=n).map(|i| i as f64).product::<f64>();
        for a in 0..4 {
            for b in 0..4 - a {
                let mut acc = T::zero();
                for m in 0..5usize {
                    let p = 2 * m;
                    if p < b {
                        continue;
                    }
                    let dr = lit::<T>(fact(p) / fact(p - b)) * r.powi((p - b) as i32);
                    acc = acc + f.derivative(t, p + 1 + a) * dr / lit(fact(p + 1));
                }
                d[a][b] = lit::<T>(-2.0) * acc;
            }
        }
        Jet::from_derivatives(d)
    }
}

/// Registered closed-form solutions.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum ManufacturedCase {
    /// Exact linear radial wave `(f(t-r) - f(t+r))/r` in the zero mode of both components.
    RadialWave(Bump),
    /// `W_{±k}(t) = cos(|k|(t - 2))`, constant in `r`, in both components.
    KgMode(i64),
    /// Smooth space-time bump in modes `0, ±1, ±2`; forcing carries the full operator.
    Bump,
}

impl ManufacturedCase {
    pub const DEFAULT_PULSE: Bump = Bump { center: 0.0, half_width: 1.5 };

    pub fn field<T: Real>(&self) -> AnalyticField<T> {
        match *self {
            ManufacturedCase::RadialWave(f) => {
                let g: Profile<T> = Arc::new(move |t, r| radial_wave_profile(f, t, r));
                let term = vec![Term { k: 0, phase: T::zero(), g }];
                AnalyticField { components: vec![term.clone(), term] }
            }
            ManufacturedCase::KgMode(k) => {
                let kk = lit::<T>(k.abs() as f64);
                let g: Profile<T> = Arc::new(move |t, _r| {
                    let ph = (Jet::var_t(t) + lit::<T>(-crate::geometry::T0)) * kk;
                    ph.cos() * lit::<T>(if k == 0 { 1.0 } else { 2.0 })
                });
                let term = vec![Term { k, phase: T::zero(), g }];
                AnalyticField { components: vec![term.clone(), term] }
            }
            ManufacturedCase::Bump => {
                let amp = lit::<T>(0.1);
                let gauss = move |r: T, inv_w2: f64| (Jet::var_r(r) * Jet::var_r(r) * lit::<T>(-inv_w2)).exp();
                let u0: Profile<T> = Arc::new(move |t, r| gauss(r, 1.0) * Jet::var_t(t).sin() * amp);
                let u1: Profile<T> = Arc::new(move |t, r| gauss(r, 1.0) * Jet::var_t(t).cos() * amp);
                let v0: Profile<T> =
                    Arc::new(move |t, r| gauss(r, 0.5) * (Jet::var_t(t) * lit::<T>(0.7)).cos() * amp);
                let v2: Profile<T> =
                    Arc::new(move |t, r| gauss(r, 0.5) * Jet::var_t(t).sin() * (amp * lit::<T>(0.5)));
                AnalyticField {
                    components: vec![
                        vec![Term { k: 0, phase: T::zero(), g: u0 }, Term { k: 1, phase: T::zero(), g: u1 }],
                        vec![Term { k: 0, phase: T::zero(), g: v0 }, Term { k: 2, phase: T::zero(), g: v2 }],
                    ],
                }
            }
        }
    }

    /// Smallest mode cutoff that represents the case exactly.
    pub fn min_k(&self) -> usize {
        match *self {
            ManufacturedCase::RadialWave(_) => 1,
            ManufacturedCase::KgMode(k) => (k.unsigned_abs() as usize).max(1),
            ManufacturedCase::Bump => 2,
        }
    }
}

impl fmt::Display for ManufacturedCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ManufacturedCase::RadialWave(_) => write!(f, "radial_wave"),
            ManufacturedCase::KgMode(k) => write!(f, "kg_mode:{k}"),
            ManufacturedCase::Bump => write!(f, "bump"),
        }
    }
}

impl FromStr for ManufacturedCase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "a" | "radial_wave" => return Ok(ManufacturedCase::RadialWave(Self::DEFAULT_PULSE)),
            "b" => return Ok(ManufacturedCase::KgMode(1)),
            "c" | "bump" => return Ok(ManufacturedCase::Bump),
            _ => {}
        }
        if let Some(k) = s.strip_prefix("kg_mode:") {
            if let Ok(k) = k.parse::<i64>() {
                if k != 0 {
                    return Ok(ManufacturedCase::KgMode(k));
                }
            }
        }
        Err(Error::UnknownCase(s.to_string()))
    }
}

/// `(W, ∂_tW, F)` per component for a registered case.
#[derive(Debug, Clone)]
pub struct Manufactured<T> {
    pub w: Vec<ModeField<T>>,
    pub dw: Vec<ModeField<T>>,
    pub forcing: Vec<ModeField<T>>,
}

pub fn manufactured<T: Real>(
    case: ManufacturedCase,
    t: T,
    grid: RadialGrid<T>,
    k_max: usize,
    nl: &Nonlinearity,
) -> Result<Manufactured<T>> {
    if k_max < case.min_k() {
        return Err(Error::Domain(format!("case {case} needs K >= {}", case.min_k())));
    }
    let field = case.field::<T>();
    let (w, dw): (Vec<_>, Vec<_>) = (0..field.n_components()).map(|c| field.modes(c, t, grid, k_max)).unzip();
    let forcing = field.forcing(t, grid, k_max, nl);
    Ok(Manufactured { w, dw, forcing })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_derivatives_match_finite_differences() {
        let f = Bump { center: 0.3, half_width: 1.2 };
        let h = 1e-5;
        for z in [-0.5, 0.1, 0.9] {
            for n in 0..6 {
                let fd = (f.derivative::<f64>(z + h, n) - f.derivative::<f64>(z - h, n)) / (2.0 * h);
                let an = f.derivative::<f64>(z, n + 1);
                assert!((fd - an).abs() < 1e-5 * (1.0 + an.abs()), "z={z} n={n}: {fd} vs {an}");
            }
        }
        assert_eq!(f.value(2.0_f64), 0.0);
        assert!((f.value(0.3_f64) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn radial_wave_origin_limit_and_branch_continuity() {
        let f = ManufacturedCase::DEFAULT_PULSE;
        let t = 1.0;
        let w0 = radial_wave_profile(f, t, 0.0);
        assert!((w0.value() + 2.0 * f.derivative::<f64>(t, 1)).abs() < 1e-14);
        // series and closed form agree across the switch radius
        let (a, b) = (radial_wave_profile(f, t, 0.0199999), radial_wave_profile(f, t, 0.0200001));
        for (i, j) in [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (0, 3)] {
            assert!((a.d(i, j) - b.d(i, j)).abs() < 1e-5 * (1.0 + a.d(i, j).abs()), "({i},{j}) {} vs {}", a.d(i, j), b.d(i, j));
        }
    }

    #[test]
    fn radial_wave_solves_the_wave_equation() {
        let field = ManufacturedCase::RadialWave(ManufacturedCase::DEFAULT_PULSE).field::<f64>();
        for (t, r) in [(2.0, 0.0), (2.0, 0.01), (2.3, 1.0), (3.0, 2.5)] {
            let w = field.at(0, t, r, 0.0).w;
            let lap = if r > 0.0 { w.d(0, 2) + 2.0 * w.d(0, 1) / r } else { 3.0 * w.d(0, 2) };
            assert!((w.d(2, 0) - lap).abs() < 1e-8, "t={t} r={r}: {}", w.d(2, 0) - lap);
        }
    }

    #[test]
    fn kg_mode_amplitudes() {
        let g = RadialGrid::new(0.1, 8);
        let (w, dw) = ManufacturedCase::KgMode(1).field::<f64>().modes(1, 2.0, g, 2);
        assert!((w.at(1, 3).re - 1.0).abs() < 1e-15);
        assert!((w.at(-1, 3).re - 1.0).abs() < 1e-15);
        assert_eq!(dw.at(1, 3).re, 0.0);
        let (w, _) = ManufacturedCase::KgMode(1).field::<f64>().modes(0, 2.0 + std::f64::consts::PI, g, 2);
        assert!((w.at(1, 0).re + 1.0).abs() < 1e-14);
    }

    #[test]
    fn linear_cases_have_no_forcing() {
        let nl = Nonlinearity::linear();
        let g = RadialGrid::new(0.05, 100);
        for case in [ManufacturedCase::KgMode(2), ManufacturedCase::RadialWave(ManufacturedCase::DEFAULT_PULSE)] {
            let m = manufactured::<f64>(case, 2.4, g, 2, &nl).unwrap();
            for f in &m.forcing {
                assert!(f.max_abs() < 1e-8, "{case}: {}", f.max_abs());
            }
        }
    }

    #[test]
    fn bump_forcing_is_real_and_band_limited() {
        let nl = Nonlinearity::default();
        let g = RadialGrid::new(0.1, 60);
        let m = manufactured::<f64>(ManufacturedCase::Bump, 2.5, g, 4, &nl).unwrap();
        for f in &m.forcing {
            assert!(f.reality_defect() < 1e-14);
            assert!(f.max_abs() > 1e-3);
        }
        assert!(matches!(manufactured::<f64>(ManufacturedCase::Bump, 2.5, g, 1, &nl), Err(Error::Domain(_))));
    }

    #[test]
    fn case_names() {
        assert_eq!("c".parse::<ManufacturedCase>().unwrap(), ManufacturedCase::Bump);
        assert_eq!("kg_mode:3".parse::<ManufacturedCase>().unwrap(), ManufacturedCase::KgMode(3));
        assert!(matches!("d".parse::<ManufacturedCase>(), Err(Error::UnknownCase(_))));
        assert!(matches!("kg_mode:0".parse::<ManufacturedCase>(), Err(Error::UnknownCase(_))));
    }
}
