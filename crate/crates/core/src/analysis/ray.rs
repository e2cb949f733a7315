//! Ray diagnostic along `λ ↦ (λt/s, λx/s)`, `λ ∈ [2, s]`.
//!
//! With `f_λ = f(λt/s, λr/s, y)` and `ω(λ) = λ^{3/2} W̃_λ`:
//!
//! * `Y² = ∫ λ|3/2 W̃_λ + (SW̃)_λ|² + λ³(1+u_λ)|∂_yW̃_λ|² dy`
//! * `A = sup_y |(Su)_λ|/(2λ) + sup_y |∂_y u_λ|`
//! * `B² = ∫ λ^{-1}|(RW̃)_λ|² dy`
//!
//! `RW̃` is evaluated as `PW̃ - s²(1+u)∂_y²W̃` with
//! `P = 3/4 + 2S + S²`, which equals the `∂̄`-form with the source
//! subtracted for every solution of the equation.

use std::f64::consts::TAU;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::energies::{Leaf, WordOps};
use crate::error::{Error, Result};
use crate::fields::history::NodeJets;
use crate::fields::spectral::y_grid_size;
use crate::geometry::{MultiIndex, VectorFieldId};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayDiagnostic {
    pub t: f64,
    pub r: f64,
    pub lambda: Vec<f64>,
    pub y: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub int_a: f64,
    pub int_b: f64,
    /// `Y` at the last `λ`.
    pub y_end: f64,
    /// `(Y(λ_0) + ∫B) e^{∫A}`.
    pub gronwall_bound: f64,
}

impl RayDiagnostic {
    pub fn gronwall_holds(&self, tol: f64) -> bool {
        self.y_end <= self.gronwall_bound * (1.0 + tol)
    }

    /// `max Y / min Y - 1`.
    pub fn drift(&self) -> f64 {
        let hi = self.y.iter().copied().fold(0.0, f64::max);
        let lo = self.y.iter().copied().fold(f64::INFINITY, f64::min);
        if hi == 0.0 {
            0.0
        } else {
            hi / lo - 1.0
        }
    }
}

/// Per-mode values at one node: `[W, SW, PW, u, Su]`.
type NodeValues = Vec<[Complex<f64>; 5]>;

struct Ops {
    s1: WordOps,
    s2: WordOps,
}

fn c64<T: Real>(z: Complex<T>) -> Complex<f64> {
    Complex::new(z.re.to_f64_(), z.im.to_f64_())
}

fn node_values<T: Real>(ops: &Ops, w: &NodeJets<T>, u: &NodeJets<T>) -> NodeValues {
    w.ks()
        .map(|k| {
            let wk = c64(w.mode(k)[0][0]);
            let sw = c64(ops.s1.eval(w, k)[0]);
            let ssw = c64(ops.s2.eval(w, k)[0]);
            let uk = c64(u.mode(k)[0][0]);
            let su = c64(ops.s1.eval(u, k)[0]);
            [wk, sw, 0.75 * wk + 2.0 * sw + ssw, uk, su]
        })
        .collect()
}

/// Cubic Lagrange interpolation of node values at `rho`.
fn interpolate_at<T: Real>(leaf: &Leaf<T>, ops: &Ops, comp: usize, rho: f64) -> Option<NodeValues> {
    let dr = leaf.grid.dr.to_f64_();
    let n = leaf.nodes.len();
    if n < 4 {
        return None;
    }
    let x = rho / dr;
    if x > (n - 1) as f64 + 1e-9 {
        return None;
    }
    let j0 = (x.floor() as usize).saturating_sub(1).min(n - 4);
    let xs: Vec<f64> = (j0..j0 + 4).map(|j| j as f64).collect();
    let mut out: Option<NodeValues> = None;
    for i in 0..4 {
        let mut l = 1.0;
        for m in 0..4 {
            if m != i {
                l *= (x - xs[m]) / (xs[i] - xs[m]);
            }
        }
        let node = &leaf.nodes[j0 + i];
        let vals = node_values(ops, &node.comps[comp], &node.comps[0]);
        match out.as_mut() {
            None => out = Some(vals.iter().map(|v| v.map(|z| z * l)).collect()),
            Some(acc) => {
                for (a, v) in acc.iter_mut().zip(&vals) {
                    for q in 0..5 {
                        a[q] += v[q] * l;
                    }
                }
            }
        }
    }
    out
}

fn physical(vals: &NodeValues, q: usize, k_max: usize, deriv: u32, keep_zero: bool, y: f64) -> f64 {
    let mut acc = 0.0;
    for (i, v) in vals.iter().enumerate() {
        let k = i as i64 - k_max as i64;
        if k == 0 && !keep_zero {
            continue;
        }
        let ik = Complex::new(0.0, k as f64).powu(deriv);
        acc += (v[q] * ik * Complex::from_polar(1.0, k as f64 * y)).re;
    }
    acc
}

/// `(Y, A, B)` at one `λ`, from the interpolated values at `ρ = λ r/s`.
fn sample(vals: &NodeValues, k_max: usize, lambda: f64) -> (f64, f64, f64) {
    let m = y_grid_size(k_max);
    let (mut y2, mut b2, mut su_max, mut uy_max) = (0.0, 0.0, 0.0f64, 0.0f64);
    for i in 0..m {
        let y = TAU * i as f64 / m as f64;
        let w = physical(vals, 0, k_max, 0, false, y);
        let sw = physical(vals, 1, k_max, 0, false, y);
        let pw = physical(vals, 2, k_max, 0, false, y);
        let wy = physical(vals, 0, k_max, 1, false, y);
        let wyy = physical(vals, 0, k_max, 2, false, y);
        let u = physical(vals, 3, k_max, 0, true, y);
        let su = physical(vals, 4, k_max, 0, true, y);
        let uy = physical(vals, 3, k_max, 1, true, y);
        y2 += lambda * (1.5 * w + sw).powi(2) + lambda.powi(3) * (1.0 + u) * wy * wy;
        let rw = pw - lambda * lambda * (1.0 + u) * wyy;
        b2 += rw * rw / lambda;
        su_max = su_max.max(su.abs());
        uy_max = uy_max.max(uy.abs());
    }
    let dy = TAU / m as f64;
    ((y2 * dy).max(0.0).sqrt(), su_max / (2.0 * lambda) + uy_max, (b2 * dy).sqrt())
}

fn trapezoid(x: &[f64], f: &[f64]) -> f64 {
    x.windows(2).zip(f.windows(2)).map(|(x, f)| 0.5 * (x[1] - x[0]) * (f[0] + f[1])).sum()
}

/// Samples `(Y, A, B)` of component `comp` (with `u` = component 0) along the
/// ray through `(t, r)` at each `λ` of `lambdas`, using the collected
/// hyperboloid leaf with `s = λ`.
pub fn ray_diagnostic<T: Real>(leaves: &[Leaf<T>], comp: usize, t: f64, r: f64, lambdas: &[f64]) -> Result<RayDiagnostic> {
    if !(t > r) {
        return Err(Error::Domain(format!("ray base point ({t}, {r}) is not in the cone")));
    }
    let s = (t * t - r * r).sqrt();
    let ops = Ops {
        s1: WordOps::new(&MultiIndex::new(vec![VectorFieldId::Scaling])),
        s2: WordOps::new(&MultiIndex::new(vec![VectorFieldId::Scaling, VectorFieldId::Scaling])),
    };
    let mut d = RayDiagnostic {
        t,
        r,
        lambda: Vec::new(),
        y: Vec::new(),
        a: Vec::new(),
        b: Vec::new(),
        int_a: 0.0,
        int_b: 0.0,
        y_end: 0.0,
        gronwall_bound: 0.0,
    };
    for &lambda in lambdas {
        let leaf = leaves
            .iter()
            .find(|l| l.s().is_some_and(|ls| (ls.to_f64_() - lambda).abs() < 1e-9))
            .ok_or(Error::RayLeavesDomain(lambda))?;
        let rho = lambda * r / s;
        let vals = interpolate_at(leaf, &ops, comp, rho).ok_or(Error::RayLeavesDomain(lambda))?;
        let (y, a, b) = sample(&vals, leaf.k_max, lambda);
        d.lambda.push(lambda);
        d.y.push(y);
        d.a.push(a);
        d.b.push(b);
    }
    d.int_a = trapezoid(&d.lambda, &d.a);
    d.int_b = trapezoid(&d.lambda, &d.b);
    d.y_end = d.y.last().copied().unwrap_or(0.0);
    d.gronwall_bound = (d.y.first().copied().unwrap_or(0.0) + d.int_b) * d.int_a.exp();
    Ok(d)
}
