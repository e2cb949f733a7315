//! The seven quadratic null forms, their boost and tangential
//! representations, and the commutator algebra with the Klainerman fields.

pub mod algebra;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::radial::radial_derivative;
use crate::fields::StateHistory;
use crate::scalar::Real;

pub use algebra::{
    commute, commute_with, identity_suite, null_form_poly, sample_points, trial_cubic, verify_all, verify_commutator,
    verify_scaling,
    CommutatorTable, IdentityResidual, NullFormExpr, NullTerm, Poly4, SpacetimeField, ZWord,
};

/// `Q_0`, `Q_{0i}` (`i = 1..3`) or `Q_{ij}` (`1 <= i < j <= 3`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NullFormId {
    Q0,
    Q0i(u8),
    Qij(u8, u8),
}

impl NullFormId {
    pub const ALL: [NullFormId; 7] = [
        NullFormId::Q0,
        NullFormId::Q0i(1),
        NullFormId::Q0i(2),
        NullFormId::Q0i(3),
        NullFormId::Qij(1, 2),
        NullFormId::Qij(1, 3),
        NullFormId::Qij(2, 3),
    ];

    pub fn new_q0i(i: u8) -> Result<Self> {
        if (1..=3).contains(&i) {
            Ok(NullFormId::Q0i(i))
        } else {
            Err(Error::Domain(format!("Q0{i}: index must be in 1..3")))
        }
    }

    pub fn new_qij(i: u8, j: u8) -> Result<Self> {
        if (1..=3).contains(&i) && (1..=3).contains(&j) && i < j {
            Ok(NullFormId::Qij(i, j))
        } else {
            Err(Error::Domain(format!("Q{i}{j}: need 1 <= i < j <= 3")))
        }
    }

    /// `Q_{ab}` for `a != b` in `0..=3`, with its sign: `Q_{ba} = -Q_{ab}`.
    pub fn from_pair(a: u8, b: u8) -> Option<(f64, NullFormId)> {
        match (a, b) {
            _ if a == b => None,
            (0, j) => Some((1.0, NullFormId::Q0i(j))),
            (i, 0) => Some((-1.0, NullFormId::Q0i(i))),
            (i, j) if i < j => Some((1.0, NullFormId::Qij(i, j))),
            (i, j) => Some((-1.0, NullFormId::Qij(j, i))),
        }
    }
}

impl fmt::Display for NullFormId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NullFormId::Q0 => write!(f, "Q[0]"),
            NullFormId::Q0i(i) => write!(f, "Q[0{i}]"),
            NullFormId::Qij(i, j) => write!(f, "Q[{i}{j}]"),
        }
    }
}

impl FromStr for NullFormId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .strip_prefix("Q[")
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| Error::Domain(format!("bad null form `{s}`")))?;
        let d: Vec<u8> = inner.bytes().map(|b| b.wrapping_sub(b'0')).collect();
        match d.as_slice() {
            [0] => Ok(NullFormId::Q0),
            [0, i] => NullFormId::new_q0i(*i),
            [i, j] => NullFormId::new_qij(*i, *j),
            _ => Err(Error::Domain(format!("bad null form `{s}`"))),
        }
    }
}

/// Gradient `(∂_t, ∂_1, ∂_2, ∂_3, ∂_y)`.
pub type Gradient<T> = [T; 5];

/// Direct evaluation.
pub fn eval_null_form<T: Real>(q: NullFormId, dphi: &Gradient<T>, dpsi: &Gradient<T>) -> T {
    match q {
        NullFormId::Q0 => dphi[0] * dpsi[0] - (1..4).map(|i| dphi[i] * dpsi[i]).sum::<T>(),
        NullFormId::Q0i(i) => {
            let i = usize::from(i);
            dphi[0] * dpsi[i] - dphi[i] * dpsi[0]
        }
        NullFormId::Qij(i, j) => {
            let (i, j) = (usize::from(i), usize::from(j));
            dphi[i] * dpsi[j] - dphi[j] * dpsi[i]
        }
    }
}

/// Cartesian gradient of a field radial in `x`: `∂_i = ω_i ∂_r`.
pub fn radial_gradient<T: Real>(wt: T, wr: T, wy: T, omega: [T; 3]) -> Gradient<T> {
    [wt, omega[0] * wr, omega[1] * wr, omega[2] * wr, wy]
}

/// Boost representation from `φ_t` and the rescaled boosts
/// `∂̄_i φ = ∂_i φ + (x_i/t) ∂_t φ`:
///
/// * `Q_0 = -Σ ∂̄_iφ ∂̄_iψ + Σ (x_i/t)(∂̄_iφ ψ_t + φ_t ∂̄_iψ) + ((t² - |x|²)/t²) φ_t ψ_t`
/// * `Q_{0i} = φ_t ∂̄_iψ - ∂̄_iφ ψ_t`
/// * `Q_{ij} = ∂̄_iφ ∂̄_jψ - ∂̄_jφ ∂̄_iψ + (x_i ∂̄_jφ - x_j ∂̄_iφ) ψ_t / t + φ_t (x_j ∂̄_iψ - x_i ∂̄_jψ) / t`
///
/// Every term carries either a good derivative `∂̄` or the factor `(t - r)/t`.
pub fn rep_boost_from_parts<T: Real>(q: NullFormId, t: T, x: [T; 3], phi: (T, [T; 3]), psi: (T, [T; 3])) -> T {
    let (pt, pb) = phi;
    let (qt, qb) = psi;
    match q {
        NullFormId::Q0 => {
            let r2: T = x.iter().map(|v| *v * *v).sum();
            let mut acc = (t * t - r2) / (t * t) * pt * qt;
            for i in 0..3 {
                acc = acc - pb[i] * qb[i] + x[i] / t * (pb[i] * qt + pt * qb[i]);
            }
            acc
        }
        NullFormId::Q0i(i) => {
            let i = usize::from(i) - 1;
            pt * qb[i] - pb[i] * qt
        }
        NullFormId::Qij(i, j) => {
            let (i, j) = (usize::from(i) - 1, usize::from(j) - 1);
            pb[i] * qb[j] - pb[j] * qb[i] + (x[i] * pb[j] - x[j] * pb[i]) * qt / t + pt * (x[j] * qb[i] - x[i] * qb[j]) / t
        }
    }
}

/// Tangential representation from `φ_t` and `T_i φ = ∂_i φ + ω_i ∂_t φ`:
///
/// * `Q_0 = -T φ·T ψ + (ω·Tφ) ψ_t + φ_t (ω·Tψ)`
/// * `Q_{0i} = φ_t T_iψ - T_iφ ψ_t`
/// * `Q_{ij} = T_iφ T_jψ - T_jφ T_iψ - ω_j T_iφ ψ_t + ω_i T_jφ ψ_t - ω_i φ_t T_jψ + ω_j φ_t T_iψ`
pub fn rep_tangential_from_parts<T: Real>(q: NullFormId, omega: [T; 3], phi: (T, [T; 3]), psi: (T, [T; 3])) -> T {
    let (pt, pv) = phi;
    let (qt, qv) = psi;
    match q {
        NullFormId::Q0 => {
            let mut acc = T::zero();
            for i in 0..3 {
                acc = acc - pv[i] * qv[i] + omega[i] * (pv[i] * qt + pt * qv[i]);
            }
            acc
        }
        NullFormId::Q0i(i) => {
            let i = usize::from(i) - 1;
            pt * qv[i] - pv[i] * qt
        }
        NullFormId::Qij(i, j) => {
            let (i, j) = (usize::from(i) - 1, usize::from(j) - 1);
            pv[i] * qv[j] - pv[j] * qv[i] - omega[j] * pv[i] * qt + omega[i] * pv[j] * qt - omega[i] * pt * qv[j]
                + omega[j] * pt * qv[i]
        }
    }
}

/// Where to evaluate a representation on buffered data: level `level`
/// (with one buffered level on each side), node `j`, angle `y`, direction
/// `omega` (a unit vector).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepPoint<T> {
    pub level: usize,
    pub j: usize,
    pub y: T,
    pub omega: [T; 3],
}

/// `(t, r, φ_t, φ_r)` at a point: `φ_t` from the centered difference of the
/// neighbouring levels, `φ_r` from the radial stencil.
fn history_derivatives<T: Real>(h: &StateHistory<T>, comp: usize, p: &RepPoint<T>) -> Result<(T, T, T, T)> {
    if p.level == 0 || p.level + 1 >= h.len() {
        return Err(Error::HistoryTooShallow { have: h.len(), need: p.level + 2 });
    }
    let (lo, mid, hi) = (h.level(p.level - 1), h.level(p.level), h.level(p.level + 1));
    let grid = mid.w[comp].grid();
    if p.j >= grid.len() {
        return Err(Error::Domain(format!("node {} outside the grid", p.j)));
    }
    let wt = (hi.w[comp].reconstruct(p.j, p.y) - lo.w[comp].reconstruct(p.j, p.y)) / (hi.t - lo.t);
    let wr = radial_derivative(&mid.w[comp], 1).reconstruct(p.j, p.y);
    Ok((mid.t, grid.r(p.j), wt, wr))
}

/// Boost representation of `Q(φ, ψ)` from buffered levels.
pub fn eval_rep_boost<T: Real>(
    q: NullFormId,
    phi: (&StateHistory<T>, usize),
    psi: (&StateHistory<T>, usize),
    p: &RepPoint<T>,
) -> Result<T> {
    let (t, r, pt, pr) = history_derivatives(phi.0, phi.1, p)?;
    let (_, _, qt, qr) = history_derivatives(psi.0, psi.1, p)?;
    if !(t > T::zero()) {
        return Err(Error::Domain(format!("boost representation needs t > 0, got {t}")));
    }
    let x = p.omega.map(|w| w * r);
    let bar = |wt: T, wr: T| p.omega.map(|w| w * (wr + r / t * wt));
    Ok(rep_boost_from_parts(q, t, x, (pt, bar(pt, pr)), (qt, bar(qt, qr))))
}

/// Tangential representation of `Q(φ, ψ)` from buffered levels.
pub fn eval_rep_tangential<T: Real>(
    q: NullFormId,
    phi: (&StateHistory<T>, usize),
    psi: (&StateHistory<T>, usize),
    p: &RepPoint<T>,
) -> Result<T> {
    let (_, r, pt, pr) = history_derivatives(phi.0, phi.1, p)?;
    let (_, _, qt, qr) = history_derivatives(psi.0, psi.1, p)?;
    if r == T::zero() {
        return Err(Error::Domain("tangential representation needs r > 0".into()));
    }
    let tan = |wt: T, wr: T| p.omega.map(|w| w * (wr + wt));
    Ok(rep_tangential_from_parts(q, p.omega, (pt, tan(pt, pr)), (qt, tan(qt, qr))))
}

#[cfg(test)]
mod tests;
