//! Checkers for the weighted Sobolev, weighted Hardy and Klainerman–Sobolev
//! inequalities on foliation leaves.

use std::f64::consts::{PI, TAU};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::energies::{Leaf, LeafKind, WordOps};
use crate::error::{Error, Result};
use crate::fields::history::NodeJets;
use crate::fields::spectral::y_grid_size;
use crate::geometry::{MultiIndex, VectorFieldId};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Lemma {
    WeightedSobolev,
    Hardy,
    KlainermanSobolev,
}

impl Lemma {
    pub fn id(self) -> &'static str {
        match self {
            Lemma::WeightedSobolev => "weighted_sobolev",
            Lemma::Hardy => "hardy",
            Lemma::KlainermanSobolev => "klainerman_sobolev",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub lemma: Lemma,
    pub field: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`; zero when both sides vanish.
    pub ratio: f64,
    pub c_star: f64,
    pub pass: bool,
}

impl InequalityCheck {
    pub fn new(lemma: Lemma, field: impl Into<String>, lhs: f64, rhs: f64, c_star: f64) -> Self {
        let ratio = if lhs == 0.0 && rhs == 0.0 { 0.0 } else { lhs / rhs };
        let pass = ratio.is_finite() && lhs <= c_star * rhs;
        InequalityCheck { lemma, field: field.into(), lhs, rhs, ratio, c_star, pass }
    }
}

fn c64<T: Real>(z: Complex<T>) -> Complex<f64> {
    Complex::new(z.re.to_f64_(), z.im.to_f64_())
}

/// `max_y |Σ_k w_k e^{iky}|` on the dealiased y-grid.
fn sup_y(modes: &[(i64, Complex<f64>)], k_max: usize) -> f64 {
    let m = y_grid_size(k_max);
    (0..m)
        .map(|i| {
            let y = TAU * i as f64 / m as f64;
            modes.iter().map(|(k, w)| (w * Complex::from_polar(1.0, *k as f64 * y)).re).sum::<f64>().abs()
        })
        .fold(0.0, f64::max)
}

fn time_of<T>(leaf: &Leaf<T>) -> Result<f64> {
    match leaf.kind {
        LeafKind::Time(t) => Ok(t),
        LeafKind::Hyperboloid(_) => Err(Error::Domain("inequality needs a time slice".into())),
    }
}

/// Lemma on `Σ^ex_t` with `Z^{≤2} = {1, ∂_y, ∂_y²}` (rotations vanish on
/// radial fields):
/// `sup (2+r-t)^β r²|w|² ≤ C ∬ (2+r-t)^{β+1}(∂_r Z^{≤2}w)² + (2+r-t)^{β-1}(Z^{≤2}w)²`.
pub fn check_weighted_sobolev<T: Real>(
    leaf: &Leaf<T>,
    comp: usize,
    beta: f64,
    field: &str,
    c_star: f64,
) -> Result<InequalityCheck> {
    let t = time_of(leaf)?;
    let (mut lhs, mut rhs) = (0.0f64, 0.0f64);
    for n in leaf.nodes.iter().filter(|n| n.r.to_f64_() >= t - 1.0) {
        let r = n.r.to_f64_();
        let g = 2.0 + r - t;
        let nj = &n.comps[comp];
        let vals: Vec<(i64, Complex<f64>)> = nj.ks().map(|k| (k, c64(nj.mode(k)[0][0]))).collect();
        let w = sup_y(&vals, leaf.k_max);
        lhs = lhs.max(g.powf(beta) * r * r * w * w);
        let (mut a, mut b) = (0.0, 0.0);
        for k in nj.ks() {
            let kk = (k * k) as f64;
            let z = 1.0 + kk + kk * kk;
            a += z * c64(nj.mode(k)[0][1]).norm_sqr();
            b += z * c64(nj.mode(k)[0][0]).norm_sqr();
        }
        rhs += n.weight.to_f64_() * TAU * (g.powf(beta + 1.0) * a + g.powf(beta - 1.0) * b);
    }
    Ok(InequalityCheck::new(Lemma::WeightedSobolev, field, lhs, rhs, c_star))
}

/// Relative size of `|w|` at the outermost node above which a field counts
/// as not compactly supported.
pub const COMPACT_TOL: f64 = 1e-12;

/// `∬_{Σ^ex_t} (2+r-t)^β w² ≤ C ∬_{Σ^ex_t} (2+r-t)^{β+2}(∂_r w)²`, `β > -1`,
/// for `w` vanishing at the truncation radius.
pub fn check_hardy<T: Real>(leaf: &Leaf<T>, comp: usize, beta: f64, field: &str, c_star: f64) -> Result<InequalityCheck> {
    if !(beta > -1.0) {
        return Err(Error::Domain(format!("Hardy inequality needs beta > -1, got {beta}")));
    }
    let t = time_of(leaf)?;
    let amp = |nj: &NodeJets<T>| nj.ks().map(|k| c64(nj.mode(k)[0][0]).norm()).sum::<f64>();
    let peak = leaf.nodes.iter().map(|n| amp(&n.comps[comp])).fold(0.0, f64::max);
    if let Some(last) = leaf.nodes.last() {
        let edge = amp(&last.comps[comp]);
        if edge > COMPACT_TOL * peak.max(f64::MIN_POSITIVE) && edge > 0.0 {
            return Err(Error::NotCompact(edge));
        }
    }
    let (mut lhs, mut rhs) = (0.0, 0.0);
    for n in leaf.nodes.iter().filter(|n| n.r.to_f64_() >= t - 1.0) {
        let g = 2.0 + n.r.to_f64_() - t;
        let nj = &n.comps[comp];
        let w2: f64 = nj.ks().map(|k| c64(nj.mode(k)[0][0]).norm_sqr()).sum();
        let wr2: f64 = nj.ks().map(|k| c64(nj.mode(k)[0][1]).norm_sqr()).sum();
        let wt = n.weight.to_f64_() * TAU;
        lhs += wt * g.powf(beta) * w2;
        rhs += wt * g.powf(beta + 2.0) * wr2;
    }
    Ok(InequalityCheck::new(Lemma::Hardy, field, lhs, rhs, c_star))
}

/// Area of the part of the sphere `|x'| = ρ` inside the ball `B(x, R)`, `|x| = r0`.
pub fn cap_area(rho: f64, r0: f64, big_r: f64) -> f64 {
    if rho + r0 <= big_r {
        4.0 * PI * rho * rho
    } else if (rho - r0).abs() >= big_r {
        0.0
    } else {
        PI * rho / r0 * (big_r * big_r - (rho - r0) * (rho - r0))
    }
}

/// Klainerman–Sobolev on `H_s` at the probe radius `r0`:
/// `|W(t,x)|² ≤ C t^{-3} Σ_{|γ|≤2} ∫_{B(x,t/3)} |Z^γ W|²` with the boosts
/// `Z_j = x_j ∂_t + t ∂_j`. For radial `W`,
/// `Σ_{|γ|≤2}|Z^γW|² = |W|² + |BW|² + |B²W|² + 2(t/ρ)²|BW|²`.
/// Both sides carry `∫dy`.
pub fn klainerman_sobolev_sides<T: Real>(leaf: &Leaf<T>, comp: usize, r0: f64) -> Result<(f64, f64)> {
    let s = leaf.s().ok_or_else(|| Error::Domain("Klainerman-Sobolev needs a hyperboloid".into()))?.to_f64_();
    let t0 = (s * s + r0 * r0).sqrt();
    let big_r = t0 / 3.0;
    let dr = leaf.grid.dr.to_f64_();
    let need = ((r0 + big_r) / dr).ceil() as usize + 2;
    if leaf.nodes.len() < need || leaf.t_order < 2 {
        return Err(Error::HistoryTooShallow { have: leaf.nodes.len(), need });
    }
    let j0 = (r0 / dr).round() as usize;
    let probe = &leaf.nodes[j0];
    if (probe.r.to_f64_() - r0).abs() > 1e-9 * dr.max(1.0) {
        return Err(Error::Domain(format!("probe radius {r0} is not a grid node")));
    }
    let nj = &probe.comps[comp];
    let lhs = TAU * nj.ks().map(|k| c64(nj.mode(k)[0][0]).norm_sqr()).sum::<f64>();
    let b1 = WordOps::new(&MultiIndex::new(vec![VectorFieldId::BoostR]));
    let b2 = WordOps::new(&MultiIndex::new(vec![VectorFieldId::BoostR, VectorFieldId::BoostR]));
    let mut integral = 0.0;
    for (idx, n) in leaf.nodes.iter().enumerate().take(need) {
        let rho = n.r.to_f64_();
        let area = cap_area(rho, r0, big_r);
        if area == 0.0 {
            continue;
        }
        let t = n.t.to_f64_();
        let nj = &n.comps[comp];
        let mut dens = 0.0;
        for k in nj.ks() {
            let w = c64(nj.mode(k)[0][0]).norm_sqr();
            let bw = c64(b1.eval(nj, k)[0]).norm_sqr();
            let bbw = c64(b2.eval(nj, k)[0]).norm_sqr();
            dens += w + bw + bbw + 2.0 * (t / rho).powi(2) * bw;
        }
        let wdr = if idx == 0 { 0.5 * dr } else { dr };
        integral += wdr * area * TAU * dens;
    }
    Ok((lhs, integral / t0.powi(3)))
}

/// Klainerman–Sobolev at every probe; the reported sides are those of the
/// probe with the largest ratio.
pub fn check_klainerman_sobolev<T: Real>(
    leaf: &Leaf<T>,
    comp: usize,
    probes: &[f64],
    field: &str,
    c_star: f64,
) -> Result<InequalityCheck> {
    let mut worst = InequalityCheck::new(Lemma::KlainermanSobolev, field, 0.0, 0.0, c_star);
    for &r0 in probes {
        let (lhs, rhs) = klainerman_sobolev_sides(leaf, comp, r0)?;
        let c = InequalityCheck::new(Lemma::KlainermanSobolev, field, lhs, rhs, c_star);
        if c.ratio.is_nan() || c.ratio > worst.ratio {
            worst = c;
        }
    }
    Ok(worst)
}
