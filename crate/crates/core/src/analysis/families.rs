//! Frozen reference families of trial fields and the calibrated constants.

use std::sync::Arc;

use super::inequalities::{check_hardy, check_klainerman_sobolev, check_weighted_sobolev, InequalityCheck, Lemma};
use crate::energies::{Leaf, LeafKind};
use crate::error::Result;
use crate::fields::manufactured::{AnalyticField, Profile, Term};
use crate::fields::RadialGrid;
use crate::jet::Jet;

/// Time slice of the exterior families.
pub const T_REF: f64 = 6.0;
/// Weight exponent of the weighted Sobolev family.
pub const BETA_SOBOLEV: f64 = 0.5;
/// Weight exponent of the Hardy family.
pub const BETA_HARDY: f64 = 0.0;
/// Hyperboloid of the Klainerman–Sobolev family.
pub const S_REF: f64 = 3.0;
/// Probe radii on `H_{S_REF}`.
pub const KS_PROBES: [f64; 3] = [0.0, S_REF, 2.0 * S_REF];

/// Twice the largest ratio over the reference family.
pub const C_STAR_SOBOLEV: f64 = 3.94e-3;
pub const C_STAR_HARDY: f64 = 6.49e-2;
pub const C_STAR_KS: f64 = 6.38;

pub fn c_star(lemma: Lemma) -> f64 {
    match lemma {
        Lemma::WeightedSobolev => C_STAR_SOBOLEV,
        Lemma::Hardy => C_STAR_HARDY,
        Lemma::KlainermanSobolev => C_STAR_KS,
    }
}

pub struct TrialField {
    pub id: String,
    pub field: AnalyticField<f64>,
}

fn single(terms: Vec<(i64, Profile<f64>)>) -> AnalyticField<f64> {
    AnalyticField { components: vec![terms.into_iter().map(|(k, g)| Term { k, phase: 0.0, g }).collect()] }
}

/// `(1 - ((r-c)/a)²)^8` on `|r - c| < a`, zero elsewhere.
pub fn bump_jet(r: f64, c: f64, a: f64) -> Jet<f64> {
    if (r - c).abs() >= a {
        return Jet::zero();
    }
    let z = (Jet::var_r(r) + (-c)) * (1.0 / a);
    let q = Jet::constant(1.0) - z * z;
    let q2 = q * q;
    let q4 = q2 * q2;
    q4 * q4
}

/// `(2 + r - t)^{-m}`.
pub fn weight_jet(t: f64, r: f64, m: f64) -> Jet<f64> {
    (Jet::var_r(r) - Jet::var_t(t) + 2.0).powf(-m)
}

fn exterior_member(id: String, k: &[i64], offset: f64, half_width: f64, m: f64) -> TrialField {
    let terms = k
        .iter()
        .map(|&k| {
            let g: Profile<f64> =
                Arc::new(move |t, r| bump_jet(r, t + offset, half_width) * weight_jet(t, r, m));
            (k, g)
        })
        .collect();
    TrialField { id, field: single(terms) }
}

/// Twelve compactly supported fields on `Σ^ex_{T_REF}`: the weighted bump
/// for `m = 1..6`, outward translations, and `y`-dependent variants.
pub fn exterior_family() -> Vec<TrialField> {
    let mut out = Vec::new();
    for m in 1..=6 {
        out.push(exterior_member(format!("bump_m{m}"), &[0], 4.0, 3.0, m as f64));
    }
    for c in [6.0, 10.0, 14.0] {
        out.push(exterior_member(format!("bump_shift{c}"), &[0], c, 3.0, 2.0));
    }
    out.push(exterior_member("bump_k1".into(), &[1], 4.0, 3.0, 1.0));
    out.push(exterior_member("bump_k2_m3".into(), &[2], 4.0, 3.0, 3.0));
    out.push(exterior_member("bump_k01_narrow".into(), &[0, 1], 2.0, 1.5, 2.0));
    out
}

/// Grid covering the exterior family's supports.
pub fn exterior_grid() -> RadialGrid<f64> {
    RadialGrid::new(0.02, 1500)
}

/// Twelve smooth fields in the cone for the Klainerman–Sobolev check on `H_{S_REF}`.
pub fn cone_family() -> Vec<TrialField> {
    let gauss = |r: f64, s2: f64| (Jet::var_r(r) * Jet::var_r(r) * (-1.0 / s2)).exp();
    let mk = |id: &str, terms: Vec<(i64, Profile<f64>)>| TrialField { id: id.into(), field: single(terms) };
    vec![
        mk("gauss1", vec![(0, Arc::new(move |_t, r| gauss(r, 1.0)))]),
        mk("gauss2", vec![(0, Arc::new(move |_t, r| gauss(r, 4.0)))]),
        mk("gauss4", vec![(0, Arc::new(move |_t, r| gauss(r, 16.0)))]),
        mk("gauss2_cos_t", vec![(0, Arc::new(move |t, r| gauss(r, 4.0) * Jet::var_t(t).cos()))]),
        mk("gauss2_sin_2t", vec![(0, Arc::new(move |t, r| gauss(r, 4.0) * (Jet::var_t(t) * 2.0).sin()))]),
        mk("lorentz", vec![(0, Arc::new(|_t, r| (Jet::var_r(r) * Jet::var_r(r) + 1.0).recip()))]),
        mk("lorentz_cos_t", vec![(0, Arc::new(|t, r| (Jet::var_r(r) * Jet::var_r(r) + 1.0).recip() * Jet::var_t(t).cos()))]),
        mk("outgoing", vec![(0, Arc::new(|t, r| { let z = Jet::var_t(t) - Jet::var_r(r) + (-1.0); (z * z * -1.0).exp() }))]),
        mk("shell3", vec![(0, Arc::new(|_t, r| { let z = Jet::var_r(r) + (-3.0); (z * z * -1.0).exp() }))]),
        mk("inv_t_gauss", vec![(0, Arc::new(move |t, r| gauss(r, 1.0) * Jet::var_t(t).recip()))]),
        mk("gauss2_k1", vec![(1, Arc::new(move |_t, r| gauss(r, 4.0)))]),
        mk("gauss2_cos_t_k2", vec![(2, Arc::new(move |t, r| gauss(r, 4.0) * Jet::var_t(t).cos()))]),
    ]
}

pub fn cone_grid() -> RadialGrid<f64> {
    RadialGrid::new(0.02, 600)
}

fn leaf_of(field: &AnalyticField<f64>, kind: LeafKind, grid: RadialGrid<f64>) -> Leaf<f64> {
    Leaf::from_analytic(field, kind, grid, field.max_mode().max(1))
}

/// Every lemma on its reference family with the given constants.
pub fn run_family_checks(c_sobolev: f64, c_hardy: f64, c_ks: f64) -> Result<Vec<InequalityCheck>> {
    let mut out = Vec::new();
    for f in exterior_family() {
        let leaf = leaf_of(&f.field, LeafKind::Time(T_REF), exterior_grid());
        out.push(check_weighted_sobolev(&leaf, 0, BETA_SOBOLEV, &f.id, c_sobolev)?);
        out.push(check_hardy(&leaf, 0, BETA_HARDY, &f.id, c_hardy)?);
    }
    for f in cone_family() {
        let leaf = leaf_of(&f.field, LeafKind::Hyperboloid(S_REF), cone_grid());
        out.push(check_klainerman_sobolev(&leaf, 0, &KS_PROBES, &f.id, c_ks)?);
    }
    Ok(out)
}

/// The reference families against the frozen constants.
pub fn frozen_checks() -> Result<Vec<InequalityCheck>> {
    run_family_checks(C_STAR_SOBOLEV, C_STAR_HARDY, C_STAR_KS)
}

/// `(2 + r - t)^{-1}`, which has no compact support on any exterior slice.
pub fn tail_field() -> TrialField {
    TrialField { id: "tail".into(), field: single(vec![(0, Arc::new(|t, r| weight_jet(t, r, 1.0)))]) }
}

/// Hardy check of [`tail_field`] on `Σ^ex_{T_REF}`; expected to be refused.
pub fn hardy_on_tail() -> Result<InequalityCheck> {
    let f = tail_field();
    let leaf = leaf_of(&f.field, LeafKind::Time(T_REF), exterior_grid());
    check_hardy(&leaf, 0, BETA_HARDY, &f.id, C_STAR_HARDY)
}
