use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;

use super::families::*;
use super::inequalities::{cap_area, klainerman_sobolev_sides};
use super::*;
use crate::energies::{Leaf, LeafKind};
use crate::error::Error;
use crate::fields::manufactured::{AnalyticField, Profile, Term};
use crate::fields::RadialGrid;
use crate::jet::Jet;
use crate::pipeline::{simulate, SimulateOptions};
use crate::solver::{Ablation, Nonlinearity, SolverConfig};

fn scaled(f: &AnalyticField<f64>, c: f64) -> AnalyticField<f64> {
    AnalyticField {
        components: f
            .components
            .iter()
            .map(|terms| {
                terms
                    .iter()
                    .map(|t| {
                        let g = t.g.clone();
                        let g: Profile<f64> = Arc::new(move |tt, r| g(tt, r) * c);
                        Term { k: t.k, phase: t.phase, g }
                    })
                    .collect()
            })
            .collect(),
    }
}

fn zero_field() -> AnalyticField<f64> {
    AnalyticField { components: vec![vec![]] }
}

fn time_leaf(f: &AnalyticField<f64>, grid: RadialGrid<f64>) -> Leaf<f64> {
    Leaf::from_analytic(f, LeafKind::Time(T_REF), grid, f.max_mode().max(1))
}

#[test]
fn frozen_constants_match_calibration() {
    let checks = run_family_checks(1.0, 1.0, 1.0).unwrap();
    assert_eq!(checks.len(), 36);
    for lemma in [Lemma::WeightedSobolev, Lemma::Hardy, Lemma::KlainermanSobolev] {
        let max = checks.iter().filter(|c| c.lemma == lemma).map(|c| c.ratio).fold(0.0, f64::max);
        let c = c_star(lemma);
        assert!(2.0 * max <= c && c <= 2.02 * max, "{lemma:?}: max ratio {max}, frozen {c}");
    }
    assert!(frozen_checks().unwrap().iter().all(|c| c.pass && c.ratio.is_finite()));
}

#[test]
fn zero_field_passes_vacuously() {
    let z = zero_field();
    let leaf = time_leaf(&z, exterior_grid());
    let c = check_weighted_sobolev(&leaf, 0, 0.5, "zero", C_STAR_SOBOLEV).unwrap();
    assert_eq!((c.lhs, c.rhs, c.ratio, c.pass), (0.0, 0.0, 0.0, true));
    let c = check_hardy(&leaf, 0, 0.0, "zero", C_STAR_HARDY).unwrap();
    assert_eq!((c.lhs, c.rhs, c.pass), (0.0, 0.0, true));
    let leaf = Leaf::from_analytic(&z, LeafKind::Hyperboloid(S_REF), cone_grid(), 1);
    let c = check_klainerman_sobolev(&leaf, 0, &KS_PROBES, "zero", C_STAR_KS).unwrap();
    assert_eq!((c.lhs, c.rhs, c.pass), (0.0, 0.0, true));
}

#[test]
fn sobolev_ratio_bounded_in_m_and_under_translation() {
    let fam = exterior_family();
    let ratio = |f: &TrialField| check_weighted_sobolev(&time_leaf(&f.field, exterior_grid()), 0, BETA_SOBOLEV, &f.id, 1.0).unwrap().ratio;
    let by_m: Vec<f64> = fam[..6].iter().map(ratio).collect();
    let (lo, hi) = by_m.iter().fold((f64::INFINITY, 0.0f64), |(a, b), r| (a.min(*r), b.max(*r)));
    assert!(hi / lo < 1.2, "{by_m:?}");
    let shifted: Vec<f64> = fam[6..9].iter().map(ratio).collect();
    assert!(shifted.iter().all(|r| *r <= hi && *r > 0.1 * hi), "{shifted:?}");
}

#[test]
fn sobolev_sides_match_direct_quadrature() {
    let fam = exterior_family();
    let f = &fam[1];
    let coarse = check_weighted_sobolev(&time_leaf(&f.field, exterior_grid()), 0, 0.5, "m2", 1.0).unwrap();
    let fine = check_weighted_sobolev(&time_leaf(&f.field, RadialGrid::new(0.005, 6000)), 0, 0.5, "m2", 1.0).unwrap();
    assert!((coarse.rhs / fine.rhs - 1.0).abs() < 1e-3);
    // direct sup of (2+r-t)^β r² w² on a dense line
    let t = T_REF;
    let direct = (0..=200_000)
        .map(|i| t - 1.0 + 30.0 * i as f64 / 200_000.0)
        .map(|r| {
            let w = bump_jet(r, t + 4.0, 3.0).value() * (2.0 + r - t).powf(-2.0);
            (2.0 + r - t).sqrt() * r * r * w * w
        })
        .fold(0.0, f64::max);
    assert!((fine.lhs / direct - 1.0).abs() < 1e-4, "{} vs {direct}", fine.lhs);
}

#[test]
fn hardy_preconditions() {
    let fam = exterior_family();
    let leaf = time_leaf(&fam[0].field, exterior_grid());
    assert!(matches!(check_hardy(&leaf, 0, -1.0, "b", 1.0), Err(Error::Domain(_))));
    assert!(matches!(check_hardy(&leaf, 0, -2.0, "b", 1.0), Err(Error::Domain(_))));
    let g: Profile<f64> = Arc::new(|t, r| (Jet::var_r(r) - Jet::var_t(t) + 2.0).recip());
    let tail = AnalyticField { components: vec![vec![Term { k: 0, phase: 0.0, g }]] };
    let leaf = time_leaf(&tail, exterior_grid());
    assert!(matches!(check_hardy(&leaf, 0, 0.0, "tail", C_STAR_HARDY), Err(Error::NotCompact(_))));
}

#[test]
fn hardy_example_and_sharpness() {
    let g: Profile<f64> = Arc::new(|t, r| bump_jet(r, t + 5.0, 3.0));
    let f = AnalyticField { components: vec![vec![Term { k: 0, phase: 0.0, g }]] };
    let c = check_hardy(&time_leaf(&f, exterior_grid()), 0, 0.0, "bump_t5", C_STAR_HARDY).unwrap();
    assert!(c.pass, "{c:?}");
    let g: Profile<f64> = Arc::new(|t, r| bump_jet(r, t + 60.0, 59.0));
    let wide = AnalyticField { components: vec![vec![Term { k: 0, phase: 0.0, g }]] };
    let leaf = time_leaf(&wide, RadialGrid::new(0.02, 7000));
    let r09 = check_hardy(&leaf, 0, -0.9, "wide", 1.0).unwrap().ratio;
    let r099 = check_hardy(&leaf, 0, -0.99, "wide", 1.0).unwrap().ratio;
    let r0 = check_hardy(&leaf, 0, 0.0, "wide", 1.0).unwrap().ratio;
    assert!(r0 < r09 && r09 < r099, "{r0} {r09} {r099}");
}

#[test]
fn cap_areas_integrate_to_ball_volume() {
    for (r0, big_r) in [(0.0, 2.0), (1.0, 2.0), (5.0, 2.0), (2.0, 2.0)] {
        let n = 200_000;
        let hi = r0 + big_r;
        let h = hi / n as f64;
        let vol: f64 = (0..n).map(|i| cap_area((i as f64 + 0.5) * h, r0, big_r) * h).sum();
        let exact = 4.0 / 3.0 * PI * big_r.powi(3);
        assert!((vol / exact - 1.0).abs() < 1e-6, "r0 = {r0}: {vol} vs {exact}");
    }
}

#[test]
fn ks_needs_the_whole_ball() {
    let fam = cone_family();
    let full = Leaf::from_analytic(&fam[0].field, LeafKind::Hyperboloid(S_REF), cone_grid(), 1);
    let mut cut = full.clone();
    cut.nodes.truncate(300);
    assert!(klainerman_sobolev_sides(&full, 0, 2.0 * S_REF).is_ok());
    assert!(matches!(klainerman_sobolev_sides(&cut, 0, 2.0 * S_REF), Err(Error::HistoryTooShallow { .. })));
    assert!(klainerman_sobolev_sides(&cut, 0, 0.0).is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]
    #[test]
    fn ratios_are_scale_invariant(c in 0.01f64..100.0, which in 0usize..12) {
        let ext = &exterior_family()[which];
        let a = time_leaf(&ext.field, exterior_grid());
        let b = time_leaf(&scaled(&ext.field, c), exterior_grid());
        let ra = check_weighted_sobolev(&a, 0, 0.5, "a", 1.0).unwrap().ratio;
        let rb = check_weighted_sobolev(&b, 0, 0.5, "b", 1.0).unwrap().ratio;
        prop_assert!((ra / rb - 1.0).abs() < 1e-12);
        let ha = check_hardy(&a, 0, 0.0, "a", 1.0).unwrap().ratio;
        let hb = check_hardy(&b, 0, 0.0, "b", 1.0).unwrap().ratio;
        prop_assert!((ha / hb - 1.0).abs() < 1e-12);
        let cone = &cone_family()[which];
        let a = Leaf::from_analytic(&cone.field, LeafKind::Hyperboloid(S_REF), cone_grid(), 2);
        let b = Leaf::from_analytic(&scaled(&cone.field, c), LeafKind::Hyperboloid(S_REF), cone_grid(), 2);
        let ka = check_klainerman_sobolev(&a, 0, &KS_PROBES, "a", 1.0).unwrap().ratio;
        let kb = check_klainerman_sobolev(&b, 0, &KS_PROBES, "b", 1.0).unwrap().ratio;
        prop_assert!((ka / kb - 1.0).abs() < 1e-12);
    }
}

/// `u = a t` and `v = s^{-3/2} cos(s) cos(y)`: along every ray
/// `ω = cos λ cos y`, so with `a = 0` `Y² = π` and `B = 0`; `A = a t / (2λ)`
/// at the ray point.
fn ray_field(a: f64) -> AnalyticField<f64> {
    let u: Profile<f64> = Arc::new(move |t, _r| Jet::var_t(t) * a);
    let v: Profile<f64> = Arc::new(|t, r| {
        let s2 = Jet::var_t(t) * Jet::var_t(t) - Jet::var_r(r) * Jet::var_r(r);
        s2.powf(-0.75) * s2.sqrt().cos()
    });
    AnalyticField {
        components: vec![vec![Term { k: 0, phase: 0.0, g: u }], vec![Term { k: 1, phase: 0.0, g: v }]],
    }
}

fn ray_leaves(f: &AnalyticField<f64>, lambdas: &[f64]) -> Vec<Leaf<f64>> {
    lambdas.iter().map(|s| Leaf::from_analytic(f, LeafKind::Hyperboloid(*s), RadialGrid::new(0.02, 400), 2)).collect()
}

#[test]
fn ray_diagnostic_on_conserved_profile() {
    let lambdas: Vec<f64> = (0..=12).map(|i| 2.0 + 0.5 * i as f64).collect();
    let (t, r) = (10.0, 6.0);
    let d = ray_diagnostic(&ray_leaves(&ray_field(0.0), &lambdas), 1, t, r, &lambdas).unwrap();
    for (i, y) in d.y.iter().enumerate() {
        assert!((y - PI.sqrt()).abs() < 1e-6, "Y({}) = {y}", d.lambda[i]);
        assert!(d.b[i] < 1e-4, "B({}) = {}", d.lambda[i], d.b[i]);
        assert_eq!(d.a[i], 0.0);
    }
    assert!(d.drift() < 1e-6);
    assert!(d.gronwall_holds(1e-6));
    let a = 0.01;
    let d = ray_diagnostic(&ray_leaves(&ray_field(a), &lambdas), 1, t, r, &lambdas).unwrap();
    for (i, l) in d.lambda.iter().enumerate() {
        let tl = l * t / 8.0;
        assert!((d.a[i] - a * tl / (2.0 * l)).abs() < 1e-8, "A({l}) = {}", d.a[i]);
        let y2 = PI * (1.0 + a * tl * (l.cos()).powi(2));
        assert!((d.y[i] - y2.sqrt()).abs() < 1e-6, "Y({l}) = {}", d.y[i]);
    }
    assert!(d.gronwall_holds(1e-6));
}

#[test]
fn ray_diagnostic_zero_and_domain() {
    let lambdas = [2.0, 3.0, 4.0];
    let leaves = ray_leaves(&AnalyticField { components: vec![vec![], vec![]] }, &lambdas);
    let d = ray_diagnostic(&leaves, 1, 5.0, 3.0, &lambdas).unwrap();
    assert!(d.y.iter().chain(&d.a).chain(&d.b).all(|v| *v == 0.0));
    assert!(matches!(ray_diagnostic(&leaves, 1, 5.0, 3.0, &[2.0, 2.5]), Err(Error::RayLeavesDomain(l)) if l == 2.5));
    assert!(matches!(ray_diagnostic(&leaves, 1, 50.0, 49.0, &lambdas), Err(Error::RayLeavesDomain(_))));
}

fn small_run(eps: f64, ablation: Ablation) -> SolverConfig {
    SolverConfig {
        epsilon: eps,
        jmax: 160,
        dr: 0.1,
        dt: 0.05,
        t_end: 8.0,
        leaves: vec![2.0, 2.5, 3.0],
        nonlinearity: Nonlinearity { ablation, ..Default::default() },
        ..Default::default()
    }
}

#[test]
fn ablation_compare_checks_configs() {
    let on = small_run(1e-3, Ablation::NullOn);
    let off = small_run(1e-3, Ablation::NullOff);
    let a = simulate::<f64>(&on, SimulateOptions::default(), &mut []).unwrap();
    let b = simulate::<f64>(&off, SimulateOptions::default(), &mut []).unwrap();
    let input = AblationInput::new::<f64>;
    let rep = ablation_compare(&input(&on, &a), &input(&off, &b)).unwrap();
    assert!(rep.null_on.ratio.is_finite() && rep.null_off.ratio.is_finite());
    assert!(matches!(ablation_compare(&input(&off, &b), &input(&on, &a)), Err(Error::ConfigMismatch(_))));
    let other = SolverConfig { dt: 0.04, ..off.clone() };
    assert!(matches!(ablation_compare(&input(&on, &a), &input(&other, &b)), Err(Error::ConfigMismatch(_))));

    let on0 = small_run(0.0, Ablation::NullOn);
    let off0 = small_run(0.0, Ablation::NullOff);
    let a0 = simulate::<f64>(&on0, SimulateOptions::default(), &mut []).unwrap();
    let b0 = simulate::<f64>(&off0, SimulateOptions::default(), &mut []).unwrap();
    assert_eq!(a0.all_reports(), b0.all_reports());
    let rep = ablation_compare(&input(&on0, &a0), &input(&off0, &b0)).unwrap();
    assert_eq!((rep.null_on.ratio, rep.null_off.ratio, rep.off_worse), (1.0, 1.0, false));
}
