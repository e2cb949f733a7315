use proptest::prelude::*;

use super::*;
use crate::fields::manufactured::{AnalyticField, Profile, Term};
use crate::fields::{Level, RadialGrid};
use crate::jet::Jet;
use std::sync::Arc;

fn e(i: usize) -> Gradient<f64> {
    let mut g = [0.0; 5];
    g[i] = 1.0;
    g
}

#[test]
fn direct_examples() {
    assert_eq!(eval_null_form(NullFormId::Q0, &e(0), &e(0)), 1.0);
    assert_eq!(eval_null_form(NullFormId::Qij(1, 2), &e(1), &e(2)), 1.0);
    let g = [0.3, -1.2, 0.5, 2.0, 0.7];
    for i in 1..=3 {
        assert_eq!(eval_null_form(NullFormId::Q0i(i), &g, &g), 0.0);
    }
}

#[test]
fn ids_parse_and_validate() {
    for q in NullFormId::ALL {
        assert_eq!(q.to_string().parse::<NullFormId>().unwrap(), q);
    }
    assert!(NullFormId::new_qij(2, 1).is_err());
    assert!(NullFormId::new_q0i(4).is_err());
    assert_eq!(NullFormId::from_pair(2, 1), Some((-1.0, NullFormId::Qij(1, 2))));
    assert_eq!(NullFormId::from_pair(3, 0), Some((-1.0, NullFormId::Q0i(3))));
}

fn unit(a: f64, b: f64) -> [f64; 3] {
    [a.sin() * b.cos(), a.sin() * b.sin(), a.cos()]
}

proptest! {
    #[test]
    fn symmetry_and_antisymmetry(g in prop::array::uniform5(-10.0f64..10.0), h in prop::array::uniform5(-10.0f64..10.0)) {
        for q in NullFormId::ALL {
            let (a, b) = (eval_null_form(q, &g, &h), eval_null_form(q, &h, &g));
            if q == NullFormId::Q0 {
                prop_assert_eq!(a, b);
            } else {
                prop_assert_eq!(eval_null_form(q, &g, &g), 0.0);
                prop_assert!((a + b).abs() <= 1e-12 * (1.0 + a.abs()));
            }
        }
    }

    #[test]
    fn representations_are_exact_identities(
        t in 2.0f64..20.0, rf in 0.01f64..1.5, th in 0.0f64..3.1, ph in 0.0f64..6.2,
        d in prop::array::uniform4(-3.0f64..3.0),
    ) {
        let r = rf * t;
        let w = unit(th, ph);
        let x = w.map(|c| c * r);
        let (pt, pr, qt, qr) = (d[0], d[1], d[2], d[3]);
        let gp = radial_gradient(pt, pr, 0.0, w);
        let gq = radial_gradient(qt, qr, 0.0, w);
        let bar = |wt: f64, wr: f64| w.map(|c| c * (wr + r / t * wt));
        let tan = |wt: f64, wr: f64| w.map(|c| c * (wr + wt));
        for q in NullFormId::ALL {
            let direct = eval_null_form(q, &gp, &gq);
            let b = rep_boost_from_parts(q, t, x, (pt, bar(pt, pr)), (qt, bar(qt, qr)));
            let tg = rep_tangential_from_parts(q, w, (pt, tan(pt, pr)), (qt, tan(qt, qr)));
            prop_assert!((b - direct).abs() < 1e-11 * (1.0 + direct.abs()), "{} boost", q);
            prop_assert!((tg - direct).abs() < 1e-11 * (1.0 + direct.abs()), "{} tangential", q);
        }
    }

    #[test]
    fn representations_hold_for_general_gradients(
        t in 2.0f64..20.0, x in prop::array::uniform3(-5.0f64..5.0),
        g in prop::array::uniform4(-3.0f64..3.0), h in prop::array::uniform4(-3.0f64..3.0),
    ) {
        let gp = [g[0], g[1], g[2], g[3], 0.0];
        let gq = [h[0], h[1], h[2], h[3], 0.0];
        let bar = |v: &Gradient<f64>| [v[1] + x[0] / t * v[0], v[2] + x[1] / t * v[0], v[3] + x[2] / t * v[0]];
        for q in NullFormId::ALL {
            let direct = eval_null_form(q, &gp, &gq);
            let b = rep_boost_from_parts(q, t, x, (gp[0], bar(&gp)), (gq[0], bar(&gq)));
            prop_assert!((b - direct).abs() < 1e-11 * (1.0 + direct.abs()));
        }
    }
}

#[test]
fn linear_time_field() {
    let w = [0.0, 0.0, 1.0];
    let p = (1.0, w.map(|c| c * 0.25));
    assert!((rep_boost_from_parts(NullFormId::Q0, 4.0f64, [0.0, 0.0, 1.0], p, p) - 1.0).abs() < 1e-15);
    assert_eq!(rep_boost_from_parts(NullFormId::Q0i(2), 4.0, [0.0, 0.0, 1.0], p, p), 0.0);
    assert_eq!(rep_tangential_from_parts(NullFormId::Q0i(3), w, p, p), 0.0);
}

fn radial_field(g: impl Fn(f64, f64) -> Jet<f64> + Send + Sync + 'static) -> AnalyticField<f64> {
    AnalyticField { components: vec![vec![Term { k: 0, phase: 0.0, g: Arc::new(g) as Profile<f64> }]] }
}

fn history_of(f: &AnalyticField<f64>, t: f64, dt: f64, grid: RadialGrid<f64>) -> StateHistory<f64> {
    let mut h = StateHistory::new(4);
    for tl in [t - dt, t, t + dt] {
        let (w, dw) = f.modes(0, tl, grid, 1);
        h.push(Level { t: tl, w: vec![w], dw: vec![dw], ddw: None }).unwrap();
    }
    h
}

#[test]
fn history_representations_converge_at_second_order() {
    let phi = radial_field(|t, r| (-(Jet::var_r(r) * Jet::var_r(r))).exp() * (Jet::var_t(t) * 0.8).sin());
    let psi = radial_field(|t, r| (Jet::var_r(r) * 0.7 + Jet::var_t(t) * 0.3).cos());
    let (t, r) = (3.0, 1.5);
    let w = unit(0.7, 1.9);
    let exact = |q| {
        let a = phi.at(0, t, r, 0.0).w;
        let b = psi.at(0, t, r, 0.0).w;
        eval_null_form(q, &radial_gradient(a.d(1, 0), a.d(0, 1), 0.0, w), &radial_gradient(b.d(1, 0), b.d(0, 1), 0.0, w))
    };
    for q in NullFormId::ALL {
        let mut errs = Vec::new();
        for n in [1usize, 2, 4] {
            let h = 0.1 / n as f64;
            let grid = RadialGrid::new(h, 40 * n);
            let (hp, hq) = (history_of(&phi, t, h / 2.0, grid), history_of(&psi, t, h / 2.0, grid));
            let p = RepPoint { level: 1, j: 15 * n, y: 0.0, omega: w };
            let b = eval_rep_boost(q, (&hp, 0), (&hq, 0), &p).unwrap();
            let tg = eval_rep_tangential(q, (&hp, 0), (&hq, 0), &p).unwrap();
            errs.push(((b - exact(q)).abs(), (tg - exact(q)).abs()));
        }
        if let NullFormId::Qij(..) = q {
            // both gradients are parallel to ω
            assert!(errs.iter().all(|(a, b)| *a < 1e-15 && *b < 1e-15));
            continue;
        }
        for k in 0..2 {
            let (r0, r1) = (errs[k].0 / errs[k + 1].0, errs[k].1 / errs[k + 1].1);
            assert!((3.5..4.5).contains(&r0) && (3.5..4.5).contains(&r1), "{q}: {errs:?}");
        }
    }
}

#[test]
fn representation_preconditions() {
    let f = radial_field(|_, _| Jet::constant(2.0));
    let grid = RadialGrid::new(0.1, 20);
    let h = history_of(&f, 3.0, 0.05, grid);
    let at = |j| RepPoint { level: 1, j, y: 0.0, omega: [1.0, 0.0, 0.0] };
    assert!(matches!(eval_rep_tangential(NullFormId::Q0, (&h, 0), (&h, 0), &at(0)), Err(Error::Domain(_))));
    for q in NullFormId::ALL {
        assert_eq!(eval_rep_boost(q, (&h, 0), (&h, 0), &at(5)).unwrap(), 0.0);
        assert_eq!(eval_rep_tangential(q, (&h, 0), (&h, 0), &at(5)).unwrap(), 0.0);
    }
    let edge = RepPoint { level: 0, ..at(5) };
    assert!(matches!(eval_rep_boost(NullFormId::Q0, (&h, 0), (&h, 0), &edge), Err(Error::HistoryTooShallow { .. })));
}

#[test]
fn outgoing_wave_has_small_tangential_derivative() {
    // φ = f(t - r)/r, f(z) = exp(-z²): T φ = -f/r²
    let t: f64 = 30.0;
    let r: f64 = 29.6;
    let z = t - r;
    let f = (-z * z).exp();
    let fp = -2.0 * z * f;
    let phi_t = fp / r;
    let phi_r = -fp / r - f / (r * r);
    let tan = phi_r + phi_t;
    assert!((tan + f / (r * r)).abs() < 1e-15);
    assert!(tan.abs() / phi_t.abs() < 2.0 / r);
}

#[test]
fn commutator_examples() {
    let leibniz_only = commute(SpacetimeField::Omega(1, 2), NullFormId::Q0).unwrap();
    assert_eq!(leibniz_only.terms().len(), 2);
    assert!(leibniz_only.terms().iter().all(|t| t.form == NullFormId::Q0 && t.coeff == 1.0));
    let e = commute(SpacetimeField::Omega(0, 1), NullFormId::Q0i(2)).unwrap();
    let corr: Vec<_> = e.terms().iter().filter(|t| t.left.0.is_empty() && t.right.0.is_empty()).collect();
    assert_eq!(corr.len(), 1);
    assert_eq!((corr[0].coeff, corr[0].form), (-1.0, NullFormId::Qij(1, 2)));
    // Ω_{01} Q_{12}: the exact correction is -Q_{02}
    let e = commute(SpacetimeField::Omega(0, 1), NullFormId::Qij(1, 2)).unwrap();
    let corr: Vec<_> = e.terms().iter().filter(|t| t.left.0.is_empty() && t.right.0.is_empty()).collect();
    assert_eq!((corr[0].coeff, corr[0].form), (-1.0, NullFormId::Q0i(2)));
}

#[test]
fn all_identities_hold_on_cubics() {
    let res = verify_all(&CommutatorTable::standard());
    assert_eq!(res.len(), 42);
    for r in &res {
        assert!(r.residual < 1e-12, "{} {}: {}", r.z, r.q, r.residual);
    }
}

#[test]
fn scaling_identities_complete_the_suite() {
    let res = identity_suite(&CommutatorTable::standard());
    assert_eq!(res.len(), 49);
    assert!(res.iter().all(|r| r.residual < 1e-12));
    // dropping the -2Q correction is visible
    let (phi, psi) = (trial_cubic(1), trial_cubic(2));
    let s = SpacetimeField::Scaling;
    let naive = s.apply(&null_form_poly(NullFormId::Q0, &phi, &psi))
        .add(&null_form_poly(NullFormId::Q0, &s.apply(&phi), &psi).scale(-1.0))
        .add(&null_form_poly(NullFormId::Q0, &phi, &s.apply(&psi)).scale(-1.0));
    assert!(sample_points().iter().any(|p| naive.eval(*p).abs() > 1e-3));
}

#[test]
fn closure_and_non_klainerman() {
    for z in SpacetimeField::KLAINERMAN {
        for q in NullFormId::ALL {
            for f in commute(z, q).unwrap().forms() {
                assert!(NullFormId::ALL.contains(&f));
            }
        }
    }
    for z in [SpacetimeField::Dt, SpacetimeField::Dx(1), SpacetimeField::Dy, SpacetimeField::Scaling] {
        assert!(matches!(commute(z, NullFormId::Q0), Err(Error::NotKlainerman(_))));
    }
}

#[test]
fn sign_flip_is_detected() {
    let z = SpacetimeField::Omega(0, 2);
    let q = NullFormId::Q0i(1);
    let bad = CommutatorTable::standard().with_sign_flip(z, q);
    let res = verify_all(&bad);
    let hit = res.iter().find(|r| r.z == z && r.q == q).unwrap();
    assert!(hit.residual > 1e-3);
    assert_eq!(res.iter().filter(|r| r.residual > 1e-12).count(), 1);
}

#[test]
fn iterated_commutators() {
    let table = CommutatorTable::standard();
    let (phi, psi) = (trial_cubic(3), trial_cubic(4));
    let pts = sample_points();
    for (z1, z2) in [(SpacetimeField::Omega(0, 1), SpacetimeField::Omega(1, 2)), (SpacetimeField::Omega(0, 3), SpacetimeField::Omega(0, 2))] {
        for q in NullFormId::ALL {
            let e2 = NullFormExpr::single(q).commute_all(&table, z1).unwrap().commute_all(&table, z2).unwrap();
            let lhs = z2.apply(&z1.apply(&null_form_poly(q, &phi, &psi)));
            let rhs = e2.expand(&phi, &psi);
            let res = pts.iter().map(|p| (lhs.eval(*p) - rhs.eval(*p)).abs()).fold(0.0, f64::max);
            assert!(res < 1e-10, "{z2}{z1} {q}: {res}");
        }
    }
}

#[test]
fn text_grammar_roundtrip() {
    let e = commute(SpacetimeField::Omega(0, 3), NullFormId::Qij(2, 3)).unwrap();
    let text = e.to_string();
    assert!(text.lines().all(|l| l.contains(" * Q[") && l.ends_with(" .)")));
    assert!(text.contains("1 * Q[23](Ω03 ., 1 .)"));
    assert_eq!(text.parse::<NullFormExpr>().unwrap(), e);
    let w: ZWord = "Ω01·Ω12".parse().unwrap();
    assert_eq!(w.0.len(), 2);
}

#[test]
fn trial_fields_are_cubic() {
    assert_eq!(trial_cubic(1).degree(), 3);
    assert_ne!(trial_cubic(1), trial_cubic(2));
}
