//! Commutation of the null forms with rotations and boosts, and its exact
//! verification on polynomial trial fields.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::NullFormId;
use crate::error::{Error, Result};

/// Vector fields on `R^{1+3}`; coordinates are indexed `0 = t`, `1..3 = x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SpacetimeField {
    Dt,
    Dx(u8),
    Dy,
    Scaling,
    /// `Ω_{0i} = t∂_i + x_i∂_t` for `a = 0`, `Ω_{ij} = x_j∂_i - x_i∂_j` otherwise; `a < b`.
    Omega(u8, u8),
}

impl SpacetimeField {
    /// The three rotations and three boosts.
    pub const KLAINERMAN: [SpacetimeField; 6] = [
        SpacetimeField::Omega(1, 2),
        SpacetimeField::Omega(1, 3),
        SpacetimeField::Omega(2, 3),
        SpacetimeField::Omega(0, 1),
        SpacetimeField::Omega(0, 2),
        SpacetimeField::Omega(0, 3),
    ];

    pub fn is_klainerman(self) -> bool {
        matches!(self, SpacetimeField::Omega(a, b) if a < b && b <= 3)
    }

    /// `(coefficient polynomial, direction)` pairs: `Z = Σ p_k ∂_{d_k}`.
    fn components(self) -> Vec<(Poly4, usize)> {
        match self {
            SpacetimeField::Dt => vec![(Poly4::constant(1.0), 0)],
            SpacetimeField::Dx(i) => vec![(Poly4::constant(1.0), usize::from(i))],
            SpacetimeField::Dy => vec![],
            SpacetimeField::Scaling => (0..4).map(|a| (Poly4::coordinate(a), a)).collect(),
            SpacetimeField::Omega(0, i) => {
                let i = usize::from(i);
                vec![(Poly4::coordinate(0), i), (Poly4::coordinate(i), 0)]
            }
            SpacetimeField::Omega(i, j) => {
                let (i, j) = (usize::from(i), usize::from(j));
                vec![(Poly4::coordinate(j), i), (Poly4::coordinate(i).scale(-1.0), j)]
            }
        }
    }

    pub fn apply(self, p: &Poly4) -> Poly4 {
        let mut out = Poly4::default();
        for (c, d) in self.components() {
            out = out.add(&c.mul(&p.deriv(d)));
        }
        out
    }
}

impl fmt::Display for SpacetimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpacetimeField::Dt => write!(f, "Dt"),
            SpacetimeField::Dx(i) => write!(f, "D{i}"),
            SpacetimeField::Dy => write!(f, "Dy"),
            SpacetimeField::Scaling => write!(f, "S"),
            SpacetimeField::Omega(a, b) => write!(f, "Ω{a}{b}"),
        }
    }
}

impl FromStr for SpacetimeField {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Domain(format!("bad vector field `{s}`"));
        match s {
            "Dt" => return Ok(SpacetimeField::Dt),
            "Dy" => return Ok(SpacetimeField::Dy),
            "S" => return Ok(SpacetimeField::Scaling),
            _ => {}
        }
        if let Some(d) = s.strip_prefix('D') {
            let i: u8 = d.parse().map_err(|_| bad())?;
            return if (1..=3).contains(&i) { Ok(SpacetimeField::Dx(i)) } else { Err(bad()) };
        }
        let d: Vec<u8> = s.strip_prefix('Ω').ok_or_else(bad)?.bytes().map(|b| b.wrapping_sub(b'0')).collect();
        match d.as_slice() {
            [a, b] if a < b && *b <= 3 => Ok(SpacetimeField::Omega(*a, *b)),
            _ => Err(bad()),
        }
    }
}

/// Product of spacetime fields; the rightmost acts first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct ZWord(pub Vec<SpacetimeField>);

impl ZWord {
    pub fn identity() -> Self {
        ZWord(Vec::new())
    }

    /// `z ∘ self`.
    pub fn then(&self, z: SpacetimeField) -> Self {
        let mut w = vec![z];
        w.extend_from_slice(&self.0);
        ZWord(w)
    }

    pub fn apply(&self, p: &Poly4) -> Poly4 {
        self.0.iter().rev().fold(p.clone(), |acc, z| z.apply(&acc))
    }
}

impl fmt::Display for ZWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(|z| z.to_string()).collect();
        write!(f, "{}", parts.join("·"))
    }
}

impl FromStr for ZWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "1" {
            return Ok(ZWord::identity());
        }
        s.split('·').map(str::parse).collect::<Result<Vec<_>>>().map(ZWord)
    }
}

/// `coeff * Q(Z^left φ, Z^right ψ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullTerm {
    pub coeff: f64,
    pub form: NullFormId,
    pub left: ZWord,
    pub right: ZWord,
}

/// Linear combination of null forms in canonical order: sorted by
/// `(form, left, right)`, like terms merged, zero coefficients dropped.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct NullFormExpr {
    terms: Vec<NullTerm>,
}

impl NullFormExpr {
    pub fn new(terms: impl IntoIterator<Item = NullTerm>) -> Self {
        let mut m: BTreeMap<(NullFormId, ZWord, ZWord), f64> = BTreeMap::new();
        for t in terms {
            *m.entry((t.form, t.left, t.right)).or_insert(0.0) += t.coeff;
        }
        let terms = m
            .into_iter()
            .filter(|(_, c)| *c != 0.0)
            .map(|((form, left, right), coeff)| NullTerm { coeff, form, left, right })
            .collect();
        NullFormExpr { terms }
    }

    pub fn single(form: NullFormId) -> Self {
        Self::new([NullTerm { coeff: 1.0, form, left: ZWord::identity(), right: ZWord::identity() }])
    }

    pub fn terms(&self) -> &[NullTerm] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Forms appearing in the expression.
    pub fn forms(&self) -> Vec<NullFormId> {
        let mut f: Vec<_> = self.terms.iter().map(|t| t.form).collect();
        f.dedup();
        f
    }

    /// Value on polynomial fields.
    pub fn expand(&self, phi: &Poly4, psi: &Poly4) -> Poly4 {
        self.terms.iter().fold(Poly4::default(), |acc, t| {
            acc.add(&null_form_poly(t.form, &t.left.apply(phi), &t.right.apply(psi)).scale(t.coeff))
        })
    }

    /// Applies `z` to every term (Leibniz plus correction), so commutators
    /// of any order are iterated first-order ones.
    pub fn commute_all(&self, table: &CommutatorTable, z: SpacetimeField) -> Result<NullFormExpr> {
        let mut out = Vec::new();
        for t in &self.terms {
            let inner = commute_with(table, z, t.form)?;
            for it in inner.terms {
                // Q'(Z^a (Z^l φ), Z^b (Z^r ψ))
                let left = ZWord([it.left.0.clone(), t.left.0.clone()].concat());
                let right = ZWord([it.right.0.clone(), t.right.0.clone()].concat());
                out.push(NullTerm { coeff: t.coeff * it.coeff, form: it.form, left, right });
            }
        }
        Ok(NullFormExpr::new(out))
    }
}

impl fmt::Display for NullFormExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.terms {
            writeln!(f, "{} * {}({} ., {} .)", t.coeff, t.form, t.left, t.right)?;
        }
        Ok(())
    }
}

impl FromStr for NullFormExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for line in s.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let bad = || Error::Domain(format!("bad term `{line}`"));
            let (c, rest) = line.split_once(" * ").ok_or_else(bad)?;
            let (form, args) = rest.split_once('(').ok_or_else(bad)?;
            let args = args.strip_suffix(')').ok_or_else(bad)?;
            let (l, r) = args.split_once(", ").ok_or_else(bad)?;
            let word = |a: &str| a.strip_suffix(" .").ok_or_else(bad).and_then(str::parse::<ZWord>);
            terms.push(NullTerm {
                coeff: c.parse().map_err(|_| bad())?,
                form: form.parse()?,
                left: word(l)?,
                right: word(r)?,
            });
        }
        Ok(NullFormExpr::new(terms))
    }
}

/// Correction terms `Z Q - Q(Zφ, ψ) - Q(φ, Zψ) = Σ c Q'(φ, ψ)` per
/// rotation or boost and null form.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutatorTable {
    entries: BTreeMap<(SpacetimeField, NullFormId), Vec<(f64, NullFormId)>>,
}

type Row = (u8, u8, NullFormId, f64, NullFormId);

const fn q0(i: u8) -> NullFormId {
    NullFormId::Q0i(i)
}

const fn q(i: u8, j: u8) -> NullFormId {
    NullFormId::Qij(i, j)
}

const STANDARD: [Row; 24] = [
    (1, 2, q(1, 3), 1.0, q(2, 3)),
    (1, 2, q(2, 3), -1.0, q(1, 3)),
    (1, 2, q0(1), 1.0, q0(2)),
    (1, 2, q0(2), -1.0, q0(1)),
    (1, 3, q(1, 2), -1.0, q(2, 3)),
    (1, 3, q(2, 3), 1.0, q(1, 2)),
    (1, 3, q0(1), 1.0, q0(3)),
    (1, 3, q0(3), -1.0, q0(1)),
    (2, 3, q(1, 2), 1.0, q(1, 3)),
    (2, 3, q(1, 3), -1.0, q(1, 2)),
    (2, 3, q0(2), 1.0, q0(3)),
    (2, 3, q0(3), -1.0, q0(2)),
    (0, 1, q(1, 2), -1.0, q0(2)),
    (0, 1, q(1, 3), -1.0, q0(3)),
    (0, 1, q0(2), -1.0, q(1, 2)),
    (0, 1, q0(3), -1.0, q(1, 3)),
    (0, 2, q(1, 2), 1.0, q0(1)),
    (0, 2, q(2, 3), -1.0, q0(3)),
    (0, 2, q0(1), 1.0, q(1, 2)),
    (0, 2, q0(3), -1.0, q(2, 3)),
    (0, 3, q(1, 3), 1.0, q0(1)),
    (0, 3, q(2, 3), 1.0, q0(2)),
    (0, 3, q0(1), 1.0, q(1, 3)),
    (0, 3, q0(2), 1.0, q(2, 3)),
];

impl CommutatorTable {
    pub fn standard() -> Self {
        let mut entries: BTreeMap<_, Vec<_>> = BTreeMap::new();
        for (a, b, form, c, out) in STANDARD {
            entries.entry((SpacetimeField::Omega(a, b), form)).or_default().push((c, out));
        }
        CommutatorTable { entries }
    }

    /// Flips the sign of one correction (fault injection).
    pub fn with_sign_flip(mut self, z: SpacetimeField, q: NullFormId) -> Self {
        if let Some(v) = self.entries.get_mut(&(z, q)) {
            for (c, _) in v.iter_mut() {
                *c = -*c;
            }
        }
        self
    }

    pub fn correction(&self, z: SpacetimeField, q: NullFormId) -> &[(f64, NullFormId)] {
        self.entries.get(&(z, q)).map_or(&[], |v| v.as_slice())
    }
}

impl Default for CommutatorTable {
    fn default() -> Self {
        Self::standard()
    }
}

/// `Z Q(φ, ψ)` as Leibniz terms plus the tabulated correction.
pub fn commute_with(table: &CommutatorTable, z: SpacetimeField, q: NullFormId) -> Result<NullFormExpr> {
    if !z.is_klainerman() {
        return Err(Error::NotKlainerman(z.to_string()));
    }
    let id = ZWord::identity;
    let mut terms = vec![
        NullTerm { coeff: 1.0, form: q, left: id().then(z), right: id() },
        NullTerm { coeff: 1.0, form: q, left: id(), right: id().then(z) },
    ];
    terms.extend(table.correction(z, q).iter().map(|&(coeff, form)| NullTerm { coeff, form, left: id(), right: id() }));
    Ok(NullFormExpr::new(terms))
}

pub fn commute(z: SpacetimeField, q: NullFormId) -> Result<NullFormExpr> {
    commute_with(&CommutatorTable::standard(), z, q)
}

/// Polynomial in `(t, x_1, x_2, x_3)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly4(BTreeMap<[u8; 4], f64>);

impl Poly4 {
    pub fn constant(c: f64) -> Self {
        Self::monomial([0; 4], c)
    }

    pub fn coordinate(a: usize) -> Self {
        let mut e = [0; 4];
        e[a] = 1;
        Self::monomial(e, 1.0)
    }

    pub fn monomial(e: [u8; 4], c: f64) -> Self {
        let mut m = BTreeMap::new();
        if c != 0.0 {
            m.insert(e, c);
        }
        Poly4(m)
    }

    pub fn degree(&self) -> u8 {
        self.0.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn add(&self, o: &Poly4) -> Poly4 {
        let mut m = self.0.clone();
        for (e, c) in &o.0 {
            *m.entry(*e).or_insert(0.0) += c;
        }
        m.retain(|_, c| *c != 0.0);
        Poly4(m)
    }

    pub fn scale(&self, s: f64) -> Poly4 {
        Poly4(self.0.iter().map(|(e, c)| (*e, c * s)).filter(|(_, c)| *c != 0.0).collect())
    }

    pub fn mul(&self, o: &Poly4) -> Poly4 {
        let mut m: BTreeMap<[u8; 4], f64> = BTreeMap::new();
        for (e1, c1) in &self.0 {
            for (e2, c2) in &o.0 {
                let e = [e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2], e1[3] + e2[3]];
                *m.entry(e).or_insert(0.0) += c1 * c2;
            }
        }
        m.retain(|_, c| *c != 0.0);
        Poly4(m)
    }

    pub fn deriv(&self, a: usize) -> Poly4 {
        let mut m = BTreeMap::new();
        for (e, c) in &self.0 {
            if e[a] > 0 {
                let mut e2 = *e;
                e2[a] -= 1;
                m.insert(e2, c * f64::from(e[a]));
            }
        }
        Poly4(m)
    }

    pub fn eval(&self, p: [f64; 4]) -> f64 {
        self.0.iter().map(|(e, c)| c * (0..4).map(|a| p[a].powi(i32::from(e[a]))).product::<f64>()).sum()
    }

    pub fn gradient(&self) -> [Poly4; 4] {
        [self.deriv(0), self.deriv(1), self.deriv(2), self.deriv(3)]
    }
}

/// `Q(φ, ψ)` on polynomials.
pub fn null_form_poly(q: NullFormId, phi: &Poly4, psi: &Poly4) -> Poly4 {
    let (dp, dq) = (phi.gradient(), psi.gradient());
    let pair = |a: usize, b: usize| dp[a].mul(&dq[b]).add(&dp[b].mul(&dq[a]).scale(-1.0));
    match q {
        NullFormId::Q0 => (1..4).fold(dp[0].mul(&dq[0]), |acc, i| acc.add(&dp[i].mul(&dq[i]).scale(-1.0))),
        NullFormId::Q0i(i) => pair(0, usize::from(i)),
        NullFormId::Qij(i, j) => pair(usize::from(i), usize::from(j)),
    }
}

/// `max |Z(Q(φ, ψ)) - expand(commute(Z, Q))(φ, ψ)|` over the sample points.
pub fn verify_commutator(
    table: &CommutatorTable,
    z: SpacetimeField,
    q: NullFormId,
    phi: &Poly4,
    psi: &Poly4,
    points: &[[f64; 4]],
) -> Result<f64> {
    let expr = commute_with(table, z, q)?;
    let lhs = z.apply(&null_form_poly(q, phi, psi));
    let rhs = expr.expand(phi, psi);
    Ok(points.iter().map(|p| (lhs.eval(*p) - rhs.eval(*p)).abs()).fold(0.0, f64::max))
}

/// `max |S(Q(φ, ψ)) - Q(Sφ, ψ) - Q(φ, Sψ) + 2Q(φ, ψ)|` over the sample points.
pub fn verify_scaling(q: NullFormId, phi: &Poly4, psi: &Poly4, points: &[[f64; 4]]) -> f64 {
    let s = SpacetimeField::Scaling;
    let lhs = s.apply(&null_form_poly(q, phi, psi));
    let rhs = null_form_poly(q, &s.apply(phi), psi)
        .add(&null_form_poly(q, phi, &s.apply(psi)))
        .add(&null_form_poly(q, phi, psi).scale(-2.0));
    points.iter().map(|p| (lhs.eval(*p) - rhs.eval(*p)).abs()).fold(0.0, f64::max)
}

/// Dense cubic polynomial with coefficients from a fixed sequence.
pub fn trial_cubic(seed: u32) -> Poly4 {
    let mut p = Poly4::default();
    let mut n = 0u32;
    for a in 0..=3u8 {
        for b in 0..=3 - a {
            for c in 0..=3 - a - b {
                for d in 0..=3 - a - b - c {
                    n += 1;
                    let coef = (f64::from(seed * 97 + n * 31) * 0.618_033_988_749).sin();
                    p = p.add(&Poly4::monomial([a, b, c, d], (coef * 1e3).round() / 1e3));
                }
            }
        }
    }
    p
}

/// Sample points in `[-1, 1]⁴` (shifted in `t`).
pub fn sample_points() -> Vec<[f64; 4]> {
    (0..16)
        .map(|k| {
            let f = |m: u32| ((f64::from(k * 7 + m) * 1.324_717_957).fract()) * 2.0 - 1.0;
            [2.0 + f(1), f(2), f(3), f(4)]
        })
        .collect()
}

/// One identity check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityResidual {
    pub z: SpacetimeField,
    pub q: NullFormId,
    pub residual: f64,
}

/// All rotation/boost × null form identities on cubic trial fields.
pub fn verify_all(table: &CommutatorTable) -> Vec<IdentityResidual> {
    let (phi, psi) = (trial_cubic(1), trial_cubic(2));
    let pts = sample_points();
    let mut out = Vec::new();
    for z in SpacetimeField::KLAINERMAN {
        for q in NullFormId::ALL {
            let residual = verify_commutator(table, z, q, &phi, &psi, &pts).expect("Klainerman field");
            out.push(IdentityResidual { z, q, residual });
        }
    }
    out
}

/// [`verify_all`] followed by the seven scaling identities.
pub fn identity_suite(table: &CommutatorTable) -> Vec<IdentityResidual> {
    let (phi, psi) = (trial_cubic(1), trial_cubic(2));
    let pts = sample_points();
    let mut out = verify_all(table);
    for q in NullFormId::ALL {
        out.push(IdentityResidual { z: SpacetimeField::Scaling, q, residual: verify_scaling(q, &phi, &psi, &pts) });
    }
    out
}
