//! Differential operators `Σ p(t, r) ∂_t^a ∂_r^b ∂_y^c` with polynomial
//! coefficients, used to apply vector-field words to node jets.

use std::collections::BTreeMap;

use num_complex::Complex;

use super::history::JetTable;
use crate::geometry::{MultiIndex, VectorFieldId};
use crate::scalar::{lit, Real};

/// Polynomial in `(t, r)`: `(i, j) -> coefficient of t^i r^j`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly(BTreeMap<(u8, u8), f64>);

impl Poly {
    pub fn constant(c: f64) -> Self {
        let mut m = BTreeMap::new();
        if c != 0.0 {
            m.insert((0, 0), c);
        }
        Poly(m)
    }

    pub fn monomial(i: u8, j: u8, c: f64) -> Self {
        let mut m = BTreeMap::new();
        m.insert((i, j), c);
        Poly(m)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn add_term(&mut self, key: (u8, u8), c: f64) {
        let e = self.0.entry(key).or_insert(0.0);
        *e += c;
        if *e == 0.0 {
            self.0.remove(&key);
        }
    }

    pub fn add(&mut self, other: &Poly) {
        for (k, c) in &other.0 {
            self.add_term(*k, *c);
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::default();
        for ((i1, j1), c1) in &self.0 {
            for ((i2, j2), c2) in &other.0 {
                out.add_term((i1 + i2, j1 + j2), c1 * c2);
            }
        }
        out
    }

    pub fn dt(&self) -> Poly {
        let mut out = Poly::default();
        for ((i, j), c) in &self.0 {
            if *i > 0 {
                out.add_term((i - 1, *j), c * f64::from(*i));
            }
        }
        out
    }

    pub fn dr(&self) -> Poly {
        let mut out = Poly::default();
        for ((i, j), c) in &self.0 {
            if *j > 0 {
                out.add_term((*i, j - 1), c * f64::from(*j));
            }
        }
        out
    }

    pub fn eval<T: Real>(&self, t: T, r: T) -> T {
        self.0.iter().map(|((i, j), c)| lit::<T>(*c) * t.powi(i32::from(*i)) * r.powi(i32::from(*j))).sum()
    }
}

/// `Σ p_{abc}(t, r) ∂_t^a ∂_r^b ∂_y^c`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DiffOp(BTreeMap<(u8, u8, u8), Poly>);

impl DiffOp {
    pub fn identity() -> Self {
        let mut m = BTreeMap::new();
        m.insert((0, 0, 0), Poly::constant(1.0));
        DiffOp(m)
    }

    /// Coefficients `(z_t, z_r, z_y)` of a vector field `z_t ∂_t + z_r ∂_r + z_y ∂_y`.
    fn field_coefficients(z: VectorFieldId) -> [Poly; 3] {
        let zero = Poly::default;
        match z {
            VectorFieldId::Dt => [Poly::constant(1.0), zero(), zero()],
            VectorFieldId::Dr => [zero(), Poly::constant(1.0), zero()],
            VectorFieldId::Dy => [zero(), zero(), Poly::constant(1.0)],
            VectorFieldId::BoostR => [Poly::monomial(0, 1, 1.0), Poly::monomial(1, 0, 1.0), zero()],
            VectorFieldId::Scaling => [Poly::monomial(1, 0, 1.0), Poly::monomial(0, 1, 1.0), zero()],
        }
    }

    /// `Z ∘ self`.
    pub fn then(&self, z: VectorFieldId) -> DiffOp {
        let zc = Self::field_coefficients(z);
        let mut out: BTreeMap<(u8, u8, u8), Poly> = BTreeMap::new();
        let mut push = |key: (u8, u8, u8), p: Poly| {
            if !p.is_zero() {
                out.entry(key).or_default().add(&p);
            }
        };
        for (&(a, b, c), p) in &self.0 {
            // z_t ∂_t (p D) = z_t (∂_t p) D + z_t p ∂_t D, etc.
            if !zc[0].is_zero() {
                push((a, b, c), zc[0].mul(&p.dt()));
                push((a + 1, b, c), zc[0].mul(p));
            }
            if !zc[1].is_zero() {
                push((a, b, c), zc[1].mul(&p.dr()));
                push((a, b + 1, c), zc[1].mul(p));
            }
            if !zc[2].is_zero() {
                push((a, b, c + 1), zc[2].mul(p));
            }
        }
        out.retain(|_, p| !p.is_zero());
        DiffOp(out)
    }

    /// Operator of a word; the rightmost field acts first.
    pub fn of_word(word: &MultiIndex) -> DiffOp {
        word.word.iter().rev().fold(DiffOp::identity(), |op, z| op.then(*z))
    }

    /// Highest total `(t, r)` order.
    pub fn tr_order(&self) -> usize {
        self.0.keys().map(|(a, b, _)| usize::from(a + b)).max().unwrap_or(0)
    }

    /// Highest `∂_t` order.
    pub fn t_order(&self) -> usize {
        self.0.keys().map(|(a, _, _)| usize::from(*a)).max().unwrap_or(0)
    }

    /// Applies the operator to mode `k` given its derivative table.
    pub fn apply<T: Real>(&self, jets: &JetTable<T>, k: i64, t: T, r: T) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for (&(a, b, c), p) in &self.0 {
            let coef = p.eval(t, r);
            let iky = Complex::new(T::zero(), T::from_i64_(k)).powu(u32::from(c));
            acc = acc + jets[usize::from(a)][usize::from(b)] * iky * coef;
        }
        acc
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u8, u8, u8), &Poly)> {
        self.0.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use VectorFieldId::*;

    #[test]
    fn boost_squared() {
        // (t∂_r + r∂_t)² = t²∂_r² + 2tr∂_t∂_r + r²∂_t² + t∂_t + r∂_r
        let op = DiffOp::of_word(&MultiIndex::new(vec![BoostR, BoostR]));
        let want = [
            ((0, 2, 0), Poly::monomial(2, 0, 1.0)),
            ((1, 1, 0), Poly::monomial(1, 1, 2.0)),
            ((2, 0, 0), Poly::monomial(0, 2, 1.0)),
            ((1, 0, 0), Poly::monomial(1, 0, 1.0)),
            ((0, 1, 0), Poly::monomial(0, 1, 1.0)),
        ];
        assert_eq!(op.0.len(), want.len());
        for (k, p) in want {
            assert_eq!(op.0[&k], p, "{k:?}");
        }
    }

    #[test]
    fn order_of_application() {
        // Dt B W = ∂_t(t W_r + r W_t) = W_r + t W_rt + r W_tt
        let op = DiffOp::of_word(&MultiIndex::new(vec![Dt, BoostR]));
        assert_eq!(op.0[&(0, 1, 0)], Poly::constant(1.0));
        assert_eq!(op.0[&(1, 1, 0)], Poly::monomial(1, 0, 1.0));
        assert_eq!(op.0[&(2, 0, 0)], Poly::monomial(0, 1, 1.0));
        assert_eq!(op.tr_order(), 2);
    }

    #[test]
    fn boost_annihilates_s_squared_on_jets() {
        let (t, r) = (3.0_f64, 1.2);
        let z = Complex::new(0.0, 0.0);
        let mut d = [[z; 4]; 4];
        d[0][0] = Complex::new(t * t - r * r, 0.0);
        d[1][0] = Complex::new(2.0 * t, 0.0);
        d[0][1] = Complex::new(-2.0 * r, 0.0);
        d[2][0] = Complex::new(2.0, 0.0);
        d[0][2] = Complex::new(-2.0, 0.0);
        let b = DiffOp::of_word(&MultiIndex::new(vec![BoostR]));
        assert_eq!(b.apply(&d, 0, t, r), z);
        let s = DiffOp::identity().then(Scaling);
        assert!((s.apply(&d, 0, t, r).re - 2.0 * (t * t - r * r)).abs() < 1e-14);
        let dy = DiffOp::identity().then(Dy).then(Dy);
        assert_eq!(dy.apply(&d, 2, t, r), Complex::new(-4.0 * (t * t - r * r), 0.0));
    }
}
