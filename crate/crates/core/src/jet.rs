//! Truncated bivariate Taylor arithmetic in `(t, r)`.
//!
//! A [`Jet`] carries every partial derivative `∂_t^a ∂_r^b f` with
//! `a + b <= 3` at one point. Arithmetic on jets is exact up to that order,
//! which is what the analytic trial fields, manufactured solutions and
//! injected test fields need: energies of second-order vector-field words
//! involve third derivatives.

use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::{lit, Real};

pub const JET_ORDER: usize = 3;

/// Taylor coefficients `c[a][b] = ∂_t^a ∂_r^b f / (a! b!)`, `a + b <= 3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet<T> {
    c: [[T; JET_ORDER + 1]; JET_ORDER + 1],
}

const FACT: [f64; 4] = [1.0, 1.0, 2.0, 6.0];

impl<T: Real> Jet<T> {
    pub fn constant(v: T) -> Self {
        let mut c = [[T::zero(); JET_ORDER + 1]; JET_ORDER + 1];
        c[0][0] = v;
        Jet { c }
    }

    pub fn zero() -> Self {
        Self::constant(T::zero())
    }

    /// The coordinate `t` expanded at `t0`.
    pub fn var_t(t0: T) -> Self {
        let mut j = Self::constant(t0);
        j.c[1][0] = T::one();
        j
    }

    /// The coordinate `r` expanded at `r0`.
    pub fn var_r(r0: T) -> Self {
        let mut j = Self::constant(r0);
        j.c[0][1] = T::one();
        j
    }

    /// Builds a jet from partial derivatives `d[a][b] = ∂_t^a ∂_r^b f`.
    pub fn from_derivatives(d: [[T; JET_ORDER + 1]; JET_ORDER + 1]) -> Self {
        let mut c = [[T::zero(); JET_ORDER + 1]; JET_ORDER + 1];
        for a in 0..=JET_ORDER {
            for b in 0..=JET_ORDER - a {
                c[a][b] = d[a][b] / lit(FACT[a] * FACT[b]);
            }
        }
        Jet { c }
    }

    pub fn value(&self) -> T {
        self.c[0][0]
    }

    /// `∂_t^a ∂_r^b f` at the expansion point.
    pub fn d(&self, a: usize, b: usize) -> T {
        if a + b > JET_ORDER {
            panic!("jet derivative ({a},{b}) beyond order {JET_ORDER}");
        }
        self.c[a][b] * lit(FACT[a] * FACT[b])
    }

    /// Derivative table `d[a][b]`.
    pub fn derivatives(&self) -> [[T; JET_ORDER + 1]; JET_ORDER + 1] {
        let mut d = [[T::zero(); JET_ORDER + 1]; JET_ORDER + 1];
        for (a, row) in d.iter_mut().enumerate() {
            for (b, v) in row.iter_mut().enumerate().take(JET_ORDER + 1 - a) {
                *v = self.d(a, b);
            }
        }
        d
    }

    pub fn scale(mut self, k: T) -> Self {
        for a in 0..=JET_ORDER {
            for b in 0..=JET_ORDER - a {
                self.c[a][b] = self.c[a][b] * k;
            }
        }
        self
    }

    /// `f(self)` given `f` and its first three derivatives at the value.
    fn compose(self, f: [T; 4]) -> Self {
        let mut h = self;
        h.c[0][0] = T::zero();
        let h2 = h * h;
        let h3 = h2 * h;
        Jet::constant(f[0]) + h.scale(f[1]) + h2.scale(f[2] / lit(2.0)) + h3.scale(f[3] / lit(6.0))
    }

    pub fn exp(self) -> Self {
        let e = self.value().exp();
        self.compose([e, e, e, e])
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.value().sin_cos();
        self.compose([s, c, -s, -c])
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.value().sin_cos();
        self.compose([c, -s, -c, s])
    }

    /// `self^p` for a positive base.
    pub fn powf(self, p: T) -> Self {
        let x = self.value();
        let one = T::one();
        let two = lit::<T>(2.0);
        self.compose([
            x.powf(p),
            p * x.powf(p - one),
            p * (p - one) * x.powf(p - two),
            p * (p - one) * (p - two) * x.powf(p - lit(3.0)),
        ])
    }

    pub fn recip(self) -> Self {
        let x = self.value();
        let i = x.recip();
        self.compose([i, -i * i, lit::<T>(2.0) * i * i * i, lit::<T>(-6.0) * i * i * i * i])
    }

    pub fn sqrt(self) -> Self {
        self.powf(lit(0.5))
    }
}

impl<T: Real> Add for Jet<T> {
    type Output = Self;
    fn add(mut self, o: Self) -> Self {
        for a in 0..=JET_ORDER {
            for b in 0..=JET_ORDER - a {
                self.c[a][b] = self.c[a][b] + o.c[a][b];
            }
        }
        self
    }
}

impl<T: Real> Sub for Jet<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl<T: Real> Neg for Jet<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-T::one())
    }
}

impl<T: Real> Mul for Jet<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut out = Jet::zero();
        for a1 in 0..=JET_ORDER {
            for b1 in 0..=JET_ORDER - a1 {
                let x = self.c[a1][b1];
                if x == T::zero() {
                    continue;
                }
                for a2 in 0..=JET_ORDER - a1 - b1 {
                    for b2 in 0..=JET_ORDER - a1 - b1 - a2 {
                        out.c[a1 + a2][b1 + b2] = out.c[a1 + a2][b1 + b2] + x * o.c[a2][b2];
                    }
                }
            }
        }
        out
    }
}

impl<T: Real> Add<T> for Jet<T> {
    type Output = Self;
    fn add(mut self, k: T) -> Self {
        self.c[0][0] = self.c[0][0] + k;
        self
    }
}

impl<T: Real> Mul<T> for Jet<T> {
    type Output = Self;
    fn mul(self, k: T) -> Self {
        self.scale(k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd<F: Fn(f64, f64) -> f64>(f: F, t: f64, r: f64, a: usize, b: usize) -> f64 {
        // nested central differences, h tuned for the order
        let h = 1e-3;
        fn d1<G: Fn(f64) -> f64>(g: G, x: f64, h: f64) -> f64 {
            (-g(x + 2.0 * h) + 8.0 * g(x + h) - 8.0 * g(x - h) + g(x - 2.0 * h)) / (12.0 * h)
        }
        match (a, b) {
            (0, 0) => f(t, r),
            (1, 0) => d1(|x| f(x, r), t, h),
            (0, 1) => d1(|x| f(t, x), r, h),
            (1, 1) => d1(|x| d1(|y| f(x, y), r, h), t, h),
            (2, 0) => d1(|x| d1(|y| f(y, r), x, h), t, h),
            (0, 2) => d1(|x| d1(|y| f(t, y), x, h), r, h),
            _ => unreachable!(),
        }
    }

    #[test]
    fn products_and_compositions_match_finite_differences() {
        let (t0, r0) = (2.7f64, 0.8f64);
        let jt: Jet<f64> = Jet::var_t(t0);
        let jr: Jet<f64> = Jet::var_r(r0);
        let g = (jr * jr * lit::<f64>(-1.0)).exp() * (jt * lit::<f64>(0.5)).cos() + (jt + jr).powf(lit::<f64>(1.5)) * jr.sin();
        let f = |t: f64, r: f64| (-r * r).exp() * (0.5 * t).cos() + (t + r).powf(1.5) * r.sin();
        for (a, b) in [(0, 0), (1, 0), (0, 1), (1, 1), (2, 0), (0, 2)] {
            let want = fd(f, t0, r0, a, b);
            assert!((g.d(a, b) - want).abs() < 1e-7, "({a},{b}): {} vs {}", g.d(a, b), want);
        }
    }

    #[test]
    fn third_derivatives_of_polynomial() {
        let jt = Jet::var_t(1.5_f64);
        let jr = Jet::var_r(-0.5);
        // f = t^2 r - r^3
        let f = jt * jt * jr - jr * jr * jr;
        assert!((f.d(2, 1) - 2.0).abs() < 1e-14);
        assert!((f.d(0, 3) + 6.0).abs() < 1e-14);
        assert!((f.d(1, 1) - 3.0).abs() < 1e-14);
        assert_eq!(f.d(3, 0), 0.0);
    }

    #[test]
    fn recip_and_roundtrip() {
        let jt = Jet::var_t(3.0_f64);
        let inv = jt.recip();
        assert!((inv.d(1, 0) + 1.0 / 9.0).abs() < 1e-15);
        assert!((inv.d(3, 0) + 6.0 / 81.0).abs() < 1e-15);
        let back = Jet::from_derivatives(inv.derivatives());
        assert_eq!(back, inv);
    }
}
