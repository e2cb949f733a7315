//! Words acting on radial fields through their Cartesian components.
//!
//! `Dr` stands for the three translations `∂_i` and `BoostR` for the three
//! boosts `Ω_{0i}`, so a word with `m` such letters has `3^m` components.
//! Sums of squares over the components are rotation invariant and are
//! evaluated at `x = (r, 0, 0)` from the Taylor polynomial of `W(t, |x|)`
//! in `(τ, ξ_1, ξ_2, ξ_3)` of total degree three.

use std::sync::OnceLock;

use num_complex::Complex;

use crate::fields::history::JetTable;
use crate::geometry::{MultiIndex, VectorFieldId};
use crate::scalar::{lit, Real};

const NVAR: usize = 4;
const DEG: usize = 3;
const NMON: usize = 35;
/// `(a, b)` with `a + b <= 3`: jet entries `∂_t^a ∂_r^b`.
const NJET: usize = 10;

struct Monomials {
    index: Vec<Option<usize>>,
    /// `∂_v` of monomial `i`: target and factor.
    deriv: [[Option<(usize, usize)>; NMON]; NVAR],
    /// `x_v ·` monomial `i`, if the degree stays within bounds.
    raise: [[Option<usize>; NMON]; NVAR],
    /// Product of monomials `i` and `j`.
    prod: Vec<[Option<usize>; NMON]>,
}

fn key(e: &[usize; NVAR]) -> usize {
    e.iter().fold(0, |acc, &x| acc * (DEG + 1) + x)
}

fn monomials() -> &'static Monomials {
    static M: OnceLock<Monomials> = OnceLock::new();
    M.get_or_init(|| {
        let mut exps = Vec::new();
        let mut index = vec![None; (DEG + 1).pow(NVAR as u32)];
        for a in 0..=DEG {
            for b in 0..=DEG - a {
                for c in 0..=DEG - a - b {
                    for d in 0..=DEG - a - b - c {
                        let e = [a, b, c, d];
                        index[key(&e)] = Some(exps.len());
                        exps.push(e);
                    }
                }
            }
        }
        debug_assert_eq!(exps.len(), NMON);
        let find = |e: [usize; NVAR]| if e.iter().sum::<usize>() <= DEG { index[key(&e)] } else { None };
        let mut deriv = [[None; NMON]; NVAR];
        let mut raise = [[None; NMON]; NVAR];
        for v in 0..NVAR {
            for (i, e) in exps.iter().enumerate() {
                if e[v] > 0 {
                    let mut f = *e;
                    f[v] -= 1;
                    deriv[v][i] = find(f).map(|k| (k, e[v]));
                }
                let mut f = *e;
                f[v] += 1;
                raise[v][i] = find(f);
            }
        }
        let prod = exps
            .iter()
            .map(|a| std::array::from_fn(|j| find([a[0] + exps[j][0], a[1] + exps[j][1], a[2] + exps[j][2], a[3] + exps[j][3]])))
            .collect();
        Monomials { index, deriv, raise, prod }
    })
}

fn jet_pairs() -> [(usize, usize); NJET] {
    let mut out = [(0, 0); NJET];
    let mut i = 0;
    for a in 0..=DEG {
        for b in 0..=DEG - a {
            out[i] = (a, b);
            i += 1;
        }
    }
    out
}

type Poly<T> = [T; NMON];

fn unit<T: Real>(var: Option<usize>) -> Poly<T> {
    let m = monomials();
    let mut e = [0; NVAR];
    if let Some(v) = var {
        e[v] = 1;
    }
    let mut p = [T::zero(); NMON];
    p[m.index[key(&e)].unwrap()] = T::one();
    p
}

fn mul<T: Real>(a: &Poly<T>, b: &Poly<T>) -> Poly<T> {
    let m = monomials();
    let mut out = [T::zero(); NMON];
    for i in 0..NMON {
        if a[i] == T::zero() {
            continue;
        }
        for j in 0..NMON {
            if let Some(k) = m.prod[i][j] {
                out[k] = out[k] + a[i] * b[j];
            }
        }
    }
    out
}

fn deriv<T: Real>(p: &Poly<T>, v: usize) -> Poly<T> {
    let m = monomials();
    let mut out = [T::zero(); NMON];
    for i in 0..NMON {
        if let Some((k, f)) = m.deriv[v][i] {
            out[k] = out[k] + p[i] * T::from_usize_(f);
        }
    }
    out
}

/// `p · (c + x_v)`, truncated.
fn affine_mul<T: Real>(p: &Poly<T>, c: T, var: usize) -> Poly<T> {
    let m = monomials();
    let mut out = [T::zero(); NMON];
    for i in 0..NMON {
        out[i] = out[i] + p[i] * c;
        if let Some(k) = m.raise[var][i] {
            out[k] = out[k] + p[i];
        }
    }
    out
}

fn add<T: Real>(a: &Poly<T>, b: &Poly<T>) -> Poly<T> {
    let mut out = *a;
    for (o, x) in out.iter_mut().zip(b) {
        *o = *o + *x;
    }
    out
}

/// `τ^a ρ^b / (a! b!)` for every jet entry, `ρ = |x| - r`.
fn basis<T: Real>(r: T) -> [Poly<T>; NJET] {
    let one = unit::<T>(None);
    let tau = unit::<T>(Some(0));
    let xi: Vec<Poly<T>> = (1..NVAR).map(|v| unit::<T>(Some(v))).collect();
    let q = add(&mul(&xi[1], &xi[1]), &mul(&xi[2], &xi[2]));
    let two = lit::<T>(2.0);
    let mut rho_pow = [one; DEG + 1];
    if r > T::zero() {
        // |x| = r + ξ_1 + q/(2r) - ξ_1 q/(2r²) + O(|ξ|⁴)
        let mut rho = xi[0];
        let qx = mul(&xi[0], &q);
        for i in 0..NMON {
            rho[i] = rho[i] + q[i] / (two * r) - qx[i] / (two * r * r);
        }
        for b in 1..=DEG {
            rho_pow[b] = mul(&rho_pow[b - 1], &rho);
        }
    } else {
        // odd radial derivatives vanish at the origin; ρ² = |ξ|²
        let rho2 = add(&mul(&xi[0], &xi[0]), &q);
        rho_pow = [one, [T::zero(); NMON], rho2, [T::zero(); NMON]];
    }
    let mut tau_pow = [one; DEG + 1];
    for a in 1..=DEG {
        tau_pow[a] = mul(&tau_pow[a - 1], &tau);
    }
    let fact = [1.0, 1.0, 2.0, 6.0];
    let mut out = [[T::zero(); NMON]; NJET];
    for (i, (a, b)) in jet_pairs().into_iter().enumerate() {
        let p = mul(&tau_pow[a], &rho_pow[b]);
        let c = lit::<T>(1.0 / (fact[a] * fact[b]));
        for j in 0..NMON {
            out[i][j] = p[j] * c;
        }
    }
    out
}

/// Linear map from the jet entries to `(g, ∂_t g, ∂_1 g, ∂_2 g, ∂_3 g)` at
/// `x = (r, 0, 0)`, without the `(ik)^{#Dy}` factor.
pub type ComponentMatrix<T> = [[T; NJET]; 5];

#[derive(Debug, Clone)]
pub struct CartesianWord {
    /// Letters in application order (rightmost first).
    letters: Vec<VectorFieldId>,
    /// Number of `Dy` letters.
    pub n_y: u32,
    /// Number of letters carrying a Cartesian index.
    pub indexed: usize,
}

impl CartesianWord {
    pub fn new(word: &MultiIndex) -> Self {
        let letters: Vec<VectorFieldId> = word.word.iter().rev().copied().collect();
        let n_y = letters.iter().filter(|z| **z == VectorFieldId::Dy).count() as u32;
        let indexed = letters.iter().filter(|z| matches!(z, VectorFieldId::Dr | VectorFieldId::BoostR)).count();
        CartesianWord { letters, n_y, indexed }
    }

    pub fn n_components(&self) -> usize {
        3usize.pow(self.indexed as u32)
    }

    fn apply<T: Real>(&self, p: &Poly<T>, mut comp: usize, t: T, r: T) -> Poly<T> {
        let mut p = *p;
        for z in &self.letters {
            p = match z {
                VectorFieldId::Dt => deriv(&p, 0),
                VectorFieldId::Dy => p,
                VectorFieldId::Dr => {
                    let i = comp % 3;
                    comp /= 3;
                    deriv(&p, 1 + i)
                }
                VectorFieldId::BoostR => {
                    let i = comp % 3;
                    comp /= 3;
                    let xr = if i == 0 { r } else { T::zero() };
                    add(&affine_mul(&deriv(&p, 1 + i), t, 0), &affine_mul(&deriv(&p, 0), xr, 1 + i))
                }
                VectorFieldId::Scaling => {
                    let mut acc = affine_mul(&deriv(&p, 0), t, 0);
                    for a in 0..3 {
                        let xa = if a == 0 { r } else { T::zero() };
                        acc = add(&acc, &affine_mul(&deriv(&p, 1 + a), xa, 1 + a));
                    }
                    acc
                }
            };
        }
        p
    }

    /// One matrix per Cartesian component at the node `(t, r)`.
    pub fn matrices<T: Real>(&self, t: T, r: T) -> Vec<ComponentMatrix<T>> {
        let m = monomials();
        let out_keys: [usize; 5] = std::array::from_fn(|q| {
            let mut e = [0; NVAR];
            if q > 0 {
                e[q - 1] = 1;
            }
            m.index[key(&e)].unwrap()
        });
        let basis = basis(r);
        (0..self.n_components())
            .map(|c| {
                let mut mat = [[T::zero(); NJET]; 5];
                for (j, b) in basis.iter().enumerate() {
                    let p = self.apply(b, c, t, r);
                    for q in 0..5 {
                        mat[q][j] = p[out_keys[q]];
                    }
                }
                mat
            })
            .collect()
    }

    /// `(g, ∂_t g, ∂_1 g, ∂_2 g, ∂_3 g)` of mode `k` for one component.
    #[inline]
    pub fn values<T: Real>(&self, mat: &ComponentMatrix<T>, tab: &JetTable<T>, k: i64) -> [Complex<T>; 5] {
        let iky = Complex::new(T::zero(), T::from_i64_(k)).powu(self.n_y);
        let pairs = jet_pairs();
        std::array::from_fn(|q| {
            let mut acc = Complex::new(T::zero(), T::zero());
            for (j, (a, b)) in pairs.iter().enumerate() {
                if mat[q][j] != T::zero() {
                    acc = acc + tab[*a][*b] * mat[q][j];
                }
            }
            acc * iky
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::history::JetTable;
    use VectorFieldId::*;

    fn table(f: impl Fn(usize, usize) -> f64) -> JetTable<f64> {
        let z = Complex::new(0.0, 0.0);
        let mut t = [[z; 4]; 4];
        for a in 0..4 {
            for b in 0..4 - a {
                t[a][b] = Complex::new(f(a, b), 0.0);
            }
        }
        t
    }

    fn sums(word: &[VectorFieldId], tab: &JetTable<f64>, t: f64, r: f64) -> [f64; 5] {
        let cw = CartesianWord::new(&MultiIndex::new(word.to_vec()));
        let mut out = [0.0; 5];
        for m in cw.matrices(t, r) {
            let v = cw.values(&m, tab, 0);
            for q in 0..5 {
                out[q] += v[q].norm_sqr();
            }
        }
        out
    }

    #[test]
    fn scalar_words_match_radial_formulas() {
        // W = r²t: Σ_i |∂_i W|² = |∂_r W|², Σ|Ω_{0i}W|² = |BW|²
        let (t, r) = (3.0, 1.5);
        let tab = table(|a, b| match (a, b) {
            (0, 0) => r * r * t,
            (0, 1) => 2.0 * r * t,
            (0, 2) => 2.0 * t,
            (1, 0) => r * r,
            (1, 1) => 2.0 * r,
            (1, 2) => 2.0,
            _ => 0.0,
        });
        let s = sums(&[Dr], &tab, t, r);
        assert!((s[0] - (2.0 * r * t).powi(2)).abs() < 1e-12);
        let s = sums(&[BoostR], &tab, t, r);
        let bw = t * 2.0 * r * t + r * r * r;
        assert!((s[0] - bw * bw).abs() < 1e-10);
        // ∂_j ∂_i W = n_i n_j W_rr + (δ_ij - n_i n_j) W_r / r
        let s = sums(&[Dr, Dr], &tab, t, r);
        let want = (2.0 * t).powi(2) + 2.0 * (2.0 * t).powi(2);
        assert!((s[0] - want).abs() < 1e-10);
    }

    #[test]
    fn boost_squared_carries_the_angular_term() {
        // Σ_{ij} |Ω_{0i}Ω_{0j} f|² = |B²f|² + 2(t/r)²|Bf|² for radial f = r²
        let (t, r) = (2.0, 0.7);
        let tab = table(|a, b| match (a, b) {
            (0, 0) => r * r,
            (0, 1) => 2.0 * r,
            (0, 2) => 2.0,
            _ => 0.0,
        });
        let bf = 2.0 * r * t;
        let b2f = t * 2.0 * t + r * 2.0 * r;
        let s = sums(&[BoostR, BoostR], &tab, t, r);
        let want = b2f * b2f + 2.0 * (t / r).powi(2) * bf * bf;
        assert!((s[0] - want).abs() < 1e-9 * want, "{} vs {want}", s[0]);
    }

    #[test]
    fn origin_uses_even_expansion() {
        let tab = table(|a, b| if (a, b) == (0, 2) { 2.0 } else if (a, b) == (0, 0) { 1.0 } else { 0.0 });
        // W = 1 + |x|²: ∂_i∂_j W = 2δ_ij
        let s = sums(&[Dr, Dr], &tab, 2.0, 0.0);
        assert!((s[0] - 12.0).abs() < 1e-12);
    }
}
