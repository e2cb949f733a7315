//! Energy functionals on hyperboloidal and time-slice leaves.
//!
//! Integrals over `S¹` use the unnormalized `dy`, so with normalized modes
//! `∫|f|² dy = 2π Σ_k |f_k|²`. The conformal energies are functionals of
//! the zero mode `W_0(x)` alone and use `dx` only.

pub mod cartesian;
pub mod leaf;
pub mod monitor;
pub mod report;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fields::diffop::DiffOp;
use crate::fields::history::NodeJets;
use crate::fields::spectral::SpectralY;
use crate::fields::ModePart;
use crate::geometry::{exterior_weight_unchecked, words_of_type, Branch, MultiIndex, VectorFieldId};
use crate::scalar::{lit, Real};

pub use cartesian::{CartesianWord, ComponentMatrix};
pub use leaf::{Leaf, LeafCollector, LeafKind, LeafNode};
pub use monitor::SliceMonitor;
pub use report::{write_energy_csv, EnergyReport};

/// Highest vector-field order the node jets support (energies of order-`n`
/// words need `n + 1` derivatives; jets carry three).
pub const MAX_ORDER: usize = 2;

/// `Z^γ`, `∂_t Z^γ` and `∂_r Z^γ` for one word, plus its Cartesian components.
#[derive(Debug, Clone)]
pub struct WordOps {
    pub word: MultiIndex,
    pub cart: CartesianWord,
    z: DiffOp,
    zt: DiffOp,
    zr: DiffOp,
}

impl WordOps {
    pub fn new(word: &MultiIndex) -> Self {
        let z = DiffOp::of_word(word);
        WordOps { word: word.clone(), cart: CartesianWord::new(word), zt: z.then(VectorFieldId::Dt), zr: z.then(VectorFieldId::Dr), z }
    }

    pub fn identity() -> Self {
        Self::new(&MultiIndex::identity())
    }

    /// `(Z W_k, ∂_t Z W_k, ∂_r Z W_k)` at a node.
    #[inline]
    pub fn eval<T: Real>(&self, nj: &NodeJets<T>, k: i64) -> [Complex<T>; 3] {
        let tab = nj.mode(k);
        [self.z.apply(tab, k, nj.t, nj.r), self.zt.apply(tab, k, nj.t, nj.r), self.zr.apply(tab, k, nj.t, nj.r)]
    }

    pub fn tr_order(&self) -> usize {
        self.zt.tr_order().max(self.zr.tr_order())
    }

    pub fn t_order(&self) -> usize {
        self.zt.t_order().max(self.zr.t_order())
    }
}

fn check_order<T>(leaf: &Leaf<T>, ops: &WordOps) -> Result<()> {
    if ops.tr_order() > 3 || ops.t_order() > leaf.t_order {
        return Err(Error::OrderTooHigh { n: ops.word.n(), max: MAX_ORDER });
    }
    Ok(())
}

/// Both expressions of the hyperboloidal energy density, summed over the
/// kept modes and the Cartesian components of the word, integrated in `y`
/// (factor `2π`). At `x = (r, 0, 0)`, with `g_a = ∂_a g`:
///
/// `e1 = (s/t)²|∂_t g|² + |g_1 + (r/t)∂_t g|² + |g_2|² + |g_3|² + |∂_y g|²`
/// `e2 = (s/t)²|g_1|² + t^{-2}|S g|² + |g_2|² + |g_3|² + |∂_y g|²`
///
/// where `|g_2|² + |g_3|²` collects `t^{-2}Σ|Ω_{ij} g|²` and its share of `|∂̄ g|²`.
#[inline]
fn mode_density<T: Real>(nj: &NodeJets<T>, s: T, k: i64, cart: &CartesianWord, mats: &[ComponentMatrix<T>]) -> (T, T) {
    let (t, r) = (nj.t, nj.r);
    let st2 = (s / t) * (s / t);
    let tab = nj.mode(k);
    let (mut e1, mut e2) = (T::zero(), T::zero());
    for m in mats {
        let [v, vt, v1, v2, v3] = cart.values(m, tab, k);
        let rest = T::from_i64_(k * k) * v.norm_sqr() + v2.norm_sqr() + v3.norm_sqr();
        e1 = e1 + st2 * vt.norm_sqr() + (v1 + vt * (r / t)).norm_sqr() + rest;
        e2 = e2 + st2 * v1.norm_sqr() + (vt * t + v1 * r).norm_sqr() / (t * t) + rest;
    }
    (e1, e2)
}

#[inline]
fn hyperboloid_density<T: Real>(nj: &NodeJets<T>, s: T, part: ModePart, ops: &WordOps) -> (T, T) {
    let mats = ops.cart.matrices(nj.t, nj.r);
    let (mut e1, mut e2) = (T::zero(), T::zero());
    for k in nj.ks().filter(|k| part.keeps(*k)) {
        let (a, b) = mode_density(nj, s, k, &ops.cart, &mats);
        e1 = e1 + a;
        e2 = e2 + b;
    }
    (e1 * T::TAU(), e2 * T::TAU())
}

/// `E(s, Z^γ W)` on a branch of `H_s`, by both expressions.
pub fn energy_hyperboloid<T: Real>(leaf: &Leaf<T>, branch: Branch, comp: usize, part: ModePart, ops: &WordOps) -> Result<(T, T)> {
    check_order(leaf, ops)?;
    let s = leaf.s().ok_or_else(|| Error::Domain("hyperboloid energy on a time slice".into()))?;
    let (mut a, mut b) = (T::zero(), T::zero());
    for n in leaf.branch_nodes(branch)? {
        let (e1, e2) = hyperboloid_density(&n.comps[comp], s, part, ops);
        a = a + n.weight * e1;
        b = b + n.weight * e2;
    }
    Ok((a, b))
}

/// `E^in(s, W)` (first expression).
pub fn energy_interior<T: Real>(leaf: &Leaf<T>, comp: usize, part: ModePart) -> Result<T> {
    Ok(energy_hyperboloid(leaf, Branch::InteriorBranch, comp, part, &WordOps::identity())?.0)
}

/// `E^{ex,h}(s, W)`: the same integrand on the exterior branch.
pub fn energy_exterior_hyperboloid<T: Real>(leaf: &Leaf<T>, comp: usize, part: ModePart) -> Result<T> {
    Ok(energy_hyperboloid(leaf, Branch::ExteriorBranch, comp, part, &WordOps::identity())?.0)
}

/// `E^{c,in}(s, W_0) = ∫ t^{-2}|K W_0 + 2t W_0|² + (s/t)²|B W_0|² dx`,
/// `K = (t² + r²)∂_t + 2rt ∂_r`, `B = t∂_r + r∂_t`.
pub fn conformal_interior<T: Real>(leaf: &Leaf<T>, comp: usize) -> Result<T> {
    let s = leaf.s().ok_or_else(|| Error::Domain("conformal energy on a time slice".into()))?;
    let two = lit::<T>(2.0);
    let mut acc = T::zero();
    for n in leaf.branch_nodes(Branch::InteriorBranch)? {
        let (t, r) = (n.t, n.r);
        let d = n.comps[comp].mode(0);
        let (v, vt, vr) = (d[0][0], d[1][0], d[0][1]);
        let kw = vt * (t * t + r * r) + vr * (two * r * t) + v * (two * t);
        let bw = vr * t + vt * r;
        acc = acc + n.weight * (kw.norm_sqr() / (t * t) + (s / t) * (s / t) * bw.norm_sqr());
    }
    Ok(acc)
}

/// Exterior nodes `r >= t - 1` of a time slice, with `t`.
fn exterior_nodes<T: Real>(leaf: &Leaf<T>) -> Result<(T, impl Iterator<Item = &LeafNode<T>>)> {
    let t = match leaf.kind {
        LeafKind::Time(t) => lit::<T>(t),
        LeafKind::Hyperboloid(_) => return Err(Error::Domain("exterior energy needs a time slice".into())),
    };
    Ok((t, leaf.nodes.iter().filter(move |n| n.r >= t - T::one())))
}

/// Flat density `2π Σ_k |∂_t W_k|² + |∂_r W_k|² + k²|W_k|²`.
#[inline]
fn flat_density<T: Real>(nj: &NodeJets<T>, part: ModePart) -> T {
    let mut e = T::zero();
    for k in nj.ks().filter(|k| part.keeps(*k)) {
        let d = nj.mode(k);
        e = e + d[1][0].norm_sqr() + d[0][1].norm_sqr() + T::from_i64_(k * k) * d[0][0].norm_sqr();
    }
    e * T::TAU()
}

/// Weighted exterior energy with the truncation diagnostic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExteriorEnergy<T> {
    pub value: T,
    /// Integrand (without the quadrature weight) at the outermost node.
    pub boundary_integrand: T,
}

/// `E^{ex,α}(t, W) = ∬_{r >= t-1} (2+r-t)^{α+1}(|∂_tW|² + |∂_rW|² + |∂_yW|²) dx dy`.
pub fn energy_exterior<T: Real>(leaf: &Leaf<T>, comp: usize, part: ModePart, alpha: T) -> Result<ExteriorEnergy<T>> {
    let (t, nodes) = exterior_nodes(leaf)?;
    let p = alpha + T::one();
    let mut value = T::zero();
    let mut last = T::zero();
    for n in nodes {
        let dens = exterior_weight_unchecked(n.r, t, p) * flat_density(&n.comps[comp], part);
        value = value + n.weight * dens;
        last = dens;
    }
    Ok(ExteriorEnergy { value, boundary_integrand: last })
}

/// `dt (1+α) ∬_{r >= t-1} (2+r-t)^α (|T W|² + |∂_y W|²) dx dy`, `T = ∂_r + ∂_t`.
pub fn x_norm_increment<T: Real>(leaf: &Leaf<T>, comp: usize, part: ModePart, alpha: T, dt: T) -> Result<T> {
    let (t, nodes) = exterior_nodes(leaf)?;
    let mut acc = T::zero();
    for n in nodes {
        let nj = &n.comps[comp];
        let mut e = T::zero();
        for k in nj.ks().filter(|k| part.keeps(*k)) {
            let d = nj.mode(k);
            e = e + (d[0][1] + d[1][0]).norm_sqr() + T::from_i64_(k * k) * d[0][0].norm_sqr();
        }
        acc = acc + n.weight * exterior_weight_unchecked(n.r, t, alpha) * e * T::TAU();
    }
    Ok(acc * dt * (T::one() + alpha))
}

/// Adds the X-norm bulk increment of a slice to a running total.
pub fn x_norm_accumulate<T: Real>(running: T, leaf: &Leaf<T>, comp: usize, part: ModePart, alpha: T, dt: T) -> Result<T> {
    Ok(running + x_norm_increment(leaf, comp, part, alpha, dt)?)
}

/// `E^{c,ex}(t, W_0) = ∫_{r >= t-1} |S W_0 + 2 W_0|² + |B W_0|² dx`.
pub fn conformal_exterior<T: Real>(leaf: &Leaf<T>, comp: usize) -> Result<T> {
    let (t, nodes) = exterior_nodes(leaf)?;
    let two = lit::<T>(2.0);
    let mut acc = T::zero();
    for n in nodes {
        let d = n.comps[comp].mode(0);
        let (v, vt, vr) = (d[0][0], d[1][0], d[0][1]);
        let sw = vt * t + vr * n.r + v * two;
        let bw = vr * t + vt * n.r;
        acc = acc + n.weight * (sw.norm_sqr() + bw.norm_sqr());
    }
    Ok(acc)
}

/// Base functional a cubic correction refers to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaseFunctional {
    Interior,
    ExteriorHyperboloid,
    /// Weighted exterior energy on a time slice.
    Exterior { alpha: f64 },
}

/// `E`, `∬ u |∂_y Z^γ W|²` (same weights as `E`) and the sandwich check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiReport<T> {
    pub base: T,
    pub correction: T,
    pub quasi: T,
    pub max_u: T,
    pub sandwich_ok: bool,
}

/// Cubic modification `E_quasi = E + ∬ u |∂_y W|²`; `u` is component 0.
///
/// Fails with `SandwichViolated` when `max|u| <= 1/10` on the leaf and yet
/// `0.9 E <= E_quasi <= 1.1 E` does not hold.
pub fn quasilinear_correction<T: Real>(
    leaf: &Leaf<T>,
    base: BaseFunctional,
    comp: usize,
    part: ModePart,
    ops: &WordOps,
) -> Result<QuasiReport<T>> {
    let (nodes, weight_of, base_value): (Vec<&LeafNode<T>>, Box<dyn Fn(&LeafNode<T>) -> T>, T) = match base {
        BaseFunctional::Interior | BaseFunctional::ExteriorHyperboloid => {
            let branch = if base == BaseFunctional::Interior { Branch::InteriorBranch } else { Branch::ExteriorBranch };
            let e = energy_hyperboloid(leaf, branch, comp, part, ops)?.0;
            (leaf.branch_nodes(branch)?.collect(), Box::new(|n: &LeafNode<T>| n.weight), e)
        }
        BaseFunctional::Exterior { alpha } => {
            let (t, it) = exterior_nodes(leaf)?;
            let p = lit::<T>(alpha + 1.0);
            let e = energy_exterior(leaf, comp, part, lit(alpha))?.value;
            (it.collect(), Box::new(move |n: &LeafNode<T>| n.weight * exterior_weight_unchecked(n.r, t, p)), e)
        }
    };
    let sp = SpectralY::<T>::new(leaf.k_max);
    let m = sp.m();
    let mut work = sp.workspace();
    let n_modes = 2 * leaf.k_max + 1;
    let zero = Complex::new(T::zero(), T::zero());
    let (mut col_u, mut col_w) = (vec![zero; n_modes], vec![zero; n_modes]);
    let (mut pu, mut pw) = (vec![T::zero(); m], vec![T::zero(); m]);
    let mut corr = T::zero();
    let mut max_u = T::zero();
    for n in nodes {
        for (i, k) in n.comps[0].ks().enumerate() {
            col_u[i] = n.comps[0].mode(k)[0][0];
        }
        sp.to_physical(&col_u, &mut pu, &mut work);
        max_u = pu.iter().fold(max_u, |a, u| a.max(u.abs()));
        let nj = &n.comps[comp];
        for mat in ops.cart.matrices(nj.t, nj.r) {
            for (i, k) in nj.ks().enumerate() {
                col_w[i] = if part.keeps(k) {
                    ops.cart.values(&mat, nj.mode(k), k)[0] * Complex::new(T::zero(), T::from_i64_(k))
                } else {
                    zero
                };
            }
            sp.to_physical(&col_w, &mut pw, &mut work);
            let local: T = pu.iter().zip(&pw).map(|(u, w)| *u * *w * *w).sum::<T>() * T::TAU() / T::from_usize_(m);
            corr = corr + weight_of(n) * local;
        }
    }
    let quasi = base_value + corr;
    let lo = lit::<T>(0.9) * base_value;
    let hi = lit::<T>(1.1) * base_value;
    let slack = base_value * lit::<T>(1e-12);
    let sandwich_ok = quasi >= lo - slack && quasi <= hi + slack;
    if max_u <= lit(0.1) && !sandwich_ok {
        return Err(Error::SandwichViolated { base: base_value.to_f64_(), quasi: quasi.to_f64_(), max_u: max_u.to_f64_() });
    }
    Ok(QuasiReport { base: base_value, correction: corr, quasi, max_u, sandwich_ok })
}

/// `E_{n,k}(s, W) = Σ_{γ of type (n,k)} E(s, Z^γ W)` on a branch.
///
/// `max_order` is the configured `N_vf`; orders above it, or above
/// [`MAX_ORDER`], are refused.
pub fn higher_order_energy<T: Real>(
    leaf: &Leaf<T>,
    branch: Branch,
    n: usize,
    k: usize,
    comp: usize,
    part: ModePart,
    max_order: usize,
) -> Result<T> {
    let max = max_order.min(MAX_ORDER);
    if n > max {
        return Err(Error::OrderTooHigh { n, max });
    }
    let mut acc = T::zero();
    for w in words_of_type(n, k) {
        acc = acc + energy_hyperboloid(leaf, branch, comp, part, &WordOps::new(&w))?.0;
    }
    Ok(acc)
}

/// Per-word energies, so sums over several `(n, k)` reuse them.
pub fn word_energies<T: Real>(leaf: &Leaf<T>, branch: Branch, n: usize, comp: usize, part: ModePart) -> Result<Vec<(MultiIndex, T)>> {
    if n > MAX_ORDER {
        return Err(Error::OrderTooHigh { n, max: MAX_ORDER });
    }
    words_of_type(n, n)
        .into_iter()
        .map(|w| Ok((w.clone(), energy_hyperboloid(leaf, branch, comp, part, &WordOps::new(&w))?.0)))
        .collect()
}

/// Per-word energies (first expression) of every component and each of
/// `parts`, indexed `[comp][part]`; the word matrices are built once per node.
pub fn word_energy_tables<T: Real>(
    leaf: &Leaf<T>,
    branch: Branch,
    n: usize,
    parts: &[ModePart],
) -> Result<Vec<(MultiIndex, Vec<Vec<T>>)>> {
    if n > MAX_ORDER {
        return Err(Error::OrderTooHigh { n, max: MAX_ORDER });
    }
    let s = leaf.s().ok_or_else(|| Error::Domain("hyperboloid energy on a time slice".into()))?;
    let n_comp = leaf.nodes.first().map_or(0, |n| n.comps.len());
    let mut out = Vec::new();
    for w in words_of_type(n, n) {
        let ops = WordOps::new(&w);
        check_order(leaf, &ops)?;
        let mut acc = vec![vec![T::zero(); parts.len()]; n_comp];
        for node in leaf.branch_nodes(branch)? {
            let mats = ops.cart.matrices(node.t, node.r);
            for (c, nj) in node.comps.iter().enumerate() {
                for k in nj.ks() {
                    let e = mode_density(nj, s, k, &ops.cart, &mats).0 * node.weight * T::TAU();
                    for (p, part) in parts.iter().enumerate() {
                        if part.keeps(k) {
                            acc[c][p] = acc[c][p] + e;
                        }
                    }
                }
            }
        }
        out.push((w, acc));
    }
    Ok(out)
}

/// Sum of the word energies of type `(n, k)` from a [`word_energies`] table.
pub fn sum_of_type<T: Real>(table: &[(MultiIndex, T)], n: usize, k: usize) -> T {
    table.iter().filter(|(w, _)| w.n() <= n && w.k() <= k).map(|(_, e)| *e).sum()
}
