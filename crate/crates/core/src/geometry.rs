//! Coordinates, interior/exterior regions, hyperboloidal slices and the
//! radially reduced vector-field family.
//!
//! Everything here assumes data radially symmetric in `x`, so a spacetime
//! point is described by `(t, r, y)`. Rotations act trivially on such data
//! and the three boosts collapse to the radial boost `t ∂_r + r ∂_t`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Initial time of the evolution.
pub const T0: f64 = 2.0;

/// A point of the reduced spacetime `(t, r, y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point<T> {
    pub t: T,
    pub r: T,
    pub y: T,
}

impl<T: Real> Point<T> {
    /// Builds a point, wrapping `y` into `[0, 2π)`.
    pub fn new(t: T, r: T, y: T) -> Result<Self> {
        if !(t >= lit(T0)) || !(r >= T::zero()) {
            return Err(Error::Domain(format!("point (t={t}, r={r}) outside t >= 2, r >= 0")));
        }
        let two_pi = T::TAU();
        let mut y = y % two_pi;
        if y < T::zero() {
            y = y + two_pi;
        }
        Ok(Point { t, r, y })
    }
}

/// Interior (`r < t - 1`) or exterior (`r >= t - 1`) part of spacetime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    Interior,
    Exterior,
}

/// Classifies a point; the cone `t = r + 1` belongs to the exterior.
pub fn classify<T: Real>(p: &Point<T>) -> Region {
    region_of(p.t, p.r)
}

#[inline]
pub fn region_of<T: Real>(t: T, r: T) -> Region {
    if r < t - T::one() {
        Region::Interior
    } else {
        Region::Exterior
    }
}

/// Which part of a hyperboloid `H_s` a slice covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    InteriorBranch,
    ExteriorBranch,
    Full,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::InteriorBranch => "interior",
            Branch::ExteriorBranch => "exterior",
            Branch::Full => "full",
        }
    }

    /// Whether radius `r` on `H_s` belongs to this branch.
    pub fn contains<T: Real>(self, s: T, r: T) -> bool {
        let split = branch_split(s);
        match self {
            Branch::InteriorBranch => r < split,
            Branch::ExteriorBranch => r >= split,
            Branch::Full => true,
        }
    }
}

/// Radius `(s² - 1)/2` where `H_s` meets the cone `t = r + 1`.
#[inline]
pub fn branch_split<T: Real>(s: T) -> T {
    (s * s - T::one()) / lit(2.0)
}

/// Time coordinate of `H_s` above radius `r`.
#[inline]
pub fn hyperboloid_time<T: Real>(s: T, r: T) -> T {
    s.hypot(r)
}

/// Quadrature node of a hyperboloidal slice: grid index, radius, time and
/// the weight of `∫ f dx = ∫ 4π r² f dr`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceNode<T> {
    pub j: usize,
    pub r: T,
    pub t: T,
    pub weight: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HyperboloidSlice<T> {
    pub s: T,
    pub branch: Branch,
    pub nodes: Vec<SliceNode<T>>,
}

/// Trapezoidal weight of node `j` on the uniform grid `r_j = j dr`, `j = 0..=jmax`,
/// for the measure `4π r² dr`.
#[inline]
pub fn radial_weight<T: Real>(j: usize, jmax: usize, dr: T) -> T {
    let r = T::from_usize_(j) * dr;
    let w = lit::<T>(4.0) * T::PI() * r * r * dr;
    if j == 0 || j == jmax {
        w / lit(2.0)
    } else {
        w
    }
}

/// Pulls the uniform grid `r_j = j dr` (`dr = r_max/(n_nodes-1)`) back onto
/// `H_s` and keeps the nodes of the requested branch.
///
/// Weights are the trapezoid weights of the full grid, so the interior and
/// exterior branches always add up to the full slice.
pub fn hyperboloid_slice<T: Real>(s: T, branch: Branch, r_max: T, n_nodes: usize) -> Result<HyperboloidSlice<T>> {
    if !(s >= lit(T0)) {
        return Err(Error::Domain(format!("hyperbolic time s = {s} < 2")));
    }
    if n_nodes < 2 || !(r_max > T::zero()) {
        return Err(Error::Domain(format!("need n_nodes >= 2 and r_max > 0 (got {n_nodes}, {r_max})")));
    }
    let jmax = n_nodes - 1;
    let dr = r_max / T::from_usize_(jmax);
    slice_on_grid(s, branch, dr, jmax)
}

/// Same as [`hyperboloid_slice`] but on an explicit solver grid.
pub fn slice_on_grid<T: Real>(s: T, branch: Branch, dr: T, jmax: usize) -> Result<HyperboloidSlice<T>> {
    let nodes: Vec<_> = (0..=jmax)
        .filter_map(|j| {
            let r = T::from_usize_(j) * dr;
            branch.contains(s, r).then(|| SliceNode {
                j,
                r,
                t: hyperboloid_time(s, r),
                weight: radial_weight(j, jmax, dr),
            })
        })
        .collect();
    if nodes.is_empty() {
        return Err(Error::EmptyBranch {
            s: s.to_f64_(),
            branch: branch.name(),
            r_max: (T::from_usize_(jmax) * dr).to_f64_(),
        });
    }
    Ok(HyperboloidSlice { s, branch, nodes })
}

/// Exterior weight `(2 + r - t)^(α + 1 + power_shift)`.
///
/// `power_shift = -1` is the bulk weight of the X-norm.
pub fn exterior_weight<T: Real>(r: T, t: T, alpha: T, power_shift: i32) -> Result<T> {
    if r < t - T::one() {
        return Err(Error::Domain(format!("exterior weight requested at interior point r={r}, t={t}")));
    }
    Ok(exterior_weight_unchecked(r, t, alpha + T::from_i64_(power_shift as i64) + T::one()))
}

#[inline]
pub(crate) fn exterior_weight_unchecked<T: Real>(r: T, t: T, exponent: T) -> T {
    (lit::<T>(2.0) + r - t).powf(exponent)
}

/// Radially reduced admissible vector fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VectorFieldId {
    Dt,
    /// Radial reduction of the translations `∂_i`.
    Dr,
    Dy,
    /// Radial boost `t ∂_r + r ∂_t`.
    BoostR,
    /// `t ∂_t + r ∂_r`.
    Scaling,
}

impl fmt::Display for VectorFieldId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            VectorFieldId::Dt => "Dt",
            VectorFieldId::Dr => "Dr",
            VectorFieldId::Dy => "Dy",
            VectorFieldId::BoostR => "B",
            VectorFieldId::Scaling => "S",
        };
        f.write_str(s)
    }
}

/// Ordered product `Z^γ` of vector fields; the rightmost field acts first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct MultiIndex {
    pub word: Vec<VectorFieldId>,
}

impl MultiIndex {
    pub fn new(word: Vec<VectorFieldId>) -> Self {
        MultiIndex { word }
    }

    pub fn identity() -> Self {
        MultiIndex { word: Vec::new() }
    }

    /// Total order.
    pub fn n(&self) -> usize {
        self.word.len()
    }

    /// Number of Klainerman (boost) factors.
    pub fn k(&self) -> usize {
        self.word.iter().filter(|z| **z == VectorFieldId::BoostR).count()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return f.write_str("1");
        }
        for (i, z) in self.word.iter().enumerate() {
            if i > 0 {
                f.write_str("·")?;
            }
            write!(f, "{z}")?;
        }
        Ok(())
    }
}

/// All multi-indices of type `(n, k)`: words `∂^α B^m` with `|α| + m <= n`
/// and `m <= k`, where `∂^α` ranges over multisets of `{Dt, Dr, Dy}`.
///
/// Translations commute with each other, so each multiset appears once
/// (in sorted order); boosts act first.
pub fn words_of_type(n: usize, k: usize) -> Vec<MultiIndex> {
    const TRANSLATIONS: [VectorFieldId; 3] = [VectorFieldId::Dt, VectorFieldId::Dr, VectorFieldId::Dy];
    let k = k.min(n);
    let mut out = Vec::new();
    for total in 0..=n {
        for m in 0..=k.min(total) {
            let d = total - m;
            // multisets of size d from 3 translations, as nondecreasing sequences
            let mut stack = vec![(Vec::<VectorFieldId>::new(), 0usize)];
            while let Some((prefix, start)) = stack.pop() {
                if prefix.len() == d {
                    let mut word = prefix.clone();
                    word.extend(std::iter::repeat_n(VectorFieldId::BoostR, m));
                    out.push(MultiIndex::new(word));
                    continue;
                }
                for idx in (start..TRANSLATIONS.len()).rev() {
                    let mut p = prefix.clone();
                    p.push(TRANSLATIONS[idx]);
                    stack.push((p, idx));
                }
            }
        }
    }
    out
}
