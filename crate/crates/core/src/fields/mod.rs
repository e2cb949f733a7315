//! Discrete fields: Fourier towers in `y` over a uniform radial grid.

pub mod diffop;
pub mod history;
pub mod manufactured;
pub mod radial;
pub mod snapshot;
pub mod spectral;

use num_complex::Complex;

use crate::scalar::{lit, Real};

pub use history::{apply_vector_field, Level, StateHistory};
pub use radial::{radial_derivative, Parity, RadialLaplacian};
pub use spectral::{decompose, reconstruct_modes, y_grid_size, SpectralY};

/// Uniform radial grid `r_j = j dr`, `j = 0..=jmax`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGrid<T> {
    pub dr: T,
    pub jmax: usize,
}

impl<T: Real> RadialGrid<T> {
    pub fn new(dr: T, jmax: usize) -> Self {
        RadialGrid { dr, jmax }
    }

    pub fn len(&self) -> usize {
        self.jmax + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn r(&self, j: usize) -> T {
        T::from_usize_(j) * self.dr
    }

    pub fn r_max(&self) -> T {
        self.r(self.jmax)
    }

    pub fn nodes(&self) -> impl Iterator<Item = T> + '_ {
        (0..=self.jmax).map(move |j| self.r(j))
    }
}

/// Mode tower `{W_k(r_j)}`, `|k| <= K`, with `W_k = (1/2π)∫ e^{-iky} W dy`.
///
/// Storage is mode-major: mode `k` occupies a contiguous radial array.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeField<T> {
    k_max: usize,
    grid: RadialGrid<T>,
    data: Vec<Complex<T>>,
    is_real: bool,
}

impl<T: Real> ModeField<T> {
    pub fn zeros(k_max: usize, grid: RadialGrid<T>, is_real: bool) -> Self {
        ModeField {
            k_max,
            grid,
            data: vec![Complex::new(T::zero(), T::zero()); (2 * k_max + 1) * grid.len()],
            is_real,
        }
    }

    /// Fills every mode from `f(k, r)`.
    pub fn from_fn(k_max: usize, grid: RadialGrid<T>, is_real: bool, f: impl Fn(i64, T) -> Complex<T>) -> Self {
        let mut out = Self::zeros(k_max, grid, is_real);
        for k in out.ks() {
            let dst = out.mode_mut(k);
            for (j, v) in dst.iter_mut().enumerate() {
                *v = f(k, grid.r(j));
            }
        }
        out
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn grid(&self) -> RadialGrid<T> {
        self.grid
    }

    pub fn is_real(&self) -> bool {
        self.is_real
    }

    pub fn n_modes(&self) -> usize {
        2 * self.k_max + 1
    }

    /// Mode numbers `-K..=K`.
    pub fn ks(&self) -> std::ops::RangeInclusive<i64> {
        -(self.k_max as i64)..=(self.k_max as i64)
    }

    #[inline]
    fn offset(&self, k: i64) -> usize {
        let idx = (k + self.k_max as i64) as usize;
        idx * self.grid.len()
    }

    pub fn mode(&self, k: i64) -> &[Complex<T>] {
        assert!(k.unsigned_abs() as usize <= self.k_max, "mode {k} beyond cutoff {}", self.k_max);
        let o = self.offset(k);
        &self.data[o..o + self.grid.len()]
    }

    pub fn mode_mut(&mut self, k: i64) -> &mut [Complex<T>] {
        assert!(k.unsigned_abs() as usize <= self.k_max, "mode {k} beyond cutoff {}", self.k_max);
        let o = self.offset(k);
        let n = self.grid.len();
        &mut self.data[o..o + n]
    }

    #[inline]
    pub fn at(&self, k: i64, j: usize) -> Complex<T> {
        self.data[self.offset(k) + j]
    }

    #[inline]
    pub fn set(&mut self, k: i64, j: usize, v: Complex<T>) {
        let o = self.offset(k);
        self.data[o + j] = v;
    }

    /// All modes at radial node `j`, ordered `k = -K..=K`.
    pub fn column(&self, j: usize, out: &mut [Complex<T>]) {
        for (i, k) in self.ks().enumerate() {
            out[i] = self.at(k, j);
        }
    }

    pub fn set_column(&mut self, j: usize, col: &[Complex<T>]) {
        for (i, k) in self.ks().collect::<Vec<_>>().into_iter().enumerate() {
            self.set(k, j, col[i]);
        }
    }

    pub fn raw(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn raw_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.data
    }

    /// Value of the reconstructed field at node `j`, angle `y`.
    pub fn reconstruct(&self, j: usize, y: T) -> T {
        self.ks()
            .map(|k| {
                let ph = T::from_i64_(k) * y;
                let e = Complex::new(ph.cos(), ph.sin());
                (self.at(k, j) * e).re
            })
            .sum()
    }

    /// `∂_y`: multiplies mode `k` by `ik`.
    pub fn dy(&self) -> Self {
        let mut out = self.clone();
        for k in self.ks() {
            let f = Complex::new(T::zero(), T::from_i64_(k));
            for v in out.mode_mut(k) {
                *v = *v * f;
            }
        }
        out
    }

    pub fn scale(&self, a: T) -> Self {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v = *v * a);
        out
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: T, other: &Self) {
        debug_assert_eq!(self.data.len(), other.data.len());
        for (x, y) in self.data.iter_mut().zip(&other.data) {
            *x = *x + *y * a;
        }
    }

    /// `r`-dependent linear combination `a(r) self + b(r) other`.
    pub fn combine_radial(&self, other: &Self, a: impl Fn(T) -> T, b: impl Fn(T) -> T) -> Self {
        let mut out = self.clone();
        let n = self.grid.len();
        for (i, (x, y)) in out.data.iter_mut().zip(&other.data).enumerate() {
            let r = self.grid.r(i % n);
            *x = *x * a(r) + *y * b(r);
        }
        out
    }

    /// Keeps only the zero mode (`W_0`) or only the nonzero modes (`W̃`).
    pub fn project(&self, part: ModePart) -> Self {
        let mut out = self.clone();
        for k in self.ks() {
            let keep = match part {
                ModePart::All => true,
                ModePart::Zero => k == 0,
                ModePart::NonZero => k != 0,
            };
            if !keep {
                out.mode_mut(k).iter_mut().for_each(|v| *v = Complex::new(T::zero(), T::zero()));
            }
        }
        out
    }

    /// Largest `|W_{-k} - conj(W_k)|` over all nodes, and `|Im W_0|`.
    pub fn reality_defect(&self) -> T {
        let mut worst = T::zero();
        for k in 0..=self.k_max as i64 {
            for j in 0..self.grid.len() {
                let d = (self.at(-k, j) - self.at(k, j).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Symmetrizes so that `W_{-k} = conj(W_k)` exactly.
    pub fn enforce_reality(&mut self) {
        for k in 0..=self.k_max as i64 {
            for j in 0..self.grid.len() {
                let avg = (self.at(k, j) + self.at(-k, j).conj()) * lit::<T>(0.5);
                self.set(k, j, avg);
                self.set(-k, j, avg.conj());
            }
        }
        self.is_real = true;
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m.max(v.norm()))
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// `∫|W(y)|² dy = 2π Σ_k |W_k|²` at node `j`.
    pub fn l2y_sq(&self, j: usize) -> T {
        T::TAU() * self.ks().map(|k| self.at(k, j).norm_sqr()).sum::<T>()
    }
}

/// Which part of the `y`-Fourier tower to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum ModePart {
    All,
    /// The zero mode `W_0`.
    Zero,
    /// The Klein-Gordon tower `W̃ = W - W_0`.
    NonZero,
}

impl ModePart {
    #[inline]
    pub fn keeps(self, k: i64) -> bool {
        match self {
            ModePart::All => true,
            ModePart::Zero => k == 0,
            ModePart::NonZero => k != 0,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            ModePart::All => "W",
            ModePart::Zero => "W0",
            ModePart::NonZero => "Wt",
        }
    }
}
