//! Fourier transforms on the circle `S¹`.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Oversampled `y`-grid size for cutoff `K`: `2(2K+1)`, rounded up to even.
///
/// Quadratic products of band-limited fields reach `|k| <= 2K`; with this
/// many samples the truncated product is alias-free.
pub fn y_grid_size(k_max: usize) -> usize {
    let m = 2 * (2 * k_max + 1);
    m + (m % 2)
}

/// Angles `y_m = 2π m / M`.
pub fn y_nodes<T: Real>(m: usize) -> Vec<T> {
    (0..m).map(|i| T::TAU() * T::from_usize_(i) / T::from_usize_(m)).collect()
}

/// Modes `W_k = (1/M) Σ_m W(y_m) e^{-iky_m}` for `|k| <= K`, ordered `-K..=K`.
pub fn decompose<T: Real>(samples: &[T], k_max: usize) -> Result<Vec<Complex<T>>> {
    let m = samples.len();
    if m < 2 * k_max + 1 {
        return Err(Error::Size { m, k_max, need: 2 * k_max + 1 });
    }
    let sp = SpectralY::with_size(k_max, m)?;
    let mut out = vec![Complex::new(T::zero(), T::zero()); 2 * k_max + 1];
    let mut work = sp.workspace();
    sp.to_modes(samples, &mut out, &mut work);
    Ok(out)
}

/// `Σ_{|k|<=K} W_k e^{iky}` for modes ordered `-K..=K`.
pub fn reconstruct_modes<T: Real>(modes: &[Complex<T>], y: T) -> T {
    let k_max = (modes.len() - 1) / 2;
    modes
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let k = T::from_i64_(i as i64 - k_max as i64);
            let ph = k * y;
            w.re * ph.cos() - w.im * ph.sin()
        })
        .sum()
}

/// Grids up to this size use direct sums over `k >= 0` instead of FFTs.
const DIRECT_MAX: usize = 64;

/// Transforms for one `(K, M)` pair. Cheap to clone and shareable across threads.
#[derive(Clone)]
pub struct SpectralY<T: Real> {
    k_max: usize,
    m: usize,
    fwd: Arc<dyn Fft<T>>,
    inv: Arc<dyn Fft<T>>,
    /// `cos(k y_m)`, `sin(k y_m)` for `k = 0..=K`, row-major in `k`; empty above [`DIRECT_MAX`].
    cos: Arc<Vec<T>>,
    sin: Arc<Vec<T>>,
}

/// Scratch buffers for [`SpectralY`]; one per thread.
pub struct YWork<T> {
    buf: Vec<Complex<T>>,
    scratch: Vec<Complex<T>>,
}

impl<T: Real> SpectralY<T> {
    /// Plans transforms on the dealiased grid `M = y_grid_size(K)`.
    pub fn new(k_max: usize) -> Self {
        Self::with_size(k_max, y_grid_size(k_max)).expect("dealiased grid is large enough")
    }

    pub fn with_size(k_max: usize, m: usize) -> Result<Self> {
        if m < 2 * k_max + 1 {
            return Err(Error::Size { m, k_max, need: 2 * k_max + 1 });
        }
        let mut planner = FftPlanner::new();
        let (mut cos, mut sin) = (Vec::new(), Vec::new());
        if m <= DIRECT_MAX {
            for k in 0..=k_max {
                for i in 0..m {
                    // reduce k·i mod M first so the angle is exact on the grid
                    let ph = T::TAU() * T::from_usize_((k * i) % m) / T::from_usize_(m);
                    cos.push(ph.cos());
                    sin.push(ph.sin());
                }
            }
        }
        Ok(SpectralY {
            k_max,
            m,
            fwd: planner.plan_fft_forward(m),
            inv: planner.plan_fft_inverse(m),
            cos: Arc::new(cos),
            sin: Arc::new(sin),
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn workspace(&self) -> YWork<T> {
        let zero = Complex::new(T::zero(), T::zero());
        let n = self.fwd.get_inplace_scratch_len().max(self.inv.get_inplace_scratch_len());
        YWork { buf: vec![zero; self.m], scratch: vec![zero; n] }
    }

    /// Samples `out[m] = Re Σ_k W_k e^{i k y_m}` from modes ordered `-K..=K`.
    pub fn to_physical(&self, modes: &[Complex<T>], out: &mut [T], work: &mut YWork<T>) {
        if !self.cos.is_empty() {
            let (k_max, m) = (self.k_max, self.m);
            let c0 = modes[k_max].re;
            out.iter_mut().for_each(|o| *o = c0);
            for k in 1..=k_max {
                let c = modes[k_max + k] + modes[k_max - k].conj();
                let (cr, ci) = (c.re, c.im);
                let (cs, sn) = (&self.cos[k * m..(k + 1) * m], &self.sin[k * m..(k + 1) * m]);
                for ((o, a), b) in out.iter_mut().zip(cs).zip(sn) {
                    *o = *o + cr * *a - ci * *b;
                }
            }
            return;
        }
        let zero = Complex::new(T::zero(), T::zero());
        work.buf.iter_mut().for_each(|v| *v = zero);
        let k_max = self.k_max as i64;
        let m = self.m as i64;
        for (i, w) in modes.iter().enumerate() {
            let k = i as i64 - k_max;
            work.buf[k.rem_euclid(m) as usize] = work.buf[k.rem_euclid(m) as usize] + *w;
        }
        self.inv.process_with_scratch(&mut work.buf, &mut work.scratch);
        for (o, v) in out.iter_mut().zip(&work.buf) {
            *o = v.re;
        }
    }

    /// Modes `-K..=K` of real samples, normalized by `1/M`.
    pub fn to_modes(&self, samples: &[T], modes: &mut [Complex<T>], work: &mut YWork<T>) {
        if !self.cos.is_empty() {
            let (k_max, m) = (self.k_max, self.m);
            let inv_m = T::one() / T::from_usize_(m);
            for k in 0..=k_max {
                let (cs, sn) = (&self.cos[k * m..(k + 1) * m], &self.sin[k * m..(k + 1) * m]);
                let (mut re, mut im) = (T::zero(), T::zero());
                for ((x, a), b) in samples.iter().zip(cs).zip(sn) {
                    re = re + *x * *a;
                    im = im - *x * *b;
                }
                let w = Complex::new(re * inv_m, im * inv_m);
                modes[k_max + k] = w;
                modes[k_max - k] = w.conj();
            }
            return;
        }
        for (b, s) in work.buf.iter_mut().zip(samples) {
            *b = Complex::new(*s, T::zero());
        }
        self.fwd.process_with_scratch(&mut work.buf, &mut work.scratch);
        let inv_m = T::one() / T::from_usize_(self.m);
        let k_max = self.k_max as i64;
        let m = self.m as i64;
        for (i, out) in modes.iter_mut().enumerate() {
            let k = i as i64 - k_max;
            *out = work.buf[k.rem_euclid(m) as usize] * inv_m;
        }
    }

    /// `∫_0^{2π} f dy` from samples (exact for trigonometric polynomials of degree `< M`).
    pub fn integrate(&self, samples: &[T]) -> T {
        samples.iter().copied().sum::<T>() * T::TAU() / T::from_usize_(self.m)
    }
}
