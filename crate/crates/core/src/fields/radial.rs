//! Radial finite differences with a regular origin.
//!
//! Fields are extended across `r = 0` by parity: every mode of `W` is even
//! in `r`, `∂_r W` is odd, and so on.

use num_complex::Complex;

use super::{ModeField, RadialGrid};
use crate::scalar::{lit, Real};

/// Parity of a radial profile under `r -> -r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn flip(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    /// Parity after `n` radial derivatives.
    pub fn after(self, n: usize) -> Self {
        if n % 2 == 0 {
            self
        } else {
            self.flip()
        }
    }
}

#[inline]
fn ghost<T: Real>(vals: &[Complex<T>], i: isize, parity: Parity) -> Complex<T> {
    if i >= 0 {
        vals[i as usize]
    } else {
        let v = vals[(-i) as usize];
        match parity {
            Parity::Even => v,
            Parity::Odd => -v,
        }
    }
}

/// `∂_r^order` of a sampled profile at node `j` (`order` in 1..=3).
///
/// Centered second-order stencils with parity ghosts at the origin. At the
/// outer node first and second derivatives use one-sided second-order
/// stencils; the third derivative shifts its five-point stencil inward.
pub fn stencil_at<T: Real>(vals: &[Complex<T>], j: usize, order: usize, parity: Parity, dr: T) -> Complex<T> {
    let jmax = vals.len() - 1;
    let g = |i: isize| ghost(vals, i, parity);
    let ji = j as isize;
    let two = lit::<T>(2.0);
    match order {
        0 => vals[j],
        1 => {
            if j == jmax {
                (g(ji) * lit::<T>(3.0) - g(ji - 1) * lit::<T>(4.0) + g(ji - 2)) / (two * dr)
            } else {
                (g(ji + 1) - g(ji - 1)) / (two * dr)
            }
        }
        2 => {
            if j == jmax {
                (g(ji) * two - g(ji - 1) * lit::<T>(5.0) + g(ji - 2) * lit::<T>(4.0) - g(ji - 3)) / (dr * dr)
            } else {
                (g(ji + 1) - g(ji) * two + g(ji - 1)) / (dr * dr)
            }
        }
        3 => {
            let c = ji.min(jmax as isize - 2);
            (g(c + 2) - g(c + 1) * two + g(c - 1) * two - g(c - 2)) / (two * dr * dr * dr)
        }
        _ => panic!("radial derivative of order {order} not supported"),
    }
}

/// `∂_r` or `∂_r²` of every mode (even extension at the origin, so `∂_r W(0) = 0`).
pub fn radial_derivative<T: Real>(field: &ModeField<T>, order: usize) -> ModeField<T> {
    radial_derivative_with(field, order, Parity::Even)
}

pub fn radial_derivative_with<T: Real>(field: &ModeField<T>, order: usize, parity: Parity) -> ModeField<T> {
    let grid = field.grid();
    assert!(grid.jmax >= 4, "radial stencils need at least 5 nodes");
    let mut out = ModeField::zeros(field.k_max(), grid, field.is_real());
    for k in field.ks() {
        let src = field.mode(k);
        let dst = out.mode_mut(k);
        for (j, d) in dst.iter_mut().enumerate() {
            *d = stencil_at(src, j, order, parity, grid.dr);
        }
    }
    out
}

/// Conservative second-order discretization of `Δ_r = ∂_r² + (2/r)∂_r`:
///
/// `(Δ_r W)_j = [r²_{j+½}(W_{j+1}-W_j) - r²_{j-½}(W_j-W_{j-1})] / (dr V_j)`
///
/// with `V_j` the exact `r² dr` volume of the dual cell. At `j = 0` this is
/// `6(W_1 - W_0)/dr² = 3∂_r²W(0)`. No flux leaves the last cell. The scheme
/// is self-adjoint for `Σ_j V_j`, so it conserves [`RadialLaplacian::energy`].
#[derive(Debug, Clone)]
pub struct RadialLaplacian<T> {
    grid: RadialGrid<T>,
    /// `V_j` (without the `4π`).
    volume: Vec<T>,
    /// `r²_{j+½}/dr`, `j = 0..jmax-1`.
    flux: Vec<T>,
}

impl<T: Real> RadialLaplacian<T> {
    pub fn new(grid: RadialGrid<T>) -> Self {
        let dr = grid.dr;
        let half = lit::<T>(0.5);
        let third = T::one() / lit(3.0);
        let volume = (0..=grid.jmax)
            .map(|j| {
                let lo = if j == 0 { T::zero() } else { grid.r(j) - half * dr };
                let hi = if j == grid.jmax { grid.r(j) } else { grid.r(j) + half * dr };
                (hi * hi * hi - lo * lo * lo) * third
            })
            .collect();
        let flux = (0..grid.jmax)
            .map(|j| {
                let rh = grid.r(j) + half * dr;
                rh * rh / dr
            })
            .collect();
        RadialLaplacian { grid, volume, flux }
    }

    pub fn grid(&self) -> RadialGrid<T> {
        self.grid
    }

    pub fn volume(&self, j: usize) -> T {
        self.volume[j]
    }

    /// Applies the operator to one radial profile.
    pub fn apply_profile(&self, w: &[Complex<T>], out: &mut [Complex<T>]) {
        let n = self.grid.jmax;
        let mut prev_flux = Complex::new(T::zero(), T::zero());
        for j in 0..=n {
            let next_flux = if j < n { (w[j + 1] - w[j]) * self.flux[j] } else { Complex::new(T::zero(), T::zero()) };
            out[j] = (next_flux - prev_flux) / self.volume[j];
            prev_flux = next_flux;
        }
    }

    /// Value at a single node.
    #[inline]
    pub fn apply_at(&self, w: &[Complex<T>], j: usize) -> Complex<T> {
        let zero = Complex::new(T::zero(), T::zero());
        let fp = if j < self.grid.jmax { (w[j + 1] - w[j]) * self.flux[j] } else { zero };
        let fm = if j > 0 { (w[j] - w[j - 1]) * self.flux[j - 1] } else { zero };
        (fp - fm) / self.volume[j]
    }

    pub fn apply(&self, field: &ModeField<T>) -> ModeField<T> {
        let mut out = ModeField::zeros(field.k_max(), field.grid(), field.is_real());
        for k in field.ks() {
            self.apply_profile(field.mode(k), out.mode_mut(k));
        }
        out
    }

    /// Discrete flat energy `∬ |∂_t W|² + |∂_r W|² + |∂_y W|² dx dy` of one
    /// component, consistent with this operator (so it is exactly conserved
    /// by the semi-discrete linear flow).
    pub fn energy(&self, w: &ModeField<T>, dw: &ModeField<T>) -> T {
        let mut e = T::zero();
        for k in w.ks() {
            let kk = T::from_i64_(k * k);
            let a = w.mode(k);
            let b = dw.mode(k);
            for j in 0..=self.grid.jmax {
                e = e + self.volume[j] * (b[j].norm_sqr() + kk * a[j].norm_sqr());
            }
            for j in 0..self.grid.jmax {
                e = e + self.flux[j] * (a[j + 1] - a[j]).norm_sqr();
            }
        }
        e * lit::<T>(4.0) * T::PI() * T::TAU()
    }
}
