//! Ring buffer of recent time levels and the derivative jets built from it.

use std::collections::VecDeque;

use num_complex::Complex;

use super::radial::{radial_derivative, stencil_at, Parity};
use super::ModeField;
use crate::error::{Error, Result};
use crate::geometry::VectorFieldId;
use crate::scalar::Real;

/// One buffered time level: per component `W`, `∂_t W` and (when the
/// evolution equation is available) `∂_t² W`.
#[derive(Debug, Clone)]
pub struct Level<T> {
    pub t: T,
    pub w: Vec<ModeField<T>>,
    pub dw: Vec<ModeField<T>>,
    pub ddw: Option<Vec<ModeField<T>>>,
}

impl<T: Real> Level<T> {
    pub fn n_components(&self) -> usize {
        self.w.len()
    }
}

/// Fixed-depth history; the oldest level is dropped on overflow.
#[derive(Debug, Clone)]
pub struct StateHistory<T> {
    depth: usize,
    levels: VecDeque<Level<T>>,
}

impl<T: Real> StateHistory<T> {
    pub fn new(depth: usize) -> Self {
        assert!(depth >= 4, "history depth must be at least 4");
        StateHistory { depth, levels: VecDeque::with_capacity(depth + 1) }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn level(&self, i: usize) -> &Level<T> {
        &self.levels[i]
    }

    pub fn latest(&self) -> Option<&Level<T>> {
        self.levels.back()
    }

    pub fn times(&self) -> Vec<T> {
        self.levels.iter().map(|l| l.t).collect()
    }

    pub fn push(&mut self, level: Level<T>) -> Result<()> {
        if let Some(last) = self.levels.back() {
            if !(level.t > last.t) {
                return Err(Error::Domain(format!("level time {} not after {}", level.t, last.t)));
            }
            let (a, b) = (&last.w[0], &level.w[0]);
            if a.grid() != b.grid() || a.k_max() != b.k_max() || last.w.len() != level.w.len() {
                return Err(Error::Domain("level grid/cutoff differs from history".into()));
            }
        }
        self.levels.push_back(level);
        if self.levels.len() > self.depth {
            self.levels.pop_front();
        }
        Ok(())
    }

    pub fn clear(&mut self) {
        self.levels.clear();
    }
}

/// `Z W` for component `comp` at a buffered level.
///
/// `Dt` returns the stored `∂_t W`; `Dr` the centered radial stencil; `Dy`
/// multiplies by `ik`; `BoostR = t∂_r + r∂_t`; `Scaling = t∂_t + r∂_r`.
pub fn apply_vector_field<T: Real>(
    history: &StateHistory<T>,
    comp: usize,
    z: VectorFieldId,
    at_level: usize,
) -> Result<ModeField<T>> {
    if at_level >= history.len() {
        return Err(Error::HistoryTooShallow { have: history.len(), need: at_level + 1 });
    }
    let lv = history.level(at_level);
    let (w, dw, t) = (&lv.w[comp], &lv.dw[comp], lv.t);
    Ok(match z {
        VectorFieldId::Dt => dw.clone(),
        VectorFieldId::Dr => radial_derivative(w, 1),
        VectorFieldId::Dy => w.dy(),
        VectorFieldId::BoostR => radial_derivative(w, 1).combine_radial(dw, |_| t, |r| r),
        VectorFieldId::Scaling => dw.combine_radial(&radial_derivative(w, 1), |_| t, |r| r),
    })
}

/// Tangential derivative `T = ∂_r + ∂_t` (radial reduction of `T_j`).
pub fn tangential<T: Real>(history: &StateHistory<T>, comp: usize, at_level: usize) -> Result<ModeField<T>> {
    let mut out = apply_vector_field(history, comp, VectorFieldId::Dr, at_level)?;
    out.axpy(T::one(), &history.level(at_level).dw[comp]);
    Ok(out)
}

/// Rescaled boost `∂̄ = t^{-1}(t∂_r + r∂_t)`.
pub fn rescaled_boost<T: Real>(history: &StateHistory<T>, comp: usize, at_level: usize) -> Result<ModeField<T>> {
    let t = history.level(at_level.min(history.len().saturating_sub(1))).t;
    Ok(apply_vector_field(history, comp, VectorFieldId::BoostR, at_level)?.scale(T::one() / t))
}

/// Derivatives `d[a][b] = ∂_t^a ∂_r^b W_k`, `a + b <= 3`, for one mode.
pub type JetTable<T> = [[Complex<T>; 4]; 4];

/// Jet tables of every mode `-K..=K` of one component at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeJets<T> {
    pub k_max: usize,
    pub t: T,
    pub r: T,
    pub modes: Vec<JetTable<T>>,
}

impl<T: Real> NodeJets<T> {
    pub fn zeros(k_max: usize, t: T, r: T) -> Self {
        let z = Complex::new(T::zero(), T::zero());
        NodeJets { k_max, t, r, modes: vec![[[z; 4]; 4]; 2 * k_max + 1] }
    }

    pub fn mode(&self, k: i64) -> &JetTable<T> {
        &self.modes[(k + self.k_max as i64) as usize]
    }

    pub fn mode_mut(&mut self, k: i64) -> &mut JetTable<T> {
        &mut self.modes[(k + self.k_max as i64) as usize]
    }

    pub fn ks(&self) -> std::ops::RangeInclusive<i64> {
        -(self.k_max as i64)..=(self.k_max as i64)
    }
}

/// Cubic Lagrange weights (and their time derivatives) at `t` for four nodes.
pub fn lagrange4<T: Real>(ts: [T; 4], t: T) -> ([T; 4], [T; 4]) {
    let mut w = [T::zero(); 4];
    let mut dw = [T::zero(); 4];
    for i in 0..4 {
        let mut den = T::one();
        for m in 0..4 {
            if m != i {
                den = den * (ts[i] - ts[m]);
            }
        }
        let mut num = T::one();
        for m in 0..4 {
            if m != i {
                num = num * (t - ts[m]);
            }
        }
        // derivative of Π_{m≠i}(t - t_m)
        let mut dnum = T::zero();
        for skip in 0..4 {
            if skip == i {
                continue;
            }
            let mut p = T::one();
            for m in 0..4 {
                if m != i && m != skip {
                    p = p * (t - ts[m]);
                }
            }
            dnum = dnum + p;
        }
        w[i] = num / den;
        dw[i] = dnum / den;
    }
    (w, dw)
}

/// Jets at grid node `j`, time `t`, from four consecutive buffered levels
/// starting at `first`.
///
/// `∂_t^a` for `a <= 2` comes from the stored `W, ∂_tW, ∂_t²W` (the last
/// from the evolution equation) interpolated with cubic Lagrange weights;
/// `∂_t³W` is the derivative of the interpolant of `∂_t²W`.
pub fn interpolated_jets<T: Real>(
    history: &StateHistory<T>,
    first: usize,
    comp: usize,
    j: usize,
    t: T,
) -> Result<NodeJets<T>> {
    if history.len() < first + 4 {
        return Err(Error::HistoryTooShallow { have: history.len(), need: first + 4 });
    }
    let lv: [&Level<T>; 4] = std::array::from_fn(|i| history.level(first + i));
    if lv.iter().any(|l| l.ddw.is_none()) {
        return Err(Error::Domain("levels lack ∂_t²W; cannot build third-order jets".into()));
    }
    let ts = [lv[0].t, lv[1].t, lv[2].t, lv[3].t];
    let (wt, dwt) = lagrange4(ts, t);
    let grid = lv[0].w[comp].grid();
    let k_max = lv[0].w[comp].k_max();
    let mut out = NodeJets::zeros(k_max, t, grid.r(j));
    for k in out.ks().collect::<Vec<_>>() {
        let table = out.mode_mut(k);
        for (i, l) in lv.iter().enumerate() {
            let srcs = [l.w[comp].mode(k), l.dw[comp].mode(k), l.ddw.as_ref().unwrap()[comp].mode(k)];
            for (a, src) in srcs.iter().enumerate() {
                for b in 0..=(3 - a) {
                    let v = stencil_at(src, j, b, Parity::Even, grid.dr);
                    table[a][b] = table[a][b] + v * wt[i];
                }
            }
            table[3][0] = table[3][0] + srcs[2][j] * dwt[i];
        }
    }
    Ok(out)
}

/// Jets at grid node `j` of buffered level `at` (no time interpolation).
///
/// `∂_t³W` is the centered difference of `∂_t²W` over the neighbouring
/// levels, so `at` may not be the first or last level.
pub fn level_jets<T: Real>(history: &StateHistory<T>, at: usize, comp: usize, j: usize) -> Result<NodeJets<T>> {
    if at == 0 || at + 1 >= history.len() {
        return Err(Error::HistoryTooShallow { have: history.len(), need: at + 2 });
    }
    let (lm, l0, lp) = (history.level(at - 1), history.level(at), history.level(at + 1));
    let dd = |l: &Level<T>| -> Result<Vec<ModeField<T>>> {
        l.ddw.clone().ok_or_else(|| Error::Domain("levels lack ∂_t²W".into()))
    };
    let (ddm, dd0, ddp) = (dd(lm)?, dd(l0)?, dd(lp)?);
    let grid = l0.w[comp].grid();
    let mut out = NodeJets::zeros(l0.w[comp].k_max(), l0.t, grid.r(j));
    let inv = T::one() / (lp.t - lm.t);
    for k in out.ks().collect::<Vec<_>>() {
        let table = out.mode_mut(k);
        let srcs = [l0.w[comp].mode(k), l0.dw[comp].mode(k), dd0[comp].mode(k)];
        for (a, src) in srcs.iter().enumerate() {
            for b in 0..=(3 - a) {
                table[a][b] = stencil_at(src, j, b, Parity::Even, grid.dr);
            }
        }
        table[3][0] = (ddp[comp].mode(k)[j] - ddm[comp].mode(k)[j]) * inv;
    }
    Ok(out)
}
