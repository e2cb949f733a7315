//! Foliation leaves: hyperboloids `H_s` and time slices `Σ_t`, sampled at
//! the radial grid nodes with full derivative jets.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::history::{interpolated_jets, NodeJets};
use crate::fields::manufactured::AnalyticField;
use crate::fields::radial::{stencil_at, Parity};
use crate::fields::{Level, RadialGrid, StateHistory};
use crate::geometry::{hyperboloid_time, radial_weight, Branch};
use crate::scalar::{lit, Real};
use crate::solver::StepHook;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LeafKind {
    Hyperboloid(f64),
    Time(f64),
}

impl LeafKind {
    pub fn name(self) -> &'static str {
        match self {
            LeafKind::Hyperboloid(_) => "hyperboloid",
            LeafKind::Time(_) => "time",
        }
    }

    pub fn param(self) -> f64 {
        match self {
            LeafKind::Hyperboloid(s) | LeafKind::Time(s) => s,
        }
    }

    /// Time of the leaf above radius `r`.
    pub fn time_at<T: Real>(self, r: T) -> T {
        match self {
            LeafKind::Hyperboloid(s) => hyperboloid_time(lit(s), r),
            LeafKind::Time(t) => lit(t),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeafNode<T> {
    pub j: usize,
    pub r: T,
    pub t: T,
    /// Trapezoid weight of `4π r² dr` on the full grid.
    pub weight: T,
    /// Jets of `u` and `v`.
    pub comps: Vec<NodeJets<T>>,
}

/// Nodes `j = 0..nodes.len()` of one leaf; nodes beyond the collected range
/// are missing (their time was never reached).
#[derive(Debug, Clone, PartialEq)]
pub struct Leaf<T> {
    pub kind: LeafKind,
    pub grid: RadialGrid<T>,
    pub k_max: usize,
    pub nodes: Vec<LeafNode<T>>,
    /// Highest `∂_t` order present in the jets.
    pub t_order: usize,
}

impl<T: Real> Leaf<T> {
    pub fn s(&self) -> Option<T> {
        match self.kind {
            LeafKind::Hyperboloid(s) => Some(lit(s)),
            LeafKind::Time(_) => None,
        }
    }

    pub fn is_complete(&self) -> bool {
        self.nodes.len() == self.grid.len()
    }

    /// Radius of the first node that was not collected, if any.
    pub fn cut_radius(&self) -> Option<T> {
        (!self.is_complete()).then(|| self.grid.r(self.nodes.len()))
    }

    /// Nodes of a branch of `H_s`. The interior branch must be fully
    /// collected; the exterior and full branches are truncated at the last
    /// collected node.
    pub fn branch_nodes(&self, branch: Branch) -> Result<impl Iterator<Item = &LeafNode<T>>> {
        let s = self.s().ok_or_else(|| Error::Domain("branch of a time slice".into()))?;
        if branch == Branch::InteriorBranch && !self.is_complete() {
            let r_cut = self.grid.r(self.nodes.len());
            if branch.contains(s, r_cut) {
                let t = hyperboloid_time(s, r_cut).to_f64_();
                let hi = self.nodes.last().map(|n| n.t.to_f64_()).unwrap_or(f64::NAN);
                return Err(Error::HistoryGap { t, lo: crate::geometry::T0, hi });
            }
        }
        Ok(self.nodes.iter().filter(move |n| branch.contains(s, n.r)))
    }

    /// Jets of a closed-form field on the leaf (exact to `∂^3`).
    pub fn from_analytic(field: &AnalyticField<T>, kind: LeafKind, grid: RadialGrid<T>, k_max: usize) -> Self {
        let half = lit::<T>(0.5);
        let nodes = (0..grid.len())
            .map(|j| {
                let r = grid.r(j);
                let t = kind.time_at(r);
                let comps = (0..field.n_components())
                    .map(|c| {
                        let mut nj = NodeJets::zeros(k_max, t, r);
                        for term in &field.components[c] {
                            let d = (term.g)(t, r).derivatives();
                            let e = Complex::new(term.phase.cos(), term.phase.sin());
                            let targets: Vec<(i64, Complex<T>)> = if term.k == 0 {
                                vec![(0, Complex::new(term.phase.cos(), T::zero()))]
                            } else {
                                let ep = if term.k > 0 { e } else { e.conj() };
                                vec![(term.k.abs(), ep * half), (-term.k.abs(), ep.conj() * half)]
                            };
                            for (k, c) in targets {
                                let tab = nj.mode_mut(k);
                                for a in 0..4 {
                                    for b in 0..4 - a {
                                        tab[a][b] = tab[a][b] + c * d[a][b];
                                    }
                                }
                            }
                        }
                        nj
                    })
                    .collect();
                LeafNode { j, r, t, weight: radial_weight(j, grid.jmax, grid.dr), comps }
            })
            .collect();
        Leaf { kind, grid, k_max, nodes, t_order: 3 }
    }

    /// Time slice of one buffered level. `∂_t²W` enters when present;
    /// `∂_t³W` is unavailable on a single level.
    pub fn time_slice(level: &Level<T>) -> Self {
        let grid = level.w[0].grid();
        let k_max = level.w[0].k_max();
        let t = level.t;
        let nodes = (0..grid.len())
            .map(|j| {
                let r = grid.r(j);
                let comps = (0..level.n_components())
                    .map(|c| {
                        let mut nj = NodeJets::zeros(k_max, t, r);
                        for k in nj.ks().collect::<Vec<_>>() {
                            let tab = nj.mode_mut(k);
                            let mut srcs = vec![level.w[c].mode(k), level.dw[c].mode(k)];
                            if let Some(dd) = &level.ddw {
                                srcs.push(dd[c].mode(k));
                            }
                            for (a, src) in srcs.iter().enumerate() {
                                for b in 0..4 - a {
                                    tab[a][b] = stencil_at(src, j, b, Parity::Even, grid.dr);
                                }
                            }
                        }
                        nj
                    })
                    .collect();
                LeafNode { j, r, t, weight: radial_weight(j, grid.jmax, grid.dr), comps }
            })
            .collect();
        let t_order = if level.ddw.is_some() { 2 } else { 1 };
        Leaf { kind: LeafKind::Time(t.to_f64_()), grid, k_max, nodes, t_order }
    }
}

/// Streams hyperboloid leaves out of the evolving history.
///
/// Each level push fills the nodes whose crossing time `t_j = √(s² + r_j²)`
/// lies in the central interval of the four buffered levels (the first and
/// last intervals use the outermost four).
pub struct LeafCollector<T> {
    leaves: Vec<Leaf<T>>,
}

impl<T: Real> LeafCollector<T> {
    pub fn new(s_values: &[f64], grid: RadialGrid<T>, k_max: usize) -> Self {
        let leaves = s_values
            .iter()
            .map(|&s| Leaf { kind: LeafKind::Hyperboloid(s), grid, k_max, nodes: Vec::new(), t_order: 3 })
            .collect();
        LeafCollector { leaves }
    }

    pub fn leaves(&self) -> &[Leaf<T>] {
        &self.leaves
    }

    pub fn into_leaves(self) -> Vec<Leaf<T>> {
        self.leaves
    }

    fn fill(&mut self, history: &StateHistory<T>, hi: T) -> Result<()> {
        let first = history.len() - 4;
        let n_comp = history.level(0).n_components();
        let slack = hi * lit::<T>(1e-13);
        for leaf in &mut self.leaves {
            let s = lit::<T>(leaf.kind.param());
            while leaf.nodes.len() < leaf.grid.len() {
                let j = leaf.nodes.len();
                let r = leaf.grid.r(j);
                let t = hyperboloid_time(s, r);
                if t > hi + slack {
                    break;
                }
                let comps = (0..n_comp)
                    .map(|c| interpolated_jets(history, first, c, j, t))
                    .collect::<Result<Vec<_>>>()?;
                leaf.nodes.push(LeafNode { j, r, t, weight: radial_weight(j, leaf.grid.jmax, leaf.grid.dr), comps });
            }
        }
        Ok(())
    }
}

impl<T: Real> StepHook<T> for LeafCollector<T> {
    fn on_level(&mut self, history: &StateHistory<T>, _step: usize, last: bool) -> Result<()> {
        if history.len() < 4 {
            return Ok(());
        }
        let first = history.len() - 4;
        let hi = if last { history.level(first + 3).t } else { history.level(first + 2).t };
        self.fill(history, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::manufactured::{ManufacturedCase, Profile, Term};
    use crate::jet::Jet;
    use crate::solver::{run, SolverConfig};
    use std::sync::Arc;

    #[test]
    fn analytic_leaf_has_exact_hyperboloid_times() {
        let g = RadialGrid::new(0.1, 50);
        let f = ManufacturedCase::Bump.field::<f64>();
        let leaf = Leaf::from_analytic(&f, LeafKind::Hyperboloid(3.0), g, 2);
        for n in &leaf.nodes {
            assert!((n.t * n.t - n.r * n.r - 9.0).abs() < 1e-12);
        }
        assert!(leaf.is_complete());
    }

    #[test]
    fn collected_leaf_matches_closed_form() {
        // linear run of the closed-form radial wave; the streamed jets on
        // H_s must match the exact ones to discretization accuracy
        let case = ManufacturedCase::RadialWave(ManufacturedCase::DEFAULT_PULSE);
        let cfg = SolverConfig {
            case: Some(case),
            k_max: 1,
            jmax: 160,
            dr: 0.025,
            dt: 0.0125,
            t_end: 3.0,
            nonlinearity: crate::solver::Nonlinearity::linear(),
            leaves: vec![2.5],
            ..Default::default()
        };
        let g = RadialGrid::new(cfg.dr, cfg.jmax);
        let mut col = LeafCollector::new(&cfg.leaves, g, cfg.k_max);
        run::<f64>(&cfg, &mut [&mut col]).unwrap();
        let leaf = &col.leaves()[0];
        let exact = Leaf::from_analytic(&case.field(), leaf.kind, g, cfg.k_max);
        assert!(!leaf.nodes.is_empty());
        let mut worst = [0.0f64; 4];
        for n in &leaf.nodes {
            let got = n.comps[0].mode(0);
            let want = exact.nodes[n.j].comps[0].mode(0);
            for (a, w) in worst.iter_mut().enumerate() {
                *w = w.max((got[a][0] - want[a][0]).norm());
            }
        }
        assert!(worst[0] < 2e-3 && worst[1] < 5e-3 && worst[2] < 2e-2 && worst[3] < 0.2, "{worst:?}");
    }

    #[test]
    fn interior_branch_gap_is_reported() {
        let g = RadialGrid::new(0.1, 50);
        let mut leaf = Leaf::from_analytic(
            &AnalyticField {
                components: vec![vec![Term { k: 0, phase: 0.0, g: Arc::new(|_t, _r| Jet::constant(1.0)) as Profile<f64> }]],
            },
            LeafKind::Hyperboloid(3.0),
            g,
            1,
        );
        leaf.nodes.truncate(10);
        assert!(matches!(leaf.branch_nodes(Branch::InteriorBranch), Err(Error::HistoryGap { .. })));
        assert!(leaf.branch_nodes(Branch::Full).is_ok());
    }
}
