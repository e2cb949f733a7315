//! A monitored run: evolution plus every leaf and slice diagnostic.

use crate::energies::monitor::{DecaySample, SliceMonitor};
use crate::energies::report::{hyperboloid_report, EnergyReport, HyperboloidOptions};
use crate::energies::{Leaf, LeafCollector};
use crate::error::Result;
use crate::fields::RadialGrid;
use crate::scalar::{lit, Real};
use crate::solver::{run, LogRecord, RunSummary, SolverConfig, StepHook};

/// Which diagnostics [`simulate`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulateOptions {
    /// Time-slice energy reports (decay samples are always taken).
    pub slice_reports: bool,
    /// Keep the collected hyperboloid leaves in the artifacts.
    pub keep_leaves: bool,
    /// Component whose decay quantities are sampled.
    pub decay_comp: usize,
}

impl Default for SimulateOptions {
    fn default() -> Self {
        SimulateOptions { slice_reports: true, keep_leaves: false, decay_comp: 0 }
    }
}

pub struct RunArtifacts<T> {
    pub summary: RunSummary,
    /// Reports of the leaves whose interior branch was fully collected, in
    /// increasing `s`.
    pub hyperboloid_reports: Vec<EnergyReport>,
    pub slice_reports: Vec<EnergyReport>,
    pub decay: Vec<DecaySample>,
    pub x_bulk: Vec<f64>,
    pub log: Vec<LogRecord>,
    pub leaves: Vec<Leaf<T>>,
}

impl<T> RunArtifacts<T> {
    /// Hyperboloid reports followed by time-slice reports.
    pub fn all_reports(&self) -> Vec<EnergyReport> {
        self.hyperboloid_reports.iter().chain(&self.slice_reports).cloned().collect()
    }
}

#[derive(Default)]
struct LogSink(Vec<LogRecord>);

impl<T: Real> StepHook<T> for LogSink {
    fn on_log(&mut self, rec: &LogRecord) {
        self.0.push(rec.clone());
    }
}

/// Runs `cfg` with the leaf collector and the slice monitor attached, then
/// evaluates every collected leaf.
pub fn simulate<T: Real>(
    cfg: &SolverConfig,
    opts: SimulateOptions,
    extra: &mut [&mut dyn StepHook<T>],
) -> Result<RunArtifacts<T>> {
    cfg.validate()?;
    let grid = RadialGrid::new(lit::<T>(cfg.dr), cfg.jmax);
    let mut leaves: Vec<f64> = cfg.leaves.clone();
    leaves.sort_by(f64::total_cmp);
    leaves.dedup();
    let mut collector = LeafCollector::new(&leaves, grid, cfg.k_max);
    let mut monitor = SliceMonitor::new(cfg.diag_every, cfg.alpha, opts.decay_comp, opts.slice_reports);
    let mut log = LogSink::default();
    let summary = {
        let mut hooks: Vec<&mut dyn StepHook<T>> = vec![&mut collector, &mut monitor, &mut log];
        for h in extra.iter_mut() {
            hooks.push(&mut **h as &mut dyn StepHook<T>);
        }
        run(cfg, &mut hooks)?
    };
    let hopts = HyperboloidOptions { n_vf: cfg.n_vf, quasilinear: cfg.nonlinearity.quasilinear };
    let collected = collector.into_leaves();
    let mut hyperboloid_reports = Vec::new();
    for leaf in &collected {
        if leaf.branch_nodes(crate::geometry::Branch::InteriorBranch).is_ok() {
            hyperboloid_reports.push(hyperboloid_report(leaf, hopts)?);
        }
    }
    Ok(RunArtifacts {
        summary,
        hyperboloid_reports,
        slice_reports: monitor.reports,
        decay: monitor.decay,
        x_bulk: monitor.x_bulk,
        log: log.0,
        leaves: if opts.keep_leaves { collected } else { Vec::new() },
    })
}
