//! Per-leaf energy reports and the energy CSV.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{
    conformal_exterior, conformal_interior, energy_exterior, energy_hyperboloid, quasilinear_correction, sum_of_type,
    word_energy_tables, x_norm_increment, BaseFunctional, Leaf, LeafKind, WordOps,
};
use crate::error::Result;
use crate::fields::ModePart;
use crate::geometry::{Branch, MultiIndex};
use crate::scalar::{lit, Real};

pub const COMPONENT_NAMES: [&str; 2] = ["u", "v"];

/// One evaluated functional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyValue {
    pub functional: String,
    pub n: usize,
    pub k: usize,
    pub value: f64,
}

/// Functionals evaluated on one leaf, in a fixed order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub leaf: LeafKind,
    pub values: Vec<EnergyValue>,
    /// Exterior weight exponent, for time slices.
    pub alpha: Option<f64>,
}

impl EnergyReport {
    pub fn new(leaf: LeafKind) -> Self {
        EnergyReport { leaf, values: Vec::new(), alpha: None }
    }

    pub fn push(&mut self, functional: impl Into<String>, n: usize, k: usize, value: f64) {
        self.values.push(EnergyValue { functional: functional.into(), n, k, value });
    }

    pub fn get(&self, functional: &str, n: usize, k: usize) -> Option<f64> {
        self.values.iter().find(|v| v.functional == functional && v.n == n && v.k == k).map(|v| v.value)
    }

    pub fn get0(&self, functional: &str) -> Option<f64> {
        self.get(functional, 0, 0)
    }
}

/// `name[comp.part]`, e.g. `E_in[u.W0]`; `comp` is `u`, `v` or `W` (sum).
pub fn functional_id(name: &str, comp: &str, part: ModePart) -> String {
    format!("{name}[{comp}.{}]", part.tag())
}

const PARTS: [ModePart; 3] = [ModePart::All, ModePart::Zero, ModePart::NonZero];

/// Options for hyperboloid reports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperboloidOptions {
    /// Highest word order (`N_vf`).
    pub n_vf: usize,
    pub quasilinear: bool,
}

/// Everything evaluated on a hyperboloid leaf:
///
/// * `E_in`, `E_in_alt` (second expression) and the `(n, k)` sums per
///   component and mode part, plus their sum over components (`W`);
/// * `E_ex_h` on the collected part of the exterior branch and its cut radius;
/// * `E_c_in` of each zero mode;
/// * `Eq_in` with `max_u` when the quasilinear term is on.
pub fn hyperboloid_report<T: Real>(leaf: &Leaf<T>, opts: HyperboloidOptions) -> Result<EnergyReport> {
    let mut rep = EnergyReport::new(leaf.kind);
    let n_comp = leaf.nodes.first().map_or(0, |n| n.comps.len());
    let tables = word_energy_tables(leaf, Branch::InteriorBranch, opts.n_vf, &PARTS)?;
    for (p, part) in PARTS.into_iter().enumerate() {
        let mut total = vec![vec![0.0; opts.n_vf + 1]; opts.n_vf + 1];
        let mut alt_total = 0.0;
        for c in 0..n_comp {
            let name = COMPONENT_NAMES[c];
            let table: Vec<(MultiIndex, T)> = tables.iter().map(|(w, e)| (w.clone(), e[c][p])).collect();
            let alt = energy_hyperboloid(leaf, Branch::InteriorBranch, c, part, &WordOps::identity())?.1;
            for n in 0..=opts.n_vf {
                for k in 0..=n {
                    let v = sum_of_type(&table, n, k).to_f64_();
                    rep.push(functional_id("E_in", name, part), n, k, v);
                    total[n][k] += v;
                }
            }
            rep.push(functional_id("E_in_alt", name, part), 0, 0, alt.to_f64_());
            alt_total += alt.to_f64_();
        }
        for n in 0..=opts.n_vf {
            for k in 0..=n {
                rep.push(functional_id("E_in", "W", part), n, k, total[n][k]);
            }
        }
        rep.push(functional_id("E_in_alt", "W", part), 0, 0, alt_total);
    }
    for c in 0..n_comp {
        let name = COMPONENT_NAMES[c];
        let ex = energy_hyperboloid(leaf, Branch::ExteriorBranch, c, ModePart::All, &WordOps::identity())?.0;
        rep.push(functional_id("E_ex_h", name, ModePart::All), 0, 0, ex.to_f64_());
        rep.push(functional_id("E_c_in", name, ModePart::Zero), 0, 0, conformal_interior(leaf, c)?.to_f64_());
    }
    rep.push("cut_r", 0, 0, leaf.cut_radius().map_or(f64::INFINITY, |r| r.to_f64_()));
    if opts.quasilinear {
        let mut max_u = 0.0f64;
        for c in 0..n_comp {
            let q = quasilinear_correction(leaf, BaseFunctional::Interior, c, ModePart::All, &WordOps::identity())?;
            rep.push(functional_id("Eq_in", COMPONENT_NAMES[c], ModePart::All), 0, 0, q.quasi.to_f64_());
            max_u = max_u.max(q.max_u.to_f64_());
        }
        rep.push("max_u", 0, 0, max_u);
    }
    Ok(rep)
}

/// Functionals of a time slice: weighted exterior energy (with its outer
/// boundary integrand), X-norm bulk increment over `dt`, exterior conformal
/// energy of the zero modes.
pub fn time_slice_report<T: Real>(leaf: &Leaf<T>, alpha: f64, dt: f64) -> Result<EnergyReport> {
    let mut rep = EnergyReport::new(leaf.kind);
    rep.alpha = Some(alpha);
    let n_comp = leaf.nodes.first().map_or(0, |n| n.comps.len());
    for c in 0..n_comp {
        let name = COMPONENT_NAMES[c];
        let ex = energy_exterior(leaf, c, ModePart::All, lit(alpha))?;
        rep.push(functional_id("E_ex_a", name, ModePart::All), 0, 0, ex.value.to_f64_());
        rep.push(functional_id("E_ex_a_edge", name, ModePart::All), 0, 0, ex.boundary_integrand.to_f64_());
        let dx = x_norm_increment(leaf, c, ModePart::All, lit(alpha), lit(dt))?;
        rep.push(functional_id("X_bulk", name, ModePart::All), 0, 0, dx.to_f64_());
        rep.push(functional_id("E_c_ex", name, ModePart::Zero), 0, 0, conformal_exterior(leaf, c)?.to_f64_());
    }
    Ok(rep)
}

pub const CSV_HEADER: &str = "leaf_kind,leaf,functional,n,k,value";

/// Writes reports in the given order; floats use the shortest round-trip
/// decimal form.
pub fn write_energy_csv<W: Write>(out: &mut W, reports: &[EnergyReport]) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in reports {
        for v in &r.values {
            writeln!(out, "{},{:?},{},{},{},{:?}", r.leaf.name(), r.leaf.param(), v.functional, v.n, v.k, v.value)?;
        }
    }
    Ok(())
}

/// Parses a CSV written by [`write_energy_csv`].
pub fn read_energy_csv(text: &str) -> std::result::Result<Vec<EnergyReport>, String> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err("missing energy CSV header".into());
    }
    let mut out: Vec<EnergyReport> = Vec::new();
    for (i, line) in lines.enumerate() {
        let f: Vec<&str> = line.split(',').collect();
        let bad = || format!("line {}: malformed record", i + 2);
        if f.len() != 6 {
            return Err(bad());
        }
        let param: f64 = f[1].parse().map_err(|_| bad())?;
        let kind = match f[0] {
            "hyperboloid" => LeafKind::Hyperboloid(param),
            "time" => LeafKind::Time(param),
            _ => return Err(bad()),
        };
        let value: f64 = f[5].parse().map_err(|_| bad())?;
        let (n, k) = (f[3].parse().map_err(|_| bad())?, f[4].parse().map_err(|_| bad())?);
        if out.last().map(|r| r.leaf) != Some(kind) {
            out.push(EnergyReport::new(kind));
        }
        out.last_mut().unwrap().push(f[2], n, k, value);
    }
    Ok(out)
}
