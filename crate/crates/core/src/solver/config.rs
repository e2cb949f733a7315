//! Run configuration and its flat `key = value` text format.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::manufactured::ManufacturedCase;
use crate::geometry::T0;

/// Null-form source treatment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ablation {
    NullOn,
    /// Each `Q0(φ, ψ)` replaced by `∂_tφ ∂_tψ`.
    NullOff,
}

impl Ablation {
    pub fn name(self) -> &'static str {
        match self {
            Ablation::NullOn => "null_on",
            Ablation::NullOff => "null_off",
        }
    }
}

/// Which quadratic sources act in which equation.
///
/// Under radial symmetry in `x` only `Q0` maps radial pairs to radial
/// functions, so the selection matrix is `q0[eq][a][b]`: the coefficient of
/// `Q0(w_a, w_b)` in `N_{eq+1}`, with `w_0 = u`, `w_1 = v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Nonlinearity {
    pub q0: [[[f64; 2]; 2]; 2],
    pub quasilinear: bool,
    pub ablation: Ablation,
}

impl Default for Nonlinearity {
    /// `N_1 = Q0(u,u) + Q0(v,v)`, `N_2 = Q0(u,v)`, quasilinear term on.
    fn default() -> Self {
        Nonlinearity {
            q0: [[[1.0, 0.0], [0.0, 1.0]], [[0.0, 1.0], [0.0, 0.0]]],
            quasilinear: true,
            ablation: Ablation::NullOn,
        }
    }
}

impl Nonlinearity {
    pub fn linear() -> Self {
        Nonlinearity { q0: [[[0.0; 2]; 2]; 2], quasilinear: false, ablation: Ablation::NullOn }
    }

    pub fn has_sources(&self) -> bool {
        self.q0.iter().flatten().flatten().any(|c| *c != 0.0)
    }

    pub fn is_linear(&self) -> bool {
        !self.quasilinear && !self.has_sources()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Mode cutoff `K`.
    pub k_max: usize,
    /// Radial nodes are `j = 0..=jmax`.
    pub jmax: usize,
    pub dr: f64,
    pub dt: f64,
    pub t_end: f64,
    pub epsilon: f64,
    /// Gaussian width `w` of the data profile `exp(-r²/w²)`.
    pub width: f64,
    pub alpha: f64,
    /// `a_k`, `k = 0..`, for `u(2)`, `v(2)`; `b_k` for `∂_t u(2)`, `∂_t v(2)`.
    pub data_u: Vec<f64>,
    pub data_v: Vec<f64>,
    pub data_du: Vec<f64>,
    pub data_dv: Vec<f64>,
    pub nonlinearity: Nonlinearity,
    /// Stop with `BlowUp` once the flat energy exceeds this multiple of its initial value.
    pub blowup_factor: f64,
    /// Steps between snapshots (0: none).
    pub snapshot_every: usize,
    /// Steps between time-slice diagnostics and log records.
    pub diag_every: usize,
    /// Hyperboloid parameters `s` of the collected leaves.
    pub leaves: Vec<f64>,
    /// Largest vector-field order of the higher-order energies.
    pub n_vf: usize,
    /// Replace the data by a closed-form case and inject its forcing.
    pub case: Option<ManufacturedCase>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            k_max: 2,
            jmax: 400,
            dr: 0.05,
            dt: 0.025,
            t_end: 12.0,
            epsilon: 1e-3,
            width: 0.5,
            alpha: 0.5,
            data_u: vec![1.0, 0.5],
            data_v: vec![1.0, 0.5],
            data_du: vec![],
            data_dv: vec![],
            nonlinearity: Nonlinearity::default(),
            blowup_factor: 1e3,
            snapshot_every: 0,
            diag_every: 4,
            leaves: vec![2.0, 2.5, 3.0, 3.5, 4.0],
            n_vf: 2,
            case: None,
        }
    }
}

/// Radius beyond which Gaussian data of width `w` is below round-off.
pub fn data_radius(width: f64) -> f64 {
    6.0 * width
}

impl SolverConfig {
    pub fn r_max(&self) -> f64 {
        self.jmax as f64 * self.dr
    }

    pub fn cfl(&self) -> f64 {
        self.dt / self.dr
    }

    pub fn n_steps(&self) -> usize {
        ((self.t_end - T0) / self.dt - 1e-9).ceil().max(0.0) as usize
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Domain(m));
        if self.k_max < 1 {
            return bad("K must be at least 1".into());
        }
        if self.jmax < 8 {
            return bad(format!("J = {} too small (need >= 8)", self.jmax));
        }
        if !(self.dr > 0.0 && self.dt > 0.0) {
            return bad("dr and dt must be positive".into());
        }
        if self.cfl() > 0.5 + 1e-12 {
            return bad(format!("dt/dr = {} exceeds 0.5", self.cfl()));
        }
        if self.t_end < T0 {
            return bad(format!("t_end = {} before t0 = {T0}", self.t_end));
        }
        if self.case.is_none() {
            let need = self.t_end - T0 + data_radius(self.width);
            if self.r_max() < need {
                return bad(format!("J*dr = {} < t_end - 2 + R0 = {need}: outer boundary inside the domain of dependence", self.r_max()));
            }
        }
        for (name, d) in [("data_u", &self.data_u), ("data_v", &self.data_v), ("data_du", &self.data_du), ("data_dv", &self.data_dv)] {
            if d.len() > self.k_max + 1 {
                return bad(format!("{name} lists {} coefficients but K = {}", d.len(), self.k_max));
            }
        }
        if self.n_vf > crate::energies::MAX_ORDER {
            return Err(Error::OrderTooHigh { n: self.n_vf, max: crate::energies::MAX_ORDER });
        }
        if self.leaves.iter().any(|s| *s < T0) {
            return bad("hyperboloid leaves need s >= 2".into());
        }
        if !(self.blowup_factor > 1.0) {
            return bad("blowup_factor must exceed 1".into());
        }
        Ok(())
    }

    /// Parses the flat text format; unknown keys and malformed lines are
    /// reported with their 1-based line number.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = SolverConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::ConfigParse { line: i + 1, msg: format!("expected `key = value`, got `{line}`") })?;
            cfg.set(&key.trim().to_ascii_lowercase(), value.trim()).map_err(|msg| Error::ConfigParse { line: i + 1, msg })?;
        }
        Ok(cfg)
    }

    /// Applies `KKWAVE_<KEY>` overrides (key upper-cased).
    pub fn apply_env<I: IntoIterator<Item = (String, String)>>(&mut self, vars: I) -> Result<()> {
        for (name, value) in vars {
            let Some(key) = name.strip_prefix("KKWAVE_") else { continue };
            let key = key.to_ascii_lowercase();
            if !KEYS.contains(&key.as_str()) {
                continue;
            }
            self.set(&key, value.trim()).map_err(|msg| Error::ConfigParse { line: 0, msg: format!("{name}: {msg}") })?;
        }
        Ok(())
    }

    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        fn num<T: std::str::FromStr>(v: &str) -> std::result::Result<T, String> {
            v.parse::<T>().map_err(|_| format!("cannot parse `{v}` as a number"))
        }
        fn list(v: &str) -> std::result::Result<Vec<f64>, String> {
            if v.is_empty() {
                return Ok(vec![]);
            }
            v.split(',').map(|x| num::<f64>(x.trim())).collect()
        }
        fn flag(v: &str) -> std::result::Result<bool, String> {
            match v {
                "true" | "on" | "1" => Ok(true),
                "false" | "off" | "0" => Ok(false),
                _ => Err(format!("expected true/false, got `{v}`")),
            }
        }
        match key {
            "k" | "k_max" => self.k_max = num(value)?,
            "j" | "jmax" => self.jmax = num(value)?,
            "dr" => self.dr = num(value)?,
            "dt" => self.dt = num(value)?,
            "t_end" => self.t_end = num(value)?,
            "epsilon" => self.epsilon = num(value)?,
            "width" => self.width = num(value)?,
            "alpha" => self.alpha = num(value)?,
            "data_u" => self.data_u = list(value)?,
            "data_v" => self.data_v = list(value)?,
            "data_du" => self.data_du = list(value)?,
            "data_dv" => self.data_dv = list(value)?,
            "n1" | "n2" => {
                let c = list(value)?;
                if c.len() != 4 {
                    return Err(format!("{key} needs 4 coefficients (uu, uv, vu, vv), got {}", c.len()));
                }
                let eq = if key == "n1" { 0 } else { 1 };
                self.nonlinearity.q0[eq] = [[c[0], c[1]], [c[2], c[3]]];
            }
            "quasilinear" => self.nonlinearity.quasilinear = flag(value)?,
            "ablation" => {
                self.nonlinearity.ablation = match value {
                    "null_on" => Ablation::NullOn,
                    "null_off" => Ablation::NullOff,
                    _ => return Err(format!("ablation must be null_on or null_off, got `{value}`")),
                }
            }
            "blowup_factor" => self.blowup_factor = num(value)?,
            "snapshot_every" => self.snapshot_every = num(value)?,
            "diag_every" => self.diag_every = num::<usize>(value)?.max(1),
            "leaves" => self.leaves = list(value)?,
            "n_vf" => self.n_vf = num(value)?,
            "case" => {
                self.case = if value == "none" { None } else { Some(value.parse().map_err(|e: Error| e.to_string())?) }
            }
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    /// Serializes to the text format; `parse(to_text())` reproduces `self`.
    pub fn to_text(&self) -> String {
        let l = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ");
        let q = &self.nonlinearity.q0;
        let mut s = String::new();
        let _ = writeln!(s, "k_max = {}", self.k_max);
        let _ = writeln!(s, "jmax = {}", self.jmax);
        let _ = writeln!(s, "dr = {:?}", self.dr);
        let _ = writeln!(s, "dt = {:?}", self.dt);
        let _ = writeln!(s, "t_end = {:?}", self.t_end);
        let _ = writeln!(s, "epsilon = {:?}", self.epsilon);
        let _ = writeln!(s, "width = {:?}", self.width);
        let _ = writeln!(s, "alpha = {:?}", self.alpha);
        let _ = writeln!(s, "data_u = {}", l(&self.data_u));
        let _ = writeln!(s, "data_v = {}", l(&self.data_v));
        let _ = writeln!(s, "data_du = {}", l(&self.data_du));
        let _ = writeln!(s, "data_dv = {}", l(&self.data_dv));
        for (eq, name) in ["n1", "n2"].iter().enumerate() {
            let _ = writeln!(s, "{name} = {}", l(&[q[eq][0][0], q[eq][0][1], q[eq][1][0], q[eq][1][1]]));
        }
        let _ = writeln!(s, "quasilinear = {}", self.nonlinearity.quasilinear);
        let _ = writeln!(s, "ablation = {}", self.nonlinearity.ablation.name());
        let _ = writeln!(s, "blowup_factor = {:?}", self.blowup_factor);
        let _ = writeln!(s, "snapshot_every = {}", self.snapshot_every);
        let _ = writeln!(s, "diag_every = {}", self.diag_every);
        let _ = writeln!(s, "leaves = {}", l(&self.leaves));
        let _ = writeln!(s, "n_vf = {}", self.n_vf);
        let _ = writeln!(s, "case = {}", self.case.map(|c| c.to_string()).unwrap_or_else(|| "none".into()));
        s
    }

    /// Evenly spaced leaves `s = 2, 2 + ds, ..., s_end`.
    pub fn leaves_to(s_end: f64, ds: f64) -> Vec<f64> {
        let n = ((s_end - T0) / ds + 1e-9).floor() as usize;
        (0..=n).map(|i| T0 + ds * i as f64).collect()
    }

    /// Time the leaf `H_s` needs to be collected up to radius `r`.
    pub fn t_end_for_leaf(s: f64, r: f64) -> f64 {
        s.hypot(r)
    }
}

const KEYS: &[&str] = &[
    "k", "k_max", "j", "jmax", "dr", "dt", "t_end", "epsilon", "width", "alpha", "data_u", "data_v", "data_du",
    "data_dv", "n1", "n2", "quasilinear", "ablation", "blowup_factor", "snapshot_every", "diag_every", "leaves",
    "n_vf", "case",
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_roundtrip() {
        let mut c = SolverConfig::default();
        c.case = Some(ManufacturedCase::KgMode(2));
        c.nonlinearity.ablation = Ablation::NullOff;
        c.leaves = vec![2.0, 3.25];
        c.data_du = vec![0.1];
        assert_eq!(SolverConfig::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn comments_and_errors() {
        let c = SolverConfig::parse("# header\nK = 3  # modes\n\ndt = 0.01\n").unwrap();
        assert_eq!(c.k_max, 3);
        assert_eq!(c.dt, 0.01);
        match SolverConfig::parse("K = 3\nthis line is bad\n") {
            Err(Error::ConfigParse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(SolverConfig::parse("bogus = 1"), Err(Error::ConfigParse { line: 1, .. })));
        assert!(matches!(SolverConfig::parse("n1 = 1, 2"), Err(Error::ConfigParse { .. })));
        assert!(matches!(SolverConfig::parse("case = zz"), Err(Error::ConfigParse { .. })));
    }

    #[test]
    fn env_overrides() {
        let mut c = SolverConfig::default();
        c.apply_env(vec![
            ("KKWAVE_EPSILON".to_string(), "0.02".to_string()),
            ("KKWAVE_ABLATION".to_string(), "null_off".to_string()),
            ("PATH".to_string(), "/bin".to_string()),
        ])
        .unwrap();
        assert_eq!(c.epsilon, 0.02);
        assert_eq!(c.nonlinearity.ablation, Ablation::NullOff);
        assert!(c.apply_env(vec![("KKWAVE_DT".to_string(), "x".to_string())]).is_err());
    }

    #[test]
    fn validation() {
        assert!(SolverConfig::default().validate().is_ok());
        let c = SolverConfig { dt: 0.04, ..Default::default() };
        assert!(c.validate().is_err());
        let c = SolverConfig { t_end: 40.0, ..Default::default() };
        assert!(c.validate().is_err(), "outer boundary inside the domain of dependence");
        let c = SolverConfig { n_vf: 5, ..Default::default() };
        assert!(matches!(c.validate(), Err(Error::OrderTooHigh { .. })));
    }

    #[test]
    fn leaf_spacing() {
        assert_eq!(SolverConfig::leaves_to(4.0, 0.5), vec![2.0, 2.5, 3.0, 3.5, 4.0]);
    }
}
