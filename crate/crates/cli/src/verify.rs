use std::path::Path;

use kkwave::analysis::families::{frozen_checks, hardy_on_tail};
use kkwave::nullforms::{identity_suite, CommutatorTable, NullFormId, SpacetimeField};
use kkwave::solver::convergence::{bump_reference, error_ratios, refinement_study};
use kkwave::Error;
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::Suite;

/// Largest accepted residual of an algebraic identity.
pub const IDENTITY_TOL: f64 = 1e-12;
/// Accepted band for the error ratio under halving of `(dr, dt)`.
pub const RATIO_BAND: (f64, f64) = (3.5, 4.5);
const REFINEMENT_LEVELS: usize = 3;
/// `Z:Q` pair whose commutator correction is sign-flipped before the
/// algebra suite runs. Used to check that the suite can fail.
const MUTATE_VAR: &str = "KKWAVE_MUTATE_COMMUTATOR";

#[derive(Debug, Serialize)]
pub struct VerifyLine {
    pub suite: &'static str,
    pub check: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub c_star: Option<f64>,
    pub pass: bool,
}

fn commutator_table() -> CliResult<CommutatorTable> {
    let table = CommutatorTable::standard();
    let Ok(pair) = std::env::var(MUTATE_VAR) else { return Ok(table) };
    let bad = || CliError::Usage(format!("{MUTATE_VAR} expects Z:Q, got `{pair}`"));
    let (z, q) = pair.split_once(':').ok_or_else(bad)?;
    let z: SpacetimeField = z.parse().map_err(|_| bad())?;
    let q: NullFormId = q.parse().map_err(|_| bad())?;
    Ok(table.with_sign_flip(z, q))
}

fn algebra() -> CliResult<Vec<VerifyLine>> {
    let table = commutator_table()?;
    Ok(identity_suite(&table)
        .into_iter()
        .map(|r| VerifyLine {
            suite: "algebra",
            check: format!("{} {}", r.z, r.q),
            lhs: r.residual,
            rhs: IDENTITY_TOL,
            ratio: r.residual / IDENTITY_TOL,
            c_star: None,
            pass: r.residual < IDENTITY_TOL,
        })
        .collect())
}

fn inequalities() -> CliResult<Vec<VerifyLine>> {
    let mut out: Vec<VerifyLine> = frozen_checks()?
        .into_iter()
        .map(|c| VerifyLine {
            suite: "inequalities",
            check: format!("{} {}", c.lemma.id(), c.field),
            lhs: c.lhs,
            rhs: c.rhs,
            ratio: c.ratio,
            c_star: Some(c.c_star),
            pass: c.pass,
        })
        .collect();
    let (pass, lhs) = match hardy_on_tail() {
        Err(Error::NotCompact(w)) => (true, w),
        Err(e) => return Err(e.into()),
        Ok(c) => (false, c.lhs),
    };
    out.push(VerifyLine {
        suite: "inequalities",
        check: "hardy rejects non-compact tail".into(),
        lhs,
        rhs: 0.0,
        ratio: f64::NAN,
        c_star: None,
        pass,
    });
    Ok(out)
}

fn convergence() -> CliResult<Vec<VerifyLine>> {
    let levels = refinement_study::<f64>(&bump_reference(), REFINEMENT_LEVELS)?;
    Ok(levels
        .windows(2)
        .zip(error_ratios(&levels))
        .map(|(w, ratio)| {
            println!("observed order {:.3} (dr {} -> {})", ratio.log2(), w[0].dr, w[1].dr);
            VerifyLine {
                suite: "convergence",
                check: format!("refinement dr {} -> {}", w[0].dr, w[1].dr),
                lhs: w[0].error,
                rhs: w[1].error,
                ratio,
                c_star: None,
                pass: (RATIO_BAND.0..=RATIO_BAND.1).contains(&ratio),
            }
        })
        .collect())
}

pub fn cmd_verify(suite: Suite, out: Option<&Path>) -> CliResult<bool> {
    let mut lines = Vec::new();
    if matches!(suite, Suite::Algebra | Suite::All) {
        lines.extend(algebra()?);
    }
    if matches!(suite, Suite::Inequalities | Suite::All) {
        lines.extend(inequalities()?);
    }
    if matches!(suite, Suite::Convergence | Suite::All) {
        lines.extend(convergence()?);
    }
    let jsonl: String = lines.iter().map(|l| serde_json::to_string(l).expect("line serializes") + "\n").collect();
    print!("{jsonl}");
    let failed = lines.iter().filter(|l| !l.pass).count();
    println!("{} checks, {} failed", lines.len(), failed);
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(CliError::io(dir))?;
        let path = dir.join("verify.jsonl");
        std::fs::write(&path, jsonl).map_err(CliError::io(&path))?;
    }
    Ok(failed == 0)
}
