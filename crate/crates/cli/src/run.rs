use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use kkwave::energies::monitor::DecaySample;
use kkwave::energies::report::write_energy_csv;
use kkwave::fields::snapshot::Snapshot;
use kkwave::pipeline::SimulateOptions;
use kkwave::solver::{StepHook, Termination};
use kkwave::{simulate, SolverConfig};

use crate::error::{CliError, CliResult};
use crate::manifest::{code_version, file_entries, now, RunManifest, RunTermination};

pub const CONFIG_FILE: &str = "config.txt";
pub const ENERGY_FILE: &str = "energy.csv";
pub const DECAY_FILE: &str = "decay.csv";
pub const LOG_FILE: &str = "log.jsonl";
pub const SUMMARY_FILE: &str = "summary.json";
pub const MANIFEST_FILE: &str = "manifest.json";
const SNAPSHOT_DIR: &str = "snapshots";

struct SnapshotWriter {
    dir: PathBuf,
    names: Vec<String>,
}

impl StepHook<f64> for SnapshotWriter {
    fn on_snapshot(&mut self, snap: &Snapshot<f64>) -> kkwave::Result<()> {
        if self.names.is_empty() {
            fs::create_dir_all(self.dir.join(SNAPSHOT_DIR))?;
        }
        let name = format!("{SNAPSHOT_DIR}/snap_{:05}.bin", self.names.len());
        let mut f = std::io::BufWriter::new(fs::File::create(self.dir.join(&name))?);
        snap.write_to(&mut f)?;
        self.names.push(name);
        Ok(())
    }
}

pub fn decay_csv(samples: &[DecaySample]) -> String {
    let mut s = format!("t,{}\n", DecaySample::QUANTITIES.join(","));
    for d in samples {
        let _ = write!(s, "{:?}", d.t);
        for q in DecaySample::QUANTITIES {
            let _ = write!(s, ",{:?}", d.get(q).unwrap_or(f64::NAN));
        }
        s.push('\n');
    }
    s
}

fn write(dir: &Path, name: &str, bytes: impl AsRef<[u8]>) -> CliResult<String> {
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(CliError::io(&path))?;
    Ok(name.to_string())
}

fn finish(dir: &Path, cfg: &SolverConfig, started: f64, files: &[String], termination: RunTermination) -> CliResult<()> {
    let manifest = RunManifest {
        config: cfg.to_text(),
        code_version: code_version(),
        started,
        finished: now(),
        files: file_entries(dir, files)?,
        termination,
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write(dir, MANIFEST_FILE, json)?;
    Ok(())
}

pub fn cmd_run(config: &Path, out: &Path) -> CliResult<bool> {
    let started = now();
    let cfg = crate::load_config(config)?;
    fs::create_dir_all(out).map_err(CliError::io(out))?;
    let mut files = vec![write(out, CONFIG_FILE, cfg.to_text())?];

    let mut snaps = SnapshotWriter { dir: out.to_path_buf(), names: vec![] };
    let result = simulate::<f64>(&cfg, SimulateOptions::default(), &mut [&mut snaps]);
    files.extend(snaps.names);
    let art = match result {
        Ok(a) => a,
        Err(e) => {
            finish(out, &cfg, started, &files, RunTermination::Error(e.to_string()))?;
            return Err(e.into());
        }
    };

    let mut energy = Vec::new();
    write_energy_csv(&mut energy, &art.all_reports()).map_err(CliError::io(out.join(ENERGY_FILE)))?;
    files.push(write(out, ENERGY_FILE, energy)?);
    files.push(write(out, DECAY_FILE, decay_csv(&art.decay))?);
    let log: String = art.log.iter().map(|r| serde_json::to_string(r).expect("log serializes") + "\n").collect();
    files.push(write(out, LOG_FILE, log)?);
    files.push(write(out, SUMMARY_FILE, serde_json::to_string_pretty(&art.summary).expect("summary serializes"))?);

    let termination = match art.summary.termination {
        Termination::Completed => RunTermination::Completed,
        Termination::BlowUp { t, .. } => RunTermination::BlowUp(t),
    };
    println!("{:?} after {} steps at t = {}", termination, art.summary.steps, art.summary.t_final);
    println!("wrote {} files to {}", files.len() + 1, out.display());
    finish(out, &cfg, started, &files, termination)?;
    Ok(true)
}
