use std::path::{Path, PathBuf};

use kkwave::analysis::{ablation_compare, AblationInput};
use kkwave::pipeline::SimulateOptions;
use kkwave::{simulate, Ablation};

use crate::error::{CliError, CliResult};

pub fn cmd_ablate(configs: &[PathBuf], out: Option<&Path>) -> CliResult<bool> {
    let on = crate::load_config(&configs[0])?;
    let off = match configs.get(1) {
        Some(p) => crate::load_config(p)?,
        None => {
            let mut c = on.clone();
            c.nonlinearity.ablation = Ablation::NullOff;
            c
        }
    };
    let opts = SimulateOptions { slice_reports: false, ..SimulateOptions::default() };
    let run_on = simulate::<f64>(&on, opts, &mut [])?;
    let run_off = simulate::<f64>(&off, opts, &mut [])?;
    let report = ablation_compare(&AblationInput::new(&on, &run_on), &AblationInput::new(&off, &run_off))?;
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    println!("{json}");
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(CliError::io(dir))?;
        let path = dir.join("ablation.json");
        std::fs::write(&path, &json).map_err(CliError::io(&path))?;
    }
    Ok(report.off_worse)
}
