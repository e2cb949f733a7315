use std::io::Write;
use std::path::Path;

use kkwave::analysis::fit::FITS_CSV_HEADER;
use kkwave::analysis::{default_window, fit_quantity};
use kkwave::energies::monitor::DecaySample;

use crate::error::{CliError, CliResult};
use crate::run::{CONFIG_FILE, DECAY_FILE};

pub const FITS_FILE: &str = "fits.csv";

fn parse_decay(text: &str, path: &Path) -> CliResult<Vec<DecaySample>> {
    let bad = |line: usize| CliError::Usage(format!("{}: malformed line {line}", path.display()));
    let mut lines = text.lines().enumerate();
    let header: Vec<&str> = lines.next().map(|(_, h)| h.split(',').collect()).unwrap_or_default();
    if header.first() != Some(&"t") {
        return Err(bad(1));
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        let v: Vec<f64> = line.split(',').map(|x| x.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad(i + 1))?;
        if v.len() != header.len() {
            return Err(bad(i + 1));
        }
        let col = |name: &str| header.iter().position(|h| *h == name).map(|c| v[c]).unwrap_or(f64::NAN);
        out.push(DecaySample {
            t: v[0],
            dw0_weighted: col("dW0_weighted"),
            wt_l2y: col("Wt_L2y"),
            dy_wt_l2y: col("dyWt_L2y"),
            zw0: col("ZW0"),
        });
    }
    Ok(out)
}

pub fn cmd_fit(dir: &Path, quantity: &str, window: Option<(f64, f64)>) -> CliResult<bool> {
    let path = dir.join(DECAY_FILE);
    if !path.is_file() {
        return Err(CliError::MissingArtifacts(path));
    }
    let text = std::fs::read_to_string(&path).map_err(CliError::io(&path))?;
    let samples = parse_decay(&text, &path)?;
    let window = match window {
        Some(w) => w,
        None => {
            let cfg_path = dir.join(CONFIG_FILE);
            let t_end = match std::fs::read_to_string(&cfg_path) {
                Ok(t) => kkwave::SolverConfig::parse(&t)?.t_end,
                Err(_) => samples.last().map(|s| s.t).ok_or(CliError::MissingArtifacts(cfg_path))?,
            };
            default_window(t_end)
        }
    };
    let fit = fit_quantity(&samples, quantity, window)?;
    println!("quantity  {}", fit.quantity);
    println!("window    [{}, {}]", fit.t_lo, fit.t_hi);
    println!("exponent  {}", fit.exponent);
    println!("amplitude {}", fit.amplitude);
    println!("residual  {}", fit.residual);
    if fit.degenerate {
        println!("warning: series is zero on the window");
    }

    let fits = dir.join(FITS_FILE);
    let fresh = !fits.exists();
    let mut f = std::fs::OpenOptions::new().create(true).append(true).open(&fits).map_err(CliError::io(&fits))?;
    if fresh {
        writeln!(f, "{FITS_CSV_HEADER}").map_err(CliError::io(&fits))?;
    }
    writeln!(f, "{}", fit.csv_row()).map_err(CliError::io(&fits))?;
    Ok(true)
}
