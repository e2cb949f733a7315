use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("requested {branch} branch of H_s (s = {s}) has no nodes in [0, {r_max}]")]
    EmptyBranch { s: f64, branch: &'static str, r_max: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("y-grid too small: {m} samples cannot resolve |k| <= {k_max} (need >= {need})")]
    Size { m: usize, k_max: usize, need: usize },
    #[error("history holds {have} levels, {need} required")]
    HistoryTooShallow { have: usize, need: usize },
    #[error("time {t} not bracketed by buffered levels [{lo}, {hi}]")]
    HistoryGap { t: f64, lo: f64, hi: f64 },
    #[error("unknown manufactured case `{0}`")]
    UnknownCase(String),
    #[error("vector field {0} is not a Klainerman field")]
    NotKlainerman(String),
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("blow-up at t = {t}: monitored norm {norm} exceeded ceiling")]
    BlowUp { t: f64, norm: f64 },
    #[error("quasilinear sandwich violated: E = {base}, E_quasi = {quasi}, max|u| = {max_u}")]
    SandwichViolated { base: f64, quasi: f64, max_u: f64 },
    #[error("vector-field order {n} exceeds configured maximum {max}")]
    OrderTooHigh { n: usize, max: usize },
    #[error("fit window [{lo}, {hi}] too short or outside sampled range")]
    WindowTooShort { lo: f64, hi: f64 },
    #[error("ray leaves the collected hyperboloids at lambda = {0}")]
    RayLeavesDomain(f64),
    #[error("configs differ in more than the ablation flag: {0}")]
    ConfigMismatch(String),
    #[error("trial field is not compactly supported (|w| = {0:e} at the truncation radius)")]
    NotCompact(f64),
    #[error("config line {line}: {msg}")]
    ConfigParse { line: usize, msg: String },
    #[error("unknown quantity `{given}` (valid: {valid})")]
    UnknownQuantity { given: String, valid: String },
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
