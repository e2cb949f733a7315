//! Decay fits, inequality checkers, the ray diagnostic and the null ablation.

pub mod ablation;
pub mod families;
pub mod fit;
pub mod inequalities;
pub mod ray;

pub use ablation::{ablation_compare, AblationInput, AblationReport, AblationSide};
pub use fit::{default_window, fit_decay, fit_quantity, DecayFit};
pub use inequalities::{check_hardy, check_klainerman_sobolev, check_weighted_sobolev, InequalityCheck, Lemma};
pub use ray::{ray_diagnostic, RayDiagnostic};

#[cfg(test)]
mod tests;
