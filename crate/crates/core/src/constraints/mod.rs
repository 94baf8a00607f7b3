//! Constraint residues `Psi^E_{g,n;k_1..k_m}` and the named checks built on
//! them.

mod checks;
mod displays;
mod psi;
mod report;

pub use checks::{cache_path, check_ids, run_check, CheckParams};
pub use displays::{ehx_tilde, genus0_family, higher_genus_display, higher_genus_factor};
pub use psi::{extract_profile, genus1_split_prediction, psi_full, psi_operator, psi_part, psi_series, Part, PsiRequest};
pub use report::{Failure, Report, Status};

use crate::correlators::CorrError;
use crate::diffop::OpError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConstraintError {
    #[error(transparent)]
    Corr(#[from] CorrError),
    #[error(transparent)]
    Op(#[from] OpError),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("unknown check `{0}`")]
    UnknownCheck(String),
}
