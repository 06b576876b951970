//! Invariant maps and witness searches for invariant patterns.

mod finder;
mod galois;
mod invariance;
mod labels;
mod psi;
mod quadratic;
mod search;

pub use galois::{cubic_discriminant, galois_label, is_square, GaloisLabelValue};
pub use invariance::{psi_invariance_check, InvarianceReport, Violation};
pub use labels::{companion, galois_translate_check, label_realizers, realized_labels, GaloisTranslateReport};
pub use psi::{char_poly, eval_psi, eval_psi_i64, format_poly, InvariantMap, PsiValue};
pub use quadratic::{lift_f, q3, represent_q3};
pub use search::{
    bohr_surjectivity_check, difference_pattern_check, twisted_pattern_search, DifferenceReport, DifferenceRow,
    SurjectivityReport, TargetRow, Witness, WitnessReport,
};
