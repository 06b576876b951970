//! Kronecker systems, Bohr sets and their densities.

mod density;
mod file;
mod kronecker;
mod set;
mod source;
mod spectrum;

pub use density::{banach_density_estimate, DensityReport};
pub use file::{ArcEntry, BohrFile};
pub use kronecker::KroneckerSystem;
pub use set::{difference_inclusion_witness, product_bohr, Arc, BohrSetSpec, Enumeration, Membership, Window};
pub use source::SetSource;
pub use spectrum::{rational_spectrum_check, SpectrumVerdict};
