//! Integer matrix groups given by generators: representations, balls, orbits
//! of the dual action on characters, and span-closure certificates.

mod ball;
mod generators;
mod lattice;
mod orbit;
pub mod rep;
mod span;

pub use ball::{ball, Ball, BallElement, Truncation};
pub use generators::{DiagonalForm, GeneratorEntry, GeneratorSystem, GroupFile, Word};
pub use lattice::LatticeMatrix;
pub use orbit::{
    character_stabilizer_index, dual_apply, dual_matrix, orbit_bfs, OrbitOutcome, OrbitTable,
    RationalPoint,
};
pub use rep::{adjoint_matrix, check_form_preserved, symsquare_matrix, RepresentationSpec};
pub use span::{irreducibility_certificate, span_closure, IrreducibilityReport, SpanClosure, Trial};
