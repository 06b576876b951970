//! Experiment files, the runner that dispatches them, and the acceptance suite.

mod config;
mod run;
mod verify;

pub use config::{
    two_frequency_arc, DensitySection, EquidistSection, ExperimentConfig, GaloisSection, IrreducibilitySection, Kind,
    LoadedConfig, PatternSection, RecurrenceSection, SourceSpec, SurjectivitySection, WalkFile, WalkMode,
};
pub use run::{
    error_exit_code, exit, output_dir, run, write_outputs, Provenance, ProvenanceEntry, RunManifest, RunOptions,
    RunOutcome, RunStatus, Table, TOOL_VERSION,
};
pub use verify::{all_passed, verify_suite, CriterionResult, Level, SEED};
