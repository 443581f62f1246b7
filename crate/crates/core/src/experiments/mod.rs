//! Multi-run experiments, self-generated references and report emission.
//!
//! Run `r` of an experiment simulates with seed `base_seed + r`; path `i`
//! inside that run uses stream `(base_seed + r, i)`. Cases that share a spot
//! (strike sweeps) are priced on the same simulated paths.

pub mod catalog;
mod report;
mod runner;
mod spec;

pub use catalog::{run_group, ReportGroup};
pub use report::{
    emit_report, from_json_str, to_csv_string, to_json_string, ExperimentReport, ReportFormat,
    ReportRow, ScheduleRecord, CSV_HEADER,
};
pub use runner::{
    generate_reference_prices, reference_spec, run_experiment, run_experiment_cached, CaseStats,
    ReferenceCache, ReferenceRun, REFERENCE_SEED_OFFSET,
};
pub use spec::{
    Case, DateMapping, ExerciseSpec, ExperimentSpec, GeneratedReference, ModelSpec, ReferenceSpec,
    RunScale,
};
