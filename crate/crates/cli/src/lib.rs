//! Experiment sweeps over the outage estimators of `fas-core`: declarative
//! specs, presets, execution and result tables.

pub mod presets;
pub mod run;
pub mod spec;
pub mod table;

pub use run::{run_experiment, InvalidSpec, RunOptions};
pub use spec::{validate_spec, ExperimentSpec, Violation};
pub use table::{read_csv, write_csv, write_json, ResultRow};
