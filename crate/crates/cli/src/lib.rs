//! Experiment harness around `gslab-core`: reads a JSON experiment spec,
//! expands it into a grid of independent cells, runs them (possibly in
//! parallel), and writes `results.csv`, `manifest.json`, and `plot.svg`.
//!
//! Every CSV carries the manifest hash in a leading comment line, and the
//! manifest hash covers everything except wall-clock timestamps, so a rerun
//! with the same seed reproduces the CSV byte for byte.

pub mod csv;
pub mod manifest;
pub mod plot;
pub mod run;
pub mod spec;
pub mod verify;

pub use manifest::{CellRecord, CellStatus, RunManifest};
pub use run::{run, write_outputs, Overrides, RunOutput};
pub use spec::{ExperimentSpec, Kind, ValidationError};
