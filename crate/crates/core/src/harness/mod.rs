//! Classical experiments: datasets, gradient-descent training, multi-seed
//! sweeps with bad-minimum classification, and the toy loss landscape.

mod dataset;
mod landscape;
mod sweep;
mod train;

pub use dataset::{generate_dataset, toy_dataset, Dataset, DatasetSpec, TargetFunction};
pub use landscape::{toy_landscape, GridSpec, Landscape, LocalMinimum};
pub use sweep::{
    aggregate, run_sweep, write_heatmap_csv, write_sweep_csv, ArchAggregate, NetworkFamily, RunRecord,
    SweepConfig, SweepResult,
};
pub use train::{classify_bad_minimum, toy_init, train_gd, TrainResult};
