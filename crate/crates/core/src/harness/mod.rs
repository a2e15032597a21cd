//! Dataset files, generators, verification and benchmarking used by the CLI.

pub mod bench;
pub mod dataset;
pub mod generate;
pub mod verify;

pub use dataset::{Dataset, Kind, Records};
pub use generate::{generate, DatasetSpec, Distribution};
pub use verify::{verify, Report, VerifyConfig, Violation, ViolationKind};
