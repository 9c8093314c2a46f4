//! Benchmark harness: generate a testbed, solve it exactly and with relaxed
//! foresight, and report quality and timing.

pub mod manifest;
pub mod report;
pub mod solve;
pub mod svg;

pub use manifest::{cmd_gen, read_manifest, write_instance_file, write_manifest, ManifestRow, Scale, MANIFEST_FILE};
pub use report::{build_report, cmd_report, BenchRecord, MismatchedManifests, Report, Summary};
pub use solve::{cmd_solve, read_results, solve_manifest, write_results, Mode, ResultRow};
