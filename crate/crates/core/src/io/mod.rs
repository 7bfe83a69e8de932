//! Run configurations, mesh and report writers, and the command implementations
//! behind the `quatsurf` binary.

pub mod commands;
pub mod config;
pub mod invariants;
pub mod mesh;
pub mod report;

pub use commands::{cmd_darboux, cmd_invariants, cmd_surface, cmd_sweep, run_step, sweep_rows, StepOutput};
pub use config::{RunConfig, Scene, SectionSpec, Step};
pub use invariants::{invariants_report, InvariantsReport};
pub use mesh::{parse_obj, read_obj, MeshOutput, Projection, Provenance, VertexFlag};
pub use report::{sha256_hex, sweep_csv, to_json};
