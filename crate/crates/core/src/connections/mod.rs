//! Associated families of flat connections, parallel transport, flatness
//! and period monodromy.

pub mod family;
pub mod flatness;
pub mod monodromy;
pub mod transport;

pub use family::{complex_basis, corrupted_isothermic, model, ConnectionFamily, Direction, FamilyKind, LocalForm};
pub use flatness::{fit_order, flatness_check, FlatnessLevel, FlatnessReport, Window};
pub use monodromy::{monodromy, pair_multipliers, Loop, MonodromyResult, RESONANCE_TOL};
pub use transport::{parallel_transport, transport_grid, transport_grid_frame, SectionField, TransportSettings};
pub mod sweep;
pub use sweep::{multiplier_sweep, SweepRow, SweepWindow};
