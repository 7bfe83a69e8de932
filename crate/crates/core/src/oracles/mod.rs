//! Closed-form parallel sections, multipliers and Darboux transforms used as
//! ground truth.

pub mod cylinder;
pub mod revolution;

pub use cylinder::{cylinder_resonances, CylinderOracle, CylinderSection};
pub use revolution::{revolution_resonances, RevolutionOracle, RotationForm};
