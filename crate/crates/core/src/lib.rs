//! Quaternionic surface theory: flat connection families of CMC and isothermic
//! surfaces, their Darboux transforms, simple factor dressings and associated
//! families, validated against closed-form oracles.

pub mod dmath;
pub mod error;
pub mod expr;
pub mod jet;
pub mod oracles;
pub mod quat;
pub mod connections;
pub mod surfaces;
pub mod transforms;
pub mod io;

pub use error::{QsError, QsResult};
pub use quat::{c64, hmat_inv, qinv, qmul, HMatrix2, HVector2, Quaternion, SpectralPoint};
