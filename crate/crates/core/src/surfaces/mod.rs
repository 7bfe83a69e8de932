//! Sampled and analytic conformal immersions, their Gauss data, duals and
//! parallel CMC surfaces.

pub mod dual;
pub mod field;
pub mod grid;
pub mod model;
pub mod sampled;

pub use dual::{christoffel_dual, parallel_surface, sample_normal_derivatives, wedge_residual, DualReport};
pub use field::{mean_curvature, GaussData, ImmersionField, ResidualStats};
pub use grid::{diff_x, diff_y, DomainGrid};
pub use model::{
    dual_gauge_scale, FramePoint, ModelRef, ParallelModel, Plane, ProfileCurve, Revolution, RevolutionDual, SurfaceModel,
};
pub use sampled::SampledModel;

use std::sync::Arc;

/// Cylinder `½(ix + j e^{−iy})` sampled on `grid`.
pub fn make_cylinder(grid: &DomainGrid) -> ImmersionField {
    ImmersionField::from_model(&Revolution::cylinder(), grid)
}

/// Surface of revolution for a validated profile.
pub fn make_revolution(profile: ProfileCurve, grid: &DomainGrid) -> crate::QsResult<ImmersionField> {
    profile.validate(grid.x_min, grid.x_max, 4 * grid.nx)?;
    Ok(ImmersionField::from_model(&Revolution::new(profile), grid))
}

/// Gauss data of a sampled immersion.
pub fn gauss_map(f: &ImmersionField) -> crate::QsResult<GaussData> {
    f.gauss_map()
}

/// The dual choices a connection can be built with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DualGauge {
    /// `g = f + N` for CMC surfaces.
    ParallelCmc,
    /// `df^d = f_x⁻¹dx − f_y⁻¹dy` in curvature-line coordinates.
    IsothermicFormula,
}

/// Model of the requested dual of a surface of revolution.
pub fn dual_model(surface: &Revolution, gauge: DualGauge) -> ModelRef {
    match gauge {
        DualGauge::ParallelCmc => Arc::new(ParallelModel::new(Arc::new(surface.clone()))),
        DualGauge::IsothermicFormula => Arc::new(surface.formula_dual()),
    }
}
