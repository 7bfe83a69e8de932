use num_complex::Complex64;

use super::darboux::dual_samples;
use super::{Assembly, DarbouxResult, SpectralSummary};
use crate::connections::SectionField;
use crate::error::{QsError, QsResult};
use crate::quat::{HMatrix2, HVector2, Quaternion};
use crate::surfaces::field::sample_frames;
use crate::surfaces::{diff_x, diff_y, SurfaceModel};

/// Relative Study determinant below which two sections count as dependent.
pub const INDEPENDENCE_TOL: f64 = 1e-10;

/// `|det [φ₁ φ₂]| / (|φ₁|²|φ₂|²)` on the complexification.
pub fn independence_measure(p1: &HVector2, p2: &HVector2) -> f64 {
    let det = HMatrix2::from_columns(*p1, *p2).complexify().determinant().norm();
    det / (p1.norm().powi(2) * p2.norm().powi(2)).max(f64::MIN_POSITIVE)
}

/// The section of the common Darboux transform relative to `f`:
/// `φ = φ₂ − φ₁χ` with `χ = ϱ₁⁻¹α₁⁻¹α₂ϱ₂`.
pub fn common_section(p1: &HVector2, rho1: Complex64, p2: &HVector2, rho2: Complex64) -> HVector2 {
    let r1 = Quaternion::from_complex(rho1);
    let r2 = Quaternion::from_complex(rho2);
    let chi = r1.inv() * p1.a.inv() * p2.a * r2;
    *p2 - p1.rmul(chi)
}

/// Common Darboux transform `f̂ = f + (α₂ − α₁χ)(β₂ − β₁χ)⁻¹` of the
/// `ϱ₁`- and `ϱ₂`-Darboux transforms given by `φ₁` and `φ₂`.
pub fn bianchi_common(
    f: &dyn SurfaceModel,
    dual: &dyn SurfaceModel,
    phi1: &SectionField,
    rho1: Complex64,
    phi2: &SectionField,
    rho2: Complex64,
) -> QsResult<DarbouxResult> {
    let grid = phi1.grid;
    if phi2.grid != grid {
        return Err(QsError::ConfigInvalid("the two sections live on different grids".into()));
    }
    let m = independence_measure(&phi1.values[0], &phi2.values[0]);
    if m < INDEPENDENCE_TOL {
        return Err(QsError::NotIndependent(format!("complexified determinant {m:.3e} below {INDEPENDENCE_TOL:.0e}")));
    }
    let frames = sample_frames(f, &grid);
    let phi: Vec<HVector2> = phi1.values.iter().zip(&phi2.values).map(|(a, b)| common_section(a, rho1, b, rho2)).collect();
    let t: Vec<Quaternion> = phi.iter().map(|v| v.a * v.b.inv()).collect();
    let check = relative_parallel_residual(f, dual, phi1, rho1, phi2, rho2);
    Assembly {
        transform: "bianchi_common",
        spectral: SpectralSummary::rho(rho2),
        grid,
        frames: &frames,
        denominators: phi.iter().map(|v| v.b.norm()).collect(),
        t,
        tangents: None,
        dual_frames: None,
        t_dual: None,
        rho_hat: None,
        cmc: false,
        parallel: phi1.transport_residual.max(phi2.transport_residual).max(check),
    }
    .finish()
}

/// Parallelism of `(α₂ − T₁β₂, β₂ − T₁^d α₂ϱ₂)` for the isothermic family of
/// `f₁ = f + T₁`, whose tangents are `df₁ = T₁ df^d α₁ϱ₁β₁⁻¹` and
/// `df₁^d = T₁^d df β₁α₁⁻¹`; relative, over interior nodes.
pub fn relative_parallel_residual(
    f: &dyn SurfaceModel,
    dual: &dyn SurfaceModel,
    phi1: &SectionField,
    rho1: Complex64,
    phi2: &SectionField,
    rho2: Complex64,
) -> f64 {
    let g = phi1.grid.unwrapped();
    let frames = sample_frames(f, &g);
    let (_, dxs, dys) = dual_samples(dual, &g);
    let r1 = Quaternion::from_complex(rho1);
    let r2 = Quaternion::from_complex(rho2);
    let t1: Vec<Quaternion> = phi1.values.iter().map(|v| v.a * v.b.inv()).collect();
    let t1d: Vec<Quaternion> = phi1.values.iter().map(|v| v.b * r1.inv() * v.a.inv()).collect();
    let sec: Vec<HVector2> = (0..g.len())
        .map(|k| {
            let p = &phi2.values[k];
            HVector2::new(p.a - t1[k] * p.b, p.b - t1d[k] * p.a * r2)
        })
        .collect();
    let sx = diff_x(&g, &sec, 6);
    let sy = diff_y(&g, &sec, 6);
    let mut worst: f64 = 0.0;
    for k in g.interior(3) {
        let p1 = &phi1.values[k];
        let p = &frames[k];
        let v = &sec[k];
        for (d, df, dfd) in [(sx[k], p.fx, dxs[k]), (sy[k], p.fy, dys[k])] {
            let df1 = t1[k] * dfd * p1.a * r1 * p1.b.inv();
            let df1d = t1d[k] * df * p1.b * p1.a.inv();
            let (wa, wb) = (df1 * v.b, df1d * v.a * r2);
            let ra = (d.a + wa).norm() / (d.a.norm() + wa.norm()).max(f64::MIN_POSITIVE);
            let rb = (d.b + wb).norm() / (d.b.norm() + wb.norm()).max(f64::MIN_POSITIVE);
            worst = worst.max(ra).max(rb);
        }
    }
    worst
}
