use num_complex::Complex64;
use rayon::prelude::*;

use super::{Assembly, DarbouxResult, SpectralSummary};
use crate::connections::SectionField;
use crate::error::{QsError, QsResult};
use crate::quat::{HVector2, Quaternion, SpectralPoint};
use crate::surfaces::field::sample_frames;
use crate::surfaces::{DomainGrid, FramePoint, ImmersionField, ModelRef, ParallelModel, SurfaceModel};

/// `(f^d, f^d_x, f^d_y)` sampled on the grid.
pub(crate) fn dual_samples(dual: &dyn SurfaceModel, grid: &DomainGrid) -> (Vec<Quaternion>, Vec<Quaternion>, Vec<Quaternion>) {
    let frames = sample_frames(dual, grid);
    (frames.iter().map(|p| p.f).collect(), frames.iter().map(|p| p.fx).collect(), frames.iter().map(|p| p.fy).collect())
}

/// `β = ½(Nα(a−1) + αb)` for a section `α` of the harmonic family at `(a, b)`.
pub fn harmonic_partner(n: Quaternion, alpha: Quaternion, sp: &SpectralPoint) -> Quaternion {
    ((n * alpha).mul_c(sp.a - 1.0) + alpha.mul_c(sp.b)) * 0.5
}

/// Blow-up bound for the Riccati solution relative to its initial size.
const BLOWUP_FACTOR: f64 = 1e12;

fn riccati_rhs(f: &dyn SurfaceModel, dual: &dyn SurfaceModel, p: (f64, f64), v: (f64, f64), r: f64, t: Quaternion) -> Quaternion {
    let fp = f.frame(p.0, p.1);
    let (dx, dy) = dual.tangents(p.0, p.1);
    let dfd = dx * v.0 + dy * v.1;
    -fp.df(v.0, v.1) + t * dfd * t * r
}

fn riccati_path(
    f: &dyn SurfaceModel,
    dual: &dyn SurfaceModel,
    path: &[(f64, f64)],
    r: f64,
    t0: Quaternion,
    substeps: usize,
    bound: f64,
) -> QsResult<Vec<Quaternion>> {
    let mut out = Vec::with_capacity(path.len());
    let mut t = t0;
    out.push(t);
    for w in path.windows(2) {
        let (p0, p1) = (w[0], w[1]);
        let v = ((p1.0 - p0.0) / substeps as f64, (p1.1 - p0.1) / substeps as f64);
        for s in 0..substeps {
            let at = |h: f64| (p0.0 + (s as f64 + h) * v.0, p0.1 + (s as f64 + h) * v.1);
            let k1 = riccati_rhs(f, dual, at(0.0), v, r, t);
            let k2 = riccati_rhs(f, dual, at(0.5), v, r, t + k1 * 0.5);
            let k3 = riccati_rhs(f, dual, at(0.5), v, r, t + k2 * 0.5);
            let k4 = riccati_rhs(f, dual, at(1.0), v, r, t + k3);
            t += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (1.0 / 6.0);
            if !t.is_finite() || t.norm() > bound {
                return Err(QsError::Blowup(format!("Riccati solution exceeds {bound:.1e} near ({:.4}, {:.4})", p1.0, p1.1)));
            }
        }
        out.push(t);
    }
    Ok(out)
}

/// Classical Darboux transform for real `r` by integrating
/// `dT = −df + T df^d r T` from `T(p₀) = t0` over the grid
/// (bottom row first, then every column).
pub fn classical_darboux_riccati(
    f: &dyn SurfaceModel,
    dual: &dyn SurfaceModel,
    grid: &DomainGrid,
    r: f64,
    t0: Quaternion,
    substeps: usize,
) -> QsResult<DarbouxResult> {
    if !(t0.norm() > 0.0) || !t0.is_finite() {
        return Err(QsError::ConfigInvalid("the initial value T₀ must be finite and non-zero".into()));
    }
    if r == 0.0 || !r.is_finite() {
        return Err(QsError::DegenerateSpectral(format!("r = {r}: the classical transform needs finite r ≠ 0")));
    }
    let substeps = substeps.max(1);
    let bound = BLOWUP_FACTOR * (1.0 + t0.norm());
    let row: Vec<(f64, f64)> = (0..grid.nx).map(|i| (grid.x(i), grid.y(0))).collect();
    let base = riccati_path(f, dual, &row, r, t0, substeps, bound)?;
    let columns: Vec<Vec<Quaternion>> = (0..grid.nx)
        .into_par_iter()
        .map(|i| {
            let col: Vec<(f64, f64)> = (0..grid.ny).map(|j| (grid.x(i), grid.y(j))).collect();
            riccati_path(f, dual, &col, r, base[i], substeps, bound)
        })
        .collect::<QsResult<_>>()?;
    let t: Vec<Quaternion> = columns.into_iter().flatten().collect();
    let frames = sample_frames(f, grid);
    let (dv, dxs, dys) = dual_samples(dual, grid);
    let rq = Quaternion::real(r);
    let fx = (0..t.len()).map(|k| t[k] * dxs[k] * t[k] * r).collect();
    let fy = (0..t.len()).map(|k| t[k] * dys[k] * t[k] * r).collect();
    let t_dual = t.iter().map(|q| q.inv() * (1.0 / r)).collect();
    Assembly {
        transform: "classical_darboux",
        spectral: SpectralSummary::rho(Complex64::new(r, 0.0)),
        grid: *grid,
        frames: &frames,
        denominators: t.iter().map(|q| 1.0 / q.norm()).collect(),
        t,
        tangents: Some((fx, fy)),
        dual_frames: Some((dv, dxs, dys)),
        t_dual: Some(t_dual),
        rho_hat: Some(vec![rq; grid.len()]),
        cmc: true,
        parallel: 0.0,
    }
    .finish()
}

/// `ϱ`-Darboux transform `f̂ = f + αβ⁻¹` of a `d_ϱ`-parallel section `φ = (α, β)`,
/// with dual `f̂^d = f^d + βϱ⁻¹α⁻¹`.
pub fn rho_darboux(f: &dyn SurfaceModel, dual: &dyn SurfaceModel, phi: &SectionField, rho: Complex64) -> QsResult<DarbouxResult> {
    let grid = phi.grid;
    let frames = sample_frames(f, &grid);
    let ds = dual_samples(dual, &grid);
    rho_core(&frames, ds, &grid, &phi.values, rho, phi.transport_residual, "rho_darboux", SpectralSummary::rho(rho))
}

#[allow(clippy::too_many_arguments)]
fn rho_core(
    frames: &[FramePoint],
    ds: (Vec<Quaternion>, Vec<Quaternion>, Vec<Quaternion>),
    grid: &DomainGrid,
    phi: &[HVector2],
    rho: Complex64,
    parallel: f64,
    name: &str,
    spectral: SpectralSummary,
) -> QsResult<DarbouxResult> {
    if rho.norm() == 0.0 {
        return Err(QsError::DegenerateSpectral("ϱ = 0".into()));
    }
    let rq = Quaternion::from_complex(rho);
    let rinv = rq.inv();
    let n = grid.len();
    let t: Vec<Quaternion> = phi.iter().map(|v| v.a * v.b.inv()).collect();
    let rho_hat: Vec<Quaternion> = phi.iter().map(|v| v.a * rq * v.a.inv()).collect();
    let t_dual: Vec<Quaternion> = phi.iter().map(|v| v.b * rinv * v.a.inv()).collect();
    let fx = (0..n).map(|k| t[k] * ds.1[k] * rho_hat[k] * t[k]).collect();
    let fy = (0..n).map(|k| t[k] * ds.2[k] * rho_hat[k] * t[k]).collect();
    Assembly {
        transform: name,
        spectral,
        grid: *grid,
        frames,
        denominators: phi.iter().map(|v| v.b.norm().min(v.a.norm())).collect(),
        t,
        tangents: Some((fx, fy)),
        dual_frames: Some(ds),
        t_dual: Some(t_dual),
        rho_hat: Some(rho_hat),
        cmc: true,
        parallel,
    }
    .finish()
}

/// `(α, β)` with `β = ½(Nα(a−1) + αb)` from the `α` component of a harmonic-family section.
pub fn harmonic_pairs(frames: &[FramePoint], alpha: &SectionField, sp: &SpectralPoint) -> Vec<HVector2> {
    frames.iter().zip(&alpha.values).map(|(p, v)| HVector2::new(v.a, harmonic_partner(p.n, v.a, sp))).collect()
}

/// `μ`-Darboux transform of a CMC surface: `f̂ = f + αβ⁻¹` with
/// `β = ½(Nα(a−1) + αb)`; the dual is the parallel surface `g = f + N`.
pub fn mu_darboux(f: &ModelRef, alpha: &SectionField, sp: SpectralPoint) -> QsResult<DarbouxResult> {
    let grid = alpha.grid;
    let frames = sample_frames(f.as_ref(), &grid);
    let g = ParallelModel::new(f.clone());
    let phi = harmonic_pairs(&frames, alpha, &sp);
    let ds = dual_samples(&g, &grid);
    rho_core(&frames, ds, &grid, &phi, sp.rho, alpha.transport_residual, "mu_darboux", SpectralSummary::rho_mu(sp.rho, sp.mu))
}

/// `g^μ = g + βϱ⁻¹α⁻¹`, the parallel CMC surface of the `μ`-Darboux transform.
pub fn g_mu_darboux(f: &ModelRef, alpha: &SectionField, sp: SpectralPoint) -> QsResult<ImmersionField> {
    let res = mu_darboux(f, alpha, sp)?;
    res.dual.ok_or_else(|| QsError::Singular("no dual surface was produced".into()))
}

/// Darboux transform of a CMC surface into a surface with harmonic right normal:
/// `f̂ = f + νβ⁻¹` with `ν = α + n` for a constant quaternion `n`.
pub fn cw_darboux(f: &ModelRef, alpha: &SectionField, sp: SpectralPoint, n: Quaternion) -> QsResult<DarbouxResult> {
    let grid = alpha.grid;
    let frames = sample_frames(f.as_ref(), &grid);
    let g = ParallelModel::new(f.clone());
    let phi = harmonic_pairs(&frames, alpha, &sp);
    let (_, gx, gy) = dual_samples(&g, &grid);
    let rq = Quaternion::from_complex(sp.rho);
    let len = grid.len();
    let nu: Vec<Quaternion> = phi.iter().map(|v| v.a + n).collect();
    let t: Vec<Quaternion> = (0..len).map(|k| nu[k] * phi[k].b.inv()).collect();
    let tangent = |d: &[Quaternion], k: usize| t[k] * d[k] * phi[k].a * rq * phi[k].b.inv();
    let fx = (0..len).map(|k| tangent(&gx, k)).collect();
    let fy = (0..len).map(|k| tangent(&gy, k)).collect();
    Assembly {
        transform: "cw_darboux",
        spectral: SpectralSummary::rho_mu(sp.rho, sp.mu),
        grid,
        frames: &frames,
        denominators: phi.iter().map(|v| v.b.norm()).collect(),
        t,
        tangents: Some((fx, fy)),
        dual_frames: None,
        t_dual: None,
        rho_hat: None,
        cmc: false,
        parallel: alpha.transport_residual,
    }
    .finish()
}

/// `R̂ = −T_g N T_g⁻¹` with `T_g = βϱ⁻¹α⁻¹`: the expected right normal of a
/// [`cw_darboux`] transform, which equals the Gauss map of the `μ`-Darboux transform.
pub fn cw_expected_right_normal(f: &dyn SurfaceModel, alpha: &SectionField, sp: &SpectralPoint) -> Vec<Quaternion> {
    let frames = sample_frames(f, &alpha.grid);
    let rinv = Quaternion::from_complex(sp.rho).inv();
    frames
        .iter()
        .zip(&alpha.values)
        .map(|(p, v)| {
            let tg = harmonic_partner(p.n, v.a, sp) * rinv * v.a.inv();
            -(tg * p.n * tg.inv())
        })
        .collect()
}
