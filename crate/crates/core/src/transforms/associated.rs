use rayon::prelude::*;
use serde::Serialize;

use super::bianchi::{independence_measure, INDEPENDENCE_TOL};
use super::darboux::harmonic_partner;
use crate::connections::flatness::fit_order;
use crate::connections::{transport_grid, ConnectionFamily, SectionField, TransportSettings};
use crate::error::{QsError, QsResult};
use crate::quat::{HVector2, Quaternion, SpectralPoint};
use crate::surfaces::field::sample_frames;
use crate::surfaces::{DomainGrid, ImmersionField, ModelRef, SurfaceModel};

/// First-order convergence is accepted down to this fitted order: an exactly
/// first-order error with a small quadratic correction fits slightly below 1.
pub const MIN_LIMIT_ORDER: f64 = 0.95;

/// Relative disagreement between the two Richardson levels above which the
/// spectral derivative is rejected.
pub const SMOOTHNESS_TOL: f64 = 1e-6;

/// A surface into a round 3-sphere centred at the origin.
#[derive(Clone, Debug)]
pub struct CalapsoResult {
    pub surface: ImmersionField,
    /// `|f^Φ|` per node.
    pub radius: Vec<f64>,
}

impl CalapsoResult {
    fn new(surface: ImmersionField) -> Self {
        let radius = surface.values.iter().map(|q| q.norm()).collect();
        CalapsoResult { surface, radius }
    }

    /// `(max − min)/mean` of the radius.
    pub fn radius_spread(&self) -> f64 {
        let lo = self.radius.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = self.radius.iter().cloned().fold(0.0, f64::max);
        let mean = self.radius.iter().sum::<f64>() / self.radius.len() as f64;
        (hi - lo) / mean
    }

    pub fn mean_radius(&self) -> f64 {
        self.radius.iter().sum::<f64>() / self.radius.len() as f64
    }
}

/// Calapso transform `f^Φ = −α₁⁻¹α₂` of two independent `d_r`-parallel
/// sections, with tangents `α₁⁻¹ df (β₂ − β₁α₁⁻¹α₂)`.
pub fn calapso(f: &dyn SurfaceModel, phi1: &SectionField, phi2: &SectionField) -> QsResult<CalapsoResult> {
    let grid = phi1.grid;
    let m = independence_measure(&phi1.values[0], &phi2.values[0]);
    if m < INDEPENDENCE_TOL {
        return Err(QsError::NotIndependent(format!("complexified determinant {m:.3e} below {INDEPENDENCE_TOL:.0e}")));
    }
    let frames = sample_frames(f, &grid);
    let n = grid.len();
    let mut values = Vec::with_capacity(n);
    let mut fx = Vec::with_capacity(n);
    let mut fy = Vec::with_capacity(n);
    for k in 0..n {
        let (p1, p2) = (&phi1.values[k], &phi2.values[k]);
        let a1inv = p1.a.try_inv()?;
        let q = a1inv * p2.a;
        let w = p2.b - p1.b * q;
        values.push(-q);
        fx.push(a1inv * frames[k].fx * w);
        fy.push(a1inv * frames[k].fy * w);
    }
    Ok(CalapsoResult::new(ImmersionField::with_tangents(grid.unwrapped(), values, fx, fy)))
}

/// Lawson correspondence for a CMC surface and `r ∈ (0, 1)`: the Calapso
/// transform of `φ± = (1, ½(N(a−1) ± b))α±`, where `α±` are parallel for the
/// harmonic family at `μ± = e^{±it}`. With `|α₋|/|α₊| = 1/b` the result is
/// a surface of mean curvature `1 − 2r` in the 3-sphere of radius `1/b`.
pub fn lawson(f: &dyn SurfaceModel, alpha_plus: &SectionField, alpha_minus: &SectionField, r: f64) -> QsResult<CalapsoResult> {
    if !(r > 0.0 && r < 1.0) {
        return Err(QsError::DegenerateSpectral(format!("r = {r}: the Lawson correspondence needs 0 < r < 1")));
    }
    let sp = |s: f64| SpectralPoint::from_rho_branch(num_complex::Complex64::new(r, 0.0), s);
    let frames = sample_frames(f, &alpha_plus.grid);
    let lift = |a: &SectionField, s: &SpectralPoint| {
        let v = frames.iter().zip(&a.values).map(|(p, v)| HVector2::new(v.a, harmonic_partner(p.n, v.a, s))).collect();
        SectionField::from_values(a.grid, v, a.transport_residual)
    };
    calapso(f, &lift(alpha_plus, &sp(1.0)), &lift(alpha_minus, &sp(-1.0)))
}

/// Mean curvature of a surface in the sphere `S³(|f|)`: `Re(f H)/|f|` with the
/// mean curvature quaternion `H` from `−df H = (dN)′`.
pub fn sphere_mean_curvature(surface: &ImmersionField) -> QsResult<Vec<f64>> {
    let g = surface.gauss_map()?;
    Ok(surface.values.iter().zip(&g.h).map(|(f, h)| (*f * *h).re() / f.norm()).collect())
}

/// Conformal-Gauss-map associated surface `f^Φ = −α` for a harmonic-family
/// section `α` at `μ` on the unit circle; it lies in a sphere of radius `|α|`.
pub fn cw_assoc(f: &dyn SurfaceModel, alpha: &SectionField, sp: SpectralPoint) -> QsResult<CalapsoResult> {
    let frames = sample_frames(f, &alpha.grid);
    let n = frames.len();
    let mut values = Vec::with_capacity(n);
    let mut fx = Vec::with_capacity(n);
    let mut fy = Vec::with_capacity(n);
    for (p, v) in frames.iter().zip(&alpha.values) {
        let beta = harmonic_partner(p.n, v.a, &sp);
        values.push(-v.a);
        fx.push(p.fx * beta);
        fy.push(p.fy * beta);
    }
    Ok(CalapsoResult::new(ImmersionField::with_tangents(alpha.grid.unwrapped(), values, fx, fy)))
}

/// Sections `α(t)` of the harmonic family at `μ = e^{it}`, transported over
/// the grid from the same initial value at the grid origin.
pub fn harmonic_section_family(
    f: ModelRef,
    grid: DomainGrid,
    init: Quaternion,
    settings: TransportSettings,
) -> impl Fn(f64) -> QsResult<SectionField> + Sync {
    move |t: f64| {
        let conn = ConnectionFamily::harmonic_at(f.clone(), SpectralPoint::on_circle(t));
        transport_grid(&conn, &grid, HVector2::new(init, Quaternion::ZERO), &settings)
    }
}

fn alphas(s: &SectionField) -> Vec<Quaternion> {
    s.values.iter().map(|v| v.a).collect()
}

/// Sym–Bobenko surface `f^α = −2α⁻¹ ∂α/∂t` at `t = s` for a smooth family of
/// harmonic-family sections, by centred differences with step `δ` and `δ/2`
/// combined by Richardson extrapolation.
pub fn sym_bobenko<F>(family: F, s: f64, delta: f64) -> QsResult<ImmersionField>
where
    F: Fn(f64) -> QsResult<SectionField> + Sync,
{
    let ts = [s + delta, s - delta, s + delta / 2.0, s - delta / 2.0, s];
    let fields: Vec<SectionField> = ts.par_iter().map(|&t| family(t)).collect::<QsResult<_>>()?;
    let grid = fields[4].grid;
    let a: Vec<Vec<Quaternion>> = fields.iter().map(alphas).collect();
    let n = grid.len();
    let d1: Vec<Quaternion> = (0..n).map(|k| (a[0][k] - a[1][k]) * (0.5 / delta)).collect();
    let d2: Vec<Quaternion> = (0..n).map(|k| (a[2][k] - a[3][k]) * (1.0 / delta)).collect();
    let scale = d2.iter().map(|q| q.norm()).fold(0.0, f64::max).max(a[4].iter().map(|q| q.norm()).fold(0.0, f64::max));
    let gap = (0..n).map(|k| (d1[k] - d2[k]).norm()).fold(0.0, f64::max) / scale.max(f64::MIN_POSITIVE);
    if !(gap <= SMOOTHNESS_TOL) {
        return Err(QsError::NotSmooth(format!("spectral derivative changes by {gap:.3e} between steps {delta} and {}", delta / 2.0)));
    }
    let values = (0..n).map(|k| a[4][k].inv() * ((d2[k] * 4.0 - d1[k]) * (-2.0 / 3.0))).collect();
    Ok(ImmersionField::from_values(grid.unwrapped(), values))
}

/// Error of one step of a limit sequence.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LimitStep {
    pub t: f64,
    pub error: f64,
}

#[derive(Clone, Debug)]
pub struct LimitReport {
    pub steps: Vec<LimitStep>,
    pub fitted_order: Option<f64>,
    pub monotone: bool,
    /// The limiting Sym–Bobenko surface.
    pub limit: ImmersionField,
    /// The surface at the last `t`.
    pub last: ImmersionField,
}

fn report(steps: Vec<LimitStep>, limit: ImmersionField, last: ImmersionField) -> LimitReport {
    let fitted_order = fit_order(&steps.iter().map(|s| (s.t, s.error)).collect::<Vec<_>>());
    let monotone = steps.windows(2).all(|w| w[1].error < w[0].error);
    LimitReport { steps, fitted_order, monotone, limit, last }
}

/// Calapso transforms `A(t) = −α₁⁻¹α₂` of the isothermic family at
/// `r = (1 − cos t)/2` relative to `f^α`, built from `φ₁ = φ₊` and
/// `φ₂ = (φ₊ − φ₋)/t` with `α± = α(s ± t)`, converging to the Sym–Bobenko
/// surface at `μ = e^{is}` as `t → 0`.
pub fn limit_isothermic_family<F>(family: F, s: f64, ts: &[f64], delta: f64) -> QsResult<LimitReport>
where
    F: Fn(f64) -> QsResult<SectionField> + Sync,
{
    let limit = sym_bobenko(&family, s, delta)?;
    let mut steps = Vec::with_capacity(ts.len());
    let mut last = limit.clone();
    for &t in ts {
        if !(t > 0.0) {
            return Err(QsError::ConfigInvalid(format!("limit parameter t = {t} must be positive")));
        }
        let plus = alphas(&family(s + t)?);
        let minus = alphas(&family(s - t)?);
        let values: Vec<Quaternion> = plus.iter().zip(&minus).map(|(p, m)| -(p.inv() * ((*p - *m) * (1.0 / t)))).collect();
        let error = values.iter().zip(&limit.values).map(|(a, b)| (*a - *b).norm()).fold(0.0, f64::max);
        steps.push(LimitStep { t, error });
        last = ImmersionField::from_values(limit.grid, values);
    }
    Ok(report(steps, limit, last))
}

/// Associated surfaces `f^Φ(t) = (2/t)(1 − α(s)⁻¹α(s + t))` of the
/// conformal Gauss map, converging to the Sym–Bobenko surface as `t → 0`.
pub fn cw_limit<F>(family: F, s: f64, ts: &[f64], delta: f64) -> QsResult<LimitReport>
where
    F: Fn(f64) -> QsResult<SectionField> + Sync,
{
    let limit = sym_bobenko(&family, s, delta)?;
    let base = alphas(&family(s)?);
    let mut steps = Vec::with_capacity(ts.len());
    let mut last = limit.clone();
    for &t in ts {
        if !(t > 0.0) {
            return Err(QsError::ConfigInvalid(format!("limit parameter t = {t} must be positive")));
        }
        let moved = alphas(&family(s + t)?);
        let values: Vec<Quaternion> =
            base.iter().zip(&moved).map(|(a, b)| (Quaternion::ONE - a.inv() * *b) * (2.0 / t)).collect();
        let error = values.iter().zip(&limit.values).map(|(a, b)| (*a - *b).norm()).fold(0.0, f64::max);
        steps.push(LimitStep { t, error });
        last = ImmersionField::from_values(limit.grid, values);
    }
    Ok(report(steps, limit, last))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{CylinderOracle, CylinderSection};
    use crate::quat::c64;
    use std::f64::consts::{FRAC_PI_2, TAU};

    /// `α(t)` for the cylinder at `μ = e^{it}`, `t ∈ (0, π)`, in closed form.
    fn cylinder_family(grid: DomainGrid) -> impl Fn(f64) -> QsResult<SectionField> + Sync {
        move |t: f64| {
            let o = CylinderOracle::new(c64((1.0 - t.cos()) / 2.0, 0.0))?;
            Ok(o.section_field(CylinderSection::OnePlus, &grid)?.map(|v| HVector2::new(v.a, Quaternion::ZERO)))
        }
    }

    fn lawson_torus(r: f64, grid: &DomainGrid) -> CalapsoResult {
        let o = CylinderOracle::new(c64(r, 0.0)).unwrap();
        let s = (1.0 - r).sqrt();
        let scale = Quaternion::real((1.0 + s) / (2.0 * r * s));
        let plus = o.section_field(CylinderSection::OnePlus, grid).unwrap().map(|v| HVector2::new(v.a, Quaternion::ZERO));
        let minus = o.section_field(CylinderSection::OneMinus, grid).unwrap().map(|v| HVector2::new(v.a * scale, Quaternion::ZERO));
        lawson(CylinderOracle::surface_model().as_ref(), &plus, &minus, r).unwrap()
    }

    #[test]
    fn lawson_torus_matches_closed_form() {
        let grid = DomainGrid::new(-1.0, 1.0, 0.0, TAU, 32, 64, false).unwrap();
        for r in [0.05, 0.2, 0.5] {
            let res = lawson_torus(r, &grid);
            let (s, sr) = ((1.0 - r).sqrt(), r.sqrt());
            for k in 0..grid.len() {
                let (x, y) = grid.coords(k);
                let expect = Quaternion::cexp(c64(0.0, -s * y)) * (-1.0 / (2.0 * s))
                    + Quaternion::J * Quaternion::cexp(c64(0.0, sr * x)) * (1.0 / (2.0 * sr));
                assert!((res.surface.values[k] - expect).norm() < 1e-12);
            }
            let b = 2.0 * (r * (1.0 - r)).sqrt();
            assert!(res.radius_spread() < 1e-12);
            assert!((res.mean_radius() - 1.0 / b).abs() < 1e-12);
            let h = sphere_mean_curvature(&res.surface).unwrap();
            let worst = res.surface.grid.interior(3).map(|k| (h[k] - (1.0 - 2.0 * r)).abs()).fold(0.0, f64::max);
            assert!(worst < 1e-5, "r = {r}: {worst}");
        }
    }

    #[test]
    fn cw_associated_surface_lies_in_a_sphere() {
        let grid = DomainGrid::new(-1.0, 1.0, 0.0, TAU, 32, 64, false).unwrap();
        let t = 1.1;
        let sp = SpectralPoint::on_circle(t);
        let alpha = cylinder_family(grid)(t).unwrap();
        let res = cw_assoc(CylinderOracle::surface_model().as_ref(), &alpha, sp).unwrap();
        assert!(res.radius_spread() < 1e-12);
        let expect = sp.b_over_a_minus_one().unwrap().re / res.mean_radius();
        let h = sphere_mean_curvature(&res.surface).unwrap();
        let worst = res.surface.grid.interior(3).map(|k| (h[k] - expect).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-5, "{worst}");
    }

    #[test]
    fn sym_bobenko_at_the_identity_recovers_the_surface() {
        let grid = DomainGrid::new(-0.5, 0.5, -0.5, 0.5, 12, 12, false).unwrap();
        let f = CylinderOracle::surface_model();
        let family = harmonic_section_family(f.clone(), grid, Quaternion::ONE, TransportSettings::default());
        let fa = sym_bobenko(&family, 0.0, 1e-3).unwrap();
        let base = ImmersionField::from_model(f.as_ref(), &grid);
        assert!(fa.distance_up_to_translation(&base, 0) < 1e-7, "{}", fa.distance_up_to_translation(&base, 0));
    }

    #[test]
    fn sym_bobenko_surface_has_unit_mean_curvature() {
        let grid = DomainGrid::new(-1.0, 1.0, 0.0, TAU, 32, 64, false).unwrap();
        let fa = sym_bobenko(cylinder_family(grid), FRAC_PI_2, 1e-3).unwrap();
        let g = fa.gauss_map().unwrap();
        let worst = g.interior.iter().map(|&k| (g.h[k] - Quaternion::ONE).norm()).fold(0.0, f64::max);
        assert!(worst < 1e-4, "{worst}");
    }

    #[test]
    fn rough_families_are_rejected() {
        let grid = DomainGrid::new(0.0, 1.0, 0.0, 1.0, 8, 8, false).unwrap();
        let family = move |t: f64| {
            let v = vec![HVector2::new(Quaternion::real(1.0 + (t * 1e4).sin()), Quaternion::ZERO); grid.len()];
            Ok(SectionField::from_values(grid, v, 0.0))
        };
        assert!(matches!(sym_bobenko(family, 0.3, 1e-3), Err(QsError::NotSmooth(_))));
    }

    #[test]
    fn limits_converge_to_the_sym_bobenko_surface() {
        let grid = DomainGrid::new(-0.5, 0.5, -0.5, 0.5, 16, 16, false).unwrap();
        let f = CylinderOracle::surface_model();
        let ts = [0.5, 0.25, 0.125, 0.01];
        for s in [0.0, FRAC_PI_2] {
            let family = harmonic_section_family(f.clone(), grid, Quaternion::ONE, TransportSettings::default());
            let iso = limit_isothermic_family(&family, s, &ts, 1e-3).unwrap();
            assert!(iso.monotone && iso.fitted_order.unwrap() >= MIN_LIMIT_ORDER, "{:?}", iso.steps);
            assert!(iso.steps.last().unwrap().error < 5e-3, "{:?}", iso.steps);
            let cw = cw_limit(&family, s, &ts, 1e-3).unwrap();
            assert!(cw.monotone && cw.fitted_order.unwrap() >= MIN_LIMIT_ORDER, "{:?}", cw.steps);
            assert!(cw.steps.last().unwrap().error < 5e-3, "{:?}", cw.steps);
        }
    }
}
