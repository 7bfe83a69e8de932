use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::family::{ConnectionFamily, Direction};
use crate::error::{QsError, QsResult};
use crate::quat::HVector2;
use crate::surfaces::grid::{diff_x, diff_y, stencil_margin};
use crate::surfaces::DomainGrid;

/// Fixed-step integration settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TransportSettings {
    /// RK4 substeps per grid edge.
    pub substeps: usize,
    /// Largest accepted Richardson error estimate relative to the section size.
    pub tolerance: f64,
}

impl Default for TransportSettings {
    fn default() -> Self {
        TransportSettings { substeps: 64, tolerance: 1e-8 }
    }
}

/// A parallel section sampled on a grid.
#[derive(Clone, Debug)]
pub struct SectionField {
    pub grid: DomainGrid,
    pub values: Vec<HVector2>,
    /// `max |∂φ + ω(∂)φ|` over interior nodes (finite differences), relative to `max |φ|`.
    pub transport_residual: f64,
}

impl SectionField {
    /// Wraps sampled values, rejecting the zero section and measuring parallelism.
    pub fn new(conn: &ConnectionFamily, grid: DomainGrid, values: Vec<HVector2>) -> QsResult<Self> {
        let scale = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(QsError::SingularEverywhere("section vanishes identically or is not finite".into()));
        }
        let transport_residual = parallel_residual(conn, &grid, &values, 6) / scale;
        Ok(SectionField { grid, values, transport_residual })
    }

    /// Unchecked constructor for sections whose parallelism is established elsewhere.
    pub fn from_values(grid: DomainGrid, values: Vec<HVector2>, transport_residual: f64) -> Self {
        SectionField { grid, values, transport_residual }
    }

    pub fn map(&self, f: impl Fn(&HVector2) -> HVector2) -> SectionField {
        SectionField { grid: self.grid, values: self.values.iter().map(f).collect(), transport_residual: self.transport_residual }
    }
}

/// `max |φ_x + ω_x φ| + |φ_y + ω_y φ|` over interior nodes by finite differences.
///
/// Sections need not be periodic, so y is never wrapped.
pub fn parallel_residual(conn: &ConnectionFamily, grid: &DomainGrid, values: &[HVector2], order: usize) -> f64 {
    let grid = &grid.unwrapped();
    let px = diff_x(grid, values, order);
    let py = diff_y(grid, values, order);
    let m = stencil_margin(order);
    let idx: Vec<usize> = grid.interior(m).collect();
    idx.par_iter()
        .map(|&k| {
            let (x, y) = grid.coords(k);
            let wx = conn.local(x, y, 1.0, 0.0).apply(&values[k]);
            let wy = conn.local(x, y, 0.0, 1.0).apply(&values[k]);
            (px[k] + wx).norm() + (py[k] + wy).norm()
        })
        .reduce(|| 0.0, f64::max)
}

/// Classical RK4 along the straight segment `p0 → p1` with `steps` steps,
/// solving `dφ = −ωφ` for every column of `state` simultaneously.
pub fn transport_segment(conn: &ConnectionFamily, p0: (f64, f64), p1: (f64, f64), steps: usize, state: &mut [HVector2]) {
    let (vx, vy) = (p1.0 - p0.0, p1.1 - p0.1);
    let h = 1.0 / steps as f64;
    let at = |t: f64| conn.local(p0.0 + t * vx, p0.1 + t * vy, vx, vy);
    let mut start = at(0.0);
    for s in 0..steps {
        let t = s as f64 * h;
        let mid = at(t + 0.5 * h);
        let end = at(t + h);
        for phi in state.iter_mut() {
            let k1 = -start.apply(phi);
            let k2 = -mid.apply(&(*phi + k1 * (0.5 * h)));
            let k3 = -mid.apply(&(*phi + k2 * (0.5 * h)));
            let k4 = -end.apply(&(*phi + k3 * h));
            *phi = *phi + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        }
        start = end;
    }
}

/// Transports along a polyline, returning the values at every vertex.
pub fn transport_path(conn: &ConnectionFamily, path: &[(f64, f64)], substeps: usize, init: &[HVector2]) -> Vec<Vec<HVector2>> {
    let mut state = init.to_vec();
    let mut out = Vec::with_capacity(path.len());
    out.push(state.clone());
    for w in path.windows(2) {
        transport_segment(conn, w[0], w[1], substeps, &mut state);
        out.push(state.clone());
    }
    out
}

/// Parallel transport along a polyline with a Richardson check of the step size.
pub fn parallel_transport(
    conn: &ConnectionFamily,
    path: &[(f64, f64)],
    init: HVector2,
    settings: &TransportSettings,
) -> QsResult<Vec<HVector2>> {
    if !(init.norm() > 0.0) {
        return Err(QsError::SingularEverywhere("initial value is zero".into()));
    }
    let fine: Vec<HVector2> = transport_path(conn, path, settings.substeps, &[init]).into_iter().map(|v| v[0]).collect();
    let coarse_steps = (settings.substeps / 2).max(1);
    let coarse = transport_path(conn, path, coarse_steps, &[init]).pop().unwrap()[0];
    check_richardson(fine.last().unwrap(), &coarse, &fine, settings)?;
    Ok(fine)
}

fn check_richardson(fine: &HVector2, coarse: &HVector2, all: &[HVector2], settings: &TransportSettings) -> QsResult<()> {
    let scale = all.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let est = (*fine - *coarse).norm() / 15.0 / scale;
    if !(est <= settings.tolerance) {
        return Err(QsError::StepTooCoarse(format!(
            "Richardson error estimate {est:.3e} exceeds {:.1e}; raise substeps above {}",
            settings.tolerance, settings.substeps
        )));
    }
    Ok(())
}

/// Transports several initial values from the grid origin over the whole grid:
/// first along the bottom row, then up every column (columns in parallel).
/// Returns one value vector per node.
pub fn transport_grid_frame(
    conn: &ConnectionFamily,
    grid: &DomainGrid,
    init: &[HVector2],
    settings: &TransportSettings,
) -> QsResult<Vec<Vec<HVector2>>> {
    let row: Vec<(f64, f64)> = (0..grid.nx).map(|i| (grid.x(i), grid.y(0))).collect();
    let base = transport_path(conn, &row, settings.substeps, init);
    // Richardson on the longest leg of each pass.
    let half = (settings.substeps / 2).max(1);
    let coarse_row = transport_path(conn, &row, half, init).pop().unwrap();
    let col0: Vec<(f64, f64)> = (0..grid.ny).map(|j| (grid.x(0), grid.y(j))).collect();
    let fine_col = transport_path(conn, &col0, settings.substeps, init).pop().unwrap();
    let coarse_col = transport_path(conn, &col0, half, init).pop().unwrap();
    for c in 0..init.len() {
        let all: Vec<HVector2> = base.iter().map(|v| v[c]).collect();
        check_richardson(&base[grid.nx - 1][c], &coarse_row[c], &all, settings)?;
        check_richardson(&fine_col[c], &coarse_col[c], &all, settings)?;
    }
    let columns: Vec<Vec<Vec<HVector2>>> = (0..grid.nx)
        .into_par_iter()
        .map(|i| {
            let col: Vec<(f64, f64)> = (0..grid.ny).map(|j| (grid.x(i), grid.y(j))).collect();
            transport_path(conn, &col, settings.substeps, &base[i])
        })
        .collect();
    Ok(columns.into_iter().flatten().collect())
}

/// Transports one initial value over the grid into a [`SectionField`].
pub fn transport_grid(conn: &ConnectionFamily, grid: &DomainGrid, init: HVector2, settings: &TransportSettings) -> QsResult<SectionField> {
    if !(init.norm() > 0.0) {
        return Err(QsError::SingularEverywhere("initial value is zero".into()));
    }
    let values: Vec<HVector2> = transport_grid_frame(conn, grid, &[init], settings)?.into_iter().map(|v| v[0]).collect();
    SectionField::new(conn, *grid, values)
}

/// Value of `ω(∂_dir)φ` at a node, for residual checks by callers.
pub fn omega_apply(conn: &ConnectionFamily, x: f64, y: f64, dir: Direction, phi: &HVector2) -> HVector2 {
    let (vx, vy) = dir.vector();
    conn.local(x, y, vx, vy).apply(phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connections::family::model;
    use crate::quat::{c64, Quaternion};
    use crate::surfaces::{ParallelModel, Revolution};
    use std::sync::Arc;

    fn cylinder_rho(rho: num_complex::Complex64) -> ConnectionFamily {
        let f = model(Revolution::cylinder());
        let g = Arc::new(ParallelModel::new(f.clone()));
        ConnectionFamily::isothermic(f, g, rho).unwrap()
    }

    #[test]
    fn trivial_connection_keeps_sections_constant() {
        let c = ConnectionFamily::harmonic(model(Revolution::cylinder()), c64(1.0, 0.0)).unwrap();
        let v = HVector2::new(Quaternion::new(1.0, 2.0, 3.0, 4.0), Quaternion::ZERO);
        let out = parallel_transport(&c, &[(0.0, 0.0), (1.0, 0.0), (1.0, 3.0)], v, &TransportSettings::default()).unwrap();
        assert!(out.iter().all(|w| *w == v));
    }

    #[test]
    fn forward_then_backward_is_identity() {
        let c = cylinder_rho(c64(1.0, 1.0));
        let v = HVector2::new(Quaternion::new(0.2, 1.0, -0.3, 0.5), Quaternion::new(1.0, 0.0, 0.4, 0.0));
        let path = [(0.0, 0.0), (0.7, 0.0), (0.7, 2.0), (-0.3, 3.0)];
        let s = TransportSettings::default();
        let fwd = parallel_transport(&c, &path, v, &s).unwrap();
        let back: Vec<(f64, f64)> = path.iter().rev().copied().collect();
        let ret = parallel_transport(&c, &back, *fwd.last().unwrap(), &s).unwrap();
        assert!((*ret.last().unwrap() - v).norm() < 1e-10);
    }

    #[test]
    fn coarse_steps_rejected() {
        let c = cylinder_rho(c64(-30.0, 5.0));
        let v = HVector2::new(Quaternion::ONE, Quaternion::ONE);
        let s = TransportSettings { substeps: 2, tolerance: 1e-10 };
        let r = parallel_transport(&c, &[(0.0, 0.0), (0.0, 3.0)], v, &s);
        assert!(matches!(r, Err(QsError::StepTooCoarse(_))));
    }

    #[test]
    fn zero_section_rejected() {
        let c = cylinder_rho(c64(0.5, 0.0));
        let r = parallel_transport(&c, &[(0.0, 0.0), (1.0, 0.0)], HVector2::ZERO, &TransportSettings::default());
        assert!(matches!(r, Err(QsError::SingularEverywhere(_))));
    }

    #[test]
    fn grid_transport_is_parallel() {
        let c = cylinder_rho(c64(0.3, -0.8));
        let g = DomainGrid::periodic(-1.0, 1.0, 32, 32).unwrap();
        let v = HVector2::new(Quaternion::new(0.2, 1.0, -0.3, 0.5), Quaternion::new(1.0, 0.0, 0.4, 0.0));
        let sec = transport_grid(&c, &g, v, &TransportSettings { substeps: 16, tolerance: 1e-8 }).unwrap();
        assert!(sec.transport_residual < 1e-5, "{}", sec.transport_residual);
    }

    #[test]
    fn quaternionic_for_real_rho() {
        let c = cylinder_rho(c64(0.4, 0.0));
        let v = HVector2::new(Quaternion::new(0.2, 1.0, -0.3, 0.5), Quaternion::new(1.0, 0.0, 0.4, 0.0));
        let path = [(0.0, 0.0), (0.5, 0.0), (0.5, 1.0)];
        let s = TransportSettings::default();
        let a = parallel_transport(&c, &path, v.rmul(Quaternion::J), &s).unwrap();
        let b = parallel_transport(&c, &path, v, &s).unwrap();
        assert!((*a.last().unwrap() - b.last().unwrap().rmul(Quaternion::J)).norm() < 1e-12);
    }
}
