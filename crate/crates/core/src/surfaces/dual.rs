use serde::Serialize;

use super::field::{GaussData, ImmersionField};
use super::grid::{diff_x, diff_y, DomainGrid};
use super::model::SurfaceModel;
use crate::error::{QsError, QsResult};
use crate::quat::Quaternion;

/// Relative mixed-partials mismatch above which the dual form counts as not closed.
pub const CLOSEDNESS_TOL: f64 = 1e-3;

/// Diagnostics of a numerically integrated dual surface.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DualReport {
    /// `max |∂_y ω_x − ∂_x ω_y|` relative to the size of the mixed partials.
    pub closedness: f64,
    /// `max |df ∧ df^d|` relative to `|f_x||f^d_y|`.
    pub wedge: f64,
}

/// Christoffel dual `df^d = f_x⁻¹dx − f_y⁻¹dy`, integrated along x at the first
/// row and then up each column, with `f^d(origin) = 0`.
pub fn christoffel_dual(f: &ImmersionField) -> QsResult<(ImmersionField, DualReport)> {
    christoffel_dual_with_tol(f, CLOSEDNESS_TOL)
}

pub fn christoffel_dual_with_tol(f: &ImmersionField, tol: f64) -> QsResult<(ImmersionField, DualReport)> {
    let grid = f.grid;
    let (fx, fy) = f.derivatives();
    let wx: Vec<Quaternion> = fx.iter().map(|q| q.inv()).collect();
    let wy: Vec<Quaternion> = fy.iter().map(|q| -q.inv()).collect();
    let closedness = closedness_residual(&grid, &wx, &wy, f.fd_order, f.margin());
    if !(closedness <= tol) {
        return Err(QsError::NotClosed(format!(
            "mixed partials differ by {closedness:.3e} (relative); coordinates are not conformal curvature-line"
        )));
    }
    let values = integrate_form(&grid, &wx, &wy);
    let wedge = wedge_residual(&fx, &fy, &wx, &wy);
    let mut d = ImmersionField::with_tangents(grid, values, wx, wy);
    d.fd_order = f.fd_order;
    Ok((d, DualReport { closedness, wedge }))
}

/// Relative closedness defect of the 1-form `ω = ω_x dx + ω_y dy`.
pub fn closedness_residual(grid: &DomainGrid, wx: &[Quaternion], wy: &[Quaternion], order: usize, margin: usize) -> f64 {
    let a = diff_y(grid, wx, order);
    let b = diff_x(grid, wy, order);
    let mut scale: f64 = 0.0;
    let mut worst: f64 = 0.0;
    for k in grid.interior(margin) {
        scale = scale.max(a[k].norm() + b[k].norm());
        worst = worst.max((a[k] - b[k]).norm());
    }
    let floor = 1e-12 * wx.iter().chain(wy).map(|q| q.norm()).fold(0.0, f64::max);
    if worst <= floor {
        0.0
    } else {
        worst / scale.max(floor)
    }
}

/// High-order cumulative integral of a closed form along x then y.
pub fn integrate_form(grid: &DomainGrid, wx: &[Quaternion], wy: &[Quaternion]) -> Vec<Quaternion> {
    let mut out = vec![Quaternion::ZERO; grid.len()];
    let row: Vec<Quaternion> = (0..grid.nx).map(|i| wx[grid.idx(i, 0)]).collect();
    let along_x = cumulative(&row, grid.dx(), false);
    for i in 0..grid.nx {
        let col = &wy[i * grid.ny..(i + 1) * grid.ny];
        let along_y = cumulative(col, grid.dy(), grid.periodic_y);
        for j in 0..grid.ny {
            out[grid.idx(i, j)] = along_x[i] + along_y[j];
        }
    }
    out
}

/// Cumulative integral from the first sample: sixth-order interval rule where
/// six neighbours exist, fourth-order or one-sided cubic near boundaries.
fn cumulative(v: &[Quaternion], h: f64, periodic: bool) -> Vec<Quaternion> {
    let n = v.len();
    let at = |k: isize| -> Option<Quaternion> {
        if periodic {
            Some(v[k.rem_euclid(n as isize) as usize])
        } else if k >= 0 && (k as usize) < n {
            Some(v[k as usize])
        } else {
            None
        }
    };
    let mut out = vec![Quaternion::ZERO; n];
    for k in 0..n.saturating_sub(1) {
        let (a, b) = (v[k], v[k + 1]);
        let k = k as isize;
        let piece = match (at(k - 2), at(k - 1), at(k + 2), at(k + 3)) {
            (Some(m2), Some(m1), Some(p2), Some(p3)) => {
                ((a + b) * 802.0 - (m1 + p2) * 93.0 + (m2 + p3) * 11.0) * (h / 1440.0)
            }
            (_, Some(m1), Some(p2), _) => ((a + b) * 13.0 - m1 - p2) * (h / 24.0),
            (_, None, Some(p2), _) => (a * 5.0 + b * 8.0 - p2) * (h / 12.0),
            (_, Some(m1), None, _) => (b * 5.0 + a * 8.0 - m1) * (h / 12.0),
            _ => (a + b) * (h / 2.0),
        };
        out[k as usize + 1] = out[k as usize] + piece;
    }
    out
}

/// `max(|ω∧η|, |η∧ω|)` with `(ω∧η)(∂x,∂y) = ω_x η_y − ω_y η_x`, relative per node.
pub fn wedge_residual(ax: &[Quaternion], ay: &[Quaternion], bx: &[Quaternion], by: &[Quaternion]) -> f64 {
    (0..ax.len())
        .map(|k| {
            let s = ax[k].norm() * by[k].norm() + ay[k].norm() * bx[k].norm();
            let w1 = ax[k] * by[k] - ay[k] * bx[k];
            let w2 = bx[k] * ay[k] - by[k] * ax[k];
            w1.norm().max(w2.norm()) / s.max(1e-300)
        })
        .fold(0.0, f64::max)
}

/// Parallel CMC surface `g = f + N` of an `H = 1` surface.
///
/// `normal_derivatives` supplies `(N_x, N_y)` when known in closed form; otherwise
/// they are differenced, and the round-sphere test uses a looser threshold.
pub fn parallel_surface(
    f: &ImmersionField,
    gauss: &GaussData,
    normal_derivatives: Option<(Vec<Quaternion>, Vec<Quaternion>)>,
) -> QsResult<ImmersionField> {
    let h_dev = gauss.interior.iter().map(|&k| (gauss.h[k] - Quaternion::ONE).norm()).fold(0.0, f64::max);
    if !(h_dev < 1e-3) {
        return Err(QsError::DegenerateImmersion(format!("surface is not CMC with H = 1 (|H−1| up to {h_dev:.3e})")));
    }
    let exact = normal_derivatives.is_some();
    let (nx, ny) = normal_derivatives.unwrap_or_else(|| (f.fd_x(&gauss.n), f.fd_y(&gauss.n)));
    let (fx, fy) = f.derivatives();
    let gx: Vec<Quaternion> = fx.iter().zip(&nx).map(|(a, b)| *a + *b).collect();
    let gy: Vec<Quaternion> = fy.iter().zip(&ny).map(|(a, b)| *a + *b).collect();
    let df = fx.iter().chain(&fy).map(|q| q.norm()).fold(0.0, f64::max);
    let dg = gx.iter().chain(&gy).map(|q| q.norm()).fold(0.0, f64::max);
    let threshold = if exact { 1e-10 } else { 1e-6 };
    if dg <= threshold * df {
        return Err(QsError::RoundSphere(format!("|dg| = {dg:.3e} vanishes relative to |df| = {df:.3e}")));
    }
    let values = f.values.iter().zip(&gauss.n).map(|(a, b)| *a + *b).collect();
    let mut g = ImmersionField::with_tangents(f.grid, values, gx, gy);
    g.fd_order = f.fd_order;
    g.is_r3 = f.is_r3 && g.values.iter().all(|q| q.w == 0.0);
    Ok(g)
}

/// Closed-form `(N_x, N_y)` of a model at every node.
pub fn sample_normal_derivatives(model: &dyn SurfaceModel, grid: &DomainGrid) -> (Vec<Quaternion>, Vec<Quaternion>) {
    (0..grid.len())
        .map(|k| {
            let (x, y) = grid.coords(k);
            model.normal_derivatives_or_fd(x, y)
        })
        .unzip()
}
