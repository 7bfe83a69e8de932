use rayon::prelude::*;
use serde::Serialize;

use crate::dmath;

use super::family::{complex_basis, ConnectionFamily};
use super::transport::transport_segment;

/// Plaquette holonomy deviation at one resolution.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct FlatnessLevel {
    pub n: usize,
    pub h: f64,
    /// `max ‖Hol − I‖ / area` over plaquettes.
    pub max_deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FlatnessReport {
    pub levels: Vec<FlatnessLevel>,
    /// Least-squares slope of `log deviation` against `log h`; `None` when every level is exact.
    pub fitted_order: Option<f64>,
    pub exact: bool,
    pub passed: bool,
}

/// Minimum convergence order accepted as flat.
pub const MIN_FLATNESS_ORDER: f64 = 2.0;

/// Rectangle on which plaquettes are laid out.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Window {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

/// Holonomy of every plaquette of an `n × n` subdivision of `window`, one RK4
/// step per edge, for each level in `levels`.
pub fn flatness_check(conn: &ConnectionFamily, window: Window, levels: &[usize]) -> FlatnessReport {
    let basis = complex_basis(conn.dim());
    let levels: Vec<FlatnessLevel> = levels
        .iter()
        .map(|&n| {
            let hx = (window.x_max - window.x_min) / n as f64;
            let hy = (window.y_max - window.y_min) / n as f64;
            let area = hx * hy;
            let max_deviation = (0..n * n)
                .into_par_iter()
                .map(|k| {
                    let (i, j) = (k / n, k % n);
                    let x0 = window.x_min + i as f64 * hx;
                    let y0 = window.y_min + j as f64 * hy;
                    let corners = [(x0, y0), (x0 + hx, y0), (x0 + hx, y0 + hy), (x0, y0 + hy), (x0, y0)];
                    let mut state = basis.clone();
                    for w in corners.windows(2) {
                        transport_segment(conn, w[0], w[1], 1, &mut state);
                    }
                    state.iter().zip(&basis).map(|(a, b)| (*a - *b).norm()).fold(0.0, f64::max) / area
                })
                .reduce(|| 0.0, f64::max);
            FlatnessLevel { n, h: hx.max(hy), max_deviation }
        })
        .collect();
    let exact = levels.iter().all(|l| l.max_deviation == 0.0);
    let fitted_order = if exact { None } else { fit_order(&levels.iter().map(|l| (l.h, l.max_deviation)).collect::<Vec<_>>()) };
    let passed = exact || fitted_order.is_some_and(|p| p >= MIN_FLATNESS_ORDER);
    FlatnessReport { levels, fitted_order, exact, passed }
}

/// Least-squares slope of `ln e` against `ln h`; `None` with fewer than two usable points.
pub fn fit_order(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|(h, e)| *h > 0.0 && *e > 0.0).map(|(h, e)| (dmath::ln(*h), dmath::ln(*e))).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connections::family::{corrupted_isothermic, model};
    use crate::quat::c64;
    use crate::surfaces::{ParallelModel, Revolution};
    use std::sync::Arc;

    const W: Window = Window { x_min: -1.0, x_max: 1.0, y_min: 0.0, y_max: 2.0 };

    #[test]
    fn trivial_family_is_exactly_flat() {
        let c = ConnectionFamily::harmonic(model(Revolution::cylinder()), c64(1.0, 0.0)).unwrap();
        let r = flatness_check(&c, W, &[8, 16]);
        assert!(r.exact && r.passed);
    }

    #[test]
    fn cylinder_isothermic_family_converges() {
        let f = model(Revolution::cylinder());
        let c = ConnectionFamily::isothermic(f.clone(), Arc::new(ParallelModel::new(f)), c64(1.0, 1.0)).unwrap();
        let r = flatness_check(&c, W, &[16, 32, 64]);
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn corrupted_family_is_not_flat() {
        let c = corrupted_isothermic(model(Revolution::cylinder()), c64(1.0, 1.0)).unwrap();
        let r = flatness_check(&c, W, &[16, 32, 64]);
        assert!(!r.passed, "{r:?}");
    }

    #[test]
    fn order_fit() {
        let pts: Vec<(f64, f64)> = [0.1, 0.05, 0.025].iter().map(|h: &f64| (*h, 3.0 * h.powi(3))).collect();
        assert!((fit_order(&pts).unwrap() - 3.0).abs() < 1e-12);
    }
}
