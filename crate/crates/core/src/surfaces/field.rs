use rayon::prelude::*;
use serde::Serialize;

use super::grid::{diff_x, diff_y, stencil_margin, DomainGrid};
use super::model::{normals_from_tangents, FramePoint, SurfaceModel};
use crate::error::{QsError, QsResult};
use crate::quat::Quaternion;

/// Default finite-difference order for derivatives not supplied in closed form.
pub const DEFAULT_FD_ORDER: usize = 6;

/// A conformal immersion sampled on a grid.
#[derive(Clone, Debug)]
pub struct ImmersionField {
    pub grid: DomainGrid,
    pub values: Vec<Quaternion>,
    /// Exact `(f_x, f_y)` per node when known; otherwise finite differences are used.
    pub tangents: Option<(Vec<Quaternion>, Vec<Quaternion>)>,
    pub is_r3: bool,
    pub fd_order: usize,
}

/// Left/right normals and the mean curvature quaternion per node.
#[derive(Clone, Debug)]
pub struct GaussData {
    pub n: Vec<Quaternion>,
    pub r: Vec<Quaternion>,
    pub h: Vec<Quaternion>,
    /// Nodes whose stencils stay away from non-periodic boundaries.
    pub interior: Vec<usize>,
}

impl ImmersionField {
    pub fn from_values(grid: DomainGrid, values: Vec<Quaternion>) -> Self {
        let is_r3 = values.iter().all(|q| q.w == 0.0);
        ImmersionField { grid, values, tangents: None, is_r3, fd_order: DEFAULT_FD_ORDER }
    }

    pub fn with_tangents(grid: DomainGrid, values: Vec<Quaternion>, fx: Vec<Quaternion>, fy: Vec<Quaternion>) -> Self {
        let mut f = Self::from_values(grid, values);
        f.tangents = Some((fx, fy));
        f
    }

    /// Samples a model, keeping its closed-form tangents.
    pub fn from_model(model: &dyn SurfaceModel, grid: &DomainGrid) -> Self {
        let frames = sample_frames(model, grid);
        let mut f = Self::with_tangents(
            *grid,
            frames.iter().map(|p| p.f).collect(),
            frames.iter().map(|p| p.fx).collect(),
            frames.iter().map(|p| p.fy).collect(),
        );
        f.is_r3 = model.is_r3() && f.values.iter().all(|q| q.w == 0.0);
        f
    }

    pub fn fd_x(&self, field: &[Quaternion]) -> Vec<Quaternion> {
        diff_x(&self.grid, field, self.fd_order)
    }

    pub fn fd_y(&self, field: &[Quaternion]) -> Vec<Quaternion> {
        diff_y(&self.grid, field, self.fd_order)
    }

    /// `(f_x, f_y)`: exact when available, else finite differences.
    pub fn derivatives(&self) -> (Vec<Quaternion>, Vec<Quaternion>) {
        match &self.tangents {
            Some((fx, fy)) => (fx.clone(), fy.clone()),
            None => (self.fd_x(&self.values), self.fd_y(&self.values)),
        }
    }

    /// Margin excluded from interior statistics.
    pub fn margin(&self) -> usize {
        stencil_margin(self.fd_order)
    }

    /// Max over interior nodes of `|⟨f_x,f_y⟩|/|f_x|² + ||f_x|−|f_y||/|f_x|`.
    pub fn conformality_residual(&self) -> f64 {
        let (fx, fy) = self.derivatives();
        self.grid
            .interior(self.margin())
            .map(|k| {
                let a = fx[k].norm();
                fx[k].dot(&fy[k]).abs() / (a * a) + (a - fy[k].norm()).abs() / a
            })
            .fold(0.0, f64::max)
    }

    /// Normals from `*df = N df = −df R` and mean curvature from `−df H = (dN)′`.
    pub fn gauss_map(&self) -> QsResult<GaussData> {
        let (fx, fy) = self.derivatives();
        let bad: Vec<usize> = (0..fx.len()).filter(|&k| !(fx[k].norm() > 1e-10)).collect();
        if !bad.is_empty() {
            return Err(QsError::DegenerateImmersion(format!(
                "|f_x| vanishes at {} node(s), first {:?}",
                bad.len(),
                &bad[..bad.len().min(8)]
            )));
        }
        let (n, r): (Vec<_>, Vec<_>) = fx.iter().zip(&fy).map(|(a, b)| normals_from_tangents(*a, *b)).unzip();
        let h = mean_curvature(&self.grid, &fx, &n, self.fd_order);
        Ok(GaussData { n, r, h, interior: self.grid.interior(self.margin()).collect() })
    }

    /// Translates so that the node `k` sits at `target`.
    pub fn normalized_at(&self, k: usize, target: Quaternion) -> ImmersionField {
        let shift = target - self.values[k];
        let mut out = self.clone();
        for v in &mut out.values {
            *v += shift;
        }
        out.is_r3 = out.values.iter().all(|q| q.w == 0.0);
        out
    }

    /// Largest node-wise distance after matching both surfaces at node `k`.
    pub fn distance_up_to_translation(&self, other: &ImmersionField, k: usize) -> f64 {
        let shift = self.values[k] - other.values[k];
        self.values.iter().zip(&other.values).map(|(a, b)| (*a - *b - shift).norm()).fold(0.0, f64::max)
    }

    pub fn max_distance(&self, other: &ImmersionField) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (*a - *b).norm()).fold(0.0, f64::max)
    }

    /// `max − min` of the real part over the given nodes.
    pub fn real_part_spread(&self, nodes: impl Iterator<Item = usize>) -> f64 {
        let (lo, hi) = nodes.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), k| {
            let w = self.values[k].w;
            (lo.min(w), hi.max(w))
        });
        if lo.is_finite() {
            hi - lo
        } else {
            0.0
        }
    }
}

/// Samples the frame of a model at every node (data-parallel over columns).
pub fn sample_frames(model: &dyn SurfaceModel, grid: &DomainGrid) -> Vec<FramePoint> {
    (0..grid.len()).into_par_iter().map(|k| {
        let (x, y) = grid.coords(k);
        model.frame(x, y)
    }).collect()
}

/// `H = −f_x⁻¹ · ½(N_x − N N_y)` with normal derivatives by finite differences.
pub fn mean_curvature(grid: &DomainGrid, fx: &[Quaternion], n: &[Quaternion], order: usize) -> Vec<Quaternion> {
    let nx = diff_x(grid, n, order);
    let ny = diff_y(grid, n, order);
    (0..n.len()).map(|k| -(fx[k].inv() * (nx[k] - n[k] * ny[k]) * 0.5)).collect()
}

/// `H` from closed-form normal derivatives.
pub fn mean_curvature_exact(fx: Quaternion, n: Quaternion, nx: Quaternion, ny: Quaternion) -> Quaternion {
    -(fx.inv() * (nx - n * ny) * 0.5)
}

/// Summary statistics of a residual field.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct ResidualStats {
    pub max: f64,
    pub mean: f64,
    pub count: usize,
}

impl ResidualStats {
    pub fn of(values: impl Iterator<Item = f64>) -> Self {
        let (mut max, mut sum, mut count) = (0.0_f64, 0.0, 0usize);
        for v in values {
            max = if v.is_nan() { f64::NAN } else { max.max(v) };
            sum += v;
            count += 1;
        }
        ResidualStats { max, mean: if count > 0 { sum / count as f64 } else { 0.0 }, count }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::model::{Plane, Revolution};

    #[test]
    fn plane_gauss_data() {
        let g = DomainGrid::new(-1.0, 1.0, -1.0, 1.0, 16, 16, false).unwrap();
        let f = ImmersionField::from_model(&Plane, &g);
        let gd = f.gauss_map().unwrap();
        for k in 0..g.len() {
            assert!(gd.n[k].max_abs_diff(&Quaternion::I) < 1e-15);
            assert!(gd.h[k].norm() < 1e-12);
        }
    }

    #[test]
    fn cylinder_mean_curvature_is_one() {
        let g = DomainGrid::periodic(-1.0, 1.0, 64, 64).unwrap();
        let f = ImmersionField::from_model(&Revolution::cylinder(), &g);
        assert!(f.is_r3);
        let gd = f.gauss_map().unwrap();
        for &k in &gd.interior {
            assert!(gd.h[k].max_abs_diff(&Quaternion::ONE) < 1e-6, "H = {:?}", gd.h[k]);
        }
    }

    #[test]
    fn sphere_mean_curvature_has_unit_modulus() {
        let g = DomainGrid::periodic(-1.0, 1.0, 64, 64).unwrap();
        let f = ImmersionField::from_model(&Revolution::unit_sphere(), &g);
        let gd = f.gauss_map().unwrap();
        for &k in &gd.interior {
            assert!((gd.h[k].norm() - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn running_example_is_conformal() {
        let g = DomainGrid::periodic(-1.5, 1.5, 64, 64).unwrap();
        let f = ImmersionField::from_model(&Revolution::running_example(), &g);
        assert!(f.conformality_residual() < 1e-8);
    }

    #[test]
    fn degenerate_immersion_reported() {
        let g = DomainGrid::new(0.0, 1.0, 0.0, 1.0, 8, 8, false).unwrap();
        let f = ImmersionField::from_values(g, vec![Quaternion::ZERO; g.len()]);
        assert!(matches!(f.gauss_map(), Err(QsError::DegenerateImmersion(_))));
    }
}
