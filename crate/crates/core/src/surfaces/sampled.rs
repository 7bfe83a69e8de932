use super::field::ImmersionField;
use super::grid::DomainGrid;
use super::model::{FramePoint, SurfaceModel};
use crate::quat::Quaternion;

/// A sampled immersion evaluated off-grid by bilinear interpolation of
/// `f`, `f_x` and `f_y`.
#[derive(Clone, Debug)]
pub struct SampledModel {
    grid: DomainGrid,
    f: Vec<Quaternion>,
    fx: Vec<Quaternion>,
    fy: Vec<Quaternion>,
    r3: bool,
}

impl SampledModel {
    pub fn new(field: &ImmersionField) -> Self {
        let (fx, fy) = field.derivatives();
        SampledModel { grid: field.grid, f: field.values.clone(), fx, fy, r3: field.is_r3 }
    }

    /// Cell indices and weights of `(x, y)`, clamped to the domain in x (and in y
    /// when not periodic).
    fn locate(&self, x: f64, y: f64) -> ([usize; 4], [f64; 4]) {
        let g = &self.grid;
        let (i0, tx) = cell(x, g.x_min, g.dx(), g.nx, false);
        let (j0, ty) = cell(y, g.y_min, g.dy(), g.ny, g.periodic_y);
        let i1 = (i0 + 1).min(g.nx - 1);
        let j1 = if g.periodic_y { (j0 + 1) % g.ny } else { (j0 + 1).min(g.ny - 1) };
        (
            [g.idx(i0, j0), g.idx(i1, j0), g.idx(i0, j1), g.idx(i1, j1)],
            [(1.0 - tx) * (1.0 - ty), tx * (1.0 - ty), (1.0 - tx) * ty, tx * ty],
        )
    }

    fn interp(v: &[Quaternion], k: &[usize; 4], w: &[f64; 4]) -> Quaternion {
        v[k[0]] * w[0] + v[k[1]] * w[1] + v[k[2]] * w[2] + v[k[3]] * w[3]
    }
}

fn cell(t: f64, t0: f64, h: f64, n: usize, periodic: bool) -> (usize, f64) {
    let s = (t - t0) / h;
    if periodic {
        let s = s.rem_euclid(n as f64);
        let i = (s.floor() as usize).min(n - 1);
        (i, s - i as f64)
    } else {
        let s = s.clamp(0.0, (n - 1) as f64);
        let i = (s.floor() as usize).min(n - 2);
        (i, s - i as f64)
    }
}

impl SurfaceModel for SampledModel {
    fn frame(&self, x: f64, y: f64) -> FramePoint {
        let (k, w) = self.locate(x, y);
        FramePoint::from_tangents(Self::interp(&self.f, &k, &w), Self::interp(&self.fx, &k, &w), Self::interp(&self.fy, &k, &w))
    }

    fn is_r3(&self) -> bool {
        self.r3
    }

    fn describe(&self) -> String {
        format!("sampled surface on {}×{} grid", self.grid.nx, self.grid.ny)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::model::Revolution;

    #[test]
    fn reproduces_nodes_and_interpolates() {
        let g = DomainGrid::periodic(-1.0, 1.0, 33, 64).unwrap();
        let cyl = Revolution::cylinder();
        let m = SampledModel::new(&ImmersionField::from_model(&cyl, &g));
        for k in [0, 17, g.len() - 1] {
            let (x, y) = g.coords(k);
            assert!(m.frame(x, y).f.max_abs_diff(&cyl.frame(x, y).f) < 1e-15);
        }
        // Linear interpolation error is O(h²).
        let (x, y) = (0.123, 6.2);
        assert!(m.frame(x, y).f.max_abs_diff(&cyl.frame(x, y).f) < 2e-3);
        assert!(m.frame(x, y).n.max_abs_diff(&cyl.frame(x, y).n) < 1e-2);
    }
}
