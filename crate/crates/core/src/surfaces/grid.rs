use serde::{Deserialize, Serialize};

use crate::error::{QsError, QsResult};
use crate::quat::{HVector2, Quaternion};

/// Rectangular parameter domain with optional periodicity in y.
///
/// Nodes are stored column-major in x: `idx(i, j) = i·ny + j`, so a column of
/// constant x is contiguous.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
    pub periodic_y: bool,
    pub period_y: f64,
}

impl DomainGrid {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64, nx: usize, ny: usize, periodic_y: bool) -> QsResult<Self> {
        let g = DomainGrid {
            x_min,
            x_max,
            y_min,
            y_max,
            nx,
            ny,
            periodic_y,
            period_y: if periodic_y { y_max - y_min } else { 0.0 },
        };
        g.validate()?;
        Ok(g)
    }

    /// Grid over `[x_min, x_max] × [y_min, y_min + 2π)`, periodic in y.
    pub fn periodic(x_min: f64, x_max: f64, nx: usize, ny: usize) -> QsResult<Self> {
        Self::new(x_min, x_max, 0.0, std::f64::consts::TAU, nx, ny, true)
    }

    pub fn validate(&self) -> QsResult<()> {
        if self.nx < 8 || self.ny < 8 {
            return Err(QsError::ConfigInvalid(format!("grid needs at least 8×8 nodes, got {}×{}", self.nx, self.ny)));
        }
        let finite = [self.x_min, self.x_max, self.y_min, self.y_max].iter().all(|v| v.is_finite());
        if !finite || self.x_max <= self.x_min || self.y_max <= self.y_min {
            return Err(QsError::ConfigInvalid("grid bounds must be finite with min < max".into()));
        }
        if self.periodic_y && (self.y_max - self.y_min - self.period_y).abs() > 1e-12 * self.period_y.abs().max(1.0) {
            return Err(QsError::ConfigInvalid("periodic grid must span exactly one period in y".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    /// y spacing; a periodic grid does not repeat the node at `y_max`.
    pub fn dy(&self) -> f64 {
        if self.periodic_y {
            self.period_y / self.ny as f64
        } else {
            (self.y_max - self.y_min) / (self.ny - 1) as f64
        }
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    /// y coordinate of (possibly wrapped-around) row `j`; `j = ny` is one full period.
    pub fn y(&self, j: usize) -> f64 {
        self.y_min + j as f64 * self.dy()
    }

    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.ny + j
    }

    pub fn coords(&self, k: usize) -> (f64, f64) {
        (self.x(k / self.ny), self.y(k % self.ny))
    }

    /// Same domain with a different resolution.
    pub fn resized(&self, nx: usize, ny: usize) -> QsResult<Self> {
        Self::new(self.x_min, self.x_max, self.y_min, self.y_max, nx, ny, self.periodic_y)
    }

    /// Same nodes seen as a non-periodic grid (for fields with a multiplier).
    pub fn unwrapped(&self) -> Self {
        if !self.periodic_y {
            return *self;
        }
        DomainGrid { y_max: self.y(self.ny - 1), periodic_y: false, period_y: 0.0, ..*self }
    }

    /// Nodes at least `margin` away from every non-periodic boundary.
    pub fn is_interior(&self, k: usize, margin: usize) -> bool {
        let (i, j) = (k / self.ny, k % self.ny);
        let xin = i >= margin && i + margin < self.nx;
        let yin = self.periodic_y || (j >= margin && j + margin < self.ny);
        xin && yin
    }

    pub fn interior(&self, margin: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&k| self.is_interior(k, margin))
    }
}

/// Values that finite-difference stencils can combine.
pub trait FdValue: Copy + std::ops::Add<Output = Self> + std::ops::Sub<Output = Self> + std::ops::Mul<f64, Output = Self> {}
impl FdValue for Quaternion {}
impl FdValue for HVector2 {}
impl FdValue for crate::quat::HMatrix2 {}

/// Central stencil of the given order (2, 4 or 6) at interior offsets,
/// degrading near a non-periodic boundary and one-sided second order on it.
fn diff_line<T: FdValue>(n: usize, h: f64, periodic: bool, order: usize, at: impl Fn(usize) -> T) -> Vec<T> {
    let get = |k: isize| -> T {
        let idx = if periodic { k.rem_euclid(n as isize) as usize } else { k as usize };
        at(idx)
    };
    let central = |k: isize, ord: usize| -> T {
        match ord {
            2 => (get(k + 1) - get(k - 1)) * (0.5 / h),
            4 => ((get(k + 1) - get(k - 1)) * 8.0 - (get(k + 2) - get(k - 2))) * (1.0 / (12.0 * h)),
            _ => ((get(k + 1) - get(k - 1)) * 45.0 - (get(k + 2) - get(k - 2)) * 9.0 + (get(k + 3) - get(k - 3)))
                * (1.0 / (60.0 * h)),
        }
    };
    let half = (order / 2).max(1);
    (0..n)
        .map(|k| {
            let k = k as isize;
            if periodic {
                return central(k, order);
            }
            let room = k.min(n as isize - 1 - k) as usize;
            if room == 0 {
                if k == 0 {
                    (get(1) * 4.0 - get(0) * 3.0 - get(2)) * (0.5 / h)
                } else {
                    (get(k) * 3.0 - get(k - 1) * 4.0 + get(k - 2)) * (0.5 / h)
                }
            } else {
                central(k, 2 * room.min(half))
            }
        })
        .collect()
}

/// x derivative of a grid field.
pub fn diff_x<T: FdValue>(grid: &DomainGrid, f: &[T], order: usize) -> Vec<T> {
    let mut out = vec![f[0]; f.len()];
    for j in 0..grid.ny {
        let d = diff_line(grid.nx, grid.dx(), false, order, |i| f[grid.idx(i, j)]);
        for (i, v) in d.into_iter().enumerate() {
            out[grid.idx(i, j)] = v;
        }
    }
    out
}

/// y derivative of a grid field (wraps around on periodic grids).
pub fn diff_y<T: FdValue>(grid: &DomainGrid, f: &[T], order: usize) -> Vec<T> {
    let mut out = vec![f[0]; f.len()];
    for i in 0..grid.nx {
        let d = diff_line(grid.ny, grid.dy(), grid.periodic_y, order, |j| f[grid.idx(i, j)]);
        out[i * grid.ny..(i + 1) * grid.ny].copy_from_slice(&d);
    }
    out
}

/// Margin of nodes affected by boundary-degraded stencils.
pub fn stencil_margin(order: usize) -> usize {
    (order / 2).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_indexing() {
        let g = DomainGrid::periodic(-1.0, 1.0, 9, 16).unwrap();
        assert_eq!(g.dx(), 0.25);
        assert!((g.y(16) - std::f64::consts::TAU).abs() < 1e-15);
        assert_eq!(g.coords(g.idx(3, 5)), (g.x(3), g.y(5)));
        assert!(DomainGrid::periodic(0.0, 1.0, 4, 16).is_err());
    }

    #[test]
    fn stencils_converge_at_their_order() {
        for order in [4usize, 6] {
            let mut errs = vec![];
            for n in [16usize, 32] {
                let g = DomainGrid::periodic(0.0, 1.0, n, n).unwrap();
                let f: Vec<Quaternion> = (0..g.len())
                    .map(|k| {
                        let (x, y) = g.coords(k);
                        Quaternion::new((2.0 * x).sin() * y.cos(), 0.0, 0.0, 0.0)
                    })
                    .collect();
                let fy = diff_y(&g, &f, order);
                let fx = diff_x(&g, &f, order);
                let mut e: f64 = 0.0;
                for k in g.interior(order / 2) {
                    let (x, y) = g.coords(k);
                    e = e.max((fy[k].w + (2.0 * x).sin() * y.sin()).abs());
                    e = e.max((fx[k].w - 2.0 * (2.0 * x).cos() * y.cos()).abs());
                }
                errs.push(e);
            }
            let rate = (errs[0] / errs[1]).log2();
            assert!(rate > order as f64 - 0.7, "order {order}: rate {rate}");
        }
    }
}
