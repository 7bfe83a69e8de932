use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::family::ConnectionFamily;
use super::monodromy::{monodromy, Loop};
use crate::error::{QsError, QsResult};

/// Rectangular window in the `ϱ`-plane sampled at `n_re × n_im` points,
/// endpoints included. A zero count gives an empty sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepWindow {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub n_re: usize,
    pub n_im: usize,
}

impl SweepWindow {
    fn axis(lo: f64, hi: f64, n: usize, k: usize) -> f64 {
        if n <= 1 {
            lo
        } else if k + 1 == n {
            hi
        } else {
            lo + (hi - lo) * k as f64 / (n - 1) as f64
        }
    }

    /// Sample points, real part outer, imaginary part inner.
    pub fn points(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.n_re * self.n_im);
        for a in 0..self.n_re {
            for b in 0..self.n_im {
                out.push(Complex64::new(
                    Self::axis(self.re_min, self.re_max, self.n_re, a),
                    Self::axis(self.im_min, self.im_max, self.n_im, b),
                ));
            }
        }
        out
    }

    pub fn validate(&self) -> QsResult<()> {
        let finite = [self.re_min, self.re_max, self.im_min, self.im_max].iter().all(|v| v.is_finite());
        if !finite || self.re_max < self.re_min || self.im_max < self.im_min {
            return Err(QsError::ConfigInvalid("sweep window bounds must be finite with min ≤ max".into()));
        }
        Ok(())
    }
}

/// One sample of a multiplier sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub rho: Complex64,
    pub h1: Complex64,
    pub h2: Complex64,
    /// Multipliers coincide within tolerance, or the sample brackets a coincidence.
    pub resonant: bool,
}

impl SweepRow {
    pub fn gap(&self) -> f64 {
        (self.h1 - self.h2).norm()
    }
}

/// Period monodromy of `build(ϱ)` at every window sample, in parallel.
///
/// A sample is flagged resonant when its multipliers coincide within
/// [`super::RESONANCE_TOL`], or when it is not on the window edge and its multiplier
/// gap is a local minimum over its neighbours along every sampled axis: the gap
/// `|h₁ − h₂|` vanishes only at resonance, so sampled minima bracket one.
pub fn multiplier_sweep<B>(build: B, lp: &Loop, substeps: usize, window: &SweepWindow) -> QsResult<Vec<SweepRow>>
where
    B: Fn(Complex64) -> QsResult<ConnectionFamily> + Sync,
{
    window.validate()?;
    let rows: Vec<SweepRow> = window
        .points()
        .into_par_iter()
        .map(|rho| {
            let m = monodromy(&build(rho)?, lp, substeps)?;
            Ok(SweepRow { rho, h1: m.pair.0, h2: m.pair.1, resonant: m.resonant })
        })
        .collect::<QsResult<_>>()?;
    Ok(mark_bracketed(rows, window))
}

fn mark_bracketed(mut rows: Vec<SweepRow>, w: &SweepWindow) -> Vec<SweepRow> {
    let gaps: Vec<f64> = rows.iter().map(SweepRow::gap).collect();
    let at = |a: usize, b: usize| gaps[a * w.n_im + b];
    let axes = [(w.n_re, true), (w.n_im, false)];
    if axes.iter().all(|(n, _)| *n < 3) {
        return rows;
    }
    for a in 0..w.n_re {
        for b in 0..w.n_im {
            let g = at(a, b);
            let mut is_min = true;
            for &(n, along_re) in &axes {
                if n < 3 {
                    continue;
                }
                let k = if along_re { a } else { b };
                if k == 0 || k == n - 1 {
                    is_min = false;
                    break;
                }
                let (lo, hi) = if along_re { (at(a - 1, b), at(a + 1, b)) } else { (at(a, b - 1), at(a, b + 1)) };
                if g > lo || g > hi {
                    is_min = false;
                    break;
                }
            }
            if is_min {
                rows[a * w.n_im + b].resonant = true;
            }
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connections::family::model;
    use crate::surfaces::{ParallelModel, Revolution};
    use std::f64::consts::TAU;
    use std::sync::Arc;

    fn build(rho: Complex64) -> QsResult<ConnectionFamily> {
        let f = model(Revolution::cylinder());
        ConnectionFamily::isothermic(f.clone(), Arc::new(ParallelModel::new(f)), rho)
    }

    #[test]
    fn empty_window_gives_no_rows() {
        let w = SweepWindow { re_min: 0.0, re_max: 1.0, im_min: 0.0, im_max: 0.0, n_re: 0, n_im: 4 };
        let lp = Loop { x0: 0.0, y0: 0.0, period: TAU, steps: 16 };
        assert!(multiplier_sweep(build, &lp, 8, &w).unwrap().is_empty());
    }

    #[test]
    fn real_segment_inside_unit_interval_has_conjugate_unit_multipliers() {
        let w = SweepWindow { re_min: -0.2, re_max: 0.9, im_min: 0.0, im_max: 0.0, n_re: 6, n_im: 1 };
        let lp = Loop { x0: 0.0, y0: 0.0, period: TAU, steps: 64 };
        for r in multiplier_sweep(build, &lp, 16, &w).unwrap() {
            assert!((r.h1.norm() - 1.0).abs() < 1e-8 && (r.h1 - r.h2.conj()).norm() < 1e-8, "{r:?}");
        }
    }

    #[test]
    fn coarse_window_brackets_cylinder_resonances() {
        let w = SweepWindow { re_min: -10.0, re_max: 2.0, im_min: -1.0, im_max: 1.0, n_re: 64, n_im: 16 };
        let lp = Loop { x0: 0.0, y0: 0.0, period: TAU, steps: 32 };
        let rows = multiplier_sweep(build, &lp, 8, &w).unwrap();
        let flagged: Vec<f64> = rows.iter().filter(|r| r.resonant).map(|r| r.rho.re).collect();
        for target in [-3.0, -8.0] {
            assert!(flagged.iter().any(|x| (x - target).abs() < 0.2), "{target}: {flagged:?}");
        }
        assert!(flagged.iter().all(|x| [1.0, 0.0, -3.0, -8.0].iter().any(|t| (x - t).abs() < 0.2)), "{flagged:?}");
    }
}
