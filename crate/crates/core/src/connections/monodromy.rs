use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use super::family::{complex_basis, from_complex, to_complex, ConnectionFamily};
use super::transport::transport_path;
use crate::error::{QsError, QsResult};
use crate::quat::HVector2;

/// Multipliers closer than this are treated as coinciding.
pub const RESONANCE_TOL: f64 = 1e-8;

/// Period monodromy of a connection along a closed y-loop.
#[derive(Clone, Debug)]
pub struct MonodromyResult {
    /// Complexified monodromy `M` with `φ(y₀+T) = M φ(y₀)` in complex coordinates.
    pub matrix: DMatrix<Complex64>,
    /// All eigenvalues of `M`.
    pub multipliers: Vec<Complex64>,
    /// The two distinct multiplier values `(h₁, h₂)`.
    pub pair: (Complex64, Complex64),
    /// Initial values of eigen-sections for `h₁` and `h₂` (each a basis of the eigenspace
    /// found numerically); at resonance the whole frame is returned for both.
    pub eigen_sections: (Vec<HVector2>, Vec<HVector2>),
    pub resonant: bool,
}

/// Loop specification: fixed `x₀`, from `y₀` over one period in `steps` edges.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Loop {
    pub x0: f64,
    pub y0: f64,
    pub period: f64,
    pub steps: usize,
}

impl Loop {
    pub fn path(&self) -> Vec<(f64, f64)> {
        (0..=self.steps).map(|k| (self.x0, self.y0 + self.period * k as f64 / self.steps as f64)).collect()
    }

    pub fn reversed_path(&self) -> Vec<(f64, f64)> {
        let mut p = self.path();
        p.reverse();
        p
    }
}

/// Monodromy matrix of the complex frame transported around `lp`.
pub fn monodromy_matrix(conn: &ConnectionFamily, lp: &Loop, substeps: usize) -> DMatrix<Complex64> {
    frame_matrix(conn, &lp.path(), substeps)
}

fn frame_matrix(conn: &ConnectionFamily, path: &[(f64, f64)], substeps: usize) -> DMatrix<Complex64> {
    let dim = conn.dim();
    let basis = complex_basis(dim);
    let end = transport_path(conn, path, substeps, &basis).pop().unwrap();
    let mut m = DMatrix::zeros(dim, dim);
    for (c, v) in end.iter().enumerate() {
        m.set_column(c, &to_complex(v, dim));
    }
    m
}

/// `‖M_forward · M_backward − I‖` for the loop and its reverse.
pub fn inverse_loop_residual(conn: &ConnectionFamily, lp: &Loop, substeps: usize) -> f64 {
    let f = frame_matrix(conn, &lp.path(), substeps);
    let b = frame_matrix(conn, &lp.reversed_path(), substeps);
    (&b * &f - DMatrix::identity(f.nrows(), f.ncols())).norm()
}

/// Period monodromy, its multipliers, and eigen-section initial values.
pub fn monodromy(conn: &ConnectionFamily, lp: &Loop, substeps: usize) -> QsResult<MonodromyResult> {
    let m = monodromy_matrix(conn, lp, substeps);
    analyze(m)
}

/// Eigen-analysis of a complexified monodromy matrix.
pub fn analyze(m: DMatrix<Complex64>) -> QsResult<MonodromyResult> {
    let dim = m.nrows();
    if !m.iter().all(|z| z.is_finite()) {
        return Err(QsError::DefectiveMonodromy("monodromy matrix is not finite".into()));
    }
    let multipliers = eigenvalues(&m)?;
    let pair = pair_multipliers(&multipliers);
    let resonant = (pair.0 - pair.1).norm() < RESONANCE_TOL;
    let eigen_sections = if resonant {
        let frame = complex_basis(dim);
        (frame.clone(), frame)
    } else {
        let mult = dim / 2;
        (eigenspace(&m, pair.0, mult), eigenspace(&m, pair.1, mult))
    };
    Ok(MonodromyResult { matrix: m, multipliers, pair, eigen_sections, resonant })
}

/// Eigenvalues by complex Schur decomposition.
pub fn eigenvalues(m: &DMatrix<Complex64>) -> QsResult<Vec<Complex64>> {
    let schur = nalgebra::linalg::Schur::try_new(m.clone(), 1e-15, 10_000)
        .ok_or_else(|| QsError::DefectiveMonodromy("Schur iteration did not converge".into()))?;
    let (_, t) = schur.unpack();
    Ok((0..t.nrows()).map(|k| t[(k, k)]).collect())
}

/// Groups the eigenvalues into two multiplier values.
///
/// On ℂ² the two eigenvalues are returned; on ℂ⁴ the pairing into two pairs
/// with the smallest intra-pair spread is chosen and each pair averaged. The
/// result is ordered by imaginary part descending, then real part descending.
pub fn pair_multipliers(ev: &[Complex64]) -> (Complex64, Complex64) {
    let (h1, h2) = match ev.len() {
        2 => (ev[0], ev[1]),
        4 => {
            let pairings = [((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))];
            let cost = |p: &((usize, usize), (usize, usize))| (ev[p.0 .0] - ev[p.0 .1]).norm() + (ev[p.1 .0] - ev[p.1 .1]).norm();
            let best = pairings.iter().min_by(|a, b| cost(a).total_cmp(&cost(b))).unwrap();
            ((ev[best.0 .0] + ev[best.0 .1]) * 0.5, (ev[best.1 .0] + ev[best.1 .1]) * 0.5)
        }
        _ => (ev[0], *ev.last().unwrap()),
    };
    if (h2.im, h2.re) > (h1.im, h1.re) {
        (h2, h1)
    } else {
        (h1, h2)
    }
}

/// Right-singular vectors of `M − hI` for its `k` smallest singular values.
pub fn eigenspace(m: &DMatrix<Complex64>, h: Complex64, k: usize) -> Vec<HVector2> {
    let n = m.nrows();
    let a = m - DMatrix::identity(n, n) * h;
    let svd = a.svd(false, true);
    let vt = svd.v_t.expect("requested V^H");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
    order
        .into_iter()
        .take(k)
        .map(|r| {
            let v: DVector<Complex64> = vt.row(r).transpose().map(|z| z.conj());
            from_complex(v.as_slice())
        })
        .collect()
}
