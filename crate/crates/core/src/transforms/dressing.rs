use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use serde::Serialize;

use super::darboux::{dual_samples, harmonic_pairs};
use crate::connections::SectionField;
use crate::error::{QsError, QsResult};
use crate::quat::{complex_inverse4, hmat_inv, HMatrix2, HVector2, Quaternion, SpectralPoint};
use crate::surfaces::field::sample_frames;
use crate::surfaces::{diff_x, diff_y, DomainGrid, ImmersionField, ModelRef, SurfaceModel};

type C = Complex64;

/// Smallest-to-largest singular value ratio below which a splitting is degenerate.
pub const SPLITTING_TOL: f64 = 1e-10;

/// Sample spectral parameters at which the dressed connection is compared
/// with `d + λη̂`.
pub const CHECK_LAMBDAS: [C; 3] = [C::new(0.3, 0.2), C::new(-1.1, 0.0), C::new(0.0, 2.0)];

/// Which factor the dressing matrix applies on its basis columns.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Splitting {
    /// Basis `[φ, φj, ψ, ψj]`: `γ` on `E = φℂ`, `1` on `Ej`, `σ` on `L`.
    OneStep,
    /// Basis `[φ₁, φ₂, φ₁j, φ₂j]`: `γ` on `W`, `1` on `Wj`.
    TwoStep,
}

/// Simple factor dressing matrix `r(λ) = B diag(…) B⁻¹` at one point.
#[derive(Clone, Debug)]
pub struct DressingMatrix {
    pub basis: Matrix4<C>,
    pub inverse: Matrix4<C>,
    pub rho: C,
    pub splitting: Splitting,
}

fn column(v: &HVector2) -> Vector4<C> {
    v.complexify()
}

fn outer_with(b: &Matrix4<C>, d: [C; 4], inv: &Matrix4<C>) -> Matrix4<C> {
    b * Matrix4::from_diagonal(&Vector4::from(d)) * inv
}

impl DressingMatrix {
    pub fn new(columns: [HVector2; 4], rho: C, splitting: Splitting) -> QsResult<Self> {
        let mut basis = Matrix4::zeros();
        for (c, v) in columns.iter().enumerate() {
            basis.set_column(c, &column(v));
        }
        let sv = basis.singular_values();
        let (lo, hi) = (sv.min(), sv.max());
        if !(hi > 0.0) || lo / hi < SPLITTING_TOL {
            return Err(QsError::SplittingDegenerate(format!("basis condition ratio {:.3e} below {SPLITTING_TOL:.0e}", lo / hi)));
        }
        let inverse = complex_inverse4(&basis).map_err(|e| QsError::SplittingDegenerate(e.to_string()))?;
        Ok(DressingMatrix { basis, inverse, rho, splitting })
    }

    /// `γ(λ) = ϱ̄(ϱ−λ)/(ϱ(ϱ̄−λ))` and `σ(λ) = ϱ̄/(ϱ̄−λ)`; `None` means `λ = ∞`.
    fn factors(&self, lambda: Option<C>) -> (C, C) {
        let (r, rb) = (self.rho, self.rho.conj());
        match lambda {
            Some(l) => (rb * (r - l) / (r * (rb - l)), rb / (rb - l)),
            None => (rb / r, C::new(0.0, 0.0)),
        }
    }

    fn diagonal(&self, lambda: Option<C>) -> [C; 4] {
        let (g, s) = self.factors(lambda);
        let one = C::new(1.0, 0.0);
        match self.splitting {
            Splitting::OneStep => [g, one, s, s],
            Splitting::TwoStep => [g, g, one, one],
        }
    }

    /// `r(λ)`; `None` evaluates the limit at `λ = ∞`.
    pub fn at(&self, lambda: Option<C>) -> Matrix4<C> {
        outer_with(&self.basis, self.diagonal(lambda), &self.inverse)
    }

    /// Projection onto the `c`-th basis column along the others.
    pub fn projection(&self, c: usize) -> Matrix4<C> {
        let mut d = [C::new(0.0, 0.0); 4];
        d[c] = C::new(1.0, 0.0);
        outer_with(&self.basis, d, &self.inverse)
    }

    /// Derivative of `B D B⁻¹` given the derivative of the basis.
    fn derivative(&self, db: &Matrix4<C>, d: [C; 4]) -> Matrix4<C> {
        let dm = Matrix4::from_diagonal(&Vector4::from(d));
        db * dm * self.inverse - self.basis * dm * self.inverse * db * self.inverse
    }
}

/// Largest column of a complex matrix, read as a quaternionic vector.
fn image_line(m: &Matrix4<C>) -> HVector2 {
    let best = (0..4).max_by(|&a, &b| m.column(a).norm().total_cmp(&m.column(b).norm())).unwrap();
    HVector2::from_complex4(&m.column(best).into_owned())
}

/// Diagnostics of a simple factor dressing.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct SfdResiduals {
    /// `max ‖r_λ d_λ r_λ⁻¹ − (d + λη̂)‖` over the sample `λ`, relative.
    pub dressing: f64,
    /// `|η̂_x η̂_y| + |η̂_x²| + |η̂ ψ̂|`, relative.
    pub nilpotent: f64,
    /// `|dη̂|` relative to `|η̂|`.
    pub closed: f64,
    /// Failure of `η̂` (or the dressed line) to be quaternionic.
    pub quaternionic: f64,
}

#[derive(Clone, Debug)]
pub struct SfdResult {
    pub surface: ImmersionField,
    /// `(η̂(∂x), η̂(∂y))` per node; empty for the two-step dressing.
    pub eta: Vec<(HMatrix2, HMatrix2)>,
    pub residuals: SfdResiduals,
}

fn retraction(f: Quaternion, dfd: Quaternion) -> Matrix4<C> {
    HMatrix2::new(f * dfd, -(f * dfd * f), dfd, -(dfd * f)).complexify()
}

fn rel(a: f64, b: f64) -> f64 {
    a / b.max(f64::MIN_POSITIVE)
}

/// Simple factor dressing of the isothermic family by the `𝔡_ϱ`-stable line
/// `E = φℂ`: `r(λ) = B diag(γ, 1, σ, σ) B⁻¹` on `[φ, φj, ψ, ψj]`. The dressed
/// surface is the affine coordinate of the image of `r(∞)`, and the dressed
/// family is checked to be `d + λη̂` with `η̂ = −(π_E dπ_L/ϱ + π_{Ej} dπ_L/ϱ̄)`.
pub fn sfd_isothermic(f: &dyn SurfaceModel, dual: &dyn SurfaceModel, phi: &SectionField, rho: C) -> QsResult<SfdResult> {
    if rho.norm() == 0.0 {
        return Err(QsError::DegenerateSpectral("ϱ = 0".into()));
    }
    let grid = phi.grid;
    let frames = sample_frames(f, &grid);
    let (_, dxs, dys) = dual_samples(dual, &grid);
    let rq = Quaternion::from_complex(rho);
    let j = Quaternion::J;
    let n = grid.len();
    let mut values = Vec::with_capacity(n);
    let mut eta = Vec::with_capacity(n);
    let mut res = SfdResiduals::default();
    let zero = C::new(0.0, 0.0);
    let one = C::new(1.0, 0.0);
    for k in 0..n {
        let p = &frames[k];
        let v = &phi.values[k];
        let big = HVector2::new(v.a + p.f * v.b, v.b);
        let psi = HVector2::new(p.f, Quaternion::ONE);
        let r = DressingMatrix::new([big, big.rmul(j), psi, psi.rmul(j)], rho, Splitting::OneStep)?;
        let line = image_line(&r.at(None));
        let fhat = line.affine();
        values.push(fhat);

        let pe = r.projection(0);
        let pej = r.projection(1);
        let mut eta_k = [Matrix4::zeros(), Matrix4::zeros()];
        for (dir, (df, dfd)) in [(p.fx, dxs[k]), (p.fy, dys[k])].into_iter().enumerate() {
            let dbeta = -(dfd * v.a * rq);
            let dbig = HVector2::new(p.f * dbeta, dbeta);
            let dpsi = HVector2::new(df, Quaternion::ZERO);
            let mut db = Matrix4::zeros();
            for (c, w) in [dbig, dbig.rmul(j), dpsi, dpsi.rmul(j)].iter().enumerate() {
                db.set_column(c, &column(w));
            }
            let dpl = r.derivative(&db, [zero, zero, one, one]);
            let e = -(pe * dpl / rho + pej * dpl / rho.conj());
            let eta_ret = retraction(p.f, dfd);
            for &l in &CHECK_LAMBDAS {
                let d = r.diagonal(Some(l));
                let dinv = d.map(|z| one / z);
                let rl = outer_with(&r.basis, d, &r.inverse);
                let drinv = r.derivative(&db, dinv);
                let dressed = rl * drinv + rl * eta_ret * r.at_inverse(l) * l;
                let scale = (eta_ret.norm() + e.norm()) * l.norm();
                res.dressing = res.dressing.max(rel((dressed - e * l).norm(), scale));
            }
            eta_k[dir] = e;
        }
        let psi_hat = Vector4::from(HVector2::new(fhat, Quaternion::ONE).complexify());
        let scale = eta_k[0].norm() * eta_k[1].norm();
        let nil = (eta_k[0] * eta_k[1]).norm() + (eta_k[0] * eta_k[0]).norm() + (eta_k[1] * eta_k[1]).norm();
        let kill = (eta_k[0] * psi_hat).norm() + (eta_k[1] * psi_hat).norm();
        res.nilpotent = res.nilpotent.max(rel(nil, scale)).max(rel(kill, (eta_k[0].norm() + eta_k[1].norm()) * psi_hat.norm()));
        let qx = HMatrix2::from_complex4(&eta_k[0]);
        let qy = HMatrix2::from_complex4(&eta_k[1]);
        let quat = (qx.complexify() - eta_k[0]).norm() + (qy.complexify() - eta_k[1]).norm();
        res.quaternionic = res.quaternionic.max(rel(quat, eta_k[0].norm() + eta_k[1].norm()));
        eta.push((qx, qy));
    }
    res.closed = closedness(&grid, &eta);
    let surface = ImmersionField::from_values(grid.unwrapped(), values);
    Ok(SfdResult { surface, eta, residuals: res })
}

impl DressingMatrix {
    fn at_inverse(&self, lambda: C) -> Matrix4<C> {
        let d = self.diagonal(Some(lambda)).map(|z| C::new(1.0, 0.0) / z);
        outer_with(&self.basis, d, &self.inverse)
    }
}

/// `max |∂_x η̂_y − ∂_y η̂_x| / max |η̂|` over interior nodes.
fn closedness(grid: &DomainGrid, eta: &[(HMatrix2, HMatrix2)]) -> f64 {
    let g = grid.unwrapped();
    let ex: Vec<HMatrix2> = eta.iter().map(|e| e.0).collect();
    let ey: Vec<HMatrix2> = eta.iter().map(|e| e.1).collect();
    let dyx = diff_y(&g, &ex, 6);
    let dxy = diff_x(&g, &ey, 6);
    let scale = eta.iter().map(|e| e.0.complexify().norm().max(e.1.complexify().norm())).fold(0.0, f64::max);
    let worst = g.interior(3).map(|k| (dxy[k] - dyx[k]).complexify().norm()).fold(0.0, f64::max);
    rel(worst, scale)
}

/// Two-step simple factor dressing by `W = span{φ₁, φ₂}` for two
/// `𝔡_ϱ`-parallel sections: `f̂` is the affine coordinate of `r(∞)L`
/// with `r(∞) = π_W ϱ̄/ϱ + π_{Wj}`.
pub fn sfd_two_step(f: &dyn SurfaceModel, phi1: &SectionField, phi2: &SectionField, rho: C) -> QsResult<SfdResult> {
    let grid = phi1.grid;
    if phi2.grid != grid {
        return Err(QsError::ConfigInvalid("the two sections live on different grids".into()));
    }
    let frames = sample_frames(f, &grid);
    let j = Quaternion::J;
    let mut values = Vec::with_capacity(grid.len());
    let mut quat: f64 = 0.0;
    for k in 0..grid.len() {
        let p = &frames[k];
        let lift = |v: &HVector2| HVector2::new(v.a + p.f * v.b, v.b);
        let (a, b) = (lift(&phi1.values[k]), lift(&phi2.values[k]));
        let r = DressingMatrix::new([a, b, a.rmul(j), b.rmul(j)], rho, Splitting::TwoStep)?;
        let rinf = r.at(None);
        let psi = HVector2::new(p.f, Quaternion::ONE);
        let v1 = HVector2::from_complex4(&(rinf * psi.complexify()));
        let v2 = HVector2::from_complex4(&(rinf * psi.rmul(j).complexify()));
        let (q1, q2) = (v1.affine(), v2.affine());
        quat = quat.max(rel((q1 - q2).norm(), q1.norm() + 1.0));
        values.push(q1);
    }
    let surface = ImmersionField::from_values(grid.unwrapped(), values);
    let residuals = SfdResiduals { quaternionic: quat, ..Default::default() };
    Ok(SfdResult { surface, eta: Vec::new(), residuals })
}

/// Simple factor dressing of the harmonic Gauss map of a CMC surface:
/// `f̌ = f − α(b/(a−1))α⁻¹`.
pub fn cmc_sfd(f: &dyn SurfaceModel, alpha: &SectionField, sp: SpectralPoint) -> QsResult<ImmersionField> {
    let c = Quaternion::from_complex(sp.b_over_a_minus_one()?);
    let frames = sample_frames(f, &alpha.grid);
    let values = frames.iter().zip(&alpha.values).map(|(p, v)| p.f - v.a * c * v.a.inv()).collect();
    Ok(ImmersionField::from_values(alpha.grid.unwrapped(), values))
}

/// Simple factor dressing of the conformal Gauss map by the bundle spanned by
/// `en` and `eα + ψβ`: the affine coordinate of `(S + Φ(b/(a−1))Φ⁻¹)(ψβ)` with
/// `S = F(N 0; 1 −N)F⁻¹` and `Φ = F(n α; 0 β)`.
pub fn cw_sfd(f: &ModelRef, alpha: &SectionField, sp: SpectralPoint, n: Quaternion) -> QsResult<ImmersionField> {
    if !(n.norm() > 0.0) {
        return Err(QsError::ConfigInvalid("the constant n must be invertible".into()));
    }
    let c = Quaternion::from_complex(sp.b_over_a_minus_one()?);
    let frames = sample_frames(f.as_ref(), &alpha.grid);
    let pairs = harmonic_pairs(&frames, alpha, &sp);
    let mut values = Vec::with_capacity(frames.len());
    for (p, v) in frames.iter().zip(&pairs) {
        let frame = HMatrix2::frame(p.f);
        let frame_inv = HMatrix2::frame(-p.f);
        let s = frame * HMatrix2::new(p.n, Quaternion::ZERO, Quaternion::ONE, -p.n) * frame_inv;
        let phi = frame * HMatrix2::new(n, v.a, Quaternion::ZERO, v.b);
        let m = s + phi * HMatrix2::scalar(c) * hmat_inv(&phi)?;
        let psi_beta = HVector2::new(p.f * v.b, v.b);
        values.push(m.apply(psi_beta).affine());
    }
    Ok(ImmersionField::from_values(alpha.grid.unwrapped(), values))
}
