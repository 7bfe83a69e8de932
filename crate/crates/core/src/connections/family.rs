use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::QsResult;
use crate::quat::{HVector2, Quaternion, SpectralPoint};
use crate::surfaces::{ModelRef, ParallelModel, SurfaceModel};

/// Which associated family a connection belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// `dα = −df β`, `dβ = −df^d α ϱ` on ℍ² with right-i (ℂ⁴).
    IsothermicRho,
    /// `dα = −½ dF (N_F α(a−1) + αb)` on ℍ with right-i (ℂ²).
    HarmonicGaussN,
    /// `dφ = −½ (f X, X)`, `X = dg(N_g φ₂(a−1) + φ₂ b)` on ℂ⁴.
    ConformalGaussS,
}

/// Grid direction of a connection evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    X,
    Y,
}

impl Direction {
    pub fn vector(self) -> (f64, f64) {
        match self {
            Direction::X => (1.0, 0.0),
            Direction::Y => (0.0, 1.0),
        }
    }
}

/// One member of an associated family of flat connections `d + ω`.
///
/// Parallel sections solve `dφ = −ωφ`; complex scalars act on the right.
#[derive(Clone)]
pub struct ConnectionFamily {
    pub kind: FamilyKind,
    /// `f` (or the surface `F` carrying the harmonic Gauss map).
    pub surface: ModelRef,
    /// The dual `f^d` (isothermic family) or the parallel surface `g` (conformal family).
    pub partner: Option<ModelRef>,
    pub spectral: SpectralPoint,
}

/// The connection form at a point and direction, ready to act on sections.
#[derive(Clone, Copy, Debug)]
pub struct LocalForm {
    kind: FamilyKind,
    f: Quaternion,
    df: Quaternion,
    dpartner: Quaternion,
    n: Quaternion,
    spectral: SpectralPoint,
}

impl LocalForm {
    /// `ω(v)φ`.
    pub fn apply(&self, phi: &HVector2) -> HVector2 {
        let am1 = self.spectral.a - 1.0;
        match self.kind {
            FamilyKind::IsothermicRho => HVector2::new(self.df * phi.b, (self.dpartner * phi.a).mul_c(self.spectral.rho)),
            FamilyKind::HarmonicGaussN => {
                let inner = (self.n * phi.a).mul_c(am1) + phi.a.mul_c(self.spectral.b);
                HVector2::new(self.df * inner * 0.5, Quaternion::ZERO)
            }
            FamilyKind::ConformalGaussS => {
                let inner = (self.n * phi.b).mul_c(am1) + phi.b.mul_c(self.spectral.b);
                let x = self.dpartner * inner * 0.5;
                HVector2::new(self.f * x, x)
            }
        }
    }
}

impl ConnectionFamily {
    /// Isothermic family of `f` with the given dual and spectral value `ϱ`.
    pub fn isothermic(f: ModelRef, dual: ModelRef, rho: Complex64) -> QsResult<Self> {
        let spectral = SpectralPoint::from_rho(rho)?.0;
        Ok(ConnectionFamily { kind: FamilyKind::IsothermicRho, surface: f, partner: Some(dual), spectral })
    }

    /// Harmonic-Gauss-map family of `F` (its own left normal is used).
    pub fn harmonic(surface: ModelRef, mu: Complex64) -> QsResult<Self> {
        let spectral = SpectralPoint::from_mu(mu)?;
        Ok(ConnectionFamily { kind: FamilyKind::HarmonicGaussN, surface, partner: None, spectral })
    }

    /// Harmonic family from prescribed `(a, b)`, e.g. a chosen branch for a given `ϱ`.
    pub fn harmonic_at(surface: ModelRef, spectral: SpectralPoint) -> Self {
        ConnectionFamily { kind: FamilyKind::HarmonicGaussN, surface, partner: None, spectral }
    }

    /// Conformal-Gauss-map family of a CMC surface `f` with parallel surface `g = f + N`.
    pub fn conformal(f: ModelRef, mu: Complex64) -> QsResult<Self> {
        let spectral = SpectralPoint::from_mu(mu)?;
        let g: ModelRef = Arc::new(ParallelModel::new(f.clone()));
        Ok(ConnectionFamily { kind: FamilyKind::ConformalGaussS, surface: f, partner: Some(g), spectral })
    }

    pub fn conformal_at(f: ModelRef, spectral: SpectralPoint) -> Self {
        let g: ModelRef = Arc::new(ParallelModel::new(f.clone()));
        ConnectionFamily { kind: FamilyKind::ConformalGaussS, surface: f, partner: Some(g), spectral }
    }

    /// Complex dimension of the section space.
    pub fn dim(&self) -> usize {
        match self.kind {
            FamilyKind::HarmonicGaussN => 2,
            _ => 4,
        }
    }

    /// Connection form at `(x, y)` applied to the tangent vector `(vx, vy)`.
    pub fn local(&self, x: f64, y: f64, vx: f64, vy: f64) -> LocalForm {
        let s = self.surface.frame(x, y);
        let (dpartner, n) = match (&self.partner, self.kind) {
            (Some(p), FamilyKind::ConformalGaussS) => {
                let g = p.frame(x, y);
                (g.df(vx, vy), g.n)
            }
            (Some(p), _) => {
                let (px, py) = p.tangents(x, y);
                (px * vx + py * vy, s.n)
            }
            (None, _) => (Quaternion::ZERO, s.n),
        };
        LocalForm { kind: self.kind, f: s.f, df: s.df(vx, vy), dpartner, n, spectral: self.spectral }
    }

    /// The endomorphism `ω(∂_dir)` at a point as a complex matrix (`dim × dim`).
    pub fn omega_eval(&self, x: f64, y: f64, dir: Direction) -> DMatrix<Complex64> {
        let (vx, vy) = dir.vector();
        let form = self.local(x, y, vx, vy);
        let basis = complex_basis(self.dim());
        let mut m = DMatrix::zeros(self.dim(), self.dim());
        for (c, e) in basis.iter().enumerate() {
            let v = to_complex(&form.apply(e), self.dim());
            m.set_column(c, &v);
        }
        m
    }

    /// Same family at another spectral point.
    pub fn with_spectral(&self, spectral: SpectralPoint) -> Self {
        ConnectionFamily { spectral, ..self.clone() }
    }

    pub fn describe(&self) -> String {
        format!("{:?} of {} at μ = {}, ϱ = {}", self.kind, self.surface.describe(), self.spectral.mu, self.spectral.rho)
    }
}

/// Canonical complex basis of ℂ² ⊂ ℂ⁴ or ℂ⁴ as quaternionic vectors.
pub fn complex_basis(dim: usize) -> Vec<HVector2> {
    (0..dim)
        .map(|k| {
            let mut v = nalgebra::Vector4::<Complex64>::zeros();
            v[k] = Complex64::new(1.0, 0.0);
            HVector2::from_complex4(&v)
        })
        .collect()
}

/// Complex coordinates of a section value, truncated to `dim`.
pub fn to_complex(v: &HVector2, dim: usize) -> nalgebra::DVector<Complex64> {
    let c = v.complexify();
    nalgebra::DVector::from_iterator(dim, c.iter().copied().take(dim))
}

/// Section value from complex coordinates (`dim` 2 or 4).
pub fn from_complex(c: &[Complex64]) -> HVector2 {
    let mut v = nalgebra::Vector4::<Complex64>::zeros();
    for (k, z) in c.iter().enumerate() {
        v[k] = *z;
    }
    HVector2::from_complex4(&v)
}

/// A corrupted isothermic connection that uses `f` itself as its dual.
/// It is not flat and serves as a negative control.
pub fn corrupted_isothermic(f: ModelRef, rho: Complex64) -> QsResult<ConnectionFamily> {
    ConnectionFamily::isothermic(f.clone(), f, rho)
}

/// Convenience: the model `Arc` of a concrete surface.
pub fn model<M: SurfaceModel + 'static>(m: M) -> ModelRef {
    Arc::new(m)
}
