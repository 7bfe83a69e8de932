use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::connections::{ConnectionFamily, SectionField};
use crate::dmath;
use crate::error::{QsError, QsResult};
use crate::jet::QJet;
use crate::quat::{HVector2, Quaternion, SpectralPoint};
use crate::surfaces::{DomainGrid, ModelRef, ParallelModel, Revolution};

/// The four complex basis sections of the cylinder's isothermic family, and the
/// two extra families at the degenerate value `ϱ = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CylinderSection {
    OnePlus,
    OneMinus,
    TwoPlus,
    TwoMinus,
    /// `ϱ = 1`: `e^{iy/2}(1+j)e^{ix/2}`, a section with multiplier −1.
    DegenerateMultiplier,
    /// `ϱ = 1`: `e^{iy/2}((1+j)e^{ix/2} + (1−iy)(1+j)e^{−ix/2})`, without multiplier.
    DegenerateLinear,
}

impl CylinderSection {
    pub const GENERIC: [CylinderSection; 4] =
        [CylinderSection::OnePlus, CylinderSection::OneMinus, CylinderSection::TwoPlus, CylinderSection::TwoMinus];

    /// `+1` for sections parallel for the harmonic family at `μ₊`, `−1` for `μ₋`.
    pub fn branch(self) -> f64 {
        match self {
            CylinderSection::OnePlus | CylinderSection::TwoPlus => 1.0,
            CylinderSection::OneMinus | CylinderSection::TwoMinus => -1.0,
            _ => 1.0,
        }
    }
}

/// Closed-form parallel sections of the cylinder `½(ix + je^{−iy})` for the
/// isothermic family with dual `g = f + N`.
#[derive(Clone, Debug)]
pub struct CylinderOracle {
    pub rho: Complex64,
    sqrt_rho: Complex64,
    sqrt_one_minus: Complex64,
    pub degenerate: bool,
}

impl CylinderOracle {
    pub fn new(rho: Complex64) -> QsResult<Self> {
        if rho.norm() == 0.0 || !rho.is_finite() {
            return Err(QsError::DegenerateSpectral(format!("ϱ = {rho}: the cylinder oracle needs ϱ ≠ 0")));
        }
        let one = Complex64::new(1.0, 0.0);
        Ok(CylinderOracle { rho, sqrt_rho: dmath::csqrt(rho), sqrt_one_minus: dmath::csqrt(one - rho), degenerate: (rho - one).norm() < 1e-14 })
    }

    pub fn surface() -> Revolution {
        Revolution::cylinder()
    }

    pub fn surface_model() -> ModelRef {
        Arc::new(Revolution::cylinder())
    }

    /// `g = f + N`.
    pub fn dual_model() -> ModelRef {
        Arc::new(ParallelModel::new(Self::surface_model()))
    }

    /// The isothermic connection the sections are parallel for.
    pub fn connection(&self) -> ConnectionFamily {
        ConnectionFamily::isothermic(Self::surface_model(), Self::dual_model(), self.rho).expect("finite ϱ")
    }

    /// `(a, ±b)` with `a = 1−2ϱ`, `b = 2√ϱ√(1−ϱ)`; the `μ₊` point for `branch = 1`.
    pub fn spectral(&self, branch: f64) -> SpectralPoint {
        let a = Complex64::new(1.0, 0.0) - self.rho * 2.0;
        let b = self.sqrt_rho * self.sqrt_one_minus * 2.0 * branch;
        SpectralPoint { mu: a + Complex64::i() * b, rho: self.rho, a, b }
    }

    /// Harmonic-Gauss-map connection at the branch's `μ`.
    pub fn harmonic_connection(&self, branch: f64) -> ConnectionFamily {
        ConnectionFamily::harmonic_at(Self::surface_model(), self.spectral(branch))
    }

    /// Multiplier of the section over `y ↦ y + 2π`.
    pub fn multiplier(&self, which: CylinderSection) -> Complex64 {
        let h = |sign: f64| -dmath::cexp(Complex64::i() * PI * self.sqrt_one_minus * sign);
        match which {
            CylinderSection::OnePlus | CylinderSection::TwoMinus => h(1.0),
            CylinderSection::OneMinus | CylinderSection::TwoPlus => h(-1.0),
            CylinderSection::DegenerateMultiplier | CylinderSection::DegenerateLinear => Complex64::new(-1.0, 0.0),
        }
    }

    /// The pair `−e^{±πi√(1−ϱ)}`.
    pub fn multipliers(&self) -> (Complex64, Complex64) {
        (self.multiplier(CylinderSection::OnePlus), self.multiplier(CylinderSection::OneMinus))
    }

    fn check(&self, which: CylinderSection) -> QsResult<()> {
        let deg = matches!(which, CylinderSection::DegenerateMultiplier | CylinderSection::DegenerateLinear);
        if deg != self.degenerate {
            return Err(QsError::DegenerateSpectral(if deg {
                "the degenerate sections exist only at ϱ = 1".into()
            } else {
                "at ϱ = 1 the generic basis collapses; use the degenerate pair".into()
            }));
        }
        Ok(())
    }

    /// Second-order jet of `α` at `(x, y)`.
    pub fn alpha_jet(&self, which: CylinderSection, x: f64, y: f64) -> QsResult<QJet> {
        self.check(which)?;
        let zero = Complex64::new(0.0, 0.0);
        let i = Complex64::i();
        let left = QJet::cexp_linear(zero, zero, i * 0.5, x, y);
        let q = Quaternion::from_complex;
        let jet = match which {
            CylinderSection::DegenerateMultiplier => {
                left.rmul(Quaternion::ONE + Quaternion::J) * QJet::cexp_linear(zero, i * 0.5, zero, x, y)
            }
            CylinderSection::DegenerateLinear => {
                let a = left.rmul(Quaternion::ONE + Quaternion::J) * QJet::cexp_linear(zero, i * 0.5, zero, x, y);
                let lin = QJet { v: Quaternion::ONE - Quaternion::I * y, y: -Quaternion::I, ..Default::default() };
                let b = left * lin * QJet::constant(Quaternion::ONE + Quaternion::J) * QJet::cexp_linear(zero, -i * 0.5, zero, x, y);
                a + b
            }
            _ => {
                let first = matches!(which, CylinderSection::OnePlus | CylinderSection::OneMinus);
                let pm = which.branch();
                let (sr, so) = (self.sqrt_rho, self.sqrt_one_minus);
                let one = Complex64::new(1.0, 0.0);
                let (c, sign) = if first {
                    (q(sr) + Quaternion::J * q(one + so * pm), 1.0)
                } else {
                    (q(-sr) + Quaternion::J * q(one - so * pm), -1.0)
                };
                let right = QJet::cexp_linear(zero, i * 0.5 * sr * sign, i * 0.5 * so * pm * sign, x, y);
                left.rmul(c) * right
            }
        };
        Ok(jet)
    }

    /// `(α, β)` with `β = −f_x⁻¹α_x = 2iα_x`, together with `(φ_x, φ_y)`.
    pub fn section_with_derivatives(&self, which: CylinderSection, x: f64, y: f64) -> QsResult<[HVector2; 3]> {
        let a = self.alpha_jet(which, x, y)?;
        let two_i = Quaternion::I * 2.0;
        Ok([
            HVector2::new(a.v, two_i * a.x),
            HVector2::new(a.x, two_i * a.xx),
            HVector2::new(a.y, two_i * a.xy),
        ])
    }

    pub fn section(&self, which: CylinderSection, x: f64, y: f64) -> QsResult<HVector2> {
        Ok(self.section_with_derivatives(which, x, y)?[0])
    }

    /// `β = ½(Nα(a−1) ± αb)` from the harmonic-family formula.
    pub fn beta_formula(&self, which: CylinderSection, x: f64, y: f64) -> QsResult<Quaternion> {
        let alpha = self.alpha_jet(which, x, y)?.v;
        let sp = self.spectral(which.branch());
        let n = Self::surface().normal_formula(x, y);
        Ok(((n * alpha).mul_c(sp.a - 1.0) + alpha.mul_c(sp.b)) * 0.5)
    }

    /// `(|φ_x + ω_xφ| + |φ_y + ω_yφ|)/|φ|` with exact derivatives.
    pub fn parallel_residual(&self, which: CylinderSection, x: f64, y: f64) -> QsResult<f64> {
        let conn = self.connection();
        let [phi, px, py] = self.section_with_derivatives(which, x, y)?;
        let rx = px + conn.local(x, y, 1.0, 0.0).apply(&phi);
        let ry = py + conn.local(x, y, 0.0, 1.0).apply(&phi);
        Ok((rx.norm() + ry.norm()) / (phi.norm() + px.norm() + py.norm()))
    }

    /// The section sampled on a grid, with exact parallelism residual.
    pub fn section_field(&self, which: CylinderSection, grid: &DomainGrid) -> QsResult<SectionField> {
        let mut values = Vec::with_capacity(grid.len());
        let mut res: f64 = 0.0;
        for k in 0..grid.len() {
            let (x, y) = grid.coords(k);
            values.push(self.section(which, x, y)?);
            res = res.max(self.parallel_residual(which, x, y)?);
        }
        Ok(SectionField::from_values(*grid, values, res))
    }
}

/// Resonance points `ϱ_k = 1 − k²`, `k = 2..=k_max`, of the cylinder (dual `g = f + N`).
pub fn cylinder_resonances(k_max: u32) -> Vec<f64> {
    (2..=k_max).map(|k| 1.0 - (k * k) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connections::transport::transport_segment;
    use crate::quat::c64;

    #[test]
    fn generic_sections_are_parallel() {
        for rho in [c64(0.5, 0.0), c64(1.0, 1.0), c64(-3.0, 0.0), c64(2.5, -4.0)] {
            let o = CylinderOracle::new(rho).unwrap();
            for w in CylinderSection::GENERIC {
                for (x, y) in [(0.0, 0.0), (0.7, -1.2), (-1.3, 4.0)] {
                    assert!(o.parallel_residual(w, x, y).unwrap() < 1e-13);
                    let b = o.section(w, x, y).unwrap().b;
                    assert!((b - o.beta_formula(w, x, y).unwrap()).norm() < 1e-12 * (1.0 + b.norm()));
                }
            }
        }
    }

    #[test]
    fn degenerate_pair_at_rho_one() {
        let o = CylinderOracle::new(c64(1.0, 0.0)).unwrap();
        assert!(o.degenerate);
        let sp = o.spectral(1.0);
        assert!((sp.mu + 1.0).norm() < 1e-15);
        for w in [CylinderSection::DegenerateMultiplier, CylinderSection::DegenerateLinear] {
            let r = o.parallel_residual(w, 0.3, 1.7).unwrap();
            assert!(r < 1e-13, "{w:?}: {r:e}");
        }
        assert!(o.section(CylinderSection::OnePlus, 0.0, 0.0).is_err());
        // The linear family has no multiplier.
        let a = o.section(CylinderSection::DegenerateLinear, 0.2, 0.0).unwrap();
        let b = o.section(CylinderSection::DegenerateLinear, 0.2, std::f64::consts::TAU).unwrap();
        assert!((b + a).norm() > 1.0);
    }

    #[test]
    fn multipliers_match_periodicity() {
        let o = CylinderOracle::new(c64(0.3, 0.6)).unwrap();
        for w in CylinderSection::GENERIC {
            let a = o.section(w, 0.4, 0.5).unwrap();
            let b = o.section(w, 0.4, 0.5 + std::f64::consts::TAU).unwrap();
            assert!((b - a.mul_c(o.multiplier(w))).norm() < 1e-12);
        }
    }

    #[test]
    fn harmonic_family_sections() {
        let o = CylinderOracle::new(c64(-0.7, 0.4)).unwrap();
        for w in CylinderSection::GENERIC {
            let c = o.harmonic_connection(w.branch());
            let a0 = HVector2::new(o.section(w, 0.1, 0.2).unwrap().a, Quaternion::ZERO);
            let mut st = [a0];
            transport_segment(&c, (0.1, 0.2), (0.6, 1.0), 400, &mut st);
            let a1 = o.section(w, 0.6, 1.0).unwrap().a;
            assert!((st[0].a - a1).norm() < 1e-10);
        }
    }

    #[test]
    fn resonance_list() {
        assert_eq!(cylinder_resonances(3), vec![-3.0, -8.0]);
    }
}
