use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::connections::{ConnectionFamily, SectionField};
use crate::dmath;
use crate::error::{QsError, QsResult};
use crate::quat::{HVector2, Quaternion};
use crate::surfaces::{DomainGrid, ModelRef, Revolution};

/// RK4 step of the coefficient ODE used to tabulate `(c₀, c₁)`.
const ODE_STEP: f64 = 1e-3;

/// Closed-form description of a Darboux transform of a surface of revolution.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RotationForm {
    /// Complex part `p̂(x)` (the `1, i` components).
    pub p_hat: Complex64,
    /// Real radius `q̂(x)` of the `j` part.
    pub q_hat: f64,
    /// Angle with `(±s−1)(±s̄+1) = R e^{iθ}`.
    pub theta: f64,
    pub big_r: f64,
}

/// One of the two multiplier families `α^± = e^{iy/2} c^±(x) e^{±isy/2}` of the
/// isothermic family in the coordinate-formula dual gauge.
#[derive(Clone, Debug)]
pub struct RevolutionOracle {
    pub surface: Revolution,
    /// Spectral value in the gauge `df^d = f_x⁻¹dx − f_y⁻¹dy`.
    pub rho: Complex64,
    /// `±s` with `s = √(1+4ϱ)`.
    pub s_signed: Complex64,
    x0: f64,
    xs: Vec<f64>,
    cs: Vec<[Complex64; 2]>,
}

impl RevolutionOracle {
    /// Tabulates `(c₀, c₁)` on `[x_min, x_max]` from `c(x₀) = init`.
    pub fn new(surface: Revolution, rho: Complex64, branch: f64, x_min: f64, x_max: f64, x0: f64, init: [Complex64; 2]) -> QsResult<Self> {
        if rho.norm() == 0.0 || !rho.is_finite() {
            return Err(QsError::DegenerateSpectral(format!("ϱ = {rho}: need ϱ ≠ 0")));
        }
        if !(x_min <= x0 && x0 <= x_max) {
            return Err(QsError::ConfigInvalid("initial abscissa outside the interval".into()));
        }
        surface.profile.validate(x_min, x_max, 256)?;
        let s = dmath::csqrt(Complex64::new(1.0, 0.0) + rho * 4.0);
        let mut o = RevolutionOracle { surface, rho, s_signed: s * branch, x0, xs: vec![], cs: vec![] };
        o.tabulate(x_min, x_max, init)?;
        Ok(o)
    }

    /// Default oracle: `c(0) = (1, 1)` on `[x_min, x_max] ∋ 0`.
    pub fn with_defaults(surface: Revolution, rho: Complex64, branch: f64, x_min: f64, x_max: f64) -> QsResult<Self> {
        let x0 = 0.0_f64.clamp(x_min, x_max);
        Self::new(surface, rho, branch, x_min, x_max, x0, [Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)])
    }

    pub fn s(&self) -> Complex64 {
        self.s_signed
    }

    /// Multiplier `−e^{iπ(±s)}`.
    pub fn multiplier(&self) -> Complex64 {
        -dmath::cexp(Complex64::i() * PI * self.s_signed)
    }

    /// `c′ = (1/2q) [[(1+s)q′, i(1−s)p′], [i(1+s)p′, (1−s)q′]] c` with `s` signed.
    fn rhs(&self, x: f64, c: [Complex64; 2]) -> [Complex64; 2] {
        let p = self.surface.profile.p.eval2(x);
        let q = self.surface.profile.q.eval2(x);
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::i();
        let s = self.s_signed;
        let k = 0.5 / q.v;
        [
            ((one + s) * q.d * c[0] + i * (one - s) * p.d * c[1]) * k,
            (i * (one + s) * p.d * c[0] + (one - s) * q.d * c[1]) * k,
        ]
    }

    fn rk4(&self, x: f64, c: [Complex64; 2], h: f64) -> [Complex64; 2] {
        let add = |a: [Complex64; 2], b: [Complex64; 2], t: f64| [a[0] + b[0] * t, a[1] + b[1] * t];
        let k1 = self.rhs(x, c);
        let k2 = self.rhs(x + 0.5 * h, add(c, k1, 0.5 * h));
        let k3 = self.rhs(x + 0.5 * h, add(c, k2, 0.5 * h));
        let k4 = self.rhs(x + h, add(c, k3, h));
        [
            c[0] + (k1[0] + k2[0] * 2.0 + k3[0] * 2.0 + k4[0]) * (h / 6.0),
            c[1] + (k1[1] + k2[1] * 2.0 + k3[1] * 2.0 + k4[1]) * (h / 6.0),
        ]
    }

    fn tabulate(&mut self, x_min: f64, x_max: f64, init: [Complex64; 2]) -> QsResult<()> {
        let leg = |o: &Self, to: f64| -> QsResult<(Vec<f64>, Vec<[Complex64; 2]>)> {
            let n = (((to - o.x0).abs() / ODE_STEP).ceil() as usize).max(1);
            let h = (to - o.x0) / n as f64;
            let (mut xs, mut cs) = (vec![o.x0], vec![init]);
            let mut c = init;
            for k in 0..n {
                c = o.rk4(o.x0 + k as f64 * h, c, h);
                if !(c[0].norm() + c[1].norm()).is_finite() || c[0].norm() + c[1].norm() > 1e150 {
                    return Err(QsError::Blowup(format!("coefficient ODE overflows near x = {}", o.x0 + k as f64 * h)));
                }
                xs.push(o.x0 + (k + 1) as f64 * h);
                cs.push(c);
            }
            Ok((xs, cs))
        };
        let (mut lx, mut lc) = leg(self, x_min)?;
        let (rx, rc) = leg(self, x_max)?;
        lx.reverse();
        lc.reverse();
        lx.pop();
        lc.pop();
        lx.extend(rx);
        lc.extend(rc);
        self.xs = lx;
        self.cs = lc;
        Ok(())
    }

    /// `(c₀, c₁)` and their derivatives at `x` by cubic Hermite interpolation.
    pub fn coefficients(&self, x: f64) -> ([Complex64; 2], [Complex64; 2]) {
        let n = self.xs.len();
        let k = match self.xs.binary_search_by(|v| v.total_cmp(&x)) {
            Ok(k) => return (self.cs[k], self.rhs(x, self.cs[k])),
            Err(k) => k.clamp(1, n - 1) - 1,
        };
        let (xa, xb) = (self.xs[k], self.xs[k + 1]);
        let h = xb - xa;
        let t = (x - xa) / h;
        let (ca, cb) = (self.cs[k], self.cs[k + 1]);
        let (da, db) = (self.rhs(xa, ca), self.rhs(xb, cb));
        let h00 = 2.0 * t * t * t - 3.0 * t * t + 1.0;
        let h10 = t * t * t - 2.0 * t * t + t;
        let h01 = -2.0 * t * t * t + 3.0 * t * t;
        let h11 = t * t * t - t * t;
        let c = [0, 1].map(|m| ca[m] * h00 + da[m] * (h10 * h) + cb[m] * h01 + db[m] * (h11 * h));
        (c, self.rhs(x, c))
    }

    fn phases(&self, y: f64) -> (Quaternion, Quaternion) {
        let i = Complex64::i();
        (Quaternion::expi(0.5 * y), Quaternion::cexp(i * self.s_signed * (0.5 * y)))
    }

    /// `α = e^{iy/2} c e^{±isy/2}` and `β = (1/2q) e^{iy/2}(c₁(±s−1) + j c₀(1±s)) e^{±isy/2}`.
    pub fn section(&self, x: f64, y: f64) -> HVector2 {
        let ([c0, c1], _) = self.coefficients(x);
        let (l, r) = self.phases(y);
        let one = Complex64::new(1.0, 0.0);
        let s = self.s_signed;
        let q = self.surface.profile.q.eval(x);
        let c = Quaternion::from_split(c0, c1);
        let b = Quaternion::from_complex(c1 * (s - one)) + Quaternion::J * Quaternion::from_complex(c0 * (one + s));
        HVector2::new(l * c * r, l * b * r / (2.0 * q))
    }

    /// `(φ, φ_x, φ_y)` with `φ_x` from the tabulated ODE and `φ_y` exact.
    pub fn section_with_derivatives(&self, x: f64, y: f64) -> [HVector2; 3] {
        let ([c0, c1], [d0, d1]) = self.coefficients(x);
        let (l, r) = self.phases(y);
        let one = Complex64::new(1.0, 0.0);
        let s = self.s_signed;
        let qj = self.surface.profile.q.eval2(x);
        let cq = Quaternion::from_split(c0, c1);
        let dq = Quaternion::from_split(d0, d1);
        let bq = Quaternion::from_complex(c1 * (s - one)) + Quaternion::J * Quaternion::from_complex(c0 * (one + s));
        let bd = Quaternion::from_complex(d1 * (s - one)) + Quaternion::J * Quaternion::from_complex(d0 * (one + s));
        let inv2q = 1.0 / (2.0 * qj.v);
        let dinv2q = -qj.d / (2.0 * qj.v * qj.v);
        let alpha = l * cq * r;
        let beta = l * bq * r * inv2q;
        // ∂_y(e^{iy/2} X e^{isy/2}) = (i/2) e^{iy/2} X e^{isy/2} + e^{iy/2} X e^{isy/2} (is/2).
        let dy = |v: Quaternion| Quaternion::I * v * 0.5 + v.mul_c(Complex64::i() * s * 0.5);
        [
            HVector2::new(alpha, beta),
            HVector2::new(l * dq * r, l * bd * r * inv2q + l * bq * r * dinv2q),
            HVector2::new(dy(alpha), dy(beta)),
        ]
    }

    pub fn surface_model(&self) -> ModelRef {
        Arc::new(self.surface.clone())
    }

    pub fn dual_model(&self) -> ModelRef {
        Arc::new(self.surface.formula_dual())
    }

    pub fn connection(&self) -> ConnectionFamily {
        ConnectionFamily::isothermic(self.surface_model(), self.dual_model(), self.rho).expect("finite ϱ")
    }

    /// `(|φ_x + ω_xφ| + |φ_y + ω_yφ|)/|φ|`.
    pub fn parallel_residual(&self, x: f64, y: f64) -> f64 {
        let conn = self.connection();
        let [phi, px, py] = self.section_with_derivatives(x, y);
        let rx = px + conn.local(x, y, 1.0, 0.0).apply(&phi);
        let ry = py + conn.local(x, y, 0.0, 1.0).apply(&phi);
        (rx.norm() + ry.norm()) / (phi.norm() + px.norm() + py.norm())
    }

    pub fn section_field(&self, grid: &DomainGrid) -> SectionField {
        let values: Vec<HVector2> = (0..grid.len()).map(|k| {
            let (x, y) = grid.coords(k);
            self.section(x, y)
        }).collect();
        let res = (0..grid.len()).map(|k| {
            let (x, y) = grid.coords(k);
            self.parallel_residual(x, y)
        }).fold(0.0, f64::max);
        SectionField::from_values(*grid, values, res)
    }

    /// `T = 2q/D · (2c₀c̄₁ Re(±s) + j(|c₁|²(±s̄−1) − |c₀|²(1±s)) e^{−iy})`.
    pub fn t_closed_form(&self, x: f64, y: f64) -> QsResult<Quaternion> {
        let ([c0, c1], _) = self.coefficients(x);
        let one = Complex64::new(1.0, 0.0);
        let s = self.s_signed;
        let q = self.surface.profile.q.eval(x);
        let d = denominator(c0, c1, s);
        if !(d > 1e-300) {
            return Err(QsError::DegenerateDenominator(format!("|c₁|²|s−1|² + |c₀|²|1+s|² vanishes at x = {x}")));
        }
        let real = c0 * c1.conj() * (2.0 * s.re);
        let jpart = c1.norm_sqr() * (s.conj() - one) - c0.norm_sqr() * (one + s);
        let t = Quaternion::from_complex(real) + Quaternion::J * Quaternion::from_complex(jpart) * Quaternion::expi(-y);
        Ok(t * (2.0 * q / d))
    }

    /// Rotation-surface description `f̂ = p̂ + j q̂ e^{−i(θ+y)}` at abscissa `x`.
    pub fn rotation_form(&self, x: f64) -> QsResult<RotationForm> {
        let ([c0, c1], _) = self.coefficients(x);
        let one = Complex64::new(1.0, 0.0);
        let s = self.s_signed;
        let pq = (self.surface.profile.p.eval(x), self.surface.profile.q.eval(x));
        let d = denominator(c0, c1, s);
        if !(d > 1e-300) {
            return Err(QsError::DegenerateDenominator(format!("denominator vanishes at x = {x}")));
        }
        let rt = (s - one) * (s.conj() + one);
        let p_hat = Complex64::new(0.0, pq.0) + c0 * c1.conj() * (4.0 * pq.1 * s.re / d);
        let q_hat = rt.norm() * pq.1 * (c0.norm_sqr() + c1.norm_sqr()) / d;
        Ok(RotationForm { p_hat, q_hat, theta: dmath::carg(rt), big_r: dmath::cabs(rt) })
    }

    /// `f̂ = f + T` from the closed form.
    pub fn darboux_point(&self, x: f64, y: f64) -> QsResult<Quaternion> {
        Ok(self.surface.jet(x, y).v + self.t_closed_form(x, y)?)
    }

    /// `f̂` from the rotation-surface description.
    pub fn rotation_point(&self, x: f64, y: f64) -> QsResult<Quaternion> {
        let r = self.rotation_form(x)?;
        Ok(Quaternion::from_complex(r.p_hat) + Quaternion::J * Quaternion::expi(-(r.theta + y)) * r.q_hat)
    }
}

fn denominator(c0: Complex64, c1: Complex64, s: Complex64) -> f64 {
    let one = Complex64::new(1.0, 0.0);
    c1.norm_sqr() * (s - one).norm_sqr() + c0.norm_sqr() * (one + s).norm_sqr()
}

/// Isothermic resonance values `r_k = (k²−1)/4`, `k = 2..=k_max`, of a surface of
/// revolution in the coordinate-formula gauge.
pub fn revolution_resonances(k_max: u32) -> Vec<f64> {
    (2..=k_max).map(|k| ((k * k) as f64 - 1.0) / 4.0).collect()
}
