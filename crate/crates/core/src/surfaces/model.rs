//! Analytic surface models evaluated at arbitrary parameter points.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{QsError, QsResult};
use crate::expr::Expr;
use crate::jet::QJet;
use crate::quat::Quaternion;

/// Position, tangents and the two normals at a parameter point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FramePoint {
    pub f: Quaternion,
    pub fx: Quaternion,
    pub fy: Quaternion,
    pub n: Quaternion,
    pub r: Quaternion,
}

impl FramePoint {
    pub fn from_tangents(f: Quaternion, fx: Quaternion, fy: Quaternion) -> Self {
        let (n, r) = normals_from_tangents(fx, fy);
        FramePoint { f, fx, fy, n, r }
    }

    /// Differential applied to the tangent vector `(vx, vy)`.
    pub fn df(&self, vx: f64, vy: f64) -> Quaternion {
        self.fx * vx + self.fy * vy
    }
}

/// Left and right normal from `f_y = N f_x = −f_x R`, normalized to unit imaginary.
pub fn normals_from_tangents(fx: Quaternion, fy: Quaternion) -> (Quaternion, Quaternion) {
    let inv = fx.inv();
    ((fy * inv).normalized_imag(), (-(inv * fy)).normalized_imag())
}

/// A conformal immersion given by closed formulas.
pub trait SurfaceModel: Send + Sync {
    fn frame(&self, x: f64, y: f64) -> FramePoint;

    /// `(f_x, f_y)` only; models whose positions are costly override this.
    fn tangents(&self, x: f64, y: f64) -> (Quaternion, Quaternion) {
        let p = self.frame(x, y);
        (p.fx, p.fy)
    }

    /// `(N_x, N_y)` of the left normal when available in closed form.
    fn normal_derivatives(&self, _x: f64, _y: f64) -> Option<(Quaternion, Quaternion)> {
        None
    }

    /// Values lie in Im ℍ.
    fn is_r3(&self) -> bool;

    fn describe(&self) -> String;

    /// `(N_x, N_y)`, falling back to fourth-order differences of the normal.
    fn normal_derivatives_or_fd(&self, x: f64, y: f64) -> (Quaternion, Quaternion) {
        if let Some(d) = self.normal_derivatives(x, y) {
            return d;
        }
        let h = 1e-3;
        let n = |x: f64, y: f64| self.frame(x, y).n;
        let d = |p2: Quaternion, p1: Quaternion, m1: Quaternion, m2: Quaternion| ((p1 - m1) * 8.0 - (p2 - m2)) * (1.0 / (12.0 * h));
        (
            d(n(x + 2.0 * h, y), n(x + h, y), n(x - h, y), n(x - 2.0 * h, y)),
            d(n(x, y + 2.0 * h), n(x, y + h), n(x, y - h), n(x, y - 2.0 * h)),
        )
    }
}

pub type ModelRef = Arc<dyn SurfaceModel>;

/// `N = f_y f_x⁻¹` and its first derivatives from a second-order jet.
pub fn normal_jet(j: &QJet) -> (Quaternion, Quaternion, Quaternion) {
    let inv = j.x.inv();
    let n = j.y * inv;
    let nx = j.xy * inv - n * j.xx * inv;
    let ny = j.yy * inv - n * j.xy * inv;
    (n, nx, ny)
}

/// Profile `(p, q)` of a surface of revolution `f = i p + j q e^{−iy}`.
#[derive(Clone, Debug)]
pub struct ProfileCurve {
    pub p: Expr,
    pub q: Expr,
}

impl ProfileCurve {
    pub fn new(p: &str, q: &str) -> QsResult<Self> {
        Ok(ProfileCurve { p: Expr::parse(p)?, q: Expr::parse(q)? })
    }

    /// Relative residual `|(p′)²+(q′)²−q²| / q²` at `x`.
    pub fn constraint_residual(&self, x: f64) -> f64 {
        let p = self.p.eval2(x);
        let q = self.q.eval2(x);
        (p.d * p.d + q.d * q.d - q.v * q.v).abs() / (q.v * q.v)
    }

    /// Checks `q > 0` and the hyperbolic unit-speed constraint on `[x_min, x_max]`.
    pub fn validate(&self, x_min: f64, x_max: f64, samples: usize) -> QsResult<f64> {
        let mut worst: f64 = 0.0;
        for k in 0..=samples {
            let x = x_min + (x_max - x_min) * k as f64 / samples as f64;
            let q = self.q.eval(x);
            if !(q > 0.0) || !q.is_finite() {
                return Err(QsError::ProfileInvalid(format!("q({x}) = {q} is not positive")));
            }
            let r = self.constraint_residual(x);
            if !r.is_finite() || r > 1e-8 {
                return Err(QsError::ProfileInvalid(format!(
                    "(p')²+(q')² ≠ q² at x = {x} (relative residual {r:.3e})"
                )));
            }
            worst = worst.max(r);
        }
        Ok(worst)
    }
}

/// Surface of revolution `f = i p(x) + j q(x) e^{−iy}` in curvature-line coordinates.
#[derive(Clone, Debug)]
pub struct Revolution {
    pub profile: ProfileCurve,
}

impl Revolution {
    pub fn new(profile: ProfileCurve) -> Self {
        Revolution { profile }
    }

    /// The cylinder `f = ½(ix + j e^{−iy})`: profile `p = x/2`, `q = 1/2`.
    pub fn cylinder() -> Self {
        Revolution::new(ProfileCurve::new("x/2", "1/2").expect("static expressions parse"))
    }

    /// Reference profile `p = −x + x³/3`, `q = 1 + x²` used throughout the examples.
    pub fn running_example() -> Self {
        Revolution::new(ProfileCurve::new("-x + x^3/3", "1 + x^2").expect("static expressions parse"))
    }

    /// Unit sphere in Mercator coordinates `p = tanh x`, `q = sech x`.
    pub fn unit_sphere() -> Self {
        Revolution::new(ProfileCurve::new("tanh(x)", "sech(x)").expect("static expressions parse"))
    }

    pub fn jet(&self, x: f64, y: f64) -> QJet {
        let p = self.profile.p.eval2(x);
        let q = self.profile.q.eval2(x);
        let ip = QJet::of_x(Quaternion::I * p.v, Quaternion::I * p.d, Quaternion::I * p.dd);
        let jq = QJet::of_x(Quaternion::J * q.v, Quaternion::J * q.d, Quaternion::J * q.dd);
        let rot = QJet::cexp_linear(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, -1.0), x, y);
        ip + jq * rot
    }

    /// Closed-form Gauss map `(i q′ − j p′ e^{−iy}) / q`.
    pub fn normal_formula(&self, x: f64, y: f64) -> Quaternion {
        let p = self.profile.p.eval2(x);
        let q = self.profile.q.eval2(x);
        (Quaternion::I * q.d - Quaternion::J * Quaternion::expi(-y) * p.d) / q.v
    }

    /// The dual `df^d = f_x⁻¹dx − f_y⁻¹dy`, normalized by `f^d(0, 0) = 0`.
    pub fn formula_dual(&self) -> RevolutionDual {
        RevolutionDual { base: self.clone() }
    }
}

impl SurfaceModel for Revolution {
    fn frame(&self, x: f64, y: f64) -> FramePoint {
        let j = self.jet(x, y);
        FramePoint::from_tangents(j.v, j.x, j.y)
    }

    fn normal_derivatives(&self, x: f64, y: f64) -> Option<(Quaternion, Quaternion)> {
        let (_, nx, ny) = normal_jet(&self.jet(x, y));
        Some((nx, ny))
    }

    fn is_r3(&self) -> bool {
        true
    }

    fn describe(&self) -> String {
        format!("revolution p = {}, q = {}", self.profile.p, self.profile.q)
    }
}

/// Dual of a surface of revolution: `f^d = i P(x) + j e^{−iy}/q(x)` with `P′ = −p′/q²`.
#[derive(Clone, Debug)]
pub struct RevolutionDual {
    pub base: Revolution,
}

/// Five-point Gauss–Legendre nodes and weights on [−1, 1].
const GL5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (-0.906_179_845_938_664, 0.236_926_885_056_189_08),
    (0.906_179_845_938_664, 0.236_926_885_056_189_08),
];

/// Composite Gauss–Legendre quadrature of `g` over `[a, b]`.
pub fn integrate(a: f64, b: f64, g: impl Fn(f64) -> f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let panels = (((b - a).abs() / 0.02).ceil() as usize).max(1);
    let h = (b - a) / panels as f64;
    let mut s = 0.0;
    for k in 0..panels {
        let mid = a + (k as f64 + 0.5) * h;
        for (t, w) in GL5 {
            s += w * g(mid + 0.5 * h * t);
        }
    }
    s * 0.5 * h
}

impl RevolutionDual {
    fn big_p(&self, x: f64) -> f64 {
        let pr = &self.base.profile;
        integrate(0.0, x, |s| {
            let q = pr.q.eval(s);
            -pr.p.eval2(s).d / (q * q)
        })
    }

    fn j_part(&self, x: f64, y: f64) -> Quaternion {
        Quaternion::J * Quaternion::expi(-y) / self.base.profile.q.eval(x)
    }

    fn offset(&self) -> Quaternion {
        self.j_part(0.0, 0.0)
    }
}

impl SurfaceModel for RevolutionDual {
    fn frame(&self, x: f64, y: f64) -> FramePoint {
        let (fx, fy) = self.tangents(x, y);
        let f = Quaternion::I * self.big_p(x) + self.j_part(x, y) - self.offset();
        FramePoint::from_tangents(f, fx, fy)
    }

    fn tangents(&self, x: f64, y: f64) -> (Quaternion, Quaternion) {
        let j = self.base.jet(x, y);
        (j.x.inv(), -j.y.inv())
    }

    fn is_r3(&self) -> bool {
        true
    }

    fn describe(&self) -> String {
        format!("dual of {}", self.base.describe())
    }
}

/// The parallel surface `g = f + N` with Gauss map `−N`.
pub struct ParallelModel {
    pub base: ModelRef,
}

impl ParallelModel {
    pub fn new(base: ModelRef) -> Self {
        ParallelModel { base }
    }
}

impl SurfaceModel for ParallelModel {
    fn frame(&self, x: f64, y: f64) -> FramePoint {
        let b = self.base.frame(x, y);
        let (nx, ny) = self.base.normal_derivatives_or_fd(x, y);
        FramePoint { f: b.f + b.n, fx: b.fx + nx, fy: b.fy + ny, n: -b.n, r: -b.r }
    }

    fn normal_derivatives(&self, x: f64, y: f64) -> Option<(Quaternion, Quaternion)> {
        let (nx, ny) = self.base.normal_derivatives_or_fd(x, y);
        Some((-nx, -ny))
    }

    fn is_r3(&self) -> bool {
        self.base.is_r3()
    }

    fn describe(&self) -> String {
        format!("parallel surface of {}", self.base.describe())
    }
}

/// Flat plane `f = x j + y k` with `N = R = i`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Plane;

impl SurfaceModel for Plane {
    fn frame(&self, x: f64, y: f64) -> FramePoint {
        FramePoint::from_tangents(Quaternion::J * x + Quaternion::K * y, Quaternion::J, Quaternion::K)
    }

    fn normal_derivatives(&self, _x: f64, _y: f64) -> Option<(Quaternion, Quaternion)> {
        Some((Quaternion::ZERO, Quaternion::ZERO))
    }

    fn is_r3(&self) -> bool {
        true
    }

    fn describe(&self) -> String {
        "plane".into()
    }
}

/// `dg = ϱ₀ (f_x⁻¹dx − f_y⁻¹dy)`: the real factor relating a dual to the
/// coordinate formula dual at a parameter point.
pub fn dual_gauge_scale(f: &dyn SurfaceModel, dual: &dyn SurfaceModel, x: f64, y: f64) -> f64 {
    let a = f.frame(x, y);
    let d = dual.frame(x, y);
    (d.fx * a.fx).re()
}

/// Converts a spectral value for a dual `g` into the coordinate-formula gauge.
pub fn convert_rho_to_formula_gauge(rho_g: Complex64, scale: f64) -> Complex64 {
    rho_g * scale
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cylinder_values_and_normal() {
        let c = Revolution::cylinder();
        let fr = c.frame(0.0, 0.0);
        assert!(fr.f.max_abs_diff(&(Quaternion::J * 0.5)) < 1e-16);
        for (x, y) in [(0.3, 1.2), (-1.0, 4.0)] {
            let n = c.frame(x, y).n;
            assert!(n.max_abs_diff(&(-(Quaternion::J * Quaternion::expi(-y)))) < 1e-15);
        }
    }

    #[test]
    fn revolution_normal_matches_closed_form() {
        let s = Revolution::running_example();
        for (x, y) in [(0.1, 0.2), (-0.8, 2.5), (1.3, -1.0)] {
            let fr = s.frame(x, y);
            assert!(fr.n.max_abs_diff(&s.normal_formula(x, y)) < 1e-14);
            assert!(fr.n.max_abs_diff(&fr.r) < 1e-14);
            assert!((fr.fx.norm() - fr.fy.norm()).abs() < 1e-13);
            assert!(fr.fx.dot(&fr.fy).abs() < 1e-13);
        }
    }

    #[test]
    fn running_example_dual_closed_form() {
        let d = Revolution::running_example().formula_dual();
        for (x, y) in [(0.4, 0.3), (-1.2, 2.0), (0.0, 5.0)] {
            let q = 1.0 + x * x;
            let expect = Quaternion::I * (x / q) + Quaternion::J * Quaternion::expi(-y) / q - Quaternion::J;
            assert!(d.frame(x, y).f.max_abs_diff(&expect) < 1e-12, "{x} {y}");
        }
    }

    #[test]
    fn cylinder_parallel_surface_and_gauge() {
        let f: ModelRef = Arc::new(Revolution::cylinder());
        let g = ParallelModel::new(f.clone());
        let (x, y) = (0.7, 1.9);
        let gp = g.frame(x, y);
        let expect = (Quaternion::I * x - Quaternion::J * Quaternion::expi(-y)) * 0.5;
        assert!(gp.f.max_abs_diff(&expect) < 1e-15);
        assert!(gp.n.max_abs_diff(&-f.frame(x, y).n) < 1e-15);
        assert!((dual_gauge_scale(f.as_ref(), &g, x, y) + 0.25).abs() < 1e-15);
    }

    #[test]
    fn profile_validation() {
        assert!(Revolution::running_example().profile.validate(-2.0, 2.0, 200).is_ok());
        let bad = ProfileCurve::new("x", "1 + x^2").unwrap();
        assert!(matches!(bad.validate(-1.0, 1.0, 10), Err(QsError::ProfileInvalid(_))));
        let neg = ProfileCurve::new("x", "-1").unwrap();
        assert!(neg.validate(-1.0, 1.0, 10).is_err());
    }

    #[test]
    fn quadrature_is_accurate() {
        let v = integrate(0.0, 2.0, |s| s.exp());
        assert!((v - (2f64.exp() - 1.0)).abs() < 1e-13);
        assert!((integrate(1.0, -1.0, |s| s * s) + 2.0 / 3.0).abs() < 1e-14);
    }
}
