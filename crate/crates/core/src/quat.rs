//! Quaternions, 2×2 quaternionic matrices and their complexification.
//!
//! Complex numbers are the subalgebra span{1, i}. The complex structure on
//! ℍ and ℍ² is right multiplication by `i`, so a quaternion splits as
//! `q = z₀ + j z₁` with `z₀ = w + i x`, `z₁ = y − i z`.

use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QsError, QsResult};

/// Determinant magnitude below which a complexified matrix counts as singular.
pub const SINGULAR_DET: f64 = 1e-14;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quaternion { w, x, y, z }
    }

    pub const fn real(r: f64) -> Self {
        Quaternion::new(r, 0.0, 0.0, 0.0)
    }

    /// Embeds `c` as `re + im·i`.
    pub fn from_complex(c: Complex64) -> Self {
        Quaternion::new(c.re, c.im, 0.0, 0.0)
    }

    /// Imaginary quaternion with the given i, j, k coefficients.
    pub const fn imag(x: f64, y: f64, z: f64) -> Self {
        Quaternion::new(0.0, x, y, z)
    }

    /// `e^{iθ}` as a quaternion.
    pub fn expi(theta: f64) -> Self {
        let (s, c) = crate::dmath::sin_cos(theta);
        Quaternion::new(c, s, 0.0, 0.0)
    }

    /// `e^{c}` for complex `c`.
    pub fn cexp(c: Complex64) -> Self {
        Quaternion::from_complex(crate::dmath::cexp(c))
    }

    pub fn re(&self) -> f64 {
        self.w
    }

    pub fn im(&self) -> Quaternion {
        Quaternion::new(0.0, self.x, self.y, self.z)
    }

    pub fn conj(&self) -> Quaternion {
        Quaternion::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Inverse `q̄/|q|²`. Returns non-finite components for `q = 0`.
    pub fn inv(&self) -> Quaternion {
        self.conj() / self.norm_sqr()
    }

    pub fn try_inv(&self) -> QsResult<Quaternion> {
        let n = self.norm_sqr();
        if n == 0.0 || !n.is_finite() {
            return Err(QsError::Singular(format!("quaternion {self:?} is not invertible")));
        }
        Ok(self.conj() / n)
    }

    /// Euclidean inner product on ℝ⁴.
    pub fn dot(&self, o: &Quaternion) -> f64 {
        self.w * o.w + self.x * o.x + self.y * o.y + self.z * o.z
    }

    /// Cross product of the imaginary parts.
    pub fn cross(&self, o: &Quaternion) -> Quaternion {
        Quaternion::imag(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn is_finite(&self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Unit imaginary quaternion in the direction of the imaginary part.
    pub fn normalized_imag(&self) -> Quaternion {
        let v = self.im();
        v / v.norm()
    }

    /// Right multiplication by a complex scalar.
    pub fn mul_c(&self, c: Complex64) -> Quaternion {
        *self * Quaternion::from_complex(c)
    }

    /// Complex split `(z₀, z₁)` with `q = z₀ + j z₁`.
    pub fn complexify(&self) -> (Complex64, Complex64) {
        (Complex64::new(self.w, self.x), Complex64::new(self.y, -self.z))
    }

    /// Inverse of [`Quaternion::complexify`].
    pub fn from_split(z0: Complex64, z1: Complex64) -> Self {
        Quaternion::new(z0.re, z0.im, z1.re, -z1.im)
    }

    /// Complex 2×2 matrix of `v ↦ q v` on the split coordinates.
    pub fn left_matrix(&self) -> Matrix2<Complex64> {
        let (p0, p1) = self.complexify();
        Matrix2::new(p0, -p1.conj(), p1, p0.conj())
    }

    pub fn max_abs_diff(&self, o: &Quaternion) -> f64 {
        (*self - *o).norm()
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Quaternion::new(a[0], a[1], a[2], a[3])
    }
}

/// Quaternion product.
pub fn qmul(p: Quaternion, q: Quaternion) -> Quaternion {
    p * q
}

/// Quaternion inverse.
pub fn qinv(q: Quaternion) -> Quaternion {
    q.inv()
}

/// Complex split of a quaternion.
pub fn complexify(q: Quaternion) -> (Complex64, Complex64) {
    q.complexify()
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, q: Quaternion) -> Quaternion {
        let p = self;
        Quaternion::new(
            p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
            p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
            p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
            p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;
    fn mul(self, s: f64) -> Quaternion {
        Quaternion::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    fn mul(self, q: Quaternion) -> Quaternion {
        q * self
    }
}

impl Div<f64> for Quaternion {
    type Output = Quaternion;
    fn div(self, s: f64) -> Quaternion {
        Quaternion::new(self.w / s, self.x / s, self.y / s, self.z / s)
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, o: Quaternion) {
        *self = *self + o;
    }
}

impl SubAssign for Quaternion {
    fn sub_assign(&mut self, o: Quaternion) {
        *self = *self - o;
    }
}

impl MulAssign<f64> for Quaternion {
    fn mul_assign(&mut self, s: f64) {
        *self = *self * s;
    }
}

impl From<Complex64> for Quaternion {
    fn from(c: Complex64) -> Self {
        Quaternion::from_complex(c)
    }
}

impl From<f64> for Quaternion {
    fn from(r: f64) -> Self {
        Quaternion::real(r)
    }
}

/// Column vector in ℍ²; quaternionic scalars act from the right.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct HVector2 {
    pub a: Quaternion,
    pub b: Quaternion,
}

impl HVector2 {
    pub const ZERO: HVector2 = HVector2 { a: Quaternion::ZERO, b: Quaternion::ZERO };

    pub const fn new(a: Quaternion, b: Quaternion) -> Self {
        HVector2 { a, b }
    }

    /// First basis vector `e = (1, 0)`.
    pub const fn e() -> Self {
        HVector2::new(Quaternion::ONE, Quaternion::ZERO)
    }

    /// Right scalar multiplication `v·q`.
    pub fn rmul(&self, q: Quaternion) -> HVector2 {
        HVector2::new(self.a * q, self.b * q)
    }

    pub fn mul_c(&self, c: Complex64) -> HVector2 {
        self.rmul(Quaternion::from_complex(c))
    }

    pub fn norm(&self) -> f64 {
        (self.a.norm_sqr() + self.b.norm_sqr()).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.is_finite()
    }

    /// ℂ⁴ coordinates `(z₀(a), z₁(a), z₀(b), z₁(b))`.
    pub fn complexify(&self) -> Vector4<Complex64> {
        let (a0, a1) = self.a.complexify();
        let (b0, b1) = self.b.complexify();
        Vector4::new(a0, a1, b0, b1)
    }

    pub fn from_complex4(v: &Vector4<Complex64>) -> Self {
        HVector2::new(Quaternion::from_split(v[0], v[1]), Quaternion::from_split(v[2], v[3]))
    }

    /// Affine coordinate `a b⁻¹` of the quaternionic line `vℍ`.
    pub fn affine(&self) -> Quaternion {
        self.a * self.b.inv()
    }
}

impl Add for HVector2 {
    type Output = HVector2;
    fn add(self, o: HVector2) -> HVector2 {
        HVector2::new(self.a + o.a, self.b + o.b)
    }
}

impl Sub for HVector2 {
    type Output = HVector2;
    fn sub(self, o: HVector2) -> HVector2 {
        HVector2::new(self.a - o.a, self.b - o.b)
    }
}

impl Neg for HVector2 {
    type Output = HVector2;
    fn neg(self) -> HVector2 {
        HVector2::new(-self.a, -self.b)
    }
}

impl Mul<f64> for HVector2 {
    type Output = HVector2;
    fn mul(self, s: f64) -> HVector2 {
        HVector2::new(self.a * s, self.b * s)
    }
}

/// 2×2 quaternionic matrix, row-major, acting on [`HVector2`] from the left.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct HMatrix2 {
    pub m: [[Quaternion; 2]; 2],
}

impl HMatrix2 {
    pub const fn new(m00: Quaternion, m01: Quaternion, m10: Quaternion, m11: Quaternion) -> Self {
        HMatrix2 { m: [[m00, m01], [m10, m11]] }
    }

    pub const fn identity() -> Self {
        HMatrix2::new(Quaternion::ONE, Quaternion::ZERO, Quaternion::ZERO, Quaternion::ONE)
    }

    /// Diagonal matrix `diag(q, q)`.
    pub const fn scalar(q: Quaternion) -> Self {
        HMatrix2::new(q, Quaternion::ZERO, Quaternion::ZERO, q)
    }

    /// Matrix with the given columns.
    pub fn from_columns(c0: HVector2, c1: HVector2) -> Self {
        HMatrix2::new(c0.a, c1.a, c0.b, c1.b)
    }

    /// Unipotent frame `(1 f; 0 1)`.
    pub fn frame(f: Quaternion) -> Self {
        HMatrix2::new(Quaternion::ONE, f, Quaternion::ZERO, Quaternion::ONE)
    }

    pub fn apply(&self, v: HVector2) -> HVector2 {
        HVector2::new(self.m[0][0] * v.a + self.m[0][1] * v.b, self.m[1][0] * v.a + self.m[1][1] * v.b)
    }

    pub fn transform(&self, o: &HMatrix2) -> HMatrix2 {
        let a = &self.m;
        let b = &o.m;
        let e = |r: usize, c: usize| a[r][0] * b[0][c] + a[r][1] * b[1][c];
        HMatrix2::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }

    /// 4×4 complex matrix of the map on ℂ⁴ coordinates.
    pub fn complexify(&self) -> Matrix4<Complex64> {
        let mut out = Matrix4::zeros();
        for r in 0..2 {
            for c in 0..2 {
                let blk = self.m[r][c].left_matrix();
                for i in 0..2 {
                    for j in 0..2 {
                        out[(2 * r + i, 2 * c + j)] = blk[(i, j)];
                    }
                }
            }
        }
        out
    }

    /// Reads back a quaternionic matrix from a 4×4 complex matrix that
    /// commutes with the quaternionic structure (first column of each block).
    pub fn from_complex4(c: &Matrix4<Complex64>) -> Self {
        let q = |r: usize, col: usize| Quaternion::from_split(c[(2 * r, 2 * col)], c[(2 * r + 1, 2 * col)]);
        HMatrix2::new(q(0, 0), q(0, 1), q(1, 0), q(1, 1))
    }

    pub fn max_abs_diff(&self, o: &HMatrix2) -> f64 {
        let mut d: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                d = d.max(self.m[r][c].max_abs_diff(&o.m[r][c]));
            }
        }
        d
    }
}

impl Add for HMatrix2 {
    type Output = HMatrix2;
    fn add(self, o: HMatrix2) -> HMatrix2 {
        let a = &self.m;
        let b = &o.m;
        HMatrix2::new(a[0][0] + b[0][0], a[0][1] + b[0][1], a[1][0] + b[1][0], a[1][1] + b[1][1])
    }
}

impl Sub for HMatrix2 {
    type Output = HMatrix2;
    fn sub(self, o: HMatrix2) -> HMatrix2 {
        self + o * -1.0
    }
}

impl Mul<f64> for HMatrix2 {
    type Output = HMatrix2;
    fn mul(self, s: f64) -> HMatrix2 {
        let a = &self.m;
        HMatrix2::new(a[0][0] * s, a[0][1] * s, a[1][0] * s, a[1][1] * s)
    }
}

impl Mul for HMatrix2 {
    type Output = HMatrix2;
    fn mul(self, o: HMatrix2) -> HMatrix2 {
        self.transform(&o)
    }
}

/// Inverse of a quaternionic 2×2 matrix, computed on its complexification.
pub fn hmat_inv(m: &HMatrix2) -> QsResult<HMatrix2> {
    let c = m.complexify();
    let inv = complex_inverse4(&c)?;
    Ok(HMatrix2::from_complex4(&inv))
}

/// Inverse of a 4×4 complex matrix with a determinant guard.
pub fn complex_inverse4(c: &Matrix4<Complex64>) -> QsResult<Matrix4<Complex64>> {
    let scale = c.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        return Err(QsError::Singular("zero or non-finite matrix".into()));
    }
    let det = (c / Complex64::new(scale, 0.0)).determinant();
    if det.norm() < SINGULAR_DET {
        return Err(QsError::Singular(format!("complexified determinant {:.3e} below threshold", det.norm())));
    }
    c.try_inverse().ok_or_else(|| QsError::Singular("LU inversion failed".into()))
}

/// Spectral data shared by the three connection families.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint {
    pub mu: Complex64,
    pub rho: Complex64,
    pub a: Complex64,
    pub b: Complex64,
}

impl SpectralPoint {
    /// `a = (μ+μ⁻¹)/2`, `b = i(μ⁻¹−μ)/2`, `ϱ = −(μ−1)²/(4μ)`.
    pub fn from_mu(mu: Complex64) -> QsResult<Self> {
        if mu.norm() == 0.0 || !mu.is_finite() {
            return Err(QsError::DegenerateSpectral(format!("μ = {mu} does not define a family")));
        }
        let inv = mu.inv();
        let a = (mu + inv) * 0.5;
        let b = Complex64::i() * (inv - mu) * 0.5;
        let rho = -(mu - 1.0) * (mu - 1.0) / (mu * 4.0);
        Ok(SpectralPoint { mu, rho, a, b })
    }

    /// The pair `μ± = 1−2ϱ ± 2i√ϱ√(1−ϱ)`, sorted by imaginary part
    /// descending, then real part descending.
    pub fn from_rho(rho: Complex64) -> QsResult<(Self, Self)> {
        if !rho.is_finite() {
            return Err(QsError::DegenerateSpectral(format!("ϱ = {rho} is not finite")));
        }
        let a = Complex64::new(1.0, 0.0) - rho * 2.0;
        let b = crate::dmath::csqrt(rho) * crate::dmath::csqrt(Complex64::new(1.0, 0.0) - rho) * 2.0;
        // μ₊μ₋ = a² + b² = 1: take the larger root directly and invert it to
        // avoid cancellation in the smaller one.
        let (up, down) = (a + Complex64::i() * b, a - Complex64::i() * b);
        let (mu_p, mu_m) = if up.norm() >= down.norm() { (up, up.inv()) } else { (down.inv(), down) };
        let mut pts = [
            SpectralPoint { mu: mu_p, rho, a, b },
            SpectralPoint { mu: mu_m, rho, a, b: -b },
        ];
        if mu_order(&pts[1].mu, &pts[0].mu) {
            pts.swap(0, 1);
        }
        Ok((pts[0], pts[1]))
    }

    /// Point with the given `ϱ` and the `+` branch `b = 2√ϱ√(1−ϱ)`.
    pub fn from_rho_branch(rho: Complex64, sign: f64) -> Self {
        let a = Complex64::new(1.0, 0.0) - rho * 2.0;
        let b = crate::dmath::csqrt(rho) * crate::dmath::csqrt(Complex64::new(1.0, 0.0) - rho) * 2.0 * sign;
        SpectralPoint { mu: a + Complex64::i() * b, rho, a, b }
    }

    /// `μ = e^{it}` on the unit circle, with real `a = cos t`, `b = sin t`.
    pub fn on_circle(t: f64) -> Self {
        let (s, c) = crate::dmath::sin_cos(t);
        SpectralPoint {
            mu: Complex64::new(c, s),
            rho: Complex64::new((1.0 - c) / 2.0, 0.0),
            a: Complex64::new(c, 0.0),
            b: Complex64::new(s, 0.0),
        }
    }

    /// `μ ∈ {±1}` or `ϱ ∈ {0, 1}`: allowed, but the two spectral values coincide.
    pub fn is_degenerate(&self) -> bool {
        (self.mu - 1.0).norm() < 1e-14 || (self.mu + 1.0).norm() < 1e-14
    }

    /// `b/(a−1)`; rejects `|a−1| < 1e−10`.
    pub fn b_over_a_minus_one(&self) -> QsResult<Complex64> {
        let d = self.a - 1.0;
        if d.norm() < 1e-10 {
            return Err(QsError::DegenerateSpectral(format!("μ = {} is too close to 1", self.mu)));
        }
        Ok(self.b / d)
    }
}

/// Ordering used for emitted μ pairs: `true` if `p` comes before `q`.
fn mu_order(p: &Complex64, q: &Complex64) -> bool {
    if p.im != q.im {
        p.im > q.im
    } else {
        p.re > q.re
    }
}

/// Convenience constructor for `re + im·i`.
pub const fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
