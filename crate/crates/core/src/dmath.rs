//! Elementary functions with bit-reproducible results.
//!
//! The platform libm is not used for transcendental functions: optimised
//! builds fuse `sin`/`cos` pairs into `sincos`, whose last bit can differ, so
//! mesh output would depend on the build profile and the host C library.
//! These wrappers evaluate everything with the pure-Rust `libm` crate instead.

use num_complex::Complex64;

pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

/// `(sin x, cos x)`.
pub fn sin_cos(x: f64) -> (f64, f64) {
    libm::sincos(x)
}

pub fn tan(x: f64) -> f64 {
    libm::tan(x)
}

pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

pub fn sinh(x: f64) -> f64 {
    libm::sinh(x)
}

pub fn cosh(x: f64) -> f64 {
    libm::cosh(x)
}

pub fn tanh(x: f64) -> f64 {
    libm::tanh(x)
}

pub fn powf(x: f64, p: f64) -> f64 {
    libm::pow(x, p)
}

/// `|z|`.
pub fn cabs(z: Complex64) -> f64 {
    libm::hypot(z.re, z.im)
}

/// Principal argument in `(−π, π]`.
pub fn carg(z: Complex64) -> f64 {
    libm::atan2(z.im, z.re)
}

/// `r e^{iθ}`.
pub fn polar(r: f64, theta: f64) -> Complex64 {
    let (s, c) = sin_cos(theta);
    Complex64::new(r * c, r * s)
}

/// `e^z`.
pub fn cexp(z: Complex64) -> Complex64 {
    polar(exp(z.re), z.im)
}

/// Principal square root (non-negative real part; the cut along the negative
/// real axis follows the sign of the imaginary zero), computed without trigonometry.
pub fn csqrt(z: Complex64) -> Complex64 {
    if z.re == 0.0 && z.im == 0.0 {
        return Complex64::new(0.0, z.im);
    }
    let w = ((z.re.abs() + cabs(z)) / 2.0).sqrt();
    if z.re >= 0.0 {
        Complex64::new(w, z.im / (2.0 * w))
    } else {
        Complex64::new(z.im.abs() / (2.0 * w), w.copysign(z.im))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn branch_cut_follows_signed_zero() {
        assert_eq!(csqrt(Complex64::new(-4.0, 0.0)), Complex64::new(0.0, 2.0));
        assert_eq!(csqrt(Complex64::new(-4.0, -0.0)), Complex64::new(0.0, -2.0));
        assert_eq!(csqrt(Complex64::new(9.0, 0.0)), Complex64::new(3.0, 0.0));
        assert_eq!(csqrt(Complex64::new(0.0, 0.0)), Complex64::new(0.0, 0.0));
    }

    proptest! {
        #[test]
        fn agrees_with_the_platform_functions(re in -20.0..20.0f64, im in -20.0..20.0f64) {
            let z = Complex64::new(re, im);
            prop_assert!((csqrt(z) - z.sqrt()).norm() <= 4.0 * f64::EPSILON * z.norm().sqrt().max(1.0));
            prop_assert!((csqrt(z) * csqrt(z) - z).norm() <= 8.0 * f64::EPSILON * z.norm().max(1.0));
            prop_assert!(csqrt(z).re >= 0.0);
            prop_assert!((cexp(z) - z.exp()).norm() <= 4.0 * f64::EPSILON * re.exp());
            prop_assert!((carg(z) - z.arg()).abs() <= 4.0 * f64::EPSILON);
            prop_assert!((sin(im) - im.sin()).abs() <= f64::EPSILON && (cos(im) - im.cos()).abs() <= f64::EPSILON);
            prop_assert!((tanh(re) - re.tanh()).abs() <= 2.0 * f64::EPSILON);
        }
    }
}
