//! Second-order Taylor jets of quaternion-valued functions of (x, y).
//! Products follow the (noncommutative) Leibniz rule.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::quat::Quaternion;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct QJet {
    pub v: Quaternion,
    pub x: Quaternion,
    pub y: Quaternion,
    pub xx: Quaternion,
    pub xy: Quaternion,
    pub yy: Quaternion,
}

impl QJet {
    pub fn constant(q: Quaternion) -> Self {
        QJet { v: q, ..Default::default() }
    }

    /// Jet of a function of x alone from its value and two derivatives.
    pub fn of_x(v: Quaternion, d: Quaternion, dd: Quaternion) -> Self {
        QJet { v, x: d, xx: dd, ..Default::default() }
    }

    /// `exp(c₀ + cx·x + cy·y)` for complex coefficients, evaluated at (x, y).
    pub fn cexp_linear(c0: Complex64, cx: Complex64, cy: Complex64, x: f64, y: f64) -> Self {
        let e = crate::dmath::cexp(c0 + cx * x + cy * y);
        let q = |c: Complex64| Quaternion::from_complex(e * c);
        QJet {
            v: q(Complex64::new(1.0, 0.0)),
            x: q(cx),
            y: q(cy),
            xx: q(cx * cx),
            xy: q(cx * cy),
            yy: q(cy * cy),
        }
    }

    pub fn inv(&self) -> QJet {
        let v = self.v.inv();
        let vx = -(v * self.x * v);
        let vy = -(v * self.y * v);
        let xx = -(vx * self.x * v + v * self.xx * v + v * self.x * vx);
        let xy = -(vy * self.x * v + v * self.xy * v + v * self.x * vy);
        let yy = -(vy * self.y * v + v * self.yy * v + v * self.y * vy);
        QJet { v, x: vx, y: vy, xx, xy, yy }
    }

    pub fn scale(&self, s: f64) -> QJet {
        QJet { v: self.v * s, x: self.x * s, y: self.y * s, xx: self.xx * s, xy: self.xy * s, yy: self.yy * s }
    }

    /// Right multiplication by a constant quaternion.
    pub fn rmul(&self, q: Quaternion) -> QJet {
        *self * QJet::constant(q)
    }

    /// Left multiplication by a constant quaternion.
    pub fn lmul(&self, q: Quaternion) -> QJet {
        QJet::constant(q) * *self
    }
}

impl Add for QJet {
    type Output = QJet;
    fn add(self, o: QJet) -> QJet {
        QJet {
            v: self.v + o.v,
            x: self.x + o.x,
            y: self.y + o.y,
            xx: self.xx + o.xx,
            xy: self.xy + o.xy,
            yy: self.yy + o.yy,
        }
    }
}

impl Sub for QJet {
    type Output = QJet;
    fn sub(self, o: QJet) -> QJet {
        self + (-o)
    }
}

impl Neg for QJet {
    type Output = QJet;
    fn neg(self) -> QJet {
        self.scale(-1.0)
    }
}

impl Mul for QJet {
    type Output = QJet;
    fn mul(self, b: QJet) -> QJet {
        let a = self;
        QJet {
            v: a.v * b.v,
            x: a.x * b.v + a.v * b.x,
            y: a.y * b.v + a.v * b.y,
            xx: a.xx * b.v + (a.x * b.x) * 2.0 + a.v * b.xx,
            xy: a.xy * b.v + a.x * b.y + a.y * b.x + a.v * b.xy,
            yy: a.yy * b.v + (a.y * b.y) * 2.0 + a.v * b.yy,
        }
    }
}
