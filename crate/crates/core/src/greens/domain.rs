//! Points of the upper half plane, integer matrices acting on them, and
//! reduction to the standard fundamental domain of `SL₂(Z)`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{BigReal, Rat};
use crate::error::{Error, Result};

pub const DEFAULT_DIGITS: u32 = 40;
pub const BOUNDARY_TOL: f64 = 1e-13;

#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct UHPoint {
    pub re: BigReal,
    pub im: BigReal,
}

impl fmt::Debug for UHPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}i", self.re, self.im)
    }
}

impl UHPoint {
    pub fn new(re: BigReal, im: BigReal) -> Result<Self> {
        if im.sign() != Some(Ordering::Greater) {
            return Err(Error::InvalidArgument(format!("imaginary part {im} is not positive")));
        }
        Ok(UHPoint { re, im })
    }

    pub fn from_f64(re: f64, im: f64) -> Result<Self> {
        UHPoint::new(BigReal::from_f64(re, DEFAULT_DIGITS), BigReal::from_f64(im, DEFAULT_DIGITS))
    }

    pub fn from_rats(re: &Rat, im: &Rat, digits: u32) -> Result<Self> {
        UHPoint::new(BigReal::from_rat(re, digits), BigReal::from_rat(im, digits))
    }

    /// Parses `"RE,IM"` where each part is a rational or decimal literal.
    pub fn parse(s: &str, digits: u32) -> Result<Self> {
        let (re, im) = s
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("expected RE,IM, got {s:?}")))?;
        UHPoint::new(BigReal::parse(re.trim(), digits)?, BigReal::parse(im.trim(), digits)?)
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn digits(&self) -> u32 {
        self.re.working_digits().min(self.im.working_digits())
    }

    pub fn abs_sqr(&self) -> BigReal {
        &self.re.square() + &self.im.square()
    }
}

/// Integer 2×2 matrix `(a b; c d)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Mat2 {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 { a: 1, b: 0, c: 0, d: 1 };
    /// `z ↦ -1/z`.
    pub const S: Mat2 = Mat2 { a: 0, b: -1, c: 1, d: 0 };
    /// `z ↦ z + 1`.
    pub const T: Mat2 = Mat2 { a: 1, b: 1, c: 0, d: 1 };

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn translation(n: i64) -> Self {
        Mat2::new(1, n, 0, 1)
    }

    pub fn det(&self) -> i64 {
        self.a * self.d - self.b * self.c
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }

    /// Möbius action `(a z + b)/(c z + d)`; requires `det > 0`.
    pub fn apply(&self, z: &UHPoint) -> Result<UHPoint> {
        if self.det() <= 0 {
            return Err(Error::InvalidArgument(format!("matrix {self:?} has non-positive determinant")));
        }
        let digits = z.digits();
        let int = |n: i64| BigReal::from_int(n, digits);
        // (az+b)/(cz+d) = ((az+b)(c z̄+d)) / |cz+d|²
        let cx_d = &(&int(self.c) * &z.re) + &int(self.d);
        let cy = &int(self.c) * &z.im;
        let den = &cx_d.square() + &cy.square();
        if den.contains_zero() {
            return Err(Error::DivisionByZero);
        }
        let ax_b = &(&int(self.a) * &z.re) + &int(self.b);
        let ay = &int(self.a) * &z.im;
        let re = &(&(&ax_b * &cx_d) + &(&ay * &cy)) / &den;
        let im = &(&z.im * &int(self.det())) / &den;
        UHPoint::new(re, im)
    }

    pub fn apply_f64(&self, x: f64, y: f64) -> (f64, f64) {
        let (a, b, c, d) = (self.a as f64, self.b as f64, self.c as f64, self.d as f64);
        let cx_d = c * x + d;
        let cy = c * y;
        let den = cx_d * cx_d + cy * cy;
        (((a * x + b) * cx_d + a * y * cy) / den, self.det() as f64 * y / den)
    }
}

/// Reduces `z` into `{-1/2 ≤ Re < 1/2, |z| > 1} ∪ {|z| = 1, 0 ≤ Re ≤ 1/2}`
/// and returns the image together with the matrix `M` with `M z = z'`.
///
/// Boundary decisions are taken on midpoints with tolerance
/// [`BOUNDARY_TOL`], so inputs given in double precision land on the
/// intended side.
pub fn reduce_fd(z: &UHPoint) -> (UHPoint, Mat2) {
    let tol = BOUNDARY_TOL;
    let mut m = Mat2::IDENTITY;
    let mut w = z.clone();
    for _ in 0..10_000 {
        let x = w.re.to_f64();
        let n = (x + 0.5 + tol).floor() as i64;
        if n != 0 {
            let t = Mat2::translation(-n);
            m = t.mul(&m);
            w = m.apply(z).expect("SL2 action");
        }
        let r = abs_sqr_mid(&w);
        if r < 1.0 - tol {
            m = Mat2::S.mul(&m);
            w = m.apply(z).expect("SL2 action");
            continue;
        }
        break;
    }
    // on the unit circle keep the representative with Re ≥ 0
    let r = abs_sqr_mid(&w);
    if (r - 1.0).abs() <= tol && w.re.to_f64() < -tol {
        m = Mat2::S.mul(&m);
        w = m.apply(z).expect("SL2 action");
    }
    if m.a < 0 || (m.a == 0 && m.c < 0) {
        m = Mat2::new(-m.a, -m.b, -m.c, -m.d);
    }
    (w, m)
}

fn abs_sqr_mid(w: &UHPoint) -> f64 {
    w.abs_sqr().to_f64()
}
