use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::real::{forward_owned, BigReal};

/// Complex ball: independent real and imaginary [`BigReal`] balls.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct BigComplex {
    pub re: BigReal,
    pub im: BigReal,
}

impl BigComplex {
    pub fn new(re: BigReal, im: BigReal) -> Self {
        BigComplex { re, im }
    }

    pub fn from_real(re: BigReal) -> Self {
        let im = BigReal::zero(re.working_digits());
        BigComplex { re, im }
    }

    pub fn zero(digits: u32) -> Self {
        Self::from_real(BigReal::zero(digits))
    }

    pub fn one(digits: u32) -> Self {
        Self::from_real(BigReal::one(digits))
    }

    pub fn i(digits: u32) -> Self {
        BigComplex::new(BigReal::zero(digits), BigReal::one(digits))
    }

    /// Imaginary part is exactly zero.
    pub fn is_real(&self) -> bool {
        self.im.sign() == Some(Ordering::Equal)
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    pub fn conj(&self) -> BigComplex {
        BigComplex::new(self.re.clone(), -&self.im)
    }

    pub fn norm_sqr(&self) -> BigReal {
        &self.re.square() + &self.im.square()
    }

    pub fn abs(&self) -> BigReal {
        if self.im.sign() == Some(Ordering::Equal) {
            return self.re.abs();
        }
        if self.re.sign() == Some(Ordering::Equal) {
            return self.im.abs();
        }
        self.norm_sqr().sqrt()
    }

    /// Guaranteed significant digits relative to the modulus: the larger
    /// component radius measured against `|z|`.
    pub fn digits(&self) -> u32 {
        let work = self.re.working_digits().min(self.im.working_digits());
        if !self.is_finite() {
            return 0;
        }
        let rad = self.re.rad_f64().max(self.im.rad_f64());
        if rad == 0.0 {
            return work;
        }
        let m = self.re.mid().to_f64().hypot(self.im.mid().to_f64());
        if m == 0.0 || rad >= m {
            return 0;
        }
        let d = (m.log10() - rad.log10()).floor();
        if d <= 0.0 {
            0
        } else {
            (d as u32).min(work)
        }
    }

    pub fn recip(&self) -> BigComplex {
        let n = self.norm_sqr();
        BigComplex::new(&self.re / &n, &(-&self.im) / &n)
    }

    /// Principal square root.
    ///
    /// Branch convention: the result has nonnegative real part; on the
    /// negative real axis (imaginary part exactly zero) the imaginary part
    /// is positive. When the imaginary part is an uncertain ball around zero
    /// the sign of its midpoint selects the branch.
    pub fn sqrt(&self) -> BigComplex {
        let digits = self.re.working_digits();
        let im_zero = self.im.sign() == Some(Ordering::Equal);
        if im_zero {
            match self.re.sign() {
                Some(Ordering::Less) => {
                    return BigComplex::new(BigReal::zero(digits), (-&self.re).sqrt());
                }
                Some(Ordering::Equal) => return BigComplex::zero(digits),
                _ if self.re.mid().cmp0() != Some(Ordering::Less) => {
                    return BigComplex::from_real(self.re.sqrt());
                }
                _ => {}
            }
        }
        let modulus = self.abs();
        let half = BigReal::from_f64(0.5, digits);
        if self.re.mid().cmp0() != Some(Ordering::Less) {
            let a = (&(&modulus + &self.re) * &half).sqrt();
            let b = &self.im / &(&a + &a);
            BigComplex::new(a, b)
        } else {
            let mag = (&(&modulus - &self.re) * &half).sqrt();
            let b = if self.im.mid().cmp0() == Some(Ordering::Less) { -mag } else { mag };
            let a = &self.im / &(&b + &b);
            BigComplex::new(a, b)
        }
    }

    /// ln|z|.
    pub fn ln_abs(&self) -> BigReal {
        self.abs().ln()
    }

    pub fn scale(&self, k: &BigReal) -> BigComplex {
        BigComplex::new(&self.re * k, &self.im * k)
    }

    pub fn powi(&self, e: u32) -> BigComplex {
        let digits = self.re.working_digits();
        let mut result = BigComplex::one(digits);
        let mut base = self.clone();
        let mut n = e;
        while n > 0 {
            if n & 1 == 1 {
                result = &result * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        result
    }
}

impl fmt::Debug for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}) + ({:?})i", self.re, self.im)
    }
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_real() {
            write!(f, "{}", self.re)
        } else {
            write!(f, "{} + {}i", self.re, self.im)
        }
    }
}

impl From<BigReal> for BigComplex {
    fn from(r: BigReal) -> Self {
        BigComplex::from_real(r)
    }
}

impl Add<&BigComplex> for &BigComplex {
    type Output = BigComplex;
    fn add(self, rhs: &BigComplex) -> BigComplex {
        BigComplex::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub<&BigComplex> for &BigComplex {
    type Output = BigComplex;
    fn sub(self, rhs: &BigComplex) -> BigComplex {
        BigComplex::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul<&BigComplex> for &BigComplex {
    type Output = BigComplex;
    fn mul(self, rhs: &BigComplex) -> BigComplex {
        if self.is_real() {
            return rhs.scale(&self.re);
        }
        if rhs.is_real() {
            return self.scale(&rhs.re);
        }
        let re = &(&self.re * &rhs.re) - &(&self.im * &rhs.im);
        let im = &(&self.re * &rhs.im) + &(&self.im * &rhs.re);
        BigComplex::new(re, im)
    }
}

impl Div<&BigComplex> for &BigComplex {
    type Output = BigComplex;
    fn div(self, rhs: &BigComplex) -> BigComplex {
        if rhs.is_real() {
            return BigComplex::new(&self.re / &rhs.re, &self.im / &rhs.re);
        }
        let n = rhs.norm_sqr();
        let num = self * &rhs.conj();
        BigComplex::new(&num.re / &n, &num.im / &n)
    }
}

impl Neg for BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        -&self
    }
}

impl Neg for &BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex::new(-&self.re, -&self.im)
    }
}

forward_owned!(Add, add, BigComplex);
forward_owned!(Sub, sub, BigComplex);
forward_owned!(Mul, mul, BigComplex);
forward_owned!(Div, div, BigComplex);

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> BigComplex {
        BigComplex::new(BigReal::from_f64(re, 40), BigReal::from_f64(im, 40))
    }

    #[test]
    fn sqrt_branch_conventions() {
        let s = c(-4.0, 0.0).sqrt();
        assert!(s.re.contains_zero());
        assert!((s.im.to_f64() - 2.0).abs() < 1e-30);

        let s = c(-3.0, 4.0).sqrt();
        assert!((s.re.to_f64() - 1.0).abs() < 1e-30);
        assert!((s.im.to_f64() - 2.0).abs() < 1e-30);

        let s = c(-3.0, -4.0).sqrt();
        assert!((s.re.to_f64() - 1.0).abs() < 1e-30);
        assert!((s.im.to_f64() + 2.0).abs() < 1e-30);
    }

    #[test]
    fn sqrt_squares_back() {
        for (re, im) in [(2.0, 3.0), (-5.0, 0.5), (0.25, -7.0), (9.0, 0.0)] {
            let z = c(re, im);
            let r = z.sqrt();
            let back = &r * &r;
            assert!((&back - &z).contains_zero(), "{re} {im}");
        }
    }

    #[test]
    fn division_inverts_multiplication() {
        let a = c(1.5, -2.0);
        let b = c(-0.5, 3.25);
        let q = &(&a * &b) / &b;
        assert!((&q - &a).contains_zero());
    }
}
