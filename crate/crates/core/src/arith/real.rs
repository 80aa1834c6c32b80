//! Ball arithmetic on top of MPFR floats.
//!
//! A [`BigReal`] is a midpoint together with an error radius; the true value
//! is guaranteed to lie in `[mid - rad, mid + rad]` as long as every step of
//! the computation goes through the operations here. Radii are kept at 64
//! bits and always rounded upward. A ball whose radius is infinite has lost
//! all information (e.g. after dividing by a ball containing zero).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::float::{Constant, Round, Special};
use rug::ops::{AddAssignRound, MulAssignRound, SubAssignRound};
use rug::{Float, Integer};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::Rat;
use crate::error::{Error, Result};

const RAD_PREC: u32 = 64;
/// Smallest supported working precision, in decimal digits.
pub const MIN_DIGITS: u32 = 16;

const LOG2_10: f64 = std::f64::consts::LOG2_10;

/// Working precision in bits for a requested number of decimal digits,
/// including guard bits.
pub fn bits_for_digits(digits: u32) -> u32 {
    (digits.max(MIN_DIGITS) as f64 * LOG2_10).ceil() as u32 + 24
}

#[derive(Clone)]
pub struct BigReal {
    mid: Float,
    rad: Float,
}

fn rad_zero() -> Float {
    Float::with_val(RAD_PREC, 0)
}

fn rad_inf() -> Float {
    Float::with_val(RAD_PREC, Special::Infinity)
}

fn abs_up(x: &Float) -> Float {
    Float::with_val_round(RAD_PREC, x.abs_ref(), Round::Up).0
}

fn add_up(a: &Float, b: &Float) -> Float {
    let mut r = Float::with_val_round(RAD_PREC, a, Round::Up).0;
    r.add_assign_round(b, Round::Up);
    r
}

fn mul_up(a: &Float, b: &Float) -> Float {
    let mut r = Float::with_val_round(RAD_PREC, a, Round::Up).0;
    r.mul_assign_round(b, Round::Up);
    r
}

fn div_up(a: &Float, b: &Float) -> Float {
    Float::with_val_round(RAD_PREC, a / b, Round::Up).0
}

/// Rounding error bound for a freshly rounded result `m` at its precision.
fn ulp_err(m: &Float) -> Float {
    if m.is_zero() {
        return rad_zero();
    }
    let shift = m.prec() as i32 - 1;
    let mut e = abs_up(m);
    e >>= shift;
    e
}

impl BigReal {
    fn from_parts(mid: Float, rad: Float) -> Self {
        let rad = if rad.is_nan() { rad_inf() } else { rad };
        BigReal { mid, rad }
    }

    pub fn zero(digits: u32) -> Self {
        Self::from_parts(Float::with_val(bits_for_digits(digits), 0), rad_zero())
    }

    pub fn one(digits: u32) -> Self {
        Self::from_int(1, digits)
    }

    pub fn from_int(n: i64, digits: u32) -> Self {
        let mid = Float::with_val(bits_for_digits(digits), n);
        let rad = ulp_err_if_inexact(&mid, &Float::with_val(128, n));
        Self::from_parts(mid, rad)
    }

    pub fn from_integer(n: &Integer, digits: u32) -> Self {
        let (mid, ord) = Float::with_val_round(bits_for_digits(digits), n, Round::Nearest);
        let rad = if ord == Ordering::Equal { rad_zero() } else { ulp_err(&mid) };
        Self::from_parts(mid, rad)
    }

    pub fn from_rat(r: &Rat, digits: u32) -> Self {
        let (mid, ord) = Float::with_val_round(bits_for_digits(digits), r.as_rational(), Round::Nearest);
        let rad = if ord == Ordering::Equal { rad_zero() } else { ulp_err(&mid) };
        Self::from_parts(mid, rad)
    }

    /// Exact conversion of a double (which is a dyadic rational).
    pub fn from_f64(x: f64, digits: u32) -> Self {
        let bits = bits_for_digits(digits).max(53);
        Self::from_parts(Float::with_val(bits, x), rad_zero())
    }

    /// A value known only to within `err`.
    pub fn with_error(x: f64, err: f64, digits: u32) -> Self {
        let mut b = Self::from_f64(x, digits);
        b.rad = Float::with_val_round(RAD_PREC, err.abs(), Round::Up).0;
        b
    }

    pub fn pi(digits: u32) -> Self {
        let mid = Float::with_val(bits_for_digits(digits), Constant::Pi);
        let rad = ulp_err(&mid);
        Self::from_parts(mid, rad)
    }

    pub fn ln2(digits: u32) -> Self {
        let mid = Float::with_val(bits_for_digits(digits), Constant::Log2);
        let rad = ulp_err(&mid);
        Self::from_parts(mid, rad)
    }

    pub fn mid(&self) -> &Float {
        &self.mid
    }

    pub fn rad(&self) -> &Float {
        &self.rad
    }

    pub fn prec_bits(&self) -> u32 {
        self.mid.prec()
    }

    /// Working precision expressed in decimal digits.
    pub fn working_digits(&self) -> u32 {
        ((self.mid.prec().saturating_sub(24)) as f64 / LOG2_10).floor() as u32
    }

    /// Number of significant decimal digits guaranteed by the error radius.
    pub fn digits(&self) -> u32 {
        if !self.rad.is_finite() {
            return 0;
        }
        if self.rad.is_zero() {
            return self.working_digits();
        }
        if self.mid.is_zero() {
            return 0;
        }
        let ratio = Float::with_val(RAD_PREC, self.mid.abs_ref()) / &self.rad;
        let d = ratio.log10().to_f64().floor();
        if d <= 0.0 {
            0
        } else {
            (d as u32).min(self.working_digits())
        }
    }

    /// Number of decimal digits after the point guaranteed by the radius
    /// (i.e. `-log10(rad)`).
    pub fn abs_digits(&self) -> i64 {
        if !self.rad.is_finite() {
            return i64::MIN;
        }
        if self.rad.is_zero() {
            return self.working_digits() as i64;
        }
        -(self.rad.clone().log10().to_f64().ceil() as i64)
    }

    pub fn is_finite(&self) -> bool {
        self.mid.is_finite() && self.rad.is_finite()
    }

    pub fn to_f64(&self) -> f64 {
        self.mid.to_f64()
    }

    pub fn rad_f64(&self) -> f64 {
        self.rad.to_f64_round(Round::Up)
    }

    /// Inflates the radius by `err` (e.g. a truncation or quadrature error).
    pub fn add_error(&mut self, err: &Float) {
        self.rad = add_up(&self.rad, &abs_up(err));
    }

    pub fn add_error_f64(&mut self, err: f64) {
        self.add_error(&Float::with_val(RAD_PREC, err));
    }

    /// True when the ball contains zero.
    pub fn contains_zero(&self) -> bool {
        let a = Float::with_val_round(RAD_PREC, self.mid.abs_ref(), Round::Down).0;
        a <= self.rad
    }

    /// Sign if it is certain, `None` when the ball straddles zero.
    pub fn sign(&self) -> Option<Ordering> {
        if self.mid.is_zero() && self.rad.is_zero() {
            return Some(Ordering::Equal);
        }
        if self.contains_zero() {
            None
        } else {
            self.mid.cmp0()
        }
    }

    /// Lower endpoint of the ball, rounded downward.
    pub fn lower(&self) -> Float {
        let mut lo = self.mid.clone();
        lo.sub_assign_round(&self.rad, Round::Down);
        lo
    }

    /// Upper endpoint of the ball, rounded upward.
    pub fn upper(&self) -> Float {
        let mut hi = self.mid.clone();
        hi.add_assign_round(&self.rad, Round::Up);
        hi
    }

    /// Upper bound on |x|.
    pub fn abs_upper(&self) -> Float {
        add_up(&abs_up(&self.mid), &self.rad)
    }

    pub fn definitely_lt(&self, other: &BigReal) -> bool {
        (other - self).sign() == Some(Ordering::Greater)
    }

    pub fn definitely_gt(&self, other: &BigReal) -> bool {
        other.definitely_lt(self)
    }

    pub fn abs(&self) -> BigReal {
        Self::from_parts(self.mid.clone().abs(), self.rad.clone())
    }

    pub fn set_prec_digits(&self, digits: u32) -> BigReal {
        let mut mid = self.mid.clone();
        let ord = mid.set_prec_round(bits_for_digits(digits), Round::Nearest);
        let mut rad = self.rad.clone();
        if ord != Ordering::Equal {
            rad = add_up(&rad, &ulp_err(&mid));
        }
        Self::from_parts(mid, rad)
    }

    fn prec_of(&self, other: &BigReal) -> u32 {
        self.mid.prec().max(other.mid.prec())
    }

    pub fn square(&self) -> BigReal {
        self * self
    }

    pub fn recip(&self) -> BigReal {
        &BigReal::from_parts(Float::with_val(self.mid.prec(), 1), rad_zero()) / self
    }

    pub fn sqrt(&self) -> BigReal {
        let prec = self.mid.prec();
        let lo = self.lower();
        if self.upper().cmp0() == Some(Ordering::Less) || !self.is_finite() {
            return Self::from_parts(Float::with_val(prec, Special::Nan), rad_inf());
        }
        if lo.cmp0() != Some(Ordering::Greater) {
            // Ball touches zero: cover [0, sqrt(upper)].
            let hi = Float::with_val_round(RAD_PREC, self.upper().sqrt_ref(), Round::Up).0;
            let mid = Float::with_val(prec, 0);
            return Self::from_parts(mid, hi);
        }
        let mid = Float::with_val(prec, self.mid.sqrt_ref());
        let s_lo = Float::with_val_round(RAD_PREC, lo.sqrt_ref(), Round::Down).0;
        let s_mid = Float::with_val_round(RAD_PREC, self.mid.sqrt_ref(), Round::Down).0;
        let denom = Float::with_val_round(RAD_PREC, &s_lo + &s_mid, Round::Down).0;
        let prop = if self.rad.is_zero() { rad_zero() } else { div_up(&self.rad, &denom) };
        let rad = add_up(&prop, &ulp_err(&mid));
        Self::from_parts(mid, rad)
    }

    pub fn ln(&self) -> BigReal {
        let prec = self.mid.prec();
        if self.lower().cmp0() != Some(Ordering::Greater) || !self.is_finite() {
            return Self::from_parts(Float::with_val(prec, Special::Nan), rad_inf());
        }
        let mid = Float::with_val(prec, self.mid.ln_ref());
        // |ln(m±r) - ln m| <= r/(m-r)
        let prop = if self.rad.is_zero() {
            rad_zero()
        } else {
            let lo = Float::with_val_round(RAD_PREC, self.lower(), Round::Down).0;
            div_up(&self.rad, &lo)
        };
        let rad = add_up(&prop, &ulp_err(&mid));
        Self::from_parts(mid, rad)
    }

    pub fn exp(&self) -> BigReal {
        let prec = self.mid.prec();
        if !self.is_finite() {
            return Self::from_parts(Float::with_val(prec, Special::Nan), rad_inf());
        }
        let mid = Float::with_val(prec, self.mid.exp_ref());
        // |exp(m±r) - exp m| <= exp(m) * expm1(r)
        let prop = if self.rad.is_zero() {
            rad_zero()
        } else {
            let em1 = Float::with_val_round(RAD_PREC, self.rad.exp_m1_ref(), Round::Up).0;
            let em = mul_up(&abs_up(&mid), &Float::with_val(RAD_PREC, 1.0 + 1e-15));
            mul_up(&em, &em1)
        };
        let rad = add_up(&prop, &ulp_err(&mid));
        Self::from_parts(mid, rad)
    }

    pub fn cosh(&self) -> BigReal {
        let e = self.exp();
        let half = BigReal::from_parts(Float::with_val(self.mid.prec(), 0.5), rad_zero());
        &(&e + &e.recip()) * &half
    }

    pub fn powi(&self, e: i64) -> BigReal {
        if e < 0 {
            return self.powi(-e).recip();
        }
        let mut result = BigReal::from_parts(Float::with_val(self.mid.prec(), 1), rad_zero());
        let mut base = self.clone();
        let mut n = e as u64;
        while n > 0 {
            if n & 1 == 1 {
                result = &result * &base;
            }
            n >>= 1;
            if n > 0 {
                base = base.square();
            }
        }
        result
    }

    /// `self^s` for positive `self`.
    pub fn pow(&self, s: &BigReal) -> BigReal {
        (&self.ln() * s).exp()
    }

    pub fn max_prec(a: &BigReal, b: &BigReal) -> u32 {
        a.prec_of(b)
    }

    /// Decimal rendering with the given number of significant digits.
    pub fn to_decimal(&self, sig_digits: usize) -> String {
        if !self.mid.is_finite() {
            return "NaN".into();
        }
        let s = self.mid.to_string_radix(10, Some(sig_digits.max(1)));
        normalize_sci(&s)
    }

    pub fn parse(s: &str, digits: u32) -> Result<BigReal> {
        let r = Rat::parse(s)?;
        Ok(Self::from_rat(&r, digits))
    }
}

fn ulp_err_if_inexact(mid: &Float, exact: &Float) -> Float {
    if mid == exact {
        rad_zero()
    } else {
        ulp_err(mid)
    }
}

/// MPFR prints `1.2345e2`; keep plain notation for moderate exponents.
fn normalize_sci(s: &str) -> String {
    let Some(epos) = s.find('e') else { return s.to_string() };
    let (mant, exp) = (&s[..epos], &s[epos + 1..]);
    let Ok(exp) = exp.parse::<i64>() else { return s.to_string() };
    if !(-30..=30).contains(&exp) {
        return s.to_string();
    }
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant),
    };
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    let digits: String = format!("{ip}{fp}");
    let point = ip.len() as i64 + exp;
    let body = if point <= 0 {
        format!("0.{}{}", "0".repeat((-point) as usize), digits)
    } else if point as usize >= digits.len() {
        format!("{}{}", digits, "0".repeat(point as usize - digits.len()))
    } else {
        format!("{}.{}", &digits[..point as usize], &digits[point as usize..])
    };
    let body = if body.contains('.') {
        body.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        body
    };
    let body = if body.is_empty() { "0".to_string() } else { body };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ± {:.3e}", self.to_decimal(self.digits().max(3) as usize + 2), self.rad_f64())
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(self.digits().max(1) as usize))
    }
}

/// Serialized as `{"value": "<decimal>", "digits": n, "mid": .., "rad": .., "prec": bits}`.
/// `value` carries exactly the guaranteed digits; `mid` and `rad` are the
/// exact binary ball in hexadecimal so that parsing restores an equal ball.
/// Only `value` and `digits` are required on input.
#[derive(Serialize, Deserialize)]
struct BigRealRepr {
    value: String,
    digits: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mid: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rad: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    prec: Option<u32>,
}

fn hex(f: &Float) -> String {
    f.to_string_radix(16, None)
}

fn parse_hex(s: &str, prec: u32) -> Option<Float> {
    Float::parse_radix(s, 16).ok().map(|p| Float::with_val(prec, p))
}

impl Serialize for BigReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let digits = self.digits();
        BigRealRepr {
            value: self.to_decimal(digits.max(1) as usize),
            digits,
            mid: Some(hex(&self.mid)),
            rad: Some(hex(&self.rad)),
            prec: Some(self.mid.prec()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BigReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = BigRealRepr::deserialize(d)?;
        if let (Some(m), Some(r), Some(p)) = (&repr.mid, &repr.rad, repr.prec) {
            let bad = || serde::de::Error::custom("malformed exact ball");
            if !(rug::float::prec_min()..=rug::float::prec_max()).contains(&p) {
                return Err(bad());
            }
            let mid = parse_hex(m, p).ok_or_else(bad)?;
            let rad = parse_hex(r, RAD_PREC).ok_or_else(bad)?;
            if rad.is_sign_negative() || rad.is_nan() {
                return Err(bad());
            }
            return Ok(Self::from_parts(mid, rad));
        }
        let r = Rat::parse(&repr.value).map_err(serde::de::Error::custom)?;
        let digits = repr.digits.max(MIN_DIGITS);
        let mut b = BigReal::from_rat(&r, digits);
        // the printed value is only good to its stated digits
        if repr.digits > 0 || r.is_zero() {
            let scale = if r.is_zero() { 1.0 } else { r.to_f64().abs() };
            b.add_error_f64(scale * 10f64.powi(-(repr.digits as i32) + 1));
        } else {
            b.rad = rad_inf();
        }
        Ok(b)
    }
}

impl PartialEq for BigReal {
    /// Balls compare equal when their midpoints and radii are identical.
    fn eq(&self, other: &Self) -> bool {
        self.mid == other.mid && self.rad == other.rad
    }
}

impl Add<&BigReal> for &BigReal {
    type Output = BigReal;
    fn add(self, rhs: &BigReal) -> BigReal {
        let mid = Float::with_val(self.prec_of(rhs), &self.mid + &rhs.mid);
        let rad = add_up(&add_up(&self.rad, &rhs.rad), &ulp_err(&mid));
        BigReal::from_parts(mid, rad)
    }
}

impl Sub<&BigReal> for &BigReal {
    type Output = BigReal;
    fn sub(self, rhs: &BigReal) -> BigReal {
        let mid = Float::with_val(self.prec_of(rhs), &self.mid - &rhs.mid);
        let rad = add_up(&add_up(&self.rad, &rhs.rad), &ulp_err(&mid));
        BigReal::from_parts(mid, rad)
    }
}

impl Mul<&BigReal> for &BigReal {
    type Output = BigReal;
    fn mul(self, rhs: &BigReal) -> BigReal {
        let mid = Float::with_val(self.prec_of(rhs), &self.mid * &rhs.mid);
        // |a|rb + |b|ra + ra rb
        let mut rad = mul_up(&abs_up(&self.mid), &rhs.rad);
        rad = add_up(&rad, &mul_up(&abs_up(&rhs.mid), &self.rad));
        rad = add_up(&rad, &mul_up(&self.rad, &rhs.rad));
        rad = add_up(&rad, &ulp_err(&mid));
        BigReal::from_parts(mid, rad)
    }
}

impl Div<&BigReal> for &BigReal {
    type Output = BigReal;
    fn div(self, rhs: &BigReal) -> BigReal {
        let prec = self.prec_of(rhs);
        if rhs.contains_zero() {
            return BigReal::from_parts(Float::with_val(prec, Special::Nan), rad_inf());
        }
        let mid = Float::with_val(prec, &self.mid / &rhs.mid);
        // (|a| rb + |b| ra) / (|b| (|b| - rb))
        let babs_lo = Float::with_val_round(RAD_PREC, rhs.mid.abs_ref(), Round::Down).0;
        let gap = Float::with_val_round(RAD_PREC, &babs_lo - &rhs.rad, Round::Down).0;
        let num = add_up(
            &mul_up(&abs_up(&self.mid), &rhs.rad),
            &mul_up(&abs_up(&rhs.mid), &self.rad),
        );
        let den = Float::with_val_round(RAD_PREC, &babs_lo * &gap, Round::Down).0;
        let rad = add_up(&div_up(&num, &den), &ulp_err(&mid));
        BigReal::from_parts(mid, rad)
    }
}

impl Neg for &BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal::from_parts(Float::with_val(self.mid.prec(), -&self.mid), self.rad.clone())
    }
}

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal::from_parts(-self.mid, self.rad)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident, $t:ty) => {
        impl $tr<$t> for $t {
            type Output = $t;
            fn $m(self, rhs: $t) -> $t {
                $tr::$m(&self, &rhs)
            }
        }
        impl $tr<&$t> for $t {
            type Output = $t;
            fn $m(self, rhs: &$t) -> $t {
                $tr::$m(&self, rhs)
            }
        }
        impl $tr<$t> for &$t {
            type Output = $t;
            fn $m(self, rhs: $t) -> $t {
                $tr::$m(self, &rhs)
            }
        }
    };
}
pub(crate) use forward_owned;

forward_owned!(Add, add, BigReal);
forward_owned!(Sub, sub, BigReal);
forward_owned!(Mul, mul, BigReal);
forward_owned!(Div, div, BigReal);

/// Fails with `DivisionByZero` instead of producing an uninformative ball.
pub fn checked_div(a: &BigReal, b: &BigReal) -> Result<BigReal> {
    if b.contains_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(a / b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_digits_and_rendering() {
        let p = BigReal::pi(50);
        assert!(p.digits() >= 50);
        assert!(p.to_decimal(25).starts_with("3.1415926535897932384"));
    }

    #[test]
    fn sqrt_two_squared_contains_two() {
        let two = BigReal::from_int(2, 40);
        let s = two.sqrt();
        let back = s.square();
        let diff = &back - &two;
        assert!(diff.contains_zero());
        assert!(s.digits() >= 40);
    }

    #[test]
    fn division_by_ball_containing_zero_loses_everything() {
        let z = BigReal::with_error(0.0, 1e-10, 20);
        let q = &BigReal::one(20) / &z;
        assert!(!q.is_finite());
        assert!(checked_div(&BigReal::one(20), &z).is_err());
    }

    #[test]
    fn exp_ln_round_trip() {
        let x = BigReal::parse("1.2345", 60).unwrap();
        let y = x.exp().ln();
        assert!((&y - &x).contains_zero());
        assert!(y.digits() >= 55);
    }

    #[test]
    fn cancellation_is_reflected_in_digits() {
        let a = BigReal::with_error(1.0, 1e-20, 30);
        let b = BigReal::from_f64(1.0 - 1e-10, 30);
        let d = &a - &b;
        assert!(d.digits() <= 11);
    }

    #[test]
    fn normalize_sci_plain_forms() {
        assert_eq!(normalize_sci("1.2500e2"), "125");
        assert_eq!(normalize_sci("-3.0e-3"), "-0.003");
        assert_eq!(normalize_sci("1.5e0"), "1.5");
        assert_eq!(normalize_sci("1.0e100"), "1.0e100");
    }

    #[test]
    fn serde_round_trip_keeps_digits() {
        let x = BigReal::pi(40);
        let s = serde_json::to_string(&x).unwrap();
        let back: BigReal = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
        assert_eq!(back.digits(), x.digits());
        let legacy: BigReal = serde_json::from_str(r#"{"value":"1.25","digits":10}"#).unwrap();
        assert!((&legacy - &BigReal::from_f64(1.25, 20)).contains_zero());
    }
}
