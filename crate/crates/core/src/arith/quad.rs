//! Elements of a quadratic extension `Q(√d)`, written `rat + coef·√rad`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::ops::Pow;
use rug::{Complete, Integer};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{BigComplex, BigReal, Rat};
use crate::error::{Error, Result};

/// Trial-division bound used when extracting square factors from radicands.
const TRIAL_BOUND: u64 = 1 << 17;

/// Splits `n` (nonzero) as `s² · m`, returning `(s, m)`. `m` carries the sign
/// of `n` and has no square factor below the trial bound; a remaining large
/// cofactor is absorbed when it is itself a perfect square. `m` is never a
/// perfect square unless it is 1.
pub fn square_part(n: &Integer) -> (Integer, Integer) {
    let neg = n.cmp0() == Ordering::Less;
    let mut rest = n.clone().abs();
    let mut s = Integer::from(1);
    let mut m = Integer::from(1);
    let mut p: u64 = 2;
    while p <= TRIAL_BOUND {
        if p * p > rest {
            break;
        }
        let mut e = 0u32;
        while rest.is_divisible_u(p as u32) {
            rest /= p as u32;
            e += 1;
        }
        if e > 0 {
            s *= Integer::from(p).pow(e / 2);
            if e % 2 == 1 {
                m *= p as u32;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest.is_perfect_square() {
        s *= rest.sqrt();
    } else {
        m *= rest;
    }
    if neg {
        m = -m;
    }
    (s, m)
}

/// `rat + coef·√rad` with `rad` a square-free integer other than 1
/// (or `rad = 0` exactly when `coef = 0`).
#[derive(Clone)]
pub struct QuadVal {
    rat: Rat,
    coef: Rat,
    rad: Integer,
}

impl QuadVal {
    pub fn zero() -> Self {
        QuadVal::from_rat(Rat::zero())
    }

    pub fn one() -> Self {
        QuadVal::from_rat(Rat::one())
    }

    pub fn from_rat(r: Rat) -> Self {
        QuadVal {
            rat: r,
            coef: Rat::zero(),
            rad: Integer::new(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        QuadVal::from_rat(Rat::from(n))
    }

    /// Builds `rat + coef·√radicand` and brings it to canonical form.
    pub fn new(rat: Rat, coef: Rat, radicand: &Rat) -> Self {
        if coef.is_zero() || radicand.is_zero() {
            return QuadVal::from_rat(rat);
        }
        // √(p/q) = √(pq)/q
        let pq = (radicand.numer() * radicand.denom()).complete();
        let coef = &coef / &Rat::from(radicand.denom().clone());
        let (s, m) = square_part(&pq);
        let coef = &coef * &Rat::from(s);
        if m == 1 {
            return QuadVal::from_rat(&rat + &coef);
        }
        QuadVal { rat, coef, rad: m }
    }

    /// `√r` for a rational `r`.
    pub fn sqrt_of_rat(r: &Rat) -> Self {
        QuadVal::new(Rat::zero(), Rat::one(), r)
    }

    /// `√-1`.
    pub fn i() -> Self {
        QuadVal::sqrt_of_rat(&Rat::from(-1))
    }

    pub fn rat_part(&self) -> &Rat {
        &self.rat
    }

    pub fn radical_coeff(&self) -> &Rat {
        &self.coef
    }

    pub fn radicand(&self) -> &Integer {
        &self.rad
    }

    pub fn is_rational(&self) -> bool {
        self.coef.is_zero()
    }

    pub fn as_rat(&self) -> Option<&Rat> {
        self.is_rational().then_some(&self.rat)
    }

    pub fn is_zero(&self) -> bool {
        self.coef.is_zero() && self.rat.is_zero()
    }

    /// The value is non-real (negative radicand with nonzero radical part).
    pub fn is_complex(&self) -> bool {
        !self.coef.is_zero() && self.rad.cmp0() == Ordering::Less
    }

    /// Galois conjugate `rat - coef·√rad`.
    pub fn conj(&self) -> QuadVal {
        QuadVal {
            rat: self.rat.clone(),
            coef: -&self.coef,
            rad: self.rad.clone(),
        }
    }

    /// Field norm `rat² - coef²·rad`.
    pub fn norm(&self) -> Rat {
        &self.rat.square() - &(&self.coef.square() * &Rat::from(self.rad.clone()))
    }

    /// Field trace `2·rat`.
    pub fn trace(&self) -> Rat {
        &self.rat + &self.rat
    }

    /// Common radicand for a pair of values, if they live in one field.
    fn common_field(&self, other: &QuadVal) -> Result<Option<Integer>> {
        match (self.is_rational(), other.is_rational()) {
            (true, true) => Ok(None),
            (false, true) => Ok(Some(self.rad.clone())),
            (true, false) => Ok(Some(other.rad.clone())),
            (false, false) => {
                if self.rad == other.rad {
                    return Ok(Some(self.rad.clone()));
                }
                let prod = (&self.rad * &other.rad).complete();
                if prod.cmp0() == Ordering::Greater && prod.is_perfect_square() {
                    let keep = if self.rad.clone().abs() <= other.rad.clone().abs() {
                        &self.rad
                    } else {
                        &other.rad
                    };
                    Ok(Some(keep.clone()))
                } else {
                    Err(Error::IncompatibleRadicands(self.rad.to_string(), other.rad.to_string()))
                }
            }
        }
    }

    /// Radical coefficient re-expressed against radicand `d` (same field).
    fn coef_against(&self, d: &Integer) -> Rat {
        if self.is_rational() || &self.rad == d {
            return self.coef.clone();
        }
        // √rad = (√(rad·d)/|d|)·√d
        let s = (&self.rad * d).complete().sqrt();
        &self.coef * &Rat::new(s, d.clone().abs()).expect("nonzero radicand")
    }

    fn assemble(rat: Rat, coef: Rat, rad: Option<Integer>) -> QuadVal {
        match rad {
            Some(rad) if !coef.is_zero() => QuadVal { rat, coef, rad },
            _ => QuadVal::from_rat(rat),
        }
    }

    pub fn try_add(&self, other: &QuadVal) -> Result<QuadVal> {
        let field = self.common_field(other)?;
        let (c1, c2) = match &field {
            Some(d) => (self.coef_against(d), other.coef_against(d)),
            None => (Rat::zero(), Rat::zero()),
        };
        Ok(QuadVal::assemble(&self.rat + &other.rat, &c1 + &c2, field))
    }

    pub fn try_sub(&self, other: &QuadVal) -> Result<QuadVal> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &QuadVal) -> Result<QuadVal> {
        let field = self.common_field(other)?;
        let Some(d) = field else {
            return Ok(QuadVal::from_rat(&self.rat * &other.rat));
        };
        let (c1, c2) = (self.coef_against(&d), other.coef_against(&d));
        let dr = Rat::from(d.clone());
        let rat = &(&self.rat * &other.rat) + &(&(&c1 * &c2) * &dr);
        let coef = &(&self.rat * &c2) + &(&c1 * &other.rat);
        Ok(QuadVal::assemble(rat, coef, Some(d)))
    }

    pub fn recip(&self) -> Result<QuadVal> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.norm();
        let conj = self.conj();
        Ok(QuadVal::assemble(
            conj.rat.checked_div(&n)?,
            conj.coef.checked_div(&n)?,
            (!self.is_rational()).then(|| self.rad.clone()),
        ))
    }

    pub fn try_div(&self, other: &QuadVal) -> Result<QuadVal> {
        self.try_mul(&other.recip()?)
    }

    pub fn square(&self) -> QuadVal {
        self * self
    }

    pub fn scale(&self, k: &Rat) -> QuadVal {
        QuadVal::assemble(&self.rat * k, &self.coef * k, (!self.is_rational()).then(|| self.rad.clone()))
    }

    /// Exact square root when it exists in Q, in Q(√m) for a rational
    /// argument, or in the argument's own field.
    pub fn sqrt(&self) -> Option<QuadVal> {
        if self.is_zero() {
            return Some(QuadVal::zero());
        }
        if self.is_rational() {
            return Some(QuadVal::sqrt_of_rat(&self.rat));
        }
        // (x + y√d)² = r + c√d  ⇒  x² + d y² = r, 2xy = c.
        // x² is a root of X² - rX + d c²/4 = 0.
        let d = Rat::from(self.rad.clone());
        let disc = &self.rat.square() - &(&d * &self.coef.square());
        let s = disc.sqrt_exact()?;
        let two = Rat::from(2);
        for cand in [&(&self.rat + &s) / &two, &(&self.rat - &s) / &two] {
            if let Some(x) = cand.sqrt_exact() {
                if x.is_zero() {
                    continue;
                }
                let y = &self.coef / &(&x * &two);
                let root = QuadVal {
                    rat: x,
                    coef: y,
                    rad: self.rad.clone(),
                };
                if root.square() == *self {
                    return Some(root);
                }
            }
        }
        // Pure radical roots: (y√d)² = d y² is rational, so none here.
        None
    }

    pub fn to_complex(&self, digits: u32) -> BigComplex {
        let r = BigReal::from_rat(&self.rat, digits);
        if self.is_rational() {
            return BigComplex::from_real(r);
        }
        let c = BigReal::from_rat(&self.coef, digits);
        let root = BigReal::from_integer(&self.rad.clone().abs(), digits).sqrt();
        let part = &c * &root;
        if self.rad.cmp0() == Ordering::Less {
            BigComplex::new(r, part)
        } else {
            BigComplex::from_real(&r + &part)
        }
    }

    /// Real value; `None` for non-real elements.
    pub fn to_real(&self, digits: u32) -> Option<BigReal> {
        if self.is_complex() {
            None
        } else {
            Some(self.to_complex(digits).re)
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_complex() {
            f64::NAN
        } else {
            self.rat.to_f64() + self.coef.to_f64() * self.rad.to_f64().sqrt()
        }
    }

    /// Sign of a real element. `None` for non-real values.
    pub fn signum(&self) -> Option<i32> {
        if self.is_complex() {
            return None;
        }
        if self.is_rational() {
            return Some(self.rat.signum());
        }
        // compare rat with -coef·√rad exactly through squares
        let (rs, cs) = (self.rat.signum(), self.coef.signum());
        if rs == 0 {
            return Some(cs);
        }
        if rs == cs {
            return Some(rs);
        }
        let lhs = self.rat.square();
        let rhs = &self.coef.square() * &Rat::from(self.rad.clone());
        Some(match lhs.cmp(&rhs) {
            Ordering::Greater => rs,
            Ordering::Less => cs,
            Ordering::Equal => 0,
        })
    }

    /// Field-consistent lexicographic key used for deterministic ordering.
    pub fn lex_key(&self) -> (Rat, Rat, Integer) {
        (self.rat.clone(), self.coef.clone(), self.rad.clone())
    }
}

impl PartialEq for QuadVal {
    fn eq(&self, other: &Self) -> bool {
        if self.rat != other.rat {
            return false;
        }
        match (self.is_rational(), other.is_rational()) {
            (true, true) => true,
            (false, false) => {
                self.coef.signum() == other.coef.signum()
                    && self.rad.cmp0() == other.rad.cmp0()
                    && &self.coef.square() * &Rat::from(self.rad.clone())
                        == &other.coef.square() * &Rat::from(other.rad.clone())
            }
            _ => false,
        }
    }
}

impl Eq for QuadVal {}

impl From<Rat> for QuadVal {
    fn from(r: Rat) -> Self {
        QuadVal::from_rat(r)
    }
}

impl From<&Rat> for QuadVal {
    fn from(r: &Rat) -> Self {
        QuadVal::from_rat(r.clone())
    }
}

impl From<i64> for QuadVal {
    fn from(n: i64) -> Self {
        QuadVal::from_int(n)
    }
}

impl fmt::Display for QuadVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", self.rat);
        }
        let radical = if self.rad == -1 { "i".to_string() } else { format!("√{}", self.rad) };
        let coef = if self.coef == Rat::one() {
            String::new()
        } else if self.coef == Rat::from(-1) {
            "-".to_string()
        } else {
            format!("{}·", self.coef)
        };
        if self.rat.is_zero() {
            write!(f, "{coef}{radical}")
        } else if self.coef.signum() < 0 {
            let pos = -&self.coef;
            let pcoef = if pos == Rat::one() { String::new() } else { format!("{pos}·") };
            write!(f, "{} - {pcoef}{radical}", self.rat)
        } else {
            write!(f, "{} + {coef}{radical}", self.rat)
        }
    }
}

impl fmt::Debug for QuadVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Serialize, Deserialize)]
struct QuadRepr {
    rat: Rat,
    coef: Rat,
    rad: Rat,
}

impl Serialize for QuadVal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        QuadRepr {
            rat: self.rat.clone(),
            coef: self.coef.clone(),
            rad: Rat::from(self.rad.clone()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuadVal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = QuadRepr::deserialize(d)?;
        Ok(QuadVal::new(r.rat, r.coef, &r.rad))
    }
}

// Operator forms panic when the operands live in different quadratic fields;
// the `try_*` methods report that as an error instead.
macro_rules! quad_binop {
    ($tr:ident, $m:ident, $try:ident) => {
        impl $tr<&QuadVal> for &QuadVal {
            type Output = QuadVal;
            fn $m(self, rhs: &QuadVal) -> QuadVal {
                match self.$try(rhs) {
                    Ok(v) => v,
                    Err(e) => panic!("{e}"),
                }
            }
        }
        impl $tr<QuadVal> for QuadVal {
            type Output = QuadVal;
            fn $m(self, rhs: QuadVal) -> QuadVal {
                $tr::$m(&self, &rhs)
            }
        }
        impl $tr<&QuadVal> for QuadVal {
            type Output = QuadVal;
            fn $m(self, rhs: &QuadVal) -> QuadVal {
                $tr::$m(&self, rhs)
            }
        }
        impl $tr<QuadVal> for &QuadVal {
            type Output = QuadVal;
            fn $m(self, rhs: QuadVal) -> QuadVal {
                $tr::$m(self, &rhs)
            }
        }
    };
}

quad_binop!(Add, add, try_add);
quad_binop!(Sub, sub, try_sub);
quad_binop!(Mul, mul, try_mul);
quad_binop!(Div, div, try_div);

impl Neg for &QuadVal {
    type Output = QuadVal;
    fn neg(self) -> QuadVal {
        QuadVal {
            rat: -&self.rat,
            coef: -&self.coef,
            rad: self.rad.clone(),
        }
    }
}

impl Neg for QuadVal {
    type Output = QuadVal;
    fn neg(self) -> QuadVal {
        -&self
    }
}

/// Roots of `A x² + B x + C = 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum QuadRoots {
    /// Both roots in one quadratic field; the `+√` branch comes first.
    Exact(QuadVal, QuadVal),
    /// The discriminant has no square root in the coefficients' field.
    Numeric(BigComplex, BigComplex),
}

impl QuadRoots {
    pub fn exact(&self) -> Option<(&QuadVal, &QuadVal)> {
        match self {
            QuadRoots::Exact(a, b) => Some((a, b)),
            QuadRoots::Numeric(..) => None,
        }
    }

    pub fn to_complex(&self, digits: u32) -> (BigComplex, BigComplex) {
        match self {
            QuadRoots::Exact(a, b) => (a.to_complex(digits), b.to_complex(digits)),
            QuadRoots::Numeric(a, b) => (a.clone(), b.clone()),
        }
    }
}

/// Solves `A x² + B x + C = 0` with rational coefficients, returning
/// `x = (-B ± √(B² - 4AC)) / 2A` in canonical form (`+` first).
pub fn quad_solve(a: &Rat, b: &Rat, c: &Rat) -> Result<(QuadVal, QuadVal)> {
    match quad_solve_general(&a.into(), &b.into(), &c.into(), 50)? {
        QuadRoots::Exact(x, y) => Ok((x, y)),
        QuadRoots::Numeric(..) => unreachable!("rational coefficients always have exact roots"),
    }
}

/// Quadratic solve over a quadratic field. Falls back to numeric roots at
/// `digits` precision when `√(B² - 4AC)` is not in a quadratic field
/// compatible with the coefficients.
pub fn quad_solve_general(a: &QuadVal, b: &QuadVal, c: &QuadVal, digits: u32) -> Result<QuadRoots> {
    if a.is_zero() {
        return Err(Error::DegenerateQuadratic);
    }
    let four = QuadVal::from_int(4);
    let disc = b.try_mul(b)?.try_sub(&four.try_mul(a)?.try_mul(c)?)?;
    let two_a = a.try_add(a)?;
    if let Some(root) = disc.sqrt() {
        let exact = (|| -> Result<QuadRoots> {
            let plus = (-b).try_add(&root)?.try_div(&two_a)?;
            let minus = (-b).try_sub(&root)?.try_div(&two_a)?;
            Ok(QuadRoots::Exact(plus, minus))
        })();
        if let Ok(r) = exact {
            return Ok(r);
        }
    }
    let (ac, bc, dc) = (a.to_complex(digits), b.to_complex(digits), disc.to_complex(digits));
    let s = dc.sqrt();
    let two = BigComplex::from_real(BigReal::from_int(2, digits));
    let den = &two * &ac;
    let nb = -&bc;
    Ok(QuadRoots::Numeric(&(&nb + &s) / &den, &(&nb - &s) / &den))
}
