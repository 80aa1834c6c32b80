use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::{Complete, Integer};
use serde::{Deserialize, Serialize};

use super::{BigComplex, BigReal, Rat};

/// Dense univariate polynomial over Q, coefficients lowest degree first.
/// The leading coefficient is nonzero unless the polynomial is zero (empty).
#[derive(Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(from = "PolyRepr", into = "PolyRepr")]
pub struct UniPoly {
    coeffs: Vec<Rat>,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    coeffs: Vec<Rat>,
}

impl From<PolyRepr> for UniPoly {
    fn from(r: PolyRepr) -> Self {
        UniPoly::new(r.coeffs)
    }
}

impl From<UniPoly> for PolyRepr {
    fn from(p: UniPoly) -> Self {
        PolyRepr { coeffs: p.coeffs }
    }
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(Rat::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        UniPoly::new(c.iter().map(|&x| Rat::from(x)).collect())
    }

    pub fn from_integers(c: &[Integer]) -> Self {
        UniPoly::new(c.iter().cloned().map(Rat::from).collect())
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: vec![] }
    }

    pub fn constant(c: Rat) -> Self {
        UniPoly::new(vec![c])
    }

    /// The polynomial `x`.
    pub fn x() -> Self {
        UniPoly::new(vec![Rat::zero(), Rat::one()])
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    pub fn eval_rat(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + c;
        }
        acc
    }

    pub fn eval_real(&self, x: &BigReal) -> BigReal {
        let digits = x.working_digits();
        let mut acc = BigReal::zero(digits);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + &BigReal::from_rat(c, digits);
        }
        acc
    }

    pub fn eval_complex(&self, x: &BigComplex) -> BigComplex {
        let digits = x.re.working_digits();
        let mut acc = BigComplex::zero(digits);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + &BigComplex::from_real(BigReal::from_rat(c, digits));
        }
        acc
    }

    pub fn derivative(&self) -> UniPoly {
        UniPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * &Rat::from(i as i64))
                .collect(),
        )
    }

    pub fn scale(&self, k: &Rat) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Integer coefficients with content removed and positive leading term.
    pub fn primitive_integer(&self) -> Vec<Integer> {
        if self.is_zero() {
            return vec![];
        }
        let mut den = Integer::from(1);
        for c in &self.coeffs {
            den.lcm_mut(c.denom());
        }
        let mut ints: Vec<Integer> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()).complete())
            .collect();
        let mut g = Integer::new();
        for c in &ints {
            g.gcd_mut(c);
        }
        let neg = ints.last().is_some_and(|c| c.cmp0() == std::cmp::Ordering::Less);
        for c in ints.iter_mut() {
            *c /= &g;
            if neg {
                *c = -c.clone();
            }
        }
        ints
    }

    pub fn primitive(&self) -> UniPoly {
        UniPoly::from_integers(&self.primitive_integer())
    }

    /// Largest absolute coefficient.
    pub fn height(&self) -> Rat {
        self.coeffs.iter().map(Rat::abs).max().unwrap_or_default()
    }

    /// Real roots in `[lo, hi]` at `digits` precision, found by bracketing
    /// sign changes on a uniform grid and bisection. Roots of even
    /// multiplicity are not detected.
    pub fn real_roots_in(&self, lo: &Rat, hi: &Rat, grid: usize, digits: u32) -> Vec<BigReal> {
        let mut roots = Vec::new();
        if self.degree().unwrap_or(0) == 0 || grid == 0 {
            return roots;
        }
        let step = &(hi - lo) / &Rat::from(grid as i64);
        let mut a = lo.clone();
        let mut fa = self.eval_rat(&a);
        for _ in 0..grid {
            let b = &a + &step;
            let fb = self.eval_rat(&b);
            if fa.is_zero() {
                roots.push(BigReal::from_rat(&a, digits));
            } else if fa.signum() * fb.signum() < 0 {
                roots.push(self.bisect(&a, &b, digits));
            }
            a = b;
            fa = fb;
        }
        if fa.is_zero() {
            roots.push(BigReal::from_rat(&a, digits));
        }
        roots
    }

    /// Bisection on a sign-changing bracket using exact dyadic endpoints.
    fn bisect(&self, a: &Rat, b: &Rat, digits: u32) -> BigReal {
        let (mut a, mut b) = (a.clone(), b.clone());
        let sa = self.eval_rat(&a).signum();
        let width = &b - &a;
        let bits = super::real::bits_for_digits(digits) as f64;
        let need = (bits + width.to_f64().abs().log2().max(0.0)).ceil() as usize + 4;
        let half = Rat::new(1, 2).expect("constant");
        for _ in 0..need {
            let m = &(&a + &b) * &half;
            let sm = self.eval_rat(&m).signum();
            if sm == 0 {
                return BigReal::from_rat(&m, digits);
            }
            if sm == sa {
                a = m;
            } else {
                b = m;
            }
        }
        let mid = &(&a + &b) * &half;
        let mut r = BigReal::from_rat(&mid, digits);
        r.add_error(&BigReal::from_rat(&(&(&b - &a) * &half), digits).abs_upper());
        r
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.signum() < 0;
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_coef = i == 0 || mag != Rat::one();
            if show_coef {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "{}x", if show_coef { "*" } else { "" })?,
                _ => write!(f, "{}x^{i}", if show_coef { "*" } else { "" })?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UniPoly({self})")
    }
}

impl Add<&UniPoly> for &UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::new((0..n).map(|i| &self.coeff(i) + &rhs.coeff(i)).collect())
    }
}

impl Sub<&UniPoly> for &UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::new((0..n).map(|i| &self.coeff(i) - &rhs.coeff(i)).collect())
    }
}

impl Mul<&UniPoly> for &UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: &UniPoly) -> UniPoly {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        UniPoly::new(out)
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Neg for UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        -&self
    }
}

super::real::forward_owned!(Add, add, UniPoly);
super::real::forward_owned!(Sub, sub, UniPoly);
super::real::forward_owned!(Mul, mul, UniPoly);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trims_and_displays() {
        let p = UniPoly::from_ints(&[-1, -1, 1, 0, 0]);
        assert_eq!(p.degree(), Some(2));
        assert_eq!(p.to_string(), "x^2 - x - 1");
        assert_eq!(UniPoly::from_ints(&[-1, 2]).to_string(), "2*x - 1");
        assert_eq!(UniPoly::zero().degree(), None);
    }

    #[test]
    fn arithmetic_and_eval() {
        let x = UniPoly::x();
        let p = &(&x * &x) - &UniPoly::constant(Rat::from(2));
        assert_eq!(p.eval_rat(&Rat::from(3)), Rat::from(7));
        assert_eq!(p.derivative(), UniPoly::from_ints(&[0, 2]));
        let half = UniPoly::new(vec![Rat::new(-1, 2).unwrap(), Rat::one()]);
        assert_eq!(half.primitive_integer(), vec![Integer::from(-1), Integer::from(2)]);
    }

    #[test]
    fn bisection_root() {
        let p = UniPoly::from_ints(&[-2, 0, 1]);
        let roots = p.real_roots_in(&Rat::from(0), &Rat::from(2), 8, 60);
        assert_eq!(roots.len(), 1);
        let diff = &roots[0].square() - &BigReal::from_int(2, 60);
        assert!(diff.abs_upper() < 1e-58);
    }

    #[test]
    fn serde_round_trip() {
        let p = UniPoly::from_ints(&[1, 0, -3]);
        let js = serde_json::to_string(&p).unwrap();
        assert_eq!(js, r#"{"coeffs":["1","0","-3"]}"#);
        assert_eq!(serde_json::from_str::<UniPoly>(&js).unwrap(), p);
    }
}
