//! Numeric substrate: exact rationals, quadratic-field elements, ball
//! arithmetic reals and complexes, polynomials and algebraic recognition.

mod complex;
mod lll;
mod poly;
mod quad;
mod rat;
pub(crate) mod real;
mod recognize;

use std::ops::{Add, Mul, Neg, Sub};

pub use complex::BigComplex;
pub use lll::lll_reduce;
pub use poly::UniPoly;
pub use quad::{quad_solve, quad_solve_general, square_part, QuadRoots, QuadVal};
pub use rat::Rat;
pub use real::{bits_for_digits, checked_div, BigReal, MIN_DIGITS};
pub use recognize::{digits_needed, recognize_algebraic, MAX_RECOGNITION_DEGREE, MIN_RECOGNITION_DIGITS};

/// Commutative ring interface used to evaluate the same closed-form
/// polynomial expressions exactly, numerically, or symbolically in one
/// variable.
pub trait Ring: Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self> {
    /// The integer `n` in the same ring (and at the same precision) as `self`.
    fn int(&self, n: i64) -> Self;
}

impl Ring for Rat {
    fn int(&self, n: i64) -> Self {
        Rat::from(n)
    }
}

impl Ring for QuadVal {
    fn int(&self, n: i64) -> Self {
        QuadVal::from_int(n)
    }
}

impl Ring for BigReal {
    fn int(&self, n: i64) -> Self {
        BigReal::from_int(n, self.working_digits())
    }
}

impl Ring for BigComplex {
    fn int(&self, n: i64) -> Self {
        BigComplex::from_real(BigReal::from_int(n, self.re.working_digits()))
    }
}

impl Ring for UniPoly {
    fn int(&self, n: i64) -> Self {
        UniPoly::constant(Rat::from(n))
    }
}
