use rug::float::Round;
use rug::ops::Pow;
use rug::{Float, Integer};

use super::lll::lll_reduce;
use super::{BigReal, UniPoly};
use crate::error::{Error, Result};

/// Digits the input must carry before any search is attempted.
pub const MIN_RECOGNITION_DIGITS: u32 = 50;
pub const MAX_RECOGNITION_DEGREE: u32 = 8;

/// Digits needed to make an accidental small residual at degree `d` and
/// height `h` unlikely: the residual threshold 10^-(digits-10) has to sit
/// well below the spacing of the (2h+1)^(d+1) candidate values.
pub fn digits_needed(x: &BigReal, degree: u32, coeff_bound: u64) -> u32 {
    let h = (2.0 * coeff_bound as f64 + 1.0).log10();
    let scale = x.to_f64().abs().max(1.0).log10();
    let need = (degree as f64 + 1.0) * h + degree as f64 * scale + 2.0 + 10.0;
    need.ceil() as u32 + 1
}

/// Searches for a primitive integer polynomial of degree ≤ `max_degree`
/// with coefficients bounded by `coeff_bound` that vanishes at `x` within
/// `10^-(digits-10)`, where `digits` are the guaranteed digits of `x`.
///
/// Degrees are tried in increasing order and the least-height candidate
/// at the first successful degree is returned.
pub fn recognize_algebraic(x: &BigReal, max_degree: u32, coeff_bound: u64) -> Result<Option<UniPoly>> {
    if max_degree == 0 || max_degree > MAX_RECOGNITION_DEGREE {
        return Err(Error::InvalidArgument(format!(
            "max_degree must be in 1..={MAX_RECOGNITION_DEGREE}, got {max_degree}"
        )));
    }
    if coeff_bound == 0 {
        return Err(Error::InvalidArgument("coeff_bound must be positive".into()));
    }
    let digits = x.digits();
    let needed = digits_needed(x, max_degree, coeff_bound).max(MIN_RECOGNITION_DIGITS);
    if digits < needed {
        return Err(Error::InsufficientPrecision {
            needed,
            available: digits,
        });
    }
    let threshold = Float::with_val(64, Float::i_exp(1, 0)) / Float::with_val(64, 10).pow(digits - 10);
    let bound = Integer::from(coeff_bound);

    for d in 1..=max_degree as usize {
        let powers: Vec<BigReal> = (0..=d).map(|i| x.powi(i as i64)).collect();
        let scale_digits = digits.saturating_sub(2);
        let k = Float::with_val(x.prec_bits(), 10).pow(scale_digits);
        let mut basis: Vec<Vec<Integer>> = (0..=d)
            .map(|i| {
                let mut row = vec![Integer::new(); d + 2];
                row[i] = Integer::from(1);
                let scaled = Float::with_val(x.prec_bits(), powers[i].mid() * &k);
                row[d + 1] = scaled.to_integer_round(Round::Nearest).map(|p| p.0).unwrap_or_default();
                row
            })
            .collect();
        lll_reduce(&mut basis);

        let mut best: Option<(Integer, UniPoly)> = None;
        for row in &basis {
            let coeffs = &row[..=d];
            if coeffs.iter().all(|c| c.cmp0() == std::cmp::Ordering::Equal) || coeffs.iter().any(|c| c.clone().abs() > bound) {
                continue;
            }
            let poly = UniPoly::from_integers(coeffs);
            if poly.degree().unwrap_or(0) == 0 {
                continue;
            }
            let resid = poly.eval_real(x);
            if resid.abs_upper() >= threshold {
                continue;
            }
            let poly = poly.primitive();
            let height = poly.primitive_integer().iter().map(|c| c.clone().abs()).max().unwrap_or_default();
            if best.as_ref().is_none_or(|(h, _)| height < *h) {
                best = Some((height, poly));
            }
        }
        if let Some((_, p)) = best {
            return Ok(Some(p));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_input() {
        let x = BigReal::from_f64(0.5, 60);
        let p = recognize_algebraic(&x, 2, 10).unwrap().unwrap();
        assert_eq!(p, UniPoly::from_ints(&[-1, 2]));
    }

    #[test]
    fn golden_ratio() {
        let five = BigReal::from_int(5, 60);
        let phi = &(&BigReal::one(60) + &five.sqrt()) / &BigReal::from_int(2, 60);
        let p = recognize_algebraic(&phi, 2, 10).unwrap().unwrap();
        assert_eq!(p, UniPoly::from_ints(&[-1, -1, 1]));
    }

    #[test]
    fn pi_is_not_recognized() {
        assert_eq!(recognize_algebraic(&BigReal::pi(60), 4, 100).unwrap(), None);
    }

    #[test]
    fn low_precision_is_rejected() {
        let x = BigReal::from_f64(0.5, 30);
        assert!(matches!(recognize_algebraic(&x, 2, 10), Err(Error::InsufficientPrecision { .. })));
        let x = BigReal::pi(60);
        assert!(matches!(recognize_algebraic(&x, 8, 1_000_000), Err(Error::InsufficientPrecision { .. })));
    }
}
