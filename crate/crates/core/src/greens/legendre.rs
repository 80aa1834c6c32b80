//! Legendre functions of the second kind `Q_ν(t)`, `t > 1`.

use crate::arith::BigReal;
use crate::error::{Error, Result};

const MAX_LEVELS: u32 = 14;

/// `Q_{s-1}(t) = ∫₀^∞ (t + √(t²-1) cosh u)^{-s} du` by tanh-sinh quadrature.
///
/// The substitution `x = e^{-u}` turns the integral into
/// `∫₀¹ x^{s-1} (t x + c (1 + x²)/2)^{-s} dx` with `c = √(t²-1)`, a finite
/// interval with at worst an endpoint singularity, so no truncation of the
/// infinite range is needed. The returned ball includes the difference of
/// the last two quadrature levels.
pub fn legendre_q(s: &BigReal, t: &BigReal, precision: u32) -> Result<BigReal> {
    let work = precision + 20;
    let one = BigReal::one(work);
    let t = t.set_prec_digits(work);
    let s = s.set_prec_digits(work);
    if !t.definitely_gt(&one) {
        return Err(Error::SingularArgument(format!("t = {t} must exceed 1")));
    }
    if s.sign() != Some(std::cmp::Ordering::Greater) {
        return Err(Error::InvalidArgument(format!("s = {s} must be positive")));
    }
    let c = (&t.square() - &one).sqrt();
    let half = BigReal::from_f64(0.5, work);
    let sm1 = &s - &one;
    let integrand = |x: &BigReal| -> BigReal {
        // x (t + c (x + 1/x)/2)
        let base = &(&t * x) + &(&(&c * &half) * &(&one + &x.square()));
        let den = base.pow(&s);
        if sm1.sign() == Some(std::cmp::Ordering::Equal) {
            den.recip()
        } else {
            &x.pow(&sm1) / &den
        }
    };

    let pi_half = &BigReal::pi(work) * &half;
    let eps = BigReal::from_f64(10f64.powi(-(work as i32)), work);
    let node = |tau: &BigReal| -> (BigReal, BigReal, BigReal) {
        let et = tau.exp();
        let sinh = &(&et - &et.recip()) * &half;
        let cosh = &(&et + &et.recip()) * &half;
        let ss = &pi_half * &sinh;
        let e2 = (&ss + &ss).exp();
        // x = 1/(1+e^{-2s}), 1-x = 1/(1+e^{2s}), dx/dτ = π cosh τ · x(1-x)
        let x_hi = &one / &(&one + &e2.recip());
        let x_lo = &one / &(&one + &e2);
        let w = &(&(&pi_half + &pi_half) * &cosh) * &(&x_hi * &x_lo);
        (x_lo, x_hi, w)
    };
    let level_sum = |h: &BigReal, j_step: usize, j_start: usize| -> BigReal {
        let mut acc = BigReal::zero(work);
        let mut j = j_start;
        loop {
            let tau = h * &BigReal::from_int(j as i64, work);
            let (x_lo, x_hi, w) = node(&tau);
            if w.definitely_lt(&eps) || x_lo.sign() != Some(std::cmp::Ordering::Greater) {
                break;
            }
            let f = &integrand(&x_lo) + &integrand(&x_hi);
            acc = &acc + &(&w * &f);
            j += j_step;
        }
        acc
    };

    // level 0, h = 1
    let mut h = BigReal::one(work);
    let (_, _, w0) = node(&BigReal::zero(work));
    let mut raw = &(&w0 * &integrand(&half)) + &level_sum(&h, 1, 1);
    let mut est = &raw * &h;
    let target = 10f64.powi(-(precision as i32) - 5);
    for _ in 1..MAX_LEVELS {
        h = &h * &half;
        // only odd multiples of the new step are new nodes
        raw = &raw + &level_sum(&h, 2, 1);
        let next = &raw * &h;
        let diff = (&next - &est).abs().to_f64();
        est = next;
        if diff < target * est.to_f64().abs().max(1e-300) {
            let mut out = est.set_prec_digits(precision + 10);
            out.add_error_f64(diff);
            return Ok(out);
        }
    }
    Err(Error::BudgetExceeded(format!("tanh-sinh did not converge in {MAX_LEVELS} levels")))
}

/// `Q_1(t) = (t/2) ln((t+1)/(t-1)) - 1`.
pub fn legendre_q1_closed(t: &BigReal) -> BigReal {
    let digits = t.working_digits();
    let one = BigReal::one(digits);
    let l = (&(t + &one) / &(t - &one)).ln();
    &(&(t * &l) * &BigReal::from_f64(0.5, digits)) - &one
}

/// `Q_n(1 + tm1)` in double precision together with a relative error bound.
/// Taking `t - 1` directly avoids cancellation near the singular locus.
pub fn legendre_q_f64(n: u32, tm1: f64) -> Option<(f64, f64)> {
    if tm1.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) || !tm1.is_finite() {
        return None;
    }
    let t = 1.0 + tm1;
    if t < 1.25 {
        Some(q_recurrence(n, t, tm1))
    } else {
        Some(q_series(n, t))
    }
}

/// Upward recurrence; the relative error grows like `P_n Q_0 / Q_n`.
fn q_recurrence(n: u32, t: f64, tm1: f64) -> (f64, f64) {
    let q0 = 0.5 * (2.0 / tm1).ln_1p();
    if n == 0 {
        return (q0, 4.0 * f64::EPSILON);
    }
    let (mut qm, mut q) = (q0, t * q0 - 1.0);
    let (mut pm, mut p) = (1.0, t);
    for k in 1..n {
        let kf = k as f64;
        let qn = ((2.0 * kf + 1.0) * t * q - kf * qm) / (kf + 1.0);
        let pn = ((2.0 * kf + 1.0) * t * p - kf * pm) / (kf + 1.0);
        qm = q;
        q = qn;
        pm = p;
        p = pn;
    }
    let amp = 1.0 + p * q0 / q.abs();
    (q, 8.0 * (n as f64 + 1.0) * amp * f64::EPSILON)
}

/// Hypergeometric expansion in `1/t²`:
/// `Q_n(t) = n!/Π_{j≤n}(j+1/2) · (2t)^{-n-1} · ₂F₁((n+1)/2, (n+2)/2; n+3/2; t^{-2})`.
fn q_series(n: u32, t: f64) -> (f64, f64) {
    let nf = n as f64;
    let mut pref = 1.0 / t;
    for j in 1..=n {
        pref *= j as f64 / ((j as f64 + 0.5) * 2.0 * t);
    }
    let z = 1.0 / (t * t);
    let (a, b, c) = ((nf + 1.0) / 2.0, (nf + 2.0) / 2.0, nf + 1.5);
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0.0;
    loop {
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
        sum += term;
        k += 1.0;
        if term < 1e-18 * sum || k > 4000.0 {
            break;
        }
    }
    // remaining terms are bounded by a geometric series with ratio < z·(1+ε)
    let rem = term * z / (1.0 - z).max(1e-300) / sum;
    (pref * sum, 4.0 * f64::EPSILON * (k + 2.0) + rem)
}
