//! Higher Green's functions for `PSL₂(Z)`: truncated group sums of
//! Legendre `Q`, their Hecke translates and principal-part combinations.
//!
//! Sums are truncated to the hyperbolic ball `cosh d(z1, γ z2) ≤ T`, which
//! makes the truncation independent of how the group is enumerated. `T` is
//! derived from the matrix bound `N` so that every element inside the ball
//! has entries of absolute value at most `N`.

mod domain;
mod legendre;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use domain::{reduce_fd, Mat2, UHPoint, BOUNDARY_TOL, DEFAULT_DIGITS};
pub use legendre::{legendre_q, legendre_q1_closed, legendre_q_f64};

use crate::arith::{BigReal, Rat};
use crate::cycle::RegulatorResult;
use crate::error::{Error, Result};

/// Digits attached to double-precision sums.
const SUM_DIGITS: u32 = 20;

/// Which Legendre order goes with weight `k`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QOrder {
    /// `Q_{k-1}`.
    #[default]
    WeightMinusOne,
    /// `Q_k`.
    Weight,
}

impl QOrder {
    fn order(self, k: u32) -> u32 {
        match self {
            QOrder::WeightMinusOne => k - 1,
            QOrder::Weight => k,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    /// Largest matrix entry (in absolute value) of the enumerated elements.
    pub matrix_bound: u64,
    /// Adaptive mode stops once two successive bounds agree to this.
    pub target_tol: f64,
    pub adaptive: bool,
    /// Adaptive refinement fails past this bound.
    pub max_bound: u64,
    /// Distance below which `z1` counts as lying on the orbit of `z2`.
    pub singular_tol: f64,
    pub q_order: QOrder,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            matrix_bound: 200,
            target_tol: 1e-6,
            adaptive: false,
            max_bound: 1 << 14,
            singular_tol: 1e-8,
            q_order: QOrder::default(),
        }
    }
}

impl TruncationPolicy {
    pub fn with_bound(matrix_bound: u64) -> Self {
        TruncationPolicy {
            matrix_bound,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.matrix_bound < 10 {
            return Err(Error::InvalidArgument(format!(
                "matrix_bound must be at least 10, got {}",
                self.matrix_bound
            )));
        }
        if !(self.target_tol > 0.0) {
            return Err(Error::InvalidArgument("target_tol must be positive".into()));
        }
        if !(self.singular_tol > 0.0) {
            return Err(Error::InvalidArgument("singular_tol must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreensValue {
    pub value: BigReal,
    pub tail_estimate: BigReal,
    pub terms_summed: u64,
    pub matrix_bound: u64,
}

impl GreensValue {
    pub fn value_f64(&self) -> f64 {
        self.value.to_f64()
    }

    pub fn tail_f64(&self) -> f64 {
        self.tail_estimate.to_f64()
    }

    /// Tail plus rounding radius.
    pub fn error_budget(&self) -> f64 {
        self.tail_f64() + self.value.rad_f64()
    }
}

/// Principal part `Σ c_f(-m) q^{-m}` of a weakly holomorphic form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PrincipalRepr", into = "PrincipalRepr")]
pub struct PrincipalPart {
    coeffs: BTreeMap<u64, Rat>,
}

#[derive(Serialize, Deserialize)]
struct PrincipalRepr {
    coeffs: BTreeMap<String, Rat>,
}

impl TryFrom<PrincipalRepr> for PrincipalPart {
    type Error = Error;
    fn try_from(r: PrincipalRepr) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for (k, v) in r.coeffs {
            let m: u64 = k.trim().parse().map_err(|_| Error::Parse(format!("bad index {k:?}")))?;
            if coeffs.insert(m, v).is_some() {
                return Err(Error::Parse(format!("index {m} repeated")));
            }
        }
        PrincipalPart::new(coeffs)
    }
}

impl From<PrincipalPart> for PrincipalRepr {
    fn from(p: PrincipalPart) -> Self {
        PrincipalRepr {
            coeffs: p.coeffs.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        }
    }
}

impl PrincipalPart {
    pub fn new(coeffs: BTreeMap<u64, Rat>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("principal part is empty".into()));
        }
        if coeffs.contains_key(&0) {
            return Err(Error::InvalidArgument("principal part indices must be positive".into()));
        }
        Ok(PrincipalPart { coeffs })
    }

    pub fn coeffs(&self) -> &BTreeMap<u64, Rat> {
        &self.coeffs
    }
}

/// `σ² = e^{d(i, z)}`.
fn sigma_sq(x: f64, y: f64) -> f64 {
    let c = 0.5 * (y + (x * x + 1.0) / y);
    c + (c * c - 1.0).max(0.0).sqrt()
}

/// Ball radius `T` for bound `n` and determinant `m`.
fn ball_cut(n: u64, m: u64, z1: (f64, f64), z2: (f64, f64)) -> f64 {
    let s = sigma_sq(z1.0, z1.1) * sigma_sq(z2.0, z2.1);
    ((n as f64).powi(2) / m as f64 - 1.0) / (2.0 * s)
}

fn divisor_sum(m: u64) -> u64 {
    (1..=m).filter(|d| m.is_multiple_of(*d)).sum()
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `(g, x, y)` with `x a + y b = g = gcd(a, b) ≥ 0`.
fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i64, 0i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// Neumaier-compensated accumulator.
#[derive(Clone, Copy, Default)]
struct Acc {
    sum: f64,
    comp: f64,
    abs: f64,
    err: f64,
    terms: u64,
}

impl Acc {
    fn push(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn add(&mut self, x: f64, rel: f64) {
        self.push(x);
        self.abs += x.abs();
        self.err += x.abs() * rel;
        self.terms += 1;
    }

    fn merge(&mut self, o: &Acc) {
        self.push(o.sum);
        self.push(o.comp);
        self.abs += o.abs;
        self.err += o.err;
        self.terms += o.terms;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }

    fn rounding(&self) -> f64 {
        self.err + 4.0 * f64::EPSILON * self.abs
    }
}

/// `Σ Q_ν(cosh d(z1, M z2))` over integer matrices of determinant `m`
/// modulo `±1`, restricted to `cosh d ≤ t_cut`.
fn ball_sum(z1: (f64, f64), z2: (f64, f64), m: u64, t_cut: f64, order: u32, sing: f64) -> Result<Acc> {
    let (x1, y1) = z1;
    let (x2, y2) = z2;
    let mi = m as i64;
    let mf = m as f64;
    if t_cut <= 1.0 {
        return Ok(Acc::default());
    }
    // Im(M z2) must exceed y1 / (T + √(T²-1))
    let y_min = y1 / (t_cut + (t_cut * t_cut - 1.0).sqrt());
    let r2 = mf * y2 / y_min;
    let c_max = (r2.sqrt() / y2).floor() as i64;

    // Terms with a fixed bottom row: w = r0 + k/step + iY, k ∈ Z.
    let row = |acc: &mut Acc, r0: f64, step: f64, yy: f64| -> Result<()> {
        let rho2 = 2.0 * y1 * yy * (t_cut - 1.0) - (y1 - yy).powi(2);
        if rho2 < 0.0 {
            return Ok(());
        }
        let rho = rho2.sqrt();
        let k_lo = ((x1 - r0 - rho) * step).ceil() as i64;
        let k_hi = ((x1 - r0 + rho) * step).floor() as i64;
        for k in k_lo..=k_hi {
            let dx = x1 - (r0 + k as f64 / step);
            let dy = y1 - yy;
            let dist2 = dx * dx + dy * dy;
            if dist2 < sing * sing {
                return Err(Error::OnSingularLocus { m: Some(m) });
            }
            let tm1 = dist2 / (2.0 * y1 * yy);
            if tm1 > t_cut - 1.0 {
                continue;
            }
            let (q, rel) = legendre_q_f64(order, tm1).ok_or(Error::OnSingularLocus { m: Some(m) })?;
            acc.add(q, rel);
        }
        Ok(())
    };

    let per_c = |c: i64| -> Result<Acc> {
        let mut acc = Acc::default();
        if c == 0 {
            for d in 1..=mi {
                if mi % d != 0 {
                    continue;
                }
                let a = mi / d;
                row(&mut acc, a as f64 * x2 / d as f64, d as f64, a as f64 * y2 / d as f64)?;
            }
            return Ok(acc);
        }
        let cf = c as f64;
        let room = r2 - cf * cf * y2 * y2;
        if room < 0.0 {
            return Ok(acc);
        }
        let d_lo = (-cf * x2 - room.sqrt()).ceil() as i64;
        let d_hi = (-cf * x2 + room.sqrt()).floor() as i64;
        for d in d_lo..=d_hi {
            let g = gcd(c, d);
            if mi % g != 0 {
                continue;
            }
            // a0 d - b0 c = m from x d + y (-c) = g
            let (_, xs, _) = ext_gcd(d, -c);
            let a0 = (mi / g) * xs;
            let cp = c / g;
            let a_frac = a0.rem_euclid(cp) as f64 / cf;
            let cx_d = cf * x2 + d as f64;
            let den = cx_d * cx_d + cf * cf * y2 * y2;
            let yy = mf * y2 / den;
            // w = a0/c - m/(c (c z2 + d))
            let r0 = a_frac - mf * cx_d / (cf * den);
            row(&mut acc, r0, g as f64, yy)?;
        }
        Ok(acc)
    };

    let parts: Vec<Result<Acc>> = (0..=c_max).into_par_iter().map(per_c).collect();
    let mut total = Acc::default();
    for p in parts {
        total.merge(&p?);
    }
    Ok(total)
}

fn reduced_f64(z: &UHPoint) -> (f64, f64) {
    reduce_fd(z).0.to_f64()
}

/// `-2 Σ Q` over the ball for determinant `m`, with tail and rounding.
fn green_fixed(k: u32, m: u64, z1: (f64, f64), z2: (f64, f64), bound: u64, policy: &TruncationPolicy) -> Result<GreensValue> {
    // the sum is symmetric; a fixed argument order makes it so bit for bit
    let (z1, z2) = if z1 <= z2 { (z1, z2) } else { (z2, z1) };
    let order = policy.q_order.order(k);
    let t_cut = ball_cut(bound, m, z1, z2);
    if t_cut <= 1.0 {
        return Err(Error::InvalidArgument(format!(
            "matrix_bound {bound} is too small for these points (ball radius {t_cut})"
        )));
    }
    let s = ball_sum(z1, z2, m, t_cut, order, policy.singular_tol)?;
    let value = -2.0 * s.value();
    let rounding = 2.0 * s.rounding();
    let (q_t, _) = legendre_q_f64(order, t_cut - 1.0).expect("t_cut > 1");
    // lattice count ~ 6 σ₁(m) T, ∫_T^∞ Q_ν ≤ Q_ν(T) T/ν; safety factor 4
    let nu = (order as f64).max(1.0);
    let tail = 2.0 * 24.0 * divisor_sum(m) as f64 * q_t * t_cut / nu;
    Ok(GreensValue {
        value: BigReal::with_error(value, rounding, SUM_DIGITS),
        tail_estimate: BigReal::from_f64(tail, SUM_DIGITS),
        terms_summed: s.terms,
        matrix_bound: bound,
    })
}

fn adaptive<F: Fn(u64) -> Result<GreensValue>>(policy: &TruncationPolicy, f: F) -> Result<GreensValue> {
    policy.validate()?;
    let mut prev = f(policy.matrix_bound)?;
    if !policy.adaptive {
        return Ok(prev);
    }
    let mut bound = policy.matrix_bound;
    loop {
        bound *= 2;
        if bound > policy.max_bound {
            return Err(Error::BudgetExceeded(format!(
                "no agreement to {} up to matrix_bound {}",
                policy.target_tol, policy.max_bound
            )));
        }
        let next = f(bound)?;
        if (next.value_f64() - prev.value_f64()).abs() < policy.target_tol {
            return Ok(next);
        }
        prev = next;
    }
}

fn check_weight(k: u32) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("weight must be at least 2, got {k}")));
    }
    Ok(())
}

/// `G_k(z1, z2) = -2 Σ_{γ ∈ PSL₂(Z)} Q_{k-1}(cosh d(z1, γ z2))`.
pub fn green_k(k: u32, z1: &UHPoint, z2: &UHPoint, policy: &TruncationPolicy) -> Result<GreensValue> {
    check_weight(k)?;
    let (w1, w2) = (reduced_f64(z1), reduced_f64(z2));
    adaptive(policy, |n| {
        green_fixed(k, 1, w1, w2, n, policy).map_err(|e| match e {
            Error::OnSingularLocus { .. } => Error::OnSingularLocus { m: None },
            e => e,
        })
    })
}

/// Upper-triangular coset representatives `(a b; 0 d)`, `ad = m`, `0 ≤ b < d`.
pub fn hecke_cosets(m: u64) -> Vec<Mat2> {
    let mut out = Vec::new();
    for a in 1..=m {
        if !m.is_multiple_of(a) {
            continue;
        }
        let d = m / a;
        for b in 0..d {
            out.push(Mat2::new(a as i64, b as i64, 0, d as i64));
        }
    }
    out
}

/// `G_s^m(z1, z2) = Σ_δ G_s(z1, δ z2)` over [`hecke_cosets`].
pub fn hecke_green(s: u32, m: u64, z1: &UHPoint, z2: &UHPoint, policy: &TruncationPolicy) -> Result<GreensValue> {
    check_weight(s)?;
    if m == 0 {
        return Err(Error::InvalidArgument("m must be positive".into()));
    }
    let w1 = reduced_f64(z1);
    let images: Vec<(f64, f64)> = hecke_cosets(m)
        .iter()
        .map(|delta| delta.apply(z2).map(|w| reduced_f64(&w)))
        .collect::<Result<_>>()?;
    adaptive(policy, |n| {
        let mut acc = Acc::default();
        let mut rounding = 0.0;
        let mut tail = 0.0;
        let mut terms = 0;
        for w2 in &images {
            let g = green_fixed(s, 1, w1, *w2, n, policy).map_err(|e| match e {
                Error::OnSingularLocus { .. } => Error::OnSingularLocus { m: Some(m) },
                e => e,
            })?;
            acc.add(g.value_f64(), 0.0);
            rounding += g.value.rad_f64();
            tail += g.tail_f64();
            terms += g.terms_summed;
        }
        Ok(GreensValue {
            value: BigReal::with_error(acc.value(), rounding + acc.rounding(), SUM_DIGITS),
            tail_estimate: BigReal::from_f64(tail, SUM_DIGITS),
            terms_summed: terms,
            matrix_bound: n,
        })
    })
}

/// `G_s^m` by direct summation over all integer matrices of determinant `m`
/// modulo `±1`; an independent check of [`hecke_green`].
pub fn hecke_green_direct(s: u32, m: u64, z1: &UHPoint, z2: &UHPoint, policy: &TruncationPolicy) -> Result<GreensValue> {
    check_weight(s)?;
    if m == 0 {
        return Err(Error::InvalidArgument("m must be positive".into()));
    }
    let (w1, w2) = (reduced_f64(z1), reduced_f64(z2));
    adaptive(policy, |n| green_fixed(s, m, w1, w2, n, policy))
}

/// `G_{1+j,f} = Σ_m c_f(-m) m^j G_{1+j}^m`.
pub fn greens_combo(f: &PrincipalPart, j: u32, z1: &UHPoint, z2: &UHPoint, policy: &TruncationPolicy) -> Result<GreensValue> {
    let s = j + 1;
    check_weight(s)?;
    let mut acc = Acc::default();
    let (mut rounding, mut tail, mut terms) = (0.0, 0.0, 0);
    let mut bound = policy.matrix_bound;
    for (m, c) in f.coeffs() {
        if c.is_zero() {
            continue;
        }
        let g = hecke_green(s, *m, z1, z2, policy)?;
        let w = c.to_f64() * (*m as f64).powi(j as i32);
        acc.add(w * g.value_f64(), 2.0 * f64::EPSILON);
        rounding += w.abs() * g.value.rad_f64();
        tail += w.abs() * g.tail_f64();
        terms += g.terms_summed;
        bound = bound.max(g.matrix_bound);
    }
    Ok(GreensValue {
        value: BigReal::with_error(acc.value(), rounding + acc.rounding(), SUM_DIGITS),
        tail_estimate: BigReal::from_f64(tail, SUM_DIGITS),
        terms_summed: terms,
        matrix_bound: bound,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossCheckReport {
    pub log_abs_r: BigReal,
    pub greens_side: BigReal,
    pub difference: BigReal,
    /// Truncation and rounding budget of the Green's side.
    pub greens_error: f64,
    /// Radius of `log|R|`.
    pub regulator_error: f64,
    pub terms_summed: u64,
}

/// Compares `log|R|` with `Σ a_τ G₂(τ, y)` for user-supplied boundary data.
/// Renders no verdict.
pub fn cross_check(
    reg: &RegulatorResult,
    boundary: &[(UHPoint, Rat)],
    y: &UHPoint,
    policy: &TruncationPolicy,
) -> Result<CrossCheckReport> {
    let mut acc = Acc::default();
    let (mut err, mut terms) = (0.0, 0);
    for (tau, a) in boundary {
        if a.is_zero() {
            continue;
        }
        let g = green_k(2, tau, y, policy)?;
        let w = a.to_f64();
        acc.add(w * g.value_f64(), 2.0 * f64::EPSILON);
        err += w.abs() * g.error_budget();
        terms += g.terms_summed;
    }
    let greens = BigReal::with_error(acc.value(), acc.rounding(), SUM_DIGITS);
    let log_r = reg.log_abs.set_prec_digits(SUM_DIGITS.max(reg.log_abs.working_digits()));
    let difference = &log_r - &greens;
    Ok(CrossCheckReport {
        log_abs_r: reg.log_abs.clone(),
        greens_side: greens,
        difference,
        greens_error: err + acc.rounding(),
        regulator_error: reg.log_abs.rad_f64(),
        terms_summed: terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: f64, y: f64) -> UHPoint {
        UHPoint::from_f64(x, y).unwrap()
    }

    #[test]
    fn ext_gcd_identity() {
        for (a, b) in [(3, -7), (-4, 6), (10, 0), (0, -5), (12, 18)] {
            let (g, x, y) = ext_gcd(a, b);
            assert_eq!(x * a + y * b, g);
            assert_eq!(g, gcd(a, b));
        }
    }

    #[test]
    fn coset_representatives() {
        assert_eq!(
            hecke_cosets(2),
            vec![Mat2::new(1, 0, 0, 2), Mat2::new(1, 1, 0, 2), Mat2::new(2, 0, 0, 1)]
        );
        assert_eq!(hecke_cosets(6).len(), 12);
    }

    #[test]
    fn g2_converges_with_bound() {
        let (z1, z2) = (pt(0.0, 2.0), pt(0.0, 1.0));
        let a = green_k(2, &z1, &z2, &TruncationPolicy::with_bound(100)).unwrap();
        let b = green_k(2, &z1, &z2, &TruncationPolicy::with_bound(200)).unwrap();
        assert!(a.value_f64() < 0.0);
        assert!((a.value_f64() - b.value_f64()).abs() <= a.error_budget());
        assert!(b.tail_f64() < a.tail_f64());
    }

    #[test]
    fn singular_locus_detected() {
        let p = TruncationPolicy::with_bound(50);
        let z = pt(0.1, 1.3);
        let gz = Mat2::S.apply(&z).unwrap();
        assert!(matches!(green_k(2, &z, &gz, &p), Err(Error::OnSingularLocus { m: None })));
        let w = Mat2::new(1, 1, 0, 2).apply(&z).unwrap();
        assert!(matches!(hecke_green(2, 2, &w, &z, &p), Err(Error::OnSingularLocus { m: Some(2) })));
    }

    #[test]
    fn deterministic_under_thread_counts() {
        let (z1, z2) = (pt(0.3, 1.7), pt(-0.2, 1.1));
        let p = TruncationPolicy::with_bound(150);
        let a = green_k(2, &z1, &z2, &p).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| green_k(2, &z1, &z2, &p).unwrap());
        assert_eq!(a.value_f64().to_bits(), b.value_f64().to_bits());
    }

    #[test]
    fn principal_part_json() {
        let f: PrincipalPart = serde_json::from_str(r#"{"coeffs": {"1": "1", "4": "-3/2"}}"#).unwrap();
        assert_eq!(f.coeffs()[&4], Rat::new(-3, 2).unwrap());
        assert!(serde_json::from_str::<PrincipalPart>(r#"{"coeffs": {}}"#).is_err());
        assert!(serde_json::from_str::<PrincipalPart>(r#"{"coeffs": {"0": "1"}}"#).is_err());
    }
}
