//! Local data of the Δ = 5 motivic cycle at the blow-up of `q45`, the
//! function `f_P` on the strict transform, and the regulator pipeline on
//! the H4 locus.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{
    digits_needed, quad_solve_general, recognize_algebraic, BigComplex, BigReal, QuadRoots, QuadVal, Rat, UniPoly,
    MAX_RECOGNITION_DEGREE, MIN_RECOGNITION_DIGITS,
};
use crate::error::{Error, Result};
use crate::geometry::{conic_line_meet, Conic, ProjPoint};
use crate::kummer::{build_config, humbert5_conic, ModuliParams};

/// Extra digits carried internally so results keep the requested accuracy.
const GUARD_DIGITS: u32 = 30;

/// Coefficient bound for the optional algebraic recognition of `R`.
pub const RECOGNITION_COEFF_BOUND: u64 = 1_000_000;

/// Data of the blow-up of the Δ = 5 conic at `q45 = (-1/2, 0)`.
///
/// The conic's local parameter on the double cover is
/// `v = w / (x + 1/2)`; the two points over `q45` sit at `v = v0±`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlowupLocalData {
    /// `dy/dx` of the conic at `q45`.
    pub slope: QuadVal,
    /// `Π l^i(-1/2, 0, 1)` over `i ∈ {1, 2, 3, 6}`.
    pub h_value: QuadVal,
    /// `slope · (slope + 2) · h_value`.
    pub v0_squared: QuadVal,
    /// `v0+` when it lies in the coefficient field.
    pub v0_exact: Option<QuadVal>,
    pub v0_plus: BigComplex,
    pub v0_minus: BigComplex,
    /// `C ∩ l⁶`; `None` when the points leave the quadratic closure.
    pub s6_points: Option<(ProjPoint, ProjPoint)>,
    /// The constant `c` of `f_P`. Both `s⁶` points sit at `v = ∞`, where
    /// `(v - v0+)/(v - v0-)` tends to 1, so `c = 1` normalizes `f_P(s⁶₁) = 1`.
    pub norm_const: QuadVal,
    pub digits: u32,
}

fn principal_sqrt(q: &QuadVal, digits: u32) -> (Option<QuadVal>, BigComplex) {
    let num = q.to_complex(digits).sqrt();
    let exact = q.sqrt().map(|r| {
        // pick the sign agreeing with the numeric principal branch
        let rc = r.to_complex(digits);
        if (&rc - &num).abs().to_f64() <= (&rc + &num).abs().to_f64() {
            r
        } else {
            -r
        }
    });
    (exact, num)
}

pub fn blowup_data(p: &ModuliParams, digits: u32) -> Result<BlowupLocalData> {
    let conic = humbert5_conic(p)?;
    let [p1, p2, _p3, p4, p5, p6] = conic.coeffs().clone();
    let disc = p4.try_mul(&p4)?.try_sub(&QuadVal::from_int(4).try_mul(&p1)?.try_mul(&p2)?)?;
    if disc.is_zero() {
        return Err(Error::OnH5Locus);
    }
    // implicit differentiation of the affine conic at (-1/2, 0)
    let denom = p6.try_sub(&p4.scale(&Rat::new(1, 2)?))?;
    if denom.is_zero() {
        return Err(Error::ZeroDenominator("p6 - p4/2 vanishes: vertical tangent at q45".into()));
    }
    let slope = p1.try_sub(&p5)?.try_div(&denom)?;
    if slope.is_zero() || slope == QuadVal::from_int(-2) {
        return Err(Error::NonTransversal(slope.to_string()));
    }
    let cfg = build_config(p)?;
    let q45 = ProjPoint::from_rats(Rat::new(-1, 2)?, Rat::zero(), Rat::one())?;
    let mut h_value = QuadVal::one();
    for i in [1, 2, 3, 6] {
        h_value = h_value.try_mul(&cfg.line(i).eval(&q45)?)?;
    }
    let v0_squared = slope.try_mul(&slope.try_add(&QuadVal::from_int(2))?)?.try_mul(&h_value)?;
    let work = digits + GUARD_DIGITS;
    let (v0_exact, v0_plus) = principal_sqrt(&v0_squared, work);
    let v0_minus = -&v0_plus;
    let s6_points = match conic_line_meet(&conic, cfg.line(6)) {
        Ok((a, b)) => {
            if a == b {
                return Err(Error::OnH5Locus);
            }
            Some((a, b))
        }
        Err(Error::LeavesQuadraticClosure(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(BlowupLocalData {
        slope,
        h_value,
        v0_squared,
        v0_exact,
        v0_plus,
        v0_minus,
        s6_points,
        norm_const: QuadVal::one(),
        digits,
    })
}

impl BlowupLocalData {
    fn work_digits(&self) -> u32 {
        self.v0_plus.re.working_digits()
    }

    fn c_numeric(&self) -> BigComplex {
        self.norm_const.to_complex(self.work_digits())
    }

    /// `f_P` at the `s⁶` points (`v = ∞`).
    pub fn f_p_at_s6(&self) -> BigComplex {
        self.c_numeric()
    }
}

/// `f_P(v) = c (v - v0+) / (v - v0-)`.
pub fn f_p_eval(d: &BlowupLocalData, v: &BigComplex) -> Result<BigComplex> {
    let den = v - &d.v0_minus;
    if den.contains_zero() {
        return Err(Error::PoleEvaluation);
    }
    Ok(&(&d.c_numeric() * &(v - &d.v0_plus)) / &den)
}

/// `g_P(v) = 1 / f_P(v)`, which vanishes at `v0-`.
pub fn g_p_eval(d: &BlowupLocalData, v: &BigComplex) -> Result<BigComplex> {
    let den = &d.c_numeric() * &(v - &d.v0_plus);
    if den.contains_zero() {
        return Err(Error::PoleEvaluation);
    }
    Ok(&(v - &d.v0_minus) / &den)
}

/// Points of a component that carry zeros or poles of its function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DivisorPoint {
    /// Point over `q45` at `v = v0+`.
    P1,
    /// Point over `q45` at `v = v0-`.
    P2,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CurveDescriptor {
    /// Strict transform of the conic in the blow-up at `center`.
    StrictTransform { conic: Conic, center: ProjPoint },
    /// Exceptional fibre over `center`.
    ExceptionalFibre { center: ProjPoint },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionDescriptor {
    /// `c (v - v0) / (v + v0)` with `v0` the principal root of `v0_squared`.
    Fp { v0_squared: QuadVal, norm_const: QuadVal },
    /// The reciprocal of another component's function.
    ReciprocalOf { component: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleComponent {
    pub curve: CurveDescriptor,
    pub function: FunctionDescriptor,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CyclePresentation {
    pub params: ModuliParams,
    pub components: Vec<CycleComponent>,
}

impl CyclePresentation {
    /// Divisor of the function on component `i`.
    pub fn divisor(&self, i: usize) -> BTreeMap<DivisorPoint, i64> {
        match &self.components[i].function {
            FunctionDescriptor::Fp { .. } => BTreeMap::from([(DivisorPoint::P1, 1), (DivisorPoint::P2, -1)]),
            // only reciprocals of an `Fp` component are meaningful
            FunctionDescriptor::ReciprocalOf { component } => match self.components.get(*component) {
                Some(CycleComponent {
                    function: FunctionDescriptor::Fp { .. },
                    ..
                }) => self.divisor(*component).into_iter().map(|(k, m)| (k, -m)).collect(),
                _ => BTreeMap::new(),
            },
        }
    }

    /// Sum of all component divisors, with zero entries dropped.
    pub fn formal_boundary(&self) -> BTreeMap<DivisorPoint, i64> {
        let mut total = BTreeMap::new();
        for i in 0..self.components.len() {
            for (k, m) in self.divisor(i) {
                *total.entry(k).or_insert(0) += m;
            }
        }
        total.retain(|_, m| *m != 0);
        total
    }
}

/// `Z_5 = (C̄, f_P) + (E_P, 1/f_P)`.
pub fn build_cycle(p: &ModuliParams) -> Result<CyclePresentation> {
    let d = blowup_data(p, MIN_RECOGNITION_DIGITS)?;
    let conic = humbert5_conic(p)?;
    let center = ProjPoint::from_rats(Rat::new(-1, 2)?, Rat::zero(), Rat::one())?;
    Ok(CyclePresentation {
        params: p.clone(),
        components: vec![
            CycleComponent {
                curve: CurveDescriptor::StrictTransform {
                    conic,
                    center: center.clone(),
                },
                function: FunctionDescriptor::Fp {
                    v0_squared: d.v0_squared,
                    norm_const: d.norm_const,
                },
            },
            CycleComponent {
                curve: CurveDescriptor::ExceptionalFibre { center },
                function: FunctionDescriptor::ReciprocalOf { component: 0 },
            },
        ],
    })
}

/// A point `c_i^±` on the double cover `w² = S(x, y, z)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverPoint {
    pub x: QuadVal,
    pub y: QuadVal,
    pub z: QuadVal,
    pub w: BigComplex,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Recognition {
    /// `"ratio"`, `"abs_squared"` or `"ratio_plus_inverse"`.
    pub target: String,
    pub poly: UniPoly,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegulatorResult {
    pub a1: QuadVal,
    pub a3: QuadVal,
    pub roots: (QuadVal, QuadVal),
    /// `[c1+, c1-, c2+, c2-]`.
    pub c_points: [CoverPoint; 4],
    /// `[v1+, v1-, v2+, v2-]`.
    pub v_values: [BigComplex; 4],
    pub ratio: BigComplex,
    pub log_abs: BigReal,
    pub recognized: Option<Recognition>,
    pub digits: u32,
    v0_plus: BigComplex,
    norm_const: QuadVal,
    precision: u32,
}

/// Runs the regulator pipeline at rational `(a1, a3)` with `a2 = a1 a3`.
pub fn regulator_h4(a1: &Rat, a3: &Rat, precision: u32, recognize: bool) -> Result<RegulatorResult> {
    regulator_h4_quad(&a1.into(), &a3.into(), precision, recognize)
}

/// Same as [`regulator_h4`] for parameters in a quadratic field.
pub fn regulator_h4_quad(a1: &QuadVal, a3: &QuadVal, precision: u32, recognize: bool) -> Result<RegulatorResult> {
    let p = ModuliParams::on_h4(a1.clone(), a3.clone())?;
    let d = blowup_data(&p, precision)?;
    regulator_with_data(&p, &d, precision, recognize)
}

/// The pipeline with explicit blow-up data (e.g. a rescaled `norm_const`).
pub fn regulator_with_data(
    p: &ModuliParams,
    d: &BlowupLocalData,
    precision: u32,
    recognize: bool,
) -> Result<RegulatorResult> {
    let a13 = p.a1.try_mul(&p.a3)?;
    if a13 != p.a2 {
        return Err(Error::NotOnH4);
    }
    let conic = humbert5_conic(p)?;
    let [p1, p2, p3, p4, p5, p6] = conic.coeffs().clone();
    let a = p1;
    let b = p4.try_mul(&a13)?.try_add(&p5)?;
    let c = p2.try_mul(&a13.square())?.try_add(&p3)?.try_add(&p6.try_mul(&a13)?)?;
    let work = precision + GUARD_DIGITS;
    let (x1, x2) = match quad_solve_general(&a, &b, &c, work)? {
        QuadRoots::Exact(x1, x2) => (x1, x2),
        QuadRoots::Numeric(..) => {
            return Err(Error::LeavesQuadraticClosure(
                "intersection abscissae do not lie in a quadratic field".into(),
            ))
        }
    };
    if x1 == x2 {
        return Err(Error::RepeatedRoot);
    }
    let cfg = build_config(p)?;
    let minus_half = QuadVal::from_rat(Rat::new(-1, 2)?);
    let mut c_points = Vec::with_capacity(4);
    let mut v_values = Vec::with_capacity(4);
    for x in [&x1, &x2] {
        if *x == minus_half {
            return Err(Error::BranchAtRamification(format!("x = {x} lies over q45")));
        }
        let pt = ProjPoint::new(x.clone(), a13.clone(), QuadVal::one())?;
        let mut s = QuadVal::one();
        for i in 1..=5 {
            s = s.try_mul(&cfg.line(i).eval(&pt)?)?;
        }
        if s.is_zero() {
            return Err(Error::BranchAtRamification(format!("S vanishes at x = {x}")));
        }
        let w = s.to_complex(work).sqrt();
        let shift = x.try_sub(&minus_half)?.to_complex(work);
        let v = &w / &shift;
        for sign in [1, -1] {
            let (ws, vs) = if sign > 0 { (w.clone(), v.clone()) } else { (-&w, -&v) };
            c_points.push(CoverPoint {
                x: x.clone(),
                y: a13.clone(),
                z: QuadVal::one(),
                w: ws,
            });
            v_values.push(vs);
        }
    }
    let c_points: [CoverPoint; 4] = c_points.try_into().expect("four points");
    let v_values: [BigComplex; 4] = v_values.try_into().expect("four values");
    let mut r = RegulatorResult {
        a1: p.a1.clone(),
        a3: p.a3.clone(),
        roots: (x1, x2),
        c_points,
        v_values,
        ratio: BigComplex::zero(work),
        log_abs: BigReal::zero(work),
        recognized: None,
        digits: 0,
        v0_plus: d.v0_plus.clone(),
        norm_const: d.norm_const.clone(),
        precision,
    };
    r.refresh()?;
    if recognize {
        r.recognized = recognize_ratio(&r.ratio)?;
    }
    Ok(r)
}

impl RegulatorResult {
    fn f_p(&self, v: &BigComplex) -> Result<BigComplex> {
        let v0m = -&self.v0_plus;
        let den = v - &v0m;
        if den.contains_zero() {
            return Err(Error::PoleEvaluation);
        }
        let c = self.norm_const.to_complex(self.v0_plus.re.working_digits());
        Ok(&(&c * &(v - &self.v0_plus)) / &den)
    }

    /// Recomputes the ratio and its logarithm from the stored branch data.
    fn refresh(&mut self) -> Result<()> {
        let [v1p, v1m, v2p, v2m] = &self.v_values;
        let num = &self.f_p(v1p)? * &self.f_p(v2p)?;
        let den = &self.f_p(v1m)? * &self.f_p(v2m)?;
        if den.contains_zero() || num.contains_zero() {
            return Err(Error::BranchAtRamification(
                "an intersection point meets the exceptional fibre".into(),
            ));
        }
        self.ratio = &num / &den;
        self.log_abs = self.ratio.ln_abs();
        self.digits = self.ratio.digits().min(self.log_abs.digits());
        Ok(())
    }

    /// The requested precision of the run.
    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn ratio_is_real(&self) -> bool {
        self.ratio.im.contains_zero()
    }
}

fn reversed(p: &UniPoly) -> UniPoly {
    let mut c = p.coeffs().to_vec();
    c.reverse();
    UniPoly::new(c).primitive()
}

/// Exchanges the two sheets of the cover: every `+√` branch becomes `-√`,
/// so the ratio becomes its reciprocal.
pub fn conjugate_swap(r: &RegulatorResult) -> RegulatorResult {
    let mut s = r.clone();
    s.c_points.swap(0, 1);
    s.c_points.swap(2, 3);
    s.v_values.swap(0, 1);
    s.v_values.swap(2, 3);
    s.refresh().expect("swapped branch data stays off the poles");
    s.recognized = r.recognized.as_ref().map(|rec| match rec.target.as_str() {
        "ratio_plus_inverse" => rec.clone(),
        _ => Recognition {
            target: rec.target.clone(),
            poly: reversed(&rec.poly),
        },
    });
    s
}

/// Largest degree the available digits can certify at the fixed bound.
fn feasible_degree(x: &BigReal) -> Option<u32> {
    let digits = x.digits();
    (1..=MAX_RECOGNITION_DEGREE)
        .rev()
        .find(|&d| digits >= digits_needed(x, d, RECOGNITION_COEFF_BOUND).max(MIN_RECOGNITION_DIGITS))
}

fn recognize_ratio(ratio: &BigComplex) -> Result<Option<Recognition>> {
    let real = ratio.im.contains_zero();
    let mut targets: Vec<(&str, BigReal)> = Vec::new();
    if real {
        targets.push(("ratio", ratio.re.clone()));
    }
    targets.push(("abs_squared", ratio.norm_sqr()));
    let sum = ratio + &ratio.recip();
    if sum.im.contains_zero() {
        targets.push(("ratio_plus_inverse", sum.re));
    }
    for (name, x) in targets {
        let Some(deg) = feasible_degree(&x) else { continue };
        if let Some(poly) = recognize_algebraic(&x, deg, RECOGNITION_COEFF_BOUND)? {
            return Ok(Some(Recognition {
                target: name.to_string(),
                poly,
            }));
        }
    }
    Ok(None)
}

/// Runs [`regulator_h4`] over many parameter pairs in parallel; the output
/// order matches the input.
pub fn regulator_sweep(points: &[(Rat, Rat)], precision: u32, recognize: bool) -> Vec<Result<RegulatorResult>> {
    points
        .par_iter()
        .map(|(a1, a3)| regulator_h4(a1, a3, precision, recognize))
        .collect()
}
