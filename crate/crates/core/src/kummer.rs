//! The Kummer-plane configuration of a genus-2 curve
//! `y² = x(x-1)(x-a1)(x-a2)(x-a3)` and its Humbert conditions.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{BigReal, QuadVal, Rat, Ring, UniPoly};
use crate::error::{Error, Result};
use crate::geometry::{conic_through_5, Conic, ProjLine, ProjPoint};

/// Moduli point `(a1, a2, a3)`; the remaining branch values are
/// `a4 = 0`, `a5 = 1`, `a6 = ∞`.
#[derive(Clone, PartialEq, Serialize)]
pub struct ModuliParams {
    pub a1: QuadVal,
    pub a2: QuadVal,
    pub a3: QuadVal,
}

impl<'de> Deserialize<'de> for ModuliParams {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            a1: QuadVal,
            a2: QuadVal,
            a3: QuadVal,
        }
        let r = Raw::deserialize(d)?;
        ModuliParams::new(r.a1, r.a2, r.a3).map_err(serde::de::Error::custom)
    }
}

impl fmt::Debug for ModuliParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a1, self.a2, self.a3)
    }
}

impl ModuliParams {
    pub fn new(a1: QuadVal, a2: QuadVal, a3: QuadVal) -> Result<Self> {
        a1.try_add(&a2)
            .and_then(|s| s.try_add(&a3))
            .map_err(|_| Error::InvalidModuli("a1, a2, a3 must lie in one quadratic field".into()))?;
        let vals = [&a1, &a2, &a3];
        for (i, a) in vals.iter().enumerate() {
            if a.is_zero() || **a == QuadVal::one() {
                return Err(Error::InvalidModuli(format!("a{} = {} coincides with a fixed branch value", i + 1, a)));
            }
        }
        for i in 0..3 {
            for j in i + 1..3 {
                if vals[i] == vals[j] {
                    return Err(Error::InvalidModuli(format!("a{} = a{} = {}", i + 1, j + 1, vals[i])));
                }
            }
        }
        Ok(ModuliParams { a1, a2, a3 })
    }

    pub fn from_rats(a1: Rat, a2: Rat, a3: Rat) -> Result<Self> {
        ModuliParams::new(a1.into(), a2.into(), a3.into())
    }

    pub fn from_ints(a1: i64, a2: i64, a3: i64) -> Result<Self> {
        ModuliParams::new(a1.into(), a2.into(), a3.into())
    }

    /// The H4 locus `a2 = a1·a3`.
    pub fn on_h4(a1: QuadVal, a3: QuadVal) -> Result<Self> {
        let a2 = a1.try_mul(&a3)?;
        ModuliParams::new(a1, a2, a3)
    }

    /// Branch value `a_i` for `i` in 1..=5 (`a4 = 0`, `a5 = 1`).
    pub fn branch(&self, i: usize) -> QuadVal {
        match i {
            1 => self.a1.clone(),
            2 => self.a2.clone(),
            3 => self.a3.clone(),
            4 => QuadVal::zero(),
            5 => QuadVal::one(),
            _ => panic!("finite branch index {i} out of range"),
        }
    }

    pub fn is_rational(&self) -> bool {
        self.a1.is_rational() && self.a2.is_rational() && self.a3.is_rational()
    }
}

/// Monomial lists `(coef, e1, e2, e3)` for `coef · a1^e1 a2^e2 a3^e3`.
type Terms = &'static [(i64, u32, u32, u32)];

const HUMBERT5: [Terms; 6] = [
    &[(4, 2, 1, 1), (-4, 1, 2, 1)],
    &[(1, 2, 0, 1), (-1, 1, 0, 2), (-1, 0, 2, 0), (1, 0, 1, 0), (1, 0, 0, 2), (-1, 0, 0, 1)],
    &[(1, 2, 1, 2), (-1, 1, 2, 2)],
    &[
        (2, 2, 1, 1),
        (2, 2, 0, 1),
        (-2, 1, 2, 0),
        (-2, 1, 1, 2),
        (2, 1, 1, 0),
        (-2, 1, 0, 1),
        (-2, 0, 2, 1),
        (2, 0, 1, 2),
    ],
    &[(2, 2, 1, 2), (2, 2, 1, 1), (-2, 1, 2, 2), (-2, 1, 2, 1)],
    &[
        (1, 2, 2, 1),
        (-1, 2, 2, 0),
        (1, 2, 1, 0),
        (1, 2, 0, 2),
        (-1, 1, 2, 2),
        (-1, 1, 0, 2),
        (-1, 0, 2, 1),
        (1, 0, 1, 2),
    ],
];

// The coefficient formulas in the form they are usually quoted; p2, p4
// and p6 do not give a conic through the five points.
const HUMBERT5_PRINTED: [Terms; 6] = [
    HUMBERT5[0],
    &[(1, 2, 0, 0), (1, 0, 0, 1), (-1, 1, 0, 4), (1, 1, 2, 2), (-1, 1, 1, 2), (1, 1, 0, 3)],
    HUMBERT5[2],
    &[(2, 2, 1, 1), (2, 2, 0, 1), (-2, 1, 1, 2), (2, 1, 1, 0), (-2, 1, 0, 1), (-2, 0, 2, 1), (2, 0, 1, 2)],
    HUMBERT5[4],
    &[
        (-1, 2, 2, 1),
        (-1, 2, 2, 0),
        (1, 2, 0, 2),
        (1, 2, 1, 0),
        (-1, 1, 2, 2),
        (-1, 1, 0, 2),
        (-1, 0, 2, 1),
        (1, 0, 1, 2),
    ],
];

fn pow<T: Ring>(x: &T, e: u32) -> T {
    let mut r = x.int(1);
    for _ in 0..e {
        r = r * x.clone();
    }
    r
}

fn eval_terms<T: Ring>(terms: Terms, a1: &T, a2: &T, a3: &T) -> T {
    let mut s = a1.int(0);
    for &(c, e1, e2, e3) in terms {
        s = s + a1.int(c) * pow(a1, e1) * pow(a2, e2) * pow(a3, e3);
    }
    s
}

/// Closed-form coefficients `p1..p6` of the conic through
/// `q12, q23, q34, q45, q51`, in any ring.
pub fn humbert5_coeffs<T: Ring>(a1: &T, a2: &T, a3: &T) -> [T; 6] {
    std::array::from_fn(|i| eval_terms(HUMBERT5[i], a1, a2, a3))
}

/// `p4² - 4 p1 p2` in any ring.
pub fn humbert5_discriminant_generic<T: Ring>(a1: &T, a2: &T, a3: &T) -> T {
    let p = humbert5_coeffs(a1, a2, a3);
    p[3].clone() * p[3].clone() - a1.int(4) * p[0].clone() * p[1].clone()
}

/// The same coefficients as commonly printed (p2, p4, p6 differ).
pub fn humbert5_coeffs_printed<T: Ring>(a1: &T, a2: &T, a3: &T) -> [T; 6] {
    std::array::from_fn(|i| eval_terms(HUMBERT5_PRINTED[i], a1, a2, a3))
}

/// Monomial exponent triple `[i, j, k]` for `x^i y^j z^k`.
pub type Monomial = [u32; 3];

fn monomial_key(m: &Monomial) -> String {
    format!("x{}y{}z{}", m[0], m[1], m[2])
}

fn parse_monomial_key(s: &str) -> Result<Monomial> {
    let bad = || Error::Parse(format!("bad monomial key {s:?}"));
    let rest = s.strip_prefix('x').ok_or_else(bad)?;
    let (i, rest) = rest.split_once('y').ok_or_else(bad)?;
    let (j, k) = rest.split_once('z').ok_or_else(bad)?;
    Ok([i.parse().map_err(|_| bad())?, j.parse().map_err(|_| bad())?, k.parse().map_err(|_| bad())?])
}

/// The six lines, fifteen double points, the sextic `S = Π l^i` and the
/// curve's finite branch values.
#[derive(Clone, PartialEq)]
pub struct KummerConfig {
    pub params: ModuliParams,
    pub lines: [ProjLine; 6],
    points: BTreeMap<(usize, usize), ProjPoint>,
    pub sextic: BTreeMap<Monomial, QuadVal>,
    pub curve: [QuadVal; 5],
}

impl fmt::Debug for KummerConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KummerConfig").field("params", &self.params).finish_non_exhaustive()
    }
}

pub fn build_config(p: &ModuliParams) -> Result<KummerConfig> {
    let p = ModuliParams::new(p.a1.clone(), p.a2.clone(), p.a3.clone())?;
    let mut lines = Vec::with_capacity(6);
    for i in 1..=5 {
        let a = p.branch(i);
        lines.push(ProjLine::new(&a + &a, QuadVal::one(), a.square())?);
    }
    lines.push(ProjLine::from_ints(0, 0, 1)?);
    let lines: [ProjLine; 6] = lines.try_into().expect("six lines");

    let mut points = BTreeMap::new();
    for i in 1..=5 {
        for j in i + 1..=6 {
            let ai = p.branch(i);
            let pt = if j == 6 {
                ProjPoint::new(QuadVal::from_int(-1), &ai + &ai, QuadVal::zero())?
            } else {
                let aj = p.branch(j);
                ProjPoint::new(-(&ai + &aj), QuadVal::from_int(2) * (&ai * &aj), QuadVal::from_int(2))?
            };
            points.insert((i, j), pt);
        }
    }

    let mut sextic: BTreeMap<Monomial, QuadVal> = BTreeMap::new();
    sextic.insert([0, 0, 0], QuadVal::one());
    for l in &lines {
        let mut next: BTreeMap<Monomial, QuadVal> = BTreeMap::new();
        for (m, c) in &sextic {
            for (v, lc) in l.coeffs().iter().enumerate() {
                if lc.is_zero() {
                    continue;
                }
                let mut e = *m;
                e[v] += 1;
                let term = c * lc;
                let entry = next.entry(e).or_insert_with(QuadVal::zero);
                *entry = &*entry + &term;
            }
        }
        next.retain(|_, c| !c.is_zero());
        sextic = next;
    }

    let curve = [p.a1.clone(), p.a2.clone(), p.a3.clone(), QuadVal::zero(), QuadVal::one()];
    Ok(KummerConfig {
        params: p,
        lines,
        points,
        sextic,
        curve,
    })
}

impl KummerConfig {
    /// `q^{ij}` for an unordered pair of distinct indices in 1..=6.
    pub fn point(&self, i: usize, j: usize) -> &ProjPoint {
        let key = (i.min(j), i.max(j));
        self.points.get(&key).unwrap_or_else(|| panic!("no point q{}{}", key.0, key.1))
    }

    pub fn points(&self) -> impl Iterator<Item = ((usize, usize), &ProjPoint)> {
        self.points.iter().map(|(k, v)| (*k, v))
    }

    /// `l^i` for `i` in 1..=6.
    pub fn line(&self, i: usize) -> &ProjLine {
        &self.lines[i - 1]
    }

    /// Five points through which the Δ = 5 conic passes.
    pub fn humbert5_points(&self) -> [ProjPoint; 5] {
        [(1, 2), (2, 3), (3, 4), (4, 5), (1, 5)].map(|(i, j)| self.point(i, j).clone())
    }
}

#[derive(Serialize, Deserialize)]
struct ConfigRepr {
    params: ModuliParams,
    lines: Vec<[QuadVal; 3]>,
    points: BTreeMap<String, [QuadVal; 3]>,
    sextic: BTreeMap<String, QuadVal>,
    curve: [QuadVal; 5],
}

impl Serialize for KummerConfig {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ConfigRepr {
            params: self.params.clone(),
            lines: self.lines.iter().map(|l| l.coeffs().clone()).collect(),
            points: self
                .points
                .iter()
                .map(|((i, j), p)| (format!("q{i}{j}"), p.coords().clone()))
                .collect(),
            sextic: self.sextic.iter().map(|(m, c)| (monomial_key(m), c.clone())).collect(),
            curve: self.curve.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for KummerConfig {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = ConfigRepr::deserialize(d)?;
        let cfg = build_config(&r.params).map_err(D::Error::custom)?;
        let mut sextic = BTreeMap::new();
        for (k, v) in r.sextic {
            sextic.insert(parse_monomial_key(&k).map_err(D::Error::custom)?, v);
        }
        let lines_ok = r.lines.len() == 6
            && r.lines.iter().zip(&cfg.lines).all(|(a, b)| ProjLine::try_from(a.clone()).is_ok_and(|l| l == *b));
        let points_ok = r.points.len() == 15
            && cfg.points.iter().all(|((i, j), p)| {
                r.points
                    .get(&format!("q{i}{j}"))
                    .is_some_and(|c| ProjPoint::new(c[0].clone(), c[1].clone(), c[2].clone()).is_ok_and(|q| q == *p))
            });
        if !lines_ok || !points_ok || sextic != cfg.sextic || r.curve != cfg.curve {
            return Err(D::Error::custom("configuration data inconsistent with its parameters"));
        }
        Ok(cfg)
    }
}

fn coeff_conic(p: [QuadVal; 6]) -> Result<Conic> {
    Conic::new(p).map_err(|_| Error::DegenerateConfiguration("closed-form conic vanishes identically".into()))
}

/// The conic through `q12, q23, q34, q45, q51` from the closed form,
/// checked against the five-point determinant.
pub fn humbert5_conic(p: &ModuliParams) -> Result<Conic> {
    let cfg = build_config(p)?;
    let det = conic_through_5(&cfg.humbert5_points())?;
    let closed = coeff_conic(humbert5_coeffs(&p.a1, &p.a2, &p.a3))?;
    if !closed.proj_eq(&det) {
        return Err(Error::ClosedFormMismatch {
            closed_form: Box::new(closed),
            determinant: Box::new(det),
        });
    }
    Ok(closed)
}

/// The as-printed closed form, with the same determinant check. Fails with
/// `ClosedFormMismatch` for generic parameters.
pub fn humbert5_conic_printed(p: &ModuliParams) -> Result<Conic> {
    let cfg = build_config(p)?;
    let det = conic_through_5(&cfg.humbert5_points())?;
    let closed = coeff_conic(humbert5_coeffs_printed(&p.a1, &p.a2, &p.a3))?;
    if !closed.proj_eq(&det) {
        return Err(Error::ClosedFormMismatch {
            closed_form: Box::new(closed),
            determinant: Box::new(det),
        });
    }
    Ok(closed)
}

/// `p4² - 4 p1 p2`; zero exactly on the H5 component.
pub fn humbert5_discriminant(p: &ModuliParams) -> Result<QuadVal> {
    let c = humbert5_conic(p)?;
    let [p1, p2, _, p4, _, _] = c.coeffs();
    p4.try_mul(p4)?.try_sub(&QuadVal::from_int(4).try_mul(p1)?.try_mul(p2)?)
}

/// Discriminant as a polynomial in `a3` for fixed rational `a1, a2`.
pub fn humbert5_discriminant_in_a3(a1: &Rat, a2: &Rat) -> UniPoly {
    let c1 = UniPoly::constant(a1.clone());
    let c2 = UniPoly::constant(a2.clone());
    humbert5_discriminant_generic(&c1, &c2, &UniPoly::x())
}

/// Real `a3` in `[lo, hi]` on the H5 component for fixed `a1, a2`,
/// excluding values that collide with another branch point.
pub fn h5_roots_a3(a1: &Rat, a2: &Rat, lo: &Rat, hi: &Rat, digits: u32) -> Vec<BigReal> {
    let poly = humbert5_discriminant_in_a3(a1, a2);
    let forbidden = [Rat::zero(), Rat::one(), a1.clone(), a2.clone()];
    poly.real_roots_in(lo, hi, 4096, digits)
        .into_iter()
        .filter(|r| {
            forbidden
                .iter()
                .all(|f| !(r - &BigReal::from_rat(f, digits)).abs().definitely_lt(&BigReal::from_f64(1e-20, digits)))
        })
        .collect()
}

/// `(a1a3 - a2, 4a1a2a3((a1+a3)(a2+1) - 2(a1a3+a2))² - (a2-1)²(a1-a3)²(a1a3+a2)²)`.
/// The first vanishes on H4, the second on H8.
pub fn h4_h8_factors(p: &ModuliParams) -> (QuadVal, QuadVal) {
    let (a1, a2, a3) = (&p.a1, &p.a2, &p.a3);
    let one = QuadVal::one();
    let two = QuadVal::from_int(2);
    let a13 = a1 * a3;
    let first = &a13 - a2;
    let inner = &(&(a1 + a3) * &(a2 + &one)) - &(&two * &(&a13 + a2));
    let left = &(&QuadVal::from_int(4) * &(&(a1 * a2) * a3)) * &inner.square();
    let right = &(&(a2 - &one).square() * &(a1 - a3).square()) * &(&a13 + a2).square();
    (first, &left - &right)
}

/// The line `Y - a1a3 Z = 0` through `q13, q25, q46`, defined on H4.
pub fn h4_line(p: &ModuliParams) -> Result<ProjLine> {
    let a13 = &p.a1 * &p.a3;
    if a13 != p.a2 {
        return Err(Error::NotOnH4);
    }
    ProjLine::new(QuadVal::zero(), QuadVal::one(), -a13)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CaseLabel {
    I,
    II,
    III,
    IV,
    V,
}

/// One row of the rational-curve table for invariant Δ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BWCase {
    pub case_label: CaseLabel,
    pub m: u64,
    pub k: Option<u64>,
    pub delta: u64,
    pub degree: u64,
    pub num_torsion_points: u64,
}

pub const BW_K_VALUES: [u64; 5] = [4, 6, 8, 10, 12];

/// `(Δ, degree, points)` for a row, or `None` when Δ is not positive.
pub fn bw_row(case: CaseLabel, m: u64, k: u64) -> Option<(u64, u64, u64)> {
    let (m, k) = (m as i128, k as i128);
    let (delta, degree, points) = match case {
        CaseLabel::I => (8 * m * m + 9 - 2 * k, 2 * m, k - 1),
        CaseLabel::II => (8 * m * (m + 1) + 9 - 2 * k, 2 * m + 1, k),
        CaseLabel::III => (8 * m * m + 8 - 2 * k, 2 * m, k),
        CaseLabel::IV => (8 * m * (m + 1) + 12 - 2 * k, 2 * m + 1, k - 1),
        CaseLabel::V => (m * m, m - 1, 3),
    };
    (delta > 0).then_some((delta as u64, degree as u64, points as u64))
}

/// All table rows with invariant `delta` and positive degree, ordered by
/// case, then `m`, then `k`.
pub fn bw_cases(delta: u64) -> Vec<BWCase> {
    let mut out = Vec::new();
    for case in [CaseLabel::I, CaseLabel::II, CaseLabel::III, CaseLabel::IV] {
        // every row has Δ(m, k) ≥ 8m² - 16, increasing in m
        let mut m = 1u64;
        while 8 * m * m <= delta + 16 {
            for k in BW_K_VALUES {
                if let Some((d, degree, pts)) = bw_row(case, m, k) {
                    if d == delta && degree >= 1 {
                        out.push(BWCase {
                            case_label: case,
                            m,
                            k: Some(k),
                            delta,
                            degree,
                            num_torsion_points: pts,
                        });
                    }
                }
            }
            m += 1;
        }
    }
    let r = delta.isqrt();
    if r * r == delta && r >= 2 {
        out.push(BWCase {
            case_label: CaseLabel::V,
            m: r,
            k: None,
            delta,
            degree: r - 1,
            num_torsion_points: 3,
        });
    }
    out
}

/// `m = (Δ - x²)/4` over `x ≥ 0` with `x² ≡ Δ (mod 4)` and `m > 0`,
/// ordered by increasing `x`.
pub fn hecke_components(delta: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut x = 0u64;
    while x * x < delta {
        if (delta - x * x).is_multiple_of(4) {
            out.push((delta - x * x) / 4);
        }
        x += 1;
    }
    out
}
