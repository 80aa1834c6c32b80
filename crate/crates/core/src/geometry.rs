//! Exact projective plane geometry over quadratic fields.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{quad_solve_general, BigComplex, BigReal, QuadRoots, QuadVal, Rat, Ring};
use crate::error::{Error, Result};

fn q(r: i64) -> QuadVal {
    QuadVal::from_int(r)
}

/// Sum of products `Σ a_i b_i` in one quadratic field.
fn dot3(a: &[QuadVal; 3], b: &[QuadVal; 3]) -> Result<QuadVal> {
    let mut s = QuadVal::zero();
    for (x, y) in a.iter().zip(b) {
        s = s.try_add(&x.try_mul(y)?)?;
    }
    Ok(s)
}

/// Divides a coordinate vector by its first nonzero entry, scanning in the
/// given priority order.
fn normalize_by(v: &[QuadVal], order: &[usize]) -> Result<Vec<QuadVal>> {
    let Some(&k) = order.iter().find(|&&i| !v[i].is_zero()) else {
        return Err(Error::DegenerateConfiguration("all coordinates zero".into()));
    };
    let inv = v[k].recip()?;
    v.iter().map(|x| x.try_mul(&inv)).collect()
}

/// A point `[x : y : z]` of the projective plane. Equality is up to a
/// nonzero scalar.
#[derive(Clone, Serialize, Deserialize)]
#[serde(try_from = "PointRepr", into = "PointRepr")]
pub struct ProjPoint {
    coords: [QuadVal; 3],
}

#[derive(Serialize, Deserialize)]
struct PointRepr {
    coords: [QuadVal; 3],
    complex: bool,
}

impl TryFrom<PointRepr> for ProjPoint {
    type Error = Error;
    fn try_from(r: PointRepr) -> Result<Self> {
        let [x, y, z] = r.coords;
        ProjPoint::new(x, y, z)
    }
}

impl From<ProjPoint> for PointRepr {
    fn from(p: ProjPoint) -> Self {
        let complex = p.is_complex();
        PointRepr { coords: p.coords, complex }
    }
}

impl ProjPoint {
    pub fn new(x: QuadVal, y: QuadVal, z: QuadVal) -> Result<Self> {
        if x.is_zero() && y.is_zero() && z.is_zero() {
            return Err(Error::DegenerateConfiguration("point [0:0:0]".into()));
        }
        Ok(ProjPoint { coords: [x, y, z] })
    }

    pub fn from_rats(x: Rat, y: Rat, z: Rat) -> Result<Self> {
        ProjPoint::new(x.into(), y.into(), z.into())
    }

    pub fn from_ints(x: i64, y: i64, z: i64) -> Result<Self> {
        ProjPoint::new(q(x), q(y), q(z))
    }

    pub fn coords(&self) -> &[QuadVal; 3] {
        &self.coords
    }

    /// Some coordinate ratio is non-real.
    pub fn is_complex(&self) -> bool {
        match self.normalized() {
            Ok(p) => p.coords.iter().any(QuadVal::is_complex),
            Err(_) => self.coords.iter().any(QuadVal::is_complex),
        }
    }

    /// Scaled so that z = 1, or x = 1 when z = 0, or y = 1 otherwise.
    pub fn normalized(&self) -> Result<ProjPoint> {
        let v = normalize_by(&self.coords, &[2, 0, 1])?;
        Ok(ProjPoint {
            coords: [v[0].clone(), v[1].clone(), v[2].clone()],
        })
    }

    pub fn scale(&self, k: &QuadVal) -> Result<ProjPoint> {
        if k.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let [x, y, z] = &self.coords;
        ProjPoint::new(x.try_mul(k)?, y.try_mul(k)?, z.try_mul(k)?)
    }

    pub fn to_f64(&self) -> [f64; 3] {
        let [x, y, z] = &self.coords;
        [x.to_f64(), y.to_f64(), z.to_f64()]
    }
}

impl PartialEq for ProjPoint {
    fn eq(&self, other: &Self) -> bool {
        match (self.normalized(), other.normalized()) {
            (Ok(a), Ok(b)) => a.coords == b.coords,
            _ => false,
        }
    }
}

impl fmt::Debug for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x, y, z] = &self.coords;
        write!(f, "[{x} : {y} : {z}]")
    }
}

/// The line `αx + βy + γz = 0`. Equality is up to a nonzero scalar.
#[derive(Clone, Serialize, Deserialize)]
#[serde(try_from = "[QuadVal; 3]", into = "[QuadVal; 3]")]
pub struct ProjLine {
    coeffs: [QuadVal; 3],
}

impl TryFrom<[QuadVal; 3]> for ProjLine {
    type Error = Error;
    fn try_from(c: [QuadVal; 3]) -> Result<Self> {
        let [a, b, g] = c;
        ProjLine::new(a, b, g)
    }
}

impl From<ProjLine> for [QuadVal; 3] {
    fn from(l: ProjLine) -> Self {
        l.coeffs
    }
}

impl ProjLine {
    pub fn new(alpha: QuadVal, beta: QuadVal, gamma: QuadVal) -> Result<Self> {
        if alpha.is_zero() && beta.is_zero() && gamma.is_zero() {
            return Err(Error::DegenerateConfiguration("line with all coefficients zero".into()));
        }
        Ok(ProjLine {
            coeffs: [alpha, beta, gamma],
        })
    }

    pub fn from_ints(a: i64, b: i64, c: i64) -> Result<Self> {
        ProjLine::new(q(a), q(b), q(c))
    }

    pub fn coeffs(&self) -> &[QuadVal; 3] {
        &self.coeffs
    }

    pub fn eval(&self, p: &ProjPoint) -> Result<QuadVal> {
        dot3(&self.coeffs, p.coords())
    }

    /// Line through two distinct points (cross product).
    pub fn through(p: &ProjPoint, r: &ProjPoint) -> Result<ProjLine> {
        let [a, b, c] = p.coords();
        let [d, e, f] = r.coords();
        let x = b.try_mul(f)?.try_sub(&c.try_mul(e)?)?;
        let y = c.try_mul(d)?.try_sub(&a.try_mul(f)?)?;
        let z = a.try_mul(e)?.try_sub(&b.try_mul(d)?)?;
        ProjLine::new(x, y, z).map_err(|_| Error::DegenerateConfiguration("coincident points".into()))
    }

    /// Two independent points spanning the line.
    pub fn kernel_basis(&self) -> (ProjPoint, ProjPoint) {
        let [a, b, g] = &self.coeffs;
        let z = QuadVal::zero;
        let coords = if !g.is_zero() {
            ([g.clone(), z(), -a], [z(), g.clone(), -b])
        } else if !b.is_zero() {
            ([b.clone(), -a, z()], [z(), z(), QuadVal::one()])
        } else {
            ([z(), QuadVal::one(), z()], [z(), z(), QuadVal::one()])
        };
        (ProjPoint { coords: coords.0 }, ProjPoint { coords: coords.1 })
    }

    fn normalized(&self) -> Result<Vec<QuadVal>> {
        normalize_by(&self.coeffs, &[0, 1, 2])
    }
}

impl PartialEq for ProjLine {
    fn eq(&self, other: &Self) -> bool {
        match (self.normalized(), other.normalized()) {
            (Ok(a), Ok(b)) => a == b,
            _ => false,
        }
    }
}

impl fmt::Debug for ProjLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = &self.coeffs;
        write!(f, "({a})x + ({b})y + ({c})z = 0")
    }
}

/// `p1 x² + p2 y² + p3 z² + p4 xy + p5 xz + p6 yz = 0`.
///
/// `PartialEq` compares coefficients exactly; use [`Conic::proj_eq`] for
/// equality up to scale.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[QuadVal; 6]", into = "[QuadVal; 6]")]
pub struct Conic {
    p: [QuadVal; 6],
}

impl TryFrom<[QuadVal; 6]> for Conic {
    type Error = Error;
    fn try_from(p: [QuadVal; 6]) -> Result<Self> {
        Conic::new(p)
    }
}

impl From<Conic> for [QuadVal; 6] {
    fn from(c: Conic) -> Self {
        c.p
    }
}

/// Monomial vector `[x², y², z², xy, xz, yz]` in any ring.
pub fn monomials<T: Ring>(x: &T, y: &T, z: &T) -> [T; 6] {
    [
        x.clone() * x.clone(),
        y.clone() * y.clone(),
        z.clone() * z.clone(),
        x.clone() * y.clone(),
        x.clone() * z.clone(),
        y.clone() * z.clone(),
    ]
}

impl Conic {
    pub fn new(p: [QuadVal; 6]) -> Result<Self> {
        if p.iter().all(QuadVal::is_zero) {
            return Err(Error::DegenerateConfiguration("conic with all coefficients zero".into()));
        }
        Ok(Conic { p })
    }

    pub fn from_ints(p: [i64; 6]) -> Result<Self> {
        Conic::new(p.map(q))
    }

    pub fn coeffs(&self) -> &[QuadVal; 6] {
        &self.p
    }

    pub fn eval(&self, pt: &ProjPoint) -> Result<QuadVal> {
        let [x, y, z] = pt.coords();
        self.eval_coords(x, y, z)
    }

    fn eval_coords(&self, x: &QuadVal, y: &QuadVal, z: &QuadVal) -> Result<QuadVal> {
        let m = [
            x.try_mul(x)?,
            y.try_mul(y)?,
            z.try_mul(z)?,
            x.try_mul(y)?,
            x.try_mul(z)?,
            y.try_mul(z)?,
        ];
        let mut s = QuadVal::zero();
        for (c, mi) in self.p.iter().zip(&m) {
            s = s.try_add(&c.try_mul(mi)?)?;
        }
        Ok(s)
    }

    /// Symmetric bilinear form with `polar(P, P) = 2·c(P)`.
    pub fn polar(&self, a: &ProjPoint, b: &ProjPoint) -> Result<QuadVal> {
        let [p1, p2, p3, p4, p5, p6] = &self.p;
        let [ax, ay, az] = a.coords();
        let [bx, by, bz] = b.coords();
        let two = q(2);
        let terms = [
            two.try_mul(p1)?.try_mul(&ax.try_mul(bx)?)?,
            two.try_mul(p2)?.try_mul(&ay.try_mul(by)?)?,
            two.try_mul(p3)?.try_mul(&az.try_mul(bz)?)?,
            p4.try_mul(&ax.try_mul(by)?.try_add(&ay.try_mul(bx)?)?)?,
            p5.try_mul(&ax.try_mul(bz)?.try_add(&az.try_mul(bx)?)?)?,
            p6.try_mul(&ay.try_mul(bz)?.try_add(&az.try_mul(by)?)?)?,
        ];
        let mut s = QuadVal::zero();
        for t in &terms {
            s = s.try_add(t)?;
        }
        Ok(s)
    }

    /// Determinant of the symmetric matrix; nonzero iff the conic is smooth.
    pub fn det(&self) -> Result<QuadVal> {
        let [p1, p2, p3, p4, p5, p6] = &self.p;
        let four = q(4);
        // 4·det = 4p1p2p3 + p4p5p6 - p1p6² - p2p5² - p3p4²
        let t = four.try_mul(p1)?.try_mul(p2)?.try_mul(p3)?;
        let t = t.try_add(&p4.try_mul(p5)?.try_mul(p6)?)?;
        let t = t.try_sub(&p1.try_mul(&p6.try_mul(p6)?)?)?;
        let t = t.try_sub(&p2.try_mul(&p5.try_mul(p5)?)?)?;
        let t = t.try_sub(&p3.try_mul(&p4.try_mul(p4)?)?)?;
        t.try_div(&four)
    }

    pub fn is_smooth(&self) -> Result<bool> {
        Ok(!self.det()?.is_zero())
    }

    /// Coefficients divided by the first nonzero one.
    pub fn normalized(&self) -> Result<Conic> {
        let v = normalize_by(&self.p, &[0, 1, 2, 3, 4, 5])?;
        Ok(Conic {
            p: std::array::from_fn(|i| v[i].clone()),
        })
    }

    /// Equality up to a nonzero scalar.
    pub fn proj_eq(&self, other: &Conic) -> bool {
        match (self.normalized(), other.normalized()) {
            (Ok(a), Ok(b)) => a.p == b.p,
            _ => false,
        }
    }

    pub fn to_f64(&self) -> [f64; 6] {
        std::array::from_fn(|i| self.p[i].to_f64())
    }

    /// Coefficients `(a, b, c)` of `a λ² + b λ + c`, the conic restricted to
    /// `λP + Q` for the line's kernel basis `(P, Q)`.
    pub fn restriction(&self, l: &ProjLine) -> Result<[QuadVal; 3]> {
        let (pp, qq) = l.kernel_basis();
        Ok([self.eval(&pp)?, self.polar(&pp, &qq)?, self.eval(&qq)?])
    }

    /// Discriminant `b² - 4ac` of the restriction to `l`. For `z = 0` this
    /// is exactly `p4² - 4 p1 p2`.
    pub fn restricted_discriminant(&self, l: &ProjLine) -> Result<QuadVal> {
        let [a, b, c] = self.restriction(l)?;
        if a.is_zero() && b.is_zero() && c.is_zero() {
            return Err(Error::LineOnConic);
        }
        b.try_mul(&b)?.try_sub(&q(4).try_mul(&a)?.try_mul(&c)?)
    }
}

impl fmt::Debug for Conic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = ["x²", "y²", "z²", "xy", "xz", "yz"];
        let parts: Vec<String> = self.p.iter().zip(names).map(|(c, m)| format!("({c}){m}")).collect();
        write!(f, "{} = 0", parts.join(" + "))
    }
}

/// Determinant by Gaussian elimination over one quadratic field.
pub fn det_quad(mut m: Vec<Vec<QuadVal>>) -> Result<QuadVal> {
    let n = m.len();
    let mut det = QuadVal::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Ok(QuadVal::zero());
        };
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        let pv = m[col][col].clone();
        det = det.try_mul(&pv)?;
        let inv = pv.recip()?;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].try_mul(&inv)?;
            for c in col..n {
                let t = f.try_mul(&m[col][c])?;
                m[r][c] = m[r][c].try_sub(&t)?;
            }
        }
    }
    Ok(det)
}

/// The conic through five points: cofactor expansion of the 6×6 matrix
/// whose first row holds the monomials and whose other rows hold the
/// monomials evaluated at the points.
pub fn conic_through_5(points: &[ProjPoint; 5]) -> Result<Conic> {
    for i in 0..5 {
        for j in i + 1..5 {
            if points[i] == points[j] {
                return Err(Error::DegenerateConfiguration(format!("points {} and {} coincide", i + 1, j + 1)));
            }
        }
    }
    let rows: Vec<[QuadVal; 6]> = points
        .iter()
        .map(|p| {
            let [x, y, z] = p.coords();
            monomials(x, y, z)
        })
        .collect();
    let mut p: [QuadVal; 6] = std::array::from_fn(|_| QuadVal::zero());
    for (k, pk) in p.iter_mut().enumerate() {
        let minor: Vec<Vec<QuadVal>> = rows
            .iter()
            .map(|r| r.iter().enumerate().filter(|&(c, _)| c != k).map(|(_, v)| v.clone()).collect())
            .collect();
        let d = det_quad(minor)?;
        *pk = if k % 2 == 0 { d } else { -d };
    }
    Conic::new(p).map_err(|_| Error::DegenerateConfiguration("all 5×5 minors vanish".into()))
}

/// The two intersection points of a conic and a line (equal when tangent).
/// Points come from the roots of the restricted quadratic, `+√` branch first.
pub fn conic_line_meet(c: &Conic, l: &ProjLine) -> Result<(ProjPoint, ProjPoint)> {
    let (pp, qq) = l.kernel_basis();
    let [a, b, cc] = c.restriction(l)?;
    if a.is_zero() && b.is_zero() && cc.is_zero() {
        return Err(Error::LineOnConic);
    }
    let combine = |lam: &QuadVal| -> Result<ProjPoint> {
        let [px, py, pz] = pp.coords();
        let [qx, qy, qz] = qq.coords();
        ProjPoint::new(
            lam.try_mul(px)?.try_add(qx)?,
            lam.try_mul(py)?.try_add(qy)?,
            lam.try_mul(pz)?.try_add(qz)?,
        )?
        .normalized()
    };
    if a.is_zero() {
        // λ = ∞ is a root: the point P itself
        if b.is_zero() {
            let p = pp.normalized()?;
            return Ok((p.clone(), p));
        }
        let lam = (-&cc).try_div(&b)?;
        return Ok((pp.normalized()?, combine(&lam)?));
    }
    match quad_solve_general(&a, &b, &cc, 50)? {
        QuadRoots::Exact(r1, r2) => Ok((combine(&r1)?, combine(&r2)?)),
        QuadRoots::Numeric(..) => Err(Error::LeavesQuadraticClosure(
            "square root of the restricted discriminant lies outside the coefficient field".into(),
        )),
    }
}

/// True iff the restriction of `c` to `l` has a double root.
pub fn is_tangent(c: &Conic, l: &ProjLine) -> Result<bool> {
    Ok(c.restricted_discriminant(l)?.is_zero())
}

/// Restricted discriminant for numerically given conic coefficients and a
/// rational line, in ball arithmetic.
pub fn restricted_discriminant_numeric(p: &[BigReal; 6], l: &ProjLine) -> Result<BigReal> {
    let digits = p[0].working_digits();
    let (pp, qq) = l.kernel_basis();
    let lift = |pt: &ProjPoint| -> Result<[BigReal; 3]> {
        let mut out = Vec::with_capacity(3);
        for c in pt.coords() {
            out.push(c.to_real(digits).ok_or_else(|| Error::InvalidArgument("complex line".into()))?);
        }
        Ok([out[0].clone(), out[1].clone(), out[2].clone()])
    };
    let (a, b) = (lift(&pp)?, lift(&qq)?);
    let eval = |v: &[BigReal; 3]| -> BigReal {
        let m = monomials(&v[0], &v[1], &v[2]);
        let mut s = BigReal::zero(digits);
        for (c, mi) in p.iter().zip(&m) {
            s = &s + &(c * mi);
        }
        s
    };
    let two = BigReal::from_int(2, digits);
    let polar = &(&(&(&two * &(&p[0] * &(&a[0] * &b[0]))) + &(&two * &(&p[1] * &(&a[1] * &b[1]))))
        + &(&two * &(&p[2] * &(&a[2] * &b[2]))))
        + &(&(&p[3] * &(&(&a[0] * &b[1]) + &(&a[1] * &b[0])))
            + &(&(&p[4] * &(&(&a[0] * &b[2]) + &(&a[2] * &b[0]))) + &(&p[5] * &(&(&a[1] * &b[2]) + &(&a[2] * &b[1])))));
    let (ca, cc) = (eval(&a), eval(&b));
    Ok(&polar.square() - &(&BigReal::from_int(4, digits) * &(&ca * &cc)))
}

/// Exact incidence of a point with a line or conic.
pub trait Incidence {
    fn form_at(&self, p: &ProjPoint) -> Result<QuadVal>;
    fn form_numeric(&self, p: &ProjPoint, digits: u32) -> BigComplex;
}

fn coords_numeric(p: &ProjPoint, digits: u32) -> [BigComplex; 3] {
    p.coords().clone().map(|c| c.to_complex(digits))
}

impl Incidence for ProjLine {
    fn form_at(&self, p: &ProjPoint) -> Result<QuadVal> {
        self.eval(p)
    }

    fn form_numeric(&self, p: &ProjPoint, digits: u32) -> BigComplex {
        let v = coords_numeric(p, digits);
        let mut s = BigComplex::zero(digits);
        for (c, x) in self.coeffs.iter().zip(&v) {
            s = &s + &(&c.to_complex(digits) * x);
        }
        s
    }
}

impl Incidence for Conic {
    fn form_at(&self, p: &ProjPoint) -> Result<QuadVal> {
        self.eval(p)
    }

    fn form_numeric(&self, p: &ProjPoint, digits: u32) -> BigComplex {
        let [x, y, z] = coords_numeric(p, digits);
        let m = monomials(&x, &y, &z);
        let mut s = BigComplex::zero(digits);
        for (c, mi) in self.p.iter().zip(&m) {
            s = &s + &(&c.to_complex(digits) * mi);
        }
        s
    }
}

/// `true` iff the defining form vanishes at `p`. When point and form live
/// in different quadratic fields the exact arithmetic cannot combine them;
/// such pairs are decided by a 100-digit ball evaluation.
pub fn incident(p: &ProjPoint, obj: &impl Incidence) -> bool {
    match obj.form_at(p) {
        Ok(v) => v.is_zero(),
        Err(_) => obj.form_numeric(p, 100).contains_zero(),
    }
}
