//! Néron–Severi lattice of a product `E1 × E2`, written as triples
//! `(a, b, φ)` = `a·f1 + b·f2 + (Hom part φ)` with `f1 = E1×0`, `f2 = 0×E2`.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{BigReal, Rat};
use crate::error::{Error, Result};

/// The lattice `Hom(E1, E2)` the φ-part lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HomModule {
    /// Non-isogenous factors.
    Zero,
    /// Non-CM isogenous factors: `φ = u·h` for a fixed isogeny `h`.
    Isogeny { h_degree: u64 },
    /// CM by the maximal order of `Q(√D)`; `φ = u + v√D`.
    Cm { disc: i64 },
}

impl HomModule {
    pub fn rank(&self) -> u8 {
        match self {
            HomModule::Zero => 0,
            HomModule::Isogeny { .. } => 1,
            HomModule::Cm { .. } => 2,
        }
    }
}

/// True for negative fundamental discriminants.
pub fn is_fundamental_discriminant(d: i64) -> bool {
    fn squarefree(n: i64) -> bool {
        let n = n.unsigned_abs();
        let mut p = 2u64;
        while p * p <= n {
            if n.is_multiple_of(p * p) {
                return false;
            }
            p += 1;
        }
        true
    }
    if d >= 0 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => squarefree(d),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && squarefree(m)
        }
        _ => false,
    }
}

/// Element `u + v√D` (CM), `u·h` (isogeny) or `0`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EndElt {
    pub u: Rat,
    pub v: Rat,
    pub module: HomModule,
}

impl fmt::Debug for EndElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.module {
            HomModule::Zero => write!(f, "0"),
            HomModule::Isogeny { .. } => write!(f, "{}·h", self.u),
            HomModule::Cm { disc } => write!(f, "{} + {}·√{}", self.u, self.v, disc),
        }
    }
}

impl EndElt {
    pub fn zero(module: HomModule) -> Self {
        EndElt {
            u: Rat::zero(),
            v: Rat::zero(),
            module,
        }
    }

    pub fn new(u: Rat, v: Rat, module: HomModule) -> Result<Self> {
        match module {
            HomModule::Zero if !(u.is_zero() && v.is_zero()) => {
                return Err(Error::IncompatibleModules("Hom(E1, E2) = 0 admits only φ = 0".into()))
            }
            HomModule::Isogeny { h_degree } => {
                if h_degree == 0 {
                    return Err(Error::InvalidArgument("isogeny degree must be positive".into()));
                }
                if !v.is_zero() {
                    return Err(Error::IncompatibleModules("rank-1 Hom has no √D part".into()));
                }
            }
            HomModule::Cm { disc } if disc >= 0 => {
                return Err(Error::InvalidArgument(format!("CM discriminant must be negative, got {disc}")))
            }
            _ => {}
        }
        Ok(EndElt { u, v, module })
    }

    /// `u + v√D`.
    pub fn cm(u: Rat, v: Rat, disc: i64) -> Result<Self> {
        EndElt::new(u, v, HomModule::Cm { disc })
    }

    /// `n·h` with `deg h = h_degree`.
    pub fn isogeny(n: Rat, h_degree: u64) -> Result<Self> {
        EndElt::new(n, Rat::zero(), HomModule::Isogeny { h_degree })
    }

    fn check(&self, other: &EndElt) -> Result<()> {
        if self.module != other.module {
            return Err(Error::IncompatibleModules(format!("{:?} vs {:?}", self.module, other.module)));
        }
        Ok(())
    }

    pub fn conj(&self) -> EndElt {
        EndElt {
            u: self.u.clone(),
            v: -&self.v,
            module: self.module,
        }
    }

    pub fn neg(&self) -> EndElt {
        EndElt {
            u: -&self.u,
            v: -&self.v,
            module: self.module,
        }
    }

    pub fn scale(&self, k: &Rat) -> EndElt {
        EndElt {
            u: &self.u * k,
            v: &self.v * k,
            module: self.module,
        }
    }

    pub fn add(&self, other: &EndElt) -> Result<EndElt> {
        self.check(other)?;
        Ok(EndElt {
            u: &self.u + &other.u,
            v: &self.v + &other.v,
            module: self.module,
        })
    }

    pub fn sub(&self, other: &EndElt) -> Result<EndElt> {
        self.add(&other.neg())
    }

    /// `deg φ = φ·conj(φ)`; zero for `φ = 0`.
    pub fn degree(&self) -> Rat {
        match self.module {
            HomModule::Zero => Rat::zero(),
            HomModule::Isogeny { h_degree } => self.u.square() * Rat::from(h_degree as i64),
            HomModule::Cm { disc } => self.u.square() - self.v.square() * Rat::from(disc),
        }
    }

    /// `Tr(φ·conj(ψ))`, the polarization of the degree form.
    pub fn trace_pair(&self, other: &EndElt) -> Result<Rat> {
        self.check(other)?;
        Ok(match self.module {
            HomModule::Zero => Rat::zero(),
            HomModule::Isogeny { h_degree } => Rat::from(2 * h_degree as i64) * (&self.u * &other.u),
            HomModule::Cm { disc } => Rat::from(2) * (&(&self.u * &other.u) - &(&(&self.v * &other.v) * &Rat::from(disc))),
        })
    }

    /// Membership in the maximal order (CM) or in `Z·h` (isogeny).
    pub fn is_integral(&self) -> bool {
        match self.module {
            HomModule::Zero => true,
            HomModule::Isogeny { .. } => self.u.is_integer(),
            HomModule::Cm { disc } => {
                let (tu, tv) = (&self.u * &Rat::from(2), &self.v * &Rat::from(2));
                if !tu.is_integer() || !tv.is_integer() {
                    return false;
                }
                if disc.rem_euclid(4) == 1 {
                    // Z[(1+√D)/2]: u, v ∈ ½Z with u - v ∈ Z
                    (&self.u - &self.v).is_integer()
                } else {
                    // Z[√D/2]: u ∈ Z, v ∈ ½Z
                    self.u.is_integer()
                }
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct EndRepr {
    u: Rat,
    v: Rat,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    disc: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    h_degree: Option<u64>,
    rank: u8,
}

impl Serialize for EndElt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (disc, h_degree) = match self.module {
            HomModule::Zero => (None, None),
            HomModule::Isogeny { h_degree } => (None, Some(h_degree)),
            HomModule::Cm { disc } => (Some(disc), None),
        };
        EndRepr {
            u: self.u.clone(),
            v: self.v.clone(),
            disc,
            h_degree,
            rank: self.module.rank(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for EndElt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = EndRepr::deserialize(d)?;
        let module = match (r.rank, r.disc, r.h_degree) {
            (0, None, None) => HomModule::Zero,
            (1, None, Some(h_degree)) => HomModule::Isogeny { h_degree },
            (2, Some(disc), None) => HomModule::Cm { disc },
            // a bare "disc" without rank is read as CM
            (_, Some(disc), None) => HomModule::Cm { disc },
            _ => return Err(serde::de::Error::custom("inconsistent rank/disc/h_degree")),
        };
        EndElt::new(r.u, r.v, module).map_err(serde::de::Error::custom)
    }
}

/// Class `a·f1 + b·f2 + φ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NSClass {
    pub a: Rat,
    pub b: Rat,
    pub phi: EndElt,
}

impl NSClass {
    pub fn new(a: Rat, b: Rat, phi: EndElt) -> Self {
        NSClass { a, b, phi }
    }

    /// `f1 = E1 × 0`.
    pub fn f1(module: HomModule) -> Self {
        NSClass::new(Rat::one(), Rat::zero(), EndElt::zero(module))
    }

    /// `f2 = 0 × E2`.
    pub fn f2(module: HomModule) -> Self {
        NSClass::new(Rat::zero(), Rat::one(), EndElt::zero(module))
    }

    /// The principal polarization `Θ = f1 + f2`.
    pub fn theta(module: HomModule) -> Self {
        NSClass::new(Rat::one(), Rat::one(), EndElt::zero(module))
    }

    /// Graph of `φ`: `(1, deg φ, φ)`.
    pub fn graph(phi: EndElt) -> Self {
        NSClass::new(Rat::one(), phi.degree(), phi)
    }

    pub fn add(&self, other: &NSClass) -> Result<NSClass> {
        Ok(NSClass::new(&self.a + &other.a, &self.b + &other.b, self.phi.add(&other.phi)?))
    }

    pub fn sub(&self, other: &NSClass) -> Result<NSClass> {
        self.add(&other.scale(&Rat::from(-1)))
    }

    pub fn scale(&self, k: &Rat) -> NSClass {
        NSClass::new(&self.a * k, &self.b * k, self.phi.scale(k))
    }

    pub fn is_integral(&self) -> bool {
        self.a.is_integer() && self.b.is_integer() && self.phi.is_integral()
    }
}

/// `⟨(a1,b1,φ1),(a2,b2,φ2)⟩ = a1 b2 + a2 b1 - Tr(φ1 conj φ2)`.
pub fn ns_pair(d1: &NSClass, d2: &NSClass) -> Result<Rat> {
    let t = d1.phi.trace_pair(&d2.phi)?;
    Ok(&(&(&d1.a * &d2.b) + &(&d2.a * &d1.b)) - &t)
}

/// `(D·Θ)² - 2 D²`.
pub fn humbert_norm(d: &NSClass) -> Result<Rat> {
    let th = ns_pair(d, &NSClass::theta(d.phi.module))?;
    Ok(th.square() - Rat::from(2) * ns_pair(d, d)?)
}

/// Factor swap `(a, b, φ) ↦ (b, a, conj φ)`.
pub fn sigma_star(d: &NSClass) -> NSClass {
    NSClass::new(d.b.clone(), d.a.clone(), d.phi.conj())
}

fn cm_module(disc: i64) -> Result<HomModule> {
    if !is_fundamental_discriminant(disc) {
        return Err(Error::InvalidArgument(format!("{disc} is not a negative fundamental discriminant")));
    }
    Ok(HomModule::Cm { disc })
}

/// `Z = Γ_√D - f1 + D·f2 = (0, 0, √D)`.
pub fn cm_z(disc: i64) -> Result<NSClass> {
    let m = cm_module(disc)?;
    let graph = NSClass::graph(EndElt::cm(Rat::zero(), Rat::one(), disc)?);
    graph.sub(&NSClass::f1(m))?.add(&NSClass::f2(m).scale(&Rat::from(disc)))
}

/// `(Z - σ*Z, c)` with `c` normalizing the self-pairing of `c(Z - σ*Z)` to -1.
pub fn cm_cycle(disc: i64, digits: u32) -> Result<(NSClass, BigReal)> {
    let z = cm_z(disc)?;
    let s = z.sub(&sigma_star(&z))?;
    let self_pair = ns_pair(&s, &s)?;
    if self_pair.signum() >= 0 {
        return Err(Error::DegenerateConfiguration("Z - σ*Z is not negative".into()));
    }
    let c = BigReal::from_rat(&(-&self_pair), digits).sqrt().recip();
    Ok((s, c))
}

/// The integral basis `{f1, f2, Γ1, Γ_ω}` of the CM lattice, `ω` the order
/// generator (`(1+√D)/2` or `√D/2`).
pub fn cm_lattice_basis(disc: i64) -> Result<[NSClass; 4]> {
    let m = cm_module(disc)?;
    let omega = if disc.rem_euclid(4) == 1 {
        EndElt::cm(Rat::new(1, 2)?, Rat::new(1, 2)?, disc)?
    } else {
        EndElt::cm(Rat::zero(), Rat::new(1, 2)?, disc)?
    };
    Ok([
        NSClass::f1(m),
        NSClass::f2(m),
        NSClass::graph(EndElt::cm(Rat::one(), Rat::zero(), disc)?),
        NSClass::graph(omega),
    ])
}

pub fn gram_matrix(basis: &[NSClass]) -> Result<Vec<Vec<Rat>>> {
    basis
        .iter()
        .map(|x| basis.iter().map(|y| ns_pair(x, y)).collect())
        .collect()
}

/// Inertia `(positive, negative, zero)` of a symmetric rational matrix by
/// exact congruence diagonalization.
pub fn signature(gram: &[Vec<Rat>]) -> (usize, usize, usize) {
    let n = gram.len();
    let mut m: Vec<Vec<Rat>> = gram.to_vec();
    let (mut pos, mut neg, mut zero) = (0, 0, 0);
    let mut k = 0;
    while k < n {
        if m[k][k].is_zero() {
            // bring a nonzero diagonal entry into position k, or create one
            if let Some(j) = (k + 1..n).find(|&j| !m[j][j].is_zero()) {
                m.swap(k, j);
                for row in m.iter_mut() {
                    row.swap(k, j);
                }
            } else if let Some(j) = (k + 1..n).find(|&j| !m[k][j].is_zero()) {
                // e_k += e_j makes the diagonal 2 m[k][j]
                for i in 0..n {
                    let t = m[j][i].clone();
                    m[k][i] += &t;
                }
                for i in 0..n {
                    let t = m[i][j].clone();
                    m[i][k] += &t;
                }
            } else {
                zero += 1;
                k += 1;
                continue;
            }
        }
        let p = m[k][k].clone();
        if p.signum() > 0 {
            pos += 1;
        } else {
            neg += 1;
        }
        for i in k + 1..n {
            let f = &m[i][k] / &p;
            for j in k..n {
                let t = &f * &m[k][j];
                m[i][j] = &m[i][j] - &t;
            }
        }
        for i in k + 1..n {
            m[k][i] = Rat::zero();
            m[i][k] = Rat::zero();
        }
        k += 1;
    }
    (pos, neg, zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    const M4: HomModule = HomModule::Cm { disc: -4 };

    #[test]
    fn fibre_pairings() {
        assert_eq!(ns_pair(&NSClass::f1(M4), &NSClass::f2(M4)).unwrap(), Rat::one());
        assert_eq!(ns_pair(&NSClass::f1(M4), &NSClass::f1(M4)).unwrap(), Rat::zero());
        assert_eq!(ns_pair(&NSClass::theta(M4), &NSClass::theta(M4)).unwrap(), Rat::from(2));
        assert_eq!(humbert_norm(&NSClass::theta(M4)).unwrap(), Rat::zero());
        assert_eq!(humbert_norm(&NSClass::f1(M4)).unwrap(), Rat::one());
    }

    #[test]
    fn isogeny_graph_norms() {
        for n in 2..=10u64 {
            let g = NSClass::graph(EndElt::isogeny(Rat::one(), n - 1).unwrap());
            let m = g.phi.module;
            assert_eq!(ns_pair(&g, &NSClass::theta(m)).unwrap(), Rat::from(n as i64));
            assert_eq!(ns_pair(&g, &g).unwrap(), Rat::zero());
            assert_eq!(ns_pair(&g, &NSClass::f1(m)).unwrap(), Rat::from(n as i64 - 1));
            assert_eq!(ns_pair(&g, &NSClass::f2(m)).unwrap(), Rat::one());
            assert_eq!(humbert_norm(&g).unwrap(), Rat::from((n * n) as i64));
        }
    }

    #[test]
    fn cm_classes() {
        let z = cm_z(-4).unwrap();
        assert_eq!(z, NSClass::new(Rat::zero(), Rat::zero(), EndElt::cm(Rat::zero(), Rat::one(), -4).unwrap()));
        let g1 = NSClass::graph(EndElt::cm(Rat::one(), Rat::zero(), -4).unwrap());
        for other in [NSClass::f1(M4), NSClass::f2(M4), g1] {
            assert_eq!(ns_pair(&z, &other).unwrap(), Rat::zero());
        }
        let (s, c) = cm_cycle(-4, 50).unwrap();
        assert_eq!(ns_pair(&s, &s).unwrap(), Rat::from(-32));
        assert!((c.to_f64() - 1.0 / 32f64.sqrt()).abs() < 1e-15);
        assert_eq!(sigma_star(&s), s.scale(&Rat::from(-1)));
        let gp = NSClass::graph(EndElt::cm(Rat::zero(), Rat::one(), -4).unwrap());
        let gm = NSClass::graph(EndElt::cm(Rat::zero(), Rat::from(-1), -4).unwrap());
        assert_eq!(s, gp.sub(&gm).unwrap());
    }

    #[test]
    fn mixed_modules_are_rejected() {
        let a = NSClass::f1(M4);
        let b = NSClass::f1(HomModule::Cm { disc: -3 });
        assert!(matches!(ns_pair(&a, &b), Err(Error::IncompatibleModules(_))));
    }

    #[test]
    fn lattice_signature() {
        for d in [-3, -4, -7, -8, -11] {
            let g = gram_matrix(&cm_lattice_basis(d).unwrap()).unwrap();
            assert_eq!(signature(&g), (1, 3, 0), "D = {d}");
        }
        assert!(!is_fundamental_discriminant(-12));
        assert!(is_fundamental_discriminant(-20));
        assert!(cm_z(-12).is_err());
    }

    #[test]
    fn integrality() {
        assert!(EndElt::cm(Rat::new(1, 2).unwrap(), Rat::new(1, 2).unwrap(), -3).unwrap().is_integral());
        assert!(!EndElt::cm(Rat::new(1, 2).unwrap(), Rat::zero(), -3).unwrap().is_integral());
        assert!(EndElt::cm(Rat::zero(), Rat::new(1, 2).unwrap(), -4).unwrap().is_integral());
        assert!(!EndElt::cm(Rat::new(1, 2).unwrap(), Rat::new(1, 2).unwrap(), -4).unwrap().is_integral());
    }

    #[test]
    fn json_shape() {
        let z = cm_z(-7).unwrap();
        let js = serde_json::to_value(&z).unwrap();
        assert_eq!(js["phi"]["disc"], -7);
        assert_eq!(js["a"], "0");
        let back: NSClass = serde_json::from_value(js).unwrap();
        assert_eq!(back, z);
    }
}
