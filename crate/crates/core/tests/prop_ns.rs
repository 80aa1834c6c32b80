use mcycle::arith::Rat;
use mcycle::ns::{
    cm_lattice_basis, gram_matrix, humbert_norm, ns_pair, sigma_star, signature, EndElt, HomModule, NSClass,
};
use proptest::prelude::*;

const DISCS: [i64; 7] = [-3, -4, -7, -8, -15, -20, -23];

fn coef() -> impl Strategy<Value = Rat> {
    (-20i64..=20, 1i64..=4).prop_map(|(n, d)| Rat::new(n, d).unwrap())
}

fn module() -> impl Strategy<Value = HomModule> {
    prop_oneof![
        Just(HomModule::Zero),
        prop::sample::select(vec![1u64, 2, 3, 5, 7]).prop_map(|h_degree| HomModule::Isogeny { h_degree }),
        prop::sample::select(DISCS.to_vec()).prop_map(|disc| HomModule::Cm { disc }),
    ]
}

fn elt(m: HomModule) -> impl Strategy<Value = EndElt> {
    (coef(), coef()).prop_map(move |(u, v)| match m {
        HomModule::Zero => EndElt::zero(m),
        HomModule::Isogeny { .. } => EndElt::new(u, Rat::zero(), m).unwrap(),
        HomModule::Cm { .. } => EndElt::new(u, v, m).unwrap(),
    })
}

fn class(m: HomModule) -> impl Strategy<Value = NSClass> {
    (coef(), coef(), elt(m)).prop_map(|(a, b, phi)| NSClass::new(a, b, phi))
}

fn classes3() -> impl Strategy<Value = (NSClass, NSClass, NSClass)> {
    module().prop_flat_map(|m| (class(m), class(m), class(m)))
}

fn elts2() -> impl Strategy<Value = (EndElt, EndElt)> {
    module().prop_flat_map(|m| (elt(m), elt(m)))
}

/// Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations.
fn eigenvalues(m: &[Vec<Rat>]) -> Vec<f64> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.iter().map(|r| r.iter().map(Rat::to_f64).collect()).collect();
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j].powi(2)).sum();
        if off < 1e-24 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let (c, s) = (1.0 / (t * t + 1.0).sqrt(), t / (t * t + 1.0).sqrt());
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn pairing_symmetric_and_bilinear((x, y, z) in classes3(), k in coef()) {
        prop_assert_eq!(ns_pair(&x, &y).unwrap(), ns_pair(&y, &x).unwrap());
        let lhs = ns_pair(&x.add(&y.scale(&k)).unwrap(), &z).unwrap();
        let rhs = ns_pair(&x, &z).unwrap() + &k * &ns_pair(&y, &z).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn humbert_norm_positive_orthogonal_to_theta((x, _, _) in classes3()) {
        let th = NSClass::theta(x.phi.module);
        let t = ns_pair(&x, &th).unwrap() / ns_pair(&th, &th).unwrap();
        let y = x.sub(&th.scale(&t)).unwrap();
        prop_assert!(ns_pair(&y, &th).unwrap().is_zero());
        let zero = NSClass::new(Rat::zero(), Rat::zero(), EndElt::zero(x.phi.module));
        if y != zero {
            prop_assert!(humbert_norm(&y).unwrap().signum() > 0, "{:?}", y);
        }
    }

    #[test]
    fn sigma_preserves_pairing_and_norm((x, y, _) in classes3()) {
        prop_assert_eq!(humbert_norm(&sigma_star(&x)).unwrap(), humbert_norm(&x).unwrap());
        prop_assert_eq!(ns_pair(&sigma_star(&x), &sigma_star(&y)).unwrap(), ns_pair(&x, &y).unwrap());
        prop_assert_eq!(sigma_star(&sigma_star(&x)), x);
    }

    #[test]
    fn degree_of_difference((phi, psi) in elts2()) {
        let lhs = phi.sub(&psi).unwrap().degree();
        let rhs = phi.degree() + psi.degree() - phi.trace_pair(&psi).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert!(phi.degree().signum() >= 0);
    }
}

#[test]
fn cm_lattice_signature() {
    for d in DISCS {
        let gram = gram_matrix(&cm_lattice_basis(d).unwrap()).unwrap();
        assert_eq!(signature(&gram), (1, 3, 0), "D = {d}");
        let ev = eigenvalues(&gram);
        let pos = ev.iter().filter(|&&e| e > 1e-9).count();
        let neg = ev.iter().filter(|&&e| e < -1e-9).count();
        assert_eq!((pos, neg), (1, 3), "D = {d}: {ev:?}");
    }
}

#[test]
fn smaller_lattices_are_hyperbolic() {
    let zero = HomModule::Zero;
    let gram = gram_matrix(&[NSClass::f1(zero), NSClass::f2(zero)]).unwrap();
    assert_eq!(signature(&gram), (1, 1, 0));
    for h in [1u64, 2, 3, 5] {
        let m = HomModule::Isogeny { h_degree: h };
        let basis = [NSClass::f1(m), NSClass::f2(m), NSClass::graph(EndElt::isogeny(Rat::one(), h).unwrap())];
        let gram = gram_matrix(&basis).unwrap();
        assert_eq!(signature(&gram), (1, 2, 0));
        let ev = eigenvalues(&gram);
        assert_eq!(ev.iter().filter(|&&e| e > 0.0).count(), 1, "{ev:?}");
    }
}
