use mcycle::arith::{quad_solve, BigReal, QuadVal, Rat};
use proptest::prelude::*;

fn rat() -> impl Strategy<Value = Rat> {
    (-200i64..=200, 1i64..=40).prop_map(|(n, d)| Rat::new(n, d).unwrap())
}

fn nonzero_rat() -> impl Strategy<Value = Rat> {
    rat().prop_filter("nonzero", |r| !r.is_zero())
}

/// `k²·d` for a fixed squarefree core `d`, so that both operands share a field.
fn same_field_pair() -> impl Strategy<Value = (QuadVal, QuadVal)> {
    (
        prop::sample::select(vec![2i64, 3, 5, 6, 7, 10, -1, -2, -3, -7]),
        rat(),
        rat(),
        1i64..=5,
        rat(),
        rat(),
        1i64..=5,
        any::<bool>(),
    )
        .prop_map(|(d, r1, c1, k1, r2, c2, k2, same)| {
            let a = QuadVal::new(r1.clone(), c1.clone(), &Rat::from(k1 * k1 * d));
            let b = if same {
                // the same number written over a different square factor
                QuadVal::new(r1, &c1 * &Rat::new(k1, k2).unwrap(), &Rat::from(k2 * k2 * d))
            } else {
                QuadVal::new(r2, c2, &Rat::from(k2 * k2 * d))
            };
            (a, b)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn rat_field_axioms(a in rat(), b in rat(), c in rat()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a - &a, Rat::zero());
        prop_assert_eq!(&a * &Rat::one(), a.clone());
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.recip().unwrap(), Rat::one());
            prop_assert_eq!((&b / &a) * a.clone(), b.clone());
        }
    }

    #[test]
    fn rat_is_canonical(n in -500i64..=500, d in 1i64..=50, k in 1i64..=20) {
        let r = Rat::new(n * k, d * k).unwrap();
        prop_assert_eq!(&r, &Rat::new(n, d).unwrap());
        prop_assert!(r.denom() > &0);
        prop_assert_eq!(r.numer().clone().gcd(r.denom()), 1);
        prop_assert_eq!(Rat::parse(&r.to_string()).unwrap(), r);
    }

    #[test]
    fn quad_solve_vieta(a in nonzero_rat(), b in rat(), c in rat()) {
        let (r1, r2) = quad_solve(&a, &b, &c).unwrap();
        let (qa, qb, qc) = (QuadVal::from(&a), QuadVal::from(&b), QuadVal::from(&c));
        for r in [&r1, &r2] {
            prop_assert!((&(&(&qa * &r.square()) + &(&qb * r)) + &qc).is_zero());
        }
        prop_assert_eq!(&(&r1 + &r2) * &qa, -qb);
        prop_assert_eq!(&(&r1 * &r2) * &qa, qc);
        if !r1.is_rational() {
            prop_assert_eq!(r1.conj(), r2);
        }
    }

    #[test]
    fn quad_equality_matches_numeric((a, b) in same_field_pair()) {
        let diff = (&a.to_complex(110) - &b.to_complex(110)).abs();
        let numeric_equal = diff.to_f64() < 1e-100;
        prop_assert_eq!(a == b, numeric_equal, "{} vs {}", a, b);
        prop_assert_eq!(a.try_sub(&b).unwrap().is_zero(), a == b);
    }

    #[test]
    fn quad_field_ops((a, b) in same_field_pair()) {
        let s = &a + &b;
        prop_assert_eq!(&s - &b, a.clone());
        let p = &a * &b;
        if !b.is_zero() {
            prop_assert_eq!(&p / &b, a.clone());
        }
        prop_assert_eq!(a.norm(), (&a * &a.conj()).as_rat().unwrap().clone());
        prop_assert_eq!(a.trace(), (&a + &a.conj()).as_rat().unwrap().clone());
    }

    #[test]
    fn quad_square_roots(r in nonzero_rat(), d in prop::sample::select(vec![2i64, 3, 5, -1, -3])) {
        let q = QuadVal::new(Rat::zero(), r.clone(), &Rat::from(d));
        let sq = q.square();
        prop_assert!(sq.is_rational());
        let back = sq.sqrt().unwrap();
        prop_assert!(back == q || back == -q.clone());
    }
}

#[test]
fn quad_canonical_form() {
    let a = QuadVal::new(Rat::zero(), Rat::from(2), &Rat::from(8));
    let b = QuadVal::new(Rat::zero(), Rat::from(4), &Rat::from(2));
    assert_eq!(a, b);
    assert_eq!(a.radicand(), &2);
    assert_eq!(a.radical_coeff(), &Rat::from(4));
    let c = QuadVal::new(Rat::from(1), Rat::from(3), &Rat::from(9));
    assert_eq!(c, QuadVal::from_int(10));
    let d = QuadVal::new(Rat::zero(), Rat::one(), &Rat::new(1, 2).unwrap());
    assert_eq!(d, QuadVal::new(Rat::zero(), Rat::new(1, 2).unwrap(), &Rat::from(2)));
}

/// One step of a chain mixing all ball operations with bounded growth.
fn step(x: &BigReal, op: u8, y: &BigReal) -> BigReal {
    match op % 6 {
        0 => x + y,
        1 => x - y,
        2 => x * y,
        3 => x / y,
        4 => (&x.abs() + y).sqrt(),
        _ => (&(&x.square() + &BigReal::one(x.working_digits())).ln() + y).set_prec_digits(x.working_digits()),
    }
}

fn run_chain(ops: &[(u8, i64, i64)], digits: u32) -> BigReal {
    let mut x = BigReal::from_int(1, digits);
    for &(op, n, d) in ops {
        let y = BigReal::from_rat(&Rat::new(n, d).unwrap(), digits);
        x = step(&x, op, &y);
        // keep magnitudes moderate so that cancellation, not overflow, dominates
        if x.to_f64().abs() > 1e6 {
            x = &x / &BigReal::from_int(1_000_000, digits);
        }
    }
    x
}

fn chain() -> impl Strategy<Value = Vec<(u8, i64, i64)>> {
    prop::collection::vec((0u8..6, 1i64..=50, 1i64..=50), 100..2000)
}

fn enclosed(lo: &BigReal, hi: &BigReal) {
    assert!(lo.is_finite() && hi.is_finite());
    let diff = (lo - hi).abs();
    let budget = lo.rad_f64() + hi.rad_f64();
    assert!(diff.to_f64() <= budget, "|{} - {}| > {budget}", lo.to_decimal(30), hi.to_decimal(30));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ball_error_is_honest(ops in chain()) {
        let lo = run_chain(&ops, 30);
        let hi = run_chain(&ops, 60);
        enclosed(&lo, &hi);
    }
}

#[test]
fn long_chain_error_is_honest() {
    let ops: Vec<(u8, i64, i64)> = (0..10_000u32)
        .map(|i| ((i * 7 % 6) as u8, (i % 37 + 1) as i64, (i % 23 + 1) as i64))
        .collect();
    let lo = run_chain(&ops, 30);
    let hi = run_chain(&ops, 60);
    enclosed(&lo, &hi);
}
