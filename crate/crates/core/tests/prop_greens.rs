use std::collections::BTreeMap;

use mcycle::arith::{BigReal, Rat};
use mcycle::greens::{
    green_k, greens_combo, hecke_green, hecke_green_direct, legendre_q, legendre_q_f64, GreensValue, Mat2,
    PrincipalPart, TruncationPolicy, UHPoint,
};
use proptest::prelude::*;

fn point() -> impl Strategy<Value = (f64, f64)> {
    (-0.5f64..0.5, 0.4f64..2.5)
}

fn pair() -> impl Strategy<Value = (UHPoint, UHPoint)> {
    (point(), point())
        .prop_filter("too close to the diagonal", |((x1, y1), (x2, y2))| (x1 - x2).hypot(y1 - y2) > 0.05)
        .prop_map(|((x1, y1), (x2, y2))| (UHPoint::from_f64(x1, y1).unwrap(), UHPoint::from_f64(x2, y2).unwrap()))
}

fn close(a: &GreensValue, b: &GreensValue) -> bool {
    (a.value_f64() - b.value_f64()).abs() <= a.error_budget() + b.error_budget()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn tail_estimate_covers_refinement((z1, z2) in pair()) {
        let Ok(coarse) = green_k(2, &z1, &z2, &TruncationPolicy::with_bound(100)) else { return Ok(()) };
        let fine = green_k(2, &z1, &z2, &TruncationPolicy::with_bound(400)).unwrap();
        let change = (coarse.value_f64() - fine.value_f64()).abs();
        prop_assert!(change <= coarse.tail_f64() + coarse.value.rad_f64() + fine.value.rad_f64(),
            "change {} vs tail {}", change, coarse.tail_f64());
        prop_assert!(fine.tail_f64() < coarse.tail_f64());
    }

    #[test]
    fn invariant_under_the_modular_group((z1, z2) in pair(), n in -3i64..=3) {
        let p = TruncationPolicy::with_bound(80);
        let Ok(g) = green_k(2, &z1, &z2, &p) else { return Ok(()) };
        let gamma = Mat2::new(2, 1, 1, 1).mul(&Mat2::translation(n));
        let moved = green_k(2, &gamma.apply(&z1).unwrap(), &z2, &p).unwrap();
        // same truncated sum up to the rounding of the reduced point
        let diff = (g.value_f64() - moved.value_f64()).abs();
        prop_assert!(diff <= g.value.rad_f64() + moved.value.rad_f64() + 1e-12 * g.value_f64().abs(), "{}", diff);
        let swapped = green_k(2, &z2, &z1, &p).unwrap();
        prop_assert_eq!(g.value_f64().to_bits(), swapped.value_f64().to_bits());
    }

    #[test]
    fn independent_of_thread_partitioning((z1, z2) in pair(), threads in 1usize..=4) {
        let p = TruncationPolicy::with_bound(80);
        let Ok(a) = green_k(3, &z1, &z2, &p) else { return Ok(()) };
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let b = pool.install(|| green_k(3, &z1, &z2, &p)).unwrap();
        prop_assert_eq!(a.value, b.value);
        prop_assert_eq!(a.terms_summed, b.terms_summed);
    }

    #[test]
    fn hecke_cosets_match_direct_sum((z1, z2) in pair(), m in 2u64..=3) {
        let p = TruncationPolicy::with_bound(200);
        let Ok(cosets) = hecke_green(2, m, &z1, &z2, &p) else { return Ok(()) };
        let direct = hecke_green_direct(2, m, &z1, &z2, &p).unwrap();
        prop_assert!(close(&cosets, &direct), "{} vs {}", cosets.value_f64(), direct.value_f64());
    }

    #[test]
    fn combo_is_linear((z1, z2) in pair(), c1 in -5i64..=5, c2 in -5i64..=5) {
        let p = TruncationPolicy::with_bound(60);
        let part = |c: BTreeMap<u64, Rat>| PrincipalPart::new(c).unwrap();
        let f = part(BTreeMap::from([(1, Rat::one()), (2, Rat::new(-1, 2).unwrap())]));
        let g = part(BTreeMap::from([(2, Rat::from(3)), (3, Rat::one())]));
        let mut sum = BTreeMap::new();
        for (m, c) in f.coeffs() {
            *sum.entry(*m).or_insert(Rat::zero()) += &(c * &Rat::from(c1));
        }
        for (m, c) in g.coeffs() {
            *sum.entry(*m).or_insert(Rat::zero()) += &(c * &Rat::from(c2));
        }
        if sum.values().all(Rat::is_zero) {
            return Ok(());
        }
        let Ok(gf) = greens_combo(&f, 1, &z1, &z2, &p) else { return Ok(()) };
        let gg = greens_combo(&g, 1, &z1, &z2, &p).unwrap();
        let gs = greens_combo(&part(sum), 1, &z1, &z2, &p).unwrap();
        let expected = c1 as f64 * gf.value_f64() + c2 as f64 * gg.value_f64();
        let err = gs.value.rad_f64() + (c1.abs() as f64) * gf.value.rad_f64() + (c2.abs() as f64) * gg.value.rad_f64();
        prop_assert!((gs.value_f64() - expected).abs() <= err + 1e-12 * expected.abs());
    }
}

#[test]
fn legendre_positive_and_decreasing() {
    let ts = [1.01, 1.1, 1.5, 2.0, 3.0, 5.0, 10.0, 20.0];
    for s in [1.5, 2.0, 3.0, 5.0] {
        let sb = BigReal::from_f64(s, 20);
        let vals: Vec<BigReal> = ts
            .iter()
            .map(|&t| legendre_q(&sb, &BigReal::from_f64(t, 20), 20).unwrap())
            .collect();
        for v in &vals {
            assert_eq!(v.sign(), Some(std::cmp::Ordering::Greater), "Q_{s} not positive");
        }
        for w in vals.windows(2) {
            assert!(w[1].definitely_lt(&w[0]), "Q_{s} not decreasing");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn legendre_f64_positive_and_decreasing(n in 0u32..=6, tm1 in 1e-6f64..30.0, step in 1e-3f64..5.0) {
        let (a, _) = legendre_q_f64(n, tm1).unwrap();
        let (b, _) = legendre_q_f64(n, tm1 + step).unwrap();
        prop_assert!(a > 0.0 && b > 0.0);
        prop_assert!(b < a);
    }
}
