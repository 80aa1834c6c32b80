//! Acceptance suite. Each criterion runs at its stated tolerance and time
//! limit and prints one PASS/FAIL line; the process fails if any does.

use std::time::{Duration, Instant};

use mcycle::arith::{quad_solve, recognize_algebraic, BigComplex, BigReal, QuadVal, Rat, UniPoly};
use mcycle::cycle::{blowup_data, conjugate_swap, regulator_h4, regulator_h4_quad, regulator_with_data};
use mcycle::geometry::{conic_line_meet, conic_through_5, is_tangent, restricted_discriminant_numeric, Conic, ProjLine};
use mcycle::greens::{
    green_k, hecke_green, hecke_green_direct, legendre_q, legendre_q1_closed, Mat2, TruncationPolicy, UHPoint,
};
use mcycle::kummer::{
    build_config, bw_cases, h5_roots_a3, humbert5_coeffs, humbert5_coeffs_printed, humbert5_conic,
    humbert5_discriminant, BWCase, CaseLabel, ModuliParams,
};
use mcycle::ns::{cm_cycle, cm_z, humbert_norm, ns_pair, sigma_star, EndElt, HomModule, NSClass};
use mcycle::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err(e: Error) -> String {
    format!("unexpected error: {e}")
}

fn r(n: i64, d: i64) -> Rat {
    Rat::new(n, d).unwrap()
}

fn conic_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_c0de);
    let mut done = 0;
    let mut tries = 0;
    while done < 200 {
        tries += 1;
        let mut q = || r(rng.gen_range(-60..=60), rng.gen_range(1..=25));
        let (a1, a2, a3) = (q(), q(), q());
        let Ok(p) = ModuliParams::from_rats(a1, a2, a3) else { continue };
        let det = conic_through_5(&build_config(&p).map_err(err)?.humbert5_points()).map_err(err)?;
        let closed = Conic::new(humbert5_coeffs(&p.a1, &p.a2, &p.a3)).map_err(err)?;
        ensure(closed.proj_eq(&det), format!("closed form differs at {p:?}"))?;
        done += 1;
    }
    Ok(format!("200 random points agree ({tries} draws)"))
}

/// Exact `a3` when a numeric root is quadratic over Q.
fn exact_quadratic_root(x: &BigReal) -> Option<QuadVal> {
    let poly = recognize_algebraic(x, 2, 1_000_000).ok()??;
    if poly.degree() != Some(2) {
        return None;
    }
    let c = poly.coeffs();
    let (u, v) = quad_solve(&c[2], &c[1], &c[0]).ok()?;
    [u, v]
        .into_iter()
        .find(|q| q.to_real(80).is_some_and(|q| (&q - x).abs().to_f64() < 1e-40))
}

fn tangency() -> Outcome {
    const DIGITS: u32 = 60;
    let l6 = ProjLine::from_ints(0, 0, 1).unwrap();
    let tol = BigReal::from_f64(1e-40, DIGITS);
    let candidates = [(2, 3), (3, 5), (-2, 3), (5, 2), (2, -1), (7, 3), (3, -2), (-3, 5), (4, 7), (-1, 4)];
    let mut pairs = Vec::new();
    let (mut roots_checked, mut exact) = (0, 0);
    for (a1, a2) in candidates {
        let (a1, a2) = (Rat::from(a1), Rat::from(a2));
        let roots = h5_roots_a3(&a1, &a2, &Rat::from(-200), &Rat::from(200), DIGITS);
        if roots.is_empty() || pairs.len() == 6 {
            continue;
        }
        let (b1, b2) = (BigReal::from_rat(&a1, DIGITS), BigReal::from_rat(&a2, DIGITS));
        for root in &roots {
            let d = restricted_discriminant_numeric(&humbert5_coeffs(&b1, &b2, root), &l6).map_err(err)?;
            ensure(d.abs().definitely_lt(&tol), format!("({a1}, {a2}, {root}): discriminant {d}"))?;
            roots_checked += 1;
            if let Some(q) = exact_quadratic_root(root) {
                let p = ModuliParams::new(QuadVal::from_rat(a1.clone()), QuadVal::from_rat(a2.clone()), q).map_err(err)?;
                let c = humbert5_conic(&p).map_err(err)?;
                ensure(is_tangent(&c, &l6).map_err(err)?, "exact root not tangent")?;
                exact += 1;
            }
        }
        // a generic rational a3 next to the root
        let a3 = Rat::parse(&roots[0].to_decimal(4)).unwrap() + r(1, 7);
        let p = ModuliParams::from_rats(a1.clone(), a2.clone(), a3).map_err(err)?;
        let c = humbert5_conic(&p).map_err(err)?;
        ensure(!is_tangent(&c, &l6).map_err(err)?, "generic point reported tangent")?;
        ensure(!humbert5_discriminant(&p).map_err(err)?.is_zero(), "generic discriminant vanishes")?;
        match conic_line_meet(&c, &l6) {
            Ok((s1, s2)) => ensure(s1 != s2, "generic s6 points coincide")?,
            Err(Error::LeavesQuadraticClosure(_)) => {}
            Err(e) => return Err(err(e)),
        }
        pairs.push((a1, a2));
    }
    ensure(pairs.len() == 6 && pairs[0] == (Rat::from(2), Rat::from(3)), format!("only {} usable pairs", pairs.len()))?;
    Ok(format!("{} pairs, {roots_checked} roots below 1e-40, {exact} also tangent exactly", pairs.len()))
}

fn bw_table() -> Outcome {
    let five = BWCase {
        case_label: CaseLabel::I,
        m: 1,
        k: Some(6),
        delta: 5,
        degree: 2,
        num_torsion_points: 5,
    };
    let four = BWCase {
        case_label: CaseLabel::V,
        m: 2,
        k: None,
        delta: 4,
        degree: 1,
        num_torsion_points: 3,
    };
    ensure(bw_cases(5).contains(&five), "Δ = 5 conic row missing")?;
    ensure(bw_cases(4).contains(&four), "Δ = 4 line row missing")?;
    Ok("both rows present".into())
}

fn humbert_norms() -> Outcome {
    for n in 2..=10i64 {
        let g = NSClass::graph(EndElt::isogeny(Rat::one(), (n - 1) as u64).map_err(err)?);
        ensure(humbert_norm(&g).map_err(err)? == Rat::from(n * n), format!("H(Γ) wrong for n = {n}"))?;
    }
    let z = HomModule::Zero;
    ensure(humbert_norm(&NSClass::f1(z)).map_err(err)? == Rat::one(), "H(f1) != 1")?;
    ensure(humbert_norm(&NSClass::theta(z)).map_err(err)?.is_zero(), "H(Θ) != 0")?;
    Ok("n = 2..10, f1, Θ".into())
}

fn cm_lattice() -> Outcome {
    const DIGITS: u32 = 60;
    for d in [-3i64, -4, -7, -8, -11] {
        let m = HomModule::Cm { disc: d };
        let z = cm_z(d).map_err(err)?;
        ensure(z == NSClass::new(Rat::zero(), Rat::zero(), EndElt::cm(Rat::zero(), Rat::one(), d).unwrap()), "Z shape")?;
        let g1 = NSClass::graph(EndElt::cm(Rat::one(), Rat::zero(), d).unwrap());
        for b in [NSClass::f1(m), NSClass::f2(m), g1] {
            ensure(ns_pair(&z, &b).map_err(err)?.is_zero(), format!("Z not orthogonal, D = {d}"))?;
        }
        let s = z.sub(&sigma_star(&z)).map_err(err)?;
        ensure(ns_pair(&s, &s).map_err(err)? == Rat::from(-8 * d.abs()), format!("(Z - σ*Z)², D = {d}"))?;
        let graphs = NSClass::graph(EndElt::cm(Rat::zero(), Rat::one(), d).unwrap())
            .sub(&NSClass::graph(EndElt::cm(Rat::zero(), Rat::from(-1), d).unwrap()))
            .map_err(err)?;
        ensure(graphs == s, format!("graph difference, D = {d}"))?;
        let (cyc, c) = cm_cycle(d, DIGITS).map_err(err)?;
        ensure(cyc == s, "cm_cycle class")?;
        let normalized = &c.square() * &BigReal::from_rat(&ns_pair(&s, &s).unwrap(), DIGITS);
        let e = (&normalized + &BigReal::one(DIGITS)).abs().to_f64();
        ensure(e < 1e-50, format!("(S, S) + 1 = {e:e}, D = {d}"))?;
    }
    Ok("D in {-3, -4, -7, -8, -11}".into())
}

fn legendre() -> Outcome {
    let mut worst = 0.0f64;
    for t in [r(3, 2), Rat::from(2), Rat::from(3), Rat::from(10)] {
        let tb = BigReal::from_rat(&t, 40);
        let q = legendre_q(&BigReal::from_int(2, 40), &tb, 40).map_err(err)?;
        let e = (&q - &legendre_q1_closed(&tb.set_prec_digits(80))).abs().to_f64();
        ensure(e < 1e-30, format!("t = {t}: {e:e}"))?;
        worst = worst.max(e);
    }
    let mut resid = 0.0f64;
    for t in [r(3, 2), Rat::from(2), Rat::from(3), Rat::from(10)] {
        let tb = BigReal::from_rat(&t, 40);
        let q: Vec<BigReal> = (1..=6)
            .map(|s| legendre_q(&BigReal::from_int(s, 40), &tb, 40))
            .collect::<mcycle::Result<_>>()
            .map_err(err)?;
        let k = |x: usize| BigReal::from_int(x as i64, 40);
        for n in 1..5 {
            let res = &(&(&k(n + 1) * &q[n + 1]) - &(&(&k(2 * n + 1) * &tb) * &q[n])) + &(&k(n) * &q[n - 1]);
            resid = resid.max(res.abs().to_f64() / q[n].abs().to_f64().max(1.0));
        }
    }
    ensure(resid < 1e-28, format!("recurrence residual {resid:e}"))?;
    Ok(format!("closed form {worst:.1e}, recurrence {resid:.1e}"))
}

const SAMPLE_PAIRS: [((i64, i64, i64, i64), (i64, i64, i64, i64)); 5] = [
    ((0, 1, 2, 1), (1, 2, 2, 1)),
    ((3, 10, 17, 10), (-1, 5, 11, 10)),
    ((1, 10, 1, 1), (9, 20, 3, 1)),
    ((-2, 5, 6, 5), (1, 4, 9, 10)),
    ((1, 3, 5, 4), (-1, 7, 5, 2)),
];

fn sample_point(p: (i64, i64, i64, i64)) -> UHPoint {
    UHPoint::from_rats(&r(p.0, p.1), &r(p.2, p.3), 40).unwrap()
}

fn greens_invariance() -> Outcome {
    let gammas = [Mat2::new(2, 1, 1, 1), Mat2::new(1, 3, 0, 1), Mat2::new(5, -2, 3, -1), Mat2::new(0, -1, 1, 4), Mat2::new(7, 3, 2, 1)];
    let p500 = TruncationPolicy::with_bound(500);
    let p1000 = TruncationPolicy::with_bound(1000);
    let mut worst = 0.0f64;
    for (i, (a, b)) in SAMPLE_PAIRS.iter().enumerate() {
        let (z1, z2) = (sample_point(*a), sample_point(*b));
        let g = green_k(2, &z1, &z2, &p500).map_err(err)?;
        let moved = green_k(2, &gammas[i].apply(&z1).map_err(err)?, &z2, &p500).map_err(err)?;
        let swapped = green_k(2, &z2, &z1, &p500).map_err(err)?;
        let doubled = green_k(2, &z1, &z2, &p1000).map_err(err)?;
        let d_inv = (g.value_f64() - moved.value_f64()).abs();
        let d_sym = (g.value_f64() - swapped.value_f64()).abs();
        let d_dbl = (g.value_f64() - doubled.value_f64()).abs();
        ensure(d_inv <= g.error_budget() + moved.error_budget(), format!("pair {i}: Γ shift {d_inv:e}"))?;
        ensure(d_sym <= g.error_budget() + swapped.error_budget(), format!("pair {i}: symmetry {d_sym:e}"))?;
        ensure(
            d_dbl < g.tail_f64(),
            format!("pair {i}: doubling moved {d_dbl:e}, tail {:e}", g.tail_f64()),
        )?;
        worst = worst.max(d_dbl / g.tail_f64());
    }
    Ok(format!("5 pairs, doubling change at most {:.0}% of the tail", 100.0 * worst))
}

fn hecke() -> Outcome {
    let policy = TruncationPolicy::with_bound(500);
    let (z1, z2) = (sample_point(SAMPLE_PAIRS[1].0), sample_point(SAMPLE_PAIRS[1].1));
    let g = green_k(2, &z1, &z2, &policy).map_err(err)?;
    let h1 = hecke_green(2, 1, &z1, &z2, &policy).map_err(err)?;
    let d1 = (g.value_f64() - h1.value_f64()).abs();
    ensure(d1 <= g.value.rad_f64() + h1.value.rad_f64(), format!("m = 1 differs by {d1:e}"))?;
    let cos = hecke_green(2, 2, &z1, &z2, &policy).map_err(err)?;
    let dir = hecke_green_direct(2, 2, &z1, &z2, &policy).map_err(err)?;
    let d2 = (cos.value_f64() - dir.value_f64()).abs();
    let budget = cos.error_budget() + dir.error_budget();
    ensure(d2 <= budget, format!("m = 2 cosets vs direct {d2:e} > {budget:e}"))?;
    Ok(format!("m = 1 diff {d1:e}; m = 2 diff {d2:.2e} within {budget:.2e}"))
}

fn regulator() -> Outcome {
    let (a1, a3) = (Rat::from(2), Rat::from(3));
    let p = ModuliParams::on_h4(QuadVal::from_int(2), QuadVal::from_int(3)).map_err(err)?;
    let a13 = &a1 * &a3;
    let a_formula = Rat::from(4) * a13.square() * (&a1 - &a13);
    let corrected = &humbert5_coeffs(&p.a1, &p.a2, &p.a3)[0];
    let printed = &humbert5_coeffs_printed(&p.a1, &p.a2, &p.a3)[0];
    let minus576 = QuadVal::from_int(-576);
    ensure(
        QuadVal::from_rat(a_formula) == minus576 && *corrected == minus576 && *printed == minus576,
        "A != -576",
    )?;

    let r50 = regulator_h4(&a1, &a3, 50, false).map_err(err)?;
    let r100 = regulator_h4(&a1, &a3, 100, false).map_err(err)?;
    let rel = (&r50.ratio - &r100.ratio).abs().to_f64() / r100.ratio.abs().to_f64();
    ensure(rel < 1e-45, format!("50 vs 100 digits: relative {rel:e}"))?;

    let d = blowup_data(&p, 50).map_err(err)?;
    for k in [r(7, 1), r(-3, 11), r(1, 1000)] {
        let mut scaled = d.clone();
        scaled.norm_const = scaled.norm_const.scale(&k);
        let rs = regulator_with_data(&p, &scaled, 50, false).map_err(err)?;
        let e = (&rs.ratio - &r50.ratio).abs().to_f64() / r50.ratio.abs().to_f64();
        ensure(e < 1e-45, format!("norm_const × {k}: relative change {e:e}"))?;
    }

    let s = conjugate_swap(&r50);
    let e = (&(&r50.ratio * &s.ratio) - &BigComplex::one(60)).abs().to_f64();
    ensure(e < 1e-45, format!("R · swap(R) - 1 = {e:e}"))?;

    let a3h5 = QuadVal::new(r(11, 9), r(2, 9), &Rat::from(10));
    let h5 = ModuliParams::on_h4(QuadVal::from_int(2), a3h5.clone()).map_err(err)?;
    ensure(humbert5_discriminant(&h5).map_err(err)?.is_zero(), "H5 sample is not on the locus")?;
    ensure(
        matches!(regulator_h4_quad(&QuadVal::from_int(2), &a3h5, 50, false), Err(Error::OnH5Locus)),
        "H5 point not rejected",
    )?;
    Ok(format!("A = -576; 50/100 digits agree to {rel:.1e}; swap {e:.1e}"))
}

fn recognition() -> Outcome {
    let five = BigReal::from_int(5, 60);
    let phi = &(&BigReal::one(60) + &five.sqrt()) / &BigReal::from_int(2, 60);
    let got = recognize_algebraic(&phi, 4, 100).map_err(err)?;
    let want = UniPoly::from_ints(&[-1, -1, 1]).primitive();
    ensure(got.as_ref().map(|p| p.primitive()) == Some(want), format!("golden ratio gave {got:?}"))?;
    let pi = recognize_algebraic(&BigReal::pi(60), 4, 100).map_err(err)?;
    ensure(pi.is_none(), format!("π recognized as {pi:?}"))?;
    Ok("x² - x - 1 found; π rejected".into())
}

fn main() {
    let criteria: [(&str, u64, fn() -> Outcome); 10] = [
        ("conic oracle equivalence", 10, conic_oracle),
        ("tangency iff discriminant", 5, tangency),
        ("rational-curve table", 1, bw_table),
        ("Humbert norms", 1, humbert_norms),
        ("CM-cycle lattice", 1, cm_lattice),
        ("Legendre Q", 10, legendre),
        ("Green's function invariance", 120, greens_invariance),
        ("Hecke consistency", 120, hecke),
        ("regulator pipeline", 30, regulator),
        ("recognition sanity", 10, recognition),
    ];
    let mut failed = 0;
    for (name, limit, f) in criteria {
        let start = Instant::now();
        let outcome = f();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if took > Duration::from_secs(limit) => Err(format!("{detail}; over the time limit")),
            o => o,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!("{tag} {name} [{:.2}s / {limit}s] {detail}", took.as_secs_f64());
        if outcome.is_err() {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
