//! Exact LLL reduction of integer lattice bases.

use rug::ops::DivRounding;
use rug::{Integer, Rational};

fn dot(a: &[Integer], b: &[Integer]) -> Integer {
    let mut s = Integer::new();
    for (x, y) in a.iter().zip(b) {
        s += x * y;
    }
    s
}

fn round_rational(r: &Rational) -> Integer {
    // nearest integer, halves rounded toward +inf
    let (num, den) = (r.numer(), r.denom());
    let twice = Integer::from(num * 2) + den;
    twice.div_floor(Integer::from(den * 2))
}

/// LLL-reduces the rows of `basis` in place with parameter δ = 3/4.
/// Rows must be linearly independent.
pub fn lll_reduce(basis: &mut [Vec<Integer>]) {
    let n = basis.len();
    if n < 2 {
        return;
    }
    let delta = Rational::from((3, 4));
    let half = Rational::from((1, 2));
    let mut mu = vec![vec![Rational::new(); n]; n];
    let mut bb = vec![Rational::new(); n];
    bb[0] = Rational::from(dot(&basis[0], &basis[0]));
    let mut k = 1;
    let mut kmax = 0;

    let reduce = |basis: &mut [Vec<Integer>], mu: &mut [Vec<Rational>], k: usize, l: usize| {
        if mu[k][l].clone().abs() > half {
            let q = round_rational(&mu[k][l]);
            let (lo, hi) = basis.split_at_mut(k);
            for (x, y) in hi[0].iter_mut().zip(&lo[l]) {
                *x -= &q * y;
            }
            let qr = Rational::from(&q);
            mu[k][l] -= &qr;
            for i in 0..l {
                let t = Rational::from(&qr * &mu[l][i]);
                mu[k][i] -= t;
            }
        }
    };

    while k < n {
        if k > kmax {
            kmax = k;
            for j in 0..k {
                let mut s = Rational::from(dot(&basis[k], &basis[j]));
                for i in 0..j {
                    s -= Rational::from(&mu[j][i] * &mu[k][i]) * &bb[i];
                }
                mu[k][j] = s / &bb[j];
            }
            let mut s = Rational::from(dot(&basis[k], &basis[k]));
            for j in 0..k {
                s -= mu[k][j].clone().square() * &bb[j];
            }
            bb[k] = s;
        }
        reduce(basis, &mut mu, k, k - 1);
        let lovasz = Rational::from(&delta - &mu[k][k - 1].clone().square()) * &bb[k - 1];
        if bb[k] < lovasz {
            basis.swap(k, k - 1);
            for j in 0..k - 1 {
                let t = mu[k][j].clone();
                mu[k][j] = mu[k - 1][j].clone();
                mu[k - 1][j] = t;
            }
            let m = mu[k][k - 1].clone();
            let b = Rational::from(&bb[k] + &(m.clone().square() * &bb[k - 1]));
            mu[k][k - 1] = Rational::from(&m * &bb[k - 1]) / &b;
            bb[k] = Rational::from(&bb[k - 1] * &bb[k]) / &b;
            bb[k - 1] = b;
            for i in k + 1..=kmax {
                let t = mu[i][k].clone();
                mu[i][k] = Rational::from(&mu[i][k - 1] - &Rational::from(&m * &t));
                mu[i][k - 1] = t + Rational::from(&mu[k][k - 1] * &mu[i][k]);
            }
            k = (k - 1).max(1);
        } else {
            for l in (0..k - 1).rev() {
                reduce(basis, &mut mu, k, l);
            }
            k += 1;
        }
    }
}
