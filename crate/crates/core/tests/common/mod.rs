#![allow(dead_code)]

use forge_core::poly::{rat, BivariatePoly, HomogeneousPoly, Rational};
use num_traits::Zero;
use forge_core::FamilySpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn small_nonzero(r: &mut ChaCha8Rng) -> i64 {
    let v = r.random_range(1..=9);
    if r.random_bool(0.5) {
        -v
    } else {
        v
    }
}

/// `a/b` with `a, b` drawn from `[-9, 9] \ {0}`.
pub fn nonzero_rational(r: &mut ChaCha8Rng) -> Rational {
    rat(small_nonzero(r), small_nonzero(r))
}

/// Zero about a quarter of the time, otherwise [`nonzero_rational`].
pub fn sparse_rational(r: &mut ChaCha8Rng) -> Rational {
    if r.random_bool(0.25) {
        rat(0, 1)
    } else {
        nonzero_rational(r)
    }
}

pub fn random_triangular(r: &mut ChaCha8Rng, k: usize) -> FamilySpec {
    let mut c: Vec<Rational> = (2..k).map(|_| sparse_rational(r)).collect();
    c.push(nonzero_rational(r));
    FamilySpec::triangular(c, sparse_rational(r))
}

pub fn random_qshear(r: &mut ChaCha8Rng, m: usize) -> FamilySpec {
    let mut beta: Vec<Rational> = (1..m).map(|_| sparse_rational(r)).collect();
    beta.push(nonzero_rational(r));
    FamilySpec::qshear(nonzero_rational(r), beta, sparse_rational(r))
}

/// Random homogeneous form of degree `d` with the given chance of each coefficient being zero.
pub fn random_form(r: &mut ChaCha8Rng, d: u32) -> HomogeneousPoly {
    let p = BivariatePoly::from_terms((0..=d).map(|j| (d - j, j, sparse_rational(r))));
    HomogeneousPoly::new(p, d).unwrap()
}

pub fn random_nonzero_form(r: &mut ChaCha8Rng, d: u32) -> HomogeneousPoly {
    loop {
        let f = random_form(r, d);
        if !f.is_zero() {
            return f;
        }
    }
}

/// Dense random polynomial of total degree at most `d`.
pub fn random_poly(r: &mut ChaCha8Rng, d: u32) -> BivariatePoly {
    BivariatePoly::from_terms(
        (0..=d).flat_map(|t| (0..=t).map(move |j| (t - j, j))).map(|(i, j)| (i, j, sparse_rational(r))).collect::<Vec<_>>(),
    )
}

/// Coefficient of `x^(n-j) y^j` in a form of degree `n`.
pub fn form_coeff(p: &BivariatePoly, n: u32, j: u32) -> Rational {
    p.coeff(n - j, j)
}

/// `a_j = (h_j - beta (j+1) a_{j+1}) / (d+1-j)` from the top coefficient down,
/// where `a_j` is the coefficient of `x^(d+1-j) y^j` and `a_{d+1} = 0`.
pub fn transport_by_recurrence(beta: &Rational, h: &HomogeneousPoly) -> BivariatePoly {
    let d = h.degree();
    let mut a = vec![Rational::zero(); d as usize + 2];
    for j in (0..=d).rev() {
        let hj = form_coeff(h.poly(), d, j);
        let next = &a[j as usize + 1] * beta * Rational::from_integer((j + 1).into());
        a[j as usize] = (hj - next) / Rational::from_integer((d + 1 - j).into());
    }
    BivariatePoly::from_terms(a.into_iter().enumerate().map(|(j, c)| (d + 1 - j as u32, j as u32, c)))
}
