//! Exact sparse polynomials in two variables over the rationals.
//!
//! [`BivariatePoly`] stores a map from exponent pairs to nonzero [`Rational`]
//! coefficients, ordered graded-lexicographically with `x > y`. Every value is
//! immutable once built; arithmetic returns fresh polynomials.

mod float;
mod homogeneous;
mod parse;
pub mod rational;
mod univariate;

pub use float::{eval_float, FloatPoly};
pub use homogeneous::{gcd_homogeneous, primitive_root_homogeneous, radical_homogeneous, HomogeneousPoly};
pub use rational::{parse_rational, rat, Rational};
pub use univariate::UniPoly;

use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("invalid rational literal {0:?}")]
    BadRational(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("polynomial is not homogeneous of degree {0}")]
    NotHomogeneous(u32),
    #[error("expected a nonzero polynomial")]
    ZeroPolynomial,
    #[error("floating evaluation overflowed at ({x}, {y})")]
    NonFinite { x: f64, y: f64 },
}

/// Which variable a derivative is taken with respect to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
}

/// The monomial `x^x * y^y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub x: u32,
    pub y: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { x: 0, y: 0 };

    pub fn new(x: u32, y: u32) -> Self {
        Monomial { x, y }
    }

    pub fn degree(self) -> u32 {
        self.x + self.y
    }

    pub fn divides(self, other: Monomial) -> bool {
        self.x <= other.x && self.y <= other.y
    }
}

impl Ord for Monomial {
    // graded lex, x > y
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then(self.x.cmp(&other.x))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Mul for Monomial {
    type Output = Monomial;
    fn mul(self, rhs: Monomial) -> Monomial {
        Monomial::new(self.x + rhs.x, self.y + rhs.y)
    }
}

/// Total degree, with a distinct value for the zero polynomial.
///
/// `NegInfinity` sorts below every finite degree. It never takes part in
/// integer arithmetic; callers must match on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(u32),
}

impl Degree {
    pub fn finite(self) -> Option<u32> {
        match self {
            Degree::NegInfinity => None,
            Degree::Finite(d) => Some(d),
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInfinity => f.write_str("-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct BivariatePoly {
    terms: BTreeMap<Monomial, Rational>,
}

impl BivariatePoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn x() -> Self {
        Self::monomial(Rational::one(), 1, 0)
    }

    pub fn y() -> Self {
        Self::monomial(Rational::one(), 0, 1)
    }

    /// `c * x^i * y^j`; zero if `c` is zero.
    pub fn monomial(c: Rational, i: u32, j: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::new(i, j), c);
        }
        BivariatePoly { terms }
    }

    /// Builds a polynomial from `(i, j, coefficient)` triples, collecting like terms.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (u32, u32, Rational)>,
    {
        let mut acc = Accumulator::default();
        for (i, j, c) in terms {
            acc.add(Monomial::new(i, j), c);
        }
        acc.finish()
    }

    /// Univariate polynomial in `var`, coefficients in ascending order.
    pub fn univariate(var: Var, coeffs: &[Rational]) -> Self {
        Self::from_terms(coeffs.iter().enumerate().map(|(e, c)| match var {
            Var::X => (e as u32, 0, c.clone()),
            Var::Y => (0, e as u32, c.clone()),
        }))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&Monomial::ONE)
                .is_some_and(|c| c.is_one())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| *m == Monomial::ONE)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (Monomial, &Rational)> + '_ {
        self.terms.iter().map(|(m, c)| (*m, c))
    }

    pub fn coeff(&self, i: u32, j: u32) -> Rational {
        self.terms
            .get(&Monomial::new(i, j))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(0, 0)
    }

    pub fn degree(&self) -> Degree {
        match self.terms.keys().next_back() {
            Some(m) => Degree::Finite(m.degree()),
            None => Degree::NegInfinity,
        }
    }

    /// Largest exponent of `var` among stored terms (0 for the zero polynomial).
    pub fn degree_in(&self, var: Var) -> u32 {
        self.terms
            .keys()
            .map(|m| match var {
                Var::X => m.x,
                Var::Y => m.y,
            })
            .max()
            .unwrap_or(0)
    }

    pub fn leading_term(&self) -> Option<(Monomial, &Rational)> {
        self.terms.iter().next_back().map(|(m, c)| (*m, c))
    }

    /// The part of `self` made of terms of total degree `d`.
    pub fn homogeneous_component(&self, d: u32) -> Self {
        BivariatePoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|m| m.degree());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        BivariatePoly {
            terms: self.terms.iter().map(|(m, a)| (*m, a * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Formal partial derivative.
    pub fn partial(&self, var: Var) -> Self {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let (e, dm) = match var {
                Var::X if m.x > 0 => (m.x, Monomial::new(m.x - 1, m.y)),
                Var::Y if m.y > 0 => (m.y, Monomial::new(m.x, m.y - 1)),
                _ => continue,
            };
            terms.insert(dm, c * Rational::from_integer(e.into()));
        }
        BivariatePoly { terms }
    }

    /// Antiderivative in `var` with no added constant: every term gains one power of `var`.
    pub fn integrate(&self, var: Var) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let (e, im) = match var {
                    Var::X => (m.x + 1, Monomial::new(m.x + 1, m.y)),
                    Var::Y => (m.y + 1, Monomial::new(m.x, m.y + 1)),
                };
                (im, c / Rational::from_integer(e.into()))
            })
            .collect();
        BivariatePoly { terms }
    }

    /// Coefficient rows by power of x: `rows[i]` holds the y-coefficients of `x^i`.
    fn rows_by_x(&self) -> Vec<Vec<(u32, &Rational)>> {
        let mut rows: Vec<Vec<(u32, &Rational)>> = vec![Vec::new(); self.degree_in(Var::X) as usize + 1];
        for (m, c) in &self.terms {
            rows[m.x as usize].push((m.y, c));
        }
        rows
    }

    /// `self(sub_x, sub_y)`, computed exactly.
    pub fn compose(&self, sub_x: &BivariatePoly, sub_y: &BivariatePoly) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let rows = self.rows_by_x();
        let max_y = self.degree_in(Var::Y) as usize;
        let mut y_pows = Vec::with_capacity(max_y + 1);
        y_pows.push(Self::one());
        for j in 1..=max_y {
            let next = &y_pows[j - 1] * sub_y;
            y_pows.push(next);
        }
        let row_value = |row: &[(u32, &Rational)]| {
            let mut acc = Accumulator::default();
            for (j, c) in row {
                acc.add_scaled(&y_pows[*j as usize], c);
            }
            acc.finish()
        };
        let mut iter = rows.iter().rev();
        let mut result = row_value(iter.next().expect("at least one row"));
        for row in iter {
            result = &(&result * sub_x) + &row_value(row);
        }
        result
    }

    pub fn eval_exact(&self, x: &Rational, y: &Rational) -> Rational {
        let rows = self.rows_by_x();
        let row_value = |row: &[(u32, &Rational)]| {
            let mut acc = Rational::zero();
            let mut expo = row.last().map_or(0, |(j, _)| *j);
            for (j, c) in row.iter().rev() {
                while expo > *j {
                    acc *= y;
                    expo -= 1;
                }
                acc += *c;
            }
            for _ in 0..expo {
                acc *= y;
            }
            acc
        };
        let mut result = Rational::zero();
        for row in rows.iter().rev() {
            result = result * x + row_value(row);
        }
        result
    }

    /// Division by a single divisor in graded-lex order: `self = q * d + r` with
    /// no term of `r` divisible by the leading monomial of `d`.
    ///
    /// # Panics
    /// If `d` is zero.
    pub fn div_rem(&self, d: &BivariatePoly) -> (Self, Self) {
        let (lm, lc) = d.leading_term().expect("division by zero polynomial");
        let lc_inv = lc.recip();
        let mut rem = self.clone();
        let mut quot = Accumulator::default();
        let mut out = BTreeMap::new();
        while let Some((m, c)) = rem.terms.iter().next_back().map(|(m, c)| (*m, c.clone())) {
            if lm.divides(m) {
                let qm = Monomial::new(m.x - lm.x, m.y - lm.y);
                let qc = &c * &lc_inv;
                rem = &rem - &d.mul_term(qm, &qc);
                quot.add(qm, qc);
            } else {
                rem.terms.remove(&m);
                out.insert(m, c);
            }
        }
        (quot.finish(), BivariatePoly { terms: out })
    }

    /// `self / d` when the division is exact.
    pub fn div_exact(&self, d: &BivariatePoly) -> Option<Self> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    fn mul_term(&self, m: Monomial, c: &Rational) -> Self {
        BivariatePoly {
            terms: self.terms.iter().map(|(k, a)| (*k * m, a * c)).collect(),
        }
    }

    /// Rescales so the graded-lex leading coefficient is 1. Zero stays zero.
    pub fn monic(&self) -> Self {
        match self.leading_term() {
            None => Self::zero(),
            Some((_, lc)) => self.scale(&lc.recip()),
        }
    }

    /// Human-oriented form, e.g. `x^2 - 3/2*y`. [`BivariatePoly::from_str`] reads it back.
    pub fn pretty(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (idx, neg) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            let mut factors = Vec::new();
            if !abs.is_one() || *m == Monomial::ONE {
                factors.push(abs.to_string());
            }
            for (name, e) in [("x", m.x), ("y", m.y)] {
                match e {
                    0 => {}
                    1 => factors.push(name.to_string()),
                    _ => factors.push(format!("{name}^{e}")),
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

/// Canonical serialization: graded-lex descending, `"1x^2y^0 + -3/2x^0y^1"`.
impl fmt::Display for BivariatePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            if idx > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{c}x^{}y^{}", m.x, m.y)?;
        }
        Ok(())
    }
}

impl std::str::FromStr for BivariatePoly {
    type Err = PolyError;

    /// Accepts the canonical form as well as ordinary expressions such as
    /// `(x + 2*y)^3 - 1/2 x y`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse::parse_poly(s)
    }
}

impl serde::Serialize for BivariatePoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for BivariatePoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl From<Rational> for BivariatePoly {
    fn from(c: Rational) -> Self {
        Self::constant(c)
    }
}

/// Sparse sum builder that prunes cancelled terms at the end.
#[derive(Default)]
pub(crate) struct Accumulator {
    terms: BTreeMap<Monomial, Rational>,
}

impl Accumulator {
    pub(crate) fn add(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        self.terms
            .entry(m)
            .and_modify(|a| *a += &c)
            .or_insert(c);
    }

    fn add_scaled(&mut self, p: &BivariatePoly, s: &Rational) {
        for (m, c) in &p.terms {
            self.add(*m, c * s);
        }
    }

    pub(crate) fn finish(mut self) -> BivariatePoly {
        self.terms.retain(|_, c| !c.is_zero());
        BivariatePoly { terms: self.terms }
    }
}

impl<'a> Add<&'a BivariatePoly> for &'a BivariatePoly {
    type Output = BivariatePoly;
    fn add(self, rhs: &BivariatePoly) -> BivariatePoly {
        let mut terms = self.terms.clone();
        for (m, c) in &rhs.terms {
            match terms.get_mut(m) {
                Some(a) => {
                    *a += c;
                    if a.is_zero() {
                        terms.remove(m);
                    }
                }
                None => {
                    terms.insert(*m, c.clone());
                }
            }
        }
        BivariatePoly { terms }
    }
}

impl<'a> Sub<&'a BivariatePoly> for &'a BivariatePoly {
    type Output = BivariatePoly;
    fn sub(self, rhs: &BivariatePoly) -> BivariatePoly {
        self + &(-rhs)
    }
}

impl Neg for &BivariatePoly {
    type Output = BivariatePoly;
    fn neg(self) -> BivariatePoly {
        BivariatePoly {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

impl<'a> Mul<&'a BivariatePoly> for &'a BivariatePoly {
    type Output = BivariatePoly;
    fn mul(self, rhs: &BivariatePoly) -> BivariatePoly {
        let (small, large) = if self.terms.len() <= rhs.terms.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut acc = Accumulator::default();
        for (ma, ca) in &small.terms {
            for (mb, cb) in &large.terms {
                acc.add(*ma * *mb, ca * cb);
            }
        }
        acc.finish()
    }
}

macro_rules! forward_owned {
    ($($tr:ident $method:ident),*) => {$(
        impl $tr<BivariatePoly> for BivariatePoly {
            type Output = BivariatePoly;
            fn $method(self, rhs: BivariatePoly) -> BivariatePoly {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a BivariatePoly> for BivariatePoly {
            type Output = BivariatePoly;
            fn $method(self, rhs: &BivariatePoly) -> BivariatePoly {
                (&self).$method(rhs)
            }
        }
        impl<'a> $tr<BivariatePoly> for &'a BivariatePoly {
            type Output = BivariatePoly;
            fn $method(self, rhs: BivariatePoly) -> BivariatePoly {
                self.$method(&rhs)
            }
        }
    )*};
}

forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for BivariatePoly {
    type Output = BivariatePoly;
    fn neg(self) -> BivariatePoly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> BivariatePoly {
        s.parse().unwrap()
    }

    #[test]
    fn add_examples() {
        assert!((p("x") + p("-x")).is_zero());
        assert_eq!(p("x + y") + p("y"), p("x + 2*y"));
        assert_eq!(p("x^2 + 1/2*y") + p("1/2*y"), p("x^2 + y"));
    }

    #[test]
    fn mul_examples() {
        assert!((p("x + y") * BivariatePoly::zero()).is_zero());
        assert_eq!(p("x + y") * p("x - y"), p("x^2 - y^2"));
        let q = p("y + 2*x^2");
        assert_eq!(&q * &q, p("y^2 + 4*x^2*y + 4*x^4"));
    }

    #[test]
    fn compose_examples() {
        assert_eq!(p("x^2 + y").compose(&p("x"), &p("y")), p("x^2 + y"));
        assert_eq!(p("y").compose(&p("x"), &p("y + x^2")), p("y + x^2"));
        assert_eq!(p("x*y").compose(&p("x + y^2"), &p("y")), p("x*y + y^3"));
    }

    #[test]
    fn partial_examples() {
        let q = p("y + 3*x^2");
        assert_eq!(q.partial(Var::X), p("6*x"));
        assert_eq!(q.partial(Var::Y), BivariatePoly::one());
        assert!(p("7").partial(Var::X).is_zero());
    }

    #[test]
    fn eval_exact_examples() {
        let q = p("x^2 + y");
        assert_eq!(q.eval_exact(&rat(0, 1), &rat(0, 1)), rat(0, 1));
        assert_eq!(q.eval_exact(&rat(2, 1), &rat(-4, 1)), rat(0, 1));
        assert_eq!(p("(x+y)^3").eval_exact(&rat(1, 2), &rat(1, 2)), rat(1, 1));
    }

    #[test]
    fn zero_has_sentinel_degree() {
        assert_eq!(BivariatePoly::zero().degree(), Degree::NegInfinity);
        assert!(Degree::NegInfinity < Degree::Finite(0));
        assert_eq!(p("3").degree(), Degree::Finite(0));
        assert_eq!(p("x^3*y + y^2").degree(), Degree::Finite(4));
    }

    #[test]
    fn canonical_text() {
        let q = p("x^2 - 3/2*y");
        assert_eq!(q.to_string(), "1x^2y^0 + -3/2x^0y^1");
        assert_eq!(q.to_string().parse::<BivariatePoly>().unwrap(), q);
        assert_eq!(BivariatePoly::zero().to_string(), "0");
        assert_eq!(q.pretty(), "x^2 - 3/2*y");
        assert_eq!(p("-x + 1").pretty(), "-x + 1");
    }

    #[test]
    fn exact_division() {
        let a = p("x^2 - y^2");
        assert_eq!(a.div_exact(&p("x + y")), Some(p("x - y")));
        assert_eq!(a.div_exact(&p("x + 2*y")), None);
        let (q, r) = p("x^2 + x*y + 1").div_rem(&p("x"));
        assert_eq!(q, p("x + y"));
        assert_eq!(r, p("1"));
    }

    #[test]
    fn integrate_inverts_partial() {
        let q = p("3*x^2*y + x*y^4 - 2");
        assert_eq!(q.integrate(Var::X).partial(Var::X), q);
        assert_eq!(q.integrate(Var::Y).partial(Var::Y), q);
    }
}
