//! Elementary shears and chains of them.
//!
//! Both families factor into shears `(x, y) -> (x + p(y), y)` and
//! `(x, y) -> (x, y + p(x))`. A shear is undone by negating `p`, so a chain is
//! inverted by reversing it and negating every factor. The chain also gives an
//! evaluation route that avoids the cancellation in the expanded polynomials.

use crate::poly::{BivariatePoly, Rational, Var};
use num_traits::{ToPrimitive, Zero};

/// Which coordinate a shear moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShearAxis {
    /// `(x, y) -> (x + p(y), y)`
    X,
    /// `(x, y) -> (x, y + p(x))`
    Y,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shear {
    pub axis: ShearAxis,
    /// Ascending coefficients of `p`.
    pub coeffs: Vec<Rational>,
}

impl Shear {
    pub fn new(axis: ShearAxis, coeffs: Vec<Rational>) -> Self {
        Shear { axis, coeffs }
    }

    pub fn inverse(&self) -> Shear {
        Shear {
            axis: self.axis,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    /// `(x + p(y), y)` or `(x, y + p(x))` as exact components.
    pub fn components(&self) -> (BivariatePoly, BivariatePoly) {
        match self.axis {
            ShearAxis::X => (
                BivariatePoly::x() + BivariatePoly::univariate(Var::Y, &self.coeffs),
                BivariatePoly::y(),
            ),
            ShearAxis::Y => (
                BivariatePoly::x(),
                BivariatePoly::y() + BivariatePoly::univariate(Var::X, &self.coeffs),
            ),
        }
    }

    /// Applies the shear to an exact map `(g1, g2)`, i.e. returns `shear ∘ g`.
    pub(crate) fn apply_exact(&self, g1: &BivariatePoly, g2: &BivariatePoly) -> (BivariatePoly, BivariatePoly) {
        let horner = |t: &BivariatePoly| {
            let mut acc = BivariatePoly::zero();
            for c in self.coeffs.iter().rev() {
                acc = &(&acc * t) + &BivariatePoly::constant(c.clone());
            }
            acc
        };
        match self.axis {
            ShearAxis::X => (g1 + &horner(g2), g2.clone()),
            ShearAxis::Y => (g1.clone(), g2 + &horner(g1)),
        }
    }
}

/// A map `s_k ∘ ... ∘ s_1`, stored in application order `[s_1, ..., s_k]`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ShearChain {
    shears: Vec<Shear>,
}

impl ShearChain {
    pub fn new(shears: Vec<Shear>) -> Self {
        ShearChain { shears }
    }

    pub fn shears(&self) -> &[Shear] {
        &self.shears
    }

    pub fn inverse(&self) -> ShearChain {
        ShearChain {
            shears: self.shears.iter().rev().map(Shear::inverse).collect(),
        }
    }

    /// The composite as an exact polynomial pair.
    pub fn expand(&self) -> (BivariatePoly, BivariatePoly) {
        self.apply_to(&BivariatePoly::x(), &BivariatePoly::y())
    }

    /// `chain ∘ (g1, g2)`, one shear at a time.
    pub fn apply_to(&self, g1: &BivariatePoly, g2: &BivariatePoly) -> (BivariatePoly, BivariatePoly) {
        let mut g = (g1.clone(), g2.clone());
        for s in &self.shears {
            g = s.apply_exact(&g.0, &g.1);
        }
        g
    }

    pub fn to_float(&self) -> FloatShearChain {
        FloatShearChain {
            shears: self
                .shears
                .iter()
                .map(|s| FloatShear {
                    axis: s.axis,
                    coeffs: s
                        .coeffs
                        .iter()
                        .map(|c| if c.is_zero() { 0.0 } else { c.to_f64().unwrap_or(f64::NAN) })
                        .collect(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone)]
struct FloatShear {
    axis: ShearAxis,
    coeffs: Vec<f64>,
}

/// Floating evaluation of a [`ShearChain`] and its Jacobian.
#[derive(Debug, Clone)]
pub struct FloatShearChain {
    shears: Vec<FloatShear>,
}

impl FloatShearChain {
    pub fn eval(&self, x: f64, y: f64) -> [f64; 2] {
        let (mut u, mut v) = (x, y);
        for s in &self.shears {
            match s.axis {
                ShearAxis::X => u += horner(&s.coeffs, v),
                ShearAxis::Y => v += horner(&s.coeffs, u),
            }
        }
        [u, v]
    }

    /// Value and Jacobian `[[du/dx, du/dy], [dv/dx, dv/dy]]`.
    pub fn eval_with_jacobian(&self, x: f64, y: f64) -> ([f64; 2], [[f64; 2]; 2]) {
        let (mut u, mut v) = (x, y);
        let mut j = [[1.0, 0.0], [0.0, 1.0]];
        for s in &self.shears {
            match s.axis {
                ShearAxis::X => {
                    let (p, dp) = horner_d(&s.coeffs, v);
                    u += p;
                    j[0][0] += dp * j[1][0];
                    j[0][1] += dp * j[1][1];
                }
                ShearAxis::Y => {
                    let (p, dp) = horner_d(&s.coeffs, u);
                    v += p;
                    j[1][0] += dp * j[0][0];
                    j[1][1] += dp * j[0][1];
                }
            }
        }
        ([u, v], j)
    }
}

#[inline]
fn horner(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, a| acc * t + a)
}

/// `(p(t), p'(t))`.
#[inline]
fn horner_d(c: &[f64], t: f64) -> (f64, f64) {
    let mut p = 0.0;
    let mut dp = 0.0;
    for a in c.iter().rev() {
        dp = dp * t + p;
        p = p * t + a;
    }
    (p, dp)
}
