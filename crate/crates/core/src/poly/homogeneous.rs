//! Homogeneous forms and their gcd / squarefree part.
//!
//! Both operations go through one variable: strip the largest power of `x`
//! dividing the form, set `x = 1`, work with the univariate result in `y`, then
//! homogenize back. Results are scaled so the graded-lex leading coefficient is 1.

use super::{BivariatePoly, PolyError, Rational, UniPoly, Var};
use num_traits::Zero;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HomogeneousPoly {
    poly: BivariatePoly,
    degree: u32,
}

impl HomogeneousPoly {
    /// Wraps `poly`, checking that every term has total degree `degree`.
    /// The zero polynomial is homogeneous of every degree.
    pub fn new(poly: BivariatePoly, degree: u32) -> Result<Self, PolyError> {
        if poly.terms().any(|(m, _)| m.degree() != degree) {
            return Err(PolyError::NotHomogeneous(degree));
        }
        Ok(HomogeneousPoly { poly, degree })
    }

    /// Infers the degree from the terms; fails on zero or mixed degrees.
    pub fn from_poly(poly: BivariatePoly) -> Result<Self, PolyError> {
        let d = poly.degree().finite().ok_or(PolyError::ZeroPolynomial)?;
        Self::new(poly, d)
    }

    pub fn poly(&self) -> &BivariatePoly {
        &self.poly
    }

    pub fn into_poly(self) -> BivariatePoly {
        self.poly
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn monic(&self) -> Self {
        HomogeneousPoly {
            poly: self.poly.monic(),
            degree: self.degree,
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        HomogeneousPoly {
            poly: self.poly.pow(e),
            degree: self.degree * e,
        }
    }

    /// Splits a nonzero form as `x^a * x^deg(u) * u(y/x)`, returning `(a, u)`.
    fn dehomogenize(&self) -> (u32, UniPoly) {
        let a = self.poly.terms().map(|(m, _)| m.x).min().unwrap_or(0);
        let len = (self.degree - a) as usize + 1;
        let mut coeffs = vec![Rational::zero(); len];
        for (m, c) in self.poly.terms() {
            coeffs[m.y as usize] = c.clone();
        }
        (a, UniPoly::from_vec(coeffs))
    }

    /// Inverse of [`Self::dehomogenize`], followed by graded-lex normalization.
    fn homogenize(x_power: u32, u: &UniPoly) -> Self {
        let e = u.degree().unwrap_or(0) as u32;
        let poly = BivariatePoly::from_terms(
            u.coeffs()
                .iter()
                .enumerate()
                .map(|(j, c)| (x_power + e - j as u32, j as u32, c.clone())),
        )
        .monic();
        HomogeneousPoly {
            poly,
            degree: x_power + e,
        }
    }
}

/// Normalized gcd of two homogeneous forms. A zero argument acts as the
/// identity, so `gcd(p, 0)` is `p` made monic; `gcd(0, 0)` is zero.
pub fn gcd_homogeneous(p: &HomogeneousPoly, q: &HomogeneousPoly) -> HomogeneousPoly {
    match (p.is_zero(), q.is_zero()) {
        (true, true) => return p.clone(),
        (true, false) => return q.monic(),
        (false, true) => return p.monic(),
        _ => {}
    }
    let (ap, up) = p.dehomogenize();
    let (aq, uq) = q.dehomogenize();
    HomogeneousPoly::homogenize(ap.min(aq), &up.gcd(&uq))
}


/// Squarefree part `p / gcd(p, p_x, p_y)`, normalized.
///
/// For nonzero `p` of degree 0 the result is the constant 1.
///
/// # Panics
/// If `p` is zero.
pub fn radical_homogeneous(p: &HomogeneousPoly) -> HomogeneousPoly {
    assert!(!p.is_zero(), "radical of the zero form");
    if p.degree == 0 {
        return HomogeneousPoly {
            poly: BivariatePoly::one(),
            degree: 0,
        };
    }
    let d = p.degree - 1;
    let px = HomogeneousPoly::new(p.poly.partial(Var::X), d).expect("partial of a form");
    let py = HomogeneousPoly::new(p.poly.partial(Var::Y), d).expect("partial of a form");
    let g = gcd_homogeneous(p, &gcd_homogeneous(&px, &py));
    let r = p
        .poly
        .div_exact(&g.poly)
        .expect("gcd divides its argument");
    HomogeneousPoly {
        poly: r.monic(),
        degree: p.degree - g.degree,
    }
}

fn divide(p: &HomogeneousPoly, q: &HomogeneousPoly) -> HomogeneousPoly {
    HomogeneousPoly {
        poly: p.poly.div_exact(&q.poly).expect("exact division of forms"),
        degree: p.degree - q.degree,
    }
}

fn gcd_u32(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd_u32(b, a % b)
    }
}

/// The monic form `r` and exponent `g` with `p = c * r^g` and `g` maximal.
///
/// `r` is built from the squarefree decomposition `p = c * prod_i s_i^i` as
/// `prod_i s_i^(i/g)` where `g` is the gcd of the multiplicities present. It is
/// squarefree exactly when every factor of `p` has the same multiplicity.
/// Degree-0 forms give `(1, 0)`.
///
/// # Panics
/// If `p` is zero.
pub fn primitive_root_homogeneous(p: &HomogeneousPoly) -> (HomogeneousPoly, u32) {
    assert!(!p.is_zero(), "root of the zero form");
    // layers[k] is the product of the irreducible factors of multiplicity > k.
    let mut layers = Vec::new();
    let mut rest = p.monic();
    while rest.degree > 0 {
        let rad = radical_homogeneous(&rest);
        rest = divide(&rest, &rad);
        layers.push(rad);
    }
    let one = HomogeneousPoly {
        poly: BivariatePoly::one(),
        degree: 0,
    };
    let exact: Vec<(u32, HomogeneousPoly)> = (0..layers.len())
        .map(|k| {
            let next = layers.get(k + 1).unwrap_or(&one);
            (k as u32 + 1, divide(&layers[k], next))
        })
        .filter(|(_, s)| s.degree > 0)
        .collect();
    let g = exact.iter().fold(0, |g, (i, _)| gcd_u32(g, *i));
    let root = exact.iter().fold(one.clone(), |acc, (i, s)| {
        let f = s.pow(i / g);
        HomogeneousPoly {
            poly: (&acc.poly * &f.poly).monic(),
            degree: acc.degree + f.degree,
        }
    });
    (root, g)
}
