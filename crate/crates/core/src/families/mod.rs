//! The triangular and quadratic-shear families of unit-Jacobian maps, the
//! Hamiltonians they generate, their exact inverses, and the degree catalog.
//!
//! Triangular branch, for `k >= 2` (system degree `n = 2k - 1`):
//!
//! ```text
//! f1 = x + c_2 y^2 + ... + c_k y^k,    f2 = y + lambda * f1
//! ```
//!
//! Quadratic-shear branch, for `m >= 2` with `Q = y + gamma * x^2`
//! (system degree `n = 4m - 1`):
//!
//! ```text
//! f1 = x + beta_1 Q + ... + beta_m Q^m,    f2 = Q + lambda * f1
//! ```

mod shear;

pub use shear::{FloatShearChain, Shear, ShearAxis, ShearChain};

use crate::poly::rational::{serde_str, serde_str_vec};
use crate::poly::{rat, BivariatePoly, Degree, FloatPoly, Rational, Var};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("{field} must be at least 2, got {value}")]
    DegreeTooSmall { field: &'static str, value: u32 },
    #[error("{field} must have {expected} entries, got {got}")]
    CoefficientCount {
        field: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("{0} must be nonzero: the top coefficient fixes the nominal degree (set allow_degree_drop to explore lower degrees)")]
    VanishingTopCoefficient(&'static str),
    #[error("gamma must be nonzero (Q = y + gamma*x^2 with gamma != 0)")]
    ZeroGamma,
    #[error("map does not fix the origin: f(0,0) = ({0}, {1})")]
    OriginNotFixed(String, String),
    #[error("Hamiltonian has nonzero constant term {0}")]
    NonzeroConstant(Rational),
    #[error("map was not produced by the given family spec")]
    SpecMismatch,
    #[error("inverse check failed: {which} = ({first}, {second})")]
    InverseCheckFailed {
        which: &'static str,
        first: String,
        second: String,
    },
    #[error("catalog bound must be odd and at least 3, got {0}")]
    BadCatalogBound(u32),
    #[error("invalid family spec: {0}")]
    Json(#[from] serde_json::Error),
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// Parameters selecting one member of either branch.
///
/// JSON form: `{"branch":"triangular","k":3,"c":["1/2","-1/3"],"lambda":"2"}` or
/// `{"branch":"qshear","m":2,"gamma":"1","beta":["1","1"],"lambda":"0"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "branch", deny_unknown_fields)]
pub enum FamilySpec {
    #[serde(rename = "triangular")]
    Triangular {
        k: u32,
        /// `c_2, ..., c_k`
        #[serde(with = "serde_str_vec")]
        c: Vec<Rational>,
        #[serde(with = "serde_str")]
        lambda: Rational,
        #[serde(default, skip_serializing_if = "is_false")]
        allow_degree_drop: bool,
    },
    #[serde(rename = "qshear")]
    QShear {
        m: u32,
        #[serde(with = "serde_str")]
        gamma: Rational,
        /// `beta_1, ..., beta_m`
        #[serde(with = "serde_str_vec")]
        beta: Vec<Rational>,
        #[serde(with = "serde_str")]
        lambda: Rational,
        #[serde(default, skip_serializing_if = "is_false")]
        allow_degree_drop: bool,
    },
}

impl FamilySpec {
    pub fn triangular(c: Vec<Rational>, lambda: Rational) -> Self {
        FamilySpec::Triangular {
            k: c.len() as u32 + 1,
            c,
            lambda,
            allow_degree_drop: false,
        }
    }

    pub fn qshear(gamma: Rational, beta: Vec<Rational>, lambda: Rational) -> Self {
        FamilySpec::QShear {
            m: beta.len() as u32,
            gamma,
            beta,
            lambda,
            allow_degree_drop: false,
        }
    }

    pub fn from_json(s: &str) -> Result<Self, FamilyError> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }

    pub fn branch_name(&self) -> &'static str {
        match self {
            FamilySpec::Triangular { .. } => "triangular",
            FamilySpec::QShear { .. } => "qshear",
        }
    }

    /// Total degree of the map: `k` or `2m`.
    pub fn map_degree(&self) -> u32 {
        match self {
            FamilySpec::Triangular { k, .. } => *k,
            FamilySpec::QShear { m, .. } => 2 * m,
        }
    }

    /// Degree of the Hamiltonian vector field: `2k - 1` or `4m - 1`.
    pub fn system_degree(&self) -> u32 {
        2 * self.map_degree() - 1
    }

    pub fn validate(&self) -> Result<(), FamilyError> {
        match self {
            FamilySpec::Triangular {
                k,
                c,
                allow_degree_drop,
                ..
            } => {
                if *k < 2 {
                    return Err(FamilyError::DegreeTooSmall { field: "k", value: *k });
                }
                if c.len() != *k as usize - 1 {
                    return Err(FamilyError::CoefficientCount {
                        field: "c",
                        expected: *k as usize - 1,
                        got: c.len(),
                    });
                }
                if !allow_degree_drop && c.last().is_some_and(Zero::is_zero) {
                    return Err(FamilyError::VanishingTopCoefficient("c_k"));
                }
            }
            FamilySpec::QShear {
                m,
                gamma,
                beta,
                allow_degree_drop,
                ..
            } => {
                if *m < 2 {
                    return Err(FamilyError::DegreeTooSmall { field: "m", value: *m });
                }
                if beta.len() != *m as usize {
                    return Err(FamilyError::CoefficientCount {
                        field: "beta",
                        expected: *m as usize,
                        got: beta.len(),
                    });
                }
                if gamma.is_zero() {
                    return Err(FamilyError::ZeroGamma);
                }
                if !allow_degree_drop && beta.last().is_some_and(Zero::is_zero) {
                    return Err(FamilyError::VanishingTopCoefficient("beta_m"));
                }
            }
        }
        Ok(())
    }

    /// The factorization into elementary shears, in application order.
    ///
    /// Triangular: `(x + c(y), y)` then `(u, v + lambda*u)`. Quadratic shear:
    /// `(x, y + gamma*x^2)`, then `(x + beta(y), y)`, then `(u, v + lambda*u)`.
    pub fn shear_chain(&self) -> ShearChain {
        let zero = Rational::zero;
        match self {
            FamilySpec::Triangular { c, lambda, .. } => {
                let mut cy = vec![zero(), zero()];
                cy.extend(c.iter().cloned());
                ShearChain::new(vec![
                    Shear::new(ShearAxis::X, cy),
                    Shear::new(ShearAxis::Y, vec![zero(), lambda.clone()]),
                ])
            }
            FamilySpec::QShear {
                gamma, beta, lambda, ..
            } => {
                let mut by = vec![zero()];
                by.extend(beta.iter().cloned());
                ShearChain::new(vec![
                    Shear::new(ShearAxis::Y, vec![zero(), zero(), gamma.clone()]),
                    Shear::new(ShearAxis::X, by),
                    Shear::new(ShearAxis::Y, vec![zero(), lambda.clone()]),
                ])
            }
        }
    }

    pub fn build(&self) -> Result<PolyMap, FamilyError> {
        match self {
            FamilySpec::Triangular { .. } => build_triangular(self),
            FamilySpec::QShear { .. } => build_qshear(self),
        }
    }
}

/// A polynomial map `(f1, f2)` of the plane.
///
/// Maps built by the families also carry their shear factorization, used for
/// inversion and for accurate floating evaluation. Equality compares only the
/// components.
#[derive(Debug, Clone)]
pub struct PolyMap {
    pub f1: BivariatePoly,
    pub f2: BivariatePoly,
    factors: Option<ShearChain>,
}

impl PartialEq for PolyMap {
    fn eq(&self, other: &Self) -> bool {
        self.f1 == other.f1 && self.f2 == other.f2
    }
}

impl Eq for PolyMap {}

impl PolyMap {
    pub fn new(f1: BivariatePoly, f2: BivariatePoly) -> Self {
        PolyMap { f1, f2, factors: None }
    }

    pub fn identity() -> Self {
        Self::from_chain(ShearChain::default())
    }

    /// The expanded map of a shear chain, keeping the chain as its factorization.
    pub fn from_chain(chain: ShearChain) -> Self {
        let (f1, f2) = chain.expand();
        PolyMap {
            f1,
            f2,
            factors: Some(chain),
        }
    }

    pub fn factors(&self) -> Option<&ShearChain> {
        self.factors.as_ref()
    }

    pub fn fixes_origin(&self) -> bool {
        self.f1.constant_term().is_zero() && self.f2.constant_term().is_zero()
    }

    pub fn is_identity(&self) -> bool {
        self.f1 == BivariatePoly::x() && self.f2 == BivariatePoly::y()
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &PolyMap) -> PolyMap {
        PolyMap::new(
            self.f1.compose(&inner.f1, &inner.f2),
            self.f2.compose(&inner.f1, &inner.f2),
        )
    }

    /// `self ∘ inner`, substituting `inner` into each shear factor of `self`
    /// in turn. Intermediate results stay near the degrees of the inputs,
    /// where [`PolyMap::compose`] expands powers of the full components.
    /// Falls back to [`PolyMap::compose`] for maps without factors.
    pub fn compose_factored(&self, inner: &PolyMap) -> PolyMap {
        match &self.factors {
            Some(chain) => {
                let (f1, f2) = chain.apply_to(&inner.f1, &inner.f2);
                PolyMap::new(f1, f2)
            }
            None => self.compose(inner),
        }
    }

    /// Whether the attached factorization expands to exactly `(f1, f2)`.
    /// Maps without factors are trivially consistent.
    pub fn factors_consistent(&self) -> bool {
        self.factors
            .as_ref()
            .is_none_or(|c| c.expand() == (self.f1.clone(), self.f2.clone()))
    }

    /// Total degree `max(deg f1, deg f2)`.
    pub fn degree(&self) -> Degree {
        self.f1.degree().max(self.f2.degree())
    }

    /// Determinant of the linear part at the origin.
    pub fn linear_det(&self) -> Rational {
        self.f1.coeff(1, 0) * self.f2.coeff(0, 1) - self.f1.coeff(0, 1) * self.f2.coeff(1, 0)
    }

    /// Floating evaluator, preferring the shear factorization when present.
    pub fn float_eval(&self) -> MapEval {
        match &self.factors {
            Some(chain) => MapEval::Factored(chain.to_float()),
            None => MapEval::Expanded {
                f: [FloatPoly::new(&self.f1), FloatPoly::new(&self.f2)],
                df: [
                    [FloatPoly::new(&self.f1.partial(Var::X)), FloatPoly::new(&self.f1.partial(Var::Y))],
                    [FloatPoly::new(&self.f2.partial(Var::X)), FloatPoly::new(&self.f2.partial(Var::Y))],
                ],
            },
        }
    }
}

/// Floating evaluation of a [`PolyMap`] and its Jacobian matrix.
#[derive(Debug, Clone)]
pub enum MapEval {
    Factored(FloatShearChain),
    Expanded {
        f: [FloatPoly; 2],
        df: [[FloatPoly; 2]; 2],
    },
}

impl MapEval {
    pub fn eval(&self, x: f64, y: f64) -> [f64; 2] {
        match self {
            MapEval::Factored(c) => c.eval(x, y),
            MapEval::Expanded { f, .. } => [f[0].eval(x, y), f[1].eval(x, y)],
        }
    }

    pub fn eval_with_jacobian(&self, x: f64, y: f64) -> ([f64; 2], [[f64; 2]; 2]) {
        match self {
            MapEval::Factored(c) => c.eval_with_jacobian(x, y),
            MapEval::Expanded { f, df } => (
                [f[0].eval(x, y), f[1].eval(x, y)],
                [
                    [df[0][0].eval(x, y), df[0][1].eval(x, y)],
                    [df[1][0].eval(x, y), df[1][1].eval(x, y)],
                ],
            ),
        }
    }
}

/// A Hamiltonian `H` with `H(0,0) = 0`, optionally remembering the map it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    pub h: BivariatePoly,
    pub source: Option<PolyMap>,
}

impl Hamiltonian {
    pub fn new(h: BivariatePoly) -> Result<Self, FamilyError> {
        let c = h.constant_term();
        if !c.is_zero() {
            return Err(FamilyError::NonzeroConstant(c));
        }
        Ok(Hamiltonian { h, source: None })
    }
}

pub fn build_triangular(spec: &FamilySpec) -> Result<PolyMap, FamilyError> {
    spec.validate()?;
    let FamilySpec::Triangular { c, lambda, .. } = spec else {
        return Err(FamilyError::SpecMismatch);
    };
    let mut f1 = BivariatePoly::x();
    for (i, ci) in c.iter().enumerate() {
        f1 = &f1 + &BivariatePoly::monomial(ci.clone(), 0, i as u32 + 2);
    }
    let f2 = &BivariatePoly::y() + &f1.scale(lambda);
    Ok(PolyMap {
        f1,
        f2,
        factors: Some(spec.shear_chain()),
    })
}

pub fn build_qshear(spec: &FamilySpec) -> Result<PolyMap, FamilyError> {
    spec.validate()?;
    let FamilySpec::QShear {
        gamma, beta, lambda, ..
    } = spec
    else {
        return Err(FamilyError::SpecMismatch);
    };
    let q = &BivariatePoly::y() + &BivariatePoly::monomial(gamma.clone(), 2, 0);
    let mut f1 = BivariatePoly::x();
    let mut q_pow = BivariatePoly::one();
    for b in beta {
        q_pow = &q_pow * &q;
        f1 = &f1 + &q_pow.scale(b);
    }
    let f2 = &q + &f1.scale(lambda);
    Ok(PolyMap {
        f1,
        f2,
        factors: Some(spec.shear_chain()),
    })
}

/// `H = (f1^2 + f2^2) / 2`.
pub fn hamiltonian_of(f: &PolyMap) -> Result<Hamiltonian, FamilyError> {
    if !f.fixes_origin() {
        return Err(FamilyError::OriginNotFixed(
            f.f1.constant_term().to_string(),
            f.f2.constant_term().to_string(),
        ));
    }
    let h = (&(&f.f1 * &f.f1) + &(&f.f2 * &f.f2)).scale(&rat(1, 2));
    Ok(Hamiltonian {
        h,
        source: Some(f.clone()),
    })
}

/// `(xdot, ydot) = (-H_y, H_x)`.
pub fn vector_field(h: &Hamiltonian) -> (BivariatePoly, BivariatePoly) {
    (-h.h.partial(Var::Y), h.h.partial(Var::X))
}

/// Largest total degree of the vector-field components; `None` for constant `H`.
pub fn system_degree(h: &Hamiltonian) -> Option<u32> {
    let (a, b) = vector_field(h);
    a.degree().max(b.degree()).finite()
}

/// Exact inverse of a family map, built by undoing its shears in reverse order.
///
/// The shear factorization is first checked to expand to `f`. Then `g ∘ f` and
/// `f ∘ g` are computed exactly, substituting the inner map into the outer
/// map's factors, and compared with the identity before returning.
pub fn invert_map(f: &PolyMap, spec: &FamilySpec) -> Result<PolyMap, FamilyError> {
    let rebuilt = spec.build()?;
    if &rebuilt != f || !rebuilt.factors_consistent() {
        return Err(FamilyError::SpecMismatch);
    }
    let g = PolyMap::from_chain(spec.shear_chain().inverse());
    for (which, comp) in [("g∘f", g.compose_factored(&rebuilt)), ("f∘g", rebuilt.compose_factored(&g))] {
        if !comp.is_identity() {
            return Err(FamilyError::InverseCheckFailed {
                which,
                first: comp.f1.to_string(),
                second: comp.f2.to_string(),
            });
        }
    }
    Ok(g)
}

/// Which branches exist at one odd system degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BranchCatalogEntry {
    pub n: u32,
    pub triangular_available: bool,
    pub triangular_k: u32,
    pub qshear_available: bool,
    pub qshear_m: Option<u32>,
}

impl BranchCatalogEntry {
    /// Free parameters of the triangular branch: `c_2..c_k` and `lambda`.
    pub fn triangular_params(&self) -> u32 {
        self.triangular_k
    }

    /// Free parameters of the Q-branch: `gamma`, `beta_1..beta_m`, `lambda`.
    pub fn qshear_params(&self) -> Option<u32> {
        self.qshear_m.map(|m| m + 2)
    }
}

/// One entry per odd `n` in `3..=n_max`. The triangular branch has degree
/// `2k - 1` for every `k >= 2`; the Q-branch has degree `4m - 1` for `m >= 2`.
pub fn branch_catalog(n_max: u32) -> Result<Vec<BranchCatalogEntry>, FamilyError> {
    if n_max < 3 || n_max.is_multiple_of(2) {
        return Err(FamilyError::BadCatalogBound(n_max));
    }
    Ok((3..=n_max)
        .step_by(2)
        .map(|n| {
            let qshear_m = ((n + 1) % 4 == 0 && (n + 1) / 4 >= 2).then_some((n + 1) / 4);
            BranchCatalogEntry {
                n,
                triangular_available: true,
                triangular_k: n.div_ceil(2),
                qshear_available: qshear_m.is_some(),
                qshear_m,
            }
        })
        .collect())
}
