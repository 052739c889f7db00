//! Exact construction and verification of polynomial isochronous centers built from unit-Jacobian maps.
//!
//! A planar Hamiltonian `H = (f1^2 + f2^2) / 2` built from a polynomial map `f`
//! with `det Df == 1` and `f(0) = 0` has an isochronous center of period `2*pi`
//! at the origin. This crate builds two such families of maps (triangular and
//! quadratic-shear), checks the defining identities in exact rational
//! arithmetic, and measures orbit periods numerically.
//!
//! - [`poly`]: sparse bivariate polynomials over the rationals.
//! - [`families`]: the map families, their Hamiltonians, inverses and the degree catalog.
//! - [`symbolic`]: Jacobian checks and the two homogeneous-form lemmas.
//! - [`numeric`]: orbit integration, period measurement and the linear-equivalence search.

pub mod families;
pub mod numeric;
pub mod poly;
pub mod symbolic;

pub use families::{FamilySpec, Hamiltonian, PolyMap};
pub use poly::{BivariatePoly, Degree, HomogeneousPoly, Rational, Var};
