//! Exact identity checks: the Jacobian determinant of a map, degeneracy
//! witnesses for pairs of homogeneous forms, and the shear-based transport
//! solver.

mod degeneracy;
mod trace;
mod transport;

pub use degeneracy::{degeneracy_witness, DegeneracyWitness, WitnessError};
pub use trace::{qshear_cancellation_trace, CancellationPair, CancellationTrace, TraceTerm};
pub use transport::{solve_transport, TransportProblem};

use crate::families::PolyMap;
use crate::poly::{BivariatePoly, Var};

/// `f1_x * f2_y - f1_y * f2_x`, exactly.
pub fn jacobian_det(f: &PolyMap) -> BivariatePoly {
    jacobian_det_of(&f.f1, &f.f2)
}

/// `p_x * q_y - p_y * q_x`, exactly.
pub fn jacobian_det_of(p: &BivariatePoly, q: &BivariatePoly) -> BivariatePoly {
    &p.partial(Var::X) * &q.partial(Var::Y) - &p.partial(Var::Y) * &q.partial(Var::X)
}

/// True iff the Jacobian determinant is the constant polynomial 1.
pub fn check_unit_jacobian(f: &PolyMap) -> bool {
    jacobian_det(f).is_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::FamilySpec;
    use crate::poly::rat;

    fn map(a: &str, b: &str) -> PolyMap {
        PolyMap::new(a.parse().unwrap(), b.parse().unwrap())
    }

    #[test]
    fn determinant_examples() {
        assert!(jacobian_det(&map("x", "y")).is_one());
        let t = FamilySpec::triangular(vec![rat(1, 2), rat(-1, 3)], rat(2, 1)).build().unwrap();
        assert!(jacobian_det(&t).is_one());
        let q = FamilySpec::qshear(rat(1, 1), vec![rat(1, 1), rat(1, 1)], rat(1, 1)).build().unwrap();
        assert!(jacobian_det(&q).is_one());
    }

    #[test]
    fn unit_jacobian_examples() {
        let scaled = map("2x", "y");
        assert!(!check_unit_jacobian(&scaled));
        assert_eq!(jacobian_det(&scaled), "2".parse().unwrap());

        let skew = map("x + y^2", "y + x");
        assert!(!check_unit_jacobian(&skew));
        assert_eq!(jacobian_det(&skew), "1 - 2y".parse().unwrap());

        assert!(check_unit_jacobian(&map("x", "y + x^3")));
    }
}
