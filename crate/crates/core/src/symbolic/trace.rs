//! Term-by-term rendering of why a quadratic-shear map has unit Jacobian.
//!
//! With `Q = y + gamma*x^2` and `S = sum_i i*beta_i*Q^(i-1)`, the chain rule gives
//! `f1_x = 1 + Q_x S`, `f1_y = S`, `f2_x = Q_x + lambda f1_x`, `f2_y = 1 + lambda S`.
//! Expanding `f1_x f2_y - f1_y f2_x` yields seven terms; all but the leading 1
//! cancel in three pairs.

use super::jacobian_det;
use crate::families::{FamilyError, FamilySpec};
use crate::poly::{rat, BivariatePoly, Rational, Var};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceTerm {
    pub name: &'static str,
    pub poly: BivariatePoly,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CancellationPair {
    pub positive: &'static str,
    pub negative: &'static str,
    pub sum: BivariatePoly,
    pub cancels: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CancellationTrace {
    pub q: BivariatePoly,
    pub q_x: BivariatePoly,
    pub q_y: BivariatePoly,
    pub s: BivariatePoly,
    /// `f1_x, f1_y, f2_x, f2_y` as predicted from `S` and `Q_x`.
    pub predicted_partials: [BivariatePoly; 4],
    /// Whether the predictions equal the partials of the built map.
    pub partials_match: bool,
    /// `(1 + Q_x S)(1 + lambda S) - S (Q_x + lambda (1 + Q_x S))`
    pub unexpanded: BivariatePoly,
    pub terms: Vec<TraceTerm>,
    pub pairs: Vec<CancellationPair>,
    pub total: BivariatePoly,
    pub total_is_one: bool,
    /// Whether `total` equals the directly computed Jacobian determinant.
    pub matches_jacobian: bool,
}

impl CancellationTrace {
    pub fn passed(&self) -> bool {
        self.partials_match
            && self.total_is_one
            && self.matches_jacobian
            && self.pairs.iter().all(|p| p.cancels)
            && self.unexpanded == self.total
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }
}

pub fn qshear_cancellation_trace(spec: &FamilySpec) -> Result<CancellationTrace, FamilyError> {
    let f = spec.build()?;
    let FamilySpec::QShear {
        gamma, beta, lambda, ..
    } = spec
    else {
        return Err(FamilyError::SpecMismatch);
    };
    let one = BivariatePoly::one();
    let q = &BivariatePoly::y() + &BivariatePoly::monomial(gamma.clone(), 2, 0);
    let q_x = q.partial(Var::X);
    let q_y = q.partial(Var::Y);

    let mut s = BivariatePoly::zero();
    let mut q_pow = BivariatePoly::one();
    for (i, b) in beta.iter().enumerate() {
        let weight = b * Rational::from_integer((i as i64 + 1).into());
        s = &s + &q_pow.scale(&weight);
        q_pow = &q_pow * &q;
    }

    let lam = |p: &BivariatePoly| p.scale(lambda);
    let f1x = &one + &(&q_x * &s);
    let f1y = s.clone();
    let f2x = &q_x + &lam(&f1x);
    let f2y = &one + &lam(&s);
    let partials_match = [&f1x, &f1y, &f2x, &f2y]
        == [
            &f.f1.partial(Var::X),
            &f.f1.partial(Var::Y),
            &f.f2.partial(Var::X),
            &f.f2.partial(Var::Y),
        ];
    let unexpanded = &(&f1x * &f2y) - &(&f1y * &f2x);

    let s2 = &s * &s;
    let qxs = &q_x * &s;
    let qxs2 = &q_x * &s2;
    let neg = |p: &BivariatePoly| p.scale(&rat(-1, 1));
    let terms = vec![
        TraceTerm { name: "1", poly: one.clone() },
        TraceTerm { name: "lambda*S", poly: lam(&s) },
        TraceTerm { name: "Q_x*S", poly: qxs.clone() },
        TraceTerm { name: "lambda*Q_x*S^2", poly: lam(&qxs2) },
        TraceTerm { name: "-S*Q_x", poly: neg(&qxs) },
        TraceTerm { name: "-lambda*S", poly: neg(&lam(&s)) },
        TraceTerm { name: "-lambda*Q_x*S^2", poly: neg(&lam(&qxs2)) },
    ];
    let pairs = [(1, 5), (2, 4), (3, 6)]
        .into_iter()
        .map(|(a, b)| {
            let sum = &terms[a].poly + &terms[b].poly;
            CancellationPair {
                positive: terms[a].name,
                negative: terms[b].name,
                cancels: sum.is_zero(),
                sum,
            }
        })
        .collect();
    let total = terms
        .iter()
        .fold(BivariatePoly::zero(), |acc, t| &acc + &t.poly);
    let det = jacobian_det(&f);

    Ok(CancellationTrace {
        total_is_one: total.is_one(),
        matches_jacobian: total == det,
        q,
        q_x,
        q_y,
        s,
        predicted_partials: [f1x, f1y, f2x, f2y],
        partials_match,
        unexpanded,
        terms,
        pairs,
        total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rational {
        rat(n, 1)
    }

    #[test]
    fn septic_instance_cancels() {
        let t = qshear_cancellation_trace(&FamilySpec::qshear(r(1), vec![r(1), r(1)], r(1))).unwrap();
        assert!(t.passed());
        assert_eq!(t.s, "1 + 2(y + x^2)".parse().unwrap());
        assert_eq!(t.q_x, "2x".parse().unwrap());
        assert!(t.q_y.is_one());
        assert_eq!(t.terms.len(), 7);
        assert!(t.pairs.iter().all(|p| p.sum.is_zero()));
    }

    #[test]
    fn lambda_zero_kills_lambda_terms() {
        let t = qshear_cancellation_trace(&FamilySpec::qshear(r(3), vec![r(2), r(-1)], r(0))).unwrap();
        assert!(t.passed());
        for term in &t.terms {
            if term.name.contains("lambda") {
                assert!(term.poly.is_zero(), "{}", term.name);
            }
        }
    }

    #[test]
    fn rejects_triangular() {
        let spec = FamilySpec::triangular(vec![r(1)], r(0));
        assert!(matches!(qshear_cancellation_trace(&spec), Err(FamilyError::SpecMismatch)));
    }

    #[test]
    fn json_names_every_term() {
        let t = qshear_cancellation_trace(&FamilySpec::qshear(r(1), vec![r(1), r(1)], r(1))).unwrap();
        let v: serde_json::Value = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(v["terms"].as_array().unwrap().len(), 7);
        assert_eq!(v["total"], "1x^0y^0");
        assert_eq!(v["terms"][2]["name"], "Q_x*S");
    }
}
