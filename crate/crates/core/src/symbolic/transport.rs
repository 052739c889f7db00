use crate::poly::{BivariatePoly, HomogeneousPoly, Rational, Var};
use num_traits::Zero;

/// `p_x + beta * p_y = h` for homogeneous `h`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransportProblem {
    pub beta: Rational,
    pub h: HomogeneousPoly,
}

impl TransportProblem {
    pub fn residual(&self, p: &BivariatePoly) -> BivariatePoly {
        &(&p.partial(Var::X) + &p.partial(Var::Y).scale(&self.beta)) - self.h.poly()
    }
}

/// The homogeneous solution of degree `deg h + 1` with `p(0, y) = 0`.
///
/// In the sheared coordinates `(u, w) = (x, y - beta*x)` the operator becomes
/// `d/du`, so `p` is the `u`-antiderivative of `h(u, w + beta*u)` vanishing at
/// `u = 0`, mapped back with `w = y - beta*x`. The residual is checked to be
/// exactly zero before returning.
///
/// Adding `c * (y - beta*x)^(d+1)` gives every other solution.
pub fn solve_transport(prob: &TransportProblem) -> HomogeneousPoly {
    let degree = prob.h.degree() + 1;
    let beta_x = BivariatePoly::x().scale(&prob.beta);
    let x = BivariatePoly::x();
    let sheared = prob.h.poly().compose(&x, &(&BivariatePoly::y() + &beta_x));
    let antiderivative = sheared.integrate(Var::X);
    let p = antiderivative.compose(&x, &(&BivariatePoly::y() - &beta_x));
    assert!(
        prob.residual(&p).is_zero(),
        "transport solution failed its residual check"
    );
    debug_assert!(p.coeff(0, degree).is_zero());
    HomogeneousPoly::new(p, degree).expect("shear substitution preserves homogeneity")
}
