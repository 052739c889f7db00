use super::jacobian_det_of;
use crate::poly::{primitive_root_homogeneous, HomogeneousPoly, Rational};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("inputs must be nonzero homogeneous forms")]
    ZeroInput,
    /// The determinant vanishes but no rational common form reproduces both
    /// inputs. Not evidence against the degeneracy statement itself.
    #[error("witness outside rational field: {0}")]
    OutsideRationalField(String),
}

/// `p = c_p * r^m_prime` and `q = c_q * r^n_prime` with `r` graded-lex monic
/// and not itself a power of a form of lower degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegeneracyWitness {
    #[serde(serialize_with = "ser_form")]
    pub r: HomogeneousPoly,
    #[serde(serialize_with = "crate::poly::rational::serde_str::serialize")]
    pub c_p: Rational,
    #[serde(serialize_with = "crate::poly::rational::serde_str::serialize")]
    pub c_q: Rational,
    pub m_prime: u32,
    pub n_prime: u32,
}

fn ser_form<S: serde::Serializer>(r: &HomogeneousPoly, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(r.poly())
}

impl DegeneracyWitness {
    /// Whether `c_p * r^m_prime == p` and `c_q * r^n_prime == q` exactly.
    pub fn reconstructs(&self, p: &HomogeneousPoly, q: &HomogeneousPoly) -> bool {
        self.r.pow(self.m_prime).poly().scale(&self.c_p) == *p.poly()
            && self.r.pow(self.n_prime).poly().scale(&self.c_q) == *q.poly()
    }
}

/// For homogeneous `p, q` with `det D(p, q) == 0`, recovers a common form `r`
/// with `p = c_p r^m'` and `q = c_q r^n'`. Returns `Ok(None)` when the
/// determinant is not identically zero.
pub fn degeneracy_witness(
    p: &HomogeneousPoly,
    q: &HomogeneousPoly,
) -> Result<Option<DegeneracyWitness>, WitnessError> {
    if p.is_zero() || q.is_zero() {
        return Err(WitnessError::ZeroInput);
    }
    if !jacobian_det_of(p.poly(), q.poly()).is_zero() {
        return Ok(None);
    }
    let (rp, m_prime) = primitive_root_homogeneous(p);
    let (rq, n_prime) = primitive_root_homogeneous(q);
    // A constant form is r^0 for any r; take r from the other input.
    let r = match (p.degree(), q.degree()) {
        (0, _) => rq,
        (_, 0) => rp,
        _ if rp == rq => rp,
        _ => {
            return Err(WitnessError::OutsideRationalField(format!(
                "primitive roots differ: {} vs {}",
                rp.poly(),
                rq.poly()
            )))
        }
    };
    let coefficient = |form: &HomogeneousPoly, e: u32| -> Result<Rational, WitnessError> {
        let quotient = form
            .poly()
            .div_exact(r.pow(e).poly())
            .filter(|c| c.is_constant())
            .ok_or_else(|| {
                WitnessError::OutsideRationalField(format!("{} is not a multiple of r^{e}", form.poly()))
            })?;
        Ok(quotient.constant_term())
    };
    let witness = DegeneracyWitness {
        c_p: coefficient(p, m_prime)?,
        c_q: coefficient(q, n_prime)?,
        r,
        m_prime,
        n_prime,
    };
    if !witness.reconstructs(p, q) {
        return Err(WitnessError::OutsideRationalField(
            "reconstruction mismatch".to_string(),
        ));
    }
    Ok(Some(witness))
}
