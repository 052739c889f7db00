use super::{BivariatePoly, PolyError, Var};
use num_traits::ToPrimitive;

/// A [`BivariatePoly`] with coefficients rounded to `f64`, laid out for nested
/// Horner evaluation: `rows[i]` holds the dense y-coefficients of `x^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatPoly {
    rows: Vec<Vec<f64>>,
}

impl FloatPoly {
    pub fn new(p: &BivariatePoly) -> Self {
        if p.is_zero() {
            return FloatPoly { rows: Vec::new() };
        }
        let mut rows = vec![Vec::new(); p.degree_in(Var::X) as usize + 1];
        for (m, c) in p.terms() {
            let row = &mut rows[m.x as usize];
            if row.len() <= m.y as usize {
                row.resize(m.y as usize + 1, 0.0);
            }
            row[m.y as usize] = c.to_f64().unwrap_or(f64::NAN);
        }
        FloatPoly { rows }
    }

    /// Plain evaluation; non-finite results pass through.
    #[inline]
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let mut acc = 0.0;
        for row in self.rows.iter().rev() {
            let mut r = 0.0;
            for c in row.iter().rev() {
                r = r * y + c;
            }
            acc = acc * x + r;
        }
        acc
    }

    pub fn try_eval(&self, x: f64, y: f64) -> Result<f64, PolyError> {
        let v = self.eval(x, y);
        if v.is_finite() && x.is_finite() && y.is_finite() {
            Ok(v)
        } else {
            Err(PolyError::NonFinite { x, y })
        }
    }
}

/// Floating evaluation of an exact polynomial. Fails if the inputs or the
/// result are not finite.
pub fn eval_float(p: &BivariatePoly, x: f64, y: f64) -> Result<f64, PolyError> {
    FloatPoly::new(p).try_eval(x, y)
}
