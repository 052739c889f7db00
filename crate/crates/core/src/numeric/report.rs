use super::{EquivalenceSearchResult, PeriodReport, SweepOutcome};
use serde::Serialize;
use std::io::Write;

/// One CSV row; failed measurements keep their energy and leave the rest empty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodRow {
    pub energy: f64,
    pub period: Option<f64>,
    pub period_error: Option<f64>,
    pub drift: Option<f64>,
    pub steps: Option<usize>,
}

impl From<&PeriodReport> for PeriodRow {
    fn from(r: &PeriodReport) -> Self {
        PeriodRow {
            energy: r.energy,
            period: Some(r.period),
            period_error: Some(r.period_abs_error_estimate),
            drift: Some(r.energy_drift),
            steps: Some(r.steps),
        }
    }
}

impl PeriodRow {
    pub fn failed(energy: f64) -> Self {
        PeriodRow {
            energy,
            period: None,
            period_error: None,
            drift: None,
            steps: None,
        }
    }
}

/// Writes `energy,period,period_error,drift,steps` rows, one per requested energy.
pub fn write_period_csv<W: Write>(energies: &[f64], outcomes: &[SweepOutcome], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for (e, o) in energies.iter().zip(outcomes) {
        let row = match o {
            Ok(r) => PeriodRow::from(r),
            Err(_) => PeriodRow::failed(*e),
        };
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct RestartRow {
    restart: usize,
    residual: f64,
    a11: f64,
    a12: f64,
    a21: f64,
    a22: f64,
    converged: bool,
}

/// Writes one row per restart of an equivalence search.
pub fn write_restart_csv<W: Write>(result: &EquivalenceSearchResult, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for (i, r) in result.restart_outcomes.iter().enumerate() {
        let [[a11, a12], [a21, a22]] = r.matrix;
        w.serialize(RestartRow {
            restart: i,
            residual: r.residual,
            a11,
            a12,
            a21,
            a22,
            converged: r.converged,
        })?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::NumericError;

    #[test]
    fn period_csv_columns() {
        let ok = PeriodReport {
            energy: 1.0,
            initial_point: [1.0, 0.0],
            period: 6.5,
            period_abs_error_estimate: 1e-12,
            energy_drift: 0.0,
            steps: 40,
        };
        let mut buf = Vec::new();
        write_period_csv(&[1.0, 2.0], &[Ok(ok), Err(NumericError::StartAtOrigin)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "energy,period,period_error,drift,steps\n1.0,6.5,1e-12,0.0,40\n2.0,,,,\n");
    }
}
