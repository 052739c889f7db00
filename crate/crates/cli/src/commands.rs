use crate::input::{self, Subject};
use crate::{CliError, RunManifest};
use forge_core::families::{branch_catalog, hamiltonian_of, invert_map, BranchCatalogEntry};
use forge_core::numeric::{
    isochrony_sweep, linear_equivalence_search, write_period_csv, write_restart_csv, EquivalenceConfig,
    EquivalenceSearchResult,
};
use forge_core::poly::{parse_rational, HomogeneousPoly};
use forge_core::symbolic::{
    check_unit_jacobian, degeneracy_witness, jacobian_det, jacobian_det_of, qshear_cancellation_trace,
    solve_transport, CancellationTrace, DegeneracyWitness, TransportProblem, WitnessError,
};
use forge_core::{FamilySpec, Hamiltonian};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::path::Path;

/// Relative deviation from `2*pi` above which `period` reports a failure.
const PERIOD_TOLERANCE: f64 = 1e-7;
const DEFAULT_ENERGIES: [f64; 4] = [1e-4, 1e-2, 1.0, 1e2];

fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("report serializes");
    out.push(b'\n');
    out
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Input(format!("writing CSV: {e}"))
}

#[derive(Serialize)]
struct GenReport {
    spec: FamilySpec,
    branch: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    m: Option<u32>,
    /// Degree of the vector field.
    n: u32,
    map_degree: u32,
    deg_h: u32,
    f1: String,
    f2: String,
    h: String,
    canonical: Canonical,
}

#[derive(Serialize)]
struct Canonical {
    f1: String,
    f2: String,
    h: String,
}

pub fn gen(m: &RunManifest) -> Result<String, CliError> {
    let v = input::json(&input::spec_text(m.spec_path.as_deref())?)?;
    let Subject::Family(spec, f) = input::subject(&v)? else {
        return Err(CliError::Input("gen expects a family spec".into()));
    };
    let h = hamiltonian_of(&f).map_err(|e| CliError::Input(e.to_string()))?;
    let (k, mm) = match &spec {
        FamilySpec::Triangular { k, .. } => (Some(*k), None),
        FamilySpec::QShear { m, .. } => (None, Some(*m)),
    };
    let report = GenReport {
        branch: spec.branch_name(),
        k,
        m: mm,
        n: spec.system_degree(),
        map_degree: spec.map_degree(),
        deg_h: h.h.degree().finite().unwrap_or(0),
        f1: f.f1.pretty(),
        f2: f.f2.pretty(),
        h: h.h.pretty(),
        canonical: Canonical {
            f1: f.f1.to_string(),
            f2: f.f2.to_string(),
            h: h.h.to_string(),
        },
        spec,
    };
    input::write(&m.output_path, &to_json(&report))?;
    Ok(format!("{} n={} f1 = {}", report.branch, report.n, report.f1))
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

#[derive(Serialize)]
struct VerifyReport {
    subject: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    spec: Option<FamilySpec>,
    f1: String,
    f2: String,
    det: String,
    checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<CancellationTrace>,
    pass: bool,
}

pub fn verify(m: &RunManifest) -> Result<String, CliError> {
    let v = input::json(&input::spec_text(m.spec_path.as_deref())?)?;
    let (spec, f) = match input::subject(&v)? {
        Subject::Family(spec, f) => (Some(spec), f),
        Subject::Map(f) => (None, f),
        Subject::Bare(_) => return Err(CliError::Input("verify expects a family spec or a map".into())),
    };
    let det = jacobian_det(&f);
    let mut checks = vec![Check {
        name: "unit_jacobian",
        pass: check_unit_jacobian(&f),
        detail: format!("det = {}", det.pretty()),
    }];
    let mut trace = None;
    if let Some(spec) = &spec {
        checks.push(match invert_map(&f, spec) {
            Ok(g) => Check {
                name: "inverse_round_trip",
                pass: true,
                detail: format!("g = ({}, {})", g.f1.pretty(), g.f2.pretty()),
            },
            Err(e) => Check {
                name: "inverse_round_trip",
                pass: false,
                detail: e.to_string(),
            },
        });
        if let FamilySpec::QShear { .. } = spec {
            let t = qshear_cancellation_trace(spec).map_err(|e| CliError::Input(e.to_string()))?;
            checks.push(Check {
                name: "cancellation_trace",
                pass: t.passed(),
                detail: format!("{} terms, {} cancelling pairs, total = {}", t.terms.len(), t.pairs.len(), t.total.pretty()),
            });
            trace = Some(t);
        }
    }
    let pass = checks.iter().all(|c| c.pass);
    let report = VerifyReport {
        subject: if spec.is_some() { "family" } else { "map" },
        spec,
        f1: f.f1.pretty(),
        f2: f.f2.pretty(),
        det: det.pretty(),
        checks,
        trace,
        pass,
    };
    input::write(&m.output_path, &to_json(&report))?;
    let failed: Vec<String> = report
        .checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| format!("{}: {}", c.name, c.detail))
        .collect();
    if pass {
        Ok(format!("PASS: {} checks", report.checks.len()))
    } else {
        Err(CliError::Verification(format!("FAIL: {}", failed.join("; "))))
    }
}

pub fn period(m: &RunManifest) -> Result<String, CliError> {
    let v = input::json(&input::spec_text(m.spec_path.as_deref())?)?;
    let h = match input::subject(&v)? {
        s @ Subject::Family(..) => s.hamiltonian()?,
        // A hand map has no factorization to start orbits from; use H alone.
        s @ Subject::Map(_) => Hamiltonian {
            source: None,
            ..s.hamiltonian()?
        },
        Subject::Bare(h) => h,
    };
    let energies = m.energies.clone().unwrap_or_else(|| DEFAULT_ENERGIES.to_vec());
    let outcomes = isochrony_sweep(&h, &energies, &m.integrator).map_err(|e| CliError::Input(e.to_string()))?;
    let mut csv = Vec::new();
    write_period_csv(&energies, &outcomes, &mut csv).map_err(csv_error)?;
    input::write(&m.output_path, &csv)?;

    let mut failures = Vec::new();
    let mut max_dev = 0.0f64;
    for (e, r) in energies.iter().zip(&outcomes) {
        match r {
            Ok(r) => max_dev = max_dev.max((r.period - TAU).abs() / TAU),
            Err(err) => {
                eprintln!("energy {e:e}: {err}");
                failures.push(*e);
            }
        }
    }
    let summary = format!(
        "max |T - 2pi| / 2pi = {max_dev:.3e} over {} of {} energies",
        energies.len() - failures.len(),
        energies.len()
    );
    if !failures.is_empty() {
        Err(CliError::Numeric(format!("{summary}; failed at {failures:?}")))
    } else if max_dev > PERIOD_TOLERANCE {
        Err(CliError::Verification(format!("{summary} exceeds {PERIOD_TOLERANCE:e}")))
    } else {
        Ok(summary)
    }
}

#[derive(Serialize)]
struct CatalogRow {
    n: u32,
    triangular_available: bool,
    triangular_k: u32,
    triangular_params: u32,
    qshear_available: bool,
    qshear_m: Option<u32>,
    qshear_params: Option<u32>,
}

impl From<&BranchCatalogEntry> for CatalogRow {
    fn from(e: &BranchCatalogEntry) -> Self {
        CatalogRow {
            n: e.n,
            triangular_available: e.triangular_available,
            triangular_k: e.triangular_k,
            triangular_params: e.triangular_params(),
            qshear_available: e.qshear_available,
            qshear_m: e.qshear_m,
            qshear_params: e.qshear_params(),
        }
    }
}

pub fn catalog(m: &RunManifest) -> Result<String, CliError> {
    let n_max = m.n_max.ok_or_else(|| CliError::Input("catalog requires --n-max".into()))?;
    let rows: Vec<CatalogRow> = branch_catalog(n_max)
        .map_err(|e| CliError::Input(e.to_string()))?
        .iter()
        .map(CatalogRow::from)
        .collect();
    let bytes = if is_csv(&m.output_path) {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &rows {
            w.serialize(row).map_err(csv_error)?;
        }
        w.into_inner().map_err(|e| CliError::Input(e.to_string()))?
    } else {
        to_json(&rows)
    };
    input::write(&m.output_path, &bytes)?;
    let q: Vec<u32> = rows.iter().filter(|r| r.qshear_available).map(|r| r.n).collect();
    Ok(format!("{} degrees up to {n_max}; Q-branch at {q:?}", rows.len()))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EquivRequest {
    a: serde_json::Value,
    b: serde_json::Value,
    sample_box: Option<f64>,
    sample_count: Option<usize>,
    restarts: Option<usize>,
    unit_determinant: Option<bool>,
    max_iterations: Option<usize>,
}

#[derive(Serialize)]
struct EquivReport<'a> {
    /// A persistent floor over all restarts is evidence of inequivalence, not a proof.
    interpretation: &'static str,
    #[serde(flatten)]
    result: &'a EquivalenceSearchResult,
}

pub fn equiv(m: &RunManifest) -> Result<String, CliError> {
    let text = input::spec_text(m.spec_path.as_deref())?;
    let req: EquivRequest = serde_json::from_str(&text).map_err(|e| CliError::Input(format!("equivalence request: {e}")))?;
    let ha = input::subject(&req.a)?.hamiltonian()?;
    let hb = input::subject(&req.b)?.hamiltonian()?;
    let d = EquivalenceConfig::default();
    let cfg = EquivalenceConfig {
        sample_box: req.sample_box.unwrap_or(d.sample_box),
        sample_count: req.sample_count.unwrap_or(d.sample_count),
        restarts: req.restarts.unwrap_or(d.restarts),
        seed: m.seed,
        unit_determinant: req.unit_determinant.unwrap_or(d.unit_determinant),
        max_iterations: req.max_iterations.unwrap_or(d.max_iterations),
    };
    let result = linear_equivalence_search(&ha, &hb, &cfg).map_err(|e| CliError::Input(e.to_string()))?;
    let bytes = if is_csv(&m.output_path) {
        let mut out = Vec::new();
        write_restart_csv(&result, &mut out).map_err(csv_error)?;
        out
    } else {
        to_json(&EquivReport {
            interpretation: "evidence, not proof",
            result: &result,
        })
    };
    input::write(&m.output_path, &bytes)?;
    Ok(format!(
        "best residual {:.4e} at restart {} ({} of {} restarts converged; evidence, not proof)",
        result.best_residual, result.best_restart, result.converged_restarts, result.restarts
    ))
}

#[derive(Deserialize)]
#[serde(tag = "lemma", rename_all = "lowercase", deny_unknown_fields)]
enum LemmaRequest {
    Degeneracy { p: String, q: String },
    Transport { beta: String, h: String },
}

#[derive(Serialize)]
#[serde(tag = "lemma", rename_all = "lowercase")]
enum LemmaReport {
    Degeneracy {
        p: String,
        q: String,
        det: String,
        witness: Option<DegeneracyWitness>,
    },
    Transport {
        beta: String,
        h: String,
        p: String,
        residual: String,
    },
}

fn form(field: &str, text: &str) -> Result<HomogeneousPoly, CliError> {
    HomogeneousPoly::from_poly(input::poly(field, text)?)
        .map_err(|e| CliError::Input(format!("{field} must be a homogeneous form: {e}")))
}

pub fn lemma(m: &RunManifest) -> Result<String, CliError> {
    let text = input::spec_text(m.spec_path.as_deref())?;
    let req: LemmaRequest = serde_json::from_str(&text).map_err(|e| CliError::Input(format!("lemma request: {e}")))?;
    let (report, summary) = match req {
        LemmaRequest::Degeneracy { p, q } => {
            let (fp, fq) = (form("p", &p)?, form("q", &q)?);
            let det = jacobian_det_of(fp.poly(), fq.poly());
            let witness = degeneracy_witness(&fp, &fq).map_err(|e| match e {
                WitnessError::ZeroInput => CliError::Input(e.to_string()),
                WitnessError::OutsideRationalField(_) => CliError::Verification(e.to_string()),
            })?;
            let summary = match &witness {
                Some(w) => format!(
                    "p = {} * r^{}, q = {} * r^{} with r = {}",
                    w.c_p,
                    w.m_prime,
                    w.c_q,
                    w.n_prime,
                    w.r.poly().pretty()
                ),
                None => format!("det D(p, q) = {} is not zero; no witness", det.pretty()),
            };
            let report = LemmaReport::Degeneracy {
                p: fp.poly().pretty(),
                q: fq.poly().pretty(),
                det: det.pretty(),
                witness,
            };
            (report, summary)
        }
        LemmaRequest::Transport { beta, h } => {
            let beta = parse_rational(&beta).map_err(|e| CliError::Input(format!("beta: {e}")))?;
            let prob = TransportProblem { beta, h: form("h", &h)? };
            let p = solve_transport(&prob);
            let residual = prob.residual(p.poly());
            let summary = format!("p = {}", p.poly().pretty());
            let report = LemmaReport::Transport {
                beta: prob.beta.to_string(),
                h: prob.h.poly().pretty(),
                p: p.poly().pretty(),
                residual: residual.pretty(),
            };
            (report, summary)
        }
    };
    input::write(&m.output_path, &to_json(&report))?;
    Ok(summary)
}
