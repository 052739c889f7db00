use super::dop853::{DenseSegment, Dop853};
use super::{IntegratorConfig, NumericError};
use crate::families::{Hamiltonian, MapEval, PolyMap};
use crate::poly::{FloatPoly, Var};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Floating evaluation of `H`, its gradient and the section coordinates.
///
/// When `H` carries its source map the gradient is taken through the chain
/// rule, `grad H = Df^T f`, and the section uses `(f1, f2)`. Otherwise the
/// expanded partials of `H` are used and the section is the positive `x`-axis.
#[derive(Debug, Clone)]
pub struct PhaseField {
    kind: FieldKind,
}

#[derive(Debug, Clone)]
enum FieldKind {
    Source(MapEval),
    Direct {
        h: FloatPoly,
        hx: FloatPoly,
        hy: FloatPoly,
    },
}

impl PhaseField {
    pub fn new(h: &Hamiltonian) -> Self {
        let kind = match &h.source {
            Some(f) => FieldKind::Source(f.float_eval()),
            None => FieldKind::Direct {
                h: FloatPoly::new(&h.h),
                hx: FloatPoly::new(&h.h.partial(Var::X)),
                hy: FloatPoly::new(&h.h.partial(Var::Y)),
            },
        };
        PhaseField { kind }
    }

    pub fn uses_source(&self) -> bool {
        matches!(self.kind, FieldKind::Source(_))
    }

    pub fn energy(&self, p: [f64; 2]) -> f64 {
        match &self.kind {
            FieldKind::Source(f) => {
                let [u, v] = f.eval(p[0], p[1]);
                0.5 * (u * u + v * v)
            }
            FieldKind::Direct { h, .. } => h.eval(p[0], p[1]),
        }
    }

    /// `(H_x, H_y)`.
    pub fn gradient(&self, p: [f64; 2]) -> [f64; 2] {
        match &self.kind {
            FieldKind::Source(f) => {
                let ([u, v], j) = f.eval_with_jacobian(p[0], p[1]);
                [u * j[0][0] + v * j[1][0], u * j[0][1] + v * j[1][1]]
            }
            FieldKind::Direct { hx, hy, .. } => [hx.eval(p[0], p[1]), hy.eval(p[0], p[1])],
        }
    }

    /// `(-H_y, H_x)`.
    pub fn velocity(&self, p: [f64; 2]) -> [f64; 2] {
        let [hx, hy] = self.gradient(p);
        [-hy, hx]
    }

    /// Coordinates `(a, b)` of the section `{b = 0, a > 0}`.
    pub fn section_coords(&self, p: [f64; 2]) -> [f64; 2] {
        match &self.kind {
            FieldKind::Source(f) => f.eval(p[0], p[1]),
            FieldKind::Direct { .. } => p,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitSample {
    pub t: f64,
    pub point: [f64; 2],
    pub energy: f64,
}

/// Step points of an integrated orbit together with the dense interpolant.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<OrbitSample>,
    segments: Vec<DenseSegment>,
    pub energy: f64,
    pub energy_drift: f64,
    pub steps: usize,
    pub rejected: usize,
}

impl Trajectory {
    pub fn t_end(&self) -> f64 {
        self.segments.last().map_or(0.0, DenseSegment::t1)
    }

    pub fn segments(&self) -> &[DenseSegment] {
        &self.segments
    }

    /// Dense-output position at time `t`, if `t` lies in the integrated range.
    pub fn at(&self, t: f64) -> Option<[f64; 2]> {
        if !(0.0..=self.t_end()).contains(&t) {
            return None;
        }
        let i = self.segments.partition_point(|s| s.t1() < t);
        self.segments.get(i).map(|s| s.eval(t))
    }
}

fn start_energy(field: &PhaseField, start: [f64; 2]) -> Result<f64, NumericError> {
    if !start.iter().all(|v| v.is_finite()) {
        return Err(NumericError::NonFiniteStart(start[0], start[1]));
    }
    if start == [0.0, 0.0] {
        return Err(NumericError::StartAtOrigin);
    }
    let e = field.energy(start);
    if e.is_nan() || e <= 0.0 {
        return Err(NumericError::NonPositiveEnergy(e));
    }
    Ok(e)
}

/// One orbit being stepped, with escape, step-count and drift bookkeeping.
struct Run<'a, F> {
    field: &'a PhaseField,
    stepper: Dop853<F>,
    cfg: IntegratorConfig,
    e0: f64,
    drift: f64,
}

fn run<'a>(
    field: &'a PhaseField,
    start: [f64; 2],
    cfg: &IntegratorConfig,
) -> Result<Run<'a, impl Fn(&[f64; 2]) -> [f64; 2] + 'a>, NumericError> {
    cfg.validate()?;
    let e0 = start_energy(field, start)?;
    let stepper = Dop853::new(move |p: &[f64; 2]| field.velocity(*p), start, cfg.step_control());
    Ok(Run {
        field,
        stepper,
        cfg: *cfg,
        e0,
        drift: 0.0,
    })
}

impl<F: Fn(&[f64; 2]) -> [f64; 2]> Run<'_, F> {
    fn advance(&mut self, t_end: f64) -> Result<DenseSegment, NumericError> {
        if self.stepper.accepted >= self.cfg.max_steps {
            return Err(NumericError::MaxSteps(self.cfg.max_steps));
        }
        let seg = self.stepper.step(t_end)?;
        let p = self.stepper.state();
        if p[0].hypot(p[1]) > self.cfg.escape_radius {
            return Err(NumericError::Escaped {
                t: self.stepper.time(),
                radius: self.cfg.escape_radius,
            });
        }
        self.drift = self.drift.max((self.field.energy(p) - self.e0).abs());
        Ok(seg)
    }

    fn drift_limit(&self) -> f64 {
        self.cfg.drift_factor * self.cfg.rel_tol * self.e0
    }
}

/// Integrates `(x', y') = (-H_y, H_x)` from `start` over `[0, t_max]`.
pub fn integrate_orbit(
    h: &Hamiltonian,
    start: [f64; 2],
    cfg: &IntegratorConfig,
    t_max: f64,
) -> Result<Trajectory, NumericError> {
    let field = PhaseField::new(h);
    let mut r = run(&field, start, cfg)?;
    let mut samples = vec![OrbitSample {
        t: 0.0,
        point: start,
        energy: r.e0,
    }];
    let mut segments = Vec::new();
    while r.stepper.time() < t_max {
        segments.push(r.advance(t_max)?);
        let point = r.stepper.state();
        samples.push(OrbitSample {
            t: r.stepper.time(),
            point,
            energy: field.energy(point),
        });
    }
    Ok(Trajectory {
        samples,
        segments,
        energy: r.e0,
        energy_drift: r.drift,
        steps: r.stepper.accepted,
        rejected: r.stepper.rejected,
    })
}

/// One measured return time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodReport {
    pub energy: f64,
    pub initial_point: [f64; 2],
    pub period: f64,
    /// `|T - T'|` where `T'` is measured with both tolerances ten times looser.
    pub period_abs_error_estimate: f64,
    pub energy_drift: f64,
    pub steps: usize,
}

struct Return {
    period: f64,
    drift: f64,
    drift_limit: f64,
    steps: usize,
}

/// Locates `b(t) = 0` on `seg`, given `b(t0) < 0 <= b(t1)`.
fn refine_crossing(field: &PhaseField, seg: &DenseSegment, tol: f64) -> f64 {
    let g = |t: f64| field.section_coords(seg.eval(t))[1];
    let (mut lo, mut hi) = (seg.t0, seg.t1());
    let (mut glo, mut ghi) = (g(lo), g(hi));
    for it in 0..400 {
        if hi - lo <= tol || ghi == 0.0 {
            break;
        }
        let secant = lo - glo * (hi - lo) / (ghi - glo);
        let t = if it % 2 == 0 && secant > lo && secant < hi {
            secant
        } else {
            0.5 * (lo + hi)
        };
        let gt = g(t);
        if gt < 0.0 {
            (lo, glo) = (t, gt);
        } else {
            (hi, ghi) = (t, gt);
        }
    }
    if ghi == 0.0 || ghi == glo {
        hi
    } else {
        lo - glo * (hi - lo) / (ghi - glo)
    }
}

fn first_return(field: &PhaseField, start: [f64; 2], cfg: &IntegratorConfig) -> Result<Return, NumericError> {
    let mut r = run(field, start, cfg)?;
    let [a0, b0] = field.section_coords(start);
    let on_section = a0 > 0.0 && b0.abs() <= 1e-12 * a0.hypot(b0);
    let mut t_ref = on_section.then_some(0.0);
    let mut armed = false;
    let mut b_prev = if on_section { 0.0 } else { b0 };
    loop {
        let seg = r.advance(cfg.t_max)?;
        let [a, b] = field.section_coords(r.stepper.state());
        armed |= a < 0.0;
        // Off the section, the first upward crossing fixes the reference time.
        if (armed || t_ref.is_none()) && b_prev < 0.0 && b >= 0.0 {
            let tc = refine_crossing(field, &seg, cfg.section_refinement_tol);
            if field.section_coords(seg.eval(tc))[0] > 0.0 {
                match t_ref {
                    None => {
                        t_ref = Some(tc);
                        armed = false;
                    }
                    Some(t0) => {
                        return Ok(Return {
                            period: tc - t0,
                            drift: r.drift,
                            drift_limit: r.drift_limit(),
                            steps: r.stepper.accepted,
                        })
                    }
                }
            }
        }
        b_prev = b;
        if r.stepper.time() >= cfg.t_max {
            return Err(NumericError::NoSectionCrossing(cfg.t_max));
        }
    }
}

/// Period of the orbit through `start`, measured as the time between
/// consecutive upward crossings of the section (see [`PhaseField`]).
///
/// A start on the section counts as the first crossing. The error estimate
/// reruns the measurement with tolerances loosened tenfold.
pub fn measure_period(
    h: &Hamiltonian,
    start: [f64; 2],
    cfg: &IntegratorConfig,
) -> Result<PeriodReport, NumericError> {
    let field = PhaseField::new(h);
    let main = first_return(&field, start, cfg)?;
    if main.drift > main.drift_limit {
        return Err(NumericError::EnergyDrift {
            drift: main.drift,
            limit: main.drift_limit,
        });
    }
    let coarse = first_return(&field, start, &cfg.loosened(10.0))?;
    Ok(PeriodReport {
        energy: field.energy(start),
        initial_point: start,
        period: main.period,
        period_abs_error_estimate: (main.period - coarse.period).abs(),
        energy_drift: main.drift,
        steps: main.steps,
    })
}

/// Start point of energy `e` on the section.
///
/// With a factored source map this is `f^{-1}(sqrt(2e), 0)` evaluated through
/// the inverse shears. Without a source it is the root of `H(x, 0) = e` with
/// `x > 0`, found by bracketing and bisection.
pub fn start_for_energy(h: &Hamiltonian, e: f64) -> Result<[f64; 2], NumericError> {
    if e.is_nan() || e <= 0.0 || e.is_infinite() {
        return Err(NumericError::InvalidEnergies(format!("energy {e} is not positive")));
    }
    match &h.source {
        Some(f) => {
            let chain = f.factors().ok_or(NumericError::NoInverse)?;
            Ok(chain.inverse().to_float().eval((2.0 * e).sqrt(), 0.0))
        }
        None => axis_root(&FloatPoly::new(&h.h), e),
    }
}

fn axis_root(h: &FloatPoly, e: f64) -> Result<[f64; 2], NumericError> {
    let g = |x: f64| h.eval(x, 0.0) - e;
    let mut hi = (2.0 * e).sqrt();
    let mut expansions = 0;
    while g(hi) < 0.0 {
        hi *= 2.0;
        expansions += 1;
        if expansions > 200 || !hi.is_finite() {
            return Err(NumericError::InvalidEnergies(format!(
                "level {e} does not meet the positive x-axis"
            )));
        }
    }
    let mut lo = 0.0;
    while hi - lo > 4.0 * f64::EPSILON * hi {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok([hi, 0.0])
}

pub type SweepOutcome = Result<PeriodReport, NumericError>;

/// Measures the period at each energy, in parallel, returning results in input order.
pub fn isochrony_sweep(
    h: &Hamiltonian,
    energies: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<SweepOutcome>, NumericError> {
    cfg.validate()?;
    if let Some(e) = energies.iter().find(|e| e.is_nan() || **e <= 0.0 || e.is_infinite()) {
        return Err(NumericError::InvalidEnergies(format!("energy {e} is not positive")));
    }
    if energies.windows(2).any(|w| w[0] >= w[1]) {
        return Err(NumericError::InvalidEnergies("energies must be strictly ascending".into()));
    }
    if h.source.as_ref().is_some_and(|f| f.factors().is_none()) {
        return Err(NumericError::NoInverse);
    }
    Ok(energies
        .par_iter()
        .map(|&e| measure_period(h, start_for_energy(h, e)?, cfg))
        .collect())
}

/// Largest deviation of finite-difference `d(f1)/dt`, `d(f2)/dt` from `-f2`, `f1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RotationDefect {
    pub max_f1_defect: f64,
    pub max_f2_defect: f64,
    pub samples: usize,
}

impl RotationDefect {
    pub fn max(&self) -> f64 {
        self.max_f1_defect.max(self.max_f2_defect)
    }
}

/// Checks `d(f1)/dt = -f2` and `d(f2)/dt = f1` at each step midpoint, using a
/// fourth-order central difference of width `delta` on the dense output.
pub fn rotation_defect(f: &PolyMap, traj: &Trajectory, delta: f64) -> RotationDefect {
    let eval = f.float_eval();
    let at = |t: f64| traj.at(t).map(|p| eval.eval(p[0], p[1]));
    let mut out = RotationDefect {
        max_f1_defect: 0.0,
        max_f2_defect: 0.0,
        samples: 0,
    };
    for seg in traj.segments() {
        let t = seg.t0 + 0.5 * seg.h;
        let (Some(m2), Some(m1), Some(p1), Some(p2)) =
            (at(t - 2.0 * delta), at(t - delta), at(t + delta), at(t + 2.0 * delta))
        else {
            continue;
        };
        let [u, v] = at(t).expect("midpoint lies inside the trajectory");
        let d = |i: usize| (m2[i] - 8.0 * m1[i] + 8.0 * p1[i] - p2[i]) / (12.0 * delta);
        out.max_f1_defect = out.max_f1_defect.max((d(0) + v).abs());
        out.max_f2_defect = out.max_f2_defect.max((d(1) - u).abs());
        out.samples += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{hamiltonian_of, FamilySpec};
    use crate::poly::rat;
    use std::f64::consts::TAU;

    fn oscillator() -> Hamiltonian {
        Hamiltonian::new("1/2 x^2 + 1/2 y^2".parse().unwrap()).unwrap()
    }

    #[test]
    fn oscillator_returns_after_two_pi() {
        let traj = integrate_orbit(&oscillator(), [1.0, 0.0], &IntegratorConfig::default(), TAU).unwrap();
        let p = traj.samples.last().unwrap().point;
        assert!((p[0] - 1.0).abs() < 1e-10 && p[1].abs() < 1e-10);
        assert!(traj.energy_drift < 1e-12);
        let mid = traj.at(TAU / 4.0).unwrap();
        assert!(mid[0].abs() < 1e-10 && (mid[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn oscillator_period() {
        let r = measure_period(&oscillator(), [1.0, 0.0], &IntegratorConfig::default()).unwrap();
        assert!((r.period - TAU).abs() < 1e-10, "{}", r.period);
        assert_eq!(r.energy, 0.5);
    }

    #[test]
    fn off_section_start() {
        let r = measure_period(&oscillator(), [0.0, -2.0], &IntegratorConfig::default()).unwrap();
        assert!((r.period - TAU).abs() < 1e-10, "{}", r.period);
    }

    #[test]
    fn rejects_bad_starts() {
        let h = oscillator();
        let cfg = IntegratorConfig::default();
        assert!(matches!(
            integrate_orbit(&h, [f64::NAN, 0.0], &cfg, 1.0),
            Err(NumericError::NonFiniteStart(..))
        ));
        assert_eq!(measure_period(&h, [0.0, 0.0], &cfg), Err(NumericError::StartAtOrigin));
    }

    #[test]
    fn source_gradient_matches_expanded() {
        let f = FamilySpec::qshear(rat(1, 1), vec![rat(1, 1), rat(1, 1)], rat(2, 1)).build().unwrap();
        let h = hamiltonian_of(&f).unwrap();
        let via_source = PhaseField::new(&h);
        let direct = PhaseField::new(&Hamiltonian::new(h.h.clone()).unwrap());
        for p in [[0.3, -0.2], [-0.7, 0.4], [0.1, 0.9]] {
            let (a, b) = (via_source.gradient(p), direct.gradient(p));
            for i in 0..2 {
                assert!((a[i] - b[i]).abs() <= 1e-12 * (1.0 + b[i].abs()));
            }
            assert!((via_source.energy(p) - direct.energy(p)).abs() < 1e-12);
        }
    }

    #[test]
    fn sweep_preconditions() {
        let h = oscillator();
        let cfg = IntegratorConfig::default();
        assert!(isochrony_sweep(&h, &[], &cfg).unwrap().is_empty());
        assert!(isochrony_sweep(&h, &[1.0, 0.5], &cfg).is_err());
        assert!(isochrony_sweep(&h, &[0.0], &cfg).is_err());
    }

    #[test]
    fn axis_start_solves_energy() {
        let h = Hamiltonian::new("1/2 x^2 + 1/2 y^2 + x^3".parse().unwrap()).unwrap();
        let p = start_for_energy(&h, 0.01).unwrap();
        assert_eq!(p[1], 0.0);
        assert!((PhaseField::new(&h).energy(p) - 0.01).abs() < 1e-16);
    }
}
