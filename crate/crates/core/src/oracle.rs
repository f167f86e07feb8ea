//! Direct integration of `i d/dt psi = H(t) psi` and phase extraction
//! against transported reference states.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::algebra::{build_su11_rep, build_su2_rep, GeneratorSet};
use crate::displacement::displace_vector;
use crate::error::{Error, Result};
use crate::linalg::{basis_vector, fix_gauge, wrap_angle, ComplexMatrix, ComplexVector, SparseRows};
use crate::lr::{adiabatic_fixed_point, berry_phase_closed_form, PhaseBreakdown, StateLabel};
use crate::protocol::DrivingProtocol;
use crate::quad::simpson_uniform;
use crate::tc::{reduced_protocol, sector_hamiltonian, tc_berry_phase, SectorSpec, TCParams, TcBerryMode, TcBranch, TcLabels};

/// Largest accepted `dt * |H psi|` per step.
pub const STEP_LIMIT: f64 = 0.1;
pub const MIN_SAMPLES_PER_PERIOD: f64 = 20.0;
pub const MIN_OVERLAP: f64 = 0.5;
const ACTION_TOL: f64 = 1e-15;
const GAUGE_CUTOFF: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionRun {
    pub period: f64,
    pub steps: usize,
    pub times: Vec<f64>,
    pub states: Vec<ComplexVector>,
    /// Largest `| |psi| - 1 |` seen.
    pub norm_drift: f64,
}

/// Midpoint exponential integrator: `psi <- exp(-i H(t + dt/2) dt) psi`,
/// recording every `sample_every`-th state (and always the last one).
pub fn evolve<F>(hamiltonian: F, psi0: &ComplexVector, period: f64, steps: usize, sample_every: usize) -> Result<EvolutionRun>
where
    F: Fn(f64) -> ComplexMatrix,
{
    if steps == 0 || sample_every == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let dt = period / steps as f64;
    let mut psi = psi0.clone();
    let mut times = vec![0.0];
    let mut states = vec![psi.clone()];
    let mut norm_drift = (psi.norm() - 1.0).abs();
    for i in 0..steps {
        let h = SparseRows::from_dense(&hamiltonian((i as f64 + 0.5) * dt));
        if h.dim() != psi.len() {
            return Err(Error::DimensionMismatch(format!("{}-dim Hamiltonian on {}-dim state", h.dim(), psi.len())));
        }
        let product = dt * h.mul_vec(&psi).norm();
        if product > STEP_LIMIT {
            return Err(Error::StepTooLarge { product, limit: STEP_LIMIT });
        }
        psi = h.exp_mul(Complex64::new(0.0, -dt), &psi, ACTION_TOL)?;
        norm_drift = norm_drift.max((psi.norm() - 1.0).abs());
        if (i + 1) % sample_every == 0 || i + 1 == steps {
            times.push((i + 1) as f64 * dt);
            states.push(psi.clone());
        }
    }
    Ok(EvolutionRun { period, steps, times, states, norm_drift })
}

/// Per-sample record of the phase extraction.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseTrace {
    pub times: Vec<f64>,
    /// Unwrapped `arg <ref|psi>` relative to `t = 0`.
    pub total: Vec<f64>,
    /// `<ref|H|ref>`.
    pub energy: Vec<f64>,
    pub overlap: Vec<f64>,
}

impl PhaseTrace {
    pub fn breakdown(&self, label: StateLabel) -> PhaseBreakdown {
        let h = if self.times.len() > 1 { self.times[1] - self.times[0] } else { 0.0 };
        // the last sample may sit closer than h when steps % sample_every != 0
        let n = self.times.len();
        let dynamical = if n > 2 && ((self.times[n - 1] - self.times[n - 2]) - h).abs() > 1e-9 * h.max(1.0) {
            let body = simpson_uniform(&self.energy[..n - 1], h);
            let tail = 0.5 * (self.times[n - 1] - self.times[n - 2]) * (self.energy[n - 2] + self.energy[n - 1]);
            -(body + tail)
        } else {
            -simpson_uniform(&self.energy, h)
        };
        let total = *self.total.last().unwrap_or(&0.0);
        PhaseBreakdown { total, dynamical, geometric: total - dynamical, label }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,total_phase,energy,overlap\n");
        for i in 0..self.times.len() {
            let _ = writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e}", self.times[i], self.total[i], self.energy[i], self.overlap[i]);
        }
        out
    }
}

/// Phases of `run` against the reference states `reference(t)`.
pub fn extract_phase_trace<R, F>(run: &EvolutionRun, reference: R, hamiltonian: F) -> Result<PhaseTrace>
where
    R: Fn(f64) -> Result<ComplexVector>,
    F: Fn(f64) -> ComplexMatrix,
{
    let n = run.times.len();
    let mut trace = PhaseTrace {
        times: run.times.clone(),
        total: Vec::with_capacity(n),
        energy: Vec::with_capacity(n),
        overlap: Vec::with_capacity(n),
    };
    let mut acc = 0.0;
    let mut prev_arg = 0.0;
    for (i, (&t, psi)) in run.times.iter().zip(&run.states).enumerate() {
        let r = reference(t)?;
        let ov = r.dotc(psi);
        if ov.norm() < MIN_OVERLAP {
            return Err(Error::TrackingLost { t, overlap: ov.norm() });
        }
        let arg = ov.arg();
        if i > 0 {
            acc += wrap_angle(arg - prev_arg);
        }
        prev_arg = arg;
        trace.total.push(acc);
        trace.overlap.push(ov.norm());
        trace.energy.push(r.dotc(&(hamiltonian(t) * &r)).re);
    }
    if n > 1 {
        let dt_sample = run.times[1] - run.times[0];
        let fastest = trace.energy.iter().fold(0.0f64, |m, e| m.max(e.abs()));
        if fastest > 0.0 {
            let per_period = 2.0 * std::f64::consts::PI / fastest / dt_sample;
            if per_period < MIN_SAMPLES_PER_PERIOD {
                return Err(Error::SamplingTooCoarse { per_period, required: MIN_SAMPLES_PER_PERIOD });
            }
        }
    }
    Ok(trace)
}

pub fn extract_phases<R, F>(run: &EvolutionRun, reference: R, hamiltonian: F, label: StateLabel) -> Result<PhaseBreakdown>
where
    R: Fn(f64) -> Result<ComplexVector>,
    F: Fn(f64) -> ComplexMatrix,
{
    Ok(extract_phase_trace(run, reference, hamiltonian)?.breakdown(label))
}

/// `D(xi_fp(t))|basis>` for the adiabatic fixed point on `branch`,
/// gauge-fixed.
pub fn fixed_point_reference(gens: &GeneratorSet, protocol: &DrivingProtocol, label: StateLabel, branch: i64, t: f64) -> Result<ComplexVector> {
    let aux = adiabatic_fixed_point(protocol, t, branch)?;
    let mut v = displace_vector(gens, aux.params(), &basis_vector(gens.dim(), label.basis_index()))?;
    fix_gauge(&mut v, GAUGE_CUTOFF);
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BerryModel {
    LinearSu11 { k: f64, n: usize, trunc_dim: usize, c0: f64, lambda: f64 },
    LinearSu2 { j: f64, mu: f64, c0: f64, lambda: f64 },
    /// One conserved sector of the trilinear model; `scale` is the
    /// occupation of the mode that the reduction replaces by a c-number
    /// and `coupling = lambda sqrt(scale)` is held fixed.
    TcSector { branch: TcBranch, scale: usize, m_n: usize, omega1: f64, omega2: f64, omega3: f64, coupling: f64 },
}

impl BerryModel {
    pub fn name(&self) -> &'static str {
        match self {
            BerryModel::LinearSu11 { .. } => "su11-linear",
            BerryModel::LinearSu2 { .. } => "su2-linear",
            BerryModel::TcSector { branch: TcBranch::Su11, .. } => "tc-su11",
            BerryModel::TcSector { branch: TcBranch::Su2, .. } => "tc-su2",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub model: BerryModel,
    pub periods: Vec<f64>,
    /// Integrator step.
    pub dt: f64,
    pub sample_every: usize,
    pub winding: i64,
    /// Fixed-point branch `n`.
    pub branch: i64,
}

impl ExperimentConfig {
    pub fn new(model: BerryModel, periods: Vec<f64>) -> Self {
        Self { model, periods, dt: 0.025, sample_every: 4, winding: 1, branch: 1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerryRun {
    pub period: f64,
    pub steps: usize,
    pub phases: PhaseBreakdown,
    pub closed_form: f64,
    pub deviation: f64,
    pub norm_drift: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BerryReport {
    pub model: BerryModel,
    pub closed_form: f64,
    pub oracle: f64,
    pub deviation: f64,
    pub runs: Vec<BerryRun>,
}

/// Everything needed to run one period of one model.
struct Setup {
    hamiltonian: Box<dyn Fn(f64) -> ComplexMatrix>,
    reference: Box<dyn Fn(f64) -> Result<ComplexVector>>,
    label: StateLabel,
    closed_form: f64,
}

fn linear_setup(gens: GeneratorSet, protocol: DrivingProtocol, label: StateLabel, branch: i64) -> Result<Setup> {
    protocol.check_admissible()?;
    let closed_form = berry_phase_closed_form(&protocol, label)?;
    let (g, p) = (gens.clone(), protocol.clone());
    let hamiltonian = Box::new(move |t: f64| p.hamiltonian(t).matrix(&g));
    let reference = Box::new(move |t: f64| fixed_point_reference(&gens, &protocol, label, branch, t));
    Ok(Setup { hamiltonian, reference, label, closed_form })
}

/// Reference for a sector: the reduced-model eigenstate, placed on the
/// sector states through `position(level)` and renormalized.
fn sector_setup(model: BerryModel, period: f64, winding: i64, branch: i64) -> Result<Setup> {
    let BerryModel::TcSector { branch: tc_branch, scale, m_n, omega1, omega2, omega3, coupling } = model else {
        unreachable!()
    };
    if scale == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let lambda = coupling / (scale as f64).sqrt();
    let params = TCParams::uniform(omega1, omega2, omega3, lambda, period, winding);
    let (labels, sector) = match tc_branch {
        TcBranch::Su2 => (TcLabels::Su2 { n_l: 0, m_n: 1, n_c: scale }, SectorSpec::new(1, scale)),
        TcBranch::Su11 => (TcLabels::Su11 { n_a: scale, n_l: 0, m_n }, SectorSpec::new(scale, scale + m_n)),
    };
    let closed_form = tc_berry_phase(&params, labels, TcBerryMode::Frozen)?.value;
    let protocol = reduced_protocol(&params, labels)?;
    protocol.check_admissible()?;
    let label = labels.state_label();
    let states = sector_hamiltonian(&params, sector, 0.0)?.states;
    // level of the reduced representation -> position in the sector basis
    let positions: Vec<Option<usize>> = match tc_branch {
        // su(2) basis index i is mu = 1/2 - i, that is n_a = i
        TcBranch::Su2 => (0..2).map(|i| states.iter().position(|s| s.0 == i)).collect(),
        // su(1,1) level l is n_b = l, that is n_a = scale - l
        TcBranch::Su11 => (0..=scale).map(|l| states.iter().position(|s| s.0 + l == scale)).collect(),
    };
    let gens = match tc_branch {
        TcBranch::Su2 => build_su2_rep(0.5)?,
        TcBranch::Su11 => build_su11_rep(label_k(label), (scale + 1).max(64))?,
    };
    let dim = states.len();
    let p = protocol.clone();
    let reference = Box::new(move |t: f64| {
        let full = fixed_point_reference(&gens, &p, label, branch, t)?;
        let mut v = ComplexVector::zeros(dim);
        for (level, pos) in positions.iter().enumerate() {
            if let Some(pos) = pos {
                v[*pos] = full[level];
            }
        }
        // keep the reduced-model gauge: a sector-order gauge winds with phi
        let norm = v.norm();
        v /= Complex64::new(norm, 0.0);
        Ok(v)
    });
    let hamiltonian = Box::new(move |t: f64| sector_hamiltonian(&params, sector, t).expect("sector is nonempty").matrix);
    Ok(Setup { hamiltonian, reference, label, closed_form })
}

fn label_k(label: StateLabel) -> f64 {
    match label {
        StateLabel::Su11 { k, .. } => k,
        StateLabel::Su2 { j, .. } => j,
    }
}

fn setup(model: BerryModel, period: f64, winding: i64, branch: i64) -> Result<Setup> {
    match model {
        BerryModel::LinearSu11 { k, n, trunc_dim, c0, lambda } => linear_setup(
            build_su11_rep(k, trunc_dim)?,
            DrivingProtocol::uniform_loop(crate::Algebra::Su11, c0, lambda, period, winding)?,
            StateLabel::Su11 { k, n },
            branch,
        ),
        BerryModel::LinearSu2 { j, mu, c0, lambda } => linear_setup(
            build_su2_rep(j)?,
            DrivingProtocol::uniform_loop(crate::Algebra::Su2, c0, lambda, period, winding)?,
            StateLabel::Su2 { j, mu },
            branch,
        ),
        BerryModel::TcSector { .. } => sector_setup(model, period, winding, branch),
    }
}

/// Evolve one loop of period `period` and compare the extracted geometric
/// phase with the closed form.
pub fn berry_run(model: BerryModel, period: f64, dt: f64, sample_every: usize, winding: i64, branch: i64) -> Result<BerryRun> {
    check_step(period, dt)?;
    run_setup(setup(model, period, winding, branch)?, period, dt, sample_every)
}

/// As [`berry_run`] for an arbitrary linear protocol on `gens`, tracking
/// the fixed-point eigenstate `label` on `branch`.
pub fn protocol_berry_run(
    gens: &GeneratorSet,
    protocol: &DrivingProtocol,
    label: StateLabel,
    dt: f64,
    sample_every: usize,
    branch: i64,
) -> Result<BerryRun> {
    check_step(protocol.period, dt)?;
    let s = linear_setup(gens.clone(), protocol.clone(), label, branch)?;
    run_setup(s, protocol.period, dt, sample_every)
}

fn check_step(period: f64, dt: f64) -> Result<()> {
    if !(dt > 0.0 && period > 0.0) {
        return Err(Error::InvalidProtocol(format!("period {period} and step {dt} must be positive")));
    }
    Ok(())
}

fn run_setup(s: Setup, period: f64, dt: f64, sample_every: usize) -> Result<BerryRun> {
    let steps = (period / dt).round().max(1.0) as usize;
    let psi0 = (s.reference)(0.0)?;
    let run = evolve(&s.hamiltonian, &psi0, period, steps, sample_every)?;
    let phases = extract_phases(&run, &s.reference, &s.hamiltonian, s.label)?;
    Ok(BerryRun {
        period,
        steps,
        phases,
        closed_form: s.closed_form,
        deviation: wrap_angle(phases.geometric - s.closed_form).abs(),
        norm_drift: run.norm_drift,
    })
}

/// Runs every period in `config.periods` (sequentially) and reports the
/// last one as the headline value.
pub fn adiabatic_berry_experiment(config: &ExperimentConfig) -> Result<BerryReport> {
    let mut runs = Vec::with_capacity(config.periods.len());
    for &period in &config.periods {
        runs.push(berry_run(config.model, period, config.dt, config.sample_every, config.winding, config.branch)?);
    }
    let last = runs.last().ok_or(Error::InvalidDimension(0))?;
    Ok(BerryReport {
        model: config.model,
        closed_form: last.closed_form,
        oracle: last.phases.geometric,
        deviation: last.deviation,
        runs,
    })
}

/// `start, 2 start, 4 start, ...` (`count` values).
pub fn doubling_periods(start: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| start * (1u64 << i) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Algebra;
    use crate::linalg::{c64, expm, real, EXPM_TOL};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn diagonal_evolution_is_a_phase() {
        let e = [0.3, -1.2, 2.0];
        let h = ComplexMatrix::from_diagonal(&ComplexVector::from_iterator(3, e.iter().map(|&x| real(x))));
        let psi0 = ComplexVector::from_vec(vec![c64(0.6, 0.0), c64(0.0, 0.8), real(0.0)]);
        let run = evolve(|_| h.clone(), &psi0, 2.0, 100, 10).unwrap();
        let last = run.states.last().unwrap();
        for i in 0..3 {
            assert!((last[i] - psi0[i] * Complex64::from_polar(1.0, -2.0 * e[i])).norm() <= 1e-10);
        }
        assert_eq!(run.times.len(), 11);
    }

    #[test]
    fn spin_half_matches_closed_propagator() {
        let g = build_su2_rep(0.5).unwrap();
        let m = crate::LinearHamiltonian::hermitian(Algebra::Su2, 1.0, 0.5, 0.3).matrix(&g);
        let psi0 = basis_vector(2, 0);
        let run = evolve(|_| m.clone(), &psi0, 1.0, 200, 200).unwrap();
        let exact = expm(&(&m * c64(0.0, -1.0)), EXPM_TOL).unwrap() * &psi0;
        assert!((run.states.last().unwrap() - exact).norm() <= 1e-10);
    }

    #[test]
    fn oversized_step_is_rejected() {
        let h = ComplexMatrix::from_diagonal(&ComplexVector::from_vec(vec![real(10.0), real(0.0)]));
        let err = evolve(|_| h.clone(), &basis_vector(2, 0), 1.0, 10, 1).unwrap_err();
        assert!(matches!(err, Error::StepTooLarge { .. }));
    }

    #[test]
    fn uncoupled_loop_has_no_geometry() {
        let model = BerryModel::LinearSu2 { j: 0.5, mu: 0.5, c0: 1.0, lambda: 0.0 };
        let r = berry_run(model, 50.0, 0.05, 4, 1, 1).unwrap();
        assert!(r.phases.geometric.abs() <= 1e-9, "{}", r.phases.geometric);
        assert_eq!(r.closed_form, 0.0);
        assert!(r.norm_drift <= 1e-9);
    }

    #[test]
    fn coarse_sampling_is_rejected() {
        let model = BerryModel::LinearSu2 { j: 0.5, mu: 0.5, c0: 1.0, lambda: 0.5 };
        let err = berry_run(model, 50.0, 0.05, 40, 1, 1).unwrap_err();
        assert!(matches!(err, Error::SamplingTooCoarse { .. }));
    }

    #[test]
    fn lost_tracking_is_reported() {
        let g = build_su2_rep(0.5).unwrap();
        let h = crate::LinearHamiltonian::hermitian(Algebra::Su2, 0.0, 1.0, 0.0).matrix(&g);
        let run = evolve(|_| h.clone(), &basis_vector(2, 0), 3.0, 300, 10).unwrap();
        let err = extract_phases(&run, |_| Ok(basis_vector(2, 0)), |_| h.clone(), StateLabel::Su2 { j: 0.5, mu: 0.5 });
        assert!(matches!(err, Err(Error::TrackingLost { .. })));
    }

    #[test]
    fn spin_half_loop_geometric_phase() {
        let model = BerryModel::LinearSu2 { j: 0.5, mu: 0.5, c0: 1.0, lambda: 0.5 };
        let r = berry_run(model, 200.0, 0.05, 4, 1, 1).unwrap();
        // solid angle of the loop traced by the field direction
        let solid = 2.0 * PI * (1.0 - 1.0 / 2f64.sqrt());
        assert_abs_diff_eq!(r.closed_form, 0.5 * solid, epsilon = 1e-14);
        assert!(r.deviation < 0.03, "{r:?}");
        assert!(r.norm_drift <= 1e-9);
    }

    #[test]
    fn sector_model_runs() {
        let model = BerryModel::TcSector {
            branch: TcBranch::Su2,
            scale: 4,
            m_n: 1,
            omega1: 1.0,
            omega2: 2.0,
            omega3: 0.0,
            coupling: 0.5,
        };
        let r = berry_run(model, 100.0, 0.025, 4, 1, 1).unwrap();
        let lin = berry_run(BerryModel::LinearSu2 { j: 0.5, mu: 0.5, c0: 1.0, lambda: 0.5 }, 100.0, 0.025, 4, 1, 1).unwrap();
        assert_abs_diff_eq!(r.phases.geometric, lin.phases.geometric, epsilon = 1e-8);
        assert_abs_diff_eq!(r.closed_form, lin.closed_form, epsilon = 1e-14);
    }

    #[test]
    fn protocol_entry_matches_model_entry() {
        let model = BerryModel::LinearSu2 { j: 0.5, mu: 0.5, c0: 1.0, lambda: 0.5 };
        let a = berry_run(model, 50.0, 0.025, 4, 1, 1).unwrap();
        let p = DrivingProtocol::uniform_loop(Algebra::Su2, 1.0, 0.5, 50.0, 1).unwrap();
        let b = protocol_berry_run(&build_su2_rep(0.5).unwrap(), &p, StateLabel::Su2 { j: 0.5, mu: 0.5 }, 0.025, 4, 1).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn breathing_coupling_follows_quadrature() {
        let period = 300.0;
        let p = DrivingProtocol::new(
            Algebra::Su11,
            crate::Schedule::Constant(5.0),
            crate::Schedule::Sinusoid { mean: 1.0, amplitude: 0.3, omega: 2.0 * std::f64::consts::PI / period, phase: 0.0 },
            crate::Schedule::winding_ramp(1, period),
            period,
            1,
        )
        .unwrap();
        let label = StateLabel::Su11 { k: 0.5, n: 0 };
        let r = protocol_berry_run(&build_su11_rep(0.5, 64).unwrap(), &p, label, 0.025, 4, 1).unwrap();
        assert!(r.deviation < 3e-3, "{r:?}");
        assert!(r.norm_drift < 1e-10);
    }

    #[test]
    fn doubling() {
        assert_eq!(doubling_periods(100.0, 4), vec![100.0, 200.0, 400.0, 800.0]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(8))]

        #[test]
        fn geometric_phase_is_gauge_invariant(a in -1.0f64..1.0, b in -1.0f64..1.0) {
            let period = 60.0;
            let g = build_su2_rep(0.5).unwrap();
            let p = DrivingProtocol::uniform_loop(Algebra::Su2, 1.0, 0.5, period, 1).unwrap();
            let label = StateLabel::Su2 { j: 0.5, mu: 0.5 };
            let ham = |t: f64| p.hamiltonian(t).matrix(&g);
            let reference = |t: f64| fixed_point_reference(&g, &p, label, 1, t);
            let chi = move |t: f64| a * (2.0 * PI * t / period).sin() + b * (1.0 - (4.0 * PI * t / period).cos());
            let regauged = |t: f64| reference(t).map(|v| v * Complex64::from_polar(1.0, chi(t)));
            let run = evolve(ham, &reference(0.0).unwrap(), period, 1200, 2).unwrap();
            let x = extract_phases(&run, reference, ham, label).unwrap();
            let y = extract_phases(&run, regauged, ham, label).unwrap();
            prop_assert!((x.geometric - y.geometric).abs() <= 1e-9);
        }
    }
}
