//! Lewis-Riesenfeld invariants of linear Hamiltonians: auxiliary equations,
//! phase bookkeeping, and adiabatic closed forms.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::algebra::{Algebra, GeneratorSet};
use crate::displacement::{displace_vector, CoherentParams};
use crate::error::{Error, Result};
use crate::linalg::{basis_vector, restricted_frobenius, wrap_angle, ComplexMatrix};
use crate::protocol::DrivingProtocol;
use crate::quad::{adaptive_simpson, simpson_uniform};

/// Below this, `sinh(theta)` (or `sin(theta)`) counts as zero.
const SINGULAR_EPS: f64 = 1e-12;
const DYNAMICAL_QUAD_TOL: f64 = 1e-10;

/// Parameters of the invariant, `xi = -(theta/2) e^{-i gamma}`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AuxiliaryState {
    pub theta: f64,
    pub gamma: f64,
}

impl AuxiliaryState {
    pub fn new(theta: f64, gamma: f64) -> Self {
        Self { theta, gamma }
    }

    pub fn params(&self) -> CoherentParams {
        CoherentParams::new(self.theta, self.gamma)
    }
}

/// Which eigenstate of the invariant is followed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateLabel {
    Su11 { k: f64, n: usize },
    Su2 { j: f64, mu: f64 },
}

impl StateLabel {
    pub fn algebra(&self) -> Algebra {
        match self {
            StateLabel::Su11 { .. } => Algebra::Su11,
            StateLabel::Su2 { .. } => Algebra::Su2,
        }
    }

    /// Eigenvalue of `X0` on the basis state: `k + n` or `mu`.
    pub fn weight(&self) -> f64 {
        match *self {
            StateLabel::Su11 { k, n } => k + n as f64,
            StateLabel::Su2 { mu, .. } => mu,
        }
    }

    /// Position in the representation basis.
    pub fn basis_index(&self) -> usize {
        match *self {
            StateLabel::Su11 { n, .. } => n,
            StateLabel::Su2 { j, mu } => (j - mu).round() as usize,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseBreakdown {
    pub total: f64,
    pub dynamical: f64,
    pub geometric: f64,
    pub label: StateLabel,
}

/// `cosh`/`sinh` for su(1,1), `cos`/`sin` for su(2).
fn hyp(algebra: Algebra, theta: f64) -> (f64, f64) {
    match algebra {
        Algebra::Su11 => (theta.cosh(), theta.sinh()),
        Algebra::Su2 => (theta.cos(), theta.sin()),
    }
}

/// `I = f(theta) X0 + (g(theta)/2)(e^{-i gamma} X+ + e^{i gamma} X-)`.
pub fn invariant_matrix(gens: &GeneratorSet, aux: AuxiliaryState) -> ComplexMatrix {
    let (c, s) = hyp(gens.algebra, aux.theta);
    let e = Complex64::from_polar(s / 2.0, -aux.gamma);
    &gens.x0 * Complex64::new(c, 0.0) + &gens.xplus * e + &gens.xminus * e.conj()
}

/// Right-hand side `(theta', gamma')` of the auxiliary equations.
pub fn auxiliary_rates(protocol: &DrivingProtocol, t: f64, aux: AuxiliaryState) -> Result<(f64, f64)> {
    let (c0, lambda, phi) = protocol.coefficients(t);
    let angle = phi + aux.gamma;
    let coupling = 2.0 * lambda * angle.cos();
    let (c, s) = hyp(protocol.algebra, aux.theta);
    let drag = if s.abs() < SINGULAR_EPS {
        if coupling.abs() > SINGULAR_EPS {
            return Err(Error::AuxiliarySingularity { t, coupling });
        }
        0.0
    } else {
        coupling * c / s
    };
    Ok((-2.0 * lambda * angle.sin(), c0 - drag))
}

fn rk4_step(protocol: &DrivingProtocol, t: f64, y: AuxiliaryState, h: f64) -> Result<AuxiliaryState> {
    let shift = |y: AuxiliaryState, k: (f64, f64), a: f64| AuxiliaryState::new(y.theta + a * k.0, y.gamma + a * k.1);
    let k1 = auxiliary_rates(protocol, t, y)?;
    let k2 = auxiliary_rates(protocol, t + h / 2.0, shift(y, k1, h / 2.0))?;
    let k3 = auxiliary_rates(protocol, t + h / 2.0, shift(y, k2, h / 2.0))?;
    let k4 = auxiliary_rates(protocol, t + h, shift(y, k3, h))?;
    Ok(AuxiliaryState::new(
        y.theta + h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
        y.gamma + h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
    ))
}

/// Uniformly sampled solution of the auxiliary equations on `[0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<AuxiliaryState>,
}

impl AuxTrajectory {
    pub fn step(&self) -> f64 {
        if self.times.len() < 2 {
            0.0
        } else {
            self.times[1] - self.times[0]
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Fixed-step RK4 integration. `gamma` is kept continuous; su(2) `theta`
/// is reported in `(-pi, pi]`.
pub fn integrate_auxiliary(protocol: &DrivingProtocol, init: AuxiliaryState, steps: usize) -> Result<AuxTrajectory> {
    if steps == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let h = protocol.period / steps as f64;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut y = init;
    times.push(0.0);
    states.push(y);
    for i in 0..steps {
        let t = i as f64 * h;
        let next = rk4_step(protocol, t, y, h)?;
        let (_, s_old) = hyp(protocol.algebra, y.theta);
        let (_, s_new) = hyp(protocol.algebra, next.theta);
        if s_old * s_new < 0.0 {
            let (_, lambda, phi) = protocol.coefficients(t + h);
            let coupling = 2.0 * lambda * (phi + next.gamma).cos();
            if coupling.abs() > SINGULAR_EPS {
                return Err(Error::AuxiliarySingularity { t: t + h, coupling });
            }
        }
        y = next;
        times.push((i + 1) as f64 * h);
        states.push(y);
    }
    if protocol.algebra == Algebra::Su2 {
        for s in &mut states {
            s.theta = wrap_angle(s.theta);
        }
    }
    Ok(AuxTrajectory { times, states })
}

/// Frobenius norm of `i dI/dt + [I, H]` on the guarded block, with `dI/dt`
/// by central differences of step `T * 1e-6` along the auxiliary flow
/// through `aux` at time `t`.
pub fn invariance_residual(gens: &GeneratorSet, protocol: &DrivingProtocol, aux: AuxiliaryState, t: f64) -> Result<f64> {
    let h = protocol.period * 1e-6;
    let plus = rk4_step(protocol, t, aux, h)?;
    let minus = rk4_step(protocol, t, aux, -h)?;
    let di = (invariant_matrix(gens, plus) - invariant_matrix(gens, minus)) * Complex64::new(0.0, 1.0 / (2.0 * h));
    let inv = invariant_matrix(gens, aux);
    let ham = protocol.hamiltonian(t).matrix(gens);
    let r = di + &inv * &ham - &ham * &inv;
    Ok(restricted_frobenius(&r, gens.guarded_indices()))
}

/// Frobenius norm of `H(t)` on the guarded block.
pub fn hamiltonian_norm(gens: &GeneratorSet, protocol: &DrivingProtocol, t: f64) -> f64 {
    restricted_frobenius(&protocol.hamiltonian(t).matrix(gens), gens.guarded_indices())
}

/// Stationary point of the auxiliary equations for the instantaneous
/// coefficients: `tanh(theta)` (or `tan`) `= 2 lambda cos(n pi)/c0`,
/// `gamma = n pi - phi`.
pub fn adiabatic_fixed_point(protocol: &DrivingProtocol, t: f64, branch: i64) -> Result<AuxiliaryState> {
    let (c0, lambda, phi) = protocol.coefficients(t);
    let sign = if branch.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let theta = match protocol.algebra {
        Algebra::Su11 => {
            if c0 <= 2.0 * lambda.abs() {
                return Err(Error::NoAdiabaticFixedPoint { t, c0, lambda });
            }
            (2.0 * lambda * sign / c0).atanh()
        }
        Algebra::Su2 => {
            if c0 == 0.0 {
                if lambda == 0.0 {
                    0.0
                } else {
                    return Err(Error::NoAdiabaticFixedPoint { t, c0, lambda });
                }
            } else {
                (2.0 * lambda * sign / c0).atan()
            }
        }
    };
    Ok(AuxiliaryState::new(theta, branch as f64 * PI - phi))
}

/// Scalar rate of the total phase for the eigenstate of weight `w`:
/// su(1,1): `w [(g' - c0)(cosh th - 1) + 2 lambda cos(g + phi) sinh th - c0]`,
/// su(2): `w [(g' - c0)(cos th - 1) - 2 lambda cos(g + phi) sin th - c0]`.
pub fn corrected_phase_rate(algebra: Algebra, weight: f64, c0: f64, lambda: f64, phi: f64, aux: AuxiliaryState, gamma_dot: f64) -> f64 {
    let (c, s) = hyp(algebra, aux.theta);
    let cross = 2.0 * lambda * (aux.gamma + phi).cos() * s;
    let body = match algebra {
        Algebra::Su11 => (gamma_dot - c0) * (c - 1.0) + cross - c0,
        Algebra::Su2 => (gamma_dot - c0) * (c - 1.0) - cross - c0,
    };
    weight * body
}

fn check_label(gens: &GeneratorSet, label: &StateLabel) -> Result<()> {
    if gens.algebra != label.algebra() || label.basis_index() >= gens.dim() {
        return Err(Error::DimensionMismatch(format!("label {label:?} on a {}-dimensional {} set", gens.dim(), gens.algebra)));
    }
    Ok(())
}

/// Total, dynamical and geometric phase along an auxiliary trajectory.
///
/// The eigenstate `D(xi(t))|basis>` is built explicitly; `<H>` is its matrix
/// expectation and `<i d/dt>` is `w gamma' (f(theta) - 1)`.
pub fn lr_phase_breakdown(gens: &GeneratorSet, protocol: &DrivingProtocol, traj: &AuxTrajectory, label: StateLabel) -> Result<PhaseBreakdown> {
    check_label(gens, &label)?;
    let basis = basis_vector(gens.dim(), label.basis_index());
    let w = label.weight();
    let mut energy = Vec::with_capacity(traj.len());
    let mut connection = Vec::with_capacity(traj.len());
    for (&t, &aux) in traj.times.iter().zip(&traj.states) {
        let v = displace_vector(gens, aux.params(), &basis)?;
        let hv = protocol.hamiltonian(t).matrix(gens) * &v;
        energy.push(v.dotc(&hv).re);
        let (_, gamma_dot) = auxiliary_rates(protocol, t, aux)?;
        let (c, _) = hyp(gens.algebra, aux.theta);
        connection.push(w * gamma_dot * (c - 1.0));
    }
    let h = traj.step();
    let dynamical = -simpson_uniform(&energy, h);
    let geometric = simpson_uniform(&connection, h);
    Ok(PhaseBreakdown { total: dynamical + geometric, dynamical, geometric, label })
}

pub fn lr_total_phase(gens: &GeneratorSet, protocol: &DrivingProtocol, traj: &AuxTrajectory, label: StateLabel) -> Result<f64> {
    Ok(lr_phase_breakdown(gens, protocol, traj, label)?.total)
}

/// Instantaneous diagonal energy scale `sign(c0) sqrt(c0^2 -+ 4 lambda^2)`.
pub fn adiabatic_energy_scale(algebra: Algebra, c0: f64, lambda: f64) -> f64 {
    let disc = match algebra {
        Algebra::Su11 => c0 * c0 - 4.0 * lambda * lambda,
        Algebra::Su2 => c0 * c0 + 4.0 * lambda * lambda,
    };
    c0.signum() * disc.max(0.0).sqrt()
}

/// `-w int_0^T sign(c0) sqrt(c0^2 -+ 4 lambda^2) dt`.
pub fn adiabatic_dynamical_phase(protocol: &DrivingProtocol, label: StateLabel) -> Result<f64> {
    protocol.check_admissible()?;
    let alg = protocol.algebra;
    let f = |t: f64| {
        let (c0, lambda, _) = protocol.coefficients(t);
        adiabatic_energy_scale(alg, c0, lambda)
    };
    let integral = if protocol.has_constant_magnitudes() {
        f(0.0) * protocol.period
    } else {
        adaptive_simpson(f, 0.0, protocol.period, DYNAMICAL_QUAD_TOL)
    };
    Ok(-label.weight() * integral)
}

/// `f(theta) - 1` at the adiabatic fixed point: `cosh(theta) - 1` with
/// `cosh(theta) = c0 / sqrt(c0^2 - 4 lambda^2)`, or `cos(theta) - 1` with
/// `cos(theta) = |c0| / sqrt(c0^2 + 4 lambda^2)`.
pub fn fixed_point_excess(algebra: Algebra, c0: f64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return 0.0;
    }
    match algebra {
        Algebra::Su11 => c0 / (c0 * c0 - 4.0 * lambda * lambda).sqrt() - 1.0,
        Algebra::Su2 => c0.abs() / (c0 * c0 + 4.0 * lambda * lambda).sqrt() - 1.0,
    }
}

/// Adiabatic Berry phase `-w oint (f(theta) - 1) d phi` for a closed loop.
///
/// The orientation is the one produced by transporting `D(xi(t))|basis>`
/// under `i d/dt psi = H psi`: the su(1,1) ground state with `c0 = 5`,
/// `lambda = 1`, winding +1 picks up about -0.28616.
pub fn berry_phase_closed_form(protocol: &DrivingProtocol, label: StateLabel) -> Result<f64> {
    if protocol.algebra != label.algebra() {
        return Err(Error::DimensionMismatch(format!("{:?} label on a {} protocol", label, protocol.algebra)));
    }
    protocol.check_admissible()?;
    let alg = protocol.algebra;
    let loop_integral = if protocol.has_constant_magnitudes() {
        let (c0, lambda, _) = protocol.coefficients(0.0);
        fixed_point_excess(alg, c0, lambda) * 2.0 * PI * protocol.winding as f64
    } else {
        let f = |t: f64| {
            let (c0, lambda, _) = protocol.coefficients(t);
            fixed_point_excess(alg, c0, lambda) * protocol.phi.derivative(t)
        };
        adaptive_simpson(f, 0.0, protocol.period, DYNAMICAL_QUAD_TOL)
    };
    Ok(-label.weight() * loop_integral)
}
