//! Time-dependent coefficient schedules and cyclic driving protocols.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::algebra::Algebra;
use crate::diagonalizer::LinearHamiltonian;
use crate::error::{Error, Result};

/// Number of points used when a protocol property is checked on a grid.
pub const CHECK_GRID: usize = 1001;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A real function of time with a derivative.
#[derive(Clone)]
pub enum Schedule {
    Constant(f64),
    Linear { start: f64, slope: f64 },
    /// `mean + amplitude * sin(omega t + phase)`
    Sinusoid { mean: f64, amplitude: f64, omega: f64, phase: f64 },
    Sum(Vec<Schedule>),
    /// Arbitrary callable; the derivative is taken by central differences.
    Custom(ScalarFn),
}

impl fmt::Debug for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Schedule::Constant(v) => write!(f, "Constant({v})"),
            Schedule::Linear { start, slope } => write!(f, "Linear {{ start: {start}, slope: {slope} }}"),
            Schedule::Sinusoid { mean, amplitude, omega, phase } => {
                write!(f, "Sinusoid {{ mean: {mean}, amplitude: {amplitude}, omega: {omega}, phase: {phase} }}")
            }
            Schedule::Sum(parts) => f.debug_tuple("Sum").field(parts).finish(),
            Schedule::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl Schedule {
    pub fn custom<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        Schedule::Custom(Arc::new(f))
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            Schedule::Constant(v) => *v,
            Schedule::Linear { start, slope } => start + slope * t,
            Schedule::Sinusoid { mean, amplitude, omega, phase } => mean + amplitude * (omega * t + phase).sin(),
            Schedule::Sum(parts) => parts.iter().map(|p| p.value(t)).sum(),
            Schedule::Custom(f) => f(t),
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match self {
            Schedule::Constant(_) => 0.0,
            Schedule::Linear { slope, .. } => *slope,
            Schedule::Sinusoid { amplitude, omega, phase, .. } => amplitude * omega * (omega * t + phase).cos(),
            Schedule::Sum(parts) => parts.iter().map(|p| p.derivative(t)).sum(),
            Schedule::Custom(f) => {
                let h = 1e-6 * t.abs().max(1.0);
                (f(t + h) - f(t - h)) / (2.0 * h)
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            Schedule::Constant(_) => true,
            Schedule::Linear { slope, .. } => *slope == 0.0,
            Schedule::Sinusoid { amplitude, omega, .. } => *amplitude == 0.0 || *omega == 0.0,
            Schedule::Sum(parts) => parts.iter().all(Schedule::is_constant),
            Schedule::Custom(_) => false,
        }
    }

    /// Phase ramp `2 pi winding t / period`.
    pub fn winding_ramp(winding: i64, period: f64) -> Self {
        Schedule::Linear { start: 0.0, slope: 2.0 * PI * winding as f64 / period }
    }
}

/// `c0(t) X0 + lambda(t) (e^{i phi(t)} X+ + e^{-i phi(t)} X-)` over one
/// period in which `phi` winds `winding` times.
#[derive(Debug, Clone)]
pub struct DrivingProtocol {
    pub algebra: Algebra,
    pub c0: Schedule,
    pub lambda: Schedule,
    pub phi: Schedule,
    pub period: f64,
    pub winding: i64,
}

impl DrivingProtocol {
    pub fn new(algebra: Algebra, c0: Schedule, lambda: Schedule, phi: Schedule, period: f64, winding: i64) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidProtocol(format!("period {period} must be positive")));
        }
        let p = Self { algebra, c0, lambda, phi, period, winding };
        for i in 0..CHECK_GRID {
            let t = p.grid_time(i);
            let (a, l, f) = p.coefficients(t);
            if !(a.is_finite() && l.is_finite() && f.is_finite()) {
                return Err(Error::InvalidProtocol(format!("non-finite schedule value at t = {t}")));
            }
        }
        let net = p.phi.value(period) - p.phi.value(0.0);
        let expected = 2.0 * PI * winding as f64;
        if (net - expected).abs() > 1e-9 * expected.abs().max(1.0) {
            return Err(Error::InvalidProtocol(format!(
                "phi winds by {net} over the period, expected 2 pi * {winding}"
            )));
        }
        Ok(p)
    }

    /// Constant `c0`, `lambda` and a uniform phase ramp.
    pub fn uniform_loop(algebra: Algebra, c0: f64, lambda: f64, period: f64, winding: i64) -> Result<Self> {
        Self::new(
            algebra,
            Schedule::Constant(c0),
            Schedule::Constant(lambda),
            Schedule::winding_ramp(winding, period),
            period,
            winding,
        )
    }

    pub fn with_period(&self, period: f64) -> Result<Self> {
        let phi = match &self.phi {
            Schedule::Linear { start, .. } => Schedule::Linear { start: *start, slope: 2.0 * PI * self.winding as f64 / period },
            other => {
                let (old, inner) = (self.period, other.clone());
                Schedule::custom(move |t| inner.value(t * old / period))
            }
        };
        Self::new(self.algebra, self.c0.clone(), self.lambda.clone(), phi, period, self.winding)
    }

    fn grid_time(&self, i: usize) -> f64 {
        self.period * i as f64 / (CHECK_GRID - 1) as f64
    }

    /// `(c0, lambda, phi)` at time `t`.
    pub fn coefficients(&self, t: f64) -> (f64, f64, f64) {
        (self.c0.value(t), self.lambda.value(t), self.phi.value(t))
    }

    pub fn hamiltonian(&self, t: f64) -> LinearHamiltonian {
        let (c0, lambda, phi) = self.coefficients(t);
        LinearHamiltonian::hermitian(self.algebra, c0, lambda, phi)
    }

    pub fn has_constant_magnitudes(&self) -> bool {
        self.c0.is_constant() && self.lambda.is_constant()
    }

    /// su(1,1) requires `c0 > 2 |lambda|` everywhere; su(2) requires `c0 != 0`
    /// wherever `lambda != 0`.
    pub fn check_admissible(&self) -> Result<()> {
        for i in 0..CHECK_GRID {
            let t = self.grid_time(i);
            let (c0, lambda, _) = self.coefficients(t);
            let bad = match self.algebra {
                Algebra::Su11 => c0 <= 2.0 * lambda.abs(),
                Algebra::Su2 => c0 == 0.0 && lambda != 0.0,
            };
            if bad {
                return Err(Error::NoAdiabaticFixedPoint { t, c0, lambda });
            }
        }
        Ok(())
    }
}
