//! Three-mode trilinear (Tavis-Cummings type) Hamiltonian
//! `w1 a'a + w2 b'b + w3 c'c + lambda (a' b c e^{-i phi} + a b' c' e^{i phi})`,
//! its conserved sectors and its su(1,1) / su(2) reductions.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::algebra::{check_product, Algebra};
use crate::diagonalizer::LinearHamiltonian;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::lr::{adiabatic_energy_scale, berry_phase_closed_form, StateLabel};
use crate::protocol::{DrivingProtocol, Schedule};
use crate::quad::adaptive_simpson;

#[derive(Debug, Clone)]
pub struct TCParams {
    pub omega1: Schedule,
    pub omega2: Schedule,
    pub omega3: Schedule,
    pub lambda: Schedule,
    pub phi: Schedule,
    pub period: f64,
    pub winding: i64,
}

/// Frequencies and coupling at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TCSnapshot {
    pub omega1: f64,
    pub omega2: f64,
    pub omega3: f64,
    pub lambda: f64,
    pub phi: f64,
}

impl TCParams {
    /// Constant frequencies and coupling with a uniform phase ramp.
    pub fn uniform(omega1: f64, omega2: f64, omega3: f64, lambda: f64, period: f64, winding: i64) -> Self {
        Self {
            omega1: Schedule::Constant(omega1),
            omega2: Schedule::Constant(omega2),
            omega3: Schedule::Constant(omega3),
            lambda: Schedule::Constant(lambda),
            phi: Schedule::winding_ramp(winding, period),
            period,
            winding,
        }
    }

    pub fn at(&self, t: f64) -> TCSnapshot {
        TCSnapshot {
            omega1: self.omega1.value(t),
            omega2: self.omega2.value(t),
            omega3: self.omega3.value(t),
            lambda: self.lambda.value(t),
            phi: self.phi.value(t),
        }
    }

    fn is_frozen(&self) -> bool {
        [&self.omega1, &self.omega2, &self.omega3, &self.lambda].iter().all(|s| s.is_constant())
    }

    /// Loop averages of the frequencies and coupling; `phi` is taken at `t = 0`.
    pub fn averaged(&self) -> TCSnapshot {
        if self.is_frozen() {
            return self.at(0.0);
        }
        let avg = |s: &Schedule| adaptive_simpson(|t| s.value(t), 0.0, self.period, 1e-12) / self.period;
        TCSnapshot {
            omega1: avg(&self.omega1),
            omega2: avg(&self.omega2),
            omega3: avg(&self.omega3),
            lambda: avg(&self.lambda),
            phi: self.phi.value(0.0),
        }
    }
}

/// Mode dimensions `(d_a, d_b, d_c)`.
pub type ModeDims = (usize, usize, usize);

fn flat(dims: ModeDims, na: usize, nb: usize, nc: usize) -> usize {
    (na * dims.1 + nb) * dims.2 + nc
}

pub fn build_trilinear_hamiltonian(params: &TCParams, dims: ModeDims, t: f64) -> Result<ComplexMatrix> {
    for d in [dims.0, dims.1, dims.2] {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
    }
    let total = check_product(&[dims.0, dims.1, dims.2])?;
    let s = params.at(t);
    let mut h = ComplexMatrix::zeros(total, total);
    let hop = Complex64::from_polar(s.lambda, -s.phi);
    for na in 0..dims.0 {
        for nb in 0..dims.1 {
            for nc in 0..dims.2 {
                let i = flat(dims, na, nb, nc);
                h[(i, i)] = Complex64::new(s.omega1 * na as f64 + s.omega2 * nb as f64 + s.omega3 * nc as f64, 0.0);
                // a' b c
                if na + 1 < dims.0 && nb > 0 && nc > 0 {
                    let f = ((na + 1) as f64 * nb as f64 * nc as f64).sqrt();
                    let k = flat(dims, na + 1, nb - 1, nc - 1);
                    h[(k, i)] = hop * f;
                    h[(i, k)] = hop.conj() * f;
                }
            }
        }
    }
    Ok(h)
}

/// Invariant subspace with `n_a + n_b = s_ab` and `n_a + n_c = s_ac`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SectorSpec {
    pub s_ab: usize,
    pub s_ac: usize,
}

impl SectorSpec {
    pub fn new(s_ab: usize, s_ac: usize) -> Self {
        Self { s_ab, s_ac }
    }

    /// `N_d = n_b - n_c`, the same for every state in the sector.
    pub fn n_d(&self) -> i64 {
        self.s_ab as i64 - self.s_ac as i64
    }

    /// Member states `(n_a, n_b, n_c)` inside `dims`, by descending `n_a`.
    pub fn states(&self, dims: ModeDims) -> Vec<(usize, usize, usize)> {
        (0..=self.s_ab.min(self.s_ac))
            .rev()
            .map(|na| (na, self.s_ab - na, self.s_ac - na))
            .filter(|&(na, nb, nc)| na < dims.0 && nb < dims.1 && nc < dims.2)
            .collect()
    }

    /// Smallest mode dimensions holding the whole sector.
    pub fn minimal_dims(&self) -> ModeDims {
        let m = self.s_ab.min(self.s_ac);
        ((m + 1).max(2), (self.s_ab + 1).max(2), (self.s_ac + 1).max(2))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SectorBlock {
    pub states: Vec<(usize, usize, usize)>,
    pub indices: Vec<usize>,
    pub matrix: ComplexMatrix,
    /// Frobenius norm of `P H (1 - P)`.
    pub leakage: f64,
}

pub fn extract_sector(h: &ComplexMatrix, dims: ModeDims, sector: SectorSpec) -> Result<SectorBlock> {
    let states = sector.states(dims);
    if states.is_empty() {
        return Err(Error::EmptySector { s_ab: sector.s_ab, s_ac: sector.s_ac });
    }
    if h.nrows() != dims.0 * dims.1 * dims.2 {
        return Err(Error::DimensionMismatch(format!("{}x{} matrix for dims {:?}", h.nrows(), h.ncols(), dims)));
    }
    let indices: Vec<usize> = states.iter().map(|&(a, b, c)| flat(dims, a, b, c)).collect();
    let matrix = crate::linalg::submatrix(h, &indices);
    let mut inside = vec![false; h.nrows()];
    for &i in &indices {
        inside[i] = true;
    }
    let mut leak = 0.0;
    for &j in &indices {
        for i in 0..h.nrows() {
            if !inside[i] {
                leak += h[(i, j)].norm_sqr();
            }
        }
    }
    Ok(SectorBlock { states, indices, matrix, leakage: leak.sqrt() })
}

/// Sector block built directly from the matrix elements, without the
/// full three-mode space. Same state order as [`extract_sector`].
pub fn sector_hamiltonian(params: &TCParams, sector: SectorSpec, t: f64) -> Result<SectorBlock> {
    let states = sector.states((usize::MAX, usize::MAX, usize::MAX));
    if states.is_empty() {
        return Err(Error::EmptySector { s_ab: sector.s_ab, s_ac: sector.s_ac });
    }
    let s = params.at(t);
    let hop = Complex64::from_polar(s.lambda, -s.phi);
    let dim = states.len();
    let mut matrix = ComplexMatrix::zeros(dim, dim);
    for (i, &(na, nb, nc)) in states.iter().enumerate() {
        matrix[(i, i)] = Complex64::new(s.omega1 * na as f64 + s.omega2 * nb as f64 + s.omega3 * nc as f64, 0.0);
        // states[i - 1] has one more quantum in a
        if i > 0 {
            let f = ((na + 1) as f64 * nb as f64 * nc as f64).sqrt();
            matrix[(i - 1, i)] = hop * f;
            matrix[(i, i - 1)] = hop.conj() * f;
        }
    }
    Ok(SectorBlock { states, indices: (0..dim).collect(), matrix, leakage: 0.0 })
}

/// Linear su(1,1) part and the scalar pieces left over:
/// `H = w1 n_a + H_lin + nd_coefficient N_d + offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Su11Reduction {
    pub hamiltonian: LinearHamiltonian,
    pub nd_coefficient: f64,
    pub offset: f64,
    pub na_coefficient: f64,
}

/// `H = ns_coefficient N_s + H_lin + nc_coefficient n_c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Su2Reduction {
    pub hamiltonian: LinearHamiltonian,
    pub ns_coefficient: f64,
    pub nc_coefficient: f64,
}

/// `K0 = (b'b + c'c + 1)/2`, `K+ = b'c'`, with `a -> sqrt(n_a)`.
pub fn decompose_su11(params: &TCParams, t: f64, n_a_reference: usize) -> Su11Reduction {
    let s = params.at(t);
    let sum = s.omega2 + s.omega3;
    Su11Reduction {
        hamiltonian: LinearHamiltonian::hermitian(Algebra::Su11, sum, s.lambda * (n_a_reference as f64).sqrt(), s.phi),
        nd_coefficient: (s.omega2 - s.omega3) / 2.0,
        offset: -sum / 2.0,
        na_coefficient: s.omega1,
    }
}

/// `J0 = (b'b - a'a)/2`, `J+ = b'a`, with `c -> sqrt(n_c)`.
pub fn decompose_su2(params: &TCParams, t: f64, n_c_reference: usize) -> Su2Reduction {
    let s = params.at(t);
    Su2Reduction {
        hamiltonian: LinearHamiltonian::hermitian(
            Algebra::Su2,
            s.omega2 - s.omega1,
            s.lambda * (n_c_reference as f64).sqrt(),
            s.phi,
        ),
        ns_coefficient: (s.omega1 + s.omega2) / 2.0,
        nc_coefficient: s.omega3,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TcBranch {
    Su11,
    Su2,
}

/// Quantum numbers of a three-mode state in oscillator form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TcLabels {
    /// `|n_a, n_l, n_l + m_n>`, `k = (m_n + 1)/2`, `n = n_l`.
    Su11 { n_a: usize, n_l: usize, m_n: usize },
    /// `|n_l, n_l + m_n, n_c>`, `j = n_l + m_n/2`, `mu = m_n/2`.
    Su2 { n_l: usize, m_n: usize, n_c: usize },
}

impl TcLabels {
    pub fn branch(&self) -> TcBranch {
        match self {
            TcLabels::Su11 { .. } => TcBranch::Su11,
            TcLabels::Su2 { .. } => TcBranch::Su2,
        }
    }

    pub fn mode_occupations(&self) -> (usize, usize, usize) {
        match *self {
            TcLabels::Su11 { n_a, n_l, m_n } => (n_a, n_l, n_l + m_n),
            TcLabels::Su2 { n_l, m_n, n_c } => (n_l, n_l + m_n, n_c),
        }
    }

    pub fn sector(&self) -> SectorSpec {
        let (a, b, c) = self.mode_occupations();
        SectorSpec::new(a + b, a + c)
    }

    pub fn state_label(&self) -> StateLabel {
        match *self {
            TcLabels::Su11 { n_l, m_n, .. } => StateLabel::Su11 { k: (m_n as f64 + 1.0) / 2.0, n: n_l },
            TcLabels::Su2 { n_l, m_n, .. } => StateLabel::Su2 { j: n_l as f64 + m_n as f64 / 2.0, mu: m_n as f64 / 2.0 },
        }
    }

    /// Occupation of the mode replaced by a c-number in the reduction.
    pub fn reference_occupation(&self) -> usize {
        match *self {
            TcLabels::Su11 { n_a, .. } => n_a,
            TcLabels::Su2 { n_c, .. } => n_c,
        }
    }
}

fn su11_discriminant(s: &TCSnapshot, n_a: usize) -> f64 {
    let sum = s.omega2 + s.omega3;
    sum * sum - 4.0 * s.lambda * s.lambda * n_a as f64
}

/// Adiabatic energy of the labelled state:
/// su(1,1): `sqrt((w2+w3)^2 - 4 lambda^2 n_a)(n_l + m_n/2 + 1/2) + w1 n_a + (w3-w2) m_n/2 - (w2+w3)/2`,
/// su(2): `sign(w2-w1) sqrt((w2-w1)^2 + 4 lambda^2 n_c) m_n/2 + (w1+w2)(n_l + m_n/2) + w3 n_c`.
pub fn tc_dynamical_energy(params: &TCParams, t: f64, labels: TcLabels) -> Result<f64> {
    let s = params.at(t);
    match labels {
        TcLabels::Su11 { n_a, n_l, m_n } => {
            let disc = su11_discriminant(&s, n_a);
            if disc <= 0.0 {
                return Err(Error::HyperbolicSingularity { discriminant: disc });
            }
            let (nl, mn) = (n_l as f64, m_n as f64);
            Ok(disc.sqrt() * (nl + mn / 2.0 + 0.5) + s.omega1 * n_a as f64 + (s.omega3 - s.omega2) * mn / 2.0
                - (s.omega2 + s.omega3) / 2.0)
        }
        TcLabels::Su2 { n_l, m_n, n_c } => {
            let (nl, mn) = (n_l as f64, m_n as f64);
            let scale = adiabatic_energy_scale(Algebra::Su2, s.omega2 - s.omega1, s.lambda * (n_c as f64).sqrt());
            Ok(scale * mn / 2.0 + (s.omega1 + s.omega2) * (nl + mn / 2.0) + s.omega3 * n_c as f64)
        }
    }
}

/// How time-dependent frequencies enter the closed-form Berry phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TcBerryMode {
    /// Loop-averaged frequencies and coupling.
    #[default]
    Frozen,
    /// `oint (f(theta(t)) - 1) d phi` along the loop.
    PerCycle,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TcBerry {
    /// Value in the transport orientation used throughout the crate.
    pub value: f64,
    /// The same magnitude with the opposite orientation, as the textbook
    /// `(2 n_l + m_n + 1) pi (...)` and `pi m_n (...)` forms are usually
    /// quoted.
    pub printed: f64,
}

/// Linear driving protocol of the reduced model.
pub fn reduced_protocol(params: &TCParams, labels: TcLabels) -> Result<DrivingProtocol> {
    let root = (labels.reference_occupation() as f64).sqrt();
    let (c0, algebra) = match labels.branch() {
        TcBranch::Su11 => (Schedule::Sum(vec![params.omega2.clone(), params.omega3.clone()]), Algebra::Su11),
        TcBranch::Su2 => {
            let (w1, w2) = (params.omega1.clone(), params.omega2.clone());
            (Schedule::Sum(vec![w2, scaled(w1, -1.0)]), Algebra::Su2)
        }
    };
    DrivingProtocol::new(algebra, c0, scaled(params.lambda.clone(), root), params.phi.clone(), params.period, params.winding)
}

fn scaled(s: Schedule, factor: f64) -> Schedule {
    match s {
        Schedule::Constant(v) => Schedule::Constant(v * factor),
        other => Schedule::custom(move |t| factor * other.value(t)),
    }
}

pub fn tc_berry_phase(params: &TCParams, labels: TcLabels, mode: TcBerryMode) -> Result<TcBerry> {
    let s = params.averaged();
    let w = params.winding as f64;
    let printed = match labels {
        TcLabels::Su11 { n_a, n_l, m_n } => {
            let disc = su11_discriminant(&s, n_a);
            if disc <= 0.0 {
                return Err(Error::HyperbolicSingularity { discriminant: disc });
            }
            let root = disc.sqrt();
            (2 * n_l + m_n + 1) as f64 * ((s.omega2 + s.omega3) - root) / root * PI * w
        }
        TcLabels::Su2 { m_n, n_c, .. } => {
            let d = s.omega2 - s.omega1;
            let root = (d * d + 4.0 * s.lambda * s.lambda * n_c as f64).sqrt();
            PI * m_n as f64 * (d.abs() - root) / root * w
        }
    };
    let value = match mode {
        TcBerryMode::Frozen => -printed,
        TcBerryMode::PerCycle => {
            let protocol = reduced_protocol(params, labels)?;
            berry_phase_closed_form(&protocol, labels.state_label()).map_err(|e| match e {
                Error::NoAdiabaticFixedPoint { c0, lambda, .. } => {
                    Error::HyperbolicSingularity { discriminant: c0 * c0 - 4.0 * lambda * lambda }
                }
                other => other,
            })?
        }
    };
    Ok(TcBerry { value, printed })
}
