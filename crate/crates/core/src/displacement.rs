//! Displacement operators `D(xi) = exp(xi X+ - conj(xi) X-)` and the
//! closed-form similarity transforms `D^dag X D` of the generators.

use num_complex::Complex64;

use crate::algebra::{Algebra, GeneratorSet};
use crate::error::Result;
use crate::linalg::{expm, expm_multiply, real, submatrix, ComplexMatrix, ComplexVector, EXPM_TOL};

/// Coherent parameters `(tau, phi)` with `xi = -(tau/2) e^{-i phi}`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CoherentParams {
    pub tau: f64,
    pub phi: f64,
}

impl CoherentParams {
    pub fn new(tau: f64, phi: f64) -> Self {
        Self { tau, phi }
    }

    pub fn xi(&self) -> Complex64 {
        -Complex64::from_polar(self.tau / 2.0, -self.phi)
    }

    /// Parameters with the opposite group element, `D(-xi)`.
    pub fn inverse(&self) -> Self {
        Self { tau: -self.tau, phi: self.phi }
    }
}

/// Coefficients of the transformed generators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TransformCoeffs {
    /// `alpha = sinh(2|xi|)`, `beta = (cosh(2|xi|) - 1)/2`.
    Su11 { alpha: f64, beta: f64 },
    /// `delta = sin(2|xi|)`, `epsilon = (cos(2|xi|) - 1)/2`.
    Su2 { delta: f64, epsilon: f64 },
}

impl TransformCoeffs {
    pub fn new(algebra: Algebra, params: CoherentParams) -> Self {
        let r = 2.0 * params.xi().norm();
        match algebra {
            Algebra::Su11 => TransformCoeffs::Su11 { alpha: r.sinh(), beta: 0.5 * (r.cosh() - 1.0) },
            Algebra::Su2 => TransformCoeffs::Su2 { delta: r.sin(), epsilon: 0.5 * (r.cos() - 1.0) },
        }
    }

    /// `(2b+1)^2 - a^2` for su(1,1) and `(2e+1)^2 + d^2` for su(2); both are 1.
    pub fn identity_defect(&self) -> f64 {
        match *self {
            TransformCoeffs::Su11 { alpha, beta } => ((2.0 * beta + 1.0).powi(2) - alpha * alpha - 1.0).abs(),
            TransformCoeffs::Su2 { delta, epsilon } => ((2.0 * epsilon + 1.0).powi(2) + delta * delta - 1.0).abs(),
        }
    }
}

fn generator(gens: &GeneratorSet, params: CoherentParams) -> ComplexMatrix {
    let xi = params.xi();
    &gens.xplus * xi - &gens.xminus * xi.conj()
}

pub fn displacement_operator(gens: &GeneratorSet, params: CoherentParams) -> Result<ComplexMatrix> {
    expm(&generator(gens, params), EXPM_TOL)
}

/// `D(xi) v`, computed without forming `D`.
pub fn displace_vector(gens: &GeneratorSet, params: CoherentParams, v: &ComplexVector) -> Result<ComplexVector> {
    if params.tau == 0.0 {
        return Ok(v.clone());
    }
    expm_multiply(&generator(gens, params), v, 1e-16)
}

/// `D^dag X D` for each generator, from the closed-form table.
pub fn transformed_generators_closed_form(gens: &GeneratorSet, params: CoherentParams) -> GeneratorSet {
    let xi = params.xi();
    let modulus = xi.norm();
    if modulus == 0.0 {
        return gens.clone();
    }
    let unit = xi / modulus;
    let ratio = xi.conj() / xi; // xi^* / xi
    let (x0, xp, xm) = (&gens.x0, &gens.xplus, &gens.xminus);
    let mut out = gens.clone();
    match TransformCoeffs::new(gens.algebra, params) {
        TransformCoeffs::Su11 { alpha, beta } => {
            out.x0 = x0 * real(2.0 * beta + 1.0) + xp * (unit * alpha / 2.0) + xm * (unit.conj() * alpha / 2.0);
            out.xplus = x0 * (unit.conj() * alpha) + xp * real(beta + 1.0) + xm * (ratio * beta);
            out.xminus = x0 * (unit * alpha) + xm * real(beta + 1.0) + xp * (ratio.conj() * beta);
        }
        TransformCoeffs::Su2 { delta, epsilon } => {
            out.x0 = x0 * real(2.0 * epsilon + 1.0) + xp * (unit * delta / 2.0) + xm * (unit.conj() * delta / 2.0);
            out.xplus = x0 * (-unit.conj() * delta) + xp * real(epsilon + 1.0) + xm * (ratio * epsilon);
            out.xminus = x0 * (-unit * delta) + xm * real(epsilon + 1.0) + xp * (ratio.conj() * epsilon);
        }
    }
    out
}

/// Outcome of comparing matrix conjugation with the closed-form table.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityReport {
    /// Max over the three generators of the Frobenius distance on `window`.
    pub residual: f64,
    /// Basis indices where the truncated `D` is trusted.
    pub window: Vec<usize>,
}

/// Largest weight a column of `D` may put on the truncation edge and still
/// count as reliable.
pub const EDGE_LEAK_TOL: f64 = 1e-7;

/// Compare `D^dag X D` (dense conjugation) against the closed form.
///
/// A truncated su(1,1) ladder only reproduces the true `D` on levels whose
/// displaced image stays away from the truncation edge, so the comparison
/// runs over the guarded levels whose `D` column leaks at most
/// [`EDGE_LEAK_TOL`] onto the non-guarded levels.
pub fn verify_similarity(gens: &GeneratorSet, params: CoherentParams) -> Result<SimilarityReport> {
    let kept = gens.guarded_indices();
    if params.tau == 0.0 {
        return Ok(SimilarityReport { residual: 0.0, window: kept.to_vec() });
    }
    let d = displacement_operator(gens, params)?;
    let edge: Vec<usize> = (0..gens.dim()).filter(|i| !kept.contains(i)).collect();
    let window: Vec<usize> = kept
        .iter()
        .copied()
        .filter(|&i| edge.iter().map(|&r| d[(r, i)].norm_sqr()).sum::<f64>().sqrt() <= EDGE_LEAK_TOL)
        .collect();
    let closed = transformed_generators_closed_form(gens, params);
    let dd = d.adjoint();
    let residual = [(&gens.x0, &closed.x0), (&gens.xplus, &closed.xplus), (&gens.xminus, &closed.xminus)]
        .into_iter()
        .map(|(x, c)| {
            let conj = &dd * x * &d;
            submatrix(&(conj - c), &window).norm()
        })
        .fold(0.0, f64::max);
    Ok(SimilarityReport { residual, window })
}
