//! Dense complex matrix helpers.
//!
//! Everything downstream works on `nalgebra` dense matrices of `Complex64`.
//! Only the pieces this crate needs live here: commutators, restricted
//! Frobenius norms, a scaling-and-squaring exponential, the action of an
//! exponential on a vector, and Hermitian eigenvalues.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

/// Default relative tolerance for the exponential kernels.
pub const EXPM_TOL: f64 = 1e-13;

const MAX_SQUARINGS: u32 = 64;
const MAX_TAYLOR_TERMS: usize = 80;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn identity(dim: usize) -> ComplexMatrix {
    ComplexMatrix::identity(dim, dim)
}

pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b - b * a
}

/// Kronecker product, row-major over (first factor, second factor).
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn frobenius(m: &ComplexMatrix) -> f64 {
    m.norm()
}

/// Frobenius norm of the principal sub-block picked out by `kept`.
pub fn restricted_frobenius(m: &ComplexMatrix, kept: &[usize]) -> f64 {
    let mut acc = 0.0;
    for &i in kept {
        for &j in kept {
            acc += m[(i, j)].norm_sqr();
        }
    }
    acc.sqrt()
}

/// Principal sub-block on the index list `idx` (in the given order).
pub fn submatrix(m: &ComplexMatrix, idx: &[usize]) -> ComplexMatrix {
    ComplexMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])])
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn hermiticity_defect(m: &ComplexMatrix) -> f64 {
    (m - m.adjoint()).norm()
}

fn norm_one(m: &ComplexMatrix) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring around a truncated Taylor
/// series. The series is summed until the next term is below `tol` relative
/// to the partial sum; the scaled matrix has 1-norm at most 1/2, so that
/// happens within a couple of dozen terms.
pub fn expm(a: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::DimensionMismatch(format!("expm of {}x{} matrix", n, a.ncols())));
    }
    let norm = norm_one(a);
    if !norm.is_finite() {
        return Err(Error::ExpNotConverged { norm });
    }
    let mut squarings = 0u32;
    if norm > 0.5 {
        squarings = (norm / 0.5).log2().ceil() as u32;
    }
    if squarings > MAX_SQUARINGS {
        return Err(Error::ExpNotConverged { norm });
    }
    let scaled = a * real(0.5f64.powi(squarings as i32));

    let mut sum = identity(n);
    let mut term = identity(n);
    let mut converged = false;
    for k in 1..=MAX_TAYLOR_TERMS {
        term = &term * &scaled * real(1.0 / k as f64);
        sum += &term;
        if norm_one(&term) <= tol * norm_one(&sum) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::ExpNotConverged { norm });
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    if !is_finite(&sum) {
        return Err(Error::ExpNotConverged { norm });
    }
    Ok(sum)
}

/// Row-compressed copy of a dense matrix, used for repeated matrix-vector
/// products with the banded generators.
#[derive(Debug, Clone)]
pub struct SparseRows {
    rows: Vec<Vec<(usize, Complex64)>>,
    norm_one: f64,
}

impl SparseRows {
    pub fn from_dense(m: &ComplexMatrix) -> Self {
        let mut col_sums = vec![0.0; m.ncols()];
        let rows = (0..m.nrows())
            .map(|i| {
                let mut row = Vec::new();
                for j in 0..m.ncols() {
                    let z = m[(i, j)];
                    if z.re != 0.0 || z.im != 0.0 {
                        col_sums[j] += z.norm();
                        row.push((j, z));
                    }
                }
                row
            })
            .collect();
        let norm_one = col_sums.into_iter().fold(0.0, f64::max);
        Self { rows, norm_one }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn norm_one(&self) -> f64 {
        self.norm_one
    }

    pub fn mul_vec(&self, v: &ComplexVector) -> ComplexVector {
        ComplexVector::from_iterator(
            self.rows.len(),
            self.rows.iter().map(|row| row.iter().map(|&(j, z)| z * v[j]).sum::<Complex64>()),
        )
    }

    /// `exp(scale * M) v` by sub-stepped Taylor series.
    pub fn exp_mul(&self, scale: Complex64, v: &ComplexVector, tol: f64) -> Result<ComplexVector> {
        let norm = self.norm_one * scale.norm();
        if !norm.is_finite() {
            return Err(Error::ExpNotConverged { norm });
        }
        let substeps = norm.ceil().max(1.0) as usize;
        let h = scale / substeps as f64;
        let mut out = v.clone();
        for _ in 0..substeps {
            let base = out.norm();
            let mut term = out.clone();
            let mut small = 0;
            let mut converged = false;
            for k in 1..=MAX_TAYLOR_TERMS {
                term = self.mul_vec(&term) * (h / k as f64);
                out += &term;
                if term.norm() <= tol * base {
                    small += 1;
                    if small == 2 {
                        converged = true;
                        break;
                    }
                } else {
                    small = 0;
                }
            }
            if !converged {
                return Err(Error::ExpNotConverged { norm });
            }
        }
        Ok(out)
    }
}

/// `exp(a) v` without forming the dense exponential.
pub fn expm_multiply(a: &ComplexMatrix, v: &ComplexVector, tol: f64) -> Result<ComplexVector> {
    SparseRows::from_dense(a).exp_mul(real(1.0), v, tol)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let eig = m.clone().symmetric_eigen();
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals
}

/// Multiply by a global phase so the first amplitude above `cutoff` is real
/// and positive.
pub fn fix_gauge(v: &mut ComplexVector, cutoff: f64) {
    if let Some(z) = v.iter().copied().find(|z| z.norm() > cutoff) {
        let phase = z.conj() / z.norm();
        for x in v.iter_mut() {
            *x *= phase;
        }
    }
}

pub fn basis_vector(dim: usize, index: usize) -> ComplexVector {
    let mut v = ComplexVector::zeros(dim);
    v[index] = real(1.0);
    v
}

/// Wrap an angle into (-pi, pi].
pub fn wrap_angle(x: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut y = x.rem_euclid(two_pi);
    if y > std::f64::consts::PI {
        y -= two_pi;
    }
    y
}
