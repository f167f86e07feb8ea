//! Closed-form diagonalization of `c0 X0 + c1 X+ + c2 X-`.

use num_complex::Complex64;

use crate::algebra::{Algebra, GeneratorSet};
use crate::displacement::CoherentParams;
use crate::error::{Error, Result};
use crate::linalg::hermitian_eigenvalues;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearHamiltonian {
    pub algebra: Algebra,
    pub c0: f64,
    pub c1: Complex64,
    pub c2: Complex64,
}

impl LinearHamiltonian {
    pub fn new(algebra: Algebra, c0: f64, c1: Complex64, c2: Complex64) -> Self {
        Self { algebra, c0, c1, c2 }
    }

    /// Hermitian form with `c1 = lambda e^{i phi}`, `c2 = conj(c1)`.
    pub fn hermitian(algebra: Algebra, c0: f64, lambda: f64, phi: f64) -> Self {
        let c1 = Complex64::from_polar(lambda, phi);
        Self { algebra, c0, c1, c2: c1.conj() }
    }

    pub fn is_hermitian(&self) -> bool {
        (self.c2 - self.c1.conj()).norm() <= 1e-14 * (1.0 + self.c1.norm())
    }

    pub fn matrix(&self, gens: &GeneratorSet) -> crate::linalg::ComplexMatrix {
        gens.combine(self.c0, self.c1, self.c2)
    }

    /// `c0^2 - 4 c1 c2` (su(1,1)) or `c0^2 + 4 c1 c2` (su(2)).
    pub fn discriminant(&self) -> Complex64 {
        let prod = self.c1 * self.c2 * 4.0;
        match self.algebra {
            Algebra::Su11 => Complex64::new(self.c0 * self.c0, 0.0) - prod,
            Algebra::Su2 => Complex64::new(self.c0 * self.c0, 0.0) + prod,
        }
    }

    fn check_regime(&self) -> Result<()> {
        let off = self.c1.norm() + self.c2.norm();
        if off == 0.0 {
            return Ok(());
        }
        if self.c0 == 0.0 {
            return Err(Error::NoExactDiagonalization { discriminant: self.discriminant().re });
        }
        if self.algebra == Algebra::Su11 && self.discriminant().re <= 0.0 {
            return Err(Error::NoExactDiagonalization { discriminant: self.discriminant().re });
        }
        Ok(())
    }
}

/// Result of the closed-form diagonalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagResult {
    pub params: CoherentParams,
    pub energy_scale: f64,
    /// Size of the `X+`/`X-` coefficients left after the transform.
    pub residual_offdiag: f64,
}

/// `(tau, phi)` such that `D^dag H D` is proportional to `X0`.
///
/// Only Hermitian inputs are accepted; for them `phi = -arg(c1)`.
pub fn solve_coherent_params(h: &LinearHamiltonian) -> Result<CoherentParams> {
    if !h.is_hermitian() {
        return Err(Error::NonHermitian("coherent parameters need c2 = conj(c1)".into()));
    }
    h.check_regime()?;
    let lambda = h.c1.norm();
    if lambda == 0.0 {
        return Ok(CoherentParams::new(0.0, 0.0));
    }
    let ratio = 2.0 * lambda / h.c0;
    let tau = match h.algebra {
        Algebra::Su11 => ratio.atanh(),
        Algebra::Su2 => ratio.atan(),
    };
    let phi = (-h.c1.arg()).rem_euclid(2.0 * std::f64::consts::PI);
    Ok(CoherentParams::new(tau, phi))
}

/// Coefficient of `X0` after the transform: `sign(c0) sqrt(c0^2 -+ 4|c1|^2)`.
pub fn diagonal_energy_scale(h: &LinearHamiltonian) -> Result<f64> {
    if !h.is_hermitian() {
        return Err(Error::NonHermitian("use diagonal_energy_scale_complex".into()));
    }
    h.check_regime()?;
    Ok(h.c0.signum() * h.discriminant().re.sqrt())
}

/// Principal complex square root of the discriminant, for arbitrary `c1, c2`.
pub fn diagonal_energy_scale_complex(h: &LinearHamiltonian) -> Complex64 {
    h.discriminant().sqrt()
}

/// Full closed-form solution, with the leftover off-diagonal coefficients
/// `A1, A2` (resp. `B1, B2`) evaluated from the transform table.
pub fn diagonalize(h: &LinearHamiltonian) -> Result<DiagResult> {
    let params = solve_coherent_params(h)?;
    let energy_scale = diagonal_energy_scale(h)?;
    let (_, a1, a2) = transformed_coefficients(h, params);
    Ok(DiagResult { params, energy_scale, residual_offdiag: a1.norm().max(a2.norm()) })
}

/// Coefficients `(A0, A1, A2)` of `D^dag H D` in the basis `(X0, X+, X-)`.
pub fn transformed_coefficients(h: &LinearHamiltonian, params: CoherentParams) -> (Complex64, Complex64, Complex64) {
    let xi = params.xi();
    let m = xi.norm();
    let c0 = Complex64::new(h.c0, 0.0);
    if m == 0.0 {
        return (c0, h.c1, h.c2);
    }
    let u = xi / m;
    let ratio = xi / xi.conj();
    match crate::displacement::TransformCoeffs::new(h.algebra, params) {
        crate::displacement::TransformCoeffs::Su11 { alpha, beta } => (
            c0 * (2.0 * beta + 1.0) + u.conj() * alpha * h.c1 + u * alpha * h.c2,
            u * alpha / 2.0 * c0 + h.c1 * (beta + 1.0) + ratio * beta * h.c2,
            u.conj() * alpha / 2.0 * c0 + ratio.conj() * beta * h.c1 + h.c2 * (beta + 1.0),
        ),
        crate::displacement::TransformCoeffs::Su2 { delta, epsilon } => (
            c0 * (2.0 * epsilon + 1.0) - u.conj() * delta * h.c1 - u * delta * h.c2,
            u * delta / 2.0 * c0 + h.c1 * (epsilon + 1.0) + ratio * epsilon * h.c2,
            u.conj() * delta / 2.0 * c0 + ratio.conj() * epsilon * h.c1 + h.c2 * (epsilon + 1.0),
        ),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumReport {
    pub max_abs_dev: f64,
    pub levels_compared: usize,
}

/// Numerically diagonalize `H` in `rep` and compare with
/// `energy_scale * spectrum(X0)`.
///
/// su(1,1) compares the `dim/4` levels nearest the bottom of the spectrum
/// (the top when the scale is negative), su(2) compares all of them.
pub fn spectrum_check(h: &LinearHamiltonian, rep: &GeneratorSet) -> Result<SpectrumReport> {
    if !h.is_hermitian() {
        return Err(Error::NonHermitian("spectrum_check needs a Hermitian Hamiltonian".into()));
    }
    if h.algebra != rep.algebra {
        return Err(Error::DimensionMismatch(format!("{} Hamiltonian on {} generators", h.algebra, rep.algebra)));
    }
    let scale = diagonal_energy_scale(h)?;
    let mut numeric = hermitian_eigenvalues(&h.matrix(rep));
    let mut weights: Vec<f64> = (0..rep.dim()).map(|i| rep.weight(i)).collect();
    weights.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let count = match h.algebra {
        Algebra::Su2 => rep.dim(),
        Algebra::Su11 => rep.dim() / 4,
    };
    if scale < 0.0 {
        numeric.reverse();
    }
    let max_abs_dev = numeric
        .iter()
        .zip(weights.iter())
        .take(count)
        .map(|(e, w)| (e - scale * w).abs())
        .fold(0.0, f64::max);
    Ok(SpectrumReport { max_abs_dev, levels_compared: count })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_su11_rep, build_su2_rep};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn su11_reference_point() {
        let h = LinearHamiltonian::new(Algebra::Su11, 5.0, c(1.0), c(1.0));
        let p = solve_coherent_params(&h).unwrap();
        assert_abs_diff_eq!(p.tau, 0.4f64.atanh(), epsilon = 1e-15);
        assert_abs_diff_eq!(p.tau, 0.42365, epsilon = 1e-5);
        assert_eq!(p.phi, 0.0);
        assert_abs_diff_eq!(diagonal_energy_scale(&h).unwrap(), 21f64.sqrt(), epsilon = 1e-14);
        assert!(diagonalize(&h).unwrap().residual_offdiag < 1e-12);
    }

    #[test]
    fn su2_reference_point() {
        let h = LinearHamiltonian::new(Algebra::Su2, 1.0, c(0.5), c(0.5));
        let p = solve_coherent_params(&h).unwrap();
        assert_abs_diff_eq!(p.tau, PI / 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(diagonal_energy_scale(&h).unwrap(), 2f64.sqrt(), epsilon = 1e-14);
        assert!(diagonalize(&h).unwrap().residual_offdiag < 1e-12);
    }

    #[test]
    fn already_diagonal() {
        let h = LinearHamiltonian::new(Algebra::Su11, 3.0, c(0.0), c(0.0));
        assert_eq!(solve_coherent_params(&h).unwrap(), CoherentParams::new(0.0, 0.0));
        assert_eq!(diagonal_energy_scale(&h).unwrap(), 3.0);
        let r = spectrum_check(&h, &build_su11_rep(0.5, 16).unwrap()).unwrap();
        assert_eq!(r.max_abs_dev, 0.0);
    }

    #[test]
    fn hyperbolic_boundary_is_an_error() {
        let h = LinearHamiltonian::hermitian(Algebra::Su11, 2.0, 1.0, 0.3);
        assert!(matches!(solve_coherent_params(&h), Err(Error::NoExactDiagonalization { .. })));
        let h = LinearHamiltonian::hermitian(Algebra::Su11, 1.0, 1.0, 0.0);
        assert!(matches!(diagonal_energy_scale(&h), Err(Error::NoExactDiagonalization { .. })));
        let h = LinearHamiltonian::hermitian(Algebra::Su2, 0.0, 1.0, 0.0);
        assert!(matches!(solve_coherent_params(&h), Err(Error::NoExactDiagonalization { .. })));
    }

    #[test]
    fn near_boundary_scale_vanishes() {
        let h = LinearHamiltonian::hermitian(Algebra::Su11, 2.0 + 1e-9, 1.0, 0.0);
        assert!(diagonal_energy_scale(&h).unwrap() < 1e-4);
        assert!(solve_coherent_params(&h).unwrap().tau > 9.0);
    }

    #[test]
    fn non_hermitian_only_for_energy_scale() {
        let h = LinearHamiltonian::new(Algebra::Su11, 5.0, c(1.0), c(2.0));
        assert_abs_diff_eq!(diagonal_energy_scale_complex(&h).re, 17f64.sqrt(), epsilon = 1e-14);
        assert!(matches!(spectrum_check(&h, &build_su11_rep(0.5, 8).unwrap()), Err(Error::NonHermitian(_))));
    }

    #[test]
    fn spin_half_spectrum() {
        let h = LinearHamiltonian::new(Algebra::Su2, 1.0, c(0.5), c(0.5));
        let r = spectrum_check(&h, &build_su2_rep(0.5).unwrap()).unwrap();
        assert!(r.max_abs_dev <= 1e-12);
        assert_eq!(r.levels_compared, 2);
    }

    #[test]
    fn su11_lowest_quarter() {
        let h = LinearHamiltonian::new(Algebra::Su11, 5.0, c(1.0), c(1.0));
        let r = spectrum_check(&h, &build_su11_rep(0.5, 128).unwrap()).unwrap();
        assert_eq!(r.levels_compared, 32);
        assert!(r.max_abs_dev <= 1e-8, "{}", r.max_abs_dev);
    }

    #[test]
    fn negative_c0_flips_spectrum() {
        let h = LinearHamiltonian::hermitian(Algebra::Su11, -5.0, 1.0, 0.4);
        assert!(diagonal_energy_scale(&h).unwrap() < 0.0);
        assert!(diagonalize(&h).unwrap().residual_offdiag < 1e-12);
        let r = spectrum_check(&h, &build_su11_rep(0.5, 64).unwrap()).unwrap();
        assert!(r.max_abs_dev <= 1e-8);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn phase_covariance(chi in -PI..PI, lambda in 0.1f64..1.0, phi in 0.0f64..(2.0 * PI)) {
            for alg in [Algebra::Su11, Algebra::Su2] {
                let h = LinearHamiltonian::hermitian(alg, 3.0, lambda, phi);
                let h2 = LinearHamiltonian::hermitian(alg, 3.0, lambda, phi + chi);
                let (p, p2) = (solve_coherent_params(&h).unwrap(), solve_coherent_params(&h2).unwrap());
                prop_assert!((p.tau - p2.tau).abs() < 1e-14);
                prop_assert!(crate::linalg::wrap_angle(p2.phi - p.phi + chi).abs() < 1e-12);
                prop_assert!((diagonal_energy_scale(&h).unwrap() - diagonal_energy_scale(&h2).unwrap()).abs() < 1e-14);
                prop_assert!(diagonalize(&h2).unwrap().residual_offdiag < 1e-12);
            }
        }

        #[test]
        fn spectrum_invariant_under_phase_rotation(chi in -PI..PI) {
            let rep = build_su2_rep(1.5).unwrap();
            let h = LinearHamiltonian::hermitian(Algebra::Su2, 1.0, 0.7, chi);
            prop_assert!(spectrum_check(&h, &rep).unwrap().max_abs_dev < 1e-12);
        }
    }
}
