//! Perelomov number coherent states from their double series, and the
//! corresponding coordinate-space wavefunctions on a polar grid.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

use crate::algebra::{is_half_integer, Algebra, RepSpec};
use crate::displacement::CoherentParams;
use crate::error::{Error, Result};
use crate::linalg::ComplexVector;

/// Outer-sum stopping rule: this many consecutive norm increments below
/// `SERIES_STEP_TOL`.
const SERIES_QUIET_TERMS: usize = 3;
const SERIES_STEP_TOL: f64 = 1e-14;
const SERIES_TAIL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct NumberCoherentState {
    pub spec: RepSpec,
    pub zeta: Complex64,
    pub eta: f64,
    /// `n` for su(1,1); basis index of `mu` (that is `j - mu`) for su(2).
    pub base_label: usize,
    pub amplitudes: ComplexVector,
}

impl NumberCoherentState {
    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }
}

/// `zeta = -tanh(tau/2) e^{-i phi}` (su(1,1)) or `-tan(tau/2) e^{-i phi}`
/// (su(2)), with `eta = ln(1 -+ |zeta|^2)`.
pub fn zeta_from_params(algebra: Algebra, params: CoherentParams) -> Result<(Complex64, f64)> {
    let half = params.tau / 2.0;
    let modulus = match algebra {
        Algebra::Su11 => half.tanh(),
        Algebra::Su2 => {
            if half.cos().abs() < 1e-12 {
                return Err(Error::TanPole(params.tau));
            }
            half.tan()
        }
    };
    let zeta = -Complex64::from_polar(modulus, -params.phi);
    let eta = match algebra {
        Algebra::Su11 => (-zeta.norm_sqr()).ln_1p(),
        Algebra::Su2 => zeta.norm_sqr().ln_1p(),
    };
    Ok((zeta, eta))
}

fn powu(z: Complex64, n: usize) -> Complex64 {
    if n == 0 {
        Complex64::new(1.0, 0.0)
    } else {
        z.powu(n as u32)
    }
}

fn lnfact(n: usize) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

/// su(1,1) number coherent state `D(xi)|k, n>` from its double series.
pub fn pncs_su11_series(k: f64, n: usize, zeta: Complex64, trunc_dim: usize) -> Result<NumberCoherentState> {
    if !k.is_finite() || k <= 0.0 {
        return Err(Error::InvalidBargmannIndex(k));
    }
    if n >= trunc_dim {
        return Err(Error::InvalidDimension(trunc_dim));
    }
    if zeta.norm() >= 1.0 || zeta.norm().is_nan() {
        return Err(Error::InvalidProtocol(format!("|zeta| = {} is outside the unit disc", zeta.norm())));
    }
    let eta = (-zeta.norm_sqr()).ln_1p();
    let mzc = -zeta.conj();
    let mut amps = ComplexVector::zeros(trunc_dim);
    let mut norm_sq = 0.0;
    let mut quiet = 0;
    let mut converged = false;
    let twok = 2.0 * k;
    let nf = n as f64;
    for s in 0.. {
        if s > trunc_dim {
            break;
        }
        let zs = powu(zeta, s);
        for j in 0..=n {
            let idx = n - j + s;
            if idx >= trunc_dim {
                continue;
            }
            let (jf, sf) = (j as f64, s as f64);
            let lg = 0.5 * (ln_gamma(twok + nf) + ln_gamma(twok + nf - jf + sf)) - ln_gamma(twok + nf - jf)
                + 0.5 * (lnfact(n) + lnfact(idx))
                - lnfact(n - j)
                - lnfact(s)
                - lnfact(j);
            let w = (eta * (k + nf - jf) + lg).exp();
            amps[idx] += zs * powu(mzc, j) * w;
        }
        let new_norm = amps.norm_squared();
        if (new_norm - norm_sq).abs() < SERIES_STEP_TOL && s >= n {
            quiet += 1;
            if quiet >= SERIES_QUIET_TERMS {
                converged = true;
                norm_sq = new_norm;
                break;
            }
        } else {
            quiet = 0;
        }
        norm_sq = new_norm;
    }
    let tail = (1.0 - norm_sq).abs();
    if !converged || tail > SERIES_TAIL_TOL {
        return Err(Error::SeriesNotConverged { tail });
    }
    amps /= Complex64::new(norm_sq.sqrt(), 0.0);
    Ok(NumberCoherentState {
        spec: RepSpec { algebra: Algebra::Su11, index: k, trunc_dim },
        zeta,
        eta,
        base_label: n,
        amplitudes: amps,
    })
}

fn check_weight(j: f64, mu: f64) -> Result<()> {
    if !j.is_finite() || j <= 0.0 || !is_half_integer(j) {
        return Err(Error::InvalidSpin(j));
    }
    let diff = j - mu;
    if mu.abs() > j + 1e-12 || (diff - diff.round()).abs() > 1e-12 {
        return Err(Error::InvalidWeight { j, mu });
    }
    Ok(())
}

/// su(2) number coherent state `D(xi)|j, mu>` from its finite double sum.
/// Amplitudes use the descending-weight basis.
pub fn pncs_su2_series(j: f64, mu: f64, zeta: Complex64) -> Result<NumberCoherentState> {
    check_weight(j, mu)?;
    let dim = (2.0 * j).round() as usize + 1;
    let jmu = (j - mu).round() as usize; // j - mu
    let jpmu = (j + mu).round() as usize; // j + mu
    let eta = zeta.norm_sqr().ln_1p();
    let mzc = -zeta.conj();
    let mut amps = ComplexVector::zeros(dim);
    for n in 0..=jpmu {
        for s in 0..=(jmu + n) {
            // mu' = mu - n + s, basis index j - mu'
            let idx = jmu + n - s;
            let lg = lnfact(jmu + n) - lnfact(jpmu - n)
                + 0.5 * (lnfact(jpmu) + lnfact(jpmu - n + s) - lnfact(jmu) - lnfact(jmu + n - s))
                - lnfact(s)
                - lnfact(n);
            let w = (eta * (mu - n as f64) + lg).exp();
            amps[idx] += powu(zeta, s) * powu(mzc, n) * w;
        }
    }
    let norm = amps.norm();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::SeriesNotConverged { tail: (norm - 1.0).abs() });
    }
    amps /= Complex64::new(norm, 0.0);
    Ok(NumberCoherentState {
        spec: RepSpec { algebra: Algebra::Su2, index: j, trunc_dim: dim },
        zeta,
        eta,
        base_label: jmu,
        amplitudes: amps,
    })
}

/// Generalized Laguerre polynomial `L_n^{(alpha)}(x)` by the three-term
/// recurrence; valid for any real `alpha`.
pub fn laguerre(n: usize, alpha: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `rho^m L_n^{(m)}(rho^2)` for integer `m`, using
/// `L_n^{(-m)}(x) = (-x)^m (n-m)!/n! L_{n-m}^{(m)}(x)` when `m < 0`.
fn radial_laguerre(n: usize, m: i64, rho: f64) -> f64 {
    let x = rho * rho;
    if m >= 0 {
        return rho.powi(m as i32) * laguerre(n, m as f64, x);
    }
    let a = (-m) as usize;
    if a > n {
        return rho.powi(m as i32) * laguerre(n, m as f64, x);
    }
    let sign = if a.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * (lnfact(n - a) - lnfact(n)).exp() * rho.powi(a as i32) * laguerre(n - a, a as f64, x)
}

/// Samples of a complex field on a polar grid, stored row-major over
/// `(rho, angle)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarGrid {
    pub rho: Vec<f64>,
    pub angle: Vec<f64>,
    pub field: Vec<Complex64>,
    pub n_l: usize,
    pub m_n: usize,
}

impl PolarGrid {
    pub fn new(rho: Vec<f64>, angle: Vec<f64>) -> Result<Self> {
        if rho.is_empty() || angle.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        if rho[0] < 0.0 || rho.windows(2).any(|w| w[1] <= w[0] || w[1].is_nan()) {
            return Err(Error::InvalidProtocol("rho grid must be nonnegative and strictly increasing".into()));
        }
        let field = vec![Complex64::new(0.0, 0.0); rho.len() * angle.len()];
        Ok(Self { rho, angle, field, n_l: 0, m_n: 0 })
    }

    /// `count` evenly spaced points on `[0, rho_max]` by `angles` points on `[0, 2 pi)`.
    pub fn uniform(rho_max: f64, count: usize, angles: usize) -> Result<Self> {
        if count < 2 || angles == 0 || rho_max <= 0.0 || rho_max.is_nan() {
            return Err(Error::InvalidDimension(count.min(angles)));
        }
        let rho = (0..count).map(|i| rho_max * i as f64 / (count - 1) as f64).collect();
        let angle = (0..angles).map(|i| 2.0 * PI * i as f64 / angles as f64).collect();
        Self::new(rho, angle)
    }

    pub fn at(&self, ir: usize, ia: usize) -> Complex64 {
        self.field[ir * self.angle.len() + ia]
    }

    /// `int |psi|^2 rho drho dphi` by the trapezoid rule in both variables
    /// (periodic in the angle).
    pub fn norm_sq(&self) -> f64 {
        let na = self.angle.len();
        let dphi = 2.0 * PI / na as f64;
        let radial: Vec<f64> = (0..self.rho.len())
            .map(|ir| (0..na).map(|ia| self.at(ir, ia).norm_sqr()).sum::<f64>() * dphi * self.rho[ir])
            .collect();
        self.rho.windows(2).zip(radial.windows(2)).map(|(r, f)| 0.5 * (r[1] - r[0]) * (f[0] + f[1])).sum()
    }

    /// CSV with columns `rho, angle, re, im, abs2`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("rho,angle,re,im,abs2\n");
        for (ir, r) in self.rho.iter().enumerate() {
            for (ia, a) in self.angle.iter().enumerate() {
                let z = self.at(ir, ia);
                let _ = writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}", r, a, z.re, z.im, z.norm_sqr());
            }
        }
        out
    }
}

/// Two-dimensional oscillator eigenfunction with radial index `n` and
/// angular momentum `m >= 0`, normalized on the plane.
pub fn oscillator_eigenfunction(n: usize, m: usize, rho: f64, angle: f64) -> Complex64 {
    let c = (0.5 * (2f64.ln() + lnfact(n) - lnfact(n + m))).exp() / (2.0 * PI).sqrt();
    let r = c * radial_laguerre(n, m as i64, rho) * (-rho * rho / 2.0).exp();
    Complex64::from_polar(r, m as f64 * angle)
}

/// su(1,1) wavefunction for the two-mode realization with `k = (m_n + 1)/2`
/// and `n = n_l`.
pub fn evaluate_su11_wavefunction(n_l: usize, m_n: usize, zeta: Complex64, grid: &PolarGrid) -> Result<PolarGrid> {
    if zeta.norm() >= 1.0 || zeta.norm().is_nan() {
        return Err(Error::InvalidProtocol(format!("|zeta| = {} is outside the unit disc", zeta.norm())));
    }
    let one = Complex64::new(1.0, 0.0);
    let w = 1.0 - zeta.norm_sqr();
    let omz = one - zeta;
    let pre = (0.5 * (2f64.ln() + lnfact(n_l) - lnfact(n_l + m_n))).exp() / (2.0 * PI).sqrt();
    let amplitude =
        powu((one - zeta.conj()) / omz, n_l) * w.powf(0.5 * (m_n as f64 + 1.0)) / powu(omz, m_n + 1) * pre;
    let gauss = (one + zeta) / (omz * 2.0);
    let scale = w / omz.norm_sqr();
    let mut out = grid.clone();
    out.n_l = n_l;
    out.m_n = m_n;
    let na = grid.angle.len();
    for (ir, &rho) in grid.rho.iter().enumerate() {
        let x = rho * rho;
        let radial = amplitude
            * (-gauss * x).exp()
            * rho.powi(m_n as i32)
            * laguerre(n_l, m_n as f64, x * scale);
        for (ia, &ang) in grid.angle.iter().enumerate() {
            out.field[ir * na + ia] = radial * Complex64::from_polar(1.0, m_n as f64 * ang);
        }
    }
    Ok(out)
}

/// su(2) wavefunction for the Schwinger realization with
/// `j = n_l + m_n/2`, `mu = m_n/2`.
pub fn evaluate_su2_wavefunction(n_l: usize, m_n: usize, zeta: Complex64, grid: &PolarGrid) -> Result<PolarGrid> {
    let eta = zeta.norm_sqr().ln_1p();
    let mzc = -zeta.conj();
    let norm = (0.5 * (2f64.ln() + lnfact(n_l + m_n) - lnfact(n_l))).exp() / (2.0 * PI).sqrt();
    // (coefficient, radial index, angular momentum)
    let mut terms: Vec<(Complex64, usize, i64)> = Vec::new();
    for n in 0..=(n_l + m_n) {
        for s in 0..=(n_l + n) {
            let m_prime = m_n as i64 - 2 * n as i64 + 2 * s as i64;
            let radial_index = n_l + n - s;
            let sign = if radial_index.is_multiple_of(2) { 1.0 } else { -1.0 };
            let lg = lnfact(n_l + n) - lnfact(n_l + m_n - n) - lnfact(s) - lnfact(n);
            let w = sign * norm * (0.5 * eta * (m_n as f64 - 2.0 * n as f64) + lg).exp();
            terms.push((powu(zeta, s) * powu(mzc, n) * w, radial_index, m_prime));
        }
    }
    let mut out = grid.clone();
    out.n_l = n_l;
    out.m_n = m_n;
    let na = grid.angle.len();
    for (ir, &rho) in grid.rho.iter().enumerate() {
        let gauss = (-rho * rho / 2.0).exp();
        let radial: Vec<(Complex64, i64)> =
            terms.iter().map(|&(c, nr, mp)| (c * radial_laguerre(nr, mp, rho) * gauss, mp)).collect();
        for (ia, &ang) in grid.angle.iter().enumerate() {
            out.field[ir * na + ia] =
                radial.iter().map(|&(c, mp)| c * Complex64::from_polar(1.0, mp as f64 * ang)).sum();
        }
    }
    Ok(out)
}
