//! Finite matrix realizations of su(2), su(1,1) and truncated bosonic modes.
//!
//! Basis conventions used throughout the crate:
//! - su(2): basis index `i` carries weight `mu = j - i` (descending `mu`).
//! - su(1,1) and bosons: number basis ascending, index `n` is the level.
//! - Tensor products are row-major over (first factor, second factor), so
//!   `|n_1, n_2>` sits at `n_1 * d_2 + n_2`.

use crate::error::{Error, Result};
use crate::linalg::{commutator, kron, real, restricted_frobenius, submatrix, ComplexMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algebra {
    Su11,
    Su2,
}

impl Algebra {
    pub fn name(self) -> &'static str {
        match self {
            Algebra::Su11 => "su11",
            Algebra::Su2 => "su2",
        }
    }
}

impl std::fmt::Display for Algebra {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Labels an irreducible (or truncated irreducible) representation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepSpec {
    pub algebra: Algebra,
    /// Bargmann index `k` for su(1,1), spin `j` for su(2).
    pub index: f64,
    pub trunc_dim: usize,
}

/// Where a generator set came from.
#[derive(Debug, Clone, PartialEq)]
pub enum RepKind {
    Irrep(RepSpec),
    /// `K+ = b^dag c^dag` on a `dim_b x dim_c` product space.
    TwoModeSu11 { dim_b: usize, dim_c: usize },
    /// `J+ = a^dag b` on a `dim_a x dim_b` product space.
    SchwingerSu2 { dim_a: usize, dim_b: usize },
    /// Principal block cut out of a larger set.
    Block { parent_dim: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSet {
    pub algebra: Algebra,
    pub kind: RepKind,
    pub x0: ComplexMatrix,
    pub xplus: ComplexMatrix,
    pub xminus: ComplexMatrix,
    /// Number of top levels (per truncated mode) excluded from accuracy claims.
    pub guard_band: usize,
    kept: Vec<usize>,
}

/// Frobenius residuals of the three defining commutators on the guarded
/// subspace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutatorResiduals {
    pub raise: f64,
    pub lower: f64,
    pub ladder: f64,
}

impl CommutatorResiduals {
    pub fn max(&self) -> f64 {
        self.raise.max(self.lower).max(self.ladder)
    }
}

/// Default guard band: `ceil(dim / 8)` top levels.
pub fn default_guard_band(dim: usize) -> usize {
    dim.div_ceil(8)
}

impl GeneratorSet {
    pub fn dim(&self) -> usize {
        self.x0.nrows()
    }

    /// Basis indices on which accuracy claims are made.
    pub fn guarded_indices(&self) -> &[usize] {
        &self.kept
    }

    pub fn rep_spec(&self) -> Option<RepSpec> {
        match self.kind {
            RepKind::Irrep(spec) => Some(spec),
            _ => None,
        }
    }

    /// Eigenvalue of `X0` on basis vector `index` (X0 is diagonal).
    pub fn weight(&self, index: usize) -> f64 {
        self.x0[(index, index)].re
    }

    pub fn commutator_residuals(&self) -> CommutatorResiduals {
        let kept = &self.kept;
        let raise = restricted_frobenius(&(commutator(&self.x0, &self.xplus) - &self.xplus), kept);
        let lower = restricted_frobenius(&(commutator(&self.x0, &self.xminus) + &self.xminus), kept);
        let two_x0 = &self.x0 * real(2.0);
        let ladder = match self.algebra {
            Algebra::Su2 => commutator(&self.xplus, &self.xminus) - two_x0,
            Algebra::Su11 => commutator(&self.xminus, &self.xplus) - two_x0,
        };
        CommutatorResiduals { raise, lower, ladder: restricted_frobenius(&ladder, kept) }
    }

    /// Restrict all three generators to the principal block on `indices`.
    /// Every index is kept for accuracy claims inside the block.
    pub fn restrict(&self, indices: &[usize]) -> GeneratorSet {
        GeneratorSet {
            algebra: self.algebra,
            kind: RepKind::Block { parent_dim: self.dim() },
            x0: submatrix(&self.x0, indices),
            xplus: submatrix(&self.xplus, indices),
            xminus: submatrix(&self.xminus, indices),
            guard_band: 0,
            kept: (0..indices.len()).collect(),
        }
    }

    /// Linear combination `c0 X0 + c1 X+ + c2 X-`.
    pub fn combine(&self, c0: f64, c1: num_complex::Complex64, c2: num_complex::Complex64) -> ComplexMatrix {
        &self.x0 * real(c0) + &self.xplus * c1 + &self.xminus * c2
    }
}

pub(crate) fn is_half_integer(x: f64) -> bool {
    let twice = 2.0 * x;
    (twice - twice.round()).abs() < 1e-12
}

/// Spin-`j` matrices, basis ordered by descending weight.
pub fn build_su2_rep(j: f64) -> Result<GeneratorSet> {
    if !j.is_finite() || j <= 0.0 || !is_half_integer(j) {
        return Err(Error::InvalidSpin(j));
    }
    let dim = (2.0 * j).round() as usize + 1;
    let x0 = ComplexMatrix::from_fn(dim, dim, |r, c| if r == c { real(j - r as f64) } else { real(0.0) });
    let mut xplus = ComplexMatrix::zeros(dim, dim);
    for i in 1..dim {
        let mu = j - i as f64;
        xplus[(i - 1, i)] = real(((j - mu) * (j + mu + 1.0)).sqrt());
    }
    let xminus = xplus.adjoint();
    Ok(GeneratorSet {
        algebra: Algebra::Su2,
        kind: RepKind::Irrep(RepSpec { algebra: Algebra::Su2, index: j, trunc_dim: dim }),
        x0,
        xplus,
        xminus,
        guard_band: 0,
        kept: (0..dim).collect(),
    })
}

/// Positive discrete series with Bargmann index `k`, truncated to
/// `trunc_dim` levels.
pub fn build_su11_rep(k: f64, trunc_dim: usize) -> Result<GeneratorSet> {
    if !k.is_finite() || k <= 0.0 {
        return Err(Error::InvalidBargmannIndex(k));
    }
    if trunc_dim < 2 {
        return Err(Error::InvalidDimension(trunc_dim));
    }
    let x0 = ComplexMatrix::from_fn(trunc_dim, trunc_dim, |r, c| {
        if r == c {
            real(k + r as f64)
        } else {
            real(0.0)
        }
    });
    let mut xplus = ComplexMatrix::zeros(trunc_dim, trunc_dim);
    for n in 0..trunc_dim - 1 {
        let nf = n as f64;
        xplus[(n + 1, n)] = real(((nf + 1.0) * (2.0 * k + nf)).sqrt());
    }
    let xminus = xplus.adjoint();
    let guard_band = default_guard_band(trunc_dim);
    Ok(GeneratorSet {
        algebra: Algebra::Su11,
        kind: RepKind::Irrep(RepSpec { algebra: Algebra::Su11, index: k, trunc_dim }),
        x0,
        xplus,
        xminus,
        guard_band,
        kept: (0..trunc_dim - guard_band).collect(),
    })
}

/// One truncated bosonic mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeOperators {
    pub dim: usize,
    pub lower: ComplexMatrix,
    pub raise: ComplexMatrix,
}

impl ModeOperators {
    pub fn number(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim, self.dim, |i, j| if i == j { real(i as f64) } else { real(0.0) })
    }
}

pub fn build_boson_mode(dim: usize) -> Result<ModeOperators> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let mut lower = ComplexMatrix::zeros(dim, dim);
    for n in 1..dim {
        lower[(n - 1, n)] = real((n as f64).sqrt());
    }
    let raise = lower.adjoint();
    Ok(ModeOperators { dim, lower, raise })
}

// Guard against accidentally building enormous product spaces.
const MAX_PRODUCT_DIM: usize = 1 << 14;

pub(crate) fn check_product(dims: &[usize]) -> Result<usize> {
    let mut total: usize = 1;
    for &d in dims {
        total = total.checked_mul(d).ok_or(Error::InvalidDimension(usize::MAX))?;
    }
    if total > MAX_PRODUCT_DIM {
        return Err(Error::InvalidDimension(total));
    }
    Ok(total)
}

/// `K0 = (b^dag b + c^dag c + 1)/2`, `K+ = b^dag c^dag`, `K- = b c`.
/// Also returns `N_d = b^dag b - c^dag c`.
pub fn compose_two_mode_su11(mode_b: &ModeOperators, mode_c: &ModeOperators) -> Result<(GeneratorSet, ComplexMatrix)> {
    let (db, dc) = (mode_b.dim, mode_c.dim);
    let total = check_product(&[db, dc])?;
    let ib = ComplexMatrix::identity(db, db);
    let ic = ComplexMatrix::identity(dc, dc);
    let nb = kron(&mode_b.number(), &ic);
    let nc = kron(&ib, &mode_c.number());
    let x0 = (&nb + &nc + ComplexMatrix::identity(total, total)) * real(0.5);
    let xplus = kron(&mode_b.raise, &mode_c.raise);
    let xminus = kron(&mode_b.lower, &mode_c.lower);
    let n_d = nb - nc;
    let (gb, gc) = (default_guard_band(db), default_guard_band(dc));
    let kept = (0..total).filter(|&i| i / dc < db - gb && i % dc < dc - gc).collect();
    Ok((
        GeneratorSet {
            algebra: Algebra::Su11,
            kind: RepKind::TwoModeSu11 { dim_b: db, dim_c: dc },
            x0,
            xplus,
            xminus,
            guard_band: gb.max(gc),
            kept,
        },
        n_d,
    ))
}

/// `J0 = (a^dag a - b^dag b)/2`, `J+ = a^dag b`, `J- = b^dag a`.
/// Also returns `N_s = a^dag a + b^dag b`.
pub fn compose_schwinger_su2(mode_a: &ModeOperators, mode_b: &ModeOperators) -> Result<(GeneratorSet, ComplexMatrix)> {
    let (da, db) = (mode_a.dim, mode_b.dim);
    let total = check_product(&[da, db])?;
    let ia = ComplexMatrix::identity(da, da);
    let ib = ComplexMatrix::identity(db, db);
    let na = kron(&mode_a.number(), &ib);
    let nb = kron(&ia, &mode_b.number());
    let x0 = (&na - &nb) * real(0.5);
    let xplus = kron(&mode_a.raise, &mode_b.lower);
    let xminus = kron(&mode_a.lower, &mode_b.raise);
    let n_s = na + nb;
    // Complete N_s blocks only: N_s < min(da, db).
    let cap = da.min(db);
    let kept = (0..total).filter(|&i| i / db + i % db < cap).collect();
    Ok((
        GeneratorSet {
            algebra: Algebra::Su2,
            kind: RepKind::SchwingerSu2 { dim_a: da, dim_b: db },
            x0,
            xplus,
            xminus,
            guard_band: 0,
            kept,
        },
        n_s,
    ))
}

/// Product-space indices of the fixed-`N_s` block, ordered by descending
/// `J0` weight (descending `n_a`), i.e. matching [`build_su2_rep`].
pub fn schwinger_block_indices(dim_a: usize, dim_b: usize, n_s: usize) -> Vec<usize> {
    (0..=n_s)
        .rev()
        .filter(|&na| na < dim_a && n_s - na < dim_b)
        .map(|na| na * dim_b + (n_s - na))
        .collect()
}

/// Product-space indices of the fixed-`N_d = n_b - n_c` block, ordered by
/// ascending level `n = min(n_b, n_c)`, i.e. matching [`build_su11_rep`]
/// with `k = (|N_d| + 1)/2`.
pub fn two_mode_block_indices(dim_b: usize, dim_c: usize, n_d: i64) -> Vec<usize> {
    let shift = n_d.unsigned_abs() as usize;
    (0..)
        .map(|n| if n_d >= 0 { (n + shift, n) } else { (n, n + shift) })
        .take_while(|&(b, c)| b < dim_b && c < dim_c)
        .map(|(b, c)| b * dim_c + c)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn spin_half_matrices() {
        let g = build_su2_rep(0.5).unwrap();
        assert_eq!(g.dim(), 2);
        assert_eq!(g.x0[(0, 0)].re, 0.5);
        assert_eq!(g.x0[(1, 1)].re, -0.5);
        assert_eq!(g.xplus[(0, 1)], real(1.0));
        assert_eq!(g.xplus.iter().filter(|z| z.norm() > 0.0).count(), 1);
    }

    #[test]
    fn spin_one_ladder_entries() {
        let g = build_su2_rep(1.0).unwrap();
        let nz: Vec<f64> = (1..3).map(|i| g.xplus[(i - 1, i)].re).collect();
        assert_abs_diff_eq!(nz[0], 2f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(nz[1], 2f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn su2_commutators_exact_up_to_spin_five() {
        for twice in 1..=10 {
            let g = build_su2_rep(twice as f64 / 2.0).unwrap();
            assert!(g.commutator_residuals().max() <= 1e-12, "j = {}", twice as f64 / 2.0);
            assert_eq!(g.xminus, g.xplus.adjoint());
        }
    }

    #[test]
    fn invalid_spin_rejected() {
        assert_eq!(build_su2_rep(0.3), Err(Error::InvalidSpin(0.3)));
        assert_eq!(build_su2_rep(0.0), Err(Error::InvalidSpin(0.0)));
        assert!(build_su2_rep(-1.0).is_err());
    }

    #[test]
    fn su11_first_row_and_diagonal() {
        let g = build_su11_rep(0.5, 8).unwrap();
        assert_eq!(g.xplus[(1, 0)], real(1.0));
        let g = build_su11_rep(0.25, 2).unwrap();
        assert_eq!(g.x0[(0, 0)].re, 0.25);
        assert_eq!(g.x0[(1, 1)].re, 1.25);
    }

    #[test]
    fn su11_guarded_commutators() {
        let g = build_su11_rep(0.5, 64).unwrap();
        assert_eq!(g.guard_band, 8);
        assert!(g.commutator_residuals().max() <= 1e-10);
        // Without the guard the truncation edge shows up.
        let full: Vec<usize> = (0..64).collect();
        let ladder = commutator(&g.xminus, &g.xplus) - &g.x0 * real(2.0);
        assert!(restricted_frobenius(&ladder, &full) > 1.0);
    }

    #[test]
    fn su11_rejects_bad_input() {
        assert_eq!(build_su11_rep(0.0, 4), Err(Error::InvalidBargmannIndex(0.0)));
        assert_eq!(build_su11_rep(0.5, 1), Err(Error::InvalidDimension(1)));
    }

    #[test]
    fn boson_modes() {
        let m = build_boson_mode(2).unwrap();
        assert_eq!(m.lower, ComplexMatrix::from_row_slice(2, 2, &[real(0.0), real(1.0), real(0.0), real(0.0)]));
        let m = build_boson_mode(3).unwrap();
        assert_eq!(m.lower[(0, 1)].re, 1.0);
        assert_abs_diff_eq!(m.lower[(1, 2)].re, 2f64.sqrt(), epsilon = 1e-15);
        let c = commutator(&m.lower, &m.raise);
        for i in 0..3 {
            let expect = if i == 2 { 1.0 - 3.0 } else { 1.0 };
            assert_abs_diff_eq!(c[(i, i)].re, expect, epsilon = 1e-14);
        }
        assert_eq!(build_boson_mode(1), Err(Error::InvalidDimension(1)));
    }

    #[test]
    fn two_mode_realization() {
        let b = build_boson_mode(6).unwrap();
        let c = build_boson_mode(6).unwrap();
        let (g, nd) = compose_two_mode_su11(&b, &c).unwrap();
        assert_abs_diff_eq!(g.x0[(0, 0)].re, 0.5, epsilon = 1e-15);
        let idx = 3 * 6 + 1;
        assert_abs_diff_eq!(nd[(idx, idx)].re, 2.0, epsilon = 1e-15);
        assert!(g.commutator_residuals().max() <= 1e-10);
        for x in [&g.x0, &g.xplus, &g.xminus] {
            assert!(commutator(x, &nd).norm() < 1e-14);
        }
    }

    #[test]
    fn two_mode_blocks_match_irreps() {
        let b = build_boson_mode(10).unwrap();
        let c = build_boson_mode(10).unwrap();
        let (g, _) = compose_two_mode_su11(&b, &c).unwrap();
        for nd in [-3i64, 0, 2, 4] {
            let idx = two_mode_block_indices(10, 10, nd);
            let block = g.restrict(&idx);
            let k = (nd.unsigned_abs() as f64 + 1.0) / 2.0;
            let irrep = build_su11_rep(k, idx.len()).unwrap();
            let kept = irrep.guarded_indices();
            for (a, b) in [(&block.x0, &irrep.x0), (&block.xplus, &irrep.xplus), (&block.xminus, &irrep.xminus)] {
                assert!(restricted_frobenius(&(a - b), kept) <= 1e-12, "N_d = {nd}");
            }
        }
    }

    #[test]
    fn schwinger_realization() {
        let a = build_boson_mode(5).unwrap();
        let b = build_boson_mode(5).unwrap();
        let (g, ns) = compose_schwinger_su2(&a, &b).unwrap();
        let idx = 5; // |n_a = 1, n_b = 0>
        assert_abs_diff_eq!(g.x0[(idx, idx)].re, 0.5, epsilon = 1e-15);
        assert_eq!(schwinger_block_indices(5, 5, 2).len(), 3);
        assert!(g.commutator_residuals().max() <= 1e-12);
        assert!(commutator(&g.xplus, &ns).norm() < 1e-14);
    }

    #[test]
    fn schwinger_blocks_match_spin_reps() {
        let a = build_boson_mode(9).unwrap();
        let b = build_boson_mode(9).unwrap();
        let (g, _) = compose_schwinger_su2(&a, &b).unwrap();
        for n_s in 1..=8 {
            let block = g.restrict(&schwinger_block_indices(9, 9, n_s));
            let spin = build_su2_rep(n_s as f64 / 2.0).unwrap();
            assert!((&block.x0 - &spin.x0).norm() <= 1e-12);
            assert!((&block.xplus - &spin.xplus).norm() <= 1e-12);
            assert!((&block.xminus - &spin.xminus).norm() <= 1e-12);
            assert!(block.commutator_residuals().max() <= 1e-12);
        }
    }
}
