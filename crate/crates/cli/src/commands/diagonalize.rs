use anyhow::Result;
use tcphase_core::algebra::{build_su11_rep, build_su2_rep};
use tcphase_core::diagonalizer::{diagonalize, spectrum_check};
use tcphase_core::{Algebra, LinearHamiltonian};

use super::tagged;
use crate::config::RunConfig;
use crate::output::{Cell, Table};

/// Closed-form diagonalization of `c0 X0 + lambda (e^{i phi} X+ + h.c.)`
/// at `t = 0`, checked against a numerical spectrum.
pub fn cmd_diagonalize(cfg: &RunConfig) -> Result<Table> {
    let algebra = cfg.algebra();
    let (c0, lambda) = (cfg.c0.value, cfg.lambda.value);
    let h = LinearHamiltonian::hermitian(algebra, c0, lambda, cfg.phi);
    let d = diagonalize(&h).map_err(tagged)?;
    let rep = match algebra {
        Algebra::Su11 => build_su11_rep(cfg.k, cfg.trunc_dim),
        Algebra::Su2 => build_su2_rep(cfg.j),
    }
    .map_err(tagged)?;
    let spectrum = spectrum_check(&h, &rep).map_err(tagged)?;
    let mut table = Table::new(&[
        "algebra",
        "c0",
        "lambda",
        "phi",
        "tau",
        "xi_phi",
        "energy_scale",
        "residual_offdiag",
        "spectrum_dev",
        "levels",
    ]);
    table.push(vec![
        algebra.name().into(),
        c0.into(),
        lambda.into(),
        cfg.phi.into(),
        d.params.tau.into(),
        d.params.phi.into(),
        d.energy_scale.into(),
        d.residual_offdiag.into(),
        spectrum.max_abs_dev.into(),
        Cell::from(spectrum.levels_compared),
    ]);
    Ok(table)
}
