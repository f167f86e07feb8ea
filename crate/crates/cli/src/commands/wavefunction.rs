use anyhow::Result;
use tcphase_core::coherent::{evaluate_su11_wavefunction, evaluate_su2_wavefunction, PolarGrid};
use tcphase_core::linalg::c64;
use tcphase_core::Algebra;

use super::tagged;
use crate::config::RunConfig;
use crate::output::Table;

pub fn cmd_wavefunction(cfg: &RunConfig) -> Result<Table> {
    let grid = PolarGrid::uniform(cfg.rho_max, cfg.rho_points, cfg.angle_points).map_err(tagged)?;
    let zeta = c64(cfg.zeta_re, cfg.zeta_im);
    let field = match cfg.wave {
        Algebra::Su11 => evaluate_su11_wavefunction(cfg.n_l, cfg.m_n, zeta, &grid),
        Algebra::Su2 => evaluate_su2_wavefunction(cfg.n_l, cfg.m_n, zeta, &grid),
    }
    .map_err(tagged)?;
    eprintln!("quadrature norm: {:.6}", field.norm_sq());
    let mut table = Table::new(&["rho", "angle", "re", "im", "abs2"]);
    for (ir, &rho) in field.rho.iter().enumerate() {
        for (ia, &angle) in field.angle.iter().enumerate() {
            let v = field.at(ir, ia);
            table.push(vec![rho.into(), angle.into(), v.re.into(), v.im.into(), v.norm_sqr().into()]);
        }
    }
    Ok(table)
}
