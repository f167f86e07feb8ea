use anyhow::Result;
use serde_json::{Map, Value};
use tcphase_core::algebra::{build_su11_rep, build_su2_rep};
use tcphase_core::coherent::{pncs_su11_series, pncs_su2_series, zeta_from_params};
use tcphase_core::displacement::displace_vector;
use tcphase_core::linalg::basis_vector;
use tcphase_core::{Algebra, CoherentParams};

use super::tagged;
use crate::config::RunConfig;
use crate::output::{Cell, Table};

/// Amplitudes of `D(xi)|basis>` from the series form, with the fidelity
/// against the matrix action of `D` in the summary.
pub fn cmd_coherent_state(cfg: &RunConfig) -> Result<Table> {
    let algebra = cfg.algebra();
    let params = CoherentParams::new(cfg.tau, cfg.phi);
    let (zeta, eta) = zeta_from_params(algebra, params).map_err(tagged)?;
    let (state, gens, index) = match algebra {
        Algebra::Su11 => (
            pncs_su11_series(cfg.k, cfg.n, zeta, cfg.trunc_dim),
            build_su11_rep(cfg.k, cfg.trunc_dim),
            cfg.n,
        ),
        Algebra::Su2 => (pncs_su2_series(cfg.j, cfg.mu, zeta), build_su2_rep(cfg.j), (cfg.j - cfg.mu).round() as usize),
    };
    let (state, gens) = (state.map_err(tagged)?, gens.map_err(tagged)?);
    let direct = displace_vector(&gens, params, &basis_vector(gens.dim(), index)).map_err(tagged)?;
    let fidelity = state.amplitudes.dotc(&direct).norm_sqr();
    eprintln!("fidelity against matrix action: {fidelity:.16e}");

    let mut table = Table::new(&["index", "weight", "re", "im", "abs2"]);
    for (i, a) in state.amplitudes.iter().enumerate() {
        table.push(vec![Cell::from(i), gens.weight(i).into(), a.re.into(), a.im.into(), a.norm_sqr().into()]);
    }
    let mut summary = Map::new();
    summary.insert("algebra".into(), Value::from(algebra.name()));
    summary.insert("zeta_re".into(), Value::from(zeta.re));
    summary.insert("zeta_im".into(), Value::from(zeta.im));
    summary.insert("eta".into(), Value::from(eta));
    summary.insert("fidelity".into(), Value::from(fidelity));
    table.summary = Some(summary);
    Ok(table)
}
