use std::f64::consts::PI;

use anyhow::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tcphase_core::algebra::{build_boson_mode, build_su11_rep, build_su2_rep, compose_schwinger_su2, compose_two_mode_su11};
use tcphase_core::coherent::{pncs_su11_series, pncs_su2_series, zeta_from_params};
use tcphase_core::diagonalizer::spectrum_check;
use tcphase_core::displacement::{displace_vector, verify_similarity};
use tcphase_core::linalg::{basis_vector, c64};
use tcphase_core::{Algebra, CoherentParams, GeneratorSet, LinearHamiltonian};

use super::tagged;
use crate::config::RunConfig;
use crate::output::{Cell, Table};

type Measure = fn(&RunConfig, &mut ChaCha8Rng) -> Result<f64>;

struct Check {
    name: &'static str,
    algebra: Algebra,
    tolerance: f64,
    measure: Measure,
}

const GRID: usize = 6;
const MODE_DIM: usize = 12;

fn spins() -> impl Iterator<Item = f64> {
    (1..=10).map(|twice| twice as f64 / 2.0)
}

fn worst<I: IntoIterator<Item = Result<f64>>>(items: I) -> Result<f64> {
    items.into_iter().try_fold(0.0f64, |m, r| Ok(m.max(r?)))
}

fn similarity_grid(gens: &GeneratorSet) -> Result<f64> {
    worst((0..GRID * GRID).map(|i| {
        let tau = -2.0 + 4.0 * (i / GRID) as f64 / (GRID - 1) as f64;
        let phi = 2.0 * PI * (i % GRID) as f64 / GRID as f64;
        Ok(verify_similarity(gens, CoherentParams::new(tau, phi)).map_err(tagged)?.residual)
    }))
}

fn su2_commutators(_: &RunConfig, _: &mut ChaCha8Rng) -> Result<f64> {
    worst(spins().map(|j| Ok(build_su2_rep(j).map_err(tagged)?.commutator_residuals().max())))
}

fn su2_schwinger(_: &RunConfig, _: &mut ChaCha8Rng) -> Result<f64> {
    let m = build_boson_mode(MODE_DIM).map_err(tagged)?;
    Ok(compose_schwinger_su2(&m, &m).map_err(tagged)?.0.commutator_residuals().max())
}

fn su2_similarity(_: &RunConfig, _: &mut ChaCha8Rng) -> Result<f64> {
    similarity_grid(&build_su2_rep(2.5).map_err(tagged)?)
}

fn su2_spectrum(_: &RunConfig, _: &mut ChaCha8Rng) -> Result<f64> {
    let h = LinearHamiltonian::new(Algebra::Su2, 1.0, c64(0.5, 0.0), c64(0.5, 0.0));
    worst(spins().map(|j| Ok(spectrum_check(&h, &build_su2_rep(j).map_err(tagged)?).map_err(tagged)?.max_abs_dev)))
}

fn su2_coherent(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Result<f64> {
    worst((0..cfg.draws).map(|_| {
        let twice = rng.gen_range(1..=8usize);
        let j = twice as f64 / 2.0;
        let idx = rng.gen_range(0..=twice);
        let p = CoherentParams::new(rng.gen_range(-3.0..3.0), rng.gen_range(0.0..2.0 * PI));
        let (z, _) = zeta_from_params(Algebra::Su2, p).map_err(tagged)?;
        let s = pncs_su2_series(j, j - idx as f64, z).map_err(tagged)?;
        let gens = build_su2_rep(j).map_err(tagged)?;
        let d = displace_vector(&gens, p, &basis_vector(twice + 1, idx)).map_err(tagged)?;
        Ok(1.0 - s.amplitudes.dotc(&d).norm_sqr())
    }))
}

fn su11_commutators(cfg: &RunConfig, _: &mut ChaCha8Rng) -> Result<f64> {
    Ok(build_su11_rep(cfg.k, cfg.trunc_dim).map_err(tagged)?.commutator_residuals().max())
}

fn su11_two_mode(_: &RunConfig, _: &mut ChaCha8Rng) -> Result<f64> {
    let m = build_boson_mode(MODE_DIM).map_err(tagged)?;
    Ok(compose_two_mode_su11(&m, &m).map_err(tagged)?.0.commutator_residuals().max())
}

fn su11_similarity(cfg: &RunConfig, _: &mut ChaCha8Rng) -> Result<f64> {
    similarity_grid(&build_su11_rep(cfg.k, cfg.trunc_dim).map_err(tagged)?)
}

fn su11_spectrum(cfg: &RunConfig, _: &mut ChaCha8Rng) -> Result<f64> {
    let h = LinearHamiltonian::new(Algebra::Su11, 5.0, c64(1.0, 0.0), c64(1.0, 0.0));
    Ok(spectrum_check(&h, &build_su11_rep(cfg.k, cfg.trunc_dim).map_err(tagged)?).map_err(tagged)?.max_abs_dev)
}

fn su11_coherent(cfg: &RunConfig, rng: &mut ChaCha8Rng) -> Result<f64> {
    let trunc = cfg.trunc_dim.max(160);
    worst((0..cfg.draws).map(|_| {
        let k = [0.25, 0.5, 1.0, 1.5][rng.gen_range(0..4)];
        let n = rng.gen_range(0..4usize);
        let p = CoherentParams::new(rng.gen_range(0.0..1.5), rng.gen_range(0.0..2.0 * PI));
        let (z, _) = zeta_from_params(Algebra::Su11, p).map_err(tagged)?;
        let s = pncs_su11_series(k, n, z, trunc).map_err(tagged)?;
        let gens = build_su11_rep(k, trunc).map_err(tagged)?;
        let d = displace_vector(&gens, p, &basis_vector(trunc, n)).map_err(tagged)?;
        Ok(1.0 - s.amplitudes.dotc(&d).norm_sqr())
    }))
}

const CHECKS: [Check; 10] = [
    Check { name: "su2-commutators", algebra: Algebra::Su2, tolerance: 1e-12, measure: su2_commutators },
    Check { name: "su2-schwinger", algebra: Algebra::Su2, tolerance: 1e-10, measure: su2_schwinger },
    Check { name: "su2-similarity", algebra: Algebra::Su2, tolerance: 1e-8, measure: su2_similarity },
    Check { name: "su2-spectrum", algebra: Algebra::Su2, tolerance: 1e-12, measure: su2_spectrum },
    Check { name: "su2-coherent", algebra: Algebra::Su2, tolerance: 1e-10, measure: su2_coherent },
    Check { name: "su11-commutators", algebra: Algebra::Su11, tolerance: 1e-10, measure: su11_commutators },
    Check { name: "su11-two-mode", algebra: Algebra::Su11, tolerance: 1e-10, measure: su11_two_mode },
    Check { name: "su11-similarity", algebra: Algebra::Su11, tolerance: 1e-8, measure: su11_similarity },
    Check { name: "su11-spectrum", algebra: Algebra::Su11, tolerance: 1e-8, measure: su11_spectrum },
    Check { name: "su11-coherent", algebra: Algebra::Su11, tolerance: 1e-10, measure: su11_coherent },
];

pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.name).collect()
}

/// Runs the residual checks in scope. Returns the report and the names of
/// the checks that breached their tolerance.
pub fn cmd_verify(cfg: &RunConfig) -> Result<(Table, Vec<String>)> {
    let unknown: Vec<&String> = cfg.tolerances.keys().filter(|k| !check_names().contains(&k.as_str())).collect();
    if let Some(name) = unknown.first() {
        return Err(crate::config::ConfigError(format!("tol.{name}: no such check")).into());
    }
    let mut table = Table::new(&["check", "residual", "tolerance", "status"]);
    let mut failed = Vec::new();
    for (i, check) in CHECKS.iter().enumerate() {
        if !cfg.scope.includes(check.algebra) {
            continue;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(i as u64));
        let residual = (check.measure)(cfg, &mut rng)?;
        let tolerance = cfg.tolerance(check.name, check.tolerance);
        let pass = residual <= tolerance;
        if !pass {
            failed.push(check.name.to_string());
        }
        table.push(vec![check.name.into(), Cell::Num(residual), Cell::Num(tolerance), if pass { "PASS" } else { "FAIL" }.into()]);
    }
    Ok((table, failed))
}
