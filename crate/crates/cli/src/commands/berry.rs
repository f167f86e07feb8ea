use anyhow::Result;
use serde_json::{Map, Value};
use tcphase_core::algebra::{build_su11_rep, build_su2_rep};
use tcphase_core::oracle::{berry_run, protocol_berry_run, BerryModel, BerryRun};
use tcphase_core::tc::{reduced_protocol, TCParams, TcBranch, TcLabels};
use tcphase_core::{Algebra, DrivingProtocol, StateLabel};

use super::tagged;
use crate::config::{ConfigError, ModelKind, RunConfig};
use crate::output::{Cell, Table};

pub const COLUMNS: [&str; 8] =
    ["model", "T", "steps", "total_phase", "dynamical_phase", "geometric_phase", "closed_form", "deviation"];

fn tc_params(cfg: &RunConfig, period: f64) -> TCParams {
    TCParams {
        omega1: cfg.omega1.schedule(period),
        omega2: cfg.omega2.schedule(period),
        omega3: cfg.omega3.schedule(period),
        lambda: cfg.lambda.schedule(period),
        phi: cfg.phi_schedule(period),
        period,
        winding: cfg.winding,
    }
}

fn sector_model(cfg: &RunConfig) -> Result<BerryModel, ConfigError> {
    let schedules = [&cfg.omega1, &cfg.omega2, &cfg.omega3, &cfg.lambda];
    if !schedules.iter().all(|s| s.is_constant()) || cfg.phi_wobble != 0.0 {
        return Err(ConfigError("tc-full-sector takes constant frequencies, coupling and a uniform phase ramp".into()));
    }
    if cfg.n_l != 0 {
        return Err(ConfigError("tc-full-sector tracks n_l = 0".into()));
    }
    let scale = match cfg.tc_branch {
        TcBranch::Su2 if cfg.m_n != 1 => return Err(ConfigError("tc-full-sector su2 branch tracks m_n = 1".into())),
        TcBranch::Su2 => cfg.n_c,
        TcBranch::Su11 => cfg.n_a,
    };
    Ok(BerryModel::TcSector {
        branch: cfg.tc_branch,
        scale,
        m_n: cfg.m_n,
        omega1: cfg.omega1.value,
        omega2: cfg.omega2.value,
        omega3: cfg.omega3.value,
        coupling: cfg.lambda.value * (scale as f64).sqrt(),
    })
}

/// One oracle loop of length `period` for the configured model.
pub fn run_period(cfg: &RunConfig, period: f64) -> Result<BerryRun> {
    let dt = cfg.step_for(period);
    let linear = |algebra: Algebra, label: StateLabel| -> Result<BerryRun> {
        let gens = match label {
            StateLabel::Su11 { k, .. } => build_su11_rep(k, cfg.trunc_dim),
            StateLabel::Su2 { j, .. } => build_su2_rep(j),
        }
        .map_err(tagged)?;
        let protocol = DrivingProtocol::new(
            algebra,
            cfg.c0.schedule(period),
            cfg.lambda.schedule(period),
            cfg.phi_schedule(period),
            period,
            cfg.winding,
        )
        .map_err(tagged)?;
        protocol_berry_run(&gens, &protocol, label, dt, cfg.sample_every, cfg.branch).map_err(tagged)
    };
    match cfg.model {
        ModelKind::Su11Linear => linear(Algebra::Su11, StateLabel::Su11 { k: cfg.k, n: cfg.n }),
        ModelKind::Su2Linear => linear(Algebra::Su2, StateLabel::Su2 { j: cfg.j, mu: cfg.mu }),
        ModelKind::TcSu11 | ModelKind::TcSu2 => {
            let labels = match cfg.model {
                ModelKind::TcSu11 => TcLabels::Su11 { n_a: cfg.n_a, n_l: cfg.n_l, m_n: cfg.m_n },
                _ => TcLabels::Su2 { n_l: cfg.n_l, m_n: cfg.m_n, n_c: cfg.n_c },
            };
            let label = labels.state_label();
            let gens = match label {
                StateLabel::Su11 { k, .. } => build_su11_rep(k, cfg.trunc_dim),
                StateLabel::Su2 { j, .. } => build_su2_rep(j),
            }
            .map_err(tagged)?;
            let protocol = reduced_protocol(&tc_params(cfg, period), labels).map_err(tagged)?;
            protocol_berry_run(&gens, &protocol, label, dt, cfg.sample_every, cfg.branch).map_err(tagged)
        }
        ModelKind::TcFullSector => {
            let model = sector_model(cfg)?;
            berry_run(model, period, dt, cfg.sample_every, cfg.winding, cfg.branch).map_err(tagged)
        }
    }
}

pub fn row(cfg: &RunConfig, run: &BerryRun) -> Vec<Cell> {
    vec![
        cfg.model.as_str().into(),
        run.period.into(),
        run.steps.into(),
        run.phases.total.into(),
        run.phases.dynamical.into(),
        run.phases.geometric.into(),
        run.closed_form.into(),
        run.deviation.into(),
    ]
}

pub fn cmd_berry(cfg: &RunConfig) -> Result<Table> {
    let mut table = Table::new(&COLUMNS);
    let mut last = None;
    for &period in &cfg.periods {
        let run = run_period(cfg, period)?;
        table.push(row(cfg, &run));
        last = Some(run);
    }
    let last = last.expect("at least one period");
    let mut summary = Map::new();
    summary.insert("model".into(), Value::from(cfg.model.as_str()));
    summary.insert("closed_form".into(), Value::from(last.closed_form));
    summary.insert("oracle".into(), Value::from(last.phases.geometric));
    summary.insert("deviation".into(), Value::from(last.deviation));
    table.summary = Some(summary);
    Ok(table)
}
