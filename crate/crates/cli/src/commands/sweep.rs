use anyhow::Result;
use rayon::prelude::*;

use super::berry::{row, run_period, COLUMNS};
use crate::config::{Axis, ConfigError, RawConfig, RunConfig};
use crate::output::{Cell, Table};

/// Axis points in lexicographic order (first axis slowest).
fn grid(axes: &[Axis]) -> Vec<Vec<f64>> {
    axes.iter().fold(vec![Vec::new()], |acc, axis| {
        acc.iter()
            .flat_map(|prefix| {
                axis.values.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect()
    })
}

fn describe(e: &anyhow::Error) -> String {
    if let Some(c) = e.downcast_ref::<tcphase_core::Error>() {
        return format!("{}: {c}", c.name());
    }
    if let Some(c) = e.downcast_ref::<ConfigError>() {
        return format!("ConfigError: {c}");
    }
    e.to_string()
}

/// One oracle run per grid point, at the last configured period (which may
/// itself be an axis). Points that fail keep their row with the error named
/// in the `error` column.
pub fn cmd_sweep(raw: &RawConfig, cfg: &RunConfig) -> Result<Table> {
    if cfg.axes.is_empty() {
        return Err(ConfigError("sweep needs sweep.axis1 and sweep.values1".into()).into());
    }
    let period = *cfg.periods.last().expect("at least one period");
    let mut header: Vec<String> = cfg.axes.iter().map(|a| a.key.clone()).collect();
    header.extend(COLUMNS.iter().map(|c| c.to_string()));
    header.push("error".into());
    let points = grid(&cfg.axes);
    let rows: Vec<Vec<Cell>> = points
        .par_iter()
        .map(|point| {
            let mut raw = raw.clone();
            for (axis, v) in cfg.axes.iter().zip(point) {
                raw.insert(axis.key.clone(), v.to_string());
            }
            let outcome = RunConfig::from_raw(&raw).map_err(anyhow::Error::from).and_then(|c| {
                let run = run_period(&c, *c.periods.last().expect("at least one period"))?;
                Ok(row(&c, &run))
            });
            let mut cells: Vec<Cell> = point.iter().map(|&v| Cell::Num(v)).collect();
            match outcome {
                Ok(r) => {
                    cells.extend(r);
                    cells.push(Cell::Empty);
                }
                Err(e) => {
                    cells.push(cfg.model.as_str().into());
                    cells.push(period.into());
                    cells.extend(std::iter::repeat_n(Cell::Empty, COLUMNS.len() - 2));
                    cells.push(Cell::Text(describe(&e)));
                }
            }
            cells
        })
        .collect();
    let mut table = Table::new(&header);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(table)
}
