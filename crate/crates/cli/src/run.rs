//! Execution of a run configuration into a result table.

use heatasym::expansion::{calibration_t_grid, eval_theorem2_leading, extract_coefficients, ExpansionTable};
use heatasym::initial_data::builtin_2d;
use heatasym::oracle::{heat_oracle_1d, heat_oracle_2d, OracleOptions};
use heatasym::specfun::SelfSimilarPoint;
use heatasym::verify::{convergence_report, oracle_integrity, recurrence_residual};
use heatasym::{Error, Result};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Command, RunConfig};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Int(usize),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// False when a verification command found a failing check.
    pub passed: bool,
}

impl Table {
    fn new(columns: &[&'static str]) -> Self {
        Self { columns: columns.to_vec(), rows: Vec::new(), passed: true }
    }
}

fn need(values: &[f64], what: &str) -> Result<()> {
    if values.is_empty() {
        return Err(Error::Domain(format!("grid.{what} must be non-empty for this command")));
    }
    Ok(())
}

fn pairs(a: &[f64], b: &[f64]) -> Vec<(f64, f64)> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| (x, y))).collect()
}

pub fn run(cfg: &RunConfig) -> Result<Table> {
    let g = &cfg.grid;
    let opts = OracleOptions::with_tol(cfg.tol);
    match cfg.command {
        Command::Oracle => {
            need(&g.x, "x")?;
            need(&g.t, "t")?;
            let prof = cfg.profile()?;
            let mut table = Table::new(&["x", "t", "u", "error_estimate"]);
            let values: Vec<_> = pairs(&g.x, &g.t)
                .par_iter()
                .map(|&(x, t)| heat_oracle_1d(&prof, x, t, &opts))
                .collect::<Result<_>>()?;
            for ((x, t), r) in pairs(&g.x, &g.t).into_iter().zip(values) {
                table.rows.push(vec![Cell::Num(x), Cell::Num(t), Cell::Num(r.value), Cell::Num(r.error_estimate)]);
            }
            Ok(table)
        }
        Command::Eval => {
            need(&g.x, "x")?;
            need(&g.t, "t")?;
            let prof = cfg.profile()?;
            let series = ExpansionTable::new(&prof, cfg.n_max, cfg.mode, cfg.moment_tol)?;
            let mut table = Table::new(&["x", "t", "series", "oracle", "difference"]);
            let values: Vec<(f64, f64)> = pairs(&g.x, &g.t)
                .par_iter()
                .map(|&(x, t)| Ok((series.eval(x, t)?, heat_oracle_1d(&prof, x, t, &opts)?.value)))
                .collect::<Result<_>>()?;
            for ((x, t), (s, u)) in pairs(&g.x, &g.t).into_iter().zip(values) {
                table.rows.push(vec![Cell::Num(x), Cell::Num(t), Cell::Num(s), Cell::Num(u), Cell::Num(s - u)]);
            }
            Ok(table)
        }
        Command::Expand => {
            need(&g.eta, "eta")?;
            let prof = cfg.profile()?;
            let series = ExpansionTable::new(&prof, cfg.n_max, cfg.mode, cfg.moment_tol)?;
            let mut table = Table::new(&["eta", "n", "h_n0", "h_n1"]);
            for &eta in &g.eta {
                for (i, (h0, h1)) in series.coefficients_at(eta)?.into_iter().enumerate() {
                    table.rows.push(vec![Cell::Num(eta), Cell::Int(i + 1), Cell::Num(h0), Cell::Num(h1)]);
                }
            }
            Ok(table)
        }
        Command::Converge => {
            need(&g.eta, "eta")?;
            let prof = cfg.profile()?;
            let n_values: Vec<usize> = (0..=cfg.n_max).collect();
            let t_grid = if g.t.is_empty() { heatasym::expansion::default_t_grid() } else { g.t.clone() };
            let report = convergence_report(&prof, &g.eta, &t_grid, &n_values, cfg.tol)?;
            let mut table = Table::new(&["eta", "n", "slope", "threshold", "points_used", "status"]);
            table.passed = report.passed();
            for c in &report.cells {
                table.rows.push(vec![
                    Cell::Num(c.eta),
                    Cell::Int(c.n),
                    Cell::Num(c.slope.unwrap_or(f64::NAN)),
                    Cell::Num(c.threshold),
                    Cell::Int(c.points_used),
                    Cell::Text(format!("{:?}", c.status).to_lowercase()),
                ]);
            }
            Ok(table)
        }
        Command::Extract => {
            need(&g.eta, "eta")?;
            let prof = cfg.profile()?;
            let t_grid = if g.t.is_empty() { calibration_t_grid() } else { g.t.clone() };
            // Every order through n_max + 1 with its log partner, then two plain
            // orders to absorb the truncation.
            let mut orders: Vec<(usize, bool)> = (1..=cfg.n_max + 1).flat_map(|n| [(n, false), (n, true)]).collect();
            orders.extend([(cfg.n_max + 2, false), (cfg.n_max + 3, false)]);
            let series = ExpansionTable::new(&prof, cfg.n_max, cfg.mode, cfg.moment_tol)?;
            let fits: Vec<_> = g
                .eta
                .iter()
                .map(|&eta| extract_coefficients(&prof, eta, &orders, &t_grid, cfg.tol))
                .collect::<Result<_>>()?;
            let mut table = Table::new(&["eta", "n", "log", "extracted", "predicted", "condition_number"]);
            for fit in &fits {
                for n in 1..=cfg.n_max {
                    for log in [false, true] {
                        let predicted = if log { series.h_n1(n, fit.eta)? } else { series.h_n0(n, fit.eta)? };
                        table.rows.push(vec![
                            Cell::Num(fit.eta),
                            Cell::Int(n),
                            Cell::Int(log as usize),
                            Cell::Num(fit.coefficient(n, log).expect("order is in the basis")),
                            Cell::Num(predicted),
                            Cell::Num(fit.condition_number),
                        ]);
                    }
                }
            }
            Ok(table)
        }
        Command::Recurrence => {
            need(&g.eta, "eta")?;
            let prof = cfg.profile()?;
            let series = ExpansionTable::new(&prof, cfg.n_max, cfg.mode, cfg.moment_tol)?;
            let mut table = Table::new(&["n", "r_log", "r_plain"]);
            for n in 1..=cfg.n_max {
                let (r_log, r_plain) = recurrence_residual(&series, n, &g.eta, cfg.fd_step)?;
                table.rows.push(vec![Cell::Int(n), Cell::Num(r_log), Cell::Num(r_plain)]);
            }
            Ok(table)
        }
        Command::Integrity => {
            let prof = cfg.profile()?;
            let report = oracle_integrity(&prof, cfg.tol)?;
            let mut table = Table::new(&["check", "passed", "worst", "allowed"]);
            table.passed = report.passed();
            for c in &report.checks {
                table.rows.push(vec![
                    Cell::Text(c.name.clone()),
                    Cell::Int(c.passed as usize),
                    Cell::Num(c.worst),
                    Cell::Num(c.allowed),
                ]);
            }
            Ok(table)
        }
        Command::Plane => {
            need(&g.x, "x")?;
            need(&g.x2, "x2")?;
            need(&g.t, "t")?;
            let name = cfg.profile2d.as_deref().ok_or_else(|| Error::Profile("`plane` needs `profile2d`".into()))?;
            let prof = builtin_2d(name)?;
            let points: Vec<(f64, f64, f64)> =
                pairs(&g.x, &g.x2).into_iter().flat_map(|(a, b)| g.t.iter().map(move |&t| (a, b, t))).collect();
            let values: Vec<(f64, f64)> = points
                .par_iter()
                .map(|&(x1, x2, t)| {
                    SelfSimilarPoint::from_xt(x1, t)?;
                    let u = heat_oracle_2d(&prof, x1, x2, t, &opts)?.value;
                    Ok((u, eval_theorem2_leading(&prof, x1, x2, t, cfg.tol)?))
                })
                .collect::<Result<_>>()?;
            let mut table = Table::new(&["x1", "x2", "t", "oracle", "leading", "difference"]);
            for ((x1, x2, t), (u, lead)) in points.into_iter().zip(values) {
                table.rows.push(vec![
                    Cell::Num(x1),
                    Cell::Num(x2),
                    Cell::Num(t),
                    Cell::Num(u),
                    Cell::Num(lead),
                    Cell::Num(u - lead),
                ]);
            }
            Ok(table)
        }
    }
}
