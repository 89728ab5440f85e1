//! Numerical recovery of `H_{n,0}(η)`, `H_{n,1}(η)` from oracle values along
//! a ray of fixed `η`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use super::profile_leading_block;
use crate::error::{Error, Result};
use crate::initial_data::{log_grid, InitialProfile1D};
use crate::oracle::{heat_oracle_1d, OracleOptions};
use crate::specfun::{check_tol, SelfSimilarPoint};

/// Largest accepted condition number of the column-scaled design matrix.
const MAX_CONDITION: f64 = 1e10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtractionFit {
    pub eta: f64,
    /// `(n, has_log)` per column, sorted by `n` then log flag.
    pub orders: Vec<(usize, bool)>,
    pub coefficients: Vec<f64>,
    /// Euclidean norm of the weighted residual.
    pub residual_norm: f64,
    pub condition_number: f64,
}

impl ExtractionFit {
    /// Fitted coefficient of `t^{-n/2}` (`log = false`) or `t^{-n/2} ln t`.
    pub fn coefficient(&self, n: usize, log: bool) -> Option<f64> {
        self.orders.iter().position(|o| *o == (n, log)).map(|i| self.coefficients[i])
    }
}

/// Twelve points on `[10², 10⁶]`.
pub fn default_t_grid() -> Vec<f64> {
    log_grid(1e2, 1e6, 12)
}

/// Fits `u(2η√t, t) - (leading block)` against `t^{-n/2} (ln t)^{log}` over
/// `t_grid`. Rows are weighted by `t^{n₀/2}` with `n₀` the smallest order, so
/// every row carries comparable information; columns are scaled to unit
/// maximum before the QR solve.
pub fn extract_coefficients(
    profile: &InitialProfile1D,
    eta: f64,
    orders: &[(usize, bool)],
    t_grid: &[f64],
    tol: f64,
) -> Result<ExtractionFit> {
    check_tol(tol)?;
    if orders.is_empty() || orders.iter().any(|(n, _)| *n == 0) {
        return Err(Error::Domain("orders must be non-empty with n >= 1".into()));
    }
    if orders.len() + 2 > t_grid.len() {
        return Err(Error::Domain(format!(
            "{} basis functions need at least {} grid points, got {}",
            orders.len(),
            orders.len() + 2,
            t_grid.len()
        )));
    }
    let (t_lo, t_hi) = t_grid.iter().fold((f64::INFINITY, 0.0f64), |(a, b), t| (a.min(*t), b.max(*t)));
    if !(t_lo > 0.0) || t_hi / t_lo < 999.0 {
        return Err(Error::Domain("time grid must be positive and span at least three decades".into()));
    }
    let mut orders = orders.to_vec();
    orders.sort();
    orders.dedup();

    let opts = OracleOptions::with_tol(tol);
    let targets: Vec<f64> = t_grid
        .par_iter()
        .map(|&t| {
            let pt = SelfSimilarPoint::from_eta(eta, t)?;
            let u = heat_oracle_1d(profile, pt.x, t, &opts)?.value;
            Ok(u - profile_leading_block(profile, eta, t))
        })
        .collect::<Result<_>>()?;

    let n0 = orders[0].0 as f64;
    let rows = t_grid.len();
    let cols = orders.len();
    let mut a = DMatrix::<f64>::zeros(rows, cols);
    let mut b = DVector::<f64>::zeros(rows);
    for (i, &t) in t_grid.iter().enumerate() {
        let w = t.powf(n0 / 2.0);
        b[i] = w * targets[i];
        for (j, &(n, log)) in orders.iter().enumerate() {
            let base = w * t.powf(-(n as f64) / 2.0);
            a[(i, j)] = if log { base * t.ln() } else { base };
        }
    }
    let scales: Vec<f64> = (0..cols).map(|j| a.column(j).amax()).collect();
    for (j, s) in scales.iter().enumerate() {
        if *s == 0.0 {
            return Err(Error::IllConditioned(f64::INFINITY));
        }
        a.column_mut(j).scale_mut(1.0 / s);
    }

    let sv = a.clone().singular_values();
    let condition_number = sv.max() / sv.min();
    if !(condition_number <= MAX_CONDITION) {
        return Err(Error::IllConditioned(condition_number));
    }
    let qr = a.clone().qr();
    let qtb = qr.q().transpose() * &b;
    let scaled = qr.r().solve_upper_triangular(&qtb).ok_or(Error::IllConditioned(condition_number))?;
    let residual_norm = (&a * &scaled - &b).norm();
    let coefficients = scaled.iter().zip(&scales).map(|(c, s)| c / s).collect();
    Ok(ExtractionFit { eta, orders, coefficients, residual_norm, condition_number })
}
