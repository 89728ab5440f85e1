//! Machine-checkable certificates for the expansion and the oracle: residual
//! decay rates, the termwise heat-operator recurrence, and symmetry checks.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expansion::{profile_leading_block, ExpansionTable};
use crate::initial_data::InitialProfile1D;
use crate::oracle::{heat_oracle_1d, node_doubling_check, OracleOptions};
use crate::specfun::{check_tol, SelfSimilarPoint, SignMode};

/// Slack on the predicted decay exponent; absorbs slowly varying `ln t`.
pub const SLOPE_SLACK: f64 = 0.1;
/// Residuals at most this multiple of the oracle tolerance are treated as
/// noise and left out of the slope fit.
pub const NOISE_FACTOR: f64 = 10.0;
/// Smallest number of resolvable residuals for a slope.
pub const MIN_SLOPE_POINTS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Pass,
    Fail,
    /// Too few residuals above the noise floor for a slope.
    Inconclusive,
    /// Every residual is within the oracle tolerance.
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceCell {
    pub eta: f64,
    pub n: usize,
    /// Least-squares slope of `ln residual` against `ln t`, when resolvable.
    pub slope: Option<f64>,
    /// `-(N+1)/2 + slack`.
    pub threshold: f64,
    pub points_used: usize,
    pub status: CellStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub profile: String,
    pub eta_values: Vec<f64>,
    pub t_grid: Vec<f64>,
    pub n_values: Vec<usize>,
    pub tol: f64,
    /// `residuals[i][k][j]`: `η = eta_values[i]`, `N = n_values[k]`, `t = t_grid[j]`.
    pub residuals: Vec<Vec<Vec<f64>>>,
    pub cells: Vec<ConvergenceCell>,
}

impl ConvergenceReport {
    /// No cell failed. Inconclusive and exact cells do not count as failures.
    pub fn passed(&self) -> bool {
        self.cells.iter().all(|c| c.status != CellStatus::Fail)
    }

    pub fn cell(&self, eta: f64, n: usize) -> Option<&ConvergenceCell> {
        self.cells.iter().find(|c| c.eta == eta && c.n == n)
    }
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let m = x.len() as f64;
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

fn classify(eta: f64, n: usize, t_grid: &[f64], residuals: &[f64], tol: f64) -> ConvergenceCell {
    let threshold = -((n + 1) as f64) / 2.0 + SLOPE_SLACK;
    let mut cell = ConvergenceCell { eta, n, slope: None, threshold, points_used: 0, status: CellStatus::Inconclusive };
    if residuals.iter().all(|r| *r <= tol) {
        cell.status = CellStatus::Exact;
        return cell;
    }
    let (lx, ly): (Vec<f64>, Vec<f64>) =
        t_grid.iter().zip(residuals).filter(|(_, r)| **r > NOISE_FACTOR * tol).map(|(t, r)| (t.ln(), r.ln())).unzip();
    cell.points_used = lx.len();
    if lx.len() < MIN_SLOPE_POINTS {
        return cell;
    }
    let slope = fit_slope(&lx, &ly);
    cell.slope = Some(slope);
    cell.status = if slope <= threshold { CellStatus::Pass } else { CellStatus::Fail };
    cell
}

/// Residuals `|oracle - partial sum through N|` on an `η × t` grid, and the
/// decay rate per `(η, N)`.
pub fn convergence_report(
    profile: &InitialProfile1D,
    eta_values: &[f64],
    t_grid: &[f64],
    n_values: &[usize],
    tol: f64,
) -> Result<ConvergenceReport> {
    check_tol(tol)?;
    if t_grid.len() < 8 {
        return Err(Error::Domain(format!("need at least 8 time points, got {}", t_grid.len())));
    }
    if eta_values.is_empty() || n_values.is_empty() {
        return Err(Error::Domain("eta and order lists must be non-empty".into()));
    }
    let n_top = *n_values.iter().max().expect("non-empty");
    let table = ExpansionTable::new(profile, n_top, SignMode::Alternating, tol.min(1e-12))?;
    let coefficients: Vec<_> = eta_values.par_iter().map(|&eta| table.coefficients_at(eta)).collect::<Result<_>>()?;
    let opts = OracleOptions::with_tol(tol);
    let cells: Vec<(usize, usize)> =
        (0..eta_values.len()).flat_map(|i| (0..t_grid.len()).map(move |j| (i, j))).collect();
    let oracle: Vec<f64> = cells
        .par_iter()
        .map(|&(i, j)| {
            let pt = SelfSimilarPoint::from_eta(eta_values[i], t_grid[j])?;
            Ok(heat_oracle_1d(profile, pt.x, pt.t, &opts)?.value)
        })
        .collect::<Result<_>>()?;

    let mut residuals = vec![vec![vec![0.0; t_grid.len()]; n_values.len()]; eta_values.len()];
    let mut report_cells = Vec::new();
    for (i, &eta) in eta_values.iter().enumerate() {
        for (k, &n) in n_values.iter().enumerate() {
            for (j, &t) in t_grid.iter().enumerate() {
                let approx = table.sum_with(&coefficients[i], eta, t, n);
                residuals[i][k][j] = (oracle[i * t_grid.len() + j] - approx).abs();
            }
            report_cells.push(classify(eta, n, t_grid, &residuals[i][k], tol));
        }
    }
    Ok(ConvergenceReport {
        profile: profile.name.clone(),
        eta_values: eta_values.to_vec(),
        t_grid: t_grid.to_vec(),
        n_values: n_values.to_vec(),
        tol,
        residuals,
        cells: report_cells,
    })
}

/// `A(f, n) = -¼ f'' - (η/2) f' - (n/2) f` by fourth-order central
/// differences with step `h`.
pub fn heat_operator<F: Fn(f64) -> Result<f64>>(f: &F, n: usize, eta: f64, h: f64) -> Result<f64> {
    let fm2 = f(eta - 2.0 * h)?;
    let fm1 = f(eta - h)?;
    let f0 = f(eta)?;
    let fp1 = f(eta + h)?;
    let fp2 = f(eta + 2.0 * h)?;
    let d1 = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
    let d2 = (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h);
    let a = -0.25 * d2 - 0.5 * eta * d1 - 0.5 * n as f64 * f0;
    if !a.is_finite() {
        return Err(Error::NonFinite { at: eta });
    }
    Ok(a)
}

/// `(max |A(H_{n,1}, n)|, max |A(H_{n,0}, n) + H_{n,1}|)` over `eta_grid`.
pub fn recurrence_residual(table: &ExpansionTable, n: usize, eta_grid: &[f64], h_step: f64) -> Result<(f64, f64)> {
    if !(h_step > 0.0 && h_step <= 1e-2) {
        return Err(Error::Domain(format!("difference step {h_step} outside (0, 1e-2]")));
    }
    let h1 = |eta: f64| table.h_n1(n, eta);
    let h0 = |eta: f64| table.h_n0(n, eta);
    let rows: Vec<(f64, f64)> = eta_grid
        .par_iter()
        .map(|&eta| {
            let r_log = heat_operator(&h1, n, eta, h_step)?.abs();
            let r_plain = (heat_operator(&h0, n, eta, h_step)? + h1(eta)?).abs();
            Ok((r_log, r_plain))
        })
        .collect::<Result<_>>()?;
    Ok(rows.iter().fold((0.0f64, 0.0f64), |(a, b), (l, p)| (a.max(*l), b.max(*p))))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    /// Largest observed discrepancy.
    pub worst: f64,
    /// Allowed discrepancy at the worst point.
    pub allowed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub profile: String,
    pub checks: Vec<CheckOutcome>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Running maximum of `excess = discrepancy - allowance`.
struct Tracker {
    name: &'static str,
    worst: f64,
    allowed: f64,
    excess: f64,
}

impl Tracker {
    fn new(name: &'static str) -> Self {
        Self { name, worst: 0.0, allowed: 0.0, excess: f64::NEG_INFINITY }
    }

    fn record(&mut self, discrepancy: f64, allowed: f64) {
        if discrepancy - allowed > self.excess {
            self.excess = discrepancy - allowed;
            self.worst = discrepancy;
            self.allowed = allowed;
        }
    }

    fn finish(self) -> CheckOutcome {
        CheckOutcome { name: self.name.into(), passed: self.excess <= 0.0, worst: self.worst, allowed: self.allowed }
    }
}

/// Parabolic scaling of the oracle and `η`-only dependence of the leading
/// block, over samples `(λ, x, t)`. Oracle agreement is required within twice
/// the larger of `tol` and the reported error estimates, which exceed `tol`
/// only where round-off dominates (large values of growing data).
pub fn equivariance_suite(profile: &InitialProfile1D, samples: &[(f64, f64, f64)], tol: f64) -> Result<CheckReport> {
    check_tol(tol)?;
    let opts = OracleOptions::with_tol(tol);
    let rows: Vec<(f64, f64, f64, f64)> = samples
        .par_iter()
        .map(|&(lambda, x, t)| {
            let scaled = profile.scaled(lambda)?;
            let a = heat_oracle_1d(&scaled, x, t, &opts)?;
            let b = heat_oracle_1d(profile, lambda * x, lambda * lambda * t, &opts)?;
            let allowed = 2.0 * tol.max(a.error_estimate).max(b.error_estimate);
            let eta = SelfSimilarPoint::from_xt(x, t)?.eta;
            let block_a = profile_leading_block(&scaled, eta, t);
            let block_b = profile_leading_block(profile, eta, lambda * lambda * t);
            let block_allowed = if profile.growth_order() == 0 { 0.0 } else { 1e-14 * block_b.abs() };
            Ok(((a.value - b.value).abs(), allowed, (block_a - block_b).abs(), block_allowed))
        })
        .collect::<Result<_>>()?;
    let mut oracle = Tracker::new("oracle_scaling");
    let mut block = Tracker::new("leading_block_eta_only");
    for (d, a, bd, ba) in rows {
        oracle.record(d, a);
        block.record(bd, ba);
    }
    Ok(CheckReport { profile: profile.name.clone(), checks: vec![oracle.finish(), block.finish()] })
}

/// Maximum principle (profiles with a bound hint), parabolic scaling for
/// `λ ∈ {0.5, 2, 10}`, evenness (even profiles) and node-doubling
/// self-consistency of the oracle on a fixed sample of `(x, t)`.
pub fn oracle_integrity(profile: &InitialProfile1D, tol: f64) -> Result<CheckReport> {
    check_tol(tol)?;
    let opts = OracleOptions::with_tol(tol);
    let xs = [-3.0, -0.5, 0.0, 0.7, 2.5];
    let ts = [0.05, 1.0, 20.0];
    let points: Vec<(f64, f64)> = xs.iter().flat_map(|&x| ts.iter().map(move |&t| (x, t))).collect();

    let rows: Vec<(f64, f64, f64, f64, f64)> = points
        .par_iter()
        .map(|&(x, t)| {
            let (r, doubled) = node_doubling_check(profile, x, t, &opts)?;
            let mirror = if profile.even { heat_oracle_1d(profile, -x, t, &opts)? } else { r };
            Ok((
                r.value,
                r.error_estimate,
                (doubled - r.value).abs(),
                (mirror.value - r.value).abs(),
                mirror.error_estimate,
            ))
        })
        .collect::<Result<_>>()?;

    let mut maximum = Tracker::new("maximum_principle");
    let mut doubling = Tracker::new("node_doubling");
    let mut evenness = Tracker::new("evenness");
    for &(value, err, dd, md, merr) in &rows {
        if let Some((lo, hi)) = profile.bound_hint {
            maximum.record((lo - value).max(value - hi).max(0.0), tol.max(err));
        }
        doubling.record(dd, err.max(f64::EPSILON * value.abs()));
        evenness.record(md, 2.0 * tol.max(err).max(merr));
    }
    let samples: Vec<(f64, f64, f64)> =
        [0.5, 2.0, 10.0].iter().flat_map(|&l| [(l, 0.7, 1.0), (l, -1.5, 0.2)]).collect();
    let scaling = equivariance_suite(profile, &samples, tol)?;

    let mut checks = vec![doubling.finish()];
    if profile.bound_hint.is_some() {
        checks.push(maximum.finish());
    }
    if profile.even {
        checks.push(evenness.finish());
    }
    checks.extend(scaling.checks.into_iter().filter(|c| c.name == "oracle_scaling"));
    Ok(CheckReport { profile: profile.name.clone(), checks })
}
