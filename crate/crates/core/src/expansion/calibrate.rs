//! Selection of the assembly convention for `H_{n,0}` by comparison with
//! coefficients extracted from the oracle.

use serde::Serialize;

use super::{extract_coefficients, AssemblyConvention, ExpansionTable};
use crate::error::{Error, Result};
use crate::initial_data::{log_grid, InitialProfile1D};
use crate::specfun::SignMode;

/// Basis used for calibration fits: plain orders up to 5, logarithmic
/// orders up to 3.
pub const CALIBRATION_ORDERS: &[(usize, bool)] =
    &[(1, false), (1, true), (2, false), (2, true), (3, false), (3, true), (4, false), (5, false)];

/// Orders whose `H_{n,0}` enter the score.
pub const CALIBRATION_LEVELS: &[usize] = &[1, 2];

/// Score above which no candidate is accepted.
pub const CALIBRATION_THRESHOLD: f64 = 1e-4;

/// Time grid for calibration fits.
pub fn calibration_t_grid() -> Vec<f64> {
    log_grid(1e3, 1e7, 16)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationSample {
    pub profile: String,
    pub n: usize,
    pub eta: f64,
    pub extracted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationReport {
    pub selected: AssemblyConvention,
    /// Worst `|H_{n,0} - extracted|` per candidate, in candidate order.
    pub scores: Vec<(AssemblyConvention, f64)>,
    pub samples: Vec<CalibrationSample>,
}

impl CalibrationReport {
    pub fn best_score(&self) -> f64 {
        self.scores.iter().map(|s| s.1).fold(f64::INFINITY, f64::min)
    }

    /// Ratio of the runner-up score to the winning score.
    pub fn margin(&self) -> f64 {
        let mut s: Vec<f64> = self.scores.iter().map(|s| s.1).collect();
        s.sort_by(f64::total_cmp);
        s[1] / s[0]
    }
}

/// Scores every candidate convention on `profiles × etas × {1, 2}` and
/// returns the best. Fails with `Error::Calibration` when even the best
/// candidate misses the extracted values by more than the threshold.
pub fn calibrate(profiles: &[InitialProfile1D], etas: &[f64], tol: f64) -> Result<CalibrationReport> {
    let grid = calibration_t_grid();
    let mut samples = Vec::new();
    for profile in profiles {
        for &eta in etas {
            let fit = extract_coefficients(profile, eta, CALIBRATION_ORDERS, &grid, tol)?;
            for &n in CALIBRATION_LEVELS {
                let extracted = fit.coefficient(n, false).expect("level is in the basis");
                samples.push(CalibrationSample { profile: profile.name.clone(), n, eta, extracted });
            }
        }
    }
    let n_max = *CALIBRATION_LEVELS.iter().max().expect("non-empty");
    let mut scores = Vec::new();
    for cand in AssemblyConvention::candidates() {
        let mut worst = 0.0f64;
        for profile in profiles {
            let table = ExpansionTable::with_convention(profile, n_max, SignMode::Alternating, cand, 1e-10)?;
            for s in samples.iter().filter(|s| s.profile == profile.name) {
                worst = worst.max((table.h_n0(s.n, s.eta)? - s.extracted).abs());
            }
        }
        scores.push((cand, worst));
    }
    let (selected, best) =
        scores.iter().copied().min_by(|a, b| a.1.total_cmp(&b.1)).expect("candidate list is non-empty");
    if !(best <= CALIBRATION_THRESHOLD) {
        return Err(Error::Calibration(format!("best candidate misses extraction by {best:e}")));
    }
    Ok(CalibrationReport { selected, scores, samples })
}
