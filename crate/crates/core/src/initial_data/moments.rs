//! Regularised half-line moments `I±_n` of an initial profile.
//!
//! For the plus side,
//!
//! `I_n = ∫_0^1 s^{n-1}Λ ds + ∫_1^∞ Φ_n ds - Σ_{j=1}^{n+p} Λ_{n+p-j}/j + Λ_{n+p} ln 2`,
//!
//! which is the finite part of the divergent `∫_0^∞ s^{n-1}Λ ds`. The minus
//! side is the plus side of the reflected profile `s ↦ Λ(-s)`.
//!
//! `∫_1^∞ Φ_n` is split at a cut-off `S`. Beyond `S` the remaining tail
//! coefficients are integrated term by term. `S` balances the truncation of
//! that series against the cancellation in `Φ_n`, which grows like `s^{n-1}`.

use std::f64::consts::LN_2;

use serde::Serialize;

use super::{phi_with_roundoff, InitialProfile1D, Side};
use crate::error::{Error, Result};
use crate::quad::{self, DEFAULT_BUDGET};
use crate::specfun::check_tol;

/// `I±_n` for `n = 1..=n_max`, stored at index `n - 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailMoments {
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
    /// Error bounds matching `plus` and `minus`.
    pub plus_error: Vec<f64>,
    pub minus_error: Vec<f64>,
}

impl TailMoments {
    pub fn n_max(&self) -> usize {
        self.plus.len()
    }

    /// `I±_n`, `n ≥ 1`.
    pub fn get(&self, side: Side, n: usize) -> Option<f64> {
        let v = match side {
            Side::Plus => &self.plus,
            Side::Minus => &self.minus,
        };
        n.checked_sub(1).and_then(|i| v.get(i)).copied()
    }
}

/// Computes `I±_n` for `1 ≤ n ≤ n_max`; fails with `Error::Tolerance` when a
/// moment cannot be resolved to `tol`.
pub fn regularized_moments(profile: &InitialProfile1D, n_max: usize, tol: f64) -> Result<TailMoments> {
    check_tol(tol)?;
    let p = profile.growth_order();
    if n_max + p > profile.n_max() {
        return Err(Error::Profile(format!(
            "moments up to order {n_max} need {} tail coefficients, profile has {}",
            n_max + p + 1,
            profile.n_max() + 1
        )));
    }
    let reflected = profile.reflect();
    let mut out = TailMoments { plus: vec![], minus: vec![], plus_error: vec![], minus_error: vec![] };
    for n in 1..=n_max {
        let (v, e) = plus_moment(profile, n, tol)?;
        out.plus.push(v);
        out.plus_error.push(e);
        let (v, e) = plus_moment(&reflected, n, tol)?;
        out.minus.push(v);
        out.minus_error.push(e);
    }
    Ok(out)
}

struct Cutoff {
    s: f64,
    tail_value: f64,
    truncation: f64,
    roundoff: f64,
}

fn plus_moment(profile: &InitialProfile1D, n: usize, tol: f64) -> Result<(f64, f64)> {
    let p = profile.growth_order();
    let tail = &profile.tail_plus;
    let lam = |m: usize| tail.coefficients[m];
    let top = n + p;

    let ni = n as i32;
    let inner_pts = quad::partition(0.0, 1.0, profile.breakpoints.iter().copied());
    let inner = quad::integrate(&|s: f64| s.powi(ni - 1) * profile.eval(s), &inner_pts, tol / 4.0, DEFAULT_BUDGET)?;

    let cut = choose_cutoff(profile, n)?;
    let phi = |s: f64| phi_with_roundoff(profile, Side::Plus, n, s).map(|(v, _)| v).unwrap_or(f64::NAN);
    let mut interior: Vec<f64> = profile.breakpoints.clone();
    let mut knot = 2.0;
    while knot < cut.s {
        interior.push(knot);
        knot *= 2.0;
    }
    let outer_pts = quad::partition(1.0, cut.s, interior);
    let outer_tol = (tol / 4.0).max(2.0 * cut.roundoff);
    let outer = quad::integrate(&phi, &outer_pts, outer_tol, DEFAULT_BUDGET)?;

    let counter: f64 = (1..=top).map(|j| lam(top - j) / j as f64).sum();
    let value = inner.value + outer.value + cut.tail_value - counter + lam(top) * LN_2;
    let error = inner.error + outer.error + cut.truncation + cut.roundoff;
    if !(error <= tol) || !value.is_finite() {
        return Err(Error::Tolerance { achieved: error, target: tol });
    }
    // A value inside its own error bar is indistinguishable from zero; report
    // it as such so finite-tail profiles give exactly terminating expansions.
    if value.abs() <= error {
        return Ok((0.0, error));
    }
    Ok((value, error))
}

/// Picks `S` from a geometric ladder beyond the last breakpoint.
fn choose_cutoff(profile: &InitialProfile1D, n: usize) -> Result<Cutoff> {
    let p = profile.growth_order();
    let tail = &profile.tail_plus;
    let top = n + p;
    let last = tail.n_max();
    let reach = profile.breakpoints.iter().fold(0.0f64, |m, b| m.max(b.abs()));
    let s_min = (2.0 * reach).max(2.0);
    // Leading size of the first coefficient beyond the stored tail.
    let amp = tail.coefficients[last.saturating_sub(1)..].iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let k_next = (last + 1 - top) as i32;

    let mut best: Option<Cutoff> = None;
    let mut worst_noise_weight = 0.0f64;
    for k in 0..=80 {
        let s = s_min * 2f64.powf(k as f64 / 2.0);
        let (phi, noise) = phi_with_roundoff(profile, Side::Plus, n, s)?;
        worst_noise_weight = worst_noise_weight.max(noise * s);
        // Known part of the tail: Σ_{m>n+p} Λ_m S^{n+p-m}/(m-n-p).
        let mut tail_value = 0.0;
        let mut tail_at_s = 0.0;
        for m in top + 1..=last {
            let d = (m - top) as i32;
            tail_value += tail.coefficients[m] * s.powi(-d) / d as f64;
            tail_at_s += tail.coefficients[m] * s.powi(-d - 1);
        }
        let series_bound = amp * s.powi(-k_next) / k_next as f64;
        let mismatch = ((phi - tail_at_s).abs() - noise).max(0.0) * s;
        let truncation = series_bound + mismatch;
        let roundoff = 2.0 * worst_noise_weight;
        let cand = Cutoff { s, tail_value, truncation, roundoff };
        let better = best.as_ref().is_none_or(|b| cand.truncation + cand.roundoff < b.truncation + b.roundoff);
        if better {
            best = Some(cand);
        }
    }
    Ok(best.expect("ladder is non-empty"))
}
