//! Reference solutions by direct quadrature of the heat kernel.
//!
//! In one dimension
//! `u(x,t) = (1/√π) ∫ Λ(x + 2√t w) e^{-w²} dw`,
//! and in two dimensions the same with a product kernel. The `w`-line is cut
//! at `±L` with an explicit bound on the discarded Gaussian mass, and split at
//! the images of breakpoints and of a geometric ladder `s = ±2^k` so that
//! narrow features of `Λ` are seen at every `t`.

use std::cell::Cell;

use crate::error::{Error, Result};
use crate::initial_data::{InitialProfile1D, InitialProfile2D};
use crate::quad::{self, DEFAULT_BUDGET};
use crate::specfun::{check_time, check_tol, SQRT_PI};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    pub tol: f64,
    pub budget: usize,
    /// Re-integrate on the final partition at twice the node density and
    /// fold the discrepancy into the error estimate.
    pub refine: bool,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self { tol: 1e-12, budget: DEFAULT_BUDGET, refine: false }
    }
}

impl OracleOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResult {
    pub value: f64,
    /// Bound on `|value - u|`. At most `tol`, unless `tol` is below the
    /// round-off floor `~100·ε·∫|integrand|`, in which case it is at most
    /// that floor plus the truncation bound.
    pub error_estimate: f64,
    pub nodes_used: usize,
}

/// `(x', t')` such that the solution for `Λ(λ·)` at `(x, t)` equals the
/// solution for `Λ` at `(x', t') = (λx, λ²t)`.
pub fn scaling_image(x: f64, t: f64, lambda: f64) -> (f64, f64) {
    (lambda * x, lambda * lambda * t)
}

/// Bound on `(1/√π) ∫_{|w|>L} |Λ(x+2√t w)| e^{-w²} dw`.
fn truncation_bound(sup: &dyn Fn(f64) -> f64, cut: f64) -> f64 {
    // ∫_L^∞ e^{-w²} ≤ e^{-L²}/(2L); `sup(L)` bounds |Λ| on |w| ≤ 2L, and
    // beyond 2L the Gaussian wins for any polynomial growth.
    2.0 * sup(cut) * (-cut * cut).exp() / (2.0 * cut * SQRT_PI)
}

fn choose_cut(sup: &dyn Fn(f64) -> f64, tol: f64) -> Result<f64> {
    let mut cut = 4.0;
    while truncation_bound(sup, cut) > tol / 4.0 {
        cut += 0.5;
        if cut > 40.0 {
            return Err(Error::Tolerance { achieved: truncation_bound(sup, cut), target: tol });
        }
    }
    Ok(cut)
}

/// Upper bound for `|Λ|` on `|s - x| ≤ 2√t·2L`.
fn envelope(profile: &InitialProfile1D, x: f64, scale: f64) -> impl Fn(f64) -> f64 + '_ {
    move |cut: f64| {
        if let Some((lo, hi)) = profile.bound_hint {
            return lo.abs().max(hi.abs());
        }
        // Sample and pad; the profiles without a bound grow polynomially.
        let reach = 2.0 * cut * scale;
        let mut m = 0.0f64;
        for k in 0..=64 {
            let s = x - reach + 2.0 * reach * k as f64 / 64.0;
            m = m.max(profile.eval(s).abs());
        }
        let p = profile.growth_order() as i32;
        let lead_coef = profile.tail_plus.coefficients[0].abs().max(profile.tail_minus.coefficients[0].abs());
        let lead = lead_coef * (x.abs() + reach).powi(p);
        2.0 * m.max(lead) + 1.0
    }
}

/// Breakpoints in `w` for the 1D integrand on `[-cut, cut]`.
fn w_partition(breaks: impl IntoIterator<Item = f64>, x: f64, scale: f64, cut: f64) -> Vec<f64> {
    let mut pts: Vec<f64> = breaks.into_iter().map(|b| (b - x) / scale).collect();
    pts.push(-x / scale);
    for k in -4..=40 {
        let s = 2f64.powi(k);
        pts.push((s - x) / scale);
        pts.push((-s - x) / scale);
    }
    let mut w = -cut.floor();
    while w <= cut {
        pts.push(w);
        w += 1.0;
    }
    quad::partition(-cut, cut, pts)
}

/// Solution of the heat equation with data `Λ` at `(x, t)`.
pub fn heat_oracle_1d(profile: &InitialProfile1D, x: f64, t: f64, opts: &OracleOptions) -> Result<OracleResult> {
    let (mut result, doubled) = oracle_1d(profile, x, t, &OracleOptions { refine: false, ..*opts }, opts.refine)?;
    if let Some(v) = doubled {
        result.nodes_used *= 3;
        result.error_estimate = result.error_estimate.max((v - result.value).abs());
    }
    Ok(result)
}

/// The plain oracle result together with the value obtained on the same
/// partition at twice the node density.
pub fn node_doubling_check(
    profile: &InitialProfile1D,
    x: f64,
    t: f64,
    opts: &OracleOptions,
) -> Result<(OracleResult, f64)> {
    let (result, doubled) = oracle_1d(profile, x, t, opts, true)?;
    Ok((result, doubled.expect("doubling requested")))
}

fn oracle_1d(
    profile: &InitialProfile1D,
    x: f64,
    t: f64,
    opts: &OracleOptions,
    double: bool,
) -> Result<(OracleResult, Option<f64>)> {
    check_time(t)?;
    check_tol(opts.tol)?;
    if !x.is_finite() {
        return Err(Error::Domain(format!("x must be finite, got {x}")));
    }
    let scale = 2.0 * t.sqrt();
    let sup = envelope(profile, x, scale);
    let cut = choose_cut(&sup, opts.tol)?;
    let tail = truncation_bound(&sup, cut);
    let pts = w_partition(profile.breakpoints.iter().copied(), x, scale, cut);
    let f = |w: f64| profile.eval(x + scale * w) * (-w * w).exp() / SQRT_PI;
    let q = quad::integrate(&f, &pts, opts.tol * 0.75, opts.budget)?;
    let doubled = if double { Some(quad::refine_halves(&f, &q)?) } else { None };
    Ok((OracleResult { value: q.value, error_estimate: q.error + tail, nodes_used: q.evals }, doubled))
}

/// Solution of the two-dimensional heat equation at `(x₁, x₂, t)`.
pub fn heat_oracle_2d(
    profile: &InitialProfile2D,
    x1: f64,
    x2: f64,
    t: f64,
    opts: &OracleOptions,
) -> Result<OracleResult> {
    check_time(t)?;
    check_tol(opts.tol)?;
    if !(x1.is_finite() && x2.is_finite()) {
        return Err(Error::Domain(format!("point ({x1}, {x2}) is not finite")));
    }
    let scale = 2.0 * t.sqrt();
    let sup = profile.sup.max(f64::MIN_POSITIVE);
    let bound = |cut: f64| truncation_bound(&|_| sup, cut);
    let mut cut = 4.0;
    // Two truncated directions, each contributing at most `bound`.
    while 2.0 * bound(cut) > opts.tol / 4.0 {
        cut += 0.5;
    }
    let tail = 2.0 * bound(cut);

    // Inner variable w₂ only matters where Λ can be non-zero.
    let (a, b) = profile.support_x2;
    let lo2 = ((a - x2) / scale).max(-cut);
    let hi2 = ((b - x2) / scale).min(cut);
    let lo1 = ((profile.start_x1 - x1) / scale).max(-cut);
    if lo2 >= hi2 || lo1 >= cut || profile.sup == 0.0 {
        return Ok(OracleResult { value: 0.0, error_estimate: tail, nodes_used: 0 });
    }
    let inner_pts = quad::partition(lo2, hi2, profile.breaks_x2.iter().map(|b| (b - x2) / scale));
    let outer_pts = {
        let mut p = w_partition(profile.breaks_x1.iter().copied(), x1, scale, cut);
        p.retain(|w| *w >= lo1);
        p.insert(0, lo1);
        p.dedup();
        p
    };
    let inner_tol = opts.tol / (8.0 * (cut - lo1));
    let nodes = Cell::new(0usize);
    let inner_err = Cell::new(0.0f64);
    let failure = Cell::new(None::<Error>);
    let g = |w1: f64| {
        let s1 = x1 + scale * w1;
        let h = |w2: f64| profile.eval(s1, x2 + scale * w2) * (-w2 * w2).exp();
        match quad::integrate(&h, &inner_pts, inner_tol * SQRT_PI, opts.budget) {
            Ok(q) => {
                nodes.set(nodes.get() + q.evals);
                inner_err.set(inner_err.get().max(q.error));
                q.value * (-w1 * w1).exp() / std::f64::consts::PI
            }
            Err(e) => {
                failure.set(Some(e));
                f64::NAN
            }
        }
    };
    let outer = quad::integrate(&g, &outer_pts, opts.tol / 2.0, opts.budget);
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let outer = outer?;
    // Each inner error enters with weight e^{-w₁²}/π over a w₁-range of
    // length at most 2·cut.
    let error = outer.error + tail + inner_err.get() * 2.0 * cut / std::f64::consts::PI;
    Ok(OracleResult { value: outer.value, error_estimate: error, nodes_used: nodes.get() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial_data::{builtin, builtin_2d, Params};
    use crate::specfun::erfc_half;

    fn opts(tol: f64) -> OracleOptions {
        OracleOptions::with_tol(tol)
    }

    #[test]
    fn constant_data_is_preserved() {
        let c = builtin("const", &Params { c: Some(2.5), ..Params::default() }).unwrap();
        for t in [1e-3, 1.0, 1e4] {
            let r = heat_oracle_1d(&c, 0.3, t, &opts(1e-12)).unwrap();
            assert!((r.value - 2.5).abs() < 1e-12, "t={t}: {}", r.value);
        }
    }

    #[test]
    fn heaviside_gives_half_erfc() {
        let h = builtin("heaviside", &Params::default()).unwrap();
        for (x, t) in [(0.0, 1.0), (1.5, 0.2), (-3.0, 50.0), (40.0, 1e4)] {
            let r = heat_oracle_1d(&h, x, t, &opts(1e-13)).unwrap();
            let want = erfc_half(-x / (2.0 * f64::sqrt(t)));
            assert!((r.value - want).abs() < 1e-13, "({x},{t}): {} vs {want}", r.value);
            assert!(r.error_estimate <= 1e-13);
        }
    }

    #[test]
    fn polynomial_data_give_heat_polynomials() {
        let lin = builtin("linear", &Params::default()).unwrap();
        let quad = builtin("quadratic", &Params::default()).unwrap();
        for (x, t) in [(0.7, 0.3), (-2.0, 4.0), (10.0, 100.0)] {
            let r = heat_oracle_1d(&lin, x, t, &opts(1e-12)).unwrap();
            assert!((r.value - x).abs() < 1e-11 * (1.0 + x.abs()));
            let r = heat_oracle_1d(&quad, x, t, &opts(1e-12)).unwrap();
            let want = x * x + 2.0 * t;
            assert!((r.value - want).abs() < 1e-11 * want, "{} vs {want}", r.value);
        }
    }

    #[test]
    fn lorentzian_at_origin_matches_closed_form() {
        // u(0,t) = (√π/2) t^{-1/2} e^{1/(4t)} erfc(1/(2√t)), with erfc the
        // standard function, i.e. 2·erfc_half.
        let lor = builtin("lorentzian", &Params::default()).unwrap();
        for t in [0.01, 0.5, 3.0, 1e3, 1e5] {
            let r = heat_oracle_1d(&lor, 0.0, t, &opts(1e-13)).unwrap();
            let a = 0.5 / t.sqrt();
            let want = SQRT_PI * a * (a * a).exp() * 2.0 * erfc_half(a);
            assert!((r.value - want).abs() < 2e-13, "t={t}: {} vs {want}", r.value);
        }
    }

    #[test]
    fn refinement_agrees() {
        let g = builtin("gated_lorentzian", &Params::default()).unwrap();
        let plain = heat_oracle_1d(&g, 1.0, 7.0, &opts(1e-12)).unwrap();
        let fine = heat_oracle_1d(&g, 1.0, 7.0, &OracleOptions { refine: true, ..opts(1e-12) }).unwrap();
        assert_eq!(plain.value, fine.value);
        assert!(fine.error_estimate < 1e-12);
        assert!(fine.nodes_used > plain.nodes_used);
    }

    #[test]
    fn scaling_relation() {
        let lor = builtin("lorentzian", &Params::default()).unwrap();
        let lam = 3.0;
        let scaled = lor.scaled(lam).unwrap();
        let (x, t) = (0.4, 0.9);
        let (xs, ts) = scaling_image(x, t, lam);
        let a = heat_oracle_1d(&scaled, x, t, &opts(1e-13)).unwrap().value;
        let b = heat_oracle_1d(&lor, xs, ts, &opts(1e-13)).unwrap().value;
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_arguments() {
        let lor = builtin("lorentzian", &Params::default()).unwrap();
        assert!(matches!(heat_oracle_1d(&lor, 0.0, 0.0, &opts(1e-10)), Err(Error::Domain(_))));
        assert!(matches!(heat_oracle_1d(&lor, f64::NAN, 1.0, &opts(1e-10)), Err(Error::Domain(_))));
        assert!(matches!(heat_oracle_1d(&lor, 0.0, 1.0, &opts(-1.0)), Err(Error::Domain(_))));
        let tiny = OracleOptions { budget: 50, ..opts(1e-14) };
        assert!(matches!(heat_oracle_1d(&lor, 0.0, 1.0, &tiny), Err(Error::Budget { .. })));
    }

    #[test]
    fn product_strip_separates() {
        // 1_{x₁≥1}1_{|x₂|≤1} gives erfc_half((1-x₁)/(2√t))·[erfc_half((-1-x₂)/(2√t)) - erfc_half((1-x₂)/(2√t))].
        let p = builtin_2d("product_strip").unwrap();
        for (x1, x2, t) in [(0.0, 0.0, 1.0), (3.0, -0.5, 0.1), (10.0, 2.0, 25.0)] {
            let r = heat_oracle_2d(&p, x1, x2, t, &opts(1e-11)).unwrap();
            let s = 2.0 * f64::sqrt(t);
            let want = erfc_half((1.0 - x1) / s) * (erfc_half((-1.0 - x2) / s) - erfc_half((1.0 - x2) / s));
            assert!((r.value - want).abs() < 1e-11, "{} vs {want}", r.value);
        }
        let z = builtin_2d("zero").unwrap();
        assert_eq!(heat_oracle_2d(&z, 0.0, 0.0, 1.0, &opts(1e-10)).unwrap().value, 0.0);
    }
}
