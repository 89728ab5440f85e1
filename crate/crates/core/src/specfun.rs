//! Special functions underlying the expansion terms.
//!
//! `erfc_half` uses the normalisation `(1/√π)∫_x^∞ e^{-s²} ds`, which is half
//! of the usual complementary error function. The standard function is not
//! re-exported so the two conventions cannot be mixed up.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, DEFAULT_BUDGET};

pub(crate) const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Point in the self-similar variable `eta = x / (2 sqrt(t))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfSimilarPoint {
    pub eta: f64,
    pub t: f64,
    pub x: f64,
}

impl SelfSimilarPoint {
    pub fn from_xt(x: f64, t: f64) -> Result<Self> {
        check_time(t)?;
        if !x.is_finite() {
            return Err(Error::Domain(format!("x must be finite, got {x}")));
        }
        Ok(Self { eta: x / (2.0 * t.sqrt()), t, x })
    }

    pub fn from_eta(eta: f64, t: f64) -> Result<Self> {
        check_time(t)?;
        if !eta.is_finite() {
            return Err(Error::Domain(format!("eta must be finite, got {eta}")));
        }
        Ok(Self { eta, t, x: 2.0 * eta * t.sqrt() })
    }
}

pub(crate) fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("time must be positive and finite, got {t}")))
    }
}

pub(crate) fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("tolerance must be positive, got {tol}")))
    }
}

/// Sign convention for the Hermite-type sums.
///
/// `Alternating` carries the `(-1)^k` factor that comes out of expanding the
/// Gaussian kernel; `PaperLiteral` takes every sign as `+`. Only
/// `Alternating` solves the heat recurrence for `n ≥ 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignMode {
    PaperLiteral,
    #[default]
    Alternating,
}

/// `(1/√π) ∫_x^∞ e^{-s²} ds`.
pub fn erfc_half(x: f64) -> f64 {
    0.5 * libm::erfc(x)
}

/// `G_p(η) = (1/√π) ∫_0^∞ v^p e^{-(v-η)²} dv`.
pub fn gaussian_halfline_moment(p: usize, eta: f64) -> f64 {
    gaussian_halfline_moments(p, eta)[p]
}

/// `G_0(η), …, G_{p_max}(η)`.
///
/// Upward recurrence is used for `η ≥ -1/2`, where every term is positive.
/// For more negative `η` the upward direction cancels, so the ratios
/// `G_k / G_{k-1}` are obtained from the backward recurrence and anchored on
/// `G_0 = erfc_half(-η)`.
pub fn gaussian_halfline_moments(p_max: usize, eta: f64) -> Vec<f64> {
    let mut g = Vec::with_capacity(p_max + 1);
    let g0 = erfc_half(-eta);
    g.push(g0);
    if p_max == 0 {
        return g;
    }
    if eta >= -0.5 || g0 == 0.0 {
        g.push(eta * g0 + (-eta * eta).exp() / (2.0 * SQRT_PI));
        for p in 2..=p_max {
            let next = eta * g[p - 1] + 0.5 * (p - 1) as f64 * g[p - 2];
            g.push(next);
        }
        return g;
    }
    // Backward ratio recurrence r_{k-1} = ((k-1)/2) / (r_k - η), r_k = G_k/G_{k-1}.
    let a = -eta;
    let start = ((p_max as f64).sqrt() + 30.0 / a).powi(2).ceil() as usize + 10;
    let start = start.max(p_max + 10);
    let mut r = 0.5 * (eta + (eta * eta + 2.0 * start as f64).sqrt());
    let mut ratios = vec![0.0; p_max + 1];
    for k in (2..=start).rev() {
        r = 0.5 * (k - 1) as f64 / (r - eta);
        if k - 1 <= p_max {
            ratios[k - 1] = r;
        }
    }
    for k in 1..=p_max {
        let prev = g[k - 1];
        g.push(prev * ratios[k]);
    }
    g
}

/// `Σ_k s_k η^{n-2k-1} e^{-η²} / (4^k k! (n-2k-1)!)` for `k = 0..⌊(n-1)/2⌋`,
/// with `s_k = (-1)^k` in `Alternating` mode and `s_k = 1` in
/// `PaperLiteral` mode.
pub fn hermite_sum(n: usize, eta: f64, mode: SignMode) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("hermite_sum needs n >= 1".into()));
    }
    let m = n - 1;
    let mut sum = 0.0;
    let mut k_fact = 1.0;
    let mut four_k = 1.0;
    for k in 0..=m / 2 {
        if k > 0 {
            k_fact *= k as f64;
            four_k *= 4.0;
        }
        let deg = m - 2 * k;
        let sign = match mode {
            SignMode::Alternating if k % 2 == 1 => -1.0,
            _ => 1.0,
        };
        sum += sign * eta.powi(deg as i32) / (four_k * k_fact * factorial(deg));
    }
    Ok(sum * (-eta * eta).exp())
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Taylor coefficients `c_r(η)` of `exp(2zη - z²) = Σ c_r z^r`, for
/// `r = 0..len`. Equal to `H_r(η)/r!` with physicists' Hermite polynomials.
pub(crate) fn exp_taylor_coefficients(len: usize, eta: f64) -> Vec<f64> {
    let mut c = Vec::with_capacity(len);
    for r in 0..len {
        let v = match r {
            0 => 1.0,
            1 => 2.0 * eta,
            _ => (2.0 * eta * c[r - 1] - 2.0 * c[r - 2]) / r as f64,
        };
        c.push(v);
    }
    c
}

/// `Ψ_n(z, η) = z^{-n} [e^{-(z-η)²} - e^{-η²} T_{n-1}(z; η)]`, where
/// `T_{n-1}` is the degree `n-1` Taylor polynomial of `exp(2zη - z²)` in `z`.
///
/// For `z ≤ 1` the subtraction is done analytically and the tail of the
/// Taylor series is summed instead, since the direct form loses about
/// `n·log10(1/z)` digits.
pub fn psi_n(n: usize, z: f64, eta: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("psi_n needs n >= 1".into()));
    }
    if !(z >= 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!("psi_n needs z >= 0, got {z}")));
    }
    let gauss = (-eta * eta).exp();
    if z <= 1.0 {
        return Ok(gauss * taylor_tail(n, z, eta));
    }
    let c = exp_taylor_coefficients(n, eta);
    let poly = c.iter().rev().fold(0.0, |acc, &cr| acc * z + cr);
    Ok(((-(z - eta) * (z - eta)).exp() - gauss * poly) * z.powi(-(n as i32)))
}

/// `Σ_{r≥n} c_r(η) z^{r-n}` for `n ≥ 1`, summed until the terms are
/// negligible.
fn taylor_tail(n: usize, z: f64, eta: f64) -> f64 {
    let head = exp_taylor_coefficients(n + 1, eta);
    let (mut c_prev, mut c_cur) = (head[n - 1], head[n]);
    let min_terms = n + 4 + (4.0 * eta.abs() * z) as usize;
    let mut sum = 0.0;
    let mut zp = 1.0;
    let mut quiet = 0;
    let mut biggest: f64 = 0.0;
    let mut k = n;
    loop {
        let term = c_cur * zp;
        sum += term;
        biggest = biggest.max(term.abs());
        if k >= min_terms {
            if term.abs() <= 1e-18 * biggest {
                quiet += 1;
                if quiet >= 2 {
                    break;
                }
            } else {
                quiet = 0;
            }
        }
        if k > n + 500 {
            break;
        }
        let next = (2.0 * eta * c_cur - 2.0 * c_prev) / (k + 1) as f64;
        c_prev = c_cur;
        c_cur = next;
        zp *= z;
        k += 1;
    }
    sum
}

/// `J_n(η) = ∫_1^∞ z^{-n} e^{-(z-η)²} dz` to absolute tolerance `tol`.
pub fn j_integral(n: usize, eta: f64, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    if !eta.is_finite() {
        return Err(Error::Domain(format!("eta must be finite, got {eta}")));
    }
    let f = |z: f64| z.powi(-(n as i32)) * (-(z - eta) * (z - eta)).exp();
    // e^{-100} bounds everything beyond η + 10.
    let hi = eta.max(1.0) + 10.0;
    let pts = quad::partition(1.0, hi, [eta - 10.0, eta - 3.0, eta, eta + 3.0]);
    Ok(quad::integrate(&f, &pts, tol, DEFAULT_BUDGET)?.value)
}

/// `K_n(η) = ∫_0^1 Ψ_n(z, η) dz` to absolute tolerance `tol`.
pub fn k_integral(n: usize, eta: f64, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    if n == 0 {
        return Err(Error::Domain("k_integral needs n >= 1".into()));
    }
    if !eta.is_finite() {
        return Err(Error::Domain(format!("eta must be finite, got {eta}")));
    }
    let gauss = (-eta * eta).exp();
    let f = |z: f64| gauss * taylor_tail(n, z, eta);
    Ok(quad::integrate(&f, &[0.0, 0.5, 1.0], tol, DEFAULT_BUDGET)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn erfc_half_reference_values() {
        assert_eq!(erfc_half(0.0), 0.5);
        for x in [0.3, 1.7] {
            assert!(close(erfc_half(x) + erfc_half(-x), 1.0, 1e-15));
        }
        // mpmath, 40 digits
        assert!(close(erfc_half(-2.0), 0.997_661_132_509_476_4, 1e-16));
        assert!(erfc_half(40.0) == 0.0);
    }

    #[test]
    fn halfline_moment_identities() {
        assert_eq!(gaussian_halfline_moment(0, 0.0), 0.5);
        for eta in [0.0, 0.5, 2.0] {
            let g1 = gaussian_halfline_moment(1, eta) - gaussian_halfline_moment(1, -eta);
            assert!(close(g1, eta, 1e-15), "eta={eta}");
            let g2 = gaussian_halfline_moment(2, eta) + gaussian_halfline_moment(2, -eta);
            assert!(close(g2, eta * eta + 0.5, 1e-14), "eta={eta}");
        }
    }

    #[test]
    fn halfline_moments_positive_far_left() {
        for eta in [-0.6, -3.0, -8.0, -20.0] {
            let g = gaussian_halfline_moments(10, eta);
            assert!(g.iter().all(|v| *v > 0.0), "eta={eta}: {g:?}");
        }
    }

    #[test]
    fn hermite_sum_examples() {
        for mode in [SignMode::Alternating, SignMode::PaperLiteral] {
            for eta in [-1.3, 0.0, 0.7] {
                assert!(close(hermite_sum(1, eta, mode).unwrap(), (-eta * eta).exp(), 1e-16));
            }
            assert_eq!(hermite_sum(2, 0.0, mode).unwrap(), 0.0);
        }
        let e1 = (-1.0f64).exp();
        assert!(close(hermite_sum(3, 1.0, SignMode::Alternating).unwrap(), e1 / 4.0, 1e-16));
        assert!(close(hermite_sum(3, 1.0, SignMode::PaperLiteral).unwrap(), 0.75 * e1, 1e-16));
        assert!(hermite_sum(0, 1.0, SignMode::Alternating).is_err());
    }

    #[test]
    fn hermite_sum_matches_physicists_polynomials() {
        // h_n = H_{n-1}(η) e^{-η²} / ((n-1)! 2^{n-1})
        for n in 1..=8usize {
            for eta in [-2.0, -0.4, 0.0, 1.1, 2.5] {
                let h = hermite_physicists(n - 1, eta);
                let want = h * (-eta * eta).exp() / (factorial(n - 1) * 2f64.powi(n as i32 - 1));
                let got = hermite_sum(n, eta, SignMode::Alternating).unwrap();
                assert!(close(got, want, 1e-14 * want.abs().max(1e-3)), "n={n} eta={eta}");
            }
        }
    }

    fn hermite_physicists(m: usize, x: f64) -> f64 {
        let (mut h0, mut h1) = (1.0, 2.0 * x);
        if m == 0 {
            return h0;
        }
        for k in 1..m {
            let h2 = 2.0 * x * h1 - 2.0 * k as f64 * h0;
            h0 = h1;
            h1 = h2;
        }
        h1
    }

    #[test]
    fn psi_direct_substitution() {
        assert!(close(psi_n(1, 1.0, 0.0).unwrap(), (-1.0f64).exp() - 1.0, 1e-15));
        assert!(close(psi_n(1, 1.0, 0.0).unwrap(), -0.632_120_558_828_557_7, 1e-15));
    }

    #[test]
    fn psi_removable_singularity() {
        let e1 = (-1.0f64).exp();
        for (n, eta, limit) in [(1, 0.0, 0.0), (2, 1.0, e1), (3, -1.0, 2.0 / 3.0 * e1)] {
            assert!(close(psi_n(n, 0.0, eta).unwrap(), limit, 1e-15), "n={n}");
            assert!(close(psi_n(n, 1e-9, eta).unwrap(), limit, 1e-8), "n={n}");
        }
    }

    #[test]
    fn psi_extended_precision_values() {
        // mpmath at 40 digits
        assert!(close(psi_n(2, 0.5, 0.3).unwrap(), -0.909_284_406_801_093_7, 1e-14));
        assert!(close(psi_n(4, 2.5, -0.7).unwrap(), -0.189_831_584_428_993_57, 1e-14));
        assert!(close(psi_n(6, 1e-3, 1.2).unwrap(), 0.037_087_154_404_839_445, 1e-15));
    }

    #[test]
    fn psi_is_continuous_across_branch_switch() {
        for n in 1..=8 {
            for eta in [-2.0, 0.3, 2.0] {
                let below = psi_n(n, 1.0, eta).unwrap();
                let above = psi_n(n, 1.0 + 1e-12, eta).unwrap();
                assert!(close(below, above, 1e-10), "n={n} eta={eta}");
            }
        }
        assert!(psi_n(2, -0.1, 0.0).is_err());
    }

    #[test]
    fn j_integral_values() {
        let want = SQRT_PI * erfc_half(1.0);
        assert!(close(j_integral(0, 0.0, 1e-13).unwrap(), want, 1e-13));
        assert!(close(j_integral(2, 0.0, 1e-13).unwrap(), 0.089_073_855_890_780_35, 1e-13));
        assert!(close(j_integral(3, 0.5, 1e-13).unwrap(), 0.196_125_667_080_607_87, 1e-13));
        assert!(close(j_integral(1, 2.5, 1e-13).unwrap(), 0.745_834_639_835_343_6, 1e-13));
        let js: Vec<f64> = (0..8).map(|n| j_integral(n, 0.5, 1e-13).unwrap()).collect();
        assert!(js.windows(2).all(|w| w[1] < w[0]));
        assert!(j_integral(1, 0.0, -1.0).is_err());
    }

    #[test]
    fn k_integral_values() {
        let k1 = k_integral(1, 0.0, 1e-12).unwrap();
        // Σ_{k≥1} (-1)^k / (2k·k!)
        let mut series = 0.0;
        let mut kf = 1.0;
        for k in 1..30 {
            kf *= k as f64;
            series += if k % 2 == 0 { 1.0 } else { -1.0 } / (2.0 * k as f64 * kf);
        }
        assert!(k1 < 0.0);
        assert!(close(k1, series, 1e-12));
        assert!(close(k1, -0.398_299_799_648_526_6, 1e-12));
        // series-integrated at 50 digits
        assert!(close(k_integral(2, 1.0, 1e-12).unwrap(), 0.158_171_462_102_727_68, 1e-12));
        assert!(close(k_integral(3, -1.5, 1e-12).unwrap(), -0.165_543_784_124_755_61, 1e-12));
        assert!(close(k_integral(5, 2.0, 1e-12).unwrap(), -0.016_182_900_542_542_418, 1e-12));
        assert!(close(k_integral(8, -3.0, 1e-12).unwrap(), 1.527_334_842_026_486_6e-4, 1e-12));
        assert!(close(k_integral(8, 3.0, 1e-12).unwrap(), 1.098_077_310_331_487_7e-7, 1e-12));
        assert!(k_integral(0, 0.0, 1e-10).is_err());
    }

    #[test]
    fn self_similar_point_consistency() {
        let p = SelfSimilarPoint::from_xt(3.0, 7.0).unwrap();
        assert!(close(p.x, 2.0 * p.eta * p.t.sqrt(), 1e-14 * 3.0));
        let q = SelfSimilarPoint::from_eta(-0.25, 16.0).unwrap();
        assert_eq!(q.x, -2.0);
        assert!(SelfSimilarPoint::from_xt(1.0, 0.0).is_err());
    }
}
