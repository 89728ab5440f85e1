//! Long-time asymptotic expansions of the heat equation.
//!
//! For bounded data with tails `Λ(x) ~ Σ Λ±_n x^{-n}`,
//!
//! `u ~ Λ⁻_0 erfc½(η) + Λ⁺_0 erfc½(-η) + Σ_{n≥1} t^{-n/2} (H_{n,0}(η) + H_{n,1}(η) ln t)`
//!
//! with `η = x/(2√t)`. Each coefficient function is stored as a short list of
//! basis terms (incomplete integrals `J_n + K_n`, a finite reciprocal sum, and
//! Hermite kernels `h_n` weighted by regularised moments) so that tables can
//! be inspected, serialised and differentiated term by term.
//!
//! The minus side is handled as the plus side of the reflected profile
//! `s ↦ Λ(-s)` evaluated at `-η`.
//!
//! Data that grow like `x^p` contribute an extra block of exact heat
//! polynomials built from the Gaussian half-line moments `G_k`; the rest is
//! the bounded expansion of the tail-subtracted remainder.

mod calibrate;
mod extract;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::initial_data::{regularized_moments, AsymptoticTail, InitialProfile1D, InitialProfile2D, Side, TailMoments};
use crate::specfun::{
    check_time, check_tol, erfc_half, exp_taylor_coefficients, gaussian_halfline_moments, hermite_sum, j_integral,
    k_integral, SelfSimilarPoint, SignMode, SQRT_PI,
};

pub use calibrate::{
    calibrate, calibration_t_grid, CalibrationReport, CalibrationSample, CALIBRATION_LEVELS, CALIBRATION_ORDERS,
    CALIBRATION_THRESHOLD,
};
pub use extract::{default_t_grid, extract_coefficients, ExtractionFit};

/// How the minus-side moment enters the Hermite term of `H_{n,0}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MinusParity {
    /// `I⁺_n + (-1)^{n-1} I⁻_n`, the parity of `h_n` under `η ↦ -η`.
    Reflected,
    /// `I⁺_n + I⁻_n`.
    Plain,
}

/// The free bookkeeping choices in the assembly of `H_{n,0}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AssemblyConvention {
    pub minus_parity: MinusParity,
    /// Add `Λ_n ln 2` to the moment weight of `h_n` (on top of the `ln 2`
    /// already inside the regularised moment).
    pub fold_ln2: bool,
    /// Include `Σ_{r=0}^{n-2} e^{-η²} c_r(η)/(r-n+1)`, the constants left by
    /// `∫_μ^1 z^{r-n} dz` when the Taylor part of the kernel is split off.
    pub reciprocal_correction: bool,
}

impl AssemblyConvention {
    /// All candidate conventions, in a fixed order.
    pub fn candidates() -> Vec<Self> {
        let mut out = Vec::with_capacity(8);
        for minus_parity in [MinusParity::Reflected, MinusParity::Plain] {
            for fold_ln2 in [false, true] {
                for reciprocal_correction in [true, false] {
                    out.push(Self { minus_parity, fold_ln2, reciprocal_correction });
                }
            }
        }
        out
    }
}

/// Convention selected by `calibrate` against coefficient extraction on the
/// lorentzian and gated lorentzian profiles. Frozen here; a regression test
/// re-runs the search and checks that it still lands on this value.
pub const CALIBRATED: AssemblyConvention =
    AssemblyConvention { minus_parity: MinusParity::Reflected, fold_ln2: false, reciprocal_correction: true };

/// One term of `H_{n,0}`. `reflected` terms are evaluated at `-η`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BasisTerm {
    /// `coefficient · [J_n(±η) + K_n(±η)]`.
    Incomplete { coefficient: f64, reflected: bool },
    /// `coefficient · Σ_{r=0}^{n-2} e^{-η²} c_r(±η)/(r-n+1)`.
    Reciprocal { coefficient: f64, reflected: bool },
    /// `coefficient · h_n(η)`.
    Hermite { coefficient: f64 },
}

impl BasisTerm {
    pub fn coefficient(&self) -> f64 {
        match *self {
            BasisTerm::Incomplete { coefficient, .. }
            | BasisTerm::Reciprocal { coefficient, .. }
            | BasisTerm::Hermite { coefficient } => coefficient,
        }
    }

    fn eval(&self, n: usize, eta: f64, mode: SignMode, tol: f64) -> Result<f64> {
        let c = self.coefficient();
        if c == 0.0 {
            return Ok(0.0);
        }
        let signed = |reflected: bool| if reflected { -eta } else { eta };
        Ok(match *self {
            BasisTerm::Incomplete { reflected, .. } => {
                let e = signed(reflected);
                c * (j_integral(n, e, tol)? + k_integral(n, e, tol)?)
            }
            BasisTerm::Reciprocal { reflected, .. } => c * reciprocal_sum(n, signed(reflected)),
            BasisTerm::Hermite { .. } => c * hermite_sum(n, eta, mode)?,
        })
    }
}

/// `Σ_{r=0}^{n-2} e^{-η²} c_r(η)/(r-n+1)`.
fn reciprocal_sum(n: usize, eta: f64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let c = exp_taylor_coefficients(n - 1, eta);
    let s: f64 = c.iter().enumerate().map(|(r, cr)| cr / (r as f64 - n as f64 + 1.0)).sum();
    s * (-eta * eta).exp()
}

/// Coefficient functions of one order `n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderTerms {
    pub n: usize,
    /// `H_{n,1} = log_multiplier · h_n(η)`.
    pub log_multiplier: f64,
    /// `H_{n,0} = Σ plain`.
    pub plain: Vec<BasisTerm>,
}

/// `η ↦ (Λ⁺_n - Λ⁻_n)/(4√π) · h_n(η)` for bounded tails.
pub fn h_n1_function(
    n: usize,
    tails: (&AsymptoticTail, &AsymptoticTail),
    mode: SignMode,
) -> Result<impl Fn(f64) -> f64> {
    let (plus, minus) = tails;
    if n == 0 {
        return Err(Error::Domain("logarithmic terms start at n = 1".into()));
    }
    if plus.growth_order != 0 || minus.growth_order != 0 {
        return Err(Error::OutOfScope("h_n1_function needs bounded tails (p = 0)".into()));
    }
    let (a, b) = match (plus.coefficient(n), minus.coefficient(n)) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::Domain(format!("order {n} exceeds the stored tail coefficients"))),
    };
    let multiplier = (a - b) / (4.0 * SQRT_PI);
    Ok(move |eta: f64| multiplier * hermite_sum(n, eta, mode).expect("n >= 1 checked above"))
}

/// Basis terms of `H_{n,0}` for a bounded profile (`p = 0`) with moments
/// `moments` of that profile.
pub fn assemble_h_n0(
    n: usize,
    profile: &InitialProfile1D,
    moments: &TailMoments,
    convention: AssemblyConvention,
) -> Result<Vec<BasisTerm>> {
    if profile.growth_order() != 0 {
        return Err(Error::OutOfScope("assemble_h_n0 needs p = 0; use the remainder profile".into()));
    }
    let plus_i = moments.get(Side::Plus, n).ok_or_else(|| Error::Domain(format!("missing moment I+_{n}")))?;
    let minus_i = moments.get(Side::Minus, n).ok_or_else(|| Error::Domain(format!("missing moment I-_{n}")))?;
    let a_plus = profile.tail_plus.coefficient(n).ok_or_else(|| Error::Domain(format!("missing Λ+_{n}")))?;
    let a_minus = profile.tail_minus.coefficient(n).ok_or_else(|| Error::Domain(format!("missing Λ-_{n}")))?;
    // Plus coefficient of the reflected profile.
    let a_refl = if n % 2 == 1 { -a_minus } else { a_minus };
    let parity = if n % 2 == 1 { 1.0 } else { -1.0 };
    let scale = 1.0 / (SQRT_PI * 2f64.powi(n as i32));

    let mut terms = vec![
        BasisTerm::Incomplete { coefficient: a_plus * scale, reflected: false },
        BasisTerm::Incomplete { coefficient: a_refl * scale, reflected: true },
    ];
    if convention.reciprocal_correction && n >= 2 {
        terms.push(BasisTerm::Reciprocal { coefficient: a_plus * scale, reflected: false });
        terms.push(BasisTerm::Reciprocal { coefficient: a_refl * scale, reflected: true });
    }
    let ln2 = if convention.fold_ln2 { std::f64::consts::LN_2 } else { 0.0 };
    let minus_weight = match convention.minus_parity {
        MinusParity::Reflected => parity,
        MinusParity::Plain => 1.0,
    };
    let weight = (plus_i + a_plus * ln2) + minus_weight * (minus_i + a_refl * ln2);
    terms.push(BasisTerm::Hermite { coefficient: weight / (2.0 * SQRT_PI) });
    Ok(terms)
}

/// Evaluated `(H_{n,0}(η), H_{n,1}(η))` for `n = 1..=n_max`.
pub type CoefficientValues = Vec<(f64, f64)>;

/// Precomputed expansion of one profile up to order `n_max`.
#[derive(Debug, Clone, Serialize)]
pub struct ExpansionTable {
    pub profile: String,
    pub n_max: usize,
    pub mode: SignMode,
    pub convention: AssemblyConvention,
    pub growth_order: usize,
    /// `Λ⁺_0..Λ⁺_p`, the part of the tail handled by the growing block.
    pub lead_plus: Vec<f64>,
    /// `Λ⁻_0..Λ⁻_p`.
    pub lead_minus: Vec<f64>,
    /// Moments of the bounded (remainder) profile.
    pub moments: TailMoments,
    pub orders: Vec<OrderTerms>,
    /// Absolute tolerance for `J_n`, `K_n`.
    pub quad_tol: f64,
}

impl ExpansionTable {
    /// Builds the table with the calibrated convention. `tol` bounds the
    /// error of every moment; the incomplete integrals are always resolved to
    /// at least `1e-13`.
    pub fn new(profile: &InitialProfile1D, n_max: usize, mode: SignMode, tol: f64) -> Result<Self> {
        Self::with_convention(profile, n_max, mode, CALIBRATED, tol)
    }

    pub fn with_convention(
        profile: &InitialProfile1D,
        n_max: usize,
        mode: SignMode,
        convention: AssemblyConvention,
        tol: f64,
    ) -> Result<Self> {
        check_tol(tol)?;
        let p = profile.growth_order();
        if n_max + p > profile.n_max() {
            return Err(Error::Profile(format!(
                "order {n_max} needs tail coefficients up to index {}, `{}` has {}",
                n_max + p,
                profile.name,
                profile.n_max()
            )));
        }
        let bounded = if p == 0 { profile.clone() } else { profile.decaying_remainder() };
        let moments = if n_max == 0 {
            TailMoments { plus: vec![], minus: vec![], plus_error: vec![], minus_error: vec![] }
        } else {
            regularized_moments(&bounded, n_max, tol)?
        };
        let mut orders = Vec::with_capacity(n_max);
        for n in 1..=n_max {
            let a = bounded.tail_plus.coefficients[n];
            let b = bounded.tail_minus.coefficients[n];
            orders.push(OrderTerms {
                n,
                log_multiplier: (a - b) / (4.0 * SQRT_PI),
                plain: assemble_h_n0(n, &bounded, &moments, convention)?,
            });
        }
        Ok(Self {
            profile: profile.name.clone(),
            n_max,
            mode,
            convention,
            growth_order: p,
            lead_plus: profile.tail_plus.coefficients[..=p].to_vec(),
            lead_minus: profile.tail_minus.coefficients[..=p].to_vec(),
            moments,
            orders,
            quad_tol: tol.min(1e-13),
        })
    }

    /// `H_{n,1}(η)`.
    pub fn h_n1(&self, n: usize, eta: f64) -> Result<f64> {
        let o = self.order(n)?;
        if o.log_multiplier == 0.0 {
            return Ok(0.0);
        }
        Ok(o.log_multiplier * hermite_sum(n, eta, self.mode)?)
    }

    /// `H_{n,0}(η)`.
    pub fn h_n0(&self, n: usize, eta: f64) -> Result<f64> {
        let o = self.order(n)?;
        o.plain.iter().map(|term| term.eval(n, eta, self.mode, self.quad_tol)).sum()
    }

    fn order(&self, n: usize) -> Result<&OrderTerms> {
        n.checked_sub(1)
            .and_then(|i| self.orders.get(i))
            .ok_or_else(|| Error::Domain(format!("order {n} not in table (n_max = {})", self.n_max)))
    }

    /// `(H_{n,0}(η), H_{n,1}(η))` for every order, for reuse across `t`.
    pub fn coefficients_at(&self, eta: f64) -> Result<CoefficientValues> {
        (1..=self.n_max).map(|n| Ok((self.h_n0(n, eta)?, self.h_n1(n, eta)?))).collect()
    }

    /// The growing/constant block `Σ_{m≤p} (2√t)^{p-m} [Λ⁺_m G_{p-m}(η) + (-1)^{p-m} Λ⁻_m G_{p-m}(-η)]`;
    /// for `p = 0` this is `Λ⁺_0 erfc½(-η) + Λ⁻_0 erfc½(η)`.
    pub fn leading_block(&self, eta: f64, t: f64) -> f64 {
        leading_block(&self.lead_plus, &self.lead_minus, eta, t)
    }

    /// Partial sum through order `n ≤ n_max` from precomputed coefficients.
    pub fn sum_with(&self, values: &CoefficientValues, eta: f64, t: f64, n: usize) -> f64 {
        let lt = t.ln();
        let decaying: f64 = values
            .iter()
            .take(n)
            .enumerate()
            .map(|(i, (h0, h1))| t.powf(-((i + 1) as f64) / 2.0) * (h0 + h1 * lt))
            .sum();
        self.leading_block(eta, t) + decaying
    }

    /// Partial sum through `n_max` at `(x, t)`.
    pub fn eval(&self, x: f64, t: f64) -> Result<f64> {
        let pt = SelfSimilarPoint::from_xt(x, t)?;
        let values = self.coefficients_at(pt.eta)?;
        Ok(self.sum_with(&values, pt.eta, t, self.n_max))
    }

    /// True when every `H_{n,1}` vanishes identically.
    pub fn log_free(&self) -> bool {
        self.orders.iter().all(|o| o.log_multiplier == 0.0)
    }
}

pub(crate) fn leading_block(lead_plus: &[f64], lead_minus: &[f64], eta: f64, t: f64) -> f64 {
    let p = lead_plus.len() - 1;
    let gp = gaussian_halfline_moments(p, eta);
    let gm = gaussian_halfline_moments(p, -eta);
    let two_root_t = 2.0 * t.sqrt();
    (0..=p)
        .map(|m| {
            let k = p - m;
            let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
            two_root_t.powi(k as i32) * (lead_plus[m] * gp[k] + sign * lead_minus[m] * gm[k])
        })
        .sum()
}

/// Leading block of `profile` without building a table.
pub fn profile_leading_block(profile: &InitialProfile1D, eta: f64, t: f64) -> f64 {
    let p = profile.growth_order();
    leading_block(&profile.tail_plus.coefficients[..=p], &profile.tail_minus.coefficients[..=p], eta, t)
}

/// Bounded-data partial sum through order `n_max` at `(x, t)`.
pub fn eval_theorem1(profile: &InitialProfile1D, x: f64, t: f64, n_max: usize, mode: SignMode) -> Result<f64> {
    if profile.growth_order() != 0 {
        return Err(Error::OutOfScope("eval_theorem1 needs bounded data; use eval_power_case".into()));
    }
    ExpansionTable::new(profile, n_max, mode, 1e-12)?.eval(x, t)
}

/// Partial sum for data growing like `x^p`, `p ≥ 1`.
pub fn eval_power_case(profile: &InitialProfile1D, x: f64, t: f64, n_max: usize) -> Result<f64> {
    if profile.growth_order() == 0 {
        return Err(Error::Domain("eval_power_case needs p >= 1; use eval_theorem1".into()));
    }
    ExpansionTable::new(profile, n_max, SignMode::Alternating, 1e-12)?.eval(x, t)
}

/// Leading long-time term in two dimensions,
/// `t^{-1/2} erfc½(-η₁) e^{-η₂²} (1/(2√π)) ∫ Λ_0`.
pub fn eval_theorem2_leading(profile: &InitialProfile2D, x1: f64, x2: f64, t: f64, tol: f64) -> Result<f64> {
    check_time(t)?;
    check_tol(tol)?;
    if profile.growth_order != 0 {
        return Err(Error::OutOfScope("two-dimensional expansion is implemented for p = 0 only".into()));
    }
    let mass = profile.section_integral(tol)?;
    let s = 2.0 * t.sqrt();
    let (e1, e2) = (x1 / s, x2 / s);
    Ok(erfc_half(-e1) * (-e2 * e2).exp() * mass / (2.0 * SQRT_PI * t.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial_data::{builtin, builtin_2d, Params};

    fn prof(name: &str) -> InitialProfile1D {
        builtin(name, &Params::default()).unwrap()
    }

    #[test]
    fn log_multiplier_for_unit_first_coefficient() {
        let g = prof("gated_inverse");
        let h = h_n1_function(1, (&g.tail_plus, &g.tail_minus), SignMode::Alternating).unwrap();
        assert!((h(0.0) - 0.141_047_395_886_939_07).abs() < 1e-15);
        let gl = prof("gated_lorentzian");
        let h2 = h_n1_function(2, (&gl.tail_plus, &gl.tail_minus), SignMode::Alternating).unwrap();
        assert!((h2(1.0) - 0.141_047_395_886_939_07 * (-1f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn symmetric_tails_are_log_free() {
        let t = ExpansionTable::new(&prof("lorentzian"), 6, SignMode::Alternating, 1e-10).unwrap();
        assert!(t.log_free());
        let g = ExpansionTable::new(&prof("gated_lorentzian"), 4, SignMode::Alternating, 1e-8).unwrap();
        assert!(!g.log_free());
    }

    #[test]
    fn constant_expansion_is_exactly_one() {
        let t = ExpansionTable::new(&prof("const"), 5, SignMode::Alternating, 1e-12).unwrap();
        for (x, tt) in [(0.0, 1.0), (-3.0, 0.2), (50.0, 1e4)] {
            assert_eq!(t.eval(x, tt).unwrap(), 1.0);
        }
        for n in 1..=5 {
            assert_eq!(t.h_n0(n, 0.3).unwrap(), 0.0);
        }
    }

    #[test]
    fn heaviside_terms_vanish() {
        let h = prof("heaviside");
        assert_eq!(eval_theorem1(&h, 0.0, 5.0, 0, SignMode::Alternating).unwrap(), 0.5);
        let t = ExpansionTable::new(&h, 4, SignMode::Alternating, 1e-12).unwrap();
        for n in 1..=4 {
            assert!(t.h_n0(n, 0.7).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn lorentzian_origin_values() {
        // From u(0,t) = (√π/2) t^{-1/2} e^{1/(4t)} erfc(1/(2√t)), expanded.
        let t = ExpansionTable::new(&prof("lorentzian"), 3, SignMode::Alternating, 1e-12).unwrap();
        assert!((t.h_n0(1, 0.0).unwrap() - SQRT_PI / 2.0).abs() < 1e-11);
        assert!((t.h_n0(2, 0.0).unwrap() + 0.5).abs() < 1e-11);
        assert!((t.h_n0(3, 0.0).unwrap() - SQRT_PI / 8.0).abs() < 1e-11);
    }

    #[test]
    fn power_case_reproduces_heat_polynomials() {
        let lin = prof("linear");
        let quad = prof("quadratic");
        let half = prof("halfline_power");
        for (x, t) in [(0.0, 1.0), (1.3, 0.5), (-4.0, 1e4)] {
            assert!((eval_power_case(&lin, x, t, 3).unwrap() - x).abs() < 1e-12 * (1.0 + x.abs()));
            let want = x * x + 2.0 * t;
            assert!((eval_power_case(&quad, x, t, 3).unwrap() - want).abs() < 1e-12 * want);
        }
        let v = eval_power_case(&half, 0.0, 1.0, 2).unwrap();
        assert!((v - 1.0 / SQRT_PI).abs() < 1e-15);
        assert!(eval_power_case(&prof("lorentzian"), 0.0, 1.0, 1).is_err());
        assert!(eval_theorem1(&lin, 0.0, 1.0, 1, SignMode::Alternating).is_err());
    }

    #[test]
    fn plane_leading_value() {
        let p = builtin_2d("product_strip").unwrap();
        let t = 1e4;
        let v = eval_theorem2_leading(&p, 2.0 * 2.0 * 100.0, 0.0, t, 1e-12).unwrap();
        assert!((v - 5.629e-3).abs() < 1e-6, "{v}");
        let far = eval_theorem2_leading(&p, 0.0, 5.0 * 200.0, t, 1e-12).unwrap();
        assert!(far < 1e-12);
        let zero = builtin_2d("box").unwrap();
        assert_eq!(eval_theorem2_leading(&zero, 1.0, 0.0, t, 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn table_serialises() {
        let t = ExpansionTable::new(&prof("gated_inverse"), 2, SignMode::Alternating, 1e-8).unwrap();
        let text = serde_json::to_string(&t).unwrap();
        assert!(text.contains("\"kind\":\"incomplete\""));
    }
}
