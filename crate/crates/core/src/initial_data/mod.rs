//! Initial functions with prescribed power-law tails.
//!
//! A profile couples an evaluatable `Λ(x)` with its asymptotic series
//! `Λ(x) = x^p Σ_n Λ±_n x^{-n}` as `x → ±∞`. Everything downstream (moments,
//! expansions, oracle splitting) reads the tail data and breakpoints from here.

mod catalog;
pub mod document;
mod moments;
mod plane;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use catalog::{builtin, builtin_names, builtin_profiles, Params};
pub use moments::{regularized_moments, TailMoments};
pub use plane::{builtin_2d, builtin_names_2d, InitialProfile2D, ProfileFn2D};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    /// `+1` for `Plus`, `-1` for `Minus`.
    pub fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }
}

/// Coefficients `Λ_0..Λ_{n_max}` of `Λ(x) ~ x^p Σ Λ_n x^{-n}` on one side.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticTail {
    pub side: Side,
    pub growth_order: usize,
    pub coefficients: Vec<f64>,
}

impl AsymptoticTail {
    pub fn new(side: Side, growth_order: usize, coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::Profile("tail needs at least the leading coefficient".into()));
        }
        if let Some(bad) = coefficients.iter().find(|c| !c.is_finite()) {
            return Err(Error::Profile(format!("non-finite tail coefficient {bad}")));
        }
        Ok(Self { side, growth_order, coefficients })
    }

    pub fn zeros(side: Side, growth_order: usize, n_max: usize) -> Self {
        Self { side, growth_order, coefficients: vec![0.0; n_max + 1] }
    }

    pub fn n_max(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// `Λ_n`, or `None` past the stored range.
    pub fn coefficient(&self, n: usize) -> Option<f64> {
        self.coefficients.get(n).copied()
    }

    /// `s^p Σ_{m=0}^{upto} Λ_m s^{-m}`.
    pub fn partial_sum(&self, s: f64, upto: usize) -> f64 {
        let p = self.growth_order as i32;
        self.coefficients.iter().take(upto + 1).enumerate().map(|(m, c)| c * s.powi(p - m as i32)).sum()
    }

    /// `Σ_{m=0}^{upto} |Λ_m s^{p-m}|`, the scale of `partial_sum` for round-off bounds.
    pub(crate) fn partial_abs_sum(&self, s: f64, upto: usize) -> f64 {
        let p = self.growth_order as i32;
        self.coefficients.iter().take(upto + 1).enumerate().map(|(m, c)| (c * s.powi(p - m as i32)).abs()).sum()
    }
}

/// How a profile was built; used to write it back out as a document.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileSource {
    Builtin { kind: String, params: Params },
    Table { x: Vec<f64>, y: Vec<f64> },
    Derived(String),
}

pub type ProfileFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// One-dimensional initial function `Λ` with its tails.
#[derive(Clone)]
pub struct InitialProfile1D {
    pub name: String,
    evaluate: ProfileFn,
    pub tail_plus: AsymptoticTail,
    pub tail_minus: AsymptoticTail,
    /// Sorted points where `Λ` jumps or has a kink.
    pub breakpoints: Vec<f64>,
    /// `(inf Λ, sup Λ)` when known.
    pub bound_hint: Option<(f64, f64)>,
    /// `Λ(-x) = Λ(x)`.
    pub even: bool,
    pub source: ProfileSource,
}

impl fmt::Debug for InitialProfile1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InitialProfile1D")
            .field("name", &self.name)
            .field("tail_plus", &self.tail_plus)
            .field("tail_minus", &self.tail_minus)
            .field("breakpoints", &self.breakpoints)
            .field("bound_hint", &self.bound_hint)
            .field("even", &self.even)
            .finish()
    }
}

impl InitialProfile1D {
    /// Builds a profile. Tails of unequal growth order are rejected; tails of
    /// unequal length are cut to the shorter one, since a missing coefficient
    /// is unknown rather than zero.
    pub fn new(
        name: impl Into<String>,
        evaluate: ProfileFn,
        mut tail_plus: AsymptoticTail,
        mut tail_minus: AsymptoticTail,
        mut breakpoints: Vec<f64>,
        source: ProfileSource,
    ) -> Result<Self> {
        if tail_plus.growth_order != tail_minus.growth_order {
            return Err(Error::Profile(format!(
                "tails disagree on growth order ({} vs {})",
                tail_plus.growth_order, tail_minus.growth_order
            )));
        }
        if tail_plus.side != Side::Plus || tail_minus.side != Side::Minus {
            return Err(Error::Profile("tails passed on the wrong sides".into()));
        }
        let len = tail_plus.coefficients.len().min(tail_minus.coefficients.len());
        tail_plus.coefficients.truncate(len);
        tail_minus.coefficients.truncate(len);
        if breakpoints.iter().any(|b| !b.is_finite()) {
            return Err(Error::Profile("breakpoints must be finite".into()));
        }
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();
        Ok(Self {
            name: name.into(),
            evaluate,
            tail_plus,
            tail_minus,
            breakpoints,
            bound_hint: None,
            even: false,
            source,
        })
    }

    pub fn with_bounds(mut self, lo: f64, hi: f64) -> Self {
        self.bound_hint = Some((lo, hi));
        self
    }

    pub fn with_even(mut self, even: bool) -> Self {
        self.even = even;
        self
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.evaluate)(x)
    }

    pub fn evaluator(&self) -> ProfileFn {
        Arc::clone(&self.evaluate)
    }

    pub fn growth_order(&self) -> usize {
        self.tail_plus.growth_order
    }

    pub fn tail(&self, side: Side) -> &AsymptoticTail {
        match side {
            Side::Plus => &self.tail_plus,
            Side::Minus => &self.tail_minus,
        }
    }

    /// Tail coefficients shared by both sides.
    pub fn n_max(&self) -> usize {
        self.tail_plus.n_max()
    }

    /// The profile `s ↦ Λ(-s)`. Its plus-side coefficients are
    /// `(-1)^{p-m} Λ⁻_m` and vice versa.
    pub fn reflect(&self) -> Self {
        let p = self.growth_order();
        let flip = |tail: &AsymptoticTail, side| AsymptoticTail {
            side,
            growth_order: p,
            coefficients: tail
                .coefficients
                .iter()
                .enumerate()
                .map(|(m, c)| if (p + m) % 2 == 1 { -c } else { *c })
                .collect(),
        };
        let f = self.evaluator();
        Self {
            name: format!("{}[reflected]", self.name),
            evaluate: Arc::new(move |s| f(-s)),
            tail_plus: flip(&self.tail_minus, Side::Plus),
            tail_minus: flip(&self.tail_plus, Side::Minus),
            breakpoints: self.breakpoints.iter().rev().map(|b| -b).collect(),
            bound_hint: self.bound_hint,
            even: self.even,
            source: ProfileSource::Derived(format!("reflect({})", self.name)),
        }
    }

    /// The profile `x ↦ Λ(λx)`, with `Λ_n ↦ λ^{p-n} Λ_n` and breakpoints
    /// `b ↦ b/λ`.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::Domain(format!("scale factor must be positive, got {lambda}")));
        }
        let p = self.growth_order() as i32;
        let transport = |tail: &AsymptoticTail| AsymptoticTail {
            side: tail.side,
            growth_order: tail.growth_order,
            coefficients: tail.coefficients.iter().enumerate().map(|(n, c)| c * lambda.powi(p - n as i32)).collect(),
        };
        let f = self.evaluator();
        Ok(Self {
            name: format!("{}[x{lambda}]", self.name),
            evaluate: Arc::new(move |x| f(lambda * x)),
            tail_plus: transport(&self.tail_plus),
            tail_minus: transport(&self.tail_minus),
            breakpoints: self.breakpoints.iter().map(|b| b / lambda).collect(),
            bound_hint: self.bound_hint,
            even: self.even,
            source: ProfileSource::Derived(format!("scale({}, {lambda})", self.name)),
        })
    }

    /// Subtracts the growing and constant part `Σ_{m≤p} Λ±_m x^{p-m}` on each
    /// half-line. The result is bounded, has growth order 0, and tails
    /// `(0, Λ±_{p+1}, Λ±_{p+2}, …)`.
    pub fn decaying_remainder(&self) -> Self {
        let p = self.growth_order();
        let plus: Vec<f64> = self.tail_plus.coefficients.iter().take(p + 1).copied().collect();
        let minus: Vec<f64> = self.tail_minus.coefficients.iter().take(p + 1).copied().collect();
        let poly =
            move |c: &[f64], s: f64| -> f64 { c.iter().enumerate().map(|(m, v)| v * s.powi((p - m) as i32)).sum() };
        let f = self.evaluator();
        let shift = |tail: &AsymptoticTail, side| {
            let mut coefficients = vec![0.0];
            coefficients.extend(tail.coefficients.iter().skip(p + 1).copied());
            AsymptoticTail { side, growth_order: 0, coefficients }
        };
        let mut breakpoints = self.breakpoints.clone();
        breakpoints.push(0.0);
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();
        Self {
            name: format!("{}[remainder]", self.name),
            evaluate: Arc::new(move |s| if s >= 0.0 { f(s) - poly(&plus, s) } else { f(s) - poly(&minus, s) }),
            tail_plus: shift(&self.tail_plus, Side::Plus),
            tail_minus: shift(&self.tail_minus, Side::Minus),
            breakpoints,
            bound_hint: None,
            even: self.even,
            source: ProfileSource::Derived(format!("remainder({})", self.name)),
        }
    }

    /// `a·self + b·other`, defined when both share a growth order.
    pub fn linear_combination(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        if self.growth_order() != other.growth_order() {
            return Err(Error::Profile("cannot combine profiles of different growth order".into()));
        }
        let combine = |x: &AsymptoticTail, y: &AsymptoticTail| {
            let len = x.coefficients.len().min(y.coefficients.len());
            AsymptoticTail {
                side: x.side,
                growth_order: x.growth_order,
                coefficients: (0..len).map(|i| a * x.coefficients[i] + b * y.coefficients[i]).collect(),
            }
        };
        let (f, g) = (self.evaluator(), other.evaluator());
        let mut breakpoints = self.breakpoints.clone();
        breakpoints.extend(&other.breakpoints);
        InitialProfile1D::new(
            format!("{a}*{}+{b}*{}", self.name, other.name),
            Arc::new(move |x| a * f(x) + b * g(x)),
            combine(&self.tail_plus, &other.tail_plus),
            combine(&self.tail_minus, &other.tail_minus),
            breakpoints,
            ProfileSource::Derived("linear combination".into()),
        )
        .map(|prof| prof.with_even(self.even && other.even))
    }
}

/// `s^{n-1} [Λ(s) - s^p Σ_{m=0}^{p+n} Λ_m s^{-m}]` using the coefficients of
/// `side`. Requires `s ≥ 1` on the plus side and `s ≤ -1` on the minus side.
pub fn phi_remainder(profile: &InitialProfile1D, side: Side, n: usize, s: f64) -> Result<f64> {
    let (value, _) = phi_with_roundoff(profile, side, n, s)?;
    Ok(value)
}

/// `Φ_n(s)` together with a bound on its floating-point round-off.
pub(crate) fn phi_with_roundoff(profile: &InitialProfile1D, side: Side, n: usize, s: f64) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::Domain("phi_remainder needs n >= 1".into()));
    }
    let ok = match side {
        Side::Plus => s >= 1.0,
        Side::Minus => s <= -1.0,
    };
    if !ok || !s.is_finite() {
        return Err(Error::Domain(format!("phi_remainder evaluated at s = {s} on the {side:?} side")));
    }
    let tail = profile.tail(side);
    let upto = tail.growth_order + n;
    if upto > tail.n_max() {
        return Err(Error::Profile(format!(
            "order {n} needs tail coefficients up to index {upto}, have {}",
            tail.n_max()
        )));
    }
    let lam = profile.eval(s);
    let weight = s.powi(n as i32 - 1);
    let value = weight * (lam - tail.partial_sum(s, upto));
    let noise = weight.abs() * 16.0 * f64::EPSILON * (lam.abs() + tail.partial_abs_sum(s, upto));
    Ok((value, noise))
}

/// Outcome of `validate_tails`.
#[derive(Debug, Clone, PartialEq)]
pub struct TailReport {
    /// Worst `|Φ_n(s)|·s²` over the grid and both sides, for `n = 1..=n_max`
    /// (index `n - 1`). Round-off is subtracted before forming the ratio.
    pub worst_ratio: Vec<f64>,
    /// Offending `(side, n, s)` triples.
    pub violations: Vec<(Side, usize, f64)>,
}

impl TailReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `|Φ±_n(s)| ≤ c_bound·s^{-2}` for every `n ≤ n_max - p` and every grid
/// magnitude, on both sides. Values within round-off of the bound count as
/// passing since their sign and size are not resolvable in double precision.
pub fn validate_tails(profile: &InitialProfile1D, s_grid: &[f64], c_bound: f64) -> Result<TailReport> {
    if let Some(bad) = s_grid.iter().find(|s| !(s.abs() >= 1.0)) {
        return Err(Error::Domain(format!("validation grid point {bad} has |s| < 1")));
    }
    let orders = profile.n_max().saturating_sub(profile.growth_order());
    let mut worst_ratio = vec![0.0f64; orders];
    let mut violations = Vec::new();
    for n in 1..=orders {
        for &mag in s_grid {
            for side in [Side::Plus, Side::Minus] {
                let s = side.sign() * mag.abs();
                let (phi, noise) = phi_with_roundoff(profile, side, n, s)?;
                let ratio = (phi.abs() - noise).max(0.0) * s * s;
                worst_ratio[n - 1] = worst_ratio[n - 1].max(ratio);
                if ratio > c_bound {
                    violations.push((side, n, s));
                }
            }
        }
    }
    Ok(TailReport { worst_ratio, violations })
}

/// Logarithmic grid `lo·(hi/lo)^{k/(count-1)}`, `k = 0..count`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let ratio = (hi / lo).ln() / (count - 1) as f64;
    (0..count).map(|k| if k + 1 == count { hi } else { lo * (ratio * k as f64).exp() }).collect()
}
