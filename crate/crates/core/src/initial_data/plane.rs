//! Two-dimensional initial functions that approach a section `Λ_0(x₂)` as
//! `x₁ → +∞` and vanish as `x₁ → -∞`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub type ProfileFn2D = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
type ProfileFn1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct InitialProfile2D {
    pub name: String,
    evaluate: ProfileFn2D,
    section: ProfileFn1,
    /// Growth order in `x₁`; only `0` is supported.
    pub growth_order: usize,
    /// Lines `x₁ = const` where `Λ` jumps.
    pub breaks_x1: Vec<f64>,
    /// Lines `x₂ = const` where `Λ` jumps.
    pub breaks_x2: Vec<f64>,
    /// `Λ` vanishes for `x₂` outside this interval.
    pub support_x2: (f64, f64),
    /// `Λ` vanishes for `x₁` below this value.
    pub start_x1: f64,
    /// `sup |Λ|`.
    pub sup: f64,
}

impl fmt::Debug for InitialProfile2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InitialProfile2D")
            .field("name", &self.name)
            .field("growth_order", &self.growth_order)
            .field("support_x2", &self.support_x2)
            .finish()
    }
}

impl InitialProfile2D {
    pub fn eval(&self, x1: f64, x2: f64) -> f64 {
        (self.evaluate)(x1, x2)
    }

    /// `Λ_0(x₂) = lim_{x₁→+∞} Λ(x₁, x₂)`.
    pub fn section(&self, x2: f64) -> f64 {
        (self.section)(x2)
    }

    /// `∫ Λ_0(x₂) dx₂` over the support, to absolute tolerance `tol`.
    pub fn section_integral(&self, tol: f64) -> Result<f64> {
        let (a, b) = self.support_x2;
        let pts = crate::quad::partition(a, b, self.breaks_x2.iter().copied());
        let f = |s: f64| self.section(s);
        Ok(crate::quad::integrate(&f, &pts, tol, crate::quad::DEFAULT_BUDGET)?.value)
    }

    /// `Λ(λx₁, λx₂)`.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::Domain(format!("scale factor must be positive, got {lambda}")));
        }
        let f = Arc::clone(&self.evaluate);
        let g = Arc::clone(&self.section);
        Ok(Self {
            name: format!("{}[x{lambda}]", self.name),
            evaluate: Arc::new(move |a, b| f(lambda * a, lambda * b)),
            section: Arc::new(move |b| g(lambda * b)),
            growth_order: self.growth_order,
            breaks_x1: self.breaks_x1.iter().map(|b| b / lambda).collect(),
            breaks_x2: self.breaks_x2.iter().map(|b| b / lambda).collect(),
            support_x2: (self.support_x2.0 / lambda, self.support_x2.1 / lambda),
            start_x1: self.start_x1 / lambda,
            sup: self.sup,
        })
    }
}

fn strip(x2: f64) -> f64 {
    if (-1.0..=1.0).contains(&x2) {
        1.0
    } else {
        0.0
    }
}

pub fn builtin_names_2d() -> &'static [&'static str] {
    &["product_strip", "box", "zero"]
}

/// Two-dimensional builtins:
/// * `product_strip`: `1_{x₁≥1} 1_{|x₂|≤1}`,
/// * `box`: `1_{0≤x₁≤1} 1_{|x₂|≤1}` (zero section),
/// * `zero`.
pub fn builtin_2d(name: &str) -> Result<InitialProfile2D> {
    let make = |f: ProfileFn2D, section: ProfileFn1, breaks_x1: Vec<f64>, sup| InitialProfile2D {
        name: name.to_string(),
        evaluate: f,
        section,
        growth_order: 0,
        breaks_x1,
        breaks_x2: vec![-1.0, 1.0],
        support_x2: (-1.0, 1.0),
        start_x1: 0.0,
        sup,
    };
    Ok(match name {
        "product_strip" => {
            make(Arc::new(|a, b| if a >= 1.0 { strip(b) } else { 0.0 }), Arc::new(strip), vec![1.0], 1.0)
        }
        "box" => make(
            Arc::new(|a, b| if (0.0..=1.0).contains(&a) { strip(b) } else { 0.0 }),
            Arc::new(|_| 0.0),
            vec![0.0, 1.0],
            1.0,
        ),
        "zero" => make(Arc::new(|_, _| 0.0), Arc::new(|_| 0.0), vec![], 0.0),
        other => return Err(Error::Profile(format!("unknown two-dimensional profile `{other}`"))),
    })
}
