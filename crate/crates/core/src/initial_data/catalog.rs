use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{AsymptoticTail, InitialProfile1D, ProfileSource, Side};
use crate::error::{Error, Result};

/// Tail length for builtins whose series are exact or uniformly valid.
const LONG_TAIL: usize = 16;
/// Tail length for the `tanh`-gated builtins. Their `Φ_n` carry a factor
/// `s^{n+1} e^{-2s}` near `s ≈ 1..3`, so longer tails break the `4 s^{-2}`
/// remainder bound.
const GATED_TAIL: usize = 6;

/// Optional constructor parameters.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Params {
    /// Level of `const`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    /// Exponent of `halfline_power`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    /// Abscissae of a `table` profile.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<f64>>,
    /// Ordinates of a `table` profile.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<Vec<f64>>,
}

pub fn builtin_names() -> &'static [&'static str] {
    &["const", "heaviside", "linear", "quadratic", "lorentzian", "gated_lorentzian", "gated_inverse", "halfline_power"]
}

/// Every builtin with default parameters.
pub fn builtin_profiles() -> Vec<InitialProfile1D> {
    builtin_names().iter().map(|name| builtin(name, &Params::default()).expect("builtin defaults are valid")).collect()
}

fn series(len: usize, f: impl Fn(usize) -> f64) -> Vec<f64> {
    (0..=len).map(f).collect()
}

fn unit_leading(len: usize) -> Vec<f64> {
    series(len, |n| if n == 0 { 1.0 } else { 0.0 })
}

/// `1/(1+s²) = s^{-2} - s^{-4} + …`
fn lorentzian_series(len: usize) -> Vec<f64> {
    series(len, |n| match n {
        0 => 0.0,
        _ if n % 2 == 1 => 0.0,
        _ if (n / 2) % 2 == 1 => 1.0,
        _ => -1.0,
    })
}

/// `s/(1+s²) = s^{-1} - s^{-3} + …`
fn inverse_series(len: usize) -> Vec<f64> {
    series(len, |n| match n {
        _ if n % 2 == 0 => 0.0,
        _ if (n / 2) % 2 == 0 => 1.0,
        _ => -1.0,
    })
}

fn gate(x: f64) -> f64 {
    0.5 * (1.0 + x.tanh())
}

fn make(
    kind: &str,
    params: &Params,
    f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    p: usize,
    plus: Vec<f64>,
    minus: Vec<f64>,
    breakpoints: Vec<f64>,
) -> Result<InitialProfile1D> {
    InitialProfile1D::new(
        kind,
        Arc::new(f),
        AsymptoticTail::new(Side::Plus, p, plus)?,
        AsymptoticTail::new(Side::Minus, p, minus)?,
        breakpoints,
        ProfileSource::Builtin { kind: kind.to_string(), params: params.clone() },
    )
}

/// Constructs a builtin profile by name.
pub fn builtin(name: &str, params: &Params) -> Result<InitialProfile1D> {
    let zeros = |len: usize| vec![0.0; len + 1];
    let prof = match name {
        "const" => {
            let c = params.c.unwrap_or(1.0);
            let tail = series(LONG_TAIL, |n| if n == 0 { c } else { 0.0 });
            make(name, params, move |_| c, 0, tail.clone(), tail, vec![])?.with_bounds(c, c).with_even(true)
        }
        "heaviside" => make(
            name,
            params,
            |x| if x >= 0.0 { 1.0 } else { 0.0 },
            0,
            unit_leading(LONG_TAIL),
            zeros(LONG_TAIL),
            vec![0.0],
        )?
        .with_bounds(0.0, 1.0),
        "linear" => make(name, params, |x| x, 1, unit_leading(LONG_TAIL), unit_leading(LONG_TAIL), vec![])?,
        "quadratic" => {
            make(name, params, |x| x * x, 2, unit_leading(LONG_TAIL), unit_leading(LONG_TAIL), vec![])?.with_even(true)
        }
        "lorentzian" => make(
            name,
            params,
            |x| 1.0 / (1.0 + x * x),
            0,
            lorentzian_series(LONG_TAIL),
            lorentzian_series(LONG_TAIL),
            vec![],
        )?
        .with_bounds(0.0, 1.0)
        .with_even(true),
        "gated_lorentzian" => make(
            name,
            params,
            |x| gate(x) / (1.0 + x * x),
            0,
            lorentzian_series(GATED_TAIL),
            zeros(GATED_TAIL),
            vec![],
        )?
        .with_bounds(0.0, 1.0),
        "gated_inverse" => make(
            name,
            params,
            |x| gate(x) * x / (1.0 + x * x),
            0,
            inverse_series(GATED_TAIL),
            zeros(GATED_TAIL),
            vec![],
        )?
        .with_bounds(-0.11, 0.5),
        "halfline_power" => {
            let p = params.p.unwrap_or(1);
            let pi = p as i32;
            let prof = make(
                name,
                params,
                move |x| {
                    if x > 0.0 {
                        x.powi(pi)
                    } else if x == 0.0 && p == 0 {
                        1.0
                    } else {
                        0.0
                    }
                },
                p,
                unit_leading(LONG_TAIL),
                zeros(LONG_TAIL),
                vec![0.0],
            )?;
            if p == 0 {
                prof.with_bounds(0.0, 1.0)
            } else {
                prof
            }
        }
        "table" => table(params)?,
        other => return Err(Error::Profile(format!("unknown profile kind `{other}`"))),
    };
    Ok(prof)
}

/// Piecewise-linear interpolation of `(x, y)`; outside the table the tails
/// must be supplied separately (see `document`). Until then the table is
/// extended by the constant end values.
fn table(params: &Params) -> Result<InitialProfile1D> {
    let (x, y) = match (&params.x, &params.y) {
        (Some(x), Some(y)) => (x.clone(), y.clone()),
        _ => return Err(Error::Profile("table profile needs params.x and params.y".into())),
    };
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::Profile("table needs at least two (x, y) pairs of equal length".into()));
    }
    if x.windows(2).any(|w| !(w[1] > w[0])) || x.iter().chain(&y).any(|v| !v.is_finite()) {
        return Err(Error::Profile("table abscissae must be finite and strictly increasing".into()));
    }
    let (xs, ys) = (x.clone(), y.clone());
    let f = move |s: f64| interpolate(&xs, &ys, s);
    let plus = vec![*y.last().unwrap()];
    let minus = vec![y[0]];
    InitialProfile1D::new(
        "table",
        Arc::new(f),
        AsymptoticTail::new(Side::Plus, 0, plus)?,
        AsymptoticTail::new(Side::Minus, 0, minus)?,
        x.clone(),
        ProfileSource::Table { x, y },
    )
}

pub(crate) fn interpolate(x: &[f64], y: &[f64], s: f64) -> f64 {
    if s <= x[0] {
        return y[0];
    }
    if s >= x[x.len() - 1] {
        return y[y.len() - 1];
    }
    let i = x.partition_point(|v| *v <= s) - 1;
    let w = (s - x[i]) / (x[i + 1] - x[i]);
    y[i] + w * (y[i + 1] - y[i])
}
