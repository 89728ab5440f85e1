//! TOML description of a one-dimensional profile.
//!
//! ```toml
//! kind = "lorentzian"
//! tail_plus = [0.0, 0.0, 1.0]      # optional, overrides the builtin tail
//! ```
//!
//! A `table` profile interpolates linearly between its samples and follows
//! its tail series outside them:
//!
//! ```toml
//! kind = "table"
//! params = { x = [-1.0, 0.0, 1.0], y = [0.0, 1.0, 0.0] }
//! tail_plus = [0.0]
//! tail_minus = [0.0]
//! ```

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::catalog::interpolate;
use super::{builtin, AsymptoticTail, InitialProfile1D, Params, ProfileSource, Side};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileDocument {
    pub kind: String,
    #[serde(default, skip_serializing_if = "is_default_params")]
    pub params: Params,
    /// Growth order; must agree with the builtin when given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_plus: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_minus: Option<Vec<f64>>,
    /// Extra breakpoints on top of those of the builtin.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub breakpoints: Option<Vec<f64>>,
}

fn is_default_params(p: &Params) -> bool {
    *p == Params::default()
}

impl ProfileDocument {
    pub fn builtin(kind: &str) -> Self {
        Self {
            kind: kind.into(),
            params: Params::default(),
            p: None,
            tail_plus: None,
            tail_minus: None,
            breakpoints: None,
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Profile(format!("cannot parse profile document: {e}")))
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Profile(format!("cannot write profile document: {e}")))
    }

    /// Describes `profile`, which must come from a builtin or a table. The
    /// tails are written out in full so the document is self-contained.
    pub fn from_profile(profile: &InitialProfile1D) -> Result<Self> {
        let (kind, params) = match &profile.source {
            ProfileSource::Builtin { kind, params } => (kind.clone(), params.clone()),
            ProfileSource::Table { x, y } => {
                ("table".to_string(), Params { x: Some(x.clone()), y: Some(y.clone()), ..Params::default() })
            }
            ProfileSource::Derived(how) => {
                return Err(Error::OutOfScope(format!("derived profile `{how}` has no document form")))
            }
        };
        Ok(Self {
            kind,
            params,
            p: Some(profile.growth_order()),
            tail_plus: Some(profile.tail_plus.coefficients.clone()),
            tail_minus: Some(profile.tail_minus.coefficients.clone()),
            breakpoints: Some(profile.breakpoints.clone()),
        })
    }

    pub fn to_profile(&self) -> Result<InitialProfile1D> {
        let base = builtin(&self.kind, &self.params)?;
        let p = self.p.unwrap_or(base.growth_order());
        let is_table = self.kind == "table";
        if p != base.growth_order() && !is_table {
            return Err(Error::Profile(format!(
                "`{}` has growth order {}, document says {p}",
                self.kind,
                base.growth_order()
            )));
        }
        let pick = |given: &Option<Vec<f64>>, side: Side| -> Result<AsymptoticTail> {
            match given {
                Some(c) => AsymptoticTail::new(side, p, c.clone()),
                None if p == base.growth_order() => Ok(base.tail(side).clone()),
                None => Err(Error::Profile(format!("growth order {p} needs an explicit {side:?} tail"))),
            }
        };
        let tail_plus = pick(&self.tail_plus, Side::Plus)?;
        let tail_minus = pick(&self.tail_minus, Side::Minus)?;
        let mut breakpoints = base.breakpoints.clone();
        breakpoints.extend(self.breakpoints.iter().flatten().copied());

        let evaluate = if let ProfileSource::Table { x, y } = &base.source {
            let (x, y) = (x.clone(), y.clone());
            let (tp, tm) = (tail_plus.clone(), tail_minus.clone());
            let (lo, hi) = (x[0], x[x.len() - 1]);
            Arc::new(move |s: f64| {
                if s > hi {
                    tp.partial_sum(s, tp.n_max())
                } else if s < lo {
                    tm.partial_sum(s, tm.n_max())
                } else {
                    interpolate(&x, &y, s)
                }
            }) as super::ProfileFn
        } else {
            base.evaluator()
        };
        let explicit = self.tail_plus.is_some() || self.tail_minus.is_some() || is_table;
        let prof = InitialProfile1D::new(
            base.name.clone(),
            evaluate,
            tail_plus,
            tail_minus,
            breakpoints,
            base.source.clone(),
        )?
        .with_even(base.even && !explicit);
        Ok(match base.bound_hint {
            Some((lo, hi)) if !is_table => prof.with_bounds(lo, hi),
            _ => prof,
        })
    }
}
