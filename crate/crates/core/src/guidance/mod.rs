//! Guidance composition over an abstract denoiser, and a linear toy
//! denoiser for checking the algebra end to end.

mod toy;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use toy::{ToyDenoiser, TOY_SCHEMA};

fn same_len<T>(first: &[T], rest: &[&[T]]) -> Result<()> {
    for v in rest {
        if v.len() != first.len() {
            return Err(Error::DimensionMismatch {
                expected: first.len(),
                got: v.len(),
            });
        }
    }
    Ok(())
}

/// `u + w (c - u)`.
pub fn cfg_combine<T: Scalar>(uncond: &[T], cond: &[T], w: T) -> Result<Vec<T>> {
    same_len(uncond, &[cond])?;
    Ok(uncond.iter().zip(cond).map(|(&u, &c)| u + w * (c - u)).collect())
}

/// `u + w (c0 - u) + w' (c1 - c2)`.
pub fn rte_combine<T: Scalar>(uncond: &[T], c0: &[T], c1: &[T], c2: &[T], w: T, w_prime: T) -> Result<Vec<T>> {
    same_len(uncond, &[c0, c1, c2])?;
    Ok((0..uncond.len())
        .map(|i| uncond[i] + w * (c0[i] - uncond[i]) + w_prime * (c1[i] - c2[i]))
        .collect())
}

/// `u + w (c - c2)`: `c2` in the role of a negative prompt.
pub fn negative_combine<T: Scalar>(uncond: &[T], cond: &[T], c2: &[T], w: T) -> Result<Vec<T>> {
    same_len(uncond, &[cond, c2])?;
    Ok((0..uncond.len()).map(|i| uncond[i] + w * (cond[i] - c2[i])).collect())
}

/// `u + w (c - u) + w' (c1 - u)`.
pub fn positive_combine<T: Scalar>(uncond: &[T], cond: &[T], c1: &[T], w: T, w_prime: T) -> Result<Vec<T>> {
    same_len(uncond, &[cond, c1])?;
    Ok((0..uncond.len())
        .map(|i| uncond[i] + w * (cond[i] - uncond[i]) + w_prime * (c1[i] - uncond[i]))
        .collect())
}

/// Noise prediction `z(x_t, t, c)`; `cond = None` is the unconditional branch.
pub trait Denoiser<T> {
    fn dim(&self) -> usize;
    fn predict(&self, x: &[T], t: usize, cond: Option<&str>) -> Result<Vec<T>>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GuidanceMode {
    Cfg,
    Rte,
    Negative,
    Positive,
}

impl GuidanceMode {
    pub fn as_str(self) -> &'static str {
        match self {
            GuidanceMode::Cfg => "cfg",
            GuidanceMode::Rte => "rte",
            GuidanceMode::Negative => "negative",
            GuidanceMode::Positive => "positive",
        }
    }
}

impl fmt::Display for GuidanceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GuidanceMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cfg" => Ok(GuidanceMode::Cfg),
            "rte" => Ok(GuidanceMode::Rte),
            "negative" => Ok(GuidanceMode::Negative),
            "positive" => Ok(GuidanceMode::Positive),
            _ => Err(Error::Config(format!(
                "unknown guidance mode `{s}` (expected cfg, rte, negative or positive)"
            ))),
        }
    }
}

/// Which conditions and weights to combine.
///
/// `c0` is the prompt. `rte` needs `c1` and `c2`, `negative` needs `c2`,
/// `positive` needs `c1`; `w_prime` is unused by `cfg` and `negative`.
#[derive(Debug, Clone, PartialEq)]
pub struct GuidanceSpec<T> {
    pub mode: GuidanceMode,
    pub w: T,
    pub w_prime: T,
    pub c0: String,
    pub c1: Option<String>,
    pub c2: Option<String>,
}

impl<T: Scalar> GuidanceSpec<T> {
    /// Fallback second weight when none is given: half the guidance weight.
    pub fn default_w_prime(w: T) -> T {
        w / T::of(2.0)
    }

    pub fn cfg(c0: impl Into<String>, w: T) -> Self {
        GuidanceSpec {
            mode: GuidanceMode::Cfg,
            w,
            w_prime: T::zero(),
            c0: c0.into(),
            c1: None,
            c2: None,
        }
    }

    pub fn rte(c0: impl Into<String>, c1: impl Into<String>, c2: impl Into<String>, w: T, w_prime: T) -> Self {
        GuidanceSpec {
            mode: GuidanceMode::Rte,
            w,
            w_prime,
            c0: c0.into(),
            c1: Some(c1.into()),
            c2: Some(c2.into()),
        }
    }

    pub fn negative(c0: impl Into<String>, c2: impl Into<String>, w: T) -> Self {
        GuidanceSpec {
            mode: GuidanceMode::Negative,
            w,
            w_prime: T::zero(),
            c0: c0.into(),
            c1: None,
            c2: Some(c2.into()),
        }
    }

    pub fn positive(c0: impl Into<String>, c1: impl Into<String>, w: T, w_prime: T) -> Self {
        GuidanceSpec {
            mode: GuidanceMode::Positive,
            w,
            w_prime,
            c0: c0.into(),
            c1: Some(c1.into()),
            c2: None,
        }
    }

    pub fn check(&self) -> Result<()> {
        if !self.w.is_finite() || !self.w_prime.is_finite() {
            return Err(Error::Config("guidance weights must be finite".into()));
        }
        let (needs_c1, needs_c2) = match self.mode {
            GuidanceMode::Cfg => (false, false),
            GuidanceMode::Rte => (true, true),
            GuidanceMode::Negative => (false, true),
            GuidanceMode::Positive => (true, false),
        };
        if needs_c1 && self.c1.is_none() {
            return Err(Error::Config(format!("{} guidance needs c1", self.mode)));
        }
        if needs_c2 && self.c2.is_none() {
            return Err(Error::Config(format!("{} guidance needs c2", self.mode)));
        }
        Ok(())
    }

    fn c1(&self) -> Result<&str> {
        self.c1.as_deref().ok_or_else(|| Error::Config(format!("{} guidance needs c1", self.mode)))
    }

    fn c2(&self) -> Result<&str> {
        self.c2.as_deref().ok_or_else(|| Error::Config(format!("{} guidance needs c2", self.mode)))
    }
}

/// Combined prediction `z_t` for one state.
pub fn guided_prediction<T: Scalar, D: Denoiser<T> + ?Sized>(
    den: &D,
    spec: &GuidanceSpec<T>,
    x: &[T],
    t: usize,
) -> Result<Vec<T>> {
    let u = den.predict(x, t, None)?;
    let c0 = den.predict(x, t, Some(&spec.c0))?;
    match spec.mode {
        GuidanceMode::Cfg => cfg_combine(&u, &c0, spec.w),
        GuidanceMode::Rte => {
            let c1 = den.predict(x, t, Some(spec.c1()?))?;
            let c2 = den.predict(x, t, Some(spec.c2()?))?;
            rte_combine(&u, &c0, &c1, &c2, spec.w, spec.w_prime)
        }
        GuidanceMode::Negative => {
            let c2 = den.predict(x, t, Some(spec.c2()?))?;
            negative_combine(&u, &c0, &c2, spec.w)
        }
        GuidanceMode::Positive => {
            let c1 = den.predict(x, t, Some(spec.c1()?))?;
            positive_combine(&u, &c0, &c1, spec.w, spec.w_prime)
        }
    }
}

/// States `x_0 ..= x_T` of the loop `x_{t+1} = x_t - eta * z_t`.
pub fn denoise_loop<T: Scalar, D: Denoiser<T> + ?Sized>(
    den: &D,
    spec: &GuidanceSpec<T>,
    x0: &[T],
    steps: usize,
    eta: T,
) -> Result<Vec<Vec<T>>> {
    spec.check()?;
    if steps == 0 {
        return Err(Error::Config("steps must be at least 1".into()));
    }
    if !eta.is_finite() {
        return Err(Error::Config("step size must be finite".into()));
    }
    if x0.len() != den.dim() {
        return Err(Error::DimensionMismatch {
            expected: den.dim(),
            got: x0.len(),
        });
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { step: 0 });
    }
    let mut states = Vec::with_capacity(steps + 1);
    states.push(x0.to_vec());
    for t in 0..steps {
        let x = &states[t];
        let z = guided_prediction(den, spec, x, t)?;
        let next: Vec<T> = x.iter().zip(&z).map(|(&a, &b)| a - eta * b).collect();
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { step: t + 1 });
        }
        states.push(next);
    }
    Ok(states)
}
