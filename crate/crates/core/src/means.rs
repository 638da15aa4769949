//! Weighted means and q-deformed logarithms.
//!
//! The power mean `M_t` and the generalized geometric mean `G_q` are applied
//! to sign-definite families: a family that is `≤ 0` on the support is
//! averaged as `−mean(|f|)`. Gain functions with a negative prefactor
//! (orders below one) are handled this way.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::simplex::{log_sum_exp, AsMass};

/// Power-mean orders with `|t|` below this use the geometric branch.
pub const GEOMETRIC_EPS: f64 = 1e-8;

/// A real number stored as sign and magnitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignedValue {
    pub magnitude: f64,
    pub negative: bool,
}

impl SignedValue {
    pub fn new(value: f64) -> Self {
        Self {
            magnitude: value.abs(),
            negative: value < 0.0,
        }
    }

    pub fn value(&self) -> f64 {
        if self.negative {
            -self.magnitude
        } else {
            self.magnitude
        }
    }

    pub fn same_sign(&self, other: &SignedValue) -> bool {
        self.negative == other.negative
    }
}

/// The four averaging operators used by the leakage representations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "order", rename_all = "snake_case")]
pub enum Mean {
    Expectation,
    Geometric,
    Power(f64),
    GeneralizedGeometric(f64),
}

impl Mean {
    pub fn apply<W: AsMass + ?Sized>(&self, weights: &W, f: &[f64]) -> Result<SignedValue> {
        match *self {
            Mean::Expectation => expectation(weights, f).map(SignedValue::new),
            Mean::Geometric => power_mean(weights, f, 0.0),
            Mean::Power(t) => power_mean(weights, f, t),
            Mean::GeneralizedGeometric(q) => generalized_geometric_mean(weights, f, q),
        }
    }
}

fn check_len(weights: &[f64], f: &[f64]) -> Result<()> {
    if weights.len() != f.len() {
        return Err(Error::DimensionMismatch {
            expected: weights.len(),
            got: f.len(),
        });
    }
    Ok(())
}

/// `(weight, f)` pairs on the support of the weights.
fn on_support<'a>(weights: &'a [f64], f: &'a [f64]) -> impl Iterator<Item = (f64, f64)> + 'a {
    weights.iter().copied().zip(f.iter().copied()).filter(|&(w, _)| w > 0.0)
}

/// Sign of a family over the support; zeros are compatible with either.
fn family_sign(weights: &[f64], f: &[f64]) -> Result<bool> {
    let mut pos = false;
    let mut neg = false;
    for (_, v) in on_support(weights, f) {
        pos |= v > 0.0;
        neg |= v < 0.0;
    }
    if pos && neg {
        return Err(Error::MixedSigns);
    }
    Ok(neg)
}

pub fn expectation<W: AsMass + ?Sized>(p: &W, f: &[f64]) -> Result<f64> {
    let w = p.mass();
    check_len(w, f)?;
    Ok(on_support(w, f).map(|(w, v)| w * v).sum())
}

/// `exp(Σ p ln f)`; `f` must be positive on the support of `p`.
pub fn geometric_mean<W: AsMass + ?Sized>(p: &W, f: &[f64]) -> Result<f64> {
    let w = p.mass();
    check_len(w, f)?;
    let mut acc = 0.0;
    for (index, (&wi, &fi)) in w.iter().zip(f).enumerate() {
        if wi > 0.0 {
            if !(fi > 0.0) {
                return Err(Error::NonPositiveValue { index });
            }
            acc += wi * fi.ln();
        }
    }
    Ok(acc.exp())
}

/// `sign(f) (Σ p |f|^t)^{1/t}`, with `M_0` the geometric mean.
pub fn power_mean<W: AsMass + ?Sized>(p: &W, f: &[f64], t: f64) -> Result<SignedValue> {
    let w = p.mass();
    check_len(w, f)?;
    let negative = family_sign(w, f)?;
    let magnitude = if t.abs() < GEOMETRIC_EPS {
        on_support(w, f)
            .map(|(w, v)| w * crate::simplex::ln(v.abs()))
            .sum::<f64>()
            .exp()
    } else {
        let lse = log_sum_exp(on_support(w, f).map(|(w, v)| {
            // |f|^t with 0^t = 0 for t > 0 and 0^t = ∞ for t < 0
            w.ln() + t * crate::simplex::ln(v.abs())
        }));
        (lse / t).exp()
    };
    Ok(SignedValue {
        magnitude,
        negative,
    })
}

/// `ln_q x = (x^{1−q} − 1)/(1 − q)`, `ln_1 = ln`.
pub fn q_log(x: f64, q: f64) -> f64 {
    if q == 1.0 {
        return x.ln();
    }
    let k = 1.0 - q;
    (k * x.ln()).exp_m1() / k
}

/// `exp_q x = (1 + (1 − q) x)^{1/(1−q)}`, `exp_1 = exp`.
pub fn q_exp(x: f64, q: f64) -> Result<f64> {
    if q == 1.0 {
        return Ok(x.exp());
    }
    let k = 1.0 - q;
    let base = 1.0 + k * x;
    if base < 0.0 {
        return Err(Error::DomainError { base });
    }
    Ok(((k * x).ln_1p() / k).exp())
}

/// `sign(f) exp_q(Σ p ln_q |f|)`.
pub fn generalized_geometric_mean<W: AsMass + ?Sized>(
    p: &W,
    f: &[f64],
    q: f64,
) -> Result<SignedValue> {
    let w = p.mass();
    check_len(w, f)?;
    let negative = family_sign(w, f)?;
    // ln_q 0 = +∞ when 1 − q < 0; the mean collapses to 0 as for M_{1−q}
    if q > 1.0 && on_support(w, f).any(|(_, v)| v == 0.0) {
        return Ok(SignedValue {
            magnitude: 0.0,
            negative,
        });
    }
    let e: f64 = on_support(w, f).map(|(w, v)| w * q_log(v.abs(), q)).sum();
    Ok(SignedValue {
        magnitude: q_exp(e, q)?,
        negative,
    })
}
