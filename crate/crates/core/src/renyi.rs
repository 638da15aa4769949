//! Shannon and Rényi entropies and divergences, and Gallager's `E0`.
//!
//! All values are in nats. Divergences return `+∞` as an ordinary value
//! when the support conditions fail.

use crate::error::{Error, Result};
use crate::simplex::{ln, log_sum_exp, AlphaOrder, AsMass, Channel, Distribution, Joint, Regime};

/// Information in natural units.
pub type Nats = f64;

pub fn shannon_entropy<P: AsMass + ?Sized>(p: &P) -> Nats {
    -p.mass().iter().filter(|&&v| v > 0.0).map(|&v| v * v.ln()).sum::<f64>()
}

/// `H(X|Y) = −Σ J(x,y) ln p(x|y)`.
pub fn shannon_cond_entropy(j: &Joint) -> Nats {
    let py = j.marginal_y();
    let mut h = 0.0;
    for x in 0..j.nx() {
        for (y, &v) in j.row(x).iter().enumerate() {
            if v > 0.0 {
                h -= v * (v / py.get(y)).ln();
            }
        }
    }
    h
}

/// `I(X;Y) = Σ J ln(J / p_X p_Y)`.
pub fn shannon_mi(j: &Joint) -> Nats {
    let px = j.marginal_x();
    let py = j.marginal_y();
    let mut i = 0.0;
    for x in 0..j.nx() {
        for (y, &v) in j.row(x).iter().enumerate() {
            if v > 0.0 {
                i += v * (v / (px.get(x) * py.get(y))).ln();
            }
        }
    }
    i
}

pub fn kl<P: AsMass + ?Sized>(p: &P, q: &P) -> Nats {
    let (p, q) = (p.mass(), q.mass());
    assert_eq!(p.len(), q.len(), "kl: length mismatch");
    let mut d = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        if a > 0.0 {
            if b <= 0.0 {
                return f64::INFINITY;
            }
            d += a * (a / b).ln();
        }
    }
    d
}

pub fn renyi_entropy<P: AsMass + ?Sized>(p: &P, alpha: AlphaOrder) -> Nats {
    let p = p.mass();
    match alpha.regime() {
        Regime::Shannon => shannon_entropy(p),
        Regime::Infinity => -p.iter().copied().fold(0.0, f64::max).ln(),
        Regime::Generic => {
            let a = alpha.value();
            log_sum_exp(p.iter().filter(|&&v| v > 0.0).map(|&v| a * v.ln())) / (1.0 - a)
        }
    }
}

/// `D_α(p‖q) = (1/(α−1)) ln Σ p^α q^{1−α}`.
///
/// For `α > 1` any `x` with `p(x) > 0 = q(x)` gives `+∞`; for `α < 1`
/// only disjoint supports do.
pub fn renyi_divergence<P: AsMass + ?Sized>(p: &P, q: &P, alpha: AlphaOrder) -> Nats {
    let (pm, qm) = (p.mass(), q.mass());
    assert_eq!(pm.len(), qm.len(), "renyi_divergence: length mismatch");
    match alpha.regime() {
        Regime::Shannon => kl(pm, qm),
        Regime::Infinity => pm
            .iter()
            .zip(qm)
            .filter(|(&a, _)| a > 0.0)
            .map(|(&a, &b)| if b > 0.0 { (a / b).ln() } else { f64::INFINITY })
            .fold(f64::NEG_INFINITY, f64::max),
        Regime::Generic => {
            let a = alpha.value();
            // (1 − a) ln 0 is +∞ for a > 1 and −∞ for a < 1, which is the
            // convention wanted on each side
            let lse = log_sum_exp(
                pm.iter()
                    .zip(qm)
                    .filter(|(&pv, _)| pv > 0.0)
                    .map(|(&pv, &qv)| a * pv.ln() + (1.0 - a) * ln(qv)),
            );
            lse / (a - 1.0)
        }
    }
}

/// Gallager's `E0(ρ, p) = −ln Σ_y (Σ_x p(x) W(y|x)^{1/(1+ρ)})^{1+ρ}`.
pub fn gallager_e0(rho: f64, p: &Distribution, w: &Channel) -> Result<Nats> {
    if !(1.0 + rho > 0.0) || !rho.is_finite() {
        return Err(Error::InvalidOrder(1.0 + rho));
    }
    if p.len() != w.nx() {
        return Err(Error::DimensionMismatch {
            expected: w.nx(),
            got: p.len(),
        });
    }
    let s = 1.0 + rho;
    let outer = log_sum_exp((0..w.ny()).map(|y| {
        let inner = log_sum_exp(
            p.support()
                .map(|(x, px)| px.ln() + ln(w.get(x, y)) / s),
        );
        s * inner
    }));
    Ok(-outer)
}
