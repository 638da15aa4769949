//! Conditional Rényi entropies.
//!
//! Arimoto and Hayashi entropies have closed forms and reverse-channel
//! (variational) forms. The Sibson-, Augustin–Csiszár- and
//! Lapidoth–Pfister-type entropies are defined by minimizing an objective
//! over reverse channels `r(x|y)`; the `*_objective` functions below evaluate
//! those objectives at any rule, which is what the perturbation certificates
//! in the tests rely on.

use serde::Serialize;

use crate::alpha_mi::{ac, lp, SolverConfig};
use crate::error::{Error, Result};
use crate::renyi::{shannon_cond_entropy, Nats};
use crate::simplex::{
    compose, ln, log_sum_exp, tilt, tilt_by, AlphaOrder, Channel, DecisionRule, Distribution,
};

/// Value of a variational conditional entropy with the rule achieving it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CondEntropyResult {
    pub value: Nats,
    pub optimizer: Option<DecisionRule>,
    pub iterations: usize,
    pub converged: bool,
}

impl CondEntropyResult {
    fn closed(value: Nats, optimizer: DecisionRule) -> Self {
        Self {
            value,
            optimizer: Some(optimizer),
            iterations: 0,
            converged: true,
        }
    }
}

pub(crate) fn check_dims(p: &Distribution, w: &Channel) -> Result<()> {
    if p.len() != w.nx() {
        return Err(Error::DimensionMismatch {
            expected: w.nx(),
            got: p.len(),
        });
    }
    Ok(())
}

/// `H^A_α(X|Y) = (α/(1−α)) ln Σ_y (Σ_x p(x)^α W(y|x)^α)^{1/α}`.
pub fn arimoto_cond_entropy(p: &Distribution, w: &Channel, alpha: AlphaOrder) -> Result<Nats> {
    check_dims(p, w)?;
    if alpha.is_shannon() {
        return Ok(shannon_cond_entropy(&compose(p, w)?));
    }
    let a = alpha.require_generic()?;
    let outer = log_sum_exp((0..w.ny()).map(|y| {
        log_sum_exp(p.support().map(|(x, px)| a * (px.ln() + ln(w.get(x, y))))) / a
    }));
    Ok(a / (1.0 - a) * outer)
}

/// `H^H_α(X|Y) = (1/(1−α)) ln Σ_y p_Y(y) Σ_x p(x|y)^α`.
pub fn hayashi_cond_entropy(p: &Distribution, w: &Channel, alpha: AlphaOrder) -> Result<Nats> {
    check_dims(p, w)?;
    let j = compose(p, w)?;
    if alpha.is_shannon() {
        return Ok(shannon_cond_entropy(&j));
    }
    let a = alpha.require_generic()?;
    let py = j.marginal_y();
    // p_Y Σ_x (J/p_Y)^α = p_Y^{1−α} Σ_x J^α
    let total = log_sum_exp(py.support().map(|(y, m)| {
        (1.0 - a) * m.ln() + log_sum_exp((0..j.nx()).map(|x| a * ln(j.get(x, y))))
    }));
    Ok(total / (1.0 - a))
}

/// `(α/(1−α)) ln Σ_{x,y} p(x) W(y|x) r(x|y)^{1−1/α}`, minimized by the
/// Arimoto entropy.
pub fn arimoto_objective(
    p: &Distribution,
    w: &Channel,
    r: &DecisionRule,
    alpha: AlphaOrder,
) -> Result<Nats> {
    check_dims(p, w)?;
    let a = alpha.require_generic()?;
    let beta = 1.0 - 1.0 / a;
    let terms = p.support().flat_map(|(x, px)| {
        (0..w.ny())
            .filter(move |&y| w.get(x, y) > 0.0)
            .map(move |y| px.ln() + w.get(x, y).ln() + beta * ln(r.get(x, y)))
    });
    Ok(a / (1.0 - a) * log_sum_exp(terms))
}

/// `(1/(1−α)) ln Σ_{x,y} J(x,y) (α r(x|y)^{α−1} − (α−1) ‖r(·|y)‖_α^α)`.
pub fn hayashi_objective(
    p: &Distribution,
    w: &Channel,
    r: &DecisionRule,
    alpha: AlphaOrder,
) -> Result<Nats> {
    check_dims(p, w)?;
    let a = alpha.require_generic()?;
    let j = compose(p, w)?;
    let norms: Vec<f64> = (0..r.ny())
        .map(|y| {
            log_sum_exp((0..r.nx()).map(|x| a * ln(r.get(x, y)))).exp()
        })
        .collect();
    let mut total = 0.0;
    for x in 0..j.nx() {
        for y in 0..j.ny() {
            let m = j.get(x, y);
            if m > 0.0 {
                total += m * (a * r.get(x, y).powf(a - 1.0) - (a - 1.0) * norms[y]);
            }
        }
    }
    Ok(total.ln() / (1.0 - a))
}

/// Per-`x` log of `Σ_y W(y|x) r(x|y)^β`, `-∞` off the support of `p`.
pub(crate) fn log_inner(p: &Distribution, w: &Channel, r: &DecisionRule, beta: f64) -> Vec<f64> {
    (0..w.nx())
        .map(|x| {
            if p.get(x) <= 0.0 {
                return f64::NEG_INFINITY;
            }
            log_sum_exp(
                (0..w.ny())
                    .filter(|&y| w.get(x, y) > 0.0)
                    .map(|y| w.get(x, y).ln() + beta * ln(r.get(x, y))),
            )
        })
        .collect()
}

/// `(α/(1−α)) Σ_x p(x) ln Σ_y W(y|x) r(x|y)^{1−1/α}`, minimized by the
/// Augustin–Csiszár-type entropy.
pub fn ac_objective(
    p: &Distribution,
    w: &Channel,
    r: &DecisionRule,
    alpha: AlphaOrder,
) -> Result<Nats> {
    check_dims(p, w)?;
    let a = alpha.require_generic()?;
    let inner = log_inner(p, w, r, 1.0 - 1.0 / a);
    let s: f64 = p.support().map(|(x, px)| px * inner[x]).sum();
    Ok(a / (1.0 - a) * s)
}

/// `((2α−1)/(1−α)) ln Σ_x p_γ(x) (Σ_y W(y|x) r(x|y)^{1−1/α})^γ` with
/// `γ = α/(2α−1)` and `p_γ` the γ-tilt of `p`; minimized by the
/// Lapidoth–Pfister-type entropy.
pub fn lp_objective(
    p: &Distribution,
    w: &Channel,
    r: &DecisionRule,
    alpha: AlphaOrder,
) -> Result<Nats> {
    check_dims(p, w)?;
    let a = alpha.require_lp_range()?;
    let gamma = a / (2.0 * a - 1.0);
    let prior = tilt_by(p.probs(), gamma);
    let inner = log_inner(p, w, r, 1.0 - 1.0 / a);
    let s = log_sum_exp(prior.support().map(|(x, px)| px.ln() + gamma * inner[x]));
    Ok((2.0 * a - 1.0) / (1.0 - a) * s)
}

/// Column-wise α-tilt of the posterior: the minimizer of
/// [`arimoto_objective`].
pub fn tilted_posterior(p: &Distribution, w: &Channel, alpha: AlphaOrder) -> Result<DecisionRule> {
    let post = compose(p, w)?.posterior();
    Ok(post.rule.map_columns(|_, col| tilt(col, alpha)))
}

pub fn arimoto_cond_entropy_variational(
    p: &Distribution,
    w: &Channel,
    alpha: AlphaOrder,
) -> Result<CondEntropyResult> {
    alpha.require_generic()?;
    let r = tilted_posterior(p, w, alpha)?;
    let value = arimoto_objective(p, w, &r, alpha)?;
    Ok(CondEntropyResult::closed(value, r))
}

pub fn hayashi_cond_entropy_variational(
    p: &Distribution,
    w: &Channel,
    alpha: AlphaOrder,
) -> Result<CondEntropyResult> {
    alpha.require_generic()?;
    let r = compose(p, w)?.posterior().rule;
    let value = hayashi_objective(p, w, &r, alpha)?;
    Ok(CondEntropyResult::closed(value, r))
}

/// Sibson-type entropy: the Arimoto variational form under the prior
/// tilted by `1/α`. Satisfies `I^S_α = H_{1/α}(X) − H^S_α(X|Y)`.
pub fn sibson_cond_entropy(
    p: &Distribution,
    w: &Channel,
    alpha: AlphaOrder,
) -> Result<CondEntropyResult> {
    alpha.require_generic()?;
    check_dims(p, w)?;
    let prior = tilt(p, alpha.reciprocal()?);
    arimoto_cond_entropy_variational(&prior, w, alpha)
}

/// Augustin–Csiszár-type entropy `H^C_α(X|Y)`, evaluated at the reverse
/// channel returned by the AC solver.
pub fn ac_cond_entropy(
    p: &Distribution,
    w: &Channel,
    alpha: AlphaOrder,
    cfg: &SolverConfig,
) -> Result<CondEntropyResult> {
    alpha.require_generic()?;
    check_dims(p, w)?;
    let sol = ac::solve(p, w, alpha.value(), cfg)?.into_converged()?;
    let value = ac_objective(p, w, &sol.rule, alpha)?;
    Ok(CondEntropyResult {
        value,
        optimizer: Some(sol.rule),
        iterations: sol.iterations,
        converged: true,
    })
}

/// Lapidoth–Pfister-type entropy `H^LP_α(X|Y)` for `α ∈ (1/2,1) ∪ (1,∞)`,
/// evaluated at the reverse channel induced by the LP solver.
pub fn lp_cond_entropy(
    p: &Distribution,
    w: &Channel,
    alpha: AlphaOrder,
    cfg: &SolverConfig,
) -> Result<CondEntropyResult> {
    alpha.require_lp_range()?;
    check_dims(p, w)?;
    let sol = lp::solve(p, w, alpha.value(), cfg)?.into_converged()?;
    let value = lp_objective(p, w, &sol.rule, alpha)?;
    Ok(CondEntropyResult {
        value,
        optimizer: Some(sol.rule),
        iterations: sol.iterations,
        converged: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::renyi::renyi_entropy;
    use crate::simplex::Normalization;

    fn alpha(v: f64) -> AlphaOrder {
        AlphaOrder::new(v).unwrap()
    }

    fn d(v: &[f64]) -> Distribution {
        Distribution::new(v, Normalization::Strict).unwrap()
    }

    /// Plain-loop evaluation of the closed forms, no log domain.
    fn arimoto_direct(p: &[f64], w: &[[f64; 2]; 2], a: f64) -> f64 {
        let mut s = 0.0;
        for y in 0..2 {
            let inner: f64 = (0..2).map(|x| (p[x] * w[x][y]).powf(a)).sum();
            s += inner.powf(1.0 / a);
        }
        a / (1.0 - a) * s.ln()
    }

    fn hayashi_direct(p: &[f64], w: &[[f64; 2]; 2], a: f64) -> f64 {
        let mut s = 0.0;
        for y in 0..2 {
            let py: f64 = (0..2).map(|x| p[x] * w[x][y]).sum();
            let inner: f64 = (0..2).map(|x| (p[x] * w[x][y] / py).powf(a)).sum();
            s += py * inner;
        }
        s.ln() / (1.0 - a)
    }

    #[test]
    fn closed_forms_match_direct_summation() {
        let p = d(&[0.3, 0.7]);
        let bsc = [[0.9, 0.1], [0.1, 0.9]];
        for a in [0.4, 2.0, 5.0] {
            let ar = arimoto_cond_entropy(&p, &Channel::bsc(0.1), alpha(a)).unwrap();
            assert!((ar - arimoto_direct(&[0.3, 0.7], &bsc, a)).abs() < 1e-14);
            let hy = hayashi_cond_entropy(&p, &Channel::bsc(0.1), alpha(a)).unwrap();
            assert!((hy - hayashi_direct(&[0.3, 0.7], &bsc, a)).abs() < 1e-14);
        }
    }

    #[test]
    fn identity_and_independent_channels() {
        let p = d(&[0.2, 0.5, 0.3]);
        let id = Channel::identity(3);
        let indep = Channel::constant(3, &d(&[0.6, 0.4]));
        for a in [0.3, 0.9, 2.0, 7.0] {
            let h = renyi_entropy(&p, alpha(a));
            assert!(arimoto_cond_entropy(&p, &id, alpha(a)).unwrap().abs() < 1e-14);
            assert!(hayashi_cond_entropy(&p, &id, alpha(a)).unwrap().abs() < 1e-14);
            assert!((arimoto_cond_entropy(&p, &indep, alpha(a)).unwrap() - h).abs() < 1e-14);
            assert!((hayashi_cond_entropy(&p, &indep, alpha(a)).unwrap() - h).abs() < 1e-14);
            let v = arimoto_cond_entropy_variational(&p, &id, alpha(a)).unwrap();
            assert!(v.value.abs() < 1e-14);
            assert!(v.optimizer.unwrap().max_abs_diff(&DecisionRule::identity(3)) < 1e-15);
        }
    }

    #[test]
    fn variational_forms_equal_closed_forms() {
        let p = d(&[0.15, 0.35, 0.5]);
        let w = Channel::new(
            &[vec![0.7, 0.2, 0.1], vec![0.1, 0.6, 0.3], vec![0.25, 0.25, 0.5]],
            Normalization::Strict,
        )
        .unwrap();
        for a in [0.3, 0.6, 0.9, 1.1, 2.0, 5.0] {
            let ar = arimoto_cond_entropy_variational(&p, &w, alpha(a)).unwrap().value;
            assert!((ar - arimoto_cond_entropy(&p, &w, alpha(a)).unwrap()).abs() < 1e-12);
            let hy = hayashi_cond_entropy_variational(&p, &w, alpha(a)).unwrap().value;
            assert!((hy - hayashi_cond_entropy(&p, &w, alpha(a)).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn variational_optimizers_survive_perturbation() {
        let p = d(&[0.15, 0.35, 0.5]);
        let w = Channel::new(
            &[vec![0.7, 0.2, 0.1], vec![0.1, 0.6, 0.3], vec![0.25, 0.25, 0.5]],
            Normalization::Strict,
        )
        .unwrap();
        let u = Distribution::uniform(3);
        for a in [0.3, 0.6, 2.0, 5.0] {
            let ar = arimoto_cond_entropy_variational(&p, &w, alpha(a)).unwrap();
            let hy = hayashi_cond_entropy_variational(&p, &w, alpha(a)).unwrap();
            for y in 0..3 {
                let bump = |r: &DecisionRule| {
                    r.map_columns(|c, col| if c == y { col.mix(&u, 1e-3) } else { col.clone() })
                };
                let ra = bump(ar.optimizer.as_ref().unwrap());
                assert!(arimoto_objective(&p, &w, &ra, alpha(a)).unwrap() >= ar.value - 1e-14);
                let rh = bump(hy.optimizer.as_ref().unwrap());
                assert!(hayashi_objective(&p, &w, &rh, alpha(a)).unwrap() >= hy.value - 1e-14);
            }
        }
    }

    #[test]
    fn shannon_regime_is_rejected_by_variational_forms() {
        let p = d(&[0.5, 0.5]);
        let w = Channel::bsc(0.2);
        assert!(matches!(
            arimoto_cond_entropy_variational(&p, &w, alpha(1.0)),
            Err(Error::ShannonRegime(_))
        ));
        assert!(matches!(
            sibson_cond_entropy(&p, &w, alpha(1.0)),
            Err(Error::ShannonRegime(_))
        ));
        // the closed forms fall back to Shannon
        let j = compose(&p, &w).unwrap();
        let h = shannon_cond_entropy(&j);
        assert!((arimoto_cond_entropy(&p, &w, alpha(1.0)).unwrap() - h).abs() < 1e-15);
    }

    #[test]
    fn sibson_entropy_on_noiseless_channel() {
        for a in [0.3, 0.8, 2.5] {
            let u = Distribution::uniform(4);
            let v = sibson_cond_entropy(&u, &Channel::identity(4), alpha(a)).unwrap();
            assert!(v.value.abs() < 1e-14);
        }
    }

    #[test]
    fn lp_objective_rejects_low_orders() {
        let p = d(&[0.5, 0.5]);
        let w = Channel::bsc(0.2);
        let r = DecisionRule::uniform(2, 2);
        assert!(matches!(
            lp_objective(&p, &w, &r, alpha(0.4)),
            Err(Error::AlphaOutOfRange { .. })
        ));
        assert!(matches!(
            lp_cond_entropy(&p, &w, alpha(0.5), &SolverConfig::default()),
            Err(Error::AlphaOutOfRange { .. })
        ));
    }
}
