//! The five α-mutual informations.
//!
//! | measure | definition |
//! |---|---|
//! | Sibson | `min_q D_α(pW ‖ p ⊗ q)` |
//! | Arimoto | `H_α(X) − H^A_α(X|Y)` |
//! | Augustin–Csiszár | `min_q Σ_x p(x) D_α(W_x ‖ q)` |
//! | Hayashi | `H_α(X) − H^H_α(X|Y)` |
//! | Lapidoth–Pfister | `min_{q_X,q_Y} D_α(pW ‖ q_X ⊗ q_Y)` |
//!
//! Sibson, Arimoto and Hayashi are closed form. Augustin–Csiszár and
//! Lapidoth–Pfister are iterative (see [`ac`] and [`lp`]) and report the
//! duality gap between their upper and lower bounds. All five reduce to
//! Shannon's mutual information in the Shannon window around `α = 1`.

pub(crate) mod ac;
pub(crate) mod lp;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::Exp1;
use serde::Serialize;

use crate::cond_renyi::{arimoto_cond_entropy, check_dims, hayashi_cond_entropy};
use crate::error::{Error, Result};
use crate::renyi::{renyi_entropy, shannon_mi, Nats};
use crate::simplex::{compose, ln, log_sum_exp, tilt, AlphaOrder, Channel, DecisionRule, Distribution};

/// How the iterative solvers pick their first output law.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Initializer {
    Uniform,
    /// The output marginal `p_Y` of `p ∘ W`.
    #[default]
    Marginal,
    Custom(Distribution),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub max_iterations: usize,
    /// Stop once the objective moves by less than this between iterations.
    pub objective_tolerance: f64,
    pub initializer: Initializer,
    /// Seed for the randomized restarts of the Lapidoth–Pfister solver.
    pub seed: u64,
    /// Extra random Dirichlet(1) starts for the Lapidoth–Pfister solver.
    pub restarts: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iterations: 10_000,
            objective_tolerance: 1e-10,
            initializer: Initializer::Marginal,
            seed: 0,
            restarts: 5,
        }
    }
}

impl SolverConfig {
    pub(crate) fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be positive"));
        }
        if !(self.objective_tolerance > 0.0) {
            return Err(Error::InvalidConfig("objective_tolerance must be positive"));
        }
        Ok(())
    }
}

pub(crate) fn initial_output(p: &Distribution, w: &Channel, cfg: &SolverConfig) -> Result<Distribution> {
    match &cfg.initializer {
        Initializer::Uniform => Ok(Distribution::uniform(w.ny())),
        Initializer::Marginal => Ok(compose(p, w)?.marginal_y()),
        Initializer::Custom(q) if q.len() == w.ny() => Ok(q.clone()),
        Initializer::Custom(q) => Err(Error::DimensionMismatch {
            expected: w.ny(),
            got: q.len(),
        }),
    }
}

/// A Dirichlet(1) draw, i.e. a uniform point on the simplex.
pub fn dirichlet_one<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Distribution {
    let draws: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    Distribution::from_weights(draws)
}

/// The optimizer behind a mutual-information value.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    /// Minimizing output law `q_Y`.
    Output(Distribution),
    /// Minimizing product `q_X ⊗ q_Y`.
    Product { q_x: Distribution, q_y: Distribution },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MiResult {
    pub value: Nats,
    pub witness: Option<Witness>,
    /// Reverse channel from the variational form, when the solver has one.
    pub reverse_channel: Option<DecisionRule>,
    pub iterations: usize,
    pub converged: bool,
    /// Upper minus lower bound for the iterative solvers.
    pub gap: Option<f64>,
}

impl MiResult {
    fn closed(value: Nats, witness: Option<Witness>) -> Self {
        Self {
            value,
            witness,
            reverse_channel: None,
            iterations: 0,
            converged: true,
            gap: None,
        }
    }

    fn shannon(p: &Distribution, w: &Channel) -> Result<Self> {
        let j = compose(p, w)?;
        let q = j.marginal_y();
        Ok(Self::closed(shannon_mi(&j), Some(Witness::Output(q))))
    }
}

/// The five α-mutual informations plus Shannon's.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Shannon,
    Sibson,
    Arimoto,
    #[serde(rename = "ac")]
    AugustinCsiszar,
    Hayashi,
    #[serde(rename = "lp")]
    LapidothPfister,
}

impl Measure {
    pub const ALL: [Measure; 6] = [
        Measure::Shannon,
        Measure::Sibson,
        Measure::Arimoto,
        Measure::AugustinCsiszar,
        Measure::Hayashi,
        Measure::LapidothPfister,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Measure::Shannon => "shannon",
            Measure::Sibson => "sibson",
            Measure::Arimoto => "arimoto",
            Measure::AugustinCsiszar => "ac",
            Measure::Hayashi => "hayashi",
            Measure::LapidothPfister => "lp",
        }
    }

    pub fn compute(&self, p: &Distribution, w: &Channel, alpha: AlphaOrder, cfg: &SolverConfig) -> Result<MiResult> {
        match self {
            Measure::Shannon => MiResult::shannon(p, w),
            Measure::Sibson => sibson_mi(p, w, alpha),
            Measure::Arimoto => arimoto_mi(p, w, alpha),
            Measure::AugustinCsiszar => ac_mi(p, w, alpha, cfg),
            Measure::Hayashi => hayashi_mi(p, w, alpha),
            Measure::LapidothPfister => lp_mi(p, w, alpha, cfg),
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Measure::ALL
            .iter()
            .copied()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown measure `{s}`"))
    }
}

fn finite_order(alpha: AlphaOrder) -> Result<()> {
    if alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidOrder(alpha.value()))
    }
}

/// `ln (Σ_x p(x) W(y|x)^α)^{1/α}` per `y`.
fn sibson_log_weights(p: &Distribution, w: &Channel, a: f64) -> Vec<f64> {
    (0..w.ny())
        .map(|y| log_sum_exp(p.support().map(|(x, px)| px.ln() + a * ln(w.get(x, y)))) / a)
        .collect()
}

/// Sibson's α-MI, `(α/(α−1)) ln Σ_y (Σ_x p(x) W(y|x)^α)^{1/α}`, with the
/// minimizing output law `q*(y) ∝ (Σ_x p(x) W(y|x)^α)^{1/α}` as witness.
pub fn sibson_mi(p: &Distribution, w: &Channel, alpha: AlphaOrder) -> Result<MiResult> {
    check_dims(p, w)?;
    finite_order(alpha)?;
    if alpha.is_shannon() {
        return MiResult::shannon(p, w);
    }
    let a = alpha.value();
    let logs = sibson_log_weights(p, w, a);
    let value = a / (a - 1.0) * log_sum_exp(logs.iter().copied());
    Ok(MiResult::closed(
        value,
        Some(Witness::Output(Distribution::from_log_weights(&logs))),
    ))
}

/// Arimoto's α-MI `H_α(X) − H^A_α(X|Y)`. The witness is the minimizing
/// output law of the equivalent Sibson problem under the α-tilted prior.
pub fn arimoto_mi(p: &Distribution, w: &Channel, alpha: AlphaOrder) -> Result<MiResult> {
    check_dims(p, w)?;
    finite_order(alpha)?;
    if alpha.is_shannon() {
        return MiResult::shannon(p, w);
    }
    let value = renyi_entropy(p, alpha) - arimoto_cond_entropy(p, w, alpha)?;
    let logs = sibson_log_weights(&tilt(p, alpha), w, alpha.value());
    Ok(MiResult::closed(
        value,
        Some(Witness::Output(Distribution::from_log_weights(&logs))),
    ))
}

/// Hayashi's α-MI `H_α(X) − H^H_α(X|Y)`; the witness is `p_Y`.
pub fn hayashi_mi(p: &Distribution, w: &Channel, alpha: AlphaOrder) -> Result<MiResult> {
    check_dims(p, w)?;
    finite_order(alpha)?;
    if alpha.is_shannon() {
        return MiResult::shannon(p, w);
    }
    let value = renyi_entropy(p, alpha) - hayashi_cond_entropy(p, w, alpha)?;
    let py = compose(p, w)?.marginal_y();
    Ok(MiResult::closed(value, Some(Witness::Output(py))))
}

/// Augustin–Csiszár α-MI, `min_q Σ_x p(x) D_α(W_x ‖ q)`.
pub fn ac_mi(p: &Distribution, w: &Channel, alpha: AlphaOrder, cfg: &SolverConfig) -> Result<MiResult> {
    check_dims(p, w)?;
    finite_order(alpha)?;
    if alpha.is_shannon() {
        return MiResult::shannon(p, w);
    }
    let sol = ac::solve(p, w, alpha.value(), cfg)?.into_converged()?;
    Ok(MiResult {
        value: sol.upper,
        gap: Some(sol.upper - sol.lower),
        witness: Some(Witness::Output(sol.q_y)),
        reverse_channel: Some(sol.rule),
        iterations: sol.iterations,
        converged: true,
    })
}

/// Lapidoth–Pfister α-MI, `min_{q_X, q_Y} D_α(pW ‖ q_X ⊗ q_Y)`.
///
/// The solver runs for any `α > 0`; the reverse-channel lower bound and
/// hence `gap` exist only on `(1/2, 1) ∪ (1, ∞)`.
pub fn lp_mi(p: &Distribution, w: &Channel, alpha: AlphaOrder, cfg: &SolverConfig) -> Result<MiResult> {
    check_dims(p, w)?;
    finite_order(alpha)?;
    if alpha.is_shannon() {
        return MiResult::shannon(p, w);
    }
    let sol = lp::solve(p, w, alpha.value(), cfg)?.into_converged()?;
    Ok(MiResult {
        value: sol.upper,
        gap: sol.lower.map(|l| sol.upper - l),
        witness: Some(Witness::Product {
            q_x: sol.q_x,
            q_y: sol.q_y,
        }),
        reverse_channel: Some(sol.rule),
        iterations: sol.iterations,
        converged: true,
    })
}

/// Per-measure outcome of [`all_measures`].
#[derive(Debug, Clone, PartialEq)]
pub enum MeasureOutcome {
    Value(MiResult),
    /// Not defined at this order (Lapidoth–Pfister below 1/2).
    Unavailable(&'static str),
    Failed(Error),
}

impl MeasureOutcome {
    pub fn value(&self) -> Option<f64> {
        match self {
            MeasureOutcome::Value(r) => Some(r.value),
            _ => None,
        }
    }
}

/// Every measure at one order, in [`Measure::ALL`] order.
pub fn all_measures(
    p: &Distribution,
    w: &Channel,
    alpha: AlphaOrder,
    cfg: &SolverConfig,
) -> Result<Vec<(Measure, MeasureOutcome)>> {
    check_dims(p, w)?;
    finite_order(alpha)?;
    Ok(Measure::ALL
        .iter()
        .map(|&m| {
            let outcome = if m == Measure::LapidothPfister && !alpha.is_shannon() && alpha.value() <= 0.5 {
                MeasureOutcome::Unavailable("lapidoth-pfister requires alpha > 1/2")
            } else {
                match m.compute(p, w, alpha, cfg) {
                    Ok(r) => MeasureOutcome::Value(r),
                    Err(e) => MeasureOutcome::Failed(e),
                }
            };
            (m, outcome)
        })
        .collect())
}

#[cfg(test)]
mod tests;
