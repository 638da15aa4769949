//! Alternating solver for the Augustin–Csiszár mutual information.
//!
//! Two bounds hold at every iterate:
//!
//! ```text
//! H(X) + (α/(α−1)) Σ_x p(x) ln Σ_y W(y|x) r(x|y)^{1−1/α}  ≤  I^C_α  ≤  Σ_x p(x) D_α(W_x ‖ q)
//! ```
//!
//! for any reverse channel `r` and any output law `q`. Below one the solver
//! alternates between `q` and the tilted channel `q̃_x ∝ W_x^α q^{1−α}`
//! (a block minimization of the upper bound); above one it alternates
//! between `r` and `q̂_x ∝ W_x r(x|·)^{1−1/α}` (a block maximization of the
//! lower bound). Both bounds are tracked and the run stops once their gap
//! is within tolerance; the objective can plateau well before that.

use crate::error::{Error, Result};
use crate::renyi::shannon_entropy;
use crate::simplex::{ln, log_sum_exp, Channel, DecisionRule, Distribution};

use super::{initial_output, SolverConfig};

#[derive(Debug, Clone)]
pub(crate) struct AcSolution {
    pub q_y: Distribution,
    pub rule: DecisionRule,
    pub upper: f64,
    pub lower: f64,
    pub iterations: usize,
    pub converged: bool,
    pub last_change: f64,
}

impl AcSolution {
    pub fn into_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::SolverDidNotConverge {
                solver: "augustin-csiszar",
                iterations: self.iterations,
                best: self.upper,
                last_change: self.last_change,
            })
        }
    }
}

/// Weights `mass(x) q(y|x)` turned into a reverse channel, with uniform
/// placeholder columns where no mass arrives.
fn posterior_of(p: &Distribution, rows: &[Vec<f64>], ny: usize) -> DecisionRule {
    let nx = p.len();
    let mut cols = vec![vec![0.0; nx]; ny];
    for (x, px) in p.support() {
        for y in 0..ny {
            cols[y][x] = px * rows[x][y];
        }
    }
    let cols: Vec<Distribution> = cols
        .into_iter()
        .map(|c| {
            if c.iter().sum::<f64>() > 0.0 {
                Distribution::from_weights(c)
            } else {
                Distribution::uniform(nx)
            }
        })
        .collect();
    DecisionRule::from_columns(&cols).expect("non-empty")
}

/// `Σ_x p(x) D_α(W_x ‖ q)` and the tilted rows `W_x^α q^{1−α}` normalized.
fn upper_and_tilted(p: &Distribution, w: &Channel, q: &[f64], a: f64) -> (f64, Vec<Vec<f64>>) {
    let mut upper = 0.0;
    let mut rows = vec![vec![0.0; w.ny()]; w.nx()];
    for (x, px) in p.support() {
        let logs: Vec<f64> = w
            .row(x)
            .iter()
            .zip(q)
            .map(|(&wy, &qy)| {
                if wy > 0.0 {
                    a * wy.ln() + (1.0 - a) * ln(qy)
                } else {
                    f64::NEG_INFINITY
                }
            })
            .collect();
        let l = log_sum_exp(logs.iter().copied());
        upper += px * l / (a - 1.0);
        rows[x] = logs.iter().map(|v| (v - l).exp()).collect();
    }
    (upper, rows)
}

/// Lower bound at `r` and the rows `q̂_x ∝ W_x r(x|·)^β`.
fn lower_and_hat(p: &Distribution, w: &Channel, r: &DecisionRule, a: f64) -> (f64, Vec<Vec<f64>>) {
    let beta = 1.0 - 1.0 / a;
    let mut acc = 0.0;
    let mut rows = vec![vec![0.0; w.ny()]; w.nx()];
    for (x, px) in p.support() {
        let logs: Vec<f64> = (0..w.ny())
            .map(|y| {
                let wy = w.get(x, y);
                if wy > 0.0 {
                    wy.ln() + beta * ln(r.get(x, y))
                } else {
                    f64::NEG_INFINITY
                }
            })
            .collect();
        let l = log_sum_exp(logs.iter().copied());
        acc += px * l;
        rows[x] = logs.iter().map(|v| (v - l).exp()).collect();
    }
    (shannon_entropy(p) + a / (a - 1.0) * acc, rows)
}

fn mixture(p: &Distribution, rows: &[Vec<f64>], ny: usize) -> Vec<f64> {
    let mut q = vec![0.0; ny];
    for (x, px) in p.support() {
        q.iter_mut().zip(&rows[x]).for_each(|(a, b)| *a += px * b);
    }
    q
}

pub(crate) fn solve(p: &Distribution, w: &Channel, a: f64, cfg: &SolverConfig) -> Result<AcSolution> {
    cfg.validate()?;
    let q0 = initial_output(p, w, cfg)?;
    let ny = w.ny();
    let tol = cfg.objective_tolerance;

    if a < 1.0 {
        let mut q = q0.probs().to_vec();
        let mut prev = f64::INFINITY;
        let mut it = 0;
        loop {
            it += 1;
            let (upper, tilted) = upper_and_tilted(p, w, &q, a);
            let change = prev - upper;
            let rule = posterior_of(p, &tilted, ny);
            let (lower, _) = lower_and_hat(p, w, &rule, a);
            let closed = upper - lower <= tol;
            if closed || it >= cfg.max_iterations {
                let converged = closed || change.abs() <= tol;
                return Ok(AcSolution {
                    q_y: Distribution::from_weights(q),
                    rule,
                    upper,
                    lower,
                    iterations: it,
                    converged,
                    last_change: change,
                });
            }
            prev = upper;
            q = mixture(p, &tilted, ny);
        }
    } else {
        let (_, tilted) = upper_and_tilted(p, w, q0.probs(), a);
        let mut rule = posterior_of(p, &tilted, ny);
        let mut prev = f64::NEG_INFINITY;
        let mut it = 0;
        loop {
            it += 1;
            let (lower, hat) = lower_and_hat(p, w, &rule, a);
            let q = mixture(p, &hat, ny);
            let (upper, _) = upper_and_tilted(p, w, &q, a);
            let change = lower - prev;
            let closed = upper - lower <= tol;
            if closed || it >= cfg.max_iterations {
                let converged = closed || change.abs() <= tol;
                return Ok(AcSolution {
                    q_y: Distribution::from_weights(q),
                    rule,
                    upper,
                    lower,
                    iterations: it,
                    converged,
                    last_change: change,
                });
            }
            prev = lower;
            rule = posterior_of(p, &hat, ny);
        }
    }
}
