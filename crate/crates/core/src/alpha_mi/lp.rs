//! Block-coordinate solver for the Lapidoth–Pfister mutual information
//! `min_{q_X, q_Y} D_α(J ‖ q_X ⊗ q_Y)`.
//!
//! With one factor fixed the other has a closed-form minimizer,
//! `q_Y(y) ∝ (Σ_x J(x,y)^α q_X(x)^{1−α})^{1/α}` and symmetrically for `q_X`,
//! so the objective is nonincreasing along half-steps. The joint problem is
//! not convex in `(q_X, q_Y)`, hence the restarts.
//!
//! On `α ∈ (1/2,1) ∪ (1,∞)` every reverse channel gives a lower bound
//! `((2α−1)/(α−1)) ln Σ_x p(x)^γ (Σ_y W(y|x) r(x|y)^{1−1/α})^γ`, `γ = α/(2α−1)`.
//! It is evaluated at `r(x|y) ∝ J(x,y)^α q_X(x)^{1−α}`, the posterior of the
//! tilted joint at the current product.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cond_renyi::log_inner;
use crate::error::{Error, Result};
use crate::simplex::{compose, ln, log_sum_exp, Channel, DecisionRule, Distribution};

use super::{dirichlet_one, initial_output, SolverConfig};

#[derive(Debug, Clone)]
pub(crate) struct LpSolution {
    pub q_x: Distribution,
    pub q_y: Distribution,
    pub rule: DecisionRule,
    pub upper: f64,
    pub lower: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub last_change: f64,
}

impl LpSolution {
    pub fn into_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::SolverDidNotConverge {
                solver: "lapidoth-pfister",
                iterations: self.iterations,
                best: self.upper,
                last_change: self.last_change,
            })
        }
    }
}

struct Run {
    q_x: Vec<f64>,
    q_y: Vec<f64>,
    upper: f64,
    iterations: usize,
    converged: bool,
    last_change: f64,
}

/// `ln J`, with `-∞` on zero entries.
struct LogJoint {
    nx: usize,
    ny: usize,
    data: Vec<f64>,
}

impl LogJoint {
    fn get(&self, x: usize, y: usize) -> f64 {
        self.data[x * self.ny + y]
    }
}

/// Block update: returns the normalized minimizer and `ln S` where the
/// objective after the step is `(α/(α−1)) ln S`.
fn block(lj: &LogJoint, other: &[f64], a: f64, along_x: bool) -> (Vec<f64>, f64) {
    let (n, m) = if along_x { (lj.nx, lj.ny) } else { (lj.ny, lj.nx) };
    let logs: Vec<f64> = (0..n)
        .map(|i| {
            log_sum_exp((0..m).filter_map(|k| {
                let v = if along_x { lj.get(i, k) } else { lj.get(k, i) };
                (v > f64::NEG_INFINITY).then(|| a * v + (1.0 - a) * ln(other[k]))
            })) / a
        })
        .collect();
    let lse = log_sum_exp(logs.iter().copied());
    (logs.iter().map(|l| (l - lse).exp()).collect(), lse)
}

fn descend(lj: &LogJoint, q_y0: Vec<f64>, a: f64, cfg: &SolverConfig) -> Run {
    let mut q_y = q_y0;
    let mut prev = f64::INFINITY;
    let mut it = 0;
    loop {
        it += 1;
        let (q_x, _) = block(lj, &q_y, a, true);
        let (next_y, lse) = block(lj, &q_x, a, false);
        let upper = a / (a - 1.0) * lse;
        let change = prev - upper;
        q_y = next_y;
        let converged = change.abs() <= cfg.objective_tolerance;
        if converged || it >= cfg.max_iterations {
            return Run {
                q_x,
                q_y,
                upper,
                iterations: it,
                converged,
                last_change: change,
            };
        }
        prev = upper;
    }
}

/// Posterior of the tilted joint `J^α q_X^{1−α}`; `q_Y` cancels.
fn induced_rule(lj: &LogJoint, q_x: &[f64], a: f64) -> DecisionRule {
    let cols: Vec<Distribution> = (0..lj.ny)
        .map(|y| {
            let logs: Vec<f64> = (0..lj.nx)
                .map(|x| {
                    let v = lj.get(x, y);
                    if v > f64::NEG_INFINITY {
                        a * v + (1.0 - a) * ln(q_x[x])
                    } else {
                        f64::NEG_INFINITY
                    }
                })
                .collect();
            if logs.iter().all(|l| *l == f64::NEG_INFINITY) {
                Distribution::uniform(lj.nx)
            } else {
                Distribution::from_log_weights(&logs)
            }
        })
        .collect();
    DecisionRule::from_columns(&cols).expect("non-empty")
}

/// Reverse-channel lower bound; valid on `α ∈ (1/2,1) ∪ (1,∞)`.
pub(crate) fn lower_bound(p: &Distribution, w: &Channel, r: &DecisionRule, a: f64) -> f64 {
    let gamma = a / (2.0 * a - 1.0);
    let inner = log_inner(p, w, r, 1.0 - 1.0 / a);
    let s = log_sum_exp(p.support().map(|(x, px)| gamma * (px.ln() + inner[x])));
    (2.0 * a - 1.0) / (a - 1.0) * s
}

pub(crate) fn solve(p: &Distribution, w: &Channel, a: f64, cfg: &SolverConfig) -> Result<LpSolution> {
    cfg.validate()?;
    let j = compose(p, w)?;
    let lj = LogJoint {
        nx: j.nx(),
        ny: j.ny(),
        data: (0..j.nx())
            .flat_map(|x| j.row(x).iter().map(|&v| ln(v)).collect::<Vec<_>>())
            .collect(),
    };

    let mut starts = vec![initial_output(p, w, cfg)?.probs().to_vec()];
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    starts.extend((0..cfg.restarts).map(|_| dirichlet_one(&mut rng, w.ny()).probs().to_vec()));

    let mut best: Option<Run> = None;
    let mut iterations = 0;
    for start in starts {
        let run = descend(&lj, start, a, cfg);
        iterations += run.iterations;
        // first found wins on ties
        if best.as_ref().is_none_or(|b| run.upper < b.upper) {
            best = Some(run);
        }
    }
    let best = best.expect("at least one start");
    let rule = induced_rule(&lj, &best.q_x, a);
    let lower = (a > 0.5 && a != 1.0).then(|| lower_bound(p, w, &rule, a));
    Ok(LpSolution {
        q_x: Distribution::from_weights(best.q_x),
        q_y: Distribution::from_weights(best.q_y),
        rule,
        upper: best.upper,
        lower,
        iterations,
        converged: best.converged,
        last_change: best.last_change,
    })
}
