//! Guessing adversaries and the leakage representations of the α-MIs.
//!
//! A representation pairs a gain function `g(x, r)` with a mean structure
//! and a prior. Its leakage is
//!
//! ```text
//! κ · ln( max_{r(·|y)} mean[g(X, r(·|Y))] / max_r mean[g(X, r)] )
//! ```
//!
//! with prefactor `κ`; each of the fifteen catalog entries reproduces one of
//! the five α-mutual informations. The numerator is evaluated by applying
//! the means to the gains at the optimal rule, so agreement with the
//! matched MI is a genuine check rather than a restatement.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::alpha_mi::{ac, lp, Measure, SolverConfig};
use crate::cond_renyi::check_dims;
use crate::error::{Error, Result};
use crate::means::{Mean, SignedValue};
use crate::renyi::{shannon_entropy, Nats};
use crate::simplex::{
    compose, ln, log_alpha_norm, tilt_by, AlphaOrder, Channel, DecisionRule, Distribution, Joint,
};

/// Mixing weight of the column-perturbation probes.
pub const PROBE_WEIGHT: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "alpha", rename_all = "snake_case")]
pub enum GainKind {
    /// `(α/(α−1)) r(x)^{1−1/α}`.
    AlphaScore(f64),
    /// `(α/(α−1)) (r(x)/‖r‖_α)^{α−1}`.
    PseudoSpherical(f64),
    /// `(α/(α−1)) r(x)^{α−1} − ‖r‖_α^α`, the Tsallis score.
    PowerScore(f64),
    /// `ln r(x) − 1`, the α = 1 branch of the α-score.
    LogScore,
    /// `r(x)`, the α = ∞ branch of the α-score.
    LinearScore,
}

impl GainKind {
    fn order(&self) -> Option<f64> {
        match *self {
            GainKind::AlphaScore(a) | GainKind::PseudoSpherical(a) | GainKind::PowerScore(a) => Some(a),
            GainKind::LogScore | GainKind::LinearScore => None,
        }
    }

    fn validate(&self) -> Result<()> {
        match self.order() {
            Some(a) => AlphaOrder::new(a)?.require_generic().map(|_| ()),
            None => Ok(()),
        }
    }
}

/// `g(x, r)` for every `x` at once.
pub fn gains(kind: GainKind, r: &Distribution) -> Vec<f64> {
    let probs = r.probs();
    match kind {
        GainKind::LogScore => probs.iter().map(|&v| ln(v) - 1.0).collect(),
        GainKind::LinearScore => probs.to_vec(),
        GainKind::AlphaScore(a) => {
            let c = a / (a - 1.0);
            probs.iter().map(|&v| c * v.powf(1.0 - 1.0 / a)).collect()
        }
        GainKind::PseudoSpherical(a) => {
            let c = a / (a - 1.0);
            let norm = log_alpha_norm(probs, a).exp();
            probs.iter().map(|&v| c * (v / norm).powf(a - 1.0)).collect()
        }
        GainKind::PowerScore(a) => {
            let c = a / (a - 1.0);
            let norm_pow = (a * log_alpha_norm(probs, a)).exp();
            probs.iter().map(|&v| c * v.powf(a - 1.0) - norm_pow).collect()
        }
    }
}

pub fn gain(kind: GainKind, x: usize, r: &Distribution) -> f64 {
    gains(kind, r)[x]
}

/// Closed-form `max_r E_p[g(X, r)]` and a maximizer.
pub fn max_expected_gain(p: &Distribution, kind: GainKind) -> Result<(f64, Distribution)> {
    kind.validate()?;
    Ok(match kind {
        GainKind::AlphaScore(a) => {
            let v = a / (a - 1.0) * log_alpha_norm(p.probs(), a).exp();
            (v, tilt_by(p.probs(), a))
        }
        GainKind::PseudoSpherical(a) => (a / (a - 1.0) * log_alpha_norm(p.probs(), a).exp(), p.clone()),
        GainKind::PowerScore(a) => ((a * log_alpha_norm(p.probs(), a)).exp() / (a - 1.0), p.clone()),
        GainKind::LogScore => (-shannon_entropy(p) - 1.0, p.clone()),
        GainKind::LinearScore => {
            let (at, v) = argmax(p.probs());
            (v, Distribution::point_mass(p.len(), at))
        }
    })
}

/// First index of the largest entry.
fn argmax(v: &[f64]) -> (usize, f64) {
    v.iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, x)| if x > best.1 { (i, x) } else { best })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "order", rename_all = "snake_case")]
pub enum Prior {
    Plain,
    /// The prior replaced by its tilt of the given order.
    Tilted(f64),
}

impl Prior {
    fn apply(&self, p: &Distribution) -> Distribution {
        match *self {
            Prior::Plain => p.clone(),
            Prior::Tilted(order) => tilt_by(p.probs(), order),
        }
    }
}

/// Mean structure of a representation. With `inner = None` the outer mean
/// runs over the joint `(X, Y)`; otherwise the inner mean runs over `Y`
/// given `X` and the outer one over `X`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanSpec {
    pub outer: Mean,
    pub inner: Option<Mean>,
    pub prior: Prior,
}

/// Power-mean order of a mean (`G_q = M_{1−q}`).
fn power_order(m: Mean) -> f64 {
    match m {
        Mean::Expectation => 1.0,
        Mean::Geometric => 0.0,
        Mean::Power(t) => t,
        Mean::GeneralizedGeometric(q) => 1.0 - q,
    }
}

fn unsupported(kind: GainKind, spec: &MeanSpec) -> Error {
    Error::UnsupportedMeanSpec(format!("{kind:?} under {spec:?}"))
}

/// The mean structure evaluated at a rule.
fn evaluate(
    prior: &Distribution,
    w: &Channel,
    kind: GainKind,
    spec: &MeanSpec,
    rule: &DecisionRule,
) -> Result<SignedValue> {
    let (nx, ny) = (w.nx(), w.ny());
    let table: Vec<Vec<f64>> = (0..ny).map(|y| gains(kind, &rule.column(y))).collect();
    match spec.inner {
        None => {
            let j = compose(prior, w)?;
            let f: Vec<f64> = (0..nx).flat_map(|x| table.iter().map(move |g| g[x])).collect();
            spec.outer.apply(&j, &f)
        }
        Some(inner) => {
            let mut f = vec![0.0; nx];
            for (x, _) in prior.support() {
                let row: Vec<f64> = table.iter().map(|g| g[x]).collect();
                f[x] = inner.apply(w.row(x), &row)?.value();
            }
            spec.outer.apply(prior, &f)
        }
    }
}

fn constant_rule(r: &Distribution, ny: usize) -> DecisionRule {
    DecisionRule::from_columns(&vec![r.clone(); ny]).expect("non-empty")
}

fn map_tilt(rule: &DecisionRule, order: f64) -> DecisionRule {
    rule.map_columns(|_, c| tilt_by(c.probs(), order))
}

/// The maximizing rule of the observed-`Y` problem.
fn optimal_rule(
    prior: &Distribution,
    w: &Channel,
    kind: GainKind,
    spec: &MeanSpec,
    cfg: &SolverConfig,
) -> Result<DecisionRule> {
    let t = power_order(spec.outer);
    match spec.inner {
        None => {
            let post = compose(prior, w)?.posterior().rule;
            match (kind, t) {
                (GainKind::LinearScore, t) if t >= 1.0 => Ok(post.map_columns(|_, c| {
                    Distribution::point_mass(c.len(), argmax(c.probs()).0)
                })),
                (GainKind::LinearScore, t) => Ok(map_tilt(&post, 1.0 / (1.0 - t))),
                (GainKind::AlphaScore(a), 1.0) => Ok(map_tilt(&post, a)),
                (GainKind::PseudoSpherical(_) | GainKind::PowerScore(_) | GainKind::LogScore, 1.0) => Ok(post),
                _ => Err(unsupported(kind, spec)),
            }
        }
        Some(inner) => {
            let s = power_order(inner);
            match (kind, t, s) {
                (GainKind::AlphaScore(a) | GainKind::PseudoSpherical(a), 0.0, 1.0) => {
                    let r = ac::solve(prior, w, a, cfg)?.into_converged()?.rule;
                    Ok(score_rule(kind, r, a))
                }
                (GainKind::LinearScore, 0.0, s) if s < 1.0 && s != 0.0 => {
                    let a = AlphaOrder::new(1.0 / (1.0 - s))?.require_generic()?;
                    Ok(ac::solve(prior, w, a, cfg)?.into_converged()?.rule)
                }
                (GainKind::AlphaScore(a) | GainKind::PseudoSpherical(a), t, 1.0)
                    if (t - a / (2.0 * a - 1.0)).abs() < 1e-12 =>
                {
                    AlphaOrder::new(a)?.require_lp_range()?;
                    let base = tilt_by(prior.probs(), 1.0 / t);
                    let r = lp::solve(&base, w, a, cfg)?.into_converged()?.rule;
                    Ok(score_rule(kind, r, a))
                }
                _ => Err(unsupported(kind, spec)),
            }
        }
    }
}

/// A rule optimal for the α-score, turned into the optimum for `kind`.
fn score_rule(kind: GainKind, r: DecisionRule, a: f64) -> DecisionRule {
    match kind {
        GainKind::PseudoSpherical(_) => map_tilt(&r, 1.0 / a),
        _ => r,
    }
}

/// The maximizing rule without observations: one column shared by every `y`.
fn optimal_guess(prior: &Distribution, kind: GainKind, spec: &MeanSpec) -> Result<Distribution> {
    let t = power_order(spec.outer);
    if t == 1.0 {
        return Ok(max_expected_gain(prior, kind)?.1);
    }
    match kind {
        GainKind::LinearScore if t > 1.0 => Ok(max_expected_gain(prior, kind)?.1),
        GainKind::LinearScore => Ok(tilt_by(prior.probs(), 1.0 / (1.0 - t))),
        GainKind::AlphaScore(a) | GainKind::PseudoSpherical(a) => {
            let k = 1.0 - (1.0 - 1.0 / a) * t;
            if !(k > 0.0) {
                return Err(unsupported(kind, spec));
            }
            let r = tilt_by(prior.probs(), 1.0 / k);
            Ok(match kind {
                GainKind::PseudoSpherical(_) => tilt_by(r.probs(), 1.0 / a),
                _ => r,
            })
        }
        _ => Err(unsupported(kind, spec)),
    }
}

/// Column-perturbation probes: mixing any column toward the uniform law or a
/// vertex must not raise the value.
fn certify(
    prior: &Distribution,
    w: &Channel,
    kind: GainKind,
    spec: &MeanSpec,
    rule: &DecisionRule,
    value: f64,
) -> Result<bool> {
    let nx = w.nx();
    let slack = 1e-9 * value.abs().max(1.0);
    let mut targets = vec![Distribution::uniform(nx)];
    targets.extend((0..nx).map(|x| Distribution::point_mass(nx, x)));
    let cols = rule.columns();
    for y in 0..w.ny() {
        for target in &targets {
            let mut moved = cols.clone();
            moved[y] = cols[y].mix(target, PROBE_WEIGHT);
            let probe = DecisionRule::from_columns(&moved)?;
            if evaluate(prior, w, kind, spec, &probe)?.value() > value + slack {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Observed-`Y` maximum of a mean structure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PosteriorGain {
    pub value: SignedValue,
    pub rule: DecisionRule,
    /// Whether the column-perturbation probes found no improvement.
    pub certified: bool,
}

fn posterior_gain(
    p: &Distribution,
    w: &Channel,
    kind: GainKind,
    spec: &MeanSpec,
    cfg: &SolverConfig,
) -> Result<PosteriorGain> {
    kind.validate()?;
    let prior = spec.prior.apply(p);
    let rule = optimal_rule(&prior, w, kind, spec, cfg)?;
    let value = evaluate(&prior, w, kind, spec, &rule)?;
    let certified = certify(&prior, w, kind, spec, &rule, value.value())?;
    Ok(PosteriorGain {
        value,
        rule,
        certified,
    })
}

/// `max_{r(·|y)} mean[g(X, r(·|Y))]` under the joint `J`.
///
/// Expectation-type structures are solved per column; the AC-type
/// (geometric outer, inner over `Y`) and LP-type (power outer of order
/// `α/(2α−1)`) structures take the reverse channels of the respective
/// solvers. Any other structure is rejected with `UnsupportedMeanSpec`.
pub fn max_posterior_gain(j: &Joint, kind: GainKind, spec: &MeanSpec, cfg: &SolverConfig) -> Result<PosteriorGain> {
    let (p, w) = j.factor();
    posterior_gain(&p, &w, kind, spec, cfg)
}

/// `max_r mean[g(X, r)]` with no observation.
pub fn max_prior_gain(p: &Distribution, kind: GainKind, spec: &MeanSpec) -> Result<(SignedValue, Distribution)> {
    kind.validate()?;
    let prior = spec.prior.apply(p);
    let r = optimal_guess(&prior, kind, spec)?;
    // any channel works: a constant rule makes the inner mean trivial
    let w = Channel::identity(p.len());
    let value = evaluate(&prior, &w, kind, spec, &constant_rule(&r, p.len()))?;
    Ok((value, r))
}

/// The fifteen leakage representations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Representation {
    ArimotoScore,
    ArimotoPseudoSpherical,
    ArimotoPowerMean,
    ArimotoGeneralizedGeometric,
    SibsonScore,
    SibsonPseudoSpherical,
    SibsonPowerMean,
    SibsonGeneralizedGeometric,
    AcScore,
    AcPseudoSpherical,
    AcPowerMean,
    AcGeneralizedGeometric,
    HayashiPowerScore,
    LpScore,
    LpPseudoSpherical,
}

impl Representation {
    pub const ALL: [Representation; 15] = [
        Representation::ArimotoScore,
        Representation::ArimotoPseudoSpherical,
        Representation::ArimotoPowerMean,
        Representation::ArimotoGeneralizedGeometric,
        Representation::SibsonScore,
        Representation::SibsonPseudoSpherical,
        Representation::SibsonPowerMean,
        Representation::SibsonGeneralizedGeometric,
        Representation::AcScore,
        Representation::AcPseudoSpherical,
        Representation::AcPowerMean,
        Representation::AcGeneralizedGeometric,
        Representation::HayashiPowerScore,
        Representation::LpScore,
        Representation::LpPseudoSpherical,
    ];

    pub fn id(&self) -> &'static str {
        use Representation::*;
        match self {
            ArimotoScore => "arimoto-score",
            ArimotoPseudoSpherical => "arimoto-ps",
            ArimotoPowerMean => "arimoto-power-mean",
            ArimotoGeneralizedGeometric => "arimoto-gen-geometric",
            SibsonScore => "sibson-score",
            SibsonPseudoSpherical => "sibson-ps",
            SibsonPowerMean => "sibson-power-mean",
            SibsonGeneralizedGeometric => "sibson-gen-geometric",
            AcScore => "ac-score",
            AcPseudoSpherical => "ac-ps",
            AcPowerMean => "ac-power-mean",
            AcGeneralizedGeometric => "ac-gen-geometric",
            HayashiPowerScore => "hayashi-power-score",
            LpScore => "lp-score",
            LpPseudoSpherical => "lp-ps",
        }
    }

    pub fn measure(&self) -> Measure {
        use Representation::*;
        match self {
            ArimotoScore | ArimotoPseudoSpherical | ArimotoPowerMean | ArimotoGeneralizedGeometric => Measure::Arimoto,
            SibsonScore | SibsonPseudoSpherical | SibsonPowerMean | SibsonGeneralizedGeometric => Measure::Sibson,
            AcScore | AcPseudoSpherical | AcPowerMean | AcGeneralizedGeometric => Measure::AugustinCsiszar,
            HayashiPowerScore => Measure::Hayashi,
            LpScore | LpPseudoSpherical => Measure::LapidothPfister,
        }
    }

    /// Solver-backed rows are certified to a looser tolerance.
    pub fn uses_solver(&self) -> bool {
        matches!(self.measure(), Measure::AugustinCsiszar | Measure::LapidothPfister)
    }

    pub fn gain_kind(&self, a: f64) -> GainKind {
        use Representation::*;
        match self {
            ArimotoScore | SibsonScore | AcScore | LpScore => GainKind::AlphaScore(a),
            ArimotoPseudoSpherical | SibsonPseudoSpherical | AcPseudoSpherical | LpPseudoSpherical => {
                GainKind::PseudoSpherical(a)
            }
            HayashiPowerScore => GainKind::PowerScore(a),
            _ => GainKind::LinearScore,
        }
    }

    pub fn mean_spec(&self, a: f64) -> MeanSpec {
        use Representation::*;
        let beta = 1.0 - 1.0 / a;
        let gamma = a / (2.0 * a - 1.0);
        let prior = match self.measure() {
            Measure::Sibson => Prior::Tilted(1.0 / a),
            Measure::LapidothPfister => Prior::Tilted(gamma),
            _ => Prior::Plain,
        };
        let (outer, inner) = match self {
            ArimotoScore | ArimotoPseudoSpherical | SibsonScore | SibsonPseudoSpherical | HayashiPowerScore => {
                (Mean::Expectation, None)
            }
            ArimotoPowerMean | SibsonPowerMean => (Mean::Power(beta), None),
            ArimotoGeneralizedGeometric | SibsonGeneralizedGeometric => (Mean::GeneralizedGeometric(1.0 / a), None),
            AcScore | AcPseudoSpherical => (Mean::Geometric, Some(Mean::Expectation)),
            AcPowerMean => (Mean::Power(0.0), Some(Mean::Power(beta))),
            AcGeneralizedGeometric => (Mean::Geometric, Some(Mean::GeneralizedGeometric(1.0 / a))),
            LpScore | LpPseudoSpherical => (Mean::Power(gamma), Some(Mean::Expectation)),
        };
        MeanSpec { outer, inner, prior }
    }

    /// `κ` in front of the log ratio.
    pub fn prefactor(&self, a: f64) -> f64 {
        match self.gain_kind(a) {
            GainKind::AlphaScore(_) | GainKind::PseudoSpherical(_) => a / (a - 1.0),
            GainKind::PowerScore(_) => 1.0 / (a - 1.0),
            _ => 1.0,
        }
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Representation {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Representation::ALL
            .iter()
            .copied()
            .find(|r| r.id() == s)
            .ok_or_else(|| format!("unknown representation `{s}`"))
    }
}

impl Serialize for Representation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.id())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeakageReport {
    pub representation: Representation,
    pub alpha: f64,
    pub numerator: SignedValue,
    pub denominator: SignedValue,
    /// Prefactor times the log of numerator over denominator.
    pub ratio_log: Nats,
    pub matched_mi: Nats,
    pub residual: f64,
    pub certified: bool,
}

/// Leakage of one representation with its residual against the matched MI.
pub fn leakage_ratio(
    p: &Distribution,
    w: &Channel,
    alpha: AlphaOrder,
    rep: Representation,
    cfg: &SolverConfig,
) -> Result<LeakageReport> {
    check_dims(p, w)?;
    if !alpha.is_finite() {
        return Err(Error::InvalidOrder(alpha.value()));
    }
    let a = alpha.require_generic()?;
    if rep.measure() == Measure::LapidothPfister {
        alpha.require_lp_range()?;
    }
    let kind = rep.gain_kind(a);
    let spec = rep.mean_spec(a);
    let num = posterior_gain(p, w, kind, &spec, cfg)?;
    let (den, _) = max_prior_gain(p, kind, &spec)?;
    if !num.value.same_sign(&den) {
        return Err(Error::MixedSigns);
    }
    let ratio_log = rep.prefactor(a) * (num.value.magnitude.ln() - den.magnitude.ln());
    let matched_mi = rep.measure().compute(p, w, alpha, cfg)?.value;
    Ok(LeakageReport {
        representation: rep,
        alpha: a,
        numerator: num.value,
        denominator: den,
        ratio_log,
        matched_mi,
        residual: (ratio_log - matched_mi).abs(),
        certified: num.certified,
    })
}
