//! Input documents, reports and the commands behind the `alpha-mi` binary.
//!
//! Inputs are JSON objects holding either `prior` and `channel` or a
//! `joint` matrix, with optional `labels_x` / `labels_y`:
//!
//! ```json
//! {"prior": [0.5, 0.5], "channel": [[0.9, 0.1], [0.1, 0.9]]}
//! ```
//!
//! Reports are JSON as well. All values are computed in nats; `bits` only
//! rescales at serialization time.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::alpha_mi::{all_measures, Initializer, Measure, MeasureOutcome, SolverConfig};
use crate::error::Error;
use crate::leakage::{leakage_ratio, Representation};
use crate::means::SignedValue;
use crate::simplex::{AlphaOrder, Channel, Distribution, Joint, Normalization};

pub const TOOL: &str = "alpha-mi";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("normalization error: {0}")]
    Normalization(Error),

    #[error(transparent)]
    Domain(#[from] Error),

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 64,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    #[default]
    Nats,
    Bits,
}

impl Units {
    pub fn scale(&self, nats: f64) -> f64 {
        match self {
            Units::Nats => nats,
            Units::Bits => nats / std::f64::consts::LN_2,
        }
    }
}

impl FromStr for Units {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "nats" => Ok(Units::Nats),
            "bits" => Ok(Units::Bits),
            _ => Err(format!("unknown units `{s}` (expected nats or bits)")),
        }
    }
}

impl fmt::Display for Units {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Units::Nats => "nats",
            Units::Bits => "bits",
        })
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInput {
    prior: Option<Vec<f64>>,
    channel: Option<Vec<Vec<f64>>>,
    joint: Option<Vec<Vec<f64>>>,
    labels_x: Option<Vec<String>>,
    labels_y: Option<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InputShape {
    PriorChannel,
    Joint,
}

/// A validated input. Joint inputs are stored factored into their
/// `X`-marginal and the conditional `Y | X`.
#[derive(Debug, Clone, PartialEq)]
pub struct InputSpec {
    pub shape: InputShape,
    pub prior: Distribution,
    pub channel: Channel,
    pub labels_x: Option<Vec<String>>,
    pub labels_y: Option<Vec<String>>,
    /// Hex SHA-256 of the raw document bytes.
    pub digest: String,
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn normalization(e: Error) -> CliError {
    match e {
        Error::DimensionMismatch { .. } | Error::Empty => CliError::Schema(e.to_string()),
        e => CliError::Normalization(e),
    }
}

fn check_labels(labels: &Option<Vec<String>>, n: usize, axis: &str) -> Result<(), CliError> {
    match labels {
        Some(l) if l.len() != n => Err(CliError::Schema(format!(
            "labels_{axis} has {} entries, alphabet has {n}",
            l.len()
        ))),
        _ => Ok(()),
    }
}

pub fn parse_input_str(text: &str, policy: Normalization) -> Result<InputSpec, CliError> {
    let raw: RawInput = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    let (shape, prior, channel) = match (raw.prior, raw.channel, raw.joint) {
        (Some(p), Some(w), None) => {
            let prior = Distribution::new(&p, policy).map_err(normalization)?;
            let channel = Channel::new(&w, policy).map_err(normalization)?;
            if channel.nx() != prior.len() {
                return Err(CliError::Schema(format!(
                    "prior has {} entries, channel has {} rows",
                    prior.len(),
                    channel.nx()
                )));
            }
            (InputShape::PriorChannel, prior, channel)
        }
        (None, None, Some(j)) => {
            let (prior, channel) = Joint::new(&j, policy).map_err(normalization)?.factor();
            (InputShape::Joint, prior, channel)
        }
        _ => {
            return Err(CliError::Schema(
                "expected either `prior` and `channel`, or `joint`".into(),
            ))
        }
    };
    check_labels(&raw.labels_x, channel.nx(), "x")?;
    check_labels(&raw.labels_y, channel.ny(), "y")?;
    Ok(InputSpec {
        shape,
        prior,
        channel,
        labels_x: raw.labels_x,
        labels_y: raw.labels_y,
        digest: digest(text.as_bytes()),
    })
}

pub fn parse_input(path: &Path, policy: Normalization) -> Result<InputSpec, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let text = String::from_utf8(bytes).map_err(|e| CliError::Parse(e.to_string()))?;
    parse_input_str(&text, policy)
}

/// Settings shared by every command.
#[derive(Debug, Clone, Default)]
pub struct Context {
    pub cfg: SolverConfig,
    pub units: Units,
    pub strict_normalization: bool,
}

impl Context {
    pub fn policy(&self) -> Normalization {
        if self.strict_normalization {
            Normalization::Strict
        } else {
            Normalization::Renormalize
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub max_iterations: usize,
    pub objective_tolerance: f64,
    pub initializer: &'static str,
    pub seed: u64,
    pub restarts: usize,
    pub strict_normalization: bool,
    pub units: Units,
}

impl ConfigEcho {
    fn new(ctx: &Context) -> Self {
        let cfg = &ctx.cfg;
        Self {
            max_iterations: cfg.max_iterations,
            objective_tolerance: cfg.objective_tolerance,
            initializer: match cfg.initializer {
                Initializer::Uniform => "uniform",
                Initializer::Marginal => "marginal",
                Initializer::Custom(_) => "custom",
            },
            seed: cfg.seed,
            restarts: cfg.restarts,
            strict_normalization: ctx.strict_normalization,
            units: ctx.units,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureEntry {
    pub measure: Measure,
    pub value: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Duality gap of the iterative solvers, in report units.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unavailable: Option<&'static str>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub input_digest: String,
    pub config: ConfigEcho,
    pub alpha: f64,
    pub measures: Vec<MeasureEntry>,
}

fn order(alpha: f64) -> Result<AlphaOrder, CliError> {
    let o = AlphaOrder::new(alpha)?;
    if !o.is_finite() {
        return Err(Error::InvalidOrder(alpha).into());
    }
    Ok(o)
}

/// Every requested measure at one order; LP is flagged, not failed, on
/// `(0, 1/2]`. An empty `measures` selects all of them.
pub fn cmd_measure(
    input: &InputSpec,
    alpha: f64,
    measures: &[Measure],
    ctx: &Context,
) -> Result<MeasureReport, CliError> {
    let o = order(alpha)?;
    let units = ctx.units;
    let mut entries = Vec::new();
    for (m, outcome) in all_measures(&input.prior, &input.channel, o, &ctx.cfg)? {
        if !measures.is_empty() && !measures.contains(&m) {
            continue;
        }
        entries.push(match outcome {
            MeasureOutcome::Value(r) => MeasureEntry {
                measure: m,
                value: Some(units.scale(r.value)),
                iterations: r.iterations,
                converged: r.converged,
                gap: r.gap.map(|g| units.scale(g)),
                unavailable: None,
            },
            MeasureOutcome::Unavailable(reason) => MeasureEntry {
                measure: m,
                value: None,
                iterations: 0,
                converged: false,
                gap: None,
                unavailable: Some(reason),
            },
            MeasureOutcome::Failed(e) => return Err(e.into()),
        });
    }
    Ok(MeasureReport {
        tool: TOOL,
        version: VERSION,
        input_digest: input.digest.clone(),
        config: ConfigEcho::new(ctx),
        alpha,
        measures: entries,
    })
}

/// `steps` orders spaced uniformly in `ln α` from `start` to `end`.
pub fn geometric_grid(start: f64, end: f64, steps: usize) -> Result<Vec<f64>, CliError> {
    if !(start > 0.0) || !(end >= start) || !end.is_finite() {
        return Err(CliError::Usage(format!(
            "sweep needs 0 < alpha-start <= alpha-end, got {start} and {end}"
        )));
    }
    if steps == 0 {
        return Err(CliError::Usage("sweep needs at least one step".into()));
    }
    if steps == 1 {
        return Ok(vec![start]);
    }
    let (ls, le) = (start.ln(), end.ln());
    Ok((0..steps)
        .map(|i| match i {
            0 => start,
            i if i == steps - 1 => end,
            i => (ls + (le - ls) * i as f64 / (steps - 1) as f64).exp(),
        })
        .collect())
}

/// One measure report per grid point, in grid order.
pub fn cmd_sweep(
    input: &InputSpec,
    start: f64,
    end: f64,
    steps: usize,
    measures: &[Measure],
    ctx: &Context,
) -> Result<Vec<MeasureReport>, CliError> {
    let grid = geometric_grid(start, end, steps)?;
    grid.par_iter()
        .map(|&a| cmd_measure(input, a, measures, ctx))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeakageEntry {
    pub representation: Representation,
    pub matched_measure: Measure,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub numerator: Option<SignedValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub denominator: Option<SignedValue>,
    pub ratio_log: Option<f64>,
    pub matched_mi: Option<f64>,
    pub residual: Option<f64>,
    pub certified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unavailable: Option<&'static str>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeakageDocument {
    pub tool: &'static str,
    pub version: &'static str,
    pub input_digest: String,
    pub config: ConfigEcho,
    pub alpha: f64,
    pub representations: Vec<LeakageEntry>,
}

/// Leakage reports for the requested representations. With an empty
/// selection every representation is reported, and LP rows outside their
/// order range are flagged instead of failing.
pub fn cmd_leakage(
    input: &InputSpec,
    alpha: f64,
    representations: &[Representation],
    ctx: &Context,
) -> Result<LeakageDocument, CliError> {
    let o = order(alpha)?;
    let units = ctx.units;
    let explicit = !representations.is_empty();
    let selected = if explicit {
        representations.to_vec()
    } else {
        Representation::ALL.to_vec()
    };
    let mut entries = Vec::new();
    for rep in selected {
        if !explicit && rep.measure() == Measure::LapidothPfister && !o.in_lp_range() {
            entries.push(LeakageEntry {
                representation: rep,
                matched_measure: rep.measure(),
                numerator: None,
                denominator: None,
                ratio_log: None,
                matched_mi: None,
                residual: None,
                certified: false,
                unavailable: Some("lapidoth-pfister rows require alpha in (1/2, 1) or (1, inf)"),
            });
            continue;
        }
        let r = leakage_ratio(&input.prior, &input.channel, o, rep, &ctx.cfg)?;
        entries.push(LeakageEntry {
            representation: rep,
            matched_measure: rep.measure(),
            numerator: Some(r.numerator),
            denominator: Some(r.denominator),
            ratio_log: Some(units.scale(r.ratio_log)),
            matched_mi: Some(units.scale(r.matched_mi)),
            residual: Some(units.scale(r.residual)),
            certified: r.certified,
            unavailable: None,
        });
    }
    Ok(LeakageDocument {
        tool: TOOL,
        version: VERSION,
        input_digest: input.digest.clone(),
        config: ConfigEcho::new(ctx),
        alpha,
        representations: entries,
    })
}

/// Parses a comma-separated list, with an empty string meaning "all".
pub fn parse_list<T: FromStr<Err = String>>(s: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty() && *t != "all")
        .map(|t| t.parse().map_err(CliError::Usage))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(text: &str) -> InputSpec {
        parse_input_str(text, Normalization::Renormalize).unwrap()
    }

    #[test]
    fn parses_both_shapes() {
        let a = spec(r#"{"prior":[0.5,0.5],"channel":[[0.9,0.1],[0.1,0.9]]}"#);
        assert_eq!(a.shape, InputShape::PriorChannel);
        let b = spec(r#"{"joint":[[0.45,0.05],[0.05,0.45]]}"#);
        assert_eq!(b.shape, InputShape::Joint);
        assert!(b.prior.max_abs_diff(&Distribution::uniform(2)) < 1e-15);
        for x in 0..2 {
            for y in 0..2 {
                assert!((b.channel.get(x, y) - Channel::bsc(0.1).get(x, y)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn rejects_bad_documents() {
        let strict = |t: &str| parse_input_str(t, Normalization::Strict);
        assert!(matches!(
            strict(r#"{"prior":[0.5,0.6],"channel":[[1,0],[0,1]]}"#),
            Err(CliError::Normalization(_))
        ));
        assert!(matches!(strict("{"), Err(CliError::Parse(_))));
        assert!(matches!(
            strict(r#"{"prior":[0.5,0.5]}"#),
            Err(CliError::Schema(_))
        ));
        assert!(matches!(
            strict(r#"{"joint":[[0.5,0.5]],"labels_y":["a"]}"#),
            Err(CliError::Schema(_))
        ));
        assert!(matches!(
            strict(r#"{"prior":[1.0],"channel":[[1.0]],"extra":1}"#),
            Err(CliError::Parse(_))
        ));
    }

    #[test]
    fn grid_endpoints() {
        let g = geometric_grid(0.5, 2.0, 3).unwrap();
        assert_eq!(g, vec![0.5, 1.0, 2.0]);
        assert_eq!(geometric_grid(0.7, 3.0, 1).unwrap(), vec![0.7]);
        assert!(geometric_grid(2.0, 1.0, 3).is_err());
    }

    #[test]
    fn noiseless_uniform_report() {
        let input = spec(r#"{"prior":[0.25,0.25,0.25,0.25],"channel":[[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]}"#);
        let r = cmd_measure(&input, 2.0, &[], &Context::default()).unwrap();
        for e in &r.measures {
            assert!((e.value.unwrap() - 4f64.ln()).abs() < 1e-9, "{e:?}");
        }
        let bits = Context {
            units: Units::Bits,
            ..Context::default()
        };
        let r = cmd_measure(&input, 2.0, &[Measure::Sibson], &bits).unwrap();
        assert_eq!(r.measures.len(), 1);
        assert!((r.measures[0].value.unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn leakage_flags_and_errors() {
        let input = spec(r#"{"prior":[0.3,0.7],"channel":[[0.8,0.2],[0.4,0.6]]}"#);
        let ctx = Context::default();
        let doc = cmd_leakage(&input, 0.4, &[], &ctx).unwrap();
        assert_eq!(doc.representations.len(), 15);
        assert!(doc.representations.iter().any(|e| e.unavailable.is_some()));
        let err = cmd_leakage(&input, 0.4, &[Representation::LpScore], &ctx).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
