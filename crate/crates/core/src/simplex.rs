//! Probability objects on finite alphabets.
//!
//! [`Distribution`], [`Channel`] (row-stochastic `W(y|x)`), [`Joint`] and
//! [`DecisionRule`] (column-stochastic `r(x|y)`) are immutable once built.
//! Every power and product is taken in the log domain: `p(x)^a` is
//! `exp(a ln p(x))` and sums of such terms go through [`log_sum_exp`], so
//! orders up to a few hundred stay finite.
//!
//! Zero mass follows the usual continuity conventions: `0^t = 0` for `t > 0`,
//! zero-probability terms drop out of every sum and `0 ln 0 = 0`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Tolerance on `|Σ p − 1|` for a vector to count as normalized.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Entries above `-NEGATIVE_SLACK` are rounding noise and clamp to zero.
pub const NEGATIVE_SLACK: f64 = 1e-12;

/// `|α − 1|` below this dispatches to the Shannon formulas.
pub const SHANNON_EPS: f64 = 1e-7;

/// `ln Σ exp(v)`, with `-∞` for an empty or all `-∞` family.
pub fn log_sum_exp<I>(values: I) -> f64
where
    I: IntoIterator<Item = f64>,
{
    let values: Vec<f64> = values.into_iter().collect();
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || max == f64::INFINITY {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Natural log with the `ln 0 = -∞` convention made explicit.
#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    if x > 0.0 {
        x.ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// How [`make_distribution`] treats vectors that do not sum to one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// Reject unless the sum is within [`NORMALIZATION_TOL`] of one.
    Strict,
    /// Clamp tiny negatives to zero and divide by the sum.
    #[default]
    Renormalize,
}

fn validate(raw: &[f64], policy: Normalization) -> Result<Vec<f64>> {
    if raw.is_empty() {
        return Err(Error::Empty);
    }
    let mut out = Vec::with_capacity(raw.len());
    for (index, &value) in raw.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFinite { index });
        }
        if value < -NEGATIVE_SLACK {
            return Err(Error::NegativeMass { index, value });
        }
        out.push(value.max(0.0));
    }
    let sum: f64 = out.iter().sum();
    match policy {
        Normalization::Strict => {
            if (sum - 1.0).abs() > NORMALIZATION_TOL {
                return Err(Error::NotNormalized { sum });
            }
        }
        Normalization::Renormalize => {
            if sum <= 0.0 {
                return Err(Error::ZeroMass);
            }
            out.iter_mut().for_each(|v| *v /= sum);
        }
    }
    Ok(out)
}

/// A probability vector on `{0, .., n-1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Distribution {
    probs: Vec<f64>,
}

/// Validate `raw` into a [`Distribution`] under `policy`.
pub fn make_distribution(raw: &[f64], policy: Normalization) -> Result<Distribution> {
    Distribution::new(raw, policy)
}

impl Distribution {
    pub fn new(raw: &[f64], policy: Normalization) -> Result<Self> {
        validate(raw, policy).map(|probs| Self { probs })
    }

    /// Entries are trusted to be non-negative and normalized.
    pub(crate) fn from_vec_unchecked(probs: Vec<f64>) -> Self {
        debug_assert!(!probs.is_empty());
        Self { probs }
    }

    /// Normalize non-negative weights computed internally.
    pub(crate) fn from_weights(mut weights: Vec<f64>) -> Self {
        let sum: f64 = weights.iter().sum();
        debug_assert!(sum > 0.0);
        weights.iter_mut().for_each(|w| *w /= sum);
        Self { probs: weights }
    }

    /// Normalize `exp(log_weights)`.
    pub(crate) fn from_log_weights(log_weights: &[f64]) -> Self {
        let lse = log_sum_exp(log_weights.iter().copied());
        Self {
            probs: log_weights.iter().map(|l| (l - lse).exp()).collect(),
        }
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform distribution needs n >= 1");
        Self {
            probs: vec![1.0 / n as f64; n],
        }
    }

    pub fn point_mass(n: usize, at: usize) -> Self {
        assert!(at < n, "point mass index out of range");
        let mut probs = vec![0.0; n];
        probs[at] = 1.0;
        Self { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.probs[i]
    }

    /// `(index, p)` over entries with positive mass.
    pub fn support(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.probs
            .iter()
            .copied()
            .enumerate()
            .filter(|&(_, p)| p > 0.0)
    }

    /// Convex combination `(1 − w) self + w other`.
    pub fn mix(&self, other: &Distribution, w: f64) -> Distribution {
        assert_eq!(self.len(), other.len());
        Self::from_weights(
            self.probs
                .iter()
                .zip(&other.probs)
                .map(|(a, b)| (1.0 - w) * a + w * b)
                .collect(),
        )
    }

    pub fn max_abs_diff(&self, other: &Distribution) -> f64 {
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Anything that is a flat probability mass (distributions and joints).
pub trait AsMass {
    fn mass(&self) -> &[f64];
}

impl AsMass for [f64] {
    fn mass(&self) -> &[f64] {
        self
    }
}

impl AsMass for Distribution {
    fn mass(&self) -> &[f64] {
        &self.probs
    }
}

/// Which side of 1 an order sits on, as used for formula dispatch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// `|α − 1| < SHANNON_EPS`.
    Shannon,
    Generic,
    Infinity,
}

/// A validated order `α ∈ (0, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaOrder {
    value: f64,
    regime: Regime,
}

impl AlphaOrder {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value <= 0.0 {
            return Err(Error::InvalidOrder(value));
        }
        let regime = if value == f64::INFINITY {
            Regime::Infinity
        } else if (value - 1.0).abs() < SHANNON_EPS {
            Regime::Shannon
        } else {
            Regime::Generic
        };
        Ok(Self { value, regime })
    }

    pub fn infinity() -> Self {
        Self {
            value: f64::INFINITY,
            regime: Regime::Infinity,
        }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn is_shannon(&self) -> bool {
        self.regime == Regime::Shannon
    }

    pub fn is_finite(&self) -> bool {
        self.regime != Regime::Infinity
    }

    /// `1/α`.
    pub fn reciprocal(&self) -> Result<Self> {
        if !self.is_finite() {
            return Err(Error::InvalidOrder(0.0));
        }
        Self::new(1.0 / self.value)
    }

    /// `α/(2α − 1)`, defined for `α > 1/2`. This map is an involution.
    pub fn lp_conjugate(&self) -> Result<Self> {
        if !(self.value > 0.5) || !self.is_finite() {
            return Err(Error::AlphaOutOfRange {
                alpha: self.value,
                range: "(1/2, inf)",
            });
        }
        Self::new(self.value / (2.0 * self.value - 1.0))
    }

    /// `α ∈ (1/2, 1) ∪ (1, ∞)` and outside the Shannon window.
    pub fn in_lp_range(&self) -> bool {
        self.regime == Regime::Generic && self.value > 0.5
    }

    pub(crate) fn require_generic(&self) -> Result<f64> {
        match self.regime {
            Regime::Generic => Ok(self.value),
            Regime::Shannon => Err(Error::ShannonRegime(self.value)),
            Regime::Infinity => Err(Error::InvalidOrder(self.value)),
        }
    }

    pub(crate) fn require_lp_range(&self) -> Result<f64> {
        if self.in_lp_range() {
            Ok(self.value)
        } else if self.is_shannon() {
            Err(Error::ShannonRegime(self.value))
        } else {
            Err(Error::AlphaOutOfRange {
                alpha: self.value,
                range: "(1/2, 1) U (1, inf)",
            })
        }
    }
}

/// The α-tilted (escort) distribution `p(x)^α / Σ p^α`.
///
/// `α = ∞` gives the uniform distribution over the modes of `p`.
pub fn tilt(p: &Distribution, alpha: AlphaOrder) -> Distribution {
    if alpha.value() == 1.0 {
        return p.clone();
    }
    if !alpha.is_finite() {
        let max = p.probs.iter().copied().fold(0.0, f64::max);
        return Distribution::from_weights(
            p.probs
                .iter()
                .map(|&v| if v == max { 1.0 } else { 0.0 })
                .collect(),
        );
    }
    tilt_by(p.probs(), alpha.value())
}

/// Tilt by a raw exponent. Used for column-wise tilts where the order is
/// already known to be valid.
pub(crate) fn tilt_by(p: &[f64], a: f64) -> Distribution {
    let logs: Vec<f64> = p.iter().map(|&v| a * ln(v)).collect();
    Distribution::from_log_weights(&logs)
}

/// `‖p‖_α = (Σ p^α)^{1/α}`; `‖p‖_∞ = max p`.
pub fn alpha_norm(p: &Distribution, alpha: AlphaOrder) -> f64 {
    if !alpha.is_finite() {
        return p.probs.iter().copied().fold(0.0, f64::max);
    }
    log_alpha_norm(p.probs(), alpha.value()).exp()
}

/// `ln ‖p‖_a` for a raw exponent `a > 0`.
pub(crate) fn log_alpha_norm(p: &[f64], a: f64) -> f64 {
    log_sum_exp(p.iter().filter(|&&v| v > 0.0).map(|&v| a * v.ln())) / a
}

/// Row-stochastic matrix `W(y|x)`, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Channel {
    nx: usize,
    ny: usize,
    data: Vec<f64>,
}

impl Channel {
    pub fn new(rows: &[Vec<f64>], policy: Normalization) -> Result<Self> {
        let nx = rows.len();
        if nx == 0 {
            return Err(Error::Empty);
        }
        let ny = rows[0].len();
        let mut data = Vec::with_capacity(nx * ny);
        for row in rows {
            if row.len() != ny {
                return Err(Error::DimensionMismatch {
                    expected: ny,
                    got: row.len(),
                });
            }
            data.extend(validate(row, policy)?);
        }
        Ok(Self { nx, ny, data })
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        (0..n).for_each(|i| data[i * n + i] = 1.0);
        Self { nx: n, ny: n, data }
    }

    /// Binary symmetric channel with crossover `eps`.
    pub fn bsc(eps: f64) -> Self {
        assert!((0.0..=1.0).contains(&eps));
        Self {
            nx: 2,
            ny: 2,
            data: vec![1.0 - eps, eps, eps, 1.0 - eps],
        }
    }

    /// Every input maps to the same output law: `Y` is independent of `X`.
    pub fn constant(nx: usize, output: &Distribution) -> Self {
        let data = (0..nx).flat_map(|_| output.probs.iter().copied()).collect();
        Self {
            nx,
            ny: output.len(),
            data,
        }
    }

    pub fn from_rows(rows: Vec<Distribution>) -> Result<Self> {
        let ny = rows.first().ok_or(Error::Empty)?.len();
        let mut data = Vec::with_capacity(rows.len() * ny);
        for row in &rows {
            if row.len() != ny {
                return Err(Error::DimensionMismatch {
                    expected: ny,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row.probs());
        }
        Ok(Self {
            nx: rows.len(),
            ny,
            data,
        })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.data[x * self.ny..(x + 1) * self.ny]
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[x * self.ny + y]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.ny)
    }

    /// Serial composition `X → Y → Z`: `(WV)(z|x) = Σ_y W(y|x) V(z|y)`.
    pub fn then(&self, next: &Channel) -> Result<Channel> {
        if next.nx != self.ny {
            return Err(Error::DimensionMismatch {
                expected: self.ny,
                got: next.nx,
            });
        }
        let mut data = vec![0.0; self.nx * next.ny];
        for x in 0..self.nx {
            for y in 0..self.ny {
                let w = self.get(x, y);
                if w == 0.0 {
                    continue;
                }
                for z in 0..next.ny {
                    data[x * next.ny + z] += w * next.get(y, z);
                }
            }
        }
        Ok(Channel {
            nx: self.nx,
            ny: next.ny,
            data,
        })
    }
}

/// Joint mass on `X × Y`, stored row-major by `x`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Joint {
    nx: usize,
    ny: usize,
    data: Vec<f64>,
}

impl AsMass for Joint {
    fn mass(&self) -> &[f64] {
        &self.data
    }
}

/// `J(x, y) = p(x) W(y|x)`.
pub fn compose(p: &Distribution, w: &Channel) -> Result<Joint> {
    if p.len() != w.nx {
        return Err(Error::DimensionMismatch {
            expected: w.nx,
            got: p.len(),
        });
    }
    let data = (0..w.nx)
        .flat_map(|x| w.row(x).iter().map(move |&wy| p.get(x) * wy))
        .collect();
    Ok(Joint {
        nx: w.nx,
        ny: w.ny,
        data,
    })
}

pub fn marginal_y(j: &Joint) -> Distribution {
    j.marginal_y()
}

pub fn posterior(j: &Joint) -> Posterior {
    j.posterior()
}

/// Column-wise Bayes posterior `p(x|y)`, with zero-mass columns flagged.
#[derive(Debug, Clone, PartialEq)]
pub struct Posterior {
    pub rule: DecisionRule,
    /// `true` where `p_Y(y) = 0`; the column holds a uniform placeholder.
    pub zero_mass: Vec<bool>,
}

impl Joint {
    pub fn new(rows: &[Vec<f64>], policy: Normalization) -> Result<Self> {
        let nx = rows.len();
        if nx == 0 {
            return Err(Error::Empty);
        }
        let ny = rows[0].len();
        let mut flat = Vec::with_capacity(nx * ny);
        for row in rows {
            if row.len() != ny {
                return Err(Error::DimensionMismatch {
                    expected: ny,
                    got: row.len(),
                });
            }
            flat.extend_from_slice(row);
        }
        let data = validate(&flat, policy)?;
        Ok(Self { nx, ny, data })
    }

    /// `q_X ⊗ q_Y`.
    pub fn product(qx: &Distribution, qy: &Distribution) -> Self {
        let data = qx
            .probs
            .iter()
            .flat_map(|&a| qy.probs.iter().map(move |&b| a * b))
            .collect();
        Self {
            nx: qx.len(),
            ny: qy.len(),
            data,
        }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[x * self.ny + y]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.data[x * self.ny..(x + 1) * self.ny]
    }

    pub fn marginal_x(&self) -> Distribution {
        Distribution::from_vec_unchecked(self.data.chunks(self.ny).map(|r| r.iter().sum()).collect())
    }

    pub fn marginal_y(&self) -> Distribution {
        let mut m = vec![0.0; self.ny];
        for row in self.data.chunks(self.ny) {
            m.iter_mut().zip(row).for_each(|(a, b)| *a += b);
        }
        Distribution::from_vec_unchecked(m)
    }

    pub fn posterior(&self) -> Posterior {
        let py = self.marginal_y();
        let mut data = vec![0.0; self.nx * self.ny];
        let mut zero_mass = vec![false; self.ny];
        for y in 0..self.ny {
            let m = py.get(y);
            for x in 0..self.nx {
                data[x * self.ny + y] = if m > 0.0 {
                    self.get(x, y) / m
                } else {
                    1.0 / self.nx as f64
                };
            }
            zero_mass[y] = m <= 0.0;
        }
        Posterior {
            rule: DecisionRule {
                nx: self.nx,
                ny: self.ny,
                data,
            },
            zero_mass,
        }
    }

    /// Factor into `(p_X, W)`. Rows with zero prior mass get a uniform
    /// placeholder row; they carry no weight anywhere.
    pub fn factor(&self) -> (Distribution, Channel) {
        let px = self.marginal_x();
        let mut data = Vec::with_capacity(self.nx * self.ny);
        for x in 0..self.nx {
            let m = px.get(x);
            data.extend(self.row(x).iter().map(|&v| {
                if m > 0.0 {
                    v / m
                } else {
                    1.0 / self.ny as f64
                }
            }));
        }
        (
            px,
            Channel {
                nx: self.nx,
                ny: self.ny,
                data,
            },
        )
    }
}

/// A reverse channel `r(x|y)`: every column is a distribution over `x`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecisionRule {
    nx: usize,
    ny: usize,
    data: Vec<f64>,
}

impl DecisionRule {
    pub fn from_columns(columns: &[Distribution]) -> Result<Self> {
        let nx = columns.first().ok_or(Error::Empty)?.len();
        let ny = columns.len();
        let mut data = vec![0.0; nx * ny];
        for (y, col) in columns.iter().enumerate() {
            if col.len() != nx {
                return Err(Error::DimensionMismatch {
                    expected: nx,
                    got: col.len(),
                });
            }
            for x in 0..nx {
                data[x * ny + y] = col.get(x);
            }
        }
        Ok(Self { nx, ny, data })
    }

    pub fn uniform(nx: usize, ny: usize) -> Self {
        Self {
            nx,
            ny,
            data: vec![1.0 / nx as f64; nx * ny],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        (0..n).for_each(|i| data[i * n + i] = 1.0);
        Self { nx: n, ny: n, data }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[x * self.ny + y]
    }

    pub fn column(&self, y: usize) -> Distribution {
        Distribution::from_vec_unchecked((0..self.nx).map(|x| self.get(x, y)).collect())
    }

    pub fn columns(&self) -> Vec<Distribution> {
        (0..self.ny).map(|y| self.column(y)).collect()
    }

    pub fn map_columns<F>(&self, mut f: F) -> Self
    where
        F: FnMut(usize, &Distribution) -> Distribution,
    {
        let cols: Vec<Distribution> = (0..self.ny).map(|y| f(y, &self.column(y))).collect();
        Self::from_columns(&cols).expect("column map preserves shape")
    }

    pub fn max_abs_diff(&self, other: &DecisionRule) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}
