//! Finite probability distributions and the divergences used throughout the
//! bound calculators: statistical distance, Rényi divergence and KL divergence.
//!
//! Distributions are stored as doubles keyed by string labels. A rational
//! variant ([`RationalDist`]) exists for tests that need exact equalities on
//! product distributions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Tolerance on the total mass of a [`DiscreteDist`].
pub const NORMALIZATION_TOLERANCE: f64 = 1e-12;

/// Errors raised by distribution constructors and divergence evaluators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistError {
    #[error("probability for label {label:?} is {value}, expected a finite value >= 0")]
    InvalidProbability { label: String, value: f64 },
    #[error("probabilities sum to {0}, expected 1")]
    NotNormalized(f64),
    #[error("label {0:?} has positive mass under P but zero mass under Q")]
    SupportViolation(String),
    #[error("empty input")]
    EmptyInput,
    #[error("Rényi order must exceed 1, got {0}")]
    InvalidOrder(f64),
}

/// Order of a Rényi divergence: a finite real above one, or infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RenyiOrder {
    Finite(f64),
    Infinity,
}

impl RenyiOrder {
    /// Validated finite order.
    pub fn finite(alpha: f64) -> Result<Self, DistError> {
        if alpha.is_nan() || alpha <= 1.0 {
            return Err(DistError::InvalidOrder(alpha));
        }
        if alpha.is_infinite() {
            return Ok(RenyiOrder::Infinity);
        }
        Ok(RenyiOrder::Finite(alpha))
    }

    /// The exponent (α−1)/α, equal to 1 at α = ∞.
    pub fn holder_exponent(self) -> f64 {
        match self {
            RenyiOrder::Finite(a) => (a - 1.0) / a,
            RenyiOrder::Infinity => 1.0,
        }
    }

    /// The order as a float, `f64::INFINITY` for the infinite order.
    pub fn as_f64(self) -> f64 {
        match self {
            RenyiOrder::Finite(a) => a,
            RenyiOrder::Infinity => f64::INFINITY,
        }
    }
}

impl fmt::Display for RenyiOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RenyiOrder::Finite(a) => write!(f, "{a}"),
            RenyiOrder::Infinity => f.write_str("inf"),
        }
    }
}

impl Serialize for RenyiOrder {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            RenyiOrder::Finite(a) => s.serialize_f64(*a),
            RenyiOrder::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for RenyiOrder {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        let alpha = match Repr::deserialize(d)? {
            Repr::Num(a) => a,
            Repr::Text(t) => match t.trim().to_ascii_lowercase().as_str() {
                "inf" | "infinity" | "∞" => f64::INFINITY,
                other => other
                    .parse::<f64>()
                    .map_err(|_| serde::de::Error::custom(format!("bad Rényi order {t:?}")))?,
            },
        };
        RenyiOrder::finite(alpha).map_err(serde::de::Error::custom)
    }
}

/// A probability distribution over a finite set of string labels.
///
/// Labels absent from the map have probability zero. Labels may be present
/// with probability zero, which lets a distribution carry its full alphabet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<String, f64>", into = "BTreeMap<String, f64>")]
pub struct DiscreteDist {
    probs: BTreeMap<String, f64>,
}

impl TryFrom<BTreeMap<String, f64>> for DiscreteDist {
    type Error = DistError;

    fn try_from(probs: BTreeMap<String, f64>) -> Result<Self, DistError> {
        DiscreteDist::new(probs)
    }
}

impl From<DiscreteDist> for BTreeMap<String, f64> {
    fn from(d: DiscreteDist) -> Self {
        d.probs
    }
}

impl DiscreteDist {
    /// Builds a distribution, checking non-negativity and total mass.
    pub fn new(probs: BTreeMap<String, f64>) -> Result<Self, DistError> {
        if probs.is_empty() {
            return Err(DistError::EmptyInput);
        }
        for (label, &value) in &probs {
            if !value.is_finite() || value < 0.0 {
                return Err(DistError::InvalidProbability {
                    label: label.clone(),
                    value,
                });
            }
        }
        let total: f64 = probs.values().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(DistError::NotNormalized(total));
        }
        Ok(DiscreteDist { probs })
    }

    /// Builds a distribution from `(label, probability)` pairs. Repeated
    /// labels accumulate.
    pub fn from_pairs<I, L>(pairs: I) -> Result<Self, DistError>
    where
        I: IntoIterator<Item = (L, f64)>,
        L: Into<String>,
    {
        let mut probs = BTreeMap::new();
        for (label, p) in pairs {
            *probs.entry(label.into()).or_insert(0.0) += p;
        }
        Self::new(probs)
    }

    /// Uniform distribution on the given labels.
    pub fn uniform<I, L>(labels: I) -> Result<Self, DistError>
    where
        I: IntoIterator<Item = L>,
        L: Into<String>,
    {
        let labels: BTreeSet<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(DistError::EmptyInput);
        }
        let p = 1.0 / labels.len() as f64;
        Self::new(labels.into_iter().map(|l| (l, p)).collect())
    }

    /// Probability of `label`, zero when absent.
    pub fn prob(&self, label: &str) -> f64 {
        self.probs.get(label).copied().unwrap_or(0.0)
    }

    /// All stored labels, including zero-mass ones, in sorted order.
    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.probs.keys().map(String::as_str)
    }

    /// Labels with positive mass.
    pub fn support(&self) -> impl Iterator<Item = &str> {
        self.probs
            .iter()
            .filter(|(_, &p)| p > 0.0)
            .map(|(l, _)| l.as_str())
    }

    /// `(label, probability)` pairs in label order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.probs.iter().map(|(l, &p)| (l.as_str(), p))
    }

    /// Number of stored labels.
    pub fn len(&self) -> usize {
        self.probs.len()
    }

    /// True when no labels are stored; never the case for a constructed value.
    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Total probability of the labels accepted by `event`.
    pub fn event_prob<F: Fn(&str) -> bool>(&self, event: F) -> f64 {
        self.iter().filter(|(l, _)| event(l)).map(|(_, p)| p).sum()
    }

    /// Push-forward through a deterministic relabelling.
    pub fn map_labels<F: Fn(&str) -> String>(&self, f: F) -> DiscreteDist {
        let mut probs = BTreeMap::new();
        for (l, p) in self.iter() {
            *probs.entry(f(l)).or_insert(0.0) += p;
        }
        DiscreteDist { probs }
    }

    /// Product distribution; the joint label is `"a,b"`.
    pub fn product(&self, other: &DiscreteDist) -> DiscreteDist {
        let mut probs = BTreeMap::new();
        for (a, pa) in self.iter() {
            for (b, pb) in other.iter() {
                probs.insert(format!("{a},{b}"), pa * pb);
            }
        }
        DiscreteDist { probs }
    }

    /// `k`-fold i.i.d. product, `k ≥ 1`.
    pub fn power(&self, k: usize) -> DiscreteDist {
        assert!(k >= 1, "power of a distribution needs k >= 1");
        let mut out = self.clone();
        for _ in 1..k {
            out = out.product(self);
        }
        out
    }

    /// Label with the largest probability, ties broken by label order.
    pub fn mode(&self) -> &str {
        let mut best: Option<(&str, f64)> = None;
        for (l, p) in self.iter() {
            if best.is_none_or(|(_, bp)| p > bp) {
                best = Some((l, p));
            }
        }
        best.map(|(l, _)| l).unwrap_or_default()
    }

    /// Reusable sampler over the support.
    pub fn sampler(&self) -> DistSampler {
        let labels: Vec<String> = self.support().map(str::to_owned).collect();
        let weights: Vec<f64> = labels.iter().map(|l| self.prob(l)).collect();
        let index = WeightedIndex::new(weights).expect("distribution has positive total mass");
        DistSampler { labels, index }
    }
}

/// Draws labels from a [`DiscreteDist`].
#[derive(Debug, Clone)]
pub struct DistSampler {
    labels: Vec<String>,
    index: WeightedIndex<f64>,
}

impl DistSampler {
    /// One draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> &str {
        &self.labels[self.index.sample(rng)]
    }
}

fn union_labels<'a>(p: &'a DiscreteDist, q: &'a DiscreteDist) -> BTreeSet<&'a str> {
    p.labels().chain(q.labels()).collect()
}

/// Statistical distance ½ Σ |P(x) − Q(x)| over the union of labels.
pub fn stat_distance(p: &DiscreteDist, q: &DiscreteDist) -> f64 {
    let sum: f64 = union_labels(p, q)
        .into_iter()
        .map(|l| (p.prob(l) - q.prob(l)).abs())
        .sum();
    (0.5 * sum).clamp(0.0, 1.0)
}

fn check_support(p: &DiscreteDist, q: &DiscreteDist) -> Result<(), DistError> {
    match p.support().find(|l| q.prob(l) == 0.0) {
        Some(l) => Err(DistError::SupportViolation(l.to_owned())),
        None => Ok(()),
    }
}

/// Rényi divergence R_α(P‖Q); the sup-ratio at α = ∞.
pub fn renyi_divergence(
    alpha: RenyiOrder,
    p: &DiscreteDist,
    q: &DiscreteDist,
) -> Result<f64, DistError> {
    check_support(p, q)?;
    match alpha {
        RenyiOrder::Infinity => Ok(p
            .iter()
            .filter(|(_, pp)| *pp > 0.0)
            .map(|(l, pp)| pp / q.prob(l))
            .fold(0.0, f64::max)),
        RenyiOrder::Finite(a) => {
            if a.is_nan() || a <= 1.0 {
                return Err(DistError::InvalidOrder(a));
            }
            let sum: f64 = p
                .iter()
                .filter(|(_, pp)| *pp > 0.0)
                .map(|(l, pp)| pp.powf(a) * q.prob(l).powf(1.0 - a))
                .sum();
            Ok(sum.powf(1.0 / (a - 1.0)))
        }
    }
}

/// Natural-log Kullback–Leibler divergence.
pub fn kl_divergence(p: &DiscreteDist, q: &DiscreteDist) -> Result<f64, DistError> {
    check_support(p, q)?;
    let kl: f64 = p
        .iter()
        .filter(|(_, pp)| *pp > 0.0)
        .map(|(l, pp)| pp * (pp / q.prob(l)).ln())
        .sum();
    Ok(kl.max(0.0))
}

/// Relative-frequency distribution of a sample sequence.
pub fn empirical_dist<I, L>(samples: I) -> Result<DiscreteDist, DistError>
where
    I: IntoIterator<Item = L>,
    L: Into<String>,
{
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    let mut n = 0u64;
    for s in samples {
        *counts.entry(s.into()).or_insert(0) += 1;
        n += 1;
    }
    if n == 0 {
        return Err(DistError::EmptyInput);
    }
    let probs = counts
        .into_iter()
        .map(|(l, c)| (l, c as f64 / n as f64))
        .collect();
    DiscreteDist::new(probs)
}

/// A distribution with exact rational probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalDist {
    probs: BTreeMap<String, BigRational>,
}

impl RationalDist {
    /// Builds a distribution whose probabilities sum to exactly one.
    pub fn new(probs: BTreeMap<String, BigRational>) -> Result<Self, DistError> {
        if probs.is_empty() {
            return Err(DistError::EmptyInput);
        }
        if let Some((label, value)) = probs.iter().find(|(_, v)| v.is_negative()) {
            return Err(DistError::InvalidProbability {
                label: label.clone(),
                value: rational_to_f64(value),
            });
        }
        let total: BigRational = probs.values().cloned().sum();
        if !total.is_one() {
            return Err(DistError::NotNormalized(rational_to_f64(&total)));
        }
        Ok(RationalDist { probs })
    }

    /// Builds from `(label, numerator, denominator)` triples.
    pub fn from_fractions<L: Into<String>>(
        entries: impl IntoIterator<Item = (L, i64, i64)>,
    ) -> Result<Self, DistError> {
        let probs = entries
            .into_iter()
            .map(|(l, n, d)| (l.into(), BigRational::new(BigInt::from(n), BigInt::from(d))))
            .collect();
        Self::new(probs)
    }

    /// Probability of `label`, zero when absent.
    pub fn prob(&self, label: &str) -> BigRational {
        self.probs.get(label).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Product distribution with joint labels `"a,b"`.
    pub fn product(&self, other: &RationalDist) -> RationalDist {
        let mut probs = BTreeMap::new();
        for (a, pa) in &self.probs {
            for (b, pb) in &other.probs {
                probs.insert(format!("{a},{b}"), pa * pb);
            }
        }
        RationalDist { probs }
    }

    /// `k`-fold i.i.d. product, `k ≥ 1`.
    pub fn power(&self, k: usize) -> RationalDist {
        assert!(k >= 1, "power of a distribution needs k >= 1");
        let mut out = self.clone();
        for _ in 1..k {
            out = out.product(self);
        }
        out
    }

    /// Lossy conversion to a double-precision distribution.
    pub fn to_f64(&self) -> DiscreteDist {
        DiscreteDist {
            probs: self
                .probs
                .iter()
                .map(|(l, v)| (l.clone(), rational_to_f64(v)))
                .collect(),
        }
    }
}

/// Exact Σ P(x)^α Q(x)^{1−α} for an integer order α ≥ 2. Raising the result
/// to 1/(α−1) gives R_α(P‖Q).
pub fn renyi_power_sum_exact(
    alpha: u32,
    p: &RationalDist,
    q: &RationalDist,
) -> Result<BigRational, DistError> {
    if alpha < 2 {
        return Err(DistError::InvalidOrder(f64::from(alpha)));
    }
    let mut sum = BigRational::zero();
    for (label, pp) in &p.probs {
        if pp.is_zero() {
            continue;
        }
        let qq = q.prob(label);
        if qq.is_zero() {
            return Err(DistError::SupportViolation(label.clone()));
        }
        sum += num_traits::pow(pp.clone(), alpha as usize)
            / num_traits::pow(qq, (alpha - 1) as usize);
    }
    Ok(sum)
}

fn rational_to_f64(v: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    v.to_f64().unwrap_or(f64::NAN)
}
