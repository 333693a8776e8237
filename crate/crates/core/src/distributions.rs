//! Distribution primitives for both tiers of the lab.
//!
//! The exact tier works with probability vectors on a finite support
//! ([`DiscreteDistribution`]); the only continuous densities live in the
//! deletion-vs-redaction demo, which contrasts a Gaussian fitted after
//! deleting tail samples with the honestly truncated density.

use std::fmt;
use std::sync::Arc;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Probability vector on a finite support: entries nonnegative, sum 1 within 1e-12.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    probs: Vec<f64>,
}

impl DiscreteDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::NotADistribution { sum: 0.0 });
        }
        if probs.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::NotADistribution {
                sum: probs.iter().sum(),
            });
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::NotADistribution { sum });
        }
        Ok(Self { probs })
    }

    /// Normalizes nonnegative weights with positive total mass.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(|&w| !(w >= 0.0)) {
            return Err(Error::NotADistribution {
                sum: weights.iter().sum(),
            });
        }
        let sum: f64 = weights.iter().sum();
        if sum <= 0.0 {
            return Err(Error::NotADistribution { sum });
        }
        Ok(Self {
            probs: weights.iter().map(|w| w / sum).collect(),
        })
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            probs: vec![1.0 / n as f64; n],
        }
    }

    pub fn support_size(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, i: usize) -> f64 {
        self.probs[i]
    }

    /// Total variation distance, (1/2) sum |p - q|.
    pub fn tv_distance(&self, other: &Self) -> Result<f64> {
        if self.probs.len() != other.probs.len() {
            return Err(Error::SupportMismatch {
                left: self.probs.len(),
                right: other.probs.len(),
            });
        }
        Ok(self
            .probs
            .iter()
            .zip(other.probs.iter())
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            / 2.0)
    }
}

pub type ValidityFn<X> = Arc<dyn Fn(&X) -> bool + Send + Sync>;
pub type ScoreFn<X> = Arc<dyn Fn(&X) -> f64 + Send + Sync>;

/// Description of the region to redact. The three variants mirror how a
/// caller can know the region: an explicit collection of points, a validity
/// oracle (`true` = valid, i.e. outside the region), or a soft classifier
/// whose sub-threshold scores mark the region.
///
/// `X` is the point type of the tier: `usize` atom indices on the exact tier,
/// data-space points (`Vec<f64>`) on the neural tier. Note that on the neural
/// tier an `ExplicitSet` can only recognise bit-identical points, so region
/// membership of generated samples should be expressed through `Validity` or
/// `Classifier`.
#[derive(Clone)]
pub enum RedactionSpec<X> {
    ExplicitSet(Vec<X>),
    Validity(ValidityFn<X>),
    Classifier { score: ScoreFn<X>, tau: f64 },
}

impl<X> fmt::Debug for RedactionSpec<X> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RedactionSpec::ExplicitSet(v) => write!(f, "ExplicitSet(len={})", v.len()),
            RedactionSpec::Validity(_) => write!(f, "Validity(<fn>)"),
            RedactionSpec::Classifier { tau, .. } => write!(f, "Classifier(tau={tau})"),
        }
    }
}

impl<X> RedactionSpec<X> {
    pub fn validity(v: impl Fn(&X) -> bool + Send + Sync + 'static) -> Self {
        RedactionSpec::Validity(Arc::new(v))
    }

    pub fn classifier(score: impl Fn(&X) -> f64 + Send + Sync + 'static, tau: f64) -> Self {
        RedactionSpec::Classifier {
            score: Arc::new(score),
            tau,
        }
    }

    /// An empty explicit set: nothing is redacted.
    pub fn empty() -> Self {
        RedactionSpec::ExplicitSet(Vec::new())
    }
}

impl<X: PartialEq> RedactionSpec<X> {
    /// Membership in the redaction region. The classifier test is strict:
    /// scores exactly at the threshold are valid.
    pub fn contains(&self, x: &X) -> bool {
        match self {
            RedactionSpec::ExplicitSet(points) => points.iter().any(|p| p == x),
            RedactionSpec::Validity(valid) => !valid(x),
            RedactionSpec::Classifier { score, tau } => score(x) < *tau,
        }
    }
}

impl RedactionSpec<usize> {
    /// The member atoms of the region on a support of the given size, sorted.
    /// Explicit indices are checked for bounds and duplicates.
    pub fn member_indices(&self, support_size: usize) -> Result<Vec<usize>> {
        match self {
            RedactionSpec::ExplicitSet(indices) => {
                let mut seen = vec![false; support_size];
                let mut out = Vec::with_capacity(indices.len());
                for &i in indices {
                    if i >= support_size {
                        return Err(Error::IndexOutOfBounds {
                            index: i,
                            support: support_size,
                        });
                    }
                    if seen[i] {
                        return Err(Error::DuplicateIndex { index: i });
                    }
                    seen[i] = true;
                    out.push(i);
                }
                out.sort_unstable();
                Ok(out)
            }
            _ => Ok((0..support_size).filter(|i| self.contains(i)).collect()),
        }
    }
}

/// Restriction of `p` to the complement of the region, renormalized.
pub fn restrict(
    p: &DiscreteDistribution,
    omega: &RedactionSpec<usize>,
) -> Result<DiscreteDistribution> {
    let n = p.support_size();
    let members = omega.member_indices(n)?;
    if members.is_empty() {
        return Ok(p.clone());
    }
    let mut in_omega = vec![false; n];
    for &i in &members {
        in_omega[i] = true;
    }
    let off_mass: f64 = p
        .probs()
        .iter()
        .enumerate()
        .filter(|(i, _)| !in_omega[*i])
        .map(|(_, &v)| v)
        .sum();
    if off_mass <= 0.0 {
        return Err(Error::AllMassRedacted);
    }
    let probs = p
        .probs()
        .iter()
        .enumerate()
        .map(|(i, &v)| if in_omega[i] { 0.0 } else { v / off_mass })
        .collect();
    Ok(DiscreteDistribution { probs })
}

/// Uniform distribution on the region's member atoms.
pub fn uniform_on(
    omega: &RedactionSpec<usize>,
    support_size: usize,
) -> Result<DiscreteDistribution> {
    let members = omega.member_indices(support_size)?;
    if members.is_empty() {
        return Err(Error::EmptyRedactionSet);
    }
    let mass = 1.0 / members.len() as f64;
    let mut probs = vec![0.0; support_size];
    for &i in &members {
        probs[i] = mass;
    }
    Ok(DiscreteDistribution { probs })
}

/// The fake mixture lambda * p_G + (1 - lambda) * p_Omega.
pub fn fake_mixture(
    p_g: &DiscreteDistribution,
    p_omega: &DiscreteDistribution,
    lambda: f64,
) -> Result<DiscreteDistribution> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidParameter {
            name: "lambda",
            value: lambda,
            constraint: "lambda in (0, 1)",
        });
    }
    if p_g.support_size() != p_omega.support_size() {
        return Err(Error::SupportMismatch {
            left: p_g.support_size(),
            right: p_omega.support_size(),
        });
    }
    let probs = p_g
        .probs()
        .iter()
        .zip(p_omega.probs())
        .map(|(&g, &w)| lambda * g + (1.0 - lambda) * w)
        .collect();
    Ok(DiscreteDistribution { probs })
}

/// Mass the generator places on the region: the primary redaction metric.
pub fn invalidity(p_g: &DiscreteDistribution, omega: &RedactionSpec<usize>) -> Result<f64> {
    let members = omega.member_indices(p_g.support_size())?;
    Ok(members.iter().map(|&i| p_g.prob(i)).sum())
}

/// A univariate Gaussian with positive variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianModel {
    pub mean: f64,
    pub variance: f64,
}

impl GaussianModel {
    pub fn new(mean: f64, variance: f64) -> Result<Self> {
        if !(variance > 0.0) {
            return Err(Error::InvalidParameter {
                name: "variance",
                value: variance,
                constraint: "variance > 0",
            });
        }
        Ok(Self { mean, variance })
    }

    fn normal(&self) -> Normal {
        Normal::new(self.mean, self.variance.sqrt()).expect("validated parameters")
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.normal().pdf(x)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.normal().cdf(x)
    }

    /// Mass outside the open interval (lo, hi).
    pub fn mass_outside_interval(&self, lo: f64, hi: f64) -> f64 {
        let n = self.normal();
        n.cdf(lo) + (1.0 - n.cdf(hi))
    }
}

/// Maximum-likelihood Gaussian fit: sample mean and population (1/n) variance.
/// Uses Welford's recurrence; rejects fewer than two samples and a zero
/// variance (all samples equal).
pub fn gaussian_mle(samples: &[f64]) -> Result<GaussianModel> {
    if samples.len() < 2 {
        return Err(Error::TooFewSamples {
            need: 2,
            got: samples.len(),
        });
    }
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (k, &x) in samples.iter().enumerate() {
        let delta = x - mean;
        mean += delta / (k + 1) as f64;
        m2 += delta * (x - mean);
    }
    let variance = m2 / samples.len() as f64;
    if !(variance > 0.0) {
        return Err(Error::DegenerateVariance);
    }
    GaussianModel::new(mean, variance)
}

/// Boundary of the fixed redaction set of the demo: Omega = {|x| >= 1.5}.
pub const DEMO_OMEGA_CUTOFF: f64 = 1.5;

/// Output of [`deletion_vs_redaction_demo`].
#[derive(Debug, Clone)]
pub struct DeletionVsRedactionReport {
    /// Gaussian fitted after deleting samples with |x| >= threshold.
    pub deleted_model: GaussianModel,
    /// Gaussian fitted on all samples (the stand-in for the pre-trained model).
    pub full_model: GaussianModel,
    /// Always zero: the truncated density carries no mass on Omega.
    pub redacted_density_mass_on_omega: f64,
    /// Mass the deletion model leaves on Omega.
    pub deleted_model_mass_on_omega: f64,
    pub n_kept: usize,
    pub n_total: usize,
}

/// Draws `n` standard-normal samples, fits the maximum-likelihood Gaussian on
/// the samples with |x| < `threshold` (the deletion model) and reports the
/// mass that model leaves on the fixed redaction set {|x| >= 1.5}. The
/// redacted density is the fitted full-sample Gaussian truncated to
/// (-1.5, 1.5), which has zero mass on the set by construction: deleting the
/// tail samples does not redact the tails, truncation does.
pub fn deletion_vs_redaction_demo(
    n: usize,
    threshold: f64,
    seed: u64,
) -> Result<DeletionVsRedactionReport> {
    if n < 10 {
        return Err(Error::TooFewSamples { need: 10, got: n });
    }
    if !(threshold > 0.0) {
        return Err(Error::InvalidParameter {
            name: "threshold",
            value: threshold,
            constraint: "threshold > 0",
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let kept: Vec<f64> = samples
        .iter()
        .copied()
        .filter(|x| x.abs() < threshold)
        .collect();
    let deleted_model = gaussian_mle(&kept)?;
    let full_model = gaussian_mle(&samples)?;
    Ok(DeletionVsRedactionReport {
        deleted_model,
        full_model,
        redacted_density_mass_on_omega: 0.0,
        deleted_model_mass_on_omega: deleted_model
            .mass_outside_interval(-DEMO_OMEGA_CUTOFF, DEMO_OMEGA_CUTOFF),
        n_kept: kept.len(),
        n_total: n,
    })
}

impl DeletionVsRedactionReport {
    /// Densities on a grid point: (p_data, deleted density, redacted density).
    /// The redacted density is the full-sample fit truncated to the complement
    /// of the demo's redaction set.
    pub fn densities_at(&self, x: f64) -> (f64, f64, f64) {
        let data = GaussianModel::new(0.0, 1.0).expect("unit variance");
        let inside = 1.0 - self.full_model.mass_outside_interval(-DEMO_OMEGA_CUTOFF, DEMO_OMEGA_CUTOFF);
        let redacted = if x.abs() >= DEMO_OMEGA_CUTOFF {
            0.0
        } else {
            self.full_model.pdf(x) / inside
        };
        (data.pdf(x), self.deleted_model.pdf(x), redacted)
    }
}
