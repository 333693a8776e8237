//! The three redaction algorithms on the neural tier, the multi-set
//! combination rule, and the fixed-discriminator adversarial variant.
//!
//! All three run the shared adversarial engine from [`crate::gan`] with real
//! batches drawn from the valid part of the training set and fake batches
//! mixing generator samples with redaction samples by Bernoulli(lambda):
//!
//! - data-based: the redaction pool is a given sample set;
//! - validity-based: R rounds of one epoch each; before every round T fresh
//!   generator samples are checked against the validity oracle and the
//!   failures grow an append-only pool;
//! - classifier-based: the redaction pool holds sub-threshold training
//!   samples plus freshly generated sub-threshold samples, and the
//!   discriminator is wrapped by the guide function in both update steps.

use std::sync::Arc;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::distributions::RedactionSpec;
use crate::divergence::SmoothingParams;
use crate::error::{Error, Result};
use crate::gan::{train_epochs, EngineConfig, GanModel, TrainConfig, TrainStats};

/// Differentiable soft classifier over data-space points. Scores live in
/// [0, 1]; points scoring below the run's threshold are the redaction set.
pub trait SoftClassifier: Send + Sync {
    fn score(&self, x: &[f64]) -> f64;
    /// Gradient of the score with respect to the input point.
    fn score_grad(&self, x: &[f64]) -> Vec<f64>;
}

/// Logistic ramp on the first coordinate: score = sigmoid(k (x - center)).
/// Low scores flag everything left of the center.
#[derive(Debug, Clone, Copy)]
pub struct LogisticRamp {
    pub center: f64,
    pub steepness: f64,
}

impl SoftClassifier for LogisticRamp {
    fn score(&self, x: &[f64]) -> f64 {
        crate::nn::sigmoid(self.steepness * (x[0] - self.center))
    }

    fn score_grad(&self, x: &[f64]) -> Vec<f64> {
        let s = self.score(x);
        let mut g = vec![0.0; x.len()];
        g[0] = self.steepness * s * (1.0 - s);
        g
    }
}

/// Smooth dip around a center: score = sigmoid(k (|x - center| - radius)).
/// Low scores flag the interval of one mode; the |.| kink is a measure-zero
/// point and is irrelevant to training.
#[derive(Debug, Clone, Copy)]
pub struct LogisticBump {
    pub center: f64,
    pub radius: f64,
    pub steepness: f64,
}

impl SoftClassifier for LogisticBump {
    fn score(&self, x: &[f64]) -> f64 {
        crate::nn::sigmoid(self.steepness * ((x[0] - self.center).abs() - self.radius))
    }

    fn score_grad(&self, x: &[f64]) -> Vec<f64> {
        let s = self.score(x);
        let sign = if x[0] >= self.center { 1.0 } else { -1.0 };
        let mut g = vec![0.0; x.len()];
        g[0] = self.steepness * s * (1.0 - s) * sign;
        g
    }
}

/// Everything is valid: the constant-one classifier.
#[derive(Debug, Clone, Copy)]
pub struct ConstantOne;

impl SoftClassifier for ConstantOne {
    fn score(&self, _x: &[f64]) -> f64 {
        1.0
    }

    fn score_grad(&self, x: &[f64]) -> Vec<f64> {
        vec![0.0; x.len()]
    }
}

/// Pointwise minimum of several classifiers; the gradient follows the
/// active minimizer.
pub struct MinClassifier(pub Vec<Arc<dyn SoftClassifier>>);

impl SoftClassifier for MinClassifier {
    fn score(&self, x: &[f64]) -> f64 {
        self.0
            .iter()
            .map(|c| c.score(x))
            .fold(f64::INFINITY, f64::min)
    }

    fn score_grad(&self, x: &[f64]) -> Vec<f64> {
        let mut best = f64::INFINITY;
        let mut grad = vec![0.0; x.len()];
        for c in &self.0 {
            let s = c.score(x);
            if s < best {
                best = s;
                grad = c.score_grad(x);
            }
        }
        grad
    }
}

/// Which redaction algorithm a run uses; carried by manifests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RedactionMethod {
    DataBased,
    ValidityBased { rounds: usize, queries_per_round: usize },
    ClassifierBased { tau: f64 },
}

/// Full configuration of one redaction run.
#[derive(Debug, Clone)]
pub struct RedactionRunConfig {
    pub method: RedactionMethod,
    pub smoothing: SmoothingParams,
    pub train: TrainConfig,
}

impl RedactionRunConfig {
    pub fn validate(&self) -> Result<()> {
        self.train.validate()?;
        if let RedactionMethod::ValidityBased {
            rounds,
            queries_per_round,
        } = self.method
        {
            if rounds == 0 || queries_per_round == 0 {
                return Err(Error::InvalidParameter {
                    name: "validity budget",
                    value: 0.0,
                    constraint: "R >= 1 and T >= 1",
                });
            }
        }
        if let RedactionMethod::ClassifierBased { tau } = self.method {
            if !(tau > 0.0 && tau < 1.0) {
                return Err(Error::InvalidParameter {
                    name: "tau",
                    value: tau,
                    constraint: "tau in (0, 1)",
                });
            }
        }
        Ok(())
    }
}

/// Append-only pool of points that failed a validity check when inserted.
#[derive(Debug, Clone, Default)]
pub struct InvalidPool {
    samples: Vec<Vec<f64>>,
}

impl InvalidPool {
    pub fn new() -> Self {
        Self::default()
    }

    /// Stores the point only if the validity check fails; returns whether it
    /// was stored. This is the only way in, so every pooled sample failed the
    /// check at insertion time.
    pub fn insert_if_invalid(
        &mut self,
        x: Vec<f64>,
        validity: &dyn Fn(&[f64]) -> bool,
    ) -> bool {
        if validity(&x) {
            false
        } else {
            self.samples.push(x);
            true
        }
    }

    pub fn samples(&self) -> &[Vec<f64>] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

fn run_rng(cfg: &TrainConfig) -> ChaCha8Rng {
    // decorrelated from the pre-training stream of the same seed
    ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9e37_79b9_7f4a_7c15)
}

/// Data-based redaction: the redaction pool is the given sample set, real
/// batches come from the training data with those samples removed (bit-exact
/// match), and the smoothed objective is optimized for `cfg.train.epochs`.
pub fn redact_data_based(
    mut model: GanModel,
    data: &[Vec<f64>],
    omega_samples: &[Vec<f64>],
    cfg: &RedactionRunConfig,
) -> Result<GanModel> {
    cfg.validate()?;
    if omega_samples.is_empty() {
        return Err(Error::EmptyRedactionSet);
    }
    let real: Vec<Vec<f64>> = data
        .iter()
        .filter(|x| !omega_samples.iter().any(|w| w == *x))
        .cloned()
        .collect();
    if real.is_empty() {
        return Err(Error::EmptyRealSet);
    }
    let mut rng = run_rng(&cfg.train);
    let engine = EngineConfig {
        alpha_plus: cfg.smoothing.alpha_plus(),
        alpha_minus: cfg.smoothing.alpha_minus(),
        lambda: Some(cfg.smoothing.lambda()),
        omega_pool: omega_samples,
        guide: None,
        tau: cfg.smoothing.tau(),
        freeze_discriminator: false,
    };
    let mut stats = TrainStats::default();
    train_epochs(
        &mut model,
        &real,
        &cfg.train,
        &engine,
        cfg.train.epochs,
        &mut rng,
        &mut stats,
    )?;
    Ok(model)
}

/// Outcome of a validity-based run: the edited model, the exact number of
/// validity queries spent, and the fraction of each round's T probes that
/// came back invalid (an invalidity estimate of the model entering that
/// round).
#[derive(Debug)]
pub struct ValidityRedactionOutcome {
    pub model: GanModel,
    pub query_count: usize,
    pub invalidity_per_round: Vec<f64>,
    pub pool_size: usize,
}

/// Validity-based redaction: R rounds; each round draws T generator samples,
/// queries the validity oracle once per sample, grows the invalid pool, and
/// trains for one epoch against the pooled redaction set. Total queries are
/// exactly |data| + T * R. A round whose pool is still empty skips training
/// with a logged warning.
pub fn redact_validity_based(
    mut model: GanModel,
    data: &[Vec<f64>],
    validity: &dyn Fn(&[f64]) -> bool,
    rounds: usize,
    queries_per_round: usize,
    cfg: &RedactionRunConfig,
) -> Result<ValidityRedactionOutcome> {
    cfg.validate()?;
    if rounds == 0 || queries_per_round == 0 {
        return Err(Error::InvalidParameter {
            name: "validity budget",
            value: 0.0,
            constraint: "R >= 1 and T >= 1",
        });
    }
    let mut rng = run_rng(&cfg.train);
    let mut queries = 0usize;

    let mut pool = InvalidPool::new();
    let mut real = Vec::new();
    for x in data {
        queries += 1;
        if !pool.insert_if_invalid(x.clone(), validity) {
            real.push(x.clone());
        }
    }
    if real.is_empty() {
        return Err(Error::EmptyRealSet);
    }

    let mut invalidity_per_round = Vec::with_capacity(rounds);
    for round in 0..rounds {
        let probes = crate::gan::generate(&model, queries_per_round, &mut rng);
        let mut invalid_here = 0usize;
        for x in probes {
            queries += 1;
            if pool.insert_if_invalid(x, validity) {
                invalid_here += 1;
            }
        }
        invalidity_per_round.push(invalid_here as f64 / queries_per_round as f64);

        if pool.is_empty() {
            log::warn!("validity round {round}: empty redaction pool, skipping training");
            continue;
        }
        let engine = EngineConfig {
            alpha_plus: cfg.smoothing.alpha_plus(),
            alpha_minus: cfg.smoothing.alpha_minus(),
            lambda: Some(cfg.smoothing.lambda()),
            omega_pool: pool.samples(),
            guide: None,
            tau: cfg.smoothing.tau(),
            freeze_discriminator: false,
        };
        let mut stats = TrainStats::default();
        train_epochs(&mut model, &real, &cfg.train, &engine, 1, &mut rng, &mut stats)?;
    }
    debug_assert_eq!(queries, data.len() + queries_per_round * rounds);
    Ok(ValidityRedactionOutcome {
        model,
        query_count: queries,
        invalidity_per_round,
        pool_size: pool.len(),
    })
}

/// How many generator samples are scored per epoch to refresh the
/// generated-invalid part of the classifier method's redaction pool.
const CLASSIFIER_PROBE_BATCH: usize = 512;

/// Classifier-based redaction: real batches are the training samples scoring
/// at or above tau; the redaction pool mixes sub-threshold training samples
/// with freshly generated sub-threshold samples (refreshed every epoch); the
/// discriminator is wrapped by the guide in both the D-step and the G-step.
pub fn redact_classifier_based(
    mut model: GanModel,
    data: &[Vec<f64>],
    classifier: &dyn SoftClassifier,
    tau: f64,
    cfg: &RedactionRunConfig,
) -> Result<GanModel> {
    cfg.validate()?;
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::InvalidParameter {
            name: "tau",
            value: tau,
            constraint: "tau in (0, 1)",
        });
    }
    let real: Vec<Vec<f64>> = data
        .iter()
        .filter(|x| classifier.score(x) >= tau)
        .cloned()
        .collect();
    if real.is_empty() {
        return Err(Error::EmptyRealSet);
    }
    let data_invalid: Vec<Vec<f64>> = data
        .iter()
        .filter(|x| classifier.score(x) < tau)
        .cloned()
        .collect();

    let mut rng = run_rng(&cfg.train);
    for _ in 0..cfg.train.epochs {
        let mut pool = data_invalid.clone();
        let probe_n = CLASSIFIER_PROBE_BATCH.min(data.len().max(1));
        for x in crate::gan::generate(&model, probe_n, &mut rng) {
            if classifier.score(&x) < tau {
                pool.push(x);
            }
        }
        let engine = EngineConfig {
            alpha_plus: cfg.smoothing.alpha_plus(),
            alpha_minus: cfg.smoothing.alpha_minus(),
            // with nothing below the threshold anywhere, the guide is the
            // identity and training degrades to plain label-smoothed updates
            lambda: if pool.is_empty() {
                None
            } else {
                Some(cfg.smoothing.lambda())
            },
            omega_pool: &pool,
            guide: Some(classifier),
            tau,
            freeze_discriminator: false,
        };
        let mut stats = TrainStats::default();
        train_epochs(&mut model, &real, &cfg.train, &engine, 1, &mut rng, &mut stats)?;
    }
    Ok(model)
}

/// The fixed-discriminator variant: generator-only updates against the
/// guided, frozen discriminator. Discriminator parameters are untouched.
pub fn adversarial_variant(
    mut model: GanModel,
    classifier: &dyn SoftClassifier,
    tau: f64,
    cfg: &RedactionRunConfig,
) -> Result<GanModel> {
    cfg.validate()?;
    let disc_before = model.discriminator.flat_params();
    let mut rng = run_rng(&cfg.train);
    // generator steps need no real data; feed a single dummy point so the
    // epoch loop has one batch per epoch times the k_g schedule
    let dummy: Vec<Vec<f64>> = vec![vec![0.0; model.data_dim()]];
    let engine = EngineConfig {
        alpha_plus: cfg.smoothing.alpha_plus(),
        alpha_minus: cfg.smoothing.alpha_minus(),
        lambda: None,
        omega_pool: &[],
        guide: Some(classifier),
        tau,
        freeze_discriminator: true,
    };
    let mut stats = TrainStats::default();
    train_epochs(
        &mut model,
        &dummy,
        &cfg.train,
        &engine,
        cfg.train.epochs,
        &mut rng,
        &mut stats,
    )?;
    debug_assert_eq!(stats.d_updates, 0);
    assert_eq!(
        model.discriminator.flat_params(),
        disc_before,
        "frozen discriminator must not move"
    );
    Ok(model)
}

/// Combines same-variant redaction specs into the union region: explicit sets
/// by union, validity oracles and classifiers by pointwise minimum.
/// Classifier variants must share one threshold.
pub fn combine_specs<X>(specs: &[RedactionSpec<X>]) -> Result<RedactionSpec<X>>
where
    X: Clone + PartialEq + 'static,
{
    let first = specs.first().ok_or(Error::EmptyRedactionSet)?;
    match first {
        RedactionSpec::ExplicitSet(_) => {
            let mut union: Vec<X> = Vec::new();
            for spec in specs {
                let RedactionSpec::ExplicitSet(points) = spec else {
                    return Err(Error::MixedSpecVariants);
                };
                for p in points {
                    if !union.contains(p) {
                        union.push(p.clone());
                    }
                }
            }
            Ok(RedactionSpec::ExplicitSet(union))
        }
        RedactionSpec::Validity(_) => {
            let mut oracles = Vec::with_capacity(specs.len());
            for spec in specs {
                let RedactionSpec::Validity(v) = spec else {
                    return Err(Error::MixedSpecVariants);
                };
                oracles.push(Arc::clone(v));
            }
            // min over {0,1}: valid only if valid under every component
            Ok(RedactionSpec::validity(move |x: &X| {
                oracles.iter().all(|v| v(x))
            }))
        }
        RedactionSpec::Classifier { tau, .. } => {
            let shared_tau = *tau;
            let mut scores = Vec::with_capacity(specs.len());
            for spec in specs {
                let RedactionSpec::Classifier { score, tau } = spec else {
                    return Err(Error::MixedSpecVariants);
                };
                if *tau != shared_tau {
                    return Err(Error::MismatchedThresholds {
                        left: shared_tau,
                        right: *tau,
                    });
                }
                scores.push(Arc::clone(score));
            }
            Ok(RedactionSpec::Classifier {
                score: Arc::new(move |x: &X| {
                    scores
                        .iter()
                        .map(|s| s(x))
                        .fold(f64::INFINITY, f64::min)
                }),
                tau: shared_tau,
            })
        }
    }
}
