//! Toy GAN tier: a paired MLP generator and discriminator trained with the
//! label-smoothed adversarial loss, deterministic under an explicit seed.
//!
//! One shared minibatch engine drives pre-training and all redaction runs;
//! the differences are whether fake slots mix in redaction samples
//! (Bernoulli(lambda) per slot), whether discriminator outputs are wrapped by
//! a guide classifier, and whether the discriminator is frozen.

use ndarray::Array2;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};
use crate::nn::{softplus, Activation, AdamHyper, AdamState, MlpNetwork, OutputSquash};
use crate::redaction::SoftClassifier;

/// Pre-training label-smoothing targets.
pub const PRETRAIN_ALPHA_PLUS: f64 = 0.9;
pub const PRETRAIN_ALPHA_MINUS: f64 = 0.1;

/// Default architecture: latent 8 -> 64 -> 64 -> data_dim generator with tanh
/// hidden units; the discriminator mirrors it with a sigmoid output.
pub const DEFAULT_LATENT_DIM: usize = 8;
pub const DEFAULT_HIDDEN: [usize; 2] = [64, 64];

const CHECKPOINT_VERSION: u32 = 1;

/// Optimization schedule. `k_d`/`k_g` are discriminator/generator updates per
/// minibatch. The two networks take different step sizes: with a shared rate
/// the generator (whose Adam steps are scale-free) chases every nascent bump
/// of the discriminator and flattens it before any real/fake separation can
/// form, so the discriminator learns fast and the generator slowly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Discriminator learning rate.
    pub learning_rate: f64,
    /// Generator learning rate.
    pub g_learning_rate: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub batch_size: usize,
    pub k_d: usize,
    pub k_g: usize,
    pub epochs: usize,
    pub seed: u64,
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("learning_rate", self.learning_rate),
            ("g_learning_rate", self.g_learning_rate),
        ] {
            if !(value > 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    constraint: "> 0",
                });
            }
        }
        for (name, value) in [("adam_beta1", self.adam_beta1), ("adam_beta2", self.adam_beta2)] {
            if !(value > 0.0 && value < 1.0) {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    constraint: "in (0, 1)",
                });
            }
        }
        for (name, value) in [
            ("batch_size", self.batch_size),
            ("k_d", self.k_d),
            ("k_g", self.k_g),
            ("epochs", self.epochs),
        ] {
            if value == 0 {
                return Err(Error::InvalidParameter {
                    name,
                    value: 0.0,
                    constraint: ">= 1",
                });
            }
        }
        Ok(())
    }

    /// Toy-scale pre-training defaults, set by pilot runs: Adam betas
    /// (0.5, 0.999) and batch 64 as documented, rates 1e-3/2e-5 and the epoch
    /// count scaled for the eight-mode mixture.
    pub fn pretrain_defaults(seed: u64) -> Self {
        Self {
            learning_rate: 1e-3,
            g_learning_rate: 2e-5,
            adam_beta1: 0.5,
            adam_beta2: 0.999,
            batch_size: 64,
            k_d: 1,
            k_g: 1,
            epochs: 1500,
            seed,
        }
    }

    /// Redaction runs want the generator to move quickly, so both networks
    /// share the documented 2e-4 rate; the epoch budget is small.
    pub fn redaction_defaults(seed: u64) -> Self {
        Self {
            learning_rate: 2e-4,
            g_learning_rate: 2e-4,
            epochs: 5,
            ..Self::pretrain_defaults(seed)
        }
    }

    fn d_adam(&self) -> AdamHyper {
        AdamHyper {
            learning_rate: self.learning_rate,
            beta1: self.adam_beta1,
            beta2: self.adam_beta2,
        }
    }

    fn g_adam(&self) -> AdamHyper {
        AdamHyper {
            learning_rate: self.g_learning_rate,
            beta1: self.adam_beta1,
            beta2: self.adam_beta2,
        }
    }
}

/// Generator/discriminator pair with their Adam moments and the seed the
/// model was built from.
#[derive(Debug, Clone)]
pub struct GanModel {
    pub generator: MlpNetwork,
    pub discriminator: MlpNetwork,
    pub gen_opt: AdamState,
    pub disc_opt: AdamState,
    pub latent_dim: usize,
    pub seed: u64,
}

impl GanModel {
    pub fn init(latent_dim: usize, data_dim: usize, hidden: &[usize], seed: u64) -> Result<Self> {
        Self::init_with(latent_dim, data_dim, hidden, Activation::Tanh, seed)
    }

    /// As [`GanModel::init`] with an explicit hidden nonlinearity.
    pub fn init_with(
        latent_dim: usize,
        data_dim: usize,
        hidden: &[usize],
        activation: Activation,
        seed: u64,
    ) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g_dims = vec![latent_dim];
        g_dims.extend_from_slice(hidden);
        g_dims.push(data_dim);
        let mut d_dims = vec![data_dim];
        d_dims.extend_from_slice(hidden);
        d_dims.push(1);
        let generator = MlpNetwork::new(g_dims, activation, OutputSquash::Identity, &mut rng)?;
        let discriminator = MlpNetwork::new(d_dims, activation, OutputSquash::Sigmoid, &mut rng)?;
        let gen_opt = AdamState::new(&generator);
        let disc_opt = AdamState::new(&discriminator);
        Ok(Self {
            generator,
            discriminator,
            gen_opt,
            disc_opt,
            latent_dim,
            seed,
        })
    }

    pub fn data_dim(&self) -> usize {
        self.generator.output_dim()
    }

    /// Discriminator value on a single point.
    pub fn discriminate(&self, x: &[f64]) -> f64 {
        let batch = Array2::from_shape_vec((1, x.len()), x.to_vec()).expect("row");
        self.discriminator.forward(&batch)[(0, 0)]
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let cp = self.to_checkpoint();
        let json = serde_json::to_string_pretty(&cp).map_err(|e| Error::Checkpoint(e.to_string()))?;
        std::fs::write(path, json)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let json = std::fs::read_to_string(path)?;
        let cp: Checkpoint =
            serde_json::from_str(&json).map_err(|e| Error::Checkpoint(e.to_string()))?;
        Self::from_checkpoint(&cp)
    }

    pub fn to_checkpoint(&self) -> Checkpoint {
        Checkpoint {
            version: CHECKPOINT_VERSION,
            latent_dim: self.latent_dim,
            seed: self.seed,
            generator: NetState::from_net(&self.generator),
            discriminator: NetState::from_net(&self.discriminator),
            generator_opt: OptState::from_state(&self.gen_opt),
            discriminator_opt: OptState::from_state(&self.disc_opt),
        }
    }

    pub fn from_checkpoint(cp: &Checkpoint) -> Result<Self> {
        if cp.version != CHECKPOINT_VERSION {
            return Err(Error::Checkpoint(format!(
                "unsupported checkpoint version {}",
                cp.version
            )));
        }
        let generator = cp.generator.to_net()?;
        let discriminator = cp.discriminator.to_net()?;
        let mut gen_opt = AdamState::new(&generator);
        cp.generator_opt.load_into(&mut gen_opt)?;
        let mut disc_opt = AdamState::new(&discriminator);
        cp.discriminator_opt.load_into(&mut disc_opt)?;
        Ok(Self {
            generator,
            discriminator,
            gen_opt,
            disc_opt,
            latent_dim: cp.latent_dim,
            seed: cp.seed,
        })
    }
}

/// Versioned structured-text model container: layer dims, flattened
/// parameters, Adam moments and the training seed. JSON floats round-trip
/// bit-exactly, so save/load is lossless.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub latent_dim: usize,
    pub seed: u64,
    pub generator: NetState,
    pub discriminator: NetState,
    pub generator_opt: OptState,
    pub discriminator_opt: OptState,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetState {
    pub layer_dims: Vec<usize>,
    pub activation: String,
    pub output_squash: String,
    pub params: Vec<f64>,
}

impl NetState {
    fn from_net(net: &MlpNetwork) -> Self {
        Self {
            layer_dims: net.layer_dims().to_vec(),
            activation: match net.activation() {
                Activation::Tanh => "tanh".into(),
                Activation::Relu => "relu".into(),
                Activation::Identity => "identity".into(),
            },
            output_squash: match net.output_squash() {
                OutputSquash::Identity => "identity".into(),
                OutputSquash::Sigmoid => "sigmoid".into(),
                OutputSquash::Tanh => "tanh".into(),
            },
            params: net.flat_params(),
        }
    }

    fn to_net(&self) -> Result<MlpNetwork> {
        let activation = match self.activation.as_str() {
            "tanh" => Activation::Tanh,
            "relu" => Activation::Relu,
            "identity" => Activation::Identity,
            other => return Err(Error::Checkpoint(format!("unknown activation {other:?}"))),
        };
        let squash = match self.output_squash.as_str() {
            "identity" => OutputSquash::Identity,
            "sigmoid" => OutputSquash::Sigmoid,
            "tanh" => OutputSquash::Tanh,
            other => return Err(Error::Checkpoint(format!("unknown output squash {other:?}"))),
        };
        let mut net = MlpNetwork::zeroed(self.layer_dims.clone(), activation, squash)?;
        net.load_flat_params(&self.params)?;
        Ok(net)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptState {
    pub t: u64,
    pub m: Vec<f64>,
    pub v: Vec<f64>,
}

impl OptState {
    fn from_state(state: &AdamState) -> Self {
        let (m, v) = state.flat_moments();
        Self { t: state.t(), m, v }
    }

    fn load_into(&self, state: &mut AdamState) -> Result<()> {
        state.load_flat_moments(self.t, &self.m, &self.v)
    }
}

/// Samples `n` generator outputs with latents from N(0, I).
pub fn generate(model: &GanModel, n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    assert!(n >= 1, "need at least one sample");
    let z = Array2::from_shape_fn((n, model.latent_dim), |_| rng.sample(StandardNormal));
    let out = model.generator.forward(&z);
    out.rows().into_iter().map(|r| r.to_vec()).collect()
}

/// Per-epoch mean losses plus cumulative update counters.
#[derive(Debug, Clone, Default)]
pub struct TrainStats {
    /// Mean maximized discriminator objective per epoch.
    pub d_loss_trace: Vec<f64>,
    /// Mean minimized generator loss per epoch.
    pub g_loss_trace: Vec<f64>,
    pub d_updates: usize,
    pub g_updates: usize,
}

pub struct TrainReport {
    pub model: GanModel,
    pub stats: TrainStats,
}

/// Trains a fresh model on `data` with the label-smoothed objective
/// (targets 0.9/0.1) and pure generator fakes. Deterministic given the seed.
pub fn pretrain(data: &[Vec<f64>], cfg: &TrainConfig) -> Result<TrainReport> {
    pretrain_phases(data, cfg, &[(cfg.epochs, cfg.learning_rate)])
}

/// Pre-training with a learning-rate schedule: each phase runs its epoch
/// count at its rate, continuing the same model and RNG stream.
pub fn pretrain_phases(
    data: &[Vec<f64>],
    cfg: &TrainConfig,
    phases: &[(usize, f64)],
) -> Result<TrainReport> {
    cfg.validate()?;
    let data_dim = check_data(data)?;
    let mut model = GanModel::init(DEFAULT_LATENT_DIM, data_dim, &DEFAULT_HIDDEN, cfg.seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let engine = EngineConfig {
        alpha_plus: PRETRAIN_ALPHA_PLUS,
        alpha_minus: PRETRAIN_ALPHA_MINUS,
        lambda: None,
        omega_pool: &[],
        guide: None,
        tau: 0.5,
        freeze_discriminator: false,
    };
    let mut stats = TrainStats::default();
    for &(epochs, lr) in phases {
        // phases rescale both rates, preserving the configured ratio
        let phase_cfg = TrainConfig {
            learning_rate: lr,
            g_learning_rate: lr * (cfg.g_learning_rate / cfg.learning_rate),
            ..*cfg
        };
        phase_cfg.validate()?;
        train_epochs(&mut model, data, &phase_cfg, &engine, epochs, &mut rng, &mut stats)?;
    }
    Ok(TrainReport { model, stats })
}

fn check_data(data: &[Vec<f64>]) -> Result<usize> {
    let first = data.first().ok_or(Error::TooFewSamples { need: 1, got: 0 })?;
    let dim = first.len();
    if dim == 0 || data.iter().any(|x| x.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: 0,
        });
    }
    Ok(dim)
}

/// What a training epoch mixes into its fake batches and whether the
/// discriminator is wrapped or frozen.
pub(crate) struct EngineConfig<'a> {
    pub alpha_plus: f64,
    pub alpha_minus: f64,
    /// `Some(lambda)`: each fake slot is a generator sample with probability
    /// lambda and a redaction-pool sample otherwise. `None`: pure generator.
    pub lambda: Option<f64>,
    pub omega_pool: &'a [Vec<f64>],
    pub guide: Option<&'a dyn SoftClassifier>,
    /// Guide threshold; only read when `guide` is set.
    pub tau: f64,
    pub freeze_discriminator: bool,
}

/// Per-sample guide branch: (guided value, d(guided)/dD, d(guided)/df).
fn guide_branch(d: f64, f: f64, alpha_minus: f64, tau: f64) -> (f64, f64, f64) {
    if f >= tau {
        (d, 1.0, 0.0)
    } else {
        (alpha_minus + (d - alpha_minus) * f, f, d - alpha_minus)
    }
}

const D_CLAMP: f64 = 1e-12;

pub(crate) fn train_epochs(
    model: &mut GanModel,
    data: &[Vec<f64>],
    cfg: &TrainConfig,
    engine: &EngineConfig<'_>,
    epochs: usize,
    rng: &mut ChaCha8Rng,
    stats: &mut TrainStats,
) -> Result<()> {
    let data_dim = check_data(data)?;
    if data_dim != model.data_dim() {
        return Err(Error::DimensionMismatch {
            expected: model.data_dim(),
            got: data_dim,
        });
    }
    if engine.lambda.is_some() && engine.omega_pool.is_empty() {
        return Err(Error::EmptyRedactionSet);
    }
    let d_hyper = cfg.d_adam();
    let g_hyper = cfg.g_adam();
    let mut order: Vec<usize> = (0..data.len()).collect();

    for _ in 0..epochs {
        order.shuffle(rng);
        let mut d_loss_sum = 0.0;
        let mut g_loss_sum = 0.0;
        let mut n_batches = 0usize;

        for chunk in order.chunks(cfg.batch_size) {
            let real = rows_to_batch(data, chunk);

            if !engine.freeze_discriminator {
                for _ in 0..cfg.k_d {
                    let fake = sample_fake_batch(model, cfg.batch_size, engine, rng);
                    let d_loss = discriminator_step(model, &real, &fake, engine, &d_hyper)?;
                    d_loss_sum += d_loss;
                    stats.d_updates += 1;
                }
            }
            for _ in 0..cfg.k_g {
                let g_loss = generator_step(model, cfg.batch_size, engine, &g_hyper, rng)?;
                g_loss_sum += g_loss;
                stats.g_updates += 1;
            }
            n_batches += 1;
        }

        let d_mean = if engine.freeze_discriminator {
            0.0
        } else {
            d_loss_sum / (n_batches * cfg.k_d) as f64
        };
        let g_mean = g_loss_sum / (n_batches * cfg.k_g) as f64;
        if !d_mean.is_finite() || !g_mean.is_finite() {
            return Err(Error::TrainingDiverged {
                step: stats.d_updates + stats.g_updates,
            });
        }
        stats.d_loss_trace.push(d_mean);
        stats.g_loss_trace.push(g_mean);
    }
    Ok(())
}

fn rows_to_batch(data: &[Vec<f64>], indices: &[usize]) -> Array2<f64> {
    let dim = data[0].len();
    let mut batch = Array2::zeros((indices.len(), dim));
    for (r, &i) in indices.iter().enumerate() {
        for c in 0..dim {
            batch[(r, c)] = data[i][c];
        }
    }
    batch
}

/// Assembles one fake batch: Bernoulli(lambda) decides generator vs pool per
/// slot; all generator slots share one batched forward pass.
fn sample_fake_batch(
    model: &GanModel,
    batch_size: usize,
    engine: &EngineConfig<'_>,
    rng: &mut ChaCha8Rng,
) -> Array2<f64> {
    let dim = model.data_dim();
    let mut from_gen = vec![true; batch_size];
    if let Some(lambda) = engine.lambda {
        for slot in from_gen.iter_mut() {
            *slot = rng.random::<f64>() < lambda;
        }
    }
    let n_gen = from_gen.iter().filter(|&&g| g).count();
    let gen_rows = if n_gen > 0 {
        let z = Array2::from_shape_fn((n_gen, model.latent_dim), |_| rng.sample(StandardNormal));
        model.generator.forward(&z)
    } else {
        Array2::zeros((0, dim))
    };
    let mut batch = Array2::zeros((batch_size, dim));
    let mut g_row = 0;
    for (slot, &gen) in from_gen.iter().enumerate() {
        if gen {
            batch.row_mut(slot).assign(&gen_rows.row(g_row));
            g_row += 1;
        } else {
            let pick = rng.random_range(0..engine.omega_pool.len());
            for c in 0..dim {
                batch[(slot, c)] = engine.omega_pool[pick][c];
            }
        }
    }
    batch
}

/// One ascent step on the smoothed objective for the discriminator; returns
/// the (maximized) objective estimate on this batch.
fn discriminator_step(
    model: &mut GanModel,
    real: &Array2<f64>,
    fake: &Array2<f64>,
    engine: &EngineConfig<'_>,
    hyper: &AdamHyper,
) -> Result<f64> {
    let tau = engine.tau;
    let mut objective = 0.0;

    let mut run = |batch: &Array2<f64>, alpha: f64| -> Result<Gradient> {
        let (d_out, trace) = model.discriminator.forward_trace(batch);
        let weight = 1.0 / batch.nrows() as f64;
        let mut dlogits = Array2::zeros(d_out.dim());
        for r in 0..batch.nrows() {
            let s = trace.logits()[(r, 0)];
            let d = d_out[(r, 0)];
            match engine.guide {
                None => {
                    objective += weight * (alpha * (-softplus(-s)) + (1.0 - alpha) * (-softplus(s)));
                    dlogits[(r, 0)] = weight * (d - alpha);
                }
                Some(classifier) => {
                    let f = classifier.score(batch.row(r).as_slice().unwrap());
                    let (dg, ddg_dd, _) = guide_branch(d, f, engine.alpha_minus, tau);
                    let dg = dg.clamp(D_CLAMP, 1.0 - D_CLAMP);
                    objective +=
                        weight * (alpha * dg.ln() + (1.0 - alpha) * (-dg).ln_1p());
                    let dl_ddg = alpha / dg - (1.0 - alpha) / (1.0 - dg);
                    dlogits[(r, 0)] = -weight * dl_ddg * ddg_dd * d * (1.0 - d);
                }
            }
        }
        Ok(Gradient(model.discriminator.backward_from_logits(&trace, &dlogits)))
    };

    let grad_real = run(real, engine.alpha_plus)?;
    let grad_fake = run(fake, engine.alpha_minus)?;
    let combined = grad_real.add(grad_fake);
    model
        .disc_opt
        .step(&mut model.discriminator, &combined.0, hyper);
    Ok(objective)
}

/// One descent step for the generator on the non-saturating loss
/// -[a+ log D + (1-a+) log(1-D)] over a fresh latent batch; returns the
/// minimized loss estimate.
fn generator_step(
    model: &mut GanModel,
    batch_size: usize,
    engine: &EngineConfig<'_>,
    hyper: &AdamHyper,
    rng: &mut ChaCha8Rng,
) -> Result<f64> {
    let tau = engine.tau;
    // the generator term of the fake expectation carries weight lambda
    let scale = engine.lambda.unwrap_or(1.0);
    let z = Array2::from_shape_fn((batch_size, model.latent_dim), |_| rng.sample(StandardNormal));
    let (x_g, g_trace) = model.generator.forward_trace(&z);
    let (d_out, d_trace) = model.discriminator.forward_trace(&x_g);
    let weight = scale / batch_size as f64;
    let alpha = engine.alpha_plus;

    let mut loss = 0.0;
    let mut dlogits = Array2::zeros(d_out.dim());
    let mut extra_dx: Option<Array2<f64>> = None;
    for r in 0..batch_size {
        let s = d_trace.logits()[(r, 0)];
        let d = d_out[(r, 0)];
        match engine.guide {
            None => {
                loss -= weight * (alpha * (-softplus(-s)) + (1.0 - alpha) * (-softplus(s)));
                dlogits[(r, 0)] = weight * (d - alpha);
            }
            Some(classifier) => {
                let x_row = x_g.row(r);
                let x_slice = x_row.as_slice().unwrap();
                let f = classifier.score(x_slice);
                let (dg, ddg_dd, ddg_df) = guide_branch(d, f, engine.alpha_minus, tau);
                let dg = dg.clamp(D_CLAMP, 1.0 - D_CLAMP);
                loss -= weight * (alpha * dg.ln() + (1.0 - alpha) * (-dg).ln_1p());
                let dl_ddg = -weight * (alpha / dg - (1.0 - alpha) / (1.0 - dg));
                dlogits[(r, 0)] = dl_ddg * ddg_dd * d * (1.0 - d);
                if ddg_df != 0.0 {
                    let fgrad = classifier.score_grad(x_slice);
                    let dx = extra_dx
                        .get_or_insert_with(|| Array2::zeros((batch_size, x_g.ncols())));
                    for c in 0..x_g.ncols() {
                        dx[(r, c)] += dl_ddg * ddg_df * fgrad[c];
                    }
                }
            }
        }
    }

    let d_grads = model.discriminator.backward_from_logits(&d_trace, &dlogits);
    let mut dx = d_grads.input;
    if let Some(extra) = extra_dx {
        dx += &extra;
    }
    // generator output is its logits (identity squash)
    let g_grads = model.generator.backward_from_logits(&g_trace, &dx);
    model.gen_opt.step(&mut model.generator, &g_grads, hyper);
    Ok(loss)
}

struct Gradient(crate::nn::Gradients);

impl Gradient {
    fn add(mut self, other: Gradient) -> Gradient {
        for (a, b) in self.0.weights.iter_mut().zip(other.0.weights) {
            *a += &b;
        }
        for (a, b) in self.0.biases.iter_mut().zip(other.0.biases) {
            *a += &b;
        }
        self
    }
}

/// Means of the default training mixture: eight equally weighted Gaussians.
pub const MODE_MEANS: [f64; 8] = [-3.5, -2.5, -1.5, -0.5, 0.5, 1.5, 2.5, 3.5];
pub const MODE_SIGMA: f64 = 0.15;
/// Half-width of the interval that counts as one mode's territory.
pub const MODE_RADIUS: f64 = 0.5;

/// Draws from the eight-mode mixture.
pub fn eight_mode_mixture(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| {
            let mode = rng.random_range(0..MODE_MEANS.len());
            let x: f64 = MODE_MEANS[mode] + MODE_SIGMA * rng.sample::<f64, _>(StandardNormal);
            vec![x]
        })
        .collect()
}

/// The open interval around a mode's mean.
pub fn mode_interval(mode: usize) -> (f64, f64) {
    let mean = MODE_MEANS[mode];
    (mean - MODE_RADIUS, mean + MODE_RADIUS)
}

/// Membership test for a mode's interval on 1D points.
pub fn in_mode_region(mode: usize, x: &[f64]) -> bool {
    let (lo, hi) = mode_interval(mode);
    x[0] > lo && x[0] < hi
}

/// Validity-based region spec for one mode (valid = outside the interval).
pub fn mode_region_spec(mode: usize) -> crate::distributions::RedactionSpec<Vec<f64>> {
    crate::distributions::RedactionSpec::validity(move |x: &Vec<f64>| !in_mode_region(mode, x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_cfg(seed: u64) -> TrainConfig {
        TrainConfig {
            learning_rate: 2e-4,
            g_learning_rate: 2e-4,
            adam_beta1: 0.5,
            adam_beta2: 0.999,
            batch_size: 16,
            k_d: 1,
            k_g: 2,
            epochs: 2,
            seed,
        }
    }

    #[test]
    fn config_validation() {
        let mut cfg = tiny_cfg(0);
        assert!(cfg.validate().is_ok());
        cfg.adam_beta1 = 1.0;
        assert!(cfg.validate().is_err());
        cfg.adam_beta1 = 0.5;
        cfg.batch_size = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn generate_shapes_and_zero_weight_generator() {
        let model = GanModel::init(4, 2, &[8], 9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let samples = generate(&model, 7, &mut rng);
        assert_eq!(samples.len(), 7);
        assert!(samples.iter().all(|s| s.len() == 2));

        // zero weights and identity output: every sample equals the bias
        let mut model = GanModel::init(4, 2, &[8], 9).unwrap();
        let zeros = vec![0.0; model.generator.flat_params().len()];
        model.generator.load_flat_params(&zeros).unwrap();
        let samples = generate(&model, 5, &mut rng);
        for s in &samples {
            assert_eq!(s, &vec![0.0, 0.0]);
        }
    }

    #[test]
    fn pretrain_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        let data = eight_mode_mixture(200, &mut rng);
        let cfg = tiny_cfg(7);
        let a = pretrain(&data, &cfg).unwrap();
        let b = pretrain(&data, &cfg).unwrap();
        assert_eq!(
            a.model.generator.flat_params(),
            b.model.generator.flat_params()
        );
        assert_eq!(
            a.model.discriminator.flat_params(),
            b.model.discriminator.flat_params()
        );
        assert_eq!(a.stats.d_loss_trace, b.stats.d_loss_trace);
        assert_eq!(a.stats.g_loss_trace, b.stats.g_loss_trace);
    }

    #[test]
    fn update_counters_respect_the_schedule() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let data = eight_mode_mixture(64, &mut rng);
        let mut cfg = tiny_cfg(3);
        cfg.batch_size = 16;
        cfg.k_d = 1;
        cfg.k_g = 5;
        cfg.epochs = 2;
        let report = pretrain(&data, &cfg).unwrap();
        let batches_per_epoch = 64usize.div_ceil(16);
        assert_eq!(report.stats.d_updates, batches_per_epoch * 2);
        assert_eq!(report.stats.g_updates, batches_per_epoch * 2 * 5);
    }

    #[test]
    fn checkpoint_round_trip_is_bit_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let data = eight_mode_mixture(64, &mut rng);
        let report = pretrain(&data, &tiny_cfg(21)).unwrap();
        let dir = std::env::temp_dir().join("redactlab-checkpoint-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("model.json");
        report.model.save(&path).unwrap();
        let loaded = GanModel::load(&path).unwrap();
        assert_eq!(
            loaded.generator.flat_params(),
            report.model.generator.flat_params()
        );
        assert_eq!(
            loaded.discriminator.flat_params(),
            report.model.discriminator.flat_params()
        );
        assert_eq!(
            loaded.gen_opt.flat_moments(),
            report.model.gen_opt.flat_moments()
        );
        assert_eq!(loaded.seed, report.model.seed);
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn mode_regions_partition_sensibly() {
        assert!(in_mode_region(0, &[-3.5]));
        assert!(!in_mode_region(0, &[-2.5]));
        assert!(in_mode_region(3, &[-0.4]));
        let spec = mode_region_spec(0);
        assert!(spec.contains(&vec![-3.6]));
        assert!(!spec.contains(&vec![0.0]));
    }
}
