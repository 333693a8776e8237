//! Metrics for the neural tier: empirical invalidity, a histogram
//! total-variation quality score against the valid part of the training set,
//! and per-sample redaction scores with their regression on the pre-trained
//! discriminator output.
//!
//! The quality score deliberately replaces inception-style metrics: it is a
//! desk-scale stand-in, so absolute values are not comparable to any
//! image-model numbers — only trends across runs are.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::distributions::RedactionSpec;
use crate::error::{Error, Result};
use crate::gan::{generate, GanModel};

/// Default number of generated samples behind the metrics; CI-scale runs
/// override it downward.
pub const DEFAULT_METRIC_SAMPLES: usize = 50_000;
/// Default histogram resolution of the quality score.
pub const DEFAULT_QUALITY_BINS: usize = 64;

/// One evaluation of a model: region mass and quality at a sample budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsReport {
    pub invalidity: f64,
    pub quality_tv: f64,
    pub n_samples: usize,
    pub seed: u64,
}

/// Fraction of `n` generated samples that land in the region. Deterministic
/// given the seed.
pub fn empirical_invalidity(
    model: &GanModel,
    omega: &RedactionSpec<Vec<f64>>,
    n: usize,
    seed: u64,
) -> f64 {
    assert!(n >= 1, "need at least one sample");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = generate(model, n, &mut rng);
    let hits = samples.iter().filter(|x| omega.contains(x)).count();
    hits as f64 / n as f64
}

/// Shared binning for the histogram metrics: `bins` uniform cells over
/// [lo, hi] plus one underflow and one overflow cell.
fn histogram(points: &[f64], bins: usize, lo: f64, hi: f64) -> Vec<f64> {
    let mut counts = vec![0.0; bins + 2];
    let width = (hi - lo) / bins as f64;
    for &x in points {
        let cell = if x < lo {
            0
        } else if x >= hi {
            bins + 1
        } else {
            1 + ((x - lo) / width) as usize
        };
        counts[cell.min(bins + 1)] += 1.0;
    }
    let total: f64 = points.len() as f64;
    for c in &mut counts {
        *c /= total;
    }
    counts
}

/// Total-variation distance between the binned histograms of two 1D sample
/// sets on a shared binning. Symmetric and in [0, 1].
pub fn histogram_tv(a: &[f64], b: &[f64], bins: usize, lo: f64, hi: f64) -> f64 {
    let ha = histogram(a, bins, lo, hi);
    let hb = histogram(b, bins, lo, hi);
    ha.iter().zip(&hb).map(|(x, y)| (x - y).abs()).sum::<f64>() / 2.0
}

/// Quality of generated samples against the valid reference samples
/// (reference minus the region), as histogram total variation over `bins`
/// uniform cells spanning the valid reference range extended by 5% on each
/// side. 1D data only.
pub fn quality_tv(
    model: &GanModel,
    reference: &[Vec<f64>],
    omega: &RedactionSpec<Vec<f64>>,
    bins: usize,
    n: usize,
    seed: u64,
) -> Result<f64> {
    if model.data_dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: model.data_dim(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let generated: Vec<f64> = generate(model, n, &mut rng).into_iter().map(|x| x[0]).collect();
    let valid_ref: Vec<f64> = reference
        .iter()
        .filter(|x| !omega.contains(x))
        .map(|x| x[0])
        .collect();
    quality_tv_between(&generated, &valid_ref, bins)
}

/// The same score on already collected 1D samples.
pub fn quality_tv_between(generated: &[f64], valid_reference: &[f64], bins: usize) -> Result<f64> {
    if valid_reference.is_empty() {
        return Err(Error::EmptyRealSet);
    }
    if bins == 0 {
        return Err(Error::InvalidParameter {
            name: "bins",
            value: 0.0,
            constraint: ">= 1",
        });
    }
    let lo = valid_reference.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = valid_reference
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    if lo == hi {
        return Err(Error::DegenerateRange { value: lo });
    }
    let pad = 0.05 * (hi - lo);
    Ok(histogram_tv(
        generated,
        valid_reference,
        bins,
        lo - pad,
        hi + pad,
    ))
}

/// One row per scored sample: the discriminator outputs before (d0) and
/// after (d_prime) redaction, their difference rs = d0 - d_prime, and the
/// relative score rs/d0 where defined.
#[derive(Debug, Clone)]
pub struct RedactionScoreRow {
    pub id: usize,
    pub d0: f64,
    pub d_prime: f64,
    pub rs: f64,
    /// None when d0 = 0.
    pub rs_rel: Option<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct RedactionScoreTable {
    pub rows: Vec<RedactionScoreRow>,
}

impl RedactionScoreTable {
    /// Builds the table from already evaluated discriminator outputs.
    pub fn from_outputs(d0: &[f64], d_prime: &[f64]) -> Result<Self> {
        if d0.len() != d_prime.len() {
            return Err(Error::DimensionMismatch {
                expected: d0.len(),
                got: d_prime.len(),
            });
        }
        let rows = d0
            .iter()
            .zip(d_prime)
            .enumerate()
            .map(|(id, (&a, &b))| RedactionScoreRow {
                id,
                d0: a,
                d_prime: b,
                rs: a - b,
                rs_rel: if a == 0.0 { None } else { Some((a - b) / a) },
            })
            .collect();
        Ok(Self { rows })
    }
}

/// Scores `samples` with the two discriminators and tabulates rs = D0 - D'.
pub fn redaction_scores(
    d0_model: &GanModel,
    d_prime_model: &GanModel,
    samples: &[Vec<f64>],
) -> Result<RedactionScoreTable> {
    for x in samples {
        if x.len() != d0_model.data_dim() || x.len() != d_prime_model.data_dim() {
            return Err(Error::DimensionMismatch {
                expected: d0_model.data_dim(),
                got: x.len(),
            });
        }
    }
    let d0: Vec<f64> = samples.iter().map(|x| d0_model.discriminate(x)).collect();
    let dp: Vec<f64> = samples
        .iter()
        .map(|x| d_prime_model.discriminate(x))
        .collect();
    RedactionScoreTable::from_outputs(&d0, &dp)
}

/// Ordinary least squares of rs on d0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regression {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Fits rs = slope * d0 + intercept. Needs at least three rows and variance
/// in d0; a constant rs yields slope 0 with r_squared 0.
pub fn difficulty_regression(table: &RedactionScoreTable) -> Result<Regression> {
    let n = table.rows.len();
    if n < 3 {
        return Err(Error::TooFewSamples { need: 3, got: n });
    }
    let mean_x: f64 = table.rows.iter().map(|r| r.d0).sum::<f64>() / n as f64;
    let mean_y: f64 = table.rows.iter().map(|r| r.rs).sum::<f64>() / n as f64;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for r in &table.rows {
        let dx = r.d0 - mean_x;
        let dy = r.rs - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx <= 1e-24 {
        return Err(Error::DegenerateVariance);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    // a response variance at rounding-noise level is no variance at all
    let r_squared = if syy <= 1e-24 {
        0.0
    } else {
        let ss_res = syy - slope * sxy;
        1.0 - ss_res / syy
    };
    Ok(Regression {
        slope,
        intercept,
        r_squared,
    })
}
