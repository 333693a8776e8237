//! Small dense networks with hand-written backpropagation and Adam.
//!
//! Everything the adversarial training loops need: batched forward passes
//! that keep the caches backprop wants, gradients with respect to parameters
//! and inputs, and a finite-difference checker that the rest of the crate
//! (and the CLI selfcheck) leans on to trust the hand-rolled gradients.

use ndarray::linalg::general_mat_mul;
use ndarray::{Array1, Array2, ArrayView2, Axis, Zip};
use rand::Rng;

use crate::error::{Error, Result};

/// a * b into a fresh standard-layout array; `dot` on transposed views can
/// hand back column-major buffers, which the flat accessors below reject.
fn matmul(a: ArrayView2<f64>, b: ArrayView2<f64>) -> Array2<f64> {
    let mut out = Array2::zeros((a.nrows(), b.ncols()));
    general_mat_mul(1.0, &a, &b, 0.0, &mut out);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Tanh,
    Relu,
    Identity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputSquash {
    Identity,
    Sigmoid,
    Tanh,
}

/// Numerically stable sigmoid.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// softplus(x) = ln(1 + e^x) without overflow; log D and log(1-D) of a
/// sigmoid are -softplus(-s) and -softplus(s) of its logit.
pub fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// Fully connected network. `layer_dims` runs input -> hidden... -> output;
/// hidden layers apply `activation`, the last layer produces logits that
/// `output_squash` maps to the network output.
#[derive(Debug, Clone)]
pub struct MlpNetwork {
    layer_dims: Vec<usize>,
    weights: Vec<Array2<f64>>,
    biases: Vec<Array1<f64>>,
    activation: Activation,
    output_squash: OutputSquash,
}

/// Caches from a forward pass: the input and every post-activation batch,
/// plus the output-layer logits.
pub struct ForwardTrace {
    /// activations[0] is the input; activations[l+1] the output of hidden
    /// layer l after the nonlinearity.
    activations: Vec<Array2<f64>>,
    logits: Array2<f64>,
}

impl ForwardTrace {
    pub fn logits(&self) -> &Array2<f64> {
        &self.logits
    }
}

/// Parameter and input gradients from one backward pass.
pub struct Gradients {
    pub weights: Vec<Array2<f64>>,
    pub biases: Vec<Array1<f64>>,
    pub input: Array2<f64>,
}

impl MlpNetwork {
    /// Xavier-uniform initialization, biases zero.
    pub fn new(
        layer_dims: Vec<usize>,
        activation: Activation,
        output_squash: OutputSquash,
        rng: &mut impl Rng,
    ) -> Result<Self> {
        if layer_dims.len() < 2 || layer_dims.iter().any(|&d| d == 0) {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: layer_dims.len(),
            });
        }
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for pair in layer_dims.windows(2) {
            let (fan_in, fan_out) = (pair[0], pair[1]);
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let w = Array2::from_shape_fn((fan_in, fan_out), |_| rng.random_range(-bound..bound));
            weights.push(w);
            biases.push(Array1::zeros(fan_out));
        }
        Ok(Self {
            layer_dims,
            weights,
            biases,
            activation,
            output_squash,
        })
    }

    /// All parameters zero; useful as a shell for loading flattened params.
    pub fn zeroed(
        layer_dims: Vec<usize>,
        activation: Activation,
        output_squash: OutputSquash,
    ) -> Result<Self> {
        if layer_dims.len() < 2 || layer_dims.iter().any(|&d| d == 0) {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: layer_dims.len(),
            });
        }
        let weights = layer_dims
            .windows(2)
            .map(|p| Array2::zeros((p[0], p[1])))
            .collect();
        let biases = layer_dims[1..].iter().map(|&d| Array1::zeros(d)).collect();
        Ok(Self {
            layer_dims,
            weights,
            biases,
            activation,
            output_squash,
        })
    }

    pub fn layer_dims(&self) -> &[usize] {
        &self.layer_dims
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn input_dim(&self) -> usize {
        self.layer_dims[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.layer_dims.last().unwrap()
    }

    pub fn output_squash(&self) -> OutputSquash {
        self.output_squash
    }

    pub fn weights(&self) -> &[Array2<f64>] {
        &self.weights
    }

    pub fn biases(&self) -> &[Array1<f64>] {
        &self.biases
    }

    pub fn weights_mut(&mut self) -> &mut [Array2<f64>] {
        &mut self.weights
    }

    pub fn biases_mut(&mut self) -> &mut [Array1<f64>] {
        &mut self.biases
    }

    fn hidden(&self, z: Array2<f64>) -> Array2<f64> {
        match self.activation {
            Activation::Tanh => z.mapv(f64::tanh),
            Activation::Relu => z.mapv(|x| x.max(0.0)),
            Activation::Identity => z,
        }
    }

    fn squash(&self, logits: &Array2<f64>) -> Array2<f64> {
        match self.output_squash {
            OutputSquash::Identity => logits.clone(),
            OutputSquash::Sigmoid => logits.mapv(sigmoid),
            OutputSquash::Tanh => logits.mapv(f64::tanh),
        }
    }

    /// Forward pass with the caches needed for a backward pass. Rows of `x`
    /// are samples. Returns (squashed output, trace).
    pub fn forward_trace(&self, x: &Array2<f64>) -> (Array2<f64>, ForwardTrace) {
        assert_eq!(x.ncols(), self.input_dim(), "input dimension mismatch");
        let n_layers = self.weights.len();
        let mut activations = Vec::with_capacity(n_layers);
        activations.push(x.clone());
        let mut a = x.clone();
        for l in 0..n_layers - 1 {
            let z = matmul(a.view(), self.weights[l].view()) + &self.biases[l];
            a = self.hidden(z);
            activations.push(a.clone());
        }
        let logits =
            matmul(a.view(), self.weights[n_layers - 1].view()) + &self.biases[n_layers - 1];
        let out = self.squash(&logits);
        (out, ForwardTrace {
            activations,
            logits,
        })
    }

    pub fn forward(&self, x: &Array2<f64>) -> Array2<f64> {
        self.forward_trace(x).0
    }

    /// Backpropagation from a gradient with respect to the output-layer
    /// logits (pre-squash). Callers differentiate their loss down to the
    /// logits — that is where the adversarial losses are stable — and get
    /// parameter gradients plus the gradient with respect to the input batch.
    pub fn backward_from_logits(&self, trace: &ForwardTrace, dlogits: &Array2<f64>) -> Gradients {
        let n_layers = self.weights.len();
        let mut grad_w = vec![Array2::zeros((0, 0)); n_layers];
        let mut grad_b = vec![Array1::zeros(0); n_layers];

        let mut delta = dlogits.clone();
        for l in (0..n_layers).rev() {
            grad_w[l] = matmul(trace.activations[l].t(), delta.view());
            grad_b[l] = delta.sum_axis(Axis(0));
            let upstream = matmul(delta.view(), self.weights[l].t());
            if l > 0 {
                delta = match self.activation {
                    Activation::Tanh => {
                        // tanh' from the cached post-activation values
                        upstream * trace.activations[l].mapv(|a| 1.0 - a * a)
                    }
                    Activation::Relu => {
                        upstream * trace.activations[l].mapv(|a| if a > 0.0 { 1.0 } else { 0.0 })
                    }
                    Activation::Identity => upstream,
                };
            } else {
                delta = upstream;
            }
        }
        Gradients {
            weights: grad_w,
            biases: grad_b,
            input: delta,
        }
    }

    /// Flattened view of all parameters, layer by layer, weights then bias.
    pub fn flat_params(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for (w, b) in self.weights.iter().zip(&self.biases) {
            out.extend(w.iter());
            out.extend(b.iter());
        }
        out
    }

    /// Inverse of [`flat_params`]; the vector length must match exactly.
    pub fn load_flat_params(&mut self, params: &[f64]) -> Result<()> {
        let expected: usize = self
            .weights
            .iter()
            .zip(&self.biases)
            .map(|(w, b)| w.len() + b.len())
            .sum();
        if params.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: params.len(),
            });
        }
        let mut offset = 0;
        for (w, b) in self.weights.iter_mut().zip(&mut self.biases) {
            for v in w.iter_mut() {
                *v = params[offset];
                offset += 1;
            }
            for v in b.iter_mut() {
                *v = params[offset];
                offset += 1;
            }
        }
        Ok(())
    }
}

/// Adam first/second moments mirroring a network's parameters.
#[derive(Debug, Clone)]
pub struct AdamState {
    t: u64,
    m_w: Vec<Array2<f64>>,
    v_w: Vec<Array2<f64>>,
    m_b: Vec<Array1<f64>>,
    v_b: Vec<Array1<f64>>,
}

/// Adam step sizes; epsilon is fixed at 1e-8.
#[derive(Debug, Clone, Copy)]
pub struct AdamHyper {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
}

const ADAM_EPS: f64 = 1e-8;

impl AdamState {
    pub fn new(net: &MlpNetwork) -> Self {
        Self {
            t: 0,
            m_w: net.weights.iter().map(|w| Array2::zeros(w.dim())).collect(),
            v_w: net.weights.iter().map(|w| Array2::zeros(w.dim())).collect(),
            m_b: net.biases.iter().map(|b| Array1::zeros(b.len())).collect(),
            v_b: net.biases.iter().map(|b| Array1::zeros(b.len())).collect(),
        }
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    /// One bias-corrected Adam update in the descent direction of `grads`.
    pub fn step(&mut self, net: &mut MlpNetwork, grads: &Gradients, hyper: &AdamHyper) {
        self.t += 1;
        let t = self.t as i32;
        let bc1 = 1.0 - hyper.beta1.powi(t);
        let bc2 = 1.0 - hyper.beta2.powi(t);
        let update = |p: &mut f64, g: &f64, m: &mut f64, v: &mut f64| {
            *m = hyper.beta1 * *m + (1.0 - hyper.beta1) * g;
            *v = hyper.beta2 * *v + (1.0 - hyper.beta2) * g * g;
            let m_hat = *m / bc1;
            let v_hat = *v / bc2;
            *p -= hyper.learning_rate * m_hat / (v_hat.sqrt() + ADAM_EPS);
        };
        for l in 0..net.weights.len() {
            Zip::from(&mut net.weights[l])
                .and(&grads.weights[l])
                .and(&mut self.m_w[l])
                .and(&mut self.v_w[l])
                .for_each(update);
            Zip::from(&mut net.biases[l])
                .and(&grads.biases[l])
                .and(&mut self.m_b[l])
                .and(&mut self.v_b[l])
                .for_each(update);
        }
    }

    pub fn flat_moments(&self) -> (Vec<f64>, Vec<f64>) {
        let mut m = Vec::new();
        let mut v = Vec::new();
        for l in 0..self.m_w.len() {
            m.extend(self.m_w[l].iter());
            m.extend(self.m_b[l].iter());
            v.extend(self.v_w[l].iter());
            v.extend(self.v_b[l].iter());
        }
        (m, v)
    }

    pub fn load_flat_moments(&mut self, t: u64, m: &[f64], v: &[f64]) -> Result<()> {
        let expected: usize = self
            .m_w
            .iter()
            .zip(&self.m_b)
            .map(|(w, b)| w.len() + b.len())
            .sum();
        if m.len() != expected || v.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: m.len(),
            });
        }
        self.t = t;
        let mut offset = 0;
        for l in 0..self.m_w.len() {
            for x in self.m_w[l].iter_mut() {
                *x = m[offset];
                offset += 1;
            }
            for x in self.m_b[l].iter_mut() {
                *x = m[offset];
                offset += 1;
            }
        }
        let mut offset = 0;
        for l in 0..self.v_w.len() {
            for x in self.v_w[l].iter_mut() {
                *x = v[offset];
                offset += 1;
            }
            for x in self.v_b[l].iter_mut() {
                *x = v[offset];
                offset += 1;
            }
        }
        Ok(())
    }
}

fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / (a.abs() + b.abs()).max(1e-8)
}

/// Compares analytic parameter gradients against central finite differences
/// (h = 1e-5) for the scalar loss <upstream, logits> and returns the worst
/// relative error over all weights and biases.
pub fn backprop_check(net: &MlpNetwork, inputs: &Array2<f64>, upstream: &Array2<f64>) -> f64 {
    let h = 1e-5;
    let loss = |n: &MlpNetwork| -> f64 {
        let (_, trace) = n.forward_trace(inputs);
        (trace.logits() * upstream).sum()
    };
    let (_, trace) = net.forward_trace(inputs);
    let analytic = net.backward_from_logits(&trace, upstream);

    let mut worst = 0.0f64;
    let mut probe = net.clone();
    for l in 0..net.weights.len() {
        for i in 0..net.weights[l].nrows() {
            for j in 0..net.weights[l].ncols() {
                let orig = net.weights[l][(i, j)];
                probe.weights[l][(i, j)] = orig + h;
                let up = loss(&probe);
                probe.weights[l][(i, j)] = orig - h;
                let down = loss(&probe);
                probe.weights[l][(i, j)] = orig;
                let numeric = (up - down) / (2.0 * h);
                worst = worst.max(relative_error(numeric, analytic.weights[l][(i, j)]));
            }
        }
        for idx in 0..net.biases[l].len() {
            let orig = net.biases[l][idx];
            probe.biases[l][idx] = orig + h;
            let up = loss(&probe);
            probe.biases[l][idx] = orig - h;
            let down = loss(&probe);
            probe.biases[l][idx] = orig;
            let numeric = (up - down) / (2.0 * h);
            worst = worst.max(relative_error(numeric, analytic.biases[l][idx]));
        }
    }
    worst
}

/// Same finite-difference scheme for the gradient with respect to the input
/// batch; used to validate the chain into the generator.
pub fn input_gradient_check(
    net: &MlpNetwork,
    inputs: &Array2<f64>,
    upstream: &Array2<f64>,
) -> f64 {
    let h = 1e-5;
    let loss = |x: &Array2<f64>| -> f64 {
        let (_, trace) = net.forward_trace(x);
        (trace.logits() * upstream).sum()
    };
    let (_, trace) = net.forward_trace(inputs);
    let analytic = net.backward_from_logits(&trace, upstream);
    let mut worst = 0.0f64;
    let mut probe = inputs.clone();
    for r in 0..inputs.nrows() {
        for c in 0..inputs.ncols() {
            let orig = inputs[(r, c)];
            probe[(r, c)] = orig + h;
            let up = loss(&probe);
            probe[(r, c)] = orig - h;
            let down = loss(&probe);
            probe[(r, c)] = orig;
            worst = worst.max(relative_error((up - down) / (2.0 * h), analytic.input[(r, c)]));
        }
    }
    worst
}
