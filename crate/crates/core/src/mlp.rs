//! One-hidden-layer MLP: discriminant function, loss, and exact gradient.
//!
//! The network is y = sigmoid(b + B * sigmoid(a + A * x)) with element-wise
//! logistic sigmoid at both layers. Default loss is sum of squared errors
//! against a one-hot target; cross-entropy is available behind
//! [`LossKind::CrossEntropy`].

use crate::error::{Error, Result};
use crate::numeric::{dot, DenseMatrix};

#[inline]
pub fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Parameters (a, A, b, B) of the one-hidden-layer MLP.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpParams {
    /// a: hidden bias, length H.
    hidden_bias: Vec<f64>,
    /// A: input-to-hidden weights, H x D.
    hidden_weights: DenseMatrix,
    /// b: output bias, length K.
    output_bias: Vec<f64>,
    /// B: hidden-to-output weights, K x H.
    output_weights: DenseMatrix,
}

impl MlpParams {
    pub fn new(
        hidden_bias: Vec<f64>,
        hidden_weights: DenseMatrix,
        output_bias: Vec<f64>,
        output_weights: DenseMatrix,
    ) -> Result<Self> {
        let h = hidden_weights.rows();
        let k = output_weights.rows();
        if hidden_bias.len() != h {
            return Err(Error::ShapeMismatch(format!(
                "hidden bias has {} entries, weights have {h} rows",
                hidden_bias.len()
            )));
        }
        if output_weights.cols() != h {
            return Err(Error::ShapeMismatch(format!(
                "output weights have {} columns, hidden layer has {h} units",
                output_weights.cols()
            )));
        }
        if output_bias.len() != k {
            return Err(Error::ShapeMismatch(format!(
                "output bias has {} entries, weights have {k} rows",
                output_bias.len()
            )));
        }
        for (name, v) in [("a", &hidden_bias), ("b", &output_bias)] {
            if let Some(pos) = v.iter().position(|x| !x.is_finite()) {
                return Err(Error::NonFinite(format!("{name}[{pos}] = {}", v[pos])));
            }
        }
        Ok(Self {
            hidden_bias,
            hidden_weights,
            output_bias,
            output_weights,
        })
    }

    pub fn zeros(input_dims: usize, hidden_units: usize, classes: usize) -> Self {
        Self {
            hidden_bias: vec![0.0; hidden_units],
            hidden_weights: DenseMatrix::zeros(hidden_units, input_dims),
            output_bias: vec![0.0; classes],
            output_weights: DenseMatrix::zeros(classes, hidden_units),
        }
    }

    pub fn input_dims(&self) -> usize {
        self.hidden_weights.cols()
    }

    pub fn hidden_units(&self) -> usize {
        self.hidden_weights.rows()
    }

    pub fn classes(&self) -> usize {
        self.output_weights.rows()
    }

    pub fn hidden_bias(&self) -> &[f64] {
        &self.hidden_bias
    }

    pub fn hidden_weights(&self) -> &DenseMatrix {
        &self.hidden_weights
    }

    pub fn output_bias(&self) -> &[f64] {
        &self.output_bias
    }

    pub fn output_weights(&self) -> &DenseMatrix {
        &self.output_weights
    }

    /// Flatten in (a, A, b, B) order, matrices row-major.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut flat = Vec::with_capacity(self.flat_len());
        flat.extend_from_slice(&self.hidden_bias);
        flat.extend_from_slice(self.hidden_weights.as_slice());
        flat.extend_from_slice(&self.output_bias);
        flat.extend_from_slice(self.output_weights.as_slice());
        flat
    }

    pub fn flat_len(&self) -> usize {
        let (d, h, k) = (self.input_dims(), self.hidden_units(), self.classes());
        h + h * d + k + k * h
    }

    /// Inverse of [`MlpParams::to_flat`].
    pub fn from_flat(
        input_dims: usize,
        hidden_units: usize,
        classes: usize,
        flat: &[f64],
    ) -> Result<Self> {
        let (d, h, k) = (input_dims, hidden_units, classes);
        let expected = h + h * d + k + k * h;
        if flat.len() != expected {
            return Err(Error::ShapeMismatch(format!(
                "flat parameter vector has {} entries, expected {expected}",
                flat.len()
            )));
        }
        let (a, rest) = flat.split_at(h);
        let (aw, rest) = rest.split_at(h * d);
        let (b, bw) = rest.split_at(k);
        Self::new(
            a.to_vec(),
            DenseMatrix::from_vec(h, d, aw.to_vec())?,
            b.to_vec(),
            DenseMatrix::from_vec(k, h, bw.to_vec())?,
        )
    }

    /// p <- p - step * g. Shapes must match; trainer-internal hot path.
    pub fn gradient_step(&mut self, grads: &Gradients, step: f64) {
        for (p, g) in self.hidden_bias.iter_mut().zip(&grads.hidden_bias) {
            *p -= step * g;
        }
        for r in 0..self.hidden_weights.rows() {
            for (p, g) in self
                .hidden_weights
                .row_mut(r)
                .iter_mut()
                .zip(grads.hidden_weights.row(r))
            {
                *p -= step * g;
            }
        }
        for (p, g) in self.output_bias.iter_mut().zip(&grads.output_bias) {
            *p -= step * g;
        }
        for r in 0..self.output_weights.rows() {
            for (p, g) in self
                .output_weights
                .row_mut(r)
                .iter_mut()
                .zip(grads.output_weights.row(r))
            {
                *p -= step * g;
            }
        }
    }

    pub fn all_finite(&self) -> bool {
        self.hidden_bias.iter().all(|v| v.is_finite())
            && self.hidden_weights.as_slice().iter().all(|v| v.is_finite())
            && self.output_bias.iter().all(|v| v.is_finite())
            && self.output_weights.as_slice().iter().all(|v| v.is_finite())
    }

    /// Relabel hidden units by `perm`: unit j of the result is unit
    /// perm[j] of the input. The classifier this computes is unchanged.
    pub fn permute_hidden_units(&self, perm: &[usize]) -> Result<Self> {
        let h = self.hidden_units();
        if perm.len() != h {
            return Err(Error::ShapeMismatch(format!(
                "permutation has {} entries for {h} hidden units",
                perm.len()
            )));
        }
        let mut seen = vec![false; h];
        for &p in perm {
            if p >= h || seen[p] {
                return Err(Error::InvalidArgument("not a permutation".into()));
            }
            seen[p] = true;
        }
        let hidden_bias = perm.iter().map(|&p| self.hidden_bias[p]).collect();
        let hidden_weights = DenseMatrix::from_fn(h, self.input_dims(), |r, c| {
            self.hidden_weights.get(perm[r], c)
        });
        let output_weights = DenseMatrix::from_fn(self.classes(), h, |r, c| {
            self.output_weights.get(r, perm[c])
        });
        Self::new(
            hidden_bias,
            hidden_weights,
            self.output_bias.clone(),
            output_weights,
        )
    }
}

/// Objective against the one-hot target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LossKind {
    /// Sum of squared errors, the default.
    #[default]
    SquaredError,
    /// Per-output binomial cross-entropy.
    CrossEntropy,
}

impl LossKind {
    pub fn name(&self) -> &'static str {
        match self {
            LossKind::SquaredError => "sse",
            LossKind::CrossEntropy => "cross-entropy",
        }
    }
}

impl std::str::FromStr for LossKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sse" => Ok(LossKind::SquaredError),
            "cross-entropy" => Ok(LossKind::CrossEntropy),
            other => Err(Error::InvalidArgument(format!("unknown loss kind: {other}"))),
        }
    }
}

/// Reusable buffers for the forward/backward hot path.
#[derive(Debug, Clone)]
pub struct Scratch {
    pub hidden: Vec<f64>,
    pub output: Vec<f64>,
    delta_output: Vec<f64>,
    delta_hidden: Vec<f64>,
}

impl Scratch {
    pub fn for_params(p: &MlpParams) -> Self {
        Self {
            hidden: vec![0.0; p.hidden_units()],
            output: vec![0.0; p.classes()],
            delta_output: vec![0.0; p.classes()],
            delta_hidden: vec![0.0; p.hidden_units()],
        }
    }
}

/// Gradient with the same shape as [`MlpParams`].
#[derive(Debug, Clone)]
pub struct Gradients {
    pub hidden_bias: Vec<f64>,
    pub hidden_weights: DenseMatrix,
    pub output_bias: Vec<f64>,
    pub output_weights: DenseMatrix,
}

impl Gradients {
    pub fn zeros_like(p: &MlpParams) -> Self {
        Self {
            hidden_bias: vec![0.0; p.hidden_units()],
            hidden_weights: DenseMatrix::zeros(p.hidden_units(), p.input_dims()),
            output_bias: vec![0.0; p.classes()],
            output_weights: DenseMatrix::zeros(p.classes(), p.hidden_units()),
        }
    }

    pub fn reset(&mut self) {
        self.hidden_bias.fill(0.0);
        self.hidden_weights.fill(0.0);
        self.output_bias.fill(0.0);
        self.output_weights.fill(0.0);
    }

    /// Flatten in the same (a, A, b, B) order as [`MlpParams::to_flat`].
    pub fn to_flat(&self) -> Vec<f64> {
        let mut flat = Vec::new();
        flat.extend_from_slice(&self.hidden_bias);
        flat.extend_from_slice(self.hidden_weights.as_slice());
        flat.extend_from_slice(&self.output_bias);
        flat.extend_from_slice(self.output_weights.as_slice());
        flat
    }
}

fn check_input(p: &MlpParams, x: &[f64]) -> Result<()> {
    if x.len() != p.input_dims() {
        return Err(Error::ShapeMismatch(format!(
            "input has {} entries, network expects {}",
            x.len(),
            p.input_dims()
        )));
    }
    Ok(())
}

/// Forward pass writing hidden and output activations into `scratch`.
pub fn forward_into(p: &MlpParams, x: &[f64], scratch: &mut Scratch) {
    for (j, h) in scratch.hidden.iter_mut().enumerate() {
        *h = sigmoid(p.hidden_bias[j] + dot(p.hidden_weights.row(j), x));
    }
    for (k, y) in scratch.output.iter_mut().enumerate() {
        *y = sigmoid(p.output_bias[k] + dot(p.output_weights.row(k), &scratch.hidden));
    }
}

/// y = sigmoid(b + B * sigmoid(a + A * x)).
pub fn forward(p: &MlpParams, x: &[f64]) -> Result<Vec<f64>> {
    check_input(p, x)?;
    let mut scratch = Scratch::for_params(p);
    forward_into(p, x, &mut scratch);
    Ok(scratch.output)
}

/// Loss of an output vector against the one-hot target for `label`.
pub fn loss(y: &[f64], label: usize, kind: LossKind) -> Result<f64> {
    if label >= y.len() {
        return Err(Error::InvalidArgument(format!(
            "label {label} out of range for {} outputs",
            y.len()
        )));
    }
    let value = match kind {
        LossKind::SquaredError => y
            .iter()
            .enumerate()
            .map(|(k, &yk)| {
                let t = if k == label { 1.0 } else { 0.0 };
                (yk - t) * (yk - t)
            })
            .sum(),
        LossKind::CrossEntropy => y
            .iter()
            .enumerate()
            .map(|(k, &yk)| {
                let t = if k == label { 1.0 } else { 0.0 };
                // A fully saturated wrong output yields an infinite loss;
                // the trainer reports that as divergence rather than
                // papering over it.
                -(t * yk.ln() + (1.0 - t) * (1.0 - yk).ln())
            })
            .sum(),
    };
    Ok(value)
}

/// Backward pass for one sample: accumulates into `grads` and returns the
/// sample loss. `scratch` is overwritten.
pub fn accumulate_gradient(
    p: &MlpParams,
    x: &[f64],
    label: usize,
    kind: LossKind,
    scratch: &mut Scratch,
    grads: &mut Gradients,
) -> Result<f64> {
    check_input(p, x)?;
    if label >= p.classes() {
        return Err(Error::InvalidArgument(format!(
            "label {label} out of range for {} classes",
            p.classes()
        )));
    }
    forward_into(p, x, scratch);
    let sample_loss = loss(&scratch.output, label, kind)?;

    for (k, d) in scratch.delta_output.iter_mut().enumerate() {
        let y = scratch.output[k];
        let t = if k == label { 1.0 } else { 0.0 };
        *d = match kind {
            // d/dz of sum (y - t)^2 with y = sigmoid(z).
            LossKind::SquaredError => 2.0 * (y - t) * y * (1.0 - y),
            // Cross-entropy against sigmoid cancels to y - t.
            LossKind::CrossEntropy => y - t,
        };
    }
    for (k, &d) in scratch.delta_output.iter().enumerate() {
        grads.output_bias[k] += d;
        for (g, &h) in grads.output_weights.row_mut(k).iter_mut().zip(&scratch.hidden) {
            *g += d * h;
        }
    }
    for (j, dh) in scratch.delta_hidden.iter_mut().enumerate() {
        let mut back = 0.0;
        for (k, &d) in scratch.delta_output.iter().enumerate() {
            back += d * p.output_weights.get(k, j);
        }
        let h = scratch.hidden[j];
        *dh = back * h * (1.0 - h);
    }
    for (j, &dh) in scratch.delta_hidden.iter().enumerate() {
        grads.hidden_bias[j] += dh;
        for (g, &xi) in grads.hidden_weights.row_mut(j).iter_mut().zip(x) {
            *g += dh * xi;
        }
    }
    Ok(sample_loss)
}

/// Exact gradient of loss(forward(p, x), label) with respect to every
/// parameter entry.
pub fn grad(p: &MlpParams, x: &[f64], label: usize, kind: LossKind) -> Result<Gradients> {
    let mut grads = Gradients::zeros_like(p);
    let mut scratch = Scratch::for_params(p);
    accumulate_gradient(p, x, label, kind, &mut scratch, &mut grads)?;
    Ok(grads)
}

/// Index of the maximum entry; ties break to the lowest index so class
/// predictions are a deterministic function of the outputs.
pub fn predict_class(y: &[f64]) -> usize {
    assert!(!y.is_empty(), "predict_class needs a non-empty output vector");
    let mut best = 0;
    for (i, &v) in y.iter().enumerate().skip(1) {
        if v > y[best] {
            best = i;
        }
    }
    best
}
