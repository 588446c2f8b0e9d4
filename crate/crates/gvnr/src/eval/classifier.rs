//! Multinomial logistic regression, fit by full-batch gradient descent.
//!
//! The objective is mean cross-entropy plus an L2 penalty `l2/(2N)·‖W‖²` on
//! the weights (biases unregularized), matching the usual C = 1/l2
//! convention. The step size is the inverse of a Lipschitz bound on the
//! gradient, so descent is monotone and fully deterministic.

use crate::error::{Error, Result};

const GRAD_TOLERANCE: f64 = 1e-4;
const MAX_ITERATIONS: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct SoftmaxClassifier {
    /// One weight row per class.
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<f64>,
    pub iterations: usize,
    pub final_grad_norm: f64,
}

/// Fit a `num_classes`-way linear classifier on dense features.
pub fn train_softmax_classifier(
    features: &[Vec<f64>],
    labels: &[usize],
    num_classes: usize,
    l2: f64,
) -> Result<SoftmaxClassifier> {
    if features.is_empty() || features.len() != labels.len() {
        return Err(Error::InvalidInput(
            "features and labels must be equal-length and nonempty".into(),
        ));
    }
    if num_classes < 2 {
        return Err(Error::InvalidInput("need at least two classes".into()));
    }
    if l2 < 0.0 {
        return Err(Error::Config("l2 must be nonnegative".into()));
    }
    let dim = features[0].len();
    let mut class_seen = vec![false; num_classes];
    for (x, &y) in features.iter().zip(labels) {
        if x.len() != dim {
            return Err(Error::InvalidInput("ragged feature rows".into()));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite feature value".into()));
        }
        if y >= num_classes {
            return Err(Error::InvalidInput(format!("label {y} out of range")));
        }
        class_seen[y] = true;
    }
    if let Some(missing) = class_seen.iter().position(|&s| !s) {
        return Err(Error::InvalidInput(format!(
            "class {missing} has no training examples"
        )));
    }

    let n = features.len() as f64;
    // Lipschitz bound on the gradient: (1/2N)·Σ(‖x‖²+1) for the softmax part
    // (the +1 is the implicit bias coordinate) plus l2/N for the ridge.
    let lipschitz = features
        .iter()
        .map(|x| x.iter().map(|v| v * v).sum::<f64>() + 1.0)
        .sum::<f64>()
        / (2.0 * n)
        + l2 / n;
    let lr = 1.0 / lipschitz;

    let mut weights = vec![vec![0.0; dim]; num_classes];
    let mut biases = vec![0.0; num_classes];
    let mut grad_w = vec![vec![0.0; dim]; num_classes];
    let mut grad_b = vec![0.0; num_classes];
    let mut probs = vec![0.0; num_classes];

    let mut iterations = 0;
    let mut grad_norm = f64::INFINITY;
    while iterations < MAX_ITERATIONS {
        for row in &mut grad_w {
            row.fill(0.0);
        }
        grad_b.fill(0.0);
        for (x, &y) in features.iter().zip(labels) {
            softmax_probs(&weights, &biases, x, &mut probs);
            for (c, &p) in probs.iter().enumerate() {
                let err = p - if c == y { 1.0 } else { 0.0 };
                grad_b[c] += err;
                let row = &mut grad_w[c];
                for (g, &xv) in row.iter_mut().zip(x) {
                    *g += err * xv;
                }
            }
        }
        let mut norm_sq = 0.0;
        for c in 0..num_classes {
            for l in 0..dim {
                let g = grad_w[c][l] / n + (l2 / n) * weights[c][l];
                grad_w[c][l] = g;
                norm_sq += g * g;
            }
            grad_b[c] /= n;
            norm_sq += grad_b[c] * grad_b[c];
        }
        grad_norm = norm_sq.sqrt();
        if grad_norm <= GRAD_TOLERANCE {
            break;
        }
        for c in 0..num_classes {
            for l in 0..dim {
                weights[c][l] -= lr * grad_w[c][l];
            }
            biases[c] -= lr * grad_b[c];
        }
        iterations += 1;
    }

    Ok(SoftmaxClassifier {
        weights,
        biases,
        iterations,
        final_grad_norm: grad_norm,
    })
}

fn softmax_probs(weights: &[Vec<f64>], biases: &[f64], x: &[f64], out: &mut [f64]) {
    for (c, row) in weights.iter().enumerate() {
        out[c] = biases[c] + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
    }
    let max = out.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in out.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    for v in out.iter_mut() {
        *v /= sum;
    }
}

impl SoftmaxClassifier {
    pub fn predict(&self, x: &[f64]) -> usize {
        let mut best = 0;
        let mut best_score = f64::NEG_INFINITY;
        for (c, row) in self.weights.iter().enumerate() {
            let score = self.biases[c] + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
            if score > best_score {
                best_score = score;
                best = c;
            }
        }
        best
    }

    pub fn accuracy(&self, features: &[Vec<f64>], labels: &[usize]) -> f64 {
        let correct = features
            .iter()
            .zip(labels)
            .filter(|(x, &y)| self.predict(x) == y)
            .count();
        correct as f64 / labels.len() as f64
    }
}
