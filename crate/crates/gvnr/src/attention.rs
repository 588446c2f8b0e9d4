//! Scaled dot-product attention over word embeddings.
//!
//! Forward computation only: given a query and the word rows of a document,
//! produce softmax weights and the weighted value sum. Applied mutually to a
//! pair of documents, the weights highlight the words of each document that
//! the other document attends to.

use serde::{Deserialize, Serialize};

use crate::dataset::Bow;
use crate::error::{Error, Result};
use crate::model::{dot, Matrix};
use crate::text::doc_context_vector;

/// A query against a set of keys with associated values.
#[derive(Debug, Clone)]
pub struct AttentionInput {
    pub query: Vec<f64>,
    pub keys: Matrix,
    pub values: Matrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttentionOutput {
    /// Softmax weights over the key rows: nonnegative, summing to 1.
    pub weights: Vec<f64>,
    /// Weight-averaged value rows.
    pub output: Vec<f64>,
}

/// How the query for one document is built from the other document's words.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum QueryStrategy {
    /// Count-weighted mean of the other document's word embeddings.
    #[default]
    Mean,
    /// Elementwise maximum over the other document's word embeddings.
    MaxPool,
}

impl std::str::FromStr for QueryStrategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" => Ok(QueryStrategy::Mean),
            "max_pool" => Ok(QueryStrategy::MaxPool),
            other => Err(Error::Config(format!("unknown query strategy {other:?}"))),
        }
    }
}

/// Weight function applied to the scaled logits. Sparse alternatives to the
/// softmax are reserved here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
#[non_exhaustive]
pub enum AttentionKernel {
    #[default]
    Softmax,
}

/// Numerically stable softmax of `q·K^T / scale` over the key rows.
pub(crate) fn attention_weights_with_scale(
    query: &[f64],
    keys: &Matrix,
    scale: f64,
) -> Result<Vec<f64>> {
    if keys.nrows() == 0 {
        return Err(Error::InvalidInput("attention over zero keys".into()));
    }
    if keys.ncols() != query.len() {
        return Err(Error::InvalidInput(format!(
            "query dimension {} does not match key dimension {}",
            query.len(),
            keys.ncols()
        )));
    }
    let logits: Vec<f64> = (0..keys.nrows())
        .map(|l| dot(query, keys.row(l)) / scale)
        .collect();
    if logits.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("non-finite attention logits".into()));
    }
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&x| (x - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    Ok(exps.into_iter().map(|e| e / sum).collect())
}

/// `Attention(q, K, V) = softmax(qK^T / √d_k) V`, returning both the weights
/// and the attended output.
pub fn scaled_dot_product_attention(input: &AttentionInput) -> Result<AttentionOutput> {
    let d_k = input.keys.ncols();
    if input.values.nrows() != input.keys.nrows() {
        return Err(Error::InvalidInput(format!(
            "{} value rows for {} keys",
            input.values.nrows(),
            input.keys.nrows()
        )));
    }
    let weights = attention_weights_with_scale(&input.query, &input.keys, (d_k as f64).sqrt())?;
    let mut output = vec![0.0; input.values.ncols()];
    for (l, &wl) in weights.iter().enumerate() {
        for (o, x) in output.iter_mut().zip(input.values.row(l)) {
            *o += wl * x;
        }
    }
    Ok(AttentionOutput { weights, output })
}

fn document_keys(bow: &Bow, w: &Matrix) -> Result<(Vec<u32>, Matrix)> {
    if bow.is_empty() {
        return Err(Error::EmptyDocument);
    }
    let mut words = Vec::with_capacity(bow.len());
    let mut rows = Vec::with_capacity(bow.len());
    for &(word, _) in bow {
        if word as usize >= w.nrows() {
            return Err(Error::OutOfVocabulary {
                index: word as usize,
                vocab_size: w.nrows(),
            });
        }
        words.push(word);
        rows.push(w.row(word as usize).to_vec());
    }
    Ok((words, Matrix::from_rows(rows)?))
}

fn build_query(bow: &Bow, w: &Matrix, strategy: QueryStrategy) -> Result<Vec<f64>> {
    match strategy {
        QueryStrategy::Mean => doc_context_vector(bow, w),
        QueryStrategy::MaxPool => {
            if bow.is_empty() {
                return Err(Error::EmptyDocument);
            }
            let mut q = vec![f64::NEG_INFINITY; w.ncols()];
            for &(word, _) in bow {
                if word as usize >= w.nrows() {
                    return Err(Error::OutOfVocabulary {
                        index: word as usize,
                        vocab_size: w.nrows(),
                    });
                }
                for (qx, &x) in q.iter_mut().zip(w.row(word as usize)) {
                    *qx = qx.max(x);
                }
            }
            Ok(q)
        }
    }
}

/// Mutual attention for a pair of documents.
///
/// Keys and values for a document are its word embedding rows; its query is
/// built from the other document's words. Returns the weight vector over each
/// document's words, in bag-of-words order.
pub fn mutual_attention_weights(
    bow_a: &Bow,
    bow_b: &Bow,
    w: &Matrix,
    strategy: QueryStrategy,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let (_, keys_a) = document_keys(bow_a, w)?;
    let (_, keys_b) = document_keys(bow_b, w)?;
    let query_for_a = build_query(bow_b, w, strategy)?;
    let query_for_b = build_query(bow_a, w, strategy)?;
    let scale = (w.ncols() as f64).sqrt();
    let weights_a = attention_weights_with_scale(&query_for_a, &keys_a, scale)?;
    let weights_b = attention_weights_with_scale(&query_for_b, &keys_b, scale)?;
    Ok((weights_a, weights_b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use rand::Rng;

    fn mat(rows: Vec<Vec<f64>>) -> Matrix {
        Matrix::from_rows(rows).unwrap()
    }

    fn assert_simplex(weights: &[f64]) {
        assert!(weights.iter().all(|&w| w >= 0.0));
        let sum: f64 = weights.iter().sum();
        assert!((sum - 1.0).abs() <= 1e-12, "weights sum to {sum}");
    }

    #[test]
    fn identical_keys_give_uniform_weights() {
        let input = AttentionInput {
            query: vec![0.3, -0.7],
            keys: mat(vec![vec![1.0, 2.0]; 4]),
            values: mat(vec![vec![1.0], vec![2.0], vec![3.0], vec![4.0]]),
        };
        let out = scaled_dot_product_attention(&input).unwrap();
        assert_simplex(&out.weights);
        for &w in &out.weights {
            assert!((w - 0.25).abs() <= 1e-12);
        }
        assert!((out.output[0] - 2.5).abs() <= 1e-12);
    }

    #[test]
    fn two_key_closed_form() {
        // d_k=1, q=(1), keys 0 and log 3: softmax(0, log 3) = (1/4, 3/4)
        let input = AttentionInput {
            query: vec![1.0],
            keys: mat(vec![vec![0.0], vec![3.0_f64.ln()]]),
            values: mat(vec![vec![1.0, 0.0], vec![0.0, 1.0]]),
        };
        let out = scaled_dot_product_attention(&input).unwrap();
        assert!((out.weights[0] - 0.25).abs() <= 1e-12);
        assert!((out.weights[1] - 0.75).abs() <= 1e-12);
    }

    #[test]
    fn dominant_key_saturates() {
        let input = AttentionInput {
            query: vec![50.0],
            keys: mat(vec![vec![1.0], vec![0.0], vec![-1.0]]),
            values: mat(vec![vec![7.0], vec![1.0], vec![-3.0]]),
        };
        let out = scaled_dot_product_attention(&input).unwrap();
        assert!(out.weights[0] > 0.999);
        assert!((out.output[0] - 7.0).abs() < 0.05);
    }

    #[test]
    fn empty_keys_rejected() {
        let input = AttentionInput {
            query: vec![1.0],
            keys: Matrix::zeros(0, 1),
            values: Matrix::zeros(0, 1),
        };
        assert!(scaled_dot_product_attention(&input).is_err());
    }

    #[test]
    fn scale_law_exact_for_power_of_two_dims() {
        // weights(q, K, d_k) == weights(q/√d_k, K, 1) bitwise when √d_k is a
        // power of two
        let mut rng = stream_rng(8, 0, 0);
        for d_k in [1usize, 4, 16] {
            let scale = (d_k as f64).sqrt();
            let query: Vec<f64> = (0..d_k).map(|_| rng.random_range(-2.0..2.0)).collect();
            let keys = Matrix::uniform(5, d_k, 1.5, &mut rng);
            let a = attention_weights_with_scale(&query, &keys, scale).unwrap();
            let scaled_query: Vec<f64> = query.iter().map(|x| x / scale).collect();
            let b = attention_weights_with_scale(&scaled_query, &keys, 1.0).unwrap();
            assert_eq!(a, b, "d_k = {d_k}");
        }
    }

    #[test]
    fn scale_law_approximate_in_general() {
        let mut rng = stream_rng(9, 0, 0);
        for d_k in [2usize, 3, 7] {
            let scale = (d_k as f64).sqrt();
            let query: Vec<f64> = (0..d_k).map(|_| rng.random_range(-2.0..2.0)).collect();
            let keys = Matrix::uniform(6, d_k, 1.5, &mut rng);
            let a = attention_weights_with_scale(&query, &keys, scale).unwrap();
            let scaled_query: Vec<f64> = query.iter().map(|x| x / scale).collect();
            let b = attention_weights_with_scale(&scaled_query, &keys, 1.0).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn orthogonal_query_shift_leaves_weights_unchanged() {
        // keys live in the first coordinate; shifting q along the second
        // changes no logit
        let keys = mat(vec![vec![1.0, 0.0], vec![-2.0, 0.0], vec![0.5, 0.0]]);
        let q1 = vec![0.7, 0.0];
        let q2 = vec![0.7, 123.0];
        let a = attention_weights_with_scale(&q1, &keys, 2.0_f64.sqrt()).unwrap();
        let b = attention_weights_with_scale(&q2, &keys, 2.0_f64.sqrt()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn duplicated_key_splits_its_weight() {
        let mut rng = stream_rng(10, 0, 0);
        let query: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
        let base = Matrix::uniform(3, 3, 1.0, &mut rng);
        let with_dup = mat(vec![
            base.row(0).to_vec(),
            base.row(1).to_vec(),
            base.row(2).to_vec(),
            base.row(1).to_vec(), // duplicate of row 1
        ]);
        let w_base = attention_weights_with_scale(&query, &base, 3.0_f64.sqrt()).unwrap();
        let w_dup = attention_weights_with_scale(&query, &with_dup, 3.0_f64.sqrt()).unwrap();
        // merged weight of the duplicated row equals its single-row weight
        let merged = w_dup[1] + w_dup[3];
        let renorm = w_base[1];
        // identical logits: w_dup[1] == w_dup[3]
        assert!((w_dup[1] - w_dup[3]).abs() <= 1e-15);
        // and the merged mass matches the base weight after renormalizing for
        // the extra copy: merged / (1 + w_base[1]) * 1 == ... verify via ratio
        // invariance of the other rows instead
        let ratio = w_dup[0] / w_dup[2];
        let base_ratio = w_base[0] / w_base[2];
        assert!((ratio - base_ratio).abs() <= 1e-12 * base_ratio.abs().max(1.0));
        assert!(merged > renorm * 0.999); // duplicating a word only grows its mass
        assert_simplex(&w_dup);
    }

    #[test]
    fn mutual_attention_single_words() {
        let w = mat(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let a: Bow = vec![(0, 1.0)];
        let b: Bow = vec![(1, 2.0)];
        let (wa, wb) = mutual_attention_weights(&a, &b, &w, QueryStrategy::Mean).unwrap();
        assert_eq!(wa, vec![1.0]);
        assert_eq!(wb, vec![1.0]);
    }

    #[test]
    fn mutual_attention_identical_embeddings_uniform() {
        // doc a has two words with identical embeddings: weights (0.5, 0.5)
        let w = mat(vec![vec![0.4, -0.2], vec![0.4, -0.2], vec![5.0, 1.0]]);
        let a: Bow = vec![(0, 1.0), (1, 1.0)];
        let b: Bow = vec![(2, 1.0)];
        let (wa, _) = mutual_attention_weights(&a, &b, &w, QueryStrategy::Mean).unwrap();
        assert!((wa[0] - 0.5).abs() <= 1e-12);
        assert!((wa[1] - 0.5).abs() <= 1e-12);
    }

    #[test]
    fn mutual_attention_rejects_empty_documents() {
        let w = mat(vec![vec![1.0]]);
        let a: Bow = vec![(0, 1.0)];
        assert!(matches!(
            mutual_attention_weights(&a, &Vec::new(), &w, QueryStrategy::Mean),
            Err(Error::EmptyDocument)
        ));
    }

    #[test]
    fn max_pool_query_strategy() {
        let w = mat(vec![vec![1.0, -1.0], vec![-1.0, 2.0]]);
        let q = build_query(&vec![(0, 1.0), (1, 1.0)], &w, QueryStrategy::MaxPool).unwrap();
        assert_eq!(q, vec![1.0, 2.0]);
    }
}
