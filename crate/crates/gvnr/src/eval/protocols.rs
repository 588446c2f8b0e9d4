//! The three evaluation protocols.
//!
//! Repeats are independent units with RNG streams derived from
//! `(seed, setting index, repeat index)`; they may run in parallel and merge
//! deterministically in repeat order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cooc::count_cooccurrences;
use crate::dataset::{Bow, Dataset};
use crate::error::{Error, Result};
use crate::eval::auc::roc_auc;
use crate::eval::classifier::train_softmax_classifier;
use crate::eval::split::{stratified_split, LinkSplit};
use crate::eval::{mean_stddev, EvalReport, SettingStats};
use crate::model::{dot, GvnrModel, GvnrTextModel, RepresentationMode};
use crate::rng::derive_seed;
use crate::text::{train_gvnr_t, TextMode};
use crate::train::GvnrConfig;
use crate::walks::{generate_walks, WalkConfig};

/// Default training fractions for transductive classification.
pub const CLASSIFY_FRACS: [f64; 5] = [0.1, 0.2, 0.3, 0.4, 0.5];
/// Default observed fractions for the unseen-document protocol.
pub const UNSEEN_FRACS: [f64; 5] = [0.3, 0.4, 0.5, 0.6, 0.7];

/// Repeatedly split, fit a linear classifier on the training side, and score
/// accuracy on the test side, for every training fraction.
pub fn classification_protocol(
    representations: &[Vec<f64>],
    labels: &[usize],
    fracs: &[f64],
    repeats: usize,
    seed: u64,
    l2: f64,
) -> Result<EvalReport> {
    if representations.len() != labels.len() || representations.is_empty() {
        return Err(Error::InvalidInput(
            "need one representation per labeled node".into(),
        ));
    }
    if repeats == 0 || fracs.is_empty() {
        return Err(Error::Config("need at least one fraction and repeat".into()));
    }
    let num_classes = labels.iter().max().unwrap() + 1;
    let mut settings = Vec::with_capacity(fracs.len());
    for (fi, &frac) in fracs.iter().enumerate() {
        let accuracies: Vec<f64> = (0..repeats)
            .into_par_iter()
            .map(|r| -> Result<f64> {
                let split_seed = derive_seed(seed, fi as u64, r as u64);
                let (train, test) = stratified_split(labels, frac, split_seed)?;
                let train_x: Vec<Vec<f64>> =
                    train.iter().map(|&i| representations[i].clone()).collect();
                let train_y: Vec<usize> = train.iter().map(|&i| labels[i]).collect();
                let clf = train_softmax_classifier(&train_x, &train_y, num_classes, l2)?;
                let test_x: Vec<Vec<f64>> =
                    test.iter().map(|&i| representations[i].clone()).collect();
                let test_y: Vec<usize> = test.iter().map(|&i| labels[i]).collect();
                Ok(clf.accuracy(&test_x, &test_y))
            })
            .collect::<Result<_>>()?;
        let (mean, stddev) = mean_stddev(&accuracies);
        settings.push(SettingStats {
            setting: frac,
            mean,
            stddev,
            repeats,
        });
    }
    EvalReport::new(
        "classification",
        "accuracy",
        settings,
        vec![
            ("seed".into(), seed.to_string()),
            ("repeats".into(), repeats.to_string()),
            ("l2".into(), l2.to_string()),
            ("split".into(), "stratified".into()),
        ],
    )
}

/// Hide all but `frac` of the nodes, run the full walk → co-occurrence →
/// GVNR-t pipeline on the observed subgraph, then classify the hidden nodes
/// from text-inferred vectors alone.
///
/// The model never sees the hidden nodes' links; only their attributes are
/// used at prediction time.
pub fn unseen_document_protocol(
    dataset: &Dataset,
    walk_cfg: &WalkConfig,
    gvnr_cfg: &GvnrConfig,
    fracs: &[f64],
    repeats: usize,
    seed: u64,
    l2: f64,
) -> Result<EvalReport> {
    if repeats == 0 || fracs.is_empty() {
        return Err(Error::Config("need at least one fraction and repeat".into()));
    }
    let mut settings = Vec::with_capacity(fracs.len());
    for (fi, &frac) in fracs.iter().enumerate() {
        let accuracies: Vec<f64> = (0..repeats)
            .into_par_iter()
            .map(|r| -> Result<f64> {
                let run_seed = derive_seed(seed, fi as u64, r as u64);
                run_unseen_repeat(dataset, walk_cfg, gvnr_cfg, frac, run_seed, l2)
            })
            .collect::<Result<_>>()?;
        let (mean, stddev) = mean_stddev(&accuracies);
        settings.push(SettingStats {
            setting: frac,
            mean,
            stddev,
            repeats,
        });
    }
    EvalReport::new(
        "unseen_documents",
        "accuracy",
        settings,
        vec![
            ("seed".into(), seed.to_string()),
            ("repeats".into(), repeats.to_string()),
            ("l2".into(), l2.to_string()),
            ("split".into(), "stratified".into()),
            ("dim".into(), gvnr_cfg.dim.to_string()),
            ("epochs".into(), gvnr_cfg.epochs.to_string()),
            ("walks".into(), walk_cfg.walks_per_node.to_string()),
            ("walk_length".into(), walk_cfg.walk_length.to_string()),
            ("window".into(), walk_cfg.window.to_string()),
        ],
    )
}

fn run_unseen_repeat(
    dataset: &Dataset,
    walk_cfg: &WalkConfig,
    gvnr_cfg: &GvnrConfig,
    frac: f64,
    run_seed: u64,
    l2: f64,
) -> Result<f64> {
    let (observed, hidden) = stratified_split(&dataset.labels, frac, run_seed)?;
    let (sub, _) = dataset.induced_subgraph(&observed)?;
    let walk_cfg = WalkConfig {
        seed: run_seed,
        ..*walk_cfg
    };
    let gvnr_cfg = GvnrConfig {
        seed: run_seed,
        ..*gvnr_cfg
    };
    let walks = generate_walks(&sub, &walk_cfg)?;
    let x = count_cooccurrences(&walks, sub.len(), walk_cfg.window)?;
    let fit = train_gvnr_t(&x, &sub.bows, sub.vocab_size, &gvnr_cfg)?;
    let model = &fit.model;

    let train_x: Vec<Vec<f64>> = (0..sub.len())
        .map(|i| model.text_representation(i, TextMode::TextOnly, &sub.bows))
        .collect::<Result<_>>()?;
    let clf = train_softmax_classifier(&train_x, &sub.labels, dataset.num_classes, l2)?;

    let mut correct = 0usize;
    for &h in &hidden {
        let vec = model.infer_document(&dataset.bows[h])?;
        if clf.predict(&vec) == dataset.labels[h] {
            correct += 1;
        }
    }
    Ok(correct as f64 / hidden.len() as f64)
}

/// How link scores are computed from a trained plain model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkScorer {
    /// σ(u_i·v_j + b_u[i] + b_v[j]).
    DotBias,
    /// Cosine similarity of node representations.
    Cosine(RepresentationMode),
}

pub(crate) fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let na = dot(a, a).sqrt();
    let nb = dot(b, b).sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    dot(a, b) / (na * nb)
}

/// AUC of an arbitrary pair scorer over a link split.
pub fn link_prediction_auc_with<F: Fn(usize, usize) -> f64>(
    split: &LinkSplit,
    score: F,
) -> Result<f64> {
    let pos: Vec<f64> = split.positives.iter().map(|&(a, b)| score(a, b)).collect();
    let neg: Vec<f64> = split.negatives.iter().map(|&(a, b)| score(a, b)).collect();
    roc_auc(&pos, &neg)
}

/// Score the held-out edges of `split` with a trained model.
pub fn link_prediction_protocol(
    model: &GvnrModel,
    split: &LinkSplit,
    scorer: LinkScorer,
) -> Result<EvalReport> {
    if model.n() != split.train.len() {
        return Err(Error::InvalidInput(format!(
            "model covers {} nodes, split has {}",
            model.n(),
            split.train.len()
        )));
    }
    let auc = match scorer {
        LinkScorer::DotBias => {
            link_prediction_auc_with(split, |a, b| model.dot_bias_score(a, b))?
        }
        LinkScorer::Cosine(mode) => {
            let reps: Vec<Vec<f64>> = (0..model.n())
                .map(|i| model.node_representation(i, mode))
                .collect();
            link_prediction_auc_with(split, |a, b| cosine(&reps[a], &reps[b]))?
        }
    };
    EvalReport::new(
        "link_prediction",
        "roc_auc",
        vec![SettingStats {
            setting: split.test_frac,
            mean: auc,
            stddev: 0.0,
            repeats: 1,
        }],
        vec![
            ("scorer".into(), format!("{scorer:?}")),
            ("positives".into(), split.positives.len().to_string()),
            ("negatives".into(), split.negatives.len().to_string()),
        ],
    )
}

/// Unseen-node link prediction: every endpoint representation comes from
/// text inference, so hidden nodes need no trained parameters.
pub fn link_prediction_protocol_text(
    model: &GvnrTextModel,
    bows: &[Bow],
    split: &LinkSplit,
) -> Result<EvalReport> {
    let reps: Vec<Vec<f64>> = bows
        .iter()
        .map(|bow| model.context_vector(bow))
        .collect::<Result<_>>()?;
    let auc = link_prediction_auc_with(split, |a, b| cosine(&reps[a], &reps[b]))?;
    EvalReport::new(
        "link_prediction_text",
        "roc_auc",
        vec![SettingStats {
            setting: split.test_frac,
            mean: auc,
            stddev: 0.0,
            repeats: 1,
        }],
        vec![
            ("scorer".into(), "cosine(text)".into()),
            ("positives".into(), split.positives.len().to_string()),
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use rand::Rng;

    fn clustered_features(n_per_class: usize, classes: usize, noise: f64) -> (Vec<Vec<f64>>, Vec<usize>) {
        let mut rng = stream_rng(21, 0, 0);
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for c in 0..classes {
            for _ in 0..n_per_class {
                let mut x = vec![0.0; classes];
                x[c] = 1.0;
                for v in x.iter_mut() {
                    *v += rng.random_range(-noise..noise);
                }
                xs.push(x);
                ys.push(c);
            }
        }
        (xs, ys)
    }

    #[test]
    fn separated_clusters_score_perfectly() {
        let (xs, ys) = clustered_features(12, 3, 0.05);
        let report =
            classification_protocol(&xs, &ys, &[0.2, 0.5], 4, 7, 1.0).unwrap();
        for s in &report.settings {
            assert_eq!(s.mean, 1.0, "fraction {}", s.setting);
            assert_eq!(s.stddev, 0.0);
        }
    }

    #[test]
    fn shuffled_labels_score_near_chance() {
        let (xs, _) = clustered_features(30, 2, 0.05);
        // labels independent of features, 50/50
        let ys: Vec<usize> = (0..60).map(|i| i % 2).collect();
        let report = classification_protocol(&xs, &ys, &[0.5], 8, 3, 1.0).unwrap();
        let mean = report.settings[0].mean;
        assert!(
            (0.3..0.7).contains(&mean),
            "chance-level accuracy expected, got {mean}"
        );
    }

    #[test]
    fn protocol_is_deterministic() {
        let (xs, ys) = clustered_features(10, 2, 0.3);
        let a = classification_protocol(&xs, &ys, &[0.3, 0.5], 3, 11, 1.0).unwrap();
        let b = classification_protocol(&xs, &ys, &[0.3, 0.5], 3, 11, 1.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn cosine_basics() {
        assert!((cosine(&[1.0, 0.0], &[2.0, 0.0]) - 1.0).abs() < 1e-12);
        assert!(cosine(&[1.0, 0.0], &[0.0, 3.0]).abs() < 1e-12);
        assert_eq!(cosine(&[0.0], &[1.0]), 0.0);
    }
}
