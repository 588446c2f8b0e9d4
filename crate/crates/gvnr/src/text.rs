//! GVNR-t: context vectors derived from text.
//!
//! Instead of a free per-node context embedding, a document's context vector
//! is the count-weighted average of its word embeddings,
//! `v_j = doc_j W / |doc_j|_1`. Unseen documents can then be embedded from
//! text alone, with no network information.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cooc::CoocMatrix;
use crate::dataset::Bow;
use crate::error::{Error, Result};
use crate::model::{dot, GvnrTextModel, Matrix};
use crate::rng::stream_rng;
use crate::train::{
    epoch_schedule, positive_coefficients, AdagradState, Coefficient, GvnrConfig, Optimizer,
    TrainedModel, ZeroMask, INIT_LANE,
};

/// Which representation a text-model node exposes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TextMode {
    /// The text-derived context vector only; available for unseen documents.
    TextOnly,
    /// Concatenation of the trained node vector and the context vector.
    Full,
}

impl TextMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            TextMode::TextOnly => "text_only",
            TextMode::Full => "full",
        }
    }
}

impl std::str::FromStr for TextMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text_only" => Ok(TextMode::TextOnly),
            "full" => Ok(TextMode::Full),
            other => Err(Error::Config(format!("unknown text mode {other:?}"))),
        }
    }
}

fn bow_l1(bow: &Bow) -> f64 {
    bow.iter().map(|&(_, c)| c).sum()
}

/// Count-weighted average of word embedding rows, L1-normalized:
/// `v = Σ_w count_w · W[w] / Σ_w count_w`.
pub fn doc_context_vector(bow: &Bow, w: &Matrix) -> Result<Vec<f64>> {
    let l1 = bow_l1(bow);
    if bow.is_empty() || l1 <= 0.0 {
        return Err(Error::EmptyDocument);
    }
    let mut out = vec![0.0; w.ncols()];
    weighted_average_into(&mut out, bow, l1, w)?;
    Ok(out)
}

fn weighted_average_into(buf: &mut [f64], bow: &Bow, l1: f64, w: &Matrix) -> Result<()> {
    buf.fill(0.0);
    for &(word, count) in bow {
        let word = word as usize;
        if word >= w.nrows() {
            return Err(Error::OutOfVocabulary {
                index: word,
                vocab_size: w.nrows(),
            });
        }
        let row = w.row(word);
        for (b, x) in buf.iter_mut().zip(row) {
            *b += count * x;
        }
    }
    let inv = 1.0 / l1;
    for b in buf.iter_mut() {
        *b *= inv;
    }
    Ok(())
}

impl GvnrTextModel {
    /// Context vector of a training document: the text average, or the shared
    /// learned fallback for documents with no words.
    pub fn context_vector(&self, bow: &Bow) -> Result<Vec<f64>> {
        if bow.is_empty() {
            Ok(self.empty_doc_vector.clone())
        } else {
            doc_context_vector(bow, &self.w)
        }
    }

    /// Embed an unseen document from its bag-of-words alone.
    ///
    /// The result lives in the same space as trained context vectors; for a
    /// training document it equals that node's `v_j` exactly.
    pub fn infer_document(&self, bow: &Bow) -> Result<Vec<f64>> {
        doc_context_vector(bow, &self.w)
    }

    /// Representation of trained node `i` under `mode`; `bows` is the
    /// training corpus.
    pub fn text_representation(&self, i: usize, mode: TextMode, bows: &[Bow]) -> Result<Vec<f64>> {
        if i >= self.n() {
            return Err(Error::InvalidInput(format!(
                "node {i} has no trained embedding (model holds {})",
                self.n()
            )));
        }
        let v = self.context_vector(&bows[i])?;
        match mode {
            TextMode::TextOnly => Ok(v),
            TextMode::Full => Ok(self.u.row(i).iter().copied().chain(v).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TextGradients {
    pub u: Matrix,
    pub w: Matrix,
    pub b_u: Vec<f64>,
    pub b_v: Vec<f64>,
    pub empty_doc: Vec<f64>,
}

fn check_corpus(x: &CoocMatrix, bows: &[Bow], vocab_size: usize) -> Result<()> {
    if bows.len() != x.n() {
        return Err(Error::InvalidInput(format!(
            "{} documents for {} nodes",
            bows.len(),
            x.n()
        )));
    }
    for bow in bows {
        for &(word, _) in bow {
            if word as usize >= vocab_size {
                return Err(Error::OutOfVocabulary {
                    index: word as usize,
                    vocab_size,
                });
            }
        }
    }
    Ok(())
}

/// Same objective as the plain model, with `v_j` computed from text.
pub fn objective_value_text(
    m: &GvnrTextModel,
    x: &CoocMatrix,
    bows: &[Bow],
    mask: &ZeroMask,
    zero_target: f64,
) -> Result<f64> {
    check_corpus(x, bows, m.vocab_size())?;
    let mut context = vec![0.0; m.dim()];
    let term = |i: usize, j: usize, target: f64, context: &mut Vec<f64>| -> Result<f64> {
        let bow = &bows[j];
        if bow.is_empty() {
            context.copy_from_slice(&m.empty_doc_vector);
        } else {
            weighted_average_into(context, bow, bow_l1(bow), &m.w)?;
        }
        Ok((dot(m.u.row(i), context) + m.b_u[i] + m.b_v[j] - target).powi(2))
    };
    let mut loss = 0.0;
    for (i, j, xij) in x.iter_entries() {
        if xij <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "stored co-occurrence x[{i},{j}] = {xij} has no logarithm"
            )));
        }
        loss += term(i as usize, j as usize, xij.ln(), &mut context)?;
    }
    for &(i, j) in mask {
        loss += term(i as usize, j as usize, zero_target, &mut context)?;
    }
    Ok(loss)
}

/// Exact full-batch gradients of [`objective_value_text`]; the word-matrix
/// gradient distributes `∂L/∂v_j` to word rows with weights `count/|doc|_1`.
pub fn objective_gradients_text(
    m: &GvnrTextModel,
    x: &CoocMatrix,
    bows: &[Bow],
    mask: &ZeroMask,
    zero_target: f64,
) -> Result<TextGradients> {
    check_corpus(x, bows, m.vocab_size())?;
    let (n, d) = (m.n(), m.dim());
    let mut g = TextGradients {
        u: Matrix::zeros(n, d),
        w: Matrix::zeros(m.vocab_size(), d),
        b_u: vec![0.0; n],
        b_v: vec![0.0; n],
        empty_doc: vec![0.0; d],
    };
    let mut context = vec![0.0; d];
    let mut accumulate = |i: usize, j: usize, target: f64, g: &mut TextGradients| -> Result<()> {
        let bow = &bows[j];
        let l1 = bow_l1(bow);
        if bow.is_empty() {
            context.copy_from_slice(&m.empty_doc_vector);
        } else {
            weighted_average_into(&mut context, bow, l1, &m.w)?;
        }
        let ui = m.u.row(i);
        let e2 = 2.0 * (dot(ui, &context) + m.b_u[i] + m.b_v[j] - target);
        let gu = g.u.row_mut(i);
        for l in 0..d {
            gu[l] += e2 * context[l];
        }
        g.b_u[i] += e2;
        g.b_v[j] += e2;
        if bow.is_empty() {
            for (ge, &u) in g.empty_doc.iter_mut().zip(ui) {
                *ge += e2 * u;
            }
        } else {
            for &(word, count) in bow {
                let coef = count / l1;
                let gw = g.w.row_mut(word as usize);
                for l in 0..d {
                    gw[l] += e2 * ui[l] * coef;
                }
            }
        }
        Ok(())
    };
    for (i, j, xij) in x.iter_entries() {
        if xij <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "stored co-occurrence x[{i},{j}] = {xij} has no logarithm"
            )));
        }
        accumulate(i as usize, j as usize, xij.ln(), &mut g)?;
    }
    for &(i, j) in mask {
        accumulate(i as usize, j as usize, zero_target, &mut g)?;
    }
    Ok(g)
}

/// Fit GVNR-t: word and node embeddings learned from scratch, contexts
/// derived from the corpus bags-of-words.
pub fn train_gvnr_t(
    x: &CoocMatrix,
    bows: &[Bow],
    vocab_size: usize,
    cfg: &GvnrConfig,
) -> Result<TrainedModel<GvnrTextModel>> {
    cfg.validate()?;
    if vocab_size == 0 {
        return Err(Error::Config("vocab_size must be positive".into()));
    }
    let x = x.filter_min_count(cfg.x_min);
    if x.nnz() == 0 {
        return Err(Error::InvalidInput(
            "no co-occurrences at or above x_min; nothing to factorize".into(),
        ));
    }
    check_corpus(&x, bows, vocab_size)?;
    let (n, d) = (x.n(), cfg.dim);
    let scale = 0.5 / d as f64;
    let mut init_rng = stream_rng(cfg.seed, INIT_LANE, 0);
    let mut model = GvnrTextModel {
        u: Matrix::uniform(n, d, scale, &mut init_rng),
        w: Matrix::uniform(vocab_size, d, scale, &mut init_rng),
        b_u: vec![0.0; n],
        b_v: vec![0.0; n],
        empty_doc_vector: (0..d).map(|_| init_rng.random_range(-scale..=scale)).collect(),
    };
    let mut acc = AdagradState::new((n, d), (vocab_size, d), n);
    let mut acc_empty = vec![1.0f64; d];
    let l1: Vec<f64> = bows.iter().map(bow_l1).collect();
    let positives = positive_coefficients(&x)?;
    let lr = cfg.learning_rate;

    let mut epoch_losses = Vec::with_capacity(cfg.epochs);
    let mut schedule: Vec<Coefficient> = Vec::new();
    let mut context = vec![0.0; d];
    let mut grad_v = vec![0.0; d];
    for epoch in 0..cfg.epochs {
        epoch_schedule(&mut schedule, &positives, &x, cfg, epoch);
        let mut loss_sum = 0.0;
        for &(i, j, target) in &schedule {
            let (i, j) = (i as usize, j as usize);
            let bow = &bows[j];
            if bow.is_empty() {
                context.copy_from_slice(&model.empty_doc_vector);
            } else {
                weighted_average_into(&mut context, bow, l1[j], &model.w)?;
            }
            let ui = model.u.row_mut(i);
            let e = dot(ui, &context) + model.b_u[i] + model.b_v[j] - target;
            if !e.is_finite() {
                return Err(Error::NonFiniteLoss { epoch });
            }
            loss_sum += e * e;
            let g = 2.0 * e;
            // ∂L/∂v_j, taken at the pre-update u_i
            for l in 0..d {
                grad_v[l] = g * ui[l];
            }
            match cfg.optimizer {
                Optimizer::Adagrad => {
                    let au = acc.rows_a.row_mut(i);
                    for l in 0..d {
                        let gu = g * context[l];
                        let step = lr * gu / au[l].sqrt();
                        au[l] += gu * gu;
                        ui[l] -= step;
                    }
                    let sb_u = lr * g / acc.bias_a[i].sqrt();
                    let sb_v = lr * g / acc.bias_b[j].sqrt();
                    acc.bias_a[i] += g * g;
                    acc.bias_b[j] += g * g;
                    model.b_u[i] -= sb_u;
                    model.b_v[j] -= sb_v;
                    if bow.is_empty() {
                        for l in 0..d {
                            let gf = grad_v[l];
                            let step = lr * gf / acc_empty[l].sqrt();
                            acc_empty[l] += gf * gf;
                            model.empty_doc_vector[l] -= step;
                        }
                    } else {
                        for &(word, count) in bow {
                            let coef = count / l1[j];
                            let wrow = model.w.row_mut(word as usize);
                            let arow = acc.rows_b.row_mut(word as usize);
                            for l in 0..d {
                                let gw = grad_v[l] * coef;
                                let step = lr * gw / arow[l].sqrt();
                                arow[l] += gw * gw;
                                wrow[l] -= step;
                            }
                        }
                    }
                }
                Optimizer::Sgd => {
                    for l in 0..d {
                        ui[l] -= lr * g * context[l];
                    }
                    model.b_u[i] -= lr * g;
                    model.b_v[j] -= lr * g;
                    if bow.is_empty() {
                        for (f, &gv) in model.empty_doc_vector.iter_mut().zip(&grad_v) {
                            *f -= lr * gv;
                        }
                    } else {
                        for &(word, count) in bow {
                            let coef = count / l1[j];
                            let wrow = model.w.row_mut(word as usize);
                            for l in 0..d {
                                wrow[l] -= lr * grad_v[l] * coef;
                            }
                        }
                    }
                }
            }
        }
        let mean = loss_sum / schedule.len() as f64;
        if !mean.is_finite() {
            return Err(Error::NonFiniteLoss { epoch });
        }
        epoch_losses.push(mean);
    }
    Ok(TrainedModel {
        model,
        epoch_losses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cooc::count_cooccurrences;
    use rand::Rng;

    fn word_matrix(rows: Vec<Vec<f64>>) -> Matrix {
        Matrix::from_rows(rows).unwrap()
    }

    #[test]
    fn one_hot_bow_returns_word_row() {
        let w = word_matrix(vec![vec![1.0, 2.0], vec![-0.5, 0.25]]);
        let v = doc_context_vector(&vec![(1, 1.0)], &w).unwrap();
        assert_eq!(v, w.row(1));
    }

    #[test]
    fn scale_invariance_of_counts() {
        let w = word_matrix(vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.3, 0.7]]);
        let bow: Bow = vec![(0, 1.0), (2, 4.0)];
        let doubled: Bow = vec![(0, 2.0), (2, 8.0)];
        assert_eq!(
            doc_context_vector(&bow, &w).unwrap(),
            doc_context_vector(&doubled, &w).unwrap()
        );
    }

    #[test]
    fn weighted_mean_hand_example() {
        let w = word_matrix(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let bow: Bow = vec![(0, 1.0), (1, 3.0)];
        assert_eq!(doc_context_vector(&bow, &w).unwrap(), vec![0.25, 0.75]);
    }

    #[test]
    fn empty_and_out_of_vocab_rejected() {
        let w = word_matrix(vec![vec![1.0], vec![2.0]]);
        assert!(matches!(
            doc_context_vector(&Vec::new(), &w),
            Err(Error::EmptyDocument)
        ));
        assert!(matches!(
            doc_context_vector(&vec![(5, 1.0)], &w),
            Err(Error::OutOfVocabulary { .. })
        ));
    }

    #[test]
    fn vocabulary_permutation_equivariance() {
        let w = word_matrix(vec![
            vec![1.0, 2.0],
            vec![-1.0, 0.5],
            vec![0.25, 0.75],
            vec![3.0, -2.0],
        ]);
        let bow: Bow = vec![(0, 2.0), (2, 1.0), (3, 5.0)];
        // permutation 0→3, 1→2, 2→1, 3→0
        let perm = [3usize, 2, 1, 0];
        let w_perm = word_matrix(vec![
            w.row(3).to_vec(),
            w.row(2).to_vec(),
            w.row(1).to_vec(),
            w.row(0).to_vec(),
        ]);
        let mut bow_perm: Bow = bow.iter().map(|&(i, c)| (perm[i as usize] as u32, c)).collect();
        bow_perm.sort_unstable_by_key(|e| e.0);
        let a = doc_context_vector(&bow, &w).unwrap();
        let b = doc_context_vector(&bow_perm, &w_perm).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        }
    }

    fn toy_corpus() -> (CoocMatrix, Vec<Bow>, usize) {
        let walks: Vec<Vec<u32>> = vec![vec![0, 1, 2, 1], vec![2, 1, 0], vec![1, 0, 1, 2]];
        let x = count_cooccurrences(&walks, 3, 2).unwrap();
        let bows: Vec<Bow> = vec![
            vec![(0, 2.0), (1, 1.0)],
            vec![(1, 1.0), (3, 1.0)],
            vec![(2, 3.0)],
        ];
        (x, bows, 4)
    }

    #[test]
    fn text_gradients_match_finite_differences() {
        let (x, bows, vocab) = toy_corpus();
        let mut rng = stream_rng(11, 0, 0);
        let d = 3;
        let mut m = GvnrTextModel {
            u: Matrix::uniform(3, d, 0.5, &mut rng),
            w: Matrix::uniform(vocab, d, 0.5, &mut rng),
            b_u: (0..3).map(|_| rng.random_range(-0.3..=0.3)).collect(),
            b_v: (0..3).map(|_| rng.random_range(-0.3..=0.3)).collect(),
            empty_doc_vector: (0..d).map(|_| rng.random_range(-0.3..=0.3)).collect(),
        };
        let mask: ZeroMask = vec![(0, 0), (2, 0)];
        let g = objective_gradients_text(&m, &x, &bows, &mask, 0.0).unwrap();
        let h = 1e-5;
        let rel = |a: f64, fd: f64| (a - fd).abs() / a.abs().max(fd.abs()).max(1e-6);

        for word in 0..vocab {
            for l in 0..d {
                let orig = m.w.row(word)[l];
                m.w.row_mut(word)[l] = orig + h;
                let plus = objective_value_text(&m, &x, &bows, &mask, 0.0).unwrap();
                m.w.row_mut(word)[l] = orig - h;
                let minus = objective_value_text(&m, &x, &bows, &mask, 0.0).unwrap();
                m.w.row_mut(word)[l] = orig;
                let fd = (plus - minus) / (2.0 * h);
                assert!(
                    rel(g.w.row(word)[l], fd) <= 1e-4,
                    "W[{word}][{l}]: {} vs {fd}",
                    g.w.row(word)[l]
                );
            }
        }
        for i in 0..3 {
            for l in 0..d {
                let orig = m.u.row(i)[l];
                m.u.row_mut(i)[l] = orig + h;
                let plus = objective_value_text(&m, &x, &bows, &mask, 0.0).unwrap();
                m.u.row_mut(i)[l] = orig - h;
                let minus = objective_value_text(&m, &x, &bows, &mask, 0.0).unwrap();
                m.u.row_mut(i)[l] = orig;
                let fd = (plus - minus) / (2.0 * h);
                assert!(rel(g.u.row(i)[l], fd) <= 1e-4);
            }
        }
    }

    #[test]
    fn empty_document_gradient_flows_to_fallback() {
        let walks: Vec<Vec<u32>> = vec![vec![0, 1, 0, 1]];
        let x = count_cooccurrences(&walks, 2, 1).unwrap();
        let bows: Vec<Bow> = vec![vec![(0, 1.0)], Vec::new()];
        let mut rng = stream_rng(3, 1, 1);
        let mut m = GvnrTextModel {
            u: Matrix::uniform(2, 2, 0.5, &mut rng),
            w: Matrix::uniform(2, 2, 0.5, &mut rng),
            b_u: vec![0.1, -0.1],
            b_v: vec![0.2, -0.2],
            empty_doc_vector: vec![0.3, -0.4],
        };
        let g = objective_gradients_text(&m, &x, &bows, &Vec::new(), 0.0).unwrap();
        assert!(g.empty_doc.iter().any(|&v| v != 0.0));
        // finite difference on the fallback vector
        let h = 1e-5;
        for l in 0..2 {
            let orig = m.empty_doc_vector[l];
            m.empty_doc_vector[l] = orig + h;
            let plus = objective_value_text(&m, &x, &bows, &Vec::new(), 0.0).unwrap();
            m.empty_doc_vector[l] = orig - h;
            let minus = objective_value_text(&m, &x, &bows, &Vec::new(), 0.0).unwrap();
            m.empty_doc_vector[l] = orig;
            let fd = (plus - minus) / (2.0 * h);
            assert!((g.empty_doc[l] - fd).abs() / fd.abs().max(1e-6) <= 1e-4);
        }
    }

    #[test]
    fn degenerate_corpus_trains_through_biases() {
        // every document is the same single word: all contexts identical
        let walks: Vec<Vec<u32>> = vec![vec![0, 1, 2, 0, 1], vec![2, 0, 1]];
        let x = count_cooccurrences(&walks, 3, 2).unwrap();
        let bows: Vec<Bow> = vec![vec![(0, 1.0)]; 3];
        let cfg = GvnrConfig {
            dim: 4,
            epochs: 60,
            ..GvnrConfig::default()
        };
        let fit = train_gvnr_t(&x, &bows, 1, &cfg).unwrap();
        assert!(fit.epoch_losses.last().unwrap() < fit.epoch_losses.first().unwrap());
        let m = &fit.model;
        let v0 = m.context_vector(&bows[0]).unwrap();
        let v1 = m.context_vector(&bows[1]).unwrap();
        assert_eq!(v0, v1);
    }

    #[test]
    fn inference_matches_training_context_exactly() {
        let (x, bows, vocab) = toy_corpus();
        let cfg = GvnrConfig {
            dim: 5,
            epochs: 8,
            ..GvnrConfig::default()
        };
        let fit = train_gvnr_t(&x, &bows, vocab, &cfg).unwrap();
        for (j, bow) in bows.iter().enumerate() {
            let inferred = fit.model.infer_document(bow).unwrap();
            let trained = fit
                .model
                .text_representation(j, TextMode::TextOnly, &bows)
                .unwrap();
            assert_eq!(inferred, trained);
        }
    }

    #[test]
    fn full_mode_concatenates() {
        let (x, bows, vocab) = toy_corpus();
        let cfg = GvnrConfig {
            dim: 3,
            epochs: 2,
            ..GvnrConfig::default()
        };
        let fit = train_gvnr_t(&x, &bows, vocab, &cfg).unwrap();
        let full = fit
            .model
            .text_representation(1, TextMode::Full, &bows)
            .unwrap();
        assert_eq!(full.len(), 6);
        assert_eq!(&full[..3], fit.model.u.row(1));
        assert!(fit.model.text_representation(9, TextMode::Full, &bows).is_err());
    }

    #[test]
    fn text_training_is_deterministic() {
        let (x, bows, vocab) = toy_corpus();
        let cfg = GvnrConfig {
            dim: 4,
            epochs: 6,
            ..GvnrConfig::default()
        };
        let a = train_gvnr_t(&x, &bows, vocab, &cfg).unwrap();
        let b = train_gvnr_t(&x, &bows, vocab, &cfg).unwrap();
        assert_eq!(a.model, b.model);
        assert_eq!(a.epoch_losses, b.epoch_losses);
    }
}
