//! Node and document embeddings for networks of text-attributed nodes.
//!
//! The pipeline factorizes a matrix of random-walk co-occurrence counts into
//! node embeddings (GVNR), optionally deriving each node's context vector
//! from its bag-of-words so that unseen documents can be embedded from text
//! alone (GVNR-t). Evaluation protocols for node classification,
//! unseen-document classification and link prediction are included, along
//! with scaled dot-product attention weights for document pairs.
//!
//! ```
//! use gvnr::{count_cooccurrences, generate_walks, train_gvnr, GvnrConfig, WalkConfig};
//!
//! let content = "a\t1\t0\tml\nb\t1\t1\tml\nc\t0\t1\tdb\n";
//! let cites = "a b\nb c\n";
//! let (data, _report) = gvnr::load_cora_format(content.as_bytes(), cites.as_bytes()).unwrap();
//! let walks = generate_walks(&data, &WalkConfig::default()).unwrap();
//! let x = count_cooccurrences(&walks, data.len(), 5).unwrap();
//! let fit = train_gvnr(&x, &GvnrConfig { dim: 8, epochs: 3, ..Default::default() }).unwrap();
//! assert_eq!(fit.model.n(), 3);
//! ```

pub mod attention;
pub mod cooc;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod model;
pub mod rng;
pub mod text;
pub mod train;
pub mod walks;

pub use attention::{
    mutual_attention_weights, scaled_dot_product_attention, AttentionInput, AttentionKernel,
    AttentionOutput, QueryStrategy,
};
pub use cooc::{count_cooccurrences, CoocMatrix};
pub use dataset::{load_cora_format, Bow, Dataset, LoadReport};
pub use error::{Error, Result};
pub use eval::{
    classification_protocol, link_prediction_protocol, link_prediction_protocol_text,
    link_prediction_split, roc_auc, stratified_split, train_softmax_classifier, EvalReport,
    LinkScorer, LinkSplit, SettingStats, SoftmaxClassifier, CLASSIFY_FRACS, UNSEEN_FRACS,
};
pub use model::{
    read_raw_model, read_word2vec, write_word2vec, GvnrModel, GvnrTextModel, Matrix, ModelFile,
    RepresentationMode,
};
pub use text::{doc_context_vector, train_gvnr_t, TextMode};
pub use train::{
    objective_gradients, objective_value, sample_zero_coefficients, train_gvnr, GvnrConfig,
    Optimizer, TrainedModel,
};
pub use walks::{generate_walks, visit_frequencies, WalkConfig};
