//! Evaluation protocols: transductive classification, unseen-document
//! classification, and link prediction.

mod auc;
mod classifier;
mod protocols;
mod split;

pub use auc::roc_auc;
pub use classifier::{train_softmax_classifier, SoftmaxClassifier};
pub use protocols::{
    classification_protocol, link_prediction_auc_with, link_prediction_protocol,
    link_prediction_protocol_text, unseen_document_protocol, LinkScorer, CLASSIFY_FRACS,
    UNSEEN_FRACS,
};
pub use split::{link_prediction_split, stratified_split, LinkSplit};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Metric statistics for one protocol setting (a training fraction or split).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettingStats {
    pub setting: f64,
    pub mean: f64,
    pub stddev: f64,
    pub repeats: usize,
}

/// Results of one protocol run across its settings, with a config echo.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub protocol: String,
    pub metric: String,
    pub settings: Vec<SettingStats>,
    pub config: Vec<(String, String)>,
}

impl EvalReport {
    pub fn new(
        protocol: impl Into<String>,
        metric: impl Into<String>,
        settings: Vec<SettingStats>,
        config: Vec<(String, String)>,
    ) -> Result<EvalReport> {
        for s in &settings {
            if !(0.0..=1.0).contains(&s.mean) || s.stddev < 0.0 || s.repeats == 0 {
                return Err(Error::InvalidInput(format!(
                    "invalid report entry: mean {}, stddev {}, repeats {}",
                    s.mean, s.stddev, s.repeats
                )));
            }
        }
        Ok(EvalReport {
            protocol: protocol.into(),
            metric: metric.into(),
            settings,
            config,
        })
    }

    /// Aligned text table, settings as columns, values scaled by 100.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("{} ({}, values x100)\n", self.protocol, self.metric));
        let mut header = format!("{:<22}", "% of training data");
        let mut means = format!("{:<22}", "mean");
        let mut stds = format!("{:<22}", "stddev");
        for s in &self.settings {
            header.push_str(&format!("{:>9.0}%", s.setting * 100.0));
            means.push_str(&format!("{:>10.1}", s.mean * 100.0));
            stds.push_str(&format!("{:>10.1}", s.stddev * 100.0));
        }
        out.push_str(&header);
        out.push('\n');
        out.push_str(&means);
        out.push('\n');
        out.push_str(&stds);
        out.push('\n');
        out
    }
}

/// Sample mean and standard deviation (n-1 denominator, 0 for a single run).
pub(crate) fn mean_stddev(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}
