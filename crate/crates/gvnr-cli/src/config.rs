//! Run configuration: config file + flag overrides, echoed into manifests.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use gvnr::{GvnrConfig, WalkConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Gvnr,
    #[value(name = "gvnr_t", alias = "gvnr-t")]
    #[serde(rename = "gvnr_t")]
    GvnrT,
}

impl Variant {
    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::Gvnr => "gvnr",
            Variant::GvnrT => "gvnr_t",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalSettings {
    pub fracs: Vec<f64>,
    pub repeats: usize,
    pub l2: f64,
    pub test_frac: f64,
    pub scorer: String,
}

impl Default for EvalSettings {
    fn default() -> Self {
        EvalSettings {
            fracs: Vec::new(), // protocol-specific defaults apply
            repeats: 10,
            l2: 1.0,
            test_frac: 0.2,
            scorer: "dot_bias".into(),
        }
    }
}

/// Fully resolved configuration for one command invocation. Serialized into
/// the run manifest; a manifest can be replayed via `--config`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub dataset_content: PathBuf,
    pub dataset_cites: PathBuf,
    pub variant: Variant,
    pub walk: WalkConfig,
    pub gvnr: GvnrConfig,
    /// Representation mode: u_only | sum | concat (gvnr),
    /// text_only | full (gvnr_t).
    pub mode: String,
    pub eval: EvalSettings,
    pub out: PathBuf,
    pub cache_dir: Option<PathBuf>,
    pub threads: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            dataset_content: PathBuf::new(),
            dataset_cites: PathBuf::new(),
            variant: Variant::Gvnr,
            walk: WalkConfig::default(),
            gvnr: GvnrConfig::default(),
            mode: String::new(), // variant-specific default applied on resolve
            eval: EvalSettings::default(),
            out: PathBuf::from("gvnr-out"),
            cache_dir: None,
            threads: 0, // 0 = rayon default
        }
    }
}

/// Common flags shared by subcommands; `None` means "not given", falling
/// back to the config file and then to defaults.
#[derive(Debug, Clone, clap::Args)]
pub struct CommonArgs {
    /// JSON config file (a previous run manifest also works)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub dataset_content: Option<PathBuf>,
    #[arg(long)]
    pub dataset_cites: Option<PathBuf>,
    /// Model variant
    #[arg(long, value_enum)]
    pub variant: Option<Variant>,
    /// Embedding dimension
    #[arg(long)]
    pub dim: Option<usize>,
    /// Zero-coefficient oversampling factor
    #[arg(long)]
    pub k: Option<u32>,
    /// Minimum co-occurrence count kept for factorization
    #[arg(long)]
    pub x_min: Option<f64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    /// Walks per node
    #[arg(long)]
    pub walks: Option<usize>,
    #[arg(long)]
    pub walk_length: Option<usize>,
    #[arg(long)]
    pub window: Option<usize>,
    /// Base seed for every random choice in the run
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (1 = single-threaded reference mode, 0 = all cores)
    #[arg(long)]
    pub threads: Option<usize>,
    /// Representation mode: u_only | sum | concat | text_only | full
    #[arg(long)]
    pub mode: Option<String>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Directory for cached co-occurrence matrices (default: <out>/cache)
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
}

impl CommonArgs {
    /// Layer flag overrides on top of the config file (or defaults).
    pub fn resolve(&self, base: RunConfig) -> RunConfig {
        let mut cfg = base;
        if let Some(v) = &self.dataset_content {
            cfg.dataset_content = v.clone();
        }
        if let Some(v) = &self.dataset_cites {
            cfg.dataset_cites = v.clone();
        }
        if let Some(v) = self.variant {
            cfg.variant = v;
        }
        if let Some(v) = self.dim {
            cfg.gvnr.dim = v;
        }
        if let Some(v) = self.k {
            cfg.gvnr.k = v;
        }
        if let Some(v) = self.x_min {
            cfg.gvnr.x_min = v;
        }
        if let Some(v) = self.epochs {
            cfg.gvnr.epochs = v;
        }
        if let Some(v) = self.lr {
            cfg.gvnr.learning_rate = v;
        }
        if let Some(v) = self.walks {
            cfg.walk.walks_per_node = v;
        }
        if let Some(v) = self.walk_length {
            cfg.walk.walk_length = v;
        }
        if let Some(v) = self.window {
            cfg.walk.window = v;
        }
        if let Some(v) = self.seed {
            cfg.walk.seed = v;
            cfg.gvnr.seed = v;
        }
        if let Some(v) = self.threads {
            cfg.threads = v;
        }
        if let Some(v) = &self.mode {
            cfg.mode = v.clone();
        }
        if let Some(v) = &self.out {
            cfg.out = v.clone();
        }
        if let Some(v) = &self.cache_dir {
            cfg.cache_dir = Some(v.clone());
        }
        if cfg.mode.is_empty() {
            cfg.mode = match cfg.variant {
                Variant::Gvnr => "concat".into(),
                Variant::GvnrT => "full".into(),
            };
        }
        cfg
    }
}
