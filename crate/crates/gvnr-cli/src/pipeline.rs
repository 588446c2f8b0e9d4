//! Shared pipeline stages: dataset loading, co-occurrence caching, training,
//! representation assembly, and run manifests.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use gvnr::{
    count_cooccurrences, generate_walks, load_cora_format, train_gvnr, train_gvnr_t, CoocMatrix,
    Dataset, GvnrModel, GvnrTextModel, LoadReport, ModelFile, RepresentationMode, TextMode,
    TrainedModel,
};

use crate::config::{RunConfig, Variant};
use crate::CliError;

pub fn load_dataset(cfg: &RunConfig) -> Result<(Dataset, LoadReport), CliError> {
    let content = open(&cfg.dataset_content)?;
    let cites = open(&cfg.dataset_cites)?;
    load_cora_format(content, cites).map_err(CliError::from)
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::io(format!("cannot open {}: {e}", path.display())))
}

/// Key for the co-occurrence cache: dataset bytes and all walk parameters.
fn cooc_cache_key(cfg: &RunConfig) -> Result<String, CliError> {
    let mut hasher = Sha256::new();
    for path in [&cfg.dataset_content, &cfg.dataset_cites] {
        let bytes = fs::read(path)
            .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
        hasher.update((bytes.len() as u64).to_le_bytes());
        hasher.update(&bytes);
    }
    for v in [
        cfg.walk.walks_per_node as u64,
        cfg.walk.walk_length as u64,
        cfg.walk.window as u64,
        cfg.walk.seed,
    ] {
        hasher.update(v.to_le_bytes());
    }
    let digest = hasher.finalize();
    Ok(digest[..8].iter().map(|b| format!("{b:02x}")).collect())
}

/// Walk the graph and count co-occurrences, reusing a cached matrix when the
/// dataset and walk parameters match. Returns the matrix and whether the
/// cache was hit.
pub fn cooccurrences_cached(cfg: &RunConfig, data: &Dataset) -> Result<(CoocMatrix, bool), CliError> {
    let cache_dir = cfg
        .cache_dir
        .clone()
        .unwrap_or_else(|| cfg.out.join("cache"));
    let key = cooc_cache_key(cfg)?;
    let path = cache_dir.join(format!("cooc-{key}.txt"));
    if path.exists() {
        let x = CoocMatrix::parse_text(open(&path)?)?;
        if x.n() == data.len() {
            return Ok((x, true));
        }
    }
    let walks = generate_walks(data, &cfg.walk)?;
    let x = count_cooccurrences(&walks, data.len(), cfg.walk.window)?;
    fs::create_dir_all(&cache_dir)
        .map_err(|e| CliError::io(format!("cannot create {}: {e}", cache_dir.display())))?;
    let mut out = BufWriter::new(File::create(&path).map_err(|e| {
        CliError::io(format!("cannot write cache {}: {e}", path.display()))
    })?);
    x.write_text(&mut out)?;
    Ok((x, false))
}

pub enum TrainedVariant {
    Gvnr(TrainedModel<GvnrModel>),
    GvnrT(TrainedModel<GvnrTextModel>),
}

pub fn train_variant(cfg: &RunConfig, data: &Dataset, x: &CoocMatrix) -> Result<TrainedVariant, CliError> {
    match cfg.variant {
        Variant::Gvnr => Ok(TrainedVariant::Gvnr(train_gvnr(x, &cfg.gvnr)?)),
        Variant::GvnrT => Ok(TrainedVariant::GvnrT(train_gvnr_t(
            x,
            &data.bows,
            data.vocab_size,
            &cfg.gvnr,
        )?)),
    }
}

/// Per-node representations under the configured mode.
pub fn representations(
    model: &ModelFile,
    mode: &str,
    data: &Dataset,
) -> Result<Vec<Vec<f64>>, CliError> {
    match model {
        ModelFile::Gvnr(m) => {
            let mode: RepresentationMode = mode.parse()?;
            Ok((0..m.n()).map(|i| m.node_representation(i, mode)).collect())
        }
        ModelFile::GvnrText(m) => {
            let mode: TextMode = mode.parse()?;
            (0..m.n())
                .map(|i| m.text_representation(i, mode, &data.bows))
                .collect::<gvnr::Result<_>>()
                .map_err(CliError::from)
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub config: RunConfig,
    pub load_report: LoadReport,
    pub cooc_cache_hit: bool,
    pub epoch_losses: Vec<f64>,
    pub wall_time_secs: f64,
    pub outputs: Vec<PathBuf>,
}

pub struct TrainOutcome {
    pub model: ModelFile,
    pub manifest: Manifest,
}

/// Full training pipeline: load → walks/co-occurrences (cached) → train →
/// write model files and the run manifest into `cfg.out`.
pub fn run_train(cfg: &RunConfig) -> Result<TrainOutcome, CliError> {
    let started = Instant::now();
    let (data, load_report) = load_dataset(cfg)?;
    let (x, cache_hit) = cooccurrences_cached(cfg, &data)?;
    let trained = train_variant(cfg, &data, &x)?;

    fs::create_dir_all(&cfg.out)
        .map_err(|e| CliError::io(format!("cannot create {}: {e}", cfg.out.display())))?;
    let mut outputs = Vec::new();

    let (model, epoch_losses) = match trained {
        TrainedVariant::Gvnr(t) => (ModelFile::Gvnr(t.model), t.epoch_losses),
        TrainedVariant::GvnrT(t) => (ModelFile::GvnrText(t.model), t.epoch_losses),
    };

    let model_path = cfg.out.join("model.txt");
    {
        let mut out = BufWriter::new(create(&model_path)?);
        match &model {
            ModelFile::Gvnr(m) => m.write_raw(&mut out)?,
            ModelFile::GvnrText(m) => m.write_raw(&mut out)?,
        }
    }
    outputs.push(model_path);

    let reps = representations(&model, &cfg.mode, &data)?;
    let emb_path = cfg.out.join("embeddings.txt");
    gvnr::write_word2vec(BufWriter::new(create(&emb_path)?), &data.node_ids, &reps)?;
    outputs.push(emb_path);

    if let ModelFile::GvnrText(m) = &model {
        let word_ids: Vec<String> = (0..m.vocab_size()).map(|w| w.to_string()).collect();
        let word_vecs: Vec<Vec<f64>> = (0..m.vocab_size()).map(|w| m.w.row(w).to_vec()).collect();
        let words_path = cfg.out.join("words.txt");
        gvnr::write_word2vec(BufWriter::new(create(&words_path)?), &word_ids, &word_vecs)?;
        outputs.push(words_path);
    }

    let manifest = Manifest {
        command: "train".into(),
        config: cfg.clone(),
        load_report,
        cooc_cache_hit: cache_hit,
        epoch_losses,
        wall_time_secs: started.elapsed().as_secs_f64(),
        outputs,
    };
    write_manifest(&cfg.out, &manifest)?;
    Ok(TrainOutcome { model, manifest })
}

pub fn write_manifest(dir: &Path, manifest: &Manifest) -> Result<(), CliError> {
    let path = dir.join("manifest.json");
    let mut out = BufWriter::new(create(&path)?);
    serde_json::to_writer_pretty(&mut out, manifest)
        .map_err(|e| CliError::other(format!("manifest serialization: {e}")))?;
    out.write_all(b"\n")
        .map_err(|e| CliError::io(e.to_string()))?;
    Ok(())
}

pub fn create(path: &Path) -> Result<File, CliError> {
    File::create(path).map_err(|e| CliError::io(format!("cannot create {}: {e}", path.display())))
}

/// Load a raw model dump from `--model` (a file, or a directory holding
/// `model.txt`).
pub fn load_model(path: &Path) -> Result<ModelFile, CliError> {
    let file = if path.is_dir() {
        path.join("model.txt")
    } else {
        path.to_path_buf()
    };
    gvnr::read_raw_model(open(&file)?).map_err(CliError::from)
}
