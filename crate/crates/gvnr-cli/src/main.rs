//! Command-line pipeline: dataset loading, walk/co-occurrence generation with
//! caching, GVNR / GVNR-t training, text-only inference, the evaluation
//! protocols, and attention-weight export.

mod config;
mod pipeline;

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use gvnr::eval::{self, EvalReport, SettingStats};
use gvnr::rng::derive_seed;
use gvnr::{
    count_cooccurrences, generate_walks, mutual_attention_weights, train_gvnr, train_gvnr_t,
    LinkScorer, Matrix, ModelFile, QueryStrategy, RepresentationMode, WalkConfig,
};

use config::{CommonArgs, RunConfig, Variant};
use pipeline::Manifest;

/// Error carrying the process exit code: 2 for I/O and usage problems,
/// 1 for everything else.
#[derive(Debug)]
pub struct CliError {
    code: u8,
    msg: String,
}

impl CliError {
    fn io(msg: impl Into<String>) -> CliError {
        CliError {
            code: 2,
            msg: msg.into(),
        }
    }

    fn usage(msg: impl Into<String>) -> CliError {
        CliError {
            code: 2,
            msg: msg.into(),
        }
    }

    fn other(msg: impl Into<String>) -> CliError {
        CliError {
            code: 1,
            msg: msg.into(),
        }
    }
}

impl From<gvnr::Error> for CliError {
    fn from(e: gvnr::Error) -> CliError {
        let code = match &e {
            gvnr::Error::Io(_) => 2,
            _ => 1,
        };
        CliError {
            code,
            msg: e.to_string(),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "gvnr",
    about = "Node and document embeddings from random-walk co-occurrence factorization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a model and write embeddings, model dump and run manifest
    Train(TrainArgs),
    /// Embed unseen documents from text alone using a trained gvnr_t model
    Infer(InferArgs),
    /// Run an evaluation protocol
    #[command(subcommand)]
    Evaluate(EvaluateArgs),
    /// Emit mutual attention weights for a pair of documents
    Attend(AttendArgs),
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Write the dataset load report as JSON (`-` for stdout)
    #[arg(long)]
    load_report: Option<PathBuf>,
}

#[derive(Args)]
struct InferArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Trained gvnr_t model (directory or model.txt path)
    #[arg(long)]
    model: PathBuf,
    /// Documents to embed: `<id> <word flags/counts...>` per line, same
    /// vocabulary as training (a trailing class column is ignored)
    #[arg(long)]
    input: PathBuf,
    /// Output file for `<doc_id> f1 .. fd` lines (stdout if omitted)
    #[arg(long)]
    vectors_out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum EvaluateArgs {
    /// Transductive node classification over training fractions
    Classify(ProtocolArgs),
    /// Unseen-document classification: hide nodes, embed them from text
    Unseen(ProtocolArgs),
    /// Link prediction ROC AUC on held-out edges
    Linkpred(LinkpredArgs),
}

#[derive(Args)]
struct ProtocolArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Reuse a trained model (directory or model.txt) instead of training
    #[arg(long)]
    model: Option<PathBuf>,
    /// Training fractions: `0.1..0.5` (step 0.1) or `0.1,0.3,0.5`
    #[arg(long)]
    fracs: Option<String>,
    #[arg(long)]
    repeats: Option<usize>,
    /// Classifier L2 penalty
    #[arg(long)]
    l2: Option<f64>,
}

#[derive(Args)]
struct LinkpredArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Fraction of edges held out as test positives
    #[arg(long)]
    test_frac: Option<f64>,
    /// dot_bias or cosine
    #[arg(long)]
    scorer: Option<String>,
    #[arg(long)]
    repeats: Option<usize>,
}

#[derive(Args)]
struct AttendArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Trained gvnr_t model (directory or model.txt path)
    #[arg(long)]
    model: Option<PathBuf>,
    /// Word vectors in word2vec text format (alternative to --model)
    #[arg(long)]
    words: Option<PathBuf>,
    /// External id of the first document
    #[arg(long)]
    doc_a: String,
    /// External id of the second document
    #[arg(long)]
    doc_b: String,
    /// Token strings, one per vocabulary index (indices printed if omitted)
    #[arg(long)]
    vocab: Option<PathBuf>,
    /// mean or max_pool
    #[arg(long, default_value = "mean")]
    query_strategy: String,
    /// Output file (stdout if omitted)
    #[arg(long)]
    json_out: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.msg);
            ExitCode::from(e.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Train(args) => cmd_train(args),
        Command::Infer(args) => cmd_infer(args),
        Command::Evaluate(EvaluateArgs::Classify(args)) => cmd_evaluate_classify(args),
        Command::Evaluate(EvaluateArgs::Unseen(args)) => cmd_evaluate_unseen(args),
        Command::Evaluate(EvaluateArgs::Linkpred(args)) => cmd_evaluate_linkpred(args),
        Command::Attend(args) => cmd_attend(args),
    }
}

fn resolve_config(common: &CommonArgs) -> Result<RunConfig, CliError> {
    let base = match &common.config {
        Some(path) => {
            let file = File::open(path)
                .map_err(|e| CliError::io(format!("cannot open {}: {e}", path.display())))?;
            let value: serde_json::Value = serde_json::from_reader(BufReader::new(file))
                .map_err(|e| CliError::other(format!("bad config {}: {e}", path.display())))?;
            // a run manifest nests the config under "config"
            let cfg_value = value.get("config").cloned().unwrap_or(value);
            serde_json::from_value(cfg_value)
                .map_err(|e| CliError::other(format!("bad config {}: {e}", path.display())))?
        }
        None => RunConfig::default(),
    };
    let cfg = common.resolve(base);
    if cfg.dataset_content.as_os_str().is_empty() || cfg.dataset_cites.as_os_str().is_empty() {
        return Err(CliError::usage(
            "--dataset-content and --dataset-cites are required (or provide --config)",
        ));
    }
    init_threads(cfg.threads);
    Ok(cfg)
}

fn init_threads(threads: usize) {
    if threads > 0 {
        // ignore the error if a pool was already built
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
}

fn parse_fracs(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = |spec: &str| CliError::usage(format!("cannot parse fractions {spec:?}"));
    if let Some((a, b)) = spec.split_once("..") {
        let start: f64 = a.trim().parse().map_err(|_| bad(spec))?;
        let end: f64 = b.trim().parse().map_err(|_| bad(spec))?;
        if !(start > 0.0 && end < 1.0 && start <= end) {
            return Err(bad(spec));
        }
        let mut fracs = Vec::new();
        let mut f = start;
        while f <= end + 1e-9 {
            fracs.push((f * 10.0).round() / 10.0);
            f += 0.1;
        }
        Ok(fracs)
    } else {
        spec.split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| bad(spec)))
            .collect()
    }
}

fn cmd_train(args: TrainArgs) -> Result<(), CliError> {
    let cfg = resolve_config(&args.common)?;
    let outcome = pipeline::run_train(&cfg)?;
    if let Some(path) = &args.load_report {
        let json = serde_json::to_string_pretty(&outcome.manifest.load_report)
            .map_err(|e| CliError::other(e.to_string()))?;
        if path.as_os_str() == "-" {
            println!("{json}");
        } else {
            std::fs::write(path, json + "\n")
                .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))?;
        }
    }
    let losses = &outcome.manifest.epoch_losses;
    eprintln!(
        "trained {} in {:.1}s: loss {:.4} -> {:.4}, outputs in {}",
        cfg.variant.as_str(),
        outcome.manifest.wall_time_secs,
        losses.first().unwrap_or(&f64::NAN),
        losses.last().unwrap_or(&f64::NAN),
        cfg.out.display()
    );
    Ok(())
}

fn cmd_infer(args: InferArgs) -> Result<(), CliError> {
    init_threads(args.common.threads.unwrap_or(0));
    let model = match pipeline::load_model(&args.model)? {
        ModelFile::GvnrText(m) => m,
        ModelFile::Gvnr(_) => {
            return Err(CliError::other(
                "inference from text requires a gvnr_t model (this one has no word matrix)",
            ))
        }
    };
    let m = model.vocab_size();
    let input = File::open(&args.input)
        .map_err(|e| CliError::io(format!("cannot open {}: {e}", args.input.display())))?;
    let mut out: Box<dyn Write> = match &args.vectors_out {
        Some(path) => Box::new(BufWriter::new(pipeline::create(path)?)),
        None => Box::new(std::io::stdout().lock()),
    };
    for (lineno, line) in BufReader::new(input).lines().enumerate() {
        let lineno = lineno + 1;
        let line = line.map_err(|e| CliError::io(e.to_string()))?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        // id + m flags, optionally followed by a class column
        if fields.len() != m + 1 && fields.len() != m + 2 {
            return Err(CliError::other(format!(
                "line {lineno}: expected {} word columns, got {}",
                m,
                fields.len().saturating_sub(1)
            )));
        }
        let mut bow: gvnr::Bow = Vec::new();
        for (w, field) in fields[1..=m].iter().enumerate() {
            let count: f64 = field
                .parse()
                .map_err(|_| CliError::other(format!("line {lineno}: bad count {field:?}")))?;
            if count < 0.0 || !count.is_finite() {
                return Err(CliError::other(format!(
                    "line {lineno}: negative count {field:?}"
                )));
            }
            if count > 0.0 {
                bow.push((w as u32, count));
            }
        }
        let vec = model.infer_document(&bow)?;
        write!(out, "{}", fields[0]).map_err(|e| CliError::io(e.to_string()))?;
        for v in &vec {
            write!(out, " {v}").map_err(|e| CliError::io(e.to_string()))?;
        }
        writeln!(out).map_err(|e| CliError::io(e.to_string()))?;
    }
    Ok(())
}

fn write_report(cfg: &RunConfig, name: &str, report: &EvalReport) -> Result<(), CliError> {
    std::fs::create_dir_all(&cfg.out)
        .map_err(|e| CliError::io(format!("cannot create {}: {e}", cfg.out.display())))?;
    let json_path = cfg.out.join(format!("report-{name}.json"));
    let json = serde_json::to_string_pretty(report).map_err(|e| CliError::other(e.to_string()))?;
    std::fs::write(&json_path, json + "\n")
        .map_err(|e| CliError::io(format!("cannot write {}: {e}", json_path.display())))?;
    let table = report.to_table();
    let txt_path = cfg.out.join(format!("report-{name}.txt"));
    std::fs::write(&txt_path, &table)
        .map_err(|e| CliError::io(format!("cannot write {}: {e}", txt_path.display())))?;
    print!("{table}");
    Ok(())
}

fn evaluate_manifest(cfg: &RunConfig, command: &str, started: Instant) -> Result<(), CliError> {
    let (_, load_report) = pipeline::load_dataset(cfg)?;
    let manifest = Manifest {
        command: command.into(),
        config: cfg.clone(),
        load_report,
        cooc_cache_hit: false,
        epoch_losses: Vec::new(),
        wall_time_secs: started.elapsed().as_secs_f64(),
        outputs: Vec::new(),
    };
    let path = cfg
        .out
        .join(format!("manifest-{}.json", command.replace(' ', "-")));
    let mut out = BufWriter::new(pipeline::create(&path)?);
    serde_json::to_writer_pretty(&mut out, &manifest)
        .map_err(|e| CliError::other(e.to_string()))?;
    out.write_all(b"\n").map_err(|e| CliError::io(e.to_string()))?;
    Ok(())
}

fn cmd_evaluate_classify(args: ProtocolArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let mut cfg = resolve_config(&args.common)?;
    if let Some(r) = args.repeats {
        cfg.eval.repeats = r;
    }
    if let Some(l2) = args.l2 {
        cfg.eval.l2 = l2;
    }
    cfg.eval.fracs = match &args.fracs {
        Some(spec) => parse_fracs(spec)?,
        None if cfg.eval.fracs.is_empty() => eval::CLASSIFY_FRACS.to_vec(),
        None => cfg.eval.fracs.clone(),
    };

    let (data, _) = pipeline::load_dataset(&cfg)?;
    let model = match &args.model {
        Some(path) => pipeline::load_model(path)?,
        None => pipeline::run_train(&cfg)?.model,
    };
    let reps = pipeline::representations(&model, &cfg.mode, &data)?;
    let report = eval::classification_protocol(
        &reps,
        &data.labels,
        &cfg.eval.fracs,
        cfg.eval.repeats,
        cfg.gvnr.seed,
        cfg.eval.l2,
    )?;
    write_report(&cfg, "classify", &report)?;
    evaluate_manifest(&cfg, "evaluate classify", started)
}

fn cmd_evaluate_unseen(args: ProtocolArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let mut cfg = resolve_config(&args.common)?;
    if let Some(r) = args.repeats {
        cfg.eval.repeats = r;
    }
    if let Some(l2) = args.l2 {
        cfg.eval.l2 = l2;
    }
    cfg.eval.fracs = match &args.fracs {
        Some(spec) => parse_fracs(spec)?,
        None if cfg.eval.fracs.is_empty() => eval::UNSEEN_FRACS.to_vec(),
        None => cfg.eval.fracs.clone(),
    };

    let (data, _) = pipeline::load_dataset(&cfg)?;
    let report = eval::unseen_document_protocol(
        &data,
        &cfg.walk,
        &cfg.gvnr,
        &cfg.eval.fracs,
        cfg.eval.repeats,
        cfg.gvnr.seed,
        cfg.eval.l2,
    )?;
    write_report(&cfg, "unseen", &report)?;
    evaluate_manifest(&cfg, "evaluate unseen", started)
}

fn cmd_evaluate_linkpred(args: LinkpredArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let mut cfg = resolve_config(&args.common)?;
    if let Some(tf) = args.test_frac {
        cfg.eval.test_frac = tf;
    }
    if let Some(s) = &args.scorer {
        cfg.eval.scorer = s.clone();
    }
    if let Some(r) = args.repeats {
        cfg.eval.repeats = r;
    }
    let scorer = match cfg.eval.scorer.as_str() {
        "dot_bias" => LinkScorer::DotBias,
        "cosine" => LinkScorer::Cosine(cfg.mode.parse().unwrap_or(RepresentationMode::Concat)),
        other => return Err(CliError::usage(format!("unknown scorer {other:?}"))),
    };

    let (data, _) = pipeline::load_dataset(&cfg)?;
    let mut aucs = Vec::with_capacity(cfg.eval.repeats);
    for r in 0..cfg.eval.repeats {
        let run_seed = derive_seed(cfg.gvnr.seed, 0x6c70, r as u64);
        let split = eval::link_prediction_split(&data, cfg.eval.test_frac, run_seed)?;
        let walk_cfg = WalkConfig {
            seed: run_seed,
            ..cfg.walk
        };
        let gvnr_cfg = gvnr::GvnrConfig {
            seed: run_seed,
            ..cfg.gvnr
        };
        let walks = generate_walks(&split.train, &walk_cfg)?;
        let x = count_cooccurrences(&walks, split.train.len(), walk_cfg.window)?;
        let auc = match cfg.variant {
            Variant::Gvnr => {
                let fit = train_gvnr(&x, &gvnr_cfg)?;
                eval::link_prediction_protocol(&fit.model, &split, scorer)?.settings[0].mean
            }
            Variant::GvnrT => {
                let fit = train_gvnr_t(&x, &split.train.bows, split.train.vocab_size, &gvnr_cfg)?;
                eval::link_prediction_protocol_text(&fit.model, &split.train.bows, &split)?
                    .settings[0]
                    .mean
            }
        };
        aucs.push(auc);
    }
    let mean = aucs.iter().sum::<f64>() / aucs.len() as f64;
    let stddev = if aucs.len() > 1 {
        (aucs.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (aucs.len() - 1) as f64).sqrt()
    } else {
        0.0
    };
    let report = EvalReport::new(
        "link_prediction",
        "roc_auc",
        vec![SettingStats {
            setting: cfg.eval.test_frac,
            mean,
            stddev,
            repeats: aucs.len(),
        }],
        vec![
            ("seed".into(), cfg.gvnr.seed.to_string()),
            ("scorer".into(), cfg.eval.scorer.clone()),
            ("variant".into(), cfg.variant.as_str().into()),
        ],
    )?;
    write_report(&cfg, "linkpred", &report)?;
    evaluate_manifest(&cfg, "evaluate linkpred", started)
}

#[derive(Serialize)]
struct AttendedWord {
    token: String,
    weight: f64,
}

#[derive(Serialize)]
struct AttendRecord {
    doc_a: String,
    doc_b: String,
    query_strategy: String,
    words_a: Vec<AttendedWord>,
    words_b: Vec<AttendedWord>,
}

fn cmd_attend(args: AttendArgs) -> Result<(), CliError> {
    let cfg = resolve_config(&args.common)?;
    let (data, _) = pipeline::load_dataset(&cfg)?;
    let strategy: QueryStrategy = args.query_strategy.parse()?;

    let w: Matrix = match (&args.model, &args.words) {
        (Some(path), _) => match pipeline::load_model(path)? {
            ModelFile::GvnrText(m) => m.w,
            ModelFile::Gvnr(_) => {
                return Err(CliError::other(
                    "attention needs word embeddings; train with --variant gvnr_t",
                ))
            }
        },
        (None, Some(path)) => {
            let file = File::open(path)
                .map_err(|e| CliError::io(format!("cannot open {}: {e}", path.display())))?;
            let (_, vectors) = gvnr::read_word2vec(BufReader::new(file))?;
            Matrix::from_rows(vectors)?
        }
        (None, None) => return Err(CliError::usage("provide --model or --words")),
    };

    let tokens: Option<Vec<String>> = match &args.vocab {
        Some(path) => {
            let file = File::open(path)
                .map_err(|e| CliError::io(format!("cannot open {}: {e}", path.display())))?;
            Some(
                BufReader::new(file)
                    .lines()
                    .collect::<std::io::Result<_>>()
                    .map_err(|e| CliError::io(e.to_string()))?,
            )
        }
        None => None,
    };
    let token_of = |w: u32| -> String {
        match &tokens {
            Some(t) => t.get(w as usize).cloned().unwrap_or_else(|| w.to_string()),
            None => w.to_string(),
        }
    };

    let a = data
        .index_of(&args.doc_a)
        .ok_or_else(|| CliError::other(format!("unknown document id {:?}", args.doc_a)))?;
    let b = data
        .index_of(&args.doc_b)
        .ok_or_else(|| CliError::other(format!("unknown document id {:?}", args.doc_b)))?;
    let (weights_a, weights_b) =
        mutual_attention_weights(&data.bows[a], &data.bows[b], &w, strategy)?;

    let record = AttendRecord {
        doc_a: args.doc_a.clone(),
        doc_b: args.doc_b.clone(),
        query_strategy: args.query_strategy.clone(),
        words_a: data.bows[a]
            .iter()
            .zip(&weights_a)
            .map(|(&(w, _), &weight)| AttendedWord {
                token: token_of(w),
                weight,
            })
            .collect(),
        words_b: data.bows[b]
            .iter()
            .zip(&weights_b)
            .map(|(&(w, _), &weight)| AttendedWord {
                token: token_of(w),
                weight,
            })
            .collect(),
    };
    let json = serde_json::to_string_pretty(&record).map_err(|e| CliError::other(e.to_string()))?;
    match &args.json_out {
        Some(path) => std::fs::write(path, json + "\n")
            .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))?,
        None => println!("{json}"),
    }
    Ok(())
}
