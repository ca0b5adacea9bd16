//! Command-line front end. Every subcommand is a thin wrapper over library
//! calls; exit code 0 on success, 2 on validation errors, 1 otherwise.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use log::info;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use hawk_core::pipeline::evaluate_verdicts;
use hawk_core::robustness::PARTITION_SIZE;
use hawk_core::{
    ban_cycle_csv, ban_cycle_report, dataset_samples, evaluate_predictions, robustness_sweep, train_pipeline,
    CheatReport, CoreError, EvaluationReport, ModelBundle, PipelineConfig,
};
use hawk_features::{extract_match, rank_features_mannwhitney, FeatureError, StructuredVector, FEATURE_NAMES};
use hawk_replay::io::{file_stem, json_files, load_dataset, read_labels, read_match, write_dataset, LABELS_DIR, MATCHES_DIR};
use hawk_replay::synth::{generate_corpus, CorpusSpec, ProfileKind};
use hawk_replay::{split_dataset, LabelSet, MatchRecord, ReplayError, SplitRatios, SteamId};

use crate::api::{detect_report, serve, ServeConfig};
use crate::error::ServiceError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("io error at {path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error(transparent)]
    Replay(#[from] ReplayError),
    #[error(transparent)]
    Features(#[from] FeatureError),
    #[error(transparent)]
    Service(#[from] ServiceError),
}

impl CliError {
    fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        let validation = match self {
            CliError::Invalid(_) => true,
            CliError::Io { .. } => false,
            CliError::Core(e) => e.is_validation(),
            CliError::Replay(e) => !matches!(e, ReplayError::Io { .. }),
            CliError::Features(e) => !matches!(e, FeatureError::Shape(_)),
            CliError::Service(e) => e.status().is_client_error(),
        };
        if validation {
            2
        } else {
            1
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "hawk", version, about = "Behavioral cheat detection for match replays")]
pub struct Cli {
    /// JSON config file with `corpus`, `pipeline`, `split`, `splitByDate` and `partitionSize` sections.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for generation, splitting and training.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic labeled corpus.
    Synth(SynthArgs),
    /// Extract temporal streams and structured features.
    Extract(ExtractArgs),
    /// Train the full pipeline and save the model bundle.
    Train(TrainArgs),
    /// Write a cheat report for every match.
    Detect(DetectArgs),
    /// Score predictions against labels.
    Eval(EvalArgs),
    /// Date-partitioned robustness sweep.
    Robustness(RobustnessArgs),
    /// Daily and cumulative ban counts.
    Bancycle(BancycleArgs),
    /// Run the HTTP service.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub matches: Option<usize>,
    #[arg(long)]
    pub players: Option<usize>,
    #[arg(long)]
    pub rounds: Option<u32>,
    /// Cheaters per match, e.g. `aimbot:2` or `aimbot:1,wallhack:0.5`.
    #[arg(long)]
    pub cheaters: Option<String>,
    #[arg(long)]
    pub sophistication: Option<f64>,
    #[arg(long)]
    pub boosting: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Separate validation corpus; without it the data is split.
    #[arg(long)]
    pub validation: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Dataset directory, directory of match files, or a single match file.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Directory of reports, a `.jsonl` of reports, or a CSV with `matchId,steamId,pred[,score]`.
    #[arg(long)]
    pub pred: PathBuf,
    /// Dataset directory or directory of label files.
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RobustnessArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub validation: PathBuf,
    #[arg(long)]
    pub test: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub partition_size: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BancycleArgs {
    /// Directory of reports written by `detect`.
    #[arg(long)]
    pub reports: PathBuf,
    /// Dataset directory whose labels carry official ban dates.
    #[arg(long)]
    pub labels: PathBuf,
    /// Output prefix; writes `<out>.csv` and `<out>.json`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// Defaults to `HAWK_DATA_DIR`, then `./hawk-data`.
    #[arg(long)]
    pub data_dir: Option<PathBuf>,
    /// Defaults to `HAWK_BIND`, then `127.0.0.1:8080`.
    #[arg(long)]
    pub bind: Option<String>,
    /// Model bundle directory; defaults to `<data-dir>/model`.
    #[arg(long)]
    pub model: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct HawkConfig {
    pub corpus: CorpusSpec,
    pub pipeline: PipelineConfig,
    pub split: SplitRatios,
    pub split_by_date: bool,
    pub partition_size: usize,
}

impl Default for HawkConfig {
    fn default() -> Self {
        HawkConfig {
            corpus: CorpusSpec::default(),
            pipeline: PipelineConfig::desk(),
            split: SplitRatios::default(),
            split_by_date: false,
            partition_size: PARTITION_SIZE,
        }
    }
}

pub fn load_config(path: Option<&Path>, seed: Option<u64>) -> CliResult<HawkConfig> {
    let mut cfg = match path {
        None => HawkConfig::default(),
        Some(p) => {
            let bytes = fs::read(p).map_err(|e| CliError::io(p, e))?;
            let mut de = serde_json::Deserializer::from_slice(&bytes);
            serde_path_to_error::deserialize(&mut de)
                .map_err(|e| CliError::Invalid(format!("{}: at `{}`: {}", p.display(), e.path(), e.inner())))?
        }
    };
    if let Some(s) = seed {
        cfg.pipeline = cfg.pipeline.with_seed(s);
    }
    Ok(cfg)
}

pub fn parse_cheaters(s: &str) -> CliResult<Vec<(ProfileKind, f64)>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|part| {
            let (kind, rate) = part.split_once(':').unwrap_or((part, "1"));
            let kind = ProfileKind::parse(kind.trim())
                .ok_or_else(|| CliError::Invalid(format!("unknown cheater kind {kind:?}")))?;
            let rate: f64 = rate
                .trim()
                .parse()
                .map_err(|_| CliError::Invalid(format!("bad cheater count {rate:?}")))?;
            if !rate.is_finite() || rate < 0.0 {
                return Err(CliError::Invalid(format!("cheater count {rate} must be non-negative")));
            }
            Ok((kind, rate))
        })
        .collect()
}

fn write_json<T: Serialize>(path: &Path, v: &T) -> CliResult<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    let bytes = serde_json::to_vec_pretty(v).map_err(|e| CliError::Invalid(e.to_string()))?;
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn write_text(path: &Path, s: &str) -> CliResult<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    fs::write(path, s).map_err(|e| CliError::io(path, e))
}

fn load_labeled(dir: &Path) -> CliResult<Vec<(MatchRecord, LabelSet)>> {
    let data = load_dataset(dir)?;
    if data.is_empty() {
        return Err(CliError::Invalid(format!("no matches under {}", dir.join(MATCHES_DIR).display())));
    }
    Ok(data)
}

/// Match files from a dataset directory, a plain directory, or one file.
fn match_inputs(path: &Path) -> CliResult<Vec<PathBuf>> {
    if path.is_file() {
        return Ok(vec![path.to_path_buf()]);
    }
    let sub = path.join(MATCHES_DIR);
    let files = if sub.is_dir() { json_files(&sub)? } else { json_files(path)? };
    if files.is_empty() {
        return Err(CliError::Invalid(format!("no match files under {}", path.display())));
    }
    Ok(files)
}

fn label_map(path: &Path) -> CliResult<HashMap<(String, SteamId), bool>> {
    let sub = path.join(LABELS_DIR);
    let dir = if sub.is_dir() { sub } else { path.to_path_buf() };
    let mut out = HashMap::new();
    for f in json_files(&dir)? {
        let l = read_labels(&f)?;
        for p in &l.labels {
            out.insert((l.match_id.clone(), p.steam_id), p.cheater);
        }
    }
    if out.is_empty() {
        return Err(CliError::Invalid(format!("no labels under {}", dir.display())));
    }
    Ok(out)
}

fn read_reports(path: &Path) -> CliResult<Vec<CheatReport>> {
    let parse = |p: &Path, bytes: &[u8]| {
        serde_json::from_slice::<CheatReport>(bytes)
            .map_err(|e| CliError::Invalid(format!("{}: {e}", p.display())))
    };
    if path.is_dir() {
        let mut out = Vec::new();
        for f in json_files(path)? {
            let bytes = fs::read(&f).map_err(|e| CliError::io(&f, e))?;
            out.push(parse(&f, &bytes)?);
        }
        return Ok(out);
    }
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| parse(path, l.as_bytes()))
        .collect()
}

pub fn run(cli: Cli) -> CliResult<()> {
    let cfg = load_config(cli.config.as_deref(), cli.seed)?;
    let seed = cli.seed.unwrap_or(cfg.pipeline.seed);
    match cli.command {
        Command::Synth(a) => synth(a, cfg, seed),
        Command::Extract(a) => extract(a, &cfg),
        Command::Train(a) => train(a, &cfg, seed),
        Command::Detect(a) => detect(a),
        Command::Eval(a) => eval(a),
        Command::Robustness(a) => robustness(a, &cfg),
        Command::Bancycle(a) => bancycle(a),
        Command::Serve(a) => serve_cmd(a),
    }
}

fn synth(a: SynthArgs, cfg: HawkConfig, seed: u64) -> CliResult<()> {
    let mut spec = cfg.corpus;
    if let Some(v) = a.matches {
        spec.matches = v;
    }
    if let Some(v) = a.players {
        spec.players = v;
    }
    if let Some(v) = a.rounds {
        spec.rounds = v;
    }
    if let Some(v) = &a.cheaters {
        spec.cheaters = parse_cheaters(v)?;
    }
    if let Some(v) = a.sophistication {
        spec.sophistication = v;
    }
    if let Some(v) = a.boosting {
        spec.boosting = v;
    }
    let data = generate_corpus(&spec, seed)?;
    write_dataset(&a.out, &data)?;
    let cheaters: usize = data.iter().map(|(_, l)| l.labels.iter().filter(|p| p.cheater).count()).sum();
    println!("wrote {} matches with {cheaters} cheaters to {}", data.len(), a.out.display());
    Ok(())
}

fn csv_cell(v: f64, missing: bool) -> String {
    if missing {
        String::new()
    } else {
        format!("{v}")
    }
}

fn extract(a: ExtractArgs, cfg: &HawkConfig) -> CliResult<()> {
    let data = load_labeled(&a.data)?;
    fs::create_dir_all(&a.out).map_err(|e| CliError::io(&a.out, e))?;
    let mut jsonl = String::new();
    let mut csv = format!("matchId,steamId,cheater,{}\n", FEATURE_NAMES.join(","));
    let mut ranked = Vec::new();
    for (m, l) in &data {
        let f = extract_match(m, &cfg.pipeline.features)?;
        jsonl.push_str(&serde_json::to_string(&f).map_err(|e| CliError::Invalid(e.to_string()))?);
        jsonl.push('\n');
        for p in &f.players {
            let cheater = l.is_cheater(p.steam_id);
            let cells: Vec<String> = p.v28.iter().zip(&p.mask).map(|(v, m)| csv_cell(*v, *m)).collect();
            csv.push_str(&format!("{},{},{},{}\n", m.match_id, p.steam_id, cheater, cells.join(",")));
            ranked.push((StructuredVector::new(p.v28.clone(), p.mask.clone())?, cheater));
        }
    }
    write_text(&a.out.join("features.jsonl"), &jsonl)?;
    write_text(&a.out.join("structured.csv"), &csv)?;
    if ranked.iter().any(|r| r.1) && ranked.iter().any(|r| !r.1) {
        let ranks = rank_features_mannwhitney(&ranked)?;
        let mut out = String::from("feature,u,p,nHonest,nCheater\n");
        for r in &ranks {
            out.push_str(&format!("{},{},{},{},{}\n", r.feature, r.u, r.p, r.n_honest, r.n_cheater));
        }
        write_text(&a.out.join("ranking.csv"), &out)?;
    }
    println!("extracted {} players from {} matches", ranked.len(), data.len());
    Ok(())
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct SplitManifest {
    train: Vec<String>,
    validation: Vec<String>,
    test: Vec<String>,
}

fn ids(v: &[(MatchRecord, LabelSet)]) -> Vec<String> {
    v.iter().map(|(m, _)| m.match_id.clone()).collect()
}

fn print_eval(report: &EvaluationReport) {
    let f = |v: Option<f64>| v.map(|x| format!("{x:.3}")).unwrap_or_else(|| "n/a".into());
    for (name, e) in &report.subsystems {
        println!(
            "{name:9} accuracy {} recall {} npv {} auc {} oei {}",
            f(e.metrics.accuracy),
            f(e.metrics.recall),
            f(e.metrics.npv),
            f(e.auc),
            f(e.metrics.oei)
        );
    }
}

fn train(a: TrainArgs, cfg: &HawkConfig, seed: u64) -> CliResult<()> {
    let data = load_labeled(&a.data)?;
    let (train, validation, test) = match &a.validation {
        Some(v) => (data, load_labeled(v)?, Vec::new()),
        None => {
            let s = split_dataset(data, cfg.split, cfg.split_by_date, seed)?;
            (s.train, s.validation, s.test)
        }
    };
    let f = &cfg.pipeline.features;
    let bundle = train_pipeline(&dataset_samples(&train, f)?, &dataset_samples(&validation, f)?, &cfg.pipeline)?;
    bundle.save(&a.out)?;
    write_json(
        &a.out.join("split.json"),
        &SplitManifest {
            train: ids(&train),
            validation: ids(&validation),
            test: ids(&test),
        },
    )?;
    println!("model {} saved to {}", bundle.version, a.out.display());
    if !test.is_empty() {
        let report = bundle.evaluate(&dataset_samples(&test, f)?)?;
        write_json(&a.out.join("evaluation.json"), &report)?;
        print_eval(&report);
    }
    Ok(())
}

fn detect(a: DetectArgs) -> CliResult<()> {
    let bundle = ModelBundle::load(&a.model)?;
    fs::create_dir_all(&a.out).map_err(|e| CliError::io(&a.out, e))?;
    let (mut reports, mut flagged) = (0, 0);
    for f in match_inputs(&a.data)? {
        let m = read_match(&f)?;
        let stored = detect_report(&bundle, &m)?;
        flagged += stored.report.flagged().count();
        write_json(&a.out.join(format!("{}.json", file_stem(&m.match_id))), &stored.report)?;
        reports += 1;
    }
    println!("{reports} reports, {flagged} flagged players, written to {}", a.out.display());
    Ok(())
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct PredRow {
    match_id: String,
    steam_id: u64,
    pred: u8,
    score: Option<f64>,
}

fn eval(a: EvalArgs) -> CliResult<()> {
    let labels = label_map(&a.labels)?;
    let label_of = |m: &str, s: SteamId| {
        labels
            .get(&(m.to_string(), s))
            .copied()
            .ok_or_else(|| CliError::Invalid(format!("no label for player {s} of match {m}")))
    };
    let is_csv = a.pred.extension().is_some_and(|e| e == "csv");
    let report = if is_csv {
        let mut rdr = csv::Reader::from_path(&a.pred).map_err(|e| CliError::io(&a.pred, e))?;
        let (mut pred, mut scores, mut y) = (Vec::new(), Vec::new(), Vec::new());
        for row in rdr.deserialize::<PredRow>() {
            let row = row.map_err(|e| CliError::Invalid(format!("{}: {e}", a.pred.display())))?;
            y.push(label_of(&row.match_id, SteamId(row.steam_id))?);
            pred.push(row.pred != 0);
            scores.push(row.score.unwrap_or(row.pred as f64));
        }
        let e = evaluate_predictions(&pred, &scores, &y);
        EvaluationReport {
            players: y.len(),
            cheaters: y.iter().filter(|v| **v).count(),
            subsystems: [("hawk".to_string(), e)].into_iter().collect(),
        }
    } else {
        let (mut verdicts, mut y) = (Vec::new(), Vec::new());
        for r in read_reports(&a.pred)? {
            for p in r.players {
                y.push(label_of(&r.match_id, p.steam_id)?);
                verdicts.push(p);
            }
        }
        evaluate_verdicts(&verdicts, &y)
    };
    if report.players == 0 {
        return Err(CliError::Invalid("no predictions".into()));
    }
    print_eval(&report);
    if let Some(out) = &a.out {
        write_json(out, &report)?;
    }
    Ok(())
}

fn robustness(a: RobustnessArgs, cfg: &HawkConfig) -> CliResult<()> {
    let pool = load_labeled(&a.data)?;
    let val = load_labeled(&a.validation)?;
    let test = load_labeled(&a.test)?;
    let size = a.partition_size.unwrap_or(cfg.partition_size);
    let table = robustness_sweep(&pool, &val, &test, size, &cfg.pipeline)?;
    let csv = table.to_csv();
    write_text(&a.out, &csv)?;
    print!("{csv}");
    Ok(())
}

fn bancycle(a: BancycleArgs) -> CliResult<()> {
    let data = load_labeled(&a.labels)?;
    let labels: HashMap<&str, &LabelSet> = data.iter().map(|(m, l)| (m.match_id.as_str(), l)).collect();
    let mut engine = Vec::new();
    for r in read_reports(&a.reports)? {
        let Some(l) = labels.get(r.match_id.as_str()) else { continue };
        engine.extend(r.flagged().filter(|p| l.is_cheater(p.steam_id)).map(|_| r.created_utc));
    }
    let official: Vec<_> = data
        .iter()
        .flat_map(|(_, l)| l.labels.iter().filter_map(|p| p.ban_date_utc))
        .collect();
    let rows = ban_cycle_report(&engine, &official);
    let base = a.out.to_string_lossy().into_owned();
    write_text(Path::new(&format!("{base}.csv")), &ban_cycle_csv(&rows))?;
    write_json(Path::new(&format!("{base}.json")), &rows)?;
    println!("{} days, {} engine and {} official bans", rows.len(), engine.len(), official.len());
    Ok(())
}

fn serve_cmd(a: ServeArgs) -> CliResult<()> {
    let env = |k: &str| std::env::var(k).ok().filter(|v| !v.is_empty());
    let cfg = ServeConfig {
        data_dir: a
            .data_dir
            .or_else(|| env("HAWK_DATA_DIR").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("hawk-data")),
        model_dir: a.model,
        bind: a.bind.or_else(|| env("HAWK_BIND")).unwrap_or_else(|| "127.0.0.1:8080".into()),
        token: env("HAWK_TOKEN"),
    };
    info!("data directory {}", cfg.data_dir.display());
    let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::Io {
        path: "runtime".into(),
        message: e.to_string(),
    })?;
    rt.block_on(serve(cfg))?;
    Ok(())
}
