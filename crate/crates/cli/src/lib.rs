//! The `polysemy` command line: lexicon ingestion, corpus analysis, null-model
//! calibration and standalone breakpoint fits.

pub mod inputs;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use polysemy_core::analysis::{
    run_analysis, run_null_simulation, seed_purpose, AnalysisConfig, SourcePlan,
};
use polysemy_core::lexicon::{ContentCategory, SenseInventory};
use polysemy_core::pipeline::{speaker_streams, Lexicons};
use polysemy_core::report::{fmt_f64, nullsim_csv, render_analysis, Table};
use polysemy_core::stats::{
    bootstrap_breakpoint_ci, default_min_segment, fit_single_breakpoint, ArrowMode, LOWESS_FRAC, LOWESS_ITERS,
};

use inputs::{display_path, sha256_hex, Digests, InputDigest};

pub const MANIFEST: &str = "run_manifest.json";

#[derive(Debug, Parser)]
#[command(name = "polysemy", about = "Word-sense polysemy of child and adult speech over age")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert WordNet index.{noun,verb,adj,adv} files to a canonical TSV.
    IngestWordnet(IngestArgs),
    /// Count attested senses in SemCor tag files and write a canonical TSV.
    IngestSemcor(IngestArgs),
    /// Normalize a proper-noun list (one name per line).
    IngestNames(IngestArgs),
    /// Run the full analysis and write CSV tables plus a run manifest.
    Analyze(AnalyzeArgs),
    /// Replace children by pseudo-children resampled from adult speech.
    Nullsim(NullsimArgs),
    /// Fit a single breakpoint to a two-column (x,y) CSV.
    Breakpoint(BreakpointArgs),
    /// Print the version.
    Version,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Input directory or file.
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SourceArg {
    Separate,
    Wordnet,
    Semcor,
    Both,
}

impl From<SourceArg> for SourcePlan {
    fn from(s: SourceArg) -> Self {
        match s {
            SourceArg::Separate => SourcePlan::Separate,
            SourceArg::Wordnet => SourcePlan::WordNet,
            SourceArg::Semcor => SourcePlan::SemCor,
            SourceArg::Both => SourcePlan::Both,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ArrowArg {
    Exact,
    Normal,
}

impl From<ArrowArg> for ArrowMode {
    fn from(a: ArrowArg) -> Self {
        match a {
            ArrowArg::Exact => ArrowMode::Exact,
            ArrowArg::Normal => ArrowMode::Normal,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Corpus root holding .cha files; repeatable.
    #[arg(long = "corpus", required = true)]
    pub corpus: Vec<PathBuf>,
    /// WordNet index directory or canonical TSV.
    #[arg(long)]
    pub wordnet: Option<PathBuf>,
    /// SemCor tag-file directory, tag file, or canonical TSV.
    #[arg(long)]
    pub semcor: Option<PathBuf>,
    /// Proper-noun list.
    #[arg(long)]
    pub names: Option<PathBuf>,
    /// Extra tag-to-category mappings (TSV: tag, category).
    #[arg(long)]
    pub tag_map: Option<PathBuf>,
    /// Directory of tagger output used instead of %mor where present.
    #[arg(long)]
    pub tagged_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    /// Content tokens per sample.
    #[arg(long, default_value_t = 50)]
    pub n: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value_t = SourceArg::Separate)]
    pub source: SourceArg,
    /// Restrict samples to one category (noun, verb, adjective, adverb).
    #[arg(long)]
    pub category: Option<ContentCategory>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = ArrowArg::Exact)]
    pub arrow_mode: ArrowArg,
    #[arg(long)]
    pub out: PathBuf,
    /// Overwrite an output directory produced by a different configuration.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub inputs: InputArgs,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Also run each single-category control.
    #[arg(long, conflicts_with = "category")]
    pub per_category: bool,
    #[arg(long, default_value_t = 10)]
    pub segments: usize,
    #[arg(long, default_value_t = 100_000)]
    pub randomizations: usize,
    #[arg(long, default_value_t = 1000)]
    pub bootstrap: usize,
    #[arg(long, default_value_t = LOWESS_FRAC)]
    pub lowess_frac: f64,
    #[arg(long, default_value_t = LOWESS_ITERS)]
    pub lowess_iters: usize,
}

#[derive(Debug, Args)]
pub struct NullsimArgs {
    #[command(flatten)]
    pub inputs: InputArgs,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Number of simulation runs.
    #[arg(long, default_value_t = 50)]
    pub seeds: usize,
    /// Draw adult tokens with replacement.
    #[arg(long)]
    pub with_replacement: bool,
}

#[derive(Debug, Args)]
pub struct BreakpointArgs {
    /// CSV with x and y columns; a non-numeric first row is a header.
    pub input: PathBuf,
    /// Minimum points per segment; default max(3, ceil(0.15 n)).
    #[arg(long)]
    pub min_seg: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    pub bootstrap: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(anyhow::Error),
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Data(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data(e) => write!(f, "error: {e:#}"),
        }
    }
}

/// Parse `args` and run; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::IngestWordnet(a) => ingest_wordnet(&a),
        Command::IngestSemcor(a) => ingest_semcor(&a),
        Command::IngestNames(a) => ingest_names(&a),
        Command::Analyze(a) => analyze(&a),
        Command::Nullsim(a) => nullsim(&a),
        Command::Breakpoint(a) => breakpoint(&a),
        Command::Version => {
            println!("polysemy {}", env!("CARGO_PKG_VERSION"));
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn ingest_wordnet(a: &IngestArgs) -> Result<(), CliError> {
    let inv = inputs::load_wordnet(&a.input, &mut Digests::default())?;
    write_file(&a.out, &inv.export_tsv())?;
    println!("{} entries", inv.len());
    Ok(())
}

fn ingest_semcor(a: &IngestArgs) -> Result<(), CliError> {
    let (inv, diag) = inputs::load_semcor(&a.input, &mut Digests::default())?;
    write_file(&a.out, &inv.export_tsv())?;
    println!("{} entries", inv.len());
    if let Some(d) = diag {
        println!(
            "{} word forms, {} sense-tagged, {} with unmappable part of speech",
            d.word_forms, d.sense_tagged, d.unmappable_pos
        );
    }
    Ok(())
}

fn ingest_names(a: &IngestArgs) -> Result<(), CliError> {
    let names = inputs::load_name_list(&a.input, &mut Digests::default())?;
    let mut sorted: Vec<&String> = names.iter().collect();
    sorted.sort();
    let text: String = sorted.iter().map(|n| format!("{n}\n")).collect();
    write_file(&a.out, &text)?;
    println!("{} entries", sorted.len());
    Ok(())
}

// ---------------------------------------------------------------------------
// configuration and manifest

/// Everything that determines an output tree. Paths are recorded as given.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub corpus: Vec<String>,
    pub wordnet: Option<String>,
    pub semcor: Option<String>,
    pub names: Option<String>,
    pub tag_map: Option<String>,
    pub tagged_dir: Option<String>,
    pub n: usize,
    pub alpha: f64,
    pub source: &'static str,
    pub category: Option<&'static str>,
    pub per_category: bool,
    pub segments: usize,
    pub randomizations: usize,
    pub bootstrap_resamples: usize,
    pub seed: u64,
    pub arrow_mode: &'static str,
    pub lowess_frac: f64,
    pub lowess_iters: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub null_seeds: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub with_replacement: Option<bool>,
}

impl RunConfig {
    /// SHA-256 of the compact JSON serialization (fixed field order).
    pub fn hash(&self) -> String {
        sha256_hex(&serde_json::to_vec(self).expect("config serializes"))
    }

    pub fn analysis(&self, cfg_source: SourcePlan, arrow: ArrowMode, category: Option<ContentCategory>) -> AnalysisConfig {
        AnalysisConfig {
            n: self.n,
            category,
            per_category: self.per_category,
            source: cfg_source,
            alpha: self.alpha,
            segments: self.segments,
            randomizations: self.randomizations,
            bootstrap_resamples: self.bootstrap_resamples,
            seed: self.seed,
            arrow_mode: arrow,
            lowess_frac: self.lowess_frac,
            lowess_iters: self.lowess_iters,
        }
    }
}

fn path_str(p: &Path) -> String {
    display_path(p)
}

fn base_config(command: &'static str, i: &InputArgs, p: &ParamArgs) -> RunConfig {
    RunConfig {
        command,
        corpus: i.corpus.iter().map(|c| path_str(c)).collect(),
        wordnet: i.wordnet.as_deref().map(path_str),
        semcor: i.semcor.as_deref().map(path_str),
        names: i.names.as_deref().map(path_str),
        tag_map: i.tag_map.as_deref().map(path_str),
        tagged_dir: i.tagged_dir.as_deref().map(path_str),
        n: p.n,
        alpha: p.alpha,
        source: SourcePlan::from(p.source).as_str(),
        category: p.category.map(|c| c.name()),
        per_category: false,
        segments: 10,
        randomizations: 100_000,
        bootstrap_resamples: 1000,
        seed: p.seed,
        arrow_mode: ArrowMode::from(p.arrow_mode).as_str(),
        lowess_frac: LOWESS_FRAC,
        lowess_iters: LOWESS_ITERS,
        null_seeds: None,
        with_replacement: None,
    }
}

fn validate(cfg: &RunConfig) -> Result<(), CliError> {
    let bad = |m: &str| Err(CliError::Usage(m.to_string()));
    if cfg.n == 0 {
        return bad("--n must be at least 1");
    }
    if !(cfg.alpha > 0.0 && cfg.alpha <= 1.0) {
        return bad("--alpha must lie in (0, 1]");
    }
    if cfg.segments == 0 {
        return bad("--segments must be at least 1");
    }
    if !(cfg.lowess_frac > 0.0 && cfg.lowess_frac <= 1.0) {
        return bad("--lowess-frac must lie in (0, 1]");
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct OutputDigest {
    file: String,
    sha256: String,
}

#[derive(Debug, Serialize)]
struct SeedInfo {
    master: u64,
    /// Child seeds are the first output of ChaCha8 stream (purpose << 32 | index).
    purposes: SeedPurposes,
}

#[derive(Debug, Serialize)]
struct SeedPurposes {
    verb_test: u64,
    bootstrap: u64,
    null_model: u64,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    config_hash: String,
    config: &'a RunConfig,
    seeds: SeedInfo,
    inputs: Vec<InputDigest>,
    sessions_loaded: usize,
    sessions_rejected: Vec<(String, String)>,
    outputs: Vec<OutputDigest>,
    notes: &'a [String],
}

/// Refuse to reuse a directory holding another configuration's results.
fn prepare_out_dir(out: &Path, hash: &str, force: bool) -> Result<(), CliError> {
    if out.exists() && !out.is_dir() {
        return Err(CliError::Data(anyhow!("{} exists and is not a directory", out.display())));
    }
    if out.is_dir() && !force {
        let manifest = out.join(MANIFEST);
        if manifest.is_file() {
            let text = fs::read_to_string(&manifest).with_context(|| format!("reading {}", manifest.display()))?;
            let old: serde_json::Value =
                serde_json::from_str(&text).with_context(|| format!("parsing {}", manifest.display()))?;
            if old.get("config_hash").and_then(|h| h.as_str()) != Some(hash) {
                return Err(CliError::Data(anyhow!(
                    "{} holds results of a different configuration; pass --force to overwrite",
                    out.display()
                )));
            }
        } else if fs::read_dir(out).map(|mut d| d.next().is_some()).unwrap_or(false) {
            return Err(CliError::Data(anyhow!(
                "{} is not empty and has no {MANIFEST}; pass --force to overwrite",
                out.display()
            )));
        }
    }
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    Ok(())
}

struct Loaded {
    streams: Vec<polysemy_core::pipeline::SpeakerStream>,
    wordnet: Option<SenseInventory>,
    semcor: Option<SenseInventory>,
    digests: Digests,
    sessions: usize,
    rejected: Vec<(String, String)>,
}

impl Loaded {
    fn lexicons(&self) -> Lexicons<'_> {
        Lexicons {
            wordnet: self.wordnet.as_ref(),
            semcor: self.semcor.as_ref(),
        }
    }
}

fn load_inputs(i: &InputArgs) -> Result<Loaded, CliError> {
    let mut digests = Digests::default();
    let wordnet = i.wordnet.as_deref().map(|p| inputs::load_wordnet(p, &mut digests)).transpose()?;
    let semcor = match i.semcor.as_deref() {
        Some(p) => Some(inputs::load_semcor(p, &mut digests)?.0),
        None => None,
    };
    if wordnet.is_none() && semcor.is_none() {
        return Err(CliError::Usage("at least one of --wordnet and --semcor is required".into()));
    }
    let names = match i.names.as_deref() {
        Some(p) => inputs::load_name_list(p, &mut digests)?,
        None => Default::default(),
    };
    let table = inputs::load_tag_table(i.tag_map.as_deref(), &mut digests)?;
    let corpus = inputs::load_corpora(&i.corpus, i.tagged_dir.as_deref(), &mut digests)?;
    let streams = speaker_streams(&corpus.sessions, &names, &table);
    Ok(Loaded {
        streams,
        wordnet,
        semcor,
        digests,
        sessions: corpus.sessions.len(),
        rejected: corpus.rejected,
    })
}

fn write_outputs(
    out: &Path,
    cfg: &RunConfig,
    loaded: Loaded,
    files: &[(&str, String)],
    notes: &[String],
) -> Result<(), CliError> {
    let mut outputs = Vec::new();
    for (name, text) in files {
        write_file(&out.join(name), text)?;
        outputs.push(OutputDigest {
            file: name.to_string(),
            sha256: sha256_hex(text.as_bytes()),
        });
    }
    let manifest = Manifest {
        tool: "polysemy",
        version: env!("CARGO_PKG_VERSION"),
        config_hash: cfg.hash(),
        config: cfg,
        seeds: SeedInfo {
            master: cfg.seed,
            purposes: SeedPurposes {
                verb_test: seed_purpose::VERB_TEST,
                bootstrap: seed_purpose::BOOTSTRAP,
                null_model: seed_purpose::NULL_MODEL,
            },
        },
        inputs: loaded.digests.sorted(),
        sessions_loaded: loaded.sessions,
        sessions_rejected: loaded.rejected,
        outputs,
        notes,
    };
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    write_file(&out.join(MANIFEST), &text)?;
    Ok(())
}

fn analyze(a: &AnalyzeArgs) -> Result<(), CliError> {
    let mut cfg = base_config("analyze", &a.inputs, &a.params);
    cfg.per_category = a.per_category;
    cfg.segments = a.segments;
    cfg.randomizations = a.randomizations;
    cfg.bootstrap_resamples = a.bootstrap;
    cfg.lowess_frac = a.lowess_frac;
    cfg.lowess_iters = a.lowess_iters;
    validate(&cfg)?;
    let hash = cfg.hash();
    prepare_out_dir(&a.params.out, &hash, a.params.force)?;

    let loaded = load_inputs(&a.inputs)?;
    let acfg = cfg.analysis(a.params.source.into(), a.params.arrow_mode.into(), a.params.category);
    let out = run_analysis(&loaded.streams, loaded.lexicons(), &acfg).map_err(|e| CliError::Data(e.into()))?;

    let samples: usize = out.runs.iter().map(|r| r.value.samples().count()).sum();
    let files: Vec<(&str, String)> = render_analysis(&out, cfg.n).into_iter().collect();
    println!(
        "{} sessions loaded, {} rejected, {} speaker streams, {} samples of {} tokens",
        loaded.sessions,
        loaded.rejected.len(),
        loaded.streams.len(),
        samples,
        cfg.n
    );
    for note in &out.notes {
        println!("note: {note}");
    }
    write_outputs(&a.params.out, &cfg, loaded, &files, &out.notes)?;
    println!("wrote {}", a.params.out.display());
    Ok(())
}

fn nullsim(a: &NullsimArgs) -> Result<(), CliError> {
    let mut cfg = base_config("nullsim", &a.inputs, &a.params);
    cfg.null_seeds = Some(a.seeds);
    cfg.with_replacement = Some(a.with_replacement);
    validate(&cfg)?;
    if a.seeds == 0 {
        return Err(CliError::Usage("--seeds must be at least 1".into()));
    }
    let hash = cfg.hash();
    prepare_out_dir(&a.params.out, &hash, a.params.force)?;

    let loaded = load_inputs(&a.inputs)?;
    let acfg = cfg.analysis(a.params.source.into(), a.params.arrow_mode.into(), a.params.category);
    let report = run_null_simulation(&loaded.streams, loaded.lexicons(), &acfg, a.seeds, a.with_replacement)
        .map_err(|e| CliError::Data(e.into()))?;

    let mut notes = Vec::new();
    if report.rows.iter().all(|r| r.sessions_used == 0) {
        notes.push(format!("no session has an adult pool of at least {} content tokens", cfg.n));
    }
    let show = |v: Option<f64>| v.map(fmt_f64).unwrap_or_else(|| "n/a".into());
    println!("{} runs", report.rows.len());
    println!("arrow fire fraction: {}", show(report.arrow_fire_fraction()));
    println!("S+ within central 99% interval: {}", show(report.s_plus_within_fraction()));
    for note in &notes {
        println!("note: {note}");
    }
    let files = [("nullsim.csv", nullsim_csv(&report))];
    write_outputs(&a.params.out, &cfg, loaded, &files, &notes)?;
    println!("wrote {}", a.params.out.display());
    Ok(())
}

/// Numeric (x, y) pairs from a two-column CSV or whitespace-separated file.
pub fn read_xy(text: &str) -> anyhow::Result<Vec<(f64, f64)>> {
    let mut points = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line
            .split([',', '\t', ' '])
            .filter(|f| !f.is_empty())
            .collect();
        if fields.len() != 2 {
            anyhow::bail!("line {}: expected 2 columns, found {}", lineno + 1, fields.len());
        }
        match (fields[0].parse::<f64>(), fields[1].parse::<f64>()) {
            (Ok(x), Ok(y)) => points.push((x, y)),
            _ if points.is_empty() && lineno == 0 => continue,
            _ => anyhow::bail!("line {}: not a number pair", lineno + 1),
        }
    }
    Ok(points)
}

fn breakpoint(a: &BreakpointArgs) -> Result<(), CliError> {
    let text = fs::read_to_string(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let points = read_xy(&text).with_context(|| format!("in {}", a.input.display()))?;
    let min_seg = a.min_seg.unwrap_or_else(|| default_min_segment(points.len()));
    let fit = fit_single_breakpoint(&points, min_seg).map_err(|e| CliError::Data(e.into()))?;
    let ci = bootstrap_breakpoint_ci(&points, min_seg, a.bootstrap, a.seed);
    let mut t = Table::new(&[
        "n",
        "min_seg",
        "break_age",
        "break_index",
        "left_slope",
        "left_intercept",
        "right_slope",
        "right_intercept",
        "rss_total",
        "rss_single_line",
        "ci95_low",
        "ci95_high",
    ]);
    t.row([
        fit.n.to_string(),
        fit.min_seg.to_string(),
        fmt_f64(fit.break_age),
        fit.break_index.to_string(),
        fmt_f64(fit.left.slope),
        fmt_f64(fit.left.intercept),
        fmt_f64(fit.right.slope),
        fmt_f64(fit.right.intercept),
        fmt_f64(fit.rss_total),
        fmt_f64(fit.rss_single_line),
        ci.map(|c| fmt_f64(c.0)).unwrap_or_default(),
        ci.map(|c| fmt_f64(c.1)).unwrap_or_default(),
    ]);
    print!("{}", t.finish());
    Ok(())
}
