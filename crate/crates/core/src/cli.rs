//! The `castmine` command line.
//!
//! Every output embeds the resolved configuration it was produced with, so a
//! file alone is enough to rerun it. Exit codes: 0 success, 1 I/O failure,
//! 2 usage or validation error.

use std::collections::{BTreeSet, HashSet};
use std::ffi::OsString;
use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{
    load_api_docs, load_frames, load_transcript, load_video_manifest, manifest_base, Document,
    VideoKind,
};
use crate::detect::{evaluate_ranking, rank_videos, score_videos, RankingEvaluation, ScoreOptions};
use crate::doclink::{
    evaluate_links, link_transcript, pooled_scores, threshold_partition, EvaluationTable,
    LinkResult, RelevanceJudgments, ThresholdPartition, DEFAULT_TAU,
};
use crate::error::Error;
use crate::topics::{
    preprocess_text, tune_topics, LdaParams, PreprocessOptions, TopicReport, DEFAULT_BETA,
    DEFAULT_ITERATIONS,
};
use crate::vectorspace::{Algorithm, TfidfIndex, Weighting, DEFAULT_BITS};

/// Environment variable holding the worker thread count (unset or 0: one per
/// core).
pub const WORKERS_ENV: &str = "CASTMINE_WORKERS";

const TRANSCRIPT_EXTENSIONS: &[&str] = &["txt", "vtt", "srt"];

#[derive(Debug, Parser)]
#[command(
    name = "castmine",
    version,
    about = "Screencast detection, topic mining and API doc linking"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Rank videos by consecutive-frame similarity.
    Detect(DetectArgs),
    /// Fit LDA over a text corpus and pick a topic count without overlap.
    Topics(TopicsArgs),
    /// Rank API documents against one transcript.
    Link(LinkArgs),
    /// Score a detection ranking against the manifest's labels.
    EvalDetect(EvalDetectArgs),
    /// Link a directory of transcripts and score against judgments.
    EvalLink(EvalLinkArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args, Serialize)]
struct DetectArgs {
    /// JSON-lines video manifest.
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long, value_enum, default_value_t = Algorithm::Cosine)]
    algorithm: Algorithm,
    /// Sampling interval in seconds.
    #[arg(long, default_value_t = 10.0)]
    interval: f64,
    /// Bits kept per colour channel.
    #[arg(long, default_value_t = DEFAULT_BITS, value_parser = clap::value_parser!(u8).range(1..=8))]
    bits: u8,
    /// Compare colour sets rather than colour counts.
    #[arg(long)]
    binary: bool,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Recorded for reproducibility; detection is not randomized.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args, Serialize)]
struct TopicsArgs {
    /// JSON-lines corpus of `{"id": ..., "text": ...}`.
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, default_value_t = 10)]
    kmax: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Document-topic prior; 50/K when omitted.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_BETA)]
    beta: f64,
    #[arg(long, default_value_t = DEFAULT_ITERATIONS)]
    iterations: usize,
    #[arg(long, default_value_t = 0.6)]
    lambda: f64,
    #[arg(long, default_value_t = 10)]
    top_n: usize,
    /// Keep only tokens that look like nouns.
    #[arg(long)]
    nouns_only: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct LinkArgs {
    /// Directory of API reference pages.
    #[arg(long)]
    docs: PathBuf,
    #[arg(long)]
    transcript: PathBuf,
    #[arg(long, default_value_t = 20)]
    top: usize,
    #[arg(long, default_value_t = DEFAULT_TAU)]
    tau: f64,
    /// Weight terms by raw counts instead of TF-IDF.
    #[arg(long)]
    raw_counts: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Recorded for reproducibility; linking is not randomized.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args, Serialize)]
struct EvalDetectArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Ranking CSV written by `detect`.
    #[arg(long)]
    ranks: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "20")]
    ks: Vec<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args, Serialize)]
struct EvalLinkArgs {
    #[arg(long)]
    docs: PathBuf,
    /// Directory of transcripts (.txt, .vtt, .srt); ids are file stems.
    #[arg(long)]
    transcripts: PathBuf,
    /// JSON-lines relevance judgments.
    #[arg(long)]
    judgments: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "3,5,10,20")]
    ks: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_TAU)]
    tau: f64,
    /// Rows per screencast in the rankings CSV.
    #[arg(long, default_value_t = 20)]
    top: usize,
    #[arg(long)]
    raw_counts: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Optional CSV of the top documents per screencast.
    #[arg(long)]
    rankings_out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// A failed command: message plus exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn invalid(message: impl Display) -> Self {
        Self {
            code: 2,
            message: message.to_string(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self {
            code: if e.is_io() { 1 } else { 2 },
            message: e.to_string(),
        }
    }
}

fn context(what: impl Display) -> impl FnOnce(Error) -> Failure {
    move |e| {
        let mut f = Failure::from(e);
        f.message = format!("{what}: {}", f.message);
        f
    }
}

#[derive(Serialize)]
struct RunConfig<'a, A: Serialize> {
    command: &'a str,
    version: &'a str,
    #[serde(flatten)]
    args: &'a A,
}

fn config_json<A: Serialize>(command: &str, args: &A) -> serde_json::Value {
    serde_json::to_value(RunConfig {
        command,
        version: env!("CARGO_PKG_VERSION"),
        args,
    })
    .expect("config serializes")
}

/// Runs the CLI on `argv` (including the program name) and returns the exit
/// code. Results go to `--out` files or `stdout`; the one-line summary goes to
/// `stdout`, or to `stderr` when `stdout` carries the results.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };

    let pool = match worker_pool() {
        Ok(p) => p,
        Err(f) => return report(f, stderr),
    };
    let outcome = pool.install(|| match &cli.command {
        Command::Detect(a) => detect(a),
        Command::Topics(a) => topics(a),
        Command::Link(a) => link(a),
        Command::EvalDetect(a) => eval_detect(a),
        Command::EvalLink(a) => eval_link(a),
    });
    let out_path = match &cli.command {
        Command::Detect(a) => &a.out,
        Command::Topics(a) => &a.out,
        Command::Link(a) => &a.out,
        Command::EvalDetect(a) => &a.out,
        Command::EvalLink(a) => &a.out,
    };

    let (body, summary) = match outcome {
        Ok(v) => v,
        Err(f) => return report(f, stderr),
    };
    let written = match out_path {
        Some(path) => std::fs::write(path, &body)
            .map_err(|e| {
                Failure::from(Error::Io {
                    path: path.clone(),
                    source: e,
                })
            })
            .map(|_| writeln!(stdout, "{summary}")),
        None => stdout
            .write_all(body.as_bytes())
            .map_err(|e| {
                Failure::from(Error::Io {
                    path: PathBuf::from("<stdout>"),
                    source: e,
                })
            })
            .map(|_| writeln!(stderr, "{summary}")),
    };
    match written {
        Ok(_) => 0,
        Err(f) => report(f, stderr),
    }
}

fn report(f: Failure, stderr: &mut dyn Write) -> i32 {
    let _ = writeln!(stderr, "error: {}", f.message);
    f.code
}

fn worker_pool() -> Result<rayon::ThreadPool, Failure> {
    let threads = match std::env::var(WORKERS_ENV) {
        Ok(v) if !v.trim().is_empty() => v.trim().parse::<usize>().map_err(|_| {
            Failure::invalid(format!(
                "{WORKERS_ENV} must be a non-negative integer, got {v:?}"
            ))
        })?,
        _ => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Failure {
            code: 1,
            message: format!("cannot start worker pool: {e}"),
        })
}

fn to_json(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON value serializes");
    s.push('\n');
    s
}

fn check_ks(ks: &[usize]) -> Result<(), Failure> {
    if ks.is_empty() || ks.contains(&0) {
        return Err(Failure::invalid(
            "--ks needs one or more cutoffs, each at least 1",
        ));
    }
    Ok(())
}

fn check_tau(tau: f64) -> Result<(), Failure> {
    if !tau.is_finite() {
        return Err(Failure::invalid(format!("--tau must be finite, got {tau}")));
    }
    Ok(())
}

type Outcome = Result<(String, String), Failure>;

#[derive(Debug, Serialize, Deserialize)]
struct RankRow {
    video_id: String,
    algorithm: Algorithm,
    score: f64,
    rank: usize,
}

fn detect(a: &DetectArgs) -> Outcome {
    if !(a.interval.is_finite() && a.interval > 0.0) {
        return Err(Failure::invalid(format!(
            "--interval must be positive, got {}",
            a.interval
        )));
    }
    if a.binary && a.algorithm == Algorithm::Lsi {
        return Err(Failure::invalid(
            "--binary applies to jaccard and cosine only",
        ));
    }
    let records = load_video_manifest(&a.manifest)?;
    if records.is_empty() {
        return Err(Failure::invalid("manifest lists no videos"));
    }
    let base = manifest_base(&a.manifest);
    let seqs = records
        .par_iter()
        .map(|r| {
            let mut seq =
                load_frames(&r.frame_dir_in(&base), a.interval, a.bits).map_err(context(&r.id))?;
            seq.video_id = r.id.clone();
            Ok(seq)
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    let opts = ScoreOptions {
        algorithm: a.algorithm,
        binary: a.binary,
    };
    let scores = score_videos(&seqs, opts)?;
    let order = rank_videos(&scores)?;
    let rows: Vec<RankRow> = order
        .iter()
        .enumerate()
        .map(|(i, id)| {
            let s = scores
                .iter()
                .find(|s| &s.video_id == id)
                .expect("ranked id was scored");
            RankRow {
                video_id: id.clone(),
                algorithm: s.algorithm,
                score: s.score,
                rank: i + 1,
            }
        })
        .collect();

    let config = config_json("detect", a);
    let body = match a.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(format!("# config: {config}\n").into_bytes());
            for row in &rows {
                w.serialize(row).map_err(Failure::invalid)?;
            }
            String::from_utf8(w.into_inner().map_err(Failure::invalid)?).expect("CSV is UTF-8")
        }
        Format::Json => to_json(&serde_json::json!({ "config": config, "rankings": rows })),
    };
    let top = &rows[0];
    let summary = format!(
        "detect: ranked {} videos by {}; top {} ({:.4})",
        rows.len(),
        a.algorithm,
        top.video_id,
        top.score
    );
    Ok((body, summary))
}

fn read_ranks(path: &Path) -> Result<Vec<RankRow>, Failure> {
    let file = std::fs::File::open(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(file);
    let mut rows: Vec<RankRow> = Vec::new();
    for (i, row) in reader.deserialize().enumerate() {
        let row: RankRow = row.map_err(|e| {
            Failure::from(Error::Parse {
                line: i + 2,
                message: e.to_string(),
            })
        })?;
        rows.push(row);
    }
    rows.sort_by_key(|r| r.rank);
    Ok(rows)
}

fn eval_detect(a: &EvalDetectArgs) -> Outcome {
    check_ks(&a.ks)?;
    let records = load_video_manifest(&a.manifest)?;
    let rows = read_ranks(&a.ranks)?;
    let known: HashSet<&str> = records.iter().map(|r| r.id.as_str()).collect();
    if let Some(r) = rows.iter().find(|r| !known.contains(r.video_id.as_str())) {
        return Err(Failure::invalid(format!(
            "ranked video {} is not in the manifest",
            r.video_id
        )));
    }
    let relevant: HashSet<String> = records
        .iter()
        .filter(|r| r.kind == VideoKind::DevScreencast)
        .map(|r| r.id.clone())
        .collect();
    let ranked: Vec<String> = rows.into_iter().map(|r| r.video_id).collect();
    let evaluations =
        a.ks.iter()
            .map(|&k| evaluate_ranking(&ranked, &relevant, k))
            .collect::<Result<Vec<RankingEvaluation>, Error>>()?;

    let body = to_json(&serde_json::json!({
        "config": config_json("eval-detect", a),
        "videos": ranked.len(),
        "relevant": relevant.len(),
        "evaluations": evaluations,
    }));
    let last = evaluations.last().expect("ks is not empty");
    let summary = format!(
        "eval-detect: {} of {} development screencasts in the top {} (precision {:.4}, recall {:.4})",
        last.retrieved_relevant, last.total_relevant, last.k, last.precision, last.recall
    );
    Ok((body, summary))
}

#[derive(Debug, Deserialize)]
struct CorpusLine {
    id: String,
    text: String,
}

fn topics(a: &TopicsArgs) -> Outcome {
    if a.kmax < 2 {
        return Err(Failure::invalid(format!(
            "--kmax must be at least 2, got {}",
            a.kmax
        )));
    }
    if !(0.0..=1.0).contains(&a.lambda) {
        return Err(Failure::invalid(format!(
            "--lambda must be in [0, 1], got {}",
            a.lambda
        )));
    }
    if !(a.beta.is_finite() && a.beta > 0.0) {
        return Err(Failure::invalid(format!(
            "--beta must be positive, got {}",
            a.beta
        )));
    }
    if let Some(alpha) = a.alpha.filter(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(Failure::invalid(format!(
            "--alpha must be positive, got {alpha}"
        )));
    }
    if a.iterations == 0 || a.top_n == 0 {
        return Err(Failure::invalid(
            "--iterations and --top-n must be at least 1",
        ));
    }

    let text = std::fs::read_to_string(&a.corpus).map_err(|e| Error::Io {
        path: a.corpus.clone(),
        source: e,
    })?;
    let opts = PreprocessOptions {
        keep_nouns_only: a.nouns_only,
        ..PreprocessOptions::default()
    };
    let mut ids = BTreeSet::new();
    let mut corpus = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let doc: CorpusLine = serde_json::from_str(line).map_err(|e| Error::Parse {
            line: n + 1,
            message: e.to_string(),
        })?;
        if !ids.insert(doc.id.clone()) {
            return Err(Error::DuplicateId(doc.id).into());
        }
        corpus.push(preprocess_text(&doc.text, &opts));
    }
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus.into());
    }

    let params = LdaParams {
        k: a.kmax,
        alpha: a.alpha,
        beta: a.beta,
        iterations: a.iterations,
        seed: a.seed,
    };
    let tuned = tune_topics(&corpus, a.kmax, &params)?;
    let report = TopicReport::build(&tuned, a.lambda, a.top_n)?;
    let body = to_json(&serde_json::json!({
        "config": config_json("topics", a),
        "documents": corpus.len(),
        "report": report,
    }));
    let summary = format!(
        "topics: K = {} over {} documents{}",
        report.k,
        corpus.len(),
        if report.overlap {
            " (every candidate overlapped; fell back to 2)"
        } else {
            ""
        }
    );
    Ok((body, summary))
}

fn link_options() -> PreprocessOptions {
    PreprocessOptions {
        drop_terms: BTreeSet::new(),
        ..PreprocessOptions::default()
    }
}

/// A missing path is an I/O failure; an existing non-directory is a usage
/// error.
fn require_dir(path: &Path) -> Result<(), Failure> {
    match std::fs::metadata(path) {
        Ok(m) if m.is_dir() => Ok(()),
        Ok(_) => Err(Failure::invalid(format!(
            "{} is not a directory",
            path.display()
        ))),
        Err(e) => Err(Error::Io {
            path: path.to_path_buf(),
            source: e,
        }
        .into()),
    }
}

fn build_index(docs: &Path, raw_counts: bool) -> Result<TfidfIndex, Failure> {
    require_dir(docs)?;
    let opts = link_options();
    let docs: Vec<Document> = load_api_docs(docs)?
        .into_iter()
        .map(|d| d.tokenized(&opts))
        .collect();
    let weighting = if raw_counts {
        Weighting::RawCount
    } else {
        Weighting::TfIdf
    };
    Ok(TfidfIndex::build(&docs, weighting)?)
}

#[derive(Serialize)]
struct LinkRow<'a> {
    screencast_id: &'a str,
    doc_id: &'a str,
    score: f64,
    rank: usize,
}

fn link_rows(result: &LinkResult) -> impl Iterator<Item = LinkRow<'_>> {
    result.top().iter().enumerate().map(move |(i, d)| LinkRow {
        screencast_id: &result.screencast_id,
        doc_id: &d.doc_id,
        score: d.score,
        rank: i + 1,
    })
}

fn links_csv<'a>(
    config: &serde_json::Value,
    results: impl IntoIterator<Item = &'a LinkResult>,
) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(format!("# config: {config}\n").into_bytes());
    for r in results {
        for row in link_rows(r) {
            w.serialize(row).map_err(Failure::invalid)?;
        }
    }
    Ok(String::from_utf8(w.into_inner().map_err(Failure::invalid)?).expect("CSV is UTF-8"))
}

fn link(a: &LinkArgs) -> Outcome {
    check_tau(a.tau)?;
    if a.top == 0 {
        return Err(Failure::invalid("--top must be at least 1"));
    }
    let index = build_index(&a.docs, a.raw_counts)?;
    let transcript = load_transcript(&a.transcript)?.tokenized(&link_options());
    let result = link_transcript(&index, &transcript, a.top, a.tau)?;

    let config = config_json("link", a);
    let body = match a.format {
        Format::Json => to_json(&serde_json::json!({
            "config": config,
            "screencast_id": result.screencast_id,
            "documents": index.num_docs(),
            "above_threshold": result.above_threshold,
            "results": link_rows(&result).collect::<Vec<_>>(),
        })),
        Format::Csv => links_csv(&config, [&result])?,
    };
    let summary = format!(
        "link: {} of {} documents score at least {}; best {}",
        result.above_threshold,
        index.num_docs(),
        a.tau,
        result
            .top()
            .first()
            .map(|d| format!("{} ({:.4})", d.doc_id, d.score))
            .unwrap_or_else(|| "none".into())
    );
    Ok((body, summary))
}

fn transcript_files(dir: &Path) -> Result<Vec<PathBuf>, Failure> {
    require_dir(dir)?;
    let entries = std::fs::read_dir(dir).map_err(|e| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry
            .map_err(|e| Error::Io {
                path: dir.to_path_buf(),
                source: e,
            })?
            .path();
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase);
        if path.is_file() && ext.is_some_and(|e| TRANSCRIPT_EXTENSIONS.contains(&e.as_str())) {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

#[derive(Serialize)]
struct EvalLinkReport<'a> {
    config: serde_json::Value,
    documents: usize,
    evaluation: &'a EvaluationTable,
    threshold: &'a ThresholdPartition,
}

fn eval_link(a: &EvalLinkArgs) -> Outcome {
    check_ks(&a.ks)?;
    check_tau(a.tau)?;
    if a.top == 0 {
        return Err(Failure::invalid("--top must be at least 1"));
    }
    let judgments = RelevanceJudgments::load(&a.judgments)?;
    let index = build_index(&a.docs, a.raw_counts)?;
    let opts = link_options();

    let mut transcripts = Vec::new();
    for path in transcript_files(&a.transcripts)? {
        let doc = load_transcript(&path).map_err(context(path.display()))?;
        if judgments.get(&doc.id).is_none() {
            log::warn!("no judgments for transcript {}; skipped", doc.id);
            continue;
        }
        transcripts.push(doc.tokenized(&opts));
    }
    let found: HashSet<&str> = transcripts.iter().map(|d| d.id.as_str()).collect();
    for (id, _) in judgments
        .iter()
        .filter(|(id, _)| !found.contains(id.as_str()))
    {
        log::warn!("judged screencast {id} has no transcript");
    }
    if transcripts.is_empty() {
        return Err(Failure::invalid("no transcript has relevance judgments"));
    }

    let results = transcripts
        .iter()
        .map(|t| link_transcript(&index, t, a.top, a.tau).map_err(context(&t.id)))
        .collect::<Result<Vec<_>, Failure>>()?;
    let table = evaluate_links(&results, &judgments, &a.ks)?;
    let (all, relevant) = pooled_scores(&results, &judgments);
    let partition = threshold_partition(&all, &relevant, a.tau)?;

    let config = config_json("eval-link", a);
    if let Some(path) = &a.rankings_out {
        let csv = links_csv(&config, &results)?;
        std::fs::write(path, csv).map_err(|e| Error::Io {
            path: path.clone(),
            source: e,
        })?;
    }
    let body = to_json(
        &serde_json::to_value(EvalLinkReport {
            config,
            documents: index.num_docs(),
            evaluation: &table,
            threshold: &partition,
        })
        .expect("report serializes"),
    );
    let last = table.rows.last().expect("ks is not empty");
    let summary = format!(
        "eval-link: {} screencasts; top {} finds {} relevant documents; {} of {} scores below {}",
        table.screencasts, last.k, last.retrieved, partition.all_below, partition.all_total, a.tau
    );
    Ok((body, summary))
}
