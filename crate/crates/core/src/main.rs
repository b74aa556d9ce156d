//! Command-line front end: profile, qtypes, overlap, eval, factors,
//! correlate.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use domainsim::correlation::{build_report, Target};
use domainsim::corpus_io::{self, QueryOrigin};
use domainsim::error::{Error, Result};
use domainsim::factors::{weighted_jaccard, FactorVector};
use domainsim::manifest::Manifest;
use domainsim::pipeline::{compute_manifest_factors, factors_to_csv};
use domainsim::query_typing::{type_distribution, TypingConfig};
use domainsim::report::{to_json_string, write_atomic};
use domainsim::retrieval_eval::{ndcg_at_k, EvalDelta};
use domainsim::text_stats::{
    build_profile, term_frequencies, StopwordList, TermProfile, DEFAULT_TOP_K,
};

#[derive(Parser)]
#[command(
    name = "domainsim",
    version,
    about = "Domain-similarity diagnostics for retrieval corpora"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a top-K weighted vocabulary profile from a corpus or query JSONL file
    Profile {
        /// JSONL file with `_id`, `text`, and optional `title` per line
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOP_K)]
        top_k: usize,
        /// "builtin" or a path to a newline-separated stopword list
        #[arg(long, default_value = "builtin")]
        stopwords: String,
        /// Output path; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify queries and emit their type distribution
    Qtypes {
        /// Query JSONL file (`_id`, `text`)
        queries: PathBuf,
        /// Treat "how" as a WH word
        #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
        include_how: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Weighted Jaccard overlap between two saved profiles
    Overlap {
        profile_a: PathBuf,
        profile_b: PathBuf,
    },
    /// NDCG@k of a TREC run against qrels
    Eval {
        run: PathBuf,
        qrels: PathBuf,
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the factor table for every dataset in a manifest
    Factors {
        manifest: PathBuf,
        /// Output directory for factors.json and factors.csv
        #[arg(long)]
        out: PathBuf,
        /// Worker threads; defaults to the number of cores
        #[arg(long)]
        jobs: Option<usize>,
        /// Cross-entropy smoothing constant; overrides the manifest config
        #[arg(long)]
        alpha: Option<f64>,
        /// Emit only one of the two report formats
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Spearman-correlate a factor table against eval deltas
    Correlate {
        /// factors.json produced by `factors`
        #[arg(long)]
        factors: PathBuf,
        /// Delta table: JSON list or CSV `dataset,base,adapted`
        #[arg(long)]
        deltas: PathBuf,
        #[arg(long, default_value = "improvement")]
        target: String,
        /// Output directory for correlation.json and correlation.csv
        #[arg(long)]
        out: PathBuf,
        /// Emit only one of the two report formats
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn wants(format: Option<Format>, which: Format) -> bool {
    format.is_none() || format == Some(which)
}

fn load_stopwords(spec: &str) -> Result<StopwordList> {
    if spec == "builtin" {
        Ok(StopwordList::builtin())
    } else {
        StopwordList::from_file(Path::new(spec))
    }
}

fn emit(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => write_atomic(path, content.as_bytes()),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn load_profile(path: &Path) -> Result<TermProfile> {
    let content =
        std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    TermProfile::from_json(&content)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn load_deltas(path: &Path) -> Result<Vec<EvalDelta>> {
    let content = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    if path.extension().is_some_and(|e| e == "json") {
        return serde_json::from_str(&content)
            .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())));
    }
    let mut deltas = Vec::new();
    for (idx, line) in content.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (idx == 0 && line.starts_with("dataset")) {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < 3 {
            return Err(Error::parse(
                path,
                idx + 1,
                "expected at least 3 columns: dataset,base,adapted",
            ));
        }
        let base: f64 = fields[1].trim().parse().map_err(|_| {
            Error::parse(path, idx + 1, format!("non-numeric base {:?}", fields[1]))
        })?;
        let adapted: f64 = fields[2].trim().parse().map_err(|_| {
            Error::parse(path, idx + 1, format!("non-numeric adapted {:?}", fields[2]))
        })?;
        deltas.push(EvalDelta::from_means(fields[0].trim(), base, adapted));
    }
    if deltas.is_empty() {
        return Err(Error::InvalidInput(format!(
            "no delta rows in {}",
            path.display()
        )));
    }
    Ok(deltas)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Profile {
            input,
            top_k,
            stopwords,
            out,
        } => {
            if top_k < 1 {
                return Err(Error::usage("--top-k must be at least 1"));
            }
            let stopwords = load_stopwords(&stopwords)?;
            let docs = corpus_io::load_corpus(&input)?;
            let texts: Vec<String> = docs.docs.iter().map(|d| d.stat_text()).collect();
            let freq = term_frequencies(texts.iter().map(|t| t.as_str()), &stopwords);
            let profile = build_profile(&freq, top_k, &stopwords.version)?;
            emit(out.as_deref(), &profile.to_canonical_json())
        }
        Command::Qtypes {
            queries,
            include_how,
            out,
        } => {
            let set = corpus_io::load_queries(&queries, QueryOrigin::Test)?;
            let typing = TypingConfig { include_how };
            let dist = type_distribution(set.texts(), &typing)?;
            emit(out.as_deref(), &to_json_string(&dist)?)
        }
        Command::Overlap {
            profile_a,
            profile_b,
        } => {
            let a = load_profile(&profile_a)?;
            let b = load_profile(&profile_b)?;
            if a.k != b.k {
                return Err(Error::InvalidInput(format!(
                    "profiles built with different K: {} vs {}",
                    a.k, b.k
                )));
            }
            println!("{}", weighted_jaccard(&a, &b));
            Ok(())
        }
        Command::Eval { run, qrels, k, out } => {
            if k < 1 {
                return Err(Error::usage("--k must be at least 1"));
            }
            let dataset = run
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            let ranked = corpus_io::load_run(&run)?;
            let judgments = corpus_io::load_qrels(&qrels)?;
            let result = ndcg_at_k(&ranked, &judgments, k, &dataset)?;
            println!(
                "{}\tNDCG@{}\t{:.1}\t({} queries, {} excluded)",
                result.dataset_id,
                result.k,
                result.mean * 100.0,
                result.per_query.len(),
                result.excluded_queries
            );
            if let Some(path) = out {
                write_atomic(&path, to_json_string(&result)?.as_bytes())?;
            }
            Ok(())
        }
        Command::Factors {
            manifest,
            out,
            jobs,
            alpha,
            format,
        } => {
            if let Some(jobs) = jobs {
                if jobs < 1 {
                    return Err(Error::usage("--jobs must be at least 1"));
                }
                rayon::ThreadPoolBuilder::new()
                    .num_threads(jobs)
                    .build_global()
                    .map_err(|e| Error::usage(e.to_string()))?;
            }
            let mut manifest = Manifest::load(&manifest)?;
            if let Some(alpha) = alpha {
                if alpha <= 0.0 {
                    return Err(Error::usage("--alpha must be positive"));
                }
                manifest.config.alpha = alpha;
            }
            let vectors = compute_manifest_factors(&manifest)?;
            if wants(format, Format::Json) {
                write_atomic(&out.join("factors.json"), to_json_string(&vectors)?.as_bytes())?;
            }
            if wants(format, Format::Csv) {
                write_atomic(&out.join("factors.csv"), factors_to_csv(&vectors)?.as_bytes())?;
            }
            Ok(())
        }
        Command::Correlate {
            factors,
            deltas,
            target,
            out,
            format,
        } => {
            let target = Target::parse(&target)?;
            let content =
                std::fs::read_to_string(&factors).map_err(|e| Error::io(&factors, e))?;
            let table: Vec<FactorVector> = serde_json::from_str(&content)
                .map_err(|e| Error::InvalidInput(format!("{}: {e}", factors.display())))?;
            let delta_table = load_deltas(&deltas)?;
            let report = build_report(&table, &delta_table, target)?;
            if wants(format, Format::Json) {
                write_atomic(
                    &out.join("correlation.json"),
                    to_json_string(&report)?.as_bytes(),
                )?;
            }
            if wants(format, Format::Csv) {
                write_atomic(&out.join("correlation.csv"), report.to_csv().as_bytes())?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
