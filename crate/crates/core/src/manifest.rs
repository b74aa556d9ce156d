//! Declarative manifest describing datasets and global analysis settings.
//!
//! The manifest is a TOML file validated up front; every problem is
//! reported in one pass so a bad manifest never starts a long computation.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::factors::FactorSpec;
use crate::text_stats::DEFAULT_TOP_K;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlobalConfig {
    #[serde(default = "default_top_k")]
    pub top_k: usize,
    /// "builtin" or a path to a newline-separated stopword file.
    #[serde(default = "default_stopwords")]
    pub stopwords: String,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_eval_k")]
    pub eval_k: usize,
    #[serde(default = "default_true")]
    pub include_how: bool,
}

fn default_top_k() -> usize {
    DEFAULT_TOP_K
}
fn default_stopwords() -> String {
    "builtin".to_string()
}
fn default_alpha() -> f64 {
    crate::query_typing::DEFAULT_ALPHA
}
fn default_eval_k() -> usize {
    10
}
fn default_true() -> bool {
    true
}

impl Default for GlobalConfig {
    fn default() -> Self {
        GlobalConfig {
            top_k: default_top_k(),
            stopwords: default_stopwords(),
            alpha: default_alpha(),
            eval_k: default_eval_k(),
            include_how: true,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetEntry {
    pub id: String,
    /// Sub-forum parent id; entries sharing a group are factor-averaged
    /// into one row (the CQADupstack rule).
    #[serde(default)]
    pub group: Option<String>,
    pub test_corpus: PathBuf,
    pub test_queries: PathBuf,
    pub source_corpus: PathBuf,
    pub source_queries: PathBuf,
    pub generated_queries: PathBuf,
    #[serde(default)]
    pub qrels: Option<PathBuf>,
    #[serde(default)]
    pub base_run: Option<PathBuf>,
    #[serde(default)]
    pub adapted_run: Option<PathBuf>,
}

impl DatasetEntry {
    pub fn paths(&self) -> Vec<(&'static str, &PathBuf)> {
        let mut v = vec![
            ("test_corpus", &self.test_corpus),
            ("test_queries", &self.test_queries),
            ("source_corpus", &self.source_corpus),
            ("source_queries", &self.source_queries),
            ("generated_queries", &self.generated_queries),
        ];
        if let Some(p) = &self.qrels {
            v.push(("qrels", p));
        }
        if let Some(p) = &self.base_run {
            v.push(("base_run", p));
        }
        if let Some(p) = &self.adapted_run {
            v.push(("adapted_run", p));
        }
        v
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(default)]
    pub config: GlobalConfig,
    #[serde(default, rename = "dataset")]
    pub datasets: Vec<DatasetEntry>,
    /// Optional custom factor suite; when absent the default 8-factor
    /// suite applies.
    #[serde(default, rename = "factor")]
    pub factors: Option<Vec<FactorSpec>>,
}

impl Manifest {
    /// Parse a manifest and resolve all dataset paths relative to its
    /// directory. Validation failures are collected, not short-circuited.
    pub fn load(path: &Path) -> Result<Manifest> {
        let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut manifest: Manifest = toml::from_str(&content)
            .map_err(|e| Error::usage(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        for ds in &mut manifest.datasets {
            ds.test_corpus = resolve(base, &ds.test_corpus);
            ds.test_queries = resolve(base, &ds.test_queries);
            ds.source_corpus = resolve(base, &ds.source_corpus);
            ds.source_queries = resolve(base, &ds.source_queries);
            ds.generated_queries = resolve(base, &ds.generated_queries);
            ds.qrels = ds.qrels.take().map(|p| resolve(base, &p));
            ds.base_run = ds.base_run.take().map(|p| resolve(base, &p));
            ds.adapted_run = ds.adapted_run.take().map(|p| resolve(base, &p));
        }
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.datasets.is_empty() {
            problems.push("manifest declares no datasets".to_string());
        }
        if self.config.top_k < 1 {
            problems.push("config.top_k must be at least 1".to_string());
        }
        if self.config.alpha <= 0.0 {
            problems.push("config.alpha must be positive".to_string());
        }
        if self.config.eval_k < 1 {
            problems.push("config.eval_k must be at least 1".to_string());
        }
        let mut seen = std::collections::HashSet::new();
        for ds in &self.datasets {
            if !seen.insert(ds.id.as_str()) {
                problems.push(format!("duplicate dataset id {:?}", ds.id));
            }
            if let Some(group) = &ds.group {
                if seen.contains(group.as_str()) {
                    problems.push(format!(
                        "dataset {:?}: group {group:?} collides with a dataset id",
                        ds.id
                    ));
                }
            }
            for (field, p) in ds.paths() {
                if !p.exists() {
                    problems.push(format!(
                        "dataset {:?}: {field} path does not exist: {}",
                        ds.id,
                        p.display()
                    ));
                }
            }
        }
        if let Some(specs) = &self.factors {
            if specs.is_empty() {
                problems.push("custom factor suite is empty".to_string());
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}
