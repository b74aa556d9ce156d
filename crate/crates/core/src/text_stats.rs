//! Tokenization, term-frequency counting, and top-K weighted vocabulary
//! profiles.
//!
//! Counting is additive, so sharding documents across workers and merging
//! the shard counts produces exactly the sequential result.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_TOP_K: usize = 10_000;

const BUILTIN_STOPWORDS: &str = include_str!("../data/stopwords_en.txt");
pub const BUILTIN_STOPWORD_VERSION: &str = "builtin-en-v1";

/// A versioned stopword set. The version tag travels into every report so
/// results can be traced back to the exact list that produced them.
#[derive(Debug, Clone)]
pub struct StopwordList {
    terms: HashSet<String>,
    pub version: String,
}

impl StopwordList {
    pub fn builtin() -> Self {
        Self::from_lines(BUILTIN_STOPWORDS, BUILTIN_STOPWORD_VERSION)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let version = format!("file:{}", path.display());
        let list = Self::from_lines(&content, &version);
        if list.terms.is_empty() {
            return Err(Error::InvalidInput(format!(
                "stopword list {} is empty",
                path.display()
            )));
        }
        Ok(list)
    }

    fn from_lines(content: &str, version: &str) -> Self {
        let terms = content
            .lines()
            .map(|l| l.trim().to_lowercase())
            .filter(|l| !l.is_empty())
            .collect();
        StopwordList {
            terms,
            version: version.to_string(),
        }
    }

    pub fn contains(&self, term: &str) -> bool {
        self.terms.contains(term)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Lowercase and split on every non-alphanumeric character (Unicode-aware).
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

fn count_into(counts: &mut HashMap<String, u64>, text: &str, stopwords: &StopwordList) {
    for token in tokenize(text) {
        if !stopwords.contains(&token) {
            *counts.entry(token).or_insert(0) += 1;
        }
    }
}

pub fn merge_counts(a: HashMap<String, u64>, b: HashMap<String, u64>) -> HashMap<String, u64> {
    // Fold the smaller map into the larger one.
    let (mut dst, src) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    for (term, n) in src {
        *dst.entry(term).or_insert(0) += n;
    }
    dst
}

/// Term counts over the tokenized texts with stopwords removed.
pub fn term_frequencies<'a, I>(texts: I, stopwords: &StopwordList) -> HashMap<String, u64>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut counts = HashMap::new();
    for text in texts {
        count_into(&mut counts, text, stopwords);
    }
    counts
}

/// Parallel counting; merging by addition makes the result identical to the
/// sequential count regardless of sharding.
pub fn par_term_frequencies<T, F>(items: &[T], text_of: F, stopwords: &StopwordList) -> HashMap<String, u64>
where
    T: Sync,
    F: Fn(&T) -> String + Sync,
{
    items
        .par_iter()
        .fold(HashMap::new, |mut counts, item| {
            count_into(&mut counts, &text_of(item), stopwords);
            counts
        })
        .reduce(HashMap::new, merge_counts)
}

/// Normalized weights over the top-K most frequent non-stopword terms of a
/// collection. Weights sum to 1 over the retained terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermProfile {
    pub k: usize,
    pub stopword_version: String,
    pub total_tokens: u64,
    pub weights: BTreeMap<String, f64>,
}

impl TermProfile {
    pub fn weight(&self, term: &str) -> f64 {
        self.weights.get(term).copied().unwrap_or(0.0)
    }

    /// Canonical JSON: keys in fixed field order, terms lexicographic.
    pub fn to_canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("profile serializes");
        s.push('\n');
        s
    }

    pub fn from_json(content: &str) -> Result<Self> {
        serde_json::from_str(content)
            .map_err(|e| Error::InvalidInput(format!("bad profile JSON: {e}")))
    }
}

/// Keep the K highest-count terms (ties broken by lexicographically smaller
/// term first) and normalize their counts over the kept set.
pub fn build_profile(
    freq: &HashMap<String, u64>,
    k: usize,
    stopword_version: &str,
) -> Result<TermProfile> {
    if k < 1 {
        return Err(Error::usage("top-k must be at least 1"));
    }
    if freq.is_empty() {
        return Err(Error::InvalidInput("no vocabulary".to_string()));
    }
    let total_tokens: u64 = freq.values().sum();
    let mut ranked: Vec<(&String, u64)> = freq.iter().map(|(t, &n)| (t, n)).collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    ranked.truncate(k);
    let kept_total: u64 = ranked.iter().map(|(_, n)| n).sum();
    let weights = ranked
        .into_iter()
        .map(|(t, n)| (t.clone(), n as f64 / kept_total as f64))
        .collect();
    Ok(TermProfile {
        k,
        stopword_version: stopword_version.to_string(),
        total_tokens,
        weights,
    })
}
