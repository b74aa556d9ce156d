//! First-word query-type classification and type-distribution entropy.
//!
//! Queries fall into one of nine types: seven WH types, Yes/No, and
//! Declarative. Classification looks only at the first whitespace token,
//! so it is total and cheap enough to run over millions of queries.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum QueryType {
    What,
    Who,
    When,
    Where,
    Why,
    Which,
    How,
    YesNo,
    Declarative,
}

pub const ALL_TYPES: [QueryType; 9] = [
    QueryType::What,
    QueryType::Who,
    QueryType::When,
    QueryType::Where,
    QueryType::Why,
    QueryType::Which,
    QueryType::How,
    QueryType::YesNo,
    QueryType::Declarative,
];

pub const NUM_TYPES: usize = ALL_TYPES.len();

/// First words that mark a Yes/No question.
pub const YES_NO_WORDS: [&str; 16] = [
    "is", "was", "are", "were", "do", "does", "did", "have", "has", "had", "should", "can",
    "would", "could", "am", "shall",
];

impl fmt::Display for QueryType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// Whether "how" counts as a WH word is not settled in the query-typing
/// literature; it is on by default and the choice is recorded in report
/// metadata via [`TypingConfig::wh_inventory`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TypingConfig {
    pub include_how: bool,
}

impl Default for TypingConfig {
    fn default() -> Self {
        TypingConfig { include_how: true }
    }
}

impl TypingConfig {
    fn wh_words(&self) -> &'static [(&'static str, QueryType)] {
        const WITH_HOW: [(&str, QueryType); 7] = [
            ("what", QueryType::What),
            ("who", QueryType::Who),
            ("when", QueryType::When),
            ("where", QueryType::Where),
            ("why", QueryType::Why),
            ("which", QueryType::Which),
            ("how", QueryType::How),
        ];
        if self.include_how {
            &WITH_HOW
        } else {
            &WITH_HOW[..6]
        }
    }

    /// Comma-separated WH inventory for report metadata.
    pub fn wh_inventory(&self) -> String {
        self.wh_words()
            .iter()
            .map(|(w, _)| *w)
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Classify by the first whitespace token, lowercased, with trailing
/// punctuation stripped and internal apostrophes retained. WH words and
/// their "'s" contractions map to their WH type, Yes/No keywords to YesNo,
/// anything else (including empty text) to Declarative.
pub fn classify_query_with(text: &str, config: &TypingConfig) -> QueryType {
    let first = match text.split_whitespace().next() {
        Some(w) => w,
        None => return QueryType::Declarative,
    };
    // normalize the curly apostrophe so "what’s" matches "what's"
    let mut word = first.replace('\u{2019}', "'").to_lowercase();
    while word
        .chars()
        .last()
        .is_some_and(|c| !c.is_alphanumeric())
    {
        word.pop();
    }
    for (wh, ty) in config.wh_words() {
        if word == *wh || (word.len() == wh.len() + 2 && word.starts_with(wh) && word.ends_with("'s"))
        {
            return *ty;
        }
    }
    if YES_NO_WORDS.contains(&word.as_str()) {
        QueryType::YesNo
    } else {
        QueryType::Declarative
    }
}

pub fn classify_query(text: &str) -> QueryType {
    classify_query_with(text, &TypingConfig::default())
}

/// Empirical distribution over the nine query types. Zero-probability
/// types stay in the support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryTypeDistribution {
    pub n: usize,
    pub probs: BTreeMap<QueryType, f64>,
}

impl QueryTypeDistribution {
    pub fn prob(&self, ty: QueryType) -> f64 {
        self.probs.get(&ty).copied().unwrap_or(0.0)
    }

    /// Build a distribution directly from per-type probabilities; missing
    /// types get probability 0.
    pub fn from_probs(pairs: &[(QueryType, f64)], n: usize) -> Self {
        let mut probs: BTreeMap<QueryType, f64> = ALL_TYPES.iter().map(|&t| (t, 0.0)).collect();
        for &(ty, p) in pairs {
            probs.insert(ty, p);
        }
        QueryTypeDistribution { n, probs }
    }

    pub fn uniform() -> Self {
        let p = 1.0 / NUM_TYPES as f64;
        QueryTypeDistribution {
            n: NUM_TYPES,
            probs: ALL_TYPES.iter().map(|&t| (t, p)).collect(),
        }
    }
}

/// Relative type frequencies of a query collection.
pub fn type_distribution<'a, I>(texts: I, config: &TypingConfig) -> Result<QueryTypeDistribution>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut counts: BTreeMap<QueryType, usize> = ALL_TYPES.iter().map(|&t| (t, 0)).collect();
    let mut n = 0usize;
    for text in texts {
        *counts.get_mut(&classify_query_with(text, config)).unwrap() += 1;
        n += 1;
    }
    if n == 0 {
        return Err(Error::InvalidInput(
            "cannot compute a type distribution over an empty query set".to_string(),
        ));
    }
    let probs = counts
        .into_iter()
        .map(|(ty, c)| (ty, c as f64 / n as f64))
        .collect();
    Ok(QueryTypeDistribution { n, probs })
}

/// Shannon entropy in nats: −Σ p·ln p over types with p > 0.
pub fn entropy(dist: &QueryTypeDistribution) -> f64 {
    -dist
        .probs
        .values()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.ln())
        .sum::<f64>()
}

pub const DEFAULT_ALPHA: f64 = 1e-6;

/// Cross-entropy −Σ pᵢ·ln q'ᵢ in nats, where q is additively smoothed as
/// q'ᵢ = (qᵢ + α) / (1 + 9α). p is never smoothed: it weights the
/// log-losses and smoothing it would distort the measured distribution.
pub fn cross_entropy(p: &QueryTypeDistribution, q: &QueryTypeDistribution, alpha: f64) -> f64 {
    debug_assert!(alpha > 0.0, "smoothing constant must be positive");
    let denom = 1.0 + NUM_TYPES as f64 * alpha;
    let mut acc = 0.0;
    for &ty in &ALL_TYPES {
        let pi = p.prob(ty);
        if pi > 0.0 {
            let qi = (q.prob(ty) + alpha) / denom;
            acc -= pi * qi.ln();
        }
    }
    acc
}
