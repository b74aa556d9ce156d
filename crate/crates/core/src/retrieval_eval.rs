//! NDCG@k over runs and qrels, adaptation improvement deltas, and
//! macro-averages.
//!
//! The gain function is the trec_eval-compatible exponential variant,
//! (2^grade − 1) / log2(rank + 1). Queries whose judgments are all grade 0
//! have an undefined ideal DCG and are excluded from the mean; their count
//! is reported. Judged queries missing from the run score 0 and stay in
//! the mean.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus_io::{RankedRun, RelevanceJudgments};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub dataset_id: String,
    pub k: usize,
    pub mean: f64,
    pub excluded_queries: usize,
    pub per_query: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalDelta {
    pub dataset_id: String,
    pub base: f64,
    pub adapted: f64,
    pub improvement: f64,
}

impl EvalDelta {
    pub fn from_means(dataset_id: &str, base: f64, adapted: f64) -> Self {
        EvalDelta {
            dataset_id: dataset_id.to_string(),
            base,
            adapted,
            improvement: adapted - base,
        }
    }
}

fn dcg(grades: impl Iterator<Item = u32>) -> f64 {
    grades
        .enumerate()
        .map(|(i, g)| (2f64.powi(g as i32) - 1.0) / ((i + 2) as f64).log2())
        .sum()
}

pub fn ndcg_at_k(
    run: &RankedRun,
    qrels: &RelevanceJudgments,
    k: usize,
    dataset_id: &str,
) -> Result<EvalResult> {
    if k < 1 {
        return Err(Error::usage("cutoff k must be at least 1"));
    }
    let mut per_query = BTreeMap::new();
    let mut excluded = 0usize;
    for (qid, judged) in &qrels.entries {
        let mut ideal_grades: Vec<u32> = judged.values().copied().filter(|&g| g > 0).collect();
        if ideal_grades.is_empty() {
            excluded += 1;
            continue;
        }
        ideal_grades.sort_unstable_by(|a, b| b.cmp(a));
        let idcg = dcg(ideal_grades.into_iter().take(k));
        let ranked = run.ranking(qid);
        let actual = dcg(
            ranked
                .iter()
                .take(k)
                .map(|(did, _)| judged.get(did).copied().unwrap_or(0)),
        );
        per_query.insert(qid.clone(), actual / idcg);
    }
    if per_query.is_empty() {
        return Err(Error::InvalidInput(
            "no queries with positive relevance judgments".to_string(),
        ));
    }
    let mean = per_query.values().sum::<f64>() / per_query.len() as f64;
    Ok(EvalResult {
        dataset_id: dataset_id.to_string(),
        k,
        mean,
        excluded_queries: excluded,
        per_query,
    })
}

/// Improvement of an adapted run over a base run on the same dataset.
pub fn improvement(base: &EvalResult, adapted: &EvalResult) -> Result<EvalDelta> {
    if base.dataset_id != adapted.dataset_id {
        return Err(Error::InvalidInput(format!(
            "dataset mismatch: {:?} vs {:?}",
            base.dataset_id, adapted.dataset_id
        )));
    }
    if base.k != adapted.k {
        return Err(Error::InvalidInput(format!(
            "cutoff mismatch: k={} vs k={}",
            base.k, adapted.k
        )));
    }
    Ok(EvalDelta::from_means(&base.dataset_id, base.mean, adapted.mean))
}

/// Unweighted arithmetic mean over per-dataset scores.
pub fn macro_average(means: &[f64]) -> Result<f64> {
    if means.is_empty() {
        return Err(Error::InvalidInput(
            "cannot macro-average an empty list".to_string(),
        ));
    }
    Ok(means.iter().sum::<f64>() / means.len() as f64)
}
