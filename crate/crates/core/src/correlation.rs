//! Spearman rank correlation of factors against improvement across
//! datasets.
//!
//! The implementation ranks with tie-averaging and takes the Pearson
//! correlation of the ranks, which is correct in the presence of ties
//! (equal corpus sizes produce them in practice). The 1 − 6Σd²/(n(n²−1))
//! closed form only holds tie-free and is kept for oracle tests.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factors::FactorVector;
use crate::retrieval_eval::EvalDelta;

/// Ascending fractional ranks starting at 1; tied values receive the
/// average of their occupied rank positions.
pub fn rank_with_ties(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // positions i..=j (0-based) share the average rank
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        let dx = xi - mx;
        let dy = yi - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::InvalidInput(
            "undefined correlation: constant vector".to_string(),
        ));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Spearman's rho: Pearson correlation of tie-averaged ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::InvalidInput(format!(
            "length mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "need at least 3 observations, got {}",
            x.len()
        )));
    }
    pearson(&rank_with_ties(x), &rank_with_ties(y))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorCorrelation {
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigSnapshot {
    pub k: usize,
    pub stopword_version: String,
    pub alpha: f64,
    pub wh_inventory: String,
    pub tool_version: String,
}

/// Per-factor Spearman coefficients against one target column, the
/// Figure-1-style report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub target_name: String,
    pub per_factor: BTreeMap<String, FactorCorrelation>,
    pub config: ConfigSnapshot,
}

impl CorrelationReport {
    /// Plot-ready CSV: `factor,rho,n`, factors in lexicographic order.
    /// Factors whose correlation is undefined carry an empty rho field.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("factor,rho,n\n");
        for (name, fc) in &self.per_factor {
            match fc.rho {
                Some(rho) => out.push_str(&format!("{name},{rho},{}\n", fc.n)),
                None => out.push_str(&format!("{name},,{}\n", fc.n)),
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Improvement,
    Adapted,
    Base,
}

impl Target {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "improvement" => Ok(Target::Improvement),
            "adapted" => Ok(Target::Adapted),
            "base" => Ok(Target::Base),
            other => Err(Error::usage(format!(
                "unknown target {other:?} (expected improvement, adapted, or base)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Target::Improvement => "improvement",
            Target::Adapted => "adapted",
            Target::Base => "base",
        }
    }

    fn select(&self, delta: &EvalDelta) -> f64 {
        match self {
            Target::Improvement => delta.improvement,
            Target::Adapted => delta.adapted,
            Target::Base => delta.base,
        }
    }
}

/// Join factor vectors and eval deltas by dataset id and correlate each
/// factor against the chosen target. Datasets present on only one side are
/// dropped pairwise; per-factor n records what survived.
pub fn build_report(
    factor_table: &[FactorVector],
    deltas: &[EvalDelta],
    target: Target,
) -> Result<CorrelationReport> {
    let first = factor_table.first().ok_or_else(|| {
        Error::InvalidInput("empty factor table".to_string())
    })?;
    let delta_by_id: BTreeMap<&str, &EvalDelta> = deltas
        .iter()
        .map(|d| (d.dataset_id.as_str(), d))
        .collect();
    let aligned: Vec<(&FactorVector, &EvalDelta)> = factor_table
        .iter()
        .filter_map(|v| delta_by_id.get(v.dataset_id.as_str()).map(|d| (v, *d)))
        .collect();
    if aligned.len() < 3 {
        let factor_ids: Vec<&str> = factor_table.iter().map(|v| v.dataset_id.as_str()).collect();
        let delta_ids: Vec<&str> = deltas.iter().map(|d| d.dataset_id.as_str()).collect();
        return Err(Error::InvalidInput(format!(
            "need >=3 aligned datasets, got {} (factor table: {factor_ids:?}; deltas: {delta_ids:?})",
            aligned.len()
        )));
    }

    let mut factor_names: Vec<&String> = factor_table.iter().flat_map(|v| v.values.keys()).collect();
    factor_names.sort();
    factor_names.dedup();

    let mut per_factor = BTreeMap::new();
    for name in factor_names {
        let pairs: Vec<(f64, f64)> = aligned
            .iter()
            .filter_map(|(v, d)| v.values.get(name).map(|&f| (f, target.select(d))))
            .collect();
        let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let entry = match spearman(&xs, &ys) {
            Ok(rho) => FactorCorrelation {
                n: pairs.len(),
                rho: Some(rho),
                error: None,
            },
            Err(e) => FactorCorrelation {
                n: pairs.len(),
                rho: None,
                error: Some(e.to_string()),
            },
        };
        per_factor.insert(name.clone(), entry);
    }
    Ok(CorrelationReport {
        target_name: target.name().to_string(),
        per_factor,
        config: ConfigSnapshot {
            k: first.metadata.k,
            stopword_version: first.metadata.stopword_version.clone(),
            alpha: first.metadata.alpha,
            wh_inventory: first.metadata.wh_inventory.clone(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        },
    })
}
