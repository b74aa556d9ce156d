//! Domain-similarity factors: weighted Jaccard vocabulary overlap,
//! query-type entropies, cross-entropies, and corpus size, assembled into
//! per-dataset factor vectors.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::query_typing::{cross_entropy, entropy, QueryTypeDistribution};
use crate::text_stats::TermProfile;

/// Weighted Jaccard similarity Σ min(pᵢ,qᵢ) / Σ max(pᵢ,qᵢ) over the union
/// of the two supports; absent terms weigh 0.
pub fn weighted_jaccard(p: &TermProfile, q: &TermProfile) -> f64 {
    // merge-join the two sorted supports so accumulation order is a
    // function of the union only; this keeps the result bit-identical
    // under argument swap
    let mut min_sum = 0.0;
    let mut max_sum = 0.0;
    let mut pi = p.weights.iter().peekable();
    let mut qi = q.weights.iter().peekable();
    loop {
        let (pw, qw) = match (pi.peek(), qi.peek()) {
            (Some((pt, &pw)), Some((qt, &qw))) => match pt.cmp(qt) {
                std::cmp::Ordering::Less => {
                    pi.next();
                    (pw, 0.0)
                }
                std::cmp::Ordering::Greater => {
                    qi.next();
                    (0.0, qw)
                }
                std::cmp::Ordering::Equal => {
                    pi.next();
                    qi.next();
                    (pw, qw)
                }
            },
            (Some((_, &pw)), None) => {
                pi.next();
                (pw, 0.0)
            }
            (None, Some((_, &qw))) => {
                qi.next();
                (0.0, qw)
            }
            (None, None) => break,
        };
        min_sum += pw.min(qw);
        max_sum += pw.max(qw);
    }
    if max_sum == 0.0 {
        return 0.0;
    }
    min_sum / max_sum
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorKind {
    VocabOverlap,
    TypeEntropy,
    TypeCrossEntropy,
    CorpusSize,
}

/// One factor to compute: a kind plus the collection ids it operates on.
/// For `VocabOverlap` the operands are two text collections; for
/// `TypeCrossEntropy` they are (p, q) query collections in that order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorSpec {
    pub name: String,
    pub kind: FactorKind,
    pub operands: Vec<String>,
}

impl FactorSpec {
    pub fn new(name: &str, kind: FactorKind, operands: &[&str]) -> Self {
        FactorSpec {
            name: name.to_string(),
            kind,
            operands: operands.iter().map(|s| s.to_string()).collect(),
        }
    }
}

/// Collection ids used by the default suite.
pub mod collection_ids {
    pub const TEST_DOCS: &str = "test_docs";
    pub const SOURCE_DOCS: &str = "source_docs";
    pub const TEST_QUERIES: &str = "test_queries";
    pub const SOURCE_QUERIES: &str = "source_queries";
    pub const GENERATED_QUERIES: &str = "generated_queries";
}

/// The eight factors computed per dataset by default: the four
/// generated-query vocabulary overlaps, generated-type entropy, the two
/// cross-entropies against generated types, and the test corpus size.
pub fn default_factor_suite() -> Vec<FactorSpec> {
    use collection_ids::*;
    use FactorKind::*;
    vec![
        FactorSpec::new("gen_source_query_overlap", VocabOverlap, &[GENERATED_QUERIES, SOURCE_QUERIES]),
        FactorSpec::new("gen_test_query_overlap", VocabOverlap, &[GENERATED_QUERIES, TEST_QUERIES]),
        FactorSpec::new("gen_source_doc_overlap", VocabOverlap, &[GENERATED_QUERIES, SOURCE_DOCS]),
        FactorSpec::new("gen_test_doc_overlap", VocabOverlap, &[GENERATED_QUERIES, TEST_DOCS]),
        FactorSpec::new("gen_type_entropy", TypeEntropy, &[GENERATED_QUERIES]),
        FactorSpec::new("test_gen_type_cross_entropy", TypeCrossEntropy, &[TEST_QUERIES, GENERATED_QUERIES]),
        FactorSpec::new("source_gen_type_cross_entropy", TypeCrossEntropy, &[SOURCE_QUERIES, GENERATED_QUERIES]),
        FactorSpec::new("test_corpus_size", CorpusSize, &[TEST_DOCS]),
    ]
}

/// Everything loaded for one dataset, keyed by collection id.
#[derive(Debug, Clone, Default)]
pub struct DatasetCollections {
    pub profiles: HashMap<String, TermProfile>,
    pub type_dists: HashMap<String, QueryTypeDistribution>,
    pub corpus_sizes: HashMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorMetadata {
    pub k: usize,
    pub stopword_version: String,
    pub alpha: f64,
    pub wh_inventory: String,
}

/// Named factor values for one dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorVector {
    pub dataset_id: String,
    pub values: BTreeMap<String, f64>,
    pub metadata: FactorMetadata,
}

impl DatasetCollections {
    fn profile(&self, id: &str) -> Result<&TermProfile> {
        self.profiles.get(id).ok_or_else(|| {
            Error::InvalidInput(format!("unresolvable text collection {id:?}"))
        })
    }

    fn type_dist(&self, id: &str) -> Result<&QueryTypeDistribution> {
        self.type_dists.get(id).ok_or_else(|| {
            Error::InvalidInput(format!("unresolvable query collection {id:?}"))
        })
    }
}

fn expect_operands(spec: &FactorSpec, n: usize) -> Result<()> {
    if spec.operands.len() != n {
        return Err(Error::InvalidInput(format!(
            "factor {:?} expects {} operand(s), got {}",
            spec.name,
            n,
            spec.operands.len()
        )));
    }
    Ok(())
}

/// Evaluate one factor value per spec against the loaded collections.
pub fn compute_factor_suite(
    dataset_id: &str,
    specs: &[FactorSpec],
    collections: &DatasetCollections,
    metadata: &FactorMetadata,
) -> Result<FactorVector> {
    // all profiles must have been built with the same K
    for profile in collections.profiles.values() {
        if profile.k != metadata.k {
            return Err(Error::InvalidInput(format!(
                "mixed-K profiles in dataset {dataset_id:?}: found K={}, expected K={}",
                profile.k, metadata.k
            )));
        }
    }
    let mut values = BTreeMap::new();
    for spec in specs {
        let value = match spec.kind {
            FactorKind::VocabOverlap => {
                expect_operands(spec, 2)?;
                weighted_jaccard(
                    collections.profile(&spec.operands[0])?,
                    collections.profile(&spec.operands[1])?,
                )
            }
            FactorKind::TypeEntropy => {
                expect_operands(spec, 1)?;
                entropy(collections.type_dist(&spec.operands[0])?)
            }
            FactorKind::TypeCrossEntropy => {
                expect_operands(spec, 2)?;
                cross_entropy(
                    collections.type_dist(&spec.operands[0])?,
                    collections.type_dist(&spec.operands[1])?,
                    metadata.alpha,
                )
            }
            FactorKind::CorpusSize => {
                expect_operands(spec, 1)?;
                let id = &spec.operands[0];
                *collections.corpus_sizes.get(id).ok_or_else(|| {
                    Error::InvalidInput(format!("unresolvable corpus {id:?}"))
                })? as f64
            }
        };
        if values.insert(spec.name.clone(), value).is_some() {
            return Err(Error::InvalidInput(format!(
                "duplicate factor name {:?}",
                spec.name
            )));
        }
    }
    Ok(FactorVector {
        dataset_id: dataset_id.to_string(),
        values,
        metadata: metadata.clone(),
    })
}

/// Unweighted per-factor mean over sub-forum vectors, used for
/// CQADupstack-style grouped datasets.
pub fn aggregate_subforums(vectors: &[FactorVector], parent_id: &str) -> Result<FactorVector> {
    let first = vectors.first().ok_or_else(|| {
        Error::InvalidInput(format!("no sub-forum vectors for {parent_id:?}"))
    })?;
    let names: Vec<&String> = first.values.keys().collect();
    for v in vectors {
        if v.values.keys().collect::<Vec<_>>() != names {
            return Err(Error::InvalidInput(format!(
                "mismatched factor names between sub-forums {:?} and {:?}",
                first.dataset_id, v.dataset_id
            )));
        }
    }
    let n = vectors.len() as f64;
    let values = names
        .into_iter()
        .map(|name| {
            let sum: f64 = vectors.iter().map(|v| v.values[name]).sum();
            (name.clone(), sum / n)
        })
        .collect();
    Ok(FactorVector {
        dataset_id: parent_id.to_string(),
        values,
        metadata: first.metadata.clone(),
    })
}
