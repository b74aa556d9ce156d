//! Manifest-driven factor computation: load every dataset's collections,
//! evaluate the factor suite, and apply sub-forum aggregation.

use rayon::prelude::*;

use crate::corpus_io::{load_corpus, load_queries, QueryOrigin};
use crate::error::{Error, Result};
use crate::factors::{
    aggregate_subforums, collection_ids, compute_factor_suite, default_factor_suite,
    DatasetCollections, FactorMetadata, FactorVector,
};
use crate::manifest::{DatasetEntry, Manifest};
use crate::query_typing::{type_distribution, TypingConfig};
use crate::text_stats::{build_profile, par_term_frequencies, StopwordList, TermProfile};

fn load_stopwords(manifest: &Manifest) -> Result<StopwordList> {
    if manifest.config.stopwords == "builtin" {
        Ok(StopwordList::builtin())
    } else {
        StopwordList::from_file(std::path::Path::new(&manifest.config.stopwords))
    }
}

fn profile_of_texts(
    texts: &[String],
    k: usize,
    stopwords: &StopwordList,
) -> Result<TermProfile> {
    let freq = par_term_frequencies(texts, |t| t.clone(), stopwords);
    build_profile(&freq, k, &stopwords.version)
}

fn dataset_collections(
    entry: &DatasetEntry,
    k: usize,
    stopwords: &StopwordList,
    typing: &TypingConfig,
) -> Result<DatasetCollections> {
    let mut collections = DatasetCollections::default();

    let test_docs = load_corpus(&entry.test_corpus)?;
    let source_docs = load_corpus(&entry.source_corpus)?;
    collections
        .corpus_sizes
        .insert(collection_ids::TEST_DOCS.to_string(), test_docs.len());
    collections
        .corpus_sizes
        .insert(collection_ids::SOURCE_DOCS.to_string(), source_docs.len());

    for (id, docs) in [
        (collection_ids::TEST_DOCS, &test_docs),
        (collection_ids::SOURCE_DOCS, &source_docs),
    ] {
        let freq = par_term_frequencies(&docs.docs, |d| d.stat_text(), stopwords);
        collections
            .profiles
            .insert(id.to_string(), build_profile(&freq, k, &stopwords.version)?);
    }

    for (id, path, origin) in [
        (collection_ids::TEST_QUERIES, &entry.test_queries, QueryOrigin::Test),
        (collection_ids::SOURCE_QUERIES, &entry.source_queries, QueryOrigin::Source),
        (collection_ids::GENERATED_QUERIES, &entry.generated_queries, QueryOrigin::Generated),
    ] {
        let queries = load_queries(path, origin)?;
        let texts: Vec<String> = queries.queries.iter().map(|q| q.text.clone()).collect();
        collections
            .profiles
            .insert(id.to_string(), profile_of_texts(&texts, k, stopwords)?);
        collections.type_dists.insert(
            id.to_string(),
            type_distribution(texts.iter().map(|t| t.as_str()), typing)?,
        );
    }
    Ok(collections)
}

/// Compute one factor vector per dataset (grouped sub-forums averaged into
/// a single row under the group id), sorted by dataset id.
pub fn compute_manifest_factors(manifest: &Manifest) -> Result<Vec<FactorVector>> {
    let stopwords = load_stopwords(manifest)?;
    let typing = TypingConfig {
        include_how: manifest.config.include_how,
    };
    let metadata = FactorMetadata {
        k: manifest.config.top_k,
        stopword_version: stopwords.version.clone(),
        alpha: manifest.config.alpha,
        wh_inventory: typing.wh_inventory(),
    };
    let specs = manifest
        .factors
        .clone()
        .unwrap_or_else(default_factor_suite);

    let per_dataset: Vec<(Option<String>, FactorVector)> = manifest
        .datasets
        .par_iter()
        .map(|entry| {
            let collections = dataset_collections(entry, metadata.k, &stopwords, &typing)
                .map_err(|e| {
                    Error::InvalidInput(format!("dataset {:?}: {e}", entry.id))
                })?;
            let vector = compute_factor_suite(&entry.id, &specs, &collections, &metadata)?;
            Ok((entry.group.clone(), vector))
        })
        .collect::<Result<_>>()?;

    let mut ungrouped = Vec::new();
    let mut groups: std::collections::BTreeMap<String, Vec<FactorVector>> = Default::default();
    for (group, vector) in per_dataset {
        match group {
            Some(g) => groups.entry(g).or_default().push(vector),
            None => ungrouped.push(vector),
        }
    }
    for (group_id, members) in groups {
        ungrouped.push(aggregate_subforums(&members, &group_id)?);
    }
    ungrouped.sort_by(|a, b| a.dataset_id.cmp(&b.dataset_id));
    Ok(ungrouped)
}

/// Factor table CSV: one row per dataset, factor columns in lexicographic
/// order, metadata columns last.
pub fn factors_to_csv(vectors: &[FactorVector]) -> Result<String> {
    let first = vectors
        .first()
        .ok_or_else(|| Error::InvalidInput("empty factor table".to_string()))?;
    let names: Vec<&String> = first.values.keys().collect();
    for v in vectors {
        if v.values.keys().collect::<Vec<_>>() != names {
            return Err(Error::InvalidInput(format!(
                "factor name mismatch between {:?} and {:?}",
                first.dataset_id, v.dataset_id
            )));
        }
    }
    let mut out = String::from("dataset");
    for name in &names {
        out.push(',');
        out.push_str(name);
    }
    out.push_str(",k,stopword_version,alpha,wh_inventory\n");
    for v in vectors {
        out.push_str(&v.dataset_id);
        for name in &names {
            out.push_str(&format!(",{}", v.values[*name]));
        }
        out.push_str(&format!(
            ",{},{},{},\"{}\"\n",
            v.metadata.k, v.metadata.stopword_version, v.metadata.alpha, v.metadata.wh_inventory
        ));
    }
    Ok(out)
}
