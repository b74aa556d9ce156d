//! Loaders for the standard zero-shot-IR file formats: JSONL corpora and
//! query sets, TSV qrels, and 6-column TREC run files.
//!
//! All loaders decode strict UTF-8 and report malformed lines with their
//! 1-based line number. Returned values are immutable and order-independent
//! of the input row order where the format permits it.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    #[serde(rename = "_id")]
    pub doc_id: String,
    #[serde(default)]
    pub title: String,
    pub text: String,
}

impl Document {
    /// The text used for vocabulary statistics: title concatenated before
    /// the body with a single space when a title is present.
    pub fn stat_text(&self) -> String {
        if self.title.is_empty() {
            self.text.clone()
        } else {
            format!("{} {}", self.title, self.text)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DocumentSet {
    pub id: String,
    pub docs: Vec<Document>,
}

impl DocumentSet {
    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    /// JSONL serialization matching the load format.
    pub fn write_jsonl(&self, path: &Path) -> Result<()> {
        let mut out = Vec::new();
        for doc in &self.docs {
            serde_json::to_writer(&mut out, doc)
                .map_err(|e| Error::InvalidInput(e.to_string()))?;
            out.push(b'\n');
        }
        let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(&out).map_err(|e| Error::io(path, e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QueryOrigin {
    Source,
    Test,
    Generated,
}

impl fmt::Display for QueryOrigin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QueryOrigin::Source => write!(f, "source"),
            QueryOrigin::Test => write!(f, "test"),
            QueryOrigin::Generated => write!(f, "generated"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Query {
    #[serde(rename = "_id")]
    pub query_id: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuerySet {
    pub id: String,
    pub origin: QueryOrigin,
    pub queries: Vec<Query>,
}

impl QuerySet {
    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }

    pub fn texts(&self) -> impl Iterator<Item = &str> {
        self.queries.iter().map(|q| q.text.as_str())
    }
}

/// Graded relevance judgments keyed by (query_id, doc_id).
///
/// Grade-0 rows are retained: they are explicit non-relevance statements.
/// The map-based representation makes equality independent of input order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RelevanceJudgments {
    pub entries: BTreeMap<String, BTreeMap<String, u32>>,
}

impl RelevanceJudgments {
    pub fn grade(&self, query_id: &str, doc_id: &str) -> u32 {
        self.entries
            .get(query_id)
            .and_then(|docs| docs.get(doc_id))
            .copied()
            .unwrap_or(0)
    }

    pub fn num_entries(&self) -> usize {
        self.entries.values().map(|d| d.len()).sum()
    }
}

/// A system's ranked output per query, sorted by descending score with
/// ties broken by ascending doc_id.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RankedRun {
    pub rankings: BTreeMap<String, Vec<(String, f64)>>,
}

impl RankedRun {
    pub fn ranking(&self, query_id: &str) -> &[(String, f64)] {
        self.rankings
            .get(query_id)
            .map(|v| v.as_slice())
            .unwrap_or(&[])
    }
}

fn read_utf8(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    String::from_utf8(bytes).map_err(|e| {
        Error::InvalidInput(format!(
            "{}: not valid UTF-8 at byte {}",
            path.display(),
            e.utf8_error().valid_up_to()
        ))
    })
}

fn parse_jsonl<T: for<'de> Deserialize<'de>>(path: &Path, kind: &str) -> Result<Vec<T>> {
    let content = read_utf8(path)?;
    let mut items = Vec::new();
    for (idx, line) in content.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let item: T = serde_json::from_str(line)
            .map_err(|e| Error::parse(path, idx + 1, format!("bad {kind} record: {e}")))?;
        items.push(item);
    }
    Ok(items)
}

/// Load a BEIR-style corpus: one JSON object per line with `_id`, `text`,
/// and optional `title`.
pub fn load_corpus(path: &Path) -> Result<DocumentSet> {
    let docs: Vec<Document> = parse_jsonl(path, "document")?;
    if docs.is_empty() {
        return Err(Error::InvalidInput(format!(
            "empty corpus: {}",
            path.display()
        )));
    }
    let mut seen = HashSet::with_capacity(docs.len());
    for doc in &docs {
        if !seen.insert(doc.doc_id.as_str()) {
            return Err(Error::InvalidInput(format!(
                "{}: duplicate _id {:?}",
                path.display(),
                doc.doc_id
            )));
        }
    }
    Ok(DocumentSet {
        id: file_stem(path),
        docs,
    })
}

/// Load a query set (JSONL with `_id`, `text`) tagged with its origin.
pub fn load_queries(path: &Path, origin: QueryOrigin) -> Result<QuerySet> {
    let queries: Vec<Query> = parse_jsonl(path, "query")?;
    if queries.is_empty() {
        return Err(Error::InvalidInput(format!(
            "empty query set: {}",
            path.display()
        )));
    }
    let mut seen = HashSet::with_capacity(queries.len());
    for q in &queries {
        if !seen.insert(q.query_id.as_str()) {
            return Err(Error::InvalidInput(format!(
                "{}: duplicate _id {:?}",
                path.display(),
                q.query_id
            )));
        }
    }
    Ok(QuerySet {
        id: file_stem(path),
        origin,
        queries,
    })
}

/// Load tab-separated qrels (`query-id<TAB>corpus-id<TAB>score`).
///
/// The first line is treated as a header iff its third field does not parse
/// as an integer; BEIR ships qrels with headers, TREC qrels do not.
pub fn load_qrels(path: &Path) -> Result<RelevanceJudgments> {
    let content = read_utf8(path)?;
    let mut judgments = RelevanceJudgments::default();
    for (idx, line) in content.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::parse(
                path,
                idx + 1,
                format!("expected 3 tab-separated columns, found {}", fields.len()),
            ));
        }
        let grade = match fields[2].trim().parse::<i64>() {
            Ok(g) if g >= 0 => g as u32,
            Ok(g) => {
                return Err(Error::parse(path, idx + 1, format!("negative grade {g}")));
            }
            Err(_) if idx == 0 => continue, // header line
            Err(_) => {
                return Err(Error::parse(
                    path,
                    idx + 1,
                    format!("non-integer grade {:?}", fields[2]),
                ));
            }
        };
        let (qid, did) = (fields[0].trim(), fields[1].trim());
        let docs = judgments.entries.entry(qid.to_string()).or_default();
        if docs.insert(did.to_string(), grade).is_some() {
            return Err(Error::parse(
                path,
                idx + 1,
                format!("duplicate judgment for ({qid}, {did})"),
            ));
        }
    }
    if judgments.entries.is_empty() {
        return Err(Error::InvalidInput(format!(
            "no judgments in {}",
            path.display()
        )));
    }
    Ok(judgments)
}

/// Load a 6-column TREC run (`qid Q0 docid rank score tag`, whitespace
/// separated). Per-query lists come back sorted by descending score, with
/// ties broken by ascending doc_id, regardless of input row order.
pub fn load_run(path: &Path) -> Result<RankedRun> {
    let content = read_utf8(path)?;
    let mut run = RankedRun::default();
    let mut seen: HashSet<(String, String)> = HashSet::new();
    for (idx, line) in content.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 6 {
            return Err(Error::parse(
                path,
                idx + 1,
                format!("expected 6 columns, found {}", fields.len()),
            ));
        }
        let score: f64 = fields[4].parse().map_err(|_| {
            Error::parse(path, idx + 1, format!("non-numeric score {:?}", fields[4]))
        })?;
        let (qid, did) = (fields[0].to_string(), fields[2].to_string());
        if !seen.insert((qid.clone(), did.clone())) {
            return Err(Error::parse(
                path,
                idx + 1,
                format!("duplicate ({qid}, {did}) in run"),
            ));
        }
        run.rankings.entry(qid).or_default().push((did, score));
    }
    if run.rankings.is_empty() {
        return Err(Error::InvalidInput(format!(
            "empty run file: {}",
            path.display()
        )));
    }
    for ranking in run.rankings.values_mut() {
        ranking.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| a.0.cmp(&b.0))
        });
    }
    Ok(run)
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;
    use tempfile::NamedTempFile;

    fn tmp(content: &str) -> NamedTempFile {
        let mut f = NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn corpus_two_valid_lines() {
        let f = tmp("{\"_id\":\"d1\",\"title\":\"T\",\"text\":\"body one\"}\n{\"_id\":\"d2\",\"text\":\"body two\"}\n");
        let set = load_corpus(f.path()).unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!(set.docs[0].stat_text(), "T body one");
        assert_eq!(set.docs[1].stat_text(), "body two");
    }

    #[test]
    fn corpus_empty_file_is_error() {
        let f = tmp("");
        let err = load_corpus(f.path()).unwrap_err();
        assert!(err.to_string().contains("empty corpus"), "{err}");
    }

    #[test]
    fn corpus_missing_id_names_line() {
        let f = tmp(
            "{\"_id\":\"d1\",\"text\":\"a\"}\n{\"_id\":\"d2\",\"text\":\"b\"}\n{\"text\":\"c\"}\n",
        );
        let err = load_corpus(f.path()).unwrap_err();
        assert!(err.to_string().contains(":3:"), "{err}");
    }

    #[test]
    fn corpus_duplicate_id_is_error() {
        let f = tmp("{\"_id\":\"d1\",\"text\":\"a\"}\n{\"_id\":\"d1\",\"text\":\"b\"}\n");
        let err = load_corpus(f.path()).unwrap_err();
        assert!(err.to_string().contains("duplicate _id"), "{err}");
    }

    #[test]
    fn corpus_rejects_invalid_utf8() {
        let mut f = NamedTempFile::new().unwrap();
        f.write_all(b"{\"_id\":\"d1\",\"text\":\"\xff\xfe\"}\n").unwrap();
        assert!(load_corpus(f.path()).is_err());
    }

    #[test]
    fn corpus_roundtrip() {
        let f = tmp("{\"_id\":\"d1\",\"title\":\"T\",\"text\":\"a\"}\n{\"_id\":\"d2\",\"text\":\"b\"}\n");
        let set = load_corpus(f.path()).unwrap();
        let out = NamedTempFile::new().unwrap();
        set.write_jsonl(out.path()).unwrap();
        let mut reloaded = load_corpus(out.path()).unwrap();
        reloaded.id = set.id.clone();
        assert_eq!(set, reloaded);
    }

    #[test]
    fn queries_tagged_with_origin() {
        let f = tmp("{\"_id\":\"q1\",\"text\":\"a\"}\n{\"_id\":\"q2\",\"text\":\"b\"}\n{\"_id\":\"q3\",\"text\":\"c\"}\n");
        let set = load_queries(f.path(), QueryOrigin::Generated).unwrap();
        assert_eq!(set.len(), 3);
        assert_eq!(set.origin, QueryOrigin::Generated);
    }

    #[test]
    fn queries_duplicate_id_is_error() {
        let f = tmp("{\"_id\":\"q1\",\"text\":\"a\"}\n{\"_id\":\"q1\",\"text\":\"b\"}\n");
        assert!(load_queries(f.path(), QueryOrigin::Test).is_err());
    }

    #[test]
    fn queries_crlf_equals_lf() {
        let lf = tmp("{\"_id\":\"q1\",\"text\":\"a\"}\n{\"_id\":\"q2\",\"text\":\"b\"}\n");
        let crlf = tmp("{\"_id\":\"q1\",\"text\":\"a\"}\r\n{\"_id\":\"q2\",\"text\":\"b\"}\r\n");
        let a = load_queries(lf.path(), QueryOrigin::Test).unwrap();
        let mut b = load_queries(crlf.path(), QueryOrigin::Test).unwrap();
        b.id = a.id.clone();
        assert_eq!(a, b);
    }

    #[test]
    fn qrels_header_detected() {
        let f = tmp("query-id\tcorpus-id\tscore\nq1\td1\t2\nq2\td2\t0\n");
        let j = load_qrels(f.path()).unwrap();
        assert_eq!(j.num_entries(), 2);
        assert_eq!(j.grade("q1", "d1"), 2);
        assert_eq!(j.grade("q2", "d2"), 0);
    }

    #[test]
    fn qrels_no_header_keeps_first_row() {
        let f = tmp("q1\td1\t1\nq2\td1\t1\n");
        let j = load_qrels(f.path()).unwrap();
        assert_eq!(j.num_entries(), 2);
    }

    #[test]
    fn qrels_wrong_column_count_names_line() {
        let f = tmp("q1\td1\t1\nq2\td2\n");
        let err = load_qrels(f.path()).unwrap_err();
        assert!(err.to_string().contains(":2:"), "{err}");
    }

    #[test]
    fn qrels_non_integer_grade_is_error() {
        let f = tmp("q1\td1\t1\nq2\td2\thigh\n");
        assert!(load_qrels(f.path()).is_err());
    }

    #[test]
    fn qrels_order_insensitive() {
        let a = tmp("q1\td1\t1\nq2\td2\t2\n");
        let b = tmp("q2\td2\t2\nq1\td1\t1\n");
        assert_eq!(load_qrels(a.path()).unwrap(), load_qrels(b.path()).unwrap());
    }

    #[test]
    fn run_sorted_by_score() {
        let f = tmp("q1 Q0 d3 1 0.5 tag\nq1 Q0 d1 2 2.5 tag\nq1 Q0 d2 3 1.5 tag\n");
        let run = load_run(f.path()).unwrap();
        let ids: Vec<&str> = run.ranking("q1").iter().map(|(d, _)| d.as_str()).collect();
        assert_eq!(ids, ["d1", "d2", "d3"]);
    }

    #[test]
    fn run_ties_break_by_doc_id() {
        let f = tmp("q1 Q0 d_b 1 1.0 tag\nq1 Q0 d_a 2 1.0 tag\n");
        let run = load_run(f.path()).unwrap();
        let ids: Vec<&str> = run.ranking("q1").iter().map(|(d, _)| d.as_str()).collect();
        assert_eq!(ids, ["d_a", "d_b"]);
    }

    #[test]
    fn run_duplicate_pair_is_error() {
        let f = tmp("q1 Q0 d1 1 2.0 tag\nq1 Q0 d1 2 1.0 tag\n");
        assert!(load_run(f.path()).is_err());
    }

    #[test]
    fn run_non_numeric_score_is_error() {
        let f = tmp("q1 Q0 d1 1 abc tag\n");
        assert!(load_run(f.path()).is_err());
    }

    #[test]
    fn run_row_order_irrelevant() {
        let a = tmp("q1 Q0 d1 1 2.0 t\nq1 Q0 d2 2 1.0 t\nq2 Q0 d3 1 1.0 t\n");
        let b = tmp("q2 Q0 d3 1 1.0 t\nq1 Q0 d2 2 1.0 t\nq1 Q0 d1 1 2.0 t\n");
        assert_eq!(load_run(a.path()).unwrap(), load_run(b.path()).unwrap());
    }
}
