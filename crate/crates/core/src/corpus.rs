//! Corpus ingestion: JSONL records, term normalization and tokenization.
//!
//! A corpus is a stream of JSON objects, one per line:
//!
//! ```text
//! {"id": "d1", "title": "...", "abstract": "...", "terms": ["A", "B"], "labels": {"A": "Alpha"}}
//! ```
//!
//! `abstract` and `labels` are optional. Indexing terms are matched on their
//! normalized form (NFC, case-folded, whitespace collapsed); labels are kept
//! for display only.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};

/// A controlled-vocabulary term in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct NormalizedTerm(String);

impl NormalizedTerm {
    pub fn new(raw: &str) -> Result<Self> {
        normalize_term(raw)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NormalizedTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for NormalizedTerm {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for NormalizedTerm {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        normalize_term(&s)
    }
}

impl From<NormalizedTerm> for String {
    fn from(t: NormalizedTerm) -> String {
        t.0
    }
}

fn fold(s: &str) -> String {
    let folded = caseless::default_case_fold_str(&s.nfc().collect::<String>());
    folded.nfc().collect()
}

/// NFC, case fold, trim, and collapse internal whitespace runs to one space.
pub fn normalize_term(raw: &str) -> Result<NormalizedTerm> {
    let folded = fold(raw);
    let collapsed = folded.split_whitespace().collect::<Vec<_>>().join(" ");
    if collapsed.is_empty() {
        return Err(Error::EmptyTerm);
    }
    Ok(NormalizedTerm(collapsed))
}

/// Splits free text into normalized word tokens.
///
/// Any run of characters that are neither alphanumeric nor `-` separates
/// tokens. A hyphen stays in a token only when it sits between two
/// alphanumeric characters, so `right-wing` is one token while `a--b` and
/// `-x-` are not joined or padded.
pub fn tokenize(text: &str) -> Vec<NormalizedTerm> {
    let text: String = text.nfc().collect();
    text.split(|c: char| !(c.is_alphanumeric() || c == '-'))
        .flat_map(|chunk| chunk.split("--"))
        .map(|piece| piece.trim_matches('-'))
        .filter(|piece| !piece.is_empty())
        .map(|piece| NormalizedTerm(fold(piece)))
        .collect()
}

/// One corpus line as it appears on the wire.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentRecord {
    pub id: String,
    pub title: String,
    #[serde(rename = "abstract", default, skip_serializing_if = "Option::is_none")]
    pub abstract_text: Option<String>,
    pub terms: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub labels: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    id: String,
    title: String,
    abstract_text: Option<String>,
    /// Raw terms as given, minus entries whose normalized form repeats.
    raw_terms: Vec<String>,
    /// Normalized forms, parallel to `raw_terms`.
    terms: Vec<NormalizedTerm>,
    labels: BTreeMap<String, String>,
}

impl Document {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn title(&self) -> &str {
        &self.title
    }

    pub fn abstract_text(&self) -> Option<&str> {
        self.abstract_text.as_deref()
    }

    pub fn terms(&self) -> &[NormalizedTerm] {
        &self.terms
    }

    pub fn raw_terms(&self) -> &[String] {
        &self.raw_terms
    }

    pub fn labels(&self) -> &BTreeMap<String, String> {
        &self.labels
    }

    /// Display label for each indexing term: the configured label when one
    /// exists for the raw term, else the raw term itself.
    pub fn term_labels(&self) -> Vec<String> {
        self.raw_terms
            .iter()
            .map(|raw| self.labels.get(raw).unwrap_or(raw).clone())
            .collect()
    }

    /// Title followed by abstract, as one token sequence.
    pub fn text_tokens(&self) -> Vec<NormalizedTerm> {
        let mut tokens = tokenize(&self.title);
        if let Some(a) = &self.abstract_text {
            tokens.extend(tokenize(a));
        }
        tokens
    }

    pub fn to_record(&self) -> DocumentRecord {
        DocumentRecord {
            id: self.id.clone(),
            title: self.title.clone(),
            abstract_text: self.abstract_text.clone(),
            terms: self.raw_terms.clone(),
            labels: self.labels.clone(),
        }
    }

    fn from_record(rec: DocumentRecord) -> std::result::Result<Self, RejectReason> {
        if rec.id.trim().is_empty() {
            return Err(RejectReason::EmptyId);
        }
        let mut seen = HashSet::new();
        let mut raw_terms = Vec::new();
        let mut terms = Vec::new();
        for raw in rec.terms {
            let Ok(norm) = normalize_term(&raw) else { continue };
            if seen.insert(norm.clone()) {
                raw_terms.push(raw);
                terms.push(norm);
            }
        }
        if terms.is_empty() {
            return Err(RejectReason::NoTerms);
        }
        Ok(Document {
            id: rec.id,
            title: rec.title,
            abstract_text: rec.abstract_text,
            raw_terms,
            terms,
            labels: rec.labels,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RejectReason {
    Malformed(String),
    EmptyId,
    DuplicateId,
    NoTerms,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RejectReason::Malformed(e) => write!(f, "malformed record ({e})"),
            RejectReason::EmptyId => f.write_str("empty id"),
            RejectReason::DuplicateId => f.write_str("duplicate id"),
            RejectReason::NoTerms => f.write_str("no indexing terms"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    /// 1-based input line.
    pub line: usize,
    pub reason: RejectReason,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}, line {}", self.reason, self.line)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DocumentSet {
    documents: Vec<Document>,
    vocabulary: BTreeSet<NormalizedTerm>,
}

impl DocumentSet {
    /// Validates records in order. The n-th record is reported as line n+1
    /// on rejection unless the caller supplies its own numbering.
    pub fn from_records<I>(records: I) -> (DocumentSet, Vec<Rejection>)
    where
        I: IntoIterator<Item = (usize, DocumentRecord)>,
    {
        let mut set = DocumentSet::default();
        let mut ids = HashSet::new();
        let mut rejections = Vec::new();
        for (line, rec) in records {
            if ids.contains(&rec.id) {
                rejections.push(Rejection { line, reason: RejectReason::DuplicateId });
                continue;
            }
            match Document::from_record(rec) {
                Ok(doc) => {
                    ids.insert(doc.id.clone());
                    set.vocabulary.extend(doc.terms.iter().cloned());
                    set.documents.push(doc);
                }
                Err(reason) => rejections.push(Rejection { line, reason }),
            }
        }
        (set, rejections)
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn vocabulary(&self) -> &BTreeSet<NormalizedTerm> {
        &self.vocabulary
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn into_documents(self) -> Vec<Document> {
        self.documents
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> io::Result<()> {
        for doc in &self.documents {
            serde_json::to_writer(&mut out, &doc.to_record())?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default)]
pub struct ParsedCorpus {
    pub documents: DocumentSet,
    pub rejections: Vec<Rejection>,
}

/// Reads a JSONL corpus. Bad lines are reported and skipped; blank lines are
/// ignored. Only I/O failures abort the parse.
pub fn parse_corpus<R: BufRead>(input: R) -> Result<ParsedCorpus> {
    let mut records = Vec::new();
    let mut rejections = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<DocumentRecord>(&line) {
            Ok(rec) => records.push((i + 1, rec)),
            Err(e) => rejections.push(Rejection { line: i + 1, reason: RejectReason::Malformed(e.to_string()) }),
        }
    }
    let (documents, mut rejected) = DocumentSet::from_records(records);
    rejections.append(&mut rejected);
    rejections.sort_by_key(|r| r.line);
    Ok(ParsedCorpus { documents, rejections })
}
