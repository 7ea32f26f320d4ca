//! On-disk index snapshots.
//!
//! A snapshot is one JSON document:
//!
//! ```text
//! {"version": 1, "doc_count": N, "vocab": [...], "term_postings": {...},
//!  "text_postings": {...}, "docs": [...]}
//! ```
//!
//! optionally gzip-compressed. Compression is detected from the gzip magic
//! bytes on load, never from the file name.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use flate2::read::GzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::posting::is_strictly_ascending;
use super::{CoIndex, DocOrdinal, PostingList, TermId};
use crate::corpus::{normalize_term, DocumentRecord, DocumentSet, NormalizedTerm};
use crate::error::{Error, Result};

pub const SNAPSHOT_VERSION: u64 = 1;

const GZIP_MAGIC: [u8; 2] = [0x1f, 0x8b];

#[derive(Serialize)]
struct SnapshotOut<'a> {
    version: u64,
    doc_count: usize,
    vocab: &'a [NormalizedTerm],
    term_postings: BTreeMap<&'a str, &'a [DocOrdinal]>,
    text_postings: BTreeMap<&'a str, &'a [DocOrdinal]>,
    docs: Vec<DocumentRecord>,
}

#[derive(Deserialize)]
struct SnapshotIn {
    doc_count: usize,
    vocab: Vec<String>,
    term_postings: BTreeMap<String, Vec<DocOrdinal>>,
    text_postings: BTreeMap<String, Vec<DocOrdinal>>,
    docs: Vec<DocumentRecord>,
}

pub fn save_snapshot<W: Write>(index: &CoIndex, out: W, gzip: bool) -> Result<()> {
    let snap = SnapshotOut {
        version: SNAPSHOT_VERSION,
        doc_count: index.doc_count(),
        vocab: &index.vocab,
        term_postings: index
            .vocab
            .iter()
            .zip(&index.term_postings)
            .map(|(t, p)| (t.as_str(), p.as_slice()))
            .collect(),
        text_postings: index.text_postings.iter().map(|(t, p)| (t.as_str(), p.as_slice())).collect(),
        docs: index.docs.iter().map(|d| d.to_record()).collect(),
    };
    if gzip {
        let mut enc = GzEncoder::new(out, Compression::default());
        serde_json::to_writer(&mut enc, &snap).map_err(std::io::Error::from)?;
        enc.finish()?.flush()?;
    } else {
        let mut out = out;
        serde_json::to_writer(&mut out, &snap).map_err(std::io::Error::from)?;
        out.flush()?;
    }
    Ok(())
}

/// Writes a snapshot, gzip-compressed when the path ends in `.gz`.
pub fn save_snapshot_file(index: &CoIndex, path: &Path) -> Result<()> {
    let gzip = path.extension().is_some_and(|e| e == "gz");
    save_snapshot(index, BufWriter::new(File::create(path)?), gzip)
}

pub fn load_snapshot_file(path: &Path) -> Result<CoIndex> {
    load_snapshot(BufReader::new(File::open(path)?))
}

fn corrupt(msg: impl ToString) -> Error {
    Error::CorruptSnapshot(msg.to_string())
}

pub fn load_snapshot<R: Read>(mut input: R) -> Result<CoIndex> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    if bytes.starts_with(&GZIP_MAGIC) {
        let mut plain = Vec::new();
        GzDecoder::new(bytes.as_slice()).read_to_end(&mut plain).map_err(corrupt)?;
        bytes = plain;
    }
    let value: Value = serde_json::from_slice(&bytes).map_err(corrupt)?;
    match value.get("version") {
        Some(Value::Number(n)) if n.as_u64() == Some(SNAPSHOT_VERSION) => {}
        Some(Value::String(s)) => return Err(Error::UnsupportedSnapshotVersion(s.clone())),
        Some(other) => return Err(Error::UnsupportedSnapshotVersion(other.to_string())),
        None => return Err(corrupt("missing version")),
    }
    let snap: SnapshotIn = serde_json::from_value(value).map_err(corrupt)?;
    restore(snap)
}

fn restore(snap: SnapshotIn) -> Result<CoIndex> {
    let (docs, rejected) = DocumentSet::from_records(snap.docs.into_iter().enumerate());
    if let Some(r) = rejected.first() {
        return Err(corrupt(format!("document {}: {}", r.line, r.reason)));
    }
    let docs = docs.into_documents();
    if snap.doc_count != docs.len() {
        return Err(corrupt(format!("doc_count {} but {} docs", snap.doc_count, docs.len())));
    }

    let vocab = snap
        .vocab
        .iter()
        .map(|s| canonical(s))
        .collect::<Result<Vec<_>>>()?;
    if !vocab.windows(2).all(|w| w[0] < w[1]) {
        return Err(corrupt("vocab not sorted"));
    }
    if snap.term_postings.len() != vocab.len() || !snap.term_postings.keys().eq(snap.vocab.iter()) {
        return Err(corrupt("term_postings keys differ from vocab"));
    }
    let term_postings = snap
        .term_postings
        .into_values()
        .map(|ids| checked_postings(ids, docs.len()))
        .collect::<Result<Vec<_>>>()?;
    let text_postings = snap
        .text_postings
        .into_iter()
        .map(|(k, ids)| Ok((canonical(&k)?, checked_postings(ids, docs.len())?)))
        .collect::<Result<HashMap<_, _>>>()?;

    let index = CoIndex::assemble(docs, vocab, term_postings, text_postings);
    for (ord, doc) in index.docs.iter().enumerate() {
        let mut expected: Vec<TermId> = doc
            .terms()
            .iter()
            .map(|t| index.term_id(t).ok_or_else(|| corrupt(format!("term {t} not in vocab"))))
            .collect::<Result<_>>()?;
        expected.sort_unstable();
        if expected != index.doc_terms[ord] {
            return Err(corrupt(format!("postings disagree with document {}", doc.id())));
        }
    }
    Ok(index)
}

fn canonical(s: &str) -> Result<NormalizedTerm> {
    match normalize_term(s) {
        Ok(t) if t.as_str() == s => Ok(t),
        _ => Err(corrupt(format!("term {s:?} is not normalized"))),
    }
}

fn checked_postings(ids: Vec<DocOrdinal>, doc_count: usize) -> Result<PostingList> {
    if ids.is_empty() || !is_strictly_ascending(&ids) || ids.last().is_some_and(|&l| l as usize >= doc_count) {
        return Err(corrupt("invalid posting list"));
    }
    Ok(PostingList::from_sorted_unchecked(ids))
}
