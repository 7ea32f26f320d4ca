//! Immutable inverted index over indexing terms and title/abstract tokens.
//!
//! Every count the engine reports is the length of a posting-list
//! intersection computed here. Documents are addressed by dense ordinals
//! (their position in the indexed [`DocumentSet`]); external ids only show up
//! at the API boundary.

mod posting;
mod snapshot;

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

pub use posting::{intersect_sorted, DocOrdinal, PostingList};
pub use snapshot::{load_snapshot, load_snapshot_file, save_snapshot, save_snapshot_file, SNAPSHOT_VERSION};

use crate::corpus::{normalize_term, tokenize, Document, DocumentSet, NormalizedTerm};
use crate::error::{Error, Result};

/// Position of a term in the sorted vocabulary. Ordering term ids is the
/// same as ordering the terms themselves.
pub type TermId = u32;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QueryMatch {
    pub query: Vec<NormalizedTerm>,
    pub matched_docs: PostingList,
}

#[derive(Debug, Clone)]
pub struct CoIndex {
    docs: Vec<Document>,
    vocab: Vec<NormalizedTerm>,
    term_ids: HashMap<NormalizedTerm, TermId>,
    term_postings: Vec<PostingList>,
    /// Term ids per document, ascending.
    doc_terms: Vec<Vec<TermId>>,
    text_postings: HashMap<NormalizedTerm, PostingList>,
    /// First label seen for each term, in document order.
    labels: HashMap<TermId, String>,
}

impl CoIndex {
    pub fn build(docs: DocumentSet) -> CoIndex {
        let docs = docs.into_documents();
        let mut term_docs: BTreeMap<NormalizedTerm, Vec<DocOrdinal>> = BTreeMap::new();
        let mut token_docs: HashMap<NormalizedTerm, Vec<DocOrdinal>> = HashMap::new();
        for (ord, doc) in docs.iter().enumerate() {
            let ord = ord as DocOrdinal;
            for term in doc.terms() {
                term_docs.entry(term.clone()).or_default().push(ord);
            }
            for token in doc.text_tokens() {
                let list = token_docs.entry(token).or_default();
                if list.last() != Some(&ord) {
                    list.push(ord);
                }
            }
        }
        let (vocab, postings): (Vec<_>, Vec<_>) = term_docs
            .into_iter()
            .map(|(t, ids)| (t, PostingList::from_sorted_unchecked(ids)))
            .unzip();
        let text_postings = token_docs
            .into_iter()
            .map(|(t, ids)| (t, PostingList::from_sorted_unchecked(ids)))
            .collect();
        Self::assemble(docs, vocab, postings, text_postings)
    }

    /// Derives the per-document and label tables from the postings.
    fn assemble(
        docs: Vec<Document>,
        vocab: Vec<NormalizedTerm>,
        term_postings: Vec<PostingList>,
        text_postings: HashMap<NormalizedTerm, PostingList>,
    ) -> CoIndex {
        let term_ids: HashMap<NormalizedTerm, TermId> =
            vocab.iter().enumerate().map(|(i, t)| (t.clone(), i as TermId)).collect();
        let mut doc_terms = vec![Vec::new(); docs.len()];
        for (id, list) in term_postings.iter().enumerate() {
            for ord in list {
                doc_terms[ord as usize].push(id as TermId);
            }
        }
        let mut labels = HashMap::new();
        for doc in &docs {
            for (raw, norm) in doc.raw_terms().iter().zip(doc.terms()) {
                if let (Some(label), Some(&id)) = (doc.labels().get(raw), term_ids.get(norm)) {
                    labels.entry(id).or_insert_with(|| label.clone());
                }
            }
        }
        CoIndex { docs, vocab, term_ids, term_postings, doc_terms, text_postings, labels }
    }

    pub fn doc_count(&self) -> usize {
        self.docs.len()
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab.len()
    }

    /// Sorted vocabulary; a term's position is its [`TermId`].
    pub fn vocabulary(&self) -> &[NormalizedTerm] {
        &self.vocab
    }

    pub fn documents(&self) -> &[Document] {
        &self.docs
    }

    pub fn document(&self, ord: DocOrdinal) -> Option<&Document> {
        self.docs.get(ord as usize)
    }

    pub fn term_id(&self, term: &NormalizedTerm) -> Option<TermId> {
        self.term_ids.get(term).copied()
    }

    pub fn term(&self, id: TermId) -> &NormalizedTerm {
        &self.vocab[id as usize]
    }

    pub fn contains_term(&self, term: &NormalizedTerm) -> bool {
        self.term_ids.contains_key(term)
    }

    pub fn postings(&self, term: &NormalizedTerm) -> Option<&PostingList> {
        self.term_id(term).map(|id| &self.term_postings[id as usize])
    }

    pub fn postings_by_id(&self, id: TermId) -> &PostingList {
        &self.term_postings[id as usize]
    }

    pub fn text_postings(&self, token: &NormalizedTerm) -> Option<&PostingList> {
        self.text_postings.get(token)
    }

    pub fn doc_term_ids(&self, ord: DocOrdinal) -> &[TermId] {
        &self.doc_terms[ord as usize]
    }

    pub fn label(&self, term: &NormalizedTerm) -> Option<&str> {
        self.term_id(term).and_then(|id| self.labels.get(&id)).map(String::as_str)
    }

    pub fn all_docs(&self) -> PostingList {
        PostingList::full(self.docs.len())
    }

    /// Documents whose title+abstract token sequence contains the query's
    /// tokens consecutively, plus documents indexed with the whole query as
    /// a term.
    pub fn match_query(&self, q: &str) -> Result<QueryMatch> {
        let whole = normalize_term(q).map_err(|_| Error::EmptyQuery)?;
        let tokens = tokenize(q);
        let phrase = self.phrase_docs(&tokens);
        let matched_docs = match self.postings(&whole) {
            Some(exact) => PostingList::from_unsorted(phrase.iter().chain(exact.iter()).collect()),
            None => phrase,
        };
        Ok(QueryMatch { query: tokens, matched_docs })
    }

    fn phrase_docs(&self, tokens: &[NormalizedTerm]) -> PostingList {
        let Some(candidates) = self.conjunction_of(tokens.iter().map(|t| self.text_postings.get(t))) else {
            return PostingList::new();
        };
        if tokens.len() == 1 {
            return candidates;
        }
        let ids = candidates
            .iter()
            .filter(|&ord| {
                self.docs[ord as usize]
                    .text_tokens()
                    .windows(tokens.len())
                    .any(|w| w == tokens)
            })
            .collect();
        PostingList::from_sorted_unchecked(ids)
    }

    /// `base ∩ D(t1) ∩ … ∩ D(tn)`. An unindexed term empties the result;
    /// no terms returns `base` unchanged.
    pub fn conjunction(&self, base: &PostingList, terms: &[NormalizedTerm]) -> PostingList {
        if terms.is_empty() {
            return base.clone();
        }
        let lists = std::iter::once(Some(base)).chain(terms.iter().map(|t| self.postings(t)));
        self.conjunction_of(lists).unwrap_or_default()
    }

    /// Intersects lists shortest first. `None` when the iterator is empty;
    /// an empty list when any entry is missing.
    fn conjunction_of<'a, I>(&'a self, lists: I) -> Option<PostingList>
    where
        I: IntoIterator<Item = Option<&'a PostingList>>,
    {
        let mut lists: Vec<&PostingList> = match lists.into_iter().collect::<Option<Vec<_>>>() {
            Some(l) if l.is_empty() => return None,
            Some(l) => l,
            None => return Some(PostingList::new()),
        };
        lists.sort_by_key(|l| l.len());
        let mut acc = lists[0].clone();
        for l in &lists[1..] {
            if acc.is_empty() {
                break;
            }
            acc = acc.intersect(l);
        }
        Some(acc)
    }

    /// Number of documents in `base` carrying each term, indexed by
    /// [`TermId`].
    pub fn term_counts_within(&self, base: &PostingList) -> Vec<u64> {
        let mut counts = vec![0u64; self.vocab.len()];
        for ord in base {
            for &id in &self.doc_terms[ord as usize] {
                counts[id as usize] += 1;
            }
        }
        counts
    }
}
