//! Drilldown and scope narrowing for an exploration session.
//!
//! Nothing here keeps state between calls. The client carries the query and
//! the accumulated [`Scope`] and sends both with every request, so replaying
//! a click path always reproduces the same maps.

use serde::Serialize;

use crate::coindex::CoIndex;
use crate::corpus::{normalize_term, NormalizedTerm};
use crate::error::{Error, Result};
use crate::heatmap::{build_heatmap, HeatMap};
use crate::recommender::scoped_docs;

/// Terms the user has selected so far, in selection order, without repeats.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Scope {
    terms: Vec<NormalizedTerm>,
}

impl Scope {
    pub fn new() -> Self {
        Scope::default()
    }

    pub fn from_terms<I: IntoIterator<Item = NormalizedTerm>>(terms: I) -> Self {
        let mut scope = Scope::new();
        scope.extend(terms);
        scope
    }

    /// Comma-separated list; each entry is normalized, blank entries skipped.
    pub fn parse(list: &str) -> Self {
        Scope::from_terms(parse_term_list(list))
    }

    pub fn terms(&self) -> &[NormalizedTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn contains(&self, term: &NormalizedTerm) -> bool {
        self.terms.contains(term)
    }

    pub fn extend<I: IntoIterator<Item = NormalizedTerm>>(&mut self, terms: I) {
        for t in terms {
            if !self.terms.contains(&t) {
                self.terms.push(t);
            }
        }
    }

    pub fn with(&self, terms: &[NormalizedTerm]) -> Scope {
        let mut next = self.clone();
        next.extend(terms.iter().cloned());
        next
    }

    pub fn without(&self, term: &NormalizedTerm) -> Scope {
        Scope { terms: self.terms.iter().filter(|t| *t != term).cloned().collect() }
    }

    /// Fails on the first term the index has never seen.
    pub fn validate(&self, index: &CoIndex) -> Result<()> {
        check_known(index, &self.terms)
    }
}

pub fn parse_term_list(list: &str) -> Vec<NormalizedTerm> {
    list.split(',').filter_map(|s| normalize_term(s).ok()).collect()
}

fn check_known(index: &CoIndex, terms: &[NormalizedTerm]) -> Result<()> {
    match terms.iter().find(|t| !index.contains_term(t)) {
        Some(t) => Err(Error::UnknownTerm(t.to_string())),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DocumentItem {
    pub id: String,
    pub title: String,
    /// Display labels of the document's indexing terms.
    pub terms: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DocumentPage {
    pub total: u64,
    pub page: usize,
    pub page_size: usize,
    pub items: Vec<DocumentItem>,
}

/// Documents matching `q` and carrying every scope and selection term, one
/// page at a time in ordinal order. Pages past the end are empty.
pub fn drilldown_documents(
    index: &CoIndex,
    q: &str,
    scope: &Scope,
    selection: &[NormalizedTerm],
    page: usize,
    page_size: usize,
) -> Result<DocumentPage> {
    if page == 0 {
        return Err(Error::InvalidParameter("page must be at least 1"));
    }
    if page_size == 0 {
        return Err(Error::InvalidParameter("page_size must be at least 1"));
    }
    let required: Vec<NormalizedTerm> = scope.terms().iter().chain(selection).cloned().collect();
    let docs = scoped_docs(index, q, &required)?;
    let items = docs
        .iter()
        .skip((page - 1).saturating_mul(page_size))
        .take(page_size)
        .filter_map(|ord| index.document(ord))
        .map(|d| DocumentItem { id: d.id().to_string(), title: d.title().to_string(), terms: d.term_labels() })
        .collect();
    Ok(DocumentPage { total: docs.len() as u64, page, page_size, items })
}

/// Adds the clicked terms to the scope and rebuilds the map inside it.
pub fn adapt(
    index: &CoIndex,
    q: &str,
    scope: &Scope,
    clicked: &[NormalizedTerm],
    k: usize,
    m: usize,
) -> Result<(Scope, HeatMap)> {
    check_known(index, clicked)?;
    let next = scope.with(clicked);
    let map = build_heatmap(index, q, k, m, next.terms())?;
    Ok((next, map))
}

/// Starts over with a new query and an empty scope.
pub fn change_query(index: &CoIndex, new_q: &str, k: usize, m: usize) -> Result<(Scope, HeatMap)> {
    let scope = Scope::new();
    let map = build_heatmap(index, new_q, k, m, scope.terms())?;
    Ok((scope, map))
}
