//! First-order term recommendations: indexing terms ranked by how many of
//! the query's documents they are assigned to.

use std::cmp::Ordering;

use serde::Serialize;

use crate::coindex::{CoIndex, PostingList, TermId};
use crate::corpus::{normalize_term, NormalizedTerm};
use crate::error::{Error, Result};

pub const DEFAULT_K: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TermCount {
    pub term: NormalizedTerm,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub count: u64,
}

impl TermCount {
    pub(crate) fn from_index(index: &CoIndex, id: TermId, count: u64) -> Self {
        let term = index.term(id).clone();
        let label = index.label(&term).map(str::to_owned);
        TermCount { term, label, count }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Recommendation {
    pub query: String,
    pub k: usize,
    pub scope: Vec<NormalizedTerm>,
    pub query_doc_count: u64,
    pub first_order: Vec<TermCount>,
}

/// Top-`k` indexing terms co-occurring with `q` inside `scope`, excluding
/// the scope terms and the query's own normalized form.
pub fn first_order_terms(index: &CoIndex, q: &str, k: usize, scope: &[NormalizedTerm]) -> Result<Recommendation> {
    recommend(index, q, k, scope, false)
}

/// Like [`first_order_terms`]; `include_self` keeps the query's own
/// normalized form among the candidates.
pub fn recommend(
    index: &CoIndex,
    q: &str,
    k: usize,
    scope: &[NormalizedTerm],
    include_self: bool,
) -> Result<Recommendation> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1"));
    }
    let qnorm = normalize_term(q).map_err(|_| Error::EmptyQuery)?;
    let base = scoped_docs(index, q, scope)?;
    Ok(recommend_within(index, q, &qnorm, &base, k, scope, include_self))
}

pub(crate) fn recommend_within(
    index: &CoIndex,
    q: &str,
    qnorm: &NormalizedTerm,
    base: &PostingList,
    k: usize,
    scope: &[NormalizedTerm],
    include_self: bool,
) -> Recommendation {
    let mut excluded: Vec<&NormalizedTerm> = scope.iter().collect();
    if !include_self {
        excluded.push(qnorm);
    }
    Recommendation {
        query: q.to_string(),
        k,
        scope: scope.to_vec(),
        query_doc_count: base.len() as u64,
        first_order: top_terms(index, base, &excluded, k),
    }
}

/// Query matches restricted to documents carrying every scope term.
pub fn scoped_docs(index: &CoIndex, q: &str, scope: &[NormalizedTerm]) -> Result<PostingList> {
    let matched = index.match_query(q)?.matched_docs;
    Ok(index.conjunction(&matched, scope))
}

/// Highest-count terms within `base`, count descending then term ascending.
/// Terms with zero count and terms in `excluded` never appear.
pub(crate) fn top_terms(index: &CoIndex, base: &PostingList, excluded: &[&NormalizedTerm], n: usize) -> Vec<TermCount> {
    let counts = index.term_counts_within(base);
    let excluded_ids: Vec<TermId> = excluded.iter().filter_map(|t| index.term_id(t)).collect();
    let mut ranked: Vec<(TermId, u64)> = counts
        .into_iter()
        .enumerate()
        .map(|(id, c)| (id as TermId, c))
        .filter(|&(id, c)| c > 0 && !excluded_ids.contains(&id))
        .collect();
    // term ids follow vocabulary order, so ties break lexicographically
    let by_rank = |a: &(TermId, u64), b: &(TermId, u64)| -> Ordering { b.1.cmp(&a.1).then(a.0.cmp(&b.0)) };
    if ranked.len() > n {
        ranked.select_nth_unstable_by(n - 1, by_rank);
        ranked.truncate(n);
    }
    ranked.sort_unstable_by(by_rank);
    ranked.into_iter().map(|(id, c)| TermCount::from_index(index, id, c)).collect()
}
