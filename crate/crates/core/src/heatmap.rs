//! Two-dimensional co-word heat maps.
//!
//! Columns are the first-order terms of a query. Each column contributes its
//! top-`m` second-order terms (terms co-occurring with both the query and the
//! column term); the union of those lists, deduplicated in scan order, forms
//! the rows. A cell holds the number of query documents carrying both its
//! row and column term, min-max normalized across the map and mapped onto a
//! blue → green → yellow → red scale.

use serde::Serialize;

use crate::coindex::{CoIndex, PostingList};
use crate::corpus::{normalize_term, NormalizedTerm};
use crate::error::{Error, Result};
use crate::recommender::{recommend_within, scoped_docs, top_terms, TermCount};

pub const DEFAULT_M: usize = 3;

const THIRD: f64 = 1.0 / 3.0;
const TWO_THIRDS: f64 = 2.0 / 3.0;

/// Color stops at v = 0, 1/3, 2/3, 1.
const STOPS: [[f64; 3]; 4] = [
    [0.0, 0.0, 255.0],
    [0.0, 255.0, 0.0],
    [255.0, 255.0, 0.0],
    [255.0, 0.0, 0.0],
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Band {
    Hot,
    Warm,
    Cold,
}

impl Band {
    pub fn as_str(self) -> &'static str {
        match self {
            Band::Hot => "hot",
            Band::Warm => "warm",
            Band::Cold => "cold",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellValue {
    pub count: u64,
    pub normalized: f64,
    pub color: String,
    pub band: Band,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeatMap {
    pub query: String,
    pub scope: Vec<NormalizedTerm>,
    pub k: usize,
    pub m: usize,
    pub query_doc_count: u64,
    pub columns: Vec<TermCount>,
    pub rows: Vec<TermCount>,
    /// Indexed `[row][column]`; `None` where row and column are the same term.
    pub cells: Vec<Vec<Option<CellValue>>>,
}

impl HeatMap {
    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn cell(&self, row: usize, column: usize) -> Option<&CellValue> {
        self.cells.get(row)?.get(column)?.as_ref()
    }

    pub fn present_cells(&self) -> impl Iterator<Item = &CellValue> {
        self.cells.iter().flatten().flatten()
    }
}

/// Top-`m` terms co-occurring with both `qdocs` and `f`, with their triple
/// counts. `excluded` should hold the scope and the normalized query; `f`
/// itself is always left out.
pub fn second_order_terms(
    index: &CoIndex,
    qdocs: &PostingList,
    f: &NormalizedTerm,
    m: usize,
    excluded: &[NormalizedTerm],
) -> Vec<TermCount> {
    let column_docs = index.conjunction(qdocs, std::slice::from_ref(f));
    let mut skip: Vec<&NormalizedTerm> = excluded.iter().collect();
    skip.push(f);
    top_terms(index, &column_docs, &skip, m)
}

/// Left-to-right, top-to-bottom union of the per-column lists, keeping the
/// first occurrence of each term. Counts are replaced by the term's count
/// within `qdocs`.
pub fn assemble_rows(per_column: &[Vec<TermCount>], qdocs: &PostingList, index: &CoIndex) -> Vec<TermCount> {
    let mut rows: Vec<TermCount> = Vec::new();
    for tc in per_column.iter().flatten() {
        if rows.iter().any(|r| r.term == tc.term) {
            continue;
        }
        let count = index.postings(&tc.term).map_or(0, |p| qdocs.intersection_len(p)) as u64;
        rows.push(TermCount { count, ..tc.clone() });
    }
    rows
}

/// `cells[i][j] = |qdocs ∩ D(columns[j]) ∩ D(rows[i])|`, or `None` on the
/// diagonal where the two terms coincide.
pub fn cell_counts(
    index: &CoIndex,
    qdocs: &PostingList,
    columns: &[NormalizedTerm],
    rows: &[NormalizedTerm],
) -> Vec<Vec<Option<u64>>> {
    let column_docs: Vec<PostingList> = columns
        .iter()
        .map(|f| index.conjunction(qdocs, std::slice::from_ref(f)))
        .collect();
    rows.iter()
        .map(|g| {
            let row_postings = index.postings(g);
            columns
                .iter()
                .zip(&column_docs)
                .map(|(f, docs)| {
                    (f != g).then(|| row_postings.map_or(0, |p| docs.intersection_len(p)) as u64)
                })
                .collect()
        })
        .collect()
}

/// Min-max scales the present cells to [0, 1]. A map whose present cells
/// all share one value maps every one of them to 0.5.
pub fn normalize_matrix(counts: &[Vec<Option<u64>>]) -> Vec<Vec<Option<f64>>> {
    let present = counts.iter().flatten().flatten().copied();
    let (lo, hi) = present.fold((u64::MAX, 0), |(lo, hi), c| (lo.min(c), hi.max(c)));
    counts
        .iter()
        .map(|row| {
            row.iter()
                .map(|c| {
                    c.map(|c| if hi > lo { (c - lo) as f64 / (hi - lo) as f64 } else { 0.5 })
                })
                .collect()
        })
        .collect()
}

pub fn band_of(v: f64) -> Band {
    if v < THIRD {
        Band::Cold
    } else if v < TWO_THIRDS {
        Band::Warm
    } else {
        Band::Hot
    }
}

/// Rounds half away from zero. Values within 1e-6 of a half count as the
/// half, so float noise from the interpolation cannot flip a rounding.
fn round_channel(x: f64) -> u8 {
    let snapped = (x * 1e6).round() / 1e6;
    snapped.round().clamp(0.0, 255.0) as u8
}

/// Uppercase `#RRGGBB` and band for a normalized heat value.
pub fn color_of(v: f64) -> Result<(String, Band)> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::OutOfRange(v));
    }
    let scaled = v * 3.0;
    let seg = (scaled.floor() as usize).min(2);
    let frac = scaled - seg as f64;
    let (from, to) = (STOPS[seg], STOPS[seg + 1]);
    let [r, g, b]: [u8; 3] = std::array::from_fn(|i| round_channel(from[i] + (to[i] - from[i]) * frac));
    Ok((format!("#{r:02X}{g:02X}{b:02X}"), band_of(v)))
}

pub fn build_heatmap(index: &CoIndex, q: &str, k: usize, m: usize, scope: &[NormalizedTerm]) -> Result<HeatMap> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1"));
    }
    if m == 0 {
        return Err(Error::InvalidParameter("m must be at least 1"));
    }
    let qnorm = normalize_term(q).map_err(|_| Error::EmptyQuery)?;
    let qdocs = scoped_docs(index, q, scope)?;
    let rec = recommend_within(index, q, &qnorm, &qdocs, k, scope, false);

    let mut excluded = scope.to_vec();
    excluded.push(qnorm);
    let per_column: Vec<Vec<TermCount>> = rec
        .first_order
        .iter()
        .map(|c| second_order_terms(index, &qdocs, &c.term, m, &excluded))
        .collect();
    let rows = assemble_rows(&per_column, &qdocs, index);

    let column_terms: Vec<NormalizedTerm> = rec.first_order.iter().map(|c| c.term.clone()).collect();
    let row_terms: Vec<NormalizedTerm> = rows.iter().map(|r| r.term.clone()).collect();
    let counts = cell_counts(index, &qdocs, &column_terms, &row_terms);
    let normalized = normalize_matrix(&counts);

    let cells = counts
        .iter()
        .zip(&normalized)
        .map(|(crow, nrow)| {
            crow.iter()
                .zip(nrow)
                .map(|(c, v)| match (c, v) {
                    (Some(count), Some(v)) => {
                        let (color, band) = color_of(*v)?;
                        Ok(Some(CellValue { count: *count, normalized: *v, color, band }))
                    }
                    _ => Ok(None),
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(HeatMap {
        query: q.to_string(),
        scope: scope.to_vec(),
        k,
        m,
        query_doc_count: rec.query_doc_count,
        columns: rec.first_order,
        rows,
        cells,
    })
}
