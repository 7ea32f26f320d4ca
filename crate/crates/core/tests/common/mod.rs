#![allow(dead_code)]

use termheat_core::{parse_corpus, CoIndex, HeatMap, NormalizedTerm};
use termheat_testkit::{to_jsonl, RefDoc, RefHeatMap};

pub fn index_of(docs: &[RefDoc]) -> CoIndex {
    let parsed = parse_corpus(to_jsonl(docs).as_bytes()).unwrap();
    assert!(parsed.rejections.is_empty(), "{:?}", parsed.rejections);
    CoIndex::build(parsed.documents)
}

pub fn norm(terms: &[String]) -> Vec<NormalizedTerm> {
    terms.iter().map(|t| NormalizedTerm::new(t).unwrap()).collect()
}

pub fn strs(terms: &[NormalizedTerm]) -> Vec<String> {
    terms.iter().map(|t| t.to_string()).collect()
}

pub fn term_pairs(v: &[termheat_core::TermCount]) -> Vec<(String, usize)> {
    v.iter().map(|tc| (tc.term.to_string(), tc.count as usize)).collect()
}

/// Compares every observable field of a map with the reference, returning
/// the first difference found.
pub fn compare_maps(map: &HeatMap, reference: &RefHeatMap) -> Result<(), String> {
    if map.query_doc_count as usize != reference.query_doc_count {
        return Err(format!("query_doc_count {} vs {}", map.query_doc_count, reference.query_doc_count));
    }
    if term_pairs(&map.columns) != reference.columns {
        return Err(format!("columns {:?} vs {:?}", term_pairs(&map.columns), reference.columns));
    }
    if term_pairs(&map.rows) != reference.rows {
        return Err(format!("rows {:?} vs {:?}", term_pairs(&map.rows), reference.rows));
    }
    if map.cells.len() != reference.cells.len() {
        return Err("row count differs".into());
    }
    for (i, (row, rrow)) in map.cells.iter().zip(&reference.cells).enumerate() {
        if row.len() != rrow.len() {
            return Err(format!("row {i} width differs"));
        }
        for (j, (c, rc)) in row.iter().zip(rrow).enumerate() {
            match (c, rc) {
                (None, None) => {}
                (Some(c), Some(rc)) => {
                    let v = rc.num as f64 / rc.den as f64;
                    if c.count as usize != rc.count
                        || c.normalized != v
                        || c.color != rc.color
                        || c.band.as_str() != rc.band
                    {
                        return Err(format!("cell [{i}][{j}] {c:?} vs {rc:?}"));
                    }
                }
                _ => return Err(format!("cell [{i}][{j}] presence differs")),
            }
        }
    }
    Ok(())
}
