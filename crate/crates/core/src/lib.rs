//! Co-word heat maps over a controlled indexing vocabulary.
//!
//! A free-text query is matched against titles, abstracts and indexing
//! terms. The indexing terms that most often co-occur with the matching
//! documents become the columns of a heat map; for each column, the terms
//! that co-occur with both the query and that column become rows. Cells hold
//! document counts for each (row, column, query) combination and are colored
//! by their min-max normalized value. A session narrows the document set by
//! adding clicked terms to a conjunctive scope.
//!
//! ```
//! use termheat_core::{build_heatmap, parse_corpus, CoIndex};
//!
//! let jsonl = r#"{"id":"d1","title":"violence report","terms":["A","B"]}"#;
//! let index = CoIndex::build(parse_corpus(jsonl.as_bytes()).unwrap().documents);
//! let map = build_heatmap(&index, "violence", 10, 3, &[]).unwrap();
//! assert_eq!(map.query_doc_count, 1);
//! ```

pub mod coindex;
pub mod corpus;
pub mod error;
pub mod heatmap;
pub mod recommender;
pub mod session;

pub use coindex::{CoIndex, PostingList, QueryMatch};
pub use corpus::{normalize_term, parse_corpus, tokenize, Document, DocumentSet, NormalizedTerm, ParsedCorpus};
pub use error::{Error, Result};
pub use heatmap::{build_heatmap, color_of, Band, CellValue, HeatMap, DEFAULT_M};
pub use recommender::{first_order_terms, recommend, Recommendation, TermCount, DEFAULT_K};
pub use session::{adapt, change_query, drilldown_documents, DocumentPage, Scope};
