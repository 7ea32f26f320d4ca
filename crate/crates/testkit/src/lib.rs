//! Index-free reference implementation used by the test suites.
//!
//! Everything here answers questions by scanning every document on every
//! call. Nothing is shared with `termheat-core`: the tokenizer, the term
//! normalization (ASCII-only, which is all the generated corpora use), the
//! top-k selection and the color arithmetic are all written independently so
//! that agreement between the two is meaningful.

use std::collections::BTreeSet;

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

/// A raw corpus record, shaped like one JSONL line.
#[derive(Debug, Clone)]
pub struct RefDoc {
    pub id: String,
    pub title: String,
    pub abstract_text: Option<String>,
    pub terms: Vec<String>,
}

impl RefDoc {
    pub fn new(id: &str, title: &str, terms: &[&str]) -> Self {
        RefDoc {
            id: id.to_string(),
            title: title.to_string(),
            abstract_text: None,
            terms: terms.iter().map(|t| t.to_string()).collect(),
        }
    }
}

/// The five-document fixture used throughout the examples.
pub fn tiny5() -> Vec<RefDoc> {
    vec![
        RefDoc::new("d1", "violence report", &["A", "B", "C"]),
        RefDoc::new("d2", "violence study", &["A", "B"]),
        RefDoc::new("d3", "violence essay", &["A", "C"]),
        RefDoc::new("d4", "peace note", &["B", "C"]),
        RefDoc::new("d5", "violence memo", &["A"]),
    ]
}

pub fn to_jsonl(docs: &[RefDoc]) -> String {
    let mut out = String::new();
    for d in docs {
        let mut rec = json!({ "id": d.id, "title": d.title, "terms": d.terms });
        if let Some(a) = &d.abstract_text {
            rec["abstract"] = json!(a);
        }
        out.push_str(&rec.to_string());
        out.push('\n');
    }
    out
}

/// Repeats every document `times` times with fresh ids, keeping the order
/// of the original documents for each copy round.
pub fn duplicate(docs: &[RefDoc], times: usize) -> Vec<RefDoc> {
    let mut out = Vec::with_capacity(docs.len() * times);
    for round in 0..times {
        for d in docs {
            let mut copy = d.clone();
            copy.id = format!("{}~{round}", d.id);
            out.push(copy);
        }
    }
    out
}

fn ref_normalize(s: &str) -> String {
    s.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_ascii_lowercase()
}

/// Character-by-character tokenizer: a hyphen survives only when both of its
/// neighbours are alphanumeric.
fn ref_tokens(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut cur = String::new();
    for i in 0..chars.len() {
        let c = chars[i];
        let keep = c.is_alphanumeric()
            || (c == '-'
                && i > 0
                && i + 1 < chars.len()
                && chars[i - 1].is_alphanumeric()
                && chars[i + 1].is_alphanumeric());
        if keep {
            cur.push(c);
        } else if !cur.is_empty() {
            out.push(std::mem::take(&mut cur).to_ascii_lowercase());
        }
    }
    if !cur.is_empty() {
        out.push(cur.to_ascii_lowercase());
    }
    out
}

struct ScanDoc {
    tokens: Vec<String>,
    terms: BTreeSet<String>,
}

/// A term with its document count, as the reference computes it.
pub type RefCount = (String, usize);

#[derive(Debug, Clone, PartialEq)]
pub struct RefCell {
    pub count: usize,
    /// Normalized value as the exact fraction `num / den`.
    pub num: usize,
    pub den: usize,
    pub color: String,
    pub band: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefHeatMap {
    pub query_doc_count: usize,
    pub columns: Vec<RefCount>,
    pub rows: Vec<RefCount>,
    pub cells: Vec<Vec<Option<RefCell>>>,
}

pub struct Oracle {
    docs: Vec<ScanDoc>,
}

impl Oracle {
    pub fn new(docs: &[RefDoc]) -> Self {
        let docs = docs
            .iter()
            .map(|d| {
                let mut text = d.title.clone();
                if let Some(a) = &d.abstract_text {
                    text.push(' ');
                    text.push_str(a);
                }
                ScanDoc {
                    tokens: ref_tokens(&text),
                    terms: d.terms.iter().map(|t| ref_normalize(t)).collect(),
                }
            })
            .collect();
        Oracle { docs }
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn vocabulary(&self) -> BTreeSet<String> {
        self.docs.iter().flat_map(|d| d.terms.iter().cloned()).collect()
    }

    /// Documents whose token stream contains the query tokens consecutively,
    /// or whose indexing terms contain the whole normalized query.
    pub fn matched(&self, q: &str) -> Vec<usize> {
        let qt = ref_tokens(q);
        let qn = ref_normalize(q);
        (0..self.docs.len())
            .filter(|&i| {
                let d = &self.docs[i];
                let phrase = !qt.is_empty()
                    && d.tokens.len() >= qt.len()
                    && (0..=d.tokens.len() - qt.len()).any(|s| d.tokens[s..s + qt.len()] == qt[..]);
                phrase || d.terms.contains(&qn)
            })
            .collect()
    }

    /// Members of `base` carrying every term in `terms`.
    pub fn docs_with(&self, base: &[usize], terms: &[String]) -> Vec<usize> {
        base.iter()
            .copied()
            .filter(|&i| terms.iter().all(|t| self.docs[i].terms.contains(t)))
            .collect()
    }

    pub fn count(&self, base: &[usize], terms: &[String]) -> usize {
        self.docs_with(base, terms).len()
    }

    pub fn scoped(&self, q: &str, scope: &[String]) -> Vec<usize> {
        self.docs_with(&self.matched(q), scope)
    }

    fn top(&self, base: &[usize], with: &[String], excluded: &[String], n: usize) -> Vec<RefCount> {
        let mut all: Vec<RefCount> = self
            .vocabulary()
            .into_iter()
            .filter(|t| !excluded.contains(t))
            .map(|t| {
                let mut terms = with.to_vec();
                terms.push(t.clone());
                let c = self.count(base, &terms);
                (t, c)
            })
            .filter(|(_, c)| *c > 0)
            .collect();
        all.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        all.truncate(n);
        all
    }

    /// Returns `(query_doc_count, first_order)`.
    pub fn first_order(
        &self,
        q: &str,
        k: usize,
        scope: &[String],
        include_self: bool,
    ) -> (usize, Vec<RefCount>) {
        let base = self.scoped(q, scope);
        let mut excluded = scope.to_vec();
        if !include_self {
            excluded.push(ref_normalize(q));
        }
        let top = self.top(&base, &[], &excluded, k);
        (base.len(), top)
    }

    /// `excluded` must already contain the normalized query if it should be
    /// left out; `f` is always left out.
    pub fn second_order(&self, qdocs: &[usize], f: &str, m: usize, excluded: &[String]) -> Vec<RefCount> {
        let mut ex = excluded.to_vec();
        ex.push(f.to_string());
        self.top(qdocs, &[f.to_string()], &ex, m)
    }

    pub fn heatmap(&self, q: &str, k: usize, m: usize, scope: &[String]) -> RefHeatMap {
        let qdocs = self.scoped(q, scope);
        let (qcount, columns) = self.first_order(q, k, scope, false);
        let mut excluded = scope.to_vec();
        excluded.push(ref_normalize(q));

        let mut row_terms: Vec<String> = Vec::new();
        for (f, _) in &columns {
            for (g, _) in self.second_order(&qdocs, f, m, &excluded) {
                if !row_terms.contains(&g) {
                    row_terms.push(g);
                }
            }
        }
        let rows: Vec<RefCount> = row_terms
            .iter()
            .map(|g| (g.clone(), self.count(&qdocs, std::slice::from_ref(g))))
            .collect();

        let counts: Vec<Vec<Option<usize>>> = rows
            .iter()
            .map(|(g, _)| {
                columns
                    .iter()
                    .map(|(f, _)| (f != g).then(|| self.count(&qdocs, &[f.clone(), g.clone()])))
                    .collect()
            })
            .collect();

        let present: Vec<usize> = counts.iter().flatten().flatten().copied().collect();
        let lo = present.iter().copied().min().unwrap_or(0);
        let hi = present.iter().copied().max().unwrap_or(0);
        let cells = counts
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| {
                        c.map(|count| {
                            let (num, den) = if hi > lo { (count - lo, hi - lo) } else { (1, 2) };
                            let (color, band) = reference_color(num as u64, den as u64);
                            RefCell { count, num, den, color, band }
                        })
                    })
                    .collect()
            })
            .collect();

        RefHeatMap { query_doc_count: qcount, columns, rows, cells }
    }
}

/// Color and band for the exact fraction `v = num / den`, using integer
/// arithmetic only. Channels follow the closed forms
/// `r = 255·clamp(3v−1)`, `g = 255·min(3v, 1, 3−3v)`, `b = 255·clamp(1−3v)`,
/// rounded half away from zero.
pub fn reference_color(num: u64, den: u64) -> (String, &'static str) {
    assert!(den > 0 && num <= den);
    // channel = 255 * p / den for an integer p in [0, den]; round half up.
    let scale = |p: u64| -> u64 { (2 * 255 * p + den) / (2 * den) };
    let three_v = 3 * num;
    let r = if three_v <= den {
        0
    } else if three_v >= 2 * den {
        255
    } else {
        scale(three_v - den)
    };
    let g = if three_v <= den {
        scale(three_v)
    } else if three_v <= 2 * den {
        255
    } else {
        scale(3 * den - three_v)
    };
    let b = if three_v >= den { 0 } else { scale(den - three_v) };
    let band = if three_v < den {
        "cold"
    } else if three_v < 2 * den {
        "warm"
    } else {
        "hot"
    };
    (format!("#{r:02X}{g:02X}{b:02X}"), band)
}

const WORDS: &[&str] = &[
    "violence", "youth", "war", "peace", "school", "family", "migration", "labour", "market",
    "policy", "health", "city", "rural", "media", "gender", "crime", "religion", "education",
    "welfare", "state", "conflict", "right-wing", "radicalism", "asia", "africa", "survey",
    "panel", "study", "report", "essay",
];

const TERM_STEMS: &[&str] = &[
    "violence", "adolescent", "developing country", "propensity to violence", "war", "asia",
    "africa", "latin america", "child", "xenophobia", "right-wing radicalism", "family",
    "school", "migration", "labour market", "social policy", "health", "urban area",
    "media", "gender", "crime", "religion", "education", "welfare state", "conflict",
    "europe", "germany", "poverty", "unemployment", "elite", "party", "election",
    "trade union", "network", "identity", "ethnicity", "generation", "inequality",
    "globalization", "democracy",
];

/// Parameters for [`random_corpus`].
#[derive(Debug, Clone, Copy)]
pub struct CorpusShape {
    pub docs: (usize, usize),
    pub vocab: (usize, usize),
    pub terms_per_doc: (usize, usize),
}

impl Default for CorpusShape {
    fn default() -> Self {
        CorpusShape { docs: (100, 500), vocab: (20, 40), terms_per_doc: (1, 6) }
    }
}

/// Seeded synthetic corpus. Term popularity is Zipf-like so that counts are
/// skewed and ties still occur.
pub fn random_corpus(seed: u64, shape: CorpusShape) -> Vec<RefDoc> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_docs = rng.gen_range(shape.docs.0..=shape.docs.1);
    let n_vocab = rng.gen_range(shape.vocab.0..=shape.vocab.1).min(TERM_STEMS.len());
    let mut vocab: Vec<&str> = TERM_STEMS.to_vec();
    vocab.shuffle(&mut rng);
    vocab.truncate(n_vocab);
    let weights: Vec<f64> = (0..n_vocab).map(|i| 1.0 / (i as f64 + 1.0)).collect();
    let term_dist = WeightedIndex::new(&weights).unwrap();

    (0..n_docs)
        .map(|i| {
            let want = rng.gen_range(shape.terms_per_doc.0..=shape.terms_per_doc.1).min(n_vocab);
            let mut picked: Vec<&str> = Vec::new();
            while picked.len() < want {
                let t = vocab[term_dist.sample(&mut rng)];
                if !picked.contains(&t) {
                    picked.push(t);
                }
            }
            let terms = picked
                .iter()
                .map(|t| {
                    // exercise case folding and whitespace collapse
                    match rng.gen_range(0..4) {
                        0 => t.to_uppercase(),
                        1 => format!("  {}", t.replace(' ', "   ")),
                        _ => t.to_string(),
                    }
                })
                .collect();
            let title_len = rng.gen_range(2..=6);
            let title = (0..title_len).map(|_| *WORDS.choose(&mut rng).unwrap()).collect::<Vec<_>>().join(" ");
            let abstract_text = rng.gen_bool(0.6).then(|| {
                let n = rng.gen_range(3..=12);
                (0..n).map(|_| *WORDS.choose(&mut rng).unwrap()).collect::<Vec<_>>().join(", ")
            });
            RefDoc { id: format!("doc{i:04}"), title, abstract_text, terms }
        })
        .collect()
}

/// A mix of single words, two-word phrases lifted from titles, exact
/// indexing terms, and strings that match nothing.
pub fn random_queries(seed: u64, docs: &[RefDoc], n: usize) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9E37_79B9_7F4A_7C15);
    (0..n)
        .map(|_| match rng.gen_range(0..10) {
            0..=3 => WORDS.choose(&mut rng).unwrap().to_string(),
            4..=5 if !docs.is_empty() => {
                let d = docs.choose(&mut rng).unwrap();
                let words: Vec<&str> = d.title.split(' ').collect();
                let s = rng.gen_range(0..words.len() - 1);
                format!("{} {}", words[s], words[s + 1])
            }
            6..=8 if !docs.is_empty() => {
                let d = docs.choose(&mut rng).unwrap();
                d.terms.choose(&mut rng).unwrap().clone()
            }
            _ => "nonexistent".to_string(),
        })
        .collect()
}
