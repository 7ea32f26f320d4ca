//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.
//!
//! Run with `cargo test -p termheat --test acceptance`.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use axum::body::Body;
use axum::http::Request;
use common::{compare_maps, index_of, norm, term_pairs};
use http_body_util::BodyExt;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use termheat::http::{router, AppState, Defaults};
use termheat_core::coindex::{load_snapshot_file, save_snapshot_file};
use termheat_core::heatmap::{cell_counts, second_order_terms};
use termheat_core::{
    adapt, build_heatmap, color_of, drilldown_documents, first_order_terms, recommend, Band, CoIndex, HeatMap,
    NormalizedTerm, Scope,
};
use termheat_testkit::{duplicate, random_corpus, random_queries, reference_color, tiny5, CorpusShape, Oracle, RefDoc};
use tower::ServiceExt;

const GOLDEN: &str = include_str!("fixtures/tiny5_heatmap_violence_k2_m2.json");

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("oracle equivalence", oracle_equivalence),
        ("monotonicity chain", monotonicity_chain),
        ("normalization contract", normalization_contract),
        ("color oracle", color_oracle),
        ("disjoint reduction", disjoint_reduction),
        ("duplication invariance", duplication_invariance),
        ("tiny5 golden fixtures", tiny5_golden),
        ("scope narrowing", scope_narrowing),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] {name}: {detail} ({secs:.2}s)"),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {name}: {why} ({secs:.2}s)");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn vocab_of(oracle: &Oracle) -> Vec<String> {
    oracle.vocabulary().into_iter().collect()
}

fn normalized_query(q: &str) -> String {
    q.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

/// Heat maps over seeded corpora with a spread of `k`, `m` and scopes,
/// shared by the map-level criteria.
fn property_maps() -> Vec<(Vec<RefDoc>, HeatMap)> {
    let shapes = [CorpusShape::default(), CorpusShape { docs: (20, 80), vocab: (4, 12), terms_per_doc: (1, 4) }];
    let mut out = Vec::new();
    for seed in 0..30u64 {
        let docs = random_corpus(1000 + seed, shapes[seed as usize % 2]);
        let idx = index_of(&docs);
        let vocab: Vec<NormalizedTerm> = idx.vocabulary().to_vec();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for q in random_queries(1000 + seed, &docs, 10) {
            for (k, m) in [(1, 1), (2, 2), (5, 3), (10, 3), (12, 4)] {
                let scope: Vec<NormalizedTerm> =
                    if rng.gen_bool(0.25) { vocab.choose_multiple(&mut rng, 1).cloned().collect() } else { vec![] };
                let map = build_heatmap(&idx, &q, k, m, &scope).unwrap();
                out.push((docs.clone(), map));
            }
        }
    }
    out
}

fn oracle_equivalence() -> Outcome {
    let started = Instant::now();
    let mut checks = 0usize;
    for seed in 0..50u64 {
        let docs = random_corpus(seed, CorpusShape::default());
        let idx = index_of(&docs);
        let oracle = Oracle::new(&docs);
        let vocab = vocab_of(&oracle);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        for q in random_queries(seed, &docs, 20) {
            let k = rng.gen_range(1..=12);
            let m = rng.gen_range(1..=4);
            let ns = if rng.gen_bool(0.3) { 1 } else { 0 };
            let scope: Vec<String> = vocab.choose_multiple(&mut rng, ns).cloned().collect();
            let scope_n = norm(&scope);

            let rec = first_order_terms(&idx, &q, k, &scope_n).map_err(|e| e.to_string())?;
            let (qcount, expected) = oracle.first_order(&q, k, &scope, false);
            ensure!(rec.query_doc_count as usize == qcount, "seed {seed} {q:?}: query_doc_count");
            ensure!(term_pairs(&rec.first_order) == expected, "seed {seed} {q:?} k={k}: first-order terms differ");
            checks += 1;

            let qdocs = idx.conjunction(&idx.match_query(&q).unwrap().matched_docs, &scope_n);
            let qdocs_ref = oracle.scoped(&q, &scope);
            let mut excluded = scope.clone();
            excluded.push(normalized_query(&q));
            for (f, _) in &expected {
                let got = second_order_terms(&idx, &qdocs, &norm(std::slice::from_ref(f))[0], m, &norm(&excluded));
                ensure!(
                    term_pairs(&got) == oracle.second_order(&qdocs_ref, f, m, &excluded),
                    "seed {seed} {q:?} f={f}: second-order terms differ"
                );
                checks += 1;
            }

            let cols: Vec<String> = expected.iter().map(|(t, _)| t.clone()).collect();
            let rows: Vec<String> = vocab.choose_multiple(&mut rng, 6).cloned().collect();
            let cells = cell_counts(&idx, &qdocs, &norm(&cols), &norm(&rows));
            for (i, g) in rows.iter().enumerate() {
                for (j, f) in cols.iter().enumerate() {
                    let want = (f != g).then(|| oracle.count(&qdocs_ref, &[f.clone(), g.clone()]) as u64);
                    ensure!(cells[i][j] == want, "seed {seed} {q:?}: cell ({g}, {f})");
                    checks += 1;
                }
            }

            let map = build_heatmap(&idx, &q, k, m, &scope_n).unwrap();
            compare_maps(&map, &oracle.heatmap(&q, k, m, &scope)).map_err(|e| format!("seed {seed} {q:?}: {e}"))?;
            checks += 1;

            let nsel = rng.gen_range(0..=2);
            let selection: Vec<String> = vocab.choose_multiple(&mut rng, nsel).cloned().collect();
            let page_size = rng.gen_range(1..=25);
            let mut all = scope.clone();
            all.extend(selection.iter().cloned());
            let want: Vec<&str> = oracle.scoped(&q, &all).into_iter().map(|i| docs[i].id.as_str()).collect();
            let scope_set = Scope::from_terms(scope_n.clone());
            let mut seen = Vec::new();
            for page in 1.. {
                let p = drilldown_documents(&idx, &q, &scope_set, &norm(&selection), page, page_size).unwrap();
                ensure!(p.total as usize == want.len(), "seed {seed} {q:?}: drilldown total");
                if p.items.is_empty() {
                    break;
                }
                seen.extend(p.items.into_iter().map(|i| i.id));
            }
            ensure!(seen == want, "seed {seed} {q:?}: drilldown documents differ");
            checks += 1;
        }
    }
    let elapsed = started.elapsed();
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}, limit 60s");
    Ok(format!("50 corpora x 20 queries, {checks} comparisons, 0 mismatches"))
}

fn monotonicity_chain() -> Outcome {
    let maps = property_maps();
    let mut cells = 0usize;
    for (_, map) in &maps {
        for (i, row) in map.cells.iter().enumerate() {
            for (j, cell) in row.iter().enumerate() {
                let Some(c) = cell else { continue };
                let bound = map.columns[j].count.min(map.rows[i].count);
                ensure!(
                    c.count <= bound && bound <= map.query_doc_count,
                    "{:?}: {} <= {} <= {} violated at ({i}, {j})",
                    map.query,
                    c.count,
                    bound,
                    map.query_doc_count
                );
                cells += 1;
            }
        }
    }
    ensure!(cells > 0, "no present cells generated");
    Ok(format!("{} maps, {cells} cells, 0 violations", maps.len()))
}

fn check_normalization(map: &HeatMap) -> Result<bool, String> {
    let counts: Vec<u64> = map.present_cells().map(|c| c.count).collect();
    let (Some(&lo), Some(&hi)) = (counts.iter().min(), counts.iter().max()) else { return Ok(false) };
    for c in map.present_cells() {
        if hi > lo {
            ensure!((c.normalized == 1.0) == (c.count == hi), "{:?}: max cells must be exactly 1.0", map.query);
            ensure!((c.normalized == 0.0) == (c.count == lo), "{:?}: min cells must be exactly 0.0", map.query);
            ensure!(c.count != hi || c.band == Band::Hot, "{:?}: max cell not hot", map.query);
            ensure!(c.count != lo || c.band == Band::Cold, "{:?}: min cell not cold", map.query);
        } else {
            ensure!(c.normalized == 0.5 && c.band == Band::Warm, "{:?}: uniform map not 0.5 warm", map.query);
        }
    }
    Ok(hi > lo)
}

fn normalization_contract() -> Outcome {
    let maps = property_maps();
    let (mut spread, mut uniform) = (0, 0);
    for (_, map) in &maps {
        if map.present_cells().next().is_none() {
            continue;
        }
        if check_normalization(map)? {
            spread += 1;
        } else {
            uniform += 1;
        }
    }
    // every present cell shares one count here
    let flat = vec![
        RefDoc::new("1", "x", &["p", "q", "r"]),
        RefDoc::new("2", "x", &["p", "q", "r"]),
        RefDoc::new("3", "y", &["p"]),
    ];
    let map = build_heatmap(&index_of(&flat), "x", 3, 2, &[]).unwrap();
    ensure!(map.present_cells().count() > 0, "uniform fixture has no cells");
    ensure!(!check_normalization(&map)?, "uniform fixture has distinct counts");
    uniform += 1;
    ensure!(spread > 0, "no map with distinct counts generated");
    Ok(format!("{spread} maps with spread, {uniform} uniform maps"))
}

fn color_oracle() -> Outcome {
    for i in 0..=1000u64 {
        let v = i as f64 / 1000.0;
        let (hex, band) = color_of(v).map_err(|e| e.to_string())?;
        let (want_hex, want_band) = reference_color(i, 1000);
        ensure!(hex == want_hex, "v={v}: {hex} vs {want_hex}");
        ensure!(band.as_str() == want_band, "v={v}: band {} vs {want_band}", band.as_str());
    }
    for (v, want) in [(0.0, "#0000FF"), (0.5, "#80FF00"), (1.0, "#FF0000")] {
        let (hex, _) = color_of(v).unwrap();
        ensure!(hex == want, "v={v}: {hex} vs {want}");
    }
    Ok("1001 values byte-exact".into())
}

fn disjoint_reduction() -> Outcome {
    let maps = property_maps();
    for (_, map) in &maps {
        let distinct: HashSet<&NormalizedTerm> = map.rows.iter().map(|r| &r.term).collect();
        ensure!(distinct.len() == map.rows.len(), "{:?}: duplicate rows", map.query);
        ensure!(map.rows.len() <= map.k * map.m, "{:?}: {} rows > k*m", map.query, map.rows.len());
    }
    let map = build_heatmap(&index_of(&tiny5()), "violence", 2, 2, &[]).unwrap();
    ensure!(map.rows.len() < map.k * map.m, "overlapping fixture: {} rows, not < {}", map.rows.len(), map.k * map.m);
    Ok(format!("{} maps; overlapping fixture has {} < {} rows", maps.len(), map.rows.len(), map.k * map.m))
}

fn duplication_invariance() -> Outcome {
    let mut compared = 0;
    for seed in 0..10u64 {
        let docs = random_corpus(500 + seed, CorpusShape::default());
        let idx = index_of(&docs);
        let dup = index_of(&duplicate(&docs, 3));
        for q in random_queries(500 + seed, &docs, 10) {
            let a = build_heatmap(&idx, &q, 10, 3, &[]).unwrap();
            let b = build_heatmap(&dup, &q, 10, 3, &[]).unwrap();
            let terms = |v: &[termheat_core::TermCount]| v.iter().map(|t| t.term.clone()).collect::<Vec<_>>();
            ensure!(terms(&a.columns) == terms(&b.columns), "seed {seed} {q:?}: columns differ");
            ensure!(terms(&a.rows) == terms(&b.rows), "seed {seed} {q:?}: rows differ");
            for (ra, rb) in a.cells.iter().zip(&b.cells) {
                for (ca, cb) in ra.iter().zip(rb) {
                    match (ca, cb) {
                        (None, None) => {}
                        (Some(ca), Some(cb)) => {
                            ensure!(cb.count == 3 * ca.count, "seed {seed} {q:?}: counts not tripled");
                            ensure!(
                                ca.normalized == cb.normalized && ca.color == cb.color && ca.band == cb.band,
                                "seed {seed} {q:?}: cell rendering differs"
                            );
                        }
                        _ => return Err(format!("seed {seed} {q:?}: cell presence differs")),
                    }
                }
            }
            compared += 1;
        }
    }
    Ok(format!("10 corpora, {compared} maps identical after 3x duplication"))
}

/// The reference map for the fixture, shaped like the wire format.
fn oracle_golden() -> Value {
    let map = Oracle::new(&tiny5()).heatmap("violence", 2, 2, &[]);
    let pairs = |v: &[(String, usize)]| v.iter().map(|(t, c)| json!({ "term": t, "count": c })).collect::<Vec<_>>();
    let cells: Vec<Value> = map
        .cells
        .iter()
        .map(|row| {
            row.iter()
                .map(|c| match c {
                    None => Value::Null,
                    Some(c) => json!({
                        "count": c.count,
                        "normalized": c.num as f64 / c.den as f64,
                        "color": c.color,
                        "band": c.band,
                    }),
                })
                .collect()
        })
        .collect();
    json!({
        "query": "violence",
        "scope": [],
        "k": 2,
        "m": 2,
        "query_doc_count": map.query_doc_count,
        "columns": pairs(&map.columns),
        "rows": pairs(&map.rows),
        "cells": cells,
    })
}

fn http_body(index: CoIndex, uri: &str) -> String {
    let app = router(AppState::new(index, Defaults::default()), None);
    let rt = tokio::runtime::Runtime::new().unwrap();
    rt.block_on(async {
        let res = app.oneshot(Request::get(uri).body(Body::empty()).unwrap()).await.unwrap();
        assert!(res.status().is_success(), "{uri}: {}", res.status());
        String::from_utf8(res.into_body().collect().await.unwrap().to_bytes().to_vec()).unwrap()
    })
}

fn tiny5_golden() -> Outcome {
    let fixture: Value = serde_json::from_str(GOLDEN).map_err(|e| e.to_string())?;
    ensure!(fixture == oracle_golden(), "fixture disagrees with the reference map");

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let corpus = dir.path().join("tiny5.jsonl");
    std::fs::write(&corpus, termheat_testkit::to_jsonl(&tiny5())).unwrap();
    let snapshot = dir.path().join("tiny5.json");
    let bin = env!("CARGO_BIN_EXE_termheat");
    let built = Command::new(bin).args(["index", "--corpus"]).arg(&corpus).arg("--out").arg(&snapshot).output().unwrap();
    ensure!(built.status.success(), "index failed: {}", String::from_utf8_lossy(&built.stderr));
    let cli = Command::new(bin)
        .args(["heatmap", "--index"])
        .arg(&snapshot)
        .args(["--query", "violence", "--k", "2", "--m", "2", "--format", "json"])
        .output()
        .unwrap();
    ensure!(cli.status.success(), "heatmap failed: {}", String::from_utf8_lossy(&cli.stderr));
    let cli_out = String::from_utf8(cli.stdout).unwrap();
    ensure!(cli_out == GOLDEN, "CLI output differs from fixture:\n{cli_out}");

    let http = http_body(load_snapshot_file(&snapshot).unwrap(), "/api/heatmap?q=violence&k=2&m=2");
    ensure!(http == cli_out.trim_end(), "HTTP body differs from CLI output:\n{http}");

    let trips = snapshot_round_trips(dir.path())?;
    Ok(format!("CLI == fixture == reference, HTTP == CLI, {trips} answers preserved across snapshots"))
}

fn snapshot_round_trips(dir: &Path) -> Result<usize, String> {
    let mut answers = 0;
    let mut corpora = vec![tiny5()];
    corpora.extend((0..5u64).map(|s| random_corpus(700 + s, CorpusShape::default())));
    for (n, docs) in corpora.iter().enumerate() {
        let idx = index_of(docs);
        let mut queries = random_queries(700 + n as u64, docs, 10);
        queries.push("violence".into());
        for name in ["snap.json", "snap.json.gz"] {
            let path = dir.join(format!("{n}-{name}"));
            save_snapshot_file(&idx, &path).map_err(|e| e.to_string())?;
            let back = load_snapshot_file(&path).map_err(|e| e.to_string())?;
            ensure!(back.vocabulary() == idx.vocabulary(), "corpus {n}: vocabulary changed");
            for q in &queries {
                ensure!(
                    build_heatmap(&back, q, 10, 3, &[]).unwrap() == build_heatmap(&idx, q, 10, 3, &[]).unwrap(),
                    "corpus {n} {name} {q:?}: heat map changed"
                );
                ensure!(
                    recommend(&back, q, 5, &[], true).unwrap() == recommend(&idx, q, 5, &[], true).unwrap(),
                    "corpus {n} {name} {q:?}: recommendations changed"
                );
                let sel = idx.vocabulary().first().cloned().into_iter().collect::<Vec<_>>();
                ensure!(
                    drilldown_documents(&back, q, &Scope::new(), &sel, 1, 50).unwrap()
                        == drilldown_documents(&idx, q, &Scope::new(), &sel, 1, 50).unwrap(),
                    "corpus {n} {name} {q:?}: documents changed"
                );
                answers += 3;
            }
        }
    }
    Ok(answers)
}

fn scope_narrowing() -> Outcome {
    let mut steps = 0;
    for seed in 0..20u64 {
        let docs = random_corpus(900 + seed, CorpusShape::default());
        let idx = index_of(&docs);
        let oracle = Oracle::new(&docs);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for q in random_queries(900 + seed, &docs, 8) {
            let unscoped = oracle.matched(&q);
            let mut scope = Scope::new();
            let mut map = build_heatmap(&idx, &q, 8, 3, &[]).unwrap();
            for step in 0..3 {
                if map.columns.is_empty() {
                    break;
                }
                let col = map.columns.choose(&mut rng).unwrap().term.clone();
                let clicked = match map.rows.iter().filter(|r| r.term != col).choose(&mut rng) {
                    Some(row) if rng.gen_bool(0.5) => vec![col, row.term.clone()],
                    _ => vec![col],
                };
                let (next_scope, next) = adapt(&idx, &q, &scope, &clicked, 8, 3).map_err(|e| e.to_string())?;
                ensure!(
                    next.query_doc_count <= map.query_doc_count,
                    "seed {seed} {q:?} step {step}: query_doc_count grew {} -> {}",
                    map.query_doc_count,
                    next.query_doc_count
                );
                for tc in next.columns.iter().chain(&next.rows) {
                    let free = oracle.count(&unscoped, &[tc.term.to_string()]) as u64;
                    ensure!(tc.count <= free, "seed {seed} {q:?}: {} scoped {} > unscoped {free}", tc.term, tc.count);
                }
                for (i, row) in next.cells.iter().enumerate() {
                    for (j, c) in row.iter().enumerate() {
                        let Some(c) = c else { continue };
                        let pair = [next.columns[j].term.to_string(), next.rows[i].term.to_string()];
                        let free = oracle.count(&unscoped, &pair) as u64;
                        ensure!(c.count <= free, "seed {seed} {q:?}: cell {pair:?} scoped {} > unscoped {free}", c.count);
                    }
                }
                scope = next_scope;
                map = next;
                steps += 1;
            }
        }
    }
    ensure!(steps > 0, "no click steps taken");
    Ok(format!("{steps} click steps, 0 violations"))
}
