use std::fs::File;
use std::io::{BufReader, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use termheat_core::coindex::{load_snapshot_file, save_snapshot_file};
use termheat_core::{build_heatmap, parse_corpus, recommend, CoIndex, HeatMap, Scope, DEFAULT_K, DEFAULT_M};

use crate::http::{Defaults, DEFAULT_PAGE_SIZE};
use crate::server::{serve, IndexSource, ServiceConfig};

/// Exit status for usage and input errors, matching clap's own.
pub const EXIT_FAILURE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "termheat", version, about = "Co-word heat maps over a controlled indexing vocabulary")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build an index snapshot from a JSONL corpus
    Index {
        #[arg(long)]
        corpus: PathBuf,
        /// Output path; a `.gz` suffix writes a gzip-compressed snapshot
        #[arg(long)]
        out: PathBuf,
    },
    /// Print first-order term recommendations as JSON
    Recommend {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        query: String,
        #[arg(long, default_value_t = DEFAULT_K, value_parser = positive)]
        k: usize,
        /// Comma-separated scope terms
        #[arg(long, default_value = "")]
        scope: String,
        /// Keep the query's own normalized form among the recommendations
        #[arg(long)]
        include_self: bool,
    },
    /// Print a heat map as JSON or CSV
    Heatmap {
        #[arg(long)]
        index: PathBuf,
        #[arg(long)]
        query: String,
        #[arg(long, default_value_t = DEFAULT_K, value_parser = positive)]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_M, value_parser = positive)]
        m: usize,
        /// Comma-separated scope terms
        #[arg(long, default_value = "")]
        scope: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Serve the HTTP API
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
#[group(id = "source", required = true, multiple = false)]
pub struct ServeArgs {
    /// Index snapshot to serve
    #[arg(long, group = "source")]
    pub index: Option<PathBuf>,
    /// JSONL corpus to index at startup instead of a snapshot
    #[arg(long, group = "source")]
    pub corpus: Option<PathBuf>,
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub listen: SocketAddr,
    /// Directory with the web UI bundle, served at `/`
    #[arg(long)]
    pub assets: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_K, value_parser = positive)]
    pub k: usize,
    #[arg(long, default_value_t = DEFAULT_M, value_parser = positive)]
    pub m: usize,
    #[arg(long, default_value_t = DEFAULT_PAGE_SIZE, value_parser = positive)]
    pub page_size: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Runs a parsed command and returns the process exit status. Errors are
/// reported on `err`.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match execute(cli.command, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_FAILURE
        }
    }
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> anyhow::Result<()> {
    match command {
        Command::Index { corpus, out: dest } => index_build(&corpus, &dest, out, err),
        Command::Recommend { index, query, k, scope, include_self } => {
            let index = load(&index)?;
            let scope = checked_scope(&scope, &index)?;
            let rec = recommend(&index, &query, k, scope.terms(), include_self)?;
            writeln!(out, "{}", serde_json::to_string(&rec)?)?;
            Ok(())
        }
        Command::Heatmap { index, query, k, m, scope, format } => {
            let index = load(&index)?;
            let scope = checked_scope(&scope, &index)?;
            let map = build_heatmap(&index, &query, k, m, scope.terms())?;
            match format {
                Format::Json => writeln!(out, "{}", serde_json::to_string(&map)?)?,
                Format::Csv => write_csv(&map, out)?,
            }
            Ok(())
        }
        Command::Serve(args) => {
            let source = match (args.index, args.corpus) {
                (Some(p), _) => IndexSource::Snapshot(p),
                (None, Some(p)) => IndexSource::Corpus(p),
                (None, None) => unreachable!("clap enforces one source"),
            };
            let config = ServiceConfig {
                listen: args.listen,
                source,
                defaults: Defaults { k: args.k, m: args.m, page_size: args.page_size },
                assets: args.assets,
            };
            tokio::runtime::Runtime::new()?.block_on(serve(config))
        }
    }
}

fn load(path: &Path) -> anyhow::Result<CoIndex> {
    load_snapshot_file(path).with_context(|| format!("cannot load index {}", path.display()))
}

fn checked_scope(list: &str, index: &CoIndex) -> anyhow::Result<Scope> {
    let scope = Scope::parse(list);
    scope.validate(index)?;
    Ok(scope)
}

fn index_build(corpus: &Path, dest: &Path, out: &mut dyn Write, err: &mut dyn Write) -> anyhow::Result<()> {
    let file = File::open(corpus).with_context(|| format!("cannot read corpus {}", corpus.display()))?;
    let parsed = parse_corpus(BufReader::new(file)).with_context(|| format!("cannot read corpus {}", corpus.display()))?;
    for r in &parsed.rejections {
        writeln!(err, "warning: rejected record: {r}")?;
    }
    if parsed.documents.is_empty() && !parsed.rejections.is_empty() {
        writeln!(err, "warning: every record was rejected; writing an empty index")?;
    }
    let rejected = parsed.rejections.len();
    let index = CoIndex::build(parsed.documents);
    save_snapshot_file(&index, dest).with_context(|| format!("cannot write snapshot {}", dest.display()))?;
    writeln!(out, "{} documents, {} terms, {} rejected", index.doc_count(), index.vocab_size(), rejected)?;
    Ok(())
}

/// Header row of column terms after an empty corner cell, then one line per
/// row term. Not-applicable cells are empty fields, distinct from `0`.
pub fn write_csv(map: &HeatMap, out: &mut dyn Write) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![String::new()];
    header.extend(map.columns.iter().map(|c| c.term.to_string()));
    w.write_record(&header)?;
    for (row, cells) in map.rows.iter().zip(&map.cells) {
        let mut record = vec![row.term.to_string()];
        record.extend(cells.iter().map(|c| c.as_ref().map_or(String::new(), |c| c.count.to_string())));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err("must be a positive integer".into()),
    }
}
