use std::fs::File;
use std::io::BufReader;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use anyhow::Context;
use termheat_core::coindex::load_snapshot_file;
use termheat_core::{parse_corpus, CoIndex};
use tokio::net::TcpListener;

use crate::http::{router, AppState, Defaults};

#[derive(Debug, Clone)]
pub enum IndexSource {
    Snapshot(PathBuf),
    Corpus(PathBuf),
}

impl IndexSource {
    pub fn load(&self) -> anyhow::Result<CoIndex> {
        match self {
            IndexSource::Snapshot(p) => {
                load_snapshot_file(p).with_context(|| format!("cannot load index {}", p.display()))
            }
            IndexSource::Corpus(p) => {
                let file = File::open(p).with_context(|| format!("cannot read corpus {}", p.display()))?;
                let parsed = parse_corpus(BufReader::new(file))?;
                if !parsed.rejections.is_empty() {
                    tracing::warn!(rejected = parsed.rejections.len(), "corpus records rejected");
                }
                Ok(CoIndex::build(parsed.documents))
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub listen: SocketAddr,
    pub source: IndexSource,
    pub defaults: Defaults,
    pub assets: Option<PathBuf>,
}

/// Loads the index and serves until interrupted. On unix, SIGHUP reloads the
/// index from its source and swaps it in; a failed reload keeps the old one.
pub async fn serve(config: ServiceConfig) -> anyhow::Result<()> {
    let _ = tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .try_init();

    let index = config.source.load()?;
    tracing::info!(docs = index.doc_count(), terms = index.vocab_size(), "index loaded");
    let state = AppState::new(index, config.defaults);

    #[cfg(unix)]
    tokio::spawn(reload_on_hangup(state.clone(), config.source.clone()));

    let app = router(state, config.assets);
    let listener = TcpListener::bind(config.listen)
        .await
        .with_context(|| format!("cannot listen on {}", config.listen))?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}

#[cfg(unix)]
async fn reload_on_hangup(state: AppState, source: IndexSource) {
    use tokio::signal::unix::{signal, SignalKind};

    let Ok(mut hup) = signal(SignalKind::hangup()) else { return };
    while hup.recv().await.is_some() {
        let source = source.clone();
        match tokio::task::spawn_blocking(move || source.load()).await {
            Ok(Ok(index)) => {
                tracing::info!(docs = index.doc_count(), "index reloaded");
                state.index.store(Arc::new(index));
            }
            Ok(Err(e)) => tracing::error!(error = %format!("{e:#}"), "reload failed; keeping current index"),
            Err(e) => tracing::error!(error = %e, "reload task failed"),
        }
    }
}
