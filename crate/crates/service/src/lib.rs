//! The lab service: JSON API, static lab pages and the durable event log.

pub mod api;
pub mod error;
pub mod eventlog;
pub mod export;
pub mod lab;
pub mod pages;

use std::net::SocketAddr;
use std::path::PathBuf;

pub use api::{router, AppState};
pub use error::{ApiError, ErrorCode};
pub use lab::{Lab, LabError};

/// Environment variable naming the data directory; `--data-dir` wins.
pub const DATA_DIR_ENV: &str = "VMLAB_DATA_DIR";

#[derive(Debug, Clone)]
pub struct ServeConfig {
    pub addr: SocketAddr,
    pub data_dir: PathBuf,
    pub seed: Option<u64>,
}

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error("data directory: {0}")]
    Lab(#[from] LabError),
    #[error("cannot bind {addr}: {source}")]
    Bind {
        addr: SocketAddr,
        source: std::io::Error,
    },
    #[error("server error: {0}")]
    Io(#[from] std::io::Error),
}

/// Replays the log and binds the listener. Returns the bound address
/// before serving so callers can report it.
pub async fn bind(config: &ServeConfig) -> Result<(tokio::net::TcpListener, axum::Router), ServeError> {
    let lab = Lab::open(&config.data_dir, config.seed)?;
    tracing::info!(seed = lab.seed(), events = lab.event_count(), "lab state restored");
    let listener = tokio::net::TcpListener::bind(config.addr)
        .await
        .map_err(|source| ServeError::Bind {
            addr: config.addr,
            source,
        })?;
    Ok((listener, router(AppState::new(lab))))
}

/// Serves until Ctrl-C.
pub async fn run(listener: tokio::net::TcpListener, app: axum::Router) -> Result<(), ServeError> {
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
