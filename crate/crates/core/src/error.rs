use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by every stage of the denoising pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot decode {path}: {reason}")]
    Decode { path: PathBuf, reason: String },

    #[error("cannot write {path}: {reason}")]
    Write { path: PathBuf, reason: String },

    #[error("volume error: {0}")]
    Volume(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("roi error: {0}")]
    Roi(String),

    #[error("alignment error: {0}")]
    Align(String),

    #[error("fusion error: {0}")]
    Fusion(String),

    #[error("denoiser spec error: {0}")]
    Spec(String),

    #[error("ensemble error: {0}")]
    Ensemble(String),

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Wraps `self` with the name of the pipeline stage that produced it.
    pub fn in_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
