//! Self-supervised OCT B-scan denoising building blocks.
//!
//! The pipeline fuses neighbouring B-scans, scores candidate denoisers with a
//! Neighbor2Neighbor objective, combines several denoised outputs patch by patch
//! using no-reference quality metrics, and stretches the result to full range.
//! A seeded speckle simulator provides clean references for testing.

pub mod denoise;
pub mod ensemble;
pub mod error;
pub mod fusion;
pub mod image;
pub mod io;
pub mod metrics;
pub mod n2n;
mod par;
pub mod pipeline;
pub mod postprocess;
pub mod sim;

pub use denoise::{Denoise, DenoiserSpec};
pub use ensemble::{patch_ensemble, voting_ensemble, EnsembleConfig, PatchDecision};
pub use error::{Error, Result};
pub use fusion::{fuse_slice, fuse_volume, FusionConfig};
pub use image::{patch_grid, resize_to, Image, PatchRef, Rect, Volume};
pub use metrics::{MetricReport, MetricWeights, RoiSet};
pub use n2n::{make_plan, n2n_loss, subsample, N2nConfig, SubsamplePlan};
pub use pipeline::{Manifest, PipelineConfig};
pub use postprocess::{color_scale, ScaleReport};
pub use sim::SimConfig;
