//! Path generation on road-network graphs: graph-space categorical
//! diffusion (GPD) with heat-kernel transition matrices, latent-space path
//! diffusion (LPD) built from a sequence VAE plus a Gaussian DDPM, and the
//! metrics and instrumentation to compare them.

pub mod config;
pub mod error;
pub mod gpd;
pub mod graph;
pub mod heat;
pub mod ldm;
pub mod memtrack;
pub mod metrics;
pub mod nn;
pub mod report;
pub mod rng;
pub mod vae;

pub use error::{Error, Result};
