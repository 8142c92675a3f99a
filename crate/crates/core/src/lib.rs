//! Precoding for multigateway multibeam satellite forward links.
//!
//! The crate builds synthetic multibeam channels, designs block regularized-SVD precoders
//! under several gateway-cooperation regimes, applies feeder-link and CSI-feedback
//! impairments, and scores the result with per-user SINR, MODCOD spectral efficiency and
//! sum MSE.

pub mod channel;
pub mod cooperation;
pub mod error;
pub mod harness;
pub mod impairments;
pub mod linalg;
pub mod metrics;
pub mod precoder;

pub use error::{Error, Result};
