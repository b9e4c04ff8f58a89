//! Similarity between time series measured by their structural breaks.
//!
//! Each series is segmented by a reversible-jump sampler; the posterior of
//! its change points becomes a *set with uncertainty* (one density per
//! change point), and series are compared with the MJ-Wasserstein
//! semi-metric. Distance matrices can then be audited (norms, empirical
//! triangle-inequality failures) and clustered. A separate toolkit covers
//! windowed correlation, rolling PCA spectra and price-trajectory distances.

pub mod changepoint;
pub mod density;
pub mod error;
pub mod linalg;
pub mod exec;
pub mod market_analytics;
pub mod matrix_analysis;
pub mod pipeline;
pub mod uncertain_sets;

pub use error::{Error, ErrorKind, Result};
pub use exec::Execution;
