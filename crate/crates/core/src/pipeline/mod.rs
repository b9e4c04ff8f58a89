//! End-to-end driver: ingest prices, sample change points per series,
//! build and audit the distance matrix, run the market analytics and
//! persist every artifact with checksums.

mod config;
mod ingest;
mod run;

pub use config::{EmptySetPolicy, MarketConfig, NamedWindow, PipelineConfig};
pub use ingest::{load_price_csv, read_price_csv, Ingested};
pub use run::{run_pipeline, OutputEntry, RunReport, Stage};
