use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use log::info;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::{EmptySetPolicy, PipelineConfig};
use super::ingest::load_price_csv;
use crate::changepoint::{modal_changepoint_set, run_chain_stream, PosteriorRecord};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::market_analytics::{
    correlation_histogram, correlation_matrix, log_returns, rolling_pca, rolling_trajectory_norm,
    PricePanel, ReturnPanel, WindowSpec,
};
use crate::matrix_analysis::{
    distance_matrix, hierarchical_cluster, matrix_norm, triangle_test, DistanceMatrix, MatrixNorm,
    NormSummary,
};
use crate::uncertain_sets::SetWithUncertainty;

/// Which part of the pipeline to run. `distances` and `audit` include the
/// steps they depend on; `market` is independent of the others.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Detect,
    Distances,
    Audit,
    Market,
    All,
}

impl Stage {
    fn detects(self) -> bool {
        !matches!(self, Stage::Market)
    }

    fn measures(self) -> bool {
        matches!(self, Stage::Distances | Stage::Audit | Stage::All)
    }

    fn audits(self) -> bool {
        matches!(self, Stage::Audit | Stage::All)
    }

    fn analyses_market(self) -> bool {
        matches!(self, Stage::Market | Stage::All)
    }
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "detect" => Stage::Detect,
            "distances" => Stage::Distances,
            "audit" => Stage::Audit,
            "market" => Stage::Market,
            "all" => Stage::All,
            other => return Err(Error::Config(format!("unknown stage '{other}'"))),
        })
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Detect => "detect",
            Stage::Distances => "distances",
            Stage::Audit => "audit",
            Stage::Market => "market",
            Stage::All => "all",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputEntry {
    /// Path relative to the output directory, `/`-separated.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilledTicker {
    pub ticker: String,
    pub cells: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolvedWindow {
    pub name: String,
    pub start_date: String,
    pub end_date: String,
    pub start: usize,
    pub end: usize,
}

/// Summary written to `report.json`. `outputs` lists every other file the
/// run wrote.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub stage: Stage,
    pub seed: u64,
    pub input_sha256: String,
    pub series: Vec<String>,
    /// Series left out of the distance matrix for having no change point.
    pub excluded: Vec<String>,
    pub dropped_tickers: Vec<String>,
    pub forward_filled: Vec<FilledTicker>,
    pub windows: Vec<ResolvedWindow>,
    pub outputs: Vec<OutputEntry>,
}

impl RunReport {
    pub const FILE: &'static str = "report.json";

    pub fn read(out_dir: &Path) -> Result<Self> {
        let path = out_dir.join(Self::FILE);
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn file_stem(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || "-_.".contains(c) { c } else { '_' })
        .collect()
}

/// In-memory artifacts, written only once every step has succeeded.
#[derive(Default)]
struct Artifacts {
    files: Vec<(String, Vec<u8>)>,
}

impl Artifacts {
    fn add(&mut self, path: String, bytes: Vec<u8>) -> Result<()> {
        if self.files.iter().any(|(p, _)| *p == path) {
            return Err(Error::Config(format!("two outputs map to '{path}'")));
        }
        self.files.push((path, bytes));
        Ok(())
    }

    fn add_csv(&mut self, path: String, write: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
        let mut buf = Vec::new();
        write(&mut buf)?;
        self.add(path, buf)
    }

    fn add_json<T: Serialize>(&mut self, path: String, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.add(path, text.into_bytes())
    }

    /// Write everything; on failure remove whatever this call created.
    fn commit(self, out_dir: &Path) -> Result<Vec<OutputEntry>> {
        let mut written: Vec<PathBuf> = Vec::new();
        let mut entries = Vec::new();
        let result = (|| {
            fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
            for (rel, bytes) in &self.files {
                let path = out_dir.join(rel);
                if let Some(parent) = path.parent() {
                    fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
                }
                fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
                written.push(path);
                entries.push(OutputEntry {
                    path: rel.clone(),
                    sha256: sha256_hex(bytes),
                    bytes: bytes.len() as u64,
                });
            }
            Ok(())
        })();
        if let Err(e) = result {
            for path in &written {
                let _ = fs::remove_file(path);
            }
            return Err(e);
        }
        Ok(entries)
    }
}

pub fn run_pipeline(config: &PipelineConfig, stage: Stage) -> Result<RunReport> {
    config.validate()?;
    let input = config.input.as_deref().expect("validated");
    let input_bytes = fs::read(input).map_err(|e| Error::io(input, e))?;
    let ingested = load_price_csv(input)?;
    let panel = &ingested.panel;
    if panel.n() == 0 {
        return Err(Error::EmptyCollection.context("no tickers left after ingestion"));
    }
    let returns = log_returns(panel)?;
    let sampler = config.effective_sampler();
    let mut artifacts = Artifacts::default();
    let mut excluded = Vec::new();
    let mut windows = Vec::new();

    if stage.detects() {
        let sets = detect(config, &returns, &mut artifacts)?;
        if stage.measures() {
            let mut labels = Vec::new();
            let mut members = Vec::new();
            for (ticker, set) in returns.tickers().iter().zip(sets) {
                match (set, config.empty_set_policy) {
                    (Some(s), _) => {
                        labels.push(ticker.clone());
                        members.push(s);
                    }
                    (None, EmptySetPolicy::Exclude) => excluded.push(ticker.clone()),
                    (None, EmptySetPolicy::Error) => {
                        return Err(Error::EmptyMemberSet(ticker.clone()).context("distance matrix"))
                    }
                }
            }
            let d = distance_matrix(&labels, &members, returns.len(), config.p, config.q)
                .map_err(|e| e.context("distance matrix"))?;
            artifacts.add_csv("distance_matrix.csv".into(), |b| d.write_csv(b))?;
            if stage.audits() {
                audit(config, &d, &mut artifacts).map_err(|e| e.context("audit"))?;
            }
        }
    }
    if stage.analyses_market() {
        if config.windows.is_empty() && stage == Stage::Market {
            return Err(Error::Config("the market stage needs at least one window".into()));
        }
        if !config.windows.is_empty() {
            windows = market(config, panel, &returns, &mut artifacts)
                .map_err(|e| e.context("market analytics"))?;
        }
    }

    let outputs = artifacts.commit(&config.out_dir)?;
    let report = RunReport {
        stage,
        seed: sampler.seed,
        input_sha256: sha256_hex(&input_bytes),
        series: returns.tickers().to_vec(),
        excluded,
        dropped_tickers: ingested.dropped.clone(),
        forward_filled: ingested
            .filled
            .iter()
            .map(|(ticker, cells)| FilledTicker { ticker: ticker.clone(), cells: *cells })
            .collect(),
        windows,
        outputs,
    };
    let path = config.out_dir.join(RunReport::FILE);
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    if let Err(e) = fs::write(&path, text) {
        for o in &report.outputs {
            let _ = fs::remove_file(config.out_dir.join(&o.path));
        }
        return Err(Error::io(path, e));
    }
    info!("wrote {} outputs to {}", report.outputs.len() + 1, config.out_dir.display());
    Ok(report)
}

fn detect(
    config: &PipelineConfig,
    returns: &ReturnPanel,
    artifacts: &mut Artifacts,
) -> Result<Vec<Option<SetWithUncertainty>>> {
    let sampler = config.effective_sampler();
    let t = returns.len();
    sampler.validate_for(t)?;
    // one independent stream per series, merged in series order
    let results = Execution::default().map_range(returns.n(), |i| {
        let ticker = &returns.tickers()[i];
        let post = run_chain_stream(returns.series(i), &sampler, i as u64)?;
        let set = modal_changepoint_set(&post, t)?;
        let record = PosteriorRecord::new(ticker.clone(), &post, set.as_ref(), &sampler)?;
        Ok((set, record))
    });
    let mut sets = Vec::with_capacity(results.len());
    for (ticker, result) in returns.tickers().iter().zip(results) {
        let (set, record) = result.map_err(|e: Error| e.context(format!("series '{ticker}'")))?;
        info!("'{ticker}': modal segment count {}", record.modal_m);
        artifacts.add_json(format!("posteriors/{}.json", file_stem(ticker)), &record)?;
        sets.push(set);
    }
    Ok(sets)
}

fn audit(config: &PipelineConfig, d: &DistanceMatrix, artifacts: &mut Artifacts) -> Result<()> {
    let triangles = triangle_test(d)?;
    let report = triangles.report();
    let norms = NormSummary {
        l1: matrix_norm(d, MatrixNorm::L1)?,
        l2: matrix_norm(d, MatrixNorm::L2)?,
        operator: matrix_norm(d, MatrixNorm::Operator)?,
        fail_percent: 100.0 * report.fail_fraction,
        average_fail: report.mean_fail_ratio,
    };
    artifacts.add_json("triangle_test.json".into(), &report)?;
    artifacts.add_json("matrix_norms.json".into(), &norms)?;
    let tree = hierarchical_cluster(d, config.linkage)?;
    artifacts.add_csv("dendrogram.csv".into(), |b| tree.write_csv(b))
}

fn market(
    config: &PipelineConfig,
    panel: &PricePanel,
    returns: &ReturnPanel,
    artifacts: &mut Artifacts,
) -> Result<Vec<ResolvedWindow>> {
    let m = &config.market;
    let mut resolved = Vec::new();
    for named in &config.windows {
        let w = WindowSpec::from_dates(returns.dates(), named.start, named.end)
            .map_err(|e| e.context(format!("window '{}'", named.name)))?;
        let rho = correlation_matrix(returns, w).map_err(|e| e.context(format!("window '{}'", named.name)))?;
        let hist = correlation_histogram(&rho, m.histogram_bins)?;
        let stem = file_stem(&named.name);
        artifacts.add_csv(format!("correlation_histogram_{stem}.csv"), |b| hist.write_csv(b))?;
        if m.write_correlations {
            artifacts.add_csv(format!("correlation_{stem}.csv"), |b| {
                rho.write_csv(returns.tickers(), b)
            })?;
        }
        resolved.push(ResolvedWindow {
            name: named.name.clone(),
            start_date: returns.dates()[w.start].to_string(),
            end_date: returns.dates()[w.end].to_string(),
            start: w.start,
            end: w.end,
        });
    }
    let pca = rolling_pca(returns, m.pca_window, m.top_k)?;
    artifacts.add_csv("pca_spectrum.csv".into(), |b| pca.write_csv(b))?;
    let norms = rolling_trajectory_norm(panel, m.norm_window)?;
    artifacts.add_csv("trajectory_norm.csv".into(), |b| norms.write_csv(b))?;
    Ok(resolved)
}
