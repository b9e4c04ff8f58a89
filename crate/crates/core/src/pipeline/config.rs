use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::changepoint::SamplerConfig;
use crate::error::{Error, Result};
use crate::matrix_analysis::Linkage;

/// What to do with a series whose modal segment count is 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmptySetPolicy {
    #[default]
    Exclude,
    Error,
}

impl FromStr for EmptySetPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exclude" => Ok(EmptySetPolicy::Exclude),
            "error" => Ok(EmptySetPolicy::Error),
            other => Err(Error::Config(format!("unknown empty-set policy '{other}'"))),
        }
    }
}

impl fmt::Display for EmptySetPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EmptySetPolicy::Exclude => "exclude",
            EmptySetPolicy::Error => "error",
        })
    }
}

/// Calendar window resolved against the panel dates at run time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedWindow {
    pub name: String,
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl FromStr for NamedWindow {
    type Err = Error;

    /// `NAME=START..END` with ISO dates.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("window '{s}' is not NAME=YYYY-MM-DD..YYYY-MM-DD"));
        let (name, range) = s.split_once('=').ok_or_else(bad)?;
        let (a, b) = range.split_once("..").ok_or_else(bad)?;
        let date = |d: &str| NaiveDate::parse_from_str(d.trim(), "%Y-%m-%d").map_err(|_| bad());
        let name = name.trim();
        if name.is_empty() {
            return Err(bad());
        }
        Ok(NamedWindow {
            name: name.to_string(),
            start: date(a)?,
            end: date(b)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MarketConfig {
    pub pca_window: usize,
    pub top_k: usize,
    pub norm_window: usize,
    pub histogram_bins: usize,
    /// Also write the windowed correlation matrices.
    pub write_correlations: bool,
}

impl Default for MarketConfig {
    fn default() -> Self {
        MarketConfig {
            pca_window: 45,
            top_k: 10,
            norm_window: 45,
            histogram_bins: 40,
            write_correlations: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Wide-format price CSV.
    pub input: Option<PathBuf>,
    pub out_dir: PathBuf,
    /// Overrides `sampler.seed` when set.
    pub seed: Option<u64>,
    pub p: f64,
    pub q: f64,
    pub linkage: Linkage,
    pub empty_set_policy: EmptySetPolicy,
    pub sampler: SamplerConfig,
    pub market: MarketConfig,
    pub windows: Vec<NamedWindow>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            input: None,
            out_dir: PathBuf::from("out"),
            seed: None,
            p: 1.0,
            q: 1.0,
            linkage: Linkage::Average,
            empty_set_policy: EmptySetPolicy::Exclude,
            sampler: SamplerConfig::default(),
            market: MarketConfig::default(),
            windows: Vec::new(),
        }
    }
}

impl PipelineConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Load a TOML file; a relative `input` is taken relative to the file.
    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Self::from_toml_str(&text).map_err(|e| e.context(path.display().to_string()))?;
        if let (Some(input), Some(dir)) = (&config.input, path.parent()) {
            if input.is_relative() {
                config.input = Some(dir.join(input));
            }
        }
        Ok(config)
    }

    /// Sampler settings with the effective seed applied.
    pub fn effective_sampler(&self) -> SamplerConfig {
        let mut s = self.sampler.clone();
        if let Some(seed) = self.seed {
            s.seed = seed;
        }
        s
    }

    pub fn validate(&self) -> Result<()> {
        match &self.input {
            None => return Err(Error::Config("no input file given".into())),
            Some(path) if !path.is_file() => {
                return Err(Error::Config(format!("input '{}' does not exist", path.display())))
            }
            _ => {}
        }
        if !(self.p > 0.0 && self.p.is_finite()) {
            return Err(Error::Config(format!("p must be positive, got {}", self.p)));
        }
        if !(self.q >= 1.0 && self.q.is_finite()) {
            return Err(Error::Config(format!("q must be at least 1, got {}", self.q)));
        }
        self.effective_sampler().validate()?;
        let m = &self.market;
        if m.pca_window < 3 || m.norm_window < 1 || m.top_k < 1 || m.histogram_bins < 1 {
            return Err(Error::Config("market window, top_k and bins must be positive (PCA window at least 3)".into()));
        }
        for (i, w) in self.windows.iter().enumerate() {
            if w.start > w.end {
                return Err(Error::Config(format!("window '{}' starts after it ends", w.name)));
            }
            if self.windows[..i].iter().any(|o| o.name == w.name) {
                return Err(Error::Config(format!("window name '{}' is repeated", w.name)));
            }
        }
        Ok(())
    }
}
