use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::config::SamplerConfig;
use crate::density::{DensityRecord, DiscreteDensity};
use crate::error::{Error, Result};
use crate::uncertain_sets::SetWithUncertainty;

/// One retained draw: segment count and interior change points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sample {
    pub m: usize,
    pub changepoints: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AcceptanceRates {
    pub birth: f64,
    pub death: f64,
    pub within: f64,
    pub gibbs: f64,
}

/// Post-burn-in output of one chain.
#[derive(Debug, Clone, PartialEq)]
pub struct Posterior {
    /// Length of the sampled series.
    pub n: usize,
    pub samples: Vec<Sample>,
    /// `m_histogram[i]` counts retained draws with `i + 1` segments.
    pub m_histogram: Vec<u64>,
    pub acceptance: AcceptanceRates,
}

impl Posterior {
    /// Most frequent segment count; ties go to the smaller count.
    pub fn modal_m(&self) -> Result<usize> {
        if self.samples.is_empty() {
            return Err(Error::EmptyPosterior);
        }
        let mut best = 0;
        for (i, &c) in self.m_histogram.iter().enumerate() {
            if c > self.m_histogram[best] {
                best = i;
            }
        }
        Ok(best + 1)
    }

    /// Posterior probability of each segment count.
    pub fn m_probabilities(&self) -> Vec<f64> {
        let total: u64 = self.m_histogram.iter().sum();
        self.m_histogram
            .iter()
            .map(|&c| if total == 0 { 0.0 } else { c as f64 / total as f64 })
            .collect()
    }

    /// Histograms of each interior change point among draws with `m`
    /// segments, in change-point order.
    pub fn changepoint_histograms(&self, m: usize) -> Result<Vec<DiscreteDensity>> {
        let mut counts: Vec<BTreeMap<i64, u64>> = vec![BTreeMap::new(); m.saturating_sub(1)];
        let mut seen = false;
        for s in self.samples.iter().filter(|s| s.m == m) {
            seen = true;
            for (j, &c) in s.changepoints.iter().enumerate() {
                *counts[j].entry(c as i64).or_default() += 1;
            }
        }
        if !seen {
            return Err(Error::EmptyPosterior);
        }
        counts.into_iter().map(DiscreteDensity::from_counts).collect()
    }
}

/// The set with uncertainty of the modal segment count: one density per
/// interior change point, with overlapping histograms truncated at the
/// midpoints between modes. `None` marks a posterior whose modal count is a
/// single segment (no change points).
pub fn modal_changepoint_set(post: &Posterior, n: usize) -> Result<Option<SetWithUncertainty>> {
    let m0 = post.modal_m()?;
    if m0 == 1 {
        return Ok(None);
    }
    let members = post.changepoint_histograms(m0)?;
    for d in &members {
        let (lo, hi) = d.support();
        if lo <= 0.0 || hi >= n as f64 {
            return Err(Error::Numerical(format!(
                "change point outside (0, {n}): [{lo}, {hi}]"
            )));
        }
    }
    SetWithUncertainty::repaired(members).map(Some)
}

/// Persisted summary of one chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorRecord {
    pub series_id: String,
    pub m_histogram: Vec<u64>,
    pub modal_m: usize,
    pub changepoints: Vec<DensityRecord>,
    pub acceptance_rates: AcceptanceRates,
    pub config_echo: SamplerConfig,
}

impl PosteriorRecord {
    pub fn new(
        series_id: impl Into<String>,
        post: &Posterior,
        set: Option<&SetWithUncertainty>,
        config: &SamplerConfig,
    ) -> Result<Self> {
        Ok(PosteriorRecord {
            series_id: series_id.into(),
            m_histogram: post.m_histogram.clone(),
            modal_m: post.modal_m()?,
            changepoints: set
                .map(|s| s.members().iter().cloned().map(DensityRecord::from).collect())
                .unwrap_or_default(),
            acceptance_rates: post.acceptance,
            config_echo: config.clone(),
        })
    }

    /// Rebuild the change-point set; `None` for the empty marker.
    pub fn changepoint_set(&self) -> Result<Option<SetWithUncertainty>> {
        if self.changepoints.is_empty() {
            return Ok(None);
        }
        let members = self
            .changepoints
            .iter()
            .cloned()
            .map(DiscreteDensity::try_from)
            .collect::<Result<Vec<_>>>()?;
        SetWithUncertainty::new(members).map(Some)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}
