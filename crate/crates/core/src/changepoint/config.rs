use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tuning of the reversible-jump sampler.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplerConfig {
    /// Minimum number of observations in a segment.
    pub t_min: usize,
    /// Maximum number of segments.
    pub max_segments: usize,
    pub n_iterations: usize,
    pub n_burnin: usize,
    /// Number of spline basis functions per segment, excluding the intercept.
    pub n_basis: usize,
    /// Scale of the inverse-gamma prior on the smoothing amplitude τ².
    pub prior_scale: f64,
    /// Prior variance of the log-spectrum intercept.
    pub intercept_variance: f64,
    /// Weight of the global (uniform) relocation proposal in within-model moves.
    pub mixture_weight: f64,
    pub seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            t_min: 40,
            max_segments: 20,
            n_iterations: 10_000,
            n_burnin: 2_000,
            n_basis: 7,
            prior_scale: 1.0,
            intercept_variance: 1e4,
            mixture_weight: 0.2,
            seed: 0,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidSamplerConfig(msg.to_string()));
        if self.t_min < 2 {
            return bad("t_min must be at least 2");
        }
        if self.max_segments < 1 {
            return bad("max_segments must be at least 1");
        }
        if self.n_burnin >= self.n_iterations {
            return bad("n_burnin must be smaller than n_iterations");
        }
        if !(self.prior_scale > 0.0 && self.prior_scale.is_finite()) {
            return bad("prior_scale must be positive");
        }
        if !(self.intercept_variance > 0.0 && self.intercept_variance.is_finite()) {
            return bad("intercept_variance must be positive");
        }
        if !(0.0..=1.0).contains(&self.mixture_weight) {
            return bad("mixture_weight must lie in [0, 1]");
        }
        Ok(())
    }

    /// Check the series length against the segment constraints.
    pub fn validate_for(&self, n: usize) -> Result<()> {
        self.validate()?;
        if n < 2 * self.t_min {
            return Err(Error::SeriesTooShort {
                len: n,
                t_min: self.t_min,
            });
        }
        Ok(())
    }
}
