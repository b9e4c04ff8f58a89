use std::collections::HashMap;
use std::rc::Rc;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rustfft::FftPlanner;

use super::config::SamplerConfig;
use super::spectral::{
    basis_matrix, log_beta_prior, log_tau_prior, whittle, GaussianApprox, Periodogram,
    SegmentData,
};
use crate::error::{Error, Result};

/// Current partition and per-segment parameters of the chain.
///
/// `xi` holds the segment boundaries `0 = ξ₀ < ξ₁ < … < ξ_m = n`; segment `j`
/// covers observations `ξ_j .. ξ_{j+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    pub xi: Vec<usize>,
    pub tau2: Vec<f64>,
    pub beta: Vec<DVector<f64>>,
}

impl ChainState {
    /// Number of segments.
    pub fn m(&self) -> usize {
        self.xi.len() - 1
    }

    pub fn segment(&self, j: usize) -> (usize, usize) {
        (self.xi[j], self.xi[j + 1])
    }

    pub fn segment_len(&self, j: usize) -> usize {
        self.xi[j + 1] - self.xi[j]
    }

    /// Interior change points `ξ₁, …, ξ_{m−1}`.
    pub fn changepoints(&self) -> &[usize] {
        &self.xi[1..self.xi.len() - 1]
    }

    /// Number of segments long enough to be split (at least `2 t_min` points).
    pub fn splittable(&self, t_min: usize) -> usize {
        (0..self.m())
            .filter(|&j| self.segment_len(j) >= 2 * t_min)
            .count()
    }

    pub fn validate(&self, n: usize, t_min: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::Numerical(format!("invalid chain state: {msg}")));
        let m = self.m();
        if m == 0 || self.xi[0] != 0 || self.xi[m] != n {
            return bad(format!("boundaries {:?} for n = {n}", self.xi));
        }
        if self.tau2.len() != m || self.beta.len() != m {
            return bad("parameter vectors do not match segment count".into());
        }
        for j in 0..m {
            if self.xi[j + 1] < self.xi[j] + t_min {
                return bad(format!("segment {j} shorter than {t_min}"));
            }
            if !(self.tau2[j] > 0.0 && self.tau2[j].is_finite()) {
                return bad(format!("tau2[{j}] = {}", self.tau2[j]));
            }
        }
        Ok(())
    }
}

/// Series-bound likelihood and prior evaluations, with segment statistics
/// and Laplace fits memoized.
pub struct SegmentModel<'a> {
    series: &'a [f64],
    pub(crate) config: SamplerConfig,
    planner: FftPlanner<f64>,
    segments: HashMap<(usize, usize), Rc<SegmentData>>,
    bases: HashMap<usize, Arc<DMatrix<f64>>>,
    fits: HashMap<(usize, usize, u64), Rc<GaussianApprox>>,
}

// Periodograms are small; this bounds memory on long chains over long series.
const SEGMENT_CACHE_LIMIT: usize = 50_000;

impl<'a> SegmentModel<'a> {
    pub fn new(series: &'a [f64], config: SamplerConfig) -> Result<Self> {
        config.validate_for(series.len())?;
        if let Some(i) = series.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFiniteInput(i));
        }
        Ok(SegmentModel {
            series,
            config,
            planner: FftPlanner::new(),
            segments: HashMap::new(),
            bases: HashMap::new(),
            fits: HashMap::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.series.len()
    }

    pub fn config(&self) -> &SamplerConfig {
        &self.config
    }

    pub(crate) fn segment(&mut self, start: usize, end: usize) -> Rc<SegmentData> {
        if let Some(s) = self.segments.get(&(start, end)) {
            return Rc::clone(s);
        }
        if self.segments.len() >= SEGMENT_CACHE_LIMIT {
            self.segments.clear();
        }
        let len = end - start;
        let n_basis = self.config.n_basis;
        let basis = Arc::clone(
            self.bases
                .entry(len)
                .or_insert_with(|| Arc::new(basis_matrix(len, n_basis))),
        );
        let data = Rc::new(SegmentData {
            periodogram: Periodogram::new(&self.series[start..end], &mut self.planner),
            basis,
        });
        self.segments.insert((start, end), Rc::clone(&data));
        data
    }

    /// Drop memoized Laplace fits; called at the start of every move.
    pub(crate) fn clear_fits(&mut self) {
        self.fits.clear();
    }

    /// Gaussian approximation to `p(β | x[start..end], τ²)`.
    pub fn approx(&mut self, start: usize, end: usize, tau2: f64) -> Result<Rc<GaussianApprox>> {
        let key = (start, end, tau2.to_bits());
        if let Some(f) = self.fits.get(&key) {
            return Ok(Rc::clone(f));
        }
        let seg = self.segment(start, end);
        let fit = Rc::new(GaussianApprox::fit(
            &seg.periodogram,
            &seg.basis,
            tau2,
            self.config.intercept_variance,
        )?);
        self.fits.insert(key, Rc::clone(&fit));
        Ok(fit)
    }

    pub fn log_likelihood(&mut self, start: usize, end: usize, beta: &DVector<f64>) -> f64 {
        let seg = self.segment(start, end);
        whittle(&seg.periodogram, &seg.basis, beta)
    }

    /// Likelihood plus coefficient and amplitude priors of one segment.
    pub fn segment_log_target(&mut self, start: usize, end: usize, beta: &DVector<f64>, tau2: f64) -> f64 {
        self.log_likelihood(start, end, beta)
            + log_beta_prior(beta, tau2, self.config.intercept_variance)
            + log_tau_prior(tau2, self.config.prior_scale)
    }

    /// Log of the number of admissible partitions into `m` segments; the
    /// partition prior is uniform over them.
    pub fn log_partition_count(&self, m: usize) -> f64 {
        log_partition_count(self.n(), m, self.config.t_min)
    }

    /// Unnormalized log posterior of a full state (uniform prior on `m`).
    pub fn log_target(&mut self, state: &ChainState) -> f64 {
        let mut total = -self.log_partition_count(state.m());
        for j in 0..state.m() {
            let (s, e) = state.segment(j);
            total += self.segment_log_target(s, e, &state.beta[j], state.tau2[j]);
        }
        total
    }

    /// One segment covering the series, τ² at the prior scale and β at the
    /// Laplace mode.
    pub fn initial_state(&mut self) -> Result<ChainState> {
        let n = self.n();
        let tau2 = self.config.prior_scale;
        let beta = self.approx(0, n, tau2)?.mode.clone();
        Ok(ChainState {
            xi: vec![0, n],
            tau2: vec![tau2],
            beta: vec![beta],
        })
    }
}

/// `ln C(n − m·t_min + m − 1, m − 1)`: compositions of `n` into `m` parts of
/// size at least `t_min`.
pub fn log_partition_count(n: usize, m: usize, t_min: usize) -> f64 {
    if m == 0 || n < m * t_min {
        return f64::NEG_INFINITY;
    }
    let k = m - 1;
    let top = n - m * t_min + k;
    (1..=k)
        .map(|i| ((top - k + i) as f64 / i as f64).ln())
        .sum()
}
