use std::io::Write;

use chrono::NaiveDate;
use log::debug;

use super::correlation::{correlation_matrix, CorrelationMatrix};
use super::panel::{ReturnPanel, WindowSpec};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::symmetric_eigenvalues;

/// Eigenvalue below zero met while building the spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NegativeEigenvalue {
    pub start: usize,
    pub value: f64,
}

/// Explanatory-variance proportions `μ_i(t) = |λ_i| / Σ|λ|`, one full tuple
/// per window start, sorted by magnitude.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaSpectrum {
    pub window: usize,
    pub top_k: usize,
    /// Dates of the window starts.
    pub dates: Vec<NaiveDate>,
    pub mu: Vec<Vec<f64>>,
    pub negative: Vec<NegativeEigenvalue>,
}

impl PcaSpectrum {
    pub fn leading(&self) -> Vec<f64> {
        self.mu.iter().map(|m| m[0]).collect()
    }

    /// `date, mu_1, ..., mu_k` for the first `top_k` components.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let k = self.top_k.min(self.mu.first().map_or(0, Vec::len));
        let mut w = csv::Writer::from_writer(writer);
        let header = std::iter::once("date".to_string()).chain((1..=k).map(|i| format!("mu_{i}")));
        w.write_record(header)?;
        for (date, mu) in self.dates.iter().zip(&self.mu) {
            let row = mu[..k].iter().map(|v| format!("{v:?}"));
            w.write_record(std::iter::once(date.to_string()).chain(row))?;
        }
        w.flush().map_err(|e| Error::io("<csv writer>", e))?;
        Ok(())
    }
}

/// Proportions for one correlation matrix, plus any negative eigenvalues.
pub fn spectrum(rho: &CorrelationMatrix) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut ev = symmetric_eigenvalues(rho.n(), rho.values())?;
    ev.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
    let total: f64 = ev.iter().map(|v| v.abs()).sum();
    let negative = ev.iter().copied().filter(|v| *v < 0.0).collect();
    Ok((ev.iter().map(|v| v.abs() / total).collect(), negative))
}

pub fn rolling_pca(returns: &ReturnPanel, window: usize, top_k: usize) -> Result<PcaSpectrum> {
    rolling_pca_with(Execution::default(), returns, window, top_k)
}

pub fn rolling_pca_with(
    exec: Execution,
    returns: &ReturnPanel,
    window: usize,
    top_k: usize,
) -> Result<PcaSpectrum> {
    if window < 3 {
        return Err(Error::WindowTooShort { len: window, min: 3 });
    }
    let t = returns.len();
    if t < window {
        return Err(Error::WindowTooShort { len: t, min: window });
    }
    let rows = exec.map_range(t - window + 1, |s| {
        let rho = correlation_matrix(returns, WindowSpec { start: s, end: s + window - 1 })?;
        spectrum(&rho)
    });
    let mut mu = Vec::with_capacity(rows.len());
    let mut negative = Vec::new();
    for (start, row) in rows.into_iter().enumerate() {
        let (m, neg) = row?;
        for value in neg {
            debug!("negative eigenvalue {value:e} in window starting at {start}");
            negative.push(NegativeEigenvalue { start, value });
        }
        mu.push(m);
    }
    Ok(PcaSpectrum {
        window,
        top_k,
        dates: returns.dates()[..mu.len()].to_vec(),
        mu,
        negative,
    })
}
