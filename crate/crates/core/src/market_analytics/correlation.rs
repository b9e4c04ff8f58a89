use std::io::Write;

use log::warn;

use super::panel::{ReturnPanel, WindowSpec};
use crate::error::{Error, Result};

/// Pearson correlations of every ticker pair over one window.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    n: usize,
    values: Vec<f64>,
    /// Tickers with zero variance in the window; their off-diagonal
    /// entries are set to 0.
    pub zero_variance: Vec<usize>,
}

impl CorrelationMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    /// Row-major entries.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Coefficients `ρ_ij` with `i < j`.
    pub fn upper_triangle(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).flat_map(move |i| (i + 1..self.n).map(move |j| self.get(i, j)))
    }

    pub fn write_csv<W: Write>(&self, labels: &[String], writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(std::iter::once("").chain(labels.iter().map(String::as_str)))?;
        for (i, label) in labels.iter().enumerate() {
            let row = (0..self.n).map(|j| format!("{:?}", self.get(i, j)));
            w.write_record(std::iter::once(label.clone()).chain(row))?;
        }
        w.flush().map_err(|e| Error::io("<csv writer>", e))?;
        Ok(())
    }
}

pub fn correlation_matrix(returns: &ReturnPanel, w: WindowSpec) -> Result<CorrelationMatrix> {
    if w.end >= returns.len() {
        return Err(Error::InvalidWindow {
            start: w.start,
            end: w.end,
            len: returns.len(),
        });
    }
    if w.len() < 3 {
        return Err(Error::WindowTooShort { len: w.len(), min: 3 });
    }
    let n = returns.n();
    let len = w.len() as f64;
    // centered window slices and their sums of squares
    let centered: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let x = &returns.series(i)[w.range()];
            let mean = x.iter().sum::<f64>() / len;
            x.iter().map(|v| v - mean).collect()
        })
        .collect();
    let scale: Vec<f64> = centered
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>())
        .collect();
    let zero_variance: Vec<usize> = (0..n).filter(|&i| scale[i] == 0.0).collect();
    for &i in &zero_variance {
        warn!(
            "'{}' has zero variance on [{}, {}]; its correlations are set to 0",
            returns.tickers()[i],
            w.start,
            w.end
        );
    }
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        values[i * n + i] = 1.0;
        for j in i + 1..n {
            let rho = if scale[i] == 0.0 || scale[j] == 0.0 {
                0.0
            } else {
                let dot: f64 = centered[i].iter().zip(&centered[j]).map(|(a, b)| a * b).sum();
                (dot / (scale[i] * scale[j]).sqrt()).clamp(-1.0, 1.0)
            };
            values[i * n + j] = rho;
            values[j * n + i] = rho;
        }
    }
    Ok(CorrelationMatrix {
        n,
        values,
        zero_variance,
    })
}

/// Equal-width histogram on `[−1, 1]`. Bins are closed on the left except
/// the last, which also includes 1.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationHistogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl CorrelationHistogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["bin_left", "bin_right", "count"])?;
        for (b, count) in self.counts.iter().enumerate() {
            w.write_record([
                format!("{:?}", self.edges[b]),
                format!("{:?}", self.edges[b + 1]),
                count.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<csv writer>", e))?;
        Ok(())
    }
}

pub fn correlation_histogram(rho: &CorrelationMatrix, bins: usize) -> Result<CorrelationHistogram> {
    if bins == 0 {
        return Err(Error::Config("histogram needs at least one bin".into()));
    }
    if rho.n() < 2 {
        return Err(Error::TooFewSeries { needed: 2, got: rho.n() });
    }
    let width = 2.0 / bins as f64;
    let edges = (0..=bins).map(|b| -1.0 + b as f64 * width).collect();
    let mut counts = vec![0u64; bins];
    for r in rho.upper_triangle() {
        let b = (((r + 1.0) / width).floor() as usize).min(bins - 1);
        counts[b] += 1;
    }
    Ok(CorrelationHistogram { edges, counts })
}
