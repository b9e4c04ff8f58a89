use std::io::Write;

use chrono::NaiveDate;

use super::panel::{PricePanel, WindowSpec};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::matrix_analysis::DistanceMatrix;

/// `g_i[a:b] = p_i[a:b] / ||p_i[a:b]||₁`.
pub fn normalized_trajectory(panel: &PricePanel, i: usize, w: WindowSpec) -> Result<Vec<f64>> {
    check_window(panel, w)?;
    let p = &panel.prices(i)[w.range()];
    let total: f64 = p.iter().sum();
    Ok(p.iter().map(|v| v / total).collect())
}

/// The constant trajectory `(1/L, ..., 1/L)`.
pub fn flat_trajectory(len: usize) -> Vec<f64> {
    vec![1.0 / len as f64; len]
}

fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

fn check_window(panel: &PricePanel, w: WindowSpec) -> Result<()> {
    if w.start > w.end || w.end >= panel.len() {
        return Err(Error::InvalidWindow {
            start: w.start,
            end: w.end,
            len: panel.len(),
        });
    }
    Ok(())
}

fn trajectories(panel: &PricePanel, w: WindowSpec) -> Result<Vec<Vec<f64>>> {
    (0..panel.n()).map(|i| normalized_trajectory(panel, i, w)).collect()
}

fn pairwise(g: &[Vec<f64>]) -> Vec<f64> {
    let n = g.len();
    let mut values = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d = l1(&g[i], &g[j]);
            values[i * n + j] = d;
            values[j * n + i] = d;
        }
    }
    values
}

/// `D_ij = ||g_i − g_j||₁` over one window.
pub fn trajectory_distance_matrix(panel: &PricePanel, w: WindowSpec) -> Result<DistanceMatrix> {
    let g = trajectories(panel, w)?;
    DistanceMatrix::new(panel.tickers().to_vec(), pairwise(&g))
}

/// `max_i ||g_i − g₀||₁` over one window.
pub fn trajectory_dispersion(panel: &PricePanel, w: WindowSpec) -> Result<f64> {
    let g0 = flat_trajectory(w.len());
    Ok(trajectories(panel, w)?
        .iter()
        .map(|g| l1(g, &g0))
        .fold(0.0, f64::max))
}

/// Frobenius norms of the rolling trajectory-distance matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryNorms {
    pub window: usize,
    /// Dates of the window starts.
    pub dates: Vec<NaiveDate>,
    pub values: Vec<f64>,
}

impl TrajectoryNorms {
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["date", "value"])?;
        for (date, v) in self.dates.iter().zip(&self.values) {
            w.write_record([date.to_string(), format!("{v:?}")])?;
        }
        w.flush().map_err(|e| Error::io("<csv writer>", e))?;
        Ok(())
    }
}

pub fn rolling_trajectory_norm(panel: &PricePanel, window: usize) -> Result<TrajectoryNorms> {
    rolling_trajectory_norm_with(Execution::default(), panel, window)
}

pub fn rolling_trajectory_norm_with(
    exec: Execution,
    panel: &PricePanel,
    window: usize,
) -> Result<TrajectoryNorms> {
    if window == 0 || panel.len() < window {
        return Err(Error::WindowTooShort {
            len: panel.len(),
            min: window.max(1),
        });
    }
    let values = exec
        .map_range(panel.len() - window + 1, |s| {
            let g = trajectories(panel, WindowSpec { start: s, end: s + window - 1 })?;
            Ok(pairwise(&g).iter().map(|d| d * d).sum::<f64>().sqrt())
        })
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
    Ok(TrajectoryNorms {
        window,
        dates: panel.dates()[..values.len()].to_vec(),
        values,
    })
}
