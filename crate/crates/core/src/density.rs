//! Discrete probability densities on the real line.
//!
//! A [`DiscreteDensity`] is a set of weighted atoms on a strictly increasing
//! grid. Change-point posteriors are histograms over observation indices, so
//! in practice the grid is integer valued, but nothing here depends on that.
//!
//! The q-Wasserstein distance between two such densities is evaluated through
//! their quantile functions. Both quantile functions are step functions of the
//! level `u`, so merging the two sets of CDF breakpoints gives the integral
//! exactly, with no quadrature.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DensityRecord", into = "DensityRecord")]
pub struct DiscreteDensity {
    points: Vec<f64>,
    masses: Vec<f64>,
    // cumulative masses; the last entry is pinned to exactly 1
    cdf: Vec<f64>,
}

/// On-disk form of a density: `{"points": [...], "masses": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityRecord {
    pub points: Vec<f64>,
    pub masses: Vec<f64>,
}

impl TryFrom<DensityRecord> for DiscreteDensity {
    type Error = Error;

    fn try_from(record: DensityRecord) -> Result<Self> {
        DiscreteDensity::new(record.points, record.masses)
    }
}

impl From<DiscreteDensity> for DensityRecord {
    fn from(d: DiscreteDensity) -> Self {
        DensityRecord {
            points: d.points,
            masses: d.masses,
        }
    }
}

impl DiscreteDensity {
    /// Build a density from atoms, renormalizing the masses to sum to one.
    pub fn new(points: Vec<f64>, masses: Vec<f64>) -> Result<Self> {
        if points.len() != masses.len() {
            return Err(Error::LengthMismatch {
                points: points.len(),
                masses: masses.len(),
            });
        }
        if points.is_empty() {
            return Err(Error::EmptySupport);
        }
        for (i, p) in points.iter().enumerate() {
            if !p.is_finite() || (i > 0 && *p <= points[i - 1]) {
                return Err(Error::NonIncreasingGrid(i));
            }
        }
        for (index, &value) in masses.iter().enumerate() {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(Error::NegativeMass { index, value });
            }
        }
        let total: f64 = masses.iter().sum();
        if total <= 0.0 {
            return Err(Error::ZeroTotalMass);
        }
        let masses: Vec<f64> = masses.into_iter().map(|m| m / total).collect();
        let mut cdf = Vec::with_capacity(masses.len());
        let mut acc = 0.0;
        for m in &masses {
            acc += m;
            cdf.push(acc.min(1.0));
        }
        // Everything past the last positive atom is exactly 1.
        let last_positive = masses.iter().rposition(|&m| m > 0.0).unwrap_or(0);
        for c in &mut cdf[last_positive..] {
            *c = 1.0;
        }
        Ok(DiscreteDensity {
            points,
            masses,
            cdf,
        })
    }

    /// A unit point mass at `x`.
    pub fn delta(x: f64) -> Result<Self> {
        Self::new(vec![x], vec![1.0])
    }

    /// Histogram of integer observations, one atom per distinct value.
    pub fn from_counts<I>(counts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, u64)>,
    {
        let mut pairs: Vec<(i64, u64)> = counts.into_iter().filter(|(_, c)| *c > 0).collect();
        pairs.sort_unstable();
        let (points, masses) = pairs.into_iter().map(|(p, c)| (p as f64, c as f64)).unzip();
        Self::new(points, masses)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Closed interval spanned by the atoms carrying positive mass.
    pub fn support(&self) -> (f64, f64) {
        let lo = self.masses.iter().position(|&m| m > 0.0).unwrap_or(0);
        let hi = self.masses.iter().rposition(|&m| m > 0.0).unwrap_or(0);
        (self.points[lo], self.points[hi])
    }

    pub fn is_delta(&self) -> bool {
        let (lo, hi) = self.support();
        lo == hi
    }

    pub fn mean(&self) -> f64 {
        self.points
            .iter()
            .zip(&self.masses)
            .map(|(p, m)| p * m)
            .sum()
    }

    /// Location of the heaviest atom; ties go to the smaller location.
    pub fn mode(&self) -> f64 {
        let mut best = 0;
        for (i, &m) in self.masses.iter().enumerate() {
            if m > self.masses[best] {
                best = i;
            }
        }
        self.points[best]
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self.points.partition_point(|&p| p <= x) {
            0 => 0.0,
            k => self.cdf[k - 1],
        }
    }

    /// Generalized inverse CDF: the smallest atom `x` with `CDF(x) >= u`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::QuantileOutOfRange(u));
        }
        let k = self.cdf.partition_point(|&c| c < u);
        Ok(self.points[k.min(self.points.len() - 1)])
    }

    /// Atoms restricted to the half-open window `(lo, hi]`, renormalized.
    pub(crate) fn truncate(&self, lo: f64, hi: f64) -> Result<Self> {
        let (points, masses): (Vec<f64>, Vec<f64>) = self
            .points
            .iter()
            .zip(&self.masses)
            .filter(|(p, m)| **p > lo && **p <= hi && **m > 0.0)
            .map(|(p, m)| (*p, *m))
            .unzip();
        Self::new(points, masses)
    }
}

/// Exact q-Wasserstein distance `(∫₀¹ |F⁻¹(u) − G⁻¹(u)|^q du)^(1/q)`.
pub fn wasserstein(f: &DiscreteDensity, g: &DiscreteDensity, q: f64) -> Result<f64> {
    if !(q >= 1.0) || !q.is_finite() {
        return Err(Error::InvalidOrder(q));
    }
    let (mut i, mut j) = (0usize, 0usize);
    let mut level = 0.0;
    let mut total = 0.0;
    let last_f = f.points.len() - 1;
    let last_g = g.points.len() - 1;
    loop {
        let cf = f.cdf[i];
        let cg = g.cdf[j];
        let next = cf.min(cg);
        let width = next - level;
        if width > 0.0 {
            let gap = (f.points[i] - g.points[j]).abs();
            total += width * pow_order(gap, q);
            level = next;
        }
        if i == last_f && j == last_g {
            break;
        }
        if cf <= cg && i < last_f {
            i += 1;
        }
        if cg <= cf && j < last_g {
            j += 1;
        }
    }
    Ok(root_order(total, q))
}

#[inline]
fn pow_order(x: f64, q: f64) -> f64 {
    if q == 1.0 {
        x
    } else if q == 2.0 {
        x * x
    } else {
        x.powf(q)
    }
}

#[inline]
pub(crate) fn root_order(x: f64, q: f64) -> f64 {
    if q == 1.0 {
        x
    } else if q == 2.0 {
        x.sqrt()
    } else {
        x.powf(1.0 / q)
    }
}
