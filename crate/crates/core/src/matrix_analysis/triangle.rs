//! Empirical triangle-inequality audit of a distance matrix.
//!
//! Every ordered triple `(i, j, k)` of distinct indices gets the ratio
//! `D_ik / (D_ij + D_jk)`: blue when it is at most 1, yellow up to 2, red
//! beyond. Triples whose denominator is zero are skipped and counted apart.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::distance::DistanceMatrix;
use crate::error::{Error, Result};
use crate::exec::Execution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TriangleClass {
    Blue,
    Yellow,
    Red,
}

impl TriangleClass {
    pub fn is_failure(self) -> bool {
        self != TriangleClass::Blue
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TriangleClass::Blue => "blue",
            TriangleClass::Yellow => "yellow",
            TriangleClass::Red => "red",
        }
    }
}

pub fn classify(ratio: f64) -> TriangleClass {
    if ratio <= 1.0 {
        TriangleClass::Blue
    } else if ratio <= 2.0 {
        TriangleClass::Yellow
    } else {
        TriangleClass::Red
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TriangleCounts {
    pub blue: u64,
    pub yellow: u64,
    pub red: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleTriple {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub ratio: f64,
    pub class: TriangleClass,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriangleTestSummary {
    n: usize,
    // n³ cells indexed (i, j, k); None for repeated indices and skipped triples
    cells: Vec<Option<(f64, TriangleClass)>>,
    pub counts: TriangleCounts,
    /// Triples of distinct indices with `D_ij + D_jk = 0`.
    pub skipped: u64,
    /// Triples of distinct indices that were classified.
    pub valid: u64,
    /// `(yellow + red) / valid`.
    pub fail_fraction: f64,
    /// Mean ratio over failing triples.
    pub mean_fail_ratio: Option<f64>,
}

impl TriangleTestSummary {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn class(&self, i: usize, j: usize, k: usize) -> Option<TriangleClass> {
        self.cells[(i * self.n + j) * self.n + k].map(|(_, c)| c)
    }

    pub fn ratio(&self, i: usize, j: usize, k: usize) -> Option<f64> {
        self.cells[(i * self.n + j) * self.n + k].map(|(r, _)| r)
    }

    pub fn triples(&self) -> impl Iterator<Item = TriangleTriple> + '_ {
        let n = self.n;
        self.cells.iter().enumerate().filter_map(move |(idx, cell)| {
            cell.map(|(ratio, class)| TriangleTriple {
                i: idx / (n * n),
                j: (idx / n) % n,
                k: idx % n,
                ratio,
                class,
            })
        })
    }

    pub fn report(&self) -> TriangleReport {
        TriangleReport {
            fail_fraction: self.fail_fraction,
            mean_fail_ratio: self.mean_fail_ratio,
            counts: self.counts,
            valid_triples: self.valid,
            skipped_triples: self.skipped,
        }
    }

    /// Dump every classified triple as `i,j,k,ratio,class`.
    pub fn write_triples_csv<W: Write>(&self, labels: &[String], writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["i", "j", "k", "ratio", "class"])?;
        for t in self.triples() {
            w.write_record([
                labels[t.i].as_str(),
                labels[t.j].as_str(),
                labels[t.k].as_str(),
                &format!("{:?}", t.ratio),
                t.class.as_str(),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<csv writer>", e))?;
        Ok(())
    }
}

/// Serialized triangle-test summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangleReport {
    pub fail_fraction: f64,
    pub mean_fail_ratio: Option<f64>,
    pub counts: TriangleCounts,
    pub valid_triples: u64,
    pub skipped_triples: u64,
}

pub fn triangle_test(d: &DistanceMatrix) -> Result<TriangleTestSummary> {
    triangle_test_with(Execution::default(), d)
}

pub fn triangle_test_with(exec: Execution, d: &DistanceMatrix) -> Result<TriangleTestSummary> {
    let n = d.n();
    if n < 3 {
        return Err(Error::TooFewSeries { needed: 3, got: n });
    }
    // One slab of n² cells per first index, merged in index order.
    let slabs = exec.map_range(n, |i| {
        let mut cells = vec![None; n * n];
        for j in (0..n).filter(|&j| j != i) {
            for k in (0..n).filter(|&k| k != i && k != j) {
                let denom = d.get(i, j) + d.get(j, k);
                if denom > 0.0 {
                    let ratio = d.get(i, k) / denom;
                    cells[j * n + k] = Some((ratio, classify(ratio)));
                }
            }
        }
        cells
    });
    let mut counts = TriangleCounts::default();
    let mut fail_sum = 0.0;
    let mut valid = 0u64;
    let mut cells = Vec::with_capacity(n * n * n);
    for slab in slabs {
        for &(ratio, class) in slab.iter().flatten() {
            valid += 1;
            match class {
                TriangleClass::Blue => counts.blue += 1,
                TriangleClass::Yellow => counts.yellow += 1,
                TriangleClass::Red => counts.red += 1,
            }
            if class.is_failure() {
                fail_sum += ratio;
            }
        }
        cells.extend(slab);
    }
    let total = (n * (n - 1) * (n - 2)) as u64;
    let fails = counts.yellow + counts.red;
    Ok(TriangleTestSummary {
        n,
        cells,
        counts,
        skipped: total - valid,
        valid,
        fail_fraction: if valid == 0 { 0.0 } else { fails as f64 / valid as f64 },
        mean_fail_ratio: (fails > 0).then(|| fail_sum / fails as f64),
    })
}
