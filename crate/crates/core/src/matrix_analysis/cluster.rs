//! Agglomerative clustering on a precomputed distance matrix.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::distance::DistanceMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Linkage {
    Single,
    Complete,
    #[default]
    Average,
}

impl FromStr for Linkage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "single" => Ok(Linkage::Single),
            "complete" => Ok(Linkage::Complete),
            "average" => Ok(Linkage::Average),
            other => Err(Error::Config(format!("unknown linkage '{other}'"))),
        }
    }
}

impl fmt::Display for Linkage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Linkage::Single => "single",
            Linkage::Complete => "complete",
            Linkage::Average => "average",
        })
    }
}

/// One merge. Leaves are clusters `0..n`; the cluster created at step `s`
/// has id `n + s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merge {
    pub step: usize,
    pub left: usize,
    pub right: usize,
    pub height: f64,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    pub n_leaves: usize,
    pub merges: Vec<Merge>,
}

impl Dendrogram {
    /// Merge list as CSV: `step,left,right,height,size`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["step", "left", "right", "height", "size"])?;
        for m in &self.merges {
            w.write_record([
                m.step.to_string(),
                m.left.to_string(),
                m.right.to_string(),
                format!("{:?}", m.height),
                m.size.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<csv writer>", e))?;
        Ok(())
    }
}

/// Naive O(n³) agglomeration with Lance–Williams updates. Ties are broken
/// toward the pair with the smallest positions in the active list.
pub fn hierarchical_cluster(d: &DistanceMatrix, linkage: Linkage) -> Result<Dendrogram> {
    let n = d.n();
    if n < 2 {
        return Err(Error::TooFewSeries { needed: 2, got: n });
    }
    let mut dist: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| d.get(i, j)).collect()).collect();
    let mut ids: Vec<usize> = (0..n).collect();
    let mut sizes: Vec<usize> = vec![1; n];
    let mut merges = Vec::with_capacity(n - 1);

    for step in 0..n - 1 {
        let active = ids.len();
        let (mut a, mut b, mut best) = (0, 1, f64::INFINITY);
        for i in 0..active {
            for j in i + 1..active {
                if dist[i][j] < best {
                    (a, b, best) = (i, j, dist[i][j]);
                }
            }
        }
        let (sa, sb) = (sizes[a], sizes[b]);
        for k in (0..active).filter(|&k| k != a && k != b) {
            let (da, db) = (dist[a][k], dist[b][k]);
            let merged = match linkage {
                Linkage::Single => da.min(db),
                Linkage::Complete => da.max(db),
                Linkage::Average => (sa as f64 * da + sb as f64 * db) / (sa + sb) as f64,
            };
            dist[a][k] = merged;
            dist[k][a] = merged;
        }
        merges.push(Merge {
            step,
            left: ids[a].min(ids[b]),
            right: ids[a].max(ids[b]),
            height: best,
            size: sa + sb,
        });
        ids[a] = n + step;
        sizes[a] = sa + sb;
        ids.remove(b);
        sizes.remove(b);
        dist.remove(b);
        for row in &mut dist {
            row.remove(b);
        }
    }
    Ok(Dendrogram { n_leaves: n, merges })
}
