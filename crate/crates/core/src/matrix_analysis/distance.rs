use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::uncertain_sets::{mj_wasserstein, SetWithUncertainty};

/// Labeled symmetric matrix of nonnegative distances with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    labels: Vec<String>,
    values: Vec<f64>,
}

impl DistanceMatrix {
    /// Validate a row-major `n × n` matrix.
    pub fn new(labels: Vec<String>, values: Vec<f64>) -> Result<Self> {
        let n = labels.len();
        if values.len() != n * n {
            return Err(Error::InvalidMatrix(format!(
                "{} labels but {} entries",
                n,
                values.len()
            )));
        }
        for i in 0..n {
            if values[i * n + i] != 0.0 {
                return Err(Error::InvalidMatrix(format!("nonzero diagonal at {i}")));
            }
            for j in 0..n {
                let v = values[i * n + j];
                if !(v >= 0.0) || !v.is_finite() {
                    return Err(Error::InvalidMatrix(format!("entry ({i}, {j}) = {v}")));
                }
                if v != values[j * n + i] {
                    return Err(Error::InvalidMatrix(format!("asymmetric at ({i}, {j})")));
                }
            }
        }
        Ok(DistanceMatrix { labels, values })
    }

    pub fn from_rows(labels: Vec<String>, rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(labels, rows.iter().flatten().copied().collect())
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Row-major entries.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n() + j]
    }

    /// Write as CSV with a header row and a leading column of labels.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec![String::new()];
        header.extend(self.labels.iter().cloned());
        w.write_record(&header)?;
        let n = self.n();
        for (i, label) in self.labels.iter().enumerate() {
            let mut row = vec![label.clone()];
            row.extend(self.values[i * n..(i + 1) * n].iter().map(|v| format!("{v:?}")));
            w.write_record(&row)?;
        }
        w.flush().map_err(|e| Error::io("<csv writer>", e))?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().has_headers(false).from_reader(reader);
        let mut records = r.records();
        let header = records
            .next()
            .ok_or_else(|| Error::InvalidMatrix("empty file".into()))??;
        let labels: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        let n = labels.len();
        let mut values = Vec::with_capacity(n * n);
        for (row, rec) in records.enumerate() {
            let rec = rec?;
            if rec.len() != n + 1 {
                return Err(Error::Parse {
                    row: row + 2,
                    column: rec.len(),
                    message: format!("expected {} fields", n + 1),
                });
            }
            if row >= n {
                return Err(Error::Parse {
                    row: row + 2,
                    column: 1,
                    message: "more rows than labels".into(),
                });
            }
            if rec[0] != labels[row] {
                return Err(Error::Parse {
                    row: row + 2,
                    column: 1,
                    message: format!("row label '{}' does not match header", &rec[0]),
                });
            }
            for (col, field) in rec.iter().enumerate().skip(1) {
                values.push(field.trim().parse::<f64>().map_err(|e| Error::Parse {
                    row: row + 2,
                    column: col + 1,
                    message: e.to_string(),
                })?);
            }
        }
        Self::new(labels, values)
    }
}

/// `D_ij = mj_wasserstein(S̃_i, S̃_j, p, q) / T`, each pair computed once.
pub fn distance_matrix(
    labels: &[String],
    sets: &[SetWithUncertainty],
    series_length: usize,
    p: f64,
    q: f64,
) -> Result<DistanceMatrix> {
    distance_matrix_with(Execution::default(), labels, sets, series_length, p, q)
}

pub fn distance_matrix_with(
    exec: Execution,
    labels: &[String],
    sets: &[SetWithUncertainty],
    series_length: usize,
    p: f64,
    q: f64,
) -> Result<DistanceMatrix> {
    let n = sets.len();
    if n == 0 {
        return Err(Error::EmptyCollection);
    }
    if n < 2 {
        return Err(Error::TooFewSeries { needed: 2, got: n });
    }
    if labels.len() != n {
        return Err(Error::InvalidMatrix(format!("{} labels for {n} sets", labels.len())));
    }
    if series_length == 0 {
        return Err(Error::Config("series length must be positive".into()));
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let scale = series_length as f64;
    let dists = exec.map_slice(&pairs, |&(i, j)| {
        mj_wasserstein(&sets[i], &sets[j], p, q).map(|d| d / scale)
    });
    let mut values = vec![0.0; n * n];
    for (&(i, j), d) in pairs.iter().zip(dists) {
        let d = d?;
        values[i * n + j] = d;
        values[j * n + i] = d;
    }
    DistanceMatrix::new(labels.to_vec(), values)
}
