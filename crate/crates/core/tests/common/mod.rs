#![allow(dead_code)]

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use mjw_core::changepoint::SamplerConfig;
use mjw_core::pipeline::{NamedWindow, PipelineConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Gaussian returns whose standard deviation is `before` up to `at` and
/// `after` from there on.
pub fn shifted_returns(len: usize, at: usize, before: f64, after: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let z = Normal::new(0.0, 1.0).unwrap();
    (0..len)
        .map(|t| z.sample(&mut rng) * if t < at { before } else { after })
        .collect()
}

pub fn day(i: usize) -> NaiveDate {
    NaiveDate::from_ymd_opt(2010, 1, 4).unwrap() + chrono::Days::new(i as u64)
}

/// Write a wide price CSV whose log returns are exactly `returns` (up to
/// rounding of the printed prices).
pub fn write_price_csv(path: &Path, tickers: &[&str], returns: &[Vec<f64>]) {
    let len = returns[0].len() + 1;
    let prices: Vec<Vec<f64>> = returns
        .iter()
        .map(|r| {
            let mut p = vec![100.0];
            for v in r {
                let last = *p.last().unwrap();
                p.push(last * v.exp());
            }
            p
        })
        .collect();
    let mut text = String::from("date");
    for t in tickers {
        text.push(',');
        text.push_str(t);
    }
    text.push('\n');
    for i in 0..len {
        text.push_str(&day(i).to_string());
        for p in &prices {
            text.push_str(&format!(",{:?}", p[i]));
        }
        text.push('\n');
    }
    std::fs::write(path, text).unwrap();
}

/// Three series with clear volatility shifts at different places.
pub fn smoke_corpus(dir: &Path) -> PathBuf {
    let path = dir.join("prices.csv");
    let returns = vec![
        shifted_returns(200, 100, 0.01, 0.04, 1),
        shifted_returns(200, 70, 0.01, 0.04, 2),
        shifted_returns(200, 130, 0.04, 0.01, 3),
    ];
    write_price_csv(&path, &["AAA", "BBB", "CCC"], &returns);
    path
}

pub fn smoke_config(input: PathBuf, out: PathBuf) -> PipelineConfig {
    PipelineConfig {
        input: Some(input),
        out_dir: out,
        seed: Some(11),
        sampler: SamplerConfig {
            t_min: 30,
            max_segments: 5,
            n_iterations: 1500,
            n_burnin: 300,
            ..Default::default()
        },
        windows: vec![NamedWindow {
            name: "late".into(),
            start: day(120),
            end: day(199),
        }],
        market: mjw_core::pipeline::MarketConfig {
            pca_window: 30,
            norm_window: 30,
            histogram_bins: 10,
            ..Default::default()
        },
        ..Default::default()
    }
}
