use chrono::NaiveDate;

use crate::error::{Error, Result};

/// Positive prices for `N` tickers over `T + 1` strictly increasing dates.
#[derive(Debug, Clone, PartialEq)]
pub struct PricePanel {
    tickers: Vec<String>,
    dates: Vec<NaiveDate>,
    // one row per ticker
    prices: Vec<Vec<f64>>,
}

impl PricePanel {
    pub fn new(tickers: Vec<String>, dates: Vec<NaiveDate>, prices: Vec<Vec<f64>>) -> Result<Self> {
        if prices.len() != tickers.len() {
            return Err(Error::InvalidMatrix(format!(
                "{} tickers but {} price rows",
                tickers.len(),
                prices.len()
            )));
        }
        if let Some(i) = dates.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::UnsortedDates(i + 1));
        }
        for (ticker, row) in tickers.iter().zip(&prices) {
            if row.len() != dates.len() {
                return Err(Error::InvalidMatrix(format!(
                    "'{ticker}' has {} prices for {} dates",
                    row.len(),
                    dates.len()
                )));
            }
            if let Some((r, &value)) = row.iter().enumerate().find(|(_, &p)| !(p > 0.0 && p.is_finite())) {
                return Err(Error::NonPositivePrice {
                    ticker: ticker.clone(),
                    row: r,
                    value,
                });
            }
        }
        Ok(PricePanel {
            tickers,
            dates,
            prices,
        })
    }

    /// Panel with synthetic consecutive dates starting 2000-01-01.
    pub fn from_rows(tickers: Vec<String>, prices: Vec<Vec<f64>>) -> Result<Self> {
        let len = prices.first().map_or(0, Vec::len);
        let start = NaiveDate::from_ymd_opt(2000, 1, 1).expect("valid date");
        let dates = start.iter_days().take(len).collect();
        PricePanel::new(tickers, dates, prices)
    }

    pub fn tickers(&self) -> &[String] {
        &self.tickers
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn n(&self) -> usize {
        self.tickers.len()
    }

    /// Number of dates, `T + 1`.
    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn prices(&self, i: usize) -> &[f64] {
        &self.prices[i]
    }
}

/// Log returns `R_i(t) = ln(p_i(t) / p_i(t−1))`, dated by the later day.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnPanel {
    tickers: Vec<String>,
    dates: Vec<NaiveDate>,
    returns: Vec<Vec<f64>>,
}

impl ReturnPanel {
    pub fn new(tickers: Vec<String>, dates: Vec<NaiveDate>, returns: Vec<Vec<f64>>) -> Result<Self> {
        if returns.len() != tickers.len() || returns.iter().any(|r| r.len() != dates.len()) {
            return Err(Error::InvalidMatrix("return panel shape mismatch".into()));
        }
        for row in &returns {
            if let Some(t) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFiniteInput(t));
            }
        }
        Ok(ReturnPanel {
            tickers,
            dates,
            returns,
        })
    }

    /// Panel with synthetic consecutive dates.
    pub fn from_rows(tickers: Vec<String>, returns: Vec<Vec<f64>>) -> Result<Self> {
        let len = returns.first().map_or(0, Vec::len);
        let start = NaiveDate::from_ymd_opt(2000, 1, 2).expect("valid date");
        ReturnPanel::new(tickers, start.iter_days().take(len).collect(), returns)
    }

    pub fn tickers(&self) -> &[String] {
        &self.tickers
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn n(&self) -> usize {
        self.tickers.len()
    }

    /// Number of returns `T`.
    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn series(&self, i: usize) -> &[f64] {
        &self.returns[i]
    }
}

pub fn log_returns(panel: &PricePanel) -> Result<ReturnPanel> {
    let returns = panel
        .tickers
        .iter()
        .zip(&panel.prices)
        .map(|(ticker, p)| {
            if let Some((row, &value)) = p.iter().enumerate().find(|(_, &v)| !(v > 0.0)) {
                return Err(Error::NonPositivePrice {
                    ticker: ticker.clone(),
                    row,
                    value,
                });
            }
            Ok(p.windows(2).map(|w| (w[1] / w[0]).ln()).collect())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok(ReturnPanel {
        tickers: panel.tickers.clone(),
        dates: panel.dates.iter().skip(1).copied().collect(),
        returns,
    })
}

/// Inclusive index window `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowSpec {
    pub start: usize,
    pub end: usize,
}

impl WindowSpec {
    pub fn new(start: usize, end: usize, len: usize) -> Result<Self> {
        if start > end || end >= len {
            return Err(Error::InvalidWindow { start, end, len });
        }
        Ok(WindowSpec { start, end })
    }

    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn range(&self) -> std::ops::RangeInclusive<usize> {
        self.start..=self.end
    }

    /// Resolve a calendar range against `dates`, snapping each end to the
    /// nearest contained date (earlier date on ties).
    pub fn from_dates(dates: &[NaiveDate], start: NaiveDate, end: NaiveDate) -> Result<Self> {
        if dates.is_empty() {
            return Err(Error::EmptyCollection);
        }
        if start > end {
            return Err(Error::Config(format!("window start {start} is after end {end}")));
        }
        let (a, b) = (nearest(dates, start), nearest(dates, end));
        WindowSpec::new(a, b, dates.len())
    }
}

fn nearest(dates: &[NaiveDate], target: NaiveDate) -> usize {
    let i = dates.partition_point(|d| *d < target);
    if i == 0 {
        return 0;
    }
    if i == dates.len() {
        return i - 1;
    }
    if (dates[i] - target) < (target - dates[i - 1]) {
        i
    } else {
        i - 1
    }
}
