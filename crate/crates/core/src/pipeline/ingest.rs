use std::io::Read;
use std::path::Path;

use chrono::NaiveDate;
use log::warn;

use crate::error::{Error, Result};
use crate::market_analytics::PricePanel;

/// A loaded panel plus what the missing-data policy did to it.
#[derive(Debug, Clone, PartialEq)]
pub struct Ingested {
    pub panel: PricePanel,
    /// Tickers dropped because they lack a first value.
    pub dropped: Vec<String>,
    /// `(ticker, number of forward-filled cells)` for tickers with gaps.
    pub filled: Vec<(String, usize)>,
}

pub fn load_price_csv(path: &Path) -> Result<Ingested> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_price_csv(file).map_err(|e| e.context(path.display().to_string()))
}

fn is_missing(cell: &str) -> bool {
    matches!(cell, "" | "NA" | "NaN" | "nan" | "null")
}

/// Parse a wide CSV: ISO dates in the first column, one price column per
/// ticker. Rows and columns in errors are 1-based file positions.
pub fn read_price_csv<R: Read>(reader: R) -> Result<Ingested> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.len() < 2 {
        return Err(Error::Parse {
            row: 1,
            column: header.len().max(1),
            message: "expected a date column and at least one ticker".into(),
        });
    }
    let tickers: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut dates: Vec<NaiveDate> = Vec::new();
    let mut columns: Vec<Vec<Option<f64>>> = vec![Vec::new(); tickers.len()];

    for (r, record) in rdr.records().enumerate() {
        let row = r + 2;
        let record = record?;
        if record.len() != header.len() {
            return Err(Error::Parse {
                row,
                column: record.len().min(header.len()) + 1,
                message: format!("expected {} fields, found {}", header.len(), record.len()),
            });
        }
        let date = NaiveDate::parse_from_str(&record[0], "%Y-%m-%d").map_err(|e| Error::Parse {
            row,
            column: 1,
            message: format!("bad date '{}': {e}", &record[0]),
        })?;
        if dates.last().is_some_and(|last| *last >= date) {
            return Err(Error::UnsortedDates(row));
        }
        dates.push(date);
        for (c, cell) in record.iter().skip(1).enumerate() {
            let value = if is_missing(cell) {
                None
            } else {
                let v: f64 = cell.parse().map_err(|_| Error::Parse {
                    row,
                    column: c + 2,
                    message: format!("'{cell}' is not a number"),
                })?;
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::NonPositivePrice {
                        ticker: tickers[c].clone(),
                        row,
                        value: v,
                    });
                }
                Some(v)
            };
            columns[c].push(value);
        }
    }

    let mut kept = Vec::new();
    let mut prices = Vec::new();
    let mut dropped = Vec::new();
    let mut filled = Vec::new();
    for (ticker, column) in tickers.into_iter().zip(columns) {
        if column.first().is_none_or(Option::is_none) {
            warn!("dropping '{ticker}': no price on the first date");
            dropped.push(ticker);
            continue;
        }
        let mut gaps = 0;
        let mut last = 0.0;
        let series = column
            .into_iter()
            .map(|v| {
                match v {
                    Some(p) => last = p,
                    None => gaps += 1,
                }
                last
            })
            .collect();
        if gaps > 0 {
            warn!("forward-filled {gaps} missing prices for '{ticker}'");
            filled.push((ticker.clone(), gaps));
        }
        kept.push(ticker);
        prices.push(series);
    }
    Ok(Ingested {
        panel: PricePanel::new(kept, dates, prices)?,
        dropped,
        filled,
    })
}
