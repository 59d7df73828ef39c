//! Gap-free per-category time series and their CSV layouts.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use chrono::{Datelike, Days, Months, NaiveDate};

use super::ingest::{parse_date, AnnotatedRecord, AtcCode};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Frequency {
    Daily,
    #[default]
    Weekly,
    Monthly,
}

impl Frequency {
    /// First day of the period containing `d`. Weeks start on Monday.
    pub fn period_start(self, d: NaiveDate) -> NaiveDate {
        match self {
            Self::Daily => d,
            Self::Weekly => d - Days::new(d.weekday().num_days_from_monday() as u64),
            Self::Monthly => d.with_day(1).unwrap(),
        }
    }

    pub fn next(self, d: NaiveDate) -> NaiveDate {
        match self {
            Self::Daily => d + Days::new(1),
            Self::Weekly => d + Days::new(7),
            Self::Monthly => d + Months::new(1),
        }
    }

    /// Start of the `k`-th period after `d`.
    pub fn advance(self, d: NaiveDate, k: u32) -> NaiveDate {
        match self {
            Self::Daily => d + Days::new(k as u64),
            Self::Weekly => d + Days::new(7 * k as u64),
            Self::Monthly => d + Months::new(k),
        }
    }
}

impl FromStr for Frequency {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "daily" => Ok(Self::Daily),
            "weekly" => Ok(Self::Weekly),
            "monthly" => Ok(Self::Monthly),
            _ => Err(Error::InvalidArgument(format!(
                "frequency must be daily, weekly or monthly (got `{s}`)"
            ))),
        }
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Daily => "daily",
            Self::Weekly => "weekly",
            Self::Monthly => "monthly",
        })
    }
}

/// Total quantity per period for one category. Timestamps are period
/// starts, strictly increasing, with no missing period in between.
#[derive(Debug, Clone, PartialEq)]
pub struct CategorySeries {
    atc: AtcCode,
    frequency: Frequency,
    points: Vec<(NaiveDate, f64)>,
}

impl CategorySeries {
    /// Normalizes timestamps to period starts and fills gaps with zero.
    /// Two points falling in the same period are an error.
    pub fn from_points(atc: AtcCode, frequency: Frequency, points: Vec<(NaiveDate, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut filled: Vec<(NaiveDate, f64)> = Vec::with_capacity(points.len());
        for (d, q) in points {
            if !q.is_finite() {
                return Err(Error::NonFiniteInput);
            }
            let p = frequency.period_start(d);
            if let Some(&(last, _)) = filled.last() {
                if p <= last {
                    return Err(Error::InvalidArgument(format!(
                        "series timestamps must be strictly increasing by {frequency} period ({p} after {last})"
                    )));
                }
                let mut t = frequency.next(last);
                while t < p {
                    filled.push((t, 0.0));
                    t = frequency.next(t);
                }
            }
            filled.push((p, q));
        }
        Ok(Self {
            atc,
            frequency,
            points: filled,
        })
    }

    pub fn atc(&self) -> AtcCode {
        self.atc
    }

    pub fn frequency(&self) -> Frequency {
        self.frequency
    }

    pub fn points(&self) -> &[(NaiveDate, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.points.iter().map(|p| p.1).sum()
    }

    /// Writes `timestamp,quantity` with ISO dates.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["timestamp", "quantity"])?;
        for (d, q) in &self.points {
            w.write_record([d.format("%Y-%m-%d").to_string(), q.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Sums quantities per period for `atc`, zero-filling empty periods between
/// the first and last observed one.
pub fn aggregate(records: &[AnnotatedRecord], atc: AtcCode, frequency: Frequency) -> Result<CategorySeries> {
    let mut totals: BTreeMap<NaiveDate, f64> = BTreeMap::new();
    for r in records.iter().filter(|r| r.atc == atc) {
        *totals.entry(frequency.period_start(r.record.date)).or_default() += r.record.quantity;
    }
    if totals.is_empty() {
        return Err(Error::NoRecordsForCategory(atc.to_string()));
    }
    CategorySeries::from_points(atc, frequency, totals.into_iter().collect())
}

/// Layout of a series CSV.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesFormat {
    /// `timestamp,quantity`.
    Long,
    /// One date column followed by one column per ATC code
    /// (`datum,M01AB,M01AE,...`); the requested code's column is read.
    Wide,
}

impl FromStr for SeriesFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "long" => Ok(Self::Long),
            "wide" => Ok(Self::Wide),
            _ => Err(Error::InvalidArgument(format!(
                "series format must be long or wide (got `{s}`)"
            ))),
        }
    }
}

pub fn read_series_csv<R: Read>(
    source: R,
    format: SeriesFormat,
    atc: AtcCode,
    frequency: Frequency,
) -> Result<CategorySeries> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(source);
    let headers = rdr.headers()?.clone();
    if headers.is_empty() || headers.iter().all(|h| h.is_empty()) {
        return Err(Error::EmptyInput);
    }
    let (date_col, value_col) = match format {
        SeriesFormat::Long => {
            let find = |n: &str| {
                headers
                    .iter()
                    .position(|h| h == n)
                    .ok_or_else(|| Error::MissingColumn(n.to_string()))
            };
            (find("timestamp")?, find("quantity")?)
        }
        SeriesFormat::Wide => {
            let col = headers
                .iter()
                .position(|h| h.parse::<AtcCode>().ok() == Some(atc))
                .ok_or_else(|| Error::MissingColumn(atc.to_string()))?;
            (0, col)
        }
    };
    let mut points = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let d = parse_date(&row[date_col])
            .ok_or_else(|| Error::UnparseableStream(format!("line {line}: bad date `{}`", &row[date_col])))?;
        let q: f64 = row[value_col]
            .parse()
            .map_err(|_| Error::UnparseableStream(format!("line {line}: bad quantity `{}`", &row[value_col])))?;
        points.push((d, q));
    }
    CategorySeries::from_points(atc, frequency, points)
}
