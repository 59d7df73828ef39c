//! Transaction CSV ingestion and brand → ATC category mapping.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::Read;
use std::str::FromStr;

use chrono::{NaiveDate, NaiveTime};

use crate::error::{Error, Result};

/// The eight ATC categories the sales data is grouped into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AtcCode {
    M01AB,
    M01AE,
    N02BA,
    N02BE,
    N05B,
    N05C,
    R03,
    R06,
}

impl AtcCode {
    pub const ALL: [AtcCode; 8] = [
        Self::M01AB,
        Self::M01AE,
        Self::N02BA,
        Self::N02BE,
        Self::N05B,
        Self::N05C,
        Self::R03,
        Self::R06,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::M01AB => "M01AB",
            Self::M01AE => "M01AE",
            Self::N02BA => "N02BA",
            Self::N02BE => "N02BE/B",
            Self::N05B => "N05B",
            Self::N05C => "N05C",
            Self::R03 => "R03",
            Self::R06 => "R06",
        }
    }

    /// Code with the `/` replaced, safe for use in a file name.
    pub fn file_stem(self) -> String {
        self.as_str().replace('/', "_")
    }
}

impl fmt::Display for AtcCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AtcCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.to_ascii_uppercase().as_str() {
            "M01AB" => Ok(Self::M01AB),
            "M01AE" => Ok(Self::M01AE),
            "N02BA" => Ok(Self::N02BA),
            "N02BE/B" | "N02BE" | "N02BE_B" => Ok(Self::N02BE),
            "N05B" => Ok(Self::N05B),
            "N05C" => Ok(Self::N05C),
            "R03" => Ok(Self::R03),
            "R06" => Ok(Self::R06),
            _ => Err(Error::InvalidArgument(format!("unknown ATC code `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransactionRecord {
    pub date: NaiveDate,
    pub time: Option<NaiveTime>,
    pub brand: String,
    pub quantity: f64,
}

/// Header names of the transaction columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnMap {
    pub date: String,
    pub time: Option<String>,
    pub brand: String,
    pub quantity: String,
}

impl Default for ColumnMap {
    fn default() -> Self {
        Self {
            date: "date".into(),
            time: Some("time".into()),
            brand: "brand".into(),
            quantity: "quantity".into(),
        }
    }
}

/// A data row that could not be parsed. `line` is the 1-based line number
/// in the source, header included.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reject {
    pub line: u64,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Ingested {
    pub records: Vec<TransactionRecord>,
    pub rejects: Vec<Reject>,
}

/// Parses a transactions CSV. Malformed rows are collected in `rejects`.
///
/// A missing time column in the header is tolerated; the other three are
/// required.
pub fn ingest_transactions<R: Read>(source: R, columns: &ColumnMap) -> Result<Ingested> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source);
    let headers = rdr
        .headers()
        .map_err(|e| Error::UnparseableStream(e.to_string()))?
        .clone();
    if headers.is_empty() || headers.iter().all(|h| h.is_empty()) {
        return Err(Error::EmptyInput);
    }
    let find = |name: &str| headers.iter().position(|h| h == name);
    let need = |name: &str| find(name).ok_or_else(|| Error::MissingColumn(name.to_string()));
    let date_col = need(&columns.date)?;
    let brand_col = need(&columns.brand)?;
    let qty_col = need(&columns.quantity)?;
    let time_col = columns.time.as_deref().and_then(find);

    let mut out = Ingested::default();
    for row in rdr.records() {
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                if e.is_io_error() {
                    return Err(Error::UnparseableStream(e.to_string()));
                }
                out.rejects.push(Reject {
                    line,
                    reason: e.to_string(),
                });
                continue;
            }
        };
        let line = row.position().map_or(0, |p| p.line());
        match parse_row(&row, date_col, time_col, brand_col, qty_col) {
            Ok(r) => out.records.push(r),
            Err(reason) => out.rejects.push(Reject { line, reason }),
        }
    }
    Ok(out)
}

fn parse_row(
    row: &csv::StringRecord,
    date_col: usize,
    time_col: Option<usize>,
    brand_col: usize,
    qty_col: usize,
) -> std::result::Result<TransactionRecord, String> {
    let field = |i: usize, name: &str| row.get(i).ok_or_else(|| format!("missing {name} field"));
    let date_raw = field(date_col, "date")?;
    let date = parse_date(date_raw).ok_or_else(|| format!("unparseable date `{date_raw}`"))?;
    let time = match time_col.and_then(|i| row.get(i)) {
        None | Some("") => None,
        Some(t) => Some(
            NaiveTime::parse_from_str(t, "%H:%M:%S")
                .or_else(|_| NaiveTime::parse_from_str(t, "%H:%M"))
                .map_err(|_| format!("unparseable time `{t}`"))?,
        ),
    };
    let brand = field(brand_col, "brand")?;
    if brand.is_empty() {
        return Err("empty brand".into());
    }
    let qty_raw = field(qty_col, "quantity")?;
    let quantity: f64 = qty_raw
        .parse()
        .map_err(|_| format!("unparseable quantity `{qty_raw}`"))?;
    if !quantity.is_finite() || quantity < 0.0 {
        return Err(format!("quantity must be finite and non-negative (got `{qty_raw}`)"));
    }
    Ok(TransactionRecord {
        date,
        time,
        brand: brand.to_string(),
        quantity,
    })
}

/// ISO 8601 `YYYY-MM-DD`, with an optional time suffix; `M/D/YYYY` is also
/// accepted for the published wide sales files.
pub fn parse_date(s: &str) -> Option<NaiveDate> {
    let s = s.trim();
    let head = s.split(['T', ' ']).next().unwrap_or(s);
    NaiveDate::parse_from_str(head, "%Y-%m-%d")
        .or_else(|_| NaiveDate::parse_from_str(head, "%m/%d/%Y"))
        .ok()
}

/// Brand → ATC code lookup, loaded from a two-column `brand,atc_code` CSV.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AtcMapping {
    by_brand: HashMap<String, AtcCode>,
}

impl AtcMapping {
    pub fn from_pairs<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, AtcCode)>,
        S: Into<String>,
    {
        Self {
            by_brand: pairs.into_iter().map(|(b, c)| (b.into(), c)).collect(),
        }
    }

    pub fn from_csv<R: Read>(source: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(source);
        let headers = rdr.headers()?.clone();
        if headers.len() != 2 {
            return Err(Error::InvalidArgument(format!(
                "mapping CSV must have exactly two columns brand,atc_code (found {})",
                headers.len()
            )));
        }
        for (i, name) in ["brand", "atc_code"].iter().enumerate() {
            if &headers[i] != *name {
                return Err(Error::MissingColumn((*name).to_string()));
            }
        }
        let mut by_brand = HashMap::new();
        for row in rdr.records() {
            let row = row?;
            by_brand.insert(row[0].to_string(), row[1].parse()?);
        }
        Ok(Self { by_brand })
    }

    pub fn get(&self, brand: &str) -> Option<AtcCode> {
        self.by_brand.get(brand).copied()
    }

    pub fn len(&self) -> usize {
        self.by_brand.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_brand.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedRecord {
    pub record: TransactionRecord,
    pub atc: AtcCode,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Categorized {
    pub records: Vec<AnnotatedRecord>,
    /// Unmapped brand → number of records.
    pub unmapped: BTreeMap<String, usize>,
}

impl Categorized {
    pub fn unmapped_count(&self) -> usize {
        self.unmapped.values().sum()
    }
}

pub fn map_to_categories(records: Vec<TransactionRecord>, mapping: &AtcMapping) -> Categorized {
    let mut out = Categorized::default();
    for record in records {
        match mapping.get(&record.brand) {
            Some(atc) => out.records.push(AnnotatedRecord { record, atc }),
            None => *out.unmapped.entry(record.brand).or_default() += 1,
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_good_rows() {
        let src = "date,time,brand,quantity\n2015-01-05,10:30,Diclo,2\n2015-01-06,,Ibu,1.5\n";
        let got = ingest_transactions(src.as_bytes(), &ColumnMap::default()).unwrap();
        assert_eq!(got.records.len(), 2);
        assert!(got.rejects.is_empty());
        assert_eq!(got.records[0].time, NaiveTime::from_hms_opt(10, 30, 0));
        assert_eq!(got.records[1].quantity, 1.5);
    }

    #[test]
    fn bad_quantity_is_rejected_with_line() {
        let src = "date,brand,quantity\n2015-01-05,Diclo,2\n2015-01-06,Ibu,abc\n";
        let got = ingest_transactions(src.as_bytes(), &ColumnMap::default()).unwrap();
        assert_eq!(got.records.len(), 1);
        assert_eq!(got.rejects.len(), 1);
        assert_eq!(got.rejects[0].line, 3);
        assert!(got.rejects[0].reason.contains("quantity"));
    }

    #[test]
    fn missing_quantity_column() {
        let src = "date,brand\n2015-01-05,Diclo\n";
        assert!(matches!(
            ingest_transactions(src.as_bytes(), &ColumnMap::default()),
            Err(Error::MissingColumn(c)) if c == "quantity"
        ));
    }

    #[test]
    fn empty_stream() {
        assert!(matches!(
            ingest_transactions("".as_bytes(), &ColumnMap::default()),
            Err(Error::EmptyInput)
        ));
    }

    #[test]
    fn custom_columns_and_dates() {
        let cols = ColumnMap {
            date: "datum".into(),
            time: None,
            brand: "drug".into(),
            quantity: "qty".into(),
        };
        let src = "datum,drug,qty\n1/2/2014,X,1\n2014-01-03T08:00:00,X,-1\n";
        let got = ingest_transactions(src.as_bytes(), &cols).unwrap();
        assert_eq!(got.records[0].date, NaiveDate::from_ymd_opt(2014, 1, 2).unwrap());
        assert_eq!(got.rejects.len(), 1);
    }

    #[test]
    fn mapping_and_categorization() {
        let m = AtcMapping::from_csv("brand,atc_code\nDiclo,M01AB\nIbu,M01AE\nPara,N02BE/B\n".as_bytes()).unwrap();
        assert_eq!(m.len(), 3);
        let rec = |b: &str| TransactionRecord {
            date: NaiveDate::from_ymd_opt(2015, 1, 1).unwrap(),
            time: None,
            brand: b.into(),
            quantity: 1.0,
        };
        let c = map_to_categories(vec![rec("Diclo"), rec("Nope"), rec("Nope")], &m);
        assert_eq!(c.records.len(), 1);
        assert_eq!(c.records[0].atc, AtcCode::M01AB);
        assert_eq!(c.unmapped.get("Nope"), Some(&2));
        assert_eq!(c.unmapped_count(), 2);

        assert!(map_to_categories(vec![], &m).records.is_empty());
    }

    #[test]
    fn mapping_rejects_bad_layout() {
        assert!(AtcMapping::from_csv("brand,atc_code,extra\n".as_bytes()).is_err());
        assert!(AtcMapping::from_csv("brand,atc_code\nX,ZZZ\n".as_bytes()).is_err());
    }

    #[test]
    fn atc_round_trip() {
        for c in AtcCode::ALL {
            assert_eq!(c.as_str().parse::<AtcCode>().unwrap(), c);
            assert_eq!(c.file_stem().parse::<AtcCode>().unwrap(), c);
        }
    }
}
