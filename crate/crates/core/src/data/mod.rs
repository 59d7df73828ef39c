//! Sales data pipeline: transaction ingestion, ATC categorization,
//! per-period aggregation and train/validation/test splitting.

mod ingest;
mod series;
mod split;

pub use ingest::{
    ingest_transactions, map_to_categories, parse_date, AnnotatedRecord, AtcCode, AtcMapping, Categorized, ColumnMap,
    Ingested, Reject, TransactionRecord,
};
pub use series::{aggregate, read_series_csv, CategorySeries, Frequency, SeriesFormat};
pub use split::{prepare_split, PreparedSplit, SampleCount, Scaling, Segment, SplitConfig, SplitMode, MIN_SERIES_LEN};
