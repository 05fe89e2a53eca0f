//! Wind-direction CSV ingestion and monthly splitting.
//!
//! Input schema: a header row then `station,timestamp,direction_deg`
//! records, timestamps ISO-8601 at hour resolution, directions in
//! degrees within `[0, 360)`. Rows that fail to parse are reported with
//! their line numbers; the run aborts when more than 5% of rows are bad.

use anyhow::{bail, Context};
use chrono::{Datelike, NaiveDateTime};
use cqa_core::{Angle, CircularSeries};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub struct WindRecord {
    pub station: String,
    pub timestamp: NaiveDateTime,
    /// Direction in degrees, `[0, 360)`; converted to radians when the
    /// monthly series are built.
    pub direction_deg: f64,
}

/// Accounting of an ingestion pass: rows in = accepted + rejected.
#[derive(Debug, Clone, Default, Serialize)]
pub struct IngestReport {
    pub total_rows: usize,
    pub accepted: usize,
    pub rejected: Vec<(u64, String)>,
    pub warnings: Vec<String>,
}

fn parse_timestamp(s: &str) -> Option<NaiveDateTime> {
    NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S")
        .or_else(|_| NaiveDateTime::parse_from_str(s, "%Y-%m-%d %H:%M:%S"))
        .ok()
}

/// Reads a wind CSV into per-station record sequences, sorted by time.
/// Duplicate timestamps keep the later row (with a warning); more than 5%
/// rejected rows aborts the ingestion.
pub fn ingest_wind_csv(
    path: &Path,
) -> anyhow::Result<(BTreeMap<String, Vec<WindRecord>>, IngestReport)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(path)
        .with_context(|| format!("cannot open {}", path.display()))?;

    let headers = reader.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);
    let (si, ti, di) = match (col("station"), col("timestamp"), col("direction_deg")) {
        (Some(s), Some(t), Some(d)) => (s, t, d),
        _ => bail!(
            "missing required columns; expected header with station, timestamp, direction_deg"
        ),
    };

    let mut report = IngestReport::default();
    let mut by_station: BTreeMap<String, Vec<WindRecord>> = BTreeMap::new();
    for (row_idx, record) in reader.records().enumerate() {
        let line = row_idx as u64 + 2; // header is line 1
        report.total_rows += 1;
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                report.rejected.push((line, format!("unreadable row: {e}")));
                continue;
            }
        };
        let field = |i: usize| record.get(i).map(str::trim);
        let (station, ts_raw, dir_raw) = match (field(si), field(ti), field(di)) {
            (Some(s), Some(t), Some(d)) if !s.is_empty() => (s, t, d),
            _ => {
                report.rejected.push((line, "missing fields".into()));
                continue;
            }
        };
        let timestamp = match parse_timestamp(ts_raw) {
            Some(t) => t,
            None => {
                report
                    .rejected
                    .push((line, format!("unparseable timestamp {ts_raw:?}")));
                continue;
            }
        };
        let direction: f64 = match dir_raw.parse() {
            Ok(d) => d,
            Err(_) => {
                report
                    .rejected
                    .push((line, format!("unparseable direction {dir_raw:?}")));
                continue;
            }
        };
        if !direction.is_finite() || !(0.0..360.0).contains(&direction) {
            report
                .rejected
                .push((line, format!("direction {direction} outside [0, 360)")));
            continue;
        }
        report.accepted += 1;
        by_station.entry(station.to_string()).or_default().push(WindRecord {
            station: station.to_string(),
            timestamp,
            direction_deg: direction,
        });
    }

    if report.total_rows > 0 && report.rejected.len() * 20 > report.total_rows {
        bail!(
            "{} of {} rows invalid (> 5%); first errors: {:?}",
            report.rejected.len(),
            report.total_rows,
            &report.rejected[..report.rejected.len().min(5)]
        );
    }

    for (station, records) in &mut by_station {
        records.sort_by_key(|r| r.timestamp);
        let before = records.len();
        // later row wins on duplicate timestamps; sort is stable, so the
        // last record of a run of equal timestamps is the later input row
        let mut deduped: Vec<WindRecord> = Vec::with_capacity(before);
        for r in records.drain(..) {
            if deduped.last().map(|p: &WindRecord| p.timestamp) == Some(r.timestamp) {
                *deduped.last_mut().unwrap() = r;
            } else {
                deduped.push(r);
            }
        }
        let dropped = before - deduped.len();
        if dropped > 0 {
            report.warnings.push(format!(
                "station {station}: {dropped} duplicate timestamps, kept the later rows"
            ));
            report.accepted -= dropped;
            // dropped duplicates count as rejected rows for the balance
            report
                .rejected
                .push((0, format!("station {station}: {dropped} duplicate rows superseded")));
        }
        *records = deduped;
    }

    Ok((by_station, report))
}

/// Which calendar months enter the monthly split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MonthFilter {
    /// All twelve months.
    #[default]
    All,
    /// Winter (Dec-Mar) and summer (Jun-Sep) months only.
    WinterSummer,
}

impl MonthFilter {
    fn keeps(self, month: u32) -> bool {
        match self {
            MonthFilter::All => true,
            MonthFilter::WinterSummer => matches!(month, 12 | 1 | 2 | 3 | 6 | 7 | 8 | 9),
        }
    }
}

/// Month names for the "MMM YY" labels.
const MONTH_NAMES: [&str; 12] = [
    "Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec",
];

/// Splits one station's records into one circular series per calendar
/// month present, labels formatted "MMM YY". Months with fewer than two
/// observations are dropped with a warning.
pub fn monthly_split(
    records: &[WindRecord],
    filter: MonthFilter,
) -> anyhow::Result<(Vec<(String, CircularSeries)>, Vec<String>)> {
    if records.is_empty() {
        bail!("no records to split");
    }
    let mut months: BTreeMap<(i32, u32), Vec<f64>> = BTreeMap::new();
    for r in records {
        let key = (r.timestamp.year(), r.timestamp.month());
        if filter.keeps(key.1) {
            months.entry(key).or_default().push(r.direction_deg);
        }
    }
    let mut out = Vec::new();
    let mut warnings = Vec::new();
    for ((year, month), dirs) in months {
        let label = format!("{} {:02}", MONTH_NAMES[(month - 1) as usize], year % 100);
        if dirs.len() < 2 {
            warnings.push(format!("{label}: fewer than 2 observations, dropped"));
            continue;
        }
        let angles = dirs
            .iter()
            .map(|&d| Angle::from_degrees(d))
            .collect::<cqa_core::Result<Vec<_>>>()?;
        out.push((label, CircularSeries::new(angles)?));
    }
    Ok((out, warnings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_csv(rows: &[&str]) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "station,timestamp,direction_deg").unwrap();
        for r in rows {
            writeln!(f, "{r}").unwrap();
        }
        f
    }

    #[test]
    fn well_formed_rows_convert_units() {
        let f = write_csv(&[
            "abha,2010-01-01T00:00:00,0.0",
            "abha,2010-01-01T01:00:00,90.0",
            "abha,2010-01-01T02:00:00,359.9",
        ]);
        let (stations, report) = ingest_wind_csv(f.path()).unwrap();
        assert_eq!(report.accepted, 3);
        assert!(report.rejected.is_empty());
        let recs = &stations["abha"];
        assert_eq!(recs.len(), 3);
        let (series, _) = monthly_split(recs, MonthFilter::All).unwrap();
        assert_eq!(series.len(), 1);
        let rads: Vec<f64> = series[0].1.radians().collect();
        assert!((rads[1] - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn out_of_range_direction_is_rejected() {
        let f = write_csv(&[
            "abha,2010-01-01T00:00:00,360.0",
            "abha,2010-01-01T01:00:00,10.0",
            "abha,2010-01-01T02:00:00,20.0",
            "abha,2010-01-01T03:00:00,30.0",
            "abha,2010-01-01T04:00:00,40.0",
            "abha,2010-01-01T05:00:00,50.0",
            "abha,2010-01-01T06:00:00,60.0",
            "abha,2010-01-01T07:00:00,70.0",
            "abha,2010-01-01T08:00:00,80.0",
            "abha,2010-01-01T09:00:00,90.0",
            "abha,2010-01-01T10:00:00,100.0",
            "abha,2010-01-01T11:00:00,110.0",
            "abha,2010-01-01T12:00:00,120.0",
            "abha,2010-01-01T13:00:00,130.0",
            "abha,2010-01-01T14:00:00,140.0",
            "abha,2010-01-01T15:00:00,150.0",
            "abha,2010-01-01T16:00:00,160.0",
            "abha,2010-01-01T17:00:00,170.0",
            "abha,2010-01-01T18:00:00,180.0",
            "abha,2010-01-01T19:00:00,190.0",
        ]);
        let (stations, report) = ingest_wind_csv(f.path()).unwrap();
        assert_eq!(report.rejected.len(), 1);
        assert_eq!(report.rejected[0].0, 2);
        assert_eq!(stations["abha"].len(), 19);
        // balance: rows in = accepted + rejected
        assert_eq!(report.total_rows, report.accepted + report.rejected.len());
    }

    #[test]
    fn excess_bad_rows_abort() {
        let f = write_csv(&["abha,not-a-time,10.0", "abha,2010-01-01T00:00:00,10.0"]);
        assert!(ingest_wind_csv(f.path()).is_err());
    }

    #[test]
    fn duplicate_timestamps_keep_later_row() {
        let f = write_csv(&[
            "abha,2010-01-01T00:00:00,10.0",
            "abha,2010-01-01T01:00:00,20.0",
            "abha,2010-01-01T01:00:00,30.0",
            "abha,2010-01-01T02:00:00,40.0",
        ]);
        let (stations, report) = ingest_wind_csv(f.path()).unwrap();
        let recs = &stations["abha"];
        assert_eq!(recs.len(), 3);
        assert_eq!(recs[1].direction_deg, 30.0);
        assert!(!report.warnings.is_empty());
        assert_eq!(report.total_rows, report.accepted + report.rejected.len());
    }

    #[test]
    fn missing_columns_fail_fast() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "id,when,where").unwrap();
        writeln!(f, "1,2,3").unwrap();
        assert!(ingest_wind_csv(f.path()).is_err());
    }

    #[test]
    fn winter_summer_filter_and_labels() {
        let mut rows = Vec::new();
        for year in 2010..2018 {
            for month in 1..=12u32 {
                for hour in 0..3 {
                    rows.push(format!(
                        "abha,{year}-{month:02}-01T{hour:02}:00:00,{}.0",
                        (month * 7 + hour) % 360
                    ));
                }
            }
        }
        let refs: Vec<&str> = rows.iter().map(String::as_str).collect();
        let f = write_csv(&refs);
        let (stations, _) = ingest_wind_csv(f.path()).unwrap();
        let recs = &stations["abha"];
        let (filtered, _) = monthly_split(recs, MonthFilter::WinterSummer).unwrap();
        assert_eq!(filtered.len(), 64); // 8 years x 8 filtered months
        let (all, _) = monthly_split(recs, MonthFilter::All).unwrap();
        assert_eq!(all.len(), 96); // 8 years x 12 months
        assert_eq!(filtered[0].0, "Jan 10");
    }

    #[test]
    fn single_month_input_gives_single_series() {
        let f = write_csv(&[
            "abha,2012-06-01T00:00:00,10.0",
            "abha,2012-06-01T01:00:00,15.0",
            "abha,2012-06-02T00:00:00,20.0",
        ]);
        let (stations, _) = ingest_wind_csv(f.path()).unwrap();
        let (series, warnings) = monthly_split(&stations["abha"], MonthFilter::All).unwrap();
        assert_eq!(series.len(), 1);
        assert_eq!(series[0].0, "Jun 12");
        assert!(warnings.is_empty());
    }

    #[test]
    fn sparse_month_is_dropped_with_warning() {
        let f = write_csv(&[
            "abha,2012-06-01T00:00:00,10.0",
            "abha,2012-06-01T01:00:00,15.0",
            "abha,2012-07-01T00:00:00,20.0",
        ]);
        let (stations, _) = ingest_wind_csv(f.path()).unwrap();
        let (series, warnings) = monthly_split(&stations["abha"], MonthFilter::All).unwrap();
        assert_eq!(series.len(), 1);
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("Jul 12"));
    }
}
