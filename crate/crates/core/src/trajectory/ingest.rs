//! AIS-style CSV ingestion.
//!
//! Header: `vessel_id,timestamp,lat,lon,easting,northing,sog,cog`. Either the
//! projected pair or the geodetic pair must be filled on each row; geodetic
//! rows are projected with the configured UTM zone.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use chrono::{DateTime, NaiveDateTime};
use serde::{Deserialize, Serialize};

use super::{TrackPoint, UtmZone};
use crate::error::{Error, Result};

pub const AIS_HEADER: [&str; 8] = ["vessel_id", "timestamp", "lat", "lon", "easting", "northing", "sog", "cog"];

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IngestOptions {
    /// Zone used for rows that carry only latitude/longitude.
    pub projection: Option<UtmZone>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reject {
    pub line: u64,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IngestReport {
    pub rows_read: usize,
    pub rows_accepted: usize,
    pub duplicates_collapsed: usize,
    pub rejects: Vec<Reject>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IngestOutput {
    /// Points per vessel, time-sorted and unique per timestamp.
    pub tracks: BTreeMap<String, Vec<TrackPoint>>,
    pub report: IngestReport,
}

impl IngestOutput {
    pub fn point_count(&self) -> usize {
        self.tracks.values().map(Vec::len).sum()
    }
}

struct Columns {
    vessel_id: usize,
    timestamp: usize,
    lat: Option<usize>,
    lon: Option<usize>,
    easting: Option<usize>,
    northing: Option<usize>,
    sog: Option<usize>,
    cog: Option<usize>,
}

impl Columns {
    fn from_header(header: &csv::StringRecord) -> Result<Self> {
        let find = |name: &str| header.iter().position(|h| h.trim().eq_ignore_ascii_case(name));
        let required = |name: &str| {
            find(name).ok_or_else(|| Error::Parse { line: 1, message: format!("missing column `{name}`") })
        };
        let cols = Self {
            vessel_id: required("vessel_id")?,
            timestamp: required("timestamp")?,
            lat: find("lat"),
            lon: find("lon"),
            easting: find("easting"),
            northing: find("northing"),
            sog: find("sog"),
            cog: find("cog"),
        };
        let has_projected = cols.easting.is_some() && cols.northing.is_some();
        let has_geodetic = cols.lat.is_some() && cols.lon.is_some();
        if !has_projected && !has_geodetic {
            return Err(Error::Parse { line: 1, message: "header needs easting/northing or lat/lon columns".into() });
        }
        Ok(cols)
    }
}

fn field(record: &csv::StringRecord, idx: Option<usize>) -> Option<&str> {
    idx.and_then(|i| record.get(i)).map(str::trim).filter(|s| !s.is_empty())
}

fn parse_f64(s: &str, name: &str) -> std::result::Result<f64, String> {
    s.parse::<f64>().map_err(|_| format!("invalid {name} `{s}`"))
}

/// Parses integer epoch seconds or an ISO-8601 UTC timestamp.
pub fn parse_timestamp(s: &str) -> std::result::Result<i64, String> {
    if let Ok(v) = s.parse::<i64>() {
        return Ok(v);
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Ok(dt.timestamp());
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(s, fmt) {
            return Ok(dt.and_utc().timestamp());
        }
    }
    Err(format!("invalid timestamp `{s}`"))
}

fn parse_row(
    record: &csv::StringRecord,
    cols: &Columns,
    opts: &IngestOptions,
) -> std::result::Result<TrackPoint, String> {
    let vessel_id = field(record, Some(cols.vessel_id)).ok_or("missing vessel_id")?.to_string();
    let timestamp = parse_timestamp(field(record, Some(cols.timestamp)).ok_or("missing timestamp")?)?;

    let (easting, northing) = match (field(record, cols.easting), field(record, cols.northing)) {
        (Some(e), Some(n)) => (parse_f64(e, "easting")?, parse_f64(n, "northing")?),
        _ => match (field(record, cols.lat), field(record, cols.lon)) {
            (Some(lat), Some(lon)) => {
                let lat = parse_f64(lat, "lat")?;
                let lon = parse_f64(lon, "lon")?;
                if !lat.is_finite() || !lon.is_finite() {
                    return Err("non-finite coordinate".into());
                }
                if !(-90.0..=90.0).contains(&lat) || !(-180.0..=180.0).contains(&lon) {
                    return Err(format!("lat/lon out of range ({lat}, {lon})"));
                }
                let zone = opts.projection.ok_or("lat/lon row but no projection zone configured")?;
                zone.project(lat, lon)
            }
            _ => return Err("row has neither easting/northing nor lat/lon".into()),
        },
    };
    if !easting.is_finite() || !northing.is_finite() {
        return Err("non-finite coordinate".into());
    }

    let speed_over_ground =
        field(record, cols.sog).map(|s| parse_f64(s, "sog")).transpose()?.filter(|v| v.is_finite() && *v >= 0.0);
    let course_over_ground =
        field(record, cols.cog).map(|s| parse_f64(s, "cog")).transpose()?.filter(|v| (0.0..360.0).contains(v));

    Ok(TrackPoint { vessel_id, timestamp, easting, northing, speed_over_ground, course_over_ground })
}

/// Reads AIS rows, grouping them per vessel.
///
/// Rows that fail to parse, or carry non-finite coordinates, are skipped and
/// listed in the report with their line number. A later row with the same
/// vessel and timestamp replaces an earlier one. A missing or incomplete
/// header and an input without any data rows are errors.
pub fn ingest_records<R: Read>(source: R, opts: &IngestOptions) -> Result<IngestOutput> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).trim(csv::Trim::All).from_reader(source);
    let header = match reader.headers() {
        Ok(h) if h.iter().any(|f| !f.is_empty()) => h.clone(),
        Ok(_) => return Err(Error::NoRecords),
        Err(e) => return Err(e.into()),
    };
    let cols = Columns::from_header(&header)?;

    let mut report = IngestReport::default();
    let mut grouped: BTreeMap<String, BTreeMap<i64, TrackPoint>> = BTreeMap::new();
    let mut record = csv::StringRecord::new();
    loop {
        let line = reader.position().line();
        match reader.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => {
                report.rows_read += 1;
                report.rejects.push(Reject { line, reason: e.to_string() });
                continue;
            }
        }
        let line = record.position().map_or(line, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        report.rows_read += 1;
        if record.len() != header.len() {
            report
                .rejects
                .push(Reject { line, reason: format!("expected {} fields, found {}", header.len(), record.len()) });
            continue;
        }
        match parse_row(&record, &cols, opts) {
            Ok(p) => {
                report.rows_accepted += 1;
                let slot = grouped.entry(p.vessel_id.clone()).or_default();
                if slot.insert(p.timestamp, p).is_some() {
                    report.duplicates_collapsed += 1;
                }
            }
            Err(reason) => report.rejects.push(Reject { line, reason }),
        }
    }
    if report.rows_read == 0 {
        return Err(Error::NoRecords);
    }

    let tracks = grouped.into_iter().map(|(id, pts)| (id, pts.into_values().collect())).collect();
    Ok(IngestOutput { tracks, report })
}

/// Writes points in the AIS CSV schema using projected coordinates and epoch
/// seconds.
pub fn write_records<'a, W, I>(sink: W, points: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a TrackPoint>,
{
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(AIS_HEADER)?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for p in points {
        w.write_record([
            p.vessel_id.clone(),
            p.timestamp.to_string(),
            String::new(),
            String::new(),
            p.easting.to_string(),
            p.northing.to_string(),
            opt(p.speed_over_ground),
            opt(p.course_over_ground),
        ])?;
    }
    w.flush()?;
    Ok(())
}
