//! NORAD two-line element sets.

use chrono::{Datelike, TimeDelta, TimeZone, Timelike, Utc};
use thiserror::Error;

use super::elements::{ElementsError, OrbitalElements};
use crate::time::SimTime;

const LINE_LENGTH: usize = 69;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TleErrorKind {
    #[error("expected {LINE_LENGTH} characters, found {0}")]
    Length(usize),
    #[error("line must start with '{0}'")]
    LineNumber(char),
    #[error("checksum mismatch: computed {computed}, stored {stored}")]
    Checksum { computed: u32, stored: char },
    #[error("unparseable {field} field {text:?}")]
    Field { field: &'static str, text: String },
    #[error("catalog numbers differ between lines")]
    CatalogMismatch,
    #[error("invalid elements: {0}")]
    Elements(#[from] ElementsError),
    #[error("record truncated: missing line")]
    Truncated,
}

/// A TLE parse failure located at a 1-based line and column of the record.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("TLE line {line}, column {column}: {kind}")]
pub struct TleError {
    pub line: usize,
    pub column: usize,
    pub kind: TleErrorKind,
}

/// One parsed TLE record.
#[derive(Debug, Clone, PartialEq)]
pub struct TleRecord {
    pub name: Option<String>,
    pub catalog_number: String,
    pub elements: OrbitalElements,
}

fn checksum(line: &str) -> u32 {
    line.bytes()
        .take(LINE_LENGTH - 1)
        .map(|b| match b {
            b'0'..=b'9' => u32::from(b - b'0'),
            b'-' => 1,
            _ => 0,
        })
        .sum::<u32>()
        % 10
}

struct Line<'a> {
    text: &'a str,
    number: usize,
}

impl<'a> Line<'a> {
    fn validate(text: &'a str, number: usize, marker: char) -> Result<Self, TleError> {
        let text = text.trim_end();
        let err = |column, kind| TleError { line: number, column, kind };
        if !text.is_ascii() || text.len() != LINE_LENGTH {
            return Err(err(text.chars().count().min(LINE_LENGTH) + 1, TleErrorKind::Length(text.chars().count())));
        }
        if !text.starts_with(marker) {
            return Err(err(1, TleErrorKind::LineNumber(marker)));
        }
        let stored = text.as_bytes()[LINE_LENGTH - 1] as char;
        let computed = checksum(text);
        if stored.to_digit(10) != Some(computed) {
            return Err(err(LINE_LENGTH, TleErrorKind::Checksum { computed, stored }));
        }
        Ok(Self { text, number })
    }

    /// Columns are 1-based and inclusive, as in the format definition.
    fn field(&self, first: usize, last: usize) -> &'a str {
        &self.text[first - 1..last]
    }

    fn parse_f64(&self, first: usize, last: usize, field: &'static str) -> Result<f64, TleError> {
        let raw = self.field(first, last);
        raw.trim().parse::<f64>().map_err(|_| self.error(first, field, raw))
    }

    fn error(&self, column: usize, field: &'static str, raw: &str) -> TleError {
        TleError { line: self.number, column, kind: TleErrorKind::Field { field, text: raw.to_string() } }
    }
}

fn parse_epoch(line: &Line<'_>) -> Result<SimTime, TleError> {
    let raw_year = line.field(19, 20);
    let year: i32 = raw_year.trim().parse().map_err(|_| line.error(19, "epoch year", raw_year))?;
    let year = if year < 57 { 2000 + year } else { 1900 + year };
    let day = line.parse_f64(21, 32, "epoch day")?;
    if !(1.0..367.0).contains(&day) {
        return Err(line.error(21, "epoch day", line.field(21, 32)));
    }
    let start = Utc.with_ymd_and_hms(year, 1, 1, 0, 0, 0).single().ok_or_else(|| line.error(19, "epoch year", raw_year))?;
    Ok(start + TimeDelta::milliseconds(((day - 1.0) * 86_400_000.0).round() as i64))
}

/// Parses one record from its two element lines and optional name line.
pub fn parse_tle(name: Option<&str>, line1: &str, line2: &str) -> Result<TleRecord, TleError> {
    let l1 = Line::validate(line1, 1, '1')?;
    let l2 = Line::validate(line2, 2, '2')?;

    let catalog = l1.field(3, 7).trim();
    if l2.field(3, 7).trim() != catalog {
        return Err(TleError { line: 2, column: 3, kind: TleErrorKind::CatalogMismatch });
    }
    let epoch = parse_epoch(&l1)?;

    let inclination = l2.parse_f64(9, 16, "inclination")?;
    let raan = l2.parse_f64(18, 25, "right ascension")?;
    let raw_ecc = l2.field(27, 33);
    if !raw_ecc.trim().bytes().all(|b| b.is_ascii_digit()) || raw_ecc.trim().is_empty() {
        return Err(l2.error(27, "eccentricity", raw_ecc));
    }
    let eccentricity: f64 = format!("0.{}", raw_ecc.trim()).parse().map_err(|_| l2.error(27, "eccentricity", raw_ecc))?;
    let arg_perigee = l2.parse_f64(35, 42, "argument of perigee")?;
    let mean_anomaly = l2.parse_f64(44, 51, "mean anomaly")?;
    let mean_motion = l2.parse_f64(53, 63, "mean motion")?;

    let elements = OrbitalElements::from_mean_motion(
        mean_motion,
        eccentricity,
        inclination.to_radians(),
        raan.to_radians(),
        arg_perigee.to_radians(),
        mean_anomaly.to_radians(),
        epoch,
    )
    .map_err(|e| {
        let column = match e {
            ElementsError::Inclination(_) => 9,
            ElementsError::Eccentricity(_) => 27,
            _ => 53,
        };
        TleError { line: 2, column, kind: TleErrorKind::Elements(e) }
    })?;

    Ok(TleRecord {
        name: name.map(|n| n.trim().trim_start_matches("0 ").to_string()).filter(|n| !n.is_empty()),
        catalog_number: catalog.to_string(),
        elements,
    })
}

/// Parses a newline-delimited file of 2- or 3-line records. Line numbers in
/// errors refer to the position within the file.
pub fn parse_tle_file(text: &str) -> Result<Vec<TleRecord>, TleError> {
    let lines: Vec<(usize, &str)> =
        text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()).map(|(i, l)| (i + 1, l)).collect();
    let mut records = Vec::new();
    let mut i = 0;
    while i < lines.len() {
        let (name, first) = if lines[i].1.starts_with("1 ") { (None, i) } else { (Some(lines[i].1), i + 1) };
        let Some(&(n1, line1)) = lines.get(first) else {
            return Err(TleError { line: lines[i].0 + 1, column: 1, kind: TleErrorKind::Truncated });
        };
        let Some(&(n2, line2)) = lines.get(first + 1) else {
            return Err(TleError { line: n1 + 1, column: 1, kind: TleErrorKind::Truncated });
        };
        let record = parse_tle(name, line1, line2).map_err(|e| TleError { line: if e.line == 1 { n1 } else { n2 }, ..e })?;
        records.push(record);
        i = first + 2;
    }
    Ok(records)
}

fn with_checksum(mut body: String) -> String {
    debug_assert_eq!(body.len(), LINE_LENGTH - 1, "{body:?}");
    let sum = checksum(&format!("{body}0"));
    body.push(char::from_digit(sum, 10).unwrap_or('0'));
    body
}

/// Renders elements as a 3-line TLE record (name, line 1, line 2). Drag terms
/// are written as zero; the catalog number must fit in five digits.
pub fn format_tle(name: &str, catalog_number: u32, elements: &OrbitalElements) -> String {
    let catalog = catalog_number % 100_000;
    let epoch = elements.epoch();
    let day = epoch.ordinal() as f64
        + (epoch.num_seconds_from_midnight() as f64 + f64::from(epoch.timestamp_subsec_millis()) / 1000.0) / 86_400.0;
    let line1 = with_checksum(format!(
        "1 {catalog:05}U {:<8} {:02}{day:012.8}  .00000000  00000-0  00000-0 0  999",
        format!("{:02}001A", epoch.year() % 100),
        epoch.year() % 100,
    ));
    let ecc = format!("{:.7}", elements.eccentricity());
    let line2 = with_checksum(format!(
        "2 {catalog:05} {:8.4} {:8.4} {} {:8.4} {:8.4} {:11.8}{:5}",
        elements.inclination_rad().to_degrees(),
        elements.raan_rad().to_degrees(),
        &ecc[2..9],
        elements.arg_perigee_rad().to_degrees(),
        elements.mean_anomaly_at_epoch_rad().to_degrees(),
        elements.mean_motion_revs_per_day(),
        0,
    ));
    format!("{name}\n{line1}\n{line2}\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    const ISS_1: &str = "1 25544U 98067A   08264.51782528 -.00002182  00000-0 -11606-4 0  2927";
    const ISS_2: &str = "2 25544  51.6416 247.4627 0006703 130.5360 325.0288 15.72125391563537";

    #[test]
    fn parses_reference_record() {
        let rec = parse_tle(Some("ISS (ZARYA)"), ISS_1, ISS_2).unwrap();
        assert_eq!(rec.name.as_deref(), Some("ISS (ZARYA)"));
        assert_eq!(rec.catalog_number, "25544");
        let el = rec.elements;
        assert!((el.eccentricity() - 0.0006703).abs() < 1e-15);
        assert!((el.inclination_rad().to_degrees() - 51.6416).abs() < 1e-9);
        assert!((el.mean_motion_revs_per_day() - 15.72125391).abs() < 1e-8);
        // 2008, day 264.51782528 -> 2008-09-20 12:25:40.104 UTC
        let expected = Utc.with_ymd_and_hms(2008, 9, 20, 12, 25, 40).unwrap() + TimeDelta::milliseconds(104);
        assert_eq!(el.epoch(), expected);
    }

    #[test]
    fn eccentricity_has_implied_decimal_point() {
        let line2 = with_checksum("2 25544  51.6416 247.4627 0001234 130.5360 325.0288 15.7212539156353".to_string());
        let rec = parse_tle(None, ISS_1, &line2).unwrap();
        assert_eq!(rec.elements.eccentricity(), 0.0001234);
    }

    #[test]
    fn corrupted_checksum_is_rejected() {
        let bad = format!("{}8", &ISS_1[..68]);
        let err = parse_tle(None, &bad, ISS_2).unwrap_err();
        assert_eq!((err.line, err.column), (1, 69));
        assert!(matches!(err.kind, TleErrorKind::Checksum { computed: 7, stored: '8' }));
    }

    #[test]
    fn short_line_is_rejected() {
        let err = parse_tle(None, &ISS_1[..60], ISS_2).unwrap_err();
        assert_eq!(err.line, 1);
        assert!(matches!(err.kind, TleErrorKind::Length(60)));
    }

    #[test]
    fn bad_numeric_field_reports_column() {
        let line2 = with_checksum("2 25544  51.6416 247.4627 0006703 130.5360 3x5.0288 15.7212539156353".to_string());
        let err = parse_tle(None, ISS_1, &line2).unwrap_err();
        assert_eq!((err.line, err.column), (2, 44));
        assert!(matches!(err.kind, TleErrorKind::Field { field: "mean anomaly", .. }));
    }

    #[test]
    fn two_digit_years_follow_norad_convention() {
        let l1 = with_checksum("1 25544U 98067A   56001.00000000 -.00002182  00000-0 -11606-4 0  292".to_string());
        assert_eq!(parse_tle(None, &l1, ISS_2).unwrap().elements.epoch().year(), 2056);
        let l1 = with_checksum("1 25544U 98067A   57001.00000000 -.00002182  00000-0 -11606-4 0  292".to_string());
        assert_eq!(parse_tle(None, &l1, ISS_2).unwrap().elements.epoch().year(), 1957);
    }

    #[test]
    fn file_with_mixed_record_shapes() {
        let text = format!("ISS (ZARYA)\n{ISS_1}\n{ISS_2}\n\n{ISS_1}\n{ISS_2}\n");
        let recs = parse_tle_file(&text).unwrap();
        assert_eq!(recs.len(), 2);
        assert!(recs[1].name.is_none());
        let truncated = format!("ISS\n{ISS_1}\n");
        assert!(matches!(parse_tle_file(&truncated).unwrap_err().kind, TleErrorKind::Truncated));
    }

    #[test]
    fn file_errors_use_file_line_numbers() {
        let bad = format!("{}8", &ISS_1[..68]);
        let text = format!("A\n{ISS_1}\n{ISS_2}\nB\n{bad}\n{ISS_2}\n");
        let err = parse_tle_file(&text).unwrap_err();
        assert_eq!(err.line, 5);
    }

    #[test]
    fn format_round_trips() {
        let rec = parse_tle(None, ISS_1, ISS_2).unwrap();
        let text = format_tle("ISS", 25544, &rec.elements);
        let back = parse_tle_file(&text).unwrap().remove(0);
        let (a, b) = (rec.elements, back.elements);
        assert!((a.semi_major_axis_km() - b.semi_major_axis_km()).abs() < 1e-5);
        assert!((a.raan_rad() - b.raan_rad()).abs() < 1e-6);
        assert!((a.eccentricity() - b.eccentricity()).abs() < 1e-12);
        assert!((a.epoch() - b.epoch()).num_milliseconds().abs() <= 1);
    }
}
