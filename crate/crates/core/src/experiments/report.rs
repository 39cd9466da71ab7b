use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::stats::StatAccumulator;
use super::ExperimentConfig;

pub const SCHEMA_VERSION: &str = "ethf-report/1";

/// `|z|` above which a record is flagged.
pub const Z_FLAG_THRESHOLD: f64 = 5.0;

/// Relative floor applied to the standard error when forming `z`, so that
/// quantities that are constant up to rounding do not produce huge scores.
const RELATIVE_SE_FLOOR: f64 = 1e-12;
const ABSOLUTE_SE_FLOOR: f64 = 1e-300;

/// Analytic result a measured quantity is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PredictionSource {
    #[serde(rename = "E")]
    E,
    #[serde(rename = "purec")]
    Purec,
    #[serde(rename = "thermalc")]
    Thermalc,
    #[serde(rename = "n")]
    N,
    #[serde(rename = "nn")]
    Nn,
    #[serde(rename = "ent1")]
    Ent1,
    #[serde(rename = "entmany")]
    Entmany,
    #[serde(rename = "ranE")]
    RanE,
    #[serde(rename = "ranC")]
    RanC,
    #[serde(rename = "none")]
    None,
}

impl PredictionSource {
    pub fn tag(self) -> &'static str {
        match self {
            PredictionSource::E => "E",
            PredictionSource::Purec => "purec",
            PredictionSource::Thermalc => "thermalc",
            PredictionSource::N => "n",
            PredictionSource::Nn => "nn",
            PredictionSource::Ent1 => "ent1",
            PredictionSource::Entmany => "entmany",
            PredictionSource::RanE => "ranE",
            PredictionSource::RanC => "ranC",
            PredictionSource::None => "none",
        }
    }
}

impl fmt::Display for PredictionSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// One measured quantity (optionally at abscissa `x`, e.g. a subsystem size)
/// with its prediction.
///
/// `reference` carries an exact finite-size value where one is known in
/// closed form, for diagnostics; `z` is always computed against `predicted`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub quantity: String,
    pub x: Option<f64>,
    pub count: u64,
    pub mean: f64,
    pub variance: f64,
    pub stderr: f64,
    pub predicted: Option<f64>,
    pub source: PredictionSource,
    pub reference: Option<f64>,
    pub z: Option<f64>,
    pub flagged: bool,
    pub note: Option<String>,
}

impl Record {
    /// Record for the mean of per-realization samples.
    pub fn from_accumulator(quantity: &str, acc: &StatAccumulator) -> Self {
        Self::from_estimate(quantity, acc.count(), acc.mean(), acc.variance(), acc.stderr())
    }

    /// Record for an arbitrary estimate with its own standard error.
    pub fn from_estimate(quantity: &str, count: u64, mean: f64, variance: f64, stderr: f64) -> Self {
        Self {
            quantity: quantity.to_string(),
            x: None,
            count,
            mean,
            variance,
            stderr,
            predicted: None,
            source: PredictionSource::None,
            reference: None,
            z: None,
            flagged: false,
            note: None,
        }
    }

    pub fn at(mut self, x: f64) -> Self {
        self.x = Some(x);
        self
    }

    pub fn predict(mut self, value: f64, source: PredictionSource) -> Self {
        self.predicted = Some(value);
        self.source = source;
        let floor = RELATIVE_SE_FLOOR * self.mean.abs().max(value.abs()).max(ABSOLUTE_SE_FLOOR);
        let z = (self.mean - value) / self.stderr.max(floor);
        self.z = Some(z);
        self.flagged = !z.is_finite() || z.abs() > Z_FLAG_THRESHOLD;
        self
    }

    pub fn reference(mut self, value: f64) -> Self {
        self.reference = Some(value);
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub schema_version: String,
    pub generator: String,
    pub config: ExperimentConfig,
    pub seed: u64,
    pub wall_time_seconds: f64,
    pub realizations_used: u64,
    pub excluded_realizations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleReport {
    pub meta: ReportMeta,
    pub records: Vec<Record>,
}

impl EnsembleReport {
    pub fn record(&self, quantity: &str) -> Option<&Record> {
        self.records.iter().find(|r| r.quantity == quantity)
    }

    pub fn record_at(&self, quantity: &str, x: f64) -> Option<&Record> {
        self.records.iter().find(|r| r.quantity == quantity && r.x == Some(x))
    }

    pub fn flagged(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(|r| r.flagged)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is serializable");
        s.push('\n');
        s
    }

    /// JSON of the records alone, which is independent of wall time.
    pub fn records_json(&self) -> String {
        serde_json::to_string(&self.records).expect("records are serializable")
    }

    /// Records grouped by quantity, in first-appearance order.
    pub fn quantities(&self) -> Vec<(&str, Vec<&Record>)> {
        let mut order: Vec<&str> = Vec::new();
        let mut groups: BTreeMap<&str, Vec<&Record>> = BTreeMap::new();
        for r in &self.records {
            let g = groups.entry(r.quantity.as_str()).or_default();
            if g.is_empty() {
                order.push(r.quantity.as_str());
            }
            g.push(r);
        }
        order.into_iter().map(|q| (q, groups.remove(q).unwrap_or_default())).collect()
    }

    /// CSV body for one quantity.
    pub fn csv_for(&self, quantity: &str) -> std::io::Result<String> {
        let rows: Vec<&Record> = self.records.iter().filter(|r| r.quantity == quantity).collect();
        csv_body(&rows)
    }

    /// Writes `report.json` and `<quantity>.csv` files into `dir`.
    pub fn write_to_dir(&self, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let json_path = dir.join("report.json");
        std::fs::File::create(&json_path)?.write_all(self.to_json().as_bytes())?;
        written.push(json_path);
        for (quantity, rows) in self.quantities() {
            let path = dir.join(format!("{quantity}.csv"));
            std::fs::File::create(&path)?.write_all(csv_body(&rows)?.as_bytes())?;
            written.push(path);
        }
        Ok(written)
    }
}

pub const CSV_HEADER: [&str; 12] = [
    "quantity",
    "x",
    "count",
    "measured",
    "variance",
    "stderr",
    "predicted",
    "prediction_eq",
    "reference",
    "z",
    "flagged",
    "note",
];

/// Locale-independent float with 17 significant digits; empty for absent values.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(format_float).unwrap_or_default()
}

fn csv_body(rows: &[&Record]) -> std::io::Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.quantity.clone(),
            opt(r.x),
            r.count.to_string(),
            format_float(r.mean),
            format_float(r.variance),
            format_float(r.stderr),
            opt(r.predicted),
            r.source.tag().to_string(),
            opt(r.reference),
            opt(r.z),
            r.flagged.to_string(),
            r.note.clone().unwrap_or_default(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("CSV of UTF-8 fields is UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z_scores_and_flags() {
        let acc = StatAccumulator::from_samples([1.0, 2.0, 3.0]);
        let r = Record::from_accumulator("q", &acc).predict(2.0, PredictionSource::E);
        assert_eq!(r.z, Some(0.0));
        assert!(!r.flagged);
        let far = Record::from_accumulator("q", &acc).predict(10.0, PredictionSource::E);
        assert!(far.flagged);
        // Constant samples: the floor keeps z finite and flags a real mismatch.
        let flat = StatAccumulator::from_samples([0.25; 10]);
        let ok = Record::from_accumulator("q", &flat).predict(0.25, PredictionSource::N);
        assert_eq!(ok.z, Some(0.0));
        let tiny = Record::from_accumulator("q", &flat).predict(0.25 + 1e-17, PredictionSource::N);
        assert!(!tiny.flagged);
        let off = Record::from_accumulator("q", &flat).predict(0.3, PredictionSource::N);
        assert!(off.flagged && off.z.unwrap().is_finite());
    }

    #[test]
    fn float_formatting() {
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
        assert_eq!(format_float(-2.0), "-2.0000000000000000e0");
        assert_eq!(format_float(f64::NAN), "NaN");
        let v = 0.123_456_789_012_345_68_f64;
        assert_eq!(format_float(v).parse::<f64>().unwrap(), v);
    }

    #[test]
    fn csv_quoting_and_line_endings() {
        let r = Record::from_accumulator("q", &StatAccumulator::from_samples([1.0, 2.0]))
            .note("a, \"quoted\" note");
        let body = csv_body(&[&r]).unwrap();
        assert!(!body.contains('\r'));
        assert!(body.starts_with("quantity,x,count,measured,variance,stderr,predicted,prediction_eq,reference,z,flagged,note\n"));
        assert!(body.contains("\"a, \"\"quoted\"\" note\""));
        assert!(body.ends_with('\n'));
    }
}
