use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use qcap::linalg::CMatrix;
use qcap::measures::nats_to_bits;

use crate::config::{Format, RunConfig};

pub const TOOL: &str = "qcap";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Unit {
    Nats,
    Bits,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub value: f64,
    pub unit: Unit,
}

impl Quantity {
    pub fn nats(value: f64) -> Self {
        Self { value, unit: Unit::Nats }
    }

    pub fn plain(value: f64) -> Self {
        Self { value, unit: Unit::None }
    }

    fn to_bits(self) -> Self {
        match self.unit {
            Unit::Nats => Self {
                value: nats_to_bits(self.value),
                unit: Unit::Bits,
            },
            _ => self,
        }
    }
}

/// A complex matrix as row-major real and imaginary parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixDump {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl MatrixDump {
    pub fn new(name: &str, m: &CMatrix) -> Self {
        let (rows, cols) = m.shape();
        let mut re = Vec::with_capacity(rows * cols);
        let mut im = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                re.push(m[(i, j)].re);
                im.push(m[(i, j)].im);
            }
        }
        Self { name: name.to_string(), rows, cols, re, im }
    }

    pub fn to_matrix(&self) -> CMatrix {
        CMatrix::from_fn(self.rows, self.cols, |i, j| {
            let k = i * self.cols + j;
            qcap::linalg::c(self.re[k], self.im[k])
        })
    }
}

/// The offending input of a failed record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    /// Trial within the cell that produced the worst slack.
    pub trial: usize,
    pub seed: u64,
    pub matrices: Vec<MatrixDump>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub check: String,
    pub anchor: String,
    /// Position of the cell in the config grids; the sort key.
    pub index: Vec<usize>,
    pub params: BTreeMap<String, Value>,
    pub seed: u64,
    pub inputs_digest: String,
    pub values: BTreeMap<String, Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slack: Option<Quantity>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub records: usize,
    pub passed: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_slack: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub warnings: usize,
    pub checks: BTreeMap<String, CheckSummary>,
}

impl Summary {
    pub fn of(records: &[Record]) -> Self {
        let mut s = Summary::default();
        for r in records {
            s.total += 1;
            if r.pass {
                s.passed += 1;
            } else {
                s.failed += 1;
            }
            if r.warning.is_some() {
                s.warnings += 1;
            }
            let c = s.checks.entry(r.check.clone()).or_default();
            c.records += 1;
            c.passed += usize::from(r.pass);
            if let Some(q) = r.slack {
                c.min_slack = Some(c.min_slack.map_or(q.value, |m| m.min(q.value)));
            }
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: RunConfig,
    pub records: Vec<Record>,
    pub summary: Summary,
    /// Wall-clock time of assembly; the only field outside the determinism
    /// contract.
    pub generated_at: String,
}

impl Report {
    /// Sorts records by `(check, index)` and fills the summary.
    pub fn assemble(command: &str, config: &RunConfig, mut records: Vec<Record>) -> Self {
        records.sort_by(|a, b| (&a.check, &a.index).cmp(&(&b.check, &b.index)));
        if config.bits {
            for r in &mut records {
                r.values.values_mut().for_each(|q| *q = q.to_bits());
                r.slack = r.slack.map(Quantity::to_bits);
            }
        }
        Self {
            tool: TOOL.to_string(),
            version: VERSION.to_string(),
            command: command.to_string(),
            config: config.clone(),
            summary: Summary::of(&records),
            records,
            generated_at: chrono::Utc::now().to_rfc3339(),
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports contain only finite numbers and strings")
    }

    /// JSON with the timestamp blanked, for byte comparison.
    pub fn canonical_json(&self) -> String {
        Report {
            generated_at: String::new(),
            ..self.clone()
        }
        .to_json()
    }

    /// One row per record; params and values flattened into columns.
    pub fn to_csv(&self) -> anyhow::Result<String> {
        let params: BTreeSet<&String> = self.records.iter().flat_map(|r| r.params.keys()).collect();
        let values: BTreeSet<(&String, Unit)> = self
            .records
            .iter()
            .flat_map(|r| r.values.iter().map(|(k, q)| (k, q.unit)))
            .collect();
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["check".to_string(), "anchor".to_string(), "index".to_string()];
        header.extend(params.iter().map(|p| p.to_string()));
        header.extend(values.iter().map(|(k, u)| match u {
            Unit::None => k.to_string(),
            Unit::Nats => format!("{k}_nats"),
            Unit::Bits => format!("{k}_bits"),
        }));
        header.extend(["slack", "pass", "seed", "inputs_digest"].map(String::from));
        w.write_record(&header)?;
        for r in &self.records {
            let mut row = vec![
                r.check.clone(),
                r.anchor.clone(),
                r.index.iter().map(usize::to_string).collect::<Vec<_>>().join(":"),
            ];
            row.extend(params.iter().map(|p| r.params.get(*p).map(csv_value).unwrap_or_default()));
            row.extend(values.iter().map(|(k, u)| {
                r.values
                    .get(*k)
                    .filter(|q| q.unit == *u)
                    .map(|q| csv_float(q.value))
                    .unwrap_or_default()
            }));
            row.push(r.slack.map(|q| csv_float(q.value)).unwrap_or_default());
            row.push(r.pass.to_string());
            row.push(r.seed.to_string());
            row.push(r.inputs_digest.clone());
            w.write_record(&row)?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }

    pub fn render(&self, format: Format) -> anyhow::Result<String> {
        match format {
            Format::Json => Ok(self.to_json()),
            Format::Csv => self.to_csv(),
        }
    }

    pub fn write_to(&self, format: Format, out: &mut dyn Write) -> anyhow::Result<()> {
        out.write_all(self.render(format)?.as_bytes())?;
        if format == Format::Json {
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// 17 significant digits.
fn csv_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_value(v: &Value) -> String {
    match v {
        Value::Number(n) if n.is_f64() => csv_float(n.as_f64().unwrap_or(f64::NAN)),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// SHA-256 over everything that determines a cell's inputs.
#[derive(Clone, Default)]
pub struct InputDigest(Sha256);

impl InputDigest {
    pub fn new(check: &str, params: &BTreeMap<String, Value>, seed: u64) -> Self {
        let mut h = Sha256::new();
        h.update(check.as_bytes());
        h.update(serde_json::to_vec(params).expect("params serialize"));
        h.update(seed.to_le_bytes());
        Self(h)
    }

    pub fn matrix(&mut self, m: &CMatrix) {
        for z in m.iter() {
            self.0.update(z.re.to_le_bytes());
            self.0.update(z.im.to_le_bytes());
        }
    }

    pub fn finish(self) -> String {
        hex::encode(self.0.finalize())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use qcap::linalg::c;

    fn record(check: &str, index: Vec<usize>, pass: bool, slack: f64) -> Record {
        Record {
            check: check.into(),
            anchor: "a".into(),
            index,
            params: BTreeMap::from([("d".to_string(), Value::from(2))]),
            seed: 1,
            inputs_digest: String::new(),
            values: BTreeMap::from([("s_min".to_string(), Quantity::nats(std::f64::consts::LN_2))]),
            slack: Some(Quantity::nats(slack)),
            pass,
            warning: None,
            witness: None,
        }
    }

    #[test]
    fn assembly_sorts_and_counts() {
        let recs = vec![
            record("b", vec![0], true, 0.5),
            record("a", vec![1], false, -0.1),
            record("a", vec![0], true, 0.2),
        ];
        let rep = Report::assemble("verify", &RunConfig::default(), recs);
        let order: Vec<_> = rep.records.iter().map(|r| (r.check.as_str(), r.index[0])).collect();
        assert_eq!(order, [("a", 0), ("a", 1), ("b", 0)]);
        assert_eq!((rep.summary.total, rep.summary.passed, rep.summary.failed), (3, 2, 1));
        assert_eq!(rep.summary.checks["a"].min_slack, Some(-0.1));
        assert!(!rep.all_passed());
    }

    #[test]
    fn bits_conversion() {
        let cfg = RunConfig { bits: true, ..RunConfig::default() };
        let rep = Report::assemble("measures", &cfg, vec![record("a", vec![0], true, 0.0)]);
        let q = rep.records[0].values["s_min"];
        assert_eq!(q.unit, Unit::Bits);
        assert!((q.value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn json_round_trip_is_exact() {
        let mut r = record("a", vec![0], true, 0.1);
        r.values.insert("x".into(), Quantity::plain(0.1 + 0.2));
        let rep = Report::assemble("verify", &RunConfig::default(), vec![r]);
        let back: Report = serde_json::from_str(&rep.to_json()).unwrap();
        assert_eq!(back, rep);
    }

    #[test]
    fn csv_has_one_row_per_record() {
        let rep = Report::assemble(
            "measures",
            &RunConfig::default(),
            vec![record("a", vec![0], true, 0.1), record("a", vec![1], true, 0.1)],
        );
        let csv = rep.to_csv().unwrap();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].contains("s_min_nats"));
        assert!(lines[1].contains("6.9314718055994529e-1"));
    }

    #[test]
    fn matrix_dump_round_trip() {
        let m = CMatrix::from_fn(2, 3, |i, j| c(i as f64, -(j as f64)));
        assert_eq!(MatrixDump::new("m", &m).to_matrix(), m);
    }

    #[test]
    fn digest_depends_on_inputs() {
        let params = BTreeMap::new();
        let a = InputDigest::new("x", &params, 1).finish();
        let b = InputDigest::new("x", &params, 2).finish();
        assert_ne!(a, b);
        assert_eq!(a.len(), 64);
    }
}
