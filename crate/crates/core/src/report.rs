//! Report assembly and canonical serialization.
//!
//! Reports serialize to canonical JSON: keys sorted, floats printed with 17
//! significant digits (which round-trips IEEE-754 doubles exactly), UTF-8,
//! trailing newline. Identical reports therefore produce identical bytes on
//! any platform. Curve thresholds may be infinite; they serialize as the
//! strings `"inf"` / `"-inf"` so every JSON number in a report is finite.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bootstrap::ConfidenceBand;
use crate::error::{Error, Result};
use crate::gini::GiniDecomposition;
use crate::roc::{AucTable, ClassCurve, RocCurve};

pub const SCHEMA_VERSION: u32 = 1;

/// Serialization of possibly-infinite floats (curve thresholds): finite
/// values stay JSON numbers, non-finite ones become strings.
pub mod extended_float {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &f64, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if value.is_finite() {
            serializer.serialize_f64(*value)
        } else if value.is_nan() {
            serializer.serialize_str("nan")
        } else if *value > 0.0 {
            serializer.serialize_str("inf")
        } else {
            serializer.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> std::result::Result<f64, D::Error> {
        match Repr::deserialize(deserializer)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" | "+inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!(
                    "invalid float string '{other}'"
                ))),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub n: usize,
    pub k: usize,
    pub classes: Vec<String>,
    pub frequencies: Vec<f64>,
    pub empty_classes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhiteningReport {
    pub method: String,
    pub ridge: f64,
    pub variance_floor: f64,
    pub correlation_floor: f64,
    /// Largest deviation of `W Sigma_r W^T` from the identity.
    pub condition_residual: f64,
    pub degenerate_columns: Vec<String>,
}

/// Scalar metrics: the table plus the affine-identity variant of the
/// aggregated AUC, `(G_1 + 1) / 2`, reported side by side with the
/// trapezoidal one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AucReport {
    #[serde(flatten)]
    pub table: AucTable,
    pub gini_identity_auc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSet {
    pub per_class: Vec<ClassCurve>,
    pub aggregated: RocCurve,
    pub micro: RocCurve,
}

/// How empty classes were handled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregationReport {
    /// Weights after dropping empty classes and renormalizing.
    pub weights_used: Vec<f64>,
    pub dropped_classes: Vec<String>,
    pub macro_excluded_classes: usize,
    pub m_measure_skipped_pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapReport {
    pub replicates: usize,
    pub level: f64,
    pub seed: u64,
    pub auc_std_error: f64,
    pub discarded_replicates: usize,
    pub band: ConfidenceBand,
    pub replicate_aucs: Vec<f64>,
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub input: Option<String>,
    pub label_column: String,
    pub score_columns: Option<Vec<String>>,
    pub delimiter: String,
    pub grid_size: usize,
    pub ridge: f64,
    pub bootstrap_enabled: bool,
    pub replicates: usize,
    pub level: f64,
    pub seed: u64,
    pub out_dir: Option<String>,
    pub plots: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool_version: String,
    pub seed: u64,
    pub config: ConfigEcho,
    pub timestamp_unix: u64,
}

/// The complete output of one evaluation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub schema_version: u32,
    pub dataset: DatasetSummary,
    pub whitening: WhiteningReport,
    pub gini: GiniDecomposition,
    pub auc: AucReport,
    pub curves: CurveSet,
    pub aggregation: AggregationReport,
    pub bootstrap: Option<BootstrapReport>,
    pub provenance: Provenance,
}

fn check_finite(values: &[f64], what: &str) -> Result<()> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Validation(format!(
            "report field '{what}' contains a non-finite value"
        )));
    }
    Ok(())
}

fn check_curve(curve: &RocCurve, what: &str) -> Result<()> {
    if !curve.auc.is_finite() {
        return Err(Error::Validation(format!("AUC of '{what}' is not finite")));
    }
    for p in &curve.points {
        if !p.fpr.is_finite() || !p.tpr.is_finite() || p.threshold.is_nan() {
            return Err(Error::Validation(format!(
                "curve '{what}' contains a non-finite point"
            )));
        }
    }
    Ok(())
}

impl EvaluationReport {
    /// Rejects any report carrying NaN or infinite numbers (curve
    /// thresholds are the one place infinities are legal).
    pub fn validate(&self) -> Result<()> {
        check_finite(&self.dataset.frequencies, "dataset.frequencies")?;
        check_finite(
            &[
                self.whitening.ridge,
                self.whitening.variance_floor,
                self.whitening.correlation_floor,
                self.whitening.condition_residual,
            ],
            "whitening",
        )?;
        check_finite(&self.gini.per_class_gini, "gini.per_class_gini")?;
        check_finite(&self.gini.whitened_means, "gini.whitened_means")?;
        check_finite(&self.gini.weights, "gini.weights")?;
        check_finite(&[self.gini.aggregate], "gini.aggregate")?;
        check_finite(
            &[
                self.auc.table.gini_auc,
                self.auc.table.macro_auc,
                self.auc.table.micro_auc,
                self.auc.table.m_measure,
                self.auc.gini_identity_auc,
            ],
            "auc",
        )?;
        for value in self.auc.table.per_class_auc.iter().flatten() {
            if !value.is_finite() {
                return Err(Error::Validation(
                    "report field 'auc.per_class_auc' contains a non-finite value".into(),
                ));
            }
        }
        for entry in &self.curves.per_class {
            if let Some(curve) = &entry.curve {
                check_curve(curve, &entry.class)?;
            }
        }
        check_curve(&self.curves.aggregated, "aggregated")?;
        check_curve(&self.curves.micro, "micro")?;
        check_finite(&self.aggregation.weights_used, "aggregation.weights_used")?;
        if let Some(b) = &self.bootstrap {
            check_finite(&b.band.fpr_grid, "bootstrap.band.fpr_grid")?;
            check_finite(&b.band.lower, "bootstrap.band.lower")?;
            check_finite(&b.band.upper, "bootstrap.band.upper")?;
            check_finite(&b.replicate_aucs, "bootstrap.replicate_aucs")?;
            check_finite(&[b.auc_std_error, b.level], "bootstrap")?;
        }
        check_finite(
            &[self.whitening.ridge, self.provenance.config.ridge, self.provenance.config.level],
            "provenance.config",
        )?;
        Ok(())
    }

    /// Canonical bytes of the validated report.
    pub fn to_canonical_bytes(&self) -> Result<Vec<u8>> {
        self.validate()?;
        let value = serde_json::to_value(self)
            .map_err(|e| Error::Validation(format!("report serialization failed: {e}")))?;
        let mut out = String::new();
        write_canonical(&value, &mut out);
        out.push('\n');
        Ok(out.into_bytes())
    }

    pub fn from_json_bytes(bytes: &[u8]) -> Result<Self> {
        serde_json::from_slice(bytes)
            .map_err(|e| Error::InputSchema(format!("cannot parse report: {e}")))
    }
}

/// Writes the canonical JSON report; identical reports give identical bytes.
pub fn write_report(report: &EvaluationReport, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = report.to_canonical_bytes()?;
    fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_report(path: impl AsRef<Path>) -> Result<EvaluationReport> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    EvaluationReport::from_json_bytes(&bytes)
}

/// Exports curve points as `fpr,tpr,threshold` rows.
pub fn write_curve_csv(curve: &RocCurve, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut out = std::io::BufWriter::new(file);
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    writeln!(out, "fpr,tpr,threshold").map_err(io_err)?;
    for p in &curve.points {
        writeln!(out, "{},{},{}", p.fpr, p.tpr, p.threshold).map_err(io_err)?;
    }
    out.flush().map_err(io_err)?;
    Ok(())
}

fn write_canonical(value: &serde_json::Value, out: &mut String) {
    use serde_json::Value;
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else {
                // 17 significant digits: exact round trip for f64.
                let v = n.as_f64().expect("JSON number is u64, i64 or f64");
                out.push_str(&format!("{v:.16e}"));
            }
        }
        Value::String(s) => {
            out.push('"');
            for c in s.chars() {
                match c {
                    '"' => out.push_str("\\\""),
                    '\\' => out.push_str("\\\\"),
                    '\n' => out.push_str("\\n"),
                    '\r' => out.push_str("\\r"),
                    '\t' => out.push_str("\\t"),
                    c if (c as u32) < 0x20 => {
                        out.push_str(&format!("\\u{:04x}", c as u32));
                    }
                    c => out.push(c),
                }
            }
            out.push('"');
        }
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_canonical(item, out);
            }
            out.push(']');
        }
        // serde_json's map is ordered by key, so objects come out sorted.
        Value::Object(map) => {
            out.push('{');
            for (i, (key, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_canonical(&serde_json::Value::String(key.clone()), out);
                out.push(':');
                write_canonical(item, out);
            }
            out.push('}');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roc::{CurveKind, RocPoint};

    fn tiny_curve(kind: CurveKind) -> RocCurve {
        RocCurve {
            points: vec![
                RocPoint { fpr: 0.0, tpr: 0.0, threshold: f64::INFINITY },
                RocPoint { fpr: 0.0, tpr: 1.0, threshold: 0.75 },
                RocPoint { fpr: 1.0, tpr: 1.0, threshold: 0.25 },
            ],
            auc: 1.0,
            kind,
        }
    }

    fn sample_report() -> EvaluationReport {
        EvaluationReport {
            schema_version: SCHEMA_VERSION,
            dataset: DatasetSummary {
                n: 4,
                k: 2,
                classes: vec!["a".into(), "b".into()],
                frequencies: vec![0.5, 0.5],
                empty_classes: vec![],
            },
            whitening: WhiteningReport {
                method: "zca-cor".into(),
                ridge: 1e-8,
                variance_floor: 1e-11,
                correlation_floor: 1e-10,
                condition_residual: 3e-16,
                degenerate_columns: vec![],
            },
            gini: GiniDecomposition {
                per_class_gini: vec![0.4, 0.6],
                whitened_means: vec![1.5, -0.5],
                weights: vec![0.75, 0.25],
                aggregate: 0.45,
            },
            auc: AucReport {
                table: AucTable {
                    gini_auc: 0.9,
                    macro_auc: 0.85,
                    micro_auc: 0.95,
                    m_measure: 0.88,
                    per_class_auc: vec![Some(0.8), Some(0.9)],
                },
                gini_identity_auc: 0.725,
            },
            curves: CurveSet {
                per_class: vec![
                    ClassCurve { class: "a".into(), curve: Some(tiny_curve(CurveKind::PerClass("a".into()))) },
                    ClassCurve { class: "b".into(), curve: None },
                ],
                aggregated: tiny_curve(CurveKind::Aggregated),
                micro: tiny_curve(CurveKind::Micro),
            },
            aggregation: AggregationReport {
                weights_used: vec![0.75, 0.25],
                dropped_classes: vec![],
                macro_excluded_classes: 0,
                m_measure_skipped_pairs: 0,
            },
            bootstrap: None,
            provenance: Provenance {
                tool_version: "0.1.0".into(),
                seed: 42,
                config: ConfigEcho {
                    input: Some("scores.csv".into()),
                    label_column: "label".into(),
                    score_columns: None,
                    delimiter: ",".into(),
                    grid_size: 512,
                    ridge: 1e-8,
                    bootstrap_enabled: false,
                    replicates: 1000,
                    level: 0.95,
                    seed: 42,
                    out_dir: None,
                    plots: false,
                },
                timestamp_unix: 1_700_000_000,
            },
        }
    }

    #[test]
    fn identical_reports_give_identical_bytes() {
        let report = sample_report();
        let a = report.to_canonical_bytes().unwrap();
        let b = report.to_canonical_bytes().unwrap();
        assert_eq!(a, b);
        assert_eq!(a.last(), Some(&b'\n'));
    }

    #[test]
    fn write_read_round_trip_is_structural_identity() {
        let report = sample_report();
        let bytes = report.to_canonical_bytes().unwrap();
        let back = EvaluationReport::from_json_bytes(&bytes).unwrap();
        assert_eq!(report, back);
    }

    #[test]
    fn write_read_write_is_a_fixed_point() {
        let report = sample_report();
        let bytes = report.to_canonical_bytes().unwrap();
        let back = EvaluationReport::from_json_bytes(&bytes).unwrap();
        let bytes2 = back.to_canonical_bytes().unwrap();
        assert_eq!(bytes, bytes2);
    }

    #[test]
    fn nan_is_refused() {
        let mut report = sample_report();
        report.auc.table.macro_auc = f64::NAN;
        assert!(matches!(
            report.to_canonical_bytes(),
            Err(Error::Validation(_))
        ));

        let mut report = sample_report();
        report.curves.aggregated.points[1].threshold = f64::NAN;
        assert!(matches!(
            report.to_canonical_bytes(),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn infinite_thresholds_serialize_as_strings() {
        let report = sample_report();
        let text = String::from_utf8(report.to_canonical_bytes().unwrap()).unwrap();
        assert!(text.contains("\"inf\""));
        // No bare JSON infinity tokens.
        assert!(!text.contains("Infinity"));
    }

    #[test]
    fn float_formatting_has_17_significant_digits() {
        let report = sample_report();
        let text = String::from_utf8(report.to_canonical_bytes().unwrap()).unwrap();
        assert!(text.contains("5.0000000000000000e-1"), "got: {text}");
    }

    #[test]
    fn keys_are_sorted() {
        let report = sample_report();
        let text = String::from_utf8(report.to_canonical_bytes().unwrap()).unwrap();
        let agg = text.find("\"aggregation\"").unwrap();
        let auc = text.find("\"auc\"").unwrap();
        let prov = text.find("\"provenance\"").unwrap();
        assert!(agg < auc && auc < prov);
    }

    #[test]
    fn curve_csv_has_expected_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("curve.csv");
        write_curve_csv(&tiny_curve(CurveKind::Aggregated), &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "fpr,tpr,threshold");
        assert_eq!(lines[1], "0,0,inf");
        assert_eq!(lines[2], "0,1,0.75");
        assert_eq!(lines.len(), 4);
    }
}
