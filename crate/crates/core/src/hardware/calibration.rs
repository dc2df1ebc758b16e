//! JSON calibration documents.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Durations, HardwareError, HardwareModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DurationsDoc {
    #[serde(rename = "1q_gate_dt", default, skip_serializing_if = "Option::is_none")]
    pub single_qubit: Option<u64>,
    #[serde(rename = "cx_dt", default, skip_serializing_if = "Option::is_none")]
    pub cx: Option<u64>,
    #[serde(rename = "measure_dt", default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<u64>,
}

/// On-disk calibration format. `cx_error` keys are `"a-b"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationDoc {
    pub name: String,
    pub n_qubits: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling: Option<Vec<[usize; 2]>>,
    #[serde(default)]
    pub cx_error: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sq_error: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub readout_error: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub durations: Option<DurationsDoc>,
}

fn parse_edge_key(key: &str) -> Result<(usize, usize), HardwareError> {
    let bad = || HardwareError::BadEdgeKey(key.to_string());
    let (a, b) = key.split_once('-').ok_or_else(bad)?;
    Ok((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ))
}

impl CalibrationDoc {
    pub fn into_model(self) -> Result<HardwareModel, HardwareError> {
        let coupling: Vec<(usize, usize)> = self
            .coupling
            .ok_or(HardwareError::MissingCoupling)?
            .into_iter()
            .map(|[a, b]| (a, b))
            .collect();
        let mut cx = BTreeMap::new();
        for (key, e) in &self.cx_error {
            let (a, b) = parse_edge_key(key)?;
            cx.insert((a, b), *e);
        }
        let defaults = Durations::default();
        let durations = match self.durations {
            None => defaults,
            Some(d) => Durations {
                single_qubit: d.single_qubit.unwrap_or(defaults.single_qubit),
                cx: d.cx.unwrap_or(defaults.cx),
                measure: d.measure.unwrap_or(defaults.measure),
            },
        };
        HardwareModel::new(
            self.name,
            self.n_qubits,
            &coupling,
            &cx,
            self.sq_error,
            self.readout_error,
            durations,
        )
    }

    pub fn from_model(m: &HardwareModel) -> CalibrationDoc {
        let d = m.durations();
        CalibrationDoc {
            name: m.name().to_string(),
            n_qubits: m.n_qubits(),
            coupling: Some(m.edges().iter().map(|&(a, b)| [a, b]).collect()),
            cx_error: m
                .cx_errors()
                .map(|((a, b), e)| (format!("{a}-{b}"), e))
                .collect(),
            sq_error: Some((0..m.n_qubits()).map(|q| m.sq_error(q)).collect()),
            readout_error: Some((0..m.n_qubits()).map(|q| m.readout_error(q)).collect()),
            durations: Some(DurationsDoc {
                single_qubit: Some(d.single_qubit),
                cx: Some(d.cx),
                measure: Some(d.measure),
            }),
        }
    }
}

/// Parses and validates a calibration document.
pub fn load_calibration(json: &str) -> Result<HardwareModel, HardwareError> {
    let doc: CalibrationDoc = serde_json::from_str(json)?;
    doc.into_model()
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"{
        "name": "tri",
        "n_qubits": 3,
        "coupling": [[0, 1], [1, 2]],
        "cx_error": {"0-1": 0.01, "2-1": 0.02},
        "readout_error": [0.01, 0.02, 0.03]
    }"#;

    #[test]
    fn loads_minimal_document_with_defaults() {
        let m = load_calibration(SMALL).unwrap();
        assert_eq!(m.n_qubits(), 3);
        assert_eq!(m.cx_error(1, 2), Some(0.02));
        assert_eq!(m.sq_error(1), 0.0);
        assert_eq!(m.readout_error(2), 0.03);
        assert_eq!(m.durations(), Durations::default());
    }

    #[test]
    fn document_round_trips() {
        let m = load_calibration(SMALL).unwrap();
        let json = serde_json::to_string(&m.to_document()).unwrap();
        assert_eq!(load_calibration(&json).unwrap(), m);
    }

    #[test]
    fn missing_coupling_is_rejected() {
        let err = load_calibration(r#"{"name": "x", "n_qubits": 2}"#).unwrap_err();
        assert!(matches!(err, HardwareError::MissingCoupling));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let err = load_calibration(
            r#"{"name": "x", "n_qubits": 2, "coupling": [[0,1]], "cx_error": {"0-1": 0.1}, "t1": []}"#,
        )
        .unwrap_err();
        assert!(matches!(err, HardwareError::Json(_)));
    }

    #[test]
    fn bad_values_are_rejected() {
        let err = load_calibration(
            r#"{"name": "x", "n_qubits": 2, "coupling": [[0,1]], "cx_error": {"0-1": -0.1}}"#,
        )
        .unwrap_err();
        assert!(matches!(err, HardwareError::OutOfRange { .. }));
        let err = load_calibration(
            r#"{"name": "x", "n_qubits": 2, "coupling": [[0,1]], "cx_error": {"01": 0.1}}"#,
        )
        .unwrap_err();
        assert!(matches!(err, HardwareError::BadEdgeKey(_)));
        let err = load_calibration(
            r#"{"name": "x", "n_qubits": 2, "coupling": [[0,1]], "cx_error": {"0-1": 0.1}, "readout_error": [0.1]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, HardwareError::LengthMismatch { .. }));
        let err = load_calibration(
            r#"{"name": "x", "n_qubits": 2, "coupling": [[0,1]], "cx_error": {"0-1": 0.1, "0-5": 0.1}}"#,
        )
        .unwrap_err();
        assert!(matches!(err, HardwareError::DanglingQubit { qubit: 5, .. }));
    }
}
