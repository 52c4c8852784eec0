//! BPA definition files: JSON with an ordered list of parameters, each
//! carrying `{lo, hi, mass}` rows. The loader validates normalization and
//! reports the defect magnitude on failure.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{BpaStructure, EvidenceError, UncertainSpace};
use crate::interval::Interval;

#[derive(Debug, Error)]
pub enum BpaFileError {
    #[error("cannot read BPA file '{path}': {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("BPA file is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Evidence(#[from] EvidenceError),
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BpaRow {
    pub lo: f64,
    pub hi: f64,
    pub mass: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BpaParameter {
    pub name: String,
    pub elements: Vec<BpaRow>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BpaFile {
    pub parameters: Vec<BpaParameter>,
}

/// Parses a BPA definition from JSON text. Dimension order follows the
/// file order.
pub fn parse_bpa_json(text: &str) -> Result<UncertainSpace, BpaFileError> {
    let file: BpaFile = serde_json::from_str(text)?;
    let dims = file
        .parameters
        .into_iter()
        .map(|param| {
            let rows: Vec<(f64, f64, f64)> = param
                .elements
                .iter()
                .map(|r| (r.lo, r.hi, r.mass))
                .collect();
            BpaStructure::from_rows(param.name, &rows)
        })
        .collect::<Result<Vec<_>, EvidenceError>>()?;
    Ok(UncertainSpace::new(dims)?)
}

/// Loads a BPA definition file from disk.
pub fn load_bpa_file(path: &std::path::Path) -> Result<UncertainSpace, BpaFileError> {
    let text = std::fs::read_to_string(path).map_err(|source| BpaFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_bpa_json(&text)
}

/// Serializes an uncertain space back to the file schema (used by export
/// tooling and tests).
pub fn space_to_json(space: &UncertainSpace) -> String {
    let file = BpaFile {
        parameters: space
            .dims
            .iter()
            .map(|bpa| BpaParameter {
                name: bpa.parameter_name.clone(),
                elements: bpa
                    .elements()
                    .iter()
                    .map(|fe| BpaRow {
                        lo: fe.interval.lo,
                        hi: fe.interval.hi,
                        mass: fe.mass,
                    })
                    .collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("BPA schema serializes")
}

impl BpaStructure {
    pub(crate) fn intervals(&self) -> Vec<Interval> {
        self.elements().iter().map(|fe| fe.interval).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_validates() {
        let text = r#"{
            "parameters": [
                {"name": "eta_p", "elements": [{"lo": 0.77, "hi": 0.98, "mass": 1.0}]},
                {"name": "p0", "elements": [
                    {"lo": 251.23, "hi": 300.12, "mass": 0.65},
                    {"lo": 258.02, "hi": 349.01, "mass": 0.35}
                ]}
            ]
        }"#;
        let space = parse_bpa_json(text).unwrap();
        assert_eq!(space.dim(), 2);
        assert_eq!(space.joint_count(), 2);
    }

    #[test]
    fn reports_normalization_defect() {
        let text = r#"{
            "parameters": [
                {"name": "p", "elements": [
                    {"lo": 0.0, "hi": 1.0, "mass": 0.6},
                    {"lo": 1.0, "hi": 2.0, "mass": 0.5}
                ]}
            ]
        }"#;
        let err = parse_bpa_json(text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("defect"), "message was: {msg}");
        assert!(msg.contains("1.1"), "message was: {msg}");
    }

    #[test]
    fn round_trips_through_json() {
        let text = r#"{
            "parameters": [
                {"name": "H", "elements": [
                    {"lo": 5.0, "hi": 7.0, "mass": 0.1},
                    {"lo": 7.0, "hi": 12.0, "mass": 0.4},
                    {"lo": 8.0, "hi": 10.0, "mass": 0.5}
                ]}
            ]
        }"#;
        let space = parse_bpa_json(text).unwrap();
        let back = parse_bpa_json(&space_to_json(&space)).unwrap();
        assert_eq!(back.dims[0], space.dims[0]);
    }
}
