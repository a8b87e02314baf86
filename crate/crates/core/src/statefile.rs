//! JSON state files:
//!
//! ```json
//! { "label": "bell",
//!   "dims": { "kind": "bipartite", "m": 2, "n": 2 },
//!   "entries": [[0.5, 0.0], [0.0, 0.0], ...] }
//! ```
//!
//! `entries` is the row-major matrix as `[re, im]` pairs. Three-qubit
//! states use `"dims": { "kind": "tripartite" }`.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matsub::ComplexMatrix;
use crate::states::{DensityMatrix, DimensionSignature};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub dims: DimensionSignature,
    pub entries: Vec<[f64; 2]>,
}

impl StateFile {
    pub fn from_state(rho: &DensityMatrix, label: Option<&str>) -> Self {
        Self {
            label: label.map(str::to_string),
            dims: rho.dims(),
            entries: rho.matrix().entries().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    /// Builds and validates the density matrix.
    pub fn to_state(&self) -> Result<DensityMatrix> {
        let total = self.dims.total();
        if self.entries.len() != total * total {
            return Err(Error::Shape(format!(
                "signature {} needs {} entries, file has {}",
                self.dims,
                total * total,
                self.entries.len()
            )));
        }
        let data = self.entries.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        DensityMatrix::validate(ComplexMatrix::new(total, total, data)?, self.dims)
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("state files always serialize")
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{ghz, max_entangled, rho_a};

    #[test]
    fn parses_bipartite_and_tripartite() {
        let text = r#"{"dims": {"kind": "bipartite", "m": 2, "n": 2},
                       "entries": [[0.25,0],[0,0],[0,0],[0,0],
                                   [0,0],[0.25,0],[0,0],[0,0],
                                   [0,0],[0,0],[0.25,0],[0,0],
                                   [0,0],[0,0],[0,0],[0.25,0]]}"#;
        let f = StateFile::parse(text).unwrap();
        assert_eq!(f.label, None);
        assert!(f.to_state().is_ok());

        let g = StateFile::from_state(&ghz(), Some("ghz"));
        let json = g.to_json();
        assert!(json.contains("\"tripartite\""));
        assert_eq!(StateFile::parse(&json).unwrap(), g);
    }

    #[test]
    fn round_trip_is_exact() {
        let rho = rho_a(0.3).unwrap();
        let back = StateFile::parse(&StateFile::from_state(&rho, None).to_json())
            .unwrap()
            .to_state()
            .unwrap();
        assert_eq!(back.matrix().max_abs_diff(rho.matrix()), 0.0);
    }

    #[test]
    fn distinct_failures() {
        assert!(matches!(StateFile::parse("{not json"), Err(Error::Parse(_))));
        assert!(matches!(
            StateFile::parse(r#"{"dims":{"kind":"quadpartite"},"entries":[]}"#),
            Err(Error::Parse(_))
        ));
        let mut f = StateFile::from_state(&max_entangled(2).unwrap(), None);
        f.entries.pop();
        assert!(matches!(f.to_state(), Err(Error::Shape(_))));
        let mut f = StateFile::from_state(&max_entangled(2).unwrap(), None);
        f.entries[0] = [2.0, 0.0];
        assert!(matches!(f.to_state(), Err(Error::Trace { .. })));
        let f = StateFile {
            label: None,
            dims: DimensionSignature::Bipartite { m: 1, n: 4 },
            entries: vec![[0.25, 0.0]; 16],
        };
        assert!(f.to_state().is_err());
    }
}
