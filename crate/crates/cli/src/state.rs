//! JSON state files.
//!
//! A state file holds exactly one of
//!
//! ```json
//! {"ansatz": {"r": 0.8, "theta": 0.7853981633974483}}
//! {"pure": [[0.7071067811865476, 0], [0, 0], [0, 0], [0.7071067811865476, 0]]}
//! {"matrix": [[[0.5, 0], [0, 0], [0, 0], [0.5, 0]], ...]}
//! ```
//!
//! Complex numbers are `[re, im]` pairs; matrices are lists of rows in the
//! basis `|00⟩, |01⟩, |10⟩, |11⟩`.

use std::path::Path;

use esdlab_core::linalg::c;
use esdlab_core::qstate::{make_ansatz, AnsatzParams, DensityMatrix};
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
enum StateFile {
    Ansatz(AnsatzParams),
    Pure([[f64; 2]; 4]),
    Matrix(DensityMatrix),
}

#[derive(Debug)]
pub struct LoadedState {
    pub rho: DensityMatrix,
    pub ansatz: Option<AnsatzParams>,
}

pub fn load(path: &Path) -> Result<LoadedState, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse(&text).map_err(|e| format!("{}:{e}", path.display()))
}

pub fn parse(text: &str) -> Result<LoadedState, String> {
    // Validation errors raised after a value is read carry no position.
    let file: StateFile = serde_json::from_str(text).map_err(|e| match e.line() {
        0 => format!(" {e}"),
        line => format!("{line}:{}: {e}", e.column()),
    })?;
    match file {
        StateFile::Ansatz(p) => Ok(LoadedState {
            rho: make_ansatz(p),
            ansatz: Some(p),
        }),
        StateFile::Pure(amps) => {
            let psi = amps.map(|[re, im]| c(re, im));
            let rho = DensityMatrix::pure(psi).map_err(|e| format!(" {e}"))?;
            Ok(LoadedState { rho, ansatz: None })
        }
        StateFile::Matrix(rho) => Ok(LoadedState { rho, ansatz: None }),
    }
}
