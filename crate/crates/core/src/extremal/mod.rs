//! Most robust (MRES) and most fragile (MFES) entangled states for a fixed
//! concurrence or negativity.
//!
//! All extremal states live in the ansatz family. Families are located
//! either at a fixed critical noise `s` (the constraint `𝒫 = 0`) or at a
//! fixed entanglement value, which is what the envelope lookup needs.

mod concurrence;
mod envelope;
mod family;
mod negativity;

pub use concurrence::{
    mfes_concurrence_at, mfes_concurrence_general, mfes_concurrence_one_sided,
    mfes_concurrence_uniform, mres_concurrence, omega, omega_tilde, quasi_mfes, restraint_alpha,
};
pub use envelope::{envelope, iso_curve_extremes, Envelope};
pub use family::{family, write_family_csv, FamilyKind};
pub use negativity::{
    cpn_p, cpn_singular_point, lagrange_function, mfes_negativity_one_sided,
    mfes_negativity_one_sided_at, mres_negativity_uniform, negativity_extremals, CURVE_SAMPLES,
};

use serde::Serialize;

use crate::entanglement::Measure;
use crate::error::Result;
use crate::qstate::AnsatzParams;
use crate::robustness::s_crit_ansatz;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Kind {
    #[serde(rename = "MRES")]
    Mres,
    #[serde(rename = "MFES")]
    Mfes,
    #[serde(rename = "QuasiMFES")]
    QuasiMfes,
}

impl Kind {
    pub fn label(self) -> &'static str {
        match self {
            Kind::Mres => "MRES",
            Kind::Mfes => "MFES",
            Kind::QuasiMfes => "QuasiMFES",
        }
    }
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtremalPoint {
    pub params: AnsatzParams,
    pub kind: Kind,
    pub measure: Measure,
    pub entanglement: f64,
    pub robustness: f64,
    pub delta: f64,
}

impl ExtremalPoint {
    /// Fills in the entanglement from the closed form and the robustness
    /// from the ESD polynomial.
    pub fn new(params: AnsatzParams, kind: Kind, measure: Measure, delta: f64) -> Result<Self> {
        let robustness = s_crit_ansatz(params, delta)?.robustness;
        Ok(ExtremalPoint {
            params,
            kind,
            measure,
            entanglement: measure.of_ansatz(params),
            robustness,
            delta,
        })
    }
}
