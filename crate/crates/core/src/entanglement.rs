//! Concurrence, negativity and partial transposition.

use nalgebra::SVD;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, hermitian_eigen, hermitian_eigenvalues, kron, sigma_y, Mat4, RANK_EPS};
use crate::qstate::{AnsatzParams, DensityMatrix};

/// Eigenvalues of the partial transpose below `-NEG_EIG_TOL` count as
/// negative when checking the single-negative-eigenvalue property.
pub const NEG_EIG_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Measures {
    pub concurrence: f64,
    pub negativity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Concurrence,
    Negativity,
}

impl Measure {
    pub const ALL: [Measure; 2] = [Measure::Concurrence, Measure::Negativity];

    pub fn of(self, rho: &DensityMatrix) -> Result<f64> {
        match self {
            Measure::Concurrence => concurrence(rho),
            Measure::Negativity => negativity(rho),
        }
    }

    pub fn of_ansatz(self, p: AnsatzParams) -> f64 {
        match self {
            Measure::Concurrence => concurrence_ansatz(p),
            Measure::Negativity => negativity_ansatz(p),
        }
    }

    /// Single-letter label used in CSV output.
    pub fn label(self) -> &'static str {
        match self {
            Measure::Concurrence => "C",
            Measure::Negativity => "N",
        }
    }
}

impl std::fmt::Display for Measure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

pub fn measures(rho: &DensityMatrix) -> Result<Measures> {
    Ok(Measures {
        concurrence: concurrence(rho)?,
        negativity: negativity(rho)?,
    })
}

/// `√λᵢ` for the eigenvalues `λᵢ` of `R = ρ (σy⊗σy) ρ* (σy⊗σy)`, descending.
///
/// With `ρ = W W†` (`W = V √D`), the `√λᵢ` are the singular values of the
/// complex-symmetric matrix `Wᵀ (σy⊗σy) W`, which avoids taking square roots of
/// round-off sized eigenvalues of `R`.
pub fn wootters_roots(rho: &DensityMatrix) -> Result<[f64; 4]> {
    let (values, vectors) = hermitian_eigen(rho.matrix())?;
    let mut w = vectors;
    for j in 0..4 {
        let d = if values[j] < RANK_EPS {
            0.0
        } else {
            values[j].sqrt()
        };
        w.column_mut(j).iter_mut().for_each(|z| *z *= d);
    }
    let yy = kron(&sigma_y(), &sigma_y());
    let tau = w.transpose() * yy * w;
    let svd = SVD::try_new(tau, false, false, f64::EPSILON, 0).ok_or(Error::EigenFailure)?;
    let mut sv: [f64; 4] = std::array::from_fn(|i| svd.singular_values[i]);
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

/// Wootters concurrence `max{0, √λ₁ − √λ₂ − √λ₃ − √λ₄}`.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    let s = wootters_roots(rho)?;
    Ok((s[0] - s[1] - s[2] - s[3]).max(0.0))
}

/// `ρ^{T₂}`: transpose on qubit 2,
/// `⟨a b|ρ^{T₂}|a' b'⟩ = ⟨a b'|ρ|a' b⟩`.
pub fn partial_transpose(rho: &DensityMatrix) -> Mat4 {
    partial_transpose_matrix(rho.matrix())
}

pub(crate) fn partial_transpose_matrix(m: &Mat4) -> Mat4 {
    Mat4::from_fn(|i, j| {
        let (a, b) = (i / 2, i % 2);
        let (ap, bp) = (j / 2, j % 2);
        m[(2 * a + bp, 2 * ap + b)]
    })
}

/// Smallest eigenvalue of `ρ^{T₂}`; negative exactly when the state is
/// entangled.
pub fn min_pt_eigenvalue(m: &Mat4) -> Result<f64> {
    linalg::min_eigenvalue(&partial_transpose_matrix(m))
}

/// `N = 2 Σ |λⱼ|` over the negative eigenvalues of `ρ^{T₂}`.
pub fn negativity(rho: &DensityMatrix) -> Result<f64> {
    let values = hermitian_eigenvalues(&partial_transpose(rho))?;
    let negatives = values.iter().filter(|&&v| v < -NEG_EIG_TOL).count();
    assert!(
        negatives <= 1,
        "partial transpose of a two-qubit state has {negatives} negative eigenvalues: {values:?}"
    );
    Ok(2.0 * values.iter().map(|&v| (-v).max(0.0)).sum::<f64>())
}

/// `C = r sin 2θ`.
pub fn concurrence_ansatz(p: AnsatzParams) -> f64 {
    p.r() * (2.0 * p.theta()).sin()
}

/// `N = √(r² sin² 2θ + (1 − r)²) − (1 − r)`.
pub fn negativity_ansatz(p: AnsatzParams) -> f64 {
    let q = 1.0 - p.r();
    let sc = p.r() * (2.0 * p.theta()).sin();
    (sc * sc + q * q).sqrt() - q
}

/// The same concurrence through the filter chart: `2cp / (c + (2 − c) p²)`.
pub fn concurrence_cp(c: f64, p: f64) -> f64 {
    if p.is_infinite() {
        return 0.0;
    }
    let den = c + (2.0 - c) * p * p;
    if den == 0.0 {
        0.0
    } else {
        2.0 * c * p / den
    }
}
