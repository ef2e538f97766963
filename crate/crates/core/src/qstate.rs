//! Two-qubit density matrices, the ansatz family and random-state generation.
//!
//! All matrices use the computational basis in the order
//! `(|00⟩, |01⟩, |10⟩, |11⟩)`; qubit 1 is the left tensor factor.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{Vector4, QR};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{self, c, hermitian_eigenvalues, Mat4, C64, PSD_TOL, RANK_EPS, ZERO};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;

/// A validated two-qubit state: Hermitian, unit trace and positive
/// semidefinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    m: Mat4,
}

impl DensityMatrix {
    pub fn new(m: Mat4) -> Result<Self> {
        let herm = linalg::hermiticity_defect(&m);
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (max |ρ - ρ†| = {herm:e})"
            )));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = hermitian_eigenvalues(&linalg::hermitian_part(&m))?[0];
        if min < -PSD_TOL {
            return Err(Error::InvalidState(format!(
                "not positive semidefinite (eigenvalue {min:e})"
            )));
        }
        Ok(DensityMatrix { m })
    }

    /// Wraps a matrix that is a state by construction. The matrix is
    /// symmetrized so downstream eigen-solvers see an exactly Hermitian input.
    pub(crate) fn from_matrix_unchecked(m: Mat4) -> Self {
        DensityMatrix {
            m: linalg::hermitian_part(&m),
        }
    }

    pub fn from_rows(rows: [[C64; 4]; 4]) -> Result<Self> {
        Self::new(Mat4::from_fn(|i, j| rows[i][j]))
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) state vector.
    pub fn pure(psi: [C64; 4]) -> Result<Self> {
        let norm2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if norm2 <= f64::MIN_POSITIVE {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let m = Mat4::from_fn(|i, j| psi[i] * psi[j].conj() / norm2);
        Ok(Self::from_matrix_unchecked(m))
    }

    pub fn maximally_mixed() -> Self {
        Self::from_matrix_unchecked(Mat4::identity() * c(0.25, 0.0))
    }

    /// Computational basis projector `|k⟩⟨k|`, `k ∈ 0..4`.
    pub fn basis(k: usize) -> Self {
        assert!(k < 4, "basis index {k} out of range");
        let mut m = Mat4::zeros();
        m[(k, k)] = c(1.0, 0.0);
        Self::from_matrix_unchecked(m)
    }

    /// The Bell state `(|00⟩ + |11⟩)/√2`.
    pub fn bell() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::pure([c(h, 0.0), ZERO, ZERO, c(h, 0.0)]).expect("normalized")
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.m[(i, j)]
    }

    /// `(1 - w) self + w other`.
    pub fn mix(&self, other: &DensityMatrix, w: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::out_of_range("weight", w, "[0, 1]"));
        }
        Ok(Self::from_matrix_unchecked(
            self.m * c(1.0 - w, 0.0) + other.m * c(w, 0.0),
        ))
    }

    /// `U ρ U†` for a unitary `U`.
    pub fn conjugate_by(&self, u: &Mat4) -> Self {
        Self::from_matrix_unchecked(u * self.m * u.adjoint())
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.m.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn eigenvalues(&self) -> Result<Vector4<f64>> {
        hermitian_eigenvalues(&self.m)
    }
}

impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: [[[f64; 2]; 4]; 4] = std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let z = self.m[(i, j)];
                [z.re, z.im]
            })
        });
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = <[[[f64; 2]; 4]; 4]>::deserialize(deserializer)?;
        let m = Mat4::from_fn(|i, j| c(rows[i][j][0], rows[i][j][1]));
        DensityMatrix::new(m).map_err(de::Error::custom)
    }
}

/// Parameters `(r, θ)` of the ansatz state
/// `r |ψ(θ)⟩⟨ψ(θ)| + (1 - r) |01⟩⟨01|` with `|ψ(θ)⟩ = cos θ |00⟩ + sin θ |11⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawAnsatz")]
pub struct AnsatzParams {
    r: f64,
    theta: f64,
}

#[derive(Deserialize)]
struct RawAnsatz {
    r: f64,
    theta: f64,
}

impl TryFrom<RawAnsatz> for AnsatzParams {
    type Error = Error;

    fn try_from(raw: RawAnsatz) -> Result<Self> {
        AnsatzParams::new(raw.r, raw.theta)
    }
}

// Slack for parameters produced by root finders that land a hair outside
// the closed interval.
const PARAM_SLACK: f64 = 1e-12;

impl AnsatzParams {
    pub fn new(r: f64, theta: f64) -> Result<Self> {
        if !(-PARAM_SLACK..=1.0 + PARAM_SLACK).contains(&r) {
            return Err(Error::out_of_range("r", r, "[0, 1]"));
        }
        if !(-PARAM_SLACK..=FRAC_PI_2 + PARAM_SLACK).contains(&theta) {
            return Err(Error::out_of_range("theta", theta, "[0, π/2]"));
        }
        Ok(AnsatzParams {
            r: r.clamp(0.0, 1.0),
            theta: theta.clamp(0.0, FRAC_PI_2),
        })
    }

    /// From the `(α, β) = (r cos²θ, r sin²θ)` chart.
    pub fn from_alpha_beta(alpha: f64, beta: f64) -> Result<Self> {
        let r = alpha + beta;
        if r <= 0.0 {
            return Self::new(0.0, 0.0);
        }
        let cos2 = ((alpha - beta) / r).clamp(-1.0, 1.0);
        Self::new(r, 0.5 * cos2.acos())
    }

    /// From the filter chart `(c, p)`: `ρ(c, p)` is `ρ_ansatz(c, π/4)` passed
    /// through the local filter `diag(1, p)` on qubit 2.
    pub fn from_cp(c: f64, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&c) {
            return Err(Error::out_of_range("c", c, "[0, 1]"));
        }
        if p.is_nan() || p < 0.0 {
            return Err(Error::out_of_range("p", p, "[0, ∞]"));
        }
        let theta = p.atan();
        let r = if p <= 1.0 {
            let p2 = p * p;
            let den = 2.0 * p2 + c * (1.0 - p2);
            if den <= 0.0 {
                return Err(Error::Degenerate(
                    "(c, p) = (0, 0) has no ansatz image".into(),
                ));
            }
            c * (1.0 + p2) / den
        } else {
            let q = (1.0 / p).powi(2);
            c * (1.0 + q) / (2.0 + c * (q - 1.0))
        };
        Self::new(r, theta)
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn alpha(&self) -> f64 {
        self.r * self.theta.cos().powi(2)
    }

    pub fn beta(&self) -> f64 {
        self.r * self.theta.sin().powi(2)
    }

    /// The `(c, p)` chart; `p = tan θ` is infinite at `θ = π/2`.
    pub fn to_cp(&self) -> (f64, f64) {
        let u = (2.0 * self.theta).cos();
        let den = 1.0 - self.r * u;
        let c = if den <= 0.0 {
            1.0
        } else {
            self.r * (1.0 - u) / den
        };
        let p = if self.theta >= FRAC_PI_2 {
            f64::INFINITY
        } else {
            self.theta.tan()
        };
        (c, p)
    }
}

pub fn make_ansatz(p: AnsatzParams) -> DensityMatrix {
    let (s, co) = p.theta.sin_cos();
    let r = p.r;
    let mut m = Mat4::zeros();
    m[(0, 0)] = c(r * co * co, 0.0);
    m[(3, 3)] = c(r * s * s, 0.0);
    m[(0, 3)] = c(r * co * s, 0.0);
    m[(3, 0)] = c(r * co * s, 0.0);
    m[(1, 1)] = c(1.0 - r, 0.0);
    DensityMatrix::from_matrix_unchecked(m)
}

/// Reduced Bloch vectors of both qubits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlochData {
    pub r1: [f64; 3],
    pub r2: [f64; 3],
    pub r1_len: f64,
    pub r2_len: f64,
    pub delta_r: f64,
}

/// Reduced state of qubit 1 (`second = false`) or qubit 2.
pub(crate) fn reduced(rho: &Mat4, second: bool) -> [[C64; 2]; 2] {
    let mut out = [[ZERO; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            out[a][b] = if second {
                rho[(a, b)] + rho[(2 + a, 2 + b)]
            } else {
                rho[(2 * a, 2 * b)] + rho[(2 * a + 1, 2 * b + 1)]
            };
        }
    }
    out
}

fn bloch_of(q: [[C64; 2]; 2]) -> [f64; 3] {
    [2.0 * q[0][1].re, -2.0 * q[0][1].im, (q[0][0] - q[1][1]).re]
}

fn norm3(v: &[f64; 3]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn bloch_vectors(rho: &DensityMatrix) -> BlochData {
    let r1 = bloch_of(reduced(&rho.m, false));
    let r2 = bloch_of(reduced(&rho.m, true));
    let r1_len = norm3(&r1);
    let r2_len = norm3(&r2);
    BlochData {
        r1,
        r2,
        r1_len,
        r2_len,
        delta_r: r1_len - r2_len,
    }
}

/// `S_L = (4/3)(1 - tr ρ²)`.
pub fn linear_entropy(rho: &DensityMatrix) -> f64 {
    (4.0 / 3.0 * (1.0 - rho.purity())).clamp(0.0, 1.0)
}

/// Uhlmann fidelity `[tr √(√a b √a)]²`.
pub fn fidelity(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    let sa = linalg::sqrt_psd(&a.m)?;
    let inner = linalg::hermitian_part(&(sa * b.m * sa));
    let values = hermitian_eigenvalues(&inner)?;
    if values[0] < -PSD_TOL {
        return Err(Error::InvalidState(format!(
            "fidelity kernel not PSD (eigenvalue {:e})",
            values[0]
        )));
    }
    let root_trace: f64 = values
        .iter()
        .map(|&v| if v < RANK_EPS { 0.0 } else { v.sqrt() })
        .sum();
    Ok((root_trace * root_trace).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpectrumMode {
    /// Eigenvalues uniform on the probability simplex.
    UniformSimplex,
    /// Eigenvalues `cos²α₁cos²α₂, cos²α₁sin²α₂, sin²α₁cos²α₃, sin²α₁sin²α₃`
    /// with `αⱼ` uniform on `[0, π/2]`.
    AlphaAngles,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomSpec {
    pub seed: u64,
    pub count: usize,
    pub spectrum_mode: SpectrumMode,
    /// Upper end of the mixing weight δ for `(1 - δ) ρ_ansatz + δ ρ_random`;
    /// zero disables the mixture.
    pub mix_delta_max: f64,
}

impl RandomSpec {
    pub fn new(seed: u64, count: usize, spectrum_mode: SpectrumMode) -> Self {
        RandomSpec {
            seed,
            count,
            spectrum_mode,
            mix_delta_max: 0.0,
        }
    }

    pub fn with_mixture(mut self, mix_delta_max: f64) -> Self {
        self.mix_delta_max = mix_delta_max;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::out_of_range("count", 0.0, "positive integers"));
        }
        if !(0.0..=1.0).contains(&self.mix_delta_max) {
            return Err(Error::out_of_range(
                "mix_delta_max",
                self.mix_delta_max,
                "[0, 1]",
            ));
        }
        Ok(())
    }

    /// Generator for draw `index`: one ChaCha stream per index, so a draw
    /// does not depend on which other draws were made.
    pub fn rng(&self, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        rng
    }
}

/// Haar-random 4×4 unitary: QR of a complex Ginibre matrix with the phases of
/// `diag(R)` moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R) -> Mat4 {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let z = Mat4::from_fn(|_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re * scale, im * scale)
    });
    let qr = QR::new(z);
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..4 {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            c(1.0, 0.0)
        };
        q.column_mut(j).iter_mut().for_each(|x| *x *= phase);
    }
    q
}

/// Haar-random pure state vector.
pub fn haar_pure_vector<R: Rng + ?Sized>(rng: &mut R) -> [C64; 4] {
    let u = haar_unitary(rng);
    std::array::from_fn(|i| u[(i, 0)])
}

pub(crate) fn random_spectrum<R: Rng + ?Sized>(mode: SpectrumMode, rng: &mut R) -> [f64; 4] {
    match mode {
        SpectrumMode::UniformSimplex => {
            let e: [f64; 4] = std::array::from_fn(|_| rng.sample(Exp1));
            let total: f64 = e.iter().sum();
            e.map(|x| x / total)
        }
        SpectrumMode::AlphaAngles => {
            let a: [f64; 3] = std::array::from_fn(|_| rng.random_range(0.0..FRAC_PI_2));
            alpha_angle_spectrum(a)
        }
    }
}

pub fn alpha_angle_spectrum(alpha: [f64; 3]) -> [f64; 4] {
    let (s1, c1) = alpha[0].sin_cos();
    let (s2, c2) = alpha[1].sin_cos();
    let (s3, c3) = alpha[2].sin_cos();
    [
        c1 * c1 * c2 * c2,
        c1 * c1 * s2 * s2,
        s1 * s1 * c3 * c3,
        s1 * s1 * s3 * s3,
    ]
}

/// Draw `index` of the ensemble described by `spec`.
pub fn random_state(spec: &RandomSpec, index: usize) -> DensityMatrix {
    let mut rng = spec.rng(index);
    let spectrum = random_spectrum(spec.spectrum_mode, &mut rng);
    let u = haar_unitary(&mut rng);
    let diag = Mat4::from_diagonal(&Vector4::from(spectrum).map(|x| c(x, 0.0)));
    let random = u * diag * u.adjoint();
    let random = random / random.trace();
    let random = DensityMatrix::from_matrix_unchecked(random);
    if spec.mix_delta_max > 0.0 {
        let r: f64 = rng.random_range(0.0..=1.0);
        let theta: f64 = rng.random_range(0.0..=FRAC_PI_2);
        let delta: f64 = rng.random_range(0.0..=spec.mix_delta_max);
        let ansatz = make_ansatz(AnsatzParams { r, theta });
        ansatz.mix(&random, delta).expect("delta in [0, 1]")
    } else {
        random
    }
}
