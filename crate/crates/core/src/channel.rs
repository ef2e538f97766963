//! Local depolarizing noise with unequal coupling, and local filtering.
//!
//! A depolarizing channel with parameter `sᵢ` shrinks the Bloch vector of
//! qubit `i` by `sᵢ`. The two qubits see `s₁ = s^{1+Δ}` and `s₂ = s^{1−Δ}`
//! where `s = e^{−t}` and `Δ ∈ [0, 1]` is the nonuniformity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, identity2, kron, paulis, Mat2, Mat4, ZERO};
use crate::qstate::DensityMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    delta: f64,
    s: f64,
}

impl ChannelParams {
    pub fn new(delta: f64, s: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::out_of_range("delta", delta, "[0, 1]"));
        }
        if !(s > 0.0 && s <= 1.0) {
            return Err(Error::out_of_range("s", s, "(0, 1]"));
        }
        Ok(ChannelParams { delta, s })
    }

    pub fn uniform(s: f64) -> Result<Self> {
        Self::new(0.0, s)
    }

    pub fn one_sided(s: f64) -> Result<Self> {
        Self::new(1.0, s)
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn s1(&self) -> f64 {
        self.s.powf(1.0 + self.delta)
    }

    pub fn s2(&self) -> f64 {
        self.s.powf(1.0 - self.delta)
    }

    /// Elapsed time `t = −ln s` for unit total coupling.
    pub fn time(&self) -> f64 {
        -self.s.ln()
    }
}

/// Per-qubit noise parameters `(s₁, s₂)` at global noise `s`.
pub fn local_parameters(delta: f64, s: f64) -> (f64, f64) {
    (s.powf(1.0 + delta), s.powf(1.0 - delta))
}

/// Evolves `rho` through the channel. Computed from the Bloch-scaling form
/// `ρ ↦ sᵢ ρ + (1 − sᵢ) (I/2 on qubit i) ⊗ tr_i ρ`, applied to each qubit.
pub fn apply_depolarizing(rho: &DensityMatrix, ch: ChannelParams) -> DensityMatrix {
    DensityMatrix::from_matrix_unchecked(depolarize_matrix(rho.matrix(), ch.s1(), ch.s2()))
}

/// Same map with explicit per-qubit parameters.
pub fn apply_local_depolarizing(rho: &DensityMatrix, s1: f64, s2: f64) -> DensityMatrix {
    DensityMatrix::from_matrix_unchecked(depolarize_matrix(rho.matrix(), s1, s2))
}

pub(crate) fn depolarize_matrix(m: &Mat4, s1: f64, s2: f64) -> Mat4 {
    let mut out = *m;
    if s1 != 1.0 {
        // I/2 ⊗ tr₁ρ
        let mut mixed = Mat4::zeros();
        for b in 0..2 {
            for bp in 0..2 {
                let red = (m[(b, bp)] + m[(2 + b, 2 + bp)]) * 0.5;
                mixed[(b, bp)] = red;
                mixed[(2 + b, 2 + bp)] = red;
            }
        }
        out = out * c(s1, 0.0) + mixed * c(1.0 - s1, 0.0);
    }
    if s2 != 1.0 {
        // tr₂ρ ⊗ I/2
        let mut mixed = Mat4::zeros();
        for a in 0..2 {
            for ap in 0..2 {
                let red = (out[(2 * a, 2 * ap)] + out[(2 * a + 1, 2 * ap + 1)]) * 0.5;
                mixed[(2 * a, 2 * ap)] = red;
                mixed[(2 * a + 1, 2 * ap + 1)] = red;
            }
        }
        out = out * c(s2, 0.0) + mixed * c(1.0 - s2, 0.0);
    }
    out
}

/// Single-qubit Kraus set `{½√(3s+1) I, ½√(1−s) σⱼ}`.
pub fn kraus_operators(s: f64) -> [Mat2; 4] {
    let k0 = 0.5 * (3.0 * s + 1.0).sqrt();
    let k = 0.5 * (1.0 - s).max(0.0).sqrt();
    let [x, y, z] = paulis();
    [
        identity2() * c(k0, 0.0),
        x * c(k, 0.0),
        y * c(k, 0.0),
        z * c(k, 0.0),
    ]
}

/// Evolves `rho` by summing over the 16 product Kraus operators.
pub fn apply_depolarizing_kraus(rho: &DensityMatrix, ch: ChannelParams) -> DensityMatrix {
    let first = kraus_operators(ch.s1());
    let second = kraus_operators(ch.s2());
    let m = rho.matrix();
    let mut out = Mat4::from_element(ZERO);
    for a in &first {
        for b in &second {
            let k = kron(a, b);
            out += k * m * k.adjoint();
        }
    }
    DensityMatrix::from_matrix_unchecked(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Qubit1,
    Qubit2,
}

/// Local filter `M = I + a·σ` acting on one qubit. `|a| ≤ 1` keeps `M`
/// positive semidefinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalFilter {
    a: [f64; 3],
    side: Side,
}

impl LocalFilter {
    pub fn new(a: [f64; 3], side: Side) -> Result<Self> {
        let len = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len.is_nan() || len > 1.0 + 1e-15 {
            return Err(Error::out_of_range("|a|", len, "[0, 1]"));
        }
        Ok(LocalFilter { a, side })
    }

    pub fn a(&self) -> [f64; 3] {
        self.a
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn single_qubit_matrix(&self) -> Mat2 {
        let [x, y, z] = paulis();
        identity2() + x * c(self.a[0], 0.0) + y * c(self.a[1], 0.0) + z * c(self.a[2], 0.0)
    }

    pub fn matrix(&self) -> Mat4 {
        let m = self.single_qubit_matrix();
        match self.side {
            Side::Qubit1 => kron(&m, &identity2()),
            Side::Qubit2 => kron(&identity2(), &m),
        }
    }
}

pub const MIN_FILTER_NORM: f64 = 1e-12;

/// `ρ₁ = γ (I⊗M) ρ (I⊗M†)` with `1/γ` the trace of the unnormalized image.
pub fn apply_filter(rho: &DensityMatrix, f: &LocalFilter) -> Result<(DensityMatrix, f64)> {
    let m = f.matrix();
    let image = m * rho.matrix() * m.adjoint();
    let tr = image.trace().re;
    if tr <= MIN_FILTER_NORM {
        return Err(Error::VanishingNormalization(tr));
    }
    let gamma = 1.0 / tr;
    Ok((
        DensityMatrix::from_matrix_unchecked(image * c(gamma, 0.0)),
        gamma,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::{concurrence, negativity};
    use crate::qstate::{
        bloch_vectors, make_ansatz, random_state, AnsatzParams, RandomSpec, SpectrumMode,
    };
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_4;

    fn dist(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
        (a.matrix() - b.matrix()).norm()
    }

    #[test]
    fn parameter_ranges() {
        assert!(ChannelParams::new(1.2, 0.5).is_err());
        assert!(ChannelParams::new(0.5, 0.0).is_err());
        assert!(ChannelParams::new(0.5, 1.1).is_err());
        let ch = ChannelParams::new(0.0, 0.7).unwrap();
        assert_eq!((ch.s1(), ch.s2()), (0.7, 0.7));
        let ch = ChannelParams::one_sided(0.7).unwrap();
        assert_abs_diff_eq!(ch.s1(), 0.49, epsilon = 1e-15);
        assert_eq!(ch.s2(), 1.0);
        let ch = ChannelParams::new(0.3, 0.6).unwrap();
        assert!(ch.s1() <= ch.s2());
    }

    #[test]
    fn identity_at_s_one() {
        let spec = RandomSpec::new(2, 10, SpectrumMode::UniformSimplex);
        for i in 0..10 {
            let rho = random_state(&spec, i);
            for delta in [0.0, 0.4, 1.0] {
                let ch = ChannelParams::new(delta, 1.0).unwrap();
                assert!(dist(&apply_depolarizing(&rho, ch), &rho) < 1e-15);
                assert!(dist(&apply_depolarizing_kraus(&rho, ch), &rho) < 1e-15);
            }
        }
    }

    #[test]
    fn one_sided_bell_evolution() {
        let s = 0.8;
        let out = apply_depolarizing(&DensityMatrix::bell(), ChannelParams::one_sided(s).unwrap());
        let s2 = s * s;
        let expect = [
            (0, 0, (1.0 + s2) / 4.0),
            (3, 3, (1.0 + s2) / 4.0),
            (1, 1, (1.0 - s2) / 4.0),
            (2, 2, (1.0 - s2) / 4.0),
            (0, 3, s2 / 2.0),
            (3, 0, s2 / 2.0),
        ];
        for (i, j, v) in expect {
            assert_abs_diff_eq!(out.entry(i, j).re, v, epsilon = 1e-15);
        }
        // 2(|ρ₀₃| − √(ρ₁₁ρ₂₂)); vanishes at s² = 1/3.
        assert_abs_diff_eq!(
            concurrence(&out).unwrap(),
            ((3.0 * s2 - 1.0) / 2.0).max(0.0),
            epsilon = 1e-13
        );
        let dead = apply_depolarizing(
            &DensityMatrix::bell(),
            ChannelParams::one_sided(0.5).unwrap(),
        );
        assert_eq!(concurrence(&dead).unwrap(), 0.0);
    }

    #[test]
    fn full_depolarization_limit() {
        let spec = RandomSpec::new(5, 10, SpectrumMode::AlphaAngles);
        for i in 0..10 {
            let out = apply_depolarizing(
                &random_state(&spec, i),
                ChannelParams::uniform(1e-7).unwrap(),
            );
            assert!(dist(&out, &DensityMatrix::maximally_mixed()) < 1e-6);
        }
    }

    #[test]
    fn kraus_completeness() {
        for s in [0.0, 0.3, 1.0] {
            let sum: Mat2 = kraus_operators(s).iter().map(|k| k.adjoint() * k).sum();
            assert_abs_diff_eq!((sum - identity2()).norm(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn kraus_and_bloch_forms_agree() {
        let spec = RandomSpec::new(6, 100, SpectrumMode::UniformSimplex).with_mixture(0.05);
        for i in 0..100 {
            let rho = random_state(&spec, i);
            let ch = ChannelParams::new(
                (i as f64) / 99.0,
                0.05 + 0.9 * ((i * 37) % 100) as f64 / 100.0,
            )
            .unwrap();
            let a = apply_depolarizing(&rho, ch);
            let b = apply_depolarizing_kraus(&rho, ch);
            assert!(dist(&a, &b) <= 1e-12);
            DensityMatrix::new(*a.matrix()).unwrap();
        }
    }

    #[test]
    fn bloch_vectors_shrink_by_local_parameter() {
        let rho = make_ansatz(AnsatzParams::new(0.6, 0.4).unwrap());
        let ch = ChannelParams::new(0.5, 0.7).unwrap();
        let before = bloch_vectors(&rho);
        let after = bloch_vectors(&apply_depolarizing(&rho, ch));
        for k in 0..3 {
            assert_abs_diff_eq!(after.r1[k], ch.s1() * before.r1[k], epsilon = 1e-15);
            assert_abs_diff_eq!(after.r2[k], ch.s2() * before.r2[k], epsilon = 1e-15);
        }
    }

    #[test]
    fn identity_filter() {
        let rho = make_ansatz(AnsatzParams::new(0.6, 0.4).unwrap());
        let f = LocalFilter::new([0.0; 3], Side::Qubit2).unwrap();
        let (out, gamma) = apply_filter(&rho, &f).unwrap();
        assert!(dist(&out, &rho) < 1e-15);
        // M = I, so the unnormalized trace is 1.
        assert_abs_diff_eq!(gamma, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn filter_maps_bell_mixture_into_cp_chart() {
        for (cc, p) in [(0.5, 0.3), (0.9, 0.7), (0.2, 2.5), (1.0, 0.1)] {
            let rho0 = make_ansatz(AnsatzParams::new(cc, FRAC_PI_4).unwrap());
            let f = LocalFilter::new([0.0, 0.0, (1.0 - p) / (1.0 + p)], Side::Qubit2).unwrap();
            let (rho1, _) = apply_filter(&rho0, &f).unwrap();
            let expect = make_ansatz(AnsatzParams::from_cp(cc, p).unwrap());
            assert!(dist(&rho1, &expect) < 1e-14, "c={cc} p={p}");
        }
    }

    #[test]
    fn filtered_pure_state_stays_pure() {
        let f = LocalFilter::new([0.3, -0.2, 0.5], Side::Qubit1).unwrap();
        let rho = make_ansatz(AnsatzParams::new(1.0, 0.3).unwrap());
        let (out, _) = apply_filter(&rho, &f).unwrap();
        assert_abs_diff_eq!(out.purity(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn filter_errors() {
        assert!(LocalFilter::new([0.8, 0.8, 0.0], Side::Qubit1).is_err());
        // M = I - σz projects qubit 2 onto |1⟩; it annihilates |00⟩.
        let f = LocalFilter::new([0.0, 0.0, -1.0], Side::Qubit2).unwrap();
        let err = apply_filter(&DensityMatrix::basis(0), &f).unwrap_err();
        assert!(matches!(err, Error::VanishingNormalization(_)));
    }

    #[test]
    fn filtering_preserves_separability() {
        let f = LocalFilter::new([0.0, 0.6, 0.6], Side::Qubit1).unwrap();
        let (out, _) = apply_filter(&DensityMatrix::maximally_mixed(), &f).unwrap();
        assert!(negativity(&out).unwrap() < 1e-14);
    }

    proptest! {
        #[test]
        fn composition_multiplies_noise(delta in 0.0f64..=1.0, s in 0.05f64..=1.0, t in 0.05f64..=1.0, seed in 0u64..1000) {
            let rho = random_state(&RandomSpec::new(seed, 1, SpectrumMode::UniformSimplex), 0);
            let two_steps = apply_depolarizing(
                &apply_depolarizing(&rho, ChannelParams::new(delta, s).unwrap()),
                ChannelParams::new(delta, t).unwrap(),
            );
            let one_step = apply_depolarizing(&rho, ChannelParams::new(delta, s * t).unwrap());
            prop_assert!(dist(&two_steps, &one_step) <= 1e-12);
        }
    }
}
