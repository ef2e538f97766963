use std::f64::consts::FRAC_PI_2;

use esdlab_core::entanglement::{concurrence, measures, negativity, partial_transpose};
use esdlab_core::linalg::{c, hermitian_eigenvalues, kron, Mat2};
use esdlab_core::qstate::{
    bloch_vectors, haar_pure_vector, haar_unitary, linear_entropy, make_ansatz, random_state,
    AnsatzParams, DensityMatrix, RandomSpec, SpectrumMode,
};
use nalgebra::Matrix2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_params(rng: &mut ChaCha8Rng) -> AnsatzParams {
    AnsatzParams::new(
        rng.random_range(0.0..=1.0),
        rng.random_range(0.0..=FRAC_PI_2),
    )
    .unwrap()
}

/// Two-sample Kolmogorov–Smirnov statistic.
fn ks_statistic(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

#[test]
fn bloch_lengths_match_partial_trace() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..1000 {
        let p = random_params(&mut rng);
        let rho = make_ansatz(p);
        // Reduced states read straight off the diagonal in |00⟩,|01⟩,|10⟩,|11⟩.
        let d: Vec<f64> = (0..4).map(|k| rho.entry(k, k).re).collect();
        let z1 = (d[0] + d[1]) - (d[2] + d[3]);
        let z2 = (d[0] + d[2]) - (d[1] + d[3]);
        let b = bloch_vectors(&rho);
        assert!((b.r1_len - z1.abs()).abs() < 1e-12);
        assert!((b.r2_len - z2.abs()).abs() < 1e-12);

        let (r, u) = (p.r(), (2.0 * p.theta()).cos());
        assert!((b.r1_len - (r * u + 1.0 - r).abs()).abs() < 1e-12);
        assert!((b.r2_len - (r * u - (1.0 - r)).abs()).abs() < 1e-12);
        assert!((linear_entropy(&rho) - 8.0 / 3.0 * r * (1.0 - r)).abs() < 1e-12);
    }
}

#[test]
fn ansatz_parameters_recoverable_from_entries() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for _ in 0..1000 {
        let r = rng.random_range(1e-3..=1.0);
        let theta = rng.random_range(1e-3..FRAC_PI_2 - 1e-3);
        let rho = make_ansatz(AnsatzParams::new(r, theta).unwrap());
        let (a, b, coh) = (rho.entry(0, 0).re, rho.entry(3, 3).re, rho.entry(0, 3).re);
        let r_back = a + b;
        let theta_back = 0.5 * (2.0 * coh).atan2(a - b);
        assert!((r_back - r).abs() < 1e-10);
        assert!(
            (theta_back - theta).abs() < 1e-10,
            "{theta_back} vs {theta}"
        );
    }
}

#[test]
fn haar_invariance_smoke_test() {
    let n = 5000;
    let spec = RandomSpec::new(103, 2 * n, SpectrumMode::UniformSimplex);
    let v = haar_unitary(&mut ChaCha8Rng::seed_from_u64(7));
    let first: Vec<DensityMatrix> = (0..n).map(|i| random_state(&spec, i)).collect();
    let second: Vec<DensityMatrix> = (n..2 * n)
        .map(|i| random_state(&spec, i).conjugate_by(&v))
        .collect();
    let critical = 1.628 * (2.0 / n as f64).sqrt();

    let purity = |set: &[DensityMatrix]| set.iter().map(DensityMatrix::purity).collect::<Vec<_>>();
    let d = ks_statistic(purity(&first), purity(&second));
    assert!(d < critical, "purity KS D = {d}, critical {critical}");

    let conc = |set: &[DensityMatrix]| {
        set.iter()
            .map(|r| concurrence(r).unwrap())
            .collect::<Vec<_>>()
    };
    let d = ks_statistic(conc(&first), conc(&second));
    assert!(d < critical, "concurrence KS D = {d}, critical {critical}");
}

#[test]
fn ks_statistic_detects_a_shift() {
    let a: Vec<f64> = (0..1000).map(|i| i as f64 / 1000.0).collect();
    let b: Vec<f64> = a.iter().map(|x| x + 0.2).collect();
    assert!((ks_statistic(a.clone(), b) - 0.2).abs() < 2e-3);
    assert_eq!(ks_statistic(a.clone(), a), 0.0);
}

#[test]
fn closed_forms_match_generic_measures() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    for _ in 0..10_000 {
        let p = random_params(&mut rng);
        let m = measures(&make_ansatz(p)).unwrap();
        let (r, s2) = (p.r(), (2.0 * p.theta()).sin());
        let n = ((r * s2).powi(2) + (1.0 - r).powi(2)).sqrt() - (1.0 - r);
        assert!((m.concurrence - r * s2).abs() <= 1e-10);
        assert!((m.negativity - n).abs() <= 1e-10);
    }
}

#[test]
fn concurrence_negativity_region() {
    for mode in [SpectrumMode::UniformSimplex, SpectrumMode::AlphaAngles] {
        let spec = RandomSpec::new(105, 10_000, mode);
        for i in 0..spec.count {
            let rho = random_state(&spec, i);
            let m = measures(&rho).unwrap();
            let (cc, n) = (m.concurrence, m.negativity);
            let lower = ((1.0 - cc).powi(2) + cc * cc).sqrt() - (1.0 - cc);
            assert!(n <= cc + 1e-10, "draw {i}: N {n} > C {cc}");
            assert!(n >= lower - 1e-10, "draw {i}: N {n} below {lower}");

            let pt = hermitian_eigenvalues(&partial_transpose(&rho)).unwrap();
            let negatives = pt.iter().filter(|&&x| x < -1e-12).count();
            assert!(negatives <= 1, "draw {i}: {negatives} negative eigenvalues");
        }
    }
}

#[test]
fn pure_states_have_equal_measures() {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    for _ in 0..1000 {
        let rho = DensityMatrix::pure(haar_pure_vector(&mut rng)).unwrap();
        let (cc, n) = (concurrence(&rho).unwrap(), negativity(&rho).unwrap());
        assert!((cc - n).abs() <= 1e-10);
    }
}

fn local_unitary(rng: &mut ChaCha8Rng) -> Mat2 {
    let (a, b, g) = (
        rng.random_range(0.0..6.3),
        rng.random_range(0.0..6.3),
        rng.random_range(0.0f64..1.6),
    );
    let e = |x: f64| c(x.cos(), x.sin());
    Matrix2::new(
        e(a) * g.cos(),
        e(b) * g.sin(),
        -e(-b) * g.sin(),
        e(-a) * g.cos(),
    )
}

#[test]
fn local_unitaries_preserve_entanglement() {
    let spec = RandomSpec::new(107, 500, SpectrumMode::AlphaAngles);
    let mut rng = ChaCha8Rng::seed_from_u64(108);
    for i in 0..spec.count {
        let rho = random_state(&spec, i);
        let u = kron(&local_unitary(&mut rng), &local_unitary(&mut rng));
        let before = measures(&rho).unwrap();
        let after = measures(&rho.conjugate_by(&u)).unwrap();
        assert!((before.concurrence - after.concurrence).abs() <= 1e-10);
        assert!((before.negativity - after.negativity).abs() <= 1e-10);
    }
}
