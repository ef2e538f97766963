use esdlab_core::mcstats::{
    binned_averages, binned_trend, run_ensemble, write_binned_csv, write_ensemble_csv, BinKey,
    Ensemble, Quantity, DEFAULT_BINS,
};
use esdlab_core::qstate::{make_ansatz, AnsatzParams, RandomSpec, SpectrumMode};
use esdlab_core::robustness::normalized_robustness;
use esdlab_core::{Error, Measure};

fn csv_bytes(ensemble: &Ensemble) -> Vec<u8> {
    let mut out = Vec::new();
    write_ensemble_csv(&mut out, ensemble).unwrap();
    let series = binned_averages(
        &ensemble.records,
        BinKey::Robustness,
        10,
        Quantity::Concurrence,
    );
    write_binned_csv(&mut out, ensemble.delta, &[series]).unwrap();
    out
}

#[test]
fn identical_specs_give_identical_csv() {
    let spec = RandomSpec::new(301, 300, SpectrumMode::AlphaAngles).with_mixture(0.05);
    let a = csv_bytes(&run_ensemble(&spec, 0.5).unwrap());
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(3)
        .build()
        .unwrap();
    let b = pool.install(|| csv_bytes(&run_ensemble(&spec, 0.5).unwrap()));
    assert_eq!(a, b);
}

fn quantile(mut v: Vec<f64>, q: f64) -> f64 {
    v.sort_by(f64::total_cmp);
    v[((v.len() - 1) as f64 * q).round() as usize]
}

/// Per draw, the envelope distance `min(R̃, 1 − R̃)`; separable draws never
/// come near either curve and count as infinitely far.
fn draw_distances(ensemble: &Ensemble, measure: Measure) -> Vec<f64> {
    let mut d: Vec<f64> = ensemble
        .records
        .iter()
        .filter_map(|r| r.r_tilde(measure))
        .map(|t| t.min(1.0 - t).max(0.0))
        .collect();
    d.resize(ensemble.spec.count, f64::INFINITY);
    d
}

#[test]
fn alpha_angles_crowd_the_envelope_boundaries() {
    let ensemble = |mode| run_ensemble(&RandomSpec::new(302, 4000, mode), 0.0).unwrap();
    let (simplex_set, alpha_set) = (
        ensemble(SpectrumMode::UniformSimplex),
        ensemble(SpectrumMode::AlphaAngles),
    );
    for measure in Measure::ALL {
        let simplex = draw_distances(&simplex_set, measure);
        let alpha = draw_distances(&alpha_set, measure);
        for q in [0.1, 0.2] {
            let (a, s) = (quantile(alpha.clone(), q), quantile(simplex.clone(), q));
            assert!(a < s, "{measure} quantile {q}: alpha {a} vs simplex {s}");
        }
        let near = |d: &[f64]| d.iter().filter(|&&x| x < 0.05).count();
        assert!(near(&alpha) > near(&simplex));
    }
}

#[test]
fn linear_entropy_trends_oppose_under_the_two_normalizations() {
    let spec = RandomSpec::new(303, 20000, SpectrumMode::AlphaAngles);
    let ensemble = run_ensemble(&spec, 0.0).unwrap();
    let rho = |key| {
        let series = binned_averages(
            &ensemble.records,
            key,
            DEFAULT_BINS,
            Quantity::LinearEntropy,
        );
        binned_trend(&series, None).unwrap().rho
    };
    let (c, n) = (rho(BinKey::RTildeC), rho(BinKey::RTildeN));
    assert!(c * n < 0.0, "R~_C trend {c}, R~_N trend {n}");
}

#[test]
fn normalized_robustness_of_extremal_states() {
    // Pure states are the uniform-channel MFES for negativity and the MRES
    // for concurrence.
    let pure = make_ansatz(AnsatzParams::new(1.0, 0.4).unwrap());
    let n = normalized_robustness(&pure, 0.0, Measure::Negativity).unwrap();
    assert!(n.value.abs() < 1e-6, "{n:?}");
    let c = normalized_robustness(&pure, 0.0, Measure::Concurrence).unwrap();
    assert!((c.value - 1.0).abs() < 1e-6, "{c:?}");

    // r = 1/2 states are the uniform-channel MFES for concurrence below 1/2.
    let mfes = make_ansatz(AnsatzParams::new(0.5, 0.3).unwrap());
    let c = normalized_robustness(&mfes, 0.0, Measure::Concurrence).unwrap();
    assert!(c.value.abs() < 1e-6, "{c:?}");

    let mid = make_ansatz(AnsatzParams::new(0.8, 0.5).unwrap());
    for measure in Measure::ALL {
        let t = normalized_robustness(&mid, 0.5, measure).unwrap();
        assert!(
            t.value > 0.0 && t.value < 1.0 && !t.clipped,
            "{measure}: {t:?}"
        );
    }

    let bell = make_ansatz(AnsatzParams::new(1.0, std::f64::consts::FRAC_PI_4).unwrap());
    assert!(matches!(
        normalized_robustness(&bell, 0.0, Measure::Concurrence),
        Err(Error::Degenerate(_))
    ));
}
