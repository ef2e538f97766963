use std::f64::consts::FRAC_PI_2;

use esdlab_core::qstate::{make_ansatz, AnsatzParams};
use esdlab_core::robustness::{robustness_pure, s_crit_ansatz, s_crit_numeric};
use esdlab_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn polynomial_and_ppt_bisection_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(201);
    let mut compared = 0;
    for _ in 0..1000 {
        let p = AnsatzParams::new(
            rng.random_range(0.0..=1.0),
            rng.random_range(0.0..=FRAC_PI_2),
        )
        .unwrap();
        let delta = rng.random_range(0.0..=1.0);
        match (
            s_crit_ansatz(p, delta),
            s_crit_numeric(&make_ansatz(p), delta),
        ) {
            (Ok(a), Ok(b)) => {
                assert!(
                    (a.s_crit - b.s_crit).abs() <= 1e-8,
                    "{p:?} delta {delta}: {} vs {}",
                    a.s_crit,
                    b.s_crit
                );
                compared += 1;
            }
            (Err(Error::Separable(_)), Err(Error::Separable(_))) => {}
            // Below the negativity threshold but not yet the concurrence one.
            (Ok(_), Err(Error::Separable(n))) if n <= 1e-9 => {}
            (a, b) => panic!("{p:?} delta {delta}: {a:?} vs {b:?}"),
        }
    }
    assert!(compared > 900, "only {compared} entangled draws");
}

#[test]
fn pure_robustness_is_strictly_increasing_in_concurrence() {
    for delta in [0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99] {
        let values: Vec<f64> = (1..=100)
            .map(|k| robustness_pure(k as f64 / 100.0, delta).unwrap().robustness)
            .collect();
        for w in values.windows(2) {
            assert!(w[1] > w[0], "delta {delta}: {} then {}", w[0], w[1]);
        }
    }
}

#[test]
fn pure_states_become_more_fragile_as_the_channel_evens_out() {
    for k in 1..20 {
        let c = k as f64 / 20.0;
        let values: Vec<f64> = (0..=10)
            .map(|j| robustness_pure(c, j as f64 / 10.0).unwrap().robustness)
            .collect();
        for w in values.windows(2) {
            assert!(w[1] > w[0], "C {c}: {} then {}", w[0], w[1]);
        }
    }
}
