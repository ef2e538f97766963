//! Verification suites shared by the command line and the acceptance tests.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::channel::{apply_filter, apply_local_depolarizing, LocalFilter, Side};
use crate::entanglement::{concurrence, Measure};
use crate::error::Result;
use crate::extremal::{mfes_concurrence_at, quasi_mfes};
use crate::mcstats::{envelope_check, run_ensemble};
use crate::qstate::{
    fidelity, haar_pure_vector, make_ansatz, random_state, DensityMatrix, RandomSpec, SpectrumMode,
};

pub const FACTORIZATION_TOL: f64 = 1e-8;
pub const QUASI_FIDELITY_BOUND: f64 = 1.0 - 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Envelope,
    Factorization,
    Quasifidelity,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Finding {
    pub check: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub findings: Vec<Finding>,
    pub elapsed_secs: f64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.findings.iter().all(|f| f.passed)
    }
}

/// A one-sided map on qubit 1: an optional local filter followed by
/// depolarizing noise. Filters are not trace preserving, so outputs are
/// returned with their weight.
#[derive(Debug, Clone, Copy)]
struct OneSidedMap {
    filter: Option<LocalFilter>,
    s1: f64,
}

impl OneSidedMap {
    fn random(rng: &mut ChaCha8Rng, with_filter: bool) -> Self {
        let filter = with_filter.then(|| random_filter(rng, Side::Qubit1));
        OneSidedMap {
            filter,
            s1: rng.random_range(0.0..1.0),
        }
    }

    /// Concurrence of the unnormalized output `$(ρ)`.
    fn output_concurrence(&self, rho: &DensityMatrix) -> Result<f64> {
        let (filtered, weight) = match &self.filter {
            Some(f) => {
                let (out, gamma) = apply_filter(rho, f)?;
                (out, 1.0 / gamma)
            }
            None => (*rho, 1.0),
        };
        Ok(weight * concurrence(&apply_local_depolarizing(&filtered, self.s1, 1.0))?)
    }
}

fn random_filter(rng: &mut ChaCha8Rng, side: Side) -> LocalFilter {
    let v: [f64; 3] = std::array::from_fn(|_| rng.sample(StandardNormal));
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let len = rng.random_range(0.0..0.9);
    LocalFilter::new(v.map(|x| len * x / norm), side).expect("|a| < 1")
}

fn stream(seed: u64, suite: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (suite << 32));
    rng.set_stream(index as u64);
    rng
}

/// Factorization law for one-sided maps: equality on pure states, an upper
/// bound on mixed states, and the generalized equality on filter-related
/// pairs.
pub fn factorization_suite(seed: u64, count: usize) -> Result<SuiteReport> {
    let start = Instant::now();
    let bell = DensityMatrix::bell();
    let mixed = RandomSpec::new(seed, count, SpectrumMode::UniformSimplex);

    let mut pure_defect: (f64, usize) = (0.0, 0);
    let mut mixed_slack: (f64, usize) = (f64::INFINITY, 0);
    let mut pair_defect: (f64, usize) = (0.0, 0);
    for i in 0..count {
        let mut rng = stream(seed, 1, i);
        let map = OneSidedMap::random(&mut rng, i % 2 == 0);
        let bell_factor = map.output_concurrence(&bell)?;

        let psi = DensityMatrix::pure(haar_pure_vector(&mut rng))?;
        let d = (map.output_concurrence(&psi)? - bell_factor * concurrence(&psi)?).abs();
        if d > pure_defect.0 {
            pure_defect = (d, i);
        }

        let rho = random_state(&mixed, i);
        let slack = bell_factor * concurrence(&rho)? - map.output_concurrence(&rho)?;
        if slack < mixed_slack.0 {
            mixed_slack = (slack, i);
        }

        let (rho1, _) = apply_filter(&rho, &random_filter(&mut rng, Side::Qubit2))?;
        let lhs = map.output_concurrence(&rho1)? * concurrence(&rho)?;
        let rhs = map.output_concurrence(&rho)? * concurrence(&rho1)?;
        if (lhs - rhs).abs() > pair_defect.0 {
            pair_defect = ((lhs - rhs).abs(), i);
        }
    }
    let findings = vec![
        Finding {
            check: "pure-state equality, max |defect|".into(),
            value: pure_defect.0,
            threshold: FACTORIZATION_TOL,
            passed: pure_defect.0 <= FACTORIZATION_TOL,
            detail: format!("{count} Haar pure states; worst draw {}", pure_defect.1),
        },
        Finding {
            check: "mixed-state inequality, min slack".into(),
            value: mixed_slack.0,
            threshold: -FACTORIZATION_TOL,
            passed: mixed_slack.0 >= -FACTORIZATION_TOL,
            detail: format!("{count} random mixed states; worst draw {}", mixed_slack.1),
        },
        Finding {
            check: "filter-pair equality, max |defect|".into(),
            value: pair_defect.0,
            threshold: FACTORIZATION_TOL,
            passed: pair_defect.0 <= FACTORIZATION_TOL,
            detail: format!("{count} filter-related pairs; worst draw {}", pair_defect.1),
        },
    ];
    Ok(SuiteReport {
        suite: Suite::Factorization,
        findings,
        elapsed_secs: start.elapsed().as_secs_f64(),
    })
}

/// Fidelity between each quasi-MFES and the true MFES of equal concurrence
/// on the grid `Δ ∈ {0.1, …, 0.9}`, `β ∈ {0.05, …, 0.45}`.
pub fn quasifidelity_suite() -> Result<SuiteReport> {
    let start = Instant::now();
    let mut worst = (f64::INFINITY, 0.0, 0.0);
    for i in 1..=9 {
        let delta = i as f64 / 10.0;
        for j in 1..=9 {
            let beta = j as f64 / 20.0;
            let quasi = quasi_mfes(delta, beta)?;
            let mfes = mfes_concurrence_at(delta, quasi.entanglement)?;
            let f = fidelity(&make_ansatz(quasi.params), &make_ansatz(mfes.params))?;
            if f < worst.0 {
                worst = (f, delta, beta);
            }
        }
    }
    let findings = vec![Finding {
        check: "min fidelity(quasi-MFES, MFES of equal concurrence)".into(),
        value: worst.0,
        threshold: QUASI_FIDELITY_BOUND,
        passed: worst.0 >= QUASI_FIDELITY_BOUND,
        detail: format!("attained at delta = {}, beta = {}", worst.1, worst.2),
    }];
    Ok(SuiteReport {
        suite: Suite::Quasifidelity,
        findings,
        elapsed_secs: start.elapsed().as_secs_f64(),
    })
}

/// Every entangled random state must lie between the MFES and MRES of its
/// own entanglement, for both measures and both spectrum modes.
pub fn envelope_suite(seed: u64, count: usize, deltas: &[f64]) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut findings = Vec::new();
    for &delta in deltas {
        for mode in [SpectrumMode::UniformSimplex, SpectrumMode::AlphaAngles] {
            let ensemble = run_ensemble(&RandomSpec::new(seed, count, mode), delta)?;
            findings.push(Finding {
                check: format!("delta = {delta}, {mode:?}: robustness failures"),
                value: ensemble.failures.len() as f64,
                threshold: 0.0,
                passed: ensemble.failures.is_empty(),
                detail: format!(
                    "{} entangled, {} separable discarded",
                    ensemble.records.len(),
                    ensemble.discarded
                ),
            });
            for measure in Measure::ALL {
                let report = envelope_check(&ensemble.records, delta, measure);
                let detail = match report.worst.first() {
                    Some(v) => format!(
                        "{} checked, {} unchecked; worst seed {} index {} excess {:e}",
                        report.checked, report.unchecked, v.seed, v.index, v.excess
                    ),
                    None => format!(
                        "{} checked, {} unchecked; max excess {:e}",
                        report.checked, report.unchecked, report.max_excess
                    ),
                };
                findings.push(Finding {
                    check: format!("delta = {delta}, {mode:?}, {measure}: envelope violations"),
                    value: report.violations as f64,
                    threshold: 0.0,
                    passed: report.passed(),
                    detail,
                });
            }
        }
    }
    Ok(SuiteReport {
        suite: Suite::Envelope,
        findings,
        elapsed_secs: start.elapsed().as_secs_f64(),
    })
}

pub fn run_suite(suite: Suite, seed: u64, count: usize) -> Result<SuiteReport> {
    match suite {
        Suite::Envelope => envelope_suite(seed, count, &[0.0, 0.5, 1.0]),
        Suite::Factorization => factorization_suite(seed, count),
        Suite::Quasifidelity => quasifidelity_suite(),
    }
}
