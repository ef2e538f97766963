//! Critical noise `s_crit` at which entanglement dies, and the robustness
//! `R = 1 − s_crit`.
//!
//! Three routes are provided: a generic one that tracks the smallest
//! eigenvalue of the partially transposed evolved state, the closed-form ESD
//! polynomial of the ansatz family, and the pure-state relation.

use serde::{Deserialize, Serialize};

use crate::channel::{depolarize_matrix, local_parameters};
use crate::entanglement::{concurrence_ansatz, min_pt_eigenvalue, negativity, Measure};
use crate::error::{Error, Result};
use crate::extremal;
use crate::qstate::{AnsatzParams, DensityMatrix};

/// Every state is separable once `s` drops to this value, for any `Δ`.
pub const S_FLOOR: f64 = 1.0 / 3.0;
pub const SCAN_STEP: f64 = 1.0 / 256.0;
pub const S_TOL: f64 = 1e-12;
pub const MIN_ENTANGLEMENT: f64 = 1e-9;
pub const VALIDATION_POINTS: usize = 64;
/// Slack on the separable side when validating a single crossing.
pub const SEPARABLE_SLACK: f64 = 1e-10;

/// Robustness of the Bell state, the largest attainable value.
pub fn bell_robustness() -> f64 {
    1.0 - 1.0 / 3f64.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    PptBisection,
    AnsatzPolynomial,
    PureClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobustnessResult {
    pub s_crit: f64,
    pub robustness: f64,
    pub method: Method,
    /// Value of the root function at `s_crit`.
    pub residual: f64,
}

impl RobustnessResult {
    fn new(s_crit: f64, method: Method, residual: f64) -> Self {
        RobustnessResult {
            s_crit,
            robustness: 1.0 - s_crit,
            method,
            residual,
        }
    }
}

/// Scan grid `1, 1 − 1/256, …` down to `S_FLOOR`.
fn scan_grid() -> Vec<f64> {
    let mut grid: Vec<f64> = (0..)
        .map(|k| 1.0 - k as f64 * SCAN_STEP)
        .take_while(|&s| s > S_FLOOR)
        .collect();
    grid.push(S_FLOOR);
    grid
}

/// Brackets `(lo, hi)` between consecutive grid points where the
/// entanglement indicator flips, ordered from the top of the grid down.
fn sign_changes<F>(grid: &[f64], entangled: F) -> Result<Vec<(f64, f64)>>
where
    F: Fn(f64) -> Result<bool>,
{
    let mut brackets = Vec::new();
    let mut prev = (grid[0], entangled(grid[0])?);
    for &s in &grid[1..] {
        let here = entangled(s)?;
        if here != prev.1 {
            brackets.push((s, prev.0));
        }
        prev = (s, here);
    }
    Ok(brackets)
}

/// Bisection on `[lo, hi]` with `lo` separable and `hi` entangled.
pub(crate) fn bisect_crossing<F>(mut lo: f64, mut hi: f64, tol: f64, entangled: F) -> Result<f64>
where
    F: Fn(f64) -> Result<bool>,
{
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if entangled(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Largest `s` at which `value(s) > 0` stops holding.
fn topmost_root<F>(value: F) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    let grid = scan_grid();
    let brackets = sign_changes(&grid, |s| Ok(value(s) > 0.0))?;
    let &(lo, hi) = brackets.first().ok_or(Error::NoBracket {
        lo: S_FLOOR,
        hi: 1.0,
    })?;
    let s = bisect_crossing(lo, hi, S_TOL, |s| Ok(value(s) > 0.0))?;
    Ok((s, value(s)))
}

/// ESD polynomial of the ansatz state at local noise `(s₁, s₂)`:
///
/// `𝒫 = 4r² sin²2θ s₁²s₂² − [1 + (1−2r)s₁s₂]² + [r cos2θ (s₁−s₂) + (1−r)(s₁+s₂)]²`.
///
/// The evolved state is entangled exactly when `𝒫 > 0`.
pub fn esd_polynomial(p: AnsatzParams, s1: f64, s2: f64) -> f64 {
    esd_polynomial_rt(p.r(), p.theta(), s1, s2)
}

pub(crate) fn esd_polynomial_rt(r: f64, theta: f64, s1: f64, s2: f64) -> f64 {
    let (sin2, cos2) = (2.0 * theta).sin_cos();
    let q = s1 * s2;
    let a = 2.0 * r * sin2 * q;
    let b = 1.0 + (1.0 - 2.0 * r) * q;
    let d = r * cos2 * (s1 - s2) + (1.0 - r) * (s1 + s2);
    a * a - b * b + d * d
}

pub fn s_crit_ansatz(p: AnsatzParams, delta: f64) -> Result<RobustnessResult> {
    check_delta(delta)?;
    let c = concurrence_ansatz(p);
    if c <= MIN_ENTANGLEMENT {
        return Err(Error::Separable(c));
    }
    let (s, residual) = topmost_root(|s| {
        let (s1, s2) = local_parameters(delta, s);
        esd_polynomial(p, s1, s2)
    })?;
    Ok(RobustnessResult::new(s, Method::AnsatzPolynomial, residual))
}

fn check_delta(delta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::out_of_range("delta", delta, "[0, 1]"));
    }
    Ok(())
}

/// Generic route: root of `g(s) = λ_min([ε_s(ρ)]^{T₂})`.
///
/// The whole interval `[1/3, 1]` is scanned first and every sign change is
/// reported; the root is then bisected and the single crossing re-checked on
/// 64-point grids either side of it.
pub fn s_crit_numeric(rho: &DensityMatrix, delta: f64) -> Result<RobustnessResult> {
    check_delta(delta)?;
    let n = negativity(rho)?;
    if n <= MIN_ENTANGLEMENT {
        return Err(Error::Separable(n));
    }
    let g = |s: f64| -> Result<f64> {
        let (s1, s2) = local_parameters(delta, s);
        min_pt_eigenvalue(&depolarize_matrix(rho.matrix(), s1, s2))
    };
    let entangled = |s: f64| -> Result<bool> { Ok(g(s)? < 0.0) };

    let grid = scan_grid();
    let brackets = sign_changes(&grid, entangled)?;
    let (lo, hi) = match brackets.as_slice() {
        [] => {
            return Err(Error::NoBracket {
                lo: S_FLOOR,
                hi: 1.0,
            })
        }
        [single] => *single,
        _ => return Err(Error::MultipleCrossings { brackets }),
    };
    let s_crit = bisect_crossing(lo, hi, S_TOL, entangled)?;

    let mut violations = Vec::new();
    let above = (1.0 - s_crit) / VALIDATION_POINTS as f64;
    let below = (s_crit - S_FLOOR) / VALIDATION_POINTS as f64;
    for k in 1..=VALIDATION_POINTS {
        let s = s_crit + k as f64 * above;
        if g(s)? >= 0.0 {
            violations.push((s - above, s));
        }
        let s = s_crit - k as f64 * below;
        if g(s)? < -SEPARABLE_SLACK {
            violations.push((s, s + below));
        }
    }
    if !violations.is_empty() {
        violations.insert(0, (lo, hi));
        return Err(Error::MultipleCrossings {
            brackets: violations,
        });
    }
    Ok(RobustnessResult::new(
        s_crit,
        Method::PptBisection,
        g(s_crit)?,
    ))
}

/// Pure-state relation
/// `C² (4s₁²s₂² − (s₁−s₂)²) = (1−s₁²)(1−s₂²)`, solved for `s`.
pub fn robustness_pure(c: f64, delta: f64) -> Result<RobustnessResult> {
    check_delta(delta)?;
    if !(c > 0.0 && c <= 1.0) {
        return Err(Error::out_of_range("concurrence", c, "(0, 1]"));
    }
    let (s, residual) = topmost_root(|s| pure_state_relation(c, delta, s))?;
    Ok(RobustnessResult::new(s, Method::PureClosedForm, residual))
}

pub(crate) fn pure_state_relation(c: f64, delta: f64, s: f64) -> f64 {
    let (s1, s2) = local_parameters(delta, s);
    c * c * (4.0 * s1 * s1 * s2 * s2 - (s1 - s2).powi(2)) - (1.0 - s1 * s1) * (1.0 - s2 * s2)
}

/// Uniform channel (`Δ = 0`): `R = 1 − 1/√(2C + 1)`.
pub fn robustness_pure_uniform(c: f64) -> f64 {
    1.0 - 1.0 / (2.0 * c + 1.0).sqrt()
}

/// One-sided channel (`Δ = 1`): `R[ρ(c, p)] = 1 − √((2 − c)/(2 + c))`,
/// independent of `p`.
pub fn robustness_one_sided_cp(c: f64) -> f64 {
    1.0 - ((2.0 - c) / (2.0 + c)).sqrt()
}

pub const NORMALIZED_SLACK: f64 = 1e-6;
pub const DEGENERATE_SPREAD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalizedRobustness {
    /// `(R − R_MFES)/(R_MRES − R_MFES)` clipped to `[−ε, 1 + ε]`.
    pub value: f64,
    pub raw: f64,
    /// True when `raw` fell outside `[−ε, 1 + ε]`.
    pub clipped: bool,
}

pub fn normalize(r: f64, r_mfes: f64, r_mres: f64) -> Result<NormalizedRobustness> {
    let spread = r_mres - r_mfes;
    if spread.abs() < DEGENERATE_SPREAD {
        return Err(Error::Degenerate(format!(
            "MRES and MFES robustness coincide ({r_mres} vs {r_mfes})"
        )));
    }
    let raw = (r - r_mfes) / spread;
    let value = raw.clamp(-NORMALIZED_SLACK, 1.0 + NORMALIZED_SLACK);
    Ok(NormalizedRobustness {
        value,
        raw,
        clipped: value != raw,
    })
}

/// Robustness of `rho` rescaled so the MFES and MRES of equal entanglement
/// map to 0 and 1.
pub fn normalized_robustness(
    rho: &DensityMatrix,
    delta: f64,
    measure: Measure,
) -> Result<NormalizedRobustness> {
    let r = s_crit_numeric(rho, delta)?.robustness;
    let e = measure.of(rho)?;
    let env = extremal::envelope(delta, measure, e)?;
    normalize(r, env.mfes, env.mres)
}
