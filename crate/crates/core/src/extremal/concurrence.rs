use std::f64::consts::FRAC_PI_4;

use super::{ExtremalPoint, Kind};
use crate::channel::local_parameters;
use crate::entanglement::Measure;
use crate::error::{Error, Result};
use crate::qstate::AnsatzParams;
use crate::robustness::{
    bell_robustness, esd_polynomial_rt, robustness_one_sided_cp, robustness_pure, S_TOL,
};

const BETA_SCAN: usize = 128;

fn check_concurrence(c: f64) -> Result<()> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(Error::out_of_range("concurrence", c, "(0, 1]"));
    }
    Ok(())
}

pub(super) fn check_s(s: f64) -> Result<()> {
    if !(s > 1.0 / 3f64.sqrt() && s < 1.0) {
        return Err(Error::out_of_range("s_crit", s, "(1/√3, 1)"));
    }
    Ok(())
}

/// Pure state `(1, ½ arcsin C)`.
pub fn mres_concurrence(c: f64, delta: f64) -> Result<ExtremalPoint> {
    check_concurrence(c)?;
    let params = AnsatzParams::new(1.0, 0.5 * c.asin())?;
    Ok(ExtremalPoint {
        params,
        kind: Kind::Mres,
        measure: Measure::Concurrence,
        entanglement: c,
        robustness: robustness_pure(c, delta)?.robustness,
        delta,
    })
}

/// One-sided channel MFES `2r cos²θ = 1`, with concurrence `tan θ`.
pub fn mfes_concurrence_one_sided(theta: f64) -> Result<ExtremalPoint> {
    if !(0.0..=FRAC_PI_4).contains(&theta) {
        return Err(Error::out_of_range("theta", theta, "[0, π/4]"));
    }
    let params = AnsatzParams::new(0.5 / theta.cos().powi(2), theta)?;
    let (c, _) = params.to_cp();
    Ok(ExtremalPoint {
        params,
        kind: Kind::Mfes,
        measure: Measure::Concurrence,
        entanglement: theta.tan().min(1.0),
        robustness: robustness_one_sided_cp(c),
        delta: 1.0,
    })
}

/// Uniform channel MFES: `(C, π/4)` for `C ≥ ½`, else `(½, ½ arcsin 2C)`.
pub fn mfes_concurrence_uniform(c: f64) -> Result<ExtremalPoint> {
    check_concurrence(c)?;
    let params = if c >= 0.5 {
        AnsatzParams::new(c, FRAC_PI_4)?
    } else {
        AnsatzParams::new(0.5, 0.5 * (2.0 * c).asin())?
    };
    ExtremalPoint::new(params, Kind::Mfes, Measure::Concurrence, 0.0)
}

/// `Ω = s₁²(1 − s₂²) / (s₂²(1 − s₁²))`.
pub fn omega(s1: f64, s2: f64) -> f64 {
    s1 * s1 * (1.0 - s2 * s2) / (s2 * s2 * (1.0 - s1 * s1))
}

/// `Ω̃(Δ) = ((2/3)^{Δ−1} − 1) / ((2/3)^{−Δ−1} − 1)`.
pub fn omega_tilde(delta: f64) -> f64 {
    let t = 2.0f64 / 3.0;
    (t.powf(delta - 1.0) - 1.0) / (t.powf(-delta - 1.0) - 1.0)
}

/// `α(β) = ¼ [1 + √(8Ω(2β − 1)β + 1)]`.
pub fn restraint_alpha(omega: f64, beta: f64) -> Result<f64> {
    let radicand = 8.0 * omega * (2.0 * beta - 1.0) * beta + 1.0;
    if radicand < 0.0 {
        return Err(Error::NegativeRadicand {
            value: radicand,
            context: "alpha-beta restraint",
        });
    }
    Ok(0.25 * (1.0 + radicand.sqrt()))
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta <= 0.5) {
        return Err(Error::out_of_range("beta", beta, "(0, 1/2]"));
    }
    Ok(())
}

fn restraint_params(omega: f64, beta: f64) -> Result<AnsatzParams> {
    AnsatzParams::from_alpha_beta(restraint_alpha(omega, beta)?, beta)
}

/// MFES for concurrence at critical noise `s`: the point of the
/// `α(β)` restraint curve lying on `𝒫 = 0`.
pub fn mfes_concurrence_general(delta: f64, s: f64) -> Result<ExtremalPoint> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::out_of_range("delta", delta, "[0, 1]"));
    }
    check_s(s)?;
    let params = restraint_root(delta, s)?;
    ExtremalPoint::new(params, Kind::Mfes, Measure::Concurrence, delta)
}

fn restraint_root(delta: f64, s: f64) -> Result<AnsatzParams> {
    let (s1, s2) = local_parameters(delta, s);
    let om = omega(s1, s2);
    let h = |beta: f64| -> Result<f64> {
        let p = restraint_params(om, beta)?;
        Ok(esd_polynomial_rt(p.r(), p.theta(), s1, s2))
    };
    let mut lo = 0.0;
    let mut hi = None;
    for k in 1..=BETA_SCAN {
        let beta = 0.5 * k as f64 / BETA_SCAN as f64;
        if h(beta)? > 0.0 {
            hi = Some(beta);
            break;
        }
        lo = beta;
    }
    let mut hi = hi.ok_or(Error::NoBracket { lo: 0.0, hi: 0.5 })?;
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if h(mid)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    restraint_params(om, 0.5 * (lo + hi))
}

/// MFES of a given concurrence, found by inverting the family over `s`.
pub fn mfes_concurrence_at(delta: f64, c: f64) -> Result<ExtremalPoint> {
    check_concurrence(c)?;
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::out_of_range("delta", delta, "[0, 1]"));
    }
    if delta == 0.0 {
        return mfes_concurrence_uniform(c);
    }
    if delta == 1.0 {
        return mfes_concurrence_one_sided(c.atan());
    }
    if c == 1.0 {
        let params = AnsatzParams::new(1.0, FRAC_PI_4)?;
        return Ok(ExtremalPoint {
            params,
            kind: Kind::Mfes,
            measure: Measure::Concurrence,
            entanglement: 1.0,
            robustness: bell_robustness(),
            delta,
        });
    }
    // C along the family decreases from 1 at s = 1/√3 to 0 at s = 1.
    let (mut lo, mut hi) = (1.0 / 3f64.sqrt(), 1.0);
    let mut params = AnsatzParams::new(1.0, FRAC_PI_4)?;
    while hi - lo > S_TOL {
        let mid = 0.5 * (lo + hi);
        params = restraint_root(delta, mid)?;
        if params.r() * (2.0 * params.theta()).sin() > c {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    ExtremalPoint::new(params, Kind::Mfes, Measure::Concurrence, delta)
}

/// Quasi-MFES: the restraint with `Ω` replaced by `Ω̃(Δ)`.
pub fn quasi_mfes(delta: f64, beta: f64) -> Result<ExtremalPoint> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::out_of_range("delta", delta, "[0, 1]"));
    }
    check_beta(beta)?;
    let params = restraint_params(omega_tilde(delta), beta)?;
    ExtremalPoint::new(params, Kind::QuasiMfes, Measure::Concurrence, delta)
}
