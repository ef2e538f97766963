use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use serde::Serialize;

use super::concurrence::mfes_concurrence_at;
use super::negativity::{mfes_negativity_one_sided_at, mres_negativity_uniform};
use super::{ExtremalPoint, Kind};
use crate::entanglement::Measure;
use crate::error::{Error, Result};
use crate::qstate::AnsatzParams;
use crate::robustness::{
    bell_robustness, esd_polynomial_rt, robustness_pure, robustness_pure_uniform,
};

const ISO_SAMPLES: usize = 97;
const GOLDEN_TOL: f64 = 1e-10;

/// Robustness of the most robust and most fragile states at a fixed
/// entanglement value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Envelope {
    pub mres: f64,
    pub mfes: f64,
}

/// Bounds on the robustness of any state with entanglement `e` under the
/// channel `Δ`.
pub fn envelope(delta: f64, measure: Measure, e: f64) -> Result<Envelope> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::out_of_range("delta", delta, "[0, 1]"));
    }
    if e.is_nan() || e <= 0.0 {
        return Err(Error::Separable(e));
    }
    let e = e.min(1.0);
    match measure {
        Measure::Concurrence => {
            let mres = if delta == 0.0 {
                robustness_pure_uniform(e)
            } else {
                robustness_pure(e, delta)?.robustness
            };
            let mfes = mfes_concurrence_at(delta, e)?.robustness;
            Ok(Envelope { mres, mfes })
        }
        Measure::Negativity if delta == 0.0 => Ok(Envelope {
            mres: mres_negativity_uniform(e)?.robustness,
            mfes: robustness_pure_uniform(e),
        }),
        Measure::Negativity if delta == 1.0 => Ok(Envelope {
            mres: bell_robustness(),
            mfes: mfes_negativity_one_sided_at(e)?.robustness,
        }),
        Measure::Negativity => {
            let (mres, mfes) = iso_curve_extremes(delta, measure, e)?;
            Ok(Envelope {
                mres: mres.robustness,
                mfes: mfes.robustness,
            })
        }
    }
}

/// States of entanglement `e` in the ansatz family, parametrized by `θ`.
struct IsoCurve {
    measure: Measure,
    e: f64,
    lo: f64,
    hi: f64,
    delta: f64,
}

impl IsoCurve {
    fn new(delta: f64, measure: Measure, e: f64) -> Self {
        let lo = 0.5 * e.asin();
        IsoCurve {
            measure,
            e,
            lo,
            hi: FRAC_PI_2 - lo,
            delta,
        }
    }

    fn r_at(&self, theta: f64) -> f64 {
        let sin2 = (2.0 * theta).sin();
        let r = match self.measure {
            Measure::Concurrence => self.e / sin2,
            Measure::Negativity => {
                // r² sin²2θ = N² + 2N(1 − r)
                let (n, big_s) = (self.e, sin2 * sin2);
                ((n * n + big_s * (n * n + 2.0 * n)).sqrt() - n) / big_s
            }
        };
        r.min(1.0)
    }

    fn s_crit(&self, theta: f64) -> f64 {
        s_crit_fast(self.r_at(theta), theta, self.delta)
    }
}

/// Bisection on `[1/√3 − ε, 1]`, where the ansatz polynomial changes sign
/// exactly once.
fn s_crit_fast(r: f64, theta: f64, delta: f64) -> f64 {
    let p = |s: f64| {
        let ln = s.ln();
        esd_polynomial_rt(
            r,
            theta,
            ((1.0 + delta) * ln).exp(),
            ((1.0 - delta) * ln).exp(),
        )
    };
    let (mut lo, mut hi) = (1.0 / 3f64.sqrt() - 1e-9, 1.0);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if p(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > GOLDEN_TOL {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    0.5 * (a + b)
}

/// Global minimizer of `f` over the sample grid, polished by golden section
/// between the neighbours of the best sample.
fn global_min<F: Fn(f64) -> f64>(grid: &[f64], values: &[f64], f: F) -> f64 {
    let k = (0..grid.len())
        .min_by(|&i, &j| values[i].total_cmp(&values[j]))
        .unwrap_or(0);
    let a = grid[k.saturating_sub(1)];
    let b = grid[(k + 1).min(grid.len() - 1)];
    let t = golden_min(&f, a, b);
    if f(t) < values[k] {
        t
    } else {
        grid[k]
    }
}

/// Extremal states at fixed entanglement, by direct search for the largest
/// and smallest critical noise along the iso-entanglement curve.
pub fn iso_curve_extremes(
    delta: f64,
    measure: Measure,
    e: f64,
) -> Result<(ExtremalPoint, ExtremalPoint)> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::out_of_range("delta", delta, "[0, 1]"));
    }
    if !(e > 0.0 && e <= 1.0) {
        return Err(Error::out_of_range("entanglement", e, "(0, 1]"));
    }
    let curve = IsoCurve::new(delta, measure, e);
    let point = |theta: f64, kind| -> Result<ExtremalPoint> {
        let params = AnsatzParams::new(curve.r_at(theta), theta)?;
        ExtremalPoint::new(params, kind, measure, delta)
    };
    if curve.hi - curve.lo < 1e-12 {
        return Ok((point(FRAC_PI_4, Kind::Mres)?, point(FRAC_PI_4, Kind::Mfes)?));
    }
    let (mid, half) = (0.5 * (curve.lo + curve.hi), 0.5 * (curve.hi - curve.lo));
    let n = ISO_SAMPLES - 1;
    let grid: Vec<f64> = (0..=n)
        .map(|k| match k {
            0 => curve.lo,
            k if k == n => curve.hi,
            k => mid - half * (PI * k as f64 / n as f64).cos(),
        })
        .collect();
    let values: Vec<f64> = grid.iter().map(|&t| curve.s_crit(t)).collect();
    let negated: Vec<f64> = values.iter().map(|v| -v).collect();
    let mres = global_min(&grid, &values, |t| curve.s_crit(t));
    let mfes = global_min(&grid, &negated, |t| -curve.s_crit(t));
    Ok((point(mres, Kind::Mres)?, point(mfes, Kind::Mfes)?))
}
