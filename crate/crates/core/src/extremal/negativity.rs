use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use super::concurrence::check_s;
use super::{ExtremalPoint, Kind};
use crate::channel::local_parameters;
use crate::entanglement::{negativity_ansatz, Measure};
use crate::error::{Error, Result};
use crate::qstate::AnsatzParams;
use crate::robustness::{esd_polynomial_rt, robustness_one_sided_cp};

/// Number of samples along the `𝒫 = 0` curve.
pub const CURVE_SAMPLES: usize = 512;

const SINGULAR_HALF_WIDTH: f64 = 1e-6;
const SINGULAR_DEN: f64 = 1e-9;

/// Root `c₀ = 1 − 1/√5` of the denominator in the one-sided negativity MFES
/// condition. The numerator vanishes there too, so the singularity is
/// removable.
pub fn cpn_singular_point() -> f64 {
    1.0 - 1.0 / 5f64.sqrt()
}

fn cpn_ratio(c: f64) -> (f64, f64) {
    let num = 2.0 * (2.0 - c).sqrt() * (c - 1.0) * c.powf(1.5) + 2.0 * c * c - c.powi(3);
    let den = -8.0 + 24.0 * c - 20.0 * c * c + 5.0 * c.powi(3);
    (num, den)
}

/// Filter parameter `p` of the one-sided negativity MFES at fixed `c`:
///
/// `p² = [2√(2−c)(c−1)c^{3/2} + 2c² − c³] / [−8 + 24c − 20c² + 5c³]`.
pub fn cpn_p(c: f64) -> Result<f64> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(Error::out_of_range("c", c, "(0, 1]"));
    }
    let (num, den) = cpn_ratio(c);
    let p2 = if den.abs() < SINGULAR_DEN {
        let (a, b) = (
            cpn_singular_point() - SINGULAR_HALF_WIDTH,
            cpn_singular_point() + SINGULAR_HALF_WIDTH,
        );
        let (na, da) = cpn_ratio(a);
        let (nb, db) = cpn_ratio(b);
        let (ya, yb) = (na / da, nb / db);
        ya + (c - a) * (yb - ya) / (b - a)
    } else {
        num / den
    };
    if p2.is_nan() || p2 < 0.0 {
        return Err(Error::NegativeRadicand {
            value: p2,
            context: "one-sided negativity MFES",
        });
    }
    Ok(p2.sqrt())
}

/// Most fragile state of the one-sided channel for negativity, in the
/// `(c, p)` chart.
pub fn mfes_negativity_one_sided(c: f64) -> Result<ExtremalPoint> {
    let params = AnsatzParams::from_cp(c, cpn_p(c)?)?;
    Ok(ExtremalPoint {
        params,
        kind: Kind::Mfes,
        measure: Measure::Negativity,
        entanglement: negativity_ansatz(params),
        robustness: robustness_one_sided_cp(c),
        delta: 1.0,
    })
}

/// Inverse of the above: the one-sided MFES with negativity `n`.
pub fn mfes_negativity_one_sided_at(n: f64) -> Result<ExtremalPoint> {
    if !(n > 0.0 && n <= 1.0) {
        return Err(Error::out_of_range("negativity", n, "(0, 1]"));
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > 1e-14 {
        let mid = 0.5 * (lo + hi);
        if mfes_negativity_one_sided(mid)?.entanglement < n {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    mfes_negativity_one_sided(hi)
}

/// Uniform channel MRES for negativity: `θ = π/4`, `r = √(2N² + 2N) − N`.
pub fn mres_negativity_uniform(n: f64) -> Result<ExtremalPoint> {
    if !(n > 0.0 && n <= 1.0) {
        return Err(Error::out_of_range("negativity", n, "(0, 1]"));
    }
    let r = (2.0 * n * n + 2.0 * n).sqrt() - n;
    ExtremalPoint::new(
        AnsatzParams::new(r, FRAC_PI_4)?,
        Kind::Mres,
        Measure::Negativity,
        0.0,
    )
}

fn negativity_rt(r: f64, theta: f64) -> f64 {
    let q = 1.0 - r;
    let sc = r * (2.0 * theta).sin();
    (sc * sc + q * q).sqrt() - q
}

/// `∂N/∂r · ∂𝒫/∂θ − ∂N/∂θ · ∂𝒫/∂r`, which vanishes where the negativity is
/// stationary along `𝒫 = 0` at fixed `(s₁, s₂)`.
pub fn lagrange_function(r: f64, theta: f64, s1: f64, s2: f64) -> f64 {
    let (sin2, u) = (2.0 * theta).sin_cos();
    let sin4 = (4.0 * theta).sin();
    let big_s = sin2 * sin2;
    let q = 1.0 - r;
    let root = (r * r * big_s + q * q).sqrt();
    let dn_dr = (r * big_s - q) / root + 1.0;
    let dn_dt = r * r * sin4 / root;

    let q12 = s1 * s2;
    let (d, sigma) = (s1 - s2, s1 + s2);
    let lin = r * u * d + (1.0 - r) * sigma;
    let dp_dr = 8.0 * r * big_s * q12 * q12
        + 4.0 * q12 * (1.0 + (1.0 - 2.0 * r) * q12)
        + 2.0 * lin * (u * d - sigma);
    let dp_dt = 8.0 * r * r * q12 * q12 * sin4 - 4.0 * r * d * sin2 * lin;
    dn_dr * dp_dt - dn_dt * dp_dr
}

/// The critical curve `𝒫(r, θ; s₁, s₂) = 0`, one `r` per `θ`.
struct CriticalCurve {
    s1: f64,
    s2: f64,
    lo: f64,
    hi: f64,
}

impl CriticalCurve {
    fn new(delta: f64, s: f64) -> Result<Self> {
        let (s1, s2) = local_parameters(delta, s);
        let den = 4.0 * s1 * s1 * s2 * s2 - (s1 - s2).powi(2);
        let c_pure = ((1.0 - s1 * s1) * (1.0 - s2 * s2) / den).sqrt();
        if !(den > 0.0 && c_pure < 1.0) {
            return Err(Error::Degenerate(format!(
                "no entangled state has critical noise {s} at delta {delta}"
            )));
        }
        let lo = 0.5 * c_pure.asin();
        Ok(CriticalCurve {
            s1,
            s2,
            lo,
            hi: FRAC_PI_2 - lo,
        })
    }

    /// `𝒫` is negative at `r = 0` and non-negative at `r = 1` inside the
    /// domain, and quadratic in `r`, so the crossing is unique.
    fn r_at(&self, theta: f64) -> f64 {
        if theta <= self.lo || theta >= self.hi {
            return 1.0;
        }
        let p = |r: f64| esd_polynomial_rt(r, theta, self.s1, self.s2);
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..64 {
            let mid = 0.5 * (lo + hi);
            if p(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= f64::EPSILON {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    fn negativity(&self, theta: f64) -> f64 {
        negativity_rt(self.r_at(theta), theta)
    }

    fn lagrange(&self, theta: f64) -> f64 {
        lagrange_function(self.r_at(theta), theta, self.s1, self.s2)
    }

    fn samples(&self) -> Vec<f64> {
        let (mid, half) = (0.5 * (self.lo + self.hi), 0.5 * (self.hi - self.lo));
        let n = CURVE_SAMPLES - 1;
        (0..=n)
            .map(|k| match k {
                0 => self.lo,
                k if k == n => self.hi,
                k => mid - half * (PI * k as f64 / n as f64).cos(),
            })
            .collect()
    }

    fn refine(&self, mut a: f64, mut b: f64, la: f64) -> f64 {
        let sa = la > 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if (self.lagrange(mid) > 0.0) == sa {
                a = mid;
            } else {
                b = mid;
            }
        }
        0.5 * (a + b)
    }

    /// Sign of the discrete second difference of `N` along the curve.
    fn curvature(&self, theta: f64) -> f64 {
        let h = 1e-5 * (self.hi - self.lo);
        let (a, b) = ((theta - h).max(self.lo), (theta + h).min(self.hi));
        self.negativity(a) + self.negativity(b) - 2.0 * self.negativity(theta)
    }
}

/// Negativity MRES and MFES at critical noise `s` for `Δ ∈ [0, 1)`.
///
/// Stationary points of `N` along the critical curve are bracketed on a
/// cosine-spaced grid, refined by bisection on the Lagrange function and
/// classified by the local curvature. The curve's endpoints are pure states
/// and compete as candidates too.
pub fn negativity_extremals(delta: f64, s: f64) -> Result<(ExtremalPoint, ExtremalPoint)> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::out_of_range("delta", delta, "[0, 1]"));
    }
    if delta == 1.0 {
        return Err(Error::Degenerate(
            "one-sided channel: negativity on the critical curve has no minimum; \
             the most robust states are the pure states, all at the Bell robustness"
                .into(),
        ));
    }
    check_s(s)?;
    let curve = CriticalCurve::new(delta, s)?;
    let grid = curve.samples();
    let values: Vec<f64> = grid.iter().map(|&t| curve.lagrange(t)).collect();

    let mut minima = Vec::new();
    let mut maxima = Vec::new();
    for k in 0..grid.len() - 1 {
        let theta = if values[k] == 0.0 {
            grid[k]
        } else if values[k] * values[k + 1] < 0.0 {
            curve.refine(grid[k], grid[k + 1], values[k])
        } else {
            continue;
        };
        if theta <= curve.lo || theta >= curve.hi {
            continue;
        }
        let bend = curve.curvature(theta);
        if bend > 0.0 {
            minima.push(theta);
        } else if bend < 0.0 {
            maxima.push(theta);
        }
    }

    // Endpoints carry equal negativity; the MRES prefers the θ > π/4 end and
    // the MFES the θ < π/4 end, matching the interior branches.
    let pick = |candidates: Vec<f64>, better: fn(f64, f64) -> bool| {
        let mut best = candidates[0];
        let mut best_n = curve.negativity(best);
        for &t in &candidates[1..] {
            let n = curve.negativity(t);
            if better(n, best_n) {
                best = t;
                best_n = n;
            }
        }
        best
    };
    let mres_theta = pick(
        std::iter::once(curve.hi)
            .chain(minima)
            .chain([curve.lo])
            .collect(),
        |n, best| n < best,
    );
    let mfes_theta = pick(
        std::iter::once(curve.lo)
            .chain(maxima)
            .chain([curve.hi])
            .collect(),
        |n, best| n > best,
    );
    let point = |theta: f64, kind| -> Result<ExtremalPoint> {
        let params = AnsatzParams::new(curve.r_at(theta), theta)?;
        ExtremalPoint::new(params, kind, Measure::Negativity, delta)
    };
    Ok((
        point(mres_theta, Kind::Mres)?,
        point(mfes_theta, Kind::Mfes)?,
    ))
}
