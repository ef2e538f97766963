use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::concurrence::{mfes_concurrence_general, mres_concurrence, quasi_mfes};
use super::negativity::{mfes_negativity_one_sided, negativity_extremals};
use super::{ExtremalPoint, Kind};
use crate::channel::local_parameters;
use crate::entanglement::Measure;
use crate::error::{Error, Result};
use crate::output::{fmt_sig, CSV_SCHEMA};
use crate::qstate::AnsatzParams;
use crate::robustness::bell_robustness;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    Mres,
    Mfes,
    Quasi,
}

/// Largest pure-state concurrence that is still separable after the noise
/// `s`, i.e. the pure state whose critical noise is exactly `s`.
fn pure_concurrence_at(delta: f64, s: f64) -> f64 {
    let (s1, s2) = local_parameters(delta, s);
    let den = 4.0 * s1 * s1 * s2 * s2 - (s1 - s2).powi(2);
    ((1.0 - s1 * s1) * (1.0 - s2 * s2) / den).sqrt().min(1.0)
}

fn pure_point(e: f64, measure: Measure, delta: f64) -> Result<ExtremalPoint> {
    let params = AnsatzParams::new(1.0, 0.5 * e.asin())?;
    ExtremalPoint::new(params, Kind::Mres, measure, delta)
}

/// One family of extremal states on a `grid`-point sweep.
///
/// Families are indexed by robustness `R_k = R_Bell · k/(grid + 1)`, except
/// where the robustness is constant (the one-sided MRES, indexed by
/// entanglement `k/(grid + 1)`) and the quasi-MFES (indexed by
/// `β = k/(2(grid + 1))`). Points are returned in sweep order.
pub fn family(
    kind: FamilyKind,
    measure: Measure,
    delta: f64,
    grid: usize,
) -> Result<Vec<ExtremalPoint>> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::out_of_range("delta", delta, "[0, 1]"));
    }
    if grid == 0 {
        return Err(Error::out_of_range("grid", 0.0, "≥ 1"));
    }
    if kind == FamilyKind::Quasi && measure != Measure::Concurrence {
        return Err(Error::Degenerate(
            "the quasi-MFES family is defined for concurrence only".into(),
        ));
    }
    let step = 1.0 / (grid + 1) as f64;
    (1..=grid)
        .into_par_iter()
        .map(|k| {
            let t = k as f64 * step;
            let s = 1.0 - bell_robustness() * t;
            match (kind, measure) {
                (FamilyKind::Quasi, _) => quasi_mfes(delta, 0.5 * t),
                (FamilyKind::Mres, _) if delta == 1.0 => pure_point(t, measure, delta),
                (FamilyKind::Mres, Measure::Concurrence) => {
                    mres_concurrence(pure_concurrence_at(delta, s), delta)
                }
                (FamilyKind::Mfes, Measure::Concurrence) => mfes_concurrence_general(delta, s),
                (FamilyKind::Mfes, Measure::Negativity) if delta == 1.0 => {
                    mfes_negativity_one_sided(2.0 * (1.0 - s * s) / (1.0 + s * s))
                }
                (FamilyKind::Mres, Measure::Negativity) => Ok(negativity_extremals(delta, s)?.0),
                (FamilyKind::Mfes, Measure::Negativity) => Ok(negativity_extremals(delta, s)?.1),
            }
        })
        .collect()
}

pub fn write_family_csv<W: Write>(mut out: W, points: &[ExtremalPoint]) -> io::Result<()> {
    writeln!(out, "{CSV_SCHEMA}")?;
    writeln!(out, "delta,kind,measure,r,theta,entanglement,robustness")?;
    for p in points {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt_sig(p.delta),
            p.kind,
            p.measure,
            fmt_sig(p.params.r()),
            fmt_sig(p.params.theta()),
            fmt_sig(p.entanglement),
            fmt_sig(p.robustness)
        )?;
    }
    Ok(())
}
