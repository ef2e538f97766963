//! Random-state ensembles, binned averages and the envelope check.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::entanglement::{concurrence, negativity, Measure};
use crate::error::{Error, Result};
use crate::extremal::{envelope, Envelope};
use crate::output::{fmt_opt, fmt_sig, CSV_SCHEMA};
use crate::qstate::{bloch_vectors, linear_entropy, random_state, RandomSpec};
use crate::robustness::{normalize, s_crit_numeric, MIN_ENTANGLEMENT};

pub const DEFAULT_BINS: usize = 25;
pub const ENVELOPE_TOL: f64 = 1e-6;
pub const WORST_VIOLATORS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleRecord {
    pub seed: u64,
    pub index: usize,
    pub concurrence: f64,
    pub negativity: f64,
    pub linear_entropy: f64,
    pub delta_r: f64,
    pub robustness: f64,
    pub r_tilde_c: Option<f64>,
    pub r_tilde_n: Option<f64>,
    pub envelope_c: Option<Envelope>,
    pub envelope_n: Option<Envelope>,
    /// Why a normalized robustness is missing or was clipped.
    pub flag: Option<String>,
}

impl EnsembleRecord {
    pub fn entanglement(&self, measure: Measure) -> f64 {
        match measure {
            Measure::Concurrence => self.concurrence,
            Measure::Negativity => self.negativity,
        }
    }

    pub fn r_tilde(&self, measure: Measure) -> Option<f64> {
        match measure {
            Measure::Concurrence => self.r_tilde_c,
            Measure::Negativity => self.r_tilde_n,
        }
    }

    pub fn envelope(&self, measure: Measure) -> Option<Envelope> {
        match measure {
            Measure::Concurrence => self.envelope_c,
            Measure::Negativity => self.envelope_n,
        }
    }
}

/// A draw whose robustness could not be determined.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DrawFailure {
    pub seed: u64,
    pub index: usize,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ensemble {
    pub delta: f64,
    pub spec: RandomSpec,
    pub records: Vec<EnsembleRecord>,
    /// Separable draws (negativity ≤ 1e-9).
    pub discarded: usize,
    pub failures: Vec<DrawFailure>,
}

impl Ensemble {
    pub fn flagged(&self) -> usize {
        self.records.iter().filter(|r| r.flag.is_some()).count()
    }
}

enum Draw {
    Record(Box<EnsembleRecord>),
    Separable,
    Failed(DrawFailure),
}

fn evaluate(spec: &RandomSpec, delta: f64, index: usize) -> Draw {
    let rho = random_state(spec, index);
    let fail = |e: Error| {
        Draw::Failed(DrawFailure {
            seed: spec.seed,
            index,
            error: e.to_string(),
        })
    };
    let n = match negativity(&rho) {
        Ok(n) => n,
        Err(e) => return fail(e),
    };
    if n <= MIN_ENTANGLEMENT {
        return Draw::Separable;
    }
    let (c, robustness) = match (concurrence(&rho), s_crit_numeric(&rho, delta)) {
        (Ok(c), Ok(res)) => (c, res.robustness),
        (Err(e), _) | (_, Err(e)) => return fail(e),
    };
    let mut flags = Vec::new();
    let mut normalized = |measure: Measure, e: f64| -> (Option<f64>, Option<Envelope>) {
        let env = match envelope(delta, measure, e) {
            Ok(env) => env,
            Err(err) => {
                flags.push(format!("{measure}: {err}"));
                return (None, None);
            }
        };
        match normalize(robustness, env.mfes, env.mres) {
            Ok(v) => {
                if v.clipped {
                    flags.push(format!("{measure}: clipped raw value {}", fmt_sig(v.raw)));
                }
                (Some(v.value), Some(env))
            }
            Err(err) => {
                flags.push(format!("{measure}: {err}"));
                (None, Some(env))
            }
        }
    };
    let (r_tilde_c, envelope_c) = normalized(Measure::Concurrence, c);
    let (r_tilde_n, envelope_n) = normalized(Measure::Negativity, n);
    Draw::Record(Box::new(EnsembleRecord {
        seed: spec.seed,
        index,
        concurrence: c,
        negativity: n,
        linear_entropy: linear_entropy(&rho),
        delta_r: bloch_vectors(&rho).delta_r,
        robustness,
        r_tilde_c,
        r_tilde_n,
        envelope_c,
        envelope_n,
        flag: (!flags.is_empty()).then(|| flags.join("; ")),
    }))
}

/// Draws `spec.count` states, evolves each under the channel `Δ` and records
/// its entanglement, mixedness, asymmetry and (normalized) robustness.
///
/// Draws are evaluated in parallel; the result is in index order and does not
/// depend on the number of workers.
pub fn run_ensemble(spec: &RandomSpec, delta: f64) -> Result<Ensemble> {
    spec.validate()?;
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::out_of_range("delta", delta, "[0, 1]"));
    }
    let draws: Vec<Draw> = (0..spec.count)
        .into_par_iter()
        .map(|i| evaluate(spec, delta, i))
        .collect();
    let mut ensemble = Ensemble {
        delta,
        spec: *spec,
        records: Vec::new(),
        discarded: 0,
        failures: Vec::new(),
    };
    for d in draws {
        match d {
            Draw::Record(r) => ensemble.records.push(*r),
            Draw::Separable => ensemble.discarded += 1,
            Draw::Failed(f) => ensemble.failures.push(f),
        }
    }
    Ok(ensemble)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BinKey {
    Robustness,
    RTildeC,
    RTildeN,
}

impl BinKey {
    pub fn of(self, r: &EnsembleRecord) -> Option<f64> {
        match self {
            BinKey::Robustness => Some(r.robustness),
            BinKey::RTildeC => r.r_tilde_c,
            BinKey::RTildeN => r.r_tilde_n,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            BinKey::Robustness => "R",
            BinKey::RTildeC => "R_tilde_C",
            BinKey::RTildeN => "R_tilde_N",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quantity {
    Concurrence,
    Negativity,
    LinearEntropy,
    DeltaR,
}

impl Quantity {
    pub const ALL: [Quantity; 4] = [
        Quantity::Concurrence,
        Quantity::Negativity,
        Quantity::LinearEntropy,
        Quantity::DeltaR,
    ];

    pub fn of(self, r: &EnsembleRecord) -> f64 {
        match self {
            Quantity::Concurrence => r.concurrence,
            Quantity::Negativity => r.negativity,
            Quantity::LinearEntropy => r.linear_entropy,
            Quantity::DeltaR => r.delta_r,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Quantity::Concurrence => "C",
            Quantity::Negativity => "N",
            Quantity::LinearEntropy => "S_L",
            Quantity::DeltaR => "delta_r",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinnedSeries {
    pub bin_key: BinKey,
    pub quantity: Quantity,
    pub bin_edges: Vec<f64>,
    /// `None` for empty bins.
    pub means: Vec<Option<f64>>,
    pub counts: Vec<usize>,
    /// Standard error of the mean; `None` with fewer than two samples.
    pub stderr: Vec<Option<f64>>,
}

impl BinnedSeries {
    pub fn centers(&self) -> Vec<f64> {
        self.bin_edges
            .windows(2)
            .map(|w| 0.5 * (w[0] + w[1]))
            .collect()
    }

    /// `(center, mean)` of the non-empty bins.
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.centers()
            .into_iter()
            .zip(&self.means)
            .filter_map(|(x, m)| m.map(|m| (x, m)))
            .collect()
    }
}

/// Means of `quantity` in `n_bins` equal-width bins spanning the observed
/// range of `key`. Records without a key value are skipped.
pub fn binned_averages(
    records: &[EnsembleRecord],
    key: BinKey,
    n_bins: usize,
    quantity: Quantity,
) -> BinnedSeries {
    let n_bins = n_bins.max(1);
    let pairs: Vec<(f64, f64)> = records
        .iter()
        .filter_map(|r| key.of(r).map(|k| (k, quantity.of(r))))
        .collect();
    let (lo, hi) = pairs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(k, _)| {
            (lo.min(k), hi.max(k))
        });
    let (lo, hi) = if pairs.is_empty() {
        (0.0, 1.0)
    } else if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, lo + 0.5)
    };
    let width = (hi - lo) / n_bins as f64;
    let bin_edges: Vec<f64> = (0..=n_bins)
        .map(|i| {
            if i == n_bins {
                hi
            } else {
                lo + i as f64 * width
            }
        })
        .collect();

    let mut sums = vec![(0usize, 0.0f64, 0.0f64); n_bins];
    for &(k, v) in &pairs {
        let i = (((k - lo) / width) as usize).min(n_bins - 1);
        sums[i].0 += 1;
        sums[i].1 += v;
    }
    let means: Vec<Option<f64>> = sums
        .iter()
        .map(|&(n, s, _)| (n > 0).then(|| s / n as f64))
        .collect();
    for &(k, v) in &pairs {
        let i = (((k - lo) / width) as usize).min(n_bins - 1);
        let m = means[i].unwrap_or(0.0);
        sums[i].2 += (v - m) * (v - m);
    }
    BinnedSeries {
        bin_key: key,
        quantity,
        bin_edges,
        means,
        counts: sums.iter().map(|s| s.0).collect(),
        stderr: sums
            .iter()
            .map(|&(n, _, ss)| (n >= 2).then(|| (ss / (n - 1) as f64 / n as f64).sqrt()))
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Spearman {
    pub rho: f64,
    /// Two-sided p-value from the t approximation with `n − 2` degrees of
    /// freedom.
    pub p_value: f64,
    pub n: usize,
}

fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = 0.5 * (i + j) as f64 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation; `None` with fewer than three points or a
/// constant sample.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<Spearman> {
    let n = x.len().min(y.len());
    if n < 3 {
        return None;
    }
    let (rx, ry) = (ranks(&x[..n]), ranks(&y[..n]));
    let mean = (n as f64 + 1.0) / 2.0;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let (a, b) = (rx[i] - mean, ry[i] - mean);
        sxy += a * b;
        sxx += a * a;
        syy += b * b;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    let rho = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    let df = (n - 2) as f64;
    let p_value = if rho.abs() == 1.0 {
        0.0
    } else {
        let t = rho * (df / (1.0 - rho * rho)).sqrt();
        let dist = StudentsT::new(0.0, 1.0, df).ok()?;
        2.0 * (1.0 - dist.cdf(t.abs()))
    };
    Some(Spearman { rho, p_value, n })
}

/// Spearman correlation between bin centers and bin means, optionally
/// restricted to bins whose center lies below `below`.
pub fn binned_trend(series: &BinnedSeries, below: Option<f64>) -> Option<Spearman> {
    let points: Vec<(f64, f64)> = series
        .points()
        .into_iter()
        .filter(|&(x, _)| below.is_none_or(|b| x < b))
        .collect();
    let (x, y): (Vec<f64>, Vec<f64>) = points.into_iter().unzip();
    spearman(&x, &y)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub seed: u64,
    pub index: usize,
    pub entanglement: f64,
    pub robustness: f64,
    pub mres: f64,
    pub mfes: f64,
    /// Distance outside `[R_MFES, R_MRES]`.
    pub excess: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeReport {
    pub delta: f64,
    pub measure: Measure,
    pub tol: f64,
    pub checked: usize,
    pub violations: usize,
    /// Records whose envelope could not be evaluated.
    pub unchecked: usize,
    pub worst: Vec<Violation>,
    /// Largest excess over all records, violating or not.
    pub max_excess: f64,
}

impl EnvelopeReport {
    pub fn fraction(&self) -> f64 {
        if self.checked == 0 {
            0.0
        } else {
            self.violations as f64 / self.checked as f64
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0 && self.unchecked == 0
    }
}

/// Checks `R_MFES − tol ≤ R ≤ R_MRES + tol` for every record, at the
/// record's own entanglement value.
pub fn envelope_check(records: &[EnsembleRecord], delta: f64, measure: Measure) -> EnvelopeReport {
    let evaluated: Vec<Option<Violation>> = records
        .par_iter()
        .map(|r| {
            let e = r.entanglement(measure);
            let env = match r.envelope(measure) {
                Some(env) => env,
                None => envelope(delta, measure, e).ok()?,
            };
            let excess = (r.robustness - env.mres).max(env.mfes - r.robustness);
            Some(Violation {
                seed: r.seed,
                index: r.index,
                entanglement: e,
                robustness: r.robustness,
                mres: env.mres,
                mfes: env.mfes,
                excess,
            })
        })
        .collect();
    let unchecked = evaluated.iter().filter(|v| v.is_none()).count();
    let mut all: Vec<Violation> = evaluated.into_iter().flatten().collect();
    let max_excess = all
        .iter()
        .map(|v| v.excess)
        .fold(f64::NEG_INFINITY, f64::max);
    let checked = all.len();
    all.retain(|v| v.excess > ENVELOPE_TOL);
    all.sort_by(|a, b| b.excess.total_cmp(&a.excess));
    let violations = all.len();
    all.truncate(WORST_VIOLATORS);
    EnvelopeReport {
        delta,
        measure,
        tol: ENVELOPE_TOL,
        checked,
        violations,
        unchecked,
        worst: all,
        max_excess,
    }
}

pub fn write_ensemble_csv<W: Write>(mut out: W, ensemble: &Ensemble) -> io::Result<()> {
    writeln!(out, "{CSV_SCHEMA}")?;
    writeln!(
        out,
        "delta,seed,index,concurrence,negativity,linear_entropy,delta_r,robustness,\
         r_tilde_c,r_tilde_n,r_mres_c,r_mfes_c,r_mres_n,r_mfes_n,flag"
    )?;
    for r in &ensemble.records {
        let env = |e: Option<Envelope>| (fmt_opt(e.map(|e| e.mres)), fmt_opt(e.map(|e| e.mfes)));
        let (mres_c, mfes_c) = env(r.envelope_c);
        let (mres_n, mfes_n) = env(r.envelope_n);
        let flag = r
            .flag
            .as_deref()
            .unwrap_or("")
            .replace([',', '"', '\n'], " ");
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            fmt_sig(ensemble.delta),
            r.seed,
            r.index,
            fmt_sig(r.concurrence),
            fmt_sig(r.negativity),
            fmt_sig(r.linear_entropy),
            fmt_sig(r.delta_r),
            fmt_sig(r.robustness),
            fmt_opt(r.r_tilde_c),
            fmt_opt(r.r_tilde_n),
            mres_c,
            mfes_c,
            mres_n,
            mfes_n,
            flag
        )?;
    }
    Ok(())
}

pub fn write_binned_csv<W: Write>(
    mut out: W,
    delta: f64,
    series: &[BinnedSeries],
) -> io::Result<()> {
    writeln!(out, "{CSV_SCHEMA}")?;
    writeln!(out, "delta,key,quantity,bin_lo,bin_hi,count,mean,stderr")?;
    for s in series {
        for i in 0..s.counts.len() {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                fmt_sig(delta),
                s.bin_key.label(),
                s.quantity.label(),
                fmt_sig(s.bin_edges[i]),
                fmt_sig(s.bin_edges[i + 1]),
                s.counts[i],
                fmt_opt(s.means[i]),
                fmt_opt(s.stderr[i])
            )?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::SpectrumMode;
    use crate::robustness::bell_robustness;
    use approx::assert_abs_diff_eq;

    fn record(key: f64, value: f64) -> EnsembleRecord {
        EnsembleRecord {
            seed: 0,
            index: 0,
            concurrence: value,
            negativity: value,
            linear_entropy: value,
            delta_r: value,
            robustness: key,
            r_tilde_c: None,
            r_tilde_n: Some(key),
            envelope_c: None,
            envelope_n: None,
            flag: None,
        }
    }

    #[test]
    fn spearman_known_values() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let s = spearman(&x, &[2.0, 4.0, 6.0, 8.0, 10.0]).unwrap();
        assert_eq!(s.rho, 1.0);
        assert_eq!(s.p_value, 0.0);
        let s = spearman(&x, &[5.0, 6.0, 7.0, 8.0, 7.0]).unwrap();
        // Ranks (1 2 3.5 5 3.5) against (1 2 3 4 5).
        assert_abs_diff_eq!(s.rho, 0.8207826816681233, epsilon = 1e-12);
        assert!(s.p_value > 0.05 && s.p_value < 0.2);
        assert!(spearman(&x[..2], &x[..2]).is_none());
        assert!(spearman(&x, &[1.0; 5]).is_none());
    }

    #[test]
    fn binning_layout() {
        let records: Vec<EnsembleRecord> =
            (0..100).map(|i| record(i as f64, 2.0 * i as f64)).collect();
        let s = binned_averages(&records, BinKey::Robustness, 10, Quantity::Concurrence);
        assert_eq!(s.bin_edges.len(), 11);
        assert_eq!(s.counts.iter().sum::<usize>(), 100);
        assert_eq!(s.bin_edges[0], 0.0);
        assert_eq!(s.bin_edges[10], 99.0);
        assert!(s.means.iter().all(|m| m.is_some()));
        let trend = binned_trend(&s, None).unwrap();
        assert_eq!(trend.rho, 1.0);

        let s = binned_averages(&records[..3], BinKey::RTildeC, 4, Quantity::DeltaR);
        assert_eq!(s.counts, vec![0; 4]);
        assert!(s.means.iter().all(|m| m.is_none()));
    }

    #[test]
    fn small_ensemble_respects_bell_bound_and_envelope() {
        let spec = RandomSpec::new(7, 300, SpectrumMode::UniformSimplex);
        let ens = run_ensemble(&spec, 0.0).unwrap();
        assert!(ens.failures.is_empty());
        assert_eq!(ens.records.len() + ens.discarded, 300);
        for r in &ens.records {
            assert!(r.robustness <= bell_robustness() + 1e-6);
            assert!(r.r_tilde_c.is_some() && r.r_tilde_n.is_some());
        }
        for m in Measure::ALL {
            let report = envelope_check(&ens.records, 0.0, m);
            assert!(report.passed(), "{report:?}");
        }
    }

    #[test]
    fn injected_violation_is_caught() {
        let spec = RandomSpec::new(3, 40, SpectrumMode::AlphaAngles);
        let mut ens = run_ensemble(&spec, 0.5).unwrap();
        let fake = ens.records[0].clone();
        let env = fake.envelope_c.unwrap();
        ens.records.push(EnsembleRecord {
            robustness: env.mres + 1e-3,
            index: 9999,
            ..fake
        });
        let report = envelope_check(&ens.records, 0.5, Measure::Concurrence);
        assert_eq!(report.violations, 1);
        assert_eq!(report.worst[0].index, 9999);
        assert_abs_diff_eq!(report.worst[0].excess, 1e-3, epsilon = 1e-12);
    }
}
