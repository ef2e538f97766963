//! `esdlab`: entanglement robustness under local depolarizing channels.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
//! 3 domain error (for example a separable input).

mod state;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use esdlab_core::entanglement::measures;
use esdlab_core::extremal::{family, write_family_csv, FamilyKind};
use esdlab_core::mcstats::{
    binned_averages, run_ensemble, write_binned_csv, write_ensemble_csv, BinKey, Quantity,
    DEFAULT_BINS,
};
use esdlab_core::output::fmt_sig;
use esdlab_core::qstate::{bloch_vectors, linear_entropy, RandomSpec, SpectrumMode};
use esdlab_core::robustness::{s_crit_ansatz, s_crit_numeric};
use esdlab_core::verify::{run_suite, Suite, SuiteReport};
use esdlab_core::{Error, Measure};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "esdlab",
    version,
    about = "Robustness of two-qubit entanglement under local depolarizing noise"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Concurrence, negativity, linear entropy and Bloch lengths of a state.
    Measure { state_file: PathBuf },
    /// Critical noise s_crit and robustness R = 1 - s_crit.
    Scrit {
        state_file: PathBuf,
        #[arg(long, value_parser = unit_interval)]
        delta: f64,
        /// `ansatz` uses the closed-form polynomial and needs an ansatz state.
        #[arg(long, value_enum, default_value_t = MethodArg::Ppt)]
        method: MethodArg,
    },
    /// MRES / MFES / quasi-MFES family curves.
    Family {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, value_enum)]
        measure: MeasureArg,
        #[arg(long, value_parser = unit_interval)]
        delta: f64,
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
        grid: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Random-state ensemble with binned averages.
    Mc {
        #[arg(long, value_parser = unit_interval)]
        delta: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 20000, value_parser = clap::value_parser!(u64).range(1..))]
        count: u64,
        #[arg(long, value_enum, default_value_t = ModeArg::Alpha)]
        mode: ModeArg,
        #[arg(long, default_value_t = DEFAULT_BINS as u64, value_parser = clap::value_parser!(u64).range(1..))]
        bins: u64,
        /// Mix each draw with a random ansatz state, weight up to this value.
        #[arg(long, default_value_t = 0.0, value_parser = unit_interval)]
        mix: f64,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Run a verification suite; exits 1 on any failed check.
    Verify {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Draws per suite (default 200 for factorization, 20000 for envelope).
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        count: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Ppt,
    Ansatz,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Mres,
    Mfes,
    Quasi,
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasureArg {
    C,
    N,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Simplex,
    Alpha,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Envelope,
    Factorization,
    Quasifidelity,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Text,
}

fn unit_interval(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(format!("{x} is outside [0, 1]"))
    }
}

enum Failure {
    Usage(String),
    Domain(String),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::OutOfRange { .. } | Error::InvalidState(_) => Failure::Usage(e.to_string()),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Usage(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn output(out: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

#[derive(Serialize)]
struct MeasureReport {
    #[serde(rename = "C")]
    concurrence: f64,
    #[serde(rename = "N")]
    negativity: f64,
    #[serde(rename = "S_L")]
    linear_entropy: f64,
    r1: f64,
    r2: f64,
    delta_r: f64,
}

fn cmd_measure(path: &Path) -> Result<(), Failure> {
    let s = state::load(path).map_err(Failure::Usage)?;
    let m = measures(&s.rho)?;
    let b = bloch_vectors(&s.rho);
    print_json(&MeasureReport {
        concurrence: m.concurrence,
        negativity: m.negativity,
        linear_entropy: linear_entropy(&s.rho),
        r1: b.r1_len,
        r2: b.r2_len,
        delta_r: b.delta_r,
    })
}

fn cmd_scrit(path: &Path, delta: f64, method: MethodArg) -> Result<(), Failure> {
    let s = state::load(path).map_err(Failure::Usage)?;
    let result = match (method, s.ansatz) {
        (MethodArg::Ppt, _) => s_crit_numeric(&s.rho, delta)?,
        (MethodArg::Ansatz, Some(p)) => s_crit_ansatz(p, delta)?,
        (MethodArg::Ansatz, None) => {
            return Err(Failure::Usage(
                "--method ansatz needs an ansatz state file".into(),
            ))
        }
    };
    print_json(&result)
}

fn cmd_family(
    kind: KindArg,
    measure: MeasureArg,
    delta: f64,
    grid: usize,
    out: Option<&Path>,
    format: Format,
) -> Result<(), Failure> {
    let kind = match kind {
        KindArg::Mres => FamilyKind::Mres,
        KindArg::Mfes => FamilyKind::Mfes,
        KindArg::Quasi => FamilyKind::Quasi,
    };
    let measure = match measure {
        MeasureArg::C => Measure::Concurrence,
        MeasureArg::N => Measure::Negativity,
    };
    let points = family(kind, measure, delta, grid)?;
    let mut w = output(out)?;
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, &points)
                .map_err(|e| Failure::Usage(e.to_string()))?;
            writeln!(w)?;
        }
        _ => write_family_csv(&mut w, &points)?,
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct McSummary {
    delta: f64,
    seed: u64,
    count: usize,
    mode: SpectrumMode,
    entangled: usize,
    discarded: usize,
    flagged: usize,
    failures: usize,
    files: Vec<PathBuf>,
}

fn cmd_mc(
    delta: f64,
    seed: u64,
    count: usize,
    mode: ModeArg,
    bins: usize,
    mix: f64,
    out_dir: &Path,
) -> Result<(), Failure> {
    let (mode, tag) = match mode {
        ModeArg::Simplex => (SpectrumMode::UniformSimplex, "simplex"),
        ModeArg::Alpha => (SpectrumMode::AlphaAngles, "alpha"),
    };
    let spec = RandomSpec::new(seed, count, mode).with_mixture(mix);
    let ensemble = run_ensemble(&spec, delta)?;
    std::fs::create_dir_all(out_dir)?;
    let suffix = format!("delta{}_{tag}_seed{seed}.csv", fmt_sig(delta));
    let mut files = Vec::new();

    let path = out_dir.join(format!("ensemble_{suffix}"));
    let mut w = BufWriter::new(File::create(&path)?);
    write_ensemble_csv(&mut w, &ensemble)?;
    w.flush()?;
    files.push(path);

    use BinKey::*;
    use Quantity::*;
    let figures: [(&str, &[BinKey], &[Quantity]); 3] = [
        (
            "fig6",
            &[Robustness],
            &[Concurrence, Negativity, LinearEntropy],
        ),
        ("fig7", &[RTildeC, RTildeN], &[LinearEntropy]),
        ("fig8", &[RTildeC, RTildeN], &[DeltaR]),
    ];
    for (name, keys, quantities) in figures {
        let series: Vec<_> = keys
            .iter()
            .flat_map(|&k| quantities.iter().map(move |&q| (k, q)))
            .map(|(k, q)| binned_averages(&ensemble.records, k, bins, q))
            .collect();
        let path = out_dir.join(format!("{name}_{suffix}"));
        let mut w = BufWriter::new(File::create(&path)?);
        write_binned_csv(&mut w, delta, &series)?;
        w.flush()?;
        files.push(path);
    }
    for f in &ensemble.failures {
        eprintln!("warning: draw {} (seed {}): {}", f.index, f.seed, f.error);
    }
    print_json(&McSummary {
        delta,
        seed,
        count,
        mode,
        entangled: ensemble.records.len(),
        discarded: ensemble.discarded,
        flagged: ensemble.flagged(),
        failures: ensemble.failures.len(),
        files,
    })
}

fn print_report(report: &SuiteReport) {
    println!("suite: {:?}", report.suite);
    println!(
        "{:<6} {:<64} {:>14} {:>14}  detail",
        "status", "check", "value", "threshold"
    );
    for f in &report.findings {
        println!(
            "{:<6} {:<64} {:>14} {:>14}  {}",
            if f.passed { "PASS" } else { "FAIL" },
            f.check,
            fmt_sig(f.value),
            fmt_sig(f.threshold),
            f.detail
        );
    }
    println!(
        "{} in {:.1} s",
        if report.passed() { "PASS" } else { "FAIL" },
        report.elapsed_secs
    );
}

fn cmd_verify(
    suite: SuiteArg,
    seed: u64,
    count: Option<usize>,
    format: Format,
) -> Result<(), Failure> {
    let (suite, default_count) = match suite {
        SuiteArg::Envelope => (Suite::Envelope, 20000),
        SuiteArg::Factorization => (Suite::Factorization, 200),
        SuiteArg::Quasifidelity => (Suite::Quasifidelity, 0),
    };
    let report = run_suite(suite, seed, count.unwrap_or(default_count))?;
    match format {
        Format::Json => print_json(&report)?,
        _ => print_report(&report),
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("ESDLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| {
            Failure::Usage(format!(
                "ESDLAB_THREADS must be a positive integer, got {value:?}"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    match cli.command {
        Command::Measure { state_file } => cmd_measure(&state_file),
        Command::Scrit {
            state_file,
            delta,
            method,
        } => cmd_scrit(&state_file, delta, method),
        Command::Family {
            kind,
            measure,
            delta,
            grid,
            out,
            format,
        } => cmd_family(kind, measure, delta, grid as usize, out.as_deref(), format),
        Command::Mc {
            delta,
            seed,
            count,
            mode,
            bins,
            mix,
            out_dir,
        } => cmd_mc(
            delta,
            seed,
            count as usize,
            mode,
            bins as usize,
            mix,
            &out_dir,
        ),
        Command::Verify {
            suite,
            seed,
            count,
            format,
        } => cmd_verify(suite, seed, count.map(|c| c as usize), format),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
