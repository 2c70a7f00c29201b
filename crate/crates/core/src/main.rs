//! Command-line front end: builds symbols from JSON descriptions or
//! builtins and emits machine-readable reports for the library operations.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use toeplitz_spectra::band_inverse::{decay_certificate, BandInverse};
use toeplitz_spectra::error::{Error, Result};
use toeplitz_spectra::regular;
use toeplitz_spectra::report::{self, SCHEMA};
use toeplitz_spectra::secular::{self, TestFn};
use toeplitz_spectra::symbols::{builtin_symbol, symbol_from_json, Symbol};
use toeplitz_spectra::toeplitz::{levinson_predictor, verify_predictor_moments, ToeplitzMatrix};

#[derive(Parser)]
#[command(
    name = "toeplitz-spectra",
    about = "Banded Toeplitz inversion, eigenvalue location, and decay reports",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Symbol source: a JSON file path or `builtin:name?key=value`.
    #[arg(long)]
    symbol: String,
    /// Matrix order N, or a comma-separated sweep like `8,16,32`.
    #[arg(long, default_value = "16")]
    n: String,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, default_value = "json", value_parser = ["json", "csv"])]
    format: String,
    /// Tolerance override where a command accepts one.
    #[arg(long)]
    tol: Option<f64>,
    /// Seed recorded in the config; reserved for randomized diagnostics
    /// (all shipped commands are deterministic).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Fourier coefficients of the symbol, as CSV rows (k, re, im).
    Fourier(CommonArgs),
    /// Closed-form band inverse cross-checked against the dense LU oracle.
    InvertBand(CommonArgs),
    /// Off-diagonal decay certificate of the closed-form inverse.
    DecayReport(CommonArgs),
    /// Locate eigenvalues (secular path for even band symbols, dense
    /// otherwise) and localize them on the symbol grid.
    EigLocate(CommonArgs),
    /// Weyl equidistribution statistics over an N sweep.
    Weyl(CommonArgs),
    /// Predictor polynomial of degree N and its moment defect.
    Predictor(CommonArgs),
    /// Decay certification for a regular symbol via its square-modulus
    /// approximant.
    RegularDecay {
        #[command(flatten)]
        common: CommonArgs,
        /// Approximant degree; searched up to 64 when omitted.
        #[arg(long)]
        approx_m: Option<usize>,
        /// Probe rate (> 1); defaults to the reciprocal of the approximant's
        /// largest inside root.
        #[arg(long)]
        rho_probe: Option<f64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    validate_thread_cap()?;
    let common = match &cli.command {
        Command::Fourier(a)
        | Command::InvertBand(a)
        | Command::DecayReport(a)
        | Command::EigLocate(a)
        | Command::Weyl(a)
        | Command::Predictor(a) => a,
        Command::RegularDecay { common, .. } => common,
    };
    if let Some(tol) = common.tol {
        if !(tol > 0.0) {
            return Err(Error::Config(format!("tolerance must be positive (got {tol})")));
        }
    }
    match cli.command {
        Command::Fourier(args) => cmd_fourier(&args),
        Command::InvertBand(args) => cmd_invert_band(&args),
        Command::DecayReport(args) => cmd_decay_report(&args),
        Command::EigLocate(args) => cmd_eig_locate(&args),
        Command::Weyl(args) => cmd_weyl(&args),
        Command::Predictor(args) => cmd_predictor(&args),
        Command::RegularDecay {
            common,
            approx_m,
            rho_probe,
        } => cmd_regular_decay(&common, approx_m, rho_probe),
    }
}

/// TOEPLITZ_SPECTRA_THREADS caps internal parallelism. The current
/// implementation is single-threaded, so any positive cap is honored
/// trivially; zero or garbage is a configuration error.
fn validate_thread_cap() -> Result<()> {
    match std::env::var("TOEPLITZ_SPECTRA_THREADS") {
        Err(_) => Ok(()),
        Ok(raw) => match raw.parse::<usize>() {
            Ok(cap) if cap >= 1 => Ok(()),
            _ => Err(Error::Config(format!(
                "TOEPLITZ_SPECTRA_THREADS must be a positive integer (got '{raw}')"
            ))),
        },
    }
}

fn load_symbol(source: &str) -> Result<Symbol> {
    if let Some(rest) = source.strip_prefix("builtin:") {
        let (name, params) = match rest.split_once('?') {
            None => (rest, BTreeMap::new()),
            Some((name, query)) => {
                let mut params = BTreeMap::new();
                for pair in query.split('&') {
                    if pair.is_empty() {
                        continue;
                    }
                    let (k, v) = pair.split_once('=').ok_or_else(|| {
                        Error::Config(format!("builtin parameter '{pair}' is not key=value"))
                    })?;
                    let parsed: f64 = v
                        .parse()
                        .map_err(|_| Error::Config(format!("parameter '{k}' is not a number")))?;
                    params.insert(k.to_string(), parsed);
                }
                (name, params)
            }
        };
        return builtin_symbol(name, &params);
    }
    let text = std::fs::read_to_string(source)
        .map_err(|e| Error::Config(format!("cannot read symbol file '{source}': {e}")))?;
    symbol_from_json(&text)
}

fn parse_orders(raw: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in raw.split(',') {
        let n: usize = part
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("order '{part}' is not a positive integer")))?;
        if n == 0 {
            return Err(Error::Config("order must be >= 1".into()));
        }
        out.push(n);
    }
    if out.is_empty() {
        return Err(Error::Config("no orders given".into()));
    }
    Ok(out)
}

fn single_order(args: &CommonArgs) -> Result<usize> {
    let orders = parse_orders(&args.n)?;
    if orders.len() != 1 {
        return Err(Error::Config(format!(
            "this command takes a single order (got '{}')",
            args.n
        )));
    }
    Ok(orders[0])
}

fn emit(args: &CommonArgs, text: &str) -> Result<()> {
    match &args.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn emit_report<T: Serialize>(args: &CommonArgs, value: &T) -> Result<()> {
    let text = match args.format.as_str() {
        "json" => report::to_json(value),
        _ => report::to_csv(value),
    };
    emit(args, &text)
}

fn cmd_fourier(args: &CommonArgs) -> Result<()> {
    let f = load_symbol(&args.symbol)?;
    let n = single_order(args)?;
    let coeffs = f.fourier_coefficients(n)?;
    if args.format == "csv" {
        let mut text = String::from("k,re,im\n");
        for (idx, z) in coeffs.iter().enumerate() {
            let k = idx as i64 - n as i64;
            text.push_str(&format!("{k},{:.16e},{:.16e}\n", z.re, z.im));
        }
        emit(args, &text)
    } else {
        #[derive(Serialize)]
        struct FourierReport {
            schema: &'static str,
            symbol: String,
            n: usize,
            coefficients: Vec<[f64; 3]>,
        }
        let coefficients = coeffs
            .iter()
            .enumerate()
            .map(|(idx, z)| [(idx as i64 - n as i64) as f64, z.re, z.im])
            .collect();
        emit_report(
            args,
            &FourierReport {
                schema: SCHEMA,
                symbol: f.name().to_string(),
                n,
                coefficients,
            },
        )
    }
}

#[derive(Serialize)]
struct InvertBandReport {
    schema: &'static str,
    symbol: String,
    n: usize,
    rho_theory: f64,
    max_abs_diff: f64,
    identity_residual: f64,
    hankel_norm: f64,
    correction_sigma_min: f64,
}

fn cmd_invert_band(args: &CommonArgs) -> Result<()> {
    let f = load_symbol(&args.symbol)?;
    let n = single_order(args)?;
    let inv = BandInverse::new(&f, n)?;
    let t = ToeplitzMatrix::build(&f, n)?;
    let oracle = t.dense_inverse()?;
    let closed = inv.to_dense();
    let mut max_abs_diff = 0.0f64;
    for k in 0..=n {
        for l in 0..=n {
            max_abs_diff = max_abs_diff.max((closed[(k, l)] - oracle[(k, l)]).norm());
        }
    }
    let identity_residual = t.to_dense().identity_residual(&closed);
    emit_report(
        args,
        &InvertBandReport {
            schema: SCHEMA,
            symbol: f.name().to_string(),
            n,
            rho_theory: inv.rho(),
            max_abs_diff,
            identity_residual,
            hankel_norm: inv.block.norm2,
            correction_sigma_min: inv.block.sigma_min_correction,
        },
    )
}

#[derive(Serialize)]
struct DecayReportOut {
    schema: &'static str,
    symbol: String,
    decay: toeplitz_spectra::band_inverse::DecayReport,
}

fn cmd_decay_report(args: &CommonArgs) -> Result<()> {
    let f = load_symbol(&args.symbol)?;
    let n = single_order(args)?;
    let inv = BandInverse::new(&f, n)?;
    let band = f.band_degree().unwrap_or(0);
    let decay = decay_certificate(|k, l| inv.entry(k, l), n, band, inv.rho(), 0.0);
    emit_report(
        args,
        &DecayReportOut {
            schema: SCHEMA,
            symbol: f.name().to_string(),
            decay,
        },
    )
}

#[derive(Serialize)]
struct EigLocateReport {
    schema: &'static str,
    symbol: String,
    method: String,
    unique_min: bool,
    localization: toeplitz_spectra::secular::EigenLocalizationReport,
}

fn cmd_eig_locate(args: &CommonArgs) -> Result<()> {
    let f = load_symbol(&args.symbol)?;
    let n = single_order(args)?;
    // Secular path for even real band symbols with a unique minimum;
    // dense oracle otherwise (the uniqueness flag is recorded either way).
    let secular_eligible =
        f.is_trig_poly() && f.flags.is_even && f.flags.is_real && f.flags.has_unique_min;
    let (method, eigs) = if secular_eligible {
        match secular::locate_eigenvalues(&f, n) {
            Ok(eigs) => ("secular".to_string(), eigs),
            Err(Error::BracketCountMismatch { .. }) | Err(Error::Config(_)) => (
                "dense".to_string(),
                ToeplitzMatrix::build(&f, n)?.hermitian_eigenvalues()?,
            ),
            Err(other) => return Err(other),
        }
    } else {
        (
            "dense".to_string(),
            ToeplitzMatrix::build(&f, n)?.hermitian_eigenvalues()?,
        )
    };
    let localization = secular::localize(&eigs, &f, n)?;
    emit_report(
        args,
        &EigLocateReport {
            schema: SCHEMA,
            symbol: f.name().to_string(),
            method,
            unique_min: f.flags.has_unique_min,
            localization,
        },
    )
}

#[derive(Serialize)]
struct WeylSweepEntry {
    n: usize,
    statistics: Vec<toeplitz_spectra::secular::WeylStatistic>,
}

#[derive(Serialize)]
struct WeylReport {
    schema: &'static str,
    symbol: String,
    sweep: Vec<WeylSweepEntry>,
}

fn cmd_weyl(args: &CommonArgs) -> Result<()> {
    let f = load_symbol(&args.symbol)?;
    let orders = parse_orders(&args.n)?;
    let mut sweep = Vec::with_capacity(orders.len());
    for n in orders {
        let eigs = ToeplitzMatrix::build(&f, n)?.hermitian_eigenvalues()?;
        let statistics = secular::weyl_statistic(
            &eigs,
            &f,
            n,
            &[TestFn::X, TestFn::XSquared, TestFn::Cos, TestFn::Abs],
        )?;
        sweep.push(WeylSweepEntry { n, statistics });
    }
    emit_report(
        args,
        &WeylReport {
            schema: SCHEMA,
            symbol: f.name().to_string(),
            sweep,
        },
    )
}

#[derive(Serialize)]
struct PredictorReport {
    schema: &'static str,
    symbol: String,
    degree: usize,
    beta: Vec<[f64; 2]>,
    moment_error: f64,
    tolerance: f64,
    within_tolerance: bool,
}

fn cmd_predictor(args: &CommonArgs) -> Result<()> {
    let f = load_symbol(&args.symbol)?;
    let degree = single_order(args)?;
    let p = levinson_predictor(&f, degree)?;
    let moment_error = verify_predictor_moments(&f, &p)?;
    let tolerance = args.tol.unwrap_or(1e-9);
    emit_report(
        args,
        &PredictorReport {
            schema: SCHEMA,
            symbol: f.name().to_string(),
            degree,
            beta: p.coeffs.iter().map(|z| [z.re, z.im]).collect(),
            moment_error,
            tolerance,
            within_tolerance: moment_error <= tolerance,
        },
    )
}

#[derive(Serialize)]
struct RegularDecayOut {
    schema: &'static str,
    symbol: String,
    report: regular::NeumannDecayReport,
}

fn cmd_regular_decay(
    args: &CommonArgs,
    approx_m: Option<usize>,
    rho_probe: Option<f64>,
) -> Result<()> {
    let f = load_symbol(&args.symbol)?;
    let n = single_order(args)?;
    let approx = match approx_m {
        Some(m) => regular::approximation_with_degree(&f, m)?,
        None => {
            let (min, _) = f.min_max();
            if min <= 0.0 {
                return Err(Error::NotPositive { min });
            }
            let target = args.tol.unwrap_or(min / 4.0);
            regular::square_modulus_approximation(&f, target, 64)?
        }
    };
    let report = regular::neumann_decay_report(&f, &approx, n, rho_probe)?;
    emit_report(
        args,
        &RegularDecayOut {
            schema: SCHEMA,
            symbol: f.name().to_string(),
            report,
        },
    )
}

// Exit-code contract (also unit-tested in the library): 0 success,
// 2 config, 3 boundary root, 4 multiplicity, 5 singular correction,
// 1 anything else.
