//! `tracecoord`: sampling, coordinates, identity checks, classification,
//! conjugacy and fitting for pairs of 4×4 matrices.
//!
//! Exit codes: 0 success, 1 verified false, 2 domain error, 3 input error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use tracecoord::classify::classify_pair;
use tracecoord::coords::{
    compute, jacobian_rank, jacobian_rank_words, parameter_words, RealCoordinateVector, TraceVector, Catalog,
    PerturbationSpace, JACOBIAN_STEP,
};
use tracecoord::error::Error;
use tracecoord::fuzz::{run_suites, suite_residual, trial_pair, Suite, SU31_SAMPLE_SCALE};
use tracecoord::matrix::{random_loxodromic, random_sl4, random_su31, GroupElement, GroupElementJson};
use tracecoord::reconstruct::{
    conjugacy_test, find_conjugator, fit_pair, reduced_conjugacy_test, FitConfig, CONJUGACY_TOL,
};

#[derive(Parser)]
#[command(name = "tracecoord", version, about = "Trace coordinates for pairs in SL(4,C) and SU(3,1)")]
struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Group {
    Sl4,
    Su31,
    Loxodromic,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Write `count` random group elements (or pairs) as JSON files.
    Sample {
        #[arg(long, value_enum)]
        group: Group,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        /// Output directory.
        #[arg(long, default_value = ".")]
        dir: PathBuf,
        /// Write pair files `{"a": ..., "b": ...}` instead of single elements.
        #[arg(long)]
        pairs: bool,
        /// Algebra scale for su31 samples.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// |λ| for loxodromic samples.
        #[arg(long, default_value_t = 2.0)]
        modulus: f64,
    },
    /// Trace vector of a pair; SU31_22 also emits the 39 real coordinates.
    Coords {
        pairfile: PathBuf,
        #[arg(long, default_value = "SU31_22")]
        catalog: String,
        /// csv is only available for the real coordinates of SU31_22.
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Check one identity suite on a pair file or on seeded random pairs.
    Verify {
        pairfile: Option<PathBuf>,
        #[arg(long)]
        suite: String,
        #[arg(long, requires = "seed", conflicts_with = "pairfile")]
        random: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Isometry types, Burnside span and invariant subspace of a pair.
    Classify { pairfile: PathBuf },
    /// Compare two pairs up to conjugation.
    Conjugacy {
        first: PathBuf,
        second: PathBuf,
        #[arg(long)]
        catalog: Option<String>,
        #[arg(long, default_value_t = CONJUGACY_TOL)]
        tol: f64,
        #[arg(long)]
        find_conjugator: bool,
        /// Use the reduced invariants of reducible loxodromic pairs.
        #[arg(long, conflicts_with = "find_conjugator")]
        reduced: bool,
    },
    /// Fit a pair to a target trace vector.
    Fit {
        coordsfile: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = 200)]
        max_iterations: usize,
    },
    /// Numerical rank of the trace map.
    Jacobian {
        pairfile: Option<PathBuf>,
        #[arg(long, requires = "seed", conflicts_with = "pairfile")]
        random: bool,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "SL4_DJOKOVIC_30")]
        catalog: String,
        /// Restrict to the 15 parameter words.
        #[arg(long)]
        params_only: bool,
        #[arg(long, default_value_t = JACOBIAN_STEP)]
        step: f64,
    },
    /// Run every invariant suite on seeded random pairs.
    Fuzz {
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

/// Failure classes mapped to exit codes.
enum Failure {
    Domain(String),
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Domain(e.to_string())
        }
    }
}

/// A report and whether it states a positive result.
struct Output {
    body: String,
    ok: bool,
}

impl Output {
    fn json<T: Serialize>(value: &T, ok: bool) -> Result<Self, Failure> {
        let body = serde_json::to_string_pretty(value).map_err(|e| Failure::Input(e.to_string()))?;
        Ok(Output { body: body + "\n", ok })
    }
}

#[derive(Serialize, Deserialize)]
struct PairFile {
    a: GroupElementJson,
    b: GroupElementJson,
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_pair(path: &Path) -> Result<(GroupElement, GroupElement), Failure> {
    let pair: PairFile =
        serde_json::from_str(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok((pair.a.to_element()?, pair.b.to_element()?))
}

fn parse_catalog(name: &str) -> Result<Catalog, Failure> {
    Ok(name.parse::<Catalog>()?)
}

fn write_file(path: &Path, body: &str) -> Result<(), Failure> {
    fs::write(path, body).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn cmd_sample(group: Group, count: usize, seed: u64, dir: &Path, pairs: bool, scale: f64, modulus: f64) -> Result<Output, Failure> {
    if !(scale >= 0.0) {
        return Err(Failure::Input("scale must be non-negative".into()));
    }
    if matches!(group, Group::Loxodromic) && !(modulus > 1.0) {
        return Err(Failure::Input("modulus must exceed 1".into()));
    }
    fs::create_dir_all(dir).map_err(|e| Failure::Input(format!("{}: {e}", dir.display())))?;
    let sample = |s: u64| match group {
        Group::Sl4 => random_sl4(s),
        Group::Su31 => random_su31(s, scale),
        Group::Loxodromic => random_loxodromic(s, modulus),
    };
    let name = match group {
        Group::Sl4 => "sl4",
        Group::Su31 => "su31",
        Group::Loxodromic => "loxodromic",
    };
    let mut files = Vec::with_capacity(count);
    for i in 0..count as u64 {
        let (body, file) = if pairs {
            let s = seed.wrapping_add(2 * i);
            let pair = PairFile { a: GroupElementJson::from(&sample(s)), b: GroupElementJson::from(&sample(s + 1)) };
            (serde_json::to_string_pretty(&pair), format!("{name}-pair-s{seed}-{i:04}.json"))
        } else {
            let g = sample(seed.wrapping_add(i));
            (serde_json::to_string_pretty(&GroupElementJson::from(&g)), format!("{name}-s{seed}-{i:04}.json"))
        };
        let path = dir.join(file);
        write_file(&path, &(body.map_err(|e| Failure::Input(e.to_string()))? + "\n"))?;
        files.push(path.display().to_string());
    }
    Output::json(&json!({ "group": name, "count": count, "seed": seed, "pairs": pairs, "files": files }), true)
}

fn cmd_coords(pairfile: &Path, catalog: &str, format: Format) -> Result<Output, Failure> {
    let catalog = parse_catalog(catalog)?;
    if format == Format::Csv && catalog != Catalog::Su3122 {
        return Err(Failure::Input("csv output is only available for the SU31_22 real coordinates".into()));
    }
    let (a, b) = read_pair(pairfile)?;
    let tv = compute(catalog, &a, &b)?;
    let real = if catalog == Catalog::Su3122 { Some(RealCoordinateVector::from_trace_vector(&tv)?) } else { None };
    match (format, real) {
        (Format::Csv, Some(real)) => {
            let mut body = String::from("slot,value\n");
            for (slot, v) in real.slots.iter().zip(&real.values) {
                body.push_str(&format!("{slot},{v:e}\n"));
            }
            Ok(Output { body, ok: true })
        }
        (_, real) => Output::json(&json!({ "trace_vector": tv, "real_coordinates": real }), true),
    }
}

fn cmd_verify(pairfile: Option<&Path>, suite: &str, random: Option<usize>, seed: Option<u64>, tol: Option<f64>) -> Result<Output, Failure> {
    let suite: Suite = suite.parse()?;
    let tol = tol.unwrap_or(suite.tolerance());
    if !(tol > 0.0) {
        return Err(Failure::Input("tolerance must be positive".into()));
    }
    let pairs: Vec<(GroupElement, GroupElement)> = match (pairfile, random) {
        (Some(path), None) => vec![read_pair(path)?],
        (None, Some(n)) => {
            if n == 0 {
                return Err(Failure::Input("--random needs at least one trial".into()));
            }
            let seed = seed.ok_or_else(|| Failure::Input("--random requires --seed".into()))?;
            (0..n as u64).map(|i| trial_pair(seed, i, suite.needs_su31())).collect()
        }
        _ => return Err(Failure::Input("give a pair file or --random N --seed S".into())),
    };
    let mut residuals = Vec::with_capacity(pairs.len());
    for (a, b) in &pairs {
        residuals.push(suite_residual(suite, a, b, false)?);
    }
    let max_residual = residuals.iter().copied().fold(0.0, f64::max);
    let failed = residuals.iter().filter(|&&r| !(r < tol)).count();
    let ok = failed == 0;
    Output::json(
        &json!({
            "suite": suite,
            "trials": pairs.len(),
            "seed": seed,
            "scale": if pairfile.is_none() && suite.needs_su31() { Some(SU31_SAMPLE_SCALE) } else { None },
            "tolerance": tol,
            "max_residual": max_residual,
            "failed": failed,
            "passed": ok,
        }),
        ok,
    )
}

fn cmd_classify(pairfile: &Path) -> Result<Output, Failure> {
    let (a, b) = read_pair(pairfile)?;
    Output::json(&classify_pair(&a, &b), true)
}

fn cmd_conjugacy(first: &Path, second: &Path, catalog: Option<&str>, tol: f64, find: bool, reduced: bool) -> Result<Output, Failure> {
    if !(tol > 0.0) {
        return Err(Failure::Input("tolerance must be positive".into()));
    }
    let (a, b) = read_pair(first)?;
    let (a2, b2) = read_pair(second)?;
    let result = if reduced {
        reduced_conjugacy_test(&a, &b, &a2, &b2)
    } else if find {
        find_conjugator(&a, &b, &a2, &b2)
    } else {
        let catalog = match catalog {
            Some(name) => parse_catalog(name)?,
            None if [&a, &b, &a2, &b2].iter().all(|g| g.is_su31()) => Catalog::Su3122,
            None => Catalog::Sl4Djokovic30,
        };
        conjugacy_test(&a, &b, &a2, &b2, catalog, tol)
    };
    match result {
        Ok(cert) => {
            let ok = cert.conjugate;
            Output::json(&cert, ok)
        }
        Err(Error::NoConjugator(reason)) => {
            Output::json(&json!({ "conjugate": false, "conjugator": null, "reason": reason }), false)
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_fit(coordsfile: &Path, seed: u64, restarts: usize, tol: f64, max_iterations: usize) -> Result<Output, Failure> {
    if restarts == 0 || max_iterations == 0 || !(tol > 0.0) {
        return Err(Failure::Input("restarts and iterations must be at least 1 and tol positive".into()));
    }
    let text = read(coordsfile)?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| Failure::Input(e.to_string()))?;
    // accept either a bare trace vector or the output of `coords`
    let tv_value = value.get("trace_vector").cloned().unwrap_or(value);
    let target: TraceVector = serde_json::from_value(tv_value).map_err(|e| Failure::Input(e.to_string()))?;
    let config = FitConfig { seed, restarts, tol, max_iterations, ..Default::default() };
    let fit = fit_pair(&target, &config);
    let ok = fit.converged;
    Output::json(&fit, ok)
}

fn cmd_jacobian(pairfile: Option<&Path>, random: bool, seed: Option<u64>, catalog: &str, params_only: bool, step: f64) -> Result<Output, Failure> {
    if !(step > 0.0) {
        return Err(Failure::Input("step must be positive".into()));
    }
    let catalog = parse_catalog(catalog)?;
    if params_only && catalog != Catalog::Sl4Djokovic30 {
        return Err(Failure::Input("--params-only applies to SL4_DJOKOVIC_30".into()));
    }
    let (a, b) = match (pairfile, random) {
        (Some(path), false) => read_pair(path)?,
        (None, true) => {
            let seed = seed.ok_or_else(|| Failure::Input("--random requires --seed".into()))?;
            trial_pair(seed, 0, catalog.requires_su31())
        }
        _ => return Err(Failure::Input("give a pair file or --random --seed S".into())),
    };
    if catalog.requires_su31() && !(a.is_su31() && b.is_su31()) {
        return Err(Error::FlavorMismatch(format!("{catalog} requires an SU(3,1) pair")).into());
    }
    let report = if params_only {
        jacobian_rank_words(parameter_words(), &a, &b, PerturbationSpace::ComplexTraceless, step)
    } else {
        jacobian_rank(&a, &b, catalog, step)
    };
    Output::json(&json!({ "catalog": catalog, "params_only": params_only, "seed": seed, "report": report }), true)
}

fn cmd_fuzz(trials: usize, seed: u64, fault: bool) -> Result<Output, Failure> {
    let summary = run_suites(trials, seed, fault);
    let ok = summary.all_passed();
    Output::json(&summary, ok)
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    match &cli.command {
        Command::Sample { group, count, seed, dir, pairs, scale, modulus } => {
            cmd_sample(*group, *count, *seed, dir, *pairs, *scale, *modulus)
        }
        Command::Coords { pairfile, catalog, format } => cmd_coords(pairfile, catalog, *format),
        Command::Verify { pairfile, suite, random, seed, tol } => cmd_verify(pairfile.as_deref(), suite, *random, *seed, *tol),
        Command::Classify { pairfile } => cmd_classify(pairfile),
        Command::Conjugacy { first, second, catalog, tol, find_conjugator, reduced } => {
            cmd_conjugacy(first, second, catalog.as_deref(), *tol, *find_conjugator, *reduced)
        }
        Command::Fit { coordsfile, seed, restarts, tol, max_iterations } => {
            cmd_fit(coordsfile, *seed, *restarts, *tol, *max_iterations)
        }
        Command::Jacobian { pairfile, random, seed, catalog, params_only, step } => {
            cmd_jacobian(pairfile.as_deref(), *random, *seed, catalog, *params_only, *step)
        }
        Command::Fuzz { trials, seed, inject_fault } => cmd_fuzz(*trials, *seed, *inject_fault),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(output) => {
            if let Some(path) = &cli.out {
                if let Err(Failure::Input(msg) | Failure::Domain(msg)) = write_file(path, &output.body) {
                    eprintln!("error: {msg}");
                    return ExitCode::from(3);
                }
            } else {
                print!("{}", output.body);
            }
            ExitCode::from(if output.ok { 0 } else { 1 })
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
