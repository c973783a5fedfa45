//! Command-line driver.
//!
//! One command per process: load a problem / measure / pair file, run the
//! requested computation, emit a machine-readable report (JSON, or CSV for
//! the oracle table) atomically, and exit with
//!
//! * `0` — verdict PASS or successful computation,
//! * `2` — verdict FAIL,
//! * `1` — any error (parse, dimension, infeasibility, ...).
//!
//! Identical configuration and seed give byte-identical reports. Relative
//! input paths that do not exist are retried under `$MD_FIXTURE_DIR`.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::extended::ExtendedReal;
use crate::io::{self, MeasureBody, ReportRow, Verdict, SCHEMA};
use crate::pairing::{self, OptimalityTolerances};
use crate::primal_dual::{self, DualCertificate, SolveOptions};
use crate::tolerances::{TOL_AC_RESIDUAL, TOL_GAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    Conjugate,
    Recession,
    Relax,
    Gap,
    Pairing,
    CheckOptimality,
    Oracle,
}

impl Command {
    fn parse(s: &str) -> Option<Command> {
        Some(match s {
            "solve" => Command::Solve,
            "conjugate" => Command::Conjugate,
            "recession" => Command::Recession,
            "relax" => Command::Relax,
            "gap" => Command::Gap,
            "pairing" => Command::Pairing,
            "check-optimality" => Command::CheckOptimality,
            "oracle" => Command::Oracle,
            _ => return None,
        })
    }
}

/// Fully resolved invocation. The seed determines every randomized choice,
/// so identical configs reproduce reports byte for byte.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub input: PathBuf,
    pub output: Option<PathBuf>,
    pub tol_gap: Option<f64>,
    pub tol_ac: Option<f64>,
    pub seed: u64,
    pub schedule: Vec<f64>,
    pub max_iter: Option<usize>,
    pub strict: bool,
}

const DEFAULT_SCHEDULE: [f64; 4] = [0.1, 0.05, 0.025, 0.0125];
const USAGE: &str =
    "usage: measure-duality <solve|conjugate|recession|relax|gap|pairing|check-optimality|oracle> \
<input> [--input PATH] [--output PATH] [--tol-gap X] [--tol-ac X] [--seed N] \
[--schedule \"0.1,0.05,0.025,0.0125\"] [--max-iter N] [--strict]";

pub fn parse_args(args: &[String]) -> Result<RunConfig> {
    let mut iter = args.iter();
    let command = iter
        .next()
        .and_then(|s| Command::parse(s))
        .ok_or_else(|| Error::Domain(format!("missing or unknown command\n{USAGE}")))?;
    let mut input: Option<PathBuf> = None;
    let mut output = None;
    let mut tol_gap = None;
    let mut tol_ac = None;
    let mut seed = 0u64;
    let mut schedule = DEFAULT_SCHEDULE.to_vec();
    let mut max_iter = None;
    let mut strict = false;

    let next_value = |iter: &mut std::slice::Iter<'_, String>, flag: &str| -> Result<String> {
        iter.next()
            .cloned()
            .ok_or_else(|| Error::Domain(format!("flag {flag} needs a value")))
    };

    while let Some(arg) = iter.next() {
        match arg.as_str() {
            "--input" => input = Some(PathBuf::from(next_value(&mut iter, "--input")?)),
            "--output" => output = Some(PathBuf::from(next_value(&mut iter, "--output")?)),
            "--tol-gap" => {
                tol_gap = Some(parse_f64(
                    &next_value(&mut iter, "--tol-gap")?,
                    "--tol-gap",
                )?)
            }
            "--tol-ac" => {
                tol_ac = Some(parse_f64(&next_value(&mut iter, "--tol-ac")?, "--tol-ac")?)
            }
            "--seed" => {
                seed = next_value(&mut iter, "--seed")?
                    .parse()
                    .map_err(|_| Error::Domain("--seed needs an integer".into()))?
            }
            "--schedule" => {
                schedule = parse_schedule(&next_value(&mut iter, "--schedule")?)?;
            }
            "--max-iter" => {
                max_iter = Some(
                    next_value(&mut iter, "--max-iter")?
                        .parse()
                        .map_err(|_| Error::Domain("--max-iter needs an integer".into()))?,
                )
            }
            "--strict" => strict = true,
            other if !other.starts_with('-') && input.is_none() => {
                input = Some(PathBuf::from(other));
            }
            other => {
                return Err(Error::Domain(format!(
                    "unknown argument '{other}'\n{USAGE}"
                )));
            }
        }
    }
    let input = input.ok_or_else(|| Error::Domain(format!("missing input path\n{USAGE}")))?;
    Ok(RunConfig {
        command,
        input,
        output,
        tol_gap,
        tol_ac,
        seed,
        schedule,
        max_iter,
        strict,
    })
}

fn parse_f64(s: &str, flag: &str) -> Result<f64> {
    s.parse()
        .map_err(|_| Error::Domain(format!("{flag} needs a number, got '{s}'")))
}

fn parse_schedule(s: &str) -> Result<Vec<f64>> {
    let parts: Result<Vec<f64>> = s
        .split(',')
        .map(|p| parse_f64(p.trim(), "--schedule"))
        .collect();
    let parts = parts?;
    if parts.len() < 4 {
        return Err(Error::Domain("--schedule needs at least 4 entries".into()));
    }
    Ok(parts)
}

/// Entry point used by the binary: parse `std::env::args`, run, return the
/// exit code.
pub fn main() -> i32 {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match parse_args(&args) {
        Ok(config) => run(&config),
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

/// Execute a resolved configuration; returns the process exit code.
pub fn run(config: &RunConfig) -> i32 {
    match dispatch(config) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn resolve_input(path: &Path) -> PathBuf {
    if path.exists() || path.is_absolute() {
        return path.to_path_buf();
    }
    if let Ok(root) = std::env::var("MD_FIXTURE_DIR") {
        let candidate = Path::new(&root).join(path);
        if candidate.exists() {
            return candidate;
        }
    }
    path.to_path_buf()
}

fn emit(config: &RunConfig, contents: &str) -> Result<()> {
    match &config.output {
        Some(path) => io::write_atomic(path, contents),
        None => {
            println!("{contents}");
            Ok(())
        }
    }
}

/// JSON value that keeps infinity markers readable.
#[derive(Debug, Serialize)]
#[serde(untagged)]
enum JsonReal {
    Num(f64),
    Marker(&'static str),
}

impl From<f64> for JsonReal {
    fn from(v: f64) -> Self {
        if v.is_nan() {
            JsonReal::Marker("nan")
        } else if v == f64::INFINITY {
            JsonReal::Marker("inf")
        } else if v == f64::NEG_INFINITY {
            JsonReal::Marker("-inf")
        } else {
            JsonReal::Num(v)
        }
    }
}

impl From<ExtendedReal> for JsonReal {
    fn from(v: ExtendedReal) -> Self {
        JsonReal::from(v.to_f64())
    }
}

#[derive(Serialize)]
struct SolveOutput {
    schema: &'static str,
    fixture: String,
    f_bar: f64,
    r: JsonReal,
    gap: JsonReal,
    iterations: usize,
    converged: bool,
    h2_recovery: &'static str,
    dual_domain: &'static str,
    measure: MeasureBody,
    wstar: Vec<f64>,
}

#[derive(Serialize)]
struct ValuesOutput {
    schema: &'static str,
    fixture: String,
    values: Vec<JsonReal>,
}

#[derive(Serialize)]
struct RelaxOutput {
    schema: &'static str,
    fixture: String,
    relaxed_energy: f64,
}

#[derive(Serialize)]
struct GapOutput {
    schema: &'static str,
    fixture: String,
    f_bar: f64,
    r: JsonReal,
    gap: JsonReal,
    tol_gap: f64,
    verdict: &'static str,
}

#[derive(Serialize)]
struct PairingAtomOutput {
    cell: usize,
    singular_density: f64,
    recession_value: f64,
    strict_value: f64,
}

#[derive(Serialize)]
struct PairingOutput {
    schema: &'static str,
    fixture: String,
    converged: bool,
    last_change: f64,
    bounds_pass: bool,
    regions_checked: usize,
    min_slack: f64,
    max_ac_residual: f64,
    atoms: Vec<PairingAtomOutput>,
    h2_recovery: &'static str,
    lambda: MeasureBody,
    verdict: &'static str,
}

#[derive(Serialize)]
struct OptimalityOutput {
    schema: &'static str,
    fixture: String,
    ac_residual: JsonReal,
    singular_residual: JsonReal,
    gap: JsonReal,
    pairing_converged: bool,
    cell_residuals: Vec<JsonReal>,
    verdict: &'static str,
}

const H2_NOTE: &str = "satisfied by construction";
const DUAL_DOMAIN_NOTE: &str = "all grid functions (finite dimensions)";

fn dispatch(config: &RunConfig) -> Result<i32> {
    let input = resolve_input(&config.input);
    match config.command {
        Command::Solve => {
            let (problem, name) = io::load_problem(&input)?;
            let opts = SolveOptions {
                max_iter: config.max_iter.unwrap_or(20_000),
                seed: config.seed,
                ..Default::default()
            };
            let report = primal_dual::solve(&problem, &opts)?;
            let out = SolveOutput {
                schema: SCHEMA,
                fixture: name,
                f_bar: report.primal_energy,
                r: report.certificate.r_value.into(),
                gap: report.gap.into(),
                iterations: report.iterations,
                converged: report.converged,
                h2_recovery: H2_NOTE,
                dual_domain: DUAL_DOMAIN_NOTE,
                measure: MeasureBody::from_measure(&report.primal),
                wstar: report.certificate.wstar.clone(),
            };
            emit(
                config,
                &serde_json::to_string_pretty(&out).map_err(Error::from)?,
            )?;
            Ok(0)
        }
        Command::Conjugate | Command::Recession => {
            let (integrand, x, points) = io::load_point_query(&input)?;
            let mut values = Vec::with_capacity(points.len());
            for z in &points {
                let v: JsonReal = match config.command {
                    Command::Conjugate => integrand.conjugate(&x, z)?.into(),
                    _ => JsonReal::Num(integrand.recession(&x, z)?),
                };
                values.push(v);
            }
            let out = ValuesOutput {
                schema: SCHEMA,
                fixture: io::file_stem(&input),
                values,
            };
            emit(
                config,
                &serde_json::to_string_pretty(&out).map_err(Error::from)?,
            )?;
            Ok(0)
        }
        Command::Relax => {
            let (problem, measure, name) = io::load_relax(&input)?;
            let value = problem.relaxed_energy(&measure)?;
            let out = RelaxOutput {
                schema: SCHEMA,
                fixture: name,
                relaxed_energy: value,
            };
            emit(
                config,
                &serde_json::to_string_pretty(&out).map_err(Error::from)?,
            )?;
            Ok(0)
        }
        Command::Gap => {
            let (problem, measure, wstar, name) = io::load_pair(&input)?;
            let cert = DualCertificate::from_wstar(&problem, wstar)?;
            let f_bar = problem.relaxed_energy(&measure)?;
            let gap = primal_dual::duality_gap(&problem, &measure, &cert)?;
            let tol = config.tol_gap.unwrap_or(TOL_GAP);
            let pass = gap.is_finite() && gap <= tol;
            let out = GapOutput {
                schema: SCHEMA,
                fixture: name,
                f_bar,
                r: cert.r_value.into(),
                gap: gap.into(),
                tol_gap: tol,
                verdict: if pass { "pass" } else { "fail" },
            };
            emit(
                config,
                &serde_json::to_string_pretty(&out).map_err(Error::from)?,
            )?;
            Ok(if pass { 0 } else { 2 })
        }
        Command::Pairing => {
            let (problem, measure, wstar, name) = io::load_pair(&input)?;
            let cert = DualCertificate::from_wstar(&problem, wstar)?;
            let pairing = pairing::pairing_limit(&problem, &measure, &cert, &config.schedule)?;
            let bounds = pairing::verify_pairing_bounds(&pairing, &measure, &cert);
            let density = pairing::density_characterization(
                &problem,
                &pairing,
                &measure,
                &cert,
                config.strict,
            )?;
            let pass = pairing.converged
                && bounds.pass()
                && density.pass()
                && (!config.strict || density.strict_ok);
            let out = PairingOutput {
                schema: SCHEMA,
                fixture: name,
                converged: pairing.converged,
                last_change: pairing.last_change,
                bounds_pass: bounds.pass(),
                regions_checked: bounds.regions_checked,
                min_slack: bounds.min_slack,
                max_ac_residual: density.max_ac_residual,
                atoms: density
                    .atoms
                    .iter()
                    .map(|a| PairingAtomOutput {
                        cell: a.cell,
                        singular_density: a.singular_density,
                        recession_value: a.recession_value,
                        strict_value: a.strict_value,
                    })
                    .collect(),
                h2_recovery: H2_NOTE,
                lambda: MeasureBody::from_measure(&pairing.lambda),
                verdict: if pass { "pass" } else { "fail" },
            };
            emit(
                config,
                &serde_json::to_string_pretty(&out).map_err(Error::from)?,
            )?;
            Ok(if pass { 0 } else { 2 })
        }
        Command::CheckOptimality => {
            let (problem, measure, wstar, name) = io::load_pair(&input)?;
            let cert = DualCertificate::from_wstar(&problem, wstar)?;
            let tolerances = OptimalityTolerances {
                ac: config.tol_ac.unwrap_or(TOL_AC_RESIDUAL),
                gap: config.tol_gap.unwrap_or(TOL_GAP),
                ..Default::default()
            };
            let report =
                pairing::optimality_check(&problem, &measure, &cert, &config.schedule, tolerances)?;
            let out = OptimalityOutput {
                schema: SCHEMA,
                fixture: name,
                ac_residual: report.ac_residual.into(),
                singular_residual: report.singular_residual.into(),
                gap: report.gap.into(),
                pairing_converged: report.pairing_converged,
                cell_residuals: report.cell_residuals.iter().map(|&v| v.into()).collect(),
                verdict: if report.pass { "pass" } else { "fail" },
            };
            emit(
                config,
                &serde_json::to_string_pretty(&out).map_err(Error::from)?,
            )?;
            Ok(if report.pass { 0 } else { 2 })
        }
        Command::Oracle => {
            let mut paths = Vec::new();
            if input.is_dir() {
                for entry in std::fs::read_dir(&input)? {
                    let path = entry?.path();
                    if path.extension().is_some_and(|e| e == "json") {
                        paths.push(path);
                    }
                }
                paths.sort();
            } else {
                paths.push(input.clone());
            }
            if paths.is_empty() {
                return Err(Error::Domain("oracle found no fixture files".into()));
            }
            let mut rows = Vec::new();
            for path in &paths {
                let (problem, name) = io::load_problem(path)?;
                let (pv, _) = primal_dual::brute_force_primal(&problem)?;
                let (dv, _) = primal_dual::brute_force_dual(&problem)?;
                let gap = pv - dv;
                rows.push(ReportRow {
                    fixture: name,
                    f_bar: pv,
                    r: dv,
                    gap,
                    ac_residual: None,
                    singular_residual: None,
                    verdict: if gap.abs() <= 2e-2 {
                        Verdict::Pass
                    } else {
                        Verdict::Fail
                    },
                });
            }
            rows.sort_by(|a, b| a.fixture.cmp(&b.fixture));
            let csv = io::emit_table(&rows)?;
            emit(config, &csv)?;
            let all_pass = rows.iter().all(|r| r.verdict == Verdict::Pass);
            Ok(if all_pass { 0 } else { 2 })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn args_parse_positional_input_and_flags() {
        let args: Vec<String> = [
            "solve",
            "fixtures/area_1d_16.json",
            "--seed",
            "7",
            "--tol-gap",
            "1e-3",
            "--schedule",
            "0.5,0.25,0.125,0.0625",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        let cfg = parse_args(&args).unwrap();
        assert_eq!(cfg.command, Command::Solve);
        assert_eq!(cfg.input, PathBuf::from("fixtures/area_1d_16.json"));
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.tol_gap, Some(1e-3));
        assert_eq!(cfg.schedule, vec![0.5, 0.25, 0.125, 0.0625]);
    }

    #[test]
    fn unknown_flags_are_rejected() {
        let args: Vec<String> = ["gap", "x.json", "--frobnicate"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert!(parse_args(&args).is_err());
        let args: Vec<String> = ["warp", "x.json"].iter().map(|s| s.to_string()).collect();
        assert!(parse_args(&args).is_err());
    }

    #[test]
    fn schedules_need_four_entries() {
        assert!(parse_schedule("0.1,0.05").is_err());
        assert_eq!(
            parse_schedule("0.1, 0.05, 0.025, 0.0125").unwrap(),
            vec![0.1, 0.05, 0.025, 0.0125]
        );
    }
}
