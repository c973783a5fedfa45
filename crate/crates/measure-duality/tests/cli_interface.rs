//! End-to-end checks of the command-line surface: exit codes, report
//! schemas, JSON round-trips, the fixture-root environment variable and the
//! mollified duality-gap sweep table.

use std::path::{Path, PathBuf};

use measure_duality::cli::{self, parse_args, Command, RunConfig};
use measure_duality::io::{self, emit_table, ReportRow, Verdict};
use measure_duality::primal_dual::brute_force_primal;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("md-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn config(command: Command, input: PathBuf) -> RunConfig {
    RunConfig {
        command,
        input,
        output: None,
        tol_gap: None,
        tol_ac: None,
        seed: 0,
        schedule: vec![0.25, 0.1875, 0.125, 0.0625],
        max_iter: None,
        strict: false,
    }
}

#[test]
fn solve_reaches_a_small_gap_and_exits_zero() {
    let dir = temp_dir("solve");
    let out = dir.join("report.json");
    let mut cfg = config(Command::Solve, fixture("area_1d_16.json"));
    cfg.output = Some(out.clone());
    assert_eq!(cli::run(&cfg), 0);
    let text = std::fs::read_to_string(&out).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["schema"], "measure-duality/v1");
    assert_eq!(value["fixture"], "area_1d_16");
    let gap = value["gap"].as_f64().unwrap();
    assert!(gap <= 1e-3, "solve gap {gap}");
    assert!(gap >= -1e-9, "weak duality violated: {gap}");
    // no stray temp file left behind
    assert!(!out.with_extension("tmp").exists());
}

#[test]
fn check_optimality_exit_codes() {
    assert_eq!(
        cli::run(&config(
            Command::CheckOptimality,
            fixture("abs_pair_16.json")
        )),
        0
    );
    assert_eq!(
        cli::run(&config(
            Command::CheckOptimality,
            fixture("abs_pair_16_perturbed.json")
        )),
        2
    );
}

#[test]
fn malformed_and_unknown_key_files_exit_one() {
    let dir = temp_dir("bad");
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{\"schema\": \"measure-duality/v1\",").unwrap();
    assert_eq!(cli::run(&config(Command::Solve, bad)), 1);

    let unknown = dir.join("unknown.json");
    std::fs::write(
        &unknown,
        r#"{
          "schema": "measure-duality/v1",
          "grid": {"dim": 1, "shape": [2], "extent": [[0.0, 1.0]]},
          "integrand": {"builtin": "abs"},
          "operator": {"name": "gradient_1d", "boundary": "periodic"},
          "tau": [0.0, 0.0],
          "u0": [0.0, 0.0],
          "extra_key": true
        }"#,
    )
    .unwrap();
    assert_eq!(cli::run(&config(Command::Solve, unknown)), 1);
}

#[test]
fn pairing_and_gap_commands_pass_on_the_exact_pair() {
    assert_eq!(
        cli::run(&config(Command::Pairing, fixture("abs_pair_16.json"))),
        0
    );
    assert_eq!(
        cli::run(&config(Command::Gap, fixture("abs_pair_16.json"))),
        0
    );
    let mut strict = config(Command::Pairing, fixture("abs_pair_16.json"));
    strict.strict = true;
    assert_eq!(
        cli::run(&strict),
        0,
        "the exact pair satisfies the strengthened identity"
    );
}

#[test]
fn relax_and_conjugate_commands_produce_expected_values() {
    let dir = temp_dir("values");
    let out = dir.join("relax.json");
    let mut cfg = config(Command::Relax, fixture("relax_atom_16.json"));
    cfg.output = Some(out.clone());
    assert_eq!(cli::run(&cfg), 0);
    let value: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let relaxed = value["relaxed_energy"].as_f64().unwrap();
    assert!(relaxed > 1.0);

    let out = dir.join("conj.json");
    let mut cfg = config(Command::Conjugate, fixture("conjugate_query.json"));
    cfg.output = Some(out.clone());
    assert_eq!(cli::run(&cfg), 0);
    let value: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let values = value["values"].as_array().unwrap();
    assert!((values[0].as_f64().unwrap() + 1.0).abs() < 1e-9);
    assert!((values[1].as_f64().unwrap() + 0.75f64.sqrt()).abs() < 1e-8);
    assert_eq!(values[2], "inf");
}

#[test]
fn oracle_runs_a_directory_and_emits_the_table() {
    let dir = temp_dir("oracle");
    let out = dir.join("table.csv");
    let mut cfg = config(Command::Oracle, fixture("oracle"));
    cfg.output = Some(out.clone());
    assert_eq!(cli::run(&cfg), 0);
    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "fixture,F_bar,R,gap,ac_residual,singular_residual,verdict"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 6);
    // sorted by fixture id, every verdict filled
    let mut names: Vec<&str> = rows.iter().map(|r| r.split(',').next().unwrap()).collect();
    let sorted = {
        let mut s = names.clone();
        s.sort();
        s
    };
    assert_eq!(names, sorted);
    names.dedup();
    assert_eq!(names.len(), 6);
    for row in rows {
        assert!(row.ends_with(",pass") || row.ends_with(",fail") || row.ends_with(",n-a"));
    }
}

#[test]
fn fixture_dir_env_var_resolves_relative_inputs() {
    // run from a directory where the relative path does not exist
    std::env::set_var(
        "MD_FIXTURE_DIR",
        fixture("").parent().unwrap().join("fixtures"),
    );
    let cfg = config(Command::Gap, PathBuf::from("abs_pair_16.json"));
    assert_eq!(cli::run(&cfg), 0);
    std::env::remove_var("MD_FIXTURE_DIR");
}

#[test]
fn measure_round_trip_pairs_identically() {
    let (_, measure, _, _) = io::load_pair(&fixture("abs_pair_16.json")).unwrap();
    let body = io::MeasureBody::from_measure(&measure);
    let text = serde_json::to_string_pretty(&body).unwrap();
    let reloaded: io::MeasureBody = serde_json::from_str(&text).unwrap();
    let mu2 = reloaded.to_measure().unwrap();
    let panel = measure_duality::measure::default_panel(measure.grid(), 1);
    for phi in &panel {
        assert_eq!(measure.weak_star_pair(phi), mu2.weak_star_pair(phi));
    }
}

#[test]
fn mollified_sweep_table_has_nonincreasing_gap_column() {
    // |inf F_δ − inf F| over δ ∈ {0.1, 0.01, 0.001} on the 2-cell fixture
    let (problem, _) = io::load_problem(&fixture("oracle/oracle_abs_2.json")).unwrap();
    let (base, _) = brute_force_primal(&problem).unwrap();
    let mut rows = Vec::new();
    let mut shifts = Vec::new();
    for &delta in &[0.1, 0.01, 0.001] {
        let mollified = problem.mollified_family(delta).unwrap();
        let (value, _) = brute_force_primal(&mollified).unwrap();
        let shift = (value - base).abs();
        shifts.push(shift);
        rows.push(ReportRow {
            fixture: format!("abs_2_delta_{delta}"),
            f_bar: value,
            r: f64::NEG_INFINITY,
            gap: shift,
            ac_residual: None,
            singular_residual: None,
            verdict: Verdict::NotApplicable,
        });
    }
    let csv = emit_table(&rows).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(
        shifts.windows(2).all(|w| w[1] <= w[0] + 1e-12),
        "shifts {shifts:?} must not increase as δ shrinks"
    );
    // and each shift obeys the Mδ·volume bound (plus scan resolution)
    let m = problem.integrand().growth_constant();
    for (&shift, &delta) in shifts.iter().zip(&[0.1, 0.01, 0.001]) {
        assert!(shift <= m * delta * problem.volume() + 5e-3);
    }
}

#[test]
fn args_reject_missing_input() {
    assert!(parse_args(&["solve".to_string()]).is_err());
}
