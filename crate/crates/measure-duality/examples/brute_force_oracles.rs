//! Exhaustive-scan oracles at desk scale: the primal scan over kernel
//! coordinates and the dual scan over the adjoint image agree to scan
//! resolution on every tiny fixture — the discrete no-gap statement — and
//! the mollified problem family shifts the infimum by at most Mδ·|Ω|.
//!
//! Run: `cargo run --example brute_force_oracles`

use std::path::PathBuf;

use measure_duality::io::{self, emit_table, ReportRow, Verdict};
use measure_duality::primal_dual::{brute_force_dual, brute_force_primal};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn main() {
    let mut rows = Vec::new();
    for name in [
        "oracle/oracle_area_2.json",
        "oracle/oracle_area_3.json",
        "oracle/oracle_abs_2.json",
        "oracle/oracle_abs_3.json",
        "oracle/oracle_huber_2.json",
        "oracle/oracle_huber_3.json",
    ] {
        let (problem, id) = io::load_problem(&fixture(name)).unwrap();
        let (pv, _) = brute_force_primal(&problem).unwrap();
        let (dv, _) = brute_force_dual(&problem).unwrap();
        rows.push(ReportRow {
            fixture: id,
            f_bar: pv,
            r: dv,
            gap: pv - dv,
            ac_residual: None,
            singular_residual: None,
            verdict: if (pv - dv).abs() <= 2e-2 {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
        });
    }
    println!("no-gap at oracle scale (scan resolution 2e-2):\n");
    println!("{}", emit_table(&rows).unwrap());

    // mollified family: |inf F_δ − inf F| ≤ Mδ·|Ω|, shrinking with δ
    let (problem, _) = io::load_problem(&fixture("oracle/oracle_abs_2.json")).unwrap();
    let (base, _) = brute_force_primal(&problem).unwrap();
    println!("mollified-family sweep on the 2-cell abs fixture (inf F = {base:.9}):");
    for delta in [0.1, 0.01, 0.001] {
        let mollified = problem.mollified_family(delta).unwrap();
        let (value, _) = brute_force_primal(&mollified).unwrap();
        println!(
            "  δ = {delta:<6}: inf F_δ = {value:.9}, shift = {:.3e} (bound Mδ|Ω| = {:.1e})",
            (value - base).abs(),
            problem.integrand().growth_constant() * delta * problem.volume()
        );
    }
}
