//! Approximate dual certificates from near-minimisers: a penalized descent
//! turns an ε-minimiser ū into û with `F[û] < F[ū] + 2ε`,
//! `‖û − ū‖_{L¹} ≤ √ε`, and a gradient field `v* = ∇f(·, û)` that is
//! √ε-orthogonal to the constraint kernel.
//!
//! Run: `cargo run --example ekeland_certificates`

use std::path::Path;

use measure_duality::io;
use measure_duality::primal_dual::ekeland_certificate;
use measure_duality::SolveOptions;

fn main() {
    let fixture = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/mabs_1d_4.json");
    let (problem, name) = io::load_problem(&fixture).unwrap();
    println!("fixture '{name}': mollified |z| on 4 cells, zero source\n");

    // a deliberately sloppy near-minimiser: constant 0.02
    let ubar = vec![0.02; 4];
    let eps = 1e-2;
    let (uhat, vstar, report) =
        ekeland_certificate(&problem, &ubar, eps, &SolveOptions::default()).unwrap();
    println!("ε = 1e-2 from ū ≡ 0.02:");
    println!(
        "  F[û]              = {:.6e}  (bound {:.6e})",
        report.energy, report.energy_bound
    );
    println!(
        "  ‖û − ū‖_L¹        = {:.3e}  (bound √ε = {:.3e})",
        report.distance_l1, report.distance_bound
    );
    println!(
        "  max |⟨v*,η⟩|/‖η‖₁ = {:.3e}  (bound √ε)",
        report.kernel_pairing
    );
    println!(
        "  ε-minimality of ū verified against R[0]: {}",
        report.minimality_verified
    );
    println!("  û = {uhat:?}");
    println!("  v* = {vstar:?}");

    // at the exact optimum the certificate is essentially exact
    let (_, _, tight) =
        ekeland_certificate(&problem, &[0.0; 4], 1e-4, &SolveOptions::default()).unwrap();
    println!("\nε = 1e-4 from the exact optimum:");
    println!(
        "  kernel pairing = {:.3e} (first-order optimality)",
        tight.kernel_pairing
    );

    // kinked integrands must be mollified first
    let grid = problem.grid().clone();
    let op = measure_duality::ConstraintOperator::build(
        measure_duality::OperatorName::Gradient1d,
        &grid,
        measure_duality::BoundaryRule::Periodic,
    )
    .unwrap();
    let source = measure_duality::SourceTerm::from_u0(&op, vec![0.0; 4]).unwrap();
    let kinked =
        measure_duality::Problem::new(grid, measure_duality::ConvexIntegrand::abs(1), op, source)
            .unwrap();
    match ekeland_certificate(&kinked, &[0.0; 4], 1e-4, &SolveOptions::default()) {
        Err(e) => println!("\nraw |z| is rejected as expected: {e}"),
        Ok(_) => unreachable!(),
    }
}
