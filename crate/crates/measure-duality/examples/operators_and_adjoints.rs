//! Difference operators on grid functions: forward-difference stencils with
//! periodic or zero boundaries, exact transpose adjoints, kernel bases,
//! image projections and the distributional kernel test for measures.
//!
//! Run: `cargo run --example operators_and_adjoints`

use measure_duality::{
    BoundaryRule, ConstraintOperator, DiscreteMeasure, Grid, OperatorName, SplitMix64,
};

fn main() {
    let grid = Grid::uniform_1d(16);
    let grad =
        ConstraintOperator::build(OperatorName::Gradient1d, &grid, BoundaryRule::Periodic).unwrap();

    println!("gradient_1d on 16 periodic cells:");
    println!(
        "  rank = {}, kernel dimension = {}",
        grad.rank(),
        grad.kernel_basis().len()
    );
    let constants = grad.apply(&[3.0; 16]);
    println!(
        "  ‖A(const)‖_∞ = {:.3e} (constants span the kernel)",
        constants.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    );

    // adjoint identity ⟨Au, w⟩ = ⟨u, A*w⟩
    let mut rng = SplitMix64::new(3);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let u = rng.vector_in_cube(16, 2.0);
        let w = rng.vector_in_cube(16, 2.0);
        let au_w: f64 = grad.apply(&u).iter().zip(&w).map(|(a, b)| a * b).sum();
        let u_atw: f64 = u
            .iter()
            .zip(grad.adjoint_apply(&w))
            .map(|(a, b)| a * b)
            .sum();
        worst = worst.max((au_w - u_atw).abs());
    }
    println!("  adjoint identity over 100 random pairs: max |⟨Au,w⟩−⟨u,A*w⟩| = {worst:.3e}");

    // image membership
    let u = rng.vector_in_cube(16, 1.0);
    let tau = grad.apply(&u);
    let (_, resid) = grad.project_image(&tau);
    println!("  residual of A u under image projection: {resid:.3e}");
    let (_, const_resid) = grad.project_image(&[1.0; 16]);
    println!("  residual of the all-ones vector:        {const_resid:.3e} (not in im A)");

    // 2D operators and the exact chain curl ∘ grad = 0
    let g2 = Grid::uniform_2d(6, 6);
    for name in [
        OperatorName::Divergence2d,
        OperatorName::Curl2d,
        OperatorName::SymmetricGradient2d,
    ] {
        let op = ConstraintOperator::build(name, &g2, BoundaryRule::Periodic).unwrap();
        println!(
            "  {name:?}: {}×{} matrix, rank {}, kernel dim {}",
            op.rows(),
            op.cols(),
            op.rank(),
            op.kernel_basis().len()
        );
    }

    // distributional kernel test for measures
    println!("\nKernel membership of measures (gradient_1d):");
    let constant = DiscreteMeasure::from_density(grid.clone(), 1, vec![0.7; 16]).unwrap();
    let k = grad.apply_to_measure(&constant).unwrap();
    println!(
        "  constant density: residual {:.3e} < threshold {:.3e} → in ker_M A: {}",
        k.residual, k.threshold, k.in_kernel
    );
    let atom = DiscreteMeasure::zero(grid, 1)
        .with_atom(4, vec![1.0])
        .unwrap();
    let k = grad.apply_to_measure(&atom).unwrap();
    println!(
        "  lone atom:        residual {:.3e} → in ker_M A: {}",
        k.residual, k.in_kernel
    );
}
