//! Discrete vector measures: total variation, the generalized area
//! functional, weak* pairings, mass-exact mollification, and the verdict
//! lattice for weak* / strict / area-strict convergence — including the
//! oscillation sequence that separates weak* from area-strict.
//!
//! Run: `cargo run --example measures_and_area`

use measure_duality::io::sequence_report_csv;
use measure_duality::measure::{default_panel, sequence_diagnostic, Region};
use measure_duality::{DiscreteMeasure, Grid};

fn main() {
    let grid = Grid::uniform_1d(16);
    let density: Vec<f64> = (0..16).map(|c| 0.75 * ((c as f64) * 0.4).cos()).collect();
    let mu = DiscreteMeasure::from_density(grid.clone(), 1, density)
        .unwrap()
        .with_atom(5, vec![0.5])
        .unwrap();

    println!("A measure with density and one atom of mass 0.5:");
    println!("  |μ|(Ω)  = {:.9}", mu.total_variation(Region::All));
    println!("  ⟨μ⟩(Ω)  = {:.9}", mu.area_functional(Region::All));
    let left: Vec<usize> = (0..8).collect();
    println!(
        "  ⟨μ⟩(left half) = {:.9}",
        mu.area_functional(Region::Cells(&left))
    );
    let ones = vec![1.0; 16];
    println!("  ⟨μ, 1⟩  = {:.9}", mu.weak_star_pair(&ones));

    println!("\nMollification spreads the atom but preserves mass exactly:");
    for delta in [4.0 / 16.0, 2.0 / 16.0, 1.0 / 16.0] {
        let smooth = mu.mollify(delta).unwrap();
        println!(
            "  δ = {delta:<7}: atom-free = {}, |μ_δ|(Ω) = {:.9}, ⟨μ_δ⟩(Ω) = {:.9}",
            smooth.is_atom_free(),
            smooth.total_variation(Region::All),
            smooth.area_functional(Region::All)
        );
    }

    // Oscillation: weak* convergence without area-strict convergence.
    let n = 512;
    let g = Grid::uniform_1d(n);
    let limit = DiscreteMeasure::zero(g.clone(), 1);
    let seq: Vec<DiscreteMeasure> = (1..=8)
        .map(|k| {
            let j = 1usize << k;
            let density: Vec<f64> = (0..n)
                .map(|c| {
                    let x = (c as f64 + 0.5) / n as f64;
                    (2.0 * std::f64::consts::PI * j as f64 * x).sin().signum()
                })
                .collect();
            DiscreteMeasure::from_density(g.clone(), 1, density).unwrap()
        })
        .collect();
    let panel = default_panel(&g, 1);
    let report = sequence_diagnostic(&seq, &limit, &panel).unwrap();
    println!("\nOscillation u_j = sign sin(2πjx) against the zero measure (512 cells):");
    println!("  weak*      : {}", report.weak_star);
    println!("  strict     : {}", report.strict);
    println!(
        "  area-strict: {}  (⟨u_j⟩(Ω) = √2 every step, ⟨0⟩(Ω) = 1)",
        report.area_strict
    );
    println!("\nPer-step table:\n{}", sequence_report_csv(&report));

    // A mollification sequence, by contrast, is area-strict.
    let rough: Vec<f64> = (0..n).map(|c| if c < n / 2 { 1.5 } else { -0.5 }).collect();
    let target = DiscreteMeasure::from_density(g.clone(), 1, rough).unwrap();
    let moll_seq: Vec<DiscreteMeasure> = (2..=6)
        .map(|k| target.mollify(1.0 / (1u32 << k) as f64).unwrap())
        .collect();
    let report = sequence_diagnostic(&moll_seq, &target, &panel).unwrap();
    println!("Mollification sequence toward a step density:");
    println!(
        "  weak* {} / strict {} / area-strict {}",
        report.weak_star, report.strict, report.area_strict
    );
}
