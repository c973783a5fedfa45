//! Pointwise calculus on convex integrands: Fenchel conjugates, recession
//! functions, gradients, mollification, the unit-ball transform, and the
//! sampling-based growth verifier.
//!
//! Run: `cargo run --example integrand_transforms`

use measure_duality::{ConvexIntegrand, ExtendedReal, GrowthSampleSpec};

fn show(label: &str, v: ExtendedReal) {
    println!("  {label:<42} {v}");
}

fn main() {
    let x = &[0.5];
    let area = ConvexIntegrand::area(1);
    let abs = ConvexIntegrand::abs(1);
    let huber = ConvexIntegrand::huber(1, 0.5).unwrap();

    println!("Fenchel conjugates f*(z*) = sup_z {{ z*·z − f(z) }}:");
    show(
        "area: f*(0)      (= −1 exactly)",
        area.conjugate(x, &[0.0]).unwrap(),
    );
    show(
        "area: f*(0.5)    (= −√0.75)",
        area.conjugate(x, &[0.5]).unwrap(),
    );
    show(
        "area: f*(2)      (outside dom f*)",
        area.conjugate(x, &[2.0]).unwrap(),
    );
    show(
        "abs:  f*(0.5)    (= 0 inside the slab)",
        abs.conjugate(x, &[0.5]).unwrap(),
    );
    show(
        "abs:  f*(2)      (unbounded)",
        abs.conjugate(x, &[2.0]).unwrap(),
    );
    show(
        "huber(0.5): f*(0.8) (= γp²/2)",
        huber.conjugate(x, &[0.8]).unwrap(),
    );

    println!("\nRecession functions f^∞(z) = lim f(tz)/t:");
    println!(
        "  area at z=1   → {:.12}",
        area.recession(x, &[1.0]).unwrap()
    );
    println!(
        "  abs  at z=−3  → {:.12}",
        abs.recession(x, &[-3.0]).unwrap()
    );
    println!(
        "  huber at z=2  → {:.12}",
        huber.recession(x, &[2.0]).unwrap()
    );

    println!("\nGradients and the Fenchel identity f(z) + f*(∇f(z)) = z·∇f(z):");
    let z = 1.0;
    let g = area.subgradient(x, &[z]).unwrap()[0];
    let conj = area.conjugate(x, &[g]).unwrap().unwrap_finite();
    println!("  area at z=1: ∇f = {g:.12}");
    println!(
        "  residual |f + f* − z·∇f| = {:.3e}",
        (area.eval(x, &[z]) + conj - z * g).abs()
    );

    println!("\nMollification f^δ = f ∗ ρ_δ (even bump, 33-node quadrature):");
    for delta in [0.1, 0.01] {
        let fd = abs.mollify(delta).unwrap();
        println!(
            "  δ = {delta}: f^δ(0) = {:.6} (≤ Mδ = {delta}), f^δ(1) = {:.12}",
            fd.eval(x, &[0.0]),
            fd.eval(x, &[1.0])
        );
    }

    println!("\nUnit-ball transform (Sf)(z) = (1−|z|) f(z/(1−|z|)):");
    for z in [0.0, 0.5, 0.999] {
        println!(
            "  area: Sf({z}) = {:.9}",
            area.e_class_transform(x, &[z]).unwrap()
        );
    }
    println!(
        "  boundary defect |Sf(1−ε) − f^∞(1)| at ε=1e-3: {:.3e}",
        area.e_class_boundary_defect(x, &[1.0], 1e-3).unwrap()
    );

    println!("\nGrowth verification over a 300-point sample:");
    let spec = GrowthSampleSpec::new(300, 8.0, 11);
    {
        let (name, f) = (
            "area (M=2)",
            ConvexIntegrand::area(1).with_growth_constant(2.0).unwrap(),
        );
        let report = f.verify_growth(&spec).unwrap();
        println!(
            "  {name}: {} violations over {} samples → {}",
            report.violations.len(),
            report.samples,
            if report.pass() { "PASS" } else { "FAIL" }
        );
    }
    let quad: Vec<(f64, f64, f64)> = (-40..=40)
        .map(|i| {
            let z = i as f64 * 0.25;
            (0.0, z, z * z)
        })
        .collect();
    let quadratic = ConvexIntegrand::tabulated(&quad)
        .unwrap()
        .with_growth_constant(2.0)
        .unwrap();
    let report = quadratic.verify_growth(&spec).unwrap();
    println!(
        "  tabulated z² (M=2): {} violations → {} (no linear growth)",
        report.violations.len(),
        if report.pass() { "PASS" } else { "FAIL" }
    );
}
