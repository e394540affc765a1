//! Screens homology tables against the support pattern forced on positive
//! links: the figure-eight knot fails, the trefoil is consistent either way.

use khopos::catalog::catalog_lookup;
use khopos::cube::khovanov_full;
use khopos::linalg::CoefficientRing;
use khopos::obstruct::{positive_pattern_check, positivity_or_negativity_check};

fn screen(name: &str) -> khopos::Result<()> {
    let d = catalog_lookup(name)?.diagram()?;
    let table = khovanov_full(&d, CoefficientRing::Z)?;
    let mirror = khovanov_full(&d.mirror(), CoefficientRing::Z)?;

    let one_sided = positive_pattern_check(&table);
    let two_sided = positivity_or_negativity_check(&table, &mirror);
    println!("{name}:");
    println!("  as positive: {}", one_sided.verdict_label());
    if let Some(chi) = one_sided.feasible_chi() {
        println!(
            "  feasible Euler characteristic {chi}, p1 {:?}",
            one_sided.feasible_p1()
        );
    }
    for v in one_sided.violations() {
        println!(
            "  violated {} at ({}, {}): found {}",
            v.pattern, v.i, v.j, v.found
        );
    }
    println!("  either chirality: {}", two_sided.verdict_label());
    Ok(())
}

fn main() -> khopos::Result<()> {
    for name in ["T(2,3)", "T(2,3)-", "figure-eight"] {
        screen(name)?;
    }
    Ok(())
}
