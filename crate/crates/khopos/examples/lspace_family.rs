//! A family of hyperbolic braid closures whose Khovanov homology near degree
//! zero looks like that of an L-space knot: the window i in [-1,1] holds
//! exactly two free groups.

use khopos::cables::hyperbolic_lspace_braid;
use khopos::cube::khovanov_window;
use khopos::diagram::LinkDiagram;
use khopos::linalg::CoefficientRing;

fn main() -> khopos::Result<()> {
    for n in 1..=2 {
        let braid = hyperbolic_lspace_braid(n)?;
        let d = LinkDiagram::from_braid(&braid);
        let table = khovanov_window(&d, -1, 1, CoefficientRing::Z)?;
        println!(
            "beta_{n}: {} strands, {} crossings, writhe {}",
            braid.strands(),
            braid.letters().len(),
            braid.exponent_sum(),
        );
        for ((i, j), g) in table.groups() {
            println!("  ({i},{j}): {}", g.to_text());
        }
    }
    Ok(())
}
