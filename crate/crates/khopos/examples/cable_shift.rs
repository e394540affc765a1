//! The low-degree Khovanov homology of the (2,q)-cables of the trefoil is
//! independent of q up to an overall quantum shift: Kh^{i,j}(K_{2,q}) agrees
//! with Kh^{i,j+2-q}(K_{2,2}) for i <= 1.

use khopos::cables::{cable_braid, CableParams};
use khopos::cube::khovanov_window;
use khopos::diagram::{BraidWord, LinkDiagram};
use khopos::linalg::CoefficientRing;
use khopos::table::KhTable;

fn low_window(q: i64) -> khopos::Result<KhTable> {
    let trefoil = BraidWord::parse("2: 1 1 1")?;
    let cable = cable_braid(&trefoil, CableParams::new(2, q, 0)?)?;
    let d = LinkDiagram::from_braid(&cable);
    khovanov_window(&d, 0, 1, CoefficientRing::Z)
}

fn main() -> khopos::Result<()> {
    let base = low_window(2)?;
    println!("T(2,3)_{{2,2}} rows 0..1:");
    for ((i, j), g) in base.groups() {
        println!("  ({i},{j}): {}", g.to_text());
    }
    for q in 3..=6 {
        let table = low_window(q)?;
        let shifted_matches = table
            .groups()
            .iter()
            .all(|(&(i, j), g)| base.groups().get(&(i, j + 2 - q)) == Some(g))
            && base
                .groups()
                .iter()
                .all(|(&(i, j), g)| table.groups().get(&(i, j - 2 + q)) == Some(g));
        println!("q = {q}: shift by {} matches: {shifted_matches}", q - 2);
    }
    Ok(())
}
