//! Khovanov homology of the right-handed trefoil over three coefficient rings.

use khopos::cube::khovanov_full;
use khopos::diagram::{BraidWord, LinkDiagram};
use khopos::linalg::CoefficientRing;

fn main() -> khopos::Result<()> {
    let braid = BraidWord::parse("2: 1 1 1")?;
    let d = LinkDiagram::from_braid(&braid);

    for ring in [
        CoefficientRing::Z,
        CoefficientRing::Q,
        CoefficientRing::Zp(2),
    ] {
        let table = khovanov_full(&d, ring)?;
        println!("Kh(T(2,3)) over {}:", ring.label());
        println!("{}", table.to_grid_text());
    }
    Ok(())
}
