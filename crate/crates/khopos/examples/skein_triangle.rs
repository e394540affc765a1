//! Rank inequalities from the skein long exact sequence at a negative
//! crossing, including the sharper comparison available when the 0-smoothing
//! is an unknot diagram.

use khopos::diagram::{BraidWord, LinkDiagram};
use khopos::linalg::CoefficientRing;
use khopos::obstruct::skein_les_verify;

fn main() -> khopos::Result<()> {
    // A reducible diagram of the positive Hopf link; smoothing the negative
    // kink leaves a three-crossing unknot diagram.
    let d = LinkDiagram::from_braid(&BraidWord::parse("2: 1 1 1 -1")?);
    let report = skein_les_verify(&d, 3, CoefficientRing::Q, None)?;
    println!("{}", report.to_text());

    // A smoothing that splits the diagram into two components.
    let d = LinkDiagram::from_braid(&BraidWord::parse("3: 1 1 1 1 -2")?);
    let report = skein_les_verify(&d, 4, CoefficientRing::Q, None)?;
    println!("{}", report.to_text());
    Ok(())
}
