//! Fiberedness of positive braid closures from the reduced Seifert graph,
//! cross-checked against the vanishing of Khovanov homology in degree one.

use khopos::catalog::{catalog_entries, Presentation};
use khopos::diagram::BraidWord;
use khopos::linalg::CoefficientRing;
use khopos::obstruct::{fiberedness_crosscheck, Verdict};
use khopos::seifert::{euler_char, is_fibered, p1};

fn main() -> khopos::Result<()> {
    for entry in catalog_entries() {
        let Presentation::Braid(text) = entry.presentation() else {
            continue;
        };
        let braid = BraidWord::parse(text)?;
        if braid.negative_count() > 0 || braid.letters().len() > 12 {
            continue;
        }
        let d = entry.diagram()?;
        let report = fiberedness_crosscheck(&d, CoefficientRing::Z)?;
        assert_eq!(report.verdict(), Verdict::Consistent);
        println!(
            "{:<12} p1 {}  chi {:>3}  fibered {}",
            entry.name(),
            p1(&d)?,
            euler_char(&d)?,
            is_fibered(&d)?,
        );
    }
    Ok(())
}
