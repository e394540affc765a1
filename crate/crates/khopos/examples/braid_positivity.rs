//! Obstructing braid positivity through the normalized skein polynomial:
//! positive braid closures have non-negative coefficients, so any negative
//! coefficient rules the presentation out.

use khopos::catalog::catalog_lookup;
use khopos::homfly::{braid_positivity_obstruction, homfly, ito_normalize};
use khopos::seifert::euler_char;

fn main() -> khopos::Result<()> {
    for name in ["T(2,3)", "T(2,5)", "figure-eight", "beta_1"] {
        let d = catalog_lookup(name)?.diagram()?;
        let p = homfly(&d)?;

        // Positive braid closures realize chi on the closure diagram; for the
        // others the smallest v-exponent still gives a sound lower bound.
        let chi = if d.is_positive() {
            euler_char(&d)?
        } else {
            1 - p.terms().map(|((k, _), _)| k).min().unwrap()
        };
        let h = ito_normalize(&p, chi, d.component_count())?;
        println!("{name}:");
        println!("  P = {}", p.to_text());
        println!("  H^ = {}", h.to_text());
        println!(
            "  braid positivity: {}",
            braid_positivity_obstruction(&h).label()
        );
    }
    Ok(())
}
