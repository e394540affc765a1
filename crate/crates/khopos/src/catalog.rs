//! Built-in catalog of link presentations used by the CLI, the examples and
//! the test suite.

use std::sync::OnceLock;

use crate::cables::{cable_braid, hyperbolic_lspace_braid, CableParams};
use crate::diagram::{BraidWord, LinkDiagram};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Presentation {
    Braid(String),
    Pd(String),
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    name: &'static str,
    presentation: Presentation,
    note: &'static str,
    writhe: i64,
}

impl CatalogEntry {
    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn presentation_text(&self) -> &str {
        match &self.presentation {
            Presentation::Braid(text) | Presentation::Pd(text) => text,
        }
    }

    pub fn note(&self) -> &'static str {
        self.note
    }

    pub fn writhe(&self) -> i64 {
        self.writhe
    }

    pub fn diagram(&self) -> Result<LinkDiagram> {
        match &self.presentation {
            Presentation::Braid(text) => Ok(LinkDiagram::from_braid(&BraidWord::parse(text)?)),
            Presentation::Pd(text) => LinkDiagram::parse_pd(text),
        }
    }
}

fn braid(name: &'static str, text: &str, writhe: i64, note: &'static str) -> CatalogEntry {
    CatalogEntry {
        name,
        presentation: Presentation::Braid(text.to_string()),
        note,
        writhe,
    }
}

fn entries() -> &'static [CatalogEntry] {
    static ENTRIES: OnceLock<Vec<CatalogEntry>> = OnceLock::new();
    ENTRIES.get_or_init(|| {
        let mut list = vec![
            braid(
                "unknot",
                "1:",
                0,
                "closure of the empty braid on one strand",
            ),
            braid("Hopf+", "2: 1 1", 2, "positive Hopf link"),
            braid("Hopf-", "2: -1 -1", -2, "negative Hopf link"),
            braid("T(2,3)", "2: 1 1 1", 3, "right-handed trefoil"),
            braid("T(2,3)-", "2: -1 -1 -1", -3, "left-handed trefoil"),
            braid("figure-eight", "3: 1 -2 1 -2", 0, "figure-eight knot"),
            braid("T(2,5)", "2: 1 1 1 1 1", 5, "(2,5) torus knot"),
            braid("T(2,7)", "2: 1 1 1 1 1 1 1", 7, "(2,7) torus knot"),
            braid("T(3,4)", "3: 1 2 1 2 1 2 1 2", 8, "(3,4) torus knot"),
            braid("T(3,5)", "3: 1 2 1 2 1 2 1 2 1 2", 10, "(3,5) torus knot"),
        ];
        for n in 1..=4u32 {
            let word = hyperbolic_lspace_braid(n).expect("n >= 1");
            let name: &'static str = match n {
                1 => "beta_1",
                2 => "beta_2",
                3 => "beta_3",
                _ => "beta_4",
            };
            list.push(braid(
                name,
                &word.to_text(),
                8 * i64::from(n) + 7,
                "4-strand braid whose closure is a hyperbolic L-space knot",
            ));
        }
        let trefoil = BraidWord::parse("2: 1 1 1").expect("valid");
        for q in 1..=6i64 {
            let params = CableParams::new(2, q, 0).expect("valid");
            let word = cable_braid(&trefoil, params).expect("trefoil closes to a knot");
            let name: &'static str = match q {
                1 => "T(2,3)_{2,1}",
                2 => "T(2,3)_{2,2}",
                3 => "T(2,3)_{2,3}",
                4 => "T(2,3)_{2,4}",
                5 => "T(2,3)_{2,5}",
                _ => "T(2,3)_{2,6}",
            };
            list.push(braid(
                name,
                &word.to_text(),
                6 + q,
                "2-cable of the right-handed trefoil",
            ));
        }
        list.push(CatalogEntry {
            name: "necklace4",
            presentation: Presentation::Pd(
                "X(1,8,2,7) X(2,7,3,6) X(3,6,4,5) X(4,5,1,8)".to_string(),
            ),
            note: "positive link whose Seifert graph is a 4-cycle",
            writhe: 4,
        });
        list
    })
}

pub fn catalog_entries() -> &'static [CatalogEntry] {
    entries()
}

pub fn catalog_names() -> Vec<&'static str> {
    entries().iter().map(|e| e.name).collect()
}

pub fn catalog_lookup(name: &str) -> Result<&'static CatalogEntry> {
    entries()
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownCatalog {
            name: name.to_string(),
            available: catalog_names().join(", "),
        })
}
