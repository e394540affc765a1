//! The skein polynomial computed by a resolving tree, Ito's normalized form,
//! the half-twist recursion, and the braid-positivity obstruction read off it.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::diagram::{LinkDiagram, Reorient, Sign};
use crate::error::{Error, Result};

/// Variable pair a polynomial is written in: the skein variables (v, z) or
/// the normalized variables (a, z).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VariablePair {
    VZ,
    AlphaZ,
}

impl VariablePair {
    fn names(self) -> (&'static str, &'static str) {
        match self {
            VariablePair::VZ => ("v", "z"),
            VariablePair::AlphaZ => ("a", "z"),
        }
    }
}

/// Integer Laurent polynomial in two variables. Exponents may be negative;
/// zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BivariatePolynomial {
    vars: VariablePair,
    terms: BTreeMap<(i64, i64), BigInt>,
}

impl BivariatePolynomial {
    pub fn zero(vars: VariablePair) -> Self {
        Self {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(vars: VariablePair) -> Self {
        Self::monomial(vars, 1, 0, 0)
    }

    pub fn monomial(vars: VariablePair, coeff: i64, e1: i64, e2: i64) -> Self {
        let mut terms = BTreeMap::new();
        if coeff != 0 {
            terms.insert((e1, e2), BigInt::from(coeff));
        }
        Self { vars, terms }
    }

    pub fn vars(&self) -> VariablePair {
        self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Term iterator as ((e1, e2), coefficient).
    pub fn terms(&self) -> impl Iterator<Item = ((i64, i64), &BigInt)> {
        self.terms.iter().map(|(&e, c)| (e, c))
    }

    pub fn coefficient(&self, e1: i64, e2: i64) -> BigInt {
        self.terms.get(&(e1, e2)).cloned().unwrap_or_default()
    }

    pub fn has_negative_coefficient(&self) -> bool {
        self.terms.values().any(|c| c.is_negative())
    }

    fn insert(&mut self, e: (i64, i64), delta: BigInt) {
        let entry = self.terms.entry(e).or_default();
        *entry += delta;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.vars, other.vars, "polynomial variable mismatch");
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.insert(e, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.vars, other.vars, "polynomial variable mismatch");
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.insert(e, -c.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.vars, other.vars, "polynomial variable mismatch");
        let mut out = Self::zero(self.vars);
        for ((a1, a2), ca) in self.terms() {
            for ((b1, b2), cb) in other.terms() {
                out.insert((a1 + b1, a2 + b2), ca * cb);
            }
        }
        out
    }

    /// Multiplication by the monomial x₁^d1 · x₂^d2.
    pub fn shifted(&self, d1: i64, d2: i64) -> Self {
        Self {
            vars: self.vars,
            terms: self
                .terms
                .iter()
                .map(|(&(e1, e2), c)| ((e1 + d1, e2 + d2), c.clone()))
                .collect(),
        }
    }

    /// The substitution v ↦ v⁻¹, z ↦ −z, which carries the skein polynomial
    /// of a link to the polynomial of its mirror image.
    pub fn mirror(&self) -> Self {
        let mut out = Self::zero(self.vars);
        for ((e1, e2), c) in self.terms() {
            let flip = if e2.rem_euclid(2) == 0 {
                c.clone()
            } else {
                -c.clone()
            };
            out.insert((-e1, e2), flip);
        }
        out
    }

    /// The coefficient of z^l, kept as a polynomial in the first variable.
    pub fn z_slice(&self, l: i64) -> Self {
        Self {
            vars: self.vars,
            terms: self
                .terms
                .iter()
                .filter(|&(&(_, e2), _)| e2 == l)
                .map(|(&(e1, _), c)| ((e1, 0), c.clone()))
                .collect(),
        }
    }

    /// Canonical text form: terms sorted by z-degree, then first-variable degree.
    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let (n1, n2) = self.vars.names();
        let mut sorted: Vec<((i64, i64), &BigInt)> = self.terms().collect();
        sorted.sort_by_key(|&((e1, e2), _)| (e2, e1));
        let mut out = String::new();
        for (i, ((e1, e2), c)) in sorted.into_iter().enumerate() {
            let negative = c.is_negative();
            if i == 0 {
                if negative {
                    out.push('-');
                }
            } else if negative {
                out.push_str(" - ");
            } else {
                out.push_str(" + ");
            }
            let mag = c.magnitude();
            let mut vars = String::new();
            for (name, e) in [(n1, e1), (n2, e2)] {
                match e {
                    0 => {}
                    1 => vars.push_str(name),
                    _ => {
                        vars.push_str(name);
                        vars.push('^');
                        vars.push_str(&e.to_string());
                    }
                }
            }
            if vars.is_empty() {
                out.push_str(&mag.to_string());
            } else {
                if !mag.is_one() {
                    out.push_str(&mag.to_string());
                }
                out.push_str(&vars);
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let (n1, n2) = self.vars.names();
        let terms: Vec<serde_json::Value> = self
            .terms()
            .map(|((e1, e2), c)| {
                let coeff = match i64::try_from(c.clone()) {
                    Ok(v) => serde_json::Value::from(v),
                    Err(_) => serde_json::Value::from(c.to_string()),
                };
                serde_json::json!([e1, e2, coeff])
            })
            .collect();
        serde_json::json!({
            "vars": [n1, n2],
            "terms": terms,
            "text": self.to_text(),
        })
    }
}

/// δ = (v⁻¹ − v)/z, the skein value of adding a split unknot component.
fn delta() -> BivariatePolynomial {
    let mut p = BivariatePolynomial::monomial(VariablePair::VZ, 1, -1, -1);
    p.insert((1, -1), BigInt::from(-1));
    p
}

fn delta_power(k: usize) -> BivariatePolynomial {
    let mut p = BivariatePolynomial::one(VariablePair::VZ);
    let d = delta();
    for _ in 0..k {
        p = p.mul(&d);
    }
    p
}

/// Walking every component from its smallest arc, finds the first crossing
/// whose first visit runs along the under-strand. A diagram with no such
/// crossing is descending, and its closure is an unlink.
fn first_bad_crossing(d: &LinkDiagram) -> Option<usize> {
    let mut entered_under: HashMap<u32, (usize, bool)> = HashMap::new();
    for (ci, x) in d.crossings().iter().enumerate() {
        entered_under.insert(x.under_in(), (ci, true));
        entered_under.insert(x.over_in(), (ci, false));
    }
    let mut seen = vec![false; d.crossing_count()];
    for comp in d.components() {
        for arc in comp {
            let (ci, under) = entered_under[arc];
            if !seen[ci] {
                seen[ci] = true;
                if under {
                    return Some(ci);
                }
            }
        }
    }
    None
}

/// The skein polynomial in (v, z), normalized by P(unknot) = 1 and
/// v⁻¹P(L₊) − vP(L₋) = zP(L₀).
pub fn homfly(d: &LinkDiagram) -> Result<BivariatePolynomial> {
    homfly_with(d, 500_000)
}

/// `max_nodes` caps the number of distinct diagrams the resolving tree visits.
pub fn homfly_with(d: &LinkDiagram, max_nodes: usize) -> Result<BivariatePolynomial> {
    if d.is_empty() {
        return Err(Error::Precondition(
            "the empty diagram has no skein polynomial".into(),
        ));
    }
    let mut memo = HashMap::new();
    resolve(d, &mut memo, max_nodes)
}

fn resolve(
    d: &LinkDiagram,
    memo: &mut HashMap<String, BivariatePolynomial>,
    max_nodes: usize,
) -> Result<BivariatePolynomial> {
    let key = d.canonical_key();
    if let Some(p) = memo.get(&key) {
        return Ok(p.clone());
    }
    if memo.len() >= max_nodes {
        return Err(Error::Budget(format!(
            "resolving tree exceeded {max_nodes} distinct diagrams"
        )));
    }
    let p = match first_bad_crossing(d) {
        None => delta_power(d.component_count() - 1),
        Some(ci) => {
            let sign = d.crossings()[ci].sign;
            let marker = d.crossings()[ci].oriented_marker();
            let switched = resolve(&d.switch_crossing(ci)?, memo, max_nodes)?;
            let smoothed = resolve(
                &d.smooth(ci, marker, Reorient::PreserveAll)?,
                memo,
                max_nodes,
            )?;
            match sign {
                // P(L+) = v²P(L−) + vzP(L0)
                Sign::Positive => switched.shifted(2, 0).add(&smoothed.shifted(1, 1)),
                // P(L−) = v⁻²P(L+) − v⁻¹zP(L0)
                Sign::Negative => switched.shifted(-2, 0).sub(&smoothed.shifted(-1, 1)),
            }
        }
    };
    memo.insert(key, p.clone());
    Ok(p)
}

/// Ito's normalized polynomial Ĥ(a, z): every v-exponent k of P is rewritten
/// as the a-exponent (k − (1−χ))/2 with sign (−1) to that power, and the
/// whole sum is multiplied by z^(μ−1).
pub fn ito_normalize(
    p: &BivariatePolynomial,
    chi: i64,
    components: usize,
) -> Result<BivariatePolynomial> {
    if p.vars() != VariablePair::VZ {
        return Err(Error::Precondition(
            "normalization starts from a polynomial in (v, z)".into(),
        ));
    }
    if components == 0 {
        return Err(Error::Precondition(
            "a link has at least one component".into(),
        ));
    }
    let base = 1 - chi;
    let mut out = BivariatePolynomial::zero(VariablePair::AlphaZ);
    for ((k, l), c) in p.terms() {
        if k < base || (k - base) % 2 != 0 {
            return Err(Error::Precondition(format!(
                "v-exponent {k} is incompatible with Euler characteristic {chi}"
            )));
        }
        let e = (k - base) / 2;
        let signed = if e % 2 == 0 { c.clone() } else { -c.clone() };
        out.insert((e, l + components as i64 - 1), signed);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// One step of the half-twist skein recursion on normalized polynomials:
/// H = Hm2 + Hm1 after an even number of half twists, H = Hm2 + z²·Hm1 after
/// an odd number.
pub fn half_twist_skein_step(
    h_m2: &BivariatePolynomial,
    h_m1: &BivariatePolynomial,
    parity: Parity,
) -> Result<BivariatePolynomial> {
    if h_m2.vars() != VariablePair::AlphaZ || h_m1.vars() != VariablePair::AlphaZ {
        return Err(Error::Precondition(
            "the half-twist recursion operates on normalized (a, z) polynomials".into(),
        ));
    }
    Ok(match parity {
        Parity::Even => h_m2.add(h_m1),
        Parity::Odd => h_m2.add(&h_m1.shifted(0, 2)),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BraidPositivity {
    Obstructed,
    Inconclusive,
}

impl BraidPositivity {
    pub fn label(self) -> &'static str {
        match self {
            BraidPositivity::Obstructed => "obstructed",
            BraidPositivity::Inconclusive => "inconclusive",
        }
    }
}

/// A normalized polynomial with a negative coefficient cannot come from a
/// positive braid closure; a non-negative one decides nothing.
pub fn braid_positivity_obstruction(h: &BivariatePolynomial) -> BraidPositivity {
    if h.has_negative_coefficient() {
        BraidPositivity::Obstructed
    } else {
        BraidPositivity::Inconclusive
    }
}
