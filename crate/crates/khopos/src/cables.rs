//! Torus braids and parallel cables of braid closures, with the writhe and
//! Euler characteristic bookkeeping that goes with them.

use crate::diagram::BraidWord;
use crate::error::{Error, Result};
use serde::Serialize;

/// Parameters of a twisted cable: `p` parallel copies, framing target `q`,
/// and `m` extra negative half-twists.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CableParams {
    p: u32,
    q: i64,
    m: u32,
}

impl CableParams {
    pub fn new(p: u32, q: i64, m: u32) -> Result<Self> {
        if p < 2 {
            return Err(Error::Precondition("cabling requires p >= 2".into()));
        }
        if m >= p {
            return Err(Error::Precondition(format!(
                "half-twist count m = {m} must lie in 0..={}",
                p - 1
            )));
        }
        Ok(CableParams { p, q, m })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Number of negative full-twist blocks for a companion of writhe `w`.
    pub fn twist_count(&self, w: i64) -> i64 {
        i64::from(self.p) * w - self.q
    }
}

/// The standard braid word (σ₁σ₂⋯σ_{p−1})^q on p strands.
pub fn torus_braid(p: u32, q: u32) -> Result<BraidWord> {
    if p < 2 {
        return Err(Error::Precondition("a torus braid requires p >= 2".into()));
    }
    let round: Vec<i32> = (1..p).map(|i| i as i32).collect();
    let letters = round.repeat(q as usize);
    BraidWord::new(p, letters)
}

/// Replaces every crossing of `b` by the p-strand bundle crossing on its two
/// parallel cables, appends n = p·w − q negative full-twist blocks
/// (σ₁⋯σ_{p−1})⁻¹ on the first cable (positive blocks when n < 0), and closes
/// with the half twist σ₁⁻¹⋯σ_m⁻¹.
///
/// The closure of `b` must be a knot.
pub fn cable_braid(b: &BraidWord, params: CableParams) -> Result<BraidWord> {
    if b.closure_components() != 1 {
        return Err(Error::Precondition(
            "cabling requires a companion braid whose closure is a knot".into(),
        ));
    }
    let p = params.p;
    let w = b.exponent_sum();
    let n = params.twist_count(w);

    let mut letters = Vec::new();
    for &letter in b.letters() {
        let offset = (letter.unsigned_abs() - 1) * p;
        let mut block = Vec::with_capacity((p * p) as usize);
        for t in 0..p {
            for s in (0..p).rev() {
                block.push((offset + 1 + t + s) as i32);
            }
        }
        if letter < 0 {
            block.reverse();
            for x in &mut block {
                *x = -*x;
            }
        }
        letters.extend(block);
    }
    for _ in 0..n.unsigned_abs() {
        if n > 0 {
            letters.extend((1..p).rev().map(|i| -(i as i32)));
        } else {
            letters.extend((1..p).map(|i| i as i32));
        }
    }
    letters.extend((1..=params.m).map(|i| -(i as i32)));

    let word = BraidWord::new(b.strands() * p, letters)?;
    let expected = i64::from(p) * i64::from(p) * w - n * i64::from(p - 1) - i64::from(params.m);
    assert_eq!(
        word.exponent_sum(),
        expected,
        "cable writhe disagrees with p²w − n(p−1) − m"
    );
    Ok(word)
}

/// A 4-strand family of L-space knot braids, [(2,1,3,2)^{2n+1}, −1, 2, 1, 1, 2],
/// with exactly one negative crossing and writhe 8n + 7.
pub fn hyperbolic_lspace_braid(n: u32) -> Result<BraidWord> {
    if n < 1 {
        return Err(Error::Precondition(
            "the braid family starts at n = 1".into(),
        ));
    }
    let mut letters = [2, 1, 3, 2].repeat(2 * n as usize + 1);
    letters.extend_from_slice(&[-1, 2, 1, 1, 2]);
    BraidWord::new(4, letters)
}

/// Euler characteristic of the (p,q)-cable of a knot with Euler characteristic
/// `chi_k`, by Schubert's cabling formula: p·χ(K) − q(p−1).
pub fn cable_euler_char(chi_k: i64, p: u32, q: i64) -> i64 {
    debug_assert!(p >= 2);
    i64::from(p) * chi_k - q * i64::from(p - 1)
}

/// Threshold flags for a (p,q)-cable of a companion knot with Seifert genus
/// `genus` and positive-diagram writhe `writhe`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CableConditionReport {
    /// q ≥ p(2g − 1): cabling an L-space knot yields an L-space knot.
    pub lspace_compatible: bool,
    /// q ≥ p·w: the cable braid has no negative crossings.
    pub positivity_guaranteed: bool,
    /// q ≥ p ≥ 2: the thin description of the cable's first Khovanov columns applies.
    pub thin_columns_apply: bool,
}

pub fn cable_condition_report(genus: i64, writhe: i64, p: u32, q: i64) -> CableConditionReport {
    let p = i64::from(p);
    CableConditionReport {
        lspace_compatible: q >= p * (2 * genus - 1),
        positivity_guaranteed: q >= p * writhe,
        thin_columns_apply: q >= p && p >= 2,
    }
}
