//! Decision layer over computed homology tables: the positive-link pattern
//! check, its mirror-aware combination, the fiberedness cross-check, and
//! rank verification of the skein long exact sequence.

use std::collections::BTreeSet;

use serde_json::{json, Value};

use crate::cube::{khovanov_full, khovanov_window};
use crate::diagram::{LinkDiagram, Reorient, Sign};
use crate::error::{Error, Result};
use crate::linalg::{AbelianGroup, CoefficientRing};
use crate::seifert::{euler_char, is_fibered, p1};
use crate::table::{KhTable, Window};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Obstructed,
    Consistent,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub pattern: String,
    pub i: i64,
    pub j: i64,
    pub found: String,
}

#[derive(Clone, Debug)]
pub struct ObstructionReport {
    verdict: Verdict,
    field_strength: bool,
    scope: &'static str,
    side: Option<&'static str>,
    feasible_chi: Option<i64>,
    feasible_p1: Option<usize>,
    violations: Vec<Violation>,
}

impl ObstructionReport {
    pub fn verdict(&self) -> Verdict {
        self.verdict
    }

    /// "consistent" becomes "consistent (field strength)" when the table was
    /// computed over a field, where freeness degrades to a dimension check.
    pub fn verdict_label(&self) -> &'static str {
        match (self.verdict, self.field_strength) {
            (Verdict::Consistent, true) => "consistent (field strength)",
            (Verdict::Consistent, false) => "consistent",
            (Verdict::Obstructed, _) => "obstructed",
            (Verdict::Inconclusive, _) => "inconclusive",
        }
    }

    pub fn feasible_chi(&self) -> Option<i64> {
        self.feasible_chi
    }

    pub fn feasible_p1(&self) -> Option<usize> {
        self.feasible_p1
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    pub fn to_json(&self) -> Value {
        let violations: Vec<Value> = self
            .violations
            .iter()
            .map(|v| json!({"pattern": v.pattern, "i": v.i, "j": v.j, "found": v.found}))
            .collect();
        json!({
            "verdict": self.verdict_label(),
            "side": self.side,
            "feasibleChi": self.feasible_chi,
            "feasibleP1": self.feasible_p1,
            "violations": violations,
            "summary": self.to_text(),
        })
    }

    pub fn to_text(&self) -> String {
        match self.verdict {
            Verdict::Consistent => {
                let subject = match (self.scope, self.side) {
                    ("both", Some("negative")) => {
                        "the mirror table matches the positive-link pattern, so the link may be negative"
                    }
                    ("both", _) => {
                        "the table matches the positive-link pattern, so the link may be positive"
                    }
                    ("crosscheck", _) => "homology, fiberedness and cycle count agree",
                    _ => "the table matches the positive-link pattern",
                };
                format!(
                    "{}: {} (chi = {}, p1 = {}).",
                    self.verdict_label(),
                    subject,
                    self.feasible_chi.unwrap_or_default(),
                    self.feasible_p1.unwrap_or_default()
                )
            }
            Verdict::Obstructed => {
                let first = &self.violations[0];
                let subject = match self.scope {
                    "both" => "the link is neither positive nor negative",
                    "crosscheck" => {
                        "the computed homology contradicts the combinatorial prediction, \
                         which for an integral table means a fault in the engine"
                    }
                    _ => "the table cannot come from a positive diagram",
                };
                format!(
                    "obstructed: {subject} ({} violation{}; first: {} at ({}, {}), found {}).",
                    self.violations.len(),
                    if self.violations.len() == 1 { "" } else { "s" },
                    first.pattern,
                    first.i,
                    first.j,
                    first.found
                )
            }
            Verdict::Inconclusive => {
                "inconclusive: the table's window does not certify the positive-link pattern"
                    .to_string()
            }
        }
    }
}

/// Checks a table against the pattern every positive link satisfies: nothing
/// in negative homological gradings, nothing below the minimal quantum
/// grading j₀ of the 0-row, the 0-row exactly ℤ at j₀ and j₀ + 2, those two
/// columns otherwise trivial except possibly Kh^{1,j₀+2}, and the 1-row
/// torsion-free and supported only at j₀ + 2. A consistent table pins
/// chi = −j₀ and p1 = rank Kh^{1,j₀+2}. Gradings outside the table's window
/// are unknown, so partial tables can obstruct but never certify.
pub fn positive_pattern_check(t: &KhTable) -> ObstructionReport {
    check_pattern(t, "positive")
}

fn check_pattern(t: &KhTable, scope: &'static str) -> ObstructionReport {
    let full = matches!(t.window(), Window::Full);
    let field_strength = t.ring().is_field();
    let mut violations = Vec::new();
    let mut uncertain = !full;

    for (&(i, j), g) in t.groups() {
        if i < 0 {
            violations.push(Violation {
                pattern: "negative-row".into(),
                i,
                j,
                found: g.to_text(),
            });
        }
    }

    let j0 = if t.window().contains(0) {
        t.groups()
            .keys()
            .filter(|&&(i, _)| i == 0)
            .map(|&(_, j)| j)
            .min()
    } else {
        uncertain = true;
        None
    };

    if t.window().contains(0) && j0.is_none() {
        // a nonempty link always has homology in the 0-row
        violations.push(Violation {
            pattern: "row-0".into(),
            i: 0,
            j: 0,
            found: "0".into(),
        });
    }

    if let Some(j0) = j0 {
        let z = AbelianGroup::free(1);
        for (&(i, j), g) in t.groups() {
            if j < j0 {
                violations.push(Violation {
                    pattern: "low-column".into(),
                    i,
                    j,
                    found: g.to_text(),
                });
            }
            if i == 0 && ((j != j0 && j != j0 + 2) || *g != z) {
                violations.push(Violation {
                    pattern: "row-0".into(),
                    i,
                    j,
                    found: g.to_text(),
                });
            }
            if j == j0 && i != 0 {
                violations.push(Violation {
                    pattern: "column-chi".into(),
                    i,
                    j,
                    found: g.to_text(),
                });
            }
            if j == j0 + 2 && i != 0 && i != 1 {
                violations.push(Violation {
                    pattern: "column-chi-plus-2".into(),
                    i,
                    j,
                    found: g.to_text(),
                });
            }
        }
        if t.query(0, j0 + 2).is_none_or(|g| g.is_trivial()) {
            violations.push(Violation {
                pattern: "row-0".into(),
                i: 0,
                j: j0 + 2,
                found: "0".into(),
            });
        }
        if t.window().contains(1) {
            for (&(i, j), g) in t.groups() {
                if i != 1 {
                    continue;
                }
                if j != j0 + 2 {
                    violations.push(Violation {
                        pattern: "row-1".into(),
                        i,
                        j,
                        found: g.to_text(),
                    });
                } else if !g.torsion().is_empty() {
                    violations.push(Violation {
                        pattern: "row-1-torsion".into(),
                        i,
                        j,
                        found: g.to_text(),
                    });
                }
            }
        } else {
            uncertain = true;
        }
    }

    if !violations.is_empty() {
        ObstructionReport {
            verdict: Verdict::Obstructed,
            field_strength,
            scope,
            side: None,
            feasible_chi: None,
            feasible_p1: None,
            violations,
        }
    } else if uncertain {
        ObstructionReport {
            verdict: Verdict::Inconclusive,
            field_strength,
            scope,
            side: None,
            feasible_chi: None,
            feasible_p1: None,
            violations,
        }
    } else {
        let j0 = j0.expect("a full consistent table has a 0-row");
        let rank = t.query(1, j0 + 2).map_or(0, |g| g.free_rank());
        ObstructionReport {
            verdict: Verdict::Consistent,
            field_strength,
            scope,
            side: None,
            feasible_chi: Some(-j0),
            feasible_p1: Some(rank),
            violations,
        }
    }
}

/// Runs the pattern check on a table and on the table of the mirror diagram:
/// consistency on the first side leaves positivity open, on the second side
/// negativity; obstruction on both rules the link out of either class.
pub fn positivity_or_negativity_check(t: &KhTable, t_mirror: &KhTable) -> ObstructionReport {
    let pos = check_pattern(t, "positive");
    let neg = check_pattern(t_mirror, "positive");
    let field_strength = pos.field_strength || neg.field_strength;
    if pos.verdict == Verdict::Consistent {
        return ObstructionReport {
            scope: "both",
            side: Some("positive"),
            field_strength,
            ..pos
        };
    }
    if neg.verdict == Verdict::Consistent {
        return ObstructionReport {
            scope: "both",
            side: Some("negative"),
            field_strength,
            ..neg
        };
    }
    let mut violations: Vec<Violation> = pos
        .violations
        .into_iter()
        .map(|v| Violation {
            pattern: format!("positive:{}", v.pattern),
            ..v
        })
        .collect();
    violations.extend(neg.violations.into_iter().map(|v| Violation {
        pattern: format!("mirror:{}", v.pattern),
        ..v
    }));
    let verdict = if pos.verdict == Verdict::Inconclusive || neg.verdict == Verdict::Inconclusive {
        Verdict::Inconclusive
    } else {
        Verdict::Obstructed
    };
    ObstructionReport {
        verdict,
        field_strength,
        scope: "both",
        side: None,
        feasible_chi: None,
        feasible_p1: None,
        violations,
    }
}

/// For a positive connected diagram, recomputes the homology 1-row and
/// confronts it with the graph-level predictions: support exactly ℤ^{p1} at
/// quantum grading 2 − chi, vanishing exactly when the link fibers. The two
/// routes are independent, so a failure over ℤ means the engine is broken.
pub fn fiberedness_crosscheck(d: &LinkDiagram, ring: CoefficientRing) -> Result<ObstructionReport> {
    let fibered = is_fibered(d)?;
    let cycles = p1(d)? as usize;
    let chi = euler_char(d)?;
    let t = khovanov_window(d, 1, 1, ring)?;
    let target = 2 - chi;

    let mut violations = Vec::new();
    for (&(i, j), g) in t.groups() {
        debug_assert_eq!(i, 1);
        if j != target {
            violations.push(Violation {
                pattern: "row-1".into(),
                i,
                j,
                found: g.to_text(),
            });
        } else if g.free_rank() != cycles || !g.torsion().is_empty() {
            violations.push(Violation {
                pattern: "row-1-rank".into(),
                i,
                j,
                found: g.to_text(),
            });
        }
    }
    if cycles > 0 && t.query(1, target).is_none_or(|g| g.is_trivial()) {
        violations.push(Violation {
            pattern: "row-1-rank".into(),
            i: 1,
            j: target,
            found: "0".into(),
        });
    }
    let kh1_trivial = t.groups().is_empty();
    if fibered != kh1_trivial {
        violations.push(Violation {
            pattern: "fibered".into(),
            i: 1,
            j: target,
            found: if kh1_trivial { "0" } else { "nonzero" }.into(),
        });
    }

    let verdict = if violations.is_empty() {
        Verdict::Consistent
    } else {
        Verdict::Obstructed
    };
    let consistent = verdict == Verdict::Consistent;
    Ok(ObstructionReport {
        verdict,
        field_strength: ring.is_field(),
        scope: "crosscheck",
        side: None,
        feasible_chi: consistent.then_some(chi),
        feasible_p1: consistent.then_some(cycles),
        violations,
    })
}

/// The four (i, j) gradings at which the unknot fast path of the long exact
/// sequence does not force an isomorphism: i ∈ {u, u+1} and j ∈ {3u, 3u+2},
/// where u = (w − w₀ − 1)/2 for the writhes w of the diagram and w₀ of its
/// reoriented 0-smoothing.
pub fn les_exceptional_gradings(w: i64, w0: i64) -> Result<[(i64, i64); 4]> {
    if (w - w0).rem_euclid(2) != 1 {
        return Err(Error::Precondition(format!(
            "writhes w = {w} and w0 = {w0} are inconsistent: their difference must be odd"
        )));
    }
    let u = (w - w0 - 1) / 2;
    Ok([
        (u, 3 * u),
        (u, 3 * u + 2),
        (u + 1, 3 * u),
        (u + 1, 3 * u + 2),
    ])
}

#[derive(Clone, Debug)]
pub struct LesViolation {
    pub kind: &'static str,
    /// None for per-column checks.
    pub i: Option<i64>,
    pub j: i64,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct SkeinLesReport {
    ring: CoefficientRing,
    writhe: i64,
    smoothed_writhe: i64,
    u: i64,
    d0_is_unknot: bool,
    checked: usize,
    stretch_checked: bool,
    fast_path_checked: bool,
    violations: Vec<LesViolation>,
}

impl SkeinLesReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn checked(&self) -> usize {
        self.checked
    }

    pub fn d0_is_unknot(&self) -> bool {
        self.d0_is_unknot
    }

    pub fn u(&self) -> i64 {
        self.u
    }

    pub fn violations(&self) -> &[LesViolation] {
        &self.violations
    }

    pub fn to_json(&self) -> Value {
        let violations: Vec<Value> = self
            .violations
            .iter()
            .map(|v| json!({"kind": v.kind, "i": v.i, "j": v.j, "detail": v.detail}))
            .collect();
        json!({
            "ring": self.ring.label(),
            "writhe": self.writhe,
            "smoothedWrithe": self.smoothed_writhe,
            "u": self.u,
            "d0IsUnknot": self.d0_is_unknot,
            "checkedGradings": self.checked,
            "stretchChecked": self.stretch_checked,
            "fastPathChecked": self.fast_path_checked,
            "passed": self.passed(),
            "violations": violations,
            "summary": self.to_text(),
        })
    }

    pub fn to_text(&self) -> String {
        let fast_path = if self.d0_is_unknot {
            format!(", 0-smoothing is an unknot diagram, u = {}", self.u)
        } else {
            String::new()
        };
        if self.passed() {
            format!(
                "passed: {} rank checks against the exact sequence (writhe {} to {}{}).",
                self.checked, self.writhe, self.smoothed_writhe, fast_path
            )
        } else {
            let first = &self.violations[0];
            format!(
                "failed: {} of {} checks violated; first: {} in quantum column {} ({}).",
                self.violations.len(),
                self.checked,
                first.kind,
                first.j,
                first.detail
            )
        }
    }
}

/// Splits the diagram at a negative crossing and checks every rank relation
/// the resulting long exact sequence imposes over a field: two one-sided
/// inequalities at each grading, the alternating dimension sum in each
/// quantum column (full tables only), and, when the 0-smoothing turns out to
/// be an unknot diagram, the isomorphisms away from the four exceptional
/// gradings. `window` restricts the diagram and 1-smoothing tables to a
/// homological range; the 0-smoothing is always computed in full so that its
/// contribution is known everywhere.
pub fn skein_les_verify(
    d: &LinkDiagram,
    v: usize,
    ring: CoefficientRing,
    window: Option<(i64, i64)>,
) -> Result<SkeinLesReport> {
    if !ring.is_field() {
        return Err(Error::Precondition(
            "exactness yields rank constraints over a field; use Q or Z<p>".into(),
        ));
    }
    let crossing = d
        .crossings()
        .get(v)
        .ok_or_else(|| Error::Precondition(format!("diagram has no crossing {v}")))?;
    if crossing.sign == Sign::Positive {
        return Err(Error::Precondition(format!(
            "crossing {v} is positive; the sequence splits at a negative crossing"
        )));
    }

    let d1 = d.smooth(v, 1, Reorient::PreserveAll)?;
    let d0 = d.smooth(v, 0, Reorient::PreserveUninvolved)?;
    let w = d.writhe();
    let w0 = d0.writhe();
    if (w - w0).rem_euclid(2) != 1 {
        return Err(Error::Contract(
            "smoothing changed the writhe parity unexpectedly".into(),
        ));
    }
    let sigma = (w0 - w + 1) / 2;
    let tau = (3 * (w0 - w) + 1) / 2;
    let u = (w - w0 - 1) / 2;

    let compute = |diagram: &LinkDiagram| match window {
        Some((lo, hi)) => khovanov_window(diagram, lo, hi, ring),
        None => khovanov_full(diagram, ring),
    };
    let ((t, t1), t0) = rayon::join(
        || rayon::join(|| compute(d), || compute(&d1)),
        || khovanov_full(&d0, ring),
    );
    let (t, t1, t0) = (t?, t1?, t0?);

    let dim = |table: &KhTable, i: i64, j: i64| table.query(i, j).map(|g| g.free_rank());

    let mut gradings: BTreeSet<(i64, i64)> = BTreeSet::new();
    gradings.extend(t.groups().keys().copied());
    gradings.extend(t1.groups().keys().map(|&(i, j1)| (i, j1 - 1)));
    for &(i0, j0) in t0.groups().keys() {
        gradings.insert((i0 - sigma, j0 - tau));
        gradings.insert((i0 - sigma + 1, j0 - tau));
    }

    let mut violations = Vec::new();
    let mut checked = 0usize;
    for &(i, j) in &gradings {
        let b = dim(&t, i, j);
        let a = dim(&t1, i, j + 1);
        let c = dim(&t0, sigma + i, tau + j);
        let c_prev = dim(&t0, sigma + i - 1, tau + j);
        if let (Some(bd), Some(ad), Some(cd)) = (b, a, c) {
            checked += 1;
            if bd > ad + cd {
                violations.push(LesViolation {
                    kind: "bound",
                    i: Some(i),
                    j,
                    detail: format!("dim {bd} at ({i}, {j}) exceeds {ad} + {cd}"),
                });
            }
        }
        if let (Some(ad), Some(bd), Some(cd)) = (a, b, c_prev) {
            checked += 1;
            if ad > bd + cd {
                violations.push(LesViolation {
                    kind: "bound",
                    i: Some(i),
                    j,
                    detail: format!(
                        "dim {ad} of the 1-smoothing at ({i}, {}) exceeds {bd} + {cd}",
                        j + 1
                    ),
                });
            }
        }
    }

    let stretch_checked = window.is_none();
    if stretch_checked && !gradings.is_empty() {
        let i_lo = gradings.iter().map(|&(i, _)| i).min().expect("nonempty");
        let i_hi = gradings.iter().map(|&(i, _)| i).max().expect("nonempty");
        let js: BTreeSet<i64> = gradings.iter().map(|&(_, j)| j).collect();
        for &j in &js {
            let mut sum: i64 = 0;
            for i in i_lo..=i_hi {
                let a = dim(&t1, i, j + 1).unwrap_or(0) as i64;
                let b = dim(&t, i, j).unwrap_or(0) as i64;
                let c = dim(&t0, sigma + i, tau + j).unwrap_or(0) as i64;
                let term = a - b + c;
                sum += if i.rem_euclid(2) == 0 { term } else { -term };
            }
            checked += 1;
            if sum != 0 {
                violations.push(LesViolation {
                    kind: "stretch",
                    i: None,
                    j,
                    detail: format!("alternating dimension sum {sum} in quantum column {j}"),
                });
            }
        }
    }

    let one = AbelianGroup::free(1);
    let d0_is_unknot = t0.groups().len() == 2
        && t0.groups().get(&(0, -1)) == Some(&one)
        && t0.groups().get(&(0, 1)) == Some(&one);
    let fast_path_checked = d0_is_unknot;
    if d0_is_unknot {
        let exceptional = les_exceptional_gradings(w, w0)?;
        for &(i, j) in &gradings {
            if exceptional.contains(&(i, j)) {
                continue;
            }
            if let (Some(bd), Some(ad)) = (dim(&t, i, j), dim(&t1, i, j + 1)) {
                checked += 1;
                if bd != ad {
                    violations.push(LesViolation {
                        kind: "equality",
                        i: Some(i),
                        j,
                        detail: format!(
                            "dim {bd} at ({i}, {j}) differs from dim {ad} of the 1-smoothing at quantum grading {}",
                            j + 1
                        ),
                    });
                }
            }
        }
    }

    Ok(SkeinLesReport {
        ring,
        writhe: w,
        smoothed_writhe: w0,
        u,
        d0_is_unknot,
        checked,
        stretch_checked,
        fast_path_checked,
        violations,
    })
}
