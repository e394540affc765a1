use std::collections::{BTreeSet, HashMap};
use std::sync::atomic::{AtomicUsize, Ordering};

use itertools::Itertools;
use num_bigint::BigInt;
use rayon::prelude::*;

use crate::diagram::LinkDiagram;
use crate::error::{Error, Result};
use crate::linalg::{
    composition_is_zero, rank_over_field, smith_normal_form, AbelianGroup, CoefficientRing,
    SparseExactMatrix,
};
use crate::seifert::{resolve, Resolution, State};
use crate::table::{KhTable, Window};

#[derive(Clone, Copy, Debug)]
pub struct ComputeBudget {
    pub max_states_per_level: usize,
    pub max_matrix_nonzeros: usize,
}

impl Default for ComputeBudget {
    fn default() -> Self {
        Self {
            max_states_per_level: 1_000_000,
            max_matrix_nonzeros: 50_000_000,
        }
    }
}

/// A basis element of the cube complex: a state together with one label bit
/// per circle of its resolution (0 = degree +1 label, 1 = degree −1 label).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Generator {
    pub state: State,
    pub labels: u64,
}

/// The (height, internal degree) slice of the cube complex in its canonical
/// basis order: states lexicographically, labels within a state by the
/// label word with circle 0 most significant.
#[derive(Clone, Debug)]
pub struct GradedSlice {
    r: usize,
    q: i64,
    basis: Vec<Generator>,
    index: HashMap<Generator, u32>,
}

impl GradedSlice {
    pub fn r(&self) -> usize {
        self.r
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Generator] {
        &self.basis
    }

    pub fn position(&self, g: &Generator) -> Option<usize> {
        self.index.get(g).map(|&i| i as usize)
    }
}

/// (r, q) → (i, j): homological grading i = r − n₋, quantum grading
/// j = q + n₊ − 2n₋.
pub fn grading_convert(r: usize, q: i64, n_plus: usize, n_minus: usize) -> (i64, i64) {
    (
        r as i64 - n_minus as i64,
        q + n_plus as i64 - 2 * n_minus as i64,
    )
}

/// (i, j) → (r, q); r may be negative for gradings below the cube.
pub fn grading_invert(i: i64, j: i64, n_plus: usize, n_minus: usize) -> (i64, i64) {
    (i + n_minus as i64, j - n_plus as i64 + 2 * n_minus as i64)
}

fn binomial(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 1..=r {
        acc = acc * (n - r + i) as u128 / i as u128;
    }
    acc
}

struct Level {
    states: Vec<State>,
    res: Vec<Resolution>,
    pos: HashMap<u64, u32>,
}

fn build_level(d: &LinkDiagram, r: usize, budget: &ComputeBudget) -> Result<Level> {
    let n = d.crossing_count();
    let count = binomial(n, r);
    if count > budget.max_states_per_level as u128 {
        return Err(Error::Budget(format!(
            "height {r} holds {count} states, over the budget of {}",
            budget.max_states_per_level
        )));
    }
    let zero = State::zero(n)?;
    let mut states: Vec<State> = (0..n)
        .combinations(r)
        .map(|combo| combo.into_iter().fold(zero, |s, i| s.with_marker(i, 1)))
        .collect();
    states.sort_by_key(|s| s.lex_key());
    let res: Vec<Resolution> = states
        .iter()
        .map(|s| resolve(d, s))
        .collect::<Result<_>>()?;
    for rr in &res {
        if rr.circle_count() > 64 {
            return Err(Error::Budget(format!(
                "a resolution has {} circles; label masks support at most 64",
                rr.circle_count()
            )));
        }
    }
    let pos = states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.lex_key(), i as u32))
        .collect();
    Ok(Level { states, res, pos })
}

enum EdgeAction {
    Merge { u: u32, v: u32 },
    Split { u: u32, w1: u32, w2: u32 },
}

/// One cube edge out of a state: q-independent data shared by every label
/// slice.
struct Edge {
    target: u32,
    negative: bool,
    action: EdgeAction,
    /// Source circle → target circle; both merged circles map to the merged
    /// one, and a split circle maps to whichever half holds its smallest arc.
    map: Vec<u32>,
}

fn build_edges(d: &LinkDiagram, lr: &Level, lt: &Level) -> Vec<Vec<Edge>> {
    let n = d.crossing_count();
    lr.states
        .iter()
        .enumerate()
        .map(|(si, s)| {
            let res_s = &lr.res[si];
            (0..n)
                .filter(|&k| s.marker(k) == 0)
                .map(|k| {
                    let ti = lt.pos[&s.toggled(k).lex_key()];
                    let res_t = &lt.res[ti as usize];
                    let (u, v, _) = res_s.chords()[k];
                    let action = if u != v {
                        EdgeAction::Merge { u, v }
                    } else {
                        let (w1, w2, _) = res_t.chords()[k];
                        EdgeAction::Split { u, w1, w2 }
                    };
                    let acc_s = res_s.arc_circle_count();
                    let acc_t = res_t.arc_circle_count();
                    let map = (0..res_s.circle_count())
                        .map(|x| {
                            if x < acc_s {
                                res_t
                                    .circle_containing(res_s.min_arcs()[x as usize])
                                    .expect("arcs persist across a toggle")
                            } else {
                                acc_t + (x - acc_s)
                            }
                        })
                        .collect();
                    Edge {
                        target: ti,
                        negative: s.weight_below(k) % 2 == 1,
                        action,
                        map,
                    }
                })
                .collect()
        })
        .collect()
}

/// Generators of one level at internal degree q, as (state index, label mask)
/// in canonical order.
fn level_q_basis(
    level: &Level,
    r: usize,
    q: i64,
    budget: &ComputeBudget,
) -> Result<Vec<(u32, u64)>> {
    let mut total: u128 = 0;
    for res in &level.res {
        let k = res.circle_count() as i64;
        let diff = k - (q - r as i64);
        if diff < 0 || diff % 2 != 0 || diff > 2 * k {
            continue;
        }
        total += binomial(k as usize, (diff / 2) as usize);
    }
    if total > budget.max_matrix_nonzeros as u128 {
        return Err(Error::Budget(format!(
            "slice at height {r}, degree {q} holds {total} generators, over the budget of {}",
            budget.max_matrix_nonzeros
        )));
    }
    let mut basis = Vec::with_capacity(total as usize);
    for (si, res) in level.res.iter().enumerate() {
        let k = res.circle_count() as usize;
        let diff = k as i64 - (q - r as i64);
        if diff < 0 || diff % 2 != 0 || diff > 2 * k as i64 {
            continue;
        }
        let t = (diff / 2) as usize;
        let mut masks: Vec<u64> = (0..k)
            .combinations(t)
            .map(|pos| pos.into_iter().fold(0u64, |m, j| m | 1 << j))
            .collect();
        masks.sort_by_key(|&m| label_key(m, k));
        basis.extend(masks.into_iter().map(|m| (si as u32, m)));
    }
    Ok(basis)
}

/// Orders label masks as words with circle 0 in the most significant
/// position and the +1 label before the −1 label.
fn label_key(mask: u64, k: usize) -> u64 {
    if k == 0 {
        0
    } else {
        mask.reverse_bits() >> (64 - k)
    }
}

fn assemble_matrix(
    edges: &[Vec<Edge>],
    src: &[(u32, u64)],
    tgt_index: &HashMap<(u32, u64), u32>,
    tgt_dim: usize,
) -> SparseExactMatrix {
    let mut m = SparseExactMatrix::new(tgt_dim, src.len());
    let mut emit = |row: u32, col: usize, negative: bool| {
        m.add_to(
            row as usize,
            col,
            BigInt::from(if negative { -1 } else { 1 }),
        );
    };
    let lookup = |target: u32, mask: u64| -> u32 {
        *tgt_index
            .get(&(target, mask))
            .expect("image generator exists in the next slice")
    };
    for (col, &(si, mask)) in src.iter().enumerate() {
        for e in &edges[si as usize] {
            match e.action {
                EdgeAction::Merge { u, v } => {
                    if mask >> u & 1 == 1 && mask >> v & 1 == 1 {
                        continue; // both circles carry the −1 label: m sends it to zero
                    }
                    let mut tmask = 0u64;
                    for (x, &mx) in e.map.iter().enumerate() {
                        if mask >> x & 1 == 1 {
                            tmask |= 1 << mx;
                        }
                    }
                    emit(lookup(e.target, tmask), col, e.negative);
                }
                EdgeAction::Split { u, w1, w2 } => {
                    let mut base = 0u64;
                    for (x, &mx) in e.map.iter().enumerate() {
                        if x as u32 != u && mask >> x & 1 == 1 {
                            base |= 1 << mx;
                        }
                    }
                    if mask >> u & 1 == 1 {
                        emit(lookup(e.target, base | 1 << w1 | 1 << w2), col, e.negative);
                    } else {
                        emit(lookup(e.target, base | 1 << w1), col, e.negative);
                        emit(lookup(e.target, base | 1 << w2), col, e.negative);
                    }
                }
            }
        }
    }
    m
}

/// The chain group slice at height r and internal degree q, with pre 0 ≤ r ≤
/// crossing count. Empty slices are fine.
pub fn build_slice(d: &LinkDiagram, r: usize, q: i64) -> Result<GradedSlice> {
    let n = d.crossing_count();
    if r > n {
        return Err(Error::Precondition(format!(
            "height {r} exceeds the crossing count {n}"
        )));
    }
    let budget = ComputeBudget::default();
    let level = build_level(d, r, &budget)?;
    let basis: Vec<Generator> = level_q_basis(&level, r, q, &budget)?
        .into_iter()
        .map(|(si, m)| Generator {
            state: level.states[si as usize],
            labels: m,
        })
        .collect();
    let index = basis
        .iter()
        .enumerate()
        .map(|(i, &g)| (g, i as u32))
        .collect();
    Ok(GradedSlice { r, q, basis, index })
}

/// The differential out of the (r, q) slice, with entries in {−1, 0, 1};
/// coefficient rings reduce it downstream. Columns index the source slice.
pub fn differential(d: &LinkDiagram, r: usize, q: i64) -> Result<SparseExactMatrix> {
    let n = d.crossing_count();
    if r > n {
        return Err(Error::Precondition(format!(
            "height {r} exceeds the crossing count {n}"
        )));
    }
    let budget = ComputeBudget::default();
    let lr = build_level(d, r, &budget)?;
    let src = level_q_basis(&lr, r, q, &budget)?;
    if r == n {
        return Ok(SparseExactMatrix::new(0, src.len()));
    }
    let lt = build_level(d, r + 1, &budget)?;
    let edges = build_edges(d, &lr, &lt);
    let tgt = level_q_basis(&lt, r + 1, q, &budget)?;
    let index: HashMap<(u32, u64), u32> = tgt
        .iter()
        .enumerate()
        .map(|(i, &g)| (g, i as u32))
        .collect();
    Ok(assemble_matrix(&edges, &src, &index, tgt.len()))
}

struct Cube {
    a: usize,
    b: usize,
    c_lo: usize,
    c_hi: usize,
    n_plus: usize,
    n_minus: usize,
    ring: CoefficientRing,
    budget: ComputeBudget,
    levels: Vec<Level>,
    edges: Vec<Vec<Vec<Edge>>>,
}

impl Cube {
    fn process_q(
        &self,
        q: i64,
        nnz_total: &AtomicUsize,
    ) -> Result<Vec<((i64, i64), AbelianGroup)>> {
        let bases: Vec<Vec<(u32, u64)>> = (self.a..=self.b)
            .map(|r| level_q_basis(&self.levels[r - self.a], r, q, &self.budget))
            .collect::<Result<_>>()?;
        let indices: Vec<HashMap<(u32, u64), u32>> = bases
            .iter()
            .map(|b| b.iter().enumerate().map(|(i, &g)| (g, i as u32)).collect())
            .collect();
        let mats: Vec<SparseExactMatrix> = (self.a..self.b)
            .map(|r| {
                let m = assemble_matrix(
                    &self.edges[r - self.a],
                    &bases[r - self.a],
                    &indices[r + 1 - self.a],
                    bases[r + 1 - self.a].len(),
                );
                let total = nnz_total.fetch_add(m.nnz(), Ordering::Relaxed) + m.nnz();
                if total > self.budget.max_matrix_nonzeros {
                    return Err(Error::Budget(format!(
                        "differentials hold over {} nonzero entries",
                        self.budget.max_matrix_nonzeros
                    )));
                }
                Ok(m)
            })
            .collect::<Result<_>>()?;
        for w in mats.windows(2) {
            if !composition_is_zero(&w[1], &w[0])? {
                return Err(Error::Contract(
                    "cube differential does not square to zero".into(),
                ));
            }
        }
        let mut ranks = Vec::with_capacity(mats.len());
        let mut snfs: Vec<Vec<BigInt>> = Vec::new();
        for m in &mats {
            match self.ring {
                CoefficientRing::Z => {
                    let f = smith_normal_form(m);
                    ranks.push(f.len());
                    snfs.push(f);
                }
                field => ranks.push(rank_over_field(m, field)?),
            }
        }
        let mut out = Vec::new();
        for r in self.c_lo..=self.c_hi {
            let dim = bases[r - self.a].len();
            if dim == 0 {
                continue;
            }
            debug_assert!(r < self.b || self.b == self.levels.len() - 1 + self.a);
            let rank_out = if r < self.b { ranks[r - self.a] } else { 0 };
            let (rank_in, torsion) = if r > self.a {
                let idx = r - 1 - self.a;
                let torsion = match self.ring {
                    CoefficientRing::Z => snfs[idx]
                        .iter()
                        .filter(|f| **f > BigInt::from(1))
                        .cloned()
                        .collect(),
                    _ => Vec::new(),
                };
                (ranks[idx], torsion)
            } else {
                debug_assert!(self.a == 0);
                (0, Vec::new())
            };
            let free = dim
                .checked_sub(rank_out)
                .and_then(|k| k.checked_sub(rank_in))
                .ok_or_else(|| Error::Contract("ranks exceed the slice dimension".into()))?;
            let group = AbelianGroup::new(free, torsion)?;
            if !group.is_trivial() {
                out.push((grading_convert(r, q, self.n_plus, self.n_minus), group));
            }
        }
        Ok(out)
    }
}

fn compute_table(
    d: &LinkDiagram,
    ring: CoefficientRing,
    budget: &ComputeBudget,
    window: Option<(i64, i64)>,
) -> Result<KhTable> {
    if d.is_empty() {
        return Err(Error::Precondition(
            "the empty diagram has no homology to compute".into(),
        ));
    }
    if let CoefficientRing::Zp(p) = ring {
        CoefficientRing::mod_p(p)?;
    }
    let n = d.crossing_count();
    let table_window = match window {
        None => Window::Full,
        Some((lo, hi)) => Window::Range(lo, hi),
    };
    let mut table = KhTable::new(ring, table_window);
    let (a, b, c_lo, c_hi) = match window {
        None => (0, n, 0, n),
        Some((i_lo, i_hi)) => {
            if i_lo > i_hi {
                return Err(Error::Precondition(format!(
                    "window [{i_lo}, {i_hi}] is empty"
                )));
            }
            let lo_h = i_lo + d.n_minus() as i64;
            let hi_h = i_hi + d.n_minus() as i64;
            if lo_h > n as i64 || hi_h < 0 {
                // the complex is supported on heights 0..=n, so the whole
                // window is certified zero
                return Ok(table);
            }
            (
                (lo_h - 1).max(0) as usize,
                ((hi_h + 1).min(n as i64)) as usize,
                lo_h.max(0) as usize,
                hi_h.min(n as i64) as usize,
            )
        }
    };
    let levels: Vec<Level> = (a..=b)
        .map(|r| build_level(d, r, budget))
        .collect::<Result<_>>()?;
    let edges: Vec<Vec<Vec<Edge>>> = (a..b)
        .map(|r| build_edges(d, &levels[r - a], &levels[r + 1 - a]))
        .collect();
    let mut qs = BTreeSet::new();
    for r in c_lo..=c_hi {
        for res in &levels[r - a].res {
            let k = res.circle_count() as i64;
            for t in 0..=k {
                qs.insert(r as i64 + k - 2 * t);
            }
        }
    }
    let cube = Cube {
        a,
        b,
        c_lo,
        c_hi,
        n_plus: d.n_plus(),
        n_minus: d.n_minus(),
        ring,
        budget: *budget,
        levels,
        edges,
    };
    let nnz_total = AtomicUsize::new(0);
    let per_q: Vec<Vec<((i64, i64), AbelianGroup)>> = qs
        .into_iter()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|q| cube.process_q(q, &nnz_total))
        .collect::<Result<_>>()?;
    for groups in per_q {
        for ((i, j), g) in groups {
            table.insert(i, j, g);
        }
    }
    Ok(table)
}

/// The full bigraded homology table of a nonempty diagram.
pub fn khovanov_full(d: &LinkDiagram, ring: CoefficientRing) -> Result<KhTable> {
    khovanov_full_with(d, ring, &ComputeBudget::default())
}

pub fn khovanov_full_with(
    d: &LinkDiagram,
    ring: CoefficientRing,
    budget: &ComputeBudget,
) -> Result<KhTable> {
    compute_table(d, ring, budget, None)
}

/// Homology restricted to homological gradings i_lo ≤ i ≤ i_hi. One extra
/// height on each side of the window is built so every reported grading is
/// certified; gradings outside the window stay unknown.
pub fn khovanov_window(
    d: &LinkDiagram,
    i_lo: i64,
    i_hi: i64,
    ring: CoefficientRing,
) -> Result<KhTable> {
    khovanov_window_with(d, i_lo, i_hi, ring, &ComputeBudget::default())
}

pub fn khovanov_window_with(
    d: &LinkDiagram,
    i_lo: i64,
    i_hi: i64,
    ring: CoefficientRing,
    budget: &ComputeBudget,
) -> Result<KhTable> {
    compute_table(d, ring, budget, Some((i_lo, i_hi)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::BraidWord;
    use num_traits::{Signed, Zero};
    use std::collections::BTreeMap;

    fn closure(text: &str) -> LinkDiagram {
        LinkDiagram::from_braid(&BraidWord::parse(text).unwrap())
    }

    fn z_table(d: &LinkDiagram) -> BTreeMap<(i64, i64), AbelianGroup> {
        khovanov_full(d, CoefficientRing::Z)
            .unwrap()
            .groups()
            .clone()
    }

    fn z(i: i64, j: i64) -> ((i64, i64), AbelianGroup) {
        ((i, j), AbelianGroup::free(1))
    }

    fn z_mod(i: i64, j: i64, t: i64) -> ((i64, i64), AbelianGroup) {
        ((i, j), AbelianGroup::new(0, vec![BigInt::from(t)]).unwrap())
    }

    #[test]
    fn trefoil_slice_dimensions() {
        let d = closure("2: 1 1 1");
        assert_eq!(build_slice(&d, 0, 2).unwrap().dim(), 1);
        assert_eq!(build_slice(&d, 0, 0).unwrap().dim(), 2);
        assert_eq!(build_slice(&d, 0, -2).unwrap().dim(), 1);
        let total_r0: usize = (-3..=3).map(|q| build_slice(&d, 0, q).unwrap().dim()).sum();
        assert_eq!(total_r0, 4);
        let total_r1: usize = (-3..=4).map(|q| build_slice(&d, 1, q).unwrap().dim()).sum();
        assert_eq!(total_r1, 6);
        assert!(build_slice(&d, 4, 0).is_err());

        let slice = build_slice(&d, 0, 0).unwrap();
        let g = slice.basis()[0];
        assert_eq!(slice.position(&g), Some(0));
    }

    #[test]
    fn differentials_compose_to_zero() {
        let d = closure("2: 1 1 1");
        for q in [0, 2, 4, 6] {
            let d0 = differential(&d, 0, q).unwrap();
            let d1 = differential(&d, 1, q).unwrap();
            assert!(d1.multiply(&d0).unwrap().is_zero());
            for v in d0.iter().map(|(_, _, v)| v) {
                assert!(v.abs() == BigInt::from(1));
            }
        }
        // the top differential is a zero map with no rows
        assert_eq!(differential(&d, 3, 6).unwrap().rows(), 0);
    }

    #[test]
    fn unknot_table() {
        let groups = z_table(&LinkDiagram::unknot());
        assert_eq!(groups, BTreeMap::from([z(0, -1), z(0, 1)]));
    }

    #[test]
    fn kinked_unknots_match_the_round_one() {
        let expected = BTreeMap::from([z(0, -1), z(0, 1)]);
        assert_eq!(z_table(&closure("2: 1")), expected);
        assert_eq!(z_table(&closure("2: -1")), expected);
        // a two-crossing unknot with one crossing of each sign
        assert_eq!(z_table(&closure("3: 1 -2")), expected);
    }

    #[test]
    fn right_trefoil_table() {
        let groups = z_table(&closure("2: 1 1 1"));
        let expected = BTreeMap::from([z(0, 1), z(0, 3), z(2, 5), z_mod(3, 7, 2), z(3, 9)]);
        assert_eq!(groups, expected);
    }

    #[test]
    fn left_trefoil_table() {
        let groups = z_table(&closure("2: -1 -1 -1"));
        let expected = BTreeMap::from([z(0, -1), z(0, -3), z(-2, -5), z_mod(-2, -7, 2), z(-3, -9)]);
        assert_eq!(groups, expected);
    }

    #[test]
    fn hopf_link_tables() {
        let plus = z_table(&closure("2: 1 1"));
        assert_eq!(plus, BTreeMap::from([z(0, 0), z(0, 2), z(2, 4), z(2, 6)]));
        let minus = z_table(&closure("2: -1 -1"));
        assert_eq!(
            minus,
            BTreeMap::from([z(0, 0), z(0, -2), z(-2, -4), z(-2, -6)])
        );
    }

    #[test]
    fn torus_2_5_table() {
        let groups = z_table(&closure("2: 1 1 1 1 1"));
        let expected = BTreeMap::from([
            z(0, 3),
            z(0, 5),
            z(2, 7),
            z_mod(3, 9, 2),
            z(3, 11),
            z(4, 11),
            z_mod(5, 13, 2),
            z(5, 15),
        ]);
        assert_eq!(groups, expected);
    }

    #[test]
    fn disjoint_circle_doubles_ranks_and_splits_degrees() {
        let t = closure("2: 1 1 1");
        let with_circle = t.disjoint_union(&LinkDiagram::unknot());
        let groups = z_table(&with_circle);
        let expected = BTreeMap::from([
            z(0, 0),
            ((0, 2), AbelianGroup::free(2)),
            z(0, 4),
            z(2, 4),
            z(2, 6),
            z_mod(3, 6, 2),
            ((3, 8), AbelianGroup::new(1, vec![BigInt::from(2)]).unwrap()),
            z(3, 10),
        ]);
        assert_eq!(groups, expected);
        for i in [0, 2, 3] {
            let before: usize = z_table(&t)
                .iter()
                .filter(|(&(gi, _), _)| gi == i)
                .map(|(_, g)| g.free_rank())
                .sum();
            let after: usize = groups
                .iter()
                .filter(|(&(gi, _), _)| gi == i)
                .map(|(_, g)| g.free_rank())
                .sum();
            assert_eq!(after, 2 * before);
        }
    }

    #[test]
    fn mirror_duality_of_rational_ranks() {
        for word in ["2: 1 1 1", "3: 1 -2 1 -2", "2: 1 1"] {
            let d = closure(word);
            let fwd = khovanov_full(&d, CoefficientRing::Q).unwrap();
            let bwd = khovanov_full(&d.mirror(), CoefficientRing::Q).unwrap();
            let flipped: BTreeMap<(i64, i64), usize> = bwd
                .groups()
                .iter()
                .map(|(&(i, j), g)| ((-i, -j), g.free_rank()))
                .collect();
            let fwd_ranks: BTreeMap<(i64, i64), usize> = fwd
                .groups()
                .iter()
                .map(|(&(i, j), g)| ((i, j), g.free_rank()))
                .collect();
            assert_eq!(fwd_ranks, flipped, "mirror duality fails for {word}");
        }
    }

    #[test]
    fn universal_coefficients_over_z2() {
        for word in ["2: 1 1 1", "3: 1 -2 1 -2"] {
            let d = closure(word);
            let over_z = khovanov_full(&d, CoefficientRing::Z).unwrap();
            let over_z2 = khovanov_full(&d, CoefficientRing::Zp(2)).unwrap();
            let t2 = |i: i64, j: i64| -> usize {
                over_z
                    .groups()
                    .get(&(i, j))
                    .map(|g| {
                        g.torsion()
                            .iter()
                            .filter(|t| (*t % BigInt::from(2)).is_zero())
                            .count()
                    })
                    .unwrap_or(0)
            };
            let mut gradings: BTreeSet<(i64, i64)> = over_z.groups().keys().copied().collect();
            gradings.extend(over_z2.groups().keys().copied());
            for (i, j) in gradings {
                let dim2 = over_z2.groups().get(&(i, j)).map_or(0, |g| g.free_rank());
                let rank = over_z.groups().get(&(i, j)).map_or(0, |g| g.free_rank());
                assert_eq!(
                    dim2,
                    rank + t2(i, j) + t2(i + 1, j),
                    "universal coefficients fail at ({i},{j}) for {word}"
                );
            }
        }
    }

    #[test]
    fn window_restricts_the_full_table() {
        for word in ["2: 1 1 1", "3: 1 -2 1 -2"] {
            let d = closure(word);
            let full = khovanov_full(&d, CoefficientRing::Z).unwrap();
            let part = khovanov_window(&d, 0, 1, CoefficientRing::Z).unwrap();
            assert_eq!(part.window(), Window::Range(0, 1));
            let expected: BTreeMap<(i64, i64), AbelianGroup> = full
                .groups()
                .iter()
                .filter(|(&(i, _), _)| (0..=1).contains(&i))
                .map(|(&k, g)| (k, g.clone()))
                .collect();
            assert_eq!(part.groups(), &expected);

            let wide = khovanov_window(&d, -9, 9, CoefficientRing::Z).unwrap();
            assert_eq!(wide.groups(), full.groups());
        }
    }

    #[test]
    fn window_entirely_outside_the_complex_is_empty() {
        let d = closure("2: 1 1 1");
        let t = khovanov_window(&d, -8, -5, CoefficientRing::Z).unwrap();
        assert!(t.is_empty());
        assert_eq!(t.query(-6, 0), Some(AbelianGroup::trivial()));
        assert_eq!(t.query(0, 1), None);
    }

    #[test]
    fn grading_conversions_invert() {
        for (r, q, np, nm) in [(0, 3, 3, 0), (5, -2, 2, 5), (3, 0, 0, 3)] {
            let (i, j) = grading_convert(r, q, np, nm);
            assert_eq!(grading_invert(i, j, np, nm), (r as i64, q));
        }
        assert_eq!(grading_convert(0, 0, 0, 2), (-2, -4));
        assert_eq!(grading_invert(-2, -4, 0, 2), (0, 0));
    }

    #[test]
    fn budget_and_precondition_errors() {
        let d = closure("2: 1 1 1");
        let tiny_levels = ComputeBudget {
            max_states_per_level: 2,
            max_matrix_nonzeros: 50_000_000,
        };
        assert!(matches!(
            khovanov_full_with(&d, CoefficientRing::Z, &tiny_levels),
            Err(Error::Budget(_))
        ));
        let tiny_nnz = ComputeBudget {
            max_states_per_level: 1_000_000,
            max_matrix_nonzeros: 2,
        };
        assert!(matches!(
            khovanov_full_with(&d, CoefficientRing::Z, &tiny_nnz),
            Err(Error::Budget(_))
        ));
        assert!(khovanov_full(&LinkDiagram::empty(), CoefficientRing::Z).is_err());
        assert!(khovanov_window(&d, 2, 1, CoefficientRing::Z).is_err());
        assert!(khovanov_full(&d, CoefficientRing::Zp(6)).is_err());
    }
}
