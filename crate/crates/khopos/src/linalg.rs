use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoefficientRing {
    Z,
    Q,
    Zp(u64),
}

impl CoefficientRing {
    /// Accepts "Z", "Q", or "Z<p>" with p prime, e.g. "Z2".
    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "Z" => Ok(Self::Z),
            "Q" => Ok(Self::Q),
            _ => {
                let p = text
                    .strip_prefix('Z')
                    .and_then(|t| t.parse::<u64>().ok())
                    .ok_or_else(|| Error::Parse(format!("unknown coefficient ring '{text}'")))?;
                Self::mod_p(p)
            }
        }
    }

    pub fn mod_p(p: u64) -> Result<Self> {
        if p >= 1 << 31 {
            return Err(Error::Precondition(format!("modulus {p} too large")));
        }
        if !is_prime(p) {
            return Err(Error::Precondition(format!("modulus {p} is not prime")));
        }
        Ok(Self::Zp(p))
    }

    pub fn is_field(self) -> bool {
        !matches!(self, Self::Z)
    }

    pub fn label(self) -> String {
        match self {
            Self::Z => "Z".into(),
            Self::Q => "Q".into(),
            Self::Zp(p) => format!("Z{p}"),
        }
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p.is_multiple_of(2) {
        return p == 2;
    }
    let mut d = 3;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// A finitely generated abelian group: ℤ^free ⊕ ℤ/d₁ ⊕ … with d₁ | d₂ | ….
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianGroup {
    free_rank: usize,
    torsion: Vec<BigInt>,
}

impl AbelianGroup {
    pub fn new(free_rank: usize, torsion: Vec<BigInt>) -> Result<Self> {
        for t in &torsion {
            if *t <= BigInt::one() {
                return Err(Error::Contract(format!("torsion factor {t} must exceed 1")));
            }
        }
        for w in torsion.windows(2) {
            if !(&w[1] % &w[0]).is_zero() {
                return Err(Error::Contract(format!(
                    "torsion factors {} and {} violate the divisibility chain",
                    w[0], w[1]
                )));
            }
        }
        Ok(Self { free_rank, torsion })
    }

    pub fn free(rank: usize) -> Self {
        Self {
            free_rank: rank,
            torsion: Vec::new(),
        }
    }

    pub fn trivial() -> Self {
        Self::free(0)
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn to_text(&self) -> String {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for t in &self.torsion {
            parts.push(format!("Z/{t}"));
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join("+")
        }
    }
}

/// A sparse matrix with unbounded integer entries; explicit zeros are never stored.
/// Columns index the domain, rows the codomain.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SparseExactMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(u32, u32), BigInt>,
}

impl SparseExactMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        assert!(rows <= u32::MAX as usize && cols <= u32::MAX as usize);
        Self {
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::new(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, BigInt)>,
    ) -> Result<Self> {
        let mut m = Self::new(rows, cols);
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(Error::Precondition(format!(
                    "entry ({r},{c}) out of bounds for a {rows}x{cols} matrix"
                )));
            }
            m.add_to(r, c, v);
        }
        Ok(m)
    }

    pub fn from_dense(data: &[Vec<i64>]) -> Self {
        let rows = data.len();
        let cols = data.first().map_or(0, |r| r.len());
        let mut m = Self::new(rows, cols);
        for (r, row) in data.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged dense input");
            for (c, &v) in row.iter().enumerate() {
                m.set(r, c, BigInt::from(v));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, r: usize, c: usize) -> BigInt {
        self.entries
            .get(&(r as u32, c as u32))
            .cloned()
            .unwrap_or_else(BigInt::zero)
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        assert!(r < self.rows && c < self.cols);
        if v.is_zero() {
            self.entries.remove(&(r as u32, c as u32));
        } else {
            self.entries.insert((r as u32, c as u32), v);
        }
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: BigInt) {
        if v.is_zero() {
            return;
        }
        let cur = self.get(r, c);
        self.set(r, c, cur + v);
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &BigInt)> {
        self.entries
            .iter()
            .map(|(&(r, c), v)| (r as usize, c as usize, v))
    }

    pub fn multiply(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Precondition(format!(
                "cannot compose a {}x{} matrix with a {}x{} one",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut rhs_rows: HashMap<u32, Vec<(u32, &BigInt)>> = HashMap::new();
        for (&(r, c), v) in &rhs.entries {
            rhs_rows.entry(r).or_default().push((c, v));
        }
        let mut out = Self::new(self.rows, rhs.cols);
        for (&(r, k), v) in &self.entries {
            if let Some(row) = rhs_rows.get(&k) {
                for &(c, w) in row {
                    out.add_to(r as usize, c as usize, v * w);
                }
            }
        }
        Ok(out)
    }

    /// Coordinate dump "rows cols" then one sorted "r c value" line per entry.
    pub fn to_triplet_text(&self) -> String {
        let mut s = format!("{} {}\n", self.rows, self.cols);
        for (&(r, c), v) in &self.entries {
            s.push_str(&format!("{r} {c} {v}\n"));
        }
        s
    }
}

/// Mutable sparse view with row maps and per-column row sets, used by the
/// Smith reduction.
struct Workspace {
    rows: Vec<HashMap<u32, BigInt>>,
    col_rows: Vec<HashSet<u32>>,
    row_alive: Vec<bool>,
    col_alive: Vec<bool>,
    heap: BinaryHeap<Reverse<(bool, u64, u32, u32)>>,
}

impl Workspace {
    fn load(a: &SparseExactMatrix) -> Self {
        let mut ws = Self {
            rows: vec![HashMap::new(); a.rows],
            col_rows: vec![HashSet::new(); a.cols],
            row_alive: vec![true; a.rows],
            col_alive: vec![true; a.cols],
            heap: BinaryHeap::with_capacity(a.nnz()),
        };
        for (&(r, c), v) in &a.entries {
            ws.rows[r as usize].insert(c, v.clone());
            ws.col_rows[c as usize].insert(r);
        }
        for &(r, c) in a.entries.keys() {
            let p = ws.priority(r, c);
            ws.heap.push(Reverse((p.0, p.1, r, c)));
        }
        ws
    }

    fn entry(&self, r: u32, c: u32) -> Option<&BigInt> {
        self.rows[r as usize].get(&c)
    }

    /// Unit pivots first, then minimal Markowitz fill-in estimate.
    fn priority(&self, r: u32, c: u32) -> (bool, u64) {
        let nonunit = !self.rows[r as usize][&c].abs().is_one();
        let fill =
            (self.rows[r as usize].len() as u64 - 1) * (self.col_rows[c as usize].len() as u64 - 1);
        (nonunit, fill)
    }

    fn set_entry(&mut self, r: u32, c: u32, v: BigInt) {
        if v.is_zero() {
            if self.rows[r as usize].remove(&c).is_some() {
                self.col_rows[c as usize].remove(&r);
            }
        } else {
            self.rows[r as usize].insert(c, v);
            self.col_rows[c as usize].insert(r);
            let p = self.priority(r, c);
            self.heap.push(Reverse((p.0, p.1, r, c)));
        }
    }

    /// row t += k · row s
    fn row_axpy(&mut self, t: u32, s: u32, k: &BigInt) {
        let src: Vec<(u32, BigInt)> = self.rows[s as usize]
            .iter()
            .map(|(&c, v)| (c, v.clone()))
            .collect();
        for (c, sv) in src {
            let cur = self.entry(t, c).cloned().unwrap_or_else(BigInt::zero);
            self.set_entry(t, c, cur + k * &sv);
        }
    }

    /// (col c1, col c2) ← (x·c1 + y·c2, z·c1 + w·c2); the caller guarantees
    /// the coefficient matrix is unimodular.
    fn col_unimodular(&mut self, c1: u32, c2: u32, x: &BigInt, y: &BigInt, z: &BigInt, w: &BigInt) {
        let mut touched: Vec<u32> = self.col_rows[c1 as usize]
            .union(&self.col_rows[c2 as usize])
            .copied()
            .collect();
        touched.sort_unstable();
        for r in touched {
            let a = self.entry(r, c1).cloned().unwrap_or_else(BigInt::zero);
            let b = self.entry(r, c2).cloned().unwrap_or_else(BigInt::zero);
            self.set_entry(r, c1, x * &a + y * &b);
            self.set_entry(r, c2, z * &a + w * &b);
        }
    }

    fn row_unimodular(&mut self, r1: u32, r2: u32, x: &BigInt, y: &BigInt, z: &BigInt, w: &BigInt) {
        let mut touched: Vec<u32> = self.rows[r1 as usize]
            .keys()
            .chain(self.rows[r2 as usize].keys())
            .copied()
            .collect();
        touched.sort_unstable();
        touched.dedup();
        for c in touched {
            let a = self.entry(r1, c).cloned().unwrap_or_else(BigInt::zero);
            let b = self.entry(r2, c).cloned().unwrap_or_else(BigInt::zero);
            self.set_entry(r1, c, x * &a + y * &b);
            self.set_entry(r2, c, z * &a + w * &b);
        }
    }

    /// Applies gcd transforms until the pivot divides every entry in its row
    /// and column. Each transform strictly shrinks |pivot|, so this terminates.
    fn condition_pivot(&mut self, r: u32, c: u32) {
        loop {
            let p = self.entry(r, c).expect("pivot vanished").clone();
            let mut bad_col: Option<(u32, BigInt)> = None;
            for (&j, v) in &self.rows[r as usize] {
                if j != c && !(v % &p).is_zero() && bad_col.as_ref().is_none_or(|(bj, _)| j < *bj) {
                    bad_col = Some((j, v.clone()));
                }
            }
            if let Some((j, v)) = bad_col {
                let (g, x, y) = extended_gcd(&p, &v);
                self.col_unimodular(c, j, &x, &y, &(-(&v / &g)), &(&p / &g));
                continue;
            }
            let mut bad_row: Option<u32> = None;
            for &r2 in &self.col_rows[c as usize] {
                if r2 != r
                    && !(self.entry(r2, c).unwrap() % &p).is_zero()
                    && bad_row.is_none_or(|b| r2 < b)
                {
                    bad_row = Some(r2);
                }
            }
            if let Some(r2) = bad_row {
                let v = self.entry(r2, c).unwrap().clone();
                let (g, x, y) = extended_gcd(&p, &v);
                self.row_unimodular(r, r2, &x, &y, &(-(&v / &g)), &(&p / &g));
                continue;
            }
            return;
        }
    }

    /// Clears column c by row operations, then drops row r and column c.
    /// Dropping is sound because clearing row r afterwards would use column
    /// operations that only touch the already-cleared column c.
    fn eliminate(&mut self, r: u32, c: u32) -> BigInt {
        let pivot = self.entry(r, c).expect("pivot vanished").clone();
        let mut others: Vec<u32> = self.col_rows[c as usize]
            .iter()
            .filter(|&&r2| r2 != r)
            .copied()
            .collect();
        others.sort_unstable();
        for r2 in others {
            let v2 = self.entry(r2, c).unwrap().clone();
            debug_assert!((&v2 % &pivot).is_zero());
            let q = &v2 / &pivot;
            self.row_axpy(r2, r, &(-q));
        }
        let cols: Vec<u32> = self.rows[r as usize].keys().copied().collect();
        for c2 in cols {
            self.col_rows[c2 as usize].remove(&r);
        }
        self.rows[r as usize].clear();
        self.row_alive[r as usize] = false;
        self.col_alive[c as usize] = false;
        self.col_rows[c as usize].clear();
        pivot.abs()
    }
}

fn extended_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let eg = a.extended_gcd(b);
    if eg.gcd.is_negative() {
        (-eg.gcd, -eg.x, -eg.y)
    } else {
        (eg.gcd, eg.x, eg.y)
    }
}

/// Massages a diagonal multiset into the divisibility chain d₁ | d₂ | …;
/// replacing a violating pair by (gcd, lcm) preserves the equivalence class.
/// Units divide everything, so only the non-unit part needs fixing.
fn invariant_chain(diag: Vec<BigInt>) -> Vec<BigInt> {
    let mut chain: Vec<BigInt> = diag.iter().filter(|v| v.is_one()).cloned().collect();
    let mut d: Vec<BigInt> = diag.into_iter().filter(|v| !v.is_one()).collect();
    d.sort();
    loop {
        let mut changed = false;
        for i in 0..d.len() {
            for j in i + 1..d.len() {
                if !(&d[j] % &d[i]).is_zero() {
                    let g = d[i].gcd(&d[j]);
                    let l = &d[i] / &g * &d[j];
                    d[i] = g;
                    d[j] = l;
                    changed = true;
                }
            }
        }
        if !changed {
            chain.extend(d);
            return chain;
        }
        d.sort();
    }
}

/// Invariant factors d₁ | d₂ | … | d_k of an integer matrix, k = rank.
pub fn smith_normal_form(a: &SparseExactMatrix) -> Vec<BigInt> {
    let (units, core) = unit_pivot_reduce(a);
    let mut diag = vec![BigInt::one(); units];
    diag.extend(workspace_diagonal(&core));
    invariant_chain(diag)
}

/// Diagonal entries from the heap-driven Smith reduction; not yet a chain.
fn workspace_diagonal(a: &SparseExactMatrix) -> Vec<BigInt> {
    let mut ws = Workspace::load(a);
    let mut diag = Vec::new();
    while let Some(Reverse((nonunit, fill, r, c))) = ws.heap.pop() {
        if !ws.row_alive[r as usize] || !ws.col_alive[c as usize] || ws.entry(r, c).is_none() {
            continue;
        }
        let cur = ws.priority(r, c);
        if cur != (nonunit, fill) {
            ws.heap.push(Reverse((cur.0, cur.1, r, c)));
            continue;
        }
        if nonunit {
            ws.condition_pivot(r, c);
        }
        diag.push(ws.eliminate(r, c));
    }
    diag
}

const NO_PIVOT: u32 = u32::MAX;

/// Left-looking column sweep over ℤ that eliminates ±1 pivots with a dense
/// accumulator. Columns whose residual exposes no unit entry are reprocessed
/// once more pivots exist; what survives every pass is the core.
struct UnitSweep {
    row_pivot: Vec<u32>,
    pivot_rows: Vec<u32>,
    pivot_cols: Vec<Vec<(u32, i64)>>,
    row_degree: Vec<u32>,
    acc: Vec<i64>,
    touched: Vec<u32>,
}

enum UnitOutcome {
    Pivot,
    Core(Vec<(u32, i64)>),
    Zero,
}

impl UnitSweep {
    /// Reduces one column against the stored pivots. Returns None on i64
    /// overflow, which abandons the whole sweep.
    fn reduce_column(&mut self, col: Vec<(u32, i64)>) -> Option<UnitOutcome> {
        let mut heap: BinaryHeap<Reverse<u32>> = BinaryHeap::new();
        for (r, v) in col {
            self.acc[r as usize] = v;
            self.touched.push(r);
            if self.row_pivot[r as usize] != NO_PIVOT {
                heap.push(Reverse(self.row_pivot[r as usize]));
            }
        }
        {
            let Self {
                row_pivot,
                pivot_rows,
                pivot_cols,
                acc,
                touched,
                ..
            } = self;
            // Ascending pivot order: a fired pivot only wakes later ones, so
            // each fires at most once per column.
            while let Some(Reverse(id)) = heap.pop() {
                let f = acc[pivot_rows[id as usize] as usize];
                if f == 0 {
                    continue;
                }
                for &(r, pv) in &pivot_cols[id as usize] {
                    let cur = acc[r as usize];
                    let new = cur.checked_sub(f.checked_mul(pv)?)?;
                    if cur == 0 && new != 0 {
                        touched.push(r);
                        if row_pivot[r as usize] != NO_PIVOT {
                            heap.push(Reverse(row_pivot[r as usize]));
                        }
                    }
                    acc[r as usize] = new;
                }
            }
        }
        let mut residual: Vec<(u32, i64)> = Vec::new();
        for &r in &self.touched {
            let v = self.acc[r as usize];
            if v != 0 {
                residual.push((r, v));
                self.acc[r as usize] = 0;
            }
        }
        self.touched.clear();
        residual.sort_unstable_by_key(|&(r, _)| r);
        let unit = residual
            .iter()
            .filter(|&&(_, v)| v == 1 || v == -1)
            .min_by_key(|&&(r, _)| (self.row_degree[r as usize], r));
        if let Some(&(rho, v)) = unit {
            let col = if v == 1 {
                residual
            } else {
                residual.iter().map(|&(r, w)| (r, -w)).collect()
            };
            self.row_pivot[rho as usize] = self.pivot_cols.len() as u32;
            self.pivot_rows.push(rho);
            self.pivot_cols.push(col);
            Some(UnitOutcome::Pivot)
        } else if residual.is_empty() {
            Some(UnitOutcome::Zero)
        } else {
            Some(UnitOutcome::Core(residual))
        }
    }
}

/// Splits off as many ±1 pivots as the sweep can reach, returning their count
/// and the remaining core. All transforms are unimodular, so the invariant
/// factors of the input are 1 (count times) followed by those of the core,
/// and ranks add the same way over any field. Entries outside i64 fall back
/// to an untouched core.
fn unit_pivot_reduce(a: &SparseExactMatrix) -> (usize, SparseExactMatrix) {
    let mut cols: Vec<Vec<(u32, i64)>> = vec![Vec::new(); a.cols];
    let mut row_degree = vec![0u32; a.rows];
    for (r, c, v) in a.iter() {
        match v.to_i64() {
            Some(v) => cols[c].push((r as u32, v)),
            None => return (0, a.clone()),
        }
        row_degree[r] += 1;
    }
    let mut order: Vec<usize> = (0..a.cols).collect();
    order.sort_by_key(|&c| (cols[c].len(), c));

    let mut sweep = UnitSweep {
        row_pivot: vec![NO_PIVOT; a.rows],
        pivot_rows: Vec::new(),
        pivot_cols: Vec::new(),
        row_degree,
        acc: vec![0; a.rows],
        touched: Vec::new(),
    };
    let mut pending: Vec<Vec<(u32, i64)>> = order
        .into_iter()
        .map(|c| std::mem::take(&mut cols[c]))
        .collect();
    loop {
        let mut parked = Vec::new();
        let mut grew = false;
        for col in pending {
            match sweep.reduce_column(col) {
                None => return (0, a.clone()),
                Some(UnitOutcome::Pivot) => grew = true,
                Some(UnitOutcome::Core(residual)) => parked.push(residual),
                Some(UnitOutcome::Zero) => {}
            }
        }
        pending = parked;
        if !grew || pending.is_empty() {
            break;
        }
    }
    let mut involved: Vec<u32> = pending
        .iter()
        .flat_map(|col| col.iter().map(|&(r, _)| r))
        .collect();
    involved.sort_unstable();
    involved.dedup();
    let mut core = SparseExactMatrix::new(involved.len(), pending.len());
    for (j, col) in pending.iter().enumerate() {
        for &(r, v) in col {
            core.set(involved.binary_search(&r).unwrap(), j, BigInt::from(v));
        }
    }
    (sweep.pivot_rows.len(), core)
}

/// Rank over ℚ: the unit sweep splits off the easy part, fraction-free
/// elimination finishes the core.
fn rank_over_q(a: &SparseExactMatrix) -> usize {
    let (units, core) = unit_pivot_reduce(a);
    units + fraction_free_rank(&core)
}

/// Fraction-free row elimination with content stripping; pivots come from a
/// lazy min-fill heap.
fn fraction_free_rank(a: &SparseExactMatrix) -> usize {
    let mut rows: Vec<HashMap<u32, BigInt>> = vec![HashMap::new(); a.rows];
    let mut col_rows: Vec<HashSet<u32>> = vec![HashSet::new(); a.cols];
    for (&(r, c), v) in &a.entries {
        rows[r as usize].insert(c, v.clone());
        col_rows[c as usize].insert(r);
    }
    for row in rows.iter_mut() {
        strip_content(row);
    }
    let fill = |rows: &[HashMap<u32, BigInt>], col_rows: &[HashSet<u32>], r: u32, c: u32| {
        (rows[r as usize].len() as u64 - 1) * (col_rows[c as usize].len() as u64 - 1)
    };
    let mut heap: BinaryHeap<Reverse<(u64, u32, u32)>> = a
        .entries
        .keys()
        .map(|&(r, c)| Reverse((fill(&rows, &col_rows, r, c), r, c)))
        .collect();
    let mut row_alive = vec![true; a.rows];
    let mut rank = 0;
    while let Some(Reverse((f, pr, c))) = heap.pop() {
        if !row_alive[pr as usize] || !rows[pr as usize].contains_key(&c) {
            continue;
        }
        if f != fill(&rows, &col_rows, pr, c) {
            heap.push(Reverse((fill(&rows, &col_rows, pr, c), pr, c)));
            continue;
        }
        rank += 1;
        let pivot_row: Vec<(u32, BigInt)> = rows[pr as usize]
            .iter()
            .map(|(&j, v)| (j, v.clone()))
            .collect();
        let pv = rows[pr as usize][&c].clone();
        let others: Vec<u32> = col_rows[c as usize]
            .iter()
            .filter(|&&r2| r2 != pr)
            .copied()
            .collect();
        for r2 in others {
            let v2 = rows[r2 as usize][&c].clone();
            // row2 ← pv·row2 − v2·pivot_row, then strip the content
            for v in rows[r2 as usize].values_mut() {
                *v *= &pv;
            }
            for (j, pvj) in &pivot_row {
                let cur = rows[r2 as usize]
                    .get(j)
                    .cloned()
                    .unwrap_or_else(BigInt::zero);
                let new = cur - &v2 * pvj;
                if new.is_zero() {
                    if rows[r2 as usize].remove(j).is_some() {
                        col_rows[*j as usize].remove(&r2);
                    }
                } else {
                    rows[r2 as usize].insert(*j, new);
                    col_rows[*j as usize].insert(r2);
                }
            }
            strip_content(&mut rows[r2 as usize]);
            for &j in rows[r2 as usize].keys() {
                heap.push(Reverse((fill(&rows, &col_rows, r2, j), r2, j)));
            }
        }
        let cols: Vec<u32> = rows[pr as usize].keys().copied().collect();
        for c2 in cols {
            col_rows[c2 as usize].remove(&pr);
        }
        rows[pr as usize].clear();
        row_alive[pr as usize] = false;
    }
    rank
}

fn strip_content(row: &mut HashMap<u32, BigInt>) {
    let mut g = BigInt::zero();
    for v in row.values() {
        g = g.gcd(v);
        if g.is_one() {
            return;
        }
    }
    if g > BigInt::one() {
        for v in row.values_mut() {
            *v /= &g;
        }
    }
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    (a as u128 * b as u128 % p as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Rank over ℤ/p by a left-looking column sweep with a dense accumulator.
/// Stored pivot columns are normalized so the pivot entry is 1.
fn rank_mod_p(a: &SparseExactMatrix, p: u64) -> usize {
    let modulus = BigInt::from(p);
    let mut cols: Vec<Vec<(u32, u64)>> = vec![Vec::new(); a.cols];
    let mut row_degree = vec![0u32; a.rows];
    for (r, c, v) in a.iter() {
        let m = v.mod_floor(&modulus).to_u64().unwrap();
        if m != 0 {
            cols[c].push((r as u32, m));
            row_degree[r] += 1;
        }
    }
    let mut order: Vec<usize> = (0..a.cols).collect();
    order.sort_by_key(|&c| (cols[c].len(), c));

    let mut row_pivot: Vec<u32> = vec![NO_PIVOT; a.rows];
    let mut pivot_rows: Vec<u32> = Vec::new();
    let mut pivot_cols: Vec<Vec<(u32, u64)>> = Vec::new();
    let mut acc: Vec<u64> = vec![0; a.rows];
    let mut touched: Vec<u32> = Vec::new();
    for c in order {
        let mut heap: BinaryHeap<Reverse<u32>> = BinaryHeap::new();
        for &(r, v) in &cols[c] {
            acc[r as usize] = v;
            touched.push(r);
            if row_pivot[r as usize] != NO_PIVOT {
                heap.push(Reverse(row_pivot[r as usize]));
            }
        }
        while let Some(Reverse(id)) = heap.pop() {
            let f = acc[pivot_rows[id as usize] as usize];
            if f == 0 {
                continue;
            }
            for &(r, pv) in &pivot_cols[id as usize] {
                let cur = acc[r as usize];
                let new = (cur + p - mul_mod(f, pv, p)) % p;
                if cur == 0 && new != 0 {
                    touched.push(r);
                    if row_pivot[r as usize] != NO_PIVOT {
                        heap.push(Reverse(row_pivot[r as usize]));
                    }
                }
                acc[r as usize] = new;
            }
        }
        let mut residual: Vec<(u32, u64)> = Vec::new();
        for &r in &touched {
            let v = acc[r as usize];
            if v != 0 {
                residual.push((r, v));
                acc[r as usize] = 0;
            }
        }
        touched.clear();
        if let Some(&(rho, v)) = residual
            .iter()
            .min_by_key(|&&(r, _)| (row_degree[r as usize], r))
        {
            residual.sort_unstable_by_key(|&(r, _)| r);
            let inv = pow_mod(v, p - 2, p);
            let col = residual
                .into_iter()
                .map(|(r, w)| (r, mul_mod(w, inv, p)))
                .collect();
            row_pivot[rho as usize] = pivot_cols.len() as u32;
            pivot_rows.push(rho);
            pivot_cols.push(col);
        }
    }
    pivot_cols.len()
}

/// Whether outer ∘ inner = 0, without materializing the product.
pub fn composition_is_zero(outer: &SparseExactMatrix, inner: &SparseExactMatrix) -> Result<bool> {
    if outer.cols() != inner.rows() {
        return Err(Error::Precondition(format!(
            "cannot compose a {}x{} matrix with a {}x{} one",
            outer.rows(),
            outer.cols(),
            inner.rows(),
            inner.cols()
        )));
    }
    let slow = || outer.multiply(inner).map(|m| m.is_zero());
    let mut outer_cols: Vec<Vec<(u32, i64)>> = vec![Vec::new(); outer.cols()];
    for (r, c, v) in outer.iter() {
        match v.to_i64() {
            Some(v) => outer_cols[c].push((r as u32, v)),
            None => return slow(),
        }
    }
    let mut acc: Vec<i128> = vec![0; outer.rows()];
    let mut touched: Vec<u32> = Vec::new();
    let mut inner_by_col: Vec<Vec<(u32, i64)>> = vec![Vec::new(); inner.cols()];
    for (r, c, v) in inner.iter() {
        match v.to_i64() {
            Some(v) => inner_by_col[c].push((r as u32, v)),
            None => return slow(),
        }
    }
    for col in &inner_by_col {
        for &(k, v) in col {
            for &(r, w) in &outer_cols[k as usize] {
                if acc[r as usize] == 0 {
                    touched.push(r);
                }
                match acc[r as usize].checked_add(v as i128 * w as i128) {
                    Some(x) => acc[r as usize] = x,
                    None => return slow(),
                }
            }
        }
        let mut zero = true;
        for &r in &touched {
            if acc[r as usize] != 0 {
                zero = false;
            }
            acc[r as usize] = 0;
        }
        touched.clear();
        if !zero {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn rank_over_field(a: &SparseExactMatrix, field: CoefficientRing) -> Result<usize> {
    match field {
        CoefficientRing::Z => Err(Error::Precondition(
            "rank_over_field needs a field; use smith_normal_form over the integers".into(),
        )),
        CoefficientRing::Q => Ok(rank_over_q(a)),
        CoefficientRing::Zp(p) => {
            CoefficientRing::mod_p(p)?;
            Ok(rank_mod_p(a, p))
        }
    }
}

/// Homology at the middle of dIn → · → dOut.
pub fn homology_of_pair(
    d_in: &SparseExactMatrix,
    d_out: &SparseExactMatrix,
    ring: CoefficientRing,
) -> Result<AbelianGroup> {
    if d_in.rows() != d_out.cols() {
        return Err(Error::Precondition(format!(
            "dIn lands in dimension {} but dOut consumes dimension {}",
            d_in.rows(),
            d_out.cols()
        )));
    }
    if !composition_is_zero(d_out, d_in)? {
        return Err(Error::Contract("dOut ∘ dIn is not zero".into()));
    }
    let middle = d_in.rows();
    let (rank_in, rank_out, torsion) = match ring {
        CoefficientRing::Z => {
            let factors = smith_normal_form(d_in);
            let rank_in = factors.len();
            let torsion = factors.into_iter().filter(|f| !f.is_one()).collect();
            (rank_in, rank_over_q(d_out), torsion)
        }
        field => (
            rank_over_field(d_in, field)?,
            rank_over_field(d_out, field)?,
            Vec::new(),
        ),
    };
    let free = middle
        .checked_sub(rank_out)
        .and_then(|k| k.checked_sub(rank_in))
        .ok_or_else(|| Error::Contract("ranks exceed the middle dimension".into()))?;
    AbelianGroup::new(free, torsion)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn snf_i64(data: &[Vec<i64>]) -> Vec<i64> {
        smith_normal_form(&SparseExactMatrix::from_dense(data))
            .iter()
            .map(|v| v.to_i64().unwrap())
            .collect()
    }

    #[test]
    fn ring_parsing() {
        assert_eq!(CoefficientRing::parse("Z").unwrap(), CoefficientRing::Z);
        assert_eq!(CoefficientRing::parse("Q").unwrap(), CoefficientRing::Q);
        assert_eq!(
            CoefficientRing::parse("Z2").unwrap(),
            CoefficientRing::Zp(2)
        );
        assert_eq!(
            CoefficientRing::parse("Z31").unwrap(),
            CoefficientRing::Zp(31)
        );
        assert!(CoefficientRing::parse("Z4").is_err());
        assert!(CoefficientRing::parse("Z1").is_err());
        assert!(CoefficientRing::parse("F2").is_err());
        assert_eq!(CoefficientRing::Zp(7).label(), "Z7");
        assert!(!CoefficientRing::Z.is_field());
        assert!(CoefficientRing::Q.is_field());
    }

    #[test]
    fn abelian_group_validation() {
        assert!(AbelianGroup::new(1, vec![BigInt::from(2), BigInt::from(4)]).is_ok());
        assert!(AbelianGroup::new(0, vec![BigInt::from(2), BigInt::from(3)]).is_err());
        assert!(AbelianGroup::new(0, vec![BigInt::from(1)]).is_err());
        assert_eq!(AbelianGroup::trivial().to_text(), "0");
        assert_eq!(AbelianGroup::free(1).to_text(), "Z");
        assert_eq!(
            AbelianGroup::new(2, vec![BigInt::from(2)])
                .unwrap()
                .to_text(),
            "Z^2+Z/2"
        );
    }

    #[test]
    fn snf_examples() {
        assert_eq!(snf_i64(&[vec![2, 4], vec![6, 8]]), vec![2, 4]);
        assert_eq!(
            smith_normal_form(&SparseExactMatrix::identity(4)),
            vec![BigInt::one(); 4]
        );
        assert_eq!(snf_i64(&[vec![0, 0], vec![0, 0]]), Vec::<i64>::new());
        assert_eq!(
            smith_normal_form(&SparseExactMatrix::new(0, 0)),
            Vec::<BigInt>::new()
        );
        assert_eq!(snf_i64(&[vec![2]]), vec![2]);
        assert_eq!(snf_i64(&[vec![0, 3], vec![0, 0]]), vec![3]);
        assert_eq!(snf_i64(&[vec![1, 2], vec![3, 4]]), vec![1, 2]);
    }

    #[test]
    fn snf_chain_fixup() {
        // Diagonal (2,3) must massage into 1 | 6.
        assert_eq!(snf_i64(&[vec![2, 0], vec![0, 3]]), vec![1, 6]);
        assert_eq!(snf_i64(&[vec![6, 0], vec![0, 4]]), vec![2, 12]);
        assert_eq!(
            snf_i64(&[vec![2, 0, 0], vec![0, 6, 0], vec![0, 0, 0]]),
            vec![2, 6]
        );
    }

    #[test]
    fn snf_with_nonunit_conditioning() {
        assert_eq!(snf_i64(&[vec![2, 3], vec![0, 0]]), vec![1]);
        assert_eq!(snf_i64(&[vec![4, 6], vec![6, 9]]), vec![1]);
        assert_eq!(snf_i64(&[vec![4, 6], vec![2, 8]]), vec![2, 10]);
        assert_eq!(snf_i64(&[vec![2, 0], vec![3, 2]]), vec![1, 4]);
    }

    #[test]
    fn field_ranks() {
        let id3 = SparseExactMatrix::identity(3);
        assert_eq!(rank_over_field(&id3, CoefficientRing::Q).unwrap(), 3);
        let two = SparseExactMatrix::from_dense(&[vec![2]]);
        assert_eq!(rank_over_field(&two, CoefficientRing::Zp(2)).unwrap(), 0);
        assert_eq!(rank_over_field(&two, CoefficientRing::Zp(3)).unwrap(), 1);
        assert_eq!(rank_over_field(&two, CoefficientRing::Q).unwrap(), 1);
        assert!(rank_over_field(&two, CoefficientRing::Z).is_err());
        assert!(rank_over_field(&two, CoefficientRing::Zp(4)).is_err());

        let six = SparseExactMatrix::from_dense(&[vec![6]]);
        assert_eq!(rank_over_field(&six, CoefficientRing::Zp(2)).unwrap(), 0);
        assert_eq!(rank_over_field(&six, CoefficientRing::Zp(3)).unwrap(), 0);
        assert_eq!(rank_over_field(&six, CoefficientRing::Zp(5)).unwrap(), 1);
    }

    #[test]
    fn rank_routes_agree_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let rows = rng.gen_range(0..=6);
            let cols = rng.gen_range(0..=6);
            let data: Vec<Vec<i64>> = (0..rows)
                .map(|_| (0..cols).map(|_| rng.gen_range(-9..=9)).collect())
                .collect();
            let a = SparseExactMatrix::from_dense(&data);
            let factors = smith_normal_form(&a);
            let rank_q = rank_over_field(&a, CoefficientRing::Q).unwrap();
            assert_eq!(factors.len(), rank_q, "matrix {data:?}");
            for w in factors.windows(2) {
                assert!((&w[1] % &w[0]).is_zero(), "chain broken for {data:?}");
            }
            // Over a large prime not dividing any factor, ranks agree too.
            let p = 1_000_003;
            if factors.iter().all(|f| !(f % BigInt::from(p)).is_zero()) {
                assert_eq!(
                    rank_over_field(&a, CoefficientRing::Zp(p)).unwrap(),
                    rank_q,
                    "matrix {data:?}"
                );
            }
        }
    }

    #[test]
    fn homology_examples() {
        let ring = CoefficientRing::Z;
        let d_in = SparseExactMatrix::new(5, 0);
        let d_out = SparseExactMatrix::new(0, 5);
        assert_eq!(
            homology_of_pair(&d_in, &d_out, ring).unwrap(),
            AbelianGroup::free(5)
        );

        let double = SparseExactMatrix::from_dense(&[vec![2]]);
        let to_zero = SparseExactMatrix::new(0, 1);
        let h = homology_of_pair(&double, &to_zero, ring).unwrap();
        assert_eq!(h.free_rank(), 0);
        assert_eq!(h.torsion(), &[BigInt::from(2)]);

        assert!(homology_of_pair(&double, &to_zero, CoefficientRing::Q)
            .unwrap()
            .is_trivial());
        let h2 = homology_of_pair(&double, &to_zero, CoefficientRing::Zp(2)).unwrap();
        assert_eq!(h2.free_rank(), 1);
        assert!(h2.torsion().is_empty());
    }

    #[test]
    fn homology_rejects_nonzero_composition() {
        let id = SparseExactMatrix::identity(1);
        assert!(matches!(
            homology_of_pair(&id, &id, CoefficientRing::Z),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn homology_rejects_dimension_mismatch() {
        let a = SparseExactMatrix::new(3, 2);
        let b = SparseExactMatrix::new(2, 2);
        assert!(homology_of_pair(&a, &b, CoefficientRing::Z).is_err());
    }

    #[test]
    fn matrix_basics() {
        let m = SparseExactMatrix::from_triplets(
            2,
            2,
            [
                (0, 0, BigInt::from(1)),
                (0, 0, BigInt::from(-1)),
                (1, 1, BigInt::from(3)),
                (1, 0, BigInt::from(0)),
            ],
        )
        .unwrap();
        assert_eq!(m.nnz(), 1); // 1 + (−1) cancels, explicit zero dropped
        assert_eq!(m.get(1, 1), BigInt::from(3));
        assert!(SparseExactMatrix::from_triplets(1, 1, [(1, 0, BigInt::one())]).is_err());

        let a = SparseExactMatrix::from_dense(&[vec![1, 2], vec![3, 4]]);
        let b = SparseExactMatrix::from_dense(&[vec![0, 1], vec![1, 0]]);
        let ab = a.multiply(&b).unwrap();
        assert_eq!(ab, SparseExactMatrix::from_dense(&[vec![2, 1], vec![4, 3]]));
        assert!(a.multiply(&SparseExactMatrix::new(3, 3)).is_err());

        assert_eq!(a.to_triplet_text(), "2 2\n0 0 1\n0 1 2\n1 0 3\n1 1 4\n");
        assert!(SparseExactMatrix::new(4, 4).is_zero());
    }

    #[test]
    fn unit_sweep_handles_parked_columns() {
        // Both columns tie at two entries, so [2,3]ᵗ is processed first and
        // parks; the [1,1]ᵗ pivot then exposes its unit on the second pass.
        assert_eq!(snf_i64(&[vec![2, 1], vec![3, 1]]), vec![1, 1]);
        // No unit entries at all: everything lands in the core.
        assert_eq!(snf_i64(&[vec![2, 0], vec![0, 2]]), vec![2, 2]);
        assert_eq!(
            rank_over_field(
                &SparseExactMatrix::from_dense(&[vec![2, 0], vec![0, 2]]),
                CoefficientRing::Q
            )
            .unwrap(),
            2
        );
    }

    #[test]
    fn composition_zero_check() {
        let a = SparseExactMatrix::from_dense(&[vec![1, 1]]);
        let b = SparseExactMatrix::from_dense(&[vec![1], vec![-1]]);
        assert!(composition_is_zero(&a, &b).unwrap());
        let c = SparseExactMatrix::from_dense(&[vec![1], vec![1]]);
        assert!(!composition_is_zero(&a, &c).unwrap());
        assert!(composition_is_zero(&a, &a).is_err());

        // Entries beyond i64 take the product fallback.
        let huge: BigInt = BigInt::one() << 80;
        let wide =
            SparseExactMatrix::from_triplets(1, 2, [(0, 0, huge.clone()), (0, 1, -huge.clone())])
                .unwrap();
        assert!(composition_is_zero(&wide, &c).unwrap());
        let tall = SparseExactMatrix::from_triplets(2, 1, [(0, 0, huge)]).unwrap();
        assert!(!composition_is_zero(&a, &tall).unwrap());
    }

    #[test]
    fn composition_check_agrees_with_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..200 {
            let m = rng.gen_range(1..=5);
            let k = rng.gen_range(1..=5);
            let n = rng.gen_range(1..=5);
            let sample = |rng: &mut ChaCha8Rng, rows: usize, cols: usize| {
                SparseExactMatrix::from_dense(
                    &(0..rows)
                        .map(|_| (0..cols).map(|_| rng.gen_range(-2..=2)).collect())
                        .collect::<Vec<_>>(),
                )
            };
            let a = sample(&mut rng, m, k);
            let b = sample(&mut rng, k, n);
            assert_eq!(
                composition_is_zero(&a, &b).unwrap(),
                a.multiply(&b).unwrap().is_zero()
            );
        }
    }

    #[test]
    fn snf_agrees_with_determinant_on_square_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.gen_range(1..=4);
            let data: Vec<Vec<i64>> = (0..n)
                .map(|_| (0..n).map(|_| rng.gen_range(-5..=5)).collect())
                .collect();
            let det = dense_det(&data).abs();
            let factors = smith_normal_form(&SparseExactMatrix::from_dense(&data));
            let product = factors.iter().fold(BigInt::one(), |acc, f| acc * f);
            if det > BigInt::zero() {
                assert_eq!(product, det, "matrix {data:?}");
            } else {
                assert!(factors.len() < n, "matrix {data:?}");
            }
        }
    }

    fn dense_det(data: &[Vec<i64>]) -> BigInt {
        let n = data.len();
        if n == 1 {
            return BigInt::from(data[0][0]);
        }
        let mut det = BigInt::zero();
        for (j, &top) in data[0].iter().enumerate() {
            if top == 0 {
                continue;
            }
            let minor: Vec<Vec<i64>> = data[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|&(k, _)| k != j)
                        .map(|(_, &v)| v)
                        .collect()
                })
                .collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            det += BigInt::from(sign * top) * dense_det(&minor);
        }
        det
    }
}
