use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::uf::UnionFind;

pub type ArcId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn is_positive(self) -> bool {
        self == Sign::Positive
    }

    pub fn value(self) -> i64 {
        match self {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }
}

/// A crossing in oriented PD convention. `arcs = [a, b, c, d]` lists the four
/// incident arc labels counterclockwise, starting from the incoming
/// under-strand `a`, so the under-strand runs `a -> c`. The over-strand runs
/// `d -> b` at a positive crossing and `b -> d` at a negative one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Crossing {
    pub arcs: [ArcId; 4],
    pub sign: Sign,
}

impl Crossing {
    pub fn under_in(&self) -> ArcId {
        self.arcs[0]
    }

    pub fn under_out(&self) -> ArcId {
        self.arcs[2]
    }

    pub fn over_in(&self) -> ArcId {
        if self.sign.is_positive() {
            self.arcs[3]
        } else {
            self.arcs[1]
        }
    }

    pub fn over_out(&self) -> ArcId {
        if self.sign.is_positive() {
            self.arcs[1]
        } else {
            self.arcs[3]
        }
    }

    /// Marker of the orientation-preserving (Seifert) smoothing.
    pub fn oriented_marker(&self) -> u8 {
        if self.sign.is_positive() {
            0
        } else {
            1
        }
    }

    /// Arc pairs joined by a smoothing: a 0-marker joins (a,b) and (c,d),
    /// a 1-marker joins (a,d) and (b,c).
    pub fn joins(&self, marker: u8) -> [(ArcId, ArcId); 2] {
        let [a, b, c, d] = self.arcs;
        if marker == 0 {
            [(a, b), (c, d)]
        } else {
            [(a, d), (b, c)]
        }
    }

    fn switched(&self) -> Crossing {
        let [a, b, c, d] = self.arcs;
        let arcs = match self.sign {
            Sign::Positive => [d, a, b, c],
            Sign::Negative => [b, c, d, a],
        };
        Crossing {
            arcs,
            sign: self.sign.flipped(),
        }
    }
}

/// A braid word on `strands` strands; letter `i` stands for the Artin
/// generator σᵢ and `-i` for its inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BraidWord {
    strands: u32,
    letters: Vec<i32>,
}

impl BraidWord {
    pub fn new(strands: u32, letters: Vec<i32>) -> Result<Self> {
        if strands == 0 {
            return Err(Error::Precondition(
                "braid needs at least one strand".into(),
            ));
        }
        for &l in &letters {
            if l == 0 || l.unsigned_abs() > strands - 1 {
                return Err(Error::Precondition(format!(
                    "braid letter {l} out of range for {strands} strands"
                )));
            }
        }
        Ok(Self { strands, letters })
    }

    /// Parses "braid <strands>: a1 a2 ... ak" (the leading "braid" is optional).
    pub fn parse(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace().peekable();
        if tokens.peek() == Some(&"braid") {
            tokens.next();
        }
        let head = tokens
            .next()
            .ok_or_else(|| Error::Parse("empty braid input".into()))?;
        let strands = head
            .strip_suffix(':')
            .and_then(|s| s.parse::<u32>().ok())
            .ok_or_else(|| Error::Parse(format!("expected '<strands>:', got '{head}'")))?;
        let letters = tokens
            .map(|t| {
                t.parse::<i32>()
                    .map_err(|_| Error::Parse(format!("bad braid letter '{t}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(strands, letters)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("braid {}:", self.strands);
        for l in &self.letters {
            s.push(' ');
            s.push_str(&l.to_string());
        }
        s
    }

    pub fn strands(&self) -> u32 {
        self.strands
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn exponent_sum(&self) -> i64 {
        self.letters.iter().map(|&l| l.signum() as i64).sum()
    }

    pub fn negative_count(&self) -> usize {
        self.letters.iter().filter(|&&l| l < 0).count()
    }

    /// Appends |count| copies of σ_index^{sign(count)}.
    pub fn insert_twists(&self, index: u32, count: i64) -> Result<Self> {
        if index == 0 || index > self.strands - 1 {
            return Err(Error::Precondition(format!(
                "twist position {index} out of range for {} strands",
                self.strands
            )));
        }
        let letter = if count >= 0 {
            index as i32
        } else {
            -(index as i32)
        };
        let mut letters = self.letters.clone();
        letters.extend(std::iter::repeat_n(letter, count.unsigned_abs() as usize));
        Ok(Self {
            strands: self.strands,
            letters,
        })
    }

    /// Permutation of strand positions induced by the word (0-based, top to bottom).
    pub fn permutation(&self) -> Vec<usize> {
        let mut perm: Vec<usize> = (0..self.strands as usize).collect();
        for &l in &self.letters {
            let i = l.unsigned_abs() as usize - 1;
            perm.swap(i, i + 1);
        }
        perm
    }

    /// Number of components of the braid closure.
    pub fn closure_components(&self) -> usize {
        let perm = self.permutation();
        let mut seen = vec![false; perm.len()];
        let mut cycles = 0;
        for start in 0..perm.len() {
            if seen[start] {
                continue;
            }
            cycles += 1;
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                j = perm[j];
            }
        }
        cycles
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reorient {
    /// Fail unless the smoothing preserves every component's orientation.
    PreserveAll,
    /// Keep orientations of components not passing through the smoothed
    /// crossing; reorient the involved strands as needed.
    PreserveUninvolved,
}

/// An oriented link diagram: an ordered crossing list plus a number of
/// crossingless loop components. Arc labels increase cyclically along each
/// component in the orientation direction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkDiagram {
    crossings: Vec<Crossing>,
    closed_loops: u32,
    components: Vec<Vec<ArcId>>,
}

fn trace_components(crossings: &[Crossing]) -> Result<Vec<Vec<ArcId>>> {
    let mut succ: BTreeMap<ArcId, ArcId> = BTreeMap::new();
    let mut out_degree: BTreeMap<ArcId, u32> = BTreeMap::new();
    for x in crossings {
        for (arc_in, arc_out) in [(x.under_in(), x.under_out()), (x.over_in(), x.over_out())] {
            if succ.insert(arc_in, arc_out).is_some() {
                return Err(Error::Precondition(format!(
                    "arc {arc_in} flows into more than one crossing slot"
                )));
            }
            *out_degree.entry(arc_out).or_insert(0) += 1;
        }
    }
    for (&arc, &deg) in &out_degree {
        if deg != 1 || !succ.contains_key(&arc) {
            return Err(Error::Precondition(format!(
                "arc {arc} does not have exactly one incoming and one outgoing end"
            )));
        }
    }
    for &arc in succ.keys() {
        if out_degree.get(&arc) != Some(&1) {
            return Err(Error::Precondition(format!(
                "arc {arc} does not have exactly one incoming and one outgoing end"
            )));
        }
    }

    let mut components = Vec::new();
    let mut visited = std::collections::BTreeSet::new();
    for &start in succ.keys() {
        if visited.contains(&start) {
            continue;
        }
        let mut comp = Vec::new();
        let mut cur = start;
        loop {
            comp.push(cur);
            visited.insert(cur);
            cur = succ[&cur];
            if cur == start {
                break;
            }
        }
        components.push(comp);
    }
    Ok(components)
}

impl LinkDiagram {
    pub fn from_parts(crossings: Vec<Crossing>, closed_loops: u32) -> Result<Self> {
        let components = trace_components(&crossings)?;
        Ok(Self {
            crossings,
            closed_loops,
            components,
        })
    }

    pub fn empty() -> Self {
        Self {
            crossings: Vec::new(),
            closed_loops: 0,
            components: Vec::new(),
        }
    }

    pub fn unknot() -> Self {
        Self {
            crossings: Vec::new(),
            closed_loops: 1,
            components: Vec::new(),
        }
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn n_plus(&self) -> usize {
        self.crossings
            .iter()
            .filter(|x| x.sign.is_positive())
            .count()
    }

    pub fn n_minus(&self) -> usize {
        self.crossings.len() - self.n_plus()
    }

    pub fn writhe(&self) -> i64 {
        self.crossings.iter().map(|x| x.sign.value()).sum()
    }

    pub fn is_positive(&self) -> bool {
        self.n_minus() == 0
    }

    pub fn is_empty(&self) -> bool {
        self.crossings.is_empty() && self.closed_loops == 0
    }

    pub fn closed_loops(&self) -> u32 {
        self.closed_loops
    }

    /// Components traced through crossings, each listed in orientation order
    /// starting from its smallest arc; crossingless loops are not included.
    pub fn components(&self) -> &[Vec<ArcId>] {
        &self.components
    }

    pub fn component_count(&self) -> usize {
        self.components.len() + self.closed_loops as usize
    }

    /// All arc labels, sorted.
    pub fn arcs(&self) -> Vec<ArcId> {
        let mut arcs: Vec<ArcId> = self.components.iter().flatten().copied().collect();
        arcs.sort_unstable();
        arcs
    }

    /// Relabels arcs 1..N: components ordered by their smallest old label,
    /// labels consecutive along each component's orientation.
    pub fn relabel_canonical(&self) -> Self {
        let mut map = BTreeMap::new();
        let mut next: ArcId = 1;
        for comp in &self.components {
            for &arc in comp {
                map.insert(arc, next);
                next += 1;
            }
        }
        let crossings = self
            .crossings
            .iter()
            .map(|x| Crossing {
                arcs: x.arcs.map(|a| map[&a]),
                sign: x.sign,
            })
            .collect();
        let components = self
            .components
            .iter()
            .map(|comp| comp.iter().map(|a| map[a]).collect())
            .collect();
        Self {
            crossings,
            closed_loops: self.closed_loops,
            components,
        }
    }

    /// Canonical representative: canonical labels with crossings sorted, for
    /// use as a memo key. Not orientation-order preserving for the crossing
    /// list, so the cube complex of the result may differ by sign conventions.
    pub fn canonical_key(&self) -> String {
        let canon = self.relabel_canonical();
        let mut tuples: Vec<[ArcId; 4]> = canon.crossings.iter().map(|x| x.arcs).collect();
        tuples.sort_unstable();
        let mut s = format!("{};", canon.closed_loops);
        for t in tuples {
            s.push_str(&format!("({},{},{},{})", t[0], t[1], t[2], t[3]));
        }
        s
    }

    /// Diagram of the braid closure; strands are oriented downward and closed
    /// off to the right, untouched strands becoming crossingless loops.
    pub fn from_braid(b: &BraidWord) -> Self {
        let p = b.strands();
        let mut cur: Vec<ArcId> = (1..=p).collect();
        let mut touched = vec![false; p as usize];
        let mut next: ArcId = p + 1;
        let mut crossings = Vec::with_capacity(b.letters().len());
        for &letter in b.letters() {
            let i = letter.unsigned_abs() as usize;
            let (l, r) = (cur[i - 1], cur[i]);
            let (sw, se) = (next, next + 1);
            next += 2;
            let x = if letter > 0 {
                Crossing {
                    arcs: [l, sw, se, r],
                    sign: Sign::Positive,
                }
            } else {
                Crossing {
                    arcs: [r, l, sw, se],
                    sign: Sign::Negative,
                }
            };
            crossings.push(x);
            cur[i - 1] = sw;
            cur[i] = se;
            touched[i - 1] = true;
            touched[i] = true;
        }
        let mut close: BTreeMap<ArcId, ArcId> = BTreeMap::new();
        for j in 0..p {
            close.insert(cur[j as usize], j + 1);
        }
        for x in &mut crossings {
            x.arcs = x.arcs.map(|a| *close.get(&a).unwrap_or(&a));
        }
        let loops = touched.iter().filter(|&&t| !t).count() as u32;
        Self::from_parts(crossings, loops)
            .expect("braid closure is always a consistent diagram")
            .relabel_canonical()
    }

    /// Parses whitespace-separated tuples "X(a,b,c,d)", optionally preceded by
    /// a header "components: k" declaring the total component count (the
    /// excess over the traced components becomes crossingless loops). Crossing
    /// signs are inferred from the increasing-label convention.
    pub fn parse_pd(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace().peekable();
        let mut declared: Option<u32> = None;
        if tokens.peek() == Some(&"components:") {
            tokens.next();
            let k = tokens
                .next()
                .and_then(|t| t.parse::<u32>().ok())
                .ok_or_else(|| Error::Parse("expected a count after 'components:'".into()))?;
            declared = Some(k);
        }

        let mut tuples: Vec<[ArcId; 4]> = Vec::new();
        for tok in tokens {
            let inner = tok
                .strip_prefix("X(")
                .and_then(|s| s.strip_suffix(')'))
                .ok_or_else(|| Error::Parse(format!("malformed crossing '{tok}'")))?;
            let parts: Vec<&str> = inner.split(',').collect();
            if parts.len() != 4 {
                return Err(Error::Parse(format!("malformed crossing '{tok}'")));
            }
            let mut arcs = [0u32; 4];
            for (slot, part) in parts.iter().enumerate() {
                arcs[slot] =
                    part.parse::<u32>().ok().filter(|&a| a > 0).ok_or_else(|| {
                        Error::Parse(format!("bad arc label '{part}' in '{tok}'"))
                    })?;
            }
            tuples.push(arcs);
        }

        let mut usage: BTreeMap<ArcId, u32> = BTreeMap::new();
        for t in &tuples {
            for &a in t {
                *usage.entry(a).or_insert(0) += 1;
            }
        }
        for (&arc, &n) in &usage {
            if n != 2 {
                return Err(Error::Parse(format!(
                    "arc label {arc} used {n} times (expected 2)"
                )));
            }
        }

        let labels: Vec<ArcId> = usage.keys().copied().collect();
        let index: BTreeMap<ArcId, u32> = labels
            .iter()
            .enumerate()
            .map(|(i, &a)| (a, i as u32))
            .collect();
        let mut uf = UnionFind::new(labels.len());
        for t in &tuples {
            uf.union(index[&t[0]], index[&t[2]]);
            uf.union(index[&t[1]], index[&t[3]]);
        }
        let mut blocks: BTreeMap<u32, Vec<ArcId>> = BTreeMap::new();
        for &a in &labels {
            blocks.entry(uf.find(index[&a])).or_default().push(a);
        }
        let mut succ: BTreeMap<ArcId, ArcId> = BTreeMap::new();
        for block in blocks.values() {
            for (i, &a) in block.iter().enumerate() {
                succ.insert(a, block[(i + 1) % block.len()]);
            }
        }

        // Sign inference: the under-strand must run a -> c; the over-strand
        // runs d -> b (positive) or b -> d (negative). Kink shapes force the
        // sign outright; any remaining two-sided candidates (only possible in
        // 2-arc blocks) are settled by a positive-first search for a globally
        // consistent orientation (each arc once into and once out of a slot).
        let mut choices: Vec<Vec<Sign>> = Vec::with_capacity(tuples.len());
        for (i, t) in tuples.iter().enumerate() {
            let [a, b, c, d] = *t;
            let name = format!("crossing #{i} X({a},{b},{c},{d})");
            if a == c || b == d {
                return Err(Error::Parse(format!(
                    "{name}: a strand cannot enter and leave the crossing on the same arc"
                )));
            }
            if succ[&a] != c {
                return Err(Error::Parse(format!(
                    "{name}: under-strand must run from slot 1 to slot 3 with increasing labels"
                )));
            }
            let mut cands = Vec::new();
            if succ[&d] == b {
                cands.push(Sign::Positive);
            }
            if succ[&b] == d {
                cands.push(Sign::Negative);
            }
            if a == b || c == d {
                cands.retain(|s| s.is_positive());
            }
            if a == d || b == c {
                cands.retain(|s| !s.is_positive());
            }
            if cands.is_empty() {
                return Err(Error::Parse(format!(
                    "{name}: no crossing sign is compatible with the arc ordering"
                )));
            }
            choices.push(cands);
        }

        let signs = assign_signs(&tuples, &choices).ok_or_else(|| {
            Error::Parse("no globally consistent orientation for the given arc labels".into())
        })?;

        let crossings: Vec<Crossing> = tuples
            .iter()
            .zip(&signs)
            .map(|(&arcs, &sign)| Crossing { arcs, sign })
            .collect();
        let components = trace_components(&crossings)
            .map_err(|e| Error::Parse(format!("inconsistent diagram: {e}")))?;
        let traced = components.len() as u32;
        let closed_loops = match declared {
            None => 0,
            Some(k) if k >= traced => k - traced,
            Some(k) => {
                return Err(Error::Parse(format!(
                    "header declares {k} components but the crossings trace {traced}"
                )))
            }
        };
        Ok(Self {
            crossings,
            closed_loops,
            components,
        })
    }

    pub fn to_pd_text(&self) -> String {
        let mut s = format!("components: {}\n", self.component_count());
        if !self.crossings.is_empty() {
            let tuples: Vec<String> = self
                .crossings
                .iter()
                .map(|x| {
                    let [a, b, c, d] = x.arcs;
                    format!("X({a},{b},{c},{d})")
                })
                .collect();
            s.push_str(&tuples.join(" "));
            s.push('\n');
        }
        s
    }

    /// Switches over- and under-strand at every crossing; arc labels and
    /// orientations are unchanged, all signs flip.
    pub fn mirror(&self) -> Self {
        Self {
            crossings: self.crossings.iter().map(|x| x.switched()).collect(),
            closed_loops: self.closed_loops,
            components: self.components.clone(),
        }
    }

    /// Switches over- and under-strand at one crossing.
    pub fn switch_crossing(&self, c: usize) -> Result<Self> {
        if c >= self.crossings.len() {
            return Err(Error::Precondition(format!("no crossing #{c}")));
        }
        let mut crossings = self.crossings.clone();
        crossings[c] = crossings[c].switched();
        Ok(Self {
            crossings,
            closed_loops: self.closed_loops,
            components: self.components.clone(),
        })
    }

    pub fn disjoint_union(&self, other: &Self) -> Self {
        let offset = self.arcs().last().copied().unwrap_or(0);
        let mut crossings = self.crossings.clone();
        crossings.extend(other.crossings.iter().map(|x| Crossing {
            arcs: x.arcs.map(|a| a + offset),
            sign: x.sign,
        }));
        let mut components = self.components.clone();
        components.extend(
            other
                .components
                .iter()
                .map(|comp| comp.iter().map(|a| a + offset).collect::<Vec<_>>()),
        );
        Self {
            crossings,
            closed_loops: self.closed_loops + other.closed_loops,
            components,
        }
    }

    /// Replaces crossing `c` by its 0- or 1-smoothing. Strands meeting at the
    /// two new junctions are merged; components left without crossings become
    /// crossingless loops. With `PreserveUninvolved`, each component through
    /// the junctions is reoriented so that its smallest surviving arc keeps
    /// its original direction, and the remaining crossings' tuples and signs
    /// are rewritten accordingly.
    pub fn smooth(&self, c: usize, marker: u8, reorient: Reorient) -> Result<Self> {
        if c >= self.crossings.len() {
            return Err(Error::Precondition(format!("no crossing #{c}")));
        }
        if marker > 1 {
            return Err(Error::Precondition(format!(
                "marker must be 0 or 1, got {marker}"
            )));
        }
        let v = self.crossings[c];
        if reorient == Reorient::PreserveAll && marker != v.oriented_marker() {
            return Err(Error::Precondition(format!(
                "the {marker}-smoothing of crossing #{c} reverses strand orientation; \
                 use the preserve-uninvolved policy"
            )));
        }

        let arcs = self.arcs();
        let index: BTreeMap<ArcId, u32> = arcs
            .iter()
            .enumerate()
            .map(|(i, &a)| (a, i as u32))
            .collect();
        let n_arcs = arcs.len();

        // Arc ends: 2*arc for the tail (outgoing slot), 2*arc+1 for the head.
        // Every end has exactly one external partner: a strand passage at a
        // remaining crossing, or one of the two smoothing junctions.
        let tail = |a: ArcId| index[&a] * 2;
        let head = |a: ArcId| index[&a] * 2 + 1;
        let mut partner = vec![u32::MAX; 2 * n_arcs];
        let mut junction = vec![false; 2 * n_arcs];
        let mut link = |x: u32, y: u32| {
            partner[x as usize] = y;
            partner[y as usize] = x;
        };
        for (i, x) in self.crossings.iter().enumerate() {
            if i == c {
                continue;
            }
            link(head(x.under_in()), tail(x.under_out()));
            link(head(x.over_in()), tail(x.over_out()));
        }
        // Slot ends of the smoothed crossing: slots a and over-in are heads.
        let slot_end = |slot: usize| -> u32 {
            let arc = v.arcs[slot];
            let is_head = match slot {
                0 => true,
                2 => false,
                1 => !v.sign.is_positive(),
                _ => v.sign.is_positive(),
            };
            if is_head {
                head(arc)
            } else {
                tail(arc)
            }
        };
        let pairs: [(usize, usize); 2] = if marker == 0 {
            [(0, 1), (2, 3)]
        } else {
            [(0, 3), (1, 2)]
        };
        let mut merged = UnionFind::new(n_arcs);
        for (s1, s2) in pairs {
            let (e1, e2) = (slot_end(s1), slot_end(s2));
            link(e1, e2);
            junction[e1 as usize] = true;
            junction[e2 as usize] = true;
            merged.union(e1 / 2, e2 / 2);
        }

        // Trace the strands of the smoothed diagram, recording per arc whether
        // it is traversed against its original direction.
        let mut backward = vec![false; n_arcs];
        let mut visited = vec![false; n_arcs];
        let mut dead = vec![false; n_arcs];
        let mut new_loops = 0u32;
        for a0 in 0..n_arcs as u32 {
            if visited[a0 as usize] {
                continue;
            }
            let start = 2 * a0;
            let mut cycle = Vec::new();
            let mut any_passage = false;
            let mut end = start;
            loop {
                let arc = end / 2;
                visited[arc as usize] = true;
                backward[arc as usize] = end % 2 == 1;
                cycle.push(arc);
                let exit = arc * 2 + (end % 2 == 0) as u32;
                if !junction[exit as usize] {
                    any_passage = true;
                }
                let next = partner[exit as usize];
                if next == start {
                    break;
                }
                end = next;
            }
            if !any_passage {
                new_loops += 1;
                for &a in &cycle {
                    dead[a as usize] = true;
                }
            } else if cycle.iter().any(|&a| backward[a as usize]) {
                if reorient == Reorient::PreserveAll {
                    return Err(Error::Contract(
                        "orientation-preserving smoothing produced a reversed strand".into(),
                    ));
                }
                let min = *cycle.iter().min().unwrap();
                if !backward[min as usize] {
                    continue;
                }
                for &a in &cycle {
                    backward[a as usize] = !backward[a as usize];
                }
            }
        }

        let repr: Vec<ArcId> = {
            let mut min_label = vec![ArcId::MAX; n_arcs];
            for i in 0..n_arcs as u32 {
                let r = merged.find(i) as usize;
                min_label[r] = min_label[r].min(arcs[i as usize]);
            }
            (0..n_arcs as u32)
                .map(|i| min_label[merged.find(i) as usize])
                .collect()
        };

        let mut crossings = Vec::with_capacity(self.crossings.len() - 1);
        for (i, x) in self.crossings.iter().enumerate() {
            if i == c {
                continue;
            }
            let under_flip = backward[index[&x.under_in()] as usize];
            let over_flip = backward[index[&x.over_in()] as usize];
            let sign = if under_flip != over_flip {
                x.sign.flipped()
            } else {
                x.sign
            };
            let [a, b, cc, d] = x.arcs;
            let tuple = if under_flip {
                [cc, d, a, b]
            } else {
                [a, b, cc, d]
            };
            let arcs4 = tuple.map(|a| {
                debug_assert!(!dead[index[&a] as usize]);
                repr[index[&a] as usize]
            });
            crossings.push(Crossing { arcs: arcs4, sign });
        }

        let smoothed = Self::from_parts(crossings, self.closed_loops + new_loops)
            .map_err(|e| Error::Contract(format!("smoothing produced an invalid diagram: {e}")))?;
        Ok(smoothed.relabel_canonical())
    }
}

fn assign_signs(tuples: &[[ArcId; 4]], choices: &[Vec<Sign>]) -> Option<Vec<Sign>> {
    fn slots(t: &[ArcId; 4], sign: Sign) -> ([ArcId; 2], [ArcId; 2]) {
        let [a, b, c, d] = *t;
        match sign {
            Sign::Positive => ([a, d], [c, b]),
            Sign::Negative => ([a, b], [c, d]),
        }
    }
    fn rec(
        tuples: &[[ArcId; 4]],
        choices: &[Vec<Sign>],
        i: usize,
        in_use: &mut BTreeMap<ArcId, u32>,
        out_use: &mut BTreeMap<ArcId, u32>,
        signs: &mut Vec<Sign>,
    ) -> bool {
        if i == tuples.len() {
            return true;
        }
        for &sign in &choices[i] {
            let (ins, outs) = slots(&tuples[i], sign);
            let ok = ins.iter().all(|a| in_use.get(a).copied().unwrap_or(0) == 0)
                && outs
                    .iter()
                    .all(|a| out_use.get(a).copied().unwrap_or(0) == 0);
            if !ok {
                continue;
            }
            for a in ins {
                *in_use.entry(a).or_insert(0) += 1;
            }
            for a in outs {
                *out_use.entry(a).or_insert(0) += 1;
            }
            signs.push(sign);
            if rec(tuples, choices, i + 1, in_use, out_use, signs) {
                return true;
            }
            signs.pop();
            for a in ins {
                *in_use.get_mut(&a).unwrap() -= 1;
            }
            for a in outs {
                *out_use.get_mut(&a).unwrap() -= 1;
            }
        }
        false
    }
    let mut signs = Vec::with_capacity(tuples.len());
    if rec(
        tuples,
        choices,
        0,
        &mut BTreeMap::new(),
        &mut BTreeMap::new(),
        &mut signs,
    ) {
        Some(signs)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn braid(text: &str) -> LinkDiagram {
        LinkDiagram::from_braid(&BraidWord::parse(text).unwrap())
    }

    #[test]
    fn trefoil_from_braid() {
        let d = braid("2: 1 1 1");
        assert_eq!(d.crossing_count(), 3);
        assert_eq!(d.n_plus(), 3);
        assert_eq!(d.n_minus(), 0);
        assert_eq!(d.writhe(), 3);
        assert_eq!(d.component_count(), 1);
    }

    #[test]
    fn cancelling_pair_closes_to_a_two_component_unlink() {
        let d = braid("2: 1 -1");
        assert_eq!(d.crossing_count(), 2);
        assert_eq!(d.writhe(), 0);
        assert_eq!(d.component_count(), 2);
    }

    #[test]
    fn seventeen_letter_word_counts() {
        let b = BraidWord::parse("4: 2 1 3 2 2 1 3 2 2 1 3 2 -1 2 1 1 2").unwrap();
        let d = LinkDiagram::from_braid(&b);
        assert_eq!(d.crossing_count(), 17);
        assert_eq!(d.writhe(), 15);
        assert_eq!(d.n_minus(), 1);
        assert_eq!(d.component_count(), 1);
    }

    #[test]
    fn empty_braid_closes_to_loops() {
        let d = braid("3:");
        assert_eq!(d.crossing_count(), 0);
        assert_eq!(d.component_count(), 3);
        assert_eq!(d.closed_loops(), 3);
    }

    #[test]
    fn kink_shapes() {
        let pos = braid("2: 1");
        assert_eq!(pos.crossings()[0].arcs, [1, 1, 2, 2]);
        assert_eq!(pos.crossings()[0].sign, Sign::Positive);
        assert_eq!(pos.component_count(), 1);

        let neg = braid("2: -1");
        assert_eq!(neg.crossings()[0].arcs, [2, 1, 1, 2]);
        assert_eq!(neg.crossings()[0].sign, Sign::Negative);
    }

    #[test]
    fn mirror_is_letterwise_negation() {
        for text in ["2: 1 1 1", "3: 1 -2 1 -2", "4: 2 1 3 2 -1 2"] {
            let b = BraidWord::parse(text).unwrap();
            let neg: Vec<i32> = b.letters().iter().map(|&l| -l).collect();
            let nb = BraidWord::new(b.strands(), neg).unwrap();
            assert_eq!(
                LinkDiagram::from_braid(&b).mirror(),
                LinkDiagram::from_braid(&nb)
            );
        }
    }

    #[test]
    fn mirror_involution() {
        let d = braid("3: 1 -2 1 -2");
        assert_eq!(d.mirror().mirror(), d);
        assert_eq!(LinkDiagram::unknot().mirror(), LinkDiagram::unknot());
        let m = d.mirror();
        assert_eq!(m.n_plus(), d.n_minus());
        assert_eq!(m.writhe(), -d.writhe());
    }

    #[test]
    fn pd_round_trip() {
        for text in [
            "2: 1 1 1",
            "2: -1 -1",
            "2: 1 1",
            "3: 1 -2 1 -2",
            "2: 1 -1",
            "4: 2 1 3 2 -1 2 1 1 2",
            "3:",
            "2: 1",
            "2: -1",
        ] {
            let d = braid(text);
            let back = LinkDiagram::parse_pd(&d.to_pd_text()).unwrap();
            assert_eq!(back, d, "round trip failed for braid {text}");
        }
    }

    #[test]
    fn parse_pd_standard_trefoil_code() {
        let d = LinkDiagram::parse_pd("X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)").unwrap();
        assert_eq!(d.crossing_count(), 3);
        assert_eq!(d.writhe().abs(), 3);
        assert_eq!(d.component_count(), 1);
    }

    #[test]
    fn parse_pd_empty_and_headers() {
        assert!(LinkDiagram::parse_pd("").unwrap().is_empty());
        let unlink = LinkDiagram::parse_pd("components: 2").unwrap();
        assert_eq!(unlink.component_count(), 2);
        assert_eq!(unlink.crossing_count(), 0);
    }

    #[test]
    fn parse_pd_errors() {
        // arc used three times
        assert!(LinkDiagram::parse_pd("X(1,1,1,2)").is_err());
        // same arc entering and leaving the under-strand
        assert!(LinkDiagram::parse_pd("X(1,2,1,2)").is_err());
        // labels not increasing along the under-strand
        assert!(LinkDiagram::parse_pd("X(1,4,3,5) X(3,6,4,1) X(5,2,6,3)").is_err());
        // malformed tuple
        assert!(LinkDiagram::parse_pd("X(1,2,3)").is_err());
        assert!(LinkDiagram::parse_pd("Y(1,2,3,4)").is_err());
        // header smaller than the traced component count
        assert!(LinkDiagram::parse_pd("components: 0 X(1,1,2,2)").is_err());
    }

    #[test]
    fn parse_pd_settles_two_arc_component_signs() {
        // Every label block here has two arcs, so the increasing-label rule
        // alone allows either sign; the global orientation search settles them.
        let d = LinkDiagram::parse_pd("X(1,3,2,4) X(2,3,1,4)").unwrap();
        assert_eq!(d.component_count(), 2);
        assert_eq!(d.writhe(), 0);
        let signs: Vec<Sign> = d.crossings().iter().map(|x| x.sign).collect();
        assert_eq!(signs, vec![Sign::Positive, Sign::Negative]);
    }

    #[test]
    fn disjoint_union_adds() {
        let t = braid("2: 1 1 1");
        let both = t.disjoint_union(&t);
        assert_eq!(both.crossing_count(), 6);
        assert_eq!(both.writhe(), 6);
        assert_eq!(both.component_count(), 2);

        let with_unknot = t.disjoint_union(&LinkDiagram::unknot());
        assert_eq!(with_unknot.crossing_count(), 3);
        assert_eq!(with_unknot.component_count(), 2);
        assert_eq!(with_unknot.closed_loops(), 1);
    }

    #[test]
    fn seifert_smoothing_of_trefoil_gives_hopf() {
        let t = braid("2: 1 1 1");
        let h = t.smooth(0, 0, Reorient::PreserveAll).unwrap();
        assert_eq!(h.crossing_count(), 2);
        assert_eq!(h.writhe(), 2);
        assert_eq!(h.component_count(), 2);
        assert_eq!(h, braid("2: 1 1"));
    }

    #[test]
    fn preserve_all_rejects_disoriented_smoothing() {
        let t = braid("2: 1 1 1");
        assert!(t.smooth(0, 1, Reorient::PreserveAll).is_err());
        assert!(t.smooth(0, 1, Reorient::PreserveUninvolved).is_ok());
    }

    #[test]
    fn disoriented_smoothing_of_trefoil_is_an_unknot_diagram() {
        let t = braid("2: 1 1 1");
        let u = t.smooth(1, 1, Reorient::PreserveUninvolved).unwrap();
        assert_eq!(u.crossing_count(), 2);
        assert_eq!(u.component_count(), 1);
    }

    #[test]
    fn smoothing_kinks() {
        let kink = braid("2: 1");
        let s0 = kink.smooth(0, 0, Reorient::PreserveAll).unwrap();
        assert_eq!(s0.crossing_count(), 0);
        assert_eq!(s0.component_count(), 2); // the curl splits off as its own circle
        let s1 = kink.smooth(0, 1, Reorient::PreserveUninvolved).unwrap();
        assert_eq!(s1.component_count(), 1);
    }

    #[test]
    fn switch_crossing_flips_one_sign() {
        let t = braid("2: 1 1 1");
        let s = t.switch_crossing(1).unwrap();
        assert_eq!(s.writhe(), 1);
        assert_eq!(s.switch_crossing(1).unwrap(), t);
        let all: LinkDiagram = (0..3).fold(t.clone(), |d, i| d.switch_crossing(i).unwrap());
        assert_eq!(all, t.mirror());
    }

    #[test]
    fn insert_twists_appends() {
        let b = BraidWord::parse("2: 1 1 1").unwrap();
        assert_eq!(
            b.insert_twists(1, 2).unwrap(),
            BraidWord::parse("2: 1 1 1 1 1").unwrap()
        );
        assert_eq!(b.insert_twists(1, 0).unwrap(), b);
        assert_eq!(
            b.insert_twists(1, -2).unwrap().letters(),
            &[1, 1, 1, -1, -1]
        );
        assert!(b.insert_twists(2, 1).is_err());
    }

    #[test]
    fn braid_word_text_round_trip() {
        for text in ["braid 2: 1 1 1", "braid 4: 2 -1 3", "braid 3:"] {
            let b = BraidWord::parse(text).unwrap();
            assert_eq!(b.to_text(), text);
            assert_eq!(BraidWord::parse(&b.to_text()).unwrap(), b);
        }
        assert!(BraidWord::parse("2: 0").is_err());
        assert!(BraidWord::parse("2: 2").is_err());
        assert!(BraidWord::parse("x: 1").is_err());
    }

    #[test]
    fn closure_components_match_diagram() {
        for text in ["2: 1 1 1", "2: 1 1", "3: 1 -2 1 -2", "4: 2 1 3 2", "3:"] {
            let b = BraidWord::parse(text).unwrap();
            assert_eq!(
                b.closure_components(),
                LinkDiagram::from_braid(&b).component_count(),
                "braid {text}"
            );
        }
    }
}
