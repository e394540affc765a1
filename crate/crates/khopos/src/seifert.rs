use std::collections::BTreeMap;

use serde_json::json;

use crate::diagram::{ArcId, LinkDiagram};
use crate::error::{Error, Result};
use crate::uf::UnionFind;

/// States are stored as bit sets, so diagrams are capped at 63 crossings.
pub const MAX_STATE_CROSSINGS: usize = 63;

/// An assignment of a 0- or 1-marker to each crossing of a diagram.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State {
    bits: u64,
    len: u32,
}

impl State {
    pub fn zero(len: usize) -> Result<Self> {
        if len > MAX_STATE_CROSSINGS {
            return Err(Error::Budget(format!(
                "states support at most {MAX_STATE_CROSSINGS} crossings, got {len}"
            )));
        }
        Ok(Self {
            bits: 0,
            len: len as u32,
        })
    }

    pub fn from_markers(markers: &[u8]) -> Result<Self> {
        let mut s = Self::zero(markers.len())?;
        for (i, &m) in markers.iter().enumerate() {
            if m > 1 {
                return Err(Error::Precondition(format!(
                    "marker must be 0 or 1, got {m}"
                )));
            }
            s = s.with_marker(i, m);
        }
        Ok(s)
    }

    /// The state whose every marker gives the orientation-preserving smoothing.
    pub fn oriented(d: &LinkDiagram) -> Result<Self> {
        let mut s = Self::zero(d.crossing_count())?;
        for (i, x) in d.crossings().iter().enumerate() {
            s = s.with_marker(i, x.oriented_marker());
        }
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn marker(&self, i: usize) -> u8 {
        debug_assert!(i < self.len as usize);
        ((self.bits >> i) & 1) as u8
    }

    pub fn with_marker(&self, i: usize, m: u8) -> Self {
        debug_assert!(i < self.len as usize && m <= 1);
        let bits = (self.bits & !(1 << i)) | ((m as u64) << i);
        Self {
            bits,
            len: self.len,
        }
    }

    pub fn toggled(&self, i: usize) -> Self {
        self.with_marker(i, 1 - self.marker(i))
    }

    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    /// Number of 1-markers strictly below crossing index i.
    pub fn weight_below(&self, i: usize) -> u32 {
        debug_assert!(i < self.len as usize);
        (self.bits & ((1 << i) - 1)).count_ones()
    }

    pub fn markers(&self) -> Vec<u8> {
        (0..self.len as usize).map(|i| self.marker(i)).collect()
    }

    /// Sort key putting the first crossing's marker in the most significant
    /// position, so states order lexicographically as marker vectors.
    pub fn lex_key(&self) -> u64 {
        let mut key = 0u64;
        for i in 0..self.len as usize {
            key = (key << 1) | self.marker(i) as u64;
        }
        key
    }
}

/// The circles and chords obtained by smoothing every crossing of a diagram
/// according to a state. Circles are numbered by their smallest arc label;
/// crossingless loop components come after all arc-bearing circles.
#[derive(Clone, Debug)]
pub struct Resolution {
    circle_count: u32,
    arc_circle_count: u32,
    arcs: Vec<ArcId>,
    circle_of: Vec<u32>,
    min_arc: Vec<ArcId>,
    chords: Vec<(u32, u32, u8)>,
}

impl Resolution {
    pub fn circle_count(&self) -> u32 {
        self.circle_count
    }

    pub fn arc_circle_count(&self) -> u32 {
        self.arc_circle_count
    }

    /// Chords in crossing order: the two circle ids joined (min first) and the marker.
    pub fn chords(&self) -> &[(u32, u32, u8)] {
        &self.chords
    }

    pub fn circle_containing(&self, arc: ArcId) -> Option<u32> {
        self.arcs
            .binary_search(&arc)
            .ok()
            .map(|i| self.circle_of[i])
    }

    /// Smallest arc label on each arc-bearing circle.
    pub fn min_arcs(&self) -> &[ArcId] {
        &self.min_arc
    }
}

fn resolve_with(d: &LinkDiagram, marker_of: impl Fn(usize) -> u8) -> Resolution {
    let arcs = d.arcs();
    let index: BTreeMap<ArcId, u32> = arcs
        .iter()
        .enumerate()
        .map(|(i, &a)| (a, i as u32))
        .collect();
    let mut uf = UnionFind::new(arcs.len());
    for (i, x) in d.crossings().iter().enumerate() {
        for (p, q) in x.joins(marker_of(i)) {
            uf.union(index[&p], index[&q]);
        }
    }
    let mut circle_of = vec![0u32; arcs.len()];
    let mut root_circle: BTreeMap<u32, u32> = BTreeMap::new();
    let mut min_arc = Vec::new();
    for (i, &a) in arcs.iter().enumerate() {
        let root = uf.find(i as u32);
        let id = *root_circle.entry(root).or_insert_with(|| {
            min_arc.push(a);
            (min_arc.len() - 1) as u32
        });
        circle_of[i] = id;
    }
    let chords = d
        .crossings()
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let m = marker_of(i);
            let [a, b, c, _] = x.arcs;
            let u = circle_of[index[&a] as usize];
            let v = circle_of[index[&if m == 0 { c } else { b }] as usize];
            (u.min(v), u.max(v), m)
        })
        .collect();
    let arc_circle_count = min_arc.len() as u32;
    Resolution {
        circle_count: arc_circle_count + d.closed_loops(),
        arc_circle_count,
        arcs,
        circle_of,
        min_arc,
        chords,
    }
}

pub fn resolve(d: &LinkDiagram, s: &State) -> Result<Resolution> {
    if s.len() != d.crossing_count() {
        return Err(Error::Precondition(format!(
            "state has {} markers but the diagram has {} crossings",
            s.len(),
            d.crossing_count()
        )));
    }
    Ok(resolve_with(d, |i| s.marker(i)))
}

/// An undirected multigraph; loops and parallel edges are permitted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiGraph {
    vertex_count: u32,
    edges: Vec<(u32, u32)>,
}

impl MultiGraph {
    pub fn new(vertex_count: u32, edges: Vec<(u32, u32)>) -> Result<Self> {
        let mut edges: Vec<(u32, u32)> = edges
            .into_iter()
            .map(|(u, v)| (u.min(v), u.max(v)))
            .collect();
        for &(_, v) in &edges {
            if v >= vertex_count {
                return Err(Error::Precondition(format!(
                    "edge endpoint {v} out of range for {vertex_count} vertices"
                )));
            }
        }
        edges.sort_unstable();
        Ok(Self {
            vertex_count,
            edges,
        })
    }

    pub fn vertex_count(&self) -> u32 {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as (min, max) pairs in lexicographic order; parallel edges repeat.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn component_count(&self) -> u32 {
        let mut uf = UnionFind::new(self.vertex_count as usize);
        for &(u, v) in &self.edges {
            uf.union(u, v);
        }
        uf.class_count() as u32
    }

    /// e − v + k: the number of independent cycles.
    pub fn cyclomatic(&self) -> u32 {
        (self.edges.len() as i64 + self.component_count() as i64 - self.vertex_count as i64) as u32
    }

    pub fn has_loop(&self) -> bool {
        self.edges.iter().any(|&(u, v)| u == v)
    }

    /// Cycle-free check by explicit search, independent of `cyclomatic`.
    pub fn is_forest(&self) -> bool {
        let n = self.vertex_count as usize;
        let mut adj: Vec<Vec<(u32, usize)>> = vec![Vec::new(); n];
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            adj[u as usize].push((v, e));
            adj[v as usize].push((u, e));
        }
        let mut visited = vec![false; n];
        for start in 0..n {
            if visited[start] {
                continue;
            }
            visited[start] = true;
            let mut stack = vec![(start as u32, usize::MAX)];
            while let Some((u, via)) = stack.pop() {
                for &(v, e) in &adj[u as usize] {
                    if e == via {
                        continue;
                    }
                    if visited[v as usize] {
                        return false;
                    }
                    visited[v as usize] = true;
                    stack.push((v, e));
                }
            }
        }
        true
    }

    pub fn is_tree(&self) -> bool {
        self.is_forest() && self.component_count() <= 1
    }

    pub fn is_bipartite(&self) -> bool {
        let n = self.vertex_count as usize;
        let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
        for &(u, v) in &self.edges {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        let mut color = vec![u8::MAX; n];
        for start in 0..n {
            if color[start] != u8::MAX {
                continue;
            }
            color[start] = 0;
            let mut queue = std::collections::VecDeque::from([start as u32]);
            while let Some(u) = queue.pop_front() {
                for &v in &adj[u as usize] {
                    if color[v as usize] == u8::MAX {
                        color[v as usize] = 1 - color[u as usize];
                        queue.push_back(v);
                    } else if color[v as usize] == color[u as usize] {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Identifies parallel edges (and parallel loops) leaving one of each.
    pub fn reduce(&self) -> MultiGraph {
        let mut edges = self.edges.clone();
        edges.dedup();
        MultiGraph {
            vertex_count: self.vertex_count,
            edges,
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("v {}\n", self.vertex_count);
        for (&(u, v), mult) in &self.multiplicities() {
            if *mult > 1 {
                s.push_str(&format!("e {u} {v} {mult}\n"));
            } else {
                s.push_str(&format!("e {u} {v}\n"));
            }
        }
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        let edges: Vec<serde_json::Value> = self
            .multiplicities()
            .iter()
            .map(|(&(u, v), &mult)| json!([u, v, mult]))
            .collect();
        json!({ "vertices": self.vertex_count, "edges": edges })
    }

    fn multiplicities(&self) -> BTreeMap<(u32, u32), usize> {
        let mut m = BTreeMap::new();
        for &e in &self.edges {
            *m.entry(e).or_insert(0) += 1;
        }
        m
    }
}

fn graph_of(res: &Resolution) -> MultiGraph {
    let edges = res.chords.iter().map(|&(u, v, _)| (u, v)).collect();
    MultiGraph::new(res.circle_count, edges).expect("chord endpoints are valid circle ids")
}

pub fn state_graph(d: &LinkDiagram, s: &State) -> Result<MultiGraph> {
    Ok(graph_of(&resolve(d, s)?))
}

/// Resolution of the orientation-preserving smoothing at every crossing.
pub fn oriented_resolution(d: &LinkDiagram) -> Resolution {
    resolve_with(d, |i| d.crossings()[i].oriented_marker())
}

/// State graph of the orientation-preserving smoothing at every crossing.
pub fn seifert_graph(d: &LinkDiagram) -> MultiGraph {
    graph_of(&oriented_resolution(d))
}

fn require_positive(d: &LinkDiagram, what: &str) -> Result<MultiGraph> {
    if !d.is_positive() {
        return Err(Error::Precondition(format!(
            "{what} requires a positive diagram, found {} negative crossings",
            d.n_minus()
        )));
    }
    let g = seifert_graph(d);
    if g.has_loop() {
        return Err(Error::Contract(
            "Seifert graph of a consistently oriented diagram cannot contain a loop".into(),
        ));
    }
    Ok(g)
}

/// Cyclomatic number of the reduced Seifert graph of a positive diagram.
pub fn p1(d: &LinkDiagram) -> Result<u32> {
    Ok(require_positive(d, "p1")?.reduce().cyclomatic())
}

/// A positive diagram represents a fibered link exactly when its reduced
/// Seifert graph is a forest.
pub fn is_fibered(d: &LinkDiagram) -> Result<bool> {
    Ok(require_positive(d, "fiberedness")?.reduce().is_forest())
}

/// |Seifert circles| − |crossings|: the Euler characteristic of the surface
/// built from the oriented resolution. Equals χ of the link when the diagram
/// is positive.
pub fn euler_char(d: &LinkDiagram) -> Result<i64> {
    if d.is_empty() {
        return Err(Error::Precondition(
            "the empty diagram has no Euler characteristic".into(),
        ));
    }
    let split_loops = d.closed_loops() > 0 && d.component_count() > 1;
    if split_loops || !crossing_connected(d) {
        return Err(Error::Precondition(
            "Euler characteristic requires a connected diagram".into(),
        ));
    }
    let circles = oriented_resolution(d).circle_count() as i64;
    Ok(circles - d.crossing_count() as i64)
}

fn crossing_connected(d: &LinkDiagram) -> bool {
    let comps = d.components();
    if comps.len() <= 1 {
        return true;
    }
    let mut comp_of: BTreeMap<ArcId, u32> = BTreeMap::new();
    for (i, comp) in comps.iter().enumerate() {
        for &a in comp {
            comp_of.insert(a, i as u32);
        }
    }
    let mut uf = UnionFind::new(comps.len());
    for x in d.crossings() {
        uf.union(comp_of[&x.under_in()], comp_of[&x.over_in()]);
    }
    uf.class_count() == 1
}

/// A reduced positive diagram of a fibered positive knot satisfies
/// 4·genus ≥ crossing count; false obstructs positivity.
pub fn fibered_positive_bound(genus: u32, crossings: u32) -> bool {
    4 * genus as u64 >= crossings as u64
}
