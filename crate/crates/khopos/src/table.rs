use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::{AbelianGroup, CoefficientRing};

/// The range of homological gradings a table certifies. Gradings outside a
/// `Range` window are unknown, not zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Window {
    Full,
    Range(i64, i64),
}

impl Window {
    pub fn contains(&self, i: i64) -> bool {
        match *self {
            Window::Full => true,
            Window::Range(lo, hi) => lo <= i && i <= hi,
        }
    }
}

/// A bigraded table of homology groups indexed by (i, j). Absent entries
/// inside the window are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KhTable {
    ring: CoefficientRing,
    window: Window,
    groups: BTreeMap<(i64, i64), AbelianGroup>,
}

impl KhTable {
    pub fn new(ring: CoefficientRing, window: Window) -> Self {
        Self {
            ring,
            window,
            groups: BTreeMap::new(),
        }
    }

    pub fn ring(&self) -> CoefficientRing {
        self.ring
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn insert(&mut self, i: i64, j: i64, group: AbelianGroup) {
        debug_assert!(self.window.contains(i));
        if !group.is_trivial() {
            self.groups.insert((i, j), group);
        }
    }

    pub fn groups(&self) -> &BTreeMap<(i64, i64), AbelianGroup> {
        &self.groups
    }

    /// The group at (i, j), or None when the grading lies outside the window.
    pub fn query(&self, i: i64, j: i64) -> Option<AbelianGroup> {
        if !self.window.contains(i) {
            return None;
        }
        Some(
            self.groups
                .get(&(i, j))
                .cloned()
                .unwrap_or_else(AbelianGroup::trivial),
        )
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// Total free rank at homological grading i across all j.
    pub fn rank_at_height(&self, i: i64) -> usize {
        self.groups
            .iter()
            .filter(|(&(gi, _), _)| gi == i)
            .map(|(_, g)| g.free_rank())
            .sum()
    }

    pub fn to_json(&self) -> Value {
        let window = match self.window {
            Window::Full => json!("full"),
            Window::Range(lo, hi) => json!([lo, hi]),
        };
        let groups: Vec<Value> = self
            .groups
            .iter()
            .map(|(&(i, j), g)| {
                let torsion: Vec<Value> = g.torsion().iter().map(torsion_value).collect();
                json!({"i": i, "j": j, "rank": g.free_rank(), "torsion": torsion})
            })
            .collect();
        json!({"ring": self.ring.label(), "window": window, "groups": groups})
    }

    pub fn to_json_text(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("table serializes")
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let bad = |msg: &str| Error::Parse(format!("table json: {msg}"));
        let ring =
            CoefficientRing::parse(value["ring"].as_str().ok_or_else(|| bad("missing ring"))?)?;
        let window = match &value["window"] {
            Value::String(s) if s == "full" => Window::Full,
            Value::Array(a) if a.len() == 2 => {
                let lo = a[0].as_i64().ok_or_else(|| bad("window bound"))?;
                let hi = a[1].as_i64().ok_or_else(|| bad("window bound"))?;
                Window::Range(lo, hi)
            }
            _ => return Err(bad("window must be \"full\" or [lo, hi]")),
        };
        let mut table = Self::new(ring, window);
        let groups = value["groups"]
            .as_array()
            .ok_or_else(|| bad("missing groups"))?;
        for g in groups {
            let i = g["i"].as_i64().ok_or_else(|| bad("group i"))?;
            let j = g["j"].as_i64().ok_or_else(|| bad("group j"))?;
            let rank = g["rank"].as_u64().ok_or_else(|| bad("group rank"))? as usize;
            let torsion = g["torsion"]
                .as_array()
                .ok_or_else(|| bad("group torsion"))?
                .iter()
                .map(|t| match t {
                    Value::Number(n) => n
                        .as_u64()
                        .map(BigInt::from)
                        .ok_or_else(|| bad("torsion entry")),
                    Value::String(s) => s.parse::<BigInt>().map_err(|_| bad("torsion entry")),
                    _ => Err(bad("torsion entry")),
                })
                .collect::<Result<Vec<_>>>()?;
            if !window.contains(i) {
                return Err(bad("group outside window"));
            }
            table.insert(i, j, AbelianGroup::new(rank, torsion)?);
        }
        Ok(table)
    }

    pub fn from_json_text(text: &str) -> Result<Self> {
        Self::from_json(&serde_json::from_str(text)?)
    }

    /// Plain-text grid, j decreasing down the rows, i increasing across the
    /// columns. Zero groups inside the window print as "."; columns just
    /// outside a range window print as "?".
    pub fn to_grid_text(&self) -> String {
        if self.groups.is_empty() {
            return "(no nonzero groups)\n".into();
        }
        let is: Vec<i64> = {
            let lo = self.groups.keys().map(|&(i, _)| i).min().unwrap();
            let hi = self.groups.keys().map(|&(i, _)| i).max().unwrap();
            match self.window {
                Window::Full => (lo..=hi).collect(),
                Window::Range(wlo, whi) => (wlo - 1..=whi + 1).collect(),
            }
        };
        let js: Vec<i64> = {
            let lo = self.groups.keys().map(|&(_, j)| j).min().unwrap();
            let hi = self.groups.keys().map(|&(_, j)| j).max().unwrap();
            let step = if self
                .groups
                .keys()
                .all(|&(_, j)| (j - lo).rem_euclid(2) == 0)
            {
                2
            } else {
                1
            };
            let mut js: Vec<i64> = (lo..=hi).step_by(step as usize).collect();
            js.reverse();
            js
        };
        let cell = |i: i64, j: i64| -> String {
            match self.query(i, j) {
                None => "?".into(),
                Some(g) if g.is_trivial() => ".".into(),
                Some(g) => g.to_text(),
            }
        };
        let mut col_width: Vec<usize> = is.iter().map(|&i| format!("i={i}").len()).collect();
        for (ci, &i) in is.iter().enumerate() {
            for &j in &js {
                col_width[ci] = col_width[ci].max(cell(i, j).len());
            }
        }
        let row_head: Vec<String> = js.iter().map(|j| format!("j={j}")).collect();
        let head_width = row_head.iter().map(|h| h.len()).max().unwrap_or(0);
        let mut out = String::new();
        out.push_str(&" ".repeat(head_width));
        for (ci, &i) in is.iter().enumerate() {
            out.push_str("  ");
            out.push_str(&format!(
                "{:<width$}",
                format!("i={i}"),
                width = col_width[ci]
            ));
        }
        out.push('\n');
        for (ri, &j) in js.iter().enumerate() {
            out.push_str(&format!("{:<head_width$}", row_head[ri]));
            for (ci, &i) in is.iter().enumerate() {
                out.push_str("  ");
                out.push_str(&format!("{:<width$}", cell(i, j), width = col_width[ci]));
            }
            out.push('\n');
        }
        out
    }

    /// One "i,j,rank,torsion" line per nonzero group, sorted by (i, j);
    /// torsion orders are ";"-joined.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,j,rank,torsion\n");
        for (&(i, j), g) in &self.groups {
            let torsion = g
                .torsion()
                .iter()
                .map(|t| t.to_string())
                .collect::<Vec<_>>()
                .join(";");
            out.push_str(&format!("{i},{j},{},{torsion}\n", g.free_rank()));
        }
        out
    }
}

fn torsion_value(t: &BigInt) -> Value {
    match t.to_u64() {
        Some(v) => json!(v),
        None => json!(t.to_string()),
    }
}
