//! `{0,1,2}` decorations and the rewriting rule that turns a box into a
//! circle while uncrossing its neighbours.
//!
//! Decorations reached by `k` rewrites label the `k`-faces through the
//! Wythoff point. They are determined by their set of circled nodes, which
//! is what [`valid_s_sets`] and [`decoration_from_s`] exploit.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::{DecoratedDiagram, NodeSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecorationError {
    #[error("rule needs a node with value 1, node {node} has value {value}")]
    NotApplicable { node: usize, value: u8 },
    #[error("node set {0:#b} is not a valid circled set for this decoration")]
    InvalidS(NodeSet),
    #[error("a node with value 2 is adjacent to a node with value 0")]
    TwoNextToZero,
}

/// A `{0,1,2}` value per diagram node: 0 = crossed box, 1 = box, 2 = circle.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Decoration012 {
    values: Vec<u8>,
}

impl Decoration012 {
    /// Checks the 2-next-to-0 invariant against the diagram.
    pub fn new(d: &DecoratedDiagram, values: Vec<u8>) -> Result<Self, DecorationError> {
        assert_eq!(values.len(), d.len());
        assert!(values.iter().all(|&v| v <= 2));
        let f = Self { values };
        let twos = f.s_set();
        let zeros = f.nodes_with(0);
        if (0..d.len()).any(|v| twos & (1 << v) != 0 && d.neighbors(v) & zeros != 0) {
            return Err(DecorationError::TwoNextToZero);
        }
        Ok(f)
    }

    /// The starting `{0,1}` decoration read off the diagram's marks.
    pub fn initial(d: &DecoratedDiagram) -> Self {
        Self { values: d.marks().iter().map(|m| m.value()).collect() }
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    pub fn value(&self, v: usize) -> u8 {
        self.values[v]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn nodes_with(&self, value: u8) -> NodeSet {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &x)| x == value)
            .fold(0, |acc, (i, _)| acc | (1 << i))
    }

    /// Circled nodes.
    pub fn s_set(&self) -> NodeSet {
        self.nodes_with(2)
    }

    pub fn rank(&self) -> usize {
        self.s_set().count_ones() as usize
    }
}

impl fmt::Display for Decoration012 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.values {
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// One application of the rewriting rule at node `w`.
pub fn apply_star(d: &DecoratedDiagram, f: &Decoration012, w: usize) -> Result<Decoration012, DecorationError> {
    let value = f.value(w);
    if value != 1 {
        return Err(DecorationError::NotApplicable { node: w, value });
    }
    let near = d.neighbors(w);
    let values = f
        .values
        .iter()
        .enumerate()
        .map(|(v, &x)| match x {
            2 => 2,
            _ if v == w => 2,
            1 => 1,
            _ if near & (1 << v) != 0 => 1,
            _ => 0,
        })
        .collect();
    let next = Decoration012 { values };
    debug_assert!(Decoration012::new(d, next.values.clone()).is_ok());
    Ok(next)
}

/// All decorations reachable by exactly `k` rewrites, deduplicated by value.
pub fn reachable(d: &DecoratedDiagram, f0: &Decoration012, k: usize) -> BTreeSet<Decoration012> {
    let mut level = BTreeSet::from([f0.clone()]);
    for _ in 0..k {
        let mut next = BTreeSet::new();
        for f in &level {
            for w in 0..d.len() {
                if f.value(w) == 1 {
                    next.insert(apply_star(d, f, w).expect("value checked"));
                }
            }
        }
        level = next;
    }
    level
}

/// True when some connected component carries no ring.
pub fn is_degenerate(d: &DecoratedDiagram, f0: &Decoration012) -> bool {
    let ones = f0.nodes_with(1);
    d.induced_components(d.all_nodes()).iter().any(|&c| c & ones == 0)
}

/// Whether every component of the subdiagram on `s` contains a ring of `f0`.
pub fn is_valid_s(d: &DecoratedDiagram, f0: &Decoration012, s: NodeSet) -> bool {
    let ones = f0.nodes_with(1);
    d.induced_components(s).iter().all(|&c| c & ones != 0)
}

/// Node sets of size `k` whose induced components each contain a ring.
pub fn valid_s_sets(d: &DecoratedDiagram, f0: &Decoration012, k: usize) -> Vec<NodeSet> {
    let n = d.len();
    if k > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    // Gosper's hack over k-subsets, ascending.
    if k == 0 {
        return vec![0];
    }
    let mut s: u64 = (1u64 << k) - 1;
    let limit = if n == 64 { None } else { Some(1u64 << n) };
    loop {
        if let Some(limit) = limit {
            if s >= limit {
                break;
            }
        }
        if is_valid_s(d, f0, s) {
            out.push(s);
        }
        let c = s & s.wrapping_neg();
        let r = s.wrapping_add(c);
        if r == 0 {
            break;
        }
        s = (((r ^ s) >> 2) / c) | r;
    }
    out
}

/// Reconstructs the decoration with circled set `s` directly.
pub fn decoration_from_s(d: &DecoratedDiagram, f0: &Decoration012, s: NodeSet) -> Result<Decoration012, DecorationError> {
    if s & !d.all_nodes() != 0 || !is_valid_s(d, f0, s) {
        return Err(DecorationError::InvalidS(s));
    }
    let ones = f0.nodes_with(1);
    let near_s = (0..d.len()).filter(|&v| s & (1 << v) != 0).fold(0, |acc, v| acc | d.neighbors(v));
    let values = (0..d.len())
        .map(|v| {
            let bit = 1 << v;
            if s & bit != 0 {
                2
            } else if ones & bit != 0 || near_s & bit != 0 {
                1
            } else {
                0
            }
        })
        .collect();
    Ok(Decoration012 { values })
}

/// Nodes generating the stabilizer of the face labelled by `f`: those with value != 1.
pub fn stabilizer_generators(f: &Decoration012) -> NodeSet {
    f.nodes_with(0) | f.nodes_with(2)
}
