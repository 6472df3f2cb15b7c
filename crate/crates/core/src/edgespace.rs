//! Exact-rational vectors over an edge set.
//!
//! An `EdgeVector` is a sparse map from edge index to a nonzero rational
//! coefficient, together with the ambient edge count. The l1 / squared-l2 /
//! l-infinity norms and the inner product are all computed exactly.

use std::collections::BTreeMap;

use num::{Signed, Zero};

use crate::error::{Error, Result};
use crate::graphs::{digit, Family, RecursiveGraph};
use crate::rational::{rat, Rat};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeVector {
    edges: usize,
    coeffs: BTreeMap<usize, Rat>,
}

impl EdgeVector {
    pub fn zero(edges: usize) -> Self {
        EdgeVector {
            edges,
            coeffs: BTreeMap::new(),
        }
    }

    /// The standard basis vector of a single edge.
    pub fn unit(edges: usize, e: usize) -> Self {
        let mut v = Self::zero(edges);
        v.set(e, Rat::from_integer(1.into()));
        v
    }

    pub fn from_entries<I: IntoIterator<Item = (usize, Rat)>>(edges: usize, entries: I) -> Self {
        let mut v = Self::zero(edges);
        for (e, c) in entries {
            let cur = v.get(e) + c;
            v.set(e, cur);
        }
        v
    }

    pub fn edges(&self) -> usize {
        self.edges
    }

    pub fn get(&self, e: usize) -> Rat {
        self.coeffs.get(&e).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn set(&mut self, e: usize, c: Rat) {
        assert!(e < self.edges, "edge index {e} out of range");
        if c.is_zero() {
            self.coeffs.remove(&e);
        } else {
            self.coeffs.insert(e, c);
        }
    }

    pub fn add_to(&mut self, e: usize, c: &Rat) {
        let cur = self.get(e) + c;
        self.set(e, cur);
    }

    pub fn support(&self) -> impl Iterator<Item = (usize, &Rat)> {
        self.coeffs.iter().map(|(&e, c)| (e, c))
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Entries within an edge-index range (the support of a sub-copy).
    pub fn range(&self, r: std::ops::Range<usize>) -> impl Iterator<Item = (usize, &Rat)> {
        self.coeffs.range(r).map(|(&e, c)| (e, c))
    }

    pub fn add(&self, other: &EdgeVector) -> EdgeVector {
        assert_eq!(self.edges, other.edges);
        let mut out = self.clone();
        for (e, c) in other.support() {
            out.add_to(e, c);
        }
        out
    }

    pub fn sub(&self, other: &EdgeVector) -> EdgeVector {
        self.add(&other.scale(&rat(-1, 1)))
    }

    pub fn scale(&self, factor: &Rat) -> EdgeVector {
        if factor.is_zero() {
            return EdgeVector::zero(self.edges);
        }
        let coeffs = self.coeffs.iter().map(|(&e, c)| (e, c * factor)).collect();
        EdgeVector {
            edges: self.edges,
            coeffs,
        }
    }

    pub fn l1(&self) -> Rat {
        self.coeffs.values().map(|c| c.abs()).sum()
    }

    pub fn l2_sq(&self) -> Rat {
        self.coeffs.values().map(|c| c * c).sum()
    }

    pub fn linf(&self) -> Rat {
        self.coeffs
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(Rat::zero)
    }

    pub fn norms(&self) -> (Rat, Rat, Rat) {
        (self.l1(), self.l2_sq(), self.linf())
    }

    /// Dense export for full-space scans.
    pub fn to_dense(&self) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); self.edges];
        for (e, c) in self.support() {
            out[e] = c.clone();
        }
        out
    }

    pub fn inner(&self, other: &EdgeVector) -> Rat {
        assert_eq!(self.edges, other.edges);
        // Iterate the sparser side.
        let (small, big) = if self.coeffs.len() <= other.coeffs.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut acc = Rat::zero();
        for (e, c) in small.support() {
            if let Some(d) = big.coeffs.get(&e) {
                acc += c * d;
            }
        }
        acc
    }
}

/// The propagation map lifting a vector on a level-`m` Laakso graph to the
/// level-`m+1` graph: a coefficient `c` on an edge becomes
/// `(c, c/2, c/2, c/2, c/2, c)` on the six child edges, in A..F order.
pub fn propagate(x: &EdgeVector) -> EdgeVector {
    let half = rat(1, 2);
    let mut out = EdgeVector::zero(x.edges() * 6);
    for (e, c) in x.support() {
        let base = 6 * e;
        let c_half = c * &half;
        out.set(base + digit::A as usize, c.clone());
        out.set(base + digit::B as usize, c_half.clone());
        out.set(base + digit::C as usize, c_half.clone());
        out.set(base + digit::D as usize, c_half.clone());
        out.set(base + digit::E as usize, c_half);
        out.set(base + digit::F as usize, c.clone());
    }
    out
}

/// Propagate with a capacity check against `edge_cap`.
pub fn propagate_checked(x: &EdgeVector, edge_cap: usize) -> Result<EdgeVector> {
    let requested = (x.edges() as u128) * 6;
    if requested > edge_cap as u128 {
        return Err(Error::Capacity {
            requested,
            cap: edge_cap,
        });
    }
    Ok(propagate(x))
}

/// One step of a directed edge walk: edge index plus traversal direction
/// (`forward` = along the reference orientation).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WalkStep {
    pub edge: usize,
    pub forward: bool,
}

impl WalkStep {
    pub fn forward(edge: usize) -> Self {
        WalkStep {
            edge,
            forward: true,
        }
    }

    pub fn backward(edge: usize) -> Self {
        WalkStep {
            edge,
            forward: false,
        }
    }
}

/// Signed indicator function of a directed cycle: +1 on edges traversed with
/// the reference orientation, -1 against, 0 elsewhere.
pub fn cycle_indicator(g: &RecursiveGraph, walk: &[WalkStep]) -> Result<EdgeVector> {
    if walk.is_empty() {
        return Err(Error::WalkNotClosed("empty walk".into()));
    }
    let start_of = |s: &WalkStep| {
        if s.forward {
            g.tail(s.edge)
        } else {
            g.head(s.edge)
        }
    };
    let end_of = |s: &WalkStep| {
        if s.forward {
            g.head(s.edge)
        } else {
            g.tail(s.edge)
        }
    };
    for pair in walk.windows(2) {
        if end_of(&pair[0]) != start_of(&pair[1]) {
            return Err(Error::WalkNotClosed(format!(
                "step ending at vertex {} followed by step starting at {}",
                end_of(&pair[0]),
                start_of(&pair[1])
            )));
        }
    }
    let first = walk.first().unwrap();
    let last = walk.last().unwrap();
    if end_of(last) != start_of(first) {
        return Err(Error::WalkNotClosed(format!(
            "walk ends at vertex {} but started at {}",
            end_of(last),
            start_of(first)
        )));
    }
    let mut v = EdgeVector::zero(g.edge_count());
    for step in walk {
        if !v.get(step.edge).is_zero() {
            return Err(Error::WalkNotClosed(format!(
                "edge {} visited twice",
                step.edge
            )));
        }
        v.set(step.edge, rat(if step.forward { 1 } else { -1 }, 1));
    }
    Ok(v)
}

/// The outer cycle of the sub-copy at `addr`: up through the B then C
/// regions along all-rightmost choices, back down through E then D. Its
/// signed indicator is the extreme representative of the `h`-type vector on
/// the sub-copy.
pub fn outer_cycle(g: &RecursiveGraph, addr: &crate::graphs::SubAddress) -> Vec<WalkStep> {
    assert_eq!(g.family(), Family::Laakso);
    let j = g.level() - addr.len();
    assert!(j >= 1, "outer cycle needs a sub-copy of level >= 1");

    // Rightmost bottom-to-top path of the sub-copy of level `lvl` at `base`:
    // recursively traverse the A, B, C, F children.
    fn rightmost(base: usize, lvl: usize, out: &mut Vec<WalkStep>) {
        if lvl == 0 {
            out.push(WalkStep::forward(base));
            return;
        }
        let w = 6usize.pow(lvl as u32 - 1);
        for d in [digit::A, digit::B, digit::C, digit::F] {
            rightmost(base + d as usize * w, lvl - 1, out);
        }
    }

    let base = g.sub_copy_edges(addr).start;
    let w = 6usize.pow(j as u32 - 1);
    let mut up = Vec::new();
    rightmost(base + digit::B as usize * w, j - 1, &mut up);
    rightmost(base + digit::C as usize * w, j - 1, &mut up);
    let mut down = Vec::new();
    rightmost(base + digit::D as usize * w, j - 1, &mut down);
    rightmost(base + digit::E as usize * w, j - 1, &mut down);
    down.reverse();
    up.extend(down.into_iter().map(|s| WalkStep::backward(s.edge)));
    up
}
