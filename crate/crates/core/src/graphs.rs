//! Recursive Laakso and multibranching diamond graphs.
//!
//! Both families are built by repeated edge replacement starting from a
//! single oriented edge. Edges are kept in lexicographic address order, so
//! the edges of any sub-copy form a contiguous index range and every output
//! is reproducible bit for bit.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::rational::{int, Rat};

/// Which recursive family a graph belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    Laakso,
    /// Diamond graph of branching `k >= 2`.
    Diamond {
        k: usize,
    },
}

impl Family {
    /// Number of child edges each edge spawns per replacement step.
    pub fn arity(&self) -> usize {
        match self {
            Family::Laakso => 6,
            Family::Diamond { k } => 2 * k,
        }
    }
}

/// Laakso digit constants (sub-copy letters of the 6-edge gadget).
pub mod digit {
    pub const A: u8 = 0;
    pub const B: u8 = 1;
    pub const C: u8 = 2;
    pub const D: u8 = 3;
    pub const E: u8 = 4;
    pub const F: u8 = 5;
}

/// Address of a sub-copy: the digit string selecting nested replacement
/// cells, coarsest digit first. An edge of a level-`n` graph has an `n`-digit
/// address; a sub-copy of level `j` has an `(n-j)`-digit address.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SubAddress {
    digits: Vec<u8>,
    family: Family,
}

impl SubAddress {
    pub fn new(digits: Vec<u8>, family: Family) -> Self {
        let radix = family.arity() as u8;
        assert!(digits.iter().all(|&d| d < radix), "digit out of range");
        SubAddress { digits, family }
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn is_prefix_of(&self, other: &SubAddress) -> bool {
        other.digits.len() >= self.digits.len() && other.digits[..self.digits.len()] == self.digits
    }

    /// Numeric value of the digit string in base `arity`.
    pub fn value(&self) -> usize {
        let a = self.family.arity();
        self.digits
            .iter()
            .fold(0usize, |acc, &d| acc * a + d as usize)
    }

    pub fn child(&self, d: u8) -> SubAddress {
        let mut digits = self.digits.clone();
        digits.push(d);
        SubAddress::new(digits, self.family)
    }

    pub fn parse(s: &str, family: Family) -> Result<SubAddress> {
        let radix = family.arity();
        let mut digits = Vec::with_capacity(s.len());
        for c in s.chars() {
            let d = match family {
                Family::Laakso => match c {
                    'A'..='F' => c as u8 - b'A',
                    _ => return Err(Error::Parse(format!("bad Laakso address char {c:?}"))),
                },
                Family::Diamond { .. } => match c.to_digit(36) {
                    Some(d) if (d as usize) < radix => d as u8,
                    _ => return Err(Error::Parse(format!("bad diamond address char {c:?}"))),
                },
            };
            digits.push(d);
        }
        Ok(SubAddress::new(digits, family))
    }
}

impl std::fmt::Display for SubAddress {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for &d in &self.digits {
            match self.family {
                Family::Laakso => write!(f, "{}", (b'A' + d) as char)?,
                Family::Diamond { .. } => {
                    write!(f, "{}", std::char::from_digit(d as u32, 36).unwrap())?
                }
            }
        }
        Ok(())
    }
}

/// A Laakso graph or multibranching diamond with oriented edges.
///
/// Every edge is oriented bottom to top. Edge `i` of a level-`n` graph has
/// the address whose base-`arity` digits are the digits of `i` (coarsest
/// first), so the sub-copy at address `p` owns exactly the contiguous edge
/// range `[value(p) * arity^j, (value(p)+1) * arity^j)`.
#[derive(Debug, Clone)]
pub struct RecursiveGraph {
    family: Family,
    level: usize,
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    bottom: usize,
    top: usize,
}

impl RecursiveGraph {
    /// Build the Laakso graph of the given level.
    pub fn laakso(level: usize, edge_cap: usize) -> Result<Self> {
        Self::build(Family::Laakso, level, edge_cap)
    }

    /// Build the diamond graph of branching `k` at the given level.
    pub fn diamond(level: usize, k: usize, edge_cap: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::Range(format!(
                "diamond branching k = {k}, need k >= 2"
            )));
        }
        Self::build(Family::Diamond { k }, level, edge_cap)
    }

    fn build(family: Family, level: usize, edge_cap: usize) -> Result<Self> {
        let arity = family.arity() as u128;
        let requested = arity.checked_pow(level as u32).unwrap_or(u128::MAX);
        if requested > edge_cap as u128 {
            return Err(Error::Capacity {
                requested,
                cap: edge_cap,
            });
        }

        let mut g = RecursiveGraph {
            family,
            level: 0,
            vertex_count: 2,
            edges: vec![(0, 1)],
            bottom: 0,
            top: 1,
        };
        for _ in 0..level {
            g.replace_edges();
        }
        Ok(g)
    }

    /// One replacement step: every edge becomes a full gadget, children
    /// emitted in address order so the edge list stays lexicographic.
    fn replace_edges(&mut self) {
        let mut next = Vec::with_capacity(self.edges.len() * self.family.arity());
        let mut fresh = self.vertex_count;
        for &(u, v) in &self.edges {
            match self.family {
                Family::Laakso => {
                    // Interior vertices: branch p, mid-right qr, mid-left ql, merge r.
                    let (p, qr, ql, r) = (fresh, fresh + 1, fresh + 2, fresh + 3);
                    fresh += 4;
                    next.push((u, p)); // A
                    next.push((p, qr)); // B
                    next.push((qr, r)); // C
                    next.push((p, ql)); // D
                    next.push((ql, r)); // E
                    next.push((r, v)); // F
                }
                Family::Diamond { k } => {
                    for _ in 0..k {
                        let m = fresh;
                        fresh += 1;
                        next.push((u, m));
                        next.push((m, v));
                    }
                }
            }
        }
        self.vertex_count = fresh;
        self.edges = next;
        self.level += 1;
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn arity(&self) -> usize {
        self.family.arity()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn tail(&self, e: usize) -> usize {
        self.edges[e].0
    }

    pub fn head(&self, e: usize) -> usize {
        self.edges[e].1
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }

    /// Address digits of edge `e`, coarsest first.
    pub fn edge_address(&self, e: usize) -> SubAddress {
        let a = self.arity();
        let mut digits = vec![0u8; self.level];
        let mut rest = e;
        for slot in digits.iter_mut().rev() {
            *slot = (rest % a) as u8;
            rest /= a;
        }
        debug_assert_eq!(rest, 0);
        SubAddress::new(digits, self.family)
    }

    pub fn edge_index(&self, addr: &SubAddress) -> usize {
        assert_eq!(
            addr.len(),
            self.level,
            "edge address must have {} digits",
            self.level
        );
        addr.value()
    }

    /// Edge index range owned by the sub-copy at `addr`.
    pub fn sub_copy_edges(&self, addr: &SubAddress) -> std::ops::Range<usize> {
        let j = self.level - addr.len();
        let width = self.arity().pow(j as u32);
        let lo = addr.value() * width;
        lo..lo + width
    }

    /// All sub-copies of level `j`, in lexicographic address order.
    pub fn sub_copies(&self, j: usize) -> Result<Vec<SubAddress>> {
        if j < 1 || j > self.level {
            return Err(Error::Range(format!(
                "sub-copy level j = {j} outside 1..={}",
                self.level
            )));
        }
        let len = self.level - j;
        let a = self.arity();
        let count = a.pow(len as u32);
        let mut out = Vec::with_capacity(count);
        for v in 0..count {
            let mut digits = vec![0u8; len];
            let mut rest = v;
            for slot in digits.iter_mut().rev() {
                *slot = (rest % a) as u8;
                rest /= a;
            }
            out.push(SubAddress::new(digits, self.family));
        }
        Ok(out)
    }

    /// Undirected adjacency lists, neighbors sorted ascending; each entry is
    /// `(neighbor, edge index, forward)` where `forward` means the edge is
    /// traversed tail to head.
    pub fn adjacency(&self) -> Vec<Vec<(usize, usize, bool)>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            adj[u].push((v, e, true));
            adj[v].push((u, e, false));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.vertex_count];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    /// BFS distances (in edges) from `start` to every vertex.
    pub fn bfs_distances(&self, start: usize) -> Vec<usize> {
        let adj = self.adjacency();
        self.bfs_with_adj(start, &adj)
    }

    fn bfs_with_adj(&self, start: usize, adj: &[Vec<(usize, usize, bool)>]) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.vertex_count];
        dist[start] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &(v, _, _) in &adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// All-pairs unweighted shortest-path metric.
    pub fn shortest_path_metric(&self) -> FiniteMetricSpace {
        let adj = self.adjacency();
        let n = self.vertex_count;
        let mut dist = Vec::with_capacity(n);
        for v in 0..n {
            let row = self.bfs_with_adj(v, &adj);
            assert!(
                row.iter().all(|&d| d != usize::MAX),
                "graph must be connected"
            );
            dist.push(row.iter().map(|&d| int(d as i64)).collect());
        }
        let labels = (0..n).map(|v| format!("v{v}")).collect();
        FiniteMetricSpace::new(labels, dist)
    }

    /// Lexicographically minimal shortest path from `from` to `to`, as a
    /// vertex sequence. Ties are broken by smallest next vertex index.
    pub fn lex_shortest_path(&self, from: usize, to: usize) -> Vec<usize> {
        let adj = self.adjacency();
        let dist_to = self.bfs_with_adj(to, &adj);
        assert_ne!(dist_to[from], usize::MAX, "vertices not connected");
        let mut path = vec![from];
        let mut cur = from;
        while cur != to {
            let next = adj[cur]
                .iter()
                .map(|&(v, _, _)| v)
                .filter(|&v| dist_to[v] + 1 == dist_to[cur])
                .min()
                .expect("shortest path step exists");
            path.push(next);
            cur = next;
        }
        path
    }

    /// Oriented edge between two adjacent vertices: `(edge, forward)`.
    pub fn edge_between(&self, u: usize, v: usize) -> Option<(usize, bool)> {
        self.edges.iter().enumerate().find_map(|(e, &(t, h))| {
            if (t, h) == (u, v) {
                Some((e, true))
            } else if (t, h) == (v, u) {
                Some((e, false))
            } else {
                None
            }
        })
    }
}

/// A finite metric space with exact rational distances.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    dist: Vec<Vec<Rat>>,
}

impl FiniteMetricSpace {
    pub fn new(labels: Vec<String>, dist: Vec<Vec<Rat>>) -> Self {
        assert_eq!(labels.len(), dist.len());
        for row in &dist {
            assert_eq!(row.len(), labels.len());
        }
        FiniteMetricSpace { labels, dist }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dist(&self, u: usize, v: usize) -> &Rat {
        &self.dist[u][v]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Check symmetry, zero diagonal, positivity off the diagonal, and the
    /// triangle inequality over all triples.
    pub fn verify_metric(&self) -> Result<()> {
        let n = self.len();
        let zero = Rat::from_integer(0.into());
        for u in 0..n {
            if self.dist[u][u] != zero {
                return Err(Error::Parse(format!("nonzero diagonal at {u}")));
            }
            for v in 0..n {
                if self.dist[u][v] != self.dist[v][u] {
                    return Err(Error::Parse(format!("asymmetric distance at ({u},{v})")));
                }
                if u != v && self.dist[u][v] <= zero {
                    return Err(Error::Parse(format!("non-positive distance at ({u},{v})")));
                }
            }
        }
        for u in 0..n {
            for v in 0..n {
                for w in 0..n {
                    if self.dist[u][v] > &self.dist[u][w] + &self.dist[w][v] {
                        return Err(Error::Parse(format!(
                            "triangle inequality fails for ({u},{v}) via {w}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Scale every distance by a positive factor.
    pub fn scaled(&self, factor: &Rat) -> FiniteMetricSpace {
        let dist = self
            .dist
            .iter()
            .map(|row| row.iter().map(|d| d * factor).collect())
            .collect();
        FiniteMetricSpace::new(self.labels.clone(), dist)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CAP: usize = 100_000;

    fn laakso_vertex_formula(n: usize) -> usize {
        2 + 4 * (0..n).map(|i| 6usize.pow(i as u32)).sum::<usize>()
    }

    fn diamond_vertex_formula(n: usize, k: usize) -> usize {
        2 + k * (0..n).map(|i| (2 * k).pow(i as u32)).sum::<usize>()
    }

    #[test]
    fn laakso_counts_match_closed_formulas() {
        for n in 0..=5 {
            let g = RecursiveGraph::laakso(n, CAP).unwrap();
            assert_eq!(g.edge_count(), 6usize.pow(n as u32));
            assert_eq!(g.vertex_count(), laakso_vertex_formula(n));
        }
        let g = RecursiveGraph::laakso(1, CAP).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (6, 6));
        let g = RecursiveGraph::laakso(2, CAP).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (30, 36));
    }

    #[test]
    fn diamond_counts_match_closed_formulas() {
        for n in 0..=4 {
            for k in 2..=4 {
                let g = RecursiveGraph::diamond(n, k, CAP).unwrap();
                assert_eq!(g.edge_count(), (2 * k).pow(n as u32));
                assert_eq!(g.vertex_count(), diamond_vertex_formula(n, k));
            }
        }
        let g = RecursiveGraph::diamond(1, 2, CAP).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (4, 4));
        let g = RecursiveGraph::diamond(0, 7, CAP).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (2, 1));
        let g = RecursiveGraph::diamond(2, 3, CAP).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (23, 36));
    }

    #[test]
    fn capacity_and_range_errors() {
        assert!(matches!(
            RecursiveGraph::laakso(7, CAP),
            Err(Error::Capacity { .. })
        ));
        assert!(matches!(
            RecursiveGraph::diamond(1, 1, CAP),
            Err(Error::Range(_))
        ));
        let g = RecursiveGraph::laakso(2, CAP).unwrap();
        assert!(g.sub_copies(0).is_err());
        assert!(g.sub_copies(3).is_err());
    }

    #[test]
    fn graphs_are_connected() {
        for g in [
            RecursiveGraph::laakso(3, CAP).unwrap(),
            RecursiveGraph::diamond(2, 3, CAP).unwrap(),
        ] {
            let dist = g.bfs_distances(g.bottom());
            assert!(dist.iter().all(|&d| d != usize::MAX));
        }
    }

    #[test]
    fn bottom_top_distance() {
        // BFS oracle: the bottom-to-top distance of the Laakso graph
        // quadruples per level; diamonds double per level.
        for n in 0..=3 {
            let g = RecursiveGraph::laakso(n, CAP).unwrap();
            let d = g.bfs_distances(g.bottom())[g.top()];
            assert_eq!(d, 4usize.pow(n as u32));
        }
        let g = RecursiveGraph::diamond(1, 2, CAP).unwrap();
        assert_eq!(g.bfs_distances(g.bottom())[g.top()], 2);
    }

    #[test]
    fn sub_copy_counts_and_partition() {
        let g = RecursiveGraph::laakso(2, CAP).unwrap();
        assert_eq!(g.sub_copies(1).unwrap().len(), 6);
        assert_eq!(g.sub_copies(2).unwrap().len(), 1);
        let g3 = RecursiveGraph::laakso(3, CAP).unwrap();
        assert_eq!(g3.sub_copies(1).unwrap().len(), 36);

        // For fixed j the sub-copy edge ranges partition the edge set.
        for j in 1..=3 {
            let mut seen = vec![false; g3.edge_count()];
            for addr in g3.sub_copies(j).unwrap() {
                let range = g3.sub_copy_edges(&addr);
                assert_eq!(range.len(), 6usize.pow(j as u32));
                for e in range {
                    assert!(!seen[e]);
                    seen[e] = true;
                }
            }
            assert!(seen.iter().all(|&s| s));
        }
    }

    #[test]
    fn nesting_matches_prefix_order() {
        let g = RecursiveGraph::laakso(3, CAP).unwrap();
        let coarse = g.sub_copies(2).unwrap();
        let fine = g.sub_copies(1).unwrap();
        for p in &coarse {
            for q in &fine {
                let pr = g.sub_copy_edges(p);
                let qr = g.sub_copy_edges(q);
                let contained = pr.start <= qr.start && qr.end <= pr.end;
                assert_eq!(p.is_prefix_of(q), contained);
            }
        }
    }

    #[test]
    fn addresses_round_trip() {
        let g = RecursiveGraph::laakso(3, CAP).unwrap();
        for e in [0, 7, 35, 215] {
            let addr = g.edge_address(e);
            assert_eq!(g.edge_index(&addr), e);
            let parsed = SubAddress::parse(&addr.to_string(), Family::Laakso).unwrap();
            assert_eq!(parsed, addr);
        }
        assert_eq!(g.edge_address(0).to_string(), "AAA");
        assert_eq!(g.edge_address(215).to_string(), "FFF");

        let d = RecursiveGraph::diamond(2, 3, CAP).unwrap();
        let addr = d.edge_address(13);
        assert_eq!(d.edge_index(&addr), 13);
        assert_eq!(addr.to_string(), "21");
    }

    #[test]
    fn laakso_degrees() {
        // Bottom/top have degree 1 and every other vertex degree 2 or 3.
        // Each sub-copy of each level contributes its own branch and merge
        // vertex, so the 3-valent vertices number 2(6^n - 1)/5.
        for n in 1..=3 {
            let g = RecursiveGraph::laakso(n, CAP).unwrap();
            let deg = g.degrees();
            assert_eq!(deg[g.bottom()], 1);
            assert_eq!(deg[g.top()], 1);
            let d3 = deg.iter().filter(|&&d| d == 3).count();
            let d2 = deg.iter().filter(|&&d| d == 2).count();
            assert_eq!(d3 + d2 + 2, g.vertex_count());
            assert_eq!(d3, 2 * (6usize.pow(n as u32) - 1) / 5);
        }
    }

    #[test]
    fn reversal_gives_isomorphic_graph() {
        // Reversing all edges and swapping bottom/top is realized by the
        // digit involution A<->F, B<->C, D<->E (diamond: lower<->upper).
        for g in [
            RecursiveGraph::laakso(2, CAP).unwrap(),
            RecursiveGraph::diamond(2, 3, CAP).unwrap(),
        ] {
            let rev = |d: u8| -> u8 {
                match g.family() {
                    Family::Laakso => match d {
                        digit::A => digit::F,
                        digit::B => digit::C,
                        digit::C => digit::B,
                        digit::D => digit::E,
                        digit::E => digit::D,
                        digit::F => digit::A,
                        _ => unreachable!(),
                    },
                    Family::Diamond { .. } => d ^ 1,
                }
            };
            let mut vertex_map = vec![usize::MAX; g.vertex_count()];
            vertex_map[g.bottom()] = g.top();
            vertex_map[g.top()] = g.bottom();
            for e in 0..g.edge_count() {
                let addr = g.edge_address(e);
                let digits = addr.digits().iter().map(|&d| rev(d)).collect::<Vec<_>>();
                let image = g.edge_index(&SubAddress::new(digits, g.family()));
                // Edge (u, v) must map to reversed edge (v', u').
                let (u, v) = (g.tail(e), g.head(e));
                let (iu, iv) = (g.tail(image), g.head(image));
                for (from, to) in [(u, iv), (v, iu)] {
                    if vertex_map[from] == usize::MAX {
                        vertex_map[from] = to;
                    } else {
                        assert_eq!(vertex_map[from], to, "vertex map inconsistent");
                    }
                }
            }
            assert!(vertex_map.iter().all(|&v| v != usize::MAX));
        }
    }

    #[test]
    fn metric_space_checks() {
        let g = RecursiveGraph::laakso(1, CAP).unwrap();
        let m = g.shortest_path_metric();
        m.verify_metric().unwrap();
        assert_eq!(m.dist(g.bottom(), g.top()), &int(4));

        let g0 = RecursiveGraph::laakso(0, CAP).unwrap();
        let m0 = g0.shortest_path_metric();
        assert_eq!(m0.dist(0, 1), &int(1));
    }

    #[test]
    fn lex_shortest_path_is_shortest_and_deterministic() {
        let g = RecursiveGraph::laakso(2, CAP).unwrap();
        let p = g.lex_shortest_path(g.bottom(), g.top());
        assert_eq!(p.len(), 17); // 16 edges
        let q = g.lex_shortest_path(g.bottom(), g.top());
        assert_eq!(p, q);
        for w in p.windows(2) {
            assert!(g.edge_between(w[0], w[1]).is_some());
        }
    }
}
