//! Transportation-cost norms on finite metric spaces and quotient norms on
//! edge spaces.
//!
//! The TC norm of a zero-sum function is the optimum of the transportation
//! LP over the metric, solved exactly by the transportation simplex in
//! [`crate::flow`]. The quotient norm `min { ||x - z||_1 : z in Z(G) }` is
//! solved by a separate dense simplex over cycle-basis coefficients; the two
//! routes must agree, which the verification suite exercises on random
//! vectors.

use std::collections::BTreeMap;

use num::{Signed, Zero};

use crate::edgespace::EdgeVector;
use crate::error::{Error, Result};
use crate::flow::solve_transportation;
use crate::graphs::{FiniteMetricSpace, RecursiveGraph};
use crate::lp;
use crate::rational::{int, rat, rat_f64, Rat};
use crate::spaces::{NamedRole, OrthoBasis};

/// A zero-sum rational function on the points of a finite metric space.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportProblem {
    points: usize,
    values: BTreeMap<usize, Rat>,
}

impl TransportProblem {
    pub fn new<I: IntoIterator<Item = (usize, Rat)>>(points: usize, values: I) -> Result<Self> {
        let mut map: BTreeMap<usize, Rat> = BTreeMap::new();
        for (p, v) in values {
            assert!(p < points, "point index {p} out of range");
            let cur = map.remove(&p).unwrap_or_else(Rat::zero) + v;
            if !cur.is_zero() {
                map.insert(p, cur);
            }
        }
        let sum: Rat = map.values().sum();
        if !sum.is_zero() {
            return Err(Error::NonzeroSum(crate::rational::rat_str(&sum)));
        }
        Ok(TransportProblem {
            points,
            values: map,
        })
    }

    pub fn zero(points: usize) -> Self {
        TransportProblem {
            points,
            values: BTreeMap::new(),
        }
    }

    /// The elementary problem `1_u - 1_v`.
    pub fn point_diff(points: usize, u: usize, v: usize) -> Self {
        TransportProblem::new(points, [(u, int(1)), (v, int(-1))]).expect("zero-sum")
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn values(&self) -> impl Iterator<Item = (usize, &Rat)> {
        self.values.iter().map(|(&p, v)| (p, v))
    }

    pub fn value(&self, p: usize) -> Rat {
        self.values.get(&p).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn add(&self, other: &TransportProblem) -> TransportProblem {
        assert_eq!(self.points, other.points);
        let mut out = self.clone();
        for (p, v) in other.values() {
            let cur = out.value(p) + v;
            if cur.is_zero() {
                out.values.remove(&p);
            } else {
                out.values.insert(p, cur);
            }
        }
        out
    }

    pub fn scale(&self, factor: &Rat) -> TransportProblem {
        if factor.is_zero() {
            return TransportProblem::zero(self.points);
        }
        let values = self.values.iter().map(|(&p, v)| (p, v * factor)).collect();
        TransportProblem {
            points: self.points,
            values,
        }
    }
}

/// A transportation plan: nonnegative moves plus their total cost.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    pub moves: Vec<(usize, usize, Rat)>,
    pub cost: Rat,
}

impl TransportPlan {
    /// Recompute cost and marginals; the plan must solve `problem` on
    /// `space` and its stored cost must match.
    pub fn verify(&self, space: &FiniteMetricSpace, problem: &TransportProblem) -> Result<()> {
        let mut cost = Rat::zero();
        let mut net: BTreeMap<usize, Rat> = BTreeMap::new();
        for (u, v, a) in &self.moves {
            if a.is_negative() {
                return Err(Error::Mismatch(format!("negative move amount {a}")));
            }
            cost += a * space.dist(*u, *v);
            *net.entry(*u).or_insert_with(Rat::zero) += a;
            *net.entry(*v).or_insert_with(Rat::zero) -= a;
        }
        if cost != self.cost {
            return Err(Error::Mismatch(format!(
                "plan cost {} does not recompute ({})",
                self.cost, cost
            )));
        }
        for p in 0..problem.points() {
            let have = net.get(&p).cloned().unwrap_or_else(Rat::zero);
            if have != problem.value(p) {
                return Err(Error::Mismatch(format!(
                    "plan marginal at point {p} is {have}, problem wants {}",
                    problem.value(p)
                )));
            }
        }
        Ok(())
    }
}

/// Exact transportation-cost norm together with an optimal plan.
pub fn tc_norm(space: &FiniteMetricSpace, problem: &TransportProblem) -> (Rat, TransportPlan) {
    let mut sources = Vec::new();
    let mut sinks = Vec::new();
    for (p, v) in problem.values() {
        if v.is_positive() {
            sources.push((p, v.clone()));
        } else {
            sinks.push((p, -v.clone()));
        }
    }
    if sources.is_empty() {
        return (
            Rat::zero(),
            TransportPlan {
                moves: Vec::new(),
                cost: Rat::zero(),
            },
        );
    }
    let supply: Vec<Rat> = sources.iter().map(|(_, a)| a.clone()).collect();
    let demand: Vec<Rat> = sinks.iter().map(|(_, a)| a.clone()).collect();
    let sol = solve_transportation(&supply, &demand, &|i, j| {
        space.dist(sources[i].0, sinks[j].0).clone()
    });
    let moves = sol
        .flows
        .into_iter()
        .map(|(i, j, a)| (sources[i].0, sinks[j].0, a))
        .collect();
    (
        sol.cost.clone(),
        TransportPlan {
            moves,
            cost: sol.cost,
        },
    )
}

/// Floating-point backend for the same LP; used only for cross-checks.
pub fn tc_norm_f64(space: &FiniteMetricSpace, problem: &TransportProblem) -> f64 {
    let mut sources = Vec::new();
    let mut sinks = Vec::new();
    for (p, v) in problem.values() {
        if v.is_positive() {
            sources.push((p, rat_f64(v)));
        } else {
            sinks.push((p, -rat_f64(v)));
        }
    }
    if sources.is_empty() {
        return 0.0;
    }
    let supply: Vec<f64> = sources.iter().map(|&(_, a)| a).collect();
    let demand: Vec<f64> = sinks.iter().map(|&(_, a)| a).collect();
    let sol = solve_transportation(&supply, &demand, &|i, j| {
        rat_f64(space.dist(sources[i].0, sinks[j].0))
    });
    sol.cost
}

/// Independent oracle for tiny problems: enumerate every processing order of
/// the source/sink cells, greedily saturating each cell; every vertex of the
/// transportation polytope arises this way. Support must stay small.
pub fn brute_force_tc_norm(space: &FiniteMetricSpace, problem: &TransportProblem) -> Rat {
    let mut sources = Vec::new();
    let mut sinks = Vec::new();
    for (p, v) in problem.values() {
        if v.is_positive() {
            sources.push((p, v.clone()));
        } else {
            sinks.push((p, -v.clone()));
        }
    }
    if sources.is_empty() {
        return Rat::zero();
    }
    assert!(
        sources.len() * sinks.len() <= 6,
        "brute force oracle is for tiny supports"
    );
    let cells: Vec<(usize, usize)> = (0..sources.len())
        .flat_map(|i| (0..sinks.len()).map(move |j| (i, j)))
        .collect();
    let mut order: Vec<usize> = (0..cells.len()).collect();
    let mut best: Option<Rat> = None;
    permute(&mut order, 0, &mut |perm| {
        let mut a: Vec<Rat> = sources.iter().map(|(_, x)| x.clone()).collect();
        let mut b: Vec<Rat> = sinks.iter().map(|(_, x)| x.clone()).collect();
        let mut cost = Rat::zero();
        for &idx in perm {
            let (i, j) = cells[idx];
            let t = if a[i] <= b[j] {
                a[i].clone()
            } else {
                b[j].clone()
            };
            if t.is_zero() {
                continue;
            }
            cost += &t * space.dist(sources[i].0, sinks[j].0);
            a[i] -= &t;
            b[j] -= &t;
        }
        debug_assert!(a.iter().all(|x| x.is_zero()));
        if best.as_ref().is_none_or(|b| cost < *b) {
            best = Some(cost);
        }
    });
    best.unwrap()
}

fn permute(items: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == items.len() {
        f(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, f);
        items.swap(k, i);
    }
}

/// Boundary of an edge vector: `sum_e x(e) (1_tail - 1_head)`, the
/// transportation problem the vector solves when read as a plan.
pub fn boundary(g: &RecursiveGraph, x: &EdgeVector) -> TransportProblem {
    let mut values: Vec<(usize, Rat)> = Vec::with_capacity(2 * x.support_len());
    for (e, c) in x.support() {
        values.push((g.tail(e), c.clone()));
        values.push((g.head(e), -c.clone()));
    }
    TransportProblem::new(g.vertex_count(), values).expect("boundaries are zero-sum")
}

/// A fundamental cycle basis from a BFS spanning tree: one signed indicator
/// per non-tree edge. Works for any connected graph.
pub fn fundamental_cycle_basis(g: &RecursiveGraph) -> Vec<EdgeVector> {
    let adj = g.adjacency();
    let n = g.vertex_count();
    let mut parent: Vec<Option<(usize, usize, bool)>> = vec![None; n]; // (vertex, edge, forward)
    let mut in_tree = vec![false; g.edge_count()];
    let mut visited = vec![false; n];
    visited[0] = true;
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        for &(v, e, fwd) in &adj[u] {
            if !visited[v] {
                visited[v] = true;
                parent[v] = Some((u, e, fwd));
                in_tree[e] = true;
                queue.push_back(v);
            }
        }
    }
    let path_up = |mut v: usize| -> Vec<(usize, bool)> {
        // edges from v up to the root, flagged with whether the walk goes
        // against the reference orientation
        let mut out = Vec::new();
        while let Some((u, e, fwd)) = parent[v] {
            out.push((e, fwd));
            v = u;
        }
        out
    };
    let mut basis = Vec::new();
    for e in 0..g.edge_count() {
        if in_tree[e] {
            continue;
        }
        let (u, v) = (g.tail(e), g.head(e));
        let mut coeffs: BTreeMap<usize, Rat> = BTreeMap::new();
        coeffs.insert(e, int(1));
        // Cycle: e from u to v, then tree path v -> root -> u; the shared
        // part of the two root paths cancels exactly.
        for (pe, fwd) in path_up(v) {
            // walking v -> root traverses (parent -> v) edges backwards
            let delta = if fwd { int(-1) } else { int(1) };
            let cur = coeffs.remove(&pe).unwrap_or_else(Rat::zero) + delta;
            if !cur.is_zero() {
                coeffs.insert(pe, cur);
            }
        }
        for (pe, fwd) in path_up(u) {
            let delta = if fwd { int(1) } else { int(-1) };
            let cur = coeffs.remove(&pe).unwrap_or_else(Rat::zero) + delta;
            if !cur.is_zero() {
                coeffs.insert(pe, cur);
            }
        }
        basis.push(EdgeVector::from_entries(g.edge_count(), coeffs));
    }
    basis
}

/// Quotient norm `min { ||x - z||_1 : z in Z(G) }`, via a dense exact
/// simplex over cycle-basis coefficients with split variables.
pub fn quotient_norm(g: &RecursiveGraph, x: &EdgeVector) -> Rat {
    let cycles = fundamental_cycle_basis(g);
    let m = g.edge_count();
    let z = cycles.len();
    let ncols = 2 * m + 2 * z;
    let mut rows: Vec<Vec<Rat>> = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    for e in 0..m {
        let xe = x.get(e);
        let flip = xe.is_negative();
        let sign = if flip { int(-1) } else { int(1) };
        let mut row = vec![Rat::zero(); ncols];
        row[e] = sign.clone(); // p_e
        row[m + e] = -sign.clone(); // q_e
        for (k, cyc) in cycles.iter().enumerate() {
            let b = cyc.get(e);
            if !b.is_zero() {
                row[2 * m + k] = &b * &sign;
                row[2 * m + z + k] = -(&b * &sign);
            }
        }
        rhs.push(if flip { -xe } else { xe });
        basis.push(if flip { m + e } else { e });
        rows.push(row);
    }
    let mut cost = vec![Rat::zero(); ncols];
    for c in cost.iter_mut().take(2 * m) {
        *c = int(1);
    }
    let sol = lp::solve_with_basis(rows, rhs, &cost, basis).expect("quotient LP is bounded");
    sol.objective
}

/// Route each move of a plan along the lexicographically smallest shortest
/// path, producing an edge vector whose boundary is the plan's problem. For
/// optimal plans its l1 norm equals the plan cost.
pub fn expand_plan(g: &RecursiveGraph, moves: &[(usize, usize, Rat)]) -> EdgeVector {
    let mut f = EdgeVector::zero(g.edge_count());
    for (u, v, a) in moves {
        if a.is_zero() || u == v {
            continue;
        }
        let path = g.lex_shortest_path(*u, *v);
        for w in path.windows(2) {
            let (e, fwd) = g.edge_between(w[0], w[1]).expect("path steps are edges");
            f.add_to(e, &(if fwd { a.clone() } else { -a.clone() }));
        }
    }
    f
}

/// All essential pairs: `d(u,v)` strictly below every relayed distance.
pub fn essential_edges(space: &FiniteMetricSpace) -> Vec<(usize, usize)> {
    let n = space.len();
    let mut out = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let direct = space.dist(u, v);
            let essential = (0..n)
                .filter(|&w| w != u && w != v)
                .all(|w| *direct < space.dist(u, w) + space.dist(w, v));
            if essential {
                out.push((u, v));
            }
        }
    }
    out
}

/// Number of symmetric pairs of extreme points of the TC unit ball, which
/// equals the number of essential edges.
pub fn extreme_pair_count(space: &FiniteMetricSpace) -> usize {
    essential_edges(space).len()
}

/// Outcome of the weighted-tree test.
#[derive(Debug, Clone, PartialEq)]
pub enum TreeWitness {
    /// The essential edges form a spanning tree reproducing the metric.
    Tree(Vec<(usize, usize)>),
    /// Wrong number of essential edges for a tree.
    WrongCount { essential: usize, expected: usize },
    /// Essential edges do not connect the space.
    NotSpanning,
    /// Tree path distance disagrees with the metric on this pair.
    MetricMismatch {
        u: usize,
        v: usize,
        tree: Rat,
        actual: Rat,
    },
}

/// Whether the space is a weighted tree with its path metric: essential
/// edges must form a spanning tree whose path distances reproduce the
/// metric.
pub fn is_weighted_tree_metric(space: &FiniteMetricSpace) -> (bool, TreeWitness) {
    let n = space.len();
    let ess = essential_edges(space);
    if ess.len() != n.saturating_sub(1) {
        return (
            false,
            TreeWitness::WrongCount {
                essential: ess.len(),
                expected: n - 1,
            },
        );
    }
    let mut adj: Vec<Vec<(usize, Rat)>> = vec![Vec::new(); n];
    for &(u, v) in &ess {
        adj[u].push((v, space.dist(u, v).clone()));
        adj[v].push((u, space.dist(u, v).clone()));
    }
    for start in 0..n {
        let mut dist: Vec<Option<Rat>> = vec![None; n];
        dist[start] = Some(Rat::zero());
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            let du = dist[u].clone().unwrap();
            for (v, w) in &adj[u] {
                if dist[*v].is_none() {
                    dist[*v] = Some(&du + w);
                    stack.push(*v);
                }
            }
        }
        for v in 0..n {
            match &dist[v] {
                None => return (false, TreeWitness::NotSpanning),
                Some(dv) => {
                    if dv != space.dist(start, v) {
                        return (
                            false,
                            TreeWitness::MetricMismatch {
                                u: start,
                                v,
                                tree: dv.clone(),
                                actual: space.dist(start, v).clone(),
                            },
                        );
                    }
                }
            }
        }
    }
    (true, TreeWitness::Tree(ess))
}

/// Metric of a weighted tree given by its edges.
pub fn path_metric_of_tree(points: usize, edges: &[(usize, usize, Rat)]) -> FiniteMetricSpace {
    assert_eq!(edges.len(), points - 1);
    let mut adj: Vec<Vec<(usize, Rat)>> = vec![Vec::new(); points];
    for (u, v, w) in edges {
        assert!(w.is_positive());
        adj[*u].push((*v, w.clone()));
        adj[*v].push((*u, w.clone()));
    }
    let mut dist = vec![vec![Rat::zero(); points]; points];
    for start in 0..points {
        let mut seen = vec![false; points];
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for (v, w) in &adj[u] {
                if !seen[*v] {
                    seen[*v] = true;
                    dist[start][*v] = &dist[start][u] + w;
                    stack.push(*v);
                }
            }
        }
        assert!(seen.iter().all(|&s| s), "edges must span the tree");
    }
    let labels = (0..points).map(|p| format!("t{p}")).collect();
    FiniteMetricSpace::new(labels, dist)
}

/// On a weighted tree, the TC norm is the l1 norm of the edge-flow
/// coordinates: the flow through an edge is the net value on one side.
pub fn tree_flow_l1(
    points: usize,
    edges: &[(usize, usize, Rat)],
    problem: &TransportProblem,
) -> Rat {
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); points]; // (other, edge idx)
    for (i, (u, v, _)) in edges.iter().enumerate() {
        adj[*u].push((*v, i));
        adj[*v].push((*u, i));
    }
    let mut order = Vec::with_capacity(points);
    let mut parent_edge: Vec<Option<usize>> = vec![None; points];
    let mut seen = vec![false; points];
    seen[0] = true;
    let mut stack = vec![0usize];
    while let Some(u) = stack.pop() {
        order.push(u);
        for &(v, e) in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                parent_edge[v] = Some(e);
                stack.push(v);
            }
        }
    }
    let mut subtree: Vec<Rat> = (0..points).map(|p| problem.value(p)).collect();
    let mut cost = Rat::zero();
    for &u in order.iter().rev() {
        if let Some(e) = parent_edge[u] {
            cost += subtree[u].abs() * &edges[e].2;
            let (a, b, _) = &edges[e];
            let parent = if *a == u { *b } else { *a };
            let val = subtree[u].clone();
            subtree[parent] += val;
        }
    }
    cost
}

/// Report of the biorthogonality obstruction: the TC norm of
/// `g_n - (1/2) sum_j (3/2)^{n-1-j} sum_i eps_j^i g_j^i` against the bound
/// `(3/4)^{n-1} ||g_n||_1`, with every intermediate l1 identity checked.
#[derive(Debug, Clone)]
pub struct BadequivReport {
    pub n: usize,
    pub lhs: Rat,
    pub rhs: Rat,
    /// For each level j = n-1 .. 1, the remainder's l1 norm and its closed
    /// form `(3/4)^{n-j} ||g_n||_1`.
    pub l1_identities: Vec<(usize, Rat, Rat)>,
}

/// Build the sign pattern recursively: the remainder of `g_n` after each
/// level is a signed multiple of the `f` profile on every surviving
/// sub-copy, so the sign for that copy's `g` is read off the copy's lowest
/// edge. Each intermediate identity is asserted exactly.
pub fn badequiv_check(g: &RecursiveGraph, basis: &OrthoBasis) -> Result<BadequivReport> {
    let n = basis.n();
    let gn = crate::spaces::named_vector(NamedRole::G, n, usize::MAX)?.vector;
    let gn_l1 = gn.l1();
    let mut remainder = gn;
    let mut identities = Vec::new();

    for j in (1..=n.saturating_sub(1)).rev() {
        let factor = rat(1, 2) * crate::rational::fpow(3, 2, (n - 1 - j) as u32);
        for addr in g.sub_copies(j)? {
            let range = g.sub_copy_edges(&addr);
            let lowest = remainder.get(range.start);
            if lowest.is_zero() {
                // this sub-copy no longer carries mass
                continue;
            }
            let eps = if lowest.is_positive() {
                int(1)
            } else {
                int(-1)
            };
            let gj = &basis.element(basis.cut_g_id(j, addr.value())).vector;
            let term = gj.scale(&(&eps * &factor));
            remainder = remainder.sub(&term);
        }
        let want = crate::rational::fpow(3, 4, (n - j) as u32) * &gn_l1;
        let got = remainder.l1();
        if got != want {
            return Err(Error::Mismatch(format!(
                "level {j}: remainder l1 is {got}, expected {want}"
            )));
        }
        identities.push((j, got, want));
    }

    let space = g.shortest_path_metric();
    let problem = boundary(g, &remainder);
    let (lhs, plan) = tc_norm(&space, &problem);
    plan.verify(&space, &problem)?;
    let rhs = crate::rational::fpow(3, 4, (n - 1) as u32) * &gn_l1;
    if lhs > rhs {
        return Err(Error::Mismatch(format!("badequiv violated: {lhs} > {rhs}")));
    }
    Ok(BadequivReport {
        n,
        lhs,
        rhs,
        l1_identities: identities,
    })
}
