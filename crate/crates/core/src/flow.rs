//! Transportation simplex on the bipartite supply/demand instance.
//!
//! The solver is generic over the scalar so the same pivoting code runs
//! exactly on rationals and approximately on f64. The basis is the classic
//! spanning tree over supply and demand nodes; entering arcs follow
//! Dantzig's rule with a Bland fallback after a degenerate streak.

use num::{Signed, Zero};

use crate::rational::Rat;

/// Scalar requirements for the transportation solver.
pub trait FlowScalar: Clone + PartialOrd {
    fn zero_val() -> Self;
    fn is_zero_val(&self) -> bool;
    fn is_negative_val(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    /// Pricing tolerance: reduced costs above `-tol` count as nonnegative.
    fn tolerance() -> Self;
}

impl FlowScalar for Rat {
    fn zero_val() -> Self {
        <Rat as Zero>::zero()
    }
    fn is_zero_val(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_negative_val(&self) -> bool {
        Signed::is_negative(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn tolerance() -> Self {
        <Rat as Zero>::zero()
    }
}

impl FlowScalar for f64 {
    fn zero_val() -> Self {
        0.0
    }
    fn is_zero_val(&self) -> bool {
        *self == 0.0
    }
    fn is_negative_val(&self) -> bool {
        *self < 0.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn tolerance() -> Self {
        1e-12
    }
}

const DEGENERATE_LIMIT: usize = 60;

#[derive(Debug, Clone)]
struct BasicCell<T> {
    row: usize,
    col: usize,
    flow: T,
}

pub struct TransportSolution<T> {
    /// Basic flows with positive amount, sorted by (row, col).
    pub flows: Vec<(usize, usize, T)>,
    pub cost: T,
    /// Optimal dual potentials (row, col); certify optimality via
    /// `u[i] + v[j] <= c[i][j]` on every cell.
    pub potentials: (Vec<T>, Vec<T>),
}

/// Solve `min sum c[i][j] x[i][j]` with row sums `supply` and column sums
/// `demand` (both strictly positive, equal totals).
pub fn solve_transportation<T: FlowScalar>(
    supply: &[T],
    demand: &[T],
    cost: &dyn Fn(usize, usize) -> T,
) -> TransportSolution<T> {
    let m = supply.len();
    let n = demand.len();
    if m == 0 || n == 0 {
        return TransportSolution {
            flows: Vec::new(),
            cost: T::zero_val(),
            potentials: (Vec::new(), Vec::new()),
        };
    }
    let costs: Vec<Vec<T>> = (0..m)
        .map(|i| (0..n).map(|j| cost(i, j)).collect())
        .collect();

    // Northwest-corner start: deterministic, m + n - 1 basic cells.
    let mut basis: Vec<BasicCell<T>> = Vec::with_capacity(m + n - 1);
    {
        let mut a = supply.to_vec();
        let mut b = demand.to_vec();
        let (mut i, mut j) = (0usize, 0usize);
        loop {
            let take = if a[i] <= b[j] {
                a[i].clone()
            } else {
                b[j].clone()
            };
            basis.push(BasicCell {
                row: i,
                col: j,
                flow: take.clone(),
            });
            a[i] = a[i].sub(&take);
            b[j] = b[j].sub(&take);
            if i == m - 1 && j == n - 1 {
                break;
            }
            if a[i].is_zero_val() && i + 1 < m {
                i += 1;
            } else if j + 1 < n {
                j += 1;
            } else {
                i += 1;
            }
        }
        debug_assert_eq!(basis.len(), m + n - 1);
    }

    let mut degenerate_run = 0usize;
    loop {
        // Tree adjacency over nodes: rows 0..m, cols m..m+n.
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); m + n];
        for (idx, cell) in basis.iter().enumerate() {
            adj[cell.row].push(idx);
            adj[m + cell.col].push(idx);
        }

        // Potentials via tree traversal from row 0.
        let mut u: Vec<Option<T>> = vec![None; m];
        let mut v: Vec<Option<T>> = vec![None; n];
        u[0] = Some(T::zero_val());
        let mut stack = vec![0usize];
        while let Some(node) = stack.pop() {
            for &idx in &adj[node] {
                let cell = &basis[idx];
                let (r, c) = (cell.row, cell.col);
                match (u[r].clone(), v[c].clone()) {
                    (Some(ur), None) => {
                        v[c] = Some(costs[r][c].sub(&ur));
                        stack.push(m + c);
                    }
                    (None, Some(vc)) => {
                        u[r] = Some(costs[r][c].sub(&vc));
                        stack.push(r);
                    }
                    _ => {}
                }
            }
        }
        let u: Vec<T> = u
            .into_iter()
            .map(|x| x.expect("basis spans all rows"))
            .collect();
        let v: Vec<T> = v
            .into_iter()
            .map(|x| x.expect("basis spans all cols"))
            .collect();

        // Entering arc.
        let tol = T::tolerance();
        let neg_tol = T::zero_val().sub(&tol);
        let mut entering: Option<(usize, usize, T)> = None;
        let bland = degenerate_run >= DEGENERATE_LIMIT;
        'scan: for i in 0..m {
            for j in 0..n {
                let rc = costs[i][j].sub(&u[i]).sub(&v[j]);
                if rc < neg_tol {
                    if bland {
                        entering = Some((i, j, rc));
                        break 'scan;
                    }
                    let better = match &entering {
                        None => true,
                        Some((_, _, best)) => rc < *best,
                    };
                    if better {
                        entering = Some((i, j, rc));
                    }
                }
            }
        }
        let Some((ei, ej, _)) = entering else {
            // Optimal: collect strictly positive flows.
            let mut flows: Vec<(usize, usize, T)> = basis
                .iter()
                .filter(|cell| !cell.flow.is_zero_val())
                .map(|cell| (cell.row, cell.col, cell.flow.clone()))
                .collect();
            flows.sort_by_key(|&(i, j, _)| (i, j));
            let mut total = T::zero_val();
            for (i, j, f) in &flows {
                total = total.add(&costs[*i][*j].mul(f));
            }
            return TransportSolution {
                flows,
                cost: total,
                potentials: (u, v),
            };
        };

        // Unique tree path from row node ei to col node m + ej.
        let target = m + ej;
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; m + n]; // (node, via cell)
        let mut visited = vec![false; m + n];
        visited[ei] = true;
        let mut stack = vec![ei];
        while let Some(node) = stack.pop() {
            if node == target {
                break;
            }
            for &idx in &adj[node] {
                let cell = &basis[idx];
                let other = if node < m { m + cell.col } else { cell.row };
                if !visited[other] {
                    visited[other] = true;
                    parent[other] = Some((node, idx));
                    stack.push(other);
                }
            }
        }
        let mut path_cells = Vec::new();
        let mut node = target;
        while node != ei {
            let (prev, idx) = parent[node].expect("tree path exists");
            path_cells.push(idx);
            node = prev;
        }
        path_cells.reverse();

        // Signs alternate along the path starting with -theta next to the
        // entering row; odd path length ends with -theta at the entering
        // column, keeping all marginals intact.
        debug_assert!(path_cells.len() % 2 == 1);
        let mut theta: Option<(T, usize)> = None; // (amount, leaving cell idx)
        for (pos, &idx) in path_cells.iter().enumerate() {
            if pos % 2 == 0 {
                let f = basis[idx].flow.clone();
                let better = match &theta {
                    None => true,
                    Some((best, bidx)) => {
                        f < *best
                            || (f == *best
                                && (basis[idx].row, basis[idx].col)
                                    < (basis[*bidx].row, basis[*bidx].col))
                    }
                };
                if better {
                    theta = Some((f, idx));
                }
            }
        }
        let (theta, leaving) = theta.expect("bounded pivot");
        if theta.is_zero_val() {
            degenerate_run += 1;
        } else {
            degenerate_run = 0;
        }
        for (pos, &idx) in path_cells.iter().enumerate() {
            if pos % 2 == 0 {
                basis[idx].flow = basis[idx].flow.sub(&theta);
            } else {
                basis[idx].flow = basis[idx].flow.add(&theta);
            }
        }
        basis[leaving] = BasicCell {
            row: ei,
            col: ej,
            flow: theta,
        };
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn single_cell() {
        let sol = solve_transportation(&[int(2)], &[int(2)], &|_, _| rat(3, 2));
        assert_eq!(sol.cost, int(3));
        assert_eq!(sol.flows, vec![(0, 0, int(2))]);
    }

    #[test]
    fn two_by_two_exact() {
        // Costs favor the diagonal.
        let c = [vec![int(1), int(10)], vec![int(10), int(1)]];
        let sol = solve_transportation(&[int(1), int(1)], &[int(1), int(1)], &|i, j| {
            c[i][j].clone()
        });
        assert_eq!(sol.cost, int(2));
    }

    #[test]
    fn duals_certify_optimality() {
        let c = [vec![int(4), int(5), int(7)], vec![int(6), int(2), int(3)]];
        let supply = [rat(5, 2), rat(3, 2)];
        let demand = [int(1), int(2), int(1)];
        let sol = solve_transportation(&supply, &demand, &|i, j| c[i][j].clone());
        let (u, v) = &sol.potentials;
        for i in 0..2 {
            for j in 0..3 {
                assert!(&u[i] + &v[j] <= c[i][j]);
            }
        }
        // Strong duality.
        let dual: Rat = supply.iter().zip(u).map(|(a, ui)| a * ui).sum::<Rat>()
            + demand.iter().zip(v).map(|(b, vj)| b * vj).sum::<Rat>();
        assert_eq!(dual, sol.cost);
        // Marginals.
        let mut row_sum = vec![Rat::zero(); 2];
        let mut col_sum = vec![Rat::zero(); 3];
        for (i, j, f) in &sol.flows {
            row_sum[*i] += f;
            col_sum[*j] += f;
        }
        assert_eq!(row_sum, supply.to_vec());
        assert_eq!(col_sum, demand.to_vec());
    }

    #[test]
    fn float_backend_close_to_exact() {
        let c = [
            vec![int(2), int(9), int(1)],
            vec![int(3), int(2), int(8)],
            vec![int(7), int(2), int(5)],
        ];
        let supply = [int(3), int(4), int(2)];
        let demand = [int(4), int(3), int(2)];
        let exact = solve_transportation(&supply, &demand, &|i, j| c[i][j].clone());
        let supply_f: Vec<f64> = vec![3.0, 4.0, 2.0];
        let demand_f: Vec<f64> = vec![4.0, 3.0, 2.0];
        let cf: Vec<Vec<f64>> = c
            .iter()
            .map(|row| row.iter().map(crate::rational::rat_f64).collect())
            .collect();
        let approx = solve_transportation(&supply_f, &demand_f, &|i, j| cf[i][j]);
        let exact_f = crate::rational::rat_f64(&exact.cost);
        assert!((approx.cost - exact_f).abs() < 1e-9);
    }
}
