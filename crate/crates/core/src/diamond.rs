//! Interval-model analysis of the multibranching diamond graphs.
//!
//! The edge space of `D_{n,k}` is identified with step functions on the unit interval
//! that are constant on the `(2k)^n` cells of the uniform grid; edge `j`
//! corresponds to the L1-normalized indicator of cell `j`. The cut space
//! has the orthogonal basis `{h_0} ∪ {h_{i,j}}` of two-block differences,
//! the cycle space is spanned by overlapping four-block combinations, and
//! the orthogonal projection onto the cut space has an exactly computable
//! l1 operator norm.

use num::{Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rational::{int, rat, Rat};

/// A step function on the unit interval with rational values on the `(2k)^n` cells.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomVector {
    n: usize,
    k: usize,
    cells: Vec<Rat>,
}

impl AtomVector {
    pub fn zero(n: usize, k: usize) -> Self {
        AtomVector {
            n,
            k,
            cells: vec![Rat::zero(); (2 * k).pow(n as u32)],
        }
    }

    pub fn from_cells(n: usize, k: usize, cells: Vec<Rat>) -> Self {
        assert_eq!(cells.len(), (2 * k).pow(n as u32));
        AtomVector { n, k, cells }
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn cells(&self) -> &[Rat] {
        &self.cells
    }

    pub fn cell_width(&self) -> Rat {
        Rat::new(1.into(), num::BigInt::from(self.cells.len()))
    }

    /// L1 norm: cell width times the sum of absolute values.
    pub fn l1(&self) -> Rat {
        self.cell_width() * self.cells.iter().map(|c| c.abs()).sum::<Rat>()
    }

    /// Squared L2 norm with the width weight.
    pub fn l2_sq(&self) -> Rat {
        self.cell_width() * self.cells.iter().map(|c| c * c).sum::<Rat>()
    }

    pub fn linf(&self) -> Rat {
        self.cells
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(Rat::zero)
    }

    pub fn inner(&self, other: &AtomVector) -> Rat {
        assert_eq!(self.cells.len(), other.cells.len());
        self.cell_width()
            * self
                .cells
                .iter()
                .zip(&other.cells)
                .map(|(a, b)| a * b)
                .sum::<Rat>()
    }

    pub fn add(&self, other: &AtomVector) -> AtomVector {
        assert_eq!(self.cells.len(), other.cells.len());
        let cells = self
            .cells
            .iter()
            .zip(&other.cells)
            .map(|(a, b)| a + b)
            .collect();
        AtomVector {
            n: self.n,
            k: self.k,
            cells,
        }
    }

    pub fn scale(&self, factor: &Rat) -> AtomVector {
        let cells = self.cells.iter().map(|c| c * factor).collect();
        AtomVector {
            n: self.n,
            k: self.k,
            cells,
        }
    }

    pub fn axpy(&mut self, factor: &Rat, other: &AtomVector) {
        assert_eq!(self.cells.len(), other.cells.len());
        for (a, b) in self.cells.iter_mut().zip(&other.cells) {
            *a += factor * b;
        }
    }
}

fn check_capacity(n: usize, k: usize, edge_cap: usize) -> Result<()> {
    if n < 1 || k < 2 {
        return Err(Error::Range(format!(
            "diamond analysis needs n >= 1, k >= 2 (got n={n}, k={k})"
        )));
    }
    let cells = (2u128 * k as u128)
        .checked_pow(n as u32)
        .unwrap_or(u128::MAX);
    if cells > edge_cap as u128 {
        return Err(Error::Capacity {
            requested: cells,
            cap: edge_cap,
        });
    }
    Ok(())
}

/// The `(2k)^n` L1-normalized cell indicators (the edge vectors).
pub fn edge_vectors(n: usize, k: usize, edge_cap: usize) -> Result<Vec<AtomVector>> {
    check_capacity(n, k, edge_cap)?;
    let count = (2 * k).pow(n as u32);
    let height = int(count as i64);
    Ok((0..count)
        .map(|j| {
            let mut v = AtomVector::zero(n, k);
            v.cells[j] = height.clone();
            v
        })
        .collect())
}

/// Number of cut basis elements: `1 + sum_i k (2k)^{i-1}`.
pub fn cut_basis_count(n: usize, k: usize) -> usize {
    1 + (1..=n)
        .map(|i| k * (2 * k).pow(i as u32 - 1))
        .sum::<usize>()
}

/// Number of cycle system elements: `sum_i (k-1)(2k)^{i-1}`.
pub fn cycle_system_count(n: usize, k: usize) -> usize {
    (1..=n)
        .map(|i| (k - 1) * (2 * k).pow(i as u32 - 1))
        .sum::<usize>()
}

/// Materialize `h_{i,j} = (2k)^{-i} (e_{i,2j-1} - e_{i,2j})`: +1 on the odd
/// scale-`i` block, -1 on the even one.
fn h_vector(n: usize, k: usize, i: usize, j: usize) -> AtomVector {
    let mut v = AtomVector::zero(n, k);
    let block = (2 * k).pow((n - i) as u32); // cells per e_{i,*}
    let lo = (2 * j - 2) * block;
    for c in 0..block {
        v.cells[lo + c] = int(1);
        v.cells[lo + block + c] = int(-1);
    }
    v
}

/// The orthogonal cut basis `{h_0} ∪ {h_{i,j}}`, h_0 first, then levels
/// i = 1..=n with j ascending.
pub fn cut_basis(n: usize, k: usize, edge_cap: usize) -> Result<Vec<AtomVector>> {
    check_capacity(n, k, edge_cap)?;
    let mut out = Vec::with_capacity(cut_basis_count(n, k));
    let mut h0 = AtomVector::zero(n, k);
    for c in h0.cells.iter_mut() {
        *c = int(1);
    }
    out.push(h0);
    for i in 1..=n {
        for j in 1..=k * (2 * k).pow(i as u32 - 1) {
            out.push(h_vector(n, k, i, j));
        }
    }
    Ok(out)
}

/// The cycle system `g_{i,j}`: for `j = a(k-1) + b` the combination
/// `(2k)^{-i}(e_{i,2ka+2b-1} + e_{i,2ka+2b} - e_{i,2ka+2b+1} - e_{i,2ka+2b+2})`,
/// i.e. +1 on the two cells of path `b` and -1 on path `b+1` of block `a`.
pub fn cycle_system(n: usize, k: usize, edge_cap: usize) -> Result<Vec<AtomVector>> {
    check_capacity(n, k, edge_cap)?;
    let mut out = Vec::with_capacity(cycle_system_count(n, k));
    for i in 1..=n {
        let block = (2 * k).pow((n - i) as u32);
        for j in 1..=(k - 1) * (2 * k).pow(i as u32 - 1) {
            let a = (j - 1) / (k - 1);
            let b = j - a * (k - 1);
            let start = 2 * k * a + 2 * b - 2; // 0-based index of e_{i, 2ka+2b-1}
            let mut v = AtomVector::zero(n, k);
            for (offset, sign) in [(0usize, 1i64), (1, 1), (2, -1), (3, -1)] {
                let lo = (start + offset) * block;
                for c in 0..block {
                    v.cells[lo + c] = int(sign);
                }
            }
            out.push(v);
        }
    }
    Ok(out)
}

/// Orthogonal projection onto the span of an orthogonal family (used as a
/// reference implementation in tests).
pub fn project_onto(v: &AtomVector, family: &[AtomVector]) -> AtomVector {
    let mut out = AtomVector::zero(v.n, v.k);
    for u in family {
        let coeff = v.inner(u) / u.l2_sq();
        out.axpy(&coeff, u);
    }
    out
}

/// Column of the orthogonal cut projection on the edge vector of cell `j`
/// (0-based): `h_0 + (1/2) sum_i (2k)^i sgn_i h_{i,r_i}` over the nested
/// blocks containing the cell. The coefficients are the exact inner
/// products `<e_j, u> / ||u||_2^2` of the orthogonal basis.
pub fn projection_column(n: usize, k: usize, j: usize) -> AtomVector {
    let mut out = AtomVector::zero(n, k);
    for c in out.cells.iter_mut() {
        *c = int(1); // h_0 component
    }
    for i in 1..=n {
        let block = (2 * k).pow((n - i) as u32);
        let b = j / block; // 0-based scale-i block of the cell
        let pair = b / 2 + 1; // h_{i,pair} covers it
        let sign = if b.is_multiple_of(2) { 1 } else { -1 };
        let coeff = rat(sign, 2) * crate::rational::ipow(2 * k as i64, i as u32);
        out.axpy(&coeff, &h_vector(n, k, i, pair));
    }
    out
}

/// Exact l1 operator norm of the cut projection: the maximum of the column
/// norms over all edge vectors, with a witness column.
pub fn projection_l1_norm(n: usize, k: usize, edge_cap: usize) -> Result<(Rat, usize)> {
    check_capacity(n, k, edge_cap)?;
    let count = (2 * k).pow(n as u32);
    Ok((0..count)
        .into_par_iter()
        .map(|j| (projection_column(n, k, j).l1(), j))
        .reduce(
            || (Rat::zero(), usize::MAX),
            |a, b| {
                if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            },
        ))
}

/// Closed form for the projection constant of the Lipschitz space:
/// `(2k-2)n/(2k-1) + (4k^2-6k+3)/(2k-1)^2 + (2k-2)/((2k-1)^2 (2k)^n)`.
pub fn lambda_formula(n: usize, k: usize) -> Rat {
    let kk = k as i64;
    let d = 2 * kk - 1;
    rat(2 * kk - 2, d) * int(n as i64)
        + rat(4 * kk * kk - 6 * kk + 3, d * d)
        + rat(2 * kk - 2, d * d) / crate::rational::ipow(2 * kk, n as u32)
}

#[derive(Debug, Clone)]
pub struct LambdaReport {
    pub n: usize,
    pub k: usize,
    pub computed: Rat,
    pub formula: Rat,
    pub witness_column: usize,
}

/// Compute the exact projection norm and assert it matches the closed form.
pub fn lambda_diamond(n: usize, k: usize, edge_cap: usize) -> Result<LambdaReport> {
    let (computed, witness_column) = projection_l1_norm(n, k, edge_cap)?;
    let formula = lambda_formula(n, k);
    if computed != formula {
        return Err(Error::Mismatch(format!(
            "projection norm {computed} differs from closed form {formula} at n={n}, k={k}"
        )));
    }
    Ok(LambdaReport {
        n,
        k,
        computed,
        formula,
        witness_column,
    })
}

/// Sorted multiset of |cell value| with multiplicities, for the column
/// distribution check.
pub fn column_abs_distribution(col: &AtomVector) -> Vec<(Rat, usize)> {
    let mut values: Vec<Rat> = col.cells.iter().map(|c| c.abs()).collect();
    values.sort();
    let mut out: Vec<(Rat, usize)> = Vec::new();
    for v in values {
        match out.last_mut() {
            Some((w, count)) if *w == v => *count += 1,
            _ => out.push((v, 1)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::RecursiveGraph;

    const CAP: usize = 100_000;

    #[test]
    fn edge_vectors_are_normalized_partition() {
        let vs = edge_vectors(1, 2, CAP).unwrap();
        assert_eq!(vs.len(), 4);
        let mut sum = AtomVector::zero(1, 2);
        for v in &vs {
            assert_eq!(v.l1(), int(1));
            assert_eq!(v.linf(), int(4));
            sum = sum.add(v);
        }
        // supports partition [0,1]: the sum is the constant height function
        assert!(sum.cells().iter().all(|c| *c == int(4)));
    }

    #[test]
    fn counts_match_graph_dimensions() {
        for n in 1..=3 {
            for k in 2..=4 {
                let g = RecursiveGraph::diamond(n, k, CAP).unwrap();
                assert_eq!((2 * k).pow(n as u32), g.edge_count());
                assert_eq!(cut_basis_count(n, k), g.vertex_count() - 1);
                assert_eq!(
                    cycle_system_count(n, k),
                    g.edge_count() - g.vertex_count() + 1
                );
                assert_eq!(
                    cut_basis_count(n, k) + cycle_system_count(n, k),
                    g.edge_count()
                );
            }
        }
    }

    #[test]
    fn cut_basis_is_orthogonal() {
        for (n, k) in [(1, 2), (2, 2), (1, 4), (2, 3), (3, 2)] {
            let basis = cut_basis(n, k, CAP).unwrap();
            assert_eq!(basis.len(), cut_basis_count(n, k));
            assert_eq!(basis[0].linf(), int(1)); // h_0
            for (i, u) in basis.iter().enumerate() {
                for v in &basis[i + 1..] {
                    assert!(u.inner(v).is_zero());
                }
            }
        }
    }

    #[test]
    fn cycle_system_orthogonal_to_cuts_and_overlaps() {
        for (n, k) in [(1, 2), (2, 2), (3, 2), (2, 3), (1, 4)] {
            let cuts = cut_basis(n, k, CAP).unwrap();
            let cycles = cycle_system(n, k, CAP).unwrap();
            assert_eq!(cycles.len(), cycle_system_count(n, k));
            for g in &cycles {
                for u in &cuts {
                    assert!(g.inner(u).is_zero());
                }
            }
            if k == 2 {
                // branching 2: the system is orthogonal
                for (i, u) in cycles.iter().enumerate() {
                    for v in &cycles[i + 1..] {
                        assert!(u.inner(v).is_zero());
                    }
                }
            }
        }
        // k >= 3: consecutive vectors overlap when b <= k-2
        let cycles = cycle_system(1, 3, CAP).unwrap();
        assert_eq!(cycles.len(), 2);
        assert!(!cycles[0].inner(&cycles[1]).is_zero());
        let cycles = cycle_system(1, 4, CAP).unwrap();
        assert_eq!(cycles.len(), 3);
        for pair in cycles.windows(2) {
            assert!(!pair[0].inner(&pair[1]).is_zero());
        }
        // but the first and last paths of the same block do not share cells
        assert!(cycles[0].inner(&cycles[2]).is_zero());
    }

    #[test]
    fn cycle_system_spans_the_complement() {
        // rank of the combined family equals the cell count at small sizes
        for (n, k) in [(1, 2), (1, 3), (2, 2)] {
            let cuts = cut_basis(n, k, CAP).unwrap();
            let cycles = cycle_system(n, k, CAP).unwrap();
            let cols: Vec<Vec<Rat>> = cuts
                .iter()
                .chain(&cycles)
                .map(|v| v.cells().to_vec())
                .collect();
            assert_eq!(rank(cols), (2 * k).pow(n as u32));
        }
    }

    fn rank(mut cols: Vec<Vec<Rat>>) -> usize {
        let rows = cols.first().map_or(0, Vec::len);
        let mut rank = 0;
        for r in 0..rows {
            let Some(p) = (rank..cols.len()).find(|&c| !cols[c][r].is_zero()) else {
                continue;
            };
            cols.swap(rank, p);
            let inv = cols[rank][r].clone();
            for c in 0..cols.len() {
                if c != rank && !cols[c][r].is_zero() {
                    let f = &cols[c][r] / &inv;
                    for rr in 0..rows {
                        let delta = &cols[rank][rr] * &f;
                        cols[c][rr] = &cols[c][rr] - delta;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn projection_column_matches_reference() {
        for (n, k) in [(1, 2), (2, 2), (1, 3), (2, 3)] {
            let cuts = cut_basis(n, k, CAP).unwrap();
            for (j, e) in edge_vectors(n, k, CAP).unwrap().iter().enumerate() {
                let fast = projection_column(n, k, j);
                let slow = project_onto(e, &cuts);
                assert_eq!(fast, slow, "column {j} at n={n}, k={k}");
            }
        }
    }

    #[test]
    fn projection_fixes_cuts_and_kills_cycles() {
        for (n, k) in [(1, 2), (2, 2), (2, 3)] {
            let cuts = cut_basis(n, k, CAP).unwrap();
            for u in &cuts {
                assert_eq!(&project_onto(u, &cuts), u);
            }
            for g in &cycle_system(n, k, CAP).unwrap() {
                let img = project_onto(g, &cuts);
                assert!(img.cells().iter().all(|c| c.is_zero()));
            }
            // idempotence and self-adjointness: <P(e0), e1> = <e0, P(e1)>
            let col = projection_column(n, k, 0);
            assert_eq!(project_onto(&col, &cuts), col);
            let es = edge_vectors(n, k, CAP).unwrap();
            assert_eq!(col.inner(&es[1]), projection_column(n, k, 1).inner(&es[0]));
        }
    }

    #[test]
    fn first_column_closed_form() {
        // P(e_{n,1}) = h_0 + (1/2) sum_i (2k)^i h_{i,1}
        let (n, k) = (2, 3);
        let col = projection_column(n, k, 0);
        let mut want = cut_basis(n, k, CAP).unwrap()[0].clone();
        for i in 1..=n {
            want.axpy(
                &(crate::rational::ipow(2 * k as i64, i as u32) / int(2)),
                &h_vector(n, k, i, 1),
            );
        }
        assert_eq!(col, want);
    }

    #[test]
    fn lambda_values() {
        let rep = lambda_diamond(1, 2, CAP).unwrap();
        assert_eq!(rep.computed, rat(3, 2));
        for n in 1..=3 {
            for k in 2..=3 {
                let rep = lambda_diamond(n, k, CAP).unwrap();
                assert_eq!(rep.computed, rep.formula);
            }
        }
    }

    #[test]
    fn column_distribution_is_uniform() {
        for (n, k) in [(2, 2), (1, 3)] {
            let first = column_abs_distribution(&projection_column(n, k, 0));
            for j in 1..(2 * k).pow(n as u32) {
                let d = column_abs_distribution(&projection_column(n, k, j));
                assert_eq!(d, first, "column {j}");
            }
        }
    }

    #[test]
    fn interval_model_bridges_to_the_graph() {
        // Reading cell c as edge c, the cycle system must lie in the graph
        // cycle space (zero boundary) and the cut basis must be orthogonal
        // to every fundamental cycle of the graph.
        use crate::edgespace::EdgeVector;
        use crate::transport::{boundary, fundamental_cycle_basis};
        for (n, k) in [(1, 2), (2, 2), (1, 3), (2, 3), (1, 4)] {
            let g = RecursiveGraph::diamond(n, k, CAP).unwrap();
            let to_edges = |v: &AtomVector| -> EdgeVector {
                EdgeVector::from_entries(g.edge_count(), v.cells().iter().cloned().enumerate())
            };
            for gv in &cycle_system(n, k, CAP).unwrap() {
                assert!(
                    boundary(&g, &to_edges(gv)).is_zero(),
                    "cycle system vectors are graph cycles at n={n}, k={k}"
                );
            }
            let fundamentals = fundamental_cycle_basis(&g);
            for hv in &cut_basis(n, k, CAP).unwrap() {
                let he = to_edges(hv);
                for cyc in &fundamentals {
                    assert!(
                        he.inner(cyc).is_zero(),
                        "cut vectors are orthogonal to graph cycles at n={n}, k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn capacity_errors() {
        assert!(matches!(
            projection_l1_norm(10, 4, CAP),
            Err(Error::Capacity { .. })
        ));
        assert!(cut_basis(0, 2, CAP).is_err());
    }
}
