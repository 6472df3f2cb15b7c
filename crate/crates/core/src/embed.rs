//! Two fixed finite metric spaces whose transportation cost spaces contain
//! isometric copies of the sup-norm cubes of dimensions 3 and 4.
//!
//! The distance tables and the spanning transportation problems are
//! hard-coded; the verification sweeps every sign pattern and demands TC
//! norm exactly 1.

use num::{Signed, Zero};

use crate::graphs::FiniteMetricSpace;
use crate::rational::{int, rat, Rat};
use crate::transport::{tc_norm, TransportProblem};

fn table_space(labels: &[&str], half_pattern: &dyn Fn(usize, usize) -> bool) -> FiniteMetricSpace {
    let n = labels.len();
    let mut dist = vec![vec![Rat::zero(); n]; n];
    for u in 0..n {
        for v in 0..n {
            if u != v {
                dist[u][v] = if half_pattern(u, v) {
                    rat(1, 2)
                } else {
                    int(1)
                };
            }
        }
    }
    FiniteMetricSpace::new(labels.iter().map(|s| s.to_string()).collect(), dist)
}

/// The 6-point space: two groups {a,b,c,d} and {e,f}; distance 1 inside a
/// group, 1/2 across.
pub fn metric_t() -> FiniteMetricSpace {
    table_space(&["a", "b", "c", "d", "e", "f"], &|u, v| (u < 4) != (v < 4))
}

/// The 8-point space: groups {a,b,c,d} and {e,f,g,h}, same rule.
pub fn metric_f() -> FiniteMetricSpace {
    table_space(&["a", "b", "c", "d", "e", "f", "g", "h"], &|u, v| {
        (u < 4) != (v < 4)
    })
}

/// The three transportation problems spanning the 3-cube on `metric_t`.
pub fn problems_t() -> Vec<TransportProblem> {
    let h = || rat(1, 2);
    vec![
        TransportProblem::new(6, [(0, h()), (1, -h()), (2, h()), (3, -h())]).unwrap(),
        TransportProblem::new(6, [(0, h()), (1, h()), (2, -h()), (3, -h())]).unwrap(),
        TransportProblem::new(6, [(4, int(1)), (5, int(-1))]).unwrap(),
    ]
}

/// The four transportation problems spanning the 4-cube on `metric_f`.
pub fn problems_f() -> Vec<TransportProblem> {
    let h = || rat(1, 2);
    vec![
        TransportProblem::new(8, [(0, h()), (1, -h()), (2, h()), (3, -h())]).unwrap(),
        TransportProblem::new(8, [(0, h()), (1, h()), (2, -h()), (3, -h())]).unwrap(),
        TransportProblem::new(8, [(4, h()), (5, -h()), (6, h()), (7, -h())]).unwrap(),
        TransportProblem::new(8, [(4, h()), (5, h()), (6, -h()), (7, -h())]).unwrap(),
    ]
}

/// Norms of all `2^k` signed combinations, with the largest deviation from
/// 1. A zero deviation means the span is an isometric copy of the k-cube.
pub struct LinftyReport {
    pub patterns: usize,
    pub max_deviation: Rat,
    /// (signs, norm) per pattern, signs as +1/-1.
    pub norms: Vec<(Vec<i8>, Rat)>,
}

pub fn verify_linfty(space: &FiniteMetricSpace, problems: &[TransportProblem]) -> LinftyReport {
    let kdim = problems.len();
    let mut norms = Vec::with_capacity(1 << kdim);
    let mut max_dev = Rat::zero();
    for mask in 0..(1u32 << kdim) {
        let mut combined = TransportProblem::zero(space.len());
        let mut signs = Vec::with_capacity(kdim);
        for (i, p) in problems.iter().enumerate() {
            let s: i8 = if mask & (1 << i) != 0 { -1 } else { 1 };
            signs.push(s);
            combined = combined.add(&p.scale(&int(s as i64)));
        }
        let (norm, plan) = tc_norm(space, &combined);
        plan.verify(space, &combined)
            .expect("optimal plans recompute");
        let dev = (norm.clone() - int(1)).abs();
        if dev > max_dev {
            max_dev = dev;
        }
        norms.push((signs, norm));
    }
    LinftyReport {
        patterns: 1 << kdim,
        max_deviation: max_dev,
        norms,
    }
}

/// Rank of the problem family as vectors over the points.
pub fn problems_rank(space: &FiniteMetricSpace, problems: &[TransportProblem]) -> usize {
    let mut rows: Vec<Vec<Rat>> = problems
        .iter()
        .map(|p| (0..space.len()).map(|v| p.value(v)).collect())
        .collect();
    let cols = space.len();
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = rows[rank][c].clone();
        for r in 0..rows.len() {
            if r != rank && !rows[r][c].is_zero() {
                let f = &rows[r][c] / &inv;
                for cc in 0..cols {
                    let delta = &rows[rank][cc] * &f;
                    rows[r][cc] = &rows[r][cc] - delta;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_match_the_fixed_values() {
        let t = metric_t();
        t.verify_metric().unwrap();
        assert_eq!(t.dist(0, 1), &int(1)); // d(a,b)
        assert_eq!(t.dist(0, 4), &rat(1, 2)); // d(a,e)
        assert_eq!(t.dist(4, 5), &int(1)); // d(e,f)

        let f = metric_f();
        f.verify_metric().unwrap();
        assert_eq!(f.dist(4, 5), &int(1)); // d(e,f)
        assert_eq!(f.dist(0, 4), &rat(1, 2)); // d(a,e)
    }

    #[test]
    fn single_problems_have_norm_one() {
        let t = metric_t();
        for p in problems_t() {
            let (norm, _) = tc_norm(&t, &p);
            assert_eq!(norm, int(1));
        }
        let f = metric_f();
        for p in problems_f() {
            let (norm, _) = tc_norm(&f, &p);
            assert_eq!(norm, int(1));
        }
    }

    #[test]
    fn t_spans_the_three_cube() {
        let t = metric_t();
        let rep = verify_linfty(&t, &problems_t());
        assert_eq!(rep.patterns, 8);
        assert!(rep.max_deviation.is_zero());
        assert_eq!(problems_rank(&t, &problems_t()), 3);
    }

    #[test]
    fn f_spans_the_four_cube() {
        let f = metric_f();
        let rep = verify_linfty(&f, &problems_f());
        assert_eq!(rep.patterns, 16);
        assert!(rep.max_deviation.is_zero());
        assert_eq!(problems_rank(&f, &problems_f()), 4);
    }
}
