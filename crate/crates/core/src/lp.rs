//! Dense exact-rational simplex for small equality-form programs.
//!
//! Minimizes `c . x` subject to `A x = b`, `x >= 0`, starting from a caller
//! supplied basic feasible solution. Entering variables follow Dantzig's
//! rule until a run of degenerate pivots, then Bland's rule takes over so
//! termination is guaranteed; the leaving row always breaks ties by the
//! smallest basic variable index.

use num::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rat;

/// After this many consecutive degenerate pivots, switch to Bland's rule.
const DEGENERATE_LIMIT: usize = 40;

pub struct SimplexSolution {
    pub objective: Rat,
    pub values: Vec<Rat>,
}

/// `rows` must already be reduced with respect to `basis`: the basis column
/// of row `r` is the `r`-th identity column and `rhs[r] >= 0`.
pub fn solve_with_basis(
    mut rows: Vec<Vec<Rat>>,
    mut rhs: Vec<Rat>,
    cost: &[Rat],
    mut basis: Vec<usize>,
) -> Result<SimplexSolution> {
    let m = rows.len();
    let ncols = cost.len();
    assert_eq!(rhs.len(), m);
    assert_eq!(basis.len(), m);
    debug_assert!(rhs.iter().all(|v| !v.is_negative()));

    // Reduced costs: c_j - sum_r c_basis[r] * rows[r][j].
    let mut reduced: Vec<Rat> = cost.to_vec();
    let mut objective = Rat::zero();
    for r in 0..m {
        let cb = &cost[basis[r]];
        if cb.is_zero() {
            continue;
        }
        objective += cb * &rhs[r];
        for j in 0..ncols {
            if !rows[r][j].is_zero() {
                let delta = cb * &rows[r][j];
                reduced[j] -= delta;
            }
        }
    }

    let mut degenerate_run = 0usize;
    loop {
        let entering = if degenerate_run < DEGENERATE_LIMIT {
            // Dantzig: most negative reduced cost, lowest index on ties.
            let mut best: Option<(usize, &Rat)> = None;
            for (j, rc) in reduced.iter().enumerate() {
                if rc.is_negative() && best.is_none_or(|(_, b)| rc < b) {
                    best = Some((j, rc));
                }
            }
            best.map(|(j, _)| j)
        } else {
            reduced.iter().position(|rc| rc.is_negative())
        };
        let Some(e) = entering else {
            let mut values = vec![Rat::zero(); ncols];
            for (r, &bvar) in basis.iter().enumerate() {
                values[bvar] = rhs[r].clone();
            }
            return Ok(SimplexSolution { objective, values });
        };

        // Ratio test.
        let mut pivot: Option<(usize, Rat)> = None;
        for r in 0..m {
            if rows[r][e].is_positive() {
                let ratio = &rhs[r] / &rows[r][e];
                let better = match &pivot {
                    None => true,
                    Some((pr, pratio)) => {
                        ratio < *pratio || (ratio == *pratio && basis[r] < basis[*pr])
                    }
                };
                if better {
                    pivot = Some((r, ratio));
                }
            }
        }
        let Some((prow, theta)) = pivot else {
            return Err(Error::Mismatch("linear program is unbounded".into()));
        };
        if theta.is_zero() {
            degenerate_run += 1;
        } else {
            degenerate_run = 0;
        }

        // Pivot: normalize the pivot row, then eliminate.
        let piv = rows[prow][e].clone();
        for v in rows[prow].iter_mut() {
            if !v.is_zero() {
                *v = &*v / &piv;
            }
        }
        rhs[prow] = &rhs[prow] / &piv;
        let prow_snapshot = rows[prow].clone();
        let prhs = rhs[prow].clone();
        for r in 0..m {
            if r == prow || rows[r][e].is_zero() {
                continue;
            }
            let f = rows[r][e].clone();
            for (v, pv) in rows[r].iter_mut().zip(prow_snapshot.iter()) {
                if !pv.is_zero() {
                    let delta = pv * &f;
                    *v = &*v - delta;
                }
            }
            let delta = &prhs * &f;
            rhs[r] -= delta;
        }
        if !reduced[e].is_zero() {
            let f = reduced[e].clone();
            for (v, pv) in reduced.iter_mut().zip(prow_snapshot.iter()) {
                if !pv.is_zero() {
                    let delta = pv * &f;
                    *v = &*v - delta;
                }
            }
            // z' = z + theta * r_e with theta the entering value
            let delta = &prhs * &f;
            objective += delta;
        }
        basis[prow] = e;
    }
}
