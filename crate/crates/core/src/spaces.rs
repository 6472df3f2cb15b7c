//! Orthogonal bases of the cycle space `Z_n` and cut space `C_n` of the
//! Laakso graph, built by propagation.
//!
//! At level 1 the edge space splits into the single cycle vector
//! `h1 = [0,1,1,-1,-1,0]` and five orthogonal cut vectors: `g1`, three
//! two-block difference rows, and `f1 = [1,1/2,1/2,1/2,1/2,1]`. Propagating
//! these patterns and adding fresh copies on every sub-copy yields an
//! orthogonal basis of the full edge space: per sub-copy of level `j` one
//! cycle vector (type `h_j`), one special cut vector (type `g_j`) and three
//! non-special cut vectors, plus the single propagated `f_n`.

use std::ops::Range;

use num::{Signed, Zero};

use crate::edgespace::{propagate, EdgeVector};
use crate::error::{Error, Result};
use crate::graphs::{digit, Family, RecursiveGraph, SubAddress};
use crate::rational::{int, rat, Rat};

/// Classification of a basis element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisClass {
    /// Cycle vector of type `h_j` on a proper sub-copy.
    CycleH,
    /// The top cycle vector `h_n`.
    CycleHTop,
    /// Special cut vector of type `g_j`.
    CutG,
    /// Non-special cut vector: row 2, 3 or 4 of the level-1 cut matrix,
    /// propagated onto a sub-copy.
    CutNonSpecial { row: u8 },
    /// The unique cut vector propagated from `f_1` (row 5).
    CutFPropagated,
}

impl BasisClass {
    pub fn is_cycle(&self) -> bool {
        matches!(self, BasisClass::CycleH | BasisClass::CycleHTop)
    }

    pub fn is_special_cut(&self) -> bool {
        matches!(self, BasisClass::CutG)
    }

    pub fn label(&self) -> String {
        match self {
            BasisClass::CycleH => "cycle-H".into(),
            BasisClass::CycleHTop => "cycle-top-h".into(),
            BasisClass::CutG => "cut-G".into(),
            BasisClass::CutNonSpecial { row } => format!("cut-nonspecial-row{row}"),
            BasisClass::CutFPropagated => "cut-f-propagated".into(),
        }
    }
}

/// Level-1 sign patterns, indexed by sub-copy digit A..F.
const H_PATTERN: [i8; 6] = [0, 1, 1, -1, -1, 0];
const G_PATTERN: [i8; 6] = [-1, 1, 1, 1, 1, -1];
const ROW2_PATTERN: [i8; 6] = [1, 0, 0, 0, 0, -1];
const ROW3_PATTERN: [i8; 6] = [0, 1, -1, 0, 0, 0];
const ROW4_PATTERN: [i8; 6] = [0, 0, 0, 1, -1, 0];

fn pattern_of(class: BasisClass) -> Option<&'static [i8; 6]> {
    match class {
        BasisClass::CycleH | BasisClass::CycleHTop => Some(&H_PATTERN),
        BasisClass::CutG => Some(&G_PATTERN),
        BasisClass::CutNonSpecial { row: 2 } => Some(&ROW2_PATTERN),
        BasisClass::CutNonSpecial { row: 3 } => Some(&ROW3_PATTERN),
        BasisClass::CutNonSpecial { row: 4 } => Some(&ROW4_PATTERN),
        BasisClass::CutNonSpecial { .. } => unreachable!("rows are 2..=4"),
        BasisClass::CutFPropagated => None,
    }
}

/// Whether a Laakso digit keeps full weight under propagation (A and F) or
/// is halved (the four branch digits B, C, D, E).
pub fn is_branch_digit(d: u8) -> bool {
    !matches!(d, digit::A | digit::F)
}

/// One orthogonal basis element.
#[derive(Debug, Clone)]
pub struct BasisElement {
    pub class: BasisClass,
    /// Scale `j` of the supporting sub-copy.
    pub level: usize,
    /// Address of the supporting sub-copy (length `n - level`).
    pub address: SubAddress,
    pub vector: EdgeVector,
    pub l1: Rat,
    pub l2_sq: Rat,
}

/// The full orthogonal basis of the edge space of a Laakso graph, cycle
/// elements first. Element ids are stable and dense.
pub struct OrthoBasis {
    n: usize,
    elements: Vec<BasisElement>,
    cycle_count: usize,
    /// id offsets of the cycle blocks per level j=1..=n
    cycle_offsets: Vec<usize>,
    /// id offsets of the cut blocks per level j=1..=n (4 per sub-copy)
    cut_offsets: Vec<usize>,
}

/// Build the vector of a pattern-type element: `pattern[s1] * f_{j-1}` on
/// each child block of the sub-copy, where `f` magnitudes halve on branch
/// digits. `None` pattern means the plain `f_j` profile.
fn build_element_vector(
    edges: usize,
    range: Range<usize>,
    level: usize,
    pattern: Option<&[i8; 6]>,
) -> EdgeVector {
    let mut v = EdgeVector::zero(edges);
    let width = range.len();
    debug_assert_eq!(width, 6usize.pow(level as u32));
    for e in range.clone() {
        let mut offset = e - range.start;
        // Digits of the suffix, coarsest first.
        let mut value_pow = 0u32;
        let mut sign = 1i8;
        let mut w = width;
        for pos in 0..level {
            w /= 6;
            let d = (offset / w) as u8;
            offset %= w;
            if pos == 0 {
                if let Some(p) = pattern {
                    sign = p[d as usize];
                    if sign == 0 {
                        break;
                    }
                    continue;
                }
            }
            if is_branch_digit(d) {
                value_pow += 1;
            }
        }
        if sign != 0 {
            v.set(
                e,
                Rat::new(sign.into(), num::BigInt::from(2).pow(value_pow)),
            );
        }
    }
    v
}

impl OrthoBasis {
    /// Construct the orthogonal basis for the level-`n` Laakso graph, n >= 1.
    pub fn new(g: &RecursiveGraph) -> Result<OrthoBasis> {
        if g.family() != Family::Laakso {
            return Err(Error::Range(
                "orthogonal basis is defined for Laakso graphs".into(),
            ));
        }
        let n = g.level();
        if n < 1 {
            return Err(Error::Range("basis needs level n >= 1".into()));
        }
        let edges = g.edge_count();
        let mut elements = Vec::with_capacity(edges);
        let mut cycle_offsets = vec![0usize; n + 1];

        for j in 1..=n {
            cycle_offsets[j] = elements.len();
            for addr in g.sub_copies(j)? {
                let range = g.sub_copy_edges(&addr);
                let class = if j == n {
                    BasisClass::CycleHTop
                } else {
                    BasisClass::CycleH
                };
                let vector = build_element_vector(edges, range, j, pattern_of(class));
                let (l1, l2_sq) = (vector.l1(), vector.l2_sq());
                elements.push(BasisElement {
                    class,
                    level: j,
                    address: addr,
                    vector,
                    l1,
                    l2_sq,
                });
            }
        }
        let cycle_count = elements.len();

        let mut cut_offsets = vec![0usize; n + 1];
        for j in 1..=n {
            cut_offsets[j] = elements.len();
            for addr in g.sub_copies(j)? {
                let range = g.sub_copy_edges(&addr);
                for class in [
                    BasisClass::CutG,
                    BasisClass::CutNonSpecial { row: 2 },
                    BasisClass::CutNonSpecial { row: 3 },
                    BasisClass::CutNonSpecial { row: 4 },
                ] {
                    let vector = build_element_vector(edges, range.clone(), j, pattern_of(class));
                    let (l1, l2_sq) = (vector.l1(), vector.l2_sq());
                    elements.push(BasisElement {
                        class,
                        level: j,
                        address: addr.clone(),
                        vector,
                        l1,
                        l2_sq,
                    });
                }
            }
        }
        // The single f-propagated vector, supported on the whole graph.
        let addr = SubAddress::new(vec![], Family::Laakso);
        let vector = build_element_vector(edges, 0..edges, n, None);
        let (l1, l2_sq) = (vector.l1(), vector.l2_sq());
        elements.push(BasisElement {
            class: BasisClass::CutFPropagated,
            level: n,
            address: addr,
            vector,
            l1,
            l2_sq,
        });

        debug_assert_eq!(elements.len(), edges);
        Ok(OrthoBasis {
            n,
            elements,
            cycle_count,
            cycle_offsets,
            cut_offsets,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> usize {
        self.elements.len()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element(&self, id: usize) -> &BasisElement {
        &self.elements[id]
    }

    pub fn elements(&self) -> &[BasisElement] {
        &self.elements
    }

    pub fn cycle_count(&self) -> usize {
        self.cycle_count
    }

    pub fn cut_count(&self) -> usize {
        self.elements.len() - self.cycle_count
    }

    pub fn is_cycle_id(&self, id: usize) -> bool {
        id < self.cycle_count
    }

    pub fn cycle_ids(&self) -> Range<usize> {
        0..self.cycle_count
    }

    pub fn cut_ids(&self) -> Range<usize> {
        self.cycle_count..self.elements.len()
    }

    /// The cycle basis: one element of type `h_j` per sub-copy of level j.
    pub fn cycle_elements(&self) -> &[BasisElement] {
        &self.elements[..self.cycle_count]
    }

    /// The cut basis: per sub-copy one special `g_j` and three non-special
    /// rows, plus the propagated `f_n` last.
    pub fn cut_elements(&self) -> &[BasisElement] {
        &self.elements[self.cycle_count..]
    }

    /// Id of the cycle element of level `j` on sub-copy with value `v`.
    pub fn cycle_id(&self, j: usize, copy_value: usize) -> usize {
        self.cycle_offsets[j] + copy_value
    }

    /// Id of the `h_n` element.
    pub fn top_cycle_id(&self) -> usize {
        self.cycle_count - 1
    }

    /// Id of the special cut element (type `g_j`) on sub-copy `v`.
    pub fn cut_g_id(&self, j: usize, copy_value: usize) -> usize {
        self.cut_offsets[j] + 4 * copy_value
    }

    /// Id of the non-special cut element for `row` in 2..=4.
    pub fn cut_row_id(&self, j: usize, copy_value: usize, row: u8) -> usize {
        self.cut_offsets[j] + 4 * copy_value + (row as usize - 1)
    }

    /// Id of the propagated `f_n` element.
    pub fn f_id(&self) -> usize {
        self.elements.len() - 1
    }

    /// Expansion coefficients of `x` in this orthogonal basis:
    /// `c_b = <x, b> / ||b||_2^2`, nonzero entries only, ascending by id.
    ///
    /// Exactness of the expansion (`x = sum c_b b`) is guaranteed because
    /// the basis spans the edge space and is orthogonal.
    pub fn expand(&self, x: &EdgeVector) -> Vec<(usize, Rat)> {
        assert_eq!(x.edges(), self.edges());
        let n = self.n;
        let mut acc: Vec<Rat> = vec![Rat::zero(); self.elements.len()];
        let pow2neg: Vec<Rat> = (0..=n as u32)
            .map(|t| Rat::new(1.into(), num::BigInt::from(2).pow(t)))
            .collect();

        for (e, xe) in x.support() {
            let mut t = 0usize; // branch digits among processed (finer) positions
            let mut copy = e;
            for j in 1..=n {
                let s1 = (copy % 6) as u8;
                copy /= 6;
                let mag = &pow2neg[t];
                let contach = |p: i8| -> Option<Rat> {
                    match p {
                        0 => None,
                        1 => Some(xe * mag),
                        _ => Some(-(xe * mag)),
                    }
                };
                let cyc_id = self.cycle_id(j, copy);
                if let Some(c) = contach(H_PATTERN[s1 as usize]) {
                    acc[cyc_id] += c;
                }
                let base = self.cut_offsets[j] + 4 * copy;
                for (slot, pat) in [&G_PATTERN, &ROW2_PATTERN, &ROW3_PATTERN, &ROW4_PATTERN]
                    .iter()
                    .enumerate()
                {
                    if let Some(c) = contach(pat[s1 as usize]) {
                        acc[base + slot] += c;
                    }
                }
                if is_branch_digit(s1) {
                    t += 1;
                }
            }
            acc[self.f_id()] += xe * &pow2neg[t];
        }

        acc.into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(id, c)| {
                let c = c / &self.elements[id].l2_sq;
                (id, c)
            })
            .collect()
    }

    /// Sum of basis vectors with the given coefficients.
    pub fn materialize<'a, I>(&self, combo: I) -> EdgeVector
    where
        I: IntoIterator<Item = (usize, &'a Rat)>,
    {
        let mut out = EdgeVector::zero(self.edges());
        for (id, c) in combo {
            if c.is_zero() {
                continue;
            }
            for (e, val) in self.elements[id].vector.support() {
                out.add_to(e, &(val * c));
            }
        }
        out
    }

    /// Whether `x` lies in the cycle space: all cut coefficients vanish.
    pub fn in_cycle_space(&self, x: &EdgeVector) -> bool {
        self.expand(x).iter().all(|(id, _)| self.is_cycle_id(*id))
    }
}

/// The named vectors `f_n`, `g_n`, `h_n` built by literal propagation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedRole {
    F,
    G,
    H,
}

#[derive(Debug, Clone)]
pub struct NamedVector {
    pub role: NamedRole,
    pub level: usize,
    pub vector: EdgeVector,
}

/// `f_n` is the n-fold propagation of the scalar 1; `g_n` and `h_n` are the
/// (n-1)-fold propagations of `g_1` and `h_1`.
pub fn named_vector(role: NamedRole, n: usize, edge_cap: usize) -> Result<NamedVector> {
    if n < 1 {
        return Err(Error::Range("named vectors need n >= 1".into()));
    }
    let requested = 6u128.checked_pow(n as u32).unwrap_or(u128::MAX);
    if requested > edge_cap as u128 {
        return Err(Error::Capacity {
            requested,
            cap: edge_cap,
        });
    }
    let base = match role {
        NamedRole::F => EdgeVector::unit(1, 0),
        NamedRole::G => EdgeVector::from_entries(
            6,
            G_PATTERN
                .iter()
                .enumerate()
                .map(|(e, &s)| (e, int(s as i64))),
        ),
        NamedRole::H => EdgeVector::from_entries(
            6,
            H_PATTERN
                .iter()
                .enumerate()
                .map(|(e, &s)| (e, int(s as i64))),
        ),
    };
    let steps = match role {
        NamedRole::F => n,
        _ => n - 1,
    };
    let mut v = base;
    for _ in 0..steps {
        v = propagate(&v);
    }
    Ok(NamedVector {
        role,
        level: n,
        vector: v,
    })
}

/// The cut and cycle basis elements supported exactly on each member of an
/// increasing chain `S_1 subset ... subset S_n`. Input addresses are ordered
/// by level (j = 1 first); `S_n` is the whole graph (empty address).
pub fn chain<'a>(
    basis: &'a OrthoBasis,
    addrs: &[SubAddress],
) -> Result<Vec<(&'a BasisElement, &'a BasisElement)>> {
    let n = basis.n();
    if addrs.len() != n {
        return Err(Error::NotNested(format!(
            "expected {n} addresses, got {}",
            addrs.len()
        )));
    }
    for (i, addr) in addrs.iter().enumerate() {
        let j = i + 1;
        if addr.len() != n - j {
            return Err(Error::NotNested(format!(
                "address {addr} at level {j} must have {} digits",
                n - j
            )));
        }
        if i + 1 < addrs.len() && !addrs[i + 1].is_prefix_of(addr) {
            return Err(Error::NotNested(format!(
                "{} is not contained in {}",
                addr,
                addrs[i + 1]
            )));
        }
    }
    Ok(addrs
        .iter()
        .enumerate()
        .map(|(i, addr)| {
            let j = i + 1;
            let v = addr.value();
            (
                basis.element(basis.cut_g_id(j, v)),
                basis.element(basis.cycle_id(j, v)),
            )
        })
        .collect())
}

/// Exhaustive check of the sign relation between `H_j` and `G_j`: on the
/// supporting sub-copy, `<e,H_j> = 0` exactly when `<e,G_j> < 0`, and a
/// nonzero `<e,H_j>` forces `<e,G_j> > 0` with `|<e,H_j>| = <e,G_j>`.
pub fn verify_sign_dichotomy(basis: &OrthoBasis, g: &RecursiveGraph) -> Result<()> {
    for j in 1..=basis.n() {
        for addr in g.sub_copies(j)? {
            let v = addr.value();
            let h = &basis.element(basis.cycle_id(j, v)).vector;
            let gv = &basis.element(basis.cut_g_id(j, v)).vector;
            for e in g.sub_copy_edges(&addr) {
                let (he, ge) = (h.get(e), gv.get(e));
                if he.is_zero() {
                    if !ge.is_negative() {
                        return Err(Error::Mismatch(format!(
                            "edge {e}: <e,H_{j}> = 0 but <e,G_{j}> = {ge} is not negative"
                        )));
                    }
                } else {
                    if !ge.is_positive() || he.abs() != ge {
                        return Err(Error::Mismatch(format!(
                            "edge {e}: <e,H_{j}> = {he}, <e,G_{j}> = {ge}"
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Exhaustive check of the inner-product magnitudes along chains:
/// `<e, G_j>` and `<e, H_j>` equal `(1/2)^{alpha_j}` times their sign, where
/// `alpha_j` counts the levels `r < j` at which the chain stays inside the
/// support of `H_r`.
pub fn verify_chain_inner_products(basis: &OrthoBasis, g: &RecursiveGraph) -> Result<()> {
    let n = basis.n();
    for e in 0..g.edge_count() {
        let digits = g.edge_address(e);
        let digits = digits.digits();
        // alpha_j = #{1 <= r < j : S_{r-1} inside supp(H_r)}; the r-th term
        // looks at the digit selecting S_{r-1} inside S_r.
        let mut alpha = 0usize;
        for j in 1..=n {
            let copy_value = digits[..n - j]
                .iter()
                .fold(0usize, |acc, &d| acc * 6 + d as usize);
            let half_pow = rat(1, 2).pow(alpha as i32);
            for id in [basis.cut_g_id(j, copy_value), basis.cycle_id(j, copy_value)] {
                let val = basis.element(id).vector.get(e);
                if !val.is_zero() && val.abs() != half_pow {
                    return Err(Error::Mismatch(format!(
                        "edge {e} level {j}: |inner| = {}, expected (1/2)^{alpha}",
                        val.abs()
                    )));
                }
            }
            if is_branch_digit(digits[n - j]) {
                alpha += 1;
            }
        }
    }
    Ok(())
}

/// Express `target` exactly in the span of `columns` by Gaussian
/// elimination; returns the coefficients if the system is solvable.
pub fn solve_linear_combination(columns: &[EdgeVector], target: &EdgeVector) -> Option<Vec<Rat>> {
    if columns.is_empty() {
        return target.is_zero().then(Vec::new);
    }
    let rows = columns[0].edges();
    let cols = columns.len();
    let mut m: Vec<Vec<Rat>> = (0..rows)
        .map(|r| {
            let mut row: Vec<Rat> = columns.iter().map(|c| c.get(r)).collect();
            row.push(target.get(r));
            row
        })
        .collect();

    let mut pivot_cols = Vec::new();
    let mut rank = 0usize;
    for col in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let inv = m[rank][col].clone();
        for v in m[rank].iter_mut() {
            *v = &*v / &inv;
        }
        for r in 0..rows {
            if r != rank && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=cols {
                    let delta = &m[rank][c] * &f;
                    m[r][c] = &m[r][c] - &delta;
                }
            }
        }
        pivot_cols.push(col);
        rank += 1;
        if rank == rows {
            break;
        }
    }
    // Inconsistent if any zero row has nonzero rhs.
    for r in rank..rows {
        if !m[r][cols].is_zero() {
            return None;
        }
    }
    let mut coeffs = vec![Rat::zero(); cols];
    for (r, &c) in pivot_cols.iter().enumerate() {
        coeffs[c] = m[r][cols].clone();
    }
    Some(coeffs)
}

/// The `2^{n-1}` canonical large cycles averaging to `h_n`: go up through
/// the B,C regions and down through the D,E regions, making one uniform
/// branch choice per scale below the top.
pub fn hn_cycle_family(g: &RecursiveGraph) -> Vec<EdgeVector> {
    let n = g.level();
    assert!(n >= 1);
    let count = 1usize << (n - 1);
    let mut out = Vec::with_capacity(count);
    for mask in 0..count {
        // choices[i] for scales i = 2..=n: true = right branch (B,C).
        let choices: Vec<bool> = (0..n - 1).map(|b| mask & (1 << b) != 0).collect();
        let mut v = EdgeVector::zero(g.edge_count());
        for e in 0..g.edge_count() {
            let addr = g.edge_address(e);
            let digits = addr.digits();
            // Scale i corresponds to digit position i-1 (coarsest first).
            let top_sign: i8 = match digits[0] {
                digit::B | digit::C => 1,
                digit::D | digit::E => -1,
                _ => continue, // A/F at the top scale cancel in the cycle
            };
            let mut on_path = true;
            for (pos, &d) in digits.iter().enumerate().skip(1) {
                if is_branch_digit(d) {
                    let right = matches!(d, digit::B | digit::C);
                    if right != choices[pos - 1] {
                        on_path = false;
                        break;
                    }
                }
            }
            if on_path {
                v.set(e, int(top_sign as i64));
            }
        }
        out.push(v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::edgespace::{cycle_indicator, outer_cycle};
    use crate::rational::fpow;

    const CAP: usize = 100_000;

    fn basis_for(n: usize) -> (RecursiveGraph, OrthoBasis) {
        let g = RecursiveGraph::laakso(n, CAP).unwrap();
        let b = OrthoBasis::new(&g).unwrap();
        (g, b)
    }

    #[test]
    fn cardinalities() {
        for n in 1..=3 {
            let (_, b) = basis_for(n);
            let e = 6usize.pow(n as u32);
            assert_eq!(b.cycle_count(), (e - 1) / 5);
            assert_eq!(b.cut_count(), (4 * e + 1) / 5);
        }
        let (_, b1) = basis_for(1);
        assert_eq!(b1.cycle_count(), 1);
        assert_eq!(b1.cut_count(), 5);
        let (_, b2) = basis_for(2);
        assert_eq!(b2.cycle_count(), 7);
        assert_eq!(b2.cut_count(), 29);
        let (_, b3) = basis_for(3);
        assert_eq!(b3.cycle_count(), 43);
    }

    #[test]
    fn level_one_vectors_match_the_matrix_rows() {
        let (_, b) = basis_for(1);
        let rows: [(usize, [i64; 6]); 5] = [
            (b.cut_g_id(1, 0), [-1, 1, 1, 1, 1, -1]),
            (b.cut_row_id(1, 0, 2), [1, 0, 0, 0, 0, -1]),
            (b.cut_row_id(1, 0, 3), [0, 1, -1, 0, 0, 0]),
            (b.cut_row_id(1, 0, 4), [0, 0, 0, 1, -1, 0]),
            (b.cycle_id(1, 0), [0, 1, 1, -1, -1, 0]),
        ];
        for (id, want) in rows {
            for (e, w) in want.iter().enumerate() {
                assert_eq!(b.element(id).vector.get(e), int(*w));
            }
        }
        let f = &b.element(b.f_id()).vector;
        assert_eq!(f.get(0), int(1));
        assert_eq!(f.get(1), rat(1, 2));
        assert_eq!(f.get(5), int(1));
    }

    #[test]
    fn full_orthogonality_small() {
        for n in 1..=3 {
            let (_, b) = basis_for(n);
            let ids: Vec<usize> = (0..b.len()).collect();
            for (i, &a) in ids.iter().enumerate() {
                for &c in &ids[i + 1..] {
                    let ip = b.element(a).vector.inner(&b.element(c).vector);
                    assert!(
                        ip.is_zero(),
                        "elements {a} and {c} not orthogonal at n={n}: {ip}"
                    );
                }
            }
        }
    }

    #[test]
    fn closed_form_norms() {
        let (_, b) = basis_for(3);
        for el in b.elements() {
            let j = el.level as u32;
            let (l1, l2) = match el.class {
                BasisClass::CycleH | BasisClass::CycleHTop => (
                    crate::rational::ipow(4, j),
                    rat(4, 3) * crate::rational::ipow(3, j),
                ),
                BasisClass::CutG => (
                    rat(3, 2) * crate::rational::ipow(4, j),
                    int(2) * crate::rational::ipow(3, j),
                ),
                BasisClass::CutNonSpecial { .. } => (
                    int(2) * crate::rational::ipow(4, j - 1),
                    int(2) * crate::rational::ipow(3, j - 1),
                ),
                BasisClass::CutFPropagated => {
                    (crate::rational::ipow(4, j), crate::rational::ipow(3, j))
                }
            };
            assert_eq!(el.l1, l1, "l1 mismatch for {:?} level {j}", el.class);
            assert_eq!(el.l2_sq, l2, "l2 mismatch for {:?} level {j}", el.class);
        }
    }

    #[test]
    fn named_vector_norms() {
        for n in 1..=4u32 {
            let f = named_vector(NamedRole::F, n as usize, CAP).unwrap().vector;
            let g = named_vector(NamedRole::G, n as usize, CAP).unwrap().vector;
            let h = named_vector(NamedRole::H, n as usize, CAP).unwrap().vector;
            assert_eq!(f.l1(), crate::rational::ipow(4, n));
            assert_eq!(f.l2_sq(), crate::rational::ipow(3, n));
            assert_eq!(g.l1(), rat(3, 2) * crate::rational::ipow(4, n));
            assert_eq!(g.l2_sq(), int(2) * crate::rational::ipow(3, n));
            assert_eq!(h.l1(), crate::rational::ipow(4, n));
            assert_eq!(h.l2_sq(), rat(4, 3) * crate::rational::ipow(3, n));
            // ratio identity shared by g_n and h_n
            assert_eq!(g.l1() / g.l2_sq(), fpow(4, 3, n - 1));
            assert_eq!(h.l1() / h.l2_sq(), fpow(4, 3, n - 1));
        }
    }

    #[test]
    fn named_vectors_match_basis_elements() {
        for n in 1..=3 {
            let (_, b) = basis_for(n);
            let f = named_vector(NamedRole::F, n, CAP).unwrap().vector;
            let g = named_vector(NamedRole::G, n, CAP).unwrap().vector;
            let h = named_vector(NamedRole::H, n, CAP).unwrap().vector;
            assert_eq!(f, b.element(b.f_id()).vector);
            assert_eq!(g, b.element(b.cut_g_id(n, 0)).vector);
            assert_eq!(h, b.element(b.top_cycle_id()).vector);
        }
    }

    #[test]
    fn expansion_is_exact() {
        let (g, b) = basis_for(2);
        let x = EdgeVector::from_entries(
            g.edge_count(),
            [
                (0, rat(2, 7)),
                (13, rat(-5, 3)),
                (35, int(4)),
                (20, rat(1, 2)),
            ],
        );
        let combo = b.expand(&x);
        let back = b.materialize(combo.iter().map(|(id, c)| (*id, c)));
        assert_eq!(back, x);
    }

    #[test]
    fn membership_and_chain() {
        let (_g, b) = basis_for(2);
        let h = named_vector(NamedRole::H, 2, CAP).unwrap().vector;
        assert!(b.in_cycle_space(&h));
        let f = named_vector(NamedRole::F, 2, CAP).unwrap().vector;
        assert!(!b.in_cycle_space(&f));

        // Chain through copy B.
        let addrs = vec![
            SubAddress::parse("B", Family::Laakso).unwrap(),
            SubAddress::parse("", Family::Laakso).unwrap(),
        ];
        let links = chain(&b, &addrs).unwrap();
        assert_eq!(links.len(), 2);
        let (g1, h1) = (&links[0].0, &links[0].1);
        assert_eq!(h1.vector.get(6 + 1), int(1));
        assert_eq!(h1.vector.get(6 + 3), int(-1));
        assert_eq!(g1.vector.get(6), int(-1));
        // Level-n entries are the named vectors.
        assert_eq!(
            links[1].1.vector,
            named_vector(NamedRole::H, 2, CAP).unwrap().vector
        );
        assert_eq!(
            links[1].0.vector,
            named_vector(NamedRole::G, 2, CAP).unwrap().vector
        );

        // Non-nested chain rejected.
        let bad = vec![
            SubAddress::parse("A", Family::Laakso).unwrap(),
            SubAddress::parse("B", Family::Laakso).unwrap(),
        ];
        assert!(matches!(chain(&b, &bad), Err(Error::NotNested(_))));
    }

    #[test]
    fn expansion_matches_definitional_inner_products() {
        let (_, b) = basis_for(2);
        let x = EdgeVector::from_entries(
            36,
            [
                (0, rat(5, 7)),
                (11, rat(-2, 3)),
                (18, int(3)),
                (35, rat(1, 6)),
            ],
        );
        let coeffs = b.expand(&x);
        for id in 0..b.len() {
            let el = b.element(id);
            let want = x.inner(&el.vector) / &el.l2_sq;
            let got = coeffs
                .iter()
                .find(|(i, _)| *i == id)
                .map(|(_, c)| c.clone())
                .unwrap_or_else(|| int(0));
            assert_eq!(got, want, "coefficient of element {id}");
        }
    }

    #[test]
    fn lemmas_hold_small() {
        for n in 1..=2 {
            let (g, b) = basis_for(n);
            verify_sign_dichotomy(&b, &g).unwrap();
            verify_chain_inner_products(&b, &g).unwrap();
        }
    }

    #[test]
    fn hn_is_average_of_cycles() {
        for n in 1..=3 {
            let g = RecursiveGraph::laakso(n, CAP).unwrap();
            let fam = hn_cycle_family(&g);
            assert_eq!(fam.len(), 1 << (n - 1));
            let mut avg = EdgeVector::zero(g.edge_count());
            for c in &fam {
                avg = avg.add(c);
            }
            let avg = avg.scale(&Rat::new(1.into(), num::BigInt::from(fam.len())));
            let h = named_vector(NamedRole::H, n, CAP).unwrap().vector;
            assert_eq!(avg, h);

            // Each member of the family is a genuine simple cycle: verify
            // via the signed indicator of an explicitly walked cycle at n=1,
            // and by exact solvability in the outer-cycle span in general.
            let sub_cycles: Vec<EdgeVector> = (1..=n)
                .flat_map(|j| {
                    g.sub_copies(j)
                        .unwrap()
                        .into_iter()
                        .map(|addr| cycle_indicator(&g, &outer_cycle(&g, &addr)).unwrap())
                        .collect::<Vec<_>>()
                })
                .collect();
            assert_eq!(sub_cycles.len(), (6usize.pow(n as u32) - 1) / 5);
            let coeffs = solve_linear_combination(&sub_cycles, &h);
            assert!(
                coeffs.is_some(),
                "h_n must lie in the span of simple cycles"
            );
            // the outer cycles are independent: none solves for the zero
            // target with a forced unit coefficient
            for i in 0..sub_cycles.len() {
                let others: Vec<EdgeVector> = sub_cycles
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, v)| v.clone())
                    .collect();
                if n <= 2 {
                    assert!(
                        solve_linear_combination(&others, &sub_cycles[i]).is_none(),
                        "outer cycle {i} is independent of the rest"
                    );
                }
            }
        }
    }
}
