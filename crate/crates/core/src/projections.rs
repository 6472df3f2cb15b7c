//! Projections from the Laakso edge space onto its cycle space.
//!
//! Besides the orthogonal projection (whose l1 norm grows like (4/3)^n),
//! this module builds the inductively defined low-norm projection: it kills
//! every non-special cut vector and the propagated `f_n`, recurses into the
//! A and F sub-copies, and on B,C,D,E chains maps each normalized special
//! cut vector `G_j` to `a_j X_{j+1}`, where the `X_j` walk down the chain
//! balancing l1 mass between the two support cases. The same chain algebra
//! drives the adaptive lower-bound certificate for invariant projections.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::{Signed, Zero};
use rayon::prelude::*;

use crate::edgespace::EdgeVector;
use crate::error::{Error, Result};
use crate::graphs::{digit, RecursiveGraph, SubAddress};
use crate::rational::{int, rat, Rat};
use crate::spaces::{BasisClass, OrthoBasis};

/// A combination of orthogonal basis elements, stored as coefficients on
/// basis ids. Projections onto the cycle space only ever use cycle ids.
pub type BasisCombo = BTreeMap<usize, Rat>;

fn combo_axpy(acc: &mut BasisCombo, factor: &Rat, other: &BasisCombo) {
    if factor.is_zero() {
        return;
    }
    for (&id, c) in other {
        let entry = acc.remove(&id).unwrap_or_else(Rat::zero) + c * factor;
        if !entry.is_zero() {
            acc.insert(id, entry);
        }
    }
}

fn combo_scale(combo: &BasisCombo, factor: &Rat) -> BasisCombo {
    if factor.is_zero() {
        return BasisCombo::new();
    }
    combo.iter().map(|(&id, c)| (id, c * factor)).collect()
}

/// A linear operator on the edge space, stored through the images of the
/// orthogonal basis elements. Projections onto the cycle space carry
/// cycle-only images.
#[derive(Clone)]
pub struct EdgeOperator {
    basis: Arc<OrthoBasis>,
    images: Vec<BasisCombo>,
}

impl EdgeOperator {
    pub fn new(basis: Arc<OrthoBasis>, images: Vec<BasisCombo>) -> Self {
        assert_eq!(images.len(), basis.len());
        EdgeOperator { basis, images }
    }

    pub fn basis(&self) -> &Arc<OrthoBasis> {
        &self.basis
    }

    pub fn image_combo(&self, id: usize) -> &BasisCombo {
        &self.images[id]
    }

    pub fn image_vector(&self, id: usize) -> EdgeVector {
        self.basis
            .materialize(self.images[id].iter().map(|(&i, c)| (i, c)))
    }

    /// Apply to an arbitrary vector by expanding it in the orthogonal basis.
    pub fn apply(&self, x: &EdgeVector) -> EdgeVector {
        self.basis
            .materialize(self.apply_combo(x).iter().map(|(&i, c)| (i, c)))
    }

    /// Image of `x` as basis coefficients.
    pub fn apply_combo(&self, x: &EdgeVector) -> BasisCombo {
        let mut out = BasisCombo::new();
        for (id, coeff) in self.basis.expand(x) {
            combo_axpy(&mut out, &coeff, &self.images[id]);
        }
        out
    }

    /// True if the operator fixes every cycle basis vector.
    pub fn fixes_cycle_basis(&self) -> bool {
        self.basis.cycle_ids().all(|id| {
            let img = &self.images[id];
            img.len() == 1 && img.get(&id).is_some_and(|c| *c == int(1))
        })
    }
}

/// The identity operator in the basis-image representation.
pub fn identity_operator(basis: &Arc<OrthoBasis>) -> EdgeOperator {
    let images = (0..basis.len())
        .map(|id| BasisCombo::from([(id, int(1))]))
        .collect();
    EdgeOperator::new(Arc::clone(basis), images)
}

/// The orthogonal projection onto the cycle space: identity on cycle basis
/// elements, zero on cut basis elements.
pub fn orthogonal_projection(basis: &Arc<OrthoBasis>) -> EdgeOperator {
    let images = (0..basis.len())
        .map(|id| {
            if basis.is_cycle_id(id) {
                BasisCombo::from([(id, int(1))])
            } else {
                BasisCombo::new()
            }
        })
        .collect();
    EdgeOperator::new(Arc::clone(basis), images)
}

/// Per-chain record of the inductive construction at the top level, one for
/// each edge of the B,C,D,E sub-copies.
#[derive(Debug, Clone)]
pub struct ChainRecord {
    pub edge: usize,
    /// eps_j for j = 1..=n-1: 1 when the chain stays inside supp(H_j).
    pub eps: Vec<u8>,
    /// alpha_j for j = 1..=n: number of levels r < j with eps_r = 1.
    pub alpha: Vec<usize>,
    /// X_j for j = 1..=n as cycle-basis combinations.
    pub x_vectors: Vec<BasisCombo>,
}

/// Trace of the inductive construction: the recurrence scalars a_j, x_j at
/// the top level and the per-chain vectors.
#[derive(Debug, Clone)]
pub struct ProjectionTrace {
    pub n: usize,
    /// a_j for j = 1..=n-1.
    pub a: Vec<Rat>,
    /// x_j for j = 1..=n.
    pub x: Vec<Rat>,
    pub chains: Vec<ChainRecord>,
}

/// Recurrence coefficient `a_j` at ambient level `m`:
/// solves (1 - a_j) x_{j+1} = (1/2 + a_j) x_{j+1} + (4/3)^{j-1}.
fn a_coeff(m: usize, j: usize) -> Rat {
    debug_assert!(j < m);
    rat(m as i64 - j as i64 - 2, 4 * (m as i64 - j as i64 + 1))
}

/// Solution of the recurrence: x_j = ((m + 2 - j)/2) (4/3)^{j-1}.
fn x_value(m: usize, j: usize) -> Rat {
    rat(m as i64 + 2 - j as i64, 2) * crate::rational::fpow(4, 3, (j - 1) as u32)
}

fn digit_sign(d: u8) -> i8 {
    match d {
        digit::B | digit::C => 1,
        digit::D | digit::E => -1,
        _ => 0,
    }
}

/// X_{down_to} built along the chain determined inside the stripped context:
/// `prefix` is the all-A/F prefix (the context is a sub-copy of level `m`)
/// and `rel` the remaining digits, `rel[0]` in B..E. The chain's level-l
/// copy has address `prefix ++ rel[..m-l]`.
fn chain_x(basis: &OrthoBasis, prefix: &[u8], rel: &[u8], m: usize, down_to: usize) -> BasisCombo {
    let n = basis.n();
    debug_assert_eq!(prefix.len(), n - m);
    debug_assert!(!rel.is_empty() && digit_sign(rel[0]) != 0);
    let copy_value =
        |digits: &[u8]| -> usize { digits.iter().fold(0usize, |acc, &d| acc * 6 + d as usize) };
    // X_m = sgn(<e, h_m>) h_m / ||h_m||_2^2 with h_m the top cycle vector
    // of the context.
    let top_id = basis.cycle_id(m, copy_value(prefix));
    let top_sign = digit_sign(rel[0]);
    let mut x = BasisCombo::from([(top_id, int(top_sign as i64) / &basis.element(top_id).l2_sq)]);
    for l in (down_to..m).rev() {
        // digit selecting S_{l-1} within S_l
        let d = rel[m - l];
        let al = a_coeff(m, l);
        match digit_sign(d) {
            0 => {
                x = combo_scale(&x, &(int(1) - &al));
            }
            s => {
                let mut next = combo_scale(&x, &(rat(1, 2) + &al));
                let mut addr = prefix.to_vec();
                addr.extend_from_slice(&rel[..m - l]);
                let h_id = basis.cycle_id(l, copy_value(&addr));
                let h_term = BasisCombo::from([(h_id, int(1) / &basis.element(h_id).l2_sq)]);
                combo_axpy(&mut next, &int(s as i64), &h_term);
                x = next;
            }
        }
    }
    x
}

/// Build the low-norm projection onto the cycle space, with its trace.
pub fn build_pn(
    g: &RecursiveGraph,
    basis: &Arc<OrthoBasis>,
) -> Result<(EdgeOperator, ProjectionTrace)> {
    let n = basis.n();
    let mut images: Vec<BasisCombo> = vec![BasisCombo::new(); basis.len()];
    for id in basis.cycle_ids() {
        images[id] = BasisCombo::from([(id, int(1))]);
    }
    for id in basis.cut_ids() {
        let el = basis.element(id);
        match el.class {
            BasisClass::CutNonSpecial { .. } | BasisClass::CutFPropagated => {}
            BasisClass::CutG => {
                let digits = el.address.digits();
                // Strip the leading A/F digits (the recursion into those
                // sub-copies); a G whose digits are all A/F bottoms out at
                // the stripped copy's own top-level g, which maps to zero.
                let Some(first) = digits.iter().position(|&d| digit_sign(d) != 0) else {
                    continue;
                };
                let j = el.level;
                let m = n - first;
                let x_next = chain_x(basis, &digits[..first], &digits[first..], m, j + 1);
                let aj = a_coeff(m, j);
                images[id] = combo_scale(&x_next, &(&aj * &el.l2_sq));
            }
            _ => unreachable!("cut ids only"),
        }
    }

    // Top-level trace: one record per edge of the B,C,D,E sub-copies.
    let mut chains = Vec::new();
    for e in 0..g.edge_count() {
        let addr = g.edge_address(e);
        let digits = addr.digits();
        if digit_sign(digits[0]) == 0 {
            continue;
        }
        let mut eps = vec![0u8; n - 1];
        for jj in 1..n {
            // S_{j-1} sits inside S_j at the digit indexed n - j
            if digit_sign(digits[n - jj]) != 0 {
                eps[jj - 1] = 1;
            }
        }
        let mut alpha = vec![0usize; n];
        for jj in 2..=n {
            alpha[jj - 1] = alpha[jj - 2] + eps[jj - 2] as usize;
        }
        let x_vectors: Vec<BasisCombo> =
            (1..=n).map(|j| chain_x(basis, &[], digits, n, j)).collect();
        chains.push(ChainRecord {
            edge: e,
            eps,
            alpha,
            x_vectors,
        });
    }

    let trace = ProjectionTrace {
        n,
        a: (1..n).map(|j| a_coeff(n, j)).collect(),
        x: (1..=n).map(|j| x_value(n, j)).collect(),
        chains,
    };
    Ok((EdgeOperator::new(Arc::clone(basis), images), trace))
}

/// Exhaustive well-definedness check: every chain through the support of a
/// special cut vector must reproduce its stored image. For each edge, walk
/// its own chain inside its stripped context and compare `a_j X_{j+1}`
/// against the operator.
pub fn verify_pn_well_defined(
    g: &RecursiveGraph,
    basis: &OrthoBasis,
    op: &EdgeOperator,
) -> Result<()> {
    let n = basis.n();
    for e in 0..g.edge_count() {
        let addr = g.edge_address(e);
        let digits = addr.digits().to_vec();
        let Some(first) = digits.iter().position(|&d| digit_sign(d) != 0) else {
            continue;
        };
        let m = n - first;
        let (prefix, rel) = digits.split_at(first);
        for l in 1..m {
            let copy_digits = &digits[..digits.len() - l];
            let copy_value = copy_digits
                .iter()
                .fold(0usize, |acc, &d| acc * 6 + d as usize);
            let gid = basis.cut_g_id(l, copy_value);
            let x_next = chain_x(basis, prefix, rel, m, l + 1);
            let expected = combo_scale(&x_next, &(&a_coeff(m, l) * &basis.element(gid).l2_sq));
            if &expected != op.image_combo(gid) {
                return Err(Error::InconsistentDefinition(format!(
                    "chain through edge {e} disagrees with stored image of cut vector {gid}"
                )));
            }
        }
    }
    Ok(())
}

/// Exact operator l1 norm: the maximum of `||op(e)||_1` over standard edge
/// vectors (the extreme points of the l1 ball), with its witness edge.
pub fn operator_l1_norm(op: &EdgeOperator) -> (Rat, usize) {
    let edges = op.basis().edges();
    (0..edges)
        .into_par_iter()
        .map(|e| {
            let img = op.apply(&EdgeVector::unit(edges, e));
            (img.l1(), e)
        })
        .reduce(
            || (Rat::zero(), usize::MAX),
            |a, b| {
                if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            },
        )
}

/// A signed permutation of the edge coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedPermutation {
    perm: Vec<usize>,
    signs: Vec<i8>,
}

impl SignedPermutation {
    pub fn identity(edges: usize) -> Self {
        SignedPermutation {
            perm: (0..edges).collect(),
            signs: vec![1; edges],
        }
    }

    pub fn is_identity(&self) -> bool {
        self.signs.iter().all(|&s| s == 1) && self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }

    pub fn edges(&self) -> usize {
        self.perm.len()
    }

    /// The map sends the unit vector of `e` to `signs[e]` times the unit
    /// vector of `perm[e]`.
    pub fn apply(&self, x: &EdgeVector) -> EdgeVector {
        let mut out = EdgeVector::zero(x.edges());
        for (e, c) in x.support() {
            let val = if self.signs[e] == 1 {
                c.clone()
            } else {
                -c.clone()
            };
            out.set(self.perm[e], val);
        }
        out
    }

    /// `self . other` (apply `other` first).
    pub fn compose(&self, other: &SignedPermutation) -> SignedPermutation {
        let edges = self.edges();
        let mut perm = vec![0usize; edges];
        let mut signs = vec![1i8; edges];
        for e in 0..edges {
            perm[e] = self.perm[other.perm[e]];
            signs[e] = other.signs[e] * self.signs[other.perm[e]];
        }
        SignedPermutation { perm, signs }
    }

    pub fn inverse(&self) -> SignedPermutation {
        let edges = self.edges();
        let mut perm = vec![0usize; edges];
        let mut signs = vec![1i8; edges];
        for e in 0..edges {
            perm[self.perm[e]] = e;
            signs[self.perm[e]] = self.signs[e];
        }
        SignedPermutation { perm, signs }
    }

    fn key(&self) -> Vec<i64> {
        self.perm
            .iter()
            .zip(&self.signs)
            .map(|(&p, &s)| (p as i64 + 1) * s as i64)
            .collect()
    }

    /// Swap two child blocks of the sub-copy at `addr`, identifying them by
    /// equal suffix address.
    fn block_swap(g: &RecursiveGraph, addr: &SubAddress, a: u8, b: u8) -> SignedPermutation {
        let mut out = SignedPermutation::identity(g.edge_count());
        let range = g.sub_copy_edges(addr);
        let w = range.len() / 6;
        let base = range.start;
        for s in 0..w {
            let ea = base + a as usize * w + s;
            let eb = base + b as usize * w + s;
            out.perm[ea] = eb;
            out.perm[eb] = ea;
        }
        out
    }
}

/// A generator of the isometry group, tagged with its source element.
#[derive(Debug, Clone)]
pub struct IsometryGenerator {
    /// Basis id of the cut or cycle vector that induced this involution.
    pub source: usize,
    pub map: SignedPermutation,
}

/// The involutions attached to the orthogonal basis: for every non-special
/// cut vector the swap of the two blocks carrying its support (A/F, B/C, or
/// D/E of its sub-copy), and for every cycle vector the swap exchanging the
/// positive and negative branches (B with E and C with D).
pub fn isometry_generators(g: &RecursiveGraph, basis: &OrthoBasis) -> Vec<IsometryGenerator> {
    let mut out = Vec::new();
    for id in 0..basis.len() {
        let el = basis.element(id);
        match el.class {
            BasisClass::CutNonSpecial { row } => {
                let (a, b) = match row {
                    2 => (digit::A, digit::F),
                    3 => (digit::B, digit::C),
                    4 => (digit::D, digit::E),
                    _ => unreachable!(),
                };
                out.push(IsometryGenerator {
                    source: id,
                    map: SignedPermutation::block_swap(g, &el.address, a, b),
                });
            }
            BasisClass::CycleH | BasisClass::CycleHTop => {
                let be = SignedPermutation::block_swap(g, &el.address, digit::B, digit::E);
                let cd = SignedPermutation::block_swap(g, &el.address, digit::C, digit::D);
                out.push(IsometryGenerator {
                    source: id,
                    map: be.compose(&cd),
                });
            }
            _ => {}
        }
    }
    out
}

/// Default cap on the group closure size.
pub const DEFAULT_GROUP_CAP: usize = 1_000_000;

/// Closure of the generators under composition, up to `cap` elements.
pub fn group_closure(
    generators: &[SignedPermutation],
    cap: usize,
) -> Result<Vec<SignedPermutation>> {
    let edges = generators.first().map_or(0, |g| g.edges());
    let identity = SignedPermutation::identity(edges);
    let mut seen = std::collections::HashSet::new();
    seen.insert(identity.key());
    let mut elements = vec![identity];
    let mut frontier = 0usize;
    while frontier < elements.len() {
        let cur = elements[frontier].clone();
        frontier += 1;
        for gen in generators {
            let next = gen.compose(&cur);
            if seen.insert(next.key()) {
                if elements.len() + 1 > cap {
                    return Err(Error::GroupCapExceeded {
                        cap,
                        reached: elements.len() + 1,
                    });
                }
                elements.push(next);
            }
        }
    }
    Ok(elements)
}

/// Average `q` over the full group generated by `generators`:
/// `P = |G|^{-1} sum theta^{-1} q theta`. Errors out if the closure exceeds
/// `cap`.
pub fn invariant_average(
    q: &EdgeOperator,
    generators: &[SignedPermutation],
    cap: usize,
) -> Result<EdgeOperator> {
    let basis = q.basis();
    let group = group_closure(generators, cap)?;
    let size = int(group.len() as i64);
    let mut images: Vec<BasisCombo> = vec![BasisCombo::new(); basis.len()];
    for theta in &group {
        let theta_inv = theta.inverse();
        for (id, acc) in images.iter_mut().enumerate() {
            let moved = theta.apply(&basis.element(id).vector);
            let image = q.apply(&moved);
            let back = theta_inv.apply(&image);
            for (cid, c) in basis.expand(&back) {
                assert!(
                    basis.is_cycle_id(cid),
                    "group elements must preserve the cycle space"
                );
                combo_axpy(acc, &c, &BasisCombo::from([(cid, int(1))]));
            }
        }
    }
    let inv_size = int(1) / &size;
    for img in &mut images {
        *img = combo_scale(img, &inv_size);
    }
    Ok(EdgeOperator::new(Arc::clone(basis), images))
}

/// Operator identity check `theta . op = op . theta`, exact, over all edges.
pub fn commutes(op: &EdgeOperator, theta: &SignedPermutation) -> bool {
    let edges = op.basis().edges();
    (0..edges).into_par_iter().all(|e| {
        let unit = EdgeVector::unit(edges, e);
        theta.apply(&op.apply(&unit)) == op.apply(&theta.apply(&unit))
    })
}

/// The chain norm of a combination of nested cycle vectors:
/// `sum_j |a_j| ||H_j||_1`.
pub fn chain_norm(basis: &OrthoBasis, combo: &BasisCombo) -> Rat {
    combo
        .iter()
        .map(|(&id, c)| c.abs() * &basis.element(id).l1)
        .sum()
}

/// Result of the adaptive lower-bound construction.
#[derive(Debug, Clone)]
pub struct LowerBoundCertificate {
    pub edge: usize,
    /// `||P(e)||_1`, realized by `edge`.
    pub achieved: Rat,
    /// The proven threshold `3(n+1)/8`.
    pub guarantee: Rat,
    /// The chain value x_1 (so `achieved >= (3/4) x_1`).
    pub x1: Rat,
}

/// Construct a chain maximizing the chain norm at every bifurcation and
/// return an edge witnessing `||P(e)||_1 >= 3(n+1)/8`. The operator must be
/// a projection onto the cycle space killing every non-special cut vector
/// and the propagated `f_n`, with `P(G_j)` supported on strictly coarser
/// cycle vectors.
pub fn lower_bound_certificate(op: &EdgeOperator) -> Result<LowerBoundCertificate> {
    let basis = op.basis();
    let n = basis.n();

    if !op.fixes_cycle_basis() {
        return Err(Error::InvarianceViolated(
            "operator does not fix the cycle basis".into(),
        ));
    }
    for id in basis.cut_ids() {
        let el = basis.element(id);
        match el.class {
            BasisClass::CutNonSpecial { .. } | BasisClass::CutFPropagated => {
                if !op.image_combo(id).is_empty() {
                    return Err(Error::InvarianceViolated(format!(
                        "image of {} is nonzero",
                        el.class.label()
                    )));
                }
            }
            BasisClass::CutG => {
                for cid in op.image_combo(id).keys() {
                    let h = basis.element(*cid);
                    let proper =
                        h.address.len() < el.address.len() && h.address.is_prefix_of(&el.address);
                    if !proper {
                        return Err(Error::InvarianceViolated(
                            "image of a special cut vector leaves the coarser chain span".into(),
                        ));
                    }
                }
            }
            _ => unreachable!(),
        }
    }

    // Descend, preferring the in-support branch on ties as in the two-case
    // maximum; the running X stays inside span{H_l, ..., h_n}.
    let mut addr_digits: Vec<u8> = vec![digit::B];
    let top = basis.top_cycle_id();
    let mut x = BasisCombo::from([(top, int(1) / &basis.element(top).l2_sq)]);
    let mut x_norm = chain_norm(basis, &x);
    for l in (1..n).rev() {
        let copy_value = addr_digits
            .iter()
            .fold(0usize, |acc, &d| acc * 6 + d as usize);
        let g_id = basis.cut_g_id(l, copy_value);
        let h_id = basis.cycle_id(l, copy_value);
        let pg = combo_scale(op.image_combo(g_id), &(int(1) / &basis.element(g_id).l2_sq));

        let mut cand_out = x.clone();
        combo_axpy(&mut cand_out, &int(-1), &pg);
        let mut cand_in = combo_scale(&x, &rat(1, 2));
        combo_axpy(&mut cand_in, &int(1), &pg);
        let h_term = BasisCombo::from([(h_id, int(1) / &basis.element(h_id).l2_sq)]);
        combo_axpy(&mut cand_in, &int(1), &h_term);

        let norm_out = chain_norm(basis, &cand_out);
        let norm_in = chain_norm(basis, &cand_in);
        if norm_in >= norm_out {
            x = cand_in;
            x_norm = norm_in;
            addr_digits.push(digit::B); // inside {H_l > 0}
        } else {
            x = cand_out;
            x_norm = norm_out;
            addr_digits.push(digit::A); // disjoint from supp(H_l)
        }
    }
    let edge = addr_digits
        .iter()
        .fold(0usize, |acc, &d| acc * 6 + d as usize);

    let image = op.apply(&EdgeVector::unit(basis.edges(), edge));
    // The walked-down X must be exactly P(e).
    let x_vec = basis.materialize(x.iter().map(|(&i, c)| (i, c)));
    if x_vec != image {
        return Err(Error::InvarianceViolated(
            "chain vector X_1 does not match P(e); operator is not invariant".into(),
        ));
    }
    let achieved = image.l1();
    let guarantee = rat(3 * (n as i64 + 1), 8);
    if achieved < guarantee {
        return Err(Error::Mismatch(format!(
            "certificate bound violated: ||P(e)||_1 = {achieved} < {guarantee}"
        )));
    }
    Ok(LowerBoundCertificate {
        edge,
        achieved,
        guarantee,
        x1: x_norm,
    })
}
