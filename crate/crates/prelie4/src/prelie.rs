//! Structure-constant pre-Lie rings on a mixed-modulus additive group:
//! product evaluation, axiom and well-definedness checking, and the
//! left/right/strong nilpotency filtrations.

use crate::error::{Error, Result};
use crate::modarith::{Elem, Shape, MAX_RANK};
use crate::report::ChainSummary;

/// Structure-constant table: entry `(i, j)` is the element `x_i * x_j`
/// expressed in the generator basis.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct SCTable {
    rank: usize,
    entries: [[Elem; MAX_RANK]; MAX_RANK],
}

impl SCTable {
    pub fn zero(shape: &Shape) -> Self {
        Self { rank: shape.rank(), entries: [[shape.zero(); MAX_RANK]; MAX_RANK] }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn get(&self, i: usize, j: usize) -> Elem {
        self.entries[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Elem) {
        self.entries[i][j] = value;
    }
}

impl std::fmt::Debug for SCTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let rows: Vec<Vec<Elem>> =
            (0..self.rank).map(|i| (0..self.rank).map(|j| self.entries[i][j]).collect()).collect();
        write!(f, "{rows:?}")
    }
}

/// A pre-Lie ring presented by structure constants. The type deliberately
/// admits tables that violate the pre-Lie identity or nilpotency: the
/// enumeration and mutation oracles must be able to hold invalid candidates
/// while the checkers report on them.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct PreLieRing {
    shape: Shape,
    table: SCTable,
}

/// Well-definedness violation: coefficient `(row, col, coord)` (0-based) is
/// not divisible by `p^required_val` as forced by generator torsion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WellDefViolation {
    pub row: usize,
    pub col: usize,
    pub coord: usize,
    pub required_val: u32,
    pub coefficient: u64,
}

/// Pre-Lie identity failure on the basis triple `(i, j, k)` (0-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AxiomViolation {
    pub triple: (usize, usize, usize),
    pub lhs: Elem,
    pub rhs: Elem,
}

impl PreLieRing {
    pub fn new(shape: Shape, table: SCTable) -> Result<Self> {
        if table.rank() != shape.rank() {
            return Err(Error::RankMismatch { expected: shape.rank(), got: table.rank() });
        }
        Ok(Self { shape, table })
    }

    pub fn zero_ring(shape: Shape) -> Self {
        Self { shape, table: SCTable::zero(&shape) }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn table(&self) -> &SCTable {
        &self.table
    }

    /// Bilinear product `u * v = sum_{i,j} u_i v_j (x_i * x_j)`.
    pub fn product(&self, u: Elem, v: Elem) -> Elem {
        let s = &self.shape;
        let r = s.rank();
        let mut out = [0u64; MAX_RANK];
        for k in 0..r {
            let m = s.modulus(k) as u128;
            let mut acc = 0u128;
            for i in 0..r {
                if u.coeff(i) == 0 {
                    continue;
                }
                for j in 0..r {
                    let c = self.table.get(i, j).coeff(k);
                    if v.coeff(j) == 0 || c == 0 {
                        continue;
                    }
                    let uv = u.coeff(i) as u128 * v.coeff(j) as u128 % m;
                    acc += uv * c as u128 % m;
                }
            }
            out[k] = (acc % m) as u64;
        }
        s.elem_from_reduced(out)
    }

    /// Checked product for foreign elements (shape errors instead of panics).
    pub fn try_product(&self, u: Elem, v: Elem) -> Result<Elem> {
        if u.rank() != self.shape.rank() || v.rank() != self.shape.rank() {
            return Err(Error::RankMismatch {
                expected: self.shape.rank(),
                got: u.rank().max(v.rank()),
            });
        }
        Ok(self.product(u, v))
    }

    /// Torsion compatibility of the table: `p^{e_i} x_i = 0` forces
    /// `p^{e_i} (x_i * x_j) = 0`, i.e. coefficient `k` of `x_i * x_j` must be
    /// divisible by `p^{max(0, e_k - min(e_i, e_j))}`.
    pub fn check_well_defined(&self) -> Vec<WellDefViolation> {
        let s = &self.shape;
        let r = s.rank();
        let mut out = Vec::new();
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    let need = s.exponent(k).saturating_sub(s.exponent(i).min(s.exponent(j)));
                    if need == 0 {
                        continue;
                    }
                    let c = self.table.get(i, j).coeff(k);
                    if !c.is_multiple_of(s.p().pow(need)) {
                        out.push(WellDefViolation {
                            row: i,
                            col: j,
                            coord: k,
                            required_val: need,
                            coefficient: c,
                        });
                    }
                }
            }
        }
        out
    }

    /// Evaluates the pre-Lie identity
    /// `(a.b).c - a.(b.c) = (b.a).c - b.(a.c)` on all basis triples. The
    /// associator difference is trilinear, so basis triples suffice.
    pub fn check_prelie_axiom(&self) -> Vec<AxiomViolation> {
        let r = self.shape.rank();
        let mut out = Vec::new();
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    let a = self.shape.basis(i);
                    let b = self.shape.basis(j);
                    let c = self.shape.basis(k);
                    let (lhs, rhs) = self.identity_sides(a, b, c);
                    if lhs != rhs {
                        out.push(AxiomViolation { triple: (i, j, k), lhs, rhs });
                    }
                }
            }
        }
        out
    }

    /// Both sides of the pre-Lie identity for arbitrary elements; used by the
    /// random spot-check sweeps.
    pub fn identity_sides(&self, a: Elem, b: Elem, c: Elem) -> (Elem, Elem) {
        let s = &self.shape;
        let lhs = s.sub(self.product(self.product(a, b), c), self.product(a, self.product(b, c)));
        let rhs = s.sub(self.product(self.product(b, a), c), self.product(b, self.product(a, c)));
        (lhs, rhs)
    }

    pub fn identity_holds(&self, a: Elem, b: Elem, c: Elem) -> bool {
        let (lhs, rhs) = self.identity_sides(a, b, c);
        lhs == rhs
    }

    fn full_group(&self) -> SubgroupBasis {
        let gens: Vec<Elem> = (0..self.shape.rank()).map(|i| self.shape.basis(i)).collect();
        span_closure(&self.shape, &gens)
    }

    /// Strong chain `A = A^[1] ⊇ A^[2] ⊇ ...` down to zero, where
    /// `A^[i+1] = sum_{j=1}^{i} A^[j] . A^[i+1-j]`. Products of echelon
    /// generators suffice by bilinearity. A chain that stabilizes at a
    /// nonzero subgroup flags the ring as not nilpotent.
    pub fn strong_chain(&self) -> Result<Vec<SubgroupBasis>> {
        let mut chain = vec![self.full_group()];
        loop {
            let i = chain.len();
            let mut prods = Vec::new();
            for j in 1..=i {
                let left = &chain[j - 1];
                let right = &chain[i - j];
                for u in left.generators() {
                    for v in right.generators() {
                        prods.push(self.product(*u, *v));
                    }
                }
            }
            let next = span_closure(&self.shape, &prods);
            let prev = chain.last().unwrap();
            if &next == prev || chain.len() > 64 {
                return Err(Error::NotNilpotent { order: next.order() });
            }
            let done = next.is_trivial();
            chain.push(next);
            if done {
                return Ok(chain);
            }
        }
    }

    /// Left chain `A^{i+1} = A . A^i`.
    pub fn left_chain(&self) -> Result<Vec<SubgroupBasis>> {
        self.one_sided_chain(true)
    }

    /// Right chain `A^{(i+1)} = A^{(i)} . A`.
    pub fn right_chain(&self) -> Result<Vec<SubgroupBasis>> {
        self.one_sided_chain(false)
    }

    fn one_sided_chain(&self, left: bool) -> Result<Vec<SubgroupBasis>> {
        let full = self.full_group();
        let basis: Vec<Elem> = (0..self.shape.rank()).map(|i| self.shape.basis(i)).collect();
        let mut chain = vec![full];
        loop {
            let prev = chain.last().unwrap();
            let mut prods = Vec::new();
            for g in prev.generators() {
                for b in &basis {
                    prods.push(if left { self.product(*b, *g) } else { self.product(*g, *b) });
                }
            }
            let next = span_closure(&self.shape, &prods);
            if &next == prev || chain.len() > 64 {
                return Err(Error::NotNilpotent { order: next.order() });
            }
            let done = next.is_trivial();
            chain.push(next);
            if done {
                return Ok(chain);
            }
        }
    }

    /// Smallest `n` with `A^[n] = 0` (so the zero ring has index 2).
    pub fn nilpotency_index(&self) -> Result<usize> {
        Ok(self.strong_chain()?.len())
    }

    /// Report-style chain data: orders down to zero or to the point of
    /// stabilization, plus the nilpotency verdict.
    pub fn chain_summaries(&self) -> (ChainSummary, ChainSummary, ChainSummary) {
        let summarize = |res: Result<Vec<SubgroupBasis>>, fallback: &dyn Fn() -> Vec<u64>| match res
        {
            Ok(chain) => ChainSummary {
                orders: chain_orders(&chain),
                nilpotent: true,
                index: Some(chain.len()),
            },
            Err(_) => ChainSummary { orders: fallback(), nilpotent: false, index: None },
        };
        let left = summarize(self.left_chain(), &|| self.stabilized_orders(ChainKind::Left));
        let right = summarize(self.right_chain(), &|| self.stabilized_orders(ChainKind::Right));
        let strong = summarize(self.strong_chain(), &|| self.stabilized_orders(ChainKind::Strong));
        (left, right, strong)
    }

    /// Orders until the chain repeats, for non-nilpotent reporting.
    fn stabilized_orders(&self, kind: ChainKind) -> Vec<u64> {
        let basis: Vec<Elem> = (0..self.shape.rank()).map(|i| self.shape.basis(i)).collect();
        let mut chain = vec![self.full_group()];
        loop {
            let next = match kind {
                ChainKind::Strong => {
                    let i = chain.len();
                    let mut prods = Vec::new();
                    for j in 1..=i {
                        for u in chain[j - 1].generators() {
                            for v in chain[i - j].generators() {
                                prods.push(self.product(*u, *v));
                            }
                        }
                    }
                    span_closure(&self.shape, &prods)
                }
                ChainKind::Left | ChainKind::Right => {
                    let prev = chain.last().unwrap();
                    let mut prods = Vec::new();
                    for g in prev.generators() {
                        for b in &basis {
                            prods.push(match kind {
                                ChainKind::Left => self.product(*b, *g),
                                _ => self.product(*g, *b),
                            });
                        }
                    }
                    span_closure(&self.shape, &prods)
                }
            };
            let stop = &next == chain.last().unwrap() || next.is_trivial() || chain.len() > 64;
            chain.push(next);
            if stop {
                return chain_orders(&chain);
            }
        }
    }
}

#[derive(Clone, Copy)]
enum ChainKind {
    Left,
    Right,
    Strong,
}

/// Canonical additive subgroup of a [`Shape`], stored as the Hermite normal
/// form of the lattice spanned by the generators together with the torsion
/// relations `p^{e_i} x_i`. The HNF is unique per subgroup, which gives
/// canonical equality, cheap membership and exact orders.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SubgroupBasis {
    shape: Shape,
    hnf: [[u64; MAX_RANK]; MAX_RANK],
    order: u64,
    generators: Vec<Elem>,
}

/// Echelonized basis of the additive subgroup generated by `gens`.
///
/// Incremental row-style HNF: the working matrix stays upper triangular with
/// positive diagonal (seeded with the torsion relations `p^{e_i} x_i`), and
/// each generator is folded in by Euclidean steps against the pivots. Cost is
/// linear in the number of generators, which matters for brace chains where
/// whole subgroups are fed in.
pub fn span_closure(shape: &Shape, gens: &[Elem]) -> SubgroupBasis {
    let r = shape.rank();
    let mut rows = [[0i128; MAX_RANK]; MAX_RANK];
    for (i, row) in rows.iter_mut().enumerate().take(r) {
        row[i] = shape.modulus(i) as i128;
    }

    for g in gens {
        if g.is_zero() {
            continue;
        }
        let mut v = [0i128; MAX_RANK];
        for (i, item) in v.iter_mut().enumerate().take(r) {
            *item = g.coeff(i) as i128;
        }
        for col in 0..r {
            if v[col] == 0 {
                continue;
            }
            loop {
                let pivot = rows[col][col];
                let q = v[col].div_euclid(pivot);
                for c in col..r {
                    v[c] -= q * rows[col][c];
                }
                if v[col] == 0 {
                    break;
                }
                // 0 < v[col] < pivot: make v the new, smaller pivot row and
                // keep reducing what used to be there
                std::mem::swap(&mut rows[col], &mut v);
            }
        }
    }

    // Canonical form: entries above each pivot reduced into [0, pivot).
    for i in 0..r {
        for row in 0..i {
            let q = rows[row][i].div_euclid(rows[i][i]);
            if q != 0 {
                for c in i..r {
                    rows[row][c] -= q * rows[i][c];
                }
            }
        }
    }

    let mut hnf = [[0u64; MAX_RANK]; MAX_RANK];
    let mut order = 1u64;
    for i in 0..r {
        for j in 0..r {
            debug_assert!(rows[i][j] >= 0);
            hnf[i][j] = rows[i][j] as u64;
        }
        debug_assert!(shape.modulus(i).is_multiple_of(hnf[i][i]), "pivot divides the torsion modulus");
        order *= shape.modulus(i) / hnf[i][i];
    }

    let mut generators = Vec::new();
    for row in hnf.iter().take(r) {
        let coeffs: Vec<i64> = (0..r).map(|j| row[j] as i64).collect();
        let e = shape.elem(&coeffs).expect("row has shape rank");
        if !e.is_zero() {
            generators.push(e);
        }
    }

    SubgroupBasis { shape: *shape, hnf, order, generators }
}

impl SubgroupBasis {
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    /// Nonzero echelon rows, reduced into the shape; an additive generating
    /// set of the subgroup.
    pub fn generators(&self) -> &[Elem] {
        &self.generators
    }

    pub fn contains(&self, e: Elem) -> bool {
        let r = self.shape.rank();
        let mut v = [0i128; MAX_RANK];
        for (i, item) in v.iter_mut().enumerate().take(r) {
            *item = e.coeff(i) as i128;
        }
        for i in 0..r {
            let pv = self.hnf[i][i] as i128;
            if v[i] % pv != 0 {
                return false;
            }
            let q = v[i] / pv;
            for j in 0..r {
                v[j] -= q * self.hnf[i][j] as i128;
            }
        }
        v[..r].iter().all(|&x| x == 0)
    }

    pub fn is_subgroup_of(&self, other: &SubgroupBasis) -> bool {
        self.generators.iter().all(|g| other.contains(*g))
    }

    /// Every element, as sums of echelon rows; exactly `order()` values.
    pub fn elements(&self) -> Vec<Elem> {
        let r = self.shape.rank();
        let mut out = vec![self.shape.zero()];
        for i in 0..r {
            let reps = self.shape.modulus(i) / self.hnf[i][i];
            if reps == 1 {
                continue;
            }
            let coeffs: Vec<i64> = (0..r).map(|j| self.hnf[i][j] as i64).collect();
            let row = self.shape.elem(&coeffs).expect("row has shape rank");
            let mut next = Vec::with_capacity(out.len() * reps as usize);
            for base in &out {
                let mut acc = *base;
                for _ in 0..reps {
                    next.push(acc);
                    acc = self.shape.add(acc, row);
                }
            }
            out = next;
        }
        debug_assert_eq!(out.len() as u64, self.order);
        out
    }

    /// The subgroup `n * H` (images of all elements under multiplication by n).
    pub fn scaled(&self, n: i128) -> SubgroupBasis {
        let gens: Vec<Elem> =
            self.generators.iter().map(|g| self.shape.scalar_mul(n, *g)).collect();
        span_closure(&self.shape, &gens)
    }
}

/// Orders along a chain, e.g. `[2401, 7, 1]`.
pub fn chain_orders(chain: &[SubgroupBasis]) -> Vec<u64> {
    chain.iter().map(|s| s.order()).collect()
}
