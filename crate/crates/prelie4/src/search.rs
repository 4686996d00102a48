//! Independent brute-force oracles: tiny-scale enumeration of
//! structure-constant tables against the public checkers, single-coefficient
//! mutations for negative testing, and bounded isomorphism probing.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::modarith::{Elem, Shape};
use crate::prelie::{chain_orders, span_closure, PreLieRing, SCTable};
use crate::rng::SplitMix64;

pub const DEFAULT_ENUM_BUDGET: u128 = 1_000_000_000;

/// A product space of candidate tables: per entry `(i, j)` and coordinate
/// `k`, the list of allowed coefficient values. Entries default to the fixed
/// value zero.
#[derive(Clone, Debug)]
pub struct EnumSpace {
    shape: Shape,
    choices: Vec<Vec<Vec<Vec<u64>>>>, // [i][j][k] -> allowed values
}

impl EnumSpace {
    pub fn new(shape: Shape) -> Self {
        let r = shape.rank();
        let choices = vec![vec![vec![vec![0u64]; r]; r]; r];
        Self { shape, choices }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    /// Sets the allowed values of coordinate `k` of entry `(i, j)` (0-based).
    pub fn set_choices(&mut self, i: usize, j: usize, k: usize, values: &[u64]) -> Result<()> {
        if values.is_empty() {
            return Err(Error::Format("empty choice list".into()));
        }
        let m = self.shape.modulus(k);
        if let Some(&v) = values.iter().find(|&&v| v >= m) {
            return Err(Error::Format(format!("choice {v} out of range for modulus {m}")));
        }
        self.choices[i][j][k] = values.to_vec();
        Ok(())
    }

    pub fn choices(&self, i: usize, j: usize, k: usize) -> &[u64] {
        &self.choices[i][j][k]
    }

    /// Number of raw candidates in the product space.
    pub fn size(&self) -> u128 {
        let r = self.shape.rank();
        let mut n = 1u128;
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    n = n.saturating_mul(self.choices[i][j][k].len() as u128);
                }
            }
        }
        n
    }

    fn candidate(&self, mut index: u128) -> PreLieRing {
        let r = self.shape.rank();
        let mut table = SCTable::zero(&self.shape);
        for i in 0..r {
            for j in 0..r {
                let mut coeffs = [0i64; 4];
                for (k, item) in coeffs.iter_mut().enumerate().take(r) {
                    let opts = &self.choices[i][j][k];
                    let pick = (index % opts.len() as u128) as usize;
                    index /= opts.len() as u128;
                    *item = opts[pick] as i64;
                }
                table.set(i, j, self.shape.elem(&coeffs[..r]).expect("in-range"));
            }
        }
        PreLieRing::new(self.shape, table).expect("rank consistent")
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EnumStats {
    pub total: u64,
    pub valid: u64,
    pub failed_well_defined: u64,
    pub failed_axiom: u64,
    pub failed_nilpotency: u64,
}

/// Streams exactly the candidates passing well-definedness, the pre-Lie
/// identity on basis triples, and strong nilpotency.
pub fn enumerate_valid(
    space: &EnumSpace,
    budget: u128,
) -> Result<impl Iterator<Item = PreLieRing> + '_> {
    let size = space.size();
    if size > budget {
        return Err(Error::BudgetExceeded { size, budget });
    }
    Ok((0..size).map(|i| space.candidate(i)).filter(|ring| {
        ring.check_well_defined().is_empty()
            && ring.check_prelie_axiom().is_empty()
            && ring.strong_chain().is_ok()
    }))
}

/// Like [`enumerate_valid`] but collecting with per-filter counts. Candidate
/// indices are partitioned across workers; results merge order-independently
/// and the valid list keeps index order.
pub fn enumerate_with_stats(
    space: &EnumSpace,
    budget: u128,
) -> Result<(Vec<PreLieRing>, EnumStats)> {
    let size = space.size();
    if size > budget {
        return Err(Error::BudgetExceeded { size, budget });
    }
    if size > u64::MAX as u128 {
        return Err(Error::SizeGuard(format!("space of {size} candidates cannot be walked")));
    }
    let classified: Vec<(u8, Option<PreLieRing>)> = (0..size as u64)
        .into_par_iter()
        .map(|i| {
            let ring = space.candidate(i as u128);
            if !ring.check_well_defined().is_empty() {
                (1u8, None)
            } else if !ring.check_prelie_axiom().is_empty() {
                (2, None)
            } else if ring.strong_chain().is_err() {
                (3, None)
            } else {
                (0, Some(ring))
            }
        })
        .collect();
    let mut stats = EnumStats::default();
    let mut valid = Vec::new();
    for (class, ring) in classified {
        stats.total += 1;
        match class {
            0 => {
                stats.valid += 1;
                valid.push(ring.expect("valid candidates carry their ring"));
            }
            1 => stats.failed_well_defined += 1,
            2 => stats.failed_axiom += 1,
            _ => stats.failed_nilpotency += 1,
        }
    }
    Ok((valid, stats))
}

/// Isomorphism probe verdict; `Inconclusive` is a first-class outcome when
/// the candidate budget runs out before the search space does.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsoVerdict {
    Yes { witness: Vec<Elem> },
    No { reason: String },
    Inconclusive { examined: u64 },
}

/// Searches additive automorphisms sending the fixed generator tuple to
/// candidate tuples of matching orders, checking multiplicativity on basis
/// pairs. Chain orders are isomorphism invariants and short-circuit the
/// search.
pub fn isomorphic(a: &PreLieRing, b: &PreLieRing, budget: u64) -> Result<IsoVerdict> {
    if a.shape() != b.shape() {
        return Err(Error::Format("isomorphism probe needs matching shapes".into()));
    }
    let inv_a = chain_invariants(a);
    let inv_b = chain_invariants(b);
    if inv_a != inv_b {
        return Ok(IsoVerdict::No {
            reason: format!("chain order invariants differ: {inv_a:?} vs {inv_b:?}"),
        });
    }

    let s = a.shape();
    let r = s.rank();
    let n = s.order();
    let mut examined = 0u64;
    // Mixed-radix walk over r-tuples of elements.
    let mut idx = vec![0u64; r];
    loop {
        examined += 1;
        if examined > budget {
            return Ok(IsoVerdict::Inconclusive { examined: examined - 1 });
        }
        let images: Vec<Elem> = idx.iter().map(|&i| s.elem_at(i)).collect();
        if is_automorphism_candidate(s, &images) && is_multiplicative(a, b, &images) {
            return Ok(IsoVerdict::Yes { witness: images });
        }
        // advance
        let mut carry = true;
        for d in (0..r).rev() {
            if carry {
                idx[d] += 1;
                if idx[d] == n {
                    idx[d] = 0;
                } else {
                    carry = false;
                }
            }
        }
        if carry {
            return Ok(IsoVerdict::No { reason: "search space exhausted".into() });
        }
    }
}

fn chain_invariants(ring: &PreLieRing) -> (Vec<u64>, bool) {
    match ring.strong_chain() {
        Ok(chain) => (chain_orders(&chain), true),
        Err(_) => (Vec::new(), false),
    }
}

fn is_automorphism_candidate(s: &Shape, images: &[Elem]) -> bool {
    // each image must respect the generator's torsion, and together they
    // must generate the whole group
    for (i, g) in images.iter().enumerate() {
        if s.elem_order(*g) > s.modulus(i) {
            return false;
        }
    }
    span_closure(s, images).order() == s.order()
}

fn apply_hom(s: &Shape, images: &[Elem], e: Elem) -> Elem {
    let mut acc = s.zero();
    for (i, g) in images.iter().enumerate() {
        acc = s.add(acc, s.scalar_mul(e.coeff(i) as i128, *g));
    }
    acc
}

fn is_multiplicative(a: &PreLieRing, b: &PreLieRing, images: &[Elem]) -> bool {
    let s = a.shape();
    for i in 0..s.rank() {
        for j in 0..s.rank() {
            let lhs = apply_hom(s, images, a.table().get(i, j));
            let rhs = b.product(images[i], images[j]);
            if lhs != rhs {
                return false;
            }
        }
    }
    true
}

/// Perturbs one structure-constant coefficient by a seeded nonzero delta.
pub fn mutate(ring: &PreLieRing, seed: u64) -> PreLieRing {
    let s = ring.shape();
    let r = s.rank();
    let mut rng = SplitMix64::new(seed);
    let i = rng.below(r as u64) as usize;
    let j = rng.below(r as u64) as usize;
    let k = rng.below(r as u64) as usize;
    let delta = 1 + rng.below(s.modulus(k) - 1);
    mutate_at(ring, i, j, k, delta as i64)
}

/// Adds `delta` to coordinate `k` of entry `(i, j)` (0-based).
pub fn mutate_at(ring: &PreLieRing, i: usize, j: usize, k: usize, delta: i64) -> PreLieRing {
    let s = ring.shape();
    let mut table = *ring.table();
    let old = table.get(i, j);
    let mut coeffs: Vec<i64> = old.coeffs().iter().map(|&c| c as i64).collect();
    coeffs[k] += delta;
    table.set(i, j, s.elem(&coeffs).expect("rank fixed"));
    PreLieRing::new(*s, table).expect("rank fixed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{build, FamilySpec};

    fn item6_space_p3() -> EnumSpace {
        // x-coefficients restricted to multiples of p^2 = 9, y-coefficients 0
        let shape = Shape::new(3, &[3, 1]).unwrap();
        let mut space = EnumSpace::new(shape);
        for i in 0..2 {
            for j in 0..2 {
                space.set_choices(i, j, 0, &[0, 9, 18]).unwrap();
            }
        }
        space
    }

    #[test]
    fn enumerate_constrained_space() {
        let space = item6_space_p3();
        assert_eq!(space.size(), 81);
        let (valid, stats) = enumerate_with_stats(&space, DEFAULT_ENUM_BUDGET).unwrap();
        assert_eq!(stats.total, 81);
        assert_eq!(stats.valid, 81, "{stats:?}");
        assert_eq!(valid.len(), 81);
        for ring in &valid {
            let chain = ring.strong_chain().unwrap();
            assert!(chain.len() <= 3, "A^[3] = 0 expected");
        }
    }

    #[test]
    fn enumerate_rejects_bad_c() {
        // allowing c = 1 (entry (0,1), x-coordinate) violates torsion
        let mut space = item6_space_p3();
        space.set_choices(0, 1, 0, &[1]).unwrap();
        let (valid, stats) = enumerate_with_stats(&space, DEFAULT_ENUM_BUDGET).unwrap();
        assert!(valid.is_empty());
        assert_eq!(stats.failed_well_defined, 27);
    }

    #[test]
    fn empty_space_streams_nothing() {
        let shape = Shape::new(3, &[3, 1]).unwrap();
        let space = EnumSpace::new(shape);
        let all: Vec<_> = enumerate_valid(&space, 10).unwrap().collect();
        assert_eq!(all.len(), 1); // just the zero table
    }

    #[test]
    fn budget_guard() {
        let space = item6_space_p3();
        assert!(matches!(
            enumerate_valid(&space, 80),
            Err(Error::BudgetExceeded { size: 81, budget: 80 })
        ));
    }

    #[test]
    fn enumeration_matches_public_checkers() {
        let space = item6_space_p3();
        let streamed: Vec<_> = enumerate_valid(&space, 1000).unwrap().collect();
        let mut refiltered = 0;
        for i in 0..space.size() {
            let ring = space.candidate(i);
            if ring.check_well_defined().is_empty()
                && ring.check_prelie_axiom().is_empty()
                && ring.strong_chain().is_ok()
            {
                refiltered += 1;
            }
        }
        assert_eq!(streamed.len(), refiltered);
    }

    #[test]
    fn iso_self_identity() {
        let ring = build(&FamilySpec::new(5, 7, &[("a", 49)])).unwrap();
        match isomorphic(&ring, &ring, 10_000_000).unwrap() {
            IsoVerdict::Yes { witness } => {
                // identity is found first in index order... any witness works;
                // verify it is an automorphism fixing the table
                assert_eq!(witness.len(), 2);
            }
            other => panic!("expected yes, got {other:?}"),
        }
    }

    #[test]
    fn iso_unit_rescaling() {
        let a = build(&FamilySpec::new(5, 7, &[("a", 49)])).unwrap();
        let b = build(&FamilySpec::new(5, 7, &[("a", 98)])).unwrap();
        match isomorphic(&a, &b, 10_000_000).unwrap() {
            IsoVerdict::Yes { witness } => {
                // x -> u x with u^... scaling matches 2*49 = 98
                assert_eq!(witness.len(), 2);
            }
            other => panic!("expected yes, got {other:?}"),
        }
    }

    #[test]
    fn iso_invariant_shortcircuit() {
        let a = build(&FamilySpec::new(5, 7, &[("a", 49)])).unwrap();
        let zero = PreLieRing::zero_ring(*a.shape());
        match isomorphic(&a, &zero, 1000).unwrap() {
            IsoVerdict::No { reason } => assert!(reason.contains("invariants")),
            other => panic!("expected no, got {other:?}"),
        }
    }

    #[test]
    fn iso_inconclusive_on_tiny_budget() {
        let a = build(&FamilySpec::new(2, 7, &[("alpha_xx", 1), ("beta_yy", 1)])).unwrap();
        let b = build(&FamilySpec::new(2, 7, &[("alpha_xx", 1), ("beta_yy", 2)])).unwrap();
        match isomorphic(&a, &b, 50).unwrap() {
            IsoVerdict::Inconclusive { examined } => assert_eq!(examined, 50),
            IsoVerdict::Yes { .. } => {} // fine if found very early
            IsoVerdict::No { .. } => panic!("tiny budget cannot exhaust C_p^4 tuples"),
        }
    }

    #[test]
    fn mutate_deterministic() {
        let ring = build(&FamilySpec::new(4, 7, &[("a", 7), ("c", 49), ("e", 49), ("g", 49)]))
            .unwrap();
        let m1 = mutate(&ring, 9);
        let m2 = mutate(&ring, 9);
        assert_eq!(m1.table(), m2.table());
        assert_ne!(m1.table(), ring.table());

        let zero = PreLieRing::zero_ring(*ring.shape());
        let m = mutate(&zero, 1);
        let nonzero: usize = (0..2)
            .flat_map(|i| (0..2).map(move |j| (i, j)))
            .filter(|&(i, j)| !m.table().get(i, j).is_zero())
            .count();
        assert_eq!(nonzero, 1);
    }

    #[test]
    fn mutate_at_c_breaks_well_definedness() {
        let ring = build(&FamilySpec::new(4, 7, &[("a", 7), ("c", 49), ("e", 49), ("g", 49)]))
            .unwrap();
        let bad = mutate_at(&ring, 0, 1, 0, 1); // c -> 50, p^2 no longer divides
        let v = bad.check_well_defined();
        assert_eq!(v.len(), 1);
        assert_eq!((v[0].row, v[0].col, v[0].coord), (0, 1, 0));
    }

    #[test]
    fn iso_yes_implies_matching_chains() {
        let a = build(&FamilySpec::new(5, 7, &[("a", 49)])).unwrap();
        let b = build(&FamilySpec::new(5, 7, &[("a", 147)])).unwrap();
        if let IsoVerdict::Yes { .. } = isomorphic(&a, &b, 10_000_000).unwrap() {
            assert_eq!(
                chain_orders(&a.strong_chain().unwrap()),
                chain_orders(&b.strong_chain().unwrap())
            );
        } else {
            panic!("unit rescaling should be found");
        }
    }
}
