//! Set-theoretic Yang-Baxter solutions extracted from a brace, and their
//! certification: non-degeneracy (every lambda map bijective), involutivity
//! and the braid relation.
//!
//! The extraction is the standard left-brace one, fixed normatively here so
//! implementations agree: `lambda_a(b) = a*b + b` and
//! `r(a, b) = (lambda_a(b), lambda_{lambda_a(b)}^{-1}(a))`.

use rayon::prelude::*;

use crate::brace::{Brace, MATERIALIZE_CAP};
use crate::error::{Error, Result};
use crate::modarith::Elem;
use crate::report::CheckItem;
use crate::rng::SplitMix64;

/// `lambda_a(b) = a*b + b`.
pub fn lambda_map(brace: &Brace, a: Elem, b: Elem) -> Elem {
    let s = brace.shape();
    s.add(brace.star(a, b), b)
}

/// Cached lambda permutations and their inverses for every `a`; desk-scale
/// only (order capped like materialized circle tables).
pub struct LambdaTables {
    n: usize,
    lam: Vec<u16>,
    inv: Vec<u16>,
    /// indices a for which lambda_a failed to be a bijection
    degenerate: Vec<usize>,
}

impl LambdaTables {
    pub fn build(brace: &Brace) -> Result<Self> {
        let s = brace.shape();
        let n = s.order();
        if n > MATERIALIZE_CAP {
            return Err(Error::SizeGuard(format!(
                "lambda tables need order <= {MATERIALIZE_CAP}, got {n}"
            )));
        }
        let n = n as usize;
        let rows: Vec<(Vec<u16>, bool)> = (0..n)
            .into_par_iter()
            .map(|i| {
                let a = s.elem_at(i as u64);
                let row = brace.row(a);
                let mut seen = vec![false; n];
                let mut out = Vec::with_capacity(n);
                let mut bijective = true;
                for j in 0..n {
                    let b = s.elem_at(j as u64);
                    let lam = s.add(row.star(b), b);
                    let idx = s.elem_index(lam) as usize;
                    if seen[idx] {
                        bijective = false;
                    }
                    seen[idx] = true;
                    out.push(idx as u16);
                }
                (out, bijective)
            })
            .collect();

        let mut lam = Vec::with_capacity(n * n);
        let mut degenerate = Vec::new();
        for (i, (row, bijective)) in rows.into_iter().enumerate() {
            if !bijective {
                degenerate.push(i);
            }
            lam.extend(row);
        }
        let mut inv = vec![0u16; n * n];
        if degenerate.is_empty() {
            for i in 0..n {
                for j in 0..n {
                    inv[i * n + lam[i * n + j] as usize] = j as u16;
                }
            }
        }
        Ok(Self { n, lam, inv, degenerate })
    }

    pub fn non_degenerate(&self) -> bool {
        self.degenerate.is_empty()
    }

    pub fn degenerate_rows(&self) -> &[usize] {
        &self.degenerate
    }

    #[inline]
    pub fn lambda(&self, a: usize, b: usize) -> usize {
        self.lam[a * self.n + b] as usize
    }

    #[inline]
    pub fn lambda_inv(&self, a: usize, b: usize) -> usize {
        self.inv[a * self.n + b] as usize
    }

    /// `r(a, b)` on element indices.
    #[inline]
    pub fn r(&self, a: usize, b: usize) -> (usize, usize) {
        let u = self.lambda(a, b);
        (u, self.lambda_inv(u, a))
    }
}

/// `r(a, b) = (lambda_a(b), lambda_{lambda_a(b)}^{-1}(a))`; requires the
/// lambda maps to be bijective.
pub fn r_map(brace: &Brace, a: Elem, b: Elem) -> Result<(Elem, Elem)> {
    let s = brace.shape();
    let tables = LambdaTables::build(brace)?;
    if !tables.non_degenerate() {
        return Err(Error::Regime(
            "lambda maps are not all bijective; r is undefined".into(),
        ));
    }
    let (u, v) = tables.r(s.elem_index(a) as usize, s.elem_index(b) as usize);
    Ok((s.elem_at(u as u64), s.elem_at(v as u64)))
}

/// Certifies the solution extracted from `brace`:
/// non-degeneracy exhaustively, involutivity `r(r(a,b)) = (a,b)` on all
/// ordered pairs, and the braid relation
/// `(r x id)(id x r)(r x id) = (id x r)(r x id)(id x r)` on seeded triples.
pub fn certify_solution(brace: &Brace, sample_count: usize, seed: u64) -> Result<Vec<CheckItem>> {
    let n = brace.shape().order() as usize;
    let tables = LambdaTables::build(brace)?;
    let mut out = Vec::new();

    if tables.non_degenerate() {
        out.push(CheckItem::pass("lambda_bijective", format!("exhaustive over {n} maps")));
    } else {
        let e = brace.shape().elem_at(tables.degenerate_rows()[0] as u64);
        out.push(CheckItem::fail(
            "lambda_bijective",
            format!("{} degenerate maps, first at a={e:?}", tables.degenerate_rows().len()),
        ));
        return Ok(out);
    }

    // involutivity on all n^2 ordered pairs
    let bad_pair = (0..n).into_par_iter().find_map_any(|a| {
        for b in 0..n {
            let (u, v) = tables.r(a, b);
            if tables.r(u, v) != (a, b) {
                return Some((a, b));
            }
        }
        None
    });
    match bad_pair {
        None => out.push(CheckItem::pass(
            "involutive",
            format!("exhaustive over {} ordered pairs", n * n),
        )),
        Some((a, b)) => {
            let s = brace.shape();
            out.push(CheckItem::fail(
                "involutive",
                format!("r^2 != id at ({:?}, {:?})", s.elem_at(a as u64), s.elem_at(b as u64)),
            ));
        }
    }

    // braid relation on seeded triples
    let mut rng = SplitMix64::new(seed);
    let mut bad = 0u64;
    let mut witness = String::new();
    let r12 = |t: (usize, usize, usize)| {
        let (u, v) = tables.r(t.0, t.1);
        (u, v, t.2)
    };
    let r23 = |t: (usize, usize, usize)| {
        let (u, v) = tables.r(t.1, t.2);
        (t.0, u, v)
    };
    for _ in 0..sample_count {
        let t = (
            rng.below(n as u64) as usize,
            rng.below(n as u64) as usize,
            rng.below(n as u64) as usize,
        );
        let lhs = r12(r23(r12(t)));
        let rhs = r23(r12(r23(t)));
        if lhs != rhs {
            bad += 1;
            if witness.is_empty() {
                witness = format!("{t:?}");
            }
        }
    }
    if bad == 0 {
        out.push(CheckItem::pass(
            "braid_relation",
            format!("{sample_count} seeded triples, seed {seed}"),
        ));
    } else {
        out.push(CheckItem::fail(
            "braid_relation",
            format!("{bad} violations over {sample_count} triples (seed {seed}); first {witness}"),
        ));
    }

    Ok(out)
}

/// Full pair-map export of the solution; desk scale only.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct SolutionDoc {
    pub schema: u32,
    pub p: u64,
    pub exponents: Vec<u32>,
    pub pairs: Vec<SolutionPair>,
}

#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct SolutionPair {
    pub a: Vec<u64>,
    pub b: Vec<u64>,
    pub ra: Vec<u64>,
    pub rb: Vec<u64>,
}

pub fn export_solution(brace: &Brace) -> Result<SolutionDoc> {
    let s = brace.shape();
    let tables = LambdaTables::build(brace)?;
    if !tables.non_degenerate() {
        return Err(Error::Regime("degenerate solution cannot be exported".into()));
    }
    let n = s.order() as usize;
    let mut pairs = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let (u, v) = tables.r(a, b);
            pairs.push(SolutionPair {
                a: s.elem_at(a as u64).coeffs().to_vec(),
                b: s.elem_at(b as u64).coeffs().to_vec(),
                ra: s.elem_at(u as u64).coeffs().to_vec(),
                rb: s.elem_at(v as u64).coeffs().to_vec(),
            });
        }
    }
    Ok(SolutionDoc {
        schema: crate::io::SCHEMA_VERSION,
        p: s.p(),
        exponents: s.exponents().to_vec(),
        pairs,
    })
}
