//! Canonical constructors for the ten classified families of nilpotent
//! pre-Lie rings of cardinality `p^4`, with full parameter validation and
//! seeded sampling of valid parameter draws.
//!
//! Family ids and their additive groups:
//!
//! | id | group            | advertised chain                         |
//! |----|------------------|------------------------------------------|
//! | 1  | C_p^4            | A^[4] = 0 (A^[3] can be nonzero)          |
//! | 2  | C_p^4            | A^[2] != 0, A^[3] = 0 (two generators)    |
//! | 3  | C_p^4            | A^[2] != 0, A^[3] = 0 (three generators)  |
//! | 4  | C_p x C_{p^3}    | A^[4] = 0; A^[3] != 0 when p^2 does not divide a |
//! | 5  | C_p x C_{p^3}    | A^[2] != 0, A^[3] = 0 (one generator)     |
//! | 6  | C_p x C_{p^3}    | A^[2] != 0, A^[3] = 0 (two generators)    |
//! | 7  | C_{p^2} x C_{p^2}| A^[4] != 0, A^[5] = 0, A^[3]=pA, A^[4]=pA^[2] |
//! | 8  | C_{p^2} x C_{p^2}| A^[3] != 0, A^[4] = 0                     |
//! | 9  | C_{p^2} x C_{p^2}| A^[2] != 0, A^[3] = 0 (one generator)     |
//! | 10 | C_{p^2} x C_{p^2}| A^[2] != 0, A^[3] = 0 (two generators)    |

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::modarith::Shape;
use crate::prelie::{PreLieRing, SCTable};
use crate::rng::SplitMix64;

/// A catalog entry: family id (1..=10), prime, and named integer parameters.
/// Parameters are accepted as arbitrary integers and reduced into the
/// modulus the family assigns to each name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilySpec {
    pub family: u8,
    pub p: u64,
    pub params: BTreeMap<String, i64>,
}

impl FamilySpec {
    pub fn new(family: u8, p: u64, params: &[(&str, i64)]) -> Self {
        Self {
            family,
            p,
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }
}

/// How the divisibility conditions of family 10 are read. The catalog's
/// letter conditions (`p` coprime to `a..h`) contradict the derivation
/// behind them (`p | a..h`); the derivation-backed reading is the default
/// and the literal one is kept so the discrepancy can be demonstrated
/// rather than silently resolved.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ValidationMode {
    #[default]
    Derived,
    Literal,
}

#[derive(Clone, Debug, Default)]
pub struct FamilyReport {
    pub violations: Vec<String>,
    pub warnings: Vec<String>,
}

impl FamilyReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn family_shape(family: u8, p: u64) -> Result<Shape> {
    match family {
        1..=3 => Shape::new(p, &[1, 1, 1, 1]),
        4..=6 => Shape::new(p, &[3, 1]),
        7..=10 => Shape::new(p, &[2, 2]),
        other => Err(Error::FamilyConstraint(format!("unknown family id {other}"))),
    }
}

/// Modulus assigned to each named parameter of a family.
fn param_modulus(family: u8, name: &str, p: u64) -> u64 {
    match family {
        1..=3 => p,
        4 | 6 => {
            if name == "b" {
                p
            } else {
                p * p * p
            }
        }
        5 => p * p * p,
        7..=10 => p * p,
        _ => p,
    }
}

fn param_names(family: u8) -> &'static [&'static str] {
    match family {
        1 => &["a", "b", "c", "d", "e", "f", "g", "h"],
        2 => &[
            "alpha_xx", "alpha_xy", "alpha_yx", "alpha_yy", "beta_xx", "beta_xy", "beta_yx",
            "beta_yy",
        ],
        3 => &["beta_xx", "beta_xy", "beta_yx", "beta_yy"],
        4 => &["a", "b", "c", "e", "g"],
        5 => &["a"],
        6 => &["a", "c", "e", "g"],
        7 => &["a", "b", "c", "d"],
        8 => &["c", "e", "g", "h"],
        9 => &["a", "b", "alpha"],
        10 => &["a", "b", "c", "d", "e", "f", "g", "h"],
        _ => &[],
    }
}

/// Reduced parameter map: every declared name present, reduced into its
/// modulus; unknown names rejected.
fn reduced_params(spec: &FamilySpec) -> Result<BTreeMap<String, u64>> {
    let names = param_names(spec.family);
    if names.is_empty() {
        return Err(Error::FamilyConstraint(format!("unknown family id {}", spec.family)));
    }
    for k in spec.params.keys() {
        if !names.contains(&k.as_str()) {
            return Err(Error::FamilyConstraint(format!(
                "family {} has no parameter named {k}",
                spec.family
            )));
        }
    }
    let mut out = BTreeMap::new();
    for &name in names {
        let raw = spec.params.get(name).copied().unwrap_or(0);
        let m = param_modulus(spec.family, name, spec.p) as i128;
        out.insert(name.to_string(), (raw as i128).rem_euclid(m) as u64);
    }
    Ok(out)
}

/// Checks the named family's divisibility and relation constraints; an empty
/// violation list means the spec is buildable and carries the advertised
/// chain behaviour.
pub fn validate(spec: &FamilySpec) -> Result<FamilyReport> {
    validate_with_mode(spec, ValidationMode::Derived)
}

pub fn validate_with_mode(spec: &FamilySpec, mode: ValidationMode) -> Result<FamilyReport> {
    family_shape(spec.family, spec.p)?;
    let q = reduced_params(spec)?;
    let p = spec.p;
    let p2 = p * p;
    let p3 = p2 * p;
    let mut rep = FamilyReport::default();
    let g = |n: &str| q[n];

    match spec.family {
        1 => {
            let (a, b, c, d) = (g("a"), g("b"), g("c"), g("d"));
            let (e, f, gg, h) = (g("e"), g("f"), g("g"), g("h"));
            if a == 0 && b == 0 && c == 0 && d == 0 {
                rep.violations.push("a,b,c,d all zero".into());
            }
            if e == 0 && f == 0 && gg == 0 && h == 0 {
                rep.violations.push("e,f,g,h all zero".into());
            }
            let rel1 = (c * gg) as i128 - (b * h) as i128
                - ((b * gg) as i128 - (d * f) as i128);
            if rel1.rem_euclid(p as i128) != 0 {
                rep.violations.push("relation cg - bh = bg - df fails mod p".into());
            }
            let rel2 =
                (b * e) as i128 - (c * f) as i128 - ((c * e) as i128 - (a * h) as i128);
            if rel2.rem_euclid(p as i128) != 0 {
                rep.violations.push("relation be - cf = ce - ah fails mod p".into());
            }
        }
        2 => {
            let pairs: Vec<(u64, u64)> = [
                ("alpha_xx", "beta_xx"),
                ("alpha_xy", "beta_xy"),
                ("alpha_yx", "beta_yx"),
                ("alpha_yy", "beta_yy"),
            ]
            .iter()
            .map(|(a, b)| (g(a), g(b)))
            .collect();
            if pairs.iter().all(|&(a, b)| a == 0 && b == 0) {
                rep.violations.push("all (alpha, beta) pairs are zero".into());
            }
            // Rank over F_p of the 4x2 coefficient matrix.
            let rank = fp_pair_rank(&pairs, p);
            if rank < 2 {
                rep.warnings.push(
                    "coefficient pairs span less than two dimensions; the ring degenerates to a \
                     three-generated-or-smaller image"
                        .into(),
                );
            }
        }
        3 => {
            if ["beta_xx", "beta_xy", "beta_yx", "beta_yy"].iter().all(|n| g(n) == 0) {
                rep.violations.push("all beta coefficients are zero".into());
            }
        }
        4 => {
            let (a, b, c, e, gg) = (g("a"), g("b"), g("c"), g("e"), g("g"));
            if !a.is_multiple_of(p) {
                rep.violations.push("p does not divide a".into());
            }
            for (n, v) in [("c", c), ("e", e), ("g", gg)] {
                if !v.is_multiple_of(p2) {
                    rep.violations.push(format!("p^2 does not divide {n}"));
                }
            }
            if !(b as u128 * gg as u128).is_multiple_of(p3 as u128) {
                rep.violations.push("p^3 does not divide b*g".into());
            }
            if b != 0 {
                rep.warnings.push(
                    "b is nonzero: such tables exist only with A^[3] = 0 (A^[3] != 0 forces b = 0)"
                        .into(),
                );
            }
        }
        5 => {
            let a = g("a");
            if !a.is_multiple_of(p2) {
                rep.violations.push("p^2 does not divide a".into());
            }
            if a == 0 {
                rep.violations.push("a is zero (A^[2] would vanish)".into());
            }
        }
        6 => {
            let vals = ["a", "c", "e", "g"].map(&g);
            for (n, v) in ["a", "c", "e", "g"].iter().zip(vals) {
                if !v.is_multiple_of(p2) {
                    rep.violations.push(format!("p^2 does not divide {n}"));
                }
            }
            if vals.iter().all(|&v| v == 0) {
                rep.violations.push("a,c,e,g all zero (A^[2] would vanish)".into());
            }
        }
        7 => {
            let (a, b, c, d) = (g("a"), g("b"), g("c"), g("d"));
            for (n, v) in [("a", a), ("b", b), ("c", c), ("d", d)] {
                if !v.is_multiple_of(p) {
                    rep.violations.push(format!("p does not divide {n}"));
                }
            }
            if a == 0 && c == 0 {
                rep.violations.push("a and c both zero (A^[4] would vanish)".into());
            }
            if a != 0 && c != 0 {
                // Need a unit alpha with a = alpha c and b = alpha d mod p^2.
                if !proportional_pair(a, b, c, d, p) {
                    rep.violations.push(
                        "no unit alpha with a = alpha*c and b = alpha*d mod p^2".into(),
                    );
                }
            }
        }
        8 => {
            let (c, e, gg, h) = (g("c"), g("e"), g("g"), g("h"));
            for (n, v) in [("c", c), ("e", e), ("h", h)] {
                if !v.is_multiple_of(p) {
                    rep.violations.push(format!("p does not divide {n}"));
                }
            }
            if gg.is_multiple_of(p) {
                rep.violations.push("p divides g".into());
            }
            if (c + h).is_multiple_of(p2) && (e + h).is_multiple_of(p2) {
                rep.violations
                    .push("c + h and e + h both vanish mod p^2 (A^[3] would vanish)".into());
            }
        }
        9 => {
            let (a, b, alpha) = (g("a"), g("b"), g("alpha"));
            if b.is_multiple_of(p) {
                rep.violations.push("p divides b".into());
            }
            if !(a + alpha * b).is_multiple_of(p2) {
                rep.violations
                    .push("a + alpha*b != 0 mod p^2 (A^[3] = 0 requires it)".into());
            }
        }
        10 => {
            let names = ["a", "b", "c", "d", "e", "f", "g", "h"];
            let vals = names.map(g);
            match mode {
                ValidationMode::Derived => {
                    for (n, v) in names.iter().zip(vals) {
                        if !v.is_multiple_of(p) {
                            rep.violations.push(format!("p does not divide {n}"));
                        }
                    }
                }
                ValidationMode::Literal => {
                    rep.warnings.push(
                        "literal mode: unit coefficients contradict the derivation \
                         (p | a..h); built tables are expected to fail nilpotency"
                            .into(),
                    );
                    for (n, v) in names.iter().zip(vals) {
                        if v.is_multiple_of(p) {
                            rep.violations.push(format!("p divides {n} (literal mode)"));
                        }
                    }
                }
            }
            if vals.iter().all(|&v| v == 0) {
                rep.violations.push("all eight constants are zero".into());
            }
        }
        other => return Err(Error::FamilyConstraint(format!("unknown family id {other}"))),
    }
    Ok(rep)
}

fn fp_pair_rank(pairs: &[(u64, u64)], p: u64) -> usize {
    // Rank of a set of vectors in F_p^2.
    let mut first: Option<(u64, u64)> = None;
    for &(a, b) in pairs {
        let (a, b) = (a % p, b % p);
        if a == 0 && b == 0 {
            continue;
        }
        match first {
            None => first = Some((a, b)),
            Some((x, y)) => {
                // independent iff determinant != 0
                if (a as i128 * y as i128 - b as i128 * x as i128).rem_euclid(p as i128) != 0 {
                    return 2;
                }
            }
        }
    }
    usize::from(first.is_some())
}

fn proportional_pair(a: u64, b: u64, c: u64, d: u64, p: u64) -> bool {
    let p2 = p * p;
    for alpha in 1..p2 {
        if alpha.is_multiple_of(p) {
            continue;
        }
        if (alpha * c) % p2 == a && (alpha * d) % p2 == b {
            return true;
        }
    }
    false
}

/// Builds the family's structure-constant table without validating the
/// parameters first. Exposed for transcription tests and negative probes;
/// [`build`] is the checked entry point.
pub fn raw_table(family: u8, p: u64, params: &BTreeMap<String, i64>) -> Result<PreLieRing> {
    let spec = FamilySpec { family, p, params: params.clone() };
    let q = reduced_params(&spec)?;
    let shape = family_shape(family, p)?;
    let g = |n: &str| q[n] as i64;
    let mut t = SCTable::zero(&shape);
    match family {
        1 => {
            // x.x = a z, x.y = b z, y.x = c z, y.y = d z,
            // x.z = f w, y.z = h w, z.x = e w, z.y = g w.
            t.set(0, 0, shape.elem(&[0, 0, g("a"), 0])?);
            t.set(0, 1, shape.elem(&[0, 0, g("b"), 0])?);
            t.set(1, 0, shape.elem(&[0, 0, g("c"), 0])?);
            t.set(1, 1, shape.elem(&[0, 0, g("d"), 0])?);
            t.set(0, 2, shape.elem(&[0, 0, 0, g("f")])?);
            t.set(1, 2, shape.elem(&[0, 0, 0, g("h")])?);
            t.set(2, 0, shape.elem(&[0, 0, 0, g("e")])?);
            t.set(2, 1, shape.elem(&[0, 0, 0, g("g")])?);
        }
        2 => {
            t.set(0, 0, shape.elem(&[0, 0, g("alpha_xx"), g("beta_xx")])?);
            t.set(0, 1, shape.elem(&[0, 0, g("alpha_xy"), g("beta_xy")])?);
            t.set(1, 0, shape.elem(&[0, 0, g("alpha_yx"), g("beta_yx")])?);
            t.set(1, 1, shape.elem(&[0, 0, g("alpha_yy"), g("beta_yy")])?);
        }
        3 => {
            t.set(0, 0, shape.elem(&[0, 0, 0, g("beta_xx")])?);
            t.set(0, 1, shape.elem(&[0, 0, 0, g("beta_xy")])?);
            t.set(1, 0, shape.elem(&[0, 0, 0, g("beta_yx")])?);
            t.set(1, 1, shape.elem(&[0, 0, 0, g("beta_yy")])?);
        }
        4 => {
            t.set(0, 0, shape.elem(&[g("a"), g("b")])?);
            t.set(0, 1, shape.elem(&[g("c"), 0])?);
            t.set(1, 0, shape.elem(&[g("e"), 0])?);
            t.set(1, 1, shape.elem(&[g("g"), 0])?);
        }
        5 => {
            t.set(0, 0, shape.elem(&[g("a"), 0])?);
        }
        6 => {
            t.set(0, 0, shape.elem(&[g("a"), 0])?);
            t.set(0, 1, shape.elem(&[g("c"), 0])?);
            t.set(1, 0, shape.elem(&[g("e"), 0])?);
            t.set(1, 1, shape.elem(&[g("g"), 0])?);
        }
        7 => {
            // Basis (y, y^2): y.y = y^2, y.y^2 = a y + b y^2,
            // y^2.y = c y + d y^2, y^2.y^2 = (2c - a) y^2.
            t.set(0, 0, shape.elem(&[0, 1])?);
            t.set(0, 1, shape.elem(&[g("a"), g("b")])?);
            t.set(1, 0, shape.elem(&[g("c"), g("d")])?);
            t.set(1, 1, shape.elem(&[0, 2 * g("c") - g("a")])?);
        }
        8 => {
            // x.x = 0, x.y = c x, y.x = e x, y.y = g x + h y.
            t.set(0, 1, shape.elem(&[g("c"), 0])?);
            t.set(1, 0, shape.elem(&[g("e"), 0])?);
            t.set(1, 1, shape.elem(&[g("g"), g("h")])?);
        }
        9 => {
            // Rank-one table: (i x + j y).(k x + l y) =
            // (i + j alpha)(k + l alpha) (a x + b y).
            let (a, b, alpha) = (g("a"), g("b"), g("alpha"));
            let v = shape.elem(&[a, b])?;
            let coef = [1i128, alpha as i128];
            for i in 0..2 {
                for j in 0..2 {
                    t.set(i, j, shape.scalar_mul(coef[i] * coef[j], v));
                }
            }
        }
        10 => {
            t.set(0, 0, shape.elem(&[g("a"), g("b")])?);
            t.set(0, 1, shape.elem(&[g("c"), g("d")])?);
            t.set(1, 0, shape.elem(&[g("e"), g("f")])?);
            t.set(1, 1, shape.elem(&[g("g"), g("h")])?);
        }
        other => return Err(Error::FamilyConstraint(format!("unknown family id {other}"))),
    }
    PreLieRing::new(shape, t)
}

/// Validates and builds; the returned ring is guaranteed well-defined and to
/// pass the pre-Lie identity on all basis triples.
pub fn build(spec: &FamilySpec) -> Result<PreLieRing> {
    let report = validate(spec)?;
    if !report.is_valid() {
        return Err(Error::FamilyConstraint(format!(
            "family {}: {}",
            spec.family,
            report.violations.join("; ")
        )));
    }
    let ring = raw_table(spec.family, spec.p, &spec.params)?;
    let wd = ring.check_well_defined();
    if !wd.is_empty() {
        return Err(Error::Internal(format!(
            "validated family {} produced a torsion-incompatible table: {wd:?}",
            spec.family
        )));
    }
    let ax = ring.check_prelie_axiom();
    if !ax.is_empty() {
        return Err(Error::Internal(format!(
            "validated family {} produced a table failing the pre-Lie identity: {ax:?}",
            spec.family
        )));
    }
    Ok(ring)
}

/// Alternative transcription of family 7 on the additive basis `(x, y)` with
/// `x.x = (2d - f) x`, `x.y = c x + d y`, `y.x = e x + f y`, `y.y = x + h y`;
/// kept for cross-checking the canonical `(y, y^2)` presentation.
pub fn family7_alternative_table(p: u64, c: i64, d: i64, e: i64, f: i64, h: i64) -> Result<PreLieRing> {
    let shape = Shape::new(p, &[2, 2])?;
    let mut t = SCTable::zero(&shape);
    t.set(0, 0, shape.elem(&[2 * d - f, 0])?);
    t.set(0, 1, shape.elem(&[c, d])?);
    t.set(1, 0, shape.elem(&[e, f])?);
    t.set(1, 1, shape.elem(&[1, h])?);
    PreLieRing::new(shape, t)
}

/// Deterministic list of `count` validating parameter draws for the family.
pub fn catalog_sample(p: u64, family: u8, count: usize, seed: u64) -> Result<Vec<FamilySpec>> {
    family_shape(family, p)?;
    let mut rng = SplitMix64::new(seed ^ (family as u64) << 32 ^ p);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    let limit = 100_000 + count * 10_000;
    while out.len() < count {
        attempts += 1;
        if attempts > limit {
            return Err(Error::Internal(format!(
                "sampling family {family} at p={p} did not converge"
            )));
        }
        let spec = draw(p, family, &mut rng);
        if validate(&spec)?.is_valid() {
            out.push(spec);
        }
    }
    Ok(out)
}

fn draw(p: u64, family: u8, rng: &mut SplitMix64) -> FamilySpec {
    let p2 = p * p;
    let mut params: Vec<(&str, i64)> = Vec::new();
    match family {
        1 => {
            // Rejection over all eight constants; the two bilinear relations
            // accept roughly 1/p^2 of uniform draws.
            for n in ["a", "b", "c", "d", "e", "f", "g", "h"] {
                params.push((n, rng.below(p) as i64));
            }
        }
        2 => {
            for n in [
                "alpha_xx", "alpha_xy", "alpha_yx", "alpha_yy", "beta_xx", "beta_xy", "beta_yx",
                "beta_yy",
            ] {
                params.push((n, rng.below(p) as i64));
            }
        }
        3 => {
            for n in ["beta_xx", "beta_xy", "beta_yx", "beta_yy"] {
                params.push((n, rng.below(p) as i64));
            }
        }
        4 => {
            params.push(("a", (p * rng.below(p2)) as i64));
            for n in ["c", "e"] {
                params.push((n, (p2 * rng.below(p)) as i64));
            }
            // p^3 | b*g: either b = 0 with free g, or b != 0 with g = 0.
            if rng.below(5) == 0 {
                params.push(("b", (1 + rng.below(p - 1)) as i64));
                params.push(("g", 0));
            } else {
                params.push(("b", 0));
                params.push(("g", (p2 * rng.below(p)) as i64));
            }
        }
        5 => {
            params.push(("a", (p2 * (1 + rng.below(p - 1))) as i64));
        }
        6 => {
            loop {
                let vals: Vec<u64> = (0..4).map(|_| p2 * rng.below(p)).collect();
                if vals.iter().any(|&v| v != 0) {
                    for (n, v) in ["a", "c", "e", "g"].iter().zip(vals) {
                        params.push((n, v as i64));
                    }
                    break;
                }
            }
        }
        7 => {
            let d = p * rng.below(p);
            match rng.below(3) {
                0 => {
                    // both a and c nonzero, proportional by a unit
                    let c = p * (1 + rng.below(p - 1));
                    let mut alpha = 1 + rng.below(p2 - 1);
                    while alpha.is_multiple_of(p) {
                        alpha = 1 + rng.below(p2 - 1);
                    }
                    params.push(("a", ((alpha * c) % p2) as i64));
                    params.push(("b", ((alpha * d) % p2) as i64));
                    params.push(("c", c as i64));
                    params.push(("d", d as i64));
                }
                1 => {
                    // a = 0, c != 0
                    params.push(("a", 0));
                    params.push(("b", (p * rng.below(p)) as i64));
                    params.push(("c", (p * (1 + rng.below(p - 1))) as i64));
                    params.push(("d", d as i64));
                }
                _ => {
                    // c = 0, a != 0
                    params.push(("a", (p * (1 + rng.below(p - 1))) as i64));
                    params.push(("b", (p * rng.below(p)) as i64));
                    params.push(("c", 0));
                    params.push(("d", d as i64));
                }
            }
        }
        8 => {
            loop {
                let c = p * rng.below(p);
                let e = p * rng.below(p);
                let h = p * rng.below(p);
                if (c + h).is_multiple_of(p2) && (e + h).is_multiple_of(p2) {
                    continue;
                }
                let mut g = 1 + rng.below(p2 - 1);
                while g.is_multiple_of(p) {
                    g = 1 + rng.below(p2 - 1);
                }
                params.push(("c", c as i64));
                params.push(("e", e as i64));
                params.push(("g", g as i64));
                params.push(("h", h as i64));
                break;
            }
        }
        9 => {
            let mut b = 1 + rng.below(p2 - 1);
            while b.is_multiple_of(p) {
                b = 1 + rng.below(p2 - 1);
            }
            let alpha = rng.below(p2);
            let a = (p2 - alpha * b % p2) % p2;
            params.push(("a", a as i64));
            params.push(("b", b as i64));
            params.push(("alpha", alpha as i64));
        }
        10 => {
            loop {
                let vals: Vec<u64> = (0..8).map(|_| p * rng.below(p)).collect();
                if vals.iter().any(|&v| v != 0) {
                    for (n, v) in ["a", "b", "c", "d", "e", "f", "g", "h"].iter().zip(vals) {
                        params.push((n, v as i64));
                    }
                    break;
                }
            }
        }
        _ => {}
    }
    FamilySpec::new(family, p, &params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prelie::chain_orders;

    #[test]
    fn validate_family4_examples() {
        let ok = FamilySpec::new(4, 7, &[("a", 7), ("c", 49), ("e", 49), ("g", 49), ("b", 0)]);
        assert!(validate(&ok).unwrap().is_valid());

        let bad = FamilySpec::new(4, 7, &[("a", 1), ("c", 49), ("e", 49), ("g", 49)]);
        let rep = validate(&bad).unwrap();
        assert!(rep.violations.iter().any(|v| v.contains("divide a")));
    }

    #[test]
    fn validate_family1_example() {
        let spec = FamilySpec::new(1, 7, &[("a", 1), ("f", 1)]);
        assert!(validate(&spec).unwrap().is_valid());
        // Breaking one relation: h -> 1 makes ce - ah = -1 != 0 = be - cf.
        let bad = FamilySpec::new(1, 7, &[("a", 1), ("f", 1), ("h", 1)]);
        assert!(!validate(&bad).unwrap().is_valid());
    }

    #[test]
    fn unknown_family_and_params() {
        assert!(validate(&FamilySpec::new(11, 7, &[])).is_err());
        assert!(validate(&FamilySpec::new(5, 7, &[("zz", 1)])).is_err());
    }

    #[test]
    fn build_family5() {
        let ring = build(&FamilySpec::new(5, 7, &[("a", 49)])).unwrap();
        let s = ring.shape();
        assert_eq!(ring.table().get(0, 0), s.elem(&[49, 0]).unwrap());
        for (i, j) in [(0, 1), (1, 0), (1, 1)] {
            assert!(ring.table().get(i, j).is_zero());
        }
        assert_eq!(ring.nilpotency_index().unwrap(), 3);
    }

    #[test]
    fn build_family2_single_alpha() {
        // A degenerate but buildable draw: x.x = z only.
        let spec = FamilySpec::new(2, 7, &[("alpha_xx", 1)]);
        let rep = validate(&spec).unwrap();
        assert!(rep.is_valid());
        assert!(!rep.warnings.is_empty(), "expected degeneracy warning");
        let ring = build(&spec).unwrap();
        assert!(ring.check_prelie_axiom().is_empty());
        let chain = ring.strong_chain().unwrap();
        assert_eq!(chain_orders(&chain), vec![2401, 7, 1]);
    }

    #[test]
    fn family9_transcription_and_constraint() {
        // Raw transcription at (a, b, alpha) = (7, 1, 0): x.x = 7x + y.
        let spec = FamilySpec::new(9, 7, &[("a", 7), ("b", 1), ("alpha", 0)]);
        let ring = raw_table(9, 7, &spec.params).unwrap();
        let s = ring.shape();
        assert_eq!(ring.table().get(0, 0), s.elem(&[7, 1]).unwrap());
        assert!(ring.table().get(0, 1).is_zero());
        // ...but those parameters leave A^[3] nonzero, so validation refuses.
        let rep = validate(&spec).unwrap();
        assert!(rep.violations.iter().any(|v| v.contains("alpha")));
        let chain = ring.strong_chain().unwrap();
        assert!(chain.len() > 3, "A^[3] != 0 here: {:?}", chain_orders(&chain));

        // A conforming draw: a = -alpha*b mod 49.
        let ok = FamilySpec::new(9, 7, &[("a", 46), ("b", 1), ("alpha", 3)]);
        assert!(validate(&ok).unwrap().is_valid());
        let ring = build(&ok).unwrap();
        assert_eq!(chain_orders(&ring.strong_chain().unwrap()), vec![2401, 49, 1]);
    }

    #[test]
    fn family7_canonical_chain() {
        let spec = FamilySpec::new(7, 7, &[("a", 7), ("b", 7), ("c", 7), ("d", 7)]);
        assert!(validate(&spec).unwrap().is_valid());
        let ring = build(&spec).unwrap();
        let chain = ring.strong_chain().unwrap();
        assert_eq!(chain_orders(&chain), vec![2401, 343, 49, 7, 1]);
        assert_eq!(ring.nilpotency_index().unwrap(), 5);
        // A^[3] = pA and A^[4] = pA^[2]
        let full = crate::prelie::span_closure(ring.shape(), &[ring.shape().basis(0), ring.shape().basis(1)]);
        assert_eq!(chain[2], full.scaled(7));
        assert_eq!(chain[3], chain[1].scaled(7));
    }

    #[test]
    fn family7_alternative_cross_check() {
        let ring = family7_alternative_table(7, 7, 7, 7, 7, 7).unwrap();
        assert!(ring.check_well_defined().is_empty());
        assert!(ring.check_prelie_axiom().is_empty());
        let chain = ring.strong_chain().unwrap();
        assert_eq!(chain_orders(&chain), vec![2401, 343, 49, 7, 1]);
    }

    #[test]
    fn family8_chain() {
        let spec = FamilySpec::new(8, 7, &[("c", 7), ("e", 7), ("g", 1), ("h", 7)]);
        assert!(validate(&spec).unwrap().is_valid());
        let ring = build(&spec).unwrap();
        let chain = ring.strong_chain().unwrap();
        let orders = chain_orders(&chain);
        assert!(orders[orders.len() - 2] > 1 && orders.len() == 4, "{orders:?}");
        let right = ring.right_chain().unwrap();
        assert!(right.len() <= 4);
    }

    #[test]
    fn family10_modes() {
        let spec = FamilySpec::new(
            10,
            7,
            &[("a", 7), ("b", 14), ("c", 0), ("d", 7), ("e", 0), ("f", 0), ("g", 7), ("h", 0)],
        );
        assert!(validate(&spec).unwrap().is_valid());
        let ring = build(&spec).unwrap();
        assert_eq!(chain_orders(&ring.strong_chain().unwrap()), vec![2401, 49, 1]);

        // Literal reading: units everywhere. Validates in literal mode but the
        // built table cannot be nilpotent.
        let literal = FamilySpec::new(
            10,
            7,
            &[("a", 1), ("b", 1), ("c", 1), ("d", 1), ("e", 1), ("f", 1), ("g", 1), ("h", 1)],
        );
        assert!(!validate(&literal).unwrap().is_valid());
        let rep = validate_with_mode(&literal, ValidationMode::Literal).unwrap();
        assert!(rep.is_valid());
        assert!(!rep.warnings.is_empty());
        let ring = raw_table(10, 7, &literal.params).unwrap();
        let nilpotent = ring.strong_chain().is_ok();
        let axiom_ok = ring.check_prelie_axiom().is_empty();
        assert!(!nilpotent || !axiom_ok, "literal-mode table should fail somewhere");
    }

    #[test]
    fn catalog_sample_examples() {
        assert!(catalog_sample(7, 4, 0, 1).unwrap().is_empty());
        let specs = catalog_sample(7, 4, 100, 1).unwrap();
        assert_eq!(specs.len(), 100);
        for s in &specs {
            assert!(validate(s).unwrap().is_valid());
        }
        let specs = catalog_sample(7, 1, 100, 1).unwrap();
        assert_eq!(specs.len(), 100);
        // determinism
        assert_eq!(catalog_sample(7, 1, 100, 1).unwrap(), specs);
        assert_ne!(catalog_sample(7, 1, 100, 2).unwrap(), specs);
    }

    #[test]
    fn negative_params_reduce() {
        let spec = FamilySpec::new(5, 7, &[("a", -294)]); // -294 = 49 mod 343
        assert!(validate(&spec).unwrap().is_valid());
        let ring = build(&spec).unwrap();
        assert_eq!(ring.table().get(0, 0), ring.shape().elem(&[49, 0]).unwrap());
    }

    #[test]
    fn all_families_sample_and_build() {
        for family in 1..=10u8 {
            for p in [7u64, 11] {
                let specs = catalog_sample(p, family, 10, 99).unwrap();
                for spec in &specs {
                    let ring = build(spec).unwrap_or_else(|e| {
                        panic!("family {family} p={p} spec {spec:?}: {e}")
                    });
                    assert!(ring.check_prelie_axiom().is_empty());
                }
            }
        }
    }
}
