//! Acceptance suite. Each test prints one PASS/FAIL line per criterion; run
//! with `cargo test -p prelie4-cli --test acceptance -- --nocapture` to see
//! them. Every tolerance here is exact (zero violations) and every sampled
//! sweep is seeded.

use rayon::prelude::*;

use prelie4::brace::{Brace, BraceCheckOptions};
use prelie4::families::{build, catalog_sample, validate, FamilySpec};
use prelie4::flows::{
    brace_from_prelie, prelie_from_brace, star_flow, w_inverse, CubicCirc, FlowContext,
};
use prelie4::modarith::Shape;
use prelie4::prelie::{chain_orders, span_closure, PreLieRing};
use prelie4::report::all_passed;
use prelie4::rng::SplitMix64;
use prelie4::search::{enumerate_with_stats, mutate_at, EnumSpace};
use prelie4::ybe::certify_solution;

const FAMILIES: [u8; 10] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10];

/// Fixed representative parameters, valid at every prime p >= 5.
fn representative(family: u8, p: u64) -> FamilySpec {
    let p = p as i64;
    match family {
        1 => FamilySpec::new(1, p as u64, &[("a", 1), ("f", 1)]),
        2 => FamilySpec::new(2, p as u64, &[("alpha_xx", 1), ("beta_yy", 1)]),
        3 => FamilySpec::new(3, p as u64, &[("beta_xx", 1)]),
        4 => FamilySpec::new(
            4,
            p as u64,
            &[("a", p), ("b", 0), ("c", p * p), ("e", p * p), ("g", p * p)],
        ),
        5 => FamilySpec::new(5, p as u64, &[("a", p * p)]),
        6 => FamilySpec::new(6, p as u64, &[("a", p * p), ("c", p * p)]),
        7 => FamilySpec::new(7, p as u64, &[("a", p), ("b", p), ("c", p), ("d", p)]),
        8 => FamilySpec::new(8, p as u64, &[("c", p), ("e", p), ("g", 1), ("h", p)]),
        9 => FamilySpec::new(9, p as u64, &[("a", p * p - 1), ("b", 1), ("alpha", 1)]),
        10 => FamilySpec::new(10, p as u64, &[("a", p), ("h", p)]),
        _ => unreachable!(),
    }
}

fn report(criterion: u32, name: &str, failures: &[String]) {
    if failures.is_empty() {
        println!("acceptance criterion {criterion} ({name}): PASS");
    } else {
        println!(
            "acceptance criterion {criterion} ({name}): FAIL ({} problems, first: {})",
            failures.len(),
            failures[0]
        );
    }
    assert!(failures.is_empty(), "criterion {criterion} failed: {failures:?}");
}

/// Criterion 1: 100 seeded valid draws per family at p = 7 and p = 11 build
/// rings passing well-definedness plus the pre-Lie identity on all basis
/// triples, and 10^5 seeded random triples per family/prime stay exact.
#[test]
fn acceptance_1_family_soundness() {
    let mut failures = Vec::new();
    for family in FAMILIES {
        for p in [7u64, 11] {
            let specs = match catalog_sample(p, family, 100, 1) {
                Ok(s) => s,
                Err(e) => {
                    failures.push(format!("family {family} p={p}: sampling failed: {e}"));
                    continue;
                }
            };
            let mut rng = SplitMix64::new(1000 + family as u64 + p);
            for spec in &specs {
                let ring = match build(spec) {
                    Ok(r) => r,
                    Err(e) => {
                        failures.push(format!("family {family} p={p}: build failed: {e}"));
                        continue;
                    }
                };
                if !ring.check_well_defined().is_empty() {
                    failures.push(format!("family {family} p={p}: well-definedness"));
                }
                if !ring.check_prelie_axiom().is_empty() {
                    failures.push(format!("family {family} p={p}: basis triples"));
                }
                // 1000 triples x 100 instances = 10^5 per family/prime
                let s = ring.shape();
                for _ in 0..1000 {
                    let a = s.random_elem(&mut rng);
                    let b = s.random_elem(&mut rng);
                    let c = s.random_elem(&mut rng);
                    if !ring.identity_holds(a, b, c) {
                        failures.push(format!(
                            "family {family} p={p}: sampled identity fails at {a:?},{b:?},{c:?}"
                        ));
                        break;
                    }
                }
            }
        }
    }
    report(1, "family soundness", &failures);
}

/// Criterion 2: chain conformance per family on seeded draws at p = 7.
#[test]
fn acceptance_2_chain_conformance() {
    let p = 7u64;
    let mut failures = Vec::new();
    for family in FAMILIES {
        let specs = catalog_sample(p, family, 25, 2).unwrap();
        for spec in &specs {
            let ring = build(spec).unwrap();
            let chain = match ring.strong_chain() {
                Ok(c) => c,
                Err(e) => {
                    failures.push(format!("family {family}: not nilpotent: {e} ({spec:?})"));
                    continue;
                }
            };
            let orders = chain_orders(&chain);
            let len = chain.len();
            let ok = match family {
                // A^[2] != 0 and A^[3] = 0
                2 | 3 | 5 | 6 | 9 | 10 => len == 3,
                // A^[4] = 0 always; A^[3] != 0 exactly when p^2 does not
                // divide a (for the b = 0 members)
                4 => {
                    let a = spec.params.get("a").copied().unwrap_or(0) as u64;
                    let b = spec.params.get("b").copied().unwrap_or(0);
                    len <= 4
                        && (b != 0
                            || if !a.is_multiple_of(p * p) { len == 4 } else { len <= 3 })
                }
                // A^[3] != 0, A^[4] = 0
                8 => len == 4,
                // A^[4] != 0, A^[5] = 0, A^[3] = pA, A^[4] = pA^[2]
                7 => {
                    let s = ring.shape();
                    let full = span_closure(s, &[s.basis(0), s.basis(1)]);
                    len == 5 && chain[2] == full.scaled(p as i128) && chain[3] == chain[1].scaled(p as i128)
                }
                // A^[4] = 0
                1 => len <= 4,
                _ => unreachable!(),
            };
            if !ok {
                failures.push(format!("family {family}: orders {orders:?} for {spec:?}"));
            }
        }
    }
    report(2, "chain conformance", &failures);
}

/// Criterion 3: the flow-built circle operation of one instance per family
/// at p = 7 passes identity/inverses/compatibility exhaustively and 10^5
/// seeded associativity triples.
#[test]
fn acceptance_3_flows_produce_braces() {
    let mut failures = Vec::new();
    for family in FAMILIES {
        let ring = build(&representative(family, 7)).unwrap();
        let brace = brace_from_prelie(ring).unwrap();
        // tabulate the flow-built circle once, then sweep over lookups
        let table = brace.materialize().unwrap();
        let checked = Brace::from_table(table);
        let opts = BraceCheckOptions {
            exhaustive: true,
            seed: 3,
            assoc_samples: 100_000,
            compat_samples: 100_000,
        };
        let checks = checked.check_axioms(&opts).unwrap();
        if !all_passed(&checks) {
            failures.push(format!("family {family}: {checks:?}"));
        }
    }
    report(3, "flows produce braces", &failures);
}

/// Criterion 4: for every family instance with A^[4] = 0 at p = 7, the cubic
/// circle formula agrees with the flow construction on all p^8 ordered pairs.
#[test]
fn acceptance_4_cubic_flows_agreement() {
    let mut failures = Vec::new();
    for family in [1u8, 2, 3, 4, 5, 6, 8, 9, 10] {
        let ring = build(&representative(family, 7)).unwrap();
        let ctx = FlowContext::for_ring(&ring).unwrap();
        let cubic = CubicCirc::new(&ring).unwrap();
        let s = ring.shape();
        let n = s.order();
        let mismatches: u64 = (0..n)
            .into_par_iter()
            .map(|i| {
                let a = s.elem_at(i);
                let x = w_inverse(&ring, &ctx, a).unwrap();
                let row = cubic.left(a);
                let mut bad = 0u64;
                for j in 0..n {
                    let b = s.elem_at(j);
                    let via_flows = s.add(s.add(star_flow(&ring, &ctx, x, b), a), b);
                    if via_flows != row.circ(b) {
                        bad += 1;
                    }
                }
                bad
            })
            .sum();
        if mismatches != 0 {
            failures.push(format!("family {family}: {mismatches} mismatching pairs"));
        }
    }
    report(4, "cubic/flows agreement on all p^8 pairs", &failures);
}

/// Criterion 5: the inverse sum formula recovers the exact structure
/// constants of one instance per family at p = 7 and p = 11.
#[test]
fn acceptance_5_round_trip() {
    let mut failures = Vec::new();
    for family in FAMILIES {
        for p in [7u64, 11] {
            let ring = build(&representative(family, p)).unwrap();
            let ctx = FlowContext::for_ring(&ring).unwrap();
            let brace = match brace_from_prelie(ring) {
                Ok(b) => b,
                Err(e) => {
                    failures.push(format!("family {family} p={p}: flows failed: {e}"));
                    continue;
                }
            };
            match prelie_from_brace(&brace, &ctx) {
                Ok(recovered) => {
                    if recovered.table() != ring.table() {
                        failures.push(format!("family {family} p={p}: tables differ"));
                    }
                }
                Err(e) => failures.push(format!("family {family} p={p}: inverse failed: {e}")),
            }
        }
    }
    report(5, "round-trip on structure constants", &failures);
}

fn advertised_chain_holds(family: u8, ring: &PreLieRing) -> bool {
    match ring.strong_chain() {
        Err(_) => false,
        Ok(chain) => match family {
            1 | 4 => chain.len() <= 4,
            2 | 3 | 5 | 6 | 9 | 10 => chain.len() == 3,
            8 => chain.len() == 4,
            7 => chain.len() == 5,
            _ => unreachable!(),
        },
    }
}

/// Criterion 6: for each family one single-coefficient mutation breaks
/// well-definedness, the pre-Lie identity, or the advertised chain.
#[test]
fn acceptance_6_constraint_necessity() {
    let p = 7u64;
    let mut failures = Vec::new();
    // (family, entry row, col, coordinate, delta)
    let mutations: [(u8, usize, usize, usize, i64); 10] = [
        (1, 1, 2, 3, 1),  // y.z shifts by w: breaks be - cf = ce - ah
        (2, 0, 0, 0, 1),  // x.x gains an x component: chain never dies
        (3, 0, 0, 0, 1),
        (4, 0, 1, 0, 1),  // c -> c + 1: p^2 no longer divides c
        (5, 0, 0, 0, 1),  // a becomes a unit: not nilpotent
        (6, 0, 1, 0, 7),  // c -> c + p: torsion violation
        (7, 1, 1, 1, 7),  // y^2.y^2 leaves (2c - a) y^2: identity fails
        (8, 0, 1, 0, 1),  // c becomes a unit: identity fails
        (9, 0, 0, 0, 1),  // a + alpha b becomes a unit: chain stabilizes
        (10, 0, 0, 0, 1),
    ];
    for (family, i, j, k, delta) in mutations {
        let ring = build(&representative(family, p)).unwrap();
        let mutated = mutate_at(&ring, i, j, k, delta);
        let wd = mutated.check_well_defined();
        let ax = mutated.check_prelie_axiom();
        let chain_ok = advertised_chain_holds(family, &mutated);
        if wd.is_empty() && ax.is_empty() && chain_ok {
            failures.push(format!(
                "family {family}: mutation at ({},{},{}) by {delta} not caught",
                i + 1,
                j + 1,
                k + 1
            ));
        } else {
            let witness = if let Some(v) = wd.first() {
                format!("torsion violation at ({},{},{})", v.row + 1, v.col + 1, v.coord + 1)
            } else if let Some(v) = ax.first() {
                format!(
                    "identity fails at triple ({},{},{})",
                    v.triple.0 + 1,
                    v.triple.1 + 1,
                    v.triple.2 + 1
                )
            } else {
                "advertised chain property lost".to_string()
            };
            println!("  family {family}: mutation caught ({witness})");
        }
    }
    report(6, "constraint necessity under mutation", &failures);
}

/// Criterion 7: YBE certification for one brace per family at p = 7:
/// lambda maps bijective (exhaustive), r involutive on all p^8 pairs
/// (exhaustive), braid relation on 10^5 seeded triples.
#[test]
fn acceptance_7_ybe_certification() {
    let mut failures = Vec::new();
    for family in FAMILIES {
        let ring = build(&representative(family, 7)).unwrap();
        let brace = brace_from_prelie(ring).unwrap();
        let checks = certify_solution(&brace, 100_000, 7).unwrap();
        if !all_passed(&checks) {
            failures.push(format!("family {family}: {checks:?}"));
        }
    }
    report(7, "YBE certification", &failures);
}

/// Criterion 8: the constrained space at p = 3 on C_{p^3} x C_p (all four
/// x-coefficients multiples of p^2, y-coefficients zero) enumerates to
/// exactly 81 candidates, all valid; allowing a coefficient with p^2
/// not dividing it fails well-definedness for every affected candidate.
#[test]
fn acceptance_8_enumeration_consistency() {
    let mut failures = Vec::new();
    let shape = Shape::new(3, &[3, 1]).unwrap();
    let mut space = EnumSpace::new(shape);
    for i in 0..2 {
        for j in 0..2 {
            space.set_choices(i, j, 0, &[0, 9, 18]).unwrap();
        }
    }
    let (valid, stats) = enumerate_with_stats(&space, 1_000_000).unwrap();
    if stats.total != 81 || stats.valid != 81 || valid.len() != 81 {
        failures.push(format!("expected 81/81 valid, got {stats:?}"));
    }
    for ring in &valid {
        match ring.strong_chain() {
            Ok(chain) if chain.len() <= 3 => {}
            other => failures.push(format!("candidate not A^[3] = 0: {other:?}")),
        }
    }

    let mut bad_space = space.clone();
    bad_space.set_choices(0, 1, 0, &[1]).unwrap(); // c = 1: p^2 does not divide
    let (valid, stats) = enumerate_with_stats(&bad_space, 1_000_000).unwrap();
    if !valid.is_empty() || stats.failed_well_defined != 27 {
        failures.push(format!("expected all 27 candidates rejected by torsion, got {stats:?}"));
    }
    report(8, "enumeration consistency at p = 3", &failures);
}

/// Criterion 9: repeating a seeded command yields byte-identical reports.
#[test]
fn acceptance_9_determinism() {
    use std::process::Command;
    let mut failures = Vec::new();
    let dir = std::env::temp_dir().join(format!("prelie4-acc9-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bin = env!("CARGO_BIN_EXE_prelie4");

    let spec_path = dir.join("spec.json");
    std::fs::write(
        &spec_path,
        "{ \"schema\": 1, \"family\": 8, \"p\": 7, \"params\": { \"c\": 7, \"e\": 7, \"g\": 1, \"h\": 7 } }\n",
    )
    .unwrap();
    let table_path = dir.join("table.json");
    let status = Command::new(bin)
        .args(["build"])
        .arg(&spec_path)
        .arg("--out")
        .arg(&table_path)
        .status()
        .unwrap();
    assert!(status.success());

    for (name, args) in [
        ("verify", vec!["verify", "--mode", "sampled", "--seed", "5", "--samples", "2000"]),
        ("ybe", vec!["ybe", "--samples", "2000", "--seed", "5"]),
        ("chains", vec!["chains"]),
    ] {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let report_path = dir.join(format!("{name}-{run}.json"));
            let mut cmd = Command::new(bin);
            cmd.args(&args[..1]).arg(&table_path).args(&args[1..]);
            cmd.arg("--report").arg(&report_path);
            let out = cmd.output().unwrap();
            if !out.status.success() {
                failures.push(format!("{name} run {run} exited {:?}", out.status.code()));
            }
            outputs.push(std::fs::read(&report_path).unwrap_or_default());
        }
        if outputs[0] != outputs[1] || outputs[0].is_empty() {
            failures.push(format!("{name}: reports differ between identical runs"));
        }
    }
    std::fs::remove_dir_all(&dir).ok();
    report(9, "seeded determinism", &failures);
}

/// Sanity on the representatives themselves: all validate.
#[test]
fn representatives_validate() {
    for family in FAMILIES {
        for p in [7u64, 11, 13] {
            let spec = representative(family, p);
            let rep = validate(&spec).unwrap();
            assert!(rep.is_valid(), "family {family} p={p}: {:?}", rep.violations);
        }
    }
}
