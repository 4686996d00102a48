//! Command-line front door: build family tables, verify pre-Lie and brace
//! tables, convert between them through the group of flows, compute
//! nilpotency chains, certify Yang-Baxter solutions, enumerate constrained
//! table spaces and probe isomorphism.
//!
//! Exit codes: 0 all checks pass, 2 validation failure, 3 malformed input or
//! I/O, 4 regime violation (prime too small for the nilpotency index),
//! 5 internal invariant breach.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use prelie4::brace::{Brace, BraceCheckOptions};
use prelie4::error::Error;
use prelie4::families;
use prelie4::flows::{brace_from_prelie, prelie_from_brace, FlowContext};
use prelie4::io::{
    read_any_table, read_json, to_canonical_json, write_canonical, AnyTable, CircleDoc, ReportDoc,
    SpaceDoc, SpecDoc, TableDoc, SCHEMA_VERSION,
};
use prelie4::report::{all_passed, ChainSummary, CheckItem};
use prelie4::rng::SplitMix64;
use prelie4::search::{enumerate_with_stats, isomorphic, IsoVerdict, DEFAULT_ENUM_BUDGET};
use prelie4::ybe::{certify_solution, export_solution};

#[derive(Parser)]
#[command(
    name = "prelie4",
    version,
    about = "Nilpotent pre-Lie rings of order p^4, their braces and Yang-Baxter solutions"
)]
struct Cli {
    /// Worker threads for parallel sweeps (default: logical cores)
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a canonical pre-Lie table from a family spec document
    Build(BuildArgs),
    /// Run the verification suite on a pre-Lie or circle table
    Verify(VerifyArgs),
    /// Convert between pre-Lie and brace tables through the group of flows
    Flow(FlowArgs),
    /// Left/right/strong chain orders and nilpotency indices
    Chains(ChainsArgs),
    /// Certify the set-theoretic Yang-Baxter solution of a brace
    Ybe(YbeArgs),
    /// Stream all valid tables of a constrained enumeration space
    Enumerate(EnumerateArgs),
    /// Probe two tables for isomorphism within a candidate budget
    Iso(IsoArgs),
}

#[derive(Args)]
struct BuildArgs {
    /// Family spec document {schema, family, p, params}
    spec: PathBuf,
    /// Output table path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Pre-Lie or circle table document
    table: PathBuf,
    /// exhaustive sweeps (small p) or sampled
    #[arg(long, default_value = "exhaustive")]
    mode: String,
    /// Seed for all sampled checks (reports repeat byte-identically per seed)
    #[arg(long)]
    seed: u64,
    /// Sampled pre-Lie identity triples / brace associativity triples
    #[arg(long)]
    samples: Option<usize>,
    /// Sampled compatibility triples (braces)
    #[arg(long)]
    compat_samples: Option<usize>,
    /// Report file (also printed to stdout)
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct FlowArgs {
    table: PathBuf,
    /// to-brace or to-prelie
    #[arg(long)]
    direction: String,
    /// "auto" (Teichmuller lift of the smallest primitive root) or an integer
    #[arg(long, default_value = "auto")]
    xi: String,
    /// Also embed the fully materialized circle table (small p only)
    #[arg(long)]
    materialize: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ChainsArgs {
    table: PathBuf,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct YbeArgs {
    /// Circle table, or a pre-Lie table (converted through the flows first)
    table: PathBuf,
    /// Braid relation sample count
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    report: Option<PathBuf>,
    /// Write the full solution pair-map (size-guarded)
    #[arg(long)]
    export_solution: Option<PathBuf>,
}

#[derive(Args)]
struct EnumerateArgs {
    /// Enumeration space document
    space: PathBuf,
    /// Candidate budget (refused above this)
    #[arg(long, default_value_t = DEFAULT_ENUM_BUDGET)]
    budget: u128,
    /// Newline-delimited table documents (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct IsoArgs {
    table_a: PathBuf,
    table_b: PathBuf,
    #[arg(long, default_value_t = 1_000_000)]
    budget: u64,
    #[arg(long)]
    report: Option<PathBuf>,
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::FamilyConstraint(_)
        | Error::BudgetExceeded { .. }
        | Error::SizeGuard(_)
        | Error::NotNilpotent { .. } => 2,
        Error::Io(_)
        | Error::Format(_)
        | Error::NotPrime(_)
        | Error::PrimeTooLarge(..)
        | Error::UnsupportedShape(_)
        | Error::RankMismatch { .. } => 3,
        Error::Regime(_) | Error::FactorialRange { .. } => 4,
        Error::Internal(_) | Error::NotInvertible(..) => 5,
    }
}

fn env_budget(name: &str) -> Option<usize> {
    std::env::var(name).ok()?.parse().ok()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn run(command: Command) -> Result<u8, Error> {
    match command {
        Command::Build(args) => cmd_build(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Flow(args) => cmd_flow(args),
        Command::Chains(args) => cmd_chains(args),
        Command::Ybe(args) => cmd_ybe(args),
        Command::Enumerate(args) => cmd_enumerate(args),
        Command::Iso(args) => cmd_iso(args),
    }
}

fn emit_report(report: &ReportDoc, path: &Option<PathBuf>) -> Result<(), Error> {
    let text = to_canonical_json(report)?;
    print!("{text}");
    if let Some(p) = path {
        std::fs::write(p, text)?;
    }
    Ok(())
}

fn cmd_build(args: BuildArgs) -> Result<u8, Error> {
    let doc: SpecDoc = read_json(&args.spec)?;
    let spec = doc.to_spec();
    let report = families::validate(&spec)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    if !report.is_valid() {
        for v in &report.violations {
            eprintln!("violation: {v}");
        }
        return Ok(2);
    }
    let ring = families::build(&spec)?;
    let table = TableDoc::from_ring(&ring);
    match &args.out {
        Some(path) => write_canonical(path, &table)?,
        None => print!("{}", to_canonical_json(&table)?),
    }
    Ok(0)
}

fn cmd_verify(args: VerifyArgs) -> Result<u8, Error> {
    let exhaustive = match args.mode.as_str() {
        "exhaustive" => true,
        "sampled" => false,
        other => return Err(Error::Format(format!("unknown mode {other:?}"))),
    };
    let samples = args.samples.or_else(|| env_budget("PRELIE4_SAMPLES")).unwrap_or(100_000);
    let compat_samples = args
        .compat_samples
        .or_else(|| env_budget("PRELIE4_COMPAT_SAMPLES"))
        .unwrap_or(10_000);

    let mut budgets = BTreeMap::new();
    budgets.insert("samples".to_string(), samples as u64);

    let (p, exponents, checks, chains) = match read_any_table(&args.table)? {
        AnyTable::PreLie(ring) => {
            let mut checks = Vec::new();
            let wd = ring.check_well_defined();
            checks.push(if wd.is_empty() {
                CheckItem::pass("well_defined", "all torsion divisibility constraints hold")
            } else {
                let v = wd[0];
                CheckItem::fail(
                    "well_defined",
                    format!(
                        "{} violations; first at entry ({},{}) coordinate {}: coefficient {} \
                         not divisible by p^{}",
                        wd.len(),
                        v.row + 1,
                        v.col + 1,
                        v.coord + 1,
                        v.coefficient,
                        v.required_val
                    ),
                )
            });
            let ax = ring.check_prelie_axiom();
            checks.push(if ax.is_empty() {
                CheckItem::pass("prelie_identity_basis", "all basis triples")
            } else {
                let v = ax[0];
                CheckItem::fail(
                    "prelie_identity_basis",
                    format!(
                        "{} failing triples; first at ({},{},{}): lhs {:?} != rhs {:?}",
                        ax.len(),
                        v.triple.0 + 1,
                        v.triple.1 + 1,
                        v.triple.2 + 1,
                        v.lhs,
                        v.rhs
                    ),
                )
            });
            let s = ring.shape();
            let mut rng = SplitMix64::new(args.seed);
            let mut bad = 0u64;
            let mut witness = String::new();
            for _ in 0..samples {
                let a = s.random_elem(&mut rng);
                let b = s.random_elem(&mut rng);
                let c = s.random_elem(&mut rng);
                if !ring.identity_holds(a, b, c) {
                    bad += 1;
                    if witness.is_empty() {
                        witness = format!("a={a:?} b={b:?} c={c:?}");
                    }
                }
            }
            checks.push(if bad == 0 {
                CheckItem::pass(
                    "prelie_identity_sampled",
                    format!("{samples} seeded triples, seed {}", args.seed),
                )
            } else {
                CheckItem::fail(
                    "prelie_identity_sampled",
                    format!("{bad} violations; first {witness}"),
                )
            });
            let (left, right, strong) = ring.chain_summaries();
            checks.push(if strong.nilpotent {
                CheckItem::pass("strongly_nilpotent", format!("index {}", strong.index.unwrap()))
            } else {
                CheckItem::fail(
                    "strongly_nilpotent",
                    format!("chain stabilizes at orders {:?}", strong.orders),
                )
            });
            let mut chains = BTreeMap::new();
            chains.insert("left".to_string(), left);
            chains.insert("right".to_string(), right);
            chains.insert("strong".to_string(), strong);
            (s.p(), s.exponents().to_vec(), checks, chains)
        }
        AnyTable::Circle(brace) => {
            budgets.insert("compat_samples".to_string(), compat_samples as u64);
            let opts = BraceCheckOptions {
                exhaustive,
                seed: args.seed,
                assoc_samples: samples,
                compat_samples,
            };
            let checks = brace.check_axioms(&opts)?;
            let ch = brace.chains();
            let mut chains = BTreeMap::new();
            chains.insert("left".to_string(), ch.left);
            chains.insert("right".to_string(), ch.right);
            chains.insert("strong".to_string(), ch.strong);
            let s = brace.shape();
            (s.p(), s.exponents().to_vec(), checks, chains)
        }
    };

    let pass = all_passed(&checks);
    let report = ReportDoc {
        schema: SCHEMA_VERSION,
        command: "verify".into(),
        input: args.table.display().to_string(),
        p,
        exponents,
        mode: Some(args.mode.clone()),
        seed: Some(args.seed),
        budgets: Some(budgets),
        regime_note: None,
        chains: Some(chains),
        checks,
        pass,
    };
    emit_report(&report, &args.report)?;
    Ok(if pass { 0 } else { 2 })
}

fn parse_xi(xi: &str) -> Result<Option<u64>, Error> {
    if xi == "auto" {
        return Ok(None);
    }
    xi.parse::<u64>()
        .map(Some)
        .map_err(|_| Error::Format(format!("--xi must be \"auto\" or an integer, got {xi:?}")))
}

fn cmd_flow(args: FlowArgs) -> Result<u8, Error> {
    let xi = parse_xi(&args.xi)?;
    match args.direction.as_str() {
        "to-brace" => {
            let ring = match read_any_table(&args.table)? {
                AnyTable::PreLie(ring) => ring,
                AnyTable::Circle(_) => {
                    return Err(Error::Format("to-brace expects a pre-Lie table".into()))
                }
            };
            let k = ring.nilpotency_index()?;
            let ctx = match xi {
                None => FlowContext::new(ring.shape().p(), k)?,
                Some(x) => FlowContext::with_xi(ring.shape().p(), k, x)?,
            };
            let brace = Brace::from_flows(ring, ctx)?;
            let doc = CircleDoc::from_brace(&brace, args.materialize)?;
            write_canonical(&args.out, &doc)?;
            Ok(0)
        }
        "to-prelie" => {
            let brace = match read_any_table(&args.table)? {
                AnyTable::Circle(brace) => brace,
                AnyTable::PreLie(_) => {
                    return Err(Error::Format("to-prelie expects a circle table".into()))
                }
            };
            let p = brace.shape().p();
            let index = brace
                .chains()
                .strong
                .index
                .ok_or_else(|| Error::Regime("brace is not strongly nilpotent".into()))?;
            let ctx = match (xi, brace.provenance()) {
                (Some(x), _) => FlowContext::with_xi(p, index, x)?,
                (None, Some((_, src))) => {
                    FlowContext::with_xi(p, index.max(src.nilpotency_index()), src.xi())?
                }
                (None, None) => FlowContext::new(p, index)?,
            };
            let ring = prelie_from_brace(&brace, &ctx)?;
            write_canonical(&args.out, &TableDoc::from_ring(&ring))?;
            Ok(0)
        }
        other => Err(Error::Format(format!(
            "--direction must be to-brace or to-prelie, got {other:?}"
        ))),
    }
}

fn cmd_chains(args: ChainsArgs) -> Result<u8, Error> {
    let (p, exponents, left, right, strong) = match read_any_table(&args.table)? {
        AnyTable::PreLie(ring) => {
            let (l, r, s) = ring.chain_summaries();
            (ring.shape().p(), ring.shape().exponents().to_vec(), l, r, s)
        }
        AnyTable::Circle(brace) => {
            let ch = brace.chains();
            (brace.shape().p(), brace.shape().exponents().to_vec(), ch.left, ch.right, ch.strong)
        }
    };
    let summary_check = |name: &str, c: &ChainSummary| {
        if c.nilpotent {
            CheckItem::pass(
                &format!("{name}_nilpotent"),
                format!("orders {:?}, index {}", c.orders, c.index.unwrap()),
            )
        } else {
            CheckItem::fail(
                &format!("{name}_nilpotent"),
                format!("chain stabilizes at orders {:?}", c.orders),
            )
        }
    };
    let checks = vec![
        summary_check("left", &left),
        summary_check("right", &right),
        summary_check("strong", &strong),
    ];
    let mut chains = BTreeMap::new();
    chains.insert("left".to_string(), left);
    chains.insert("right".to_string(), right);
    chains.insert("strong".to_string(), strong);
    let pass = all_passed(&checks);
    let report = ReportDoc {
        schema: SCHEMA_VERSION,
        command: "chains".into(),
        input: args.table.display().to_string(),
        p,
        exponents,
        mode: None,
        seed: None,
        budgets: None,
        regime_note: None,
        chains: Some(chains),
        checks,
        pass,
    };
    emit_report(&report, &args.report)?;
    Ok(if pass { 0 } else { 2 })
}

fn cmd_ybe(args: YbeArgs) -> Result<u8, Error> {
    let samples = env_budget("PRELIE4_BRAID_SAMPLES").unwrap_or(args.samples);
    let brace = match read_any_table(&args.table)? {
        AnyTable::Circle(brace) => brace,
        AnyTable::PreLie(ring) => brace_from_prelie(ring)?,
    };
    let checks = certify_solution(&brace, samples, args.seed)?;
    if let Some(path) = &args.export_solution {
        write_canonical(path, &export_solution(&brace)?)?;
    }
    let pass = all_passed(&checks);
    let mut budgets = BTreeMap::new();
    budgets.insert("braid_samples".to_string(), samples as u64);
    let s = brace.shape();
    let report = ReportDoc {
        schema: SCHEMA_VERSION,
        command: "ybe".into(),
        input: args.table.display().to_string(),
        p: s.p(),
        exponents: s.exponents().to_vec(),
        mode: None,
        seed: Some(args.seed),
        budgets: Some(budgets),
        regime_note: None,
        chains: None,
        checks,
        pass,
    };
    emit_report(&report, &args.report)?;
    Ok(if pass { 0 } else { 2 })
}

fn cmd_enumerate(args: EnumerateArgs) -> Result<u8, Error> {
    let doc: SpaceDoc = read_json(&args.space)?;
    let space = doc.to_space()?;
    let (valid, stats) = enumerate_with_stats(&space, args.budget)?;

    let mut lines = String::new();
    for ring in &valid {
        let table = TableDoc::from_ring(ring);
        lines.push_str(
            &serde_json::to_string(&table)
                .map_err(|e| Error::Format(format!("serialization failed: {e}")))?,
        );
        lines.push('\n');
    }
    match &args.out {
        Some(path) => std::fs::write(path, &lines)?,
        None => {
            print!("{lines}");
            std::io::stdout().flush()?;
        }
    }

    let checks = vec![
        CheckItem::pass("space_size", format!("{} candidates", stats.total)),
        CheckItem::pass(
            "filter_counts",
            format!(
                "valid {}, failed well-definedness {}, failed identity {}, failed nilpotency {}",
                stats.valid, stats.failed_well_defined, stats.failed_axiom, stats.failed_nilpotency
            ),
        ),
    ];
    let report = ReportDoc {
        schema: SCHEMA_VERSION,
        command: "enumerate".into(),
        input: args.space.display().to_string(),
        p: doc.p,
        exponents: doc.exponents.clone(),
        mode: None,
        seed: None,
        budgets: Some(BTreeMap::from([("candidates".to_string(), stats.total)])),
        regime_note: Some(format!(
            "out-of-regime: enumeration at p = {} is consistency evidence for the desk scale \
             only; the classified families assume a much larger prime",
            doc.p
        )),
        chains: None,
        checks,
        pass: true,
    };
    let text = to_canonical_json(&report)?;
    eprint!("{text}");
    if let Some(p) = &args.report {
        std::fs::write(p, text)?;
    }
    Ok(0)
}

fn cmd_iso(args: IsoArgs) -> Result<u8, Error> {
    let ring_a = match read_any_table(&args.table_a)? {
        AnyTable::PreLie(r) => r,
        _ => return Err(Error::Format("iso expects pre-Lie tables".into())),
    };
    let ring_b = match read_any_table(&args.table_b)? {
        AnyTable::PreLie(r) => r,
        _ => return Err(Error::Format("iso expects pre-Lie tables".into())),
    };
    let verdict = isomorphic(&ring_a, &ring_b, args.budget)?;
    let check = match &verdict {
        IsoVerdict::Yes { witness } => {
            let images: Vec<Vec<u64>> = witness.iter().map(|e| e.coeffs().to_vec()).collect();
            CheckItem::pass("isomorphic", format!("yes; generator images {images:?}"))
        }
        IsoVerdict::No { reason } => CheckItem::pass("isomorphic", format!("no; {reason}")),
        IsoVerdict::Inconclusive { examined } => CheckItem::pass(
            "isomorphic",
            format!("inconclusive after {examined} candidates (budget {})", args.budget),
        ),
    };
    let report = ReportDoc {
        schema: SCHEMA_VERSION,
        command: "iso".into(),
        input: format!("{} vs {}", args.table_a.display(), args.table_b.display()),
        p: ring_a.shape().p(),
        exponents: ring_a.shape().exponents().to_vec(),
        mode: None,
        seed: None,
        budgets: Some(BTreeMap::from([("candidates".to_string(), args.budget)])),
        regime_note: None,
        chains: None,
        checks: vec![check],
        pass: true,
    };
    emit_report(&report, &args.report)?;
    Ok(0)
}
