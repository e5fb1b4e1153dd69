use std::fs;
use std::io::{self, Read, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use meetless::chain::{interpolate, parse_f, print_f, s_lambda, ChainError, FElement, IndexSet, Interpolation};
use meetless::congruence::{all_congruences, theta_plus_measure};
use meetless::dot::hasse_dot;
use meetless::free::term::print_term;
use meetless::free::{enumerate_r, DEFAULT_OUTPUT_CAP, DEFAULT_TRIPLE_GUARD};
use meetless::json::{
    lattice_from_json, measure_from_json, measure_to_json, poset_from_json, refinement_from_json, semilattice_from_json,
    semilattice_to_json, AnyMeasure, JsonError, MeasureJson, PosetJson, RefinementJson, SemilatticeJson,
};
use meetless::measure::{counterexample_measure, MeasureError, PosetMeasure, Violation, DEFAULT_INTERVAL_BOUND};
use meetless::refine::{
    refine_bruteforce, refine_lattice, refine_sequential, refine_strongly_distributive, BruteOutcome, RefineError,
    RefinementProblem, RefinementWitness, DEFAULT_BRUTE_BOUND,
};
use meetless::suites::{run_suite, suite_names};
use meetless::{Distributivity, FiniteJoinSemilattice, FreeError, FreeExtension, JoinSemilattice};

const GUARD_VAR: &str = "MEETLESS_GUARD";

#[derive(Parser)]
#[command(name = "meetless", version, about = "Join-semilattices, their free distributive extensions and V-measures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a structure.
    Check {
        #[command(subcommand)]
        what: CheckCommand,
    },
    /// Congruence semilattice of a finite lattice and its Θ⁺ measure.
    Conc { file: String },
    /// The free distributive extension D(S).
    Freeext {
        #[command(subcommand)]
        op: FreeCommand,
    },
    /// The chain semilattices S(Λ) and F(Λ).
    Chain {
        #[command(subcommand)]
        op: ChainCommand,
    },
    /// Poset measures and V-measures.
    Measure {
        #[command(subcommand)]
        op: MeasureCommand,
    },
    /// Split an isotone chain below a ∨ b into chains below a and below b.
    Refine {
        #[arg(long, value_enum)]
        algo: Algo,
        #[arg(long)]
        problem: String,
    },
    /// Run a named property suite; `meetless suite list` shows the names.
    Suite { name: String },
    /// Export a structure.
    Export {
        #[command(subcommand)]
        what: ExportCommand,
    },
}

#[derive(Subcommand)]
enum CheckCommand {
    /// Validate a join-semilattice and report distributivity.
    Semilattice { file: String },
}

#[derive(Subcommand)]
enum FreeCommand {
    /// Enumerate R(S) for a finite semilattice S.
    Enumerate {
        #[arg(long)]
        base: String,
        /// Bound on eligible non-diagonal triples (overrides MEETLESS_GUARD).
        #[arg(long)]
        guard: Option<usize>,
    },
    /// Compare two terms of F(Λ).
    Leq { x: String, y: String },
    /// Join two terms of F(Λ).
    Join { x: String, y: String },
    /// Complexity and rank of a term of F(Λ).
    Cx { x: String },
}

#[derive(Subcommand)]
enum ChainCommand {
    /// S(Λ) for a finite index set.
    Slambda {
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        indices: Vec<u64>,
    },
    /// Interpolate between x ∈ F(X) and y ∈ F(Y).
    Interpolate {
        #[arg(long)]
        x: String,
        #[arg(long = "X", value_delimiter = ',', num_args = 0..)]
        xs: Vec<u64>,
        #[arg(long)]
        y: String,
        #[arg(long = "Y", value_delimiter = ',', num_args = 0..)]
        ys: Vec<u64>,
    },
}

#[derive(Subcommand)]
enum MeasureCommand {
    /// Check the measure axioms and optionally the V-measure condition.
    Check {
        /// Measure file, or `-` for standard input.
        file: String,
        #[arg(long)]
        vmeasure: bool,
        /// A pair `a,b` of values; repeat for several.
        #[arg(long)]
        pairs: Vec<String>,
        /// Bound on interval size during the decomposition search
        /// (overrides MEETLESS_GUARD).
        #[arg(long)]
        bound: Option<usize>,
    },
    /// The chain measure on 0 < 1 < … < n.
    Counterexample {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 1)]
        depth: u32,
    },
}

#[derive(Subcommand)]
enum ExportCommand {
    /// Hasse diagram of a semilattice or poset file in DOT.
    Dot { file: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Lattice,
    Sd,
    Seq,
    Brute,
}

/// Outcome of a command that did not succeed.
enum Failure {
    /// A check ran and failed; the report still goes to standard output.
    Check(Value, String),
    Malformed(String),
    Guard(String),
}

type Outcome = Result<Output, Failure>;

enum Output {
    Json(Value),
    Text(String),
}

fn malformed(e: impl ToString) -> Failure {
    Failure::Malformed(e.to_string())
}

fn read_input(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| malformed(format!("standard input: {e}")))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| malformed(format!("{path}: {e}")))
    }
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &str) -> Result<T, Failure> {
    serde_json::from_str(&read_input(path)?).map_err(|e| malformed(format!("{path}: {e}")))
}

fn guard_from_env(default: usize) -> Result<usize, Failure> {
    match std::env::var(GUARD_VAR) {
        Ok(v) => v.trim().parse().map_err(|_| malformed(format!("{GUARD_VAR}={v} is not a number"))),
        Err(_) => Ok(default),
    }
}

fn term(s: &str) -> Result<FElement, Failure> {
    parse_f(s).map_err(|e| malformed(format!("{s:?}: {e}")))
}

/// Splits `a,b` at the single comma outside parentheses.
fn split_pair(s: &str) -> Option<(&str, &str)> {
    let mut depth = 0i32;
    let mut at = None;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                if at.is_some() {
                    return None;
                }
                at = Some(i);
            }
            _ => {}
        }
    }
    at.map(|i| (s[..i].trim(), s[i + 1..].trim()))
}

fn check_semilattice(file: &str) -> Outcome {
    let j: SemilatticeJson = parse_json(file)?;
    let s = match semilattice_from_json(&j) {
        Ok(s) => s,
        Err(JsonError::Order(e)) => {
            return Err(Failure::Check(json!({ "valid": false, "error": e.to_string() }), e.to_string()))
        }
        Err(e) => return Err(malformed(e)),
    };
    if let Err(e) = s.check_laws() {
        return Err(Failure::Check(json!({ "valid": false, "error": e }), e));
    }
    let distributivity = match s.is_distributive() {
        Distributivity::Distributive => json!({ "holds": true }),
        Distributivity::Counterexample { c, a, b } => json!({
            "holds": false,
            "counterexample": { "c": s.name(c), "a": s.name(a), "b": s.name(b) },
        }),
    };
    let irreducibles: Vec<&str> = s.join_irreducibles().into_iter().map(|x| s.name(x)).collect();
    Ok(Output::Json(json!({
        "valid": true,
        "size": s.len(),
        "distributive": distributivity,
        "strongly_distributive": s.is_strongly_distributive(),
        "join_irreducibles": irreducibles,
        "hash": meetless::corpus::content_hash(&s),
    })))
}

fn conc(file: &str) -> Outcome {
    let j: SemilatticeJson = parse_json(file)?;
    let l = lattice_from_json(&j).map_err(malformed)?;
    let conc = all_congruences(&l);
    let (_, mu) = theta_plus_measure(&l);
    Ok(Output::Json(json!({
        "congruences": semilattice_to_json(conc.semilattice()),
        "theta_plus": measure_to_json(&AnyMeasure::Table(mu)),
    })))
}

fn free_error(e: FreeError) -> Failure {
    match e {
        FreeError::TooLarge { .. } | FreeError::OutputTooLarge { .. } => Failure::Guard(e.to_string()),
        other => malformed(other),
    }
}

fn freeext(op: FreeCommand) -> Outcome {
    match op {
        FreeCommand::Enumerate { base, guard } => {
            let j: SemilatticeJson = parse_json(&base)?;
            let s = semilattice_from_json(&j).map_err(malformed)?;
            let guard = match guard {
                Some(g) => g,
                None => guard_from_env(DEFAULT_TRIPLE_GUARD)?,
            };
            let carrier: Vec<_> = s.ids().collect();
            let zero = s.zero();
            let ext = FreeExtension::new(&s);
            let elems = enumerate_r(&ext, &carrier, guard, DEFAULT_OUTPUT_CAP).map_err(free_error)?;
            let names: Vec<String> = elems
                .iter()
                .map(|x| print_term(x, &zero, &|e| s.name(*e).to_string()))
                .collect();
            Ok(Output::Json(json!({ "count": names.len(), "elements": names })))
        }
        FreeCommand::Leq { x, y } => {
            let ext = meetless::chain::f_ext();
            Ok(Output::Json(json!({ "leq": ext.leq(&term(&x)?, &term(&y)?) })))
        }
        FreeCommand::Join { x, y } => {
            let ext = meetless::chain::f_ext();
            Ok(Output::Json(json!({ "join": print_f(&ext.join(&term(&x)?, &term(&y)?)) })))
        }
        FreeCommand::Cx { x } => {
            let x = term(&x)?;
            Ok(Output::Json(json!({ "term": print_f(&x), "complexity": x.complexity(), "rank": x.rank() })))
        }
    }
}

fn chain(op: ChainCommand) -> Outcome {
    match op {
        ChainCommand::Slambda { indices } => {
            let indices: IndexSet = indices.into_iter().collect();
            Ok(Output::Json(serde_json::to_value(semilattice_to_json(&s_lambda(&indices))).expect("serializable")))
        }
        ChainCommand::Interpolate { x, xs, y, ys } => {
            let (xs, ys): (IndexSet, IndexSet) = (xs.into_iter().collect(), ys.into_iter().collect());
            match interpolate(&term(&x)?, &xs, &term(&y)?, &ys) {
                Ok(Interpolation::Interpolant(z)) => Ok(Output::Json(json!({ "interpolant": print_f(&z) }))),
                Ok(Interpolation::Certificate { xi }) => {
                    Ok(Output::Json(json!({ "certificate": { "xi": xi, "c": format!("c({xi})") } })))
                }
                Err(e @ ChainError::Internal(_)) => Err(Failure::Check(json!({ "error": e.to_string() }), e.to_string())),
                Err(e) => Err(malformed(e)),
            }
        }
    }
}

fn violation_json<S: JoinSemilattice>(m: &PosetMeasure<S>, v: &Violation) -> Value {
    let n = |x| m.poset().name(x).to_string();
    match *v {
        Violation::NonzeroOnComparable { x, y } => json!({ "kind": "nonzero_on_comparable", "x": n(x), "y": n(y) }),
        Violation::Triangle { x, y, z } => json!({ "kind": "triangle", "x": n(x), "y": n(y), "z": n(z) }),
    }
}

fn check_measure<S: JoinSemilattice>(
    m: &PosetMeasure<S>,
    vmeasure: bool,
    pairs: Option<Vec<(S::Elem, S::Elem)>>,
    bound: usize,
    show: impl Fn(&S::Elem) -> String,
) -> Outcome {
    if let Err(v) = m.is_poset_measure() {
        let report = json!({ "poset_measure": false, "violation": violation_json(m, &v) });
        return Err(Failure::Check(report, "not a poset measure".into()));
    }
    if !vmeasure {
        return Ok(Output::Json(json!({ "poset_measure": true })));
    }
    match m.is_v_measure(pairs.as_deref(), bound) {
        Ok(None) => Ok(Output::Json(json!({ "poset_measure": true, "v_measure": true }))),
        Ok(Some(w)) => {
            let report = json!({
                "poset_measure": true,
                "v_measure": false,
                "failure": {
                    "x": m.poset().name(w.x),
                    "y": m.poset().name(w.y),
                    "a": show(&w.a),
                    "b": show(&w.b),
                },
            });
            Err(Failure::Check(report, "not a V-measure".into()))
        }
        Err(e @ MeasureError::SearchSpaceTooLarge { .. }) => Err(Failure::Guard(e.to_string())),
        Err(e) => Err(malformed(e)),
    }
}

fn measure(op: MeasureCommand) -> Outcome {
    match op {
        MeasureCommand::Check { file, vmeasure, pairs, bound } => {
            let j: MeasureJson = parse_json(&file)?;
            let m = measure_from_json(&j).map_err(malformed)?;
            let bound = match bound {
                Some(b) => b,
                None => guard_from_env(DEFAULT_INTERVAL_BOUND)?,
            };
            let raw: Vec<(&str, &str)> = pairs
                .iter()
                .map(|p| split_pair(p).ok_or_else(|| malformed(format!("{p:?} is not a pair a,b"))))
                .collect::<Result<_, _>>()?;
            match &m {
                AnyMeasure::Table(m) => {
                    let s = m.values();
                    let id = |n: &str| s.id_of(n).ok_or_else(|| malformed(format!("unknown value {n}")));
                    let pairs = if raw.is_empty() {
                        None
                    } else {
                        Some(raw.iter().map(|(a, b)| Ok((id(a)?, id(b)?))).collect::<Result<Vec<_>, Failure>>()?)
                    };
                    check_measure(m, vmeasure, pairs, bound, |e| s.name(*e).to_string())
                }
                AnyMeasure::Terms(m) => {
                    let pairs = if raw.is_empty() {
                        None
                    } else {
                        Some(raw.iter().map(|(a, b)| Ok((term(a)?, term(b)?))).collect::<Result<Vec<_>, Failure>>()?)
                    };
                    check_measure(m, vmeasure, pairs, bound, print_f)
                }
            }
        }
        MeasureCommand::Counterexample { n, depth } => {
            if n == 0 {
                return Err(malformed("n must be positive"));
            }
            let m = AnyMeasure::Terms(counterexample_measure(n, depth));
            Ok(Output::Json(serde_json::to_value(measure_to_json(&m)).expect("serializable")))
        }
    }
}

fn witness_json(s: &FiniteJoinSemilattice, w: &RefinementWitness) -> Value {
    let names = |xs: &[meetless::ElemId]| xs.iter().map(|&x| s.name(x).to_string()).collect::<Vec<_>>();
    json!({ "a_seq": names(&w.a_seq), "b_seq": names(&w.b_seq) })
}

fn refine_error(e: RefineError) -> Failure {
    match e {
        RefineError::TooLarge { .. } => Failure::Guard(e.to_string()),
        RefineError::ChainNotIsotone(_) | RefineError::NotBelowAB(_) | RefineError::BadOrder => malformed(e),
        other => Failure::Check(json!({ "error": other.to_string() }), other.to_string()),
    }
}

fn refine(algo: Algo, problem: &str) -> Outcome {
    let j: RefinementJson = parse_json(problem)?;
    let (s, a, b, chain) = refinement_from_json(&j).map_err(malformed)?;
    let p = RefinementProblem::new(&s, a, b, chain).map_err(refine_error)?;
    let out = match algo {
        Algo::Lattice => witness_json(&s, &refine_lattice(&p).map_err(refine_error)?),
        Algo::Sd => {
            let (w, cover) = refine_strongly_distributive(&p).map_err(refine_error)?;
            let sets = |v: &[std::collections::BTreeSet<meetless::ElemId>]| {
                v.iter()
                    .map(|set| set.iter().map(|&x| s.name(x).to_string()).collect::<Vec<_>>())
                    .collect::<Vec<_>>()
            };
            let mut out = witness_json(&s, &w);
            out["cover"] = json!({ "a_sets": sets(&cover.a_sets), "b_sets": sets(&cover.b_sets) });
            out
        }
        Algo::Seq => {
            let order = j.order.clone().unwrap_or_else(|| (0..p.chain().len()).collect());
            witness_json(&s, &refine_sequential(&p, &order).map_err(refine_error)?)
        }
        Algo::Brute => {
            let bound = guard_from_env(DEFAULT_BRUTE_BOUND)?;
            match refine_bruteforce(&p, bound).map_err(refine_error)? {
                BruteOutcome::Witness(w) => witness_json(&s, &w),
                BruteOutcome::Unsat => {
                    return Err(Failure::Check(json!({ "unsat": true }), "no monotone refinement exists".into()))
                }
            }
        }
    };
    Ok(Output::Json(out))
}

fn suite(name: &str) -> Outcome {
    if name == "list" {
        let list: Vec<Value> = suite_names()
            .into_iter()
            .map(|(n, d)| json!({ "name": n, "description": d }))
            .collect();
        return Ok(Output::Json(Value::Array(list)));
    }
    let report = run_suite(name).ok_or_else(|| malformed(format!("unknown suite {name}; try `meetless suite list`")))?;
    eprintln!("meetless: suite {name}: {} checks in {:.1} s", report.checked, report.seconds);
    let value = serde_json::to_value(&report).expect("serializable");
    if report.passed() {
        Ok(Output::Json(value))
    } else {
        Err(Failure::Check(value, format!("suite {name}: {} violations", report.violations)))
    }
}

fn export_dot(file: &str) -> Outcome {
    let text = read_input(file)?;
    let poset = if let Ok(j) = serde_json::from_str::<SemilatticeJson>(&text) {
        semilattice_from_json(&j).map_err(malformed)?.poset().clone()
    } else {
        let j: PosetJson = serde_json::from_str(&text).map_err(|e| malformed(format!("{file}: {e}")))?;
        poset_from_json(&j).map_err(malformed)?
    };
    Ok(Output::Text(hasse_dot(&poset, "hasse")))
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Check {
            what: CheckCommand::Semilattice { file },
        } => check_semilattice(&file),
        Command::Conc { file } => conc(&file),
        Command::Freeext { op } => freeext(op),
        Command::Chain { op } => chain(op),
        Command::Measure { op } => measure(op),
        Command::Refine { algo, problem } => refine(algo, &problem),
        Command::Suite { name } => suite(&name),
        Command::Export {
            what: ExportCommand::Dot { file },
        } => export_dot(&file),
    }
}

/// Writes to standard output, ignoring a closed pipe.
fn emit(text: &str) {
    let mut out = io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn print_json(v: &Value) {
    emit(&format!("{}\n", serde_json::to_string_pretty(v).expect("serializable")));
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Output::Json(v)) => {
            print_json(&v);
            ExitCode::SUCCESS
        }
        Ok(Output::Text(t)) => {
            emit(&t);
            ExitCode::SUCCESS
        }
        Err(Failure::Check(report, msg)) => {
            print_json(&report);
            eprintln!("meetless: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Malformed(msg)) => {
            eprintln!("meetless: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Guard(msg)) => {
            eprintln!("meetless: {msg} (raise the bound with --guard, --bound or {GUARD_VAR})");
            ExitCode::from(3)
        }
    }
}
