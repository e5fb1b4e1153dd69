//! Acceptance run: the property suites behind criteria 1–11 and the CLI
//! golden files behind criterion 12. Prints one line per criterion and exits
//! nonzero if any fails.
//!
//! Set `MEETLESS_BLESS=1` to rewrite the golden outputs.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::Instant;

use meetless::chain::{parse_f, print_f};
use meetless::json::{measure_from_json, measure_to_json, semilattice_from_json, semilattice_to_json};
use meetless::suites::run_suite;

const CRITERIA: &[(u32, &str)] = &[
    (1, "laws"),
    (2, "rs-structure"),
    (3, "join-oracle"),
    (4, "projection"),
    (5, "bowtie"),
    (6, "functor"),
    (7, "interpolation"),
    (8, "lemmas"),
    (9, "theta-plus"),
    (10, "shadow"),
    (11, "refinement"),
];

/// Output re-parsed through the library must reproduce itself.
#[derive(Clone, Copy)]
enum RoundTrip {
    None,
    Semilattice,
    Measure,
    Congruences,
    Term(&'static str),
}

struct Case {
    name: &'static str,
    args: &'static [&'static str],
    stdin: Option<&'static str>,
    env: Option<(&'static str, &'static str)>,
    exit: i32,
    round_trip: RoundTrip,
}

const fn case(name: &'static str, args: &'static [&'static str], exit: i32) -> Case {
    Case {
        name,
        args,
        stdin: None,
        env: None,
        exit,
        round_trip: RoundTrip::None,
    }
}

const fn with_round_trip(c: Case, r: RoundTrip) -> Case {
    Case { round_trip: r, ..c }
}

const fn with_stdin(c: Case, file: &'static str) -> Case {
    Case { stdin: Some(file), ..c }
}

const fn with_env(c: Case, key: &'static str, value: &'static str) -> Case {
    Case {
        env: Some((key, value)),
        ..c
    }
}

const CASES: &[Case] = &[
    case("check_square", &["check", "semilattice", "@square.json"], 0),
    case("check_s0", &["check", "semilattice", "@s0.json"], 0),
    case("check_n5", &["check", "semilattice", "@n5.json"], 0),
    case("check_corrupted", &["check", "semilattice", "@corrupted_square.json"], 1),
    case("check_unknown_name", &["check", "semilattice", "@unknown_name.json"], 2),
    case("check_malformed", &["check", "semilattice", "@malformed.json"], 2),
    case("check_missing_file", &["check", "semilattice", "@does_not_exist.json"], 2),
    with_round_trip(case("conc_square", &["conc", "@square.json"], 0), RoundTrip::Congruences),
    with_round_trip(case("conc_n5", &["conc", "@n5.json"], 0), RoundTrip::Congruences),
    case("enumerate_chain3", &["freeext", "enumerate", "--base", "@chain3.json"], 0),
    case("enumerate_square_guarded", &["freeext", "enumerate", "--base", "@square.json", "--guard", "17"], 3),
    with_env(
        case("enumerate_square_env_guard", &["freeext", "enumerate", "--base", "@square.json"], 3),
        "MEETLESS_GUARD",
        "4",
    ),
    case("enumerate_s0_default_guard", &["freeext", "enumerate", "--base", "@s0.json"], 3),
    case("leq_generator", &["freeext", "leq", "bowtie(a,b,join(a,b))", "a"], 0),
    case("leq_reverse", &["freeext", "leq", "a", "bowtie(a,b,join(a,b))"], 0),
    with_round_trip(
        case("join_generators", &["freeext", "join", "bowtie(a,b,join(a,b))", "bowtie(b,a,join(a,b))"], 0),
        RoundTrip::Term("join"),
    ),
    with_round_trip(
        case("join_chain", &["freeext", "join", "c(0)", "join(b,c(1))"], 0),
        RoundTrip::Term("join"),
    ),
    case("cx_generator", &["freeext", "cx", "bowtie(a,b,join(a,b))"], 0),
    case("cx_syntax_error", &["freeext", "cx", "bowtie(a,b"], 2),
    case("cx_outside_c", &["freeext", "cx", "bowtie(a,0,b)"], 2),
    with_round_trip(case("slambda_empty", &["chain", "slambda", "--indices"], 0), RoundTrip::Semilattice),
    with_round_trip(case("slambda_0", &["chain", "slambda", "--indices", "0"], 0), RoundTrip::Semilattice),
    with_round_trip(case("slambda_0_1_2", &["chain", "slambda", "--indices", "0,1,2"], 0), RoundTrip::Semilattice),
    case(
        "interpolate_support",
        &["chain", "interpolate", "--x", "a", "--X", "0", "--y", "join(a,c(1))", "--Y", "1"],
        0,
    ),
    case(
        "interpolate_certificate",
        &["chain", "interpolate", "--x", "c(0)", "--X", "0", "--y", "c(1)", "--Y", "1"],
        0,
    ),
    case(
        "interpolate_generator",
        &["chain", "interpolate", "--x", "bowtie(a,b,c(0))", "--X", "0", "--y", "c(0)", "--Y", "0,1"],
        0,
    ),
    case(
        "interpolate_not_leq",
        &["chain", "interpolate", "--x", "c(1)", "--X", "1", "--y", "c(0)", "--Y", "0"],
        2,
    ),
    with_round_trip(
        case("counterexample_3", &["measure", "counterexample", "--n", "3"], 0),
        RoundTrip::Measure,
    ),
    with_round_trip(
        case("counterexample_2_depth_2", &["measure", "counterexample", "--n", "2", "--depth", "2"], 0),
        RoundTrip::Measure,
    ),
    case("measure_check_chain", &["measure", "check", "@chain_measure2.json"], 0),
    with_stdin(
        case("measure_vmeasure_stdin", &["measure", "check", "--vmeasure", "--pairs", "a,b", "-"], 1),
        "chain_measure2.json",
    ),
    case("measure_vmeasure_needs_pairs", &["measure", "check", "--vmeasure", "@chain_measure2.json"], 2),
    case(
        "measure_vmeasure_bound",
        &["measure", "check", "--vmeasure", "--pairs", "a,b", "--bound", "2", "@chain_measure2.json"],
        3,
    ),
    case("measure_theta_square", &["measure", "check", "--vmeasure", "@theta_square.json"], 0),
    case("measure_corrupted", &["measure", "check", "@corrupted_measure.json"], 1),
    case("refine_lattice", &["refine", "--algo", "lattice", "--problem", "@refine_square.json"], 0),
    case("refine_sd", &["refine", "--algo", "sd", "--problem", "@refine_square.json"], 0),
    case("refine_seq", &["refine", "--algo", "seq", "--problem", "@refine_square_order.json"], 0),
    case("refine_brute", &["refine", "--algo", "brute", "--problem", "@refine_square.json"], 0),
    case("refine_lattice_n5", &["refine", "--algo", "lattice", "--problem", "@refine_n5.json"], 0),
    case("refine_sd_n5", &["refine", "--algo", "sd", "--problem", "@refine_n5.json"], 1),
    case("refine_brute_s0", &["refine", "--algo", "brute", "--problem", "@refine_s0.json"], 1),
    with_env(
        case("refine_brute_guard", &["refine", "--algo", "brute", "--problem", "@refine_s0.json"], 3),
        "MEETLESS_GUARD",
        "1",
    ),
    case("refine_not_isotone", &["refine", "--algo", "lattice", "--problem", "@refine_not_isotone.json"], 2),
    case("refine_unknown_algo", &["refine", "--algo", "magic", "--problem", "@refine_square.json"], 2),
    case("suite_list", &["suite", "list"], 0),
    case("suite_shadow", &["suite", "shadow"], 0),
    case("suite_unknown", &["suite", "nonexistent"], 2),
    case("dot_square", &["export", "dot", "@square.json"], 0),
    case("dot_poset", &["export", "dot", "@poset.json"], 0),
    case("unknown_flag", &["chain", "slambda", "--frobnicate"], 2),
    case("unknown_command", &["frobnicate"], 2),
];

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

struct Run {
    code: i32,
    stdout: String,
}

fn run(c: &Case) -> Run {
    let inputs = golden_dir().join("inputs");
    let args: Vec<String> = c
        .args
        .iter()
        .map(|a| match a.strip_prefix('@') {
            Some(f) => inputs.join(f).to_string_lossy().into_owned(),
            None => a.to_string(),
        })
        .collect();
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_meetless"));
    cmd.args(&args)
        .env_remove("MEETLESS_GUARD")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    if let Some((k, v)) = c.env {
        cmd.env(k, v);
    }
    let mut child = cmd.spawn().expect("binary runs");
    let input = c.stdin.map(|f| fs::read(inputs.join(f)).expect("stdin fixture")).unwrap_or_default();
    child.stdin.take().expect("piped").write_all(&input).expect("write stdin");
    let out = child.wait_with_output().expect("binary finishes");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).expect("utf-8 output"),
    }
}

fn round_trip(kind: RoundTrip, stdout: &str) -> Result<(), String> {
    let pretty = |v: &serde_json::Value| serde_json::to_string_pretty(v).unwrap() + "\n";
    let value: serde_json::Value = match kind {
        RoundTrip::None => return Ok(()),
        _ => serde_json::from_str(stdout).map_err(|e| e.to_string())?,
    };
    let again = match kind {
        RoundTrip::None => unreachable!(),
        RoundTrip::Semilattice => {
            let s = semilattice_from_json(&serde_json::from_value(value.clone()).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            serde_json::to_value(semilattice_to_json(&s)).unwrap()
        }
        RoundTrip::Measure => {
            let m = measure_from_json(&serde_json::from_value(value.clone()).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            serde_json::to_value(measure_to_json(&m)).unwrap()
        }
        RoundTrip::Congruences => {
            let mut v = value.clone();
            let s = semilattice_from_json(&serde_json::from_value(value["congruences"].clone()).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            v["congruences"] = serde_json::to_value(semilattice_to_json(&s)).unwrap();
            let m = measure_from_json(&serde_json::from_value(value["theta_plus"].clone()).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            v["theta_plus"] = serde_json::to_value(measure_to_json(&m)).unwrap();
            v
        }
        RoundTrip::Term(field) => {
            let text = value[field].as_str().ok_or("missing term")?;
            let x = parse_f(text).map_err(|e| e.to_string())?;
            let mut v = value.clone();
            v[field] = serde_json::Value::String(print_f(&x));
            v
        }
    };
    if pretty(&again) == stdout {
        Ok(())
    } else {
        Err("re-serialized output differs".into())
    }
}

/// Runs every golden case; returns the failures.
fn golden(bless: bool) -> Vec<String> {
    let mut failures = Vec::new();
    for c in CASES {
        let r = run(c);
        let path = golden_dir().join(format!("{}.out", c.name));
        if bless {
            fs::write(&path, &r.stdout).expect("write golden file");
        }
        if r.code != c.exit {
            failures.push(format!("{}: exit {} (expected {})", c.name, r.code, c.exit));
        }
        match fs::read_to_string(&path) {
            Ok(want) if want == r.stdout => {}
            Ok(_) => failures.push(format!("{}: output differs from {}", c.name, path.display())),
            Err(e) => failures.push(format!("{}: {e}", c.name)),
        }
        if let Err(e) = round_trip(c.round_trip, &r.stdout) {
            failures.push(format!("{}: round trip failed: {e}", c.name));
        }
    }
    failures
}

fn main() {
    let bless = std::env::var("MEETLESS_BLESS").is_ok_and(|v| v == "1");
    let only: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let selected = |name: &str| only.is_empty() || only.iter().any(|o| name.contains(o.as_str()));
    let mut failed = 0;
    for &(n, name) in CRITERIA {
        if !selected(name) {
            continue;
        }
        let r = run_suite(name).expect("registered suite");
        let status = if r.passed() { "PASS" } else { "FAIL" };
        println!(
            "criterion {n:>2} {name:<14} {status}  {} checks, {} violations, {:.1} s",
            r.checked, r.violations, r.seconds
        );
        for m in &r.messages {
            println!("    {m}");
        }
        if !r.passed() {
            failed += 1;
        }
    }
    if selected("golden") {
        let start = Instant::now();
        let failures = golden(bless);
        let status = if failures.is_empty() { "PASS" } else { "FAIL" };
        println!(
            "criterion 12 {:<14} {status}  {} cases, {} failures, {:.1} s",
            "cli-golden",
            CASES.len(),
            failures.len(),
            start.elapsed().as_secs_f64()
        );
        for f in &failures {
            println!("    {f}");
        }
        if !failures.is_empty() {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
