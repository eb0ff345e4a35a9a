//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! The process exits nonzero when a criterion fails that is not listed in
//! `KNOWN_FAILING`. Known failures still print FAIL, with the reason.

mod common;

use std::time::{Duration, Instant};

use impcat_core::logics::campaign::{run, Config, Report, Suite};
use impcat_core::logics::suites::{coupling_suite, par_strong_couplings, rel_transposition, trace_oracle, SuiteReport};
use impcat_core::models::{Par, Rel};
use impcat_core::StochQ;

const SEED: u64 = 1;
const MAX_CARRIER: usize = 3;

const LAW_INSTANCES: usize = 500;
const LAW_BUDGET: Duration = Duration::from_secs(5 * 60);
const AXIOM_INSTANCES: usize = 500;
const TRACE_INSTANCES: usize = 200;
const RULE_INSTANCES: usize = 1000;
const RULE_BUDGET: Duration = Duration::from_secs(30 * 60);
const COUPLING_INSTANCES: usize = 200;
const TRANSPOSITION_CARRIER: usize = 2;
const MIN_CORPUS: usize = 30;

/// Criteria that fail for a documented reason (see the README).
const KNOWN_FAILING: &[(u8, &str)] = &[(
    4,
    "relational-incorrectness if-else and while have counterexamples in par and stoch",
)];

struct Line {
    n: u8,
    name: &'static str,
    ok: bool,
    detail: String,
}

fn campaign(suite: Suite, instances: usize) -> Report {
    run(&Config {
        suite,
        seed: SEED,
        instances,
        max_carrier: MAX_CARRIER,
        ..Default::default()
    })
}

fn campaign_line(n: u8, name: &'static str, r: &Report, wanted: usize, budget: Option<Duration>) -> Line {
    let failing: Vec<String> = r
        .rows
        .iter()
        .filter(|row| !row.passed(wanted))
        .map(|row| {
            format!(
                "{}/{} checked={} refuted={} side={} errors={}",
                row.rule, row.backend, row.checked, row.refuted, row.side_violations, row.errors
            )
        })
        .collect();
    let took = Duration::from_millis(r.millis as u64);
    let in_time = budget.map_or(true, |b| took <= b);
    let mut detail = format!(
        "{} cells x {} instances, {} counterexamples, {:.1}s",
        r.rows.len(),
        wanted,
        r.counterexamples,
        took.as_secs_f64()
    );
    if !in_time {
        detail.push_str(&format!(" (budget {}s)", budget.unwrap().as_secs()));
    }
    if !failing.is_empty() {
        detail.push_str(&format!("; failing: {}", failing.join(", ")));
    }
    Line {
        n,
        name,
        ok: failing.is_empty() && in_time && !r.rows.is_empty(),
        detail,
    }
}

fn suite_line(n: u8, name: &'static str, reports: &[SuiteReport], min_each: usize) -> Line {
    let bad: Vec<String> = reports
        .iter()
        .filter(|r| r.failures > 0 || r.checked < min_each)
        .map(|r| {
            format!(
                "{}/{} checked={} failures={} {}",
                r.check,
                r.backend,
                r.checked,
                r.failures,
                r.first_failure.as_deref().unwrap_or("")
            )
        })
        .collect();
    let checked: usize = reports.iter().map(|r| r.checked).sum();
    let mut detail = format!("{} checks, {} instances", reports.len(), checked);
    if !bad.is_empty() {
        detail.push_str(&format!("; failing: {}", bad.join(", ")));
    }
    Line {
        n,
        name,
        ok: bad.is_empty() && !reports.is_empty(),
        detail,
    }
}

fn corpus_line() -> Line {
    let m = common::nat3();
    let files = common::corpus_files();
    let mut bad: Vec<String> = files.iter().filter_map(|p| common::corpus_ok(p, &m).err()).collect();
    let man = common::manifest();
    bad.extend(man.files.iter().filter_map(|(name, e)| common::bad_ok(name, e, &m).err()));
    let mut detail = format!("{} corpus files, {} malformed fixtures", files.len(), man.files.len());
    if files.len() < MIN_CORPUS {
        bad.push(format!("corpus has {} files, want {MIN_CORPUS}", files.len()));
    }
    if !bad.is_empty() {
        detail.push_str(&format!("; failing: {}", bad.join("; ")));
    }
    Line {
        n: 7,
        name: "parser round trip and diagnostics",
        ok: bad.is_empty(),
        detail,
    }
}

fn main() {
    let start = Instant::now();
    let mut lines = Vec::new();

    let laws = campaign(Suite::Laws, LAW_INSTANCES);
    lines.push(campaign_line(1, "combinator laws", &laws, LAW_INSTANCES, Some(LAW_BUDGET)));

    let axioms = campaign(Suite::Axioms, AXIOM_INSTANCES);
    lines.push(campaign_line(2, "axioms", &axioms, AXIOM_INSTANCES, None));

    let trace = [
        trace_oracle::<Rel>(SEED, TRACE_INSTANCES),
        trace_oracle::<Par>(SEED, TRACE_INSTANCES),
        trace_oracle::<StochQ>(SEED, TRACE_INSTANCES),
    ];
    lines.push(suite_line(3, "trace oracle", &trace, TRACE_INSTANCES));

    let rules = campaign(Suite::Rules, RULE_INSTANCES);
    lines.push(campaign_line(4, "rule campaign", &rules, RULE_INSTANCES, Some(RULE_BUDGET)));

    let mut couplings = coupling_suite::<Rel>(SEED, COUPLING_INSTANCES, MAX_CARRIER);
    couplings.extend(coupling_suite::<Par>(SEED, COUPLING_INSTANCES, MAX_CARRIER));
    couplings.extend(coupling_suite::<StochQ>(SEED, COUPLING_INSTANCES, MAX_CARRIER));
    couplings.push(par_strong_couplings(MAX_CARRIER));
    lines.push(suite_line(5, "couplings", &couplings, 1));

    lines.push(suite_line(
        6,
        "rel triple transposition",
        &[rel_transposition(TRANSPOSITION_CARRIER)],
        1,
    ));

    lines.push(corpus_line());

    let mut unexpected = 0;
    for l in &lines {
        let known = KNOWN_FAILING.iter().find(|(n, _)| *n == l.n);
        let tag = if l.ok { "PASS" } else { "FAIL" };
        println!("criterion {} {tag} {}: {}", l.n, l.name, l.detail);
        match (l.ok, known) {
            (false, Some((_, why))) => println!("  known failure: {why}"),
            (false, None) => unexpected += 1,
            (true, Some(_)) => println!("  listed as a known failure but passed"),
            (true, None) => {}
        }
    }
    println!("acceptance finished in {:.1}s", start.elapsed().as_secs_f64());
    if unexpected > 0 {
        std::process::exit(1);
    }
}
