//! The eight acceptance criteria, one pass/fail line each. Runs without
//! the test harness so the lines show even when everything passes.

use std::process::Command;
use std::time::Instant;

use uniserial_lab::experiments::{
    cauchy_separation, construction_checks, gamma_prime_families, hahn_kernel, key_census_stability, special_tree, Check,
};
use uniserial_lab::gamma::DEFAULT_DEPTH;
use uniserial_lab::uniserial;
use uniserial_lab::valuation::{classify_gap, RingFlavor, TypeSpec};
use uniserial_lab::{Ordinal, Quotient, Q};

const SEED: u64 = 7;

fn o(s: &str) -> Ordinal {
    s.parse().unwrap()
}

fn default_spec() -> TypeSpec {
    TypeSpec::new(o("w^2"))
}

fn all_pass(checks: &[Check]) -> (bool, String) {
    let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
    (failed.is_empty(), if failed.is_empty() { String::new() } else { format!("; failed: {}", failed.join(", ")) })
}

fn hahn() -> (bool, String) {
    let c = hahn_kernel(500, SEED);
    let n = c.detail["pairs"].as_u64().unwrap();
    (c.pass && n == 500, format!("{n} pairs, 3 cuts, {} prefix terms", c.detail["prefixTerms"]))
}

fn gap_witnesses() -> (bool, String) {
    let r = classify_gap::<Q>(&default_spec(), RingFlavor::R1, &o("0"), &o("1"), 8, SEED).unwrap();
    let ok = r.pass && r.witnesses == Some(256) && r.pairs_checked == Some(32_640);
    (ok, format!("{} witnesses, {} pairs", r.witnesses.unwrap_or(0), r.pairs_checked.unwrap_or(0)))
}

fn key_census() -> (bool, String) {
    let c = key_census_stability::<Q>(&default_spec(), &o("0"), &o("w"), 10, SEED).unwrap();
    let runs = c.detail["runs"].as_array().unwrap();
    let samples: Vec<u64> = runs.iter().map(|r| r["samples"].as_u64().unwrap()).collect();
    let keys: Vec<u64> = runs.iter().map(|r| r["distinctKeys"].as_u64().unwrap()).collect();
    let ok = c.pass && samples.iter().all(|s| *s >= 100);
    (ok, format!("samples {samples:?}, distinct keys {keys:?} over two seeds"))
}

fn separation() -> (bool, String) {
    let w = Ordinal::omega();
    let c = cauchy_separation::<Q>(&TypeSpec::new(w.clone()), &w, 6).unwrap();
    let pairs = c.detail["pairs"].as_u64().unwrap();
    (c.pass && pairs == 64 * 63 / 2, format!("64 families, {pairs} pairs"))
}

fn gamma_prime() -> (bool, String) {
    let c = gamma_prime_families::<Q>(&default_spec(), 20, DEFAULT_DEPTH).unwrap();
    let fams = c.detail["families"].as_array().unwrap();
    let inconclusive = fams
        .iter()
        .flat_map(|f| f["report"]["levels"].as_array().unwrap())
        .filter(|l| l["verdict"] == "inconclusive")
        .count();
    (c.pass && fams.len() == 20 && inconclusive == 0, format!("{} families at depth {DEFAULT_DEPTH}, {inconclusive} inconclusive levels", fams.len()))
}

fn special() -> (bool, String) {
    let checks = special_tree(&o("w*2+5"), 20, 100, SEED).unwrap();
    let main = &checks[0].detail;
    let stars = main["starChecks"].as_u64().unwrap();
    let witness = &checks[1].detail["witness"];
    let (ok, why) = all_pass(&checks);
    let ok = ok && stars == 100 && !witness.is_null();
    (ok, format!("{} pairs, {stars} star queries, corruption caught {}{why}", main["pairsChecked"], !witness.is_null()))
}

fn presentation() -> (bool, String) {
    let spec = default_spec();
    let mut c = uniserial::build::<Q>(&spec, &o("w*2"), 15).unwrap();
    let mut checks = construction_checks(&mut c, 50, SEED).unwrap();
    let witnesses = checks.iter().find(|k| k.name == "standardness-refutes-random").unwrap().detail["witnesses"].clone();
    let all_witnessed = witnesses.as_array().unwrap().iter().all(|w| w.as_array().is_some_and(|p| p.len() == 2));
    let mut g = uniserial::build_general_case::<Q>(&spec, Quotient::one(), &o("w*2"), 15).unwrap();
    checks.extend(construction_checks(&mut g, 0, SEED).unwrap());
    let (ok, why) = all_pass(&checks);
    (
        ok && all_witnessed,
        format!(
            "{} levels, {} labels, {} instances, {} sector labels{why}",
            c.levels().len(),
            c.labels.len(),
            c.instances.len(),
            g.labels.len()
        ),
    )
}

fn determinism() -> (bool, String) {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_uniserial-lab"))
            .args(["invariants", "--seed", "42"])
            .env_remove("TA_REPORT_DIR")
            .output()
            .unwrap()
    };
    let a = run();
    let b = run();
    let ok = a.status.success() && b.status.success() && a.stdout == b.stdout && a.stdout.ends_with(b"\n");
    (ok, format!("{} bytes, exit {:?}", a.stdout.len(), a.status.code()))
}

type Criterion = fn() -> (bool, String);

fn main() {
    let criteria: [(&str, Criterion); 8] = [
        ("hahn kernel soundness", hahn),
        ("gap witnesses pairwise incongruent", gap_witnesses),
        ("equal truncation keys give equal truncations", key_census),
        ("cauchy families congruent and separated", separation),
        ("limit units trivial modulo the filtration", gamma_prime),
        ("special tree labels and extension", special),
        ("non-standard presentation and standardness", presentation),
        ("byte-identical invariant reports", determinism),
    ];
    let start = Instant::now();
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (ok, info) = f();
        println!("criterion {} {}: {} ({info}; {} ms)", i + 1, if ok { "PASS" } else { "FAIL" }, name, t.elapsed().as_millis());
        if !ok {
            failed.push(i + 1);
        }
    }
    println!("total {} ms", start.elapsed().as_millis());
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
