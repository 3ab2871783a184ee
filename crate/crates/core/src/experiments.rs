//! Experiment runners shared by the command line and the test suites.
//!
//! Every runner is deterministic in its configuration and seed; reports are
//! plain JSON values with sorted keys.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::aronszajn::Tree;
use crate::error::{Error, Result};
use crate::field::{Field, Gf, Q};
use crate::gamma::{build_cauchy, cauchy_levels, verify_gamma_prime_zero, verify_separation, adversarial_family, LevelFamily, DEFAULT_DEPTH};
use crate::group::{gen, GroupElement};
use crate::ordinal::{Ladder, Ordinal};
use crate::series::{expand_prefix, truncation_equal, Poly, Quotient};
use crate::uniserial::{self, Construction};
use crate::valuation::{binary_strings, classify_gap, RingConfig, RingFlavor, TypeSpec};

pub const SCHEMA: u32 = 1;
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Fields accepted by name in configurations.
pub const FIELDS: &[&str] = &["Q", "GF(2)", "GF(3)", "GF(5)", "GF(7)", "GF(11)", "GF(13)"];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", rename_all_fields = "camelCase")]
pub enum Experiment {
    RingDemo { r1_witnesses: usize, sigma: Ordinal, tau: Ordinal, census_reps: usize },
    GammaCheck { delta: Ordinal, zeta_len: usize, depth: usize },
    TreeBuild { bound: Ordinal, budget: usize, samples: usize, check: bool },
    UniserialBuild {
        bound: Ordinal,
        budget: usize,
        span: usize,
        general: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        z0: Option<String>,
        candidates: usize,
        check: bool,
    },
    Invariants,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::RingDemo { .. } => "ring-demo",
            Experiment::GammaCheck { .. } => "gamma-check",
            Experiment::TreeBuild { .. } => "tree-build",
            Experiment::UniserialBuild { .. } => "uniserial-build",
            Experiment::Invariants => "invariants",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub ring: RingConfig,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment, ring: RingConfig, seed: u64) -> Self {
        ExperimentConfig { experiment, ring, seed }
    }
}

/// The outcome of one invariant check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: Value,
}

impl Check {
    fn new(name: &str, pass: bool, detail: Value) -> Self {
        Check { name: name.into(), pass, detail }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub schema: u32,
    pub version: String,
    pub experiment: String,
    pub config: ExperimentConfig,
    pub scope: String,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub data: Value,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u128>,
}

impl Report {
    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

const SCOPE: &str = "exact checks over materialized data only; levels, nodes and instances beyond the budget are not examined";

/// Runs the configured experiment over the configured field.
pub fn run(config: &ExperimentConfig) -> Result<Report> {
    config.ring.validate()?;
    let field: String = config.ring.field.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_uppercase();
    match field.as_str() {
        "Q" => run_in::<Q>(config),
        "GF(2)" => run_in::<Gf<2>>(config),
        "GF(3)" => run_in::<Gf<3>>(config),
        "GF(5)" => run_in::<Gf<5>>(config),
        "GF(7)" => run_in::<Gf<7>>(config),
        "GF(11)" => run_in::<Gf<11>>(config),
        "GF(13)" => run_in::<Gf<13>>(config),
        _ => Err(Error::Config(format!("unsupported field {:?}; expected one of {}", config.ring.field, FIELDS.join(", ")))),
    }
}

fn run_in<F: Field>(config: &ExperimentConfig) -> Result<Report> {
    let spec = config.ring.type_spec()?;
    let seed = config.seed;
    let (checks, data) = match &config.experiment {
        Experiment::RingDemo { r1_witnesses, sigma, tau, census_reps } => {
            (ring_demo::<F>(&spec, sigma, tau, *r1_witnesses, *census_reps, seed)?, Value::Null)
        }
        Experiment::GammaCheck { delta, zeta_len, depth } => {
            (gamma_check::<F>(&spec, delta, *zeta_len, *depth)?, Value::Null)
        }
        Experiment::TreeBuild { bound, budget, samples, check } => tree_build(bound, *budget, *samples, *check, seed)?,
        Experiment::UniserialBuild { bound, budget, span, general, z0, candidates, check } => {
            let z0 = match z0 {
                Some(s) => s.parse::<Quotient<F>>()?,
                None => Quotient::one(),
            };
            let sector = if *general { Some(z0) } else { None };
            uniserial_run::<F>(&spec, bound, *budget, *span, sector, *candidates, *check, seed)?
        }
        Experiment::Invariants => (invariants::<F>(&spec, seed)?, Value::Null),
    };
    let pass = checks.iter().all(|c| c.pass);
    Ok(Report {
        schema: SCHEMA,
        version: VERSION.into(),
        experiment: config.experiment.name().into(),
        config: config.clone(),
        scope: SCOPE.into(),
        checks,
        data,
        pass,
        elapsed_ms: None,
    })
}

fn ring_demo<F: Field>(
    spec: &TypeSpec,
    sigma: &Ordinal,
    tau: &Ordinal,
    witnesses: usize,
    reps: usize,
    seed: u64,
) -> Result<Vec<Check>> {
    let r1 = classify_gap::<F>(spec, RingFlavor::R1, sigma, tau, witnesses, seed)?;
    let mut checks = vec![Check::new("r1-witnesses", r1.pass, serde_json::to_value(&r1).unwrap())];
    checks.push(key_census_stability::<F>(spec, sigma, tau, reps, seed)?);
    Ok(checks)
}

/// The truncation-key census at two seeds: equal keys must give equal
/// truncations, and the number of distinct keys must not move.
pub fn key_census_stability<F: Field>(
    spec: &TypeSpec,
    sigma: &Ordinal,
    tau: &Ordinal,
    reps: usize,
    seed: u64,
) -> Result<Check> {
    let a = classify_gap::<F>(spec, RingFlavor::R2, sigma, tau, reps, seed)?;
    let b = classify_gap::<F>(spec, RingFlavor::R2, sigma, tau, reps, seed.wrapping_add(1))?;
    let stable = a.distinct_keys == b.distinct_keys;
    Ok(Check::new(
        "r2-key-census",
        a.pass && b.pass && stable,
        json!({ "runs": [a, b], "stableAcrossSeeds": stable }),
    ))
}

/// Random polynomial pairs over indices `{0, 1, w}` with rational
/// coefficients: valuation additivity, `q q^-1 = 1` below three cuts, and
/// the long-division remainder bound.
pub fn hahn_kernel(pairs: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let indices = [Ordinal::zero(), Ordinal::one(), Ordinal::omega()];
    let cuts = [gen(1), GroupElement::generator(Ordinal::omega()), GroupElement::scaled_generator(Ordinal::omega(), 2)];
    let rand_poly = |rng: &mut ChaCha8Rng| -> Poly<Q> {
        loop {
            let n = rng.gen_range(1..=5);
            let p = Poly::from_terms((0..n).map(|_| {
                let g = GroupElement::from_pairs(indices.iter().map(|i| (i.clone(), rng.gen_range(-2..=2))));
                let c = crate::field::rational(rng.gen_range(-5..=5), rng.gen_range(1..=3));
                (g, c)
            }));
            if !p.is_zero() {
                return p;
            }
        }
    };
    let mut failures = Vec::new();
    let mut prefix_terms = 0;
    for i in 0..pairs {
        let a = rand_poly(&mut rng);
        let b = rand_poly(&mut rng);
        let va = a.valuation().unwrap();
        let vb = b.valuation().unwrap();
        if a.mul(&b).valuation().unwrap() != &va + &vb {
            failures.push(format!("pair {i}: v({a} * {b}) is not additive"));
        }
        let q = Quotient::new(a.clone(), b.clone()).unwrap();
        let one = q.mul(&q.inv().unwrap());
        for cut in &cuts {
            if !truncation_equal(&one, &Quotient::one(), cut) {
                failures.push(format!("pair {i}: q q^-1 differs from 1 below {cut}"));
            }
        }
        let terms = expand_prefix(&q, 6);
        prefix_terms += terms.len();
        let prefix = Poly::from_terms(terms.iter().cloned());
        let rem = a.sub(&b.mul(&prefix));
        match (rem.valuation(), terms.last()) {
            (Err(_), _) => {}
            (Ok(v), Some((last, _))) if terms.len() == 6 => {
                if &(&v - &vb) <= last {
                    failures.push(format!("pair {i}: remainder {rem} does not pass exponent {last}"));
                }
            }
            _ => failures.push(format!("pair {i}: expansion stopped with remainder {rem}")),
        }
    }
    Check::new(
        "hahn-kernel",
        failures.is_empty(),
        json!({ "pairs": pairs, "cuts": cuts, "prefixTerms": prefix_terms, "failures": failures }),
    )
}

/// Every family `build_cauchy(zeta)` for `zeta` of length `len` satisfies
/// its congruences, and every pair is separated at the first disagreement.
pub fn cauchy_separation<F: Field>(spec: &TypeSpec, delta: &Ordinal, len: usize) -> Result<Check> {
    let ladder = Ladder::canonical(delta)?;
    let strings = binary_strings(len);
    let fams = strings.iter().map(|z| build_cauchy::<F>(z, &ladder, spec)).collect::<Result<Vec<_>>>()?;
    let mut failures = Vec::new();
    let mut pairs = 0;
    for (i, a) in fams.iter().enumerate() {
        for (s, t) in a.check_congruences(spec) {
            failures.push(format!("family {i}: levels {s} < {t} break the congruence"));
        }
        for (j, b) in fams.iter().enumerate().skip(i + 1) {
            pairs += 1;
            let m = strings[i].iter().zip(&strings[j]).position(|(x, y)| x != y).unwrap();
            let s = verify_separation(a, b, spec)?;
            if !s.separated || s.m != m {
                failures.push(format!("families {i}, {j}: {s:?}, expected m = {m}"));
            }
        }
    }
    Ok(Check::new(
        "cauchy-separation",
        failures.is_empty(),
        json!({ "delta": delta, "families": fams.len(), "pairs": pairs, "failures": failures }),
    ))
}

/// The fixed list of unit families for the limit-triviality check: shifted
/// Cauchy families at `w`, `w*2` and `w^2`, some times a unit, some with an
/// extra term of index `delta`.
pub fn gamma_families<F: Field>(spec: &TypeSpec, count: usize) -> Result<Vec<(Ordinal, String, LevelFamily<F>)>> {
    let deltas = [Ordinal::omega(), "w*2".parse()?, Ordinal::omega_pow(Ordinal::nat(2))];
    let mut out = Vec::new();
    for i in 0..count {
        let delta = &deltas[i % 3];
        let ladder = Ladder::canonical(delta)?;
        let code = (i * 7 + 3) % 16;
        let zeta: Vec<bool> = (0..4).map(|b| code >> b & 1 == 1).collect();
        let base = build_cauchy::<F>(&zeta, &ladder, spec)?.shifted_units();
        let (kind, fam): (&str, LevelFamily<F>) = match (i / 3) % 3 {
            0 => ("shifted", base),
            1 => {
                let c = Quotient::one().add(&Quotient::x(GroupElement::generator(delta.clone())));
                ("times-unit", base.into_iter().map(|(s, u)| (s, u.mul(&c))).collect())
            }
            _ => {
                let extra = Quotient::x(GroupElement::generator(delta.clone()));
                ("extra-term", base.into_iter().map(|(s, u)| (s, u.add(&extra))).collect())
            }
        };
        let z: String = zeta.iter().map(|b| if *b { '1' } else { '0' }).collect();
        out.push((delta.clone(), format!("{kind} {z}"), fam));
    }
    Ok(out)
}

pub fn gamma_prime_families<F: Field>(spec: &TypeSpec, count: usize, depth: usize) -> Result<Check> {
    let mut rows = Vec::new();
    let mut pass = true;
    for (delta, name, fam) in gamma_families::<F>(spec, count)? {
        let rep = verify_gamma_prime_zero(&delta, &fam, spec, depth)?;
        pass &= rep.certified();
        rows.push(json!({ "family": name, "certified": rep.certified(), "report": rep }));
    }
    Ok(Check::new("gamma-prime-families", pass, json!({ "depth": depth, "families": rows })))
}

fn gamma_check<F: Field>(spec: &TypeSpec, delta: &Ordinal, len: usize, depth: usize) -> Result<Vec<Check>> {
    if !delta.is_limit() {
        return Err(Error::Config(format!("{delta} is not a limit")));
    }
    let ladder = Ladder::canonical(delta)?;
    let levels = cauchy_levels(&ladder, len)?;
    if let Some(s) = levels.iter().find(|s| !spec.contains(s)) {
        return Err(Error::Config(format!("level {s} exceeds the level bound {}", spec.level_bound)));
    }
    let mut checks = vec![cauchy_separation::<F>(spec, delta, len)?];
    // With a stand-in top index the generators themselves reach past the
    // limit, so refutations are expected; only undecided levels fail.
    let shifted_top = spec.lambda.is_some();
    let mut rows = Vec::new();
    let mut pass = true;
    for z in binary_strings(len) {
        let fam = build_cauchy::<F>(&z, &ladder, spec)?.shifted_units();
        let rep = verify_gamma_prime_zero(delta, &fam, spec, depth)?;
        pass &= if shifted_top { !rep.inconclusive() } else { rep.certified() };
        rows.push(rep);
    }
    let name = if shifted_top { "gamma-prime-shifted-decided" } else { "gamma-prime-shifted-certified" };
    checks.push(Check::new(name, pass, json!({ "depth": depth, "reports": rows })));
    if spec.lambda.is_some() {
        let rep = verify_gamma_prime_zero(delta, &adversarial_family::<F>(spec, &levels)?, spec, depth)?;
        checks.push(Check::new("gamma-prime-adversarial-refuted", rep.refuted(), serde_json::to_value(&rep).unwrap()));
    }
    Ok(checks)
}

/// `($)`, branch increase and `(★)` on a fresh tree, then the same checks
/// after lowering one label, which must be caught.
pub fn special_tree(bound: &Ordinal, budget: usize, samples: usize, seed: u64) -> Result<Vec<Check>> {
    let mut tree = Tree::build_levels(bound.clone(), budget)?;
    let rep = tree.verify_special(samples, seed)?;
    let mut checks = vec![Check::new("special-tree", rep.pass, serde_json::to_value(&rep).unwrap())];
    let top = tree.levels().keys().filter(|l| !l.is_zero()).nth(2).cloned();
    let detail = match top {
        Some(level) => {
            let victim = tree.level(&level)[tree.level(&level).len() / 2];
            tree.set_label(victim, Q::from_integer((-1).into()));
            let bad = tree.verify_special(0, seed)?;
            let hit = bad.violations.iter().find(|v| v.upper.id == victim || v.lower.id == victim);
            json!({ "victim": victim, "level": level, "caught": hit.is_some(), "witness": hit })
        }
        None => json!({ "caught": true, "note": "fewer than three levels; nothing to corrupt" }),
    };
    let caught = detail["caught"].as_bool().unwrap();
    checks.push(Check::new("special-tree-corruption-caught", caught, detail));
    Ok(checks)
}

fn tree_build(bound: &Ordinal, budget: usize, samples: usize, check: bool, seed: u64) -> Result<(Vec<Check>, Value)> {
    let mut tree = Tree::build_levels(bound.clone(), budget)?;
    let nodes: Vec<_> = (0..tree.node_count()).map(|id| tree.view(id)).collect();
    let data = json!({ "nodeCount": nodes.len(), "nodes": nodes });
    let checks = if check {
        let rep = tree.verify_special(samples, seed)?;
        vec![Check::new("special-tree", rep.pass, serde_json::to_value(&rep).unwrap())]
    } else {
        Vec::new()
    };
    Ok((checks, data))
}

fn presentation_data<F: Field>(c: &Construction<F>) -> Value {
    let units: BTreeMap<String, String> =
        c.presentation.units().iter().map(|((s, t), e)| (format!("{s} -> {t}"), e.to_string())).collect();
    let labels: BTreeMap<String, Vec<Value>> = c
        .labels
        .levels()
        .map(|(s, v)| (s.to_string(), v.iter().map(|x| json!({ "rep": x.rep.to_string(), "label": x.label.to_string() })).collect()))
        .collect();
    let instances: Vec<Value> = c
        .instances
        .iter()
        .map(|r| {
            json!({
                "level": r.level, "stage": r.stage, "sigma": r.sigma, "n": r.n,
                "unit": r.unit.to_string(),
                "nodes": r.nodes.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                "products": r.products.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                "baseLabels": r.base_labels.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                "newLabels": r.new_labels.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({
        "levels": c.levels(),
        "units": units,
        "labels": labels,
        "instances": instances,
        "skippedInstances": c.skipped_instances,
        "bridges": c.bridges,
    })
}

fn random_candidate<F: Field>(levels: &[Ordinal], rng: &mut ChaCha8Rng) -> BTreeMap<Ordinal, Quotient<F>> {
    let k = F::order().map_or(1000, |p| (p - 1).min(1000)) as usize;
    levels
        .iter()
        .map(|l| {
            let c = Quotient::constant(F::nth_nonzero(rng.gen_range(0..k)).unwrap());
            let i = levels[rng.gen_range(0..levels.len())].clone();
            let tail = Quotient::constant(F::nth_nonzero(rng.gen_range(0..k)).unwrap())
                .mul(&Quotient::x(GroupElement::generator(i)));
            (l.clone(), c.mul(&Quotient::one().add(&tail)))
        })
        .collect()
}

/// Checks of a finished construction: the presentation, the recorded
/// label-slack witnesses, the limit bridges, standardness refutations of
/// `candidates` random families, acceptance of the transported chain, and
/// for sector builds the sector post-check and branch labels.
pub fn construction_checks<F: Field>(c: &mut Construction<F>, candidates: usize, seed: u64) -> Result<Vec<Check>> {
    let rep = uniserial::verify_presentation(&c.presentation, &c.labels)?;
    let mut checks = vec![Check::new("presentation", rep.pass(), serde_json::to_value(&rep).unwrap())];
    let bad = c.instance_violations();
    checks.push(Check::new(
        "label-slack-witnesses",
        bad.is_empty(),
        json!({ "instances": c.instances.len(), "skipped": c.skipped_instances, "failures": bad }),
    ));
    checks.push(Check::new(
        "limit-bridges",
        c.bridge_failures() == 0,
        json!({ "steps": c.bridges.len(), "failures": c.bridge_failures() }),
    ));
    let levels = c.levels().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut witnesses = Vec::new();
    let mut refuted = 0;
    for _ in 0..candidates {
        let cand = random_candidate::<F>(&levels, &mut rng);
        let (holds, w) = uniserial::check_standardness_candidate(&c.presentation, &cand, &levels)?;
        if !holds {
            refuted += 1;
        }
        witnesses.push(w.map(|(s, t)| json!([s, t])).unwrap_or(Value::Null));
    }
    checks.push(Check::new(
        "standardness-refutes-random",
        refuted == candidates,
        json!({ "candidates": candidates, "refuted": refuted, "witnesses": witnesses }),
    ));
    let start = c.sector().cloned().unwrap_or_else(Quotient::one);
    let chain = uniserial::forward_transport(&c.presentation, &start, &levels)?;
    let (holds, w) = uniserial::check_standardness_candidate(&c.presentation, &chain, &levels)?;
    checks.push(Check::new("standardness-accepts-transport", holds, json!({ "start": start.to_string(), "witness": w })));
    if c.sector().is_some() {
        let labels = c.branch_labels(&chain)?;
        let increasing = labels.windows(2).all(|w| w[0] < w[1]);
        let outside = c.sector_violations()?;
        checks.push(Check::new(
            "sector-only",
            outside.is_empty(),
            json!({
                "labeled": c.labels.len(),
                "outside": outside.iter().map(|(s, x)| json!([s, x.to_string()])).collect::<Vec<_>>(),
            }),
        ));
        checks.push(Check::new(
            "sector-branch-increasing",
            increasing,
            json!({ "labels": labels.iter().map(|l| l.to_string()).collect::<Vec<_>>() }),
        ));
    }
    Ok(checks)
}

#[allow(clippy::too_many_arguments)]
fn uniserial_run<F: Field>(
    spec: &TypeSpec,
    bound: &Ordinal,
    budget: usize,
    span: usize,
    sector: Option<Quotient<F>>,
    candidates: usize,
    check: bool,
    seed: u64,
) -> Result<(Vec<Check>, Value)> {
    let mut c = match sector {
        Some(z0) => uniserial::build_general_case(spec, z0, bound, budget)?,
        None => uniserial::build_with_span(spec, bound, budget, span)?,
    };
    let checks = if check { construction_checks(&mut c, candidates, seed)? } else { Vec::new() };
    Ok((checks, presentation_data(&c)))
}

/// The full invariant suite at desk scale.
pub fn invariants<F: Field>(spec: &TypeSpec, seed: u64) -> Result<Vec<Check>> {
    let w = Ordinal::omega();
    let w2: Ordinal = "w*2".parse()?;
    let default_spec = TypeSpec::new(Ordinal::omega_pow(Ordinal::nat(2)));
    let spec = if spec.contains(&w2) { spec } else { &default_spec };
    let mut checks = vec![hahn_kernel(500, seed)];
    let r1 = classify_gap::<F>(spec, RingFlavor::R1, &Ordinal::zero(), &Ordinal::one(), 8, seed)?;
    checks.push(Check::new("r1-witnesses", r1.pass, serde_json::to_value(&r1).unwrap()));
    checks.push(key_census_stability::<F>(spec, &Ordinal::zero(), &w, 10, seed)?);
    checks.push(cauchy_separation::<F>(spec, &w, 6)?);
    checks.push(gamma_prime_families::<F>(spec, 20, DEFAULT_DEPTH)?);
    checks.extend(special_tree(&"w*2+5".parse()?, 20, 100, seed)?);
    let mut c = uniserial::build::<F>(spec, &w2, 15)?;
    checks.extend(construction_checks(&mut c, 50, seed)?.into_iter().map(|mut k| {
        k.name = format!("uniserial/{}", k.name);
        k
    }));
    let mut g = uniserial::build_general_case::<F>(spec, Quotient::one(), &w2, 8)?;
    checks.extend(construction_checks(&mut g, 10, seed)?.into_iter().map(|mut k| {
        k.name = format!("uniserial-sector/{}", k.name);
        k
    }));
    Ok(checks)
}
