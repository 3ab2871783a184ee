//! An explicitly non-standard uniserial presentation over a finite level
//! schedule: the unit family `e(sigma, tau)` satisfying the cocycle
//! congruence, partial rational labels on the coset trees `(R/r_sigma R)*`,
//! and the checkers for both, including the standardness criterion.
//!
//! Levels are processed in increasing order. Successor levels copy the units
//! of their predecessor; a limit level climbs its ladder with units
//! `e_0 = 1, e_1, ...`, each chosen so that the labels already placed at the
//! limit stay above the labels of their predecessors. Labels are partial but
//! predecessor-closed: a labeled class has labeled predecessors at every
//! lower level.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{rational, Field, Q};
use crate::ordinal::Ordinal;
use crate::schedule::{cantor_unpair, level_schedule};
use crate::series::{Poly, Quotient};
use crate::valuation::{is_unit, TypeSpec};

pub const DEFAULT_SPAN: usize = 4;

const SEARCH_CAP: usize = 100_000;

/// The unit family `e(sigma, tau)` for scheduled `sigma < tau`.
#[derive(Clone, Debug)]
pub struct Presentation<F: Field> {
    spec: TypeSpec,
    levels: Vec<Ordinal>,
    units: BTreeMap<(Ordinal, Ordinal), Quotient<F>>,
}

impl<F: Field> Presentation<F> {
    pub fn new(spec: TypeSpec, levels: Vec<Ordinal>) -> Self {
        Presentation { spec, levels, units: BTreeMap::new() }
    }

    pub fn spec(&self) -> &TypeSpec {
        &self.spec
    }

    pub fn levels(&self) -> &[Ordinal] {
        &self.levels
    }

    pub fn units(&self) -> &BTreeMap<(Ordinal, Ordinal), Quotient<F>> {
        &self.units
    }

    pub fn unit(&self, lower: &Ordinal, upper: &Ordinal) -> Result<Quotient<F>> {
        if lower == upper {
            return Ok(Quotient::one());
        }
        self.units
            .get(&(lower.clone(), upper.clone()))
            .cloned()
            .ok_or_else(|| Error::Precondition(format!("no unit from {lower} to {upper}")))
    }

    pub fn set_unit(&mut self, lower: Ordinal, upper: Ordinal, u: Quotient<F>) {
        self.units.insert((lower, upper), u);
    }

    /// The predecessor of the class `x` at level `upper` in the tree at
    /// level `lower`: `x e(lower, upper)^-1 mod r_lower`.
    pub fn predecessor(&self, x: &Quotient<F>, upper: &Ordinal, lower: &Ordinal) -> Result<Quotient<F>> {
        let e = self.unit(lower, upper)?;
        Ok(x.mul(&e.inv()?).reduce_mod(&self.spec.r_valuation(lower)))
    }
}

#[derive(Clone, Debug)]
pub struct LabeledClass<F: Field> {
    pub rep: Quotient<F>,
    pub label: Q,
}

/// Partial maps from classes mod `r_sigma` to rationals. Classes are
/// identified by congruence, never by representative.
#[derive(Clone, Debug)]
pub struct SpecialLabels<F: Field> {
    levels: BTreeMap<Ordinal, Vec<LabeledClass<F>>>,
}

impl<F: Field> Default for SpecialLabels<F> {
    fn default() -> Self {
        SpecialLabels { levels: BTreeMap::new() }
    }
}

impl<F: Field> SpecialLabels<F> {
    pub fn level(&self, sigma: &Ordinal) -> &[LabeledClass<F>] {
        self.levels.get(sigma).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn levels(&self) -> impl Iterator<Item = (&Ordinal, &Vec<LabeledClass<F>>)> {
        self.levels.iter()
    }

    pub fn len(&self) -> usize {
        self.levels.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn find(&self, spec: &TypeSpec, sigma: &Ordinal, x: &Quotient<F>) -> Option<usize> {
        self.level(sigma).iter().position(|c| spec.congruent(&c.rep, x, sigma))
    }

    pub fn get(&self, spec: &TypeSpec, sigma: &Ordinal, x: &Quotient<F>) -> Option<&Q> {
        self.find(spec, sigma, x).map(|i| &self.level(sigma)[i].label)
    }

    pub fn insert(&mut self, sigma: &Ordinal, rep: Quotient<F>, label: Q) -> usize {
        let v = self.levels.entry(sigma.clone()).or_default();
        v.push(LabeledClass { rep, label });
        v.len() - 1
    }

    /// Overwrites a label; used to exercise the checker.
    pub fn set_label(&mut self, sigma: &Ordinal, index: usize, label: Q) {
        if let Some(v) = self.levels.get_mut(sigma) {
            v[index].label = label;
        }
    }
}

/// A discharged instance of the label-slack condition at `level`: the unit
/// `u ≡ 1 (mod r_sigma)` and the labels given to the products `u c_j`.
#[derive(Clone, Debug)]
pub struct InstanceRecord<F: Field> {
    pub level: Ordinal,
    pub stage: usize,
    pub sigma: Ordinal,
    pub n: u64,
    pub unit: Quotient<F>,
    pub nodes: Vec<Quotient<F>>,
    pub products: Vec<Quotient<F>>,
    pub base_labels: Vec<Q>,
    pub new_labels: Vec<Q>,
}

/// The bridge check after a ladder step at a limit level: every labeled
/// class at the limit sits above its predecessor at `ladder[k]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BridgeRecord {
    pub level: Ordinal,
    pub k: usize,
    pub checked: usize,
    pub failures: usize,
}

/// The state and output of a build.
#[derive(Clone, Debug)]
pub struct Construction<F: Field> {
    pub presentation: Presentation<F>,
    pub labels: SpecialLabels<F>,
    pub instances: Vec<InstanceRecord<F>>,
    pub bridges: Vec<BridgeRecord>,
    pub skipped_instances: usize,
    sector: Option<Quotient<F>>,
    budget: usize,
    span: usize,
    ladders: BTreeMap<Ordinal, Vec<Ordinal>>,
    current: Option<Ordinal>,
    ladder_units: Vec<Quotient<F>>,
}

/// Builds the presentation and labels on every scheduled level up to and
/// including `bound`, with limit ladders cut to [`DEFAULT_SPAN`] entries.
pub fn build<F: Field>(spec: &TypeSpec, bound: &Ordinal, budget: usize) -> Result<Construction<F>> {
    build_with_span(spec, bound, budget, DEFAULT_SPAN)
}

pub fn build_with_span<F: Field>(
    spec: &TypeSpec,
    bound: &Ordinal,
    budget: usize,
    span: usize,
) -> Result<Construction<F>> {
    let mut c = Construction::new(spec, bound, budget, span, None)?;
    c.run()?;
    Ok(c)
}

/// The build restricted to the sector of classes `c ≡ z0 e(0, sigma)
/// (mod r_0)`; level 0 carries only `z0`.
pub fn build_general_case<F: Field>(
    spec: &TypeSpec,
    z0: Quotient<F>,
    bound: &Ordinal,
    budget: usize,
) -> Result<Construction<F>> {
    if !is_unit(&z0) {
        return Err(Error::Precondition(format!("{z0} is not a unit")));
    }
    let mut c = Construction::new(spec, bound, budget, DEFAULT_SPAN, Some(z0))?;
    c.run()?;
    Ok(c)
}

/// `(n, sigma position, node positions)` of the `i`-th instance; `sigma`
/// positions count down from the level just below.
fn decode_instance(i: u64) -> (u64, usize, Vec<usize>) {
    let (a, b) = cantor_unpair(i);
    let (s, c) = cantor_unpair(b);
    let (j1, j2) = cantor_unpair(c);
    let nodes = if j1 == j2 { vec![j1 as usize] } else { vec![j1.min(j2) as usize, j1.max(j2) as usize] };
    (a + 1, s as usize, nodes)
}

impl<F: Field> Construction<F> {
    fn new(spec: &TypeSpec, bound: &Ordinal, budget: usize, span: usize, sector: Option<Quotient<F>>) -> Result<Self> {
        if budget == 0 {
            return Err(Error::Config("budget must be at least 1".into()));
        }
        if span < 2 {
            return Err(Error::Config("ladder span must be at least 2".into()));
        }
        if !spec.contains(bound) {
            return Err(Error::Config(format!("bound {bound} exceeds the level bound {}", spec.level_bound)));
        }
        let levels: Vec<Ordinal> = level_schedule(bound, span)?.into_iter().collect();
        let mut ladders = BTreeMap::new();
        for d in levels.iter().filter(|d| d.is_limit()) {
            let ladder: Vec<Ordinal> = (0..span).map(|n| d.ladder_element(n)).collect::<Result<_>>()?;
            let top_below = levels.iter().filter(|s| *s < d).max().unwrap();
            if top_below > ladder.last().unwrap() {
                return Err(Error::Config(format!(
                    "level {top_below} lies above the ladder prefix of {d}; raise the span"
                )));
            }
            ladders.insert(d.clone(), ladder);
        }
        Ok(Construction {
            presentation: Presentation::new(spec.clone(), levels),
            labels: SpecialLabels::default(),
            instances: Vec::new(),
            bridges: Vec::new(),
            skipped_instances: 0,
            sector,
            budget,
            span,
            ladders,
            current: None,
            ladder_units: Vec::new(),
        })
    }

    pub fn spec(&self) -> &TypeSpec {
        &self.presentation.spec
    }

    pub fn levels(&self) -> &[Ordinal] {
        &self.presentation.levels
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn span(&self) -> usize {
        self.span
    }

    pub fn sector(&self) -> Option<&Quotient<F>> {
        self.sector.as_ref()
    }

    pub fn ladder(&self, delta: &Ordinal) -> Option<&[Ordinal]> {
        self.ladders.get(delta).map(Vec::as_slice)
    }

    fn levels_below(&self, rho: &Ordinal) -> Vec<Ordinal> {
        self.levels().iter().filter(|s| *s < rho).cloned().collect()
    }

    /// The top level below `rho` through which labels are compared.
    fn prev_level(&self, rho: &Ordinal) -> Ordinal {
        if self.current.as_ref() == Some(rho) && rho.is_limit() {
            return self.ladders[rho][self.ladder_units.len() - 1].clone();
        }
        self.levels_below(rho).pop().expect("level 0 has no predecessor")
    }

    fn reduce(&self, x: &Quotient<F>, rho: &Ordinal) -> Quotient<F> {
        x.reduce_mod(&self.spec().r_valuation(rho))
    }

    /// `e(sigma, rho)`, including a limit level still under construction.
    pub fn unit(&self, sigma: &Ordinal, rho: &Ordinal) -> Result<Quotient<F>> {
        if sigma == rho {
            return Ok(Quotient::one());
        }
        if self.current.as_ref() == Some(rho) && rho.is_limit() {
            let ladder = &self.ladders[rho];
            let j = ladder.iter().position(|nu| nu >= sigma).expect("checked at construction");
            let e = self.ladder_units.get(j).ok_or_else(|| {
                Error::Invariant(format!("unit from {sigma} to {rho} is not fixed yet"))
            })?;
            return Ok(self.reduce(&e.mul(&self.unit(sigma, &ladder[j])?), sigma));
        }
        self.presentation.unit(sigma, rho)
    }

    pub fn predecessor(&self, x: &Quotient<F>, rho: &Ordinal, sigma: &Ordinal) -> Result<Quotient<F>> {
        let e = self.unit(sigma, rho)?;
        Ok(self.reduce(&x.mul(&e.inv()?), sigma))
    }

    pub fn label_of(&self, rho: &Ordinal, x: &Quotient<F>) -> Option<Q> {
        self.labels.get(self.spec(), rho, x).cloned()
    }

    fn stage_slack(stage: usize) -> Q {
        rational(1, 2 * (stage as i64 + 1))
    }

    /// The label of `x` at `rho`, labeling it (and, first, its predecessor)
    /// if needed.
    pub fn ensure_label(&mut self, rho: &Ordinal, x: &Quotient<F>, stage: usize) -> Result<Q> {
        if let Some(l) = self.label_of(rho, x) {
            return Ok(l);
        }
        let x = self.reduce(x, rho);
        let label = if rho.is_zero() {
            if self.sector.is_some() {
                return Err(Error::Invariant(format!("class {x} at level 0 is outside the sector")));
            }
            let top = self.labels.level(rho).iter().map(|c| c.label.clone()).max().unwrap_or_else(|| Q::from_integer((-1).into()));
            top.floor() + Q::from_integer(1.into())
        } else {
            let tau = self.prev_level(rho);
            let p = self.predecessor(&x, rho, &tau)?;
            self.ensure_label(&tau, &p, stage)? + Self::stage_slack(stage)
        };
        self.labels.insert(rho, x, label.clone());
        Ok(label)
    }

    /// A unit `u ≡ 1 (mod r_sigma)` with
    /// `f_rho(u c_rho) < f_sigma(c_sigma) + eps` for every pair, where each
    /// `c_sigma` is the labeled predecessor of `c_rho`. The products are
    /// labeled here when they are not labeled yet.
    pub fn star2_witness(
        &mut self,
        sigma: &Ordinal,
        rho: &Ordinal,
        eps: &Q,
        pairs: &[(Quotient<F>, Quotient<F>)],
    ) -> Result<Quotient<F>> {
        if sigma >= rho {
            return Err(Error::Precondition(format!("need {sigma} < {rho}")));
        }
        if pairs.is_empty() {
            return Ok(Quotient::one());
        }
        let mut uniq: Vec<(Quotient<F>, Quotient<F>)> = Vec::new();
        for (cs, cr) in pairs {
            if !uniq.iter().any(|(_, r)| self.spec().congruent(r, cr, rho)) {
                uniq.push((self.reduce(cs, sigma), self.reduce(cr, rho)));
            }
        }
        let tau = self.prev_level(rho);
        if &tau == sigma {
            let base: Vec<Q> = uniq
                .iter()
                .map(|(cs, _)| {
                    self.label_of(sigma, cs)
                        .ok_or_else(|| Error::Invariant(format!("pair base {cs} at {sigma} is unlabeled")))
                })
                .collect::<Result<_>>()?;
            for (cs, cr) in &uniq {
                if !self.spec().congruent(&self.predecessor(cr, rho, sigma)?, cs, sigma) {
                    return Err(Error::Invariant(format!("{cs} is not the predecessor of {cr}")));
                }
            }
            let half = eps / Q::from_integer(2.into());
            for n in 0..SEARCH_CAP {
                let u = self.spec().w_unit::<F>(sigma, n);
                let products: Vec<Quotient<F>> = uniq.iter().map(|(_, cr)| self.reduce(&u.mul(cr), rho)).collect();
                if products.iter().all(|p| self.label_of(rho, p).is_none()) {
                    for (p, b) in products.into_iter().zip(&base) {
                        self.labels.insert(rho, p, b.clone() + half.clone());
                    }
                    return Ok(u);
                }
            }
            return Err(Error::Budget(format!("no fresh unit in the first {SEARCH_CAP} of W at {sigma}")));
        }
        let half = eps / Q::from_integer(2.into());
        let lower: Vec<(Quotient<F>, Quotient<F>)> = uniq
            .iter()
            .map(|(cs, cr)| Ok((cs.clone(), self.predecessor(cr, rho, &tau)?)))
            .collect::<Result<_>>()?;
        let w = self.star2_witness(sigma, &tau, &half, &lower)?;
        let upper: Vec<(Quotient<F>, Quotient<F>)> = lower
            .iter()
            .zip(&uniq)
            .map(|((_, ct), (_, cr))| (self.reduce(&w.mul(ct), &tau), self.reduce(&w.mul(cr), rho)))
            .collect();
        let v = self.star2_witness(&tau, rho, &half, &upper)?;
        Ok(self.reduce(&v.mul(&w), rho))
    }

    /// The `n`-th candidate of the enumeration of `(R/r_delta R)*` (or of
    /// the sector): a constant times `1 + c X^(m a(i))` for a scheduled
    /// `i < delta`, cycling through the generators fastest.
    fn candidate(&self, delta: &Ordinal, n: u64) -> Result<Quotient<F>> {
        let gens = self.levels_below(delta);
        // A field element and the remaining index; over a finite field the
        // element is the residue, so nothing is wasted on repeats.
        let split = |k: u64| -> (F, u64) {
            let (c, rest) = match F::order() {
                Some(p) => (k % (p - 1), k / (p - 1)),
                None => cantor_unpair(k),
            };
            (F::nth_nonzero(c as usize).expect("nonzero element"), rest)
        };
        let (head, t) = match &self.sector {
            Some(z0) => (z0.mul(&self.unit(&Ordinal::zero(), delta)?), n),
            None => {
                let (c, t) = split(n);
                (Quotient::constant(c), t)
            }
        };
        if t == 0 || gens.is_empty() {
            return Ok(self.reduce(&head, delta));
        }
        let i = &gens[((t - 1) % gens.len() as u64) as usize];
        let (c2, m) = split((t - 1) / gens.len() as u64);
        let tail = Poly::monomial(crate::group::GroupElement::scaled_generator(i.clone(), m as i64 + 1), c2);
        Ok(self.reduce(&head.mul(&Quotient::from_poly(Poly::one().add(&tail))), delta))
    }

    fn seed_base_level(&mut self) {
        let zero = Ordinal::zero();
        match self.sector.clone() {
            Some(z0) => {
                let z = self.reduce(&z0, &zero);
                self.labels.insert(&zero, z, Q::zero());
            }
            None => {
                let count = match F::order() {
                    Some(p) => self.budget.min(p as usize - 1),
                    None => self.budget,
                };
                for n in 0..count {
                    let c = Quotient::constant(F::nth_nonzero(n).unwrap());
                    self.labels.insert(&zero, c, Q::from_integer((n as i64).into()));
                }
            }
        }
    }

    fn run(&mut self) -> Result<()> {
        self.seed_base_level();
        let levels: Vec<Ordinal> = self.levels().to_vec();
        for delta in levels.into_iter().skip(1) {
            self.build_level(&delta)?;
        }
        Ok(())
    }

    fn build_level(&mut self, delta: &Ordinal) -> Result<()> {
        self.current = Some(delta.clone());
        let limit = delta.is_limit();
        if limit {
            self.ladder_units = vec![Quotient::one()];
        } else {
            let tau = delta.predecessor().unwrap();
            for s in self.levels_below(&tau) {
                let e = self.presentation.unit(&s, &tau)?;
                self.presentation.set_unit(s, delta.clone(), e);
            }
            self.presentation.set_unit(tau, delta.clone(), Quotient::one());
        }
        let mut next_candidate = 0u64;
        for stage in 0..2 * self.budget {
            if stage % 2 == 0 {
                self.even_stage(delta, stage, &mut next_candidate)?;
            } else {
                self.odd_stage(delta, stage)?;
            }
            if limit && self.ladder_units.len() < self.span {
                self.ladder_step(delta)?;
            }
        }
        if limit {
            while self.ladder_units.len() < self.span {
                self.ladder_step(delta)?;
            }
            for s in self.levels_below(delta) {
                let e = self.unit(&s, delta)?;
                self.presentation.set_unit(s, delta.clone(), e);
            }
        }
        self.current = None;
        self.ladder_units.clear();
        Ok(())
    }

    fn even_stage(&mut self, delta: &Ordinal, stage: usize, next: &mut u64) -> Result<()> {
        for _ in 0..SEARCH_CAP {
            let u = self.candidate(delta, *next)?;
            *next += 1;
            if self.label_of(delta, &u).is_none() {
                self.ensure_label(delta, &u, stage)?;
                return Ok(());
            }
        }
        Err(Error::Budget(format!("enumeration at {delta} found no new class")))
    }

    fn odd_stage(&mut self, delta: &Ordinal, stage: usize) -> Result<()> {
        let (instance, _rep) = cantor_unpair((stage / 2) as u64);
        let (n, sigma_pos, positions) = decode_instance(instance);
        let mut below = self.levels_below(delta);
        below.reverse();
        let domain: Vec<Quotient<F>> = self.labels.level(delta).iter().map(|c| c.rep.clone()).collect();
        let top = self.prev_level(delta);
        let sigma = match below.get(sigma_pos) {
            Some(s) if (limit_ok(delta, s, &top)) => s.clone(),
            _ => {
                self.skipped_instances += 1;
                return Ok(());
            }
        };
        if positions.iter().any(|&j| j >= domain.len()) {
            self.skipped_instances += 1;
            return Ok(());
        }
        let nodes: Vec<Quotient<F>> = positions.iter().map(|&j| domain[j].clone()).collect();
        let eps = rational(1, n as i64);
        let bases: Vec<Quotient<F>> =
            nodes.iter().map(|c| self.predecessor(c, delta, &sigma)).collect::<Result<_>>()?;
        let base_labels: Vec<Q> = bases
            .iter()
            .map(|b| self.label_of(&sigma, b).ok_or_else(|| Error::Invariant(format!("{b} at {sigma} is unlabeled"))))
            .collect::<Result<_>>()?;
        let u = if sigma == top {
            let pairs: Vec<_> = bases.iter().cloned().zip(nodes.iter().cloned()).collect();
            self.star2_witness(&sigma, delta, &eps, &pairs)?
        } else {
            let tops: Vec<Quotient<F>> =
                nodes.iter().map(|c| self.predecessor(c, delta, &top)).collect::<Result<_>>()?;
            let pairs: Vec<_> = bases.iter().cloned().zip(tops).collect();
            let u = self.star2_witness(&sigma, &top, &(eps.clone() / Q::from_integer(2.into())), &pairs)?;
            let mut seen: Vec<Quotient<F>> = Vec::new();
            for (c, b) in nodes.iter().zip(&base_labels) {
                let p = self.reduce(&u.mul(c), delta);
                if seen.iter().any(|s| self.spec().congruent(s, &p, delta)) {
                    continue;
                }
                if self.label_of(delta, &p).is_some() {
                    return Err(Error::Invariant(format!("product {p} at {delta} is not fresh")));
                }
                self.labels.insert(delta, p.clone(), b.clone() + rational(1, 2 * n as i64));
                seen.push(p);
            }
            u
        };
        let products: Vec<Quotient<F>> = nodes.iter().map(|c| self.reduce(&u.mul(c), delta)).collect();
        let new_labels: Vec<Q> = products
            .iter()
            .map(|p| self.label_of(delta, p).ok_or_else(|| Error::Invariant(format!("{p} was not labeled"))))
            .collect::<Result<_>>()?;
        self.instances.push(InstanceRecord {
            level: delta.clone(),
            stage,
            sigma,
            n,
            unit: u,
            nodes,
            products,
            base_labels,
            new_labels,
        });
        Ok(())
    }

    fn ladder_step(&mut self, delta: &Ordinal) -> Result<()> {
        let k = self.ladder_units.len() - 1;
        let nu_k = self.ladders[delta][k].clone();
        let nu_next = self.ladders[delta][k + 1].clone();
        let e_k = self.ladder_units[k].clone();
        let e_prime = self.reduce(&e_k.mul(&self.unit(&nu_k, &nu_next)?.inv()?), &nu_next);
        let e_prime_inv = e_prime.inv()?;
        let domain: Vec<LabeledClass<F>> = self.labels.level(delta).to_vec();
        let mut pairs = Vec::new();
        let mut slack: Option<Q> = None;
        for x in &domain {
            let below = self.predecessor(&x.rep, delta, &nu_k)?;
            let lb = self
                .label_of(&nu_k, &below)
                .ok_or_else(|| Error::Invariant(format!("{below} at {nu_k} is unlabeled")))?;
            let gap = x.label.clone() - lb;
            if !gap.is_positive_q() {
                return Err(Error::Invariant(format!("label of {} at {delta} does not exceed its predecessor", x.rep)));
            }
            slack = Some(match slack {
                Some(s) if s <= gap => s,
                _ => gap,
            });
            pairs.push((below, self.reduce(&x.rep.mul(&e_prime_inv), &nu_next)));
        }
        let eps = slack.map(|s| s / Q::from_integer(2.into())).unwrap_or_else(|| Q::from_integer(1.into()));
        let v = self.star2_witness(&nu_k, &nu_next, &eps, &pairs)?;
        let e_next = self.reduce(&v.inv()?.mul(&e_prime), &nu_next);
        self.ladder_units.push(e_next);
        let mut failures = 0;
        for x in &domain {
            let p = self.predecessor(&x.rep, delta, &nu_next)?;
            match self.label_of(&nu_next, &p) {
                Some(l) if l < x.label => {}
                _ => failures += 1,
            }
        }
        self.bridges.push(BridgeRecord { level: delta.clone(), k: k + 1, checked: domain.len(), failures });
        Ok(())
    }

    /// Instance records whose unit is not `≡ 1 (mod r_sigma)` or whose new
    /// labels break the `+1/(2n)` bound.
    pub fn instance_violations(&self) -> Vec<String> {
        let mut bad = Vec::new();
        for (i, r) in self.instances.iter().enumerate() {
            if !self.spec().congruent(&r.unit, &Quotient::one(), &r.sigma) {
                bad.push(format!("instance {i}: unit {} is not 1 mod r_{}", r.unit, r.sigma));
            }
            let bound = rational(1, 2 * r.n as i64);
            for ((b, l), p) in r.base_labels.iter().zip(&r.new_labels).zip(&r.products) {
                if l > &(b.clone() + bound.clone()) || l <= b {
                    bad.push(format!("instance {i}: label {l} of {p} is outside ({b}, {b} + {bound}]"));
                }
                if self.label_of(&r.level, p).as_ref() != Some(l) {
                    bad.push(format!("instance {i}: label of {p} changed"));
                }
            }
        }
        bad
    }

    /// Labeled classes outside the sector `z0 e(0, sigma) (mod r_0)`.
    pub fn sector_violations(&self) -> Result<Vec<(Ordinal, Quotient<F>)>> {
        let Some(z0) = &self.sector else { return Ok(Vec::new()) };
        let zero = Ordinal::zero();
        let mut bad = Vec::new();
        for (sigma, classes) in self.labels.levels() {
            let target = z0.mul(&self.presentation.unit(&zero, sigma)?);
            for c in classes {
                if !self.spec().congruent(&c.rep, &target, &zero) {
                    bad.push((sigma.clone(), c.rep.clone()));
                }
            }
        }
        Ok(bad)
    }

    pub fn bridge_failures(&self) -> usize {
        self.bridges.iter().map(|b| b.failures).sum()
    }

    /// Labels along a family of classes, one per listed level, labeling
    /// where needed.
    pub fn branch_labels(&mut self, family: &BTreeMap<Ordinal, Quotient<F>>) -> Result<Vec<Q>> {
        let stage = 2 * self.budget;
        family.iter().map(|(s, c)| self.ensure_label(s, c, stage)).collect()
    }
}

fn limit_ok(delta: &Ordinal, sigma: &Ordinal, top: &Ordinal) -> bool {
    if delta.is_limit() {
        sigma <= top
    } else {
        sigma == top
    }
}

trait PositiveQ {
    fn is_positive_q(&self) -> bool;
}

impl PositiveQ for Q {
    fn is_positive_q(&self) -> bool {
        self > &Q::zero()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PresentationViolation {
    Cocycle { sigma: Ordinal, tau: Ordinal, delta: Ordinal },
    Edge { lower: Ordinal, upper: Ordinal, class: String, lower_label: String, upper_label: String },
    UnlabeledPredecessor { lower: Ordinal, upper: Ordinal, class: String },
    Successor { lower: Ordinal, upper: Ordinal, class: String },
}

#[derive(Clone, Debug, Default, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PresentationReport {
    pub triples_checked: usize,
    pub edges_checked: usize,
    pub branches_checked: usize,
    pub successors_checked: usize,
    pub violations: Vec<PresentationViolation>,
}

impl PresentationReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Exact check of the cocycle congruence on all scheduled triples, of label
/// monotonicity on every edge from a labeled class down to each lower
/// level, and of successor existence.
pub fn verify_presentation<F: Field>(p: &Presentation<F>, labels: &SpecialLabels<F>) -> Result<PresentationReport> {
    let spec = p.spec();
    let levels = p.levels();
    let mut rep = PresentationReport::default();
    for (i, s) in levels.iter().enumerate() {
        for (j, t) in levels.iter().enumerate().skip(i + 1) {
            let ets = p.unit(s, t)?;
            for d in &levels[j + 1..] {
                rep.triples_checked += 1;
                let lhs = p.unit(t, d)?.mul(&ets);
                if !spec.congruent(&lhs, &p.unit(s, d)?, s) {
                    rep.violations.push(PresentationViolation::Cocycle {
                        sigma: s.clone(),
                        tau: t.clone(),
                        delta: d.clone(),
                    });
                }
            }
        }
    }
    for (rho, classes) in labels.levels() {
        for c in classes {
            rep.branches_checked += 1;
            for s in levels.iter().filter(|s| *s < rho) {
                rep.edges_checked += 1;
                let pred = p.predecessor(&c.rep, rho, s)?;
                match labels.get(spec, s, &pred) {
                    None => rep.violations.push(PresentationViolation::UnlabeledPredecessor {
                        lower: s.clone(),
                        upper: rho.clone(),
                        class: c.rep.to_string(),
                    }),
                    Some(l) if l >= &c.label => rep.violations.push(PresentationViolation::Edge {
                        lower: s.clone(),
                        upper: rho.clone(),
                        class: c.rep.to_string(),
                        lower_label: l.to_string(),
                        upper_label: c.label.to_string(),
                    }),
                    Some(_) => {}
                }
            }
            for t in levels.iter().filter(|t| *t > rho) {
                rep.successors_checked += 1;
                let succ = c.rep.mul(&p.unit(rho, t)?);
                if !spec.congruent(&p.predecessor(&succ, t, rho)?, &c.rep, rho) {
                    rep.violations.push(PresentationViolation::Successor {
                        lower: rho.clone(),
                        upper: t.clone(),
                        class: c.rep.to_string(),
                    });
                }
            }
        }
    }
    Ok(rep)
}

/// Whether `c_tau ≡ e(sigma, tau) c_sigma (mod r_sigma)` for all listed
/// `sigma < tau`; on failure, the first violating pair.
pub fn check_standardness_candidate<F: Field>(
    p: &Presentation<F>,
    c: &BTreeMap<Ordinal, Quotient<F>>,
    levels: &[Ordinal],
) -> Result<(bool, Option<(Ordinal, Ordinal)>)> {
    for (i, s) in levels.iter().enumerate() {
        let cs = c.get(s).ok_or_else(|| Error::Precondition(format!("candidate undefined at {s}")))?;
        for t in &levels[i + 1..] {
            let ct = c.get(t).ok_or_else(|| Error::Precondition(format!("candidate undefined at {t}")))?;
            if !p.spec().congruent(ct, &p.unit(s, t)?.mul(cs), s) {
                return Ok((false, Some((s.clone(), t.clone()))));
            }
        }
    }
    Ok((true, None))
}

/// `c_(l_0) = start`, `c_(l_(i+1)) = c_(l_i) e(l_i, l_(i+1))` along the
/// listed levels.
pub fn forward_transport<F: Field>(
    p: &Presentation<F>,
    start: &Quotient<F>,
    levels: &[Ordinal],
) -> Result<BTreeMap<Ordinal, Quotient<F>>> {
    let mut out = BTreeMap::new();
    let mut cur = start.clone();
    for (i, l) in levels.iter().enumerate() {
        if i > 0 {
            cur = cur.mul(&p.unit(&levels[i - 1], l)?).reduce_mod(&p.spec().r_valuation(l));
        }
        out.insert(l.clone(), cur.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{int, Q};
    use crate::group::gen;

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    fn spec() -> TypeSpec {
        TypeSpec::new(o("w^2"))
    }

    #[test]
    fn trivial_runs() {
        let c = build::<Q>(&spec(), &Ordinal::zero(), 5).unwrap();
        assert!(c.presentation.units().is_empty());
        assert_eq!(c.labels.level(&Ordinal::zero()).len(), 5);
        let c = build::<Q>(&spec(), &Ordinal::one(), 5).unwrap();
        assert_eq!(c.presentation.unit(&o("0"), &o("1")).unwrap(), Quotient::one());
    }

    #[test]
    fn successor_units_are_one() {
        let c = build::<Q>(&spec(), &o("3"), 4).unwrap();
        for ((s, t), e) in c.presentation.units() {
            assert!(e.eq_series(&Quotient::one()), "e({s},{t}) = {e}");
        }
        let rep = verify_presentation(&c.presentation, &c.labels).unwrap();
        assert!(rep.pass(), "{:?}", rep.violations);
    }

    #[test]
    fn odd_stage_labels_use_half_n() {
        let c = build::<Q>(&spec(), &o("2"), 6).unwrap();
        assert!(!c.instances.is_empty());
        for r in &c.instances {
            for (b, l) in r.base_labels.iter().zip(&r.new_labels) {
                assert_eq!(l, &(b.clone() + rational(1, 2 * r.n as i64)));
            }
        }
        assert!(c.instance_violations().is_empty());
    }

    #[test]
    fn limit_build_verifies() {
        let c = build::<Q>(&spec(), &o("w+1"), 6).unwrap();
        let rep = verify_presentation(&c.presentation, &c.labels).unwrap();
        assert!(rep.pass(), "{:?}", rep.violations);
        assert!(rep.triples_checked > 0);
        assert_eq!(c.bridge_failures(), 0);
        assert!(c.instance_violations().is_empty());
    }

    #[test]
    fn star2_examples() {
        let mut c = build::<Q>(&spec(), &o("2"), 3).unwrap();
        let s = Ordinal::zero();
        let r = Ordinal::one();
        let cs = c.labels.level(&s)[0].rep.clone();
        let pairs = vec![(cs.clone(), cs.clone())];
        let base = c.label_of(&s, &cs).unwrap();
        for eps in [int(1), rational(1, 2)] {
            let u = c.star2_witness(&s, &r, &eps, &pairs).unwrap();
            assert!(c.spec().congruent(&u, &Quotient::one(), &s));
            assert!(c.label_of(&r, &u.mul(&cs)).unwrap() < base.clone() + eps);
        }
        assert!(c.star2_witness(&r, &r, &int(1), &pairs).is_err());
        let u = c.star2_witness(&s, &o("2"), &rational(1, 4), &pairs).unwrap();
        assert!(c.label_of(&o("2"), &u.mul(&cs)).unwrap() < base + rational(1, 4));
    }

    #[test]
    fn perturbations_are_caught() {
        let c = build::<Q>(&spec(), &o("w+1"), 4).unwrap();
        let mut p = c.presentation.clone();
        let e = p.unit(&o("0"), &o("w+1")).unwrap();
        p.set_unit(o("0"), o("w+1"), e.scale(&int(2)));
        let rep = verify_presentation(&p, &c.labels).unwrap();
        assert!(rep.violations.iter().any(|v| matches!(v, PresentationViolation::Cocycle { .. })));

        let mut labels = c.labels.clone();
        labels.set_label(&o("w"), 0, int(-100));
        let rep = verify_presentation(&c.presentation, &labels).unwrap();
        assert!(rep.violations.iter().any(|v| matches!(v, PresentationViolation::Edge { .. })));
    }

    #[test]
    fn standardness() {
        let c = build::<Q>(&spec(), &o("w+1"), 4).unwrap();
        let levels = c.levels().to_vec();
        let chain = forward_transport(&c.presentation, &Quotient::constant(int(3)), &levels).unwrap();
        assert_eq!(check_standardness_candidate(&c.presentation, &chain, &levels).unwrap(), (true, None));
        let bad: BTreeMap<_, _> = levels.iter().enumerate().map(|(i, l)| (l.clone(), Quotient::constant(int(i as i64 + 1)))).collect();
        let (ok, w) = check_standardness_candidate(&c.presentation, &bad, &levels).unwrap();
        assert!(!ok);
        assert_eq!(w, Some((o("0"), o("1"))));
    }

    #[test]
    fn general_case_stays_in_sector() {
        let z0 = Quotient::one().add(&Quotient::x(gen(0)));
        let mut c = build_general_case::<Q>(&spec(), z0.clone(), &o("w+1"), 4).unwrap();
        assert_eq!(c.labels.level(&Ordinal::zero()).len(), 1);
        assert!(c.sector_violations().unwrap().is_empty());
        let rep = verify_presentation(&c.presentation, &c.labels).unwrap();
        assert!(rep.pass(), "{:?}", rep.violations);
        let levels = c.levels().to_vec();
        let chain = forward_transport(&c.presentation, &z0, &levels).unwrap();
        let labels = c.branch_labels(&chain).unwrap();
        assert!(labels.windows(2).all(|w| w[0] < w[1]));
        let outside = Quotient::constant(int(5));
        assert!(c.ensure_label(&Ordinal::zero(), &outside, 0).is_err());
    }

    #[test]
    fn config_errors() {
        assert!(build::<Q>(&spec(), &o("w^3"), 3).is_err());
        assert!(build::<Q>(&spec(), &o("3"), 0).is_err());
        assert!(build_with_span::<Q>(&spec(), &o("w"), 3, 1).is_err());
    }
}
