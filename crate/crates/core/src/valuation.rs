//! The valuation rings `R1` and `R2` inside the field of quotients of
//! `K[G]`, the generator sequence `r_sigma` of a type, and the gap
//! structure between consecutive levels.

use std::collections::BTreeMap;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::group::GroupElement;
use crate::ordinal::Ordinal;
use crate::series::{truncation_equal, truncation_key, Poly, Quotient, TruncationKey};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum RingFlavor {
    /// Series of finite p-supp; only quotient-representable elements and
    /// finite zeta-sum prefixes are admitted.
    R1,
    /// The valuation ring generated by the monomials `X^g`.
    #[default]
    R2,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RingConfig {
    pub field: String,
    #[serde(default)]
    pub flavor: RingFlavor,
    pub level_bound: Ordinal,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Ordinal>,
}

impl RingConfig {
    pub fn new(field: &str, level_bound: Ordinal) -> Self {
        RingConfig { field: field.to_string(), flavor: RingFlavor::R2, level_bound, lambda: None }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(l) = &self.lambda {
            if l <= &self.level_bound {
                return Err(Error::Config(format!(
                    "lambda {l} must exceed the level bound {}",
                    self.level_bound
                )));
            }
        }
        Ok(())
    }

    pub fn type_spec(&self) -> Result<TypeSpec> {
        self.validate()?;
        Ok(TypeSpec { level_bound: self.level_bound.clone(), lambda: self.lambda.clone() })
    }
}

pub fn is_member<F: Field>(x: &Quotient<F>) -> bool {
    x.is_zero() || x.valuation().is_ok_and(|v| v.is_nonnegative())
}

pub fn is_unit<F: Field>(x: &Quotient<F>) -> bool {
    !x.is_zero() && x.valuation().is_ok_and(|v| v.is_zero())
}

/// `r | s`, i.e. `v(s) >= v(r)`. Everything divides zero; zero divides
/// only zero.
pub fn divides<F: Field>(r: &Quotient<F>, s: &Quotient<F>) -> bool {
    if s.is_zero() {
        return true;
    }
    if r.is_zero() {
        return false;
    }
    s.valuation().unwrap() >= r.valuation().unwrap()
}

/// `a ≡ b (mod r)`: `a - b ∈ rR`. For `r = 0` this is equality.
pub fn congruent_mod<F: Field>(a: &Quotient<F>, b: &Quotient<F>, r: &Quotient<F>) -> bool {
    if r.is_zero() {
        return a.eq_series(b);
    }
    truncation_equal(a, b, &r.valuation().unwrap())
}

/// Congruence modulo an element of valuation `bound`.
pub fn congruent_below<F: Field>(a: &Quotient<F>, b: &Quotient<F>, bound: &GroupElement) -> bool {
    a.agrees_below(b, bound)
}

/// An element of `R`: a quotient of nonnegative valuation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingElement<F: Field> {
    value: Quotient<F>,
}

impl<F: Field> RingElement<F> {
    pub fn new(value: Quotient<F>) -> Result<Self> {
        if !is_member(&value) {
            return Err(Error::NotAMember(value.to_string()));
        }
        Ok(RingElement { value })
    }

    pub fn one() -> Self {
        RingElement { value: Quotient::one() }
    }

    pub fn value(&self) -> &Quotient<F> {
        &self.value
    }

    pub fn into_value(self) -> Quotient<F> {
        self.value
    }

    pub fn is_unit(&self) -> bool {
        is_unit(&self.value)
    }

    pub fn add(&self, o: &Self) -> Self {
        RingElement { value: self.value.add(&o.value) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        RingElement { value: self.value.sub(&o.value) }
    }

    pub fn mul(&self, o: &Self) -> Self {
        RingElement { value: self.value.mul(&o.value) }
    }

    pub fn unit_inverse(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::Precondition(format!("{} is not a unit", self.value)));
        }
        Ok(RingElement { value: self.value.inv()? })
    }
}

/// The type `J/R`, fixed by `r_sigma = X^(a(sigma))`, or
/// `X^(a(sigma) + a(lambda))` when a stand-in top index `lambda` is set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TypeSpec {
    pub level_bound: Ordinal,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Ordinal>,
}

impl TypeSpec {
    pub fn new(level_bound: Ordinal) -> Self {
        TypeSpec { level_bound, lambda: None }
    }

    pub fn with_lambda(level_bound: Ordinal, lambda: Ordinal) -> Result<Self> {
        RingConfig { field: String::new(), flavor: RingFlavor::R2, level_bound, lambda: Some(lambda) }
            .type_spec()
    }

    pub fn contains(&self, sigma: &Ordinal) -> bool {
        sigma <= &self.level_bound
    }

    /// `v(r_sigma)`.
    pub fn r_valuation(&self, sigma: &Ordinal) -> GroupElement {
        let g = GroupElement::generator(sigma.clone());
        match &self.lambda {
            Some(l) => &g + &GroupElement::generator(l.clone()),
            None => g,
        }
    }

    pub fn r<F: Field>(&self, sigma: &Ordinal) -> Quotient<F> {
        Quotient::x(self.r_valuation(sigma))
    }

    /// `x ≡ y (mod r_sigma)`.
    pub fn congruent<F: Field>(&self, x: &Quotient<F>, y: &Quotient<F>, sigma: &Ordinal) -> bool {
        congruent_below(x, y, &self.r_valuation(sigma))
    }

    /// The `n`-th unit of the family `W_sigma`: each is `≡ 1 (mod r_sigma)`
    /// and distinct members are incongruent mod `r_(sigma+1)`.
    pub fn w_unit<F: Field>(&self, sigma: &Ordinal, n: usize) -> Quotient<F> {
        let base = self.r_valuation(sigma);
        let (shift, c) = match F::order() {
            None => (0, F::nth_nonzero(n).expect("infinite field")),
            Some(p) => {
                let k = (p - 1) as usize;
                (n / k, F::nth_nonzero(n % k).expect("nonzero element"))
            }
        };
        let g = &base + &crate::group::gen(0).scale(shift as i64);
        Quotient::from_poly(Poly::one().add(&Poly::monomial(g, c)))
    }

    /// The first `n` units of `W_sigma`, with both defining congruences
    /// checked.
    pub fn w_units<F: Field>(&self, sigma: &Ordinal, n: usize) -> Result<Vec<Quotient<F>>> {
        let next = sigma.succ();
        let units: Vec<Quotient<F>> = (0..n).map(|k| self.w_unit(sigma, k)).collect();
        let one = Quotient::one();
        let ok = units.iter().all(|u| is_unit(u) && self.congruent(u, &one, sigma))
            && units.iter().enumerate().all(|(i, u)| {
                units[i + 1..].iter().all(|w| !self.congruent(u, w, &next))
            });
        if ok {
            Ok(units)
        } else {
            Err(Error::GapTooSmall { level: sigma.clone(), wanted: n })
        }
    }
}

/// `sum_(n < |zeta|) zeta(n) X^((n+1) a(alpha))`.
pub fn zeta_sum<F: Field>(zeta: &[bool], alpha: &Ordinal) -> Poly<F> {
    Poly::from_terms(zeta.iter().enumerate().filter(|(_, b)| **b).map(|(n, _)| {
        (GroupElement::scaled_generator(alpha.clone(), n as i64 + 1), F::one())
    }))
}

/// All binary strings of length `n`, in counting order with bit 0 first.
pub fn binary_strings(n: usize) -> Vec<Vec<bool>> {
    (0u64..1 << n).map(|k| (0..n).map(|i| k >> (n - 1 - i) & 1 == 1).collect()).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GapReport {
    pub sigma: Ordinal,
    pub tau: Ordinal,
    pub kind: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witnesses: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairs_checked: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cut: Option<GroupElement>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distinct_keys: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equal_key_pairs: Option<usize>,
    pub failures: Vec<String>,
}

impl GapReport {
    fn new(sigma: &Ordinal, tau: &Ordinal, kind: &str) -> Self {
        GapReport {
            sigma: sigma.clone(),
            tau: tau.clone(),
            kind: kind.into(),
            pass: true,
            witnesses: None,
            pairs_checked: None,
            cut: None,
            samples: None,
            distinct_keys: None,
            equal_key_pairs: None,
            failures: Vec::new(),
        }
    }
}

/// Experimental evidence on the size of `r_sigma R / r_tau R`.
///
/// In `R1` mode, `2^budget` elements `sum zeta(n) r_sigma X^(n a(0))` are
/// checked pairwise incongruent mod `r_tau`. In `R2` mode, a census of
/// truncation keys below the cut `v(r_tau)` is taken over instantiated
/// templates (see [`key_census`]).
pub fn classify_gap<F: Field>(
    spec: &TypeSpec,
    flavor: RingFlavor,
    sigma: &Ordinal,
    tau: &Ordinal,
    budget: usize,
    seed: u64,
) -> Result<GapReport> {
    if sigma > tau {
        return Err(Error::Precondition(format!("gap needs {sigma} <= {tau}")));
    }
    if sigma == tau {
        return Ok(GapReport::new(sigma, tau, "trivial gap"));
    }
    match flavor {
        RingFlavor::R1 => {
            let mut rep = GapReport::new(sigma, tau, "r1-witnesses");
            let r_sigma = spec.r_valuation(sigma);
            let elems: Vec<Quotient<F>> = binary_strings(budget)
                .iter()
                .map(|z| {
                    let s = zeta_sum::<F>(z, &Ordinal::zero());
                    let shifted = s.mul_monomial(&(&r_sigma - &crate::group::gen(0)), &F::one());
                    Quotient::from_poly(shifted)
                })
                .collect();
            let bound = spec.r_valuation(tau);
            let mut pairs = 0;
            for (i, a) in elems.iter().enumerate() {
                for b in &elems[i + 1..] {
                    pairs += 1;
                    if congruent_below(a, b, &bound) {
                        rep.failures.push(format!("{a} ≡ {b}"));
                    }
                }
            }
            rep.witnesses = Some(elems.len());
            rep.pairs_checked = Some(pairs);
            rep.pass = rep.failures.is_empty();
            Ok(rep)
        }
        RingFlavor::R2 => {
            let v = spec.r_valuation(tau);
            let cut = match v.as_generator() {
                Some(_) => v,
                None => GroupElement::generator(v.leading_index().unwrap().succ()),
            };
            let census = key_census::<F>(&cut, budget.max(1), seed)?;
            let mut rep = GapReport::new(sigma, tau, "key-census");
            rep.cut = Some(cut);
            rep.samples = Some(census.samples);
            rep.distinct_keys = Some(census.distinct_keys);
            rep.equal_key_pairs = Some(census.equal_key_pairs);
            rep.failures = census.failures;
            rep.pass = rep.failures.is_empty();
            Ok(rep)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct KeyCensus {
    pub samples: usize,
    pub distinct_keys: usize,
    pub equal_key_pairs: usize,
    pub failures: Vec<String>,
}

/// A quotient shape over index slots: every term is `(coeff, exponent
/// coordinates over the slots)`. Slots `0..below` are fixed indices under
/// the cut, then optionally the cut index itself, then `above` slots that
/// are instantiated with random indices over the cut.
struct Template {
    below: usize,
    at_cut: bool,
    above: usize,
    num: Vec<(i64, Vec<i64>)>,
    den: Vec<(i64, Vec<i64>)>,
}

fn templates() -> Vec<Template> {
    let t = |below, at_cut, above, num: &[(i64, &[i64])], den: &[(i64, &[i64])]| Template {
        below,
        at_cut,
        above,
        num: num.iter().map(|(c, e)| (*c, e.to_vec())).collect(),
        den: den.iter().map(|(c, e)| (*c, e.to_vec())).collect(),
    };
    vec![
        t(1, false, 1, &[(1, &[0, 0]), (1, &[0, 1])], &[(1, &[0, 0])]),
        t(1, false, 1, &[(1, &[1, 0]), (2, &[0, 1])], &[(1, &[0, 0])]),
        t(1, false, 1, &[(1, &[0, 0])], &[(1, &[0, 0]), (-1, &[1, 0]), (1, &[0, 1])]),
        t(1, false, 2, &[(3, &[2, 0, 0]), (1, &[-1, 1, 0])], &[(1, &[0, 0, 0]), (1, &[0, 0, 1])]),
        t(2, false, 1, &[(1, &[0, 1, 0]), (-1, &[1, 0, 1])], &[(1, &[0, 0, 0]), (-1, &[1, 0, 0])]),
        t(1, true, 1, &[(1, &[1, 0, 0]), (1, &[0, 1, 0])], &[(1, &[0, 0, 0]), (1, &[0, 0, 1])]),
        t(1, true, 1, &[(1, &[0, 0, 0]), (5, &[-3, 1, 0])], &[(1, &[0, 0, 0]), (1, &[1, 0, 0])]),
        t(0, true, 2, &[(1, &[0, 0, 0]), (1, &[1, 0, 0]), (1, &[0, 0, 1])], &[(1, &[0, 0, 0]), (-1, &[0, 1, 0])]),
        t(2, false, 2, &[(1, &[0, 0, 0, 0]), (1, &[1, 1, 0, 0]), (1, &[0, -2, 1, 0])], &[(1, &[0, 0, 0, 0]), (1, &[0, 1, 0, 0]), (-1, &[0, 0, 0, 1])]),
        t(0, false, 2, &[(1, &[0, 0]), (1, &[1, 0])], &[(1, &[0, 0]), (1, &[0, 1])]),
        t(1, false, 1, &[(7, &[0, 0]), (1, &[3, 0]), (-1, &[-5, 1])], &[(1, &[0, 0]), (1, &[2, 0])]),
        t(2, true, 1, &[(1, &[0, 0, 1, 0]), (1, &[1, 1, 0, 1])], &[(1, &[0, 0, 0, 0]), (1, &[0, 0, 0, 1])]),
    ]
}

fn pool_above(cut: &Ordinal) -> Vec<Ordinal> {
    let mut pool: Vec<Ordinal> = (1..6).map(|k| cut.add(&Ordinal::nat(k))).collect();
    for c in 1..4 {
        pool.push(cut.add(&Ordinal::monomial(Ordinal::one(), c)));
        pool.push(cut.add(&Ordinal::monomial(Ordinal::one(), c)).add(&Ordinal::nat(2)));
    }
    pool.push(cut.add(&Ordinal::omega_pow(Ordinal::nat(2))));
    pool.push(cut.add(&Ordinal::omega_pow(Ordinal::omega())));
    pool.sort();
    pool.dedup();
    pool
}

fn instantiate<F: Field>(t: &Template, slots: &[Ordinal]) -> Quotient<F> {
    let poly = |terms: &[(i64, Vec<i64>)]| {
        Poly::from_terms(terms.iter().map(|(c, e)| {
            let g = GroupElement::from_pairs(slots.iter().cloned().zip(e.iter().copied()));
            (g, F::from_i64(*c))
        }))
    };
    Quotient::new(poly(&t.num), poly(&t.den)).expect("template denominators are nonzero")
}

type KeyedSample<F> = (TruncationKey<F>, Quotient<F>);

/// Instantiates every template `reps` times with random indices above the
/// cut (drawn from `seed`), then checks that quotients sharing a truncation
/// key agree below the cut. Indices below the cut are fixed per template,
/// so the number of distinct keys does not depend on the seed.
pub fn key_census<F: Field>(cut: &GroupElement, reps: usize, seed: u64) -> Result<KeyCensus> {
    let b = cut.as_generator().ok_or_else(|| Error::NotACut(cut.to_string()))?.clone();
    let pool = pool_above(&b);
    let fixed_below: Vec<Ordinal> = match b.as_nat() {
        Some(n) => (0..n.min(2)).map(|k| Ordinal::nat(n - n.min(2) + k)).collect(),
        None => vec![b.ladder_element(0)?, b.ladder_element(1)?],
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut groups: BTreeMap<String, Vec<KeyedSample<F>>> = BTreeMap::new();
    let mut samples = 0;
    for t in templates() {
        if t.below > fixed_below.len() {
            continue;
        }
        let below = &fixed_below[fixed_below.len() - t.below..];
        for _ in 0..reps {
            let mut picks: Vec<usize> = sample(&mut rng, pool.len(), t.above).into_vec();
            picks.sort();
            let mut slots: Vec<Ordinal> = below.to_vec();
            if t.at_cut {
                slots.push(b.clone());
            }
            slots.extend(picks.iter().map(|&i| pool[i].clone()));
            let q = instantiate::<F>(&t, &slots);
            if !is_member(&q) {
                return Err(Error::Invariant(format!("template instance {q} is not a member")));
            }
            let key = truncation_key(&q, cut)?;
            groups.entry(format!("{key:?}")).or_default().push((key, q));
            samples += 1;
        }
    }
    let mut failures = Vec::new();
    let mut equal_key_pairs = 0;
    let mut distinct = 0;
    for members in groups.values() {
        // Debug strings can collide only for equal keys; split on the key
        // itself to be safe.
        let mut classes: Vec<(&TruncationKey<F>, Vec<&Quotient<F>>)> = Vec::new();
        for (k, q) in members {
            match classes.iter_mut().find(|(c, _)| *c == k) {
                Some((_, v)) => v.push(q),
                None => classes.push((k, vec![q])),
            }
        }
        distinct += classes.len();
        for (_, qs) in classes {
            for (i, a) in qs.iter().enumerate() {
                for c in &qs[i + 1..] {
                    equal_key_pairs += 1;
                    if !truncation_equal(a, c, cut) {
                        failures.push(format!("equal keys but {a} and {c} differ below {cut}"));
                    }
                }
            }
        }
    }
    Ok(KeyCensus { samples, distinct_keys: distinct, equal_key_pairs, failures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Gf, Q};
    use crate::group::gen;

    fn xq(g: GroupElement) -> Quotient<Q> {
        Quotient::x(g)
    }

    fn one() -> Quotient<Q> {
        Quotient::one()
    }

    #[test]
    fn units_and_divisibility() {
        assert!(is_unit(&one().add(&xq(gen(0)))));
        assert!(!is_unit(&Quotient::<Q>::zero()));
        assert!(!is_unit(&xq(gen(0))));
        assert!(divides(&xq(gen(0)), &xq(gen(1))));
        assert!(!divides(&xq(gen(1)), &xq(gen(0))));
        assert!(divides(&xq(gen(1)), &Quotient::zero()));
        assert!(is_member(&xq(&gen(1) - &gen(0))));
        assert!(!is_member(&xq(-gen(0))));
    }

    #[test]
    fn congruences() {
        let r1 = xq(gen(1));
        assert!(congruent_mod(&one().add(&r1), &one(), &r1));
        assert!(!congruent_mod(&one().add(&xq(gen(0))), &one(), &r1));
        let spec = TypeSpec::new(Ordinal::nat(4));
        let w = one().add(&xq(gen(0).scale(3)));
        for u in spec.w_units::<Q>(&Ordinal::nat(2), 5).unwrap() {
            assert!(congruent_mod(&u.mul(&w), &w, &spec.r(&Ordinal::nat(2))));
        }
    }

    #[test]
    fn w_units_over_rationals() {
        let spec = TypeSpec::new(Ordinal::omega());
        let sigma = Ordinal::nat(1);
        let us = spec.w_units::<Q>(&sigma, 6).unwrap();
        let r_next = spec.r::<Q>(&Ordinal::nat(2));
        for (i, a) in us.iter().enumerate() {
            assert!(congruent_mod(a, &one(), &spec.r(&sigma)));
            for b in &us[i + 1..] {
                assert_eq!(a.valuation_of_difference(b), Some(gen(1)));
                assert!(!congruent_mod(a, b, &r_next));
            }
        }
        assert_eq!(spec.w_units::<Q>(&sigma, 1).unwrap().len(), 1);
    }

    #[test]
    fn w_units_over_gf2() {
        let spec = TypeSpec::new(Ordinal::omega());
        let us = spec.w_units::<Gf<2>>(&Ordinal::nat(3), 8).unwrap();
        assert_eq!(us[2], Quotient::from_poly(Poly::one().add(&Poly::x(&gen(3) + &gen(0).scale(2)))));
    }

    #[test]
    fn lambda_mode() {
        let w2 = Ordinal::omega_pow(Ordinal::omega());
        let spec = TypeSpec::with_lambda(Ordinal::omega(), w2.clone()).unwrap();
        assert_eq!(spec.r_valuation(&Ordinal::nat(1)), &gen(1) + &GroupElement::generator(w2.clone()));
        assert!(divides(&spec.r::<Q>(&Ordinal::nat(0)), &spec.r(&Ordinal::nat(5))));
        assert!(TypeSpec::with_lambda(w2.clone(), Ordinal::nat(3)).is_err());
        // R/r_0 R is still large: zeta sums at a(0) sit under the cut.
        let a = Quotient::from_poly(zeta_sum::<Q>(&[true, false], &Ordinal::zero()));
        let b = Quotient::from_poly(zeta_sum::<Q>(&[true, true], &Ordinal::zero()));
        assert!(!spec.congruent(&a, &b, &Ordinal::zero()));
    }

    #[test]
    fn zeta_sums() {
        assert!(zeta_sum::<Q>(&[], &Ordinal::zero()).is_zero());
        let p = zeta_sum::<Q>(&[true, false, true], &Ordinal::zero());
        assert_eq!(p, Poly::x(gen(0)).add(&Poly::x(gen(0).scale(3))));
        let z = zeta_sum::<Q>(&[true, true, false, true], &Ordinal::nat(2));
        let e = zeta_sum::<Q>(&[true, true, true, true], &Ordinal::nat(2));
        assert_eq!(e.sub(&z).valuation().unwrap(), gen(2).scale(3));
    }

    #[test]
    fn gap_reports() {
        let spec = TypeSpec::new(Ordinal::omega());
        let s = Ordinal::zero();
        let t = Ordinal::one();
        let r = classify_gap::<Q>(&spec, RingFlavor::R1, &s, &t, 8, 0).unwrap();
        assert!(r.pass);
        assert_eq!(r.witnesses, Some(256));
        assert_eq!(r.pairs_checked, Some(32640));
        assert_eq!(classify_gap::<Q>(&spec, RingFlavor::R1, &s, &s, 8, 0).unwrap().kind, "trivial gap");
        let a = classify_gap::<Q>(&spec, RingFlavor::R2, &s, &Ordinal::nat(3), 10, 1).unwrap();
        let b = classify_gap::<Q>(&spec, RingFlavor::R2, &s, &Ordinal::nat(3), 10, 2).unwrap();
        assert!(a.pass && b.pass);
        assert_eq!(a.distinct_keys, b.distinct_keys);
        assert!(a.samples.unwrap() >= 100);
    }

    #[test]
    fn config_round_trip() {
        let cfg = RingConfig {
            field: "Q".into(),
            flavor: RingFlavor::R1,
            level_bound: "w*2".parse().unwrap(),
            lambda: Some("w^w".parse().unwrap()),
        };
        let s = serde_json::to_string(&cfg).unwrap();
        assert!(s.contains("\"levelBound\":\"w*2\""));
        assert_eq!(serde_json::from_str::<RingConfig>(&s).unwrap(), cfg);
    }
}
