//! Pointwise witnesses for the completeness invariants at a limit level:
//! Cauchy families of units indexed by binary strings, their separation,
//! limit candidates, and certification that a family is trivial modulo the
//! filtration by index-bounded subrings.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::group::GroupElement;
use crate::ordinal::{Ladder, Ordinal};
use crate::series::{expand_prefix, Quotient};
use crate::valuation::{divides, is_unit, TypeSpec};

pub const DEFAULT_DEPTH: usize = 64;

/// A family indexed by the materialized levels below a limit.
pub type LevelFamily<F> = BTreeMap<Ordinal, Quotient<F>>;

/// `u_sigma = sum_(i <= m) zeta(i) r_(nu_i)` for `nu_m < sigma <= nu_(m+1)`,
/// and `u_sigma = 0` for `sigma <= nu_0`.
#[derive(Clone, Debug)]
pub struct CauchyFamily<F: Field> {
    zeta: Vec<bool>,
    ladder: Ladder,
    values: LevelFamily<F>,
}

impl<F: Field> CauchyFamily<F> {
    pub fn zeta(&self) -> &[bool] {
        &self.zeta
    }

    pub fn ladder(&self) -> &Ladder {
        &self.ladder
    }

    pub fn delta(&self) -> &Ordinal {
        self.ladder.delta()
    }

    pub fn values(&self) -> &LevelFamily<F> {
        &self.values
    }

    pub fn get(&self, sigma: &Ordinal) -> Option<&Quotient<F>> {
        self.values.get(sigma)
    }

    /// The unit family `1 + u_sigma`.
    pub fn shifted_units(&self) -> LevelFamily<F> {
        self.values.iter().map(|(s, u)| (s.clone(), Quotient::one().add(u))).collect()
    }

    /// Pairs `sigma < tau` of materialized levels with `u_tau ≢ u_sigma (mod r_sigma)`.
    pub fn check_congruences(&self, spec: &TypeSpec) -> Vec<(Ordinal, Ordinal)> {
        congruence_violations(&self.values, spec)
    }
}

pub fn congruence_violations<F: Field>(family: &LevelFamily<F>, spec: &TypeSpec) -> Vec<(Ordinal, Ordinal)> {
    let levels: Vec<_> = family.iter().collect();
    let mut bad = Vec::new();
    for (i, (s, us)) in levels.iter().enumerate() {
        for (t, ut) in &levels[i + 1..] {
            if !spec.congruent(*ut, *us, s) {
                bad.push(((*s).clone(), (*t).clone()));
            }
        }
    }
    bad
}

/// Levels materialized for a string of length `n`: `0`, and `nu_k` for
/// `k <= n` together with `nu_k + 1` for `k < n`.
pub fn cauchy_levels(ladder: &Ladder, n: usize) -> Result<Vec<Ordinal>> {
    let mut levels = vec![Ordinal::zero()];
    for k in 0..=n {
        let nu = ladder.get(k)?;
        if k < n {
            levels.push(nu.succ());
        }
        levels.push(nu);
    }
    levels.sort();
    levels.dedup();
    Ok(levels)
}

/// `u_sigma` for a single level; errors when `sigma` lies past the part of
/// the ladder that `zeta` determines.
pub fn cauchy_value<F: Field>(zeta: &[bool], ladder: &Ladder, spec: &TypeSpec, sigma: &Ordinal) -> Result<Quotient<F>> {
    if sigma >= ladder.delta() {
        return Err(Error::Precondition(format!("{sigma} is not below {}", ladder.delta())));
    }
    let mut u = Quotient::zero();
    for i in 0..=zeta.len() {
        let nu = ladder.get(i)?;
        if &nu >= sigma {
            return Ok(u);
        }
        if i == zeta.len() {
            break;
        }
        if zeta[i] {
            u = u.add(&spec.r(&nu));
        }
    }
    Err(Error::Budget(format!("level {sigma} needs more than {} string entries", zeta.len())))
}

pub fn build_cauchy<F: Field>(zeta: &[bool], ladder: &Ladder, spec: &TypeSpec) -> Result<CauchyFamily<F>> {
    let values = cauchy_levels(ladder, zeta.len())?
        .into_iter()
        .map(|s| cauchy_value(zeta, ladder, spec, &s).map(|u| (s, u)))
        .collect::<Result<_>>()?;
    Ok(CauchyFamily { zeta: zeta.to_vec(), ladder: ladder.clone(), values })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Separation {
    /// First index where the strings disagree.
    pub m: usize,
    /// `nu_(m+1)`.
    pub level: Ordinal,
    pub separated: bool,
}

/// With `m` the first disagreement of the strings, checks that
/// `u^eta - u^zeta` at level `nu_(m+1)` is `±r_(nu_m)` and is not divisible
/// by `r_(nu_(m+1))`.
pub fn verify_separation<F: Field>(
    a: &CauchyFamily<F>,
    b: &CauchyFamily<F>,
    spec: &TypeSpec,
) -> Result<Separation> {
    if a.zeta.len() != b.zeta.len() {
        return Err(Error::LengthMismatch(a.zeta.len(), b.zeta.len()));
    }
    let m = a.zeta.iter().zip(&b.zeta).position(|(x, y)| x != y).ok_or(Error::EqualStrings)?;
    let nu_m = a.ladder.get(m)?;
    let level = a.ladder.get(m + 1)?;
    let ua = cauchy_value::<F>(&a.zeta, &a.ladder, spec, &level)?;
    let ub = cauchy_value::<F>(&b.zeta, &b.ladder, spec, &level)?;
    let diff = ub.sub(&ua);
    let r = spec.r::<F>(&nu_m);
    let plus_minus = diff.eq_series(&r) || diff.eq_series(&r.neg());
    let separated = plus_minus && !divides(&spec.r::<F>(&level), &diff);
    Ok(Separation { m, level, separated })
}

/// Whether `candidate` is a unit congruent to `u_sigma` mod `r_sigma` at
/// every materialized level; on failure, the first bad level.
pub fn check_limit_candidate<F: Field>(
    family: &LevelFamily<F>,
    candidate: &Quotient<F>,
    spec: &TypeSpec,
) -> std::result::Result<(), Ordinal> {
    if !is_unit(candidate) {
        return Err(family.keys().next().cloned().unwrap_or_else(Ordinal::zero));
    }
    match family.iter().find(|(s, u)| !spec.congruent(candidate, u, s)) {
        Some((s, _)) => Err(s.clone()),
        None => Ok(()),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// The quotient itself has all indices below the limit.
    CertifiedStructural,
    /// The expansion below `v(r_sigma)` uses only indices below the limit.
    CertifiedPrefix,
    /// An expansion term below `v(r_sigma)` has an index at or above the limit.
    Refuted,
    /// Depth exhausted before `v(r_sigma)` was reached.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LevelVerdict {
    pub sigma: Ordinal,
    pub verdict: Verdict,
    pub terms_examined: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GammaPrimeReport {
    pub delta: Ordinal,
    pub depth: usize,
    pub levels: Vec<LevelVerdict>,
}

impl GammaPrimeReport {
    pub fn certified(&self) -> bool {
        self.levels
            .iter()
            .all(|l| matches!(l.verdict, Verdict::CertifiedStructural | Verdict::CertifiedPrefix))
    }

    pub fn refuted(&self) -> bool {
        self.levels.iter().any(|l| l.verdict == Verdict::Refuted)
    }

    pub fn inconclusive(&self) -> bool {
        !self.refuted() && self.levels.iter().any(|l| l.verdict == Verdict::Inconclusive)
    }
}

fn indices_below(g: &GroupElement, delta: &Ordinal) -> bool {
    g.leading_index().is_none_or(|i| i < delta)
}

/// For each level `sigma` of a unit family, decides whether
/// `u_sigma u_0^-1 ≡ 1 + a (mod r_sigma)` for some `a` whose numerator and
/// denominator only use indices below `delta`. Families without a level 0,
/// with non-units, or breaking the Cauchy congruences are rejected.
pub fn verify_gamma_prime_zero<F: Field>(
    delta: &Ordinal,
    family: &LevelFamily<F>,
    spec: &TypeSpec,
    depth: usize,
) -> Result<GammaPrimeReport> {
    let u0 = family
        .get(&Ordinal::zero())
        .ok_or_else(|| Error::Precondition("family has no level 0".into()))?;
    if let Some((s, _)) = family.iter().find(|(_, u)| !is_unit(u)) {
        return Err(Error::Precondition(format!("u at level {s} is not a unit")));
    }
    if let Some(s) = family.keys().find(|s| *s >= delta) {
        return Err(Error::Precondition(format!("level {s} is not below {delta}")));
    }
    if let Some((s, t)) = congruence_violations(family, spec).into_iter().next() {
        return Err(Error::Precondition(format!("levels {s} < {t} break the Cauchy congruence")));
    }
    let f = u0.inv()?;
    let mut levels = Vec::new();
    for (sigma, u) in family {
        let y = u.mul(&f).sub(&Quotient::one());
        if y.p_supp().iter().all(|i| i < delta) {
            levels.push(LevelVerdict {
                sigma: sigma.clone(),
                verdict: Verdict::CertifiedStructural,
                terms_examined: 0,
                witness: None,
            });
            continue;
        }
        let bound = spec.r_valuation(sigma);
        let terms = expand_prefix(&y, depth + 1);
        let mut verdict = Verdict::Inconclusive;
        let mut examined = 0;
        let mut witness = None;
        for (g, c) in terms.iter().take(depth) {
            if g >= &bound {
                verdict = Verdict::CertifiedPrefix;
                break;
            }
            examined += 1;
            if !indices_below(g, delta) {
                verdict = Verdict::Refuted;
                witness = Some(format!("{c}*X^({g})"));
                break;
            }
        }
        if verdict == Verdict::Inconclusive && terms.len() <= depth && examined == terms.len() {
            // The expansion terminated inside the window.
            verdict = Verdict::CertifiedPrefix;
        }
        levels.push(LevelVerdict { sigma: sigma.clone(), verdict, terms_examined: examined, witness });
    }
    Ok(GammaPrimeReport { delta: delta.clone(), depth, levels })
}

/// A family over a spec with stand-in top index `lambda`: `u_0 = 1` and
/// `u_sigma = 1 + X^(a(0) + a(lambda))` at the other levels. It satisfies
/// the Cauchy congruences but is not trivial modulo the filtration.
pub fn adversarial_family<F: Field>(spec: &TypeSpec, levels: &[Ordinal]) -> Result<LevelFamily<F>> {
    let lambda = spec
        .lambda
        .clone()
        .ok_or_else(|| Error::Precondition("adversarial family needs a stand-in top index".into()))?;
    let bump = Quotient::one().add(&Quotient::x(&crate::group::gen(0) + &GroupElement::generator(lambda)));
    Ok(levels
        .iter()
        .map(|s| (s.clone(), if s.is_zero() { Quotient::one() } else { bump.clone() }))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Q;
    use crate::valuation::binary_strings;

    fn omega_setup() -> (Ladder, TypeSpec) {
        let w = Ordinal::omega();
        (Ladder::canonical(&w).unwrap(), TypeSpec::new(w))
    }

    #[test]
    fn zero_string_gives_zero_family() {
        let (l, spec) = omega_setup();
        let f = build_cauchy::<Q>(&[false; 4], &l, &spec).unwrap();
        assert!(f.values().values().all(|u| u.is_zero()));
    }

    #[test]
    fn formula_instances() {
        let (l, spec) = omega_setup();
        let f = build_cauchy::<Q>(&[true, false, true], &l, &spec).unwrap();
        // nu = 0, 1, 2, ...; sigma = 2 has m = 1.
        assert_eq!(f.get(&Ordinal::nat(2)).unwrap(), &spec.r::<Q>(&Ordinal::nat(0)));
        assert_eq!(
            f.get(&Ordinal::nat(3)).unwrap(),
            &spec.r::<Q>(&Ordinal::nat(0)).add(&spec.r(&Ordinal::nat(2)))
        );
        assert!(f.check_congruences(&spec).is_empty());
    }

    #[test]
    fn separation_examples() {
        let (l, spec) = omega_setup();
        let fam = |z: &[bool]| build_cauchy::<Q>(z, &l, &spec).unwrap();
        let s = verify_separation(&fam(&[true, false]), &fam(&[true, true]), &spec).unwrap();
        assert_eq!((s.m, s.separated), (1, true));
        assert_eq!(s.level, Ordinal::nat(2));
        let s = verify_separation(&fam(&[false]), &fam(&[true]), &spec).unwrap();
        assert_eq!((s.m, s.separated), (0, true));
        assert_eq!(verify_separation(&fam(&[true]), &fam(&[true]), &spec), Err(Error::EqualStrings));
        assert!(matches!(
            verify_separation(&fam(&[true]), &fam(&[true, false]), &spec),
            Err(Error::LengthMismatch(1, 2))
        ));
    }

    #[test]
    fn separation_exhaustive_on_omega_times_two() {
        let d: Ordinal = "w*2".parse().unwrap();
        let l = Ladder::canonical(&d).unwrap();
        let spec = TypeSpec::new(d);
        let fams: Vec<_> = binary_strings(4).iter().map(|z| build_cauchy::<Q>(z, &l, &spec).unwrap()).collect();
        for (i, a) in fams.iter().enumerate() {
            assert!(a.check_congruences(&spec).is_empty());
            for b in &fams[i + 1..] {
                assert!(verify_separation(a, b, &spec).unwrap().separated);
            }
        }
    }

    #[test]
    fn limit_candidates() {
        let (l, spec) = omega_setup();
        let f = build_cauchy::<Q>(&[true, true, false], &l, &spec).unwrap();
        let units = f.shifted_units();
        let top = units.values().last().unwrap().clone();
        assert!(check_limit_candidate(&units, &top, &spec).is_ok());
        assert_eq!(check_limit_candidate(&units, &Quotient::one(), &spec), Err(Ordinal::nat(1)));
    }

    #[test]
    fn gamma_prime_constant_and_cauchy() {
        let (l, spec) = omega_setup();
        let w = Ordinal::omega();
        let levels = cauchy_levels(&l, 3).unwrap();
        let c: Quotient<Q> = Quotient::one().add(&Quotient::x(crate::group::gen(0)));
        let constant: LevelFamily<Q> = levels.iter().map(|s| (s.clone(), c.clone())).collect();
        assert!(verify_gamma_prime_zero(&w, &constant, &spec, DEFAULT_DEPTH).unwrap().certified());
        let f = build_cauchy::<Q>(&[true, false, true], &l, &spec).unwrap();
        let rep = verify_gamma_prime_zero(&w, &f.shifted_units(), &spec, DEFAULT_DEPTH).unwrap();
        assert!(rep.certified());
    }

    #[test]
    fn gamma_prime_prefix_route() {
        let (l, spec) = omega_setup();
        let w = Ordinal::omega();
        let f = build_cauchy::<Q>(&[true, true, true], &l, &spec).unwrap();
        let extra = Quotient::x(GroupElement::generator(w.clone()));
        let fam: LevelFamily<Q> = f.shifted_units().into_iter().map(|(s, u)| (s, u.add(&extra))).collect();
        let rep = verify_gamma_prime_zero(&w, &fam, &spec, DEFAULT_DEPTH).unwrap();
        assert!(rep.certified());
        assert!(rep.levels.iter().any(|l| l.verdict == Verdict::CertifiedPrefix));
        let shallow = verify_gamma_prime_zero(&w, &fam, &spec, 1).unwrap();
        assert!(shallow.inconclusive());
    }

    #[test]
    fn gamma_prime_adversarial() {
        let w = Ordinal::omega();
        let spec = TypeSpec::with_lambda(w.clone(), Ordinal::omega_pow(Ordinal::omega())).unwrap();
        let levels = cauchy_levels(&Ladder::canonical(&w).unwrap(), 3).unwrap();
        let fam = adversarial_family::<Q>(&spec, &levels).unwrap();
        let rep = verify_gamma_prime_zero(&w, &fam, &spec, DEFAULT_DEPTH).unwrap();
        assert!(rep.refuted());
        assert!(!rep.certified());
    }
}
