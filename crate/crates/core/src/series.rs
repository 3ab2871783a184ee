//! Exact arithmetic in the group ring `K[G]` and in its fraction field,
//! viewing a quotient `x/y` as the Hahn series it expands to.
//!
//! Truncations of a series below a cut can be infinite (every `X^(k*a(0))`
//! lies below `a(1)`), so they are never materialized. Agreement below a cut
//! is decided from the valuation of the difference, and any finite prefix of
//! the expansion is available through [`expand_prefix`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::group::GroupElement;
use crate::ordinal::{Ordinal, Parser};

/// A finitely supported element of `K[G]`. Terms are kept in increasing
/// exponent order, so the first term carries the valuation.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly<F: Field> {
    terms: BTreeMap<GroupElement, F>,
}

impl<F: Field> Default for Poly<F> {
    fn default() -> Self {
        Poly { terms: BTreeMap::new() }
    }
}

impl<F: Field> Poly<F> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(F::one())
    }

    pub fn constant(c: F) -> Self {
        Self::monomial(GroupElement::zero(), c)
    }

    pub fn monomial(g: GroupElement, c: F) -> Self {
        let mut p = Self::zero();
        p.add_term(g, c);
        p
    }

    /// `X^g`.
    pub fn x(g: GroupElement) -> Self {
        Self::monomial(g, F::one())
    }

    pub fn from_terms<I: IntoIterator<Item = (GroupElement, F)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (g, c) in terms {
            p.add_term(g, c);
        }
        p
    }

    pub fn add_term(&mut self, g: GroupElement, c: F) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&g) {
            Some(v) => {
                let s = v.clone() + c;
                if s.is_zero() {
                    self.terms.remove(&g);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(g, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GroupElement, &F)> {
        self.terms.iter()
    }

    pub fn coeff(&self, g: &GroupElement) -> F {
        self.terms.get(g).cloned().unwrap_or_else(F::zero)
    }

    /// Least term.
    pub fn leading_term(&self) -> Option<(&GroupElement, &F)> {
        self.terms.iter().next()
    }

    pub fn max_exponent(&self) -> Option<&GroupElement> {
        self.terms.keys().next_back()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    /// Least exponent in the support.
    pub fn valuation(&self) -> Result<GroupElement> {
        self.terms.keys().next().cloned().ok_or(Error::ZeroValuation)
    }

    /// Generator indices touched by any exponent.
    pub fn p_supp(&self) -> BTreeSet<Ordinal> {
        self.terms.keys().flat_map(|g| g.indices().cloned()).collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (g, c) in &other.terms {
            out.add_term(g.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (g, c) in &other.terms {
            out.add_term(g.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        Poly { terms: self.terms.iter().map(|(g, c)| (g.clone(), -c.clone())).collect() }
    }

    pub fn scale(&self, k: &F) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Poly { terms: self.terms.iter().map(|(g, c)| (g.clone(), c.clone() * k.clone())).collect() }
    }

    /// Multiply by `c * X^g`.
    pub fn mul_monomial(&self, g: &GroupElement, c: &F) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(h, d)| (h + g, d.clone() * c.clone())).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (g, c) in &self.terms {
            for (h, d) in &other.terms {
                out.add_term(g + h, c.clone() * d.clone());
            }
        }
        out
    }

    /// The product with every term at or above `bound` discarded.
    pub fn mul_below(&self, other: &Self, bound: &GroupElement) -> Self {
        let mut out = Self::zero();
        for (g, c) in &self.terms {
            for (h, d) in &other.terms {
                let e = g + h;
                if &e < bound {
                    out.add_term(e, c.clone() * d.clone());
                }
            }
        }
        out
    }

    /// Terms with exponent strictly below `bound`.
    pub fn truncate_below(&self, bound: &GroupElement) -> Self {
        Poly { terms: self.terms.range(..bound.clone()).map(|(g, c)| (g.clone(), c.clone())).collect() }
    }

    /// Exact quotient `self / den` in `K[G]`, if one is found within
    /// `max_steps` long-division steps.
    pub fn try_exact_div(&self, den: &Self, max_steps: usize) -> Option<Self> {
        let (dl_g, dl_c) = den.leading_term()?;
        let bound = match (self.max_exponent(), den.max_exponent()) {
            (Some(a), Some(b)) => a - b,
            _ => return Some(Self::zero()),
        };
        let mut rem = self.clone();
        let mut quot = Self::zero();
        for _ in 0..max_steps {
            let Some((g, c)) = rem.leading_term() else {
                return Some(quot);
            };
            let e = g - dl_g;
            if e > bound {
                return None;
            }
            let k = c.clone() / dl_c.clone();
            rem = rem.sub(&den.mul_monomial(&e, &k));
            quot.add_term(e, k);
        }
        rem.is_zero().then_some(quot)
    }
}

impl<F: Field> fmt::Display for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (n, (g, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, "+")?;
            }
            write!(f, "{c}*X^({g})")?;
        }
        Ok(())
    }
}

impl<F: Field> fmt::Debug for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[{self}]")
    }
}

impl<F: Field> FromStr for Poly<F> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "0" {
            return Ok(Self::zero());
        }
        let mut p = Parser::new(s);
        let mut out = Self::zero();
        loop {
            let coeff_text = p.balanced_until(b"*");
            let c = F::parse_scalar(coeff_text)
                .ok_or_else(|| p.error(&format!("bad coefficient {coeff_text:?}")))?;
            p.expect(b'*')?;
            p.expect(b'X')?;
            p.expect(b'^')?;
            p.expect(b'(')?;
            let start = p.pos();
            let inner = p.balanced_until(&[]);
            let g: GroupElement = inner.parse().map_err(|e| match e {
                Error::Parse { pos, msg } => Error::Parse { pos: start + pos, msg },
                e => e,
            })?;
            p.expect(b')')?;
            out.add_term(g, c);
            if p.at_end() {
                return Ok(out);
            }
            p.expect(b'+')?;
        }
    }
}

/// An element `num/den` of the fraction field of `K[G]`.
///
/// Quotients are not reduced to lowest terms; two quotients denote the same
/// series iff their cross products agree. Constructors rescale so that the
/// least term of the denominator is `1*X^(0)`.
#[derive(Clone)]
pub struct Quotient<F: Field> {
    num: Poly<F>,
    den: Poly<F>,
}

impl<F: Field> Quotient<F> {
    pub fn new(num: Poly<F>, den: Poly<F>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalized(num, den))
    }

    fn normalized(num: Poly<F>, den: Poly<F>) -> Self {
        let (g, c) = den.leading_term().expect("nonzero denominator");
        let (g, c) = (-g, c.inv().expect("nonzero leading coefficient"));
        let (mut num, mut den) = (num.mul_monomial(&g, &c), den.mul_monomial(&g, &c));
        if num.is_zero() {
            return Quotient { num, den: Poly::one() };
        }
        if den.len() > 1 {
            if let Some(q) = num.try_exact_div(&den, 2 * (num.len() + den.len()) + 8) {
                num = q;
                den = Poly::one();
            }
        }
        Quotient { num, den }
    }

    pub fn from_poly(p: Poly<F>) -> Self {
        Quotient { num: p, den: Poly::one() }
    }

    pub fn zero() -> Self {
        Self::from_poly(Poly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(Poly::one())
    }

    pub fn constant(c: F) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn x(g: GroupElement) -> Self {
        Self::from_poly(Poly::x(g))
    }

    pub fn num(&self) -> &Poly<F> {
        &self.num
    }

    pub fn den(&self) -> &Poly<F> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn valuation(&self) -> Result<GroupElement> {
        Ok(&self.num.valuation()? - &self.den.valuation()?)
    }

    pub fn p_supp(&self) -> BTreeSet<Ordinal> {
        let mut s = self.num.p_supp();
        s.extend(self.den.p_supp());
        s
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return Self::normalized(self.num.add(&o.num), self.den.clone());
        }
        Self::normalized(
            self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            self.den.mul(&o.den),
        )
    }

    pub fn neg(&self) -> Self {
        Quotient { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::normalized(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn scale(&self, k: &F) -> Self {
        Quotient { num: self.num.scale(k), den: self.den.clone() }
    }

    pub fn inv(&self) -> Result<Self> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    /// Equality as series (cross-multiplication).
    pub fn eq_series(&self, o: &Self) -> bool {
        self.num.mul(&o.den) == o.num.mul(&self.den)
    }

    /// Valuation of `self - o`, `None` when they are equal.
    pub fn valuation_of_difference(&self, o: &Self) -> Option<GroupElement> {
        let diff = self.num.mul(&o.den).sub(&o.num.mul(&self.den));
        let v = diff.valuation().ok()?;
        Some(&(&v - &self.den.valuation().unwrap()) - &o.den.valuation().unwrap())
    }

    /// Whether `self - o` is zero or has valuation at least `bound`; only the
    /// part of the cross products below the shifted bound is computed.
    pub fn agrees_below(&self, o: &Self, bound: &GroupElement) -> bool {
        let shift = &self.den.valuation().unwrap() + &o.den.valuation().unwrap();
        let b = bound + &shift;
        self.num.mul_below(&o.den, &b) == o.num.mul_below(&self.den, &b)
    }

    /// A smaller representative of the class of `self` modulo the ideal of
    /// series with valuation `>= bound`: terms of numerator and denominator
    /// that cannot affect the class are dropped. Requires `bound > 0` and a
    /// nonnegative valuation.
    pub fn reduce_mod(&self, bound: &GroupElement) -> Self {
        if self.num.is_zero() || !bound.is_positive() {
            return self.clone();
        }
        let cut = &self.den.valuation().unwrap() + bound;
        let num = self.num.truncate_below(&cut);
        if num.is_zero() {
            return Self::zero();
        }
        Self::normalized(num, self.den.truncate_below(&cut))
    }
}

impl<F: Field> PartialEq for Quotient<F> {
    fn eq(&self, o: &Self) -> bool {
        self.eq_series(o)
    }
}

impl<F: Field> Eq for Quotient<F> {}

impl<F: Field> fmt::Display for Quotient<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})/({})", self.num, self.den)
    }
}

impl<F: Field> fmt::Debug for Quotient<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Quotient[{self}]")
    }
}

impl<F: Field> From<Poly<F>> for Quotient<F> {
    fn from(p: Poly<F>) -> Self {
        Self::from_poly(p)
    }
}

impl<F: Field> FromStr for Quotient<F> {
    type Err = Error;

    /// Accepts `(<poly>)/(<poly>)` or a bare polynomial.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('(') {
            let mut p = Parser::new(s);
            p.expect(b'(')?;
            let num = p.balanced_until(&[]);
            p.expect(b')')?;
            p.expect(b'/')?;
            p.expect(b'(')?;
            let den = p.balanced_until(&[]);
            p.expect(b')')?;
            if !p.at_end() {
                return Err(p.error("unexpected trailing input"));
            }
            return Quotient::new(num.parse()?, den.parse()?);
        }
        Ok(Quotient::from_poly(s.parse()?))
    }
}

pub fn valuation<F: Field>(p: &Poly<F>) -> Result<GroupElement> {
    p.valuation()
}

pub fn valuation_q<F: Field>(q: &Quotient<F>) -> Result<GroupElement> {
    if q.is_zero() {
        return Err(Error::ZeroValuation);
    }
    q.valuation()
}

/// The first `n` terms of the Hahn expansion of `q`, by valuation-directed
/// long division: each step cancels the least term of the remainder, so the
/// emitted exponents strictly increase. Fewer than `n` terms are returned
/// when the expansion terminates.
pub fn expand_prefix<F: Field>(q: &Quotient<F>, n: usize) -> Vec<(GroupElement, F)> {
    let (dg, dc) = q.den.leading_term().expect("nonzero denominator");
    let mut rem = q.num.clone();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let Some((g, c)) = rem.leading_term() else { break };
        let e = g - dg;
        let k = c.clone() / dc.clone();
        rem = rem.sub(&q.den.mul_monomial(&e, &k));
        out.push((e, k));
    }
    out
}

/// Whether the expansions of `a` and `b` agree on every exponent below
/// `beta`.
pub fn truncation_equal<F: Field>(a: &Quotient<F>, b: &Quotient<F>, beta: &GroupElement) -> bool {
    match a.valuation_of_difference(b) {
        None => true,
        Some(v) => &v >= beta,
    }
}

/// The finite parameter tuple from which the truncation of a quotient below
/// a generator cut can be read off.
///
/// Numerator and denominator are rewritten over the basis of generator
/// indices they use, `sigma_1 < ... < sigma_d`; the key keeps the field
/// coefficients, the integer coordinate vectors of every monomial, `d`, the
/// number `q` of basis indices below the cut, those indices themselves, and
/// whether the cut index is itself a basis index. Two quotients with equal
/// keys have equal truncations below the cut. For quotients of negative
/// valuation the whole basis is kept.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruncationKey<F: Field> {
    pub coefficients: Vec<F>,
    pub split: usize,
    pub exponents: Vec<Vec<i64>>,
    pub d: usize,
    pub q: usize,
    pub basis_below: Vec<Ordinal>,
    pub cut_in_basis: bool,
}

pub fn truncation_key<F: Field>(q: &Quotient<F>, beta: &GroupElement) -> Result<TruncationKey<F>> {
    let cut = beta.as_generator().ok_or_else(|| Error::NotACut(beta.to_string()))?;
    let basis: Vec<Ordinal> = q.p_supp().into_iter().collect();
    let d = basis.len();
    let member = q.is_zero() || q.valuation()?.is_nonnegative();
    let below = if member { basis.iter().take_while(|s| *s < cut).count() } else { d };
    let cut_in_basis = member && basis.get(below) == Some(cut);
    let mut coefficients = Vec::with_capacity(q.num.len() + q.den.len());
    let mut exponents = Vec::with_capacity(coefficients.capacity());
    for (g, c) in q.num.terms().chain(q.den.terms()) {
        coefficients.push(c.clone());
        exponents.push(g.coordinates(&basis)?);
    }
    Ok(TruncationKey {
        coefficients,
        split: q.num.len(),
        exponents,
        d,
        q: below,
        basis_below: basis[..below].to_vec(),
        cut_in_basis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{int, Gf, Q};
    use crate::group::gen;

    fn x(g: GroupElement) -> Poly<Q> {
        Poly::x(g)
    }

    fn one() -> Poly<Q> {
        Poly::one()
    }

    #[test]
    fn ring_arithmetic() {
        let a = x(gen(0)).add(&one());
        let b = x(gen(0)).sub(&one());
        assert_eq!(a.mul(&b), x(gen(0).scale(2)).sub(&one()));
        assert!(a.mul(&Poly::zero()).is_zero());
        let c = one().sub(&x(gen(0))).add(&x(gen(0).scale(2)));
        assert_eq!(a.mul(&c), one().add(&x(gen(0).scale(3))));
    }

    #[test]
    fn valuations() {
        let p = x(gen(1)).add(&Poly::monomial(gen(0), int(2)));
        assert_eq!(valuation(&p).unwrap(), gen(0));
        let q = Quotient::new(x(gen(1)), x(gen(0))).unwrap();
        assert_eq!(valuation_q(&q).unwrap(), &gen(1) - &gen(0));
        let r = Quotient::new(x(gen(0)).add(&x(gen(1))), one().sub(&x(gen(0)))).unwrap();
        assert_eq!(valuation_q(&r).unwrap(), gen(0));
        assert!(valuation(&Poly::<Q>::zero()).is_err());
        assert!(valuation_q(&Quotient::<Q>::zero()).is_err());
    }

    #[test]
    fn p_supp_cases() {
        assert!(Poly::<Q>::zero().p_supp().is_empty());
        let s: Vec<_> = x(&gen(0) + &gen(1)).p_supp().into_iter().collect();
        assert_eq!(s, vec![Ordinal::nat(0), Ordinal::nat(1)]);
        let p = one().add(&Poly::monomial(gen(2).scale(2), int(3)));
        assert_eq!(p.p_supp().into_iter().collect::<Vec<_>>(), vec![Ordinal::nat(2)]);
    }

    #[test]
    fn geometric_expansion() {
        let q = Quotient::new(one(), one().sub(&x(gen(0)))).unwrap();
        let pre = expand_prefix(&q, 4);
        let exps: Vec<_> = pre.iter().map(|(g, _)| g.clone()).collect();
        assert_eq!(exps, (0..4).map(|k| gen(0).scale(k)).collect::<Vec<_>>());
        assert!(pre.iter().all(|(_, c)| *c == int(1)));
        // multiply back: 1 - den * prefix = X^(4 a0)
        let prefix = Poly::from_terms(pre);
        let rem = q.num().sub(&q.den().mul(&prefix));
        assert!(rem.valuation().unwrap() > gen(0).scale(3));
    }

    #[test]
    fn terminating_expansion() {
        let q = Quotient::new(one().sub(&x(gen(0).scale(2))), one().sub(&x(gen(0)))).unwrap();
        let pre = expand_prefix(&q, 5);
        assert_eq!(pre, vec![(GroupElement::zero(), int(1)), (gen(0), int(1))]);
        let p = one().add(&x(gen(1))).add(&x(gen(0)));
        let pre = expand_prefix(&Quotient::from_poly(p), 2);
        assert_eq!(pre.iter().map(|t| t.0.clone()).collect::<Vec<_>>(), vec![GroupElement::zero(), gen(0)]);
    }

    #[test]
    fn truncation_equality() {
        let geo = Quotient::new(one(), one().sub(&x(gen(0)))).unwrap();
        assert!(truncation_equal(&geo, &geo, &gen(5)));
        let bumped = geo.add(&Quotient::x(gen(1)));
        assert!(truncation_equal(&geo, &bumped, &gen(1)));
        assert!(!truncation_equal(&geo, &bumped, &(&gen(1) + &gen(0))));
        let a = Quotient::one();
        let b = Quotient::from_poly(one().add(&x(gen(0))));
        assert!(!truncation_equal(&a, &b, &gen(1)));
    }

    #[test]
    fn keys() {
        let one_q = Quotient::<Q>::one();
        assert_eq!(truncation_key(&one_q, &gen(1)).unwrap(), truncation_key(&one_q, &gen(1)).unwrap());
        assert!(truncation_key(&one_q, &gen(1).scale(2)).is_err());
        let a = Quotient::from_poly(one().add(&x(gen(0))));
        let b = Quotient::from_poly(one().add(&Poly::monomial(gen(0), int(2))));
        assert_ne!(truncation_key(&a, &gen(1)).unwrap(), truncation_key(&b, &gen(1)).unwrap());
    }

    #[test]
    fn normalization_cancels_exact_factors() {
        let d = one().sub(&x(gen(0)));
        let q = Quotient::new(d.mul(&one().add(&x(gen(1)))), d.clone()).unwrap();
        assert_eq!(q.den(), &one());
        assert_eq!(q.num(), &one().add(&x(gen(1))));
        let m = Quotient::new(x(gen(1)), Poly::monomial(gen(0), int(2))).unwrap();
        assert_eq!(m.den(), &one());
    }

    #[test]
    fn reduction_preserves_class() {
        let q = Quotient::new(one().add(&x(gen(2))), one().sub(&x(gen(0))).add(&x(gen(3)))).unwrap();
        let r = q.reduce_mod(&gen(1));
        assert!(truncation_equal(&q, &r, &gen(1)));
        assert!(r.p_supp().iter().all(|i| *i < Ordinal::nat(1)));
    }

    #[test]
    fn text_forms() {
        let p: Poly<Q> = "1*X^(0)+-2*X^(1*a(0))+3/2*X^(1*a(w)-1*a(0))".parse().unwrap();
        assert_eq!(p.to_string(), "1*X^(0)+-2*X^(1*a(0))+3/2*X^(-1*a(0)+1*a(w))");
        let q: Quotient<Q> = "(1*X^(1*a(1)))/(1*X^(0)+-1*X^(1*a(0)))".parse().unwrap();
        assert_eq!(q.to_string(), "(1*X^(1*a(1)))/(1*X^(0)+-1*X^(1*a(0)))");
        assert!("(1*X^(0))/(0)".parse::<Quotient<Q>>().is_err());
        let g: Poly<Gf<3>> = "2*X^(0)".parse().unwrap();
        assert_eq!(g.add(&g).to_string(), "1*X^(0)");
    }
}
