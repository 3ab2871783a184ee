//! Countable ordinals below epsilon-zero in Cantor normal form.
//!
//! An [`Ordinal`] is a finite sum `w^e1*c1 + w^e2*c2 + ...` with strictly
//! decreasing exponents (themselves ordinals) and positive coefficients.
//! Because the representation is canonical, the derived structural ordering
//! on the term list coincides with the ordinal order, and equality is
//! structural equality.
//!
//! Text form (used on the command line and in reports):
//!
//! ```text
//! ord  ::= term ("+" term)*
//! term ::= "w" ("^" atom)? ("*" nat)? | nat
//! atom ::= nat | "w" ("^" atom)? | "(" ord ")"
//! ```
//!
//! so `w*2+3`, `w^w`, `w^2*3+w+1` and `w^(w+1)` all parse.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Term {
    exp: Ordinal,
    coeff: u64,
}

#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ordinal {
    terms: Vec<Term>,
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::nat(1)
    }

    pub fn nat(n: u64) -> Self {
        if n == 0 {
            Self::zero()
        } else {
            Ordinal { terms: vec![Term { exp: Self::zero(), coeff: n }] }
        }
    }

    pub fn omega() -> Self {
        Self::omega_pow(Self::one())
    }

    /// `w^e`.
    pub fn omega_pow(e: Ordinal) -> Self {
        Ordinal { terms: vec![Term { exp: e, coeff: 1 }] }
    }

    /// `w^e * c`.
    pub fn monomial(e: Ordinal, c: u64) -> Self {
        if c == 0 {
            Self::zero()
        } else {
            Ordinal { terms: vec![Term { exp: e, coeff: c }] }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.terms.iter().all(|t| t.exp.is_zero())
    }

    pub fn as_nat(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [t] if t.exp.is_zero() => Some(t.coeff),
            _ => None,
        }
    }

    pub fn is_successor(&self) -> bool {
        self.terms.last().is_some_and(|t| t.exp.is_zero())
    }

    pub fn is_limit(&self) -> bool {
        !self.is_zero() && !self.is_successor()
    }

    /// The `tau` with `tau + 1 == self`, if `self` is a successor.
    pub fn predecessor(&self) -> Option<Ordinal> {
        if !self.is_successor() {
            return None;
        }
        let mut terms = self.terms.clone();
        let last = terms.last_mut().unwrap();
        if last.coeff == 1 {
            terms.pop();
        } else {
            last.coeff -= 1;
        }
        Some(Ordinal { terms })
    }

    /// Exponent of the leading term; zero for the ordinal zero.
    pub fn leading_exponent(&self) -> Ordinal {
        self.terms.first().map(|t| t.exp.clone()).unwrap_or_default()
    }

    /// Iterate over `(exponent, coefficient)` pairs, highest exponent first.
    pub fn terms(&self) -> impl Iterator<Item = (&Ordinal, u64)> {
        self.terms.iter().map(|t| (&t.exp, t.coeff))
    }

    pub fn succ(&self) -> Ordinal {
        self.add(&Self::one())
    }

    pub fn add(&self, other: &Ordinal) -> Ordinal {
        let Some(head) = other.terms.first() else {
            return self.clone();
        };
        let mut terms: Vec<Term> =
            self.terms.iter().take_while(|t| t.exp > head.exp).cloned().collect();
        let merged = self.terms.iter().find(|t| t.exp == head.exp).map_or(0, |t| t.coeff);
        terms.push(Term { exp: head.exp.clone(), coeff: merged + head.coeff });
        terms.extend(other.terms[1..].iter().cloned());
        Ordinal { terms }
    }

    pub fn mul(&self, other: &Ordinal) -> Ordinal {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let lead = &self.terms[0];
        let mut acc = Self::zero();
        for t in &other.terms {
            let piece = if t.exp.is_zero() {
                let mut terms = self.terms.clone();
                terms[0].coeff *= t.coeff;
                Ordinal { terms }
            } else {
                Ordinal::monomial(lead.exp.add(&t.exp), t.coeff)
            };
            acc = acc.add(&piece);
        }
        acc
    }

    /// The `n`-th element of the canonical fundamental sequence of a limit.
    ///
    /// Writing `self = g + w^e*c`, successor exponents `e = e'+1` give
    /// `g + w^e*(c-1) + w^e'*n` (shifted to start at `w^e'` when `e' > 0`),
    /// and limit exponents give `g + w^e*(c-1) + w^(ladder(e)_n)`.
    pub fn ladder_element(&self, n: usize) -> Result<Ordinal> {
        if !self.is_limit() {
            return Err(Error::NotLimit(self.clone()));
        }
        let (last, init) = self.terms.split_last().unwrap();
        let mut base = Ordinal { terms: init.to_vec() };
        if last.coeff > 1 {
            base = base.add(&Ordinal::monomial(last.exp.clone(), last.coeff - 1));
        }
        let step = match last.exp.predecessor() {
            Some(e) if e.is_zero() => Ordinal::nat(n as u64),
            Some(e) => Ordinal::monomial(e, n as u64 + 1),
            None => Ordinal::omega_pow(last.exp.ladder_element(n)?),
        };
        Ok(base.add(&step))
    }

    fn parse_atom(p: &mut Parser<'_>) -> Result<Ordinal> {
        match p.peek() {
            Some(b'(') => {
                p.bump();
                let o = Self::parse_sum(p)?;
                p.expect(b')')?;
                Ok(o)
            }
            Some(b'w') => {
                p.bump();
                let e = if p.eat(b'^') { Self::parse_atom(p)? } else { Ordinal::one() };
                Ok(Ordinal::omega_pow(e))
            }
            Some(c) if c.is_ascii_digit() => Ok(Ordinal::nat(p.nat()?)),
            _ => Err(p.error("expected a natural number, 'w' or '('")),
        }
    }

    fn parse_term(p: &mut Parser<'_>) -> Result<Ordinal> {
        match p.peek() {
            Some(b'w') => {
                p.bump();
                let e = if p.eat(b'^') { Self::parse_atom(p)? } else { Ordinal::one() };
                let c = if p.eat(b'*') { p.nat()? } else { 1 };
                if c == 0 {
                    return Err(p.error("coefficient must be positive"));
                }
                Ok(Ordinal::monomial(e, c))
            }
            Some(c) if c.is_ascii_digit() => Ok(Ordinal::nat(p.nat()?)),
            _ => Err(p.error("expected a term")),
        }
    }

    fn parse_sum(p: &mut Parser<'_>) -> Result<Ordinal> {
        let mut acc = Self::parse_term(p)?;
        while p.eat(b'+') {
            acc = acc.add(&Self::parse_term(p)?);
        }
        Ok(acc)
    }

    fn fmt_atom(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.terms.as_slice() {
            [] => write!(f, "0"),
            [t] if t.exp.is_zero() => write!(f, "{}", t.coeff),
            [t] if t.coeff == 1 => {
                write!(f, "w")?;
                if t.exp != Ordinal::one() {
                    write!(f, "^")?;
                    t.exp.fmt_atom(f)?;
                }
                Ok(())
            }
            _ => write!(f, "({self})"),
        }
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            if t.exp.is_zero() {
                write!(f, "{}", t.coeff)?;
                continue;
            }
            write!(f, "w")?;
            if t.exp != Ordinal::one() {
                write!(f, "^")?;
                t.exp.fmt_atom(f)?;
            }
            if t.coeff > 1 {
                write!(f, "*{}", t.coeff)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ordinal({self})")
    }
}

impl FromStr for Ordinal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser::new(s);
        let o = Ordinal::parse_sum(&mut p)?;
        if p.peek().is_some() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(o)
    }
}

impl From<u64> for Ordinal {
    fn from(n: u64) -> Self {
        Ordinal::nat(n)
    }
}

impl Serialize for Ordinal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Ordinal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Byte cursor shared by the small text grammars of the crate.
pub(crate) struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    pub(crate) fn new(s: &'a str) -> Self {
        Parser { src: s.as_bytes(), pos: 0 }
    }

    pub(crate) fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    pub(crate) fn bump(&mut self) {
        self.pos += 1;
    }

    pub(crate) fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    pub(crate) fn nat(&mut self) -> Result<u64> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected digits"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| self.error("number out of range"))
    }

    /// Consume bytes up to (not including) the first byte in `stops` at
    /// parenthesis depth zero.
    pub(crate) fn balanced_until(&mut self, stops: &[u8]) -> &'a str {
        let start = self.pos;
        let mut depth = 0usize;
        while let Some(c) = self.peek() {
            match c {
                b'(' => depth += 1,
                b')' if depth == 0 => break,
                b')' => depth -= 1,
                c if depth == 0 && stops.contains(&c) => break,
                _ => {}
            }
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).unwrap()
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    pub(crate) fn pos(&self) -> usize {
        self.pos
    }

    pub(crate) fn error(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.to_string() }
    }
}

/// A strictly increasing sequence cofinal in a limit ordinal.
///
/// The canonical ladder is computed on demand; an explicit ladder is a finite
/// prefix supplied by the caller and errors when indexed past its end.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ladder {
    delta: Ordinal,
    explicit: Option<Vec<Ordinal>>,
}

impl Ladder {
    pub fn canonical(delta: &Ordinal) -> Result<Self> {
        if !delta.is_limit() {
            return Err(Error::NotLimit(delta.clone()));
        }
        Ok(Ladder { delta: delta.clone(), explicit: None })
    }

    pub fn explicit(delta: &Ordinal, prefix: Vec<Ordinal>) -> Result<Self> {
        if !delta.is_limit() {
            return Err(Error::NotLimit(delta.clone()));
        }
        if prefix.is_empty() {
            return Err(Error::InvalidLadder("empty prefix".into()));
        }
        if let Some(bad) = prefix.iter().find(|x| *x >= delta) {
            return Err(Error::InvalidLadder(format!("{bad} is not below {delta}")));
        }
        if prefix.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidLadder("not strictly increasing".into()));
        }
        Ok(Ladder { delta: delta.clone(), explicit: Some(prefix) })
    }

    pub fn delta(&self) -> &Ordinal {
        &self.delta
    }

    pub fn is_canonical(&self) -> bool {
        self.explicit.is_none()
    }

    pub fn get(&self, n: usize) -> Result<Ordinal> {
        match &self.explicit {
            None => self.delta.ladder_element(n),
            Some(v) => v
                .get(n)
                .cloned()
                .ok_or_else(|| Error::LadderExhausted { delta: self.delta.clone(), index: n }),
        }
    }

    pub fn prefix(&self, len: usize) -> Result<Vec<Ordinal>> {
        (0..len).map(|n| self.get(n)).collect()
    }

    /// Least `n` with `ladder[n] > beta`, searching the first `limit` entries.
    pub fn first_above(&self, beta: &Ordinal, limit: usize) -> Option<usize> {
        (0..limit).find(|&n| self.get(n).is_ok_and(|x| &x > beta))
    }
}

pub fn compare(a: &Ordinal, b: &Ordinal) -> Ordering {
    a.cmp(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    #[test]
    fn comparisons() {
        assert_eq!(compare(&Ordinal::zero(), &Ordinal::zero()), Ordering::Equal);
        assert_eq!(compare(&o("w"), &o("5")), Ordering::Greater);
        assert_eq!(compare(&o("w*2+1"), &o("w*2")), Ordering::Greater);
        assert!(o("w^2") > o("w*100+7"));
        assert!(o("w^w") > o("w^5*3"));
    }

    #[test]
    fn addition_absorbs_on_the_left() {
        assert_eq!(Ordinal::one().add(&Ordinal::omega()), o("w"));
        assert_eq!(Ordinal::omega().add(&Ordinal::one()), o("w+1"));
        assert_eq!(o("w*2+3").add(&o("w^2")), o("w^2"));
        assert_eq!(o("w^2+w").add(&o("w*3+1")), o("w^2+w*4+1"));
    }

    #[test]
    fn multiplication() {
        assert_eq!(Ordinal::nat(2).mul(&Ordinal::omega()), o("w"));
        assert_eq!(Ordinal::omega().mul(&Ordinal::nat(2)), o("w*2"));
        assert_eq!(o("w+1").mul(&o("w+1")), o("w^2+w+1"));
        assert_eq!(o("w").mul(&o("w")), o("w^2"));
        assert_eq!(o("w^2*3+1").mul(&o("2")), o("w^2*6+1"));
    }

    #[test]
    fn limits_and_successors() {
        assert!(o("w*2").is_limit());
        assert!(!o("w+3").is_limit());
        assert!(!Ordinal::zero().is_limit());
        assert_eq!(o("w+3").predecessor(), Some(o("w+2")));
        assert_eq!(o("w*2+1").predecessor(), Some(o("w*2")));
        assert_eq!(o("w").predecessor(), None);
    }

    #[test]
    fn canonical_ladders() {
        let l = |s: &str| Ladder::canonical(&o(s)).unwrap().prefix(4).unwrap();
        assert_eq!(l("w"), vec![o("0"), o("1"), o("2"), o("3")]);
        assert_eq!(l("w*2")[..3], [o("w"), o("w+1"), o("w+2")]);
        assert_eq!(l("w^2")[..3], [o("w"), o("w*2"), o("w*3")]);
        assert_eq!(l("w^w")[..3], [o("1"), o("w"), o("w^2")]);
        assert_eq!(l("w^2+w")[..2], [o("w^2"), o("w^2+1")]);
        assert!(Ladder::canonical(&o("w+1")).is_err());
        assert!(Ladder::canonical(&Ordinal::zero()).is_err());
    }

    #[test]
    fn explicit_ladders_are_validated() {
        let d = o("w");
        assert!(Ladder::explicit(&d, vec![o("2"), o("1")]).is_err());
        assert!(Ladder::explicit(&d, vec![o("w")]).is_err());
        let l = Ladder::explicit(&d, vec![o("0"), o("2"), o("4")]).unwrap();
        assert_eq!(l.get(1).unwrap(), o("2"));
        assert!(matches!(l.get(3), Err(Error::LadderExhausted { .. })));
    }

    #[test]
    fn text_round_trip() {
        for s in ["0", "7", "w", "w+1", "w*2+3", "w^2*3+w+1", "w^w", "w^(w+1)*2", "w^w^2"] {
            assert_eq!(o(s).to_string(), s);
        }
        assert_eq!(o("w^1"), o("w"));
        assert_eq!(o("w^0*3"), o("3"));
        assert_eq!(o("2+w"), o("w"));
    }

    #[test]
    fn malformed_text_is_rejected() {
        for s in ["", "w^", "w*", "w*0", "+", "w+", "x", "w^(w", "3w"] {
            assert!(s.parse::<Ordinal>().is_err(), "{s:?} should not parse");
        }
    }
}
