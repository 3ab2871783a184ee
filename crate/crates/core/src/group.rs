//! The ordered group `G = (+) Z*a(i)` of finitely supported integer
//! combinations of ordinal-indexed generators, ordered anti-lexicographically:
//! the sign of an element is the sign of its coefficient at the largest
//! generator index in its support.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ordinal::{Ordinal, Parser};

#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct GroupElement {
    support: BTreeMap<Ordinal, i64>,
}

impl GroupElement {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The basis element `a(index)`.
    pub fn generator(index: Ordinal) -> Self {
        Self::scaled_generator(index, 1)
    }

    pub fn scaled_generator(index: Ordinal, coeff: i64) -> Self {
        let mut support = BTreeMap::new();
        if coeff != 0 {
            support.insert(index, coeff);
        }
        GroupElement { support }
    }

    pub fn from_pairs<I: IntoIterator<Item = (Ordinal, i64)>>(pairs: I) -> Self {
        let mut g = Self::zero();
        for (i, c) in pairs {
            g.add_at(&i, c);
        }
        g
    }

    fn add_at(&mut self, index: &Ordinal, c: i64) {
        if c == 0 {
            return;
        }
        match self.support.get_mut(index) {
            Some(v) => {
                *v += c;
                if *v == 0 {
                    self.support.remove(index);
                }
            }
            None => {
                self.support.insert(index.clone(), c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    pub fn coeff(&self, index: &Ordinal) -> i64 {
        self.support.get(index).copied().unwrap_or(0)
    }

    /// Support entries in increasing index order.
    pub fn iter(&self) -> impl Iterator<Item = (&Ordinal, i64)> {
        self.support.iter().map(|(k, v)| (k, *v))
    }

    pub fn indices(&self) -> impl Iterator<Item = &Ordinal> {
        self.support.keys()
    }

    /// Largest generator index in the support.
    pub fn leading_index(&self) -> Option<&Ordinal> {
        self.support.keys().next_back()
    }

    pub fn leading_coeff(&self) -> i64 {
        self.support.values().next_back().copied().unwrap_or(0)
    }

    pub fn signum(&self) -> i64 {
        self.leading_coeff().signum()
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_nonnegative(&self) -> bool {
        self.signum() >= 0
    }

    pub fn scale(&self, k: i64) -> Self {
        if k == 0 {
            return Self::zero();
        }
        GroupElement { support: self.support.iter().map(|(i, c)| (i.clone(), c * k)).collect() }
    }

    /// Integer coordinates over `basis`; errors if the support is not
    /// contained in the basis.
    pub fn coordinates(&self, basis: &[Ordinal]) -> Result<Vec<i64>> {
        if let Some(missing) = self.indices().find(|i| !basis.contains(i)) {
            return Err(Error::NotInBasis(missing.clone()));
        }
        Ok(basis.iter().map(|b| self.coeff(b)).collect())
    }

    /// `Some(i)` when the element is exactly the basis element `a(i)`.
    pub fn as_generator(&self) -> Option<&Ordinal> {
        match self.support.iter().next() {
            Some((i, 1)) if self.support.len() == 1 => Some(i),
            _ => None,
        }
    }
}

impl Ord for GroupElement {
    fn cmp(&self, other: &Self) -> Ordering {
        // The top differing index decides.
        let mut a = self.support.iter().rev().peekable();
        let mut b = other.support.iter().rev().peekable();
        loop {
            match (a.peek(), b.peek()) {
                (None, None) => return Ordering::Equal,
                (Some((_, &ca)), None) => return ca.cmp(&0),
                (None, Some((_, &cb))) => return 0.cmp(&cb),
                (Some((ia, &ca)), Some((ib, &cb))) => match ia.cmp(ib) {
                    Ordering::Greater => return ca.cmp(&0),
                    Ordering::Less => return 0.cmp(&cb),
                    Ordering::Equal if ca != cb => return ca.cmp(&cb),
                    Ordering::Equal => {
                        a.next();
                        b.next();
                    }
                },
            }
        }
    }
}

impl PartialOrd for GroupElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &GroupElement {
    type Output = GroupElement;
    fn add(self, rhs: &GroupElement) -> GroupElement {
        let mut out = self.clone();
        for (i, c) in &rhs.support {
            out.add_at(i, *c);
        }
        out
    }
}

impl Sub for &GroupElement {
    type Output = GroupElement;
    fn sub(self, rhs: &GroupElement) -> GroupElement {
        let mut out = self.clone();
        for (i, c) in &rhs.support {
            out.add_at(i, -*c);
        }
        out
    }
}

impl Neg for &GroupElement {
    type Output = GroupElement;
    fn neg(self) -> GroupElement {
        self.scale(-1)
    }
}

impl Add for GroupElement {
    type Output = GroupElement;
    fn add(self, rhs: GroupElement) -> GroupElement {
        &self + &rhs
    }
}

impl Sub for GroupElement {
    type Output = GroupElement;
    fn sub(self, rhs: GroupElement) -> GroupElement {
        &self - &rhs
    }
}

impl Neg for GroupElement {
    type Output = GroupElement;
    fn neg(self) -> GroupElement {
        self.scale(-1)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (n, (i, c)) in self.support.iter().enumerate() {
            if n > 0 && *c > 0 {
                write!(f, "+")?;
            }
            write!(f, "{c}*a({i})")?;
        }
        Ok(())
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G[{self}]")
    }
}

impl GroupElement {
    pub(crate) fn parse_from(p: &mut Parser<'_>) -> Result<Self> {
        if p.peek() == Some(b'0') {
            // Either the zero element or a term starting with a digit 0,
            // which the grammar does not allow.
            p.bump();
            return Ok(Self::zero());
        }
        let mut g = Self::zero();
        let mut first = true;
        loop {
            let sign = match p.peek() {
                Some(b'-') => {
                    p.bump();
                    -1
                }
                Some(b'+') if !first => {
                    p.bump();
                    1
                }
                _ if first => 1,
                _ => break,
            };
            let c = p.nat()? as i64;
            p.expect(b'*')?;
            p.expect(b'a')?;
            p.expect(b'(')?;
            let inner = p.balanced_until(&[]);
            let idx: Ordinal = inner.parse()?;
            p.expect(b')')?;
            g.add_at(&idx, sign * c);
            first = false;
        }
        Ok(g)
    }
}

impl FromStr for GroupElement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser::new(s);
        let g = Self::parse_from(&mut p)?;
        if !p.at_end() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(g)
    }
}

impl Serialize for GroupElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GroupElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `a(i)` for a natural index `i`.
pub fn gen(i: u64) -> GroupElement {
    GroupElement::generator(Ordinal::nat(i))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        assert!((&gen(0).scale(2) + &gen(0).scale(-2)).is_zero());
        let g = &gen(0) + &gen(1);
        assert_eq!(g.to_string(), "1*a(0)+1*a(1)");
        let h = &gen(0).scale(3) - &gen(1);
        assert_eq!(-&h, &gen(1) - &gen(0).scale(3));
        assert_eq!((-&h).to_string(), "-3*a(0)+1*a(1)");
    }

    #[test]
    fn anti_lexicographic_order() {
        assert!(gen(0).scale(1_000_000) < gen(1));
        assert_eq!(GroupElement::zero().cmp(&GroupElement::zero()), Ordering::Equal);
        assert!(&gen(1) - &gen(0).scale(5) > gen(0));
        assert!(gen(0).scale(-7) < GroupElement::zero());
        assert!(GroupElement::generator("w".parse().unwrap()) > gen(40).scale(9));
    }

    #[test]
    fn coordinates_and_leading_index() {
        let g = &gen(0) + &gen(2);
        assert_eq!(g.leading_index(), Some(&Ordinal::nat(2)));
        let h = &gen(0).scale(2) - &gen(1);
        let basis = [Ordinal::nat(0), Ordinal::nat(1)];
        assert_eq!(h.coordinates(&basis).unwrap(), vec![2, -1]);
        assert!(g.coordinates(&basis).is_err());
        for k in [1, 10, 1 << 40] {
            assert!((&gen(1) - &gen(0).scale(k)).is_positive());
        }
    }

    #[test]
    fn text_round_trip() {
        for s in ["0", "2*a(0)-1*a(w)", "-1*a(0)+2*a(w*2+1)", "1*a(w^w)"] {
            assert_eq!(s.parse::<GroupElement>().unwrap().to_string(), s);
        }
        assert!("2*a(".parse::<GroupElement>().is_err());
        assert!("a(0)".parse::<GroupElement>().is_err());
    }
}
