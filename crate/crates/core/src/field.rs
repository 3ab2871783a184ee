//! Exact coefficient fields and the Calkin-Wilf enumeration of the positive
//! rationals.

use std::fmt;
use std::hash::Hash;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rationals.
pub type Q = BigRational;

pub trait Field:
    Clone
    + Eq
    + Hash
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    /// Short name used in configuration blocks, e.g. `Q` or `GF(5)`.
    fn name() -> String;

    /// Number of elements, `None` for an infinite field.
    fn order() -> Option<u64>;

    /// A fixed enumeration of the nonzero elements; `None` past the end of a
    /// finite field.
    fn nth_nonzero(n: usize) -> Option<Self>;

    fn from_i64(n: i64) -> Self;

    fn parse_scalar(s: &str) -> Option<Self>;

    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Self::one() / self.clone())
        }
    }
}

pub fn rational(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

impl Field for Q {
    fn name() -> String {
        "Q".into()
    }

    fn order() -> Option<u64> {
        None
    }

    fn nth_nonzero(n: usize) -> Option<Self> {
        let r = calkin_wilf(&BigUint::from(n / 2));
        Some(if n.is_multiple_of(2) { r } else { -r })
    }

    fn from_i64(n: i64) -> Self {
        int(n)
    }

    fn parse_scalar(s: &str) -> Option<Self> {
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.parse::<BigInt>().ok()?, d.parse::<BigInt>().ok()?),
            None => (s.parse::<BigInt>().ok()?, BigInt::one()),
        };
        if d.is_zero() {
            None
        } else {
            Some(Q::new(n, d))
        }
    }
}

/// The prime field with `P` elements. `P` must be prime.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gf<const P: u64>(u64);

impl<const P: u64> Gf<P> {
    pub fn new(v: i64) -> Self {
        Gf(v.rem_euclid(P as i64) as u64)
    }

    pub fn value(self) -> u64 {
        self.0
    }
}

impl<const P: u64> fmt::Display for Gf<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u64> fmt::Debug for Gf<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}%{}", self.0, P)
    }
}

impl<const P: u64> Add for Gf<P> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Gf((self.0 + o.0) % P)
    }
}

impl<const P: u64> Sub for Gf<P> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Gf((self.0 + P - o.0) % P)
    }
}

impl<const P: u64> Mul for Gf<P> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Gf(((self.0 as u128 * o.0 as u128) % P as u128) as u64)
    }
}

impl<const P: u64> Neg for Gf<P> {
    type Output = Self;
    fn neg(self) -> Self {
        Gf((P - self.0) % P)
    }
}

impl<const P: u64> Div for Gf<P> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        assert!(o.0 != 0, "division by zero in GF({P})");
        // Fermat inverse.
        let mut inv = Gf::<P>(1);
        let mut base = o;
        let mut e = P - 2;
        while e > 0 {
            if e & 1 == 1 {
                inv = inv * base;
            }
            base = base * base;
            e >>= 1;
        }
        self * inv
    }
}

impl<const P: u64> Zero for Gf<P> {
    fn zero() -> Self {
        Gf(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl<const P: u64> One for Gf<P> {
    fn one() -> Self {
        Gf(1 % P)
    }
}

impl<const P: u64> Field for Gf<P> {
    fn name() -> String {
        format!("GF({P})")
    }

    fn order() -> Option<u64> {
        Some(P)
    }

    fn nth_nonzero(n: usize) -> Option<Self> {
        (n as u64).checked_add(1).filter(|&v| v < P).map(Gf)
    }

    fn from_i64(n: i64) -> Self {
        Gf::new(n)
    }

    fn parse_scalar(s: &str) -> Option<Self> {
        s.parse::<i64>().ok().map(Gf::new)
    }
}

/// The `n`-th positive rational (0-based) in breadth-first Calkin-Wilf order:
/// `1, 1/2, 2, 1/3, 3/2, 2/3, 3, ...`. A bijection from the naturals onto
/// the positive rationals.
pub fn calkin_wilf(n: &BigUint) -> Q {
    let index = n + 1u32;
    let bits = index.bits();
    let mut a = BigInt::one();
    let mut b = BigInt::one();
    for i in (0..bits - 1).rev() {
        if index.bit(i) {
            a += &b;
        } else {
            b += &a;
        }
    }
    Q::new(a, b)
}

/// Inverse of [`calkin_wilf`]. Panics on non-positive input.
pub fn calkin_wilf_index(r: &Q) -> BigUint {
    assert!(r.is_positive(), "Calkin-Wilf index of a non-positive rational");
    let mut p = r.numer().magnitude().clone();
    let mut q = r.denom().magnitude().clone();
    // Path bits from the node up to the root, run-length encoded.
    let mut runs: Vec<(bool, BigUint)> = Vec::new();
    let one = BigUint::one();
    while !(p == one && q == one) {
        if p < q {
            let k = (&q - 1u32) / &p;
            q -= &k * &p;
            runs.push((false, k));
        } else {
            let k = (&p - 1u32) / &q;
            p -= &k * &q;
            runs.push((true, k));
        }
    }
    let mut index = BigUint::one();
    for (bit, k) in runs.into_iter().rev() {
        let k = k.to_u64().expect("Calkin-Wilf path too long");
        index <<= k;
        if bit {
            index += (BigUint::one() << k) - 1u32;
        }
    }
    index - 1u32
}

/// Least natural `k >= 1` with `1/k < eps`.
pub fn reciprocal_below(eps: &Q) -> BigUint {
    assert!(eps.is_positive());
    let k = (eps.denom() / eps.numer()).magnitude().clone();
    k + 1u32
}

/// Sum of the continued-fraction partial quotients of `r > 0`, i.e. the
/// depth of `r` in the Calkin-Wilf tree: `calkin_wilf_index(r) + 1` has this
/// many bits.
pub fn calkin_wilf_depth(r: &Q) -> BigUint {
    assert!(r.is_positive(), "Calkin-Wilf depth of a non-positive rational");
    let mut p = r.numer().magnitude().clone();
    let mut q = r.denom().magnitude().clone();
    let mut depth = BigUint::zero();
    while !q.is_zero() {
        depth += &p / &q;
        let t = &p % &q;
        p = q;
        q = t;
    }
    depth
}
