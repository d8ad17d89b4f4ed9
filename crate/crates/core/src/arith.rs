//! Exact rational arithmetic on the circle group R/Z and denominator-support
//! analysis. Everything downstream (characters, weights, norms) is built on
//! the types here; no floating point appears anywhere.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// A prime number, verified by deterministic trial division at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prime(u64);

impl Prime {
    pub fn new(n: u64) -> Result<Self> {
        if is_prime(n) {
            Ok(Prime(n))
        } else {
            Err(Error::NotPrime(n))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn to_bigint(self) -> BigInt {
        BigInt::from(self.0)
    }

    /// p^exp as an exact integer.
    pub fn power(self, exp: u32) -> BigInt {
        self.to_bigint().pow(exp)
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Deterministic primality check by trial division; inputs are machine-width.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.checked_mul(d).is_some_and(|s| s <= n) {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Validates a pair of distinct primes in one step.
pub fn distinct_primes(p: u64, q: u64) -> Result<(Prime, Prime)> {
    let p = Prime::new(p)?;
    let q = Prime::new(q)?;
    if p == q {
        return Err(Error::EqualPrimes(p.get()));
    }
    Ok((p, q))
}

/// The smallest prime not contained in `excluded`.
pub fn smallest_prime_outside(excluded: &[u64]) -> Prime {
    let mut n = 2u64;
    loop {
        if is_prime(n) && !excluded.contains(&n) {
            return Prime(n);
        }
        n += 1;
    }
}

/// An element of the circle group R/Z: an exact rational reduced into [0, 1),
/// stored in lowest terms. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TorusElement(BigRational);

impl TorusElement {
    /// Canonical representative of `r` modulo Z.
    pub fn new(r: BigRational) -> Self {
        let floor = r.floor();
        TorusElement(r - floor)
    }

    pub fn zero() -> Self {
        TorusElement(BigRational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(&self.0 + &other.0)
    }

    pub fn neg(&self) -> Self {
        Self::new(-self.0.clone())
    }

    /// n·t mod Z.
    pub fn scale(&self, n: &BigInt) -> Self {
        Self::new(&self.0 * BigRational::from(n.clone()))
    }

    /// t / d mod Z for a non-zero integer d.
    pub fn div_int(&self, d: &BigInt) -> Self {
        Self::new(&self.0 / BigRational::from(d.clone()))
    }
}

impl fmt::Display for TorusElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_rational(&self.0))
    }
}

/// Serializes a rational as "a/b", omitting "/b" when the denominator is 1.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses "a/b" or "a" into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidParameter(format!("cannot parse {s:?} as a rational a/b"));
    let mut parts = s.splitn(2, '/');
    let numer: BigInt = parts.next().unwrap_or("").trim().parse().map_err(|_| bad())?;
    let denom: BigInt = match parts.next() {
        Some(d) => d.trim().parse().map_err(|_| bad())?,
        None => BigInt::one(),
    };
    if denom.is_zero() {
        return Err(Error::InvalidParameter(format!("{s:?} has denominator zero")));
    }
    Ok(BigRational::new(numer, denom))
}

/// The set of primes dividing some denominator; always non-empty-checked at
/// construction via the primality of each inserted member.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PrimeSupport(BTreeSet<u64>);

impl PrimeSupport {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, p: u64) -> bool {
        self.0.contains(&p)
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.iter().copied()
    }

    pub fn to_vec(&self) -> Vec<u64> {
        self.0.iter().copied().collect()
    }

    pub fn is_subset_of(&self, allowed: &[u64]) -> bool {
        self.0.iter().all(|p| allowed.contains(p))
    }
}

/// Prime factors of the reduced denominator of `t`.
///
/// Denominators arising here are products of small primes, so trial division
/// is exact and fast.
pub fn denominator_support(t: &TorusElement) -> PrimeSupport {
    let mut n: BigUint = t
        .denom()
        .to_biguint()
        .expect("reduced denominators are positive");
    let mut support = BTreeSet::new();
    let mut d = 2u64;
    while !n.is_one() {
        let bd = BigUint::from(d);
        if &bd * &bd > n {
            // remaining cofactor is prime
            let p = u64::try_from(&n).expect("prime cofactor exceeds machine width");
            support.insert(p);
            break;
        }
        if (&n % &bd).is_zero() {
            support.insert(d);
            while (&n % &bd).is_zero() {
                n /= &bd;
            }
        }
        d = if d == 2 { 3 } else { d + 2 };
    }
    PrimeSupport(support)
}

/// Whether `t` lies in Z[1/p]/Z, i.e. whether the denominator of `t` is a
/// power of `p`. This is exactly the condition "t·p^n tends to 0 mod 1".
pub fn is_p_power_character(t: &TorusElement, p: Prime) -> bool {
    denominator_support(t).is_subset_of(&[p.get()])
}
