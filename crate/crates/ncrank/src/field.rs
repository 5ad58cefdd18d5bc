//! Exact scalar arithmetic: prime fields with a runtime modulus, and
//! arbitrary-precision rationals.
//!
//! Every algorithm in this crate is generic over [`Field`]. The field value
//! itself acts as the arithmetic context (a prime field is just its modulus),
//! so matrices can carry it around cheaply.

use std::fmt;

use num::{BigInt, BigRational, One, Signed, Zero};
use rand_core::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Field description as it appears in instance files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum FieldSpec {
    #[serde(rename = "prime-field")]
    PrimeField { p: u64 },
    #[serde(rename = "rationals")]
    Rationals,
}

impl FieldSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            FieldSpec::PrimeField { p } => {
                PrimeField::new(*p)?;
                Ok(())
            }
            FieldSpec::Rationals => Ok(()),
        }
    }
}

/// Arithmetic context for an exact field.
///
/// Operations take the context by reference so that prime-field elements can
/// stay plain `u64` residues. Elements are always kept canonical: residues in
/// `[0, p)`, rationals in lowest terms (the latter is maintained by
/// `BigRational` itself).
pub trait Field: Clone + PartialEq + Eq + fmt::Debug + Send + Sync + 'static {
    type Elem: Clone + PartialEq + Eq + fmt::Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse; `None` for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn from_i64(&self, v: i64) -> Self::Elem;
    /// Draw an element suitable for randomized rank arguments: uniform over a
    /// finite field, a bounded nonnegative integer over the rationals.
    fn sample(&self, rng: &mut dyn RngCore) -> Self::Elem;
    /// Field order, `None` when infinite.
    fn order(&self) -> Option<u64>;
    /// Canonical display form, used in reports.
    fn format(&self, a: &Self::Elem) -> String;
    /// Inverse of [`Field::format`], used when re-validating reports.
    fn parse(&self, s: &str) -> Result<Self::Elem>;
}

/// F_p with a runtime modulus `p < 2^63`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if p < 2 || p >= (1 << 63) {
            return Err(Error::validation(format!(
                "prime modulus must satisfy 2 <= p < 2^63, got {p}"
            )));
        }
        if !is_prime_u64(p) {
            return Err(Error::validation(format!("{p} is not prime")));
        }
        Ok(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn reduce_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        1 % self.p
    }

    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }

    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }

    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.p as u128) as u64
    }

    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            return None;
        }
        // Extended Euclid over signed 128-bit; moduli fit in 63 bits.
        let (mut r0, mut r1) = (self.p as i128, *a as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Some(t0.rem_euclid(self.p as i128) as u64)
    }

    fn from_i64(&self, v: i64) -> u64 {
        self.reduce_i64(v)
    }

    fn sample(&self, rng: &mut dyn RngCore) -> u64 {
        // Rejection sampling for an exactly uniform residue.
        let zone = u64::MAX - (u64::MAX % self.p);
        loop {
            let v = rng.next_u64();
            if v < zone {
                return v % self.p;
            }
        }
    }

    fn order(&self) -> Option<u64> {
        Some(self.p)
    }

    fn format(&self, a: &u64) -> String {
        a.to_string()
    }

    fn parse(&self, s: &str) -> Result<u64> {
        let v: i64 = s
            .parse()
            .map_err(|_| Error::validation(format!("invalid field element {s:?}")))?;
        Ok(self.reduce_i64(v))
    }
}

/// The rational numbers, backed by arbitrary-precision integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Rationals;

/// Sampling pool size for rational coefficients; large enough that the
/// Schwartz-Zippel failure bound is negligible at desk-scale dimensions.
const RATIONAL_SAMPLE_POOL: u64 = 1 << 20;

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }

    fn one(&self) -> BigRational {
        BigRational::one()
    }

    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }

    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }

    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }

    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }

    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }

    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        if a.is_zero() {
            None
        } else {
            Some(a.recip())
        }
    }

    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    fn sample(&self, rng: &mut dyn RngCore) -> BigRational {
        let v = rng.next_u64() % RATIONAL_SAMPLE_POOL;
        BigRational::from_integer(BigInt::from(v))
    }

    fn order(&self) -> Option<u64> {
        None
    }

    fn format(&self, a: &BigRational) -> String {
        if a.denom().is_one() {
            a.numer().to_string()
        } else if a.denom().is_negative() {
            // BigRational keeps denominators positive, but be explicit.
            format!("{}/{}", -a.numer(), -a.denom())
        } else {
            format!("{}/{}", a.numer(), a.denom())
        }
    }

    fn parse(&self, s: &str) -> Result<BigRational> {
        let bad = || Error::validation(format!("invalid field element {s:?}"));
        match s.split_once('/') {
            None => {
                let n: BigInt = s.parse().map_err(|_| bad())?;
                Ok(BigRational::from_integer(n))
            }
            Some((num, den)) => {
                let n: BigInt = num.parse().map_err(|_| bad())?;
                let d: BigInt = den.parse().map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(bad());
                }
                Ok(BigRational::new(n, d))
            }
        }
    }
}

/// Deterministic Miller-Rabin, exact for all `u64` inputs with this witness set.
fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = ((x as u128 * x as u128) % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pow_mod(mut base: u64, mut exp: u64, modulus: u64) -> u64 {
    let mut acc = 1u64;
    base %= modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((acc as u128 * base as u128) % modulus as u128) as u64;
        }
        base = ((base as u128 * base as u128) % modulus as u128) as u64;
        exp >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded_rng;

    #[test]
    fn prime_field_construction() {
        assert!(PrimeField::new(2).is_ok());
        assert!(PrimeField::new(101).is_ok());
        assert!(PrimeField::new(1_000_003).is_ok());
        assert!(PrimeField::new(1).is_err());
        assert!(PrimeField::new(91).is_err()); // 7 * 13
        assert!(PrimeField::new(1 << 63).is_err());
    }

    #[test]
    fn prime_field_arithmetic() {
        let f = PrimeField::new(101).unwrap();
        assert_eq!(f.add(&100, &5), 4);
        assert_eq!(f.sub(&3, &7), 97);
        assert_eq!(f.neg(&0), 0);
        assert_eq!(f.mul(&50, &50), 2500 % 101);
        for a in 1..101u64 {
            let inv = f.inv(&a).unwrap();
            assert_eq!(f.mul(&a, &inv), 1);
        }
        assert_eq!(f.inv(&0), None);
        assert_eq!(f.from_i64(-1), 100);
    }

    #[test]
    fn prime_field_sampling_is_canonical_and_deterministic() {
        let f = PrimeField::new(13).unwrap();
        let mut r1 = seeded_rng(7, 0);
        let mut r2 = seeded_rng(7, 0);
        for _ in 0..200 {
            let a = f.sample(&mut r1);
            assert!(a < 13);
            assert_eq!(a, f.sample(&mut r2));
        }
    }

    #[test]
    fn rationals_arithmetic() {
        let f = Rationals;
        let half = f.inv(&f.from_i64(2)).unwrap();
        let third = f.inv(&f.from_i64(3)).unwrap();
        let sum = f.add(&half, &third);
        assert_eq!(f.format(&sum), "5/6");
        assert_eq!(f.format(&f.from_i64(-4)), "-4");
        assert_eq!(f.inv(&f.zero()), None);
        assert_eq!(f.mul(&half, &f.from_i64(2)), f.one());
    }
}
