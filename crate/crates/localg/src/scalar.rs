//! Exact scalar domains: the rationals and small prime fields.

use std::fmt;
use std::hash::Hash;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};

/// An exact field. Everything in the crate is generic over this trait; there is
/// no floating point anywhere.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + Eq
    + Hash
    + Ord
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// 0 for the rationals, p for F_p.
    fn characteristic() -> u32;

    /// Number of field elements, `None` when infinite.
    fn order() -> Option<u64>;

    /// Short name used in JSON documents and reports ("Q", "F5", ...).
    fn field_name() -> String;

    fn inv(&self) -> Option<Self>;

    fn from_i64(v: i64) -> Self;

    /// Position of the element in the canonical enumeration `0, 1, ..., p-1`.
    /// Only meaningful for finite fields.
    fn index(&self) -> u64;

    fn from_index(i: u64) -> Self;

    fn to_json(&self) -> Value;

    fn from_json(v: &Value) -> Result<Self>;

    fn div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|i| self.clone() * i)
    }

    fn is_finite() -> bool {
        Self::order().is_some()
    }
}

/// Returns true when `n` is prime. Used in const context to validate `Fp<P>`.
pub const fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Element of the prime field F_P, stored as its least non-negative residue.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Fp<const P: u32>(u32);

impl<const P: u32> Fp<P> {
    const VALID: () = assert!(P >= 2 && P <= 257 && is_prime(P), "modulus must be a prime <= 257");

    pub fn new(v: i64) -> Self {
        #[allow(clippy::let_unit_value)]
        let () = Self::VALID;
        Fp(v.rem_euclid(P as i64) as u32)
    }

    pub fn value(self) -> u32 {
        self.0
    }

    pub fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = Fp::new(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }
}

impl<const P: u32> fmt::Debug for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u32> fmt::Display for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u32> Add for Fp<P> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Fp((self.0 + o.0) % P)
    }
}

impl<const P: u32> Sub for Fp<P> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Fp((self.0 + P - o.0) % P)
    }
}

impl<const P: u32> Mul for Fp<P> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Fp(((self.0 as u64 * o.0 as u64) % P as u64) as u32)
    }
}

impl<const P: u32> Neg for Fp<P> {
    type Output = Self;
    fn neg(self) -> Self {
        Fp((P - self.0) % P)
    }
}

impl<const P: u32> Zero for Fp<P> {
    fn zero() -> Self {
        Fp::new(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl<const P: u32> One for Fp<P> {
    fn one() -> Self {
        Fp::new(1)
    }
}

impl<const P: u32> Scalar for Fp<P> {
    fn characteristic() -> u32 {
        P
    }

    fn order() -> Option<u64> {
        Some(P as u64)
    }

    fn field_name() -> String {
        format!("F{P}")
    }

    fn inv(&self) -> Option<Self> {
        if self.0 == 0 {
            None
        } else {
            Some(self.pow(P as u64 - 2))
        }
    }

    fn from_i64(v: i64) -> Self {
        Fp::new(v)
    }

    fn index(&self) -> u64 {
        self.0 as u64
    }

    fn from_index(i: u64) -> Self {
        Fp::new(i as i64)
    }

    fn to_json(&self) -> Value {
        Value::from(self.0)
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::Number(n) => n.as_i64().map(Fp::new).ok_or_else(|| Error::Parse(format!("not an integer: {n}"))),
            Value::String(s) => {
                s.trim().parse::<i64>().map(Fp::new).map_err(|_| Error::Parse(format!("not an integer: {s:?}")))
            }
            other => Err(Error::Parse(format!("expected a scalar, found {other}"))),
        }
    }
}

impl Scalar for BigRational {
    fn characteristic() -> u32 {
        0
    }

    fn order() -> Option<u64> {
        None
    }

    fn field_name() -> String {
        "Q".to_string()
    }

    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn index(&self) -> u64 {
        panic!("the rationals are not enumerable")
    }

    fn from_index(_: u64) -> Self {
        panic!("the rationals are not enumerable")
    }

    fn to_json(&self) -> Value {
        Value::String(format_rational(self))
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::Number(n) => {
                n.as_i64().map(Self::from_i64).ok_or_else(|| Error::Parse(format!("not an integer: {n}")))
            }
            Value::String(s) => parse_rational(s),
            other => Err(Error::Parse(format!("expected a scalar, found {other}"))),
        }
    }
}

/// "num/den" with den omitted when it is 1.
pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

/// Small-integer view of a rational, used when printing compact witnesses.
pub fn rational_to_i64(q: &BigRational) -> Option<i64> {
    if q.denom().is_one() && q.numer().abs() < BigInt::from(i64::MAX) {
        q.numer().to_i64()
    } else {
        None
    }
}

/// All elements of a finite field in index order.
pub fn field_elements<S: Scalar>() -> Vec<S> {
    let q = S::order().expect("finite field required");
    (0..q).map(S::from_index).collect()
}
