//! Arbitrary-precision rational scalars and small numeric helpers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational scalar used everywhere in the crate.
pub type Rat = BigRational;

pub fn rat_i(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_u(n: u64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn factorial(n: u64) -> Rat {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    Rat::from_integer(acc)
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for j in 0..k {
        acc = acc * (n - j) as u128 / (j + 1) as u128;
    }
    acc as u64
}

/// Rational q written as an exact fraction of u64 parts when possible.
pub fn rat_is_positive_integer(q: &Rat) -> Option<u64> {
    if q.is_integer() && q.is_positive() {
        let n = q.to_integer();
        u64::try_from(&n).ok()
    } else {
        None
    }
}

/// Deterministic stream of pseudo-random values for exact specialization.
///
/// SplitMix64; hand-rolled so output is stable across dependency upgrades.
#[derive(Debug, Clone)]
pub struct DetRng {
    state: u64,
}

impl DetRng {
    pub fn new(seed: u64) -> Self {
        DetRng { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Small nonzero rational with numerator in [-limit, limit] and
    /// denominator in [1, den_limit].
    pub fn small_rat(&mut self, limit: u64, den_limit: u64) -> Rat {
        let span = 2 * limit + 1;
        loop {
            let num = (self.next_u64() % span) as i64 - limit as i64;
            if num == 0 {
                continue;
            }
            let den = (self.next_u64() % den_limit) as i64 + 1;
            return ratio(num, den);
        }
    }
}

pub fn rat_zero() -> Rat {
    Rat::zero()
}

pub fn rat_one() -> Rat {
    Rat::one()
}

/// Serialize a rational as its canonical "n/d" (or integer) string.
pub fn serialize_rat_string<S: serde::Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// Parse a rational from "n" or "n/d" form.
pub fn parse_rat_string(raw: &str) -> Result<Rat, String> {
    use num_bigint::BigInt;
    use std::str::FromStr;
    match raw.split_once('/') {
        Some((n, m)) => {
            let n = BigInt::from_str(n.trim()).map_err(|e| e.to_string())?;
            let m = BigInt::from_str(m.trim()).map_err(|e| e.to_string())?;
            if num_traits::Zero::is_zero(&m) {
                return Err("zero denominator".into());
            }
            Ok(Rat::new(n, m))
        }
        None => Ok(Rat::from_integer(
            BigInt::from_str(raw.trim()).map_err(|e| e.to_string())?,
        )),
    }
}
