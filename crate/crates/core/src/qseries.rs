//! q-Pochhammer products, Gaussian binomial coefficients and the alternating
//! inversion coefficients `c_k` that undo surjection moments.

use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Isomorphism class of a finite simple module or group, reduced to the data
/// that surjection counts depend on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", try_from = "RawSimpleType")]
pub enum SimpleType {
    /// Abelian simple type whose endomorphism field has `h` elements.
    Abelian { h: u64 },
    /// Non-abelian simple type with `aut_count` automorphisms.
    #[serde(rename = "nonabelian")]
    NonAbelian { aut_count: u64 },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum RawSimpleType {
    Abelian {
        h: u64,
    },
    #[serde(rename = "nonabelian")]
    NonAbelian {
        aut_count: u64,
    },
}

impl TryFrom<RawSimpleType> for SimpleType {
    type Error = Error;

    fn try_from(raw: RawSimpleType) -> Result<Self> {
        match raw {
            RawSimpleType::Abelian { h } => SimpleType::abelian(h),
            RawSimpleType::NonAbelian { aut_count } => SimpleType::non_abelian(aut_count),
        }
    }
}

impl SimpleType {
    pub fn abelian(h: u64) -> Result<Self> {
        if prime_power_base(h).is_none() {
            return Err(Error::input(format!(
                "abelian simple type needs a prime-power field size, got h = {h}"
            )));
        }
        Ok(SimpleType::Abelian { h })
    }

    pub fn non_abelian(aut_count: u64) -> Result<Self> {
        if aut_count == 0 {
            return Err(Error::input("non-abelian simple type needs aut_count >= 1"));
        }
        Ok(SimpleType::NonAbelian { aut_count })
    }

    /// The prime `p` when this is the simple module `F_p` (field size prime).
    pub fn prime(&self) -> Option<u64> {
        match *self {
            SimpleType::Abelian { h } if prime_power_base(h) == Some(h) => Some(h),
            _ => None,
        }
    }
}

impl fmt::Display for SimpleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimpleType::Abelian { h } => write!(f, "F_{h}"),
            SimpleType::NonAbelian { aut_count } => write!(f, "G[aut={aut_count}]"),
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Returns `p` when `n = p^a` with `p` prime and `a >= 1`.
pub fn prime_power_base(n: u64) -> Option<u64> {
    if n < 2 {
        return None;
    }
    let mut p = 2u64;
    while p.saturating_mul(p) <= n && !n.is_multiple_of(p) {
        p += 1;
    }
    if !n.is_multiple_of(p) {
        return Some(n); // n itself is prime
    }
    let mut m = n;
    while m.is_multiple_of(p) {
        m /= p;
    }
    (m == 1).then_some(p)
}

/// `(h-1)(h^2-1)...(h^k-1)`; the empty product for `k = 0` is 1.
pub fn q_pochhammer(h: u64, k: u32) -> BigInt {
    let h = BigInt::from(h);
    let mut power = BigInt::one();
    let mut acc = BigInt::one();
    for _ in 0..k {
        power *= &h;
        acc *= &power - 1u32;
    }
    acc
}

/// Gaussian binomial coefficient `(e choose k)_h`; zero when `k > e`.
pub fn q_binomial(e: u32, k: u32, h: u64) -> BigInt {
    if k > e {
        return BigInt::from(0);
    }
    // Falling product over rising product; every partial quotient is integral
    // but dividing once at the end keeps it simple.
    let hb = BigInt::from(h);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 1..=k {
        num *= hb.pow(e - k + i) - 1u32;
        den *= hb.pow(i) - 1u32;
    }
    num / den
}

pub fn factorial(k: u32) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * i)
}

/// The coefficient `c_k` for which `sum_k c_k Sur(G^e, G^k)` is 1 at `e = 0`
/// and 0 otherwise, with alternating-sign partial sums.
pub fn inversion_coefficient(t: SimpleType, k: u32) -> Rational {
    let sign = if k.is_multiple_of(2) { 1 } else { -1 };
    let den = match t {
        SimpleType::Abelian { h } => q_pochhammer(h, k),
        SimpleType::NonAbelian { aut_count } => factorial(k) * BigInt::from(aut_count).pow(k),
    };
    Rational::new(BigInt::from(sign), den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn pochhammer_values() {
        assert_eq!(q_pochhammer(2, 0), BigInt::from(1));
        assert_eq!(q_pochhammer(2, 3), BigInt::from(21));
        assert_eq!(q_pochhammer(3, 2), BigInt::from(16));
    }

    #[test]
    fn q_binomial_values() {
        assert_eq!(q_binomial(5, 0, 2), BigInt::from(1));
        assert_eq!(q_binomial(2, 1, 3), BigInt::from(4));
        assert_eq!(q_binomial(3, 4, 2), BigInt::from(0));
        assert_eq!(q_binomial(0, 0, 7), BigInt::from(1));
    }

    /// Counts 2-dimensional subspaces of F_2^4 by listing distinct spans of
    /// vector pairs.
    #[test]
    fn q_binomial_counts_subspaces() {
        let mut spans = std::collections::BTreeSet::new();
        for a in 1u8..16 {
            for b in 1u8..16 {
                if a != b {
                    let mut span = [0u8, a, b, a ^ b];
                    span.sort();
                    spans.insert(span);
                }
            }
        }
        assert_eq!(spans.len(), 35);
        assert_eq!(q_binomial(4, 2, 2), BigInt::from(35));
    }

    #[test]
    fn coefficients() {
        let f2 = SimpleType::abelian(2).unwrap();
        assert_eq!(inversion_coefficient(f2, 0), ratio(1, 1));
        assert_eq!(inversion_coefficient(f2, 2), ratio(1, 3));
        assert_eq!(inversion_coefficient(f2, 3), ratio(-1, 21));
        let a5 = SimpleType::non_abelian(120).unwrap();
        assert_eq!(inversion_coefficient(a5, 0), ratio(1, 1));
        assert_eq!(inversion_coefficient(a5, 2), ratio(1, 28800));
    }

    #[test]
    fn simple_type_validation() {
        assert!(SimpleType::abelian(4).is_ok());
        assert!(SimpleType::abelian(9).is_ok());
        assert!(SimpleType::abelian(6).is_err());
        assert!(SimpleType::abelian(1).is_err());
        assert!(SimpleType::non_abelian(0).is_err());
        assert_eq!(SimpleType::abelian(4).unwrap().prime(), None);
        assert_eq!(SimpleType::abelian(5).unwrap().prime(), Some(5));
    }

    #[test]
    fn simple_type_json() {
        let t: SimpleType = serde_json::from_str(r#"{"kind":"abelian","h":3}"#).unwrap();
        assert_eq!(t, SimpleType::Abelian { h: 3 });
        let t: SimpleType =
            serde_json::from_str(r#"{"kind":"nonabelian","aut_count":120}"#).unwrap();
        assert_eq!(
            serde_json::to_string(&t).unwrap(),
            r#"{"kind":"nonabelian","aut_count":120}"#
        );
        assert!(serde_json::from_str::<SimpleType>(r#"{"kind":"abelian","h":6}"#).is_err());
    }

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power_base(8), Some(2));
        assert_eq!(prime_power_base(27), Some(3));
        assert_eq!(prime_power_base(13), Some(13));
        assert_eq!(prime_power_base(12), None);
        assert!(is_prime(97) && !is_prime(91));
    }
}
