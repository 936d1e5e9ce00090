//! Closed-form surjection counts between products of powers of simple types.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qseries::SimpleType;

/// Ordered list of pairwise non-isomorphic simple types. Position is identity:
/// entries are never compared for abstract isomorphism.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TypeBasis(pub Vec<SimpleType>);

impl TypeBasis {
    pub fn new(types: Vec<SimpleType>) -> Self {
        TypeBasis(types)
    }

    /// `[F_p1, ..., F_pm]` for the given primes.
    pub fn primes(primes: &[u64]) -> Result<Self> {
        primes
            .iter()
            .map(|&p| {
                if !crate::qseries::is_prime(p) {
                    return Err(Error::input(format!("{p} is not prime")));
                }
                SimpleType::abelian(p)
            })
            .collect::<Result<Vec<_>>>()
            .map(TypeBasis)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn types(&self) -> &[SimpleType] {
        &self.0
    }
}

/// Exponent vector `(e_1, ..., e_m)` naming `prod G_i^{e_i}` over a basis.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zeros(m: usize) -> Self {
        MultiIndex(vec![0; m])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    /// True when every coordinate is at most the matching one of `bound`.
    pub fn le(&self, bound: &MultiIndex) -> bool {
        self.0.len() == bound.0.len() && self.0.iter().zip(&bound.0).all(|(a, b)| a <= b)
    }

    /// Every multi-index in the box `[0, bound]`, last coordinate fastest.
    pub fn box_iter(bound: &MultiIndex) -> impl Iterator<Item = MultiIndex> + '_ {
        let total: usize = bound.0.iter().map(|&b| b as usize + 1).product();
        (0..total).map(move |mut n| {
            let mut out = vec![0u32; bound.0.len()];
            for (slot, &b) in out.iter_mut().zip(&bound.0).rev() {
                let width = b as usize + 1;
                *slot = (n % width) as u32;
                n /= width;
            }
            MultiIndex(out)
        })
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex(v)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// `Sur(G^e, G^k)`.
///
/// Abelian: `(h^e - 1)(h^e - h)...(h^e - h^{k-1})`, the number of surjective
/// `k x e` matrices over `F_h`. Non-abelian: `e(e-1)...(e-k+1) |Aut G|^k`.
pub fn sur_single(t: SimpleType, e: u32, k: u32) -> BigInt {
    if k > e {
        return BigInt::zero();
    }
    match t {
        SimpleType::Abelian { h } => {
            let h = BigInt::from(h);
            let top = h.pow(e);
            let mut power = BigInt::one();
            let mut acc = BigInt::one();
            for _ in 0..k {
                acc *= &top - &power;
                power *= &h;
            }
            acc
        }
        SimpleType::NonAbelian { aut_count } => {
            let falling = (0..k).fold(BigInt::one(), |acc, i| acc * (e - i));
            falling * BigInt::from(aut_count).pow(k)
        }
    }
}

/// `Sur(prod G_i^{e_i}, prod G_i^{k_i})`, which splits as a product over the
/// basis because the factors are pairwise non-isomorphic.
pub fn sur_product(basis: &TypeBasis, e: &MultiIndex, k: &MultiIndex) -> Result<BigInt> {
    if e.len() != basis.len() || k.len() != basis.len() {
        return Err(Error::input(format!(
            "multi-index lengths {} and {} do not match basis of size {}",
            e.len(),
            k.len(),
            basis.len()
        )));
    }
    let mut acc = BigInt::one();
    for ((&t, &ei), &ki) in basis.types().iter().zip(&e.0).zip(&k.0) {
        acc *= sur_single(t, ei, ki);
        if acc.is_zero() {
            break;
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(h: u64) -> SimpleType {
        SimpleType::abelian(h).unwrap()
    }

    #[test]
    fn single_values() {
        assert_eq!(sur_single(f(2), 2, 1), BigInt::from(3));
        assert_eq!(sur_single(f(2), 0, 0), BigInt::from(1));
        assert_eq!(sur_single(f(3), 1, 2), BigInt::from(0));
        let a5 = SimpleType::non_abelian(120).unwrap();
        assert_eq!(sur_single(a5, 0, 0), BigInt::from(1));
        assert_eq!(sur_single(a5, 2, 1), BigInt::from(240));
        assert_eq!(sur_single(a5, 2, 2), BigInt::from(28800));
    }

    #[test]
    fn product_values() {
        let basis = TypeBasis::primes(&[2, 3]).unwrap();
        let m = |v: &[u32]| MultiIndex(v.to_vec());
        assert_eq!(
            sur_product(&basis, &m(&[2, 1]), &m(&[1, 1])).unwrap(),
            BigInt::from(6)
        );
        assert_eq!(
            sur_product(&basis, &m(&[0, 0]), &m(&[0, 0])).unwrap(),
            BigInt::from(1)
        );
        assert_eq!(
            sur_product(&basis, &m(&[1, 0]), &m(&[0, 1])).unwrap(),
            BigInt::from(0)
        );
        assert!(sur_product(&basis, &m(&[1]), &m(&[0, 1])).is_err());
        let empty = TypeBasis::new(vec![]);
        assert_eq!(
            sur_product(&empty, &m(&[]), &m(&[])).unwrap(),
            BigInt::from(1)
        );
    }

    #[test]
    fn vanishing_and_monotone() {
        let types = [f(2), f(3), f(4), SimpleType::non_abelian(120).unwrap()];
        for t in types {
            for k in 0..=6 {
                for e in 0..=6 {
                    let v = sur_single(t, e, k);
                    assert_eq!(v.is_zero(), k > e, "{t} e={e} k={k}");
                    if e < 6 {
                        assert!(sur_single(t, e + 1, k) >= v);
                    }
                }
            }
        }
    }

    #[test]
    fn box_iteration() {
        let all: Vec<_> = MultiIndex::box_iter(&MultiIndex(vec![1, 2])).collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], MultiIndex(vec![0, 0]));
        assert_eq!(all[1], MultiIndex(vec![0, 1]));
        assert_eq!(all[5], MultiIndex(vec![1, 2]));
        assert_eq!(MultiIndex::box_iter(&MultiIndex(vec![])).count(), 1);
    }
}
