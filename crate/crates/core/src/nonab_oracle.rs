//! Brute-force surjection counts `A5^e -> A5^k` for small `e`, `k`.
//!
//! Uses the presentation `A5 = <a, b | a^5 = b^2 = (ab)^3 = 1>`: a
//! homomorphism out of `A5` is a pair `(x, y)` in the target satisfying the
//! same relations, and a homomorphism out of `A5^e` is an `e`-tuple of those
//! whose images commute elementwise.

use std::sync::OnceLock;

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Largest power of `A5` the enumeration accepts on either side.
pub const MAX_POWER: u32 = 2;

/// An even permutation of `{0, ..., 4}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm5([u8; 5]);

impl Perm5 {
    pub fn new(images: [u8; 5]) -> Result<Self> {
        let mut seen = [false; 5];
        for &x in &images {
            if x > 4 || std::mem::replace(&mut seen[x as usize], true) {
                return Err(Error::input(format!(
                    "{images:?} is not a permutation of 0..5"
                )));
            }
        }
        let inversions = (0..5)
            .flat_map(|i| ((i + 1)..5).map(move |j| (i, j)))
            .filter(|&(i, j)| images[i] > images[j])
            .count();
        if inversions % 2 == 1 {
            return Err(Error::input(format!("{images:?} is an odd permutation")));
        }
        Ok(Perm5(images))
    }

    pub fn identity() -> Self {
        Perm5([0, 1, 2, 3, 4])
    }

    /// `(self * other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Perm5) -> Perm5 {
        Perm5(other.0.map(|i| self.0[i as usize]))
    }

    pub fn images(&self) -> [u8; 5] {
        self.0
    }
}

/// `A5` with elements indexed `0..60` (identity first) and a product table.
pub struct A5 {
    elements: Vec<Perm5>,
    table: Vec<[u8; 60]>,
}

impl A5 {
    pub fn get() -> &'static A5 {
        static GROUP: OnceLock<A5> = OnceLock::new();
        GROUP.get_or_init(A5::build)
    }

    fn build() -> A5 {
        let mut elements = Vec::with_capacity(60);
        for code in 0..3125u32 {
            let mut images = [0u8; 5];
            let mut c = code;
            for slot in images.iter_mut() {
                *slot = (c % 5) as u8;
                c /= 5;
            }
            if let Ok(p) = Perm5::new(images) {
                elements.push(p);
            }
        }
        elements.sort();
        debug_assert_eq!(elements.len(), 60);
        debug_assert_eq!(elements[0], Perm5::identity());
        let index = |p: &Perm5| elements.binary_search(p).unwrap() as u8;
        let table = elements
            .iter()
            .map(|x| {
                let mut row = [0u8; 60];
                for (slot, y) in row.iter_mut().zip(&elements) {
                    *slot = index(&x.compose(y));
                }
                row
            })
            .collect();
        A5 { elements, table }
    }

    pub fn elements(&self) -> &[Perm5] {
        &self.elements
    }

    pub fn mul(&self, x: u8, y: u8) -> u8 {
        self.table[x as usize][y as usize]
    }
}

/// The direct power `A5^k`, elements as `k`-tuples of `A5` indices.
struct Power {
    k: u32,
    size: usize,
}

impl Power {
    fn new(k: u32) -> Self {
        Power {
            k,
            size: 60usize.pow(k),
        }
    }

    fn coords(&self, x: usize) -> impl Iterator<Item = u8> {
        let mut x = x;
        (0..self.k).map(move |_| {
            let c = (x % 60) as u8;
            x /= 60;
            c
        })
    }

    fn mul(&self, x: usize, y: usize) -> usize {
        let g = A5::get();
        let mut out = 0usize;
        let mut stride = 1usize;
        for (a, b) in self.coords(x).zip(self.coords(y)) {
            out += g.mul(a, b) as usize * stride;
            stride *= 60;
        }
        out
    }

    fn pow(&self, x: usize, n: u32) -> usize {
        (0..n).fold(0, |acc, _| self.mul(acc, x))
    }

    fn commute(&self, x: usize, y: usize) -> bool {
        self.mul(x, y) == self.mul(y, x)
    }

    /// Order of the subgroup generated by `gens`.
    fn generated_order(&self, gens: &[usize]) -> usize {
        let mut seen = vec![false; self.size];
        seen[0] = true;
        let mut stack = vec![0usize];
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        count
    }
}

/// Homomorphisms `A5 -> A5^k` as generator image pairs `(x, y)` with
/// `x^5 = y^2 = (xy)^3 = 1`.
pub fn homs_into_power(k: u32) -> Result<Vec<(usize, usize)>> {
    if k > MAX_POWER {
        return Err(Error::budget(format!(
            "A5^{k} is above the enumeration limit A5^{MAX_POWER}"
        )));
    }
    let target = Power::new(k);
    let xs: Vec<usize> = (0..target.size)
        .filter(|&x| target.pow(x, 5) == 0)
        .collect();
    let ys: Vec<usize> = (0..target.size)
        .filter(|&y| target.pow(y, 2) == 0)
        .collect();
    Ok(xs
        .iter()
        .flat_map(|&x| ys.iter().map(move |&y| (x, y)))
        .filter(|&(x, y)| target.pow(target.mul(x, y), 3) == 0)
        .collect())
}

/// Number of surjective homomorphisms `A5^e -> A5^k`, for `e, k <= 2`.
pub fn sur_a5_bruteforce(e: u32, k: u32) -> Result<BigInt> {
    if e > MAX_POWER || k > MAX_POWER {
        return Err(Error::budget(format!(
            "A5^{e} -> A5^{k} is above the enumeration limit A5^{MAX_POWER}"
        )));
    }
    let target = Power::new(k);
    let homs = homs_into_power(k)?;
    let n = homs.len();
    let commuting = |a: &(usize, usize), b: &(usize, usize)| {
        target.commute(a.0, b.0)
            && target.commute(a.0, b.1)
            && target.commute(a.1, b.0)
            && target.commute(a.1, b.1)
    };
    let onto = |tuple: &[usize]| {
        let gens: Vec<usize> = tuple.iter().flat_map(|&i| [homs[i].0, homs[i].1]).collect();
        target.generated_order(&gens) == target.size
    };
    let count: u64 = match e {
        0 => u64::from(k == 0),
        1 => (0..n).filter(|&i| onto(&[i])).count() as u64,
        _ => (0..n)
            .into_par_iter()
            .map(|i| {
                (0..n)
                    .filter(|&j| commuting(&homs[i], &homs[j]) && onto(&[i, j]))
                    .count() as u64
            })
            .sum(),
    };
    Ok(BigInt::from(count))
}
