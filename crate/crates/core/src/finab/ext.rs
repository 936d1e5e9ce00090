//! Extension classes `0 -> N -> M' -> M -> 0` with semisimple `N`, grouped by
//! the isomorphism type of the middle term.
//!
//! For a `p`-group `M = ⊕ Z/p^{μ_i}` (`r` parts) and `N = F_p^k`, classes are
//! `k x r` matrices `A` over `F_p`; the class of `A` has middle
//! `(⊕ Z e_i ⊕ F_p^k) / <p^{μ_i} e_i - A e_i>`. The middle only depends on
//! the row space `V` of `A`, and `V` of dimension `d` is hit by
//! `(p^k - 1)(p^k - p)...(p^k - p^{d-1})` matrices. Distinct primes do not
//! interact, so the per-prime tables multiply.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::FinAbGroup;
use crate::error::{Error, Result};
use crate::smith::cokernel_exponents;

/// Number of extension classes per middle term. Only middles with at least
/// one class are listed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionTable {
    sub: FinAbGroup,
    quotient: FinAbGroup,
    entries: BTreeMap<FinAbGroup, BigInt>,
}

impl ExtensionTable {
    pub fn new(
        sub: FinAbGroup,
        quotient: FinAbGroup,
        entries: BTreeMap<FinAbGroup, BigInt>,
    ) -> Self {
        ExtensionTable {
            sub,
            quotient,
            entries,
        }
    }

    pub fn sub(&self) -> &FinAbGroup {
        &self.sub
    }

    pub fn quotient(&self) -> &FinAbGroup {
        &self.quotient
    }

    pub fn entries(&self) -> &BTreeMap<FinAbGroup, BigInt> {
        &self.entries
    }

    /// Total number of classes, i.e. `|Ext^1(M, N)|`.
    pub fn total(&self) -> BigInt {
        self.entries.values().sum()
    }
}

/// Row-reduced echelon `d x r` matrices over `F_p`, one per `d`-dimensional
/// subspace of `F_p^r`.
fn echelon_forms(p: u64, r: usize, d: usize) -> Vec<Vec<Vec<u64>>> {
    let mut out = Vec::new();
    let mut pivots = Vec::with_capacity(d);
    fn choose(
        r: usize,
        d: usize,
        start: usize,
        pivots: &mut Vec<usize>,
        f: &mut dyn FnMut(&[usize]),
    ) {
        if pivots.len() == d {
            f(pivots);
            return;
        }
        for c in start..r {
            pivots.push(c);
            choose(r, d, c + 1, pivots, f);
            pivots.pop();
        }
    }
    choose(r, d, 0, &mut pivots, &mut |piv: &[usize]| {
        // free cells: right of the row's pivot, outside pivot columns
        let free: Vec<(usize, usize)> = piv
            .iter()
            .enumerate()
            .flat_map(|(row, &pc)| {
                ((pc + 1)..r)
                    .filter(|c| !piv.contains(c))
                    .map(move |c| (row, c))
            })
            .collect();
        let combos = p.pow(free.len() as u32);
        for mut code in 0..combos {
            let mut m = vec![vec![0u64; r]; d];
            for (row, &pc) in piv.iter().enumerate() {
                m[row][pc] = 1;
            }
            for &(row, c) in &free {
                m[row][c] = code % p;
                code /= p;
            }
            out.push(m);
        }
    });
    out
}

fn prime_part(p: u64, mu: &[u32], k: u32) -> Result<BTreeMap<Vec<u32>, BigInt>> {
    let r = mu.len();
    let mut table: BTreeMap<Vec<u32>, BigInt> = BTreeMap::new();
    if r == 0 || k == 0 {
        let mut parts = mu.to_vec();
        parts.extend(std::iter::repeat_n(1, k as usize));
        table.insert(parts, BigInt::one());
        return Ok(table);
    }
    let cap = mu.iter().max().copied().unwrap_or(0) + 2;
    let modulus = p.pow(cap);
    let pk = BigInt::from(p).pow(k);
    for d in 0..=r.min(k as usize) {
        let weight: BigInt = (0..d)
            .map(|i| &pk - BigInt::from(p).pow(i as u32))
            .product();
        for a in echelon_forms(p, r, d) {
            // generators e_1..e_r, f_1..f_d; one relation per column
            let size = r + d;
            let mut rel = vec![vec![0u64; size]; size];
            for i in 0..r {
                rel[i][i] = p.pow(mu[i]) % modulus;
                for (j, row) in a.iter().enumerate() {
                    rel[r + j][i] = (modulus - row[i] % modulus) % modulus;
                }
            }
            for j in 0..d {
                rel[r + j][r + j] = p;
            }
            let mut parts = cokernel_exponents(&mut rel, p, cap);
            if parts.first() == Some(&cap) {
                return Err(Error::consistency(format!(
                    "extension middle over p = {p} escaped the working precision"
                )));
            }
            parts.extend(std::iter::repeat_n(1, k as usize - d));
            parts.sort_unstable_by(|x, y| y.cmp(x));
            *table.entry(parts).or_insert_with(BigInt::zero) += &weight;
        }
    }
    Ok(table)
}

/// Extension classes of `m` by the semisimple group `n`, grouped by middle.
pub fn extension_classes(n: &FinAbGroup, m: &FinAbGroup) -> Result<ExtensionTable> {
    if !n.is_semisimple() {
        return Err(Error::input(format!("{n} is not semisimple")));
    }
    let primes: std::collections::BTreeSet<u64> = n.primes().chain(m.primes()).collect();
    let mut combined: Vec<(BTreeMap<u64, Vec<u32>>, BigInt)> =
        vec![(BTreeMap::new(), BigInt::one())];
    for p in primes {
        let part = prime_part(p, m.partition(p), n.rank(p))?;
        let mut next = Vec::with_capacity(combined.len() * part.len());
        for (comps, count) in &combined {
            for (parts, c) in &part {
                let mut comps = comps.clone();
                comps.insert(p, parts.clone());
                next.push((comps, count * c));
            }
        }
        combined = next;
    }
    let mut entries = BTreeMap::new();
    for (comps, count) in combined {
        let middle = FinAbGroup::new(comps)?;
        *entries.entry(middle).or_insert_with(BigInt::zero) += count;
    }
    Ok(ExtensionTable::new(n.clone(), m.clone(), entries))
}
