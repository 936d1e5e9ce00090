use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qseries::is_prime;

/// A finite abelian group in canonical form: for each prime `p` a weakly
/// decreasing partition `λ_p`, standing for `⊕_p ⊕_i Z/p^{λ_{p,i}}`.
///
/// Absent primes have trivial `p`-part. Orders are kept within `u64`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(
    try_from = "BTreeMap<String, Vec<u32>>",
    into = "BTreeMap<String, Vec<u32>>"
)]
pub struct FinAbGroup {
    components: BTreeMap<u64, Vec<u32>>,
}

impl FinAbGroup {
    pub fn trivial() -> Self {
        FinAbGroup {
            components: BTreeMap::new(),
        }
    }

    /// Builds the canonical form; partitions are sorted and empty ones dropped.
    pub fn new(components: BTreeMap<u64, Vec<u32>>) -> Result<Self> {
        let mut canon = BTreeMap::new();
        let mut order: u64 = 1;
        for (p, mut parts) in components {
            if !is_prime(p) {
                return Err(Error::input(format!("{p} is not prime")));
            }
            if parts.contains(&0) {
                return Err(Error::input(format!(
                    "partition for prime {p} has a zero part"
                )));
            }
            parts.sort_unstable_by(|a, b| b.cmp(a));
            for &x in &parts {
                order = p
                    .checked_pow(x)
                    .and_then(|q| order.checked_mul(q))
                    .ok_or_else(|| Error::input("group order does not fit in 64 bits"))?;
            }
            if !parts.is_empty() {
                canon.insert(p, parts);
            }
        }
        Ok(FinAbGroup { components: canon })
    }

    pub fn from_partition(p: u64, parts: &[u32]) -> Result<Self> {
        FinAbGroup::new(BTreeMap::from([(p, parts.to_vec())]))
    }

    /// `Z/n`, split into its primary parts.
    pub fn cyclic(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::input("Z/0 is not finite"));
        }
        let mut comps = BTreeMap::new();
        let mut m = n;
        let mut p = 2u64;
        while m > 1 {
            if p.saturating_mul(p) > m {
                p = m;
            }
            let mut a = 0u32;
            while m.is_multiple_of(p) {
                m /= p;
                a += 1;
            }
            if a > 0 {
                comps.insert(p, vec![a]);
            }
            p += 1;
        }
        FinAbGroup::new(comps)
    }

    /// `Z/n_1 x ... x Z/n_r` for arbitrary positive moduli.
    pub fn from_cyclic_orders(orders: &[u64]) -> Result<Self> {
        orders.iter().try_fold(FinAbGroup::trivial(), |acc, &n| {
            acc.direct_sum(&FinAbGroup::cyclic(n)?)
        })
    }

    /// `F_p^k`.
    pub fn elementary(p: u64, k: u32) -> Result<Self> {
        FinAbGroup::from_partition(p, &vec![1; k as usize])
    }

    pub fn direct_sum(&self, other: &FinAbGroup) -> Result<Self> {
        let mut comps = self.components.clone();
        for (&p, parts) in &other.components {
            comps.entry(p).or_default().extend_from_slice(parts);
        }
        FinAbGroup::new(comps)
    }

    pub fn components(&self) -> &BTreeMap<u64, Vec<u32>> {
        &self.components
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.components.keys().copied()
    }

    pub fn partition(&self, p: u64) -> &[u32] {
        self.components.get(&p).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Number of cyclic `p`-factors, i.e. `dim_{F_p} A/pA`.
    pub fn rank(&self, p: u64) -> u32 {
        self.partition(p).len() as u32
    }

    pub fn order(&self) -> u64 {
        self.components
            .iter()
            .map(|(&p, parts)| parts.iter().map(|&x| p.pow(x)).product::<u64>())
            .product()
    }

    pub fn is_trivial(&self) -> bool {
        self.components.is_empty()
    }

    /// Killed by the radical: every cyclic factor has prime order.
    pub fn is_semisimple(&self) -> bool {
        self.components.values().flatten().all(|&x| x == 1)
    }

    /// `⊕_p A/pA`.
    pub fn semisimplification(&self) -> FinAbGroup {
        let components = self
            .components
            .iter()
            .map(|(&p, parts)| (p, vec![1; parts.len()]))
            .collect();
        FinAbGroup { components }
    }

    /// Largest exponent among the `p`-parts (0 if the `p`-part is trivial).
    pub fn exponent_at(&self, p: u64) -> u32 {
        self.partition(p).first().copied().unwrap_or(0)
    }

    /// Moduli of the canonical cyclic decomposition: primes ascending, parts descending.
    pub fn cyclic_moduli(&self) -> Vec<u64> {
        self.components
            .iter()
            .flat_map(|(&p, parts)| parts.iter().map(move |&x| p.pow(x)))
            .collect()
    }
}

impl Ord for FinAbGroup {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order()
            .cmp(&other.order())
            .then_with(|| self.components.cmp(&other.components))
    }
}

impl PartialOrd for FinAbGroup {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl TryFrom<BTreeMap<String, Vec<u32>>> for FinAbGroup {
    type Error = Error;

    fn try_from(raw: BTreeMap<String, Vec<u32>>) -> Result<Self> {
        let mut comps = BTreeMap::new();
        for (key, parts) in raw {
            let p: u64 = key
                .trim()
                .parse()
                .map_err(|_| Error::input(format!("group key {key:?} is not a prime")))?;
            if comps.insert(p, parts).is_some() {
                return Err(Error::input(format!("prime {p} listed twice")));
            }
        }
        FinAbGroup::new(comps)
    }
}

impl From<FinAbGroup> for BTreeMap<String, Vec<u32>> {
    fn from(g: FinAbGroup) -> Self {
        g.components
            .into_iter()
            .map(|(p, parts)| (p.to_string(), parts))
            .collect()
    }
}

impl fmt::Display for FinAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut first = true;
        for n in self.cyclic_moduli() {
            if !first {
                write!(f, " x ")?;
            }
            first = false;
            write!(f, "Z/{n}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for FinAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn pow(p: u64, e: u64) -> BigInt {
    BigInt::from(p).pow(e as u32)
}

/// `|Hom(A, B)| = prod_p prod_{i,j} p^{min(λ_{p,i}(A), λ_{p,j}(B))}`.
pub fn hom_count(a: &FinAbGroup, b: &FinAbGroup) -> BigInt {
    let mut acc = BigInt::one();
    for (&p, pa) in a.components() {
        let pb = b.partition(p);
        let e: u64 = pa
            .iter()
            .flat_map(|&x| pb.iter().map(move |&y| x.min(y) as u64))
            .sum();
        acc *= pow(p, e);
    }
    acc
}

/// Closed-form `|Aut(A)|`, per prime, for the partition sorted ascending
/// `e_1 <= ... <= e_n` with `d_k = max{l : e_l = e_k}` and
/// `c_k = min{l : e_l = e_k}`:
/// `prod_k (p^{d_k} - p^{k-1}) * prod_j p^{e_j (n - d_j)} * prod_i p^{(e_i - 1)(n - c_i + 1)}`.
pub fn automorphism_count(a: &FinAbGroup) -> BigInt {
    let mut acc = BigInt::one();
    for (&p, parts) in a.components() {
        let mut e: Vec<u64> = parts.iter().map(|&x| x as u64).collect();
        e.sort_unstable();
        let n = e.len() as u64;
        let mut exp: u64 = 0;
        for k in 0..e.len() {
            let d = e.iter().rposition(|&x| x == e[k]).unwrap() as u64 + 1;
            let c = e.iter().position(|&x| x == e[k]).unwrap() as u64 + 1;
            acc *= pow(p, d) - pow(p, k as u64);
            exp += e[k] * (n - d) + (e[k] - 1) * (n - c + 1);
        }
        acc *= pow(p, exp);
    }
    acc
}

/// Closed-form `|Sur(A, B)|`.
///
/// Per prime: a homomorphism is onto iff its reduction into `B/pB = F_p^r`
/// is onto. The generator of order `p^a` may only land in the subspace
/// `W_a` spanned by the coordinates with `β_j <= a`, and the reduction map
/// `Hom(A, B) -> prod_i W_{a_i}` has equal fibres. Spanning tuples with one
/// vector per nested subspace are counted by a rank recursion.
pub fn sur_count(a: &FinAbGroup, b: &FinAbGroup) -> BigInt {
    if b.order() > a.order() {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for (&p, pb) in b.components() {
        let pa = a.partition(p);
        let r = pb.len();
        let mut widths: Vec<usize> = pa
            .iter()
            .map(|&ai| pb.iter().filter(|&&bj| bj <= ai).count())
            .collect();
        widths.sort_unstable();
        let hom_exp: u64 = pa
            .iter()
            .flat_map(|&x| pb.iter().map(move |&y| x.min(y) as u64))
            .sum();
        let image_exp: u64 = widths.iter().map(|&w| w as u64).sum();

        // spanning[d] = number of prefixes of the tuple whose span has dimension d
        let mut spanning = vec![BigInt::zero(); r + 1];
        spanning[0] = BigInt::one();
        for &w in &widths {
            let mut next = vec![BigInt::zero(); r + 1];
            for d in 0..=r.min(w) {
                if spanning[d].is_zero() {
                    continue;
                }
                next[d] += &spanning[d] * pow(p, d as u64);
                if d < w {
                    next[d + 1] += &spanning[d] * (pow(p, w as u64) - pow(p, d as u64));
                }
            }
            spanning = next;
        }
        acc *= pow(p, hom_exp - image_exp) * &spanning[r];
        if acc.is_zero() {
            break;
        }
    }
    acc
}

/// Partitions of `n` in descending lexicographic order, parts descending.
pub fn partitions(n: u32) -> Vec<Vec<u32>> {
    fn go(n: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            out.push(prefix.clone());
            return;
        }
        for part in (1..=n.min(max)).rev() {
            prefix.push(part);
            go(n - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// All groups supported on `primes` with order at most `order_bound`, each
/// once, sorted by order and then by partition data.
pub fn enumerate_groups(primes: &BTreeSet<u64>, order_bound: u64) -> Result<Vec<FinAbGroup>> {
    if order_bound == 0 {
        return Err(Error::input("order bound must be at least 1"));
    }
    for &p in primes {
        if !is_prime(p) {
            return Err(Error::input(format!("{p} is not prime")));
        }
    }
    let mut groups = vec![(BTreeMap::new(), 1u64)];
    for &p in primes {
        let mut next = Vec::new();
        for (comps, order) in &groups {
            let mut size = 0u32;
            let mut q = *order;
            loop {
                for parts in partitions(size) {
                    let mut c: BTreeMap<u64, Vec<u32>> = comps.clone();
                    if !parts.is_empty() {
                        c.insert(p, parts);
                    }
                    next.push((c, q));
                }
                match q.checked_mul(p) {
                    Some(nq) if nq <= order_bound => {
                        q = nq;
                        size += 1;
                    }
                    _ => break,
                }
            }
        }
        groups = next;
    }
    let mut out: Vec<FinAbGroup> = groups
        .into_iter()
        .map(|(components, _)| FinAbGroup { components })
        .collect();
    out.sort();
    Ok(out)
}
