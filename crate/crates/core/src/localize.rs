//! From surjection moments of a measure on finite modules to the mass at a
//! fixed module `M`.
//!
//! Moments of `μ` at every extension of `M` by `N = prod F_p^{k_p}` give the
//! `N`-moment of the localized measure `μ^M` on semisimple kernels. Inverting
//! those bounds `μ^M(0) = |Aut M| μ(M)`.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finab::{
    automorphism_count, basis_primes, enumerate_groups, extension_classes, hom_count, oracle,
    semisimple_group, sur_count, Budget, FinAbGroup, Measure,
};
use crate::inversion::{multi_invert_zero, Bracket, MomentTable};
use crate::qseries::is_prime;
use crate::rational::{self, Rational};
use crate::surjcount::{MultiIndex, TypeBasis};

/// Values `∫ Sur(X, M') dμ(X)` for every `M'` on `primes` of order at most
/// `order_bound`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleMomentTable {
    primes: BTreeSet<u64>,
    order_bound: u64,
    values: BTreeMap<FinAbGroup, Rational>,
}

#[derive(Serialize, Deserialize)]
struct Entry {
    group: FinAbGroup,
    #[serde(with = "rational::serde_str")]
    value: Rational,
}

#[derive(Serialize, Deserialize)]
struct TableJson {
    primes: Vec<u64>,
    order_bound: u64,
    moments: Vec<Entry>,
}

fn list(groups: &[FinAbGroup]) -> String {
    const SHOWN: usize = 8;
    let mut text: Vec<String> = groups.iter().take(SHOWN).map(ToString::to_string).collect();
    if groups.len() > SHOWN {
        text.push(format!("and {} more", groups.len() - SHOWN));
    }
    text.join(", ")
}

impl ModuleMomentTable {
    pub fn new(
        primes: BTreeSet<u64>,
        order_bound: u64,
        values: BTreeMap<FinAbGroup, Rational>,
    ) -> Result<Self> {
        if let Some(p) = primes.iter().find(|&&p| !is_prime(p)) {
            return Err(Error::input(format!("{p} is not prime")));
        }
        for (g, v) in &values {
            if v.is_negative() {
                return Err(Error::input(format!("moment at {g} is negative")));
            }
            if g.order() > order_bound || g.primes().any(|p| !primes.contains(&p)) {
                return Err(Error::input(format!(
                    "moment at {g} lies outside the declared range (primes {primes:?}, order <= {order_bound})"
                )));
            }
        }
        let missing: Vec<FinAbGroup> = enumerate_groups(&primes, order_bound)?
            .into_iter()
            .filter(|g| !values.contains_key(g))
            .collect();
        if !missing.is_empty() {
            return Err(Error::input(format!(
                "moment table is missing {}",
                list(&missing)
            )));
        }
        Ok(ModuleMomentTable {
            primes,
            order_bound,
            values,
        })
    }

    pub fn from_fn(
        primes: BTreeSet<u64>,
        order_bound: u64,
        mut f: impl FnMut(&FinAbGroup) -> Rational,
    ) -> Result<Self> {
        let values = enumerate_groups(&primes, order_bound)?
            .into_iter()
            .map(|g| {
                let v = f(&g);
                (g, v)
            })
            .collect();
        ModuleMomentTable::new(primes, order_bound, values)
    }

    /// Exact moments of a finitely supported measure.
    pub fn from_measure(mu: &Measure, primes: BTreeSet<u64>, order_bound: u64) -> Result<Self> {
        let groups = enumerate_groups(&primes, order_bound)?;
        let values = groups
            .into_par_iter()
            .map(|g| {
                let v: Rational = mu
                    .support()
                    .map(|(x, q)| q * Rational::from_integer(sur_count(x, &g)))
                    .sum();
                (g, v)
            })
            .collect();
        ModuleMomentTable::new(primes, order_bound, values)
    }

    pub fn primes(&self) -> &BTreeSet<u64> {
        &self.primes
    }

    pub fn order_bound(&self) -> u64 {
        self.order_bound
    }

    pub fn get(&self, g: &FinAbGroup) -> Option<&Rational> {
        self.values.get(g)
    }

    pub fn values(&self) -> &BTreeMap<FinAbGroup, Rational> {
        &self.values
    }

    pub fn to_json(&self) -> serde_json::Value {
        let moments = self
            .values
            .iter()
            .map(|(g, v)| Entry {
                group: g.clone(),
                value: v.clone(),
            })
            .collect();
        let raw = TableJson {
            primes: self.primes.iter().copied().collect(),
            order_bound: self.order_bound,
            moments,
        };
        serde_json::to_value(raw).expect("module moment table serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: TableJson = serde_json::from_str(text)?;
        let mut values = BTreeMap::new();
        for e in raw.moments {
            if values.contains_key(&e.group) {
                return Err(Error::input(format!("moment at {} listed twice", e.group)));
            }
            values.insert(e.group, e.value);
        }
        ModuleMomentTable::new(raw.primes.into_iter().collect(), raw.order_bound, values)
    }
}

fn check_basis_covers(table: &ModuleMomentTable, basis: &TypeBasis) -> Result<Vec<u64>> {
    let primes = basis_primes(basis)?;
    if let Some(p) = table.primes().iter().find(|p| !primes.contains(p)) {
        return Err(Error::input(format!(
            "the basis has no F_{p}, but the table has {p}-parts"
        )));
    }
    Ok(primes)
}

/// Moments of `μ^M` at `N_k = prod F_{p_i}^{k_i}` for every `k <= k_bound`.
pub fn localized_moments(
    table: &ModuleMomentTable,
    m: &FinAbGroup,
    basis: &TypeBasis,
    k_bound: &MultiIndex,
) -> Result<MomentTable> {
    check_basis_covers(table, basis)?;
    if k_bound.len() != basis.len() {
        return Err(Error::input(format!(
            "k bound {k_bound} does not match the basis"
        )));
    }
    let indices: Vec<MultiIndex> = MultiIndex::box_iter(k_bound).collect();
    let per_index: Vec<Result<(MultiIndex, Rational)>> = indices
        .into_par_iter()
        .map(|k| {
            let n = semisimple_group(basis, &k)?;
            let ext = extension_classes(&n, m)?;
            let mut missing = Vec::new();
            let mut sum = Rational::zero();
            for (middle, count) in ext.entries() {
                match table.get(middle) {
                    Some(v) => sum += v * Rational::from_integer(count.clone()),
                    None => missing.push(middle.clone()),
                }
            }
            if !missing.is_empty() {
                return Err(Error::input(format!(
                    "moment table lacks the extensions of {m} by {n}: {}",
                    list(&missing)
                )));
            }
            Ok((k, sum / Rational::from_integer(hom_count(m, &n))))
        })
        .collect();
    let values = per_index.into_iter().collect::<Result<BTreeMap<_, _>>>()?;
    MomentTable::new(basis.clone(), k_bound.clone(), values)
}

/// `sum_X μ(X) #{π: X ->> M with (ker π)/I ≅ N}`, by enumerating surjections.
pub fn mu_local_direct(
    mu: &Measure,
    m: &FinAbGroup,
    n: &FinAbGroup,
    budget: &Budget,
) -> Result<Rational> {
    let mut total = Rational::zero();
    for (x, q) in mu.support() {
        let census = oracle::kernel_census(x, m, budget)?;
        let hits: u64 = census
            .iter()
            .filter(|(kernel, _)| kernel.semisimplification() == *n)
            .map(|(_, c)| c)
            .sum();
        total += q * Rational::from_integer(hits.into());
    }
    Ok(total)
}

/// Certified bracket on `μ(M)` from the module moments of `μ`.
pub fn reconstruct_probability(
    table: &ModuleMomentTable,
    m: &FinAbGroup,
    basis: &TypeBasis,
    r_max: &MultiIndex,
) -> Result<Bracket> {
    let local = localized_moments(table, m, basis, r_max)?;
    let zero_mass = multi_invert_zero(&local, r_max)?;
    Ok(zero_mass.scale(&Rational::new(1.into(), automorphism_count(m))))
}

/// Smallest order bound that makes a table usable for `M` at `r_max`.
pub fn required_order_bound(m: &FinAbGroup, basis: &TypeBasis, r_max: &MultiIndex) -> Result<u64> {
    let n = semisimple_group(basis, r_max)?;
    m.order()
        .checked_mul(n.order())
        .ok_or_else(|| Error::input("required order bound overflows"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn g(json: &str) -> FinAbGroup {
        serde_json::from_str(json).unwrap()
    }

    fn half_half() -> Measure {
        Measure::new([
            (FinAbGroup::trivial(), ratio(1, 2)),
            (g(r#"{"2":[1]}"#), ratio(1, 2)),
        ])
        .unwrap()
    }

    fn f2() -> TypeBasis {
        TypeBasis::primes(&[2]).unwrap()
    }

    fn euler(p: u64, from: u32) -> Rational {
        (from..from + 30)
            .map(|k| int(1) - ratio(1, num_bigint::BigInt::from(p).pow(k)))
            .product()
    }

    #[test]
    fn localized_examples() {
        let table = ModuleMomentTable::from_measure(&half_half(), BTreeSet::from([2]), 8).unwrap();
        let k1 = MultiIndex(vec![1]);
        let triv = localized_moments(&table, &FinAbGroup::trivial(), &f2(), &k1).unwrap();
        assert_eq!(triv.get(&k1), Some(&ratio(1, 2)));
        let z2 = localized_moments(&table, &g(r#"{"2":[1]}"#), &f2(), &k1).unwrap();
        assert_eq!(z2.get(&k1), Some(&int(0)));
        for m in enumerate_groups(&BTreeSet::from([2]), 8).unwrap() {
            let at_zero = localized_moments(&table, &m, &f2(), &MultiIndex(vec![0])).unwrap();
            assert_eq!(at_zero.get(&MultiIndex(vec![0])), table.get(&m));
        }
    }

    #[test]
    fn missing_middles_are_named() {
        let table = ModuleMomentTable::from_measure(&half_half(), BTreeSet::from([2]), 4).unwrap();
        let err =
            localized_moments(&table, &g(r#"{"2":[1]}"#), &f2(), &MultiIndex(vec![2])).unwrap_err();
        assert!(err.to_string().contains("Z/4 x Z/2"), "{err}");
        let three = TypeBasis::primes(&[3]).unwrap();
        assert!(
            localized_moments(&table, &FinAbGroup::trivial(), &three, &MultiIndex(vec![1]))
                .is_err()
        );
    }

    #[test]
    fn table_validation_and_json() {
        let incomplete = BTreeMap::from([(FinAbGroup::trivial(), int(1))]);
        let err = ModuleMomentTable::new(BTreeSet::from([2]), 4, incomplete).unwrap_err();
        assert!(err.to_string().contains("Z/2"), "{err}");
        let table =
            ModuleMomentTable::from_measure(&half_half(), BTreeSet::from([2, 3]), 12).unwrap();
        let back = ModuleMomentTable::from_json(&table.to_json().to_string()).unwrap();
        assert_eq!(back, table);
    }

    #[test]
    fn direct_examples() {
        let mu = half_half();
        let budget = Budget::default();
        let z2 = g(r#"{"2":[1]}"#);
        assert_eq!(
            mu_local_direct(&mu, &z2, &FinAbGroup::trivial(), &budget).unwrap(),
            ratio(1, 2)
        );
        assert_eq!(
            mu_local_direct(&mu, &FinAbGroup::trivial(), &z2, &budget).unwrap(),
            ratio(1, 2)
        );
        for n in [FinAbGroup::trivial(), z2.clone()] {
            assert_eq!(
                mu_local_direct(&mu, &g(r#"{"2":[2]}"#), &n, &budget).unwrap(),
                int(0)
            );
        }
    }

    #[test]
    fn reconstruct_examples() {
        let table = ModuleMomentTable::from_measure(&half_half(), BTreeSet::from([2]), 32).unwrap();
        let r = MultiIndex(vec![3]);
        let b = reconstruct_probability(&table, &g(r#"{"2":[1]}"#), &f2(), &r).unwrap();
        assert_eq!(b, Bracket::point(ratio(1, 2)));
        let b = reconstruct_probability(&table, &g(r#"{"2":[2]}"#), &f2(), &MultiIndex(vec![1]))
            .unwrap();
        assert_eq!(b, Bracket::point(int(0)));
        let b = reconstruct_probability(&table, &FinAbGroup::trivial(), &f2(), &r).unwrap();
        assert_eq!(b, Bracket::point(ratio(1, 2)));
    }

    #[test]
    fn cohen_lenstra_fixed_point() {
        let r_max = 12;
        for p in [2u64, 3] {
            let basis = TypeBasis::primes(&[p]).unwrap();
            let r = MultiIndex(vec![r_max]);
            let ms = [
                FinAbGroup::trivial(),
                FinAbGroup::from_partition(p, &[1]).unwrap(),
                FinAbGroup::from_partition(p, &[2]).unwrap(),
            ];
            let bound = required_order_bound(&ms[2], &basis, &r).unwrap();
            let table = ModuleMomentTable::from_fn(BTreeSet::from([p]), bound, |_| int(1)).unwrap();
            for m in &ms {
                let b = reconstruct_probability(&table, m, &basis, &r).unwrap();
                let expected = euler(p, 1) / Rational::from_integer(automorphism_count(m));
                let width = rational::to_f64(&b.width());
                assert!(width < 1e-4, "p={p} M={m} width {width}");
                let slack = ratio(1, 1_000_000_000i64);
                assert!(
                    b.lower <= &expected + &slack && &expected - &slack <= b.upper,
                    "p={p} M={m} {}",
                    b.render()
                );
                if p == 2 && m.is_trivial() {
                    assert!(width < 1e-5);
                }
            }
        }
    }
}
