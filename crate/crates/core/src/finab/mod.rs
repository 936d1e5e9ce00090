//! Finite abelian groups as the concrete model of finite modules over a
//! product of `p`-adic integer rings.
//!
//! `group` holds the canonical form and closed-form counts, `oracle` the
//! brute-force counts that check them, and `ext` the extension tables.

pub mod elements;
pub mod ext;
mod group;
pub mod oracle;

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

pub use ext::{extension_classes, ExtensionTable};
pub use group::{
    automorphism_count, enumerate_groups, hom_count, partitions, sur_count, FinAbGroup,
};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::surjcount::{MultiIndex, TypeBasis};

/// Environment variable overriding the enumeration limits, as
/// `max_order[,max_kernel_source[,max_maps]]`.
pub const BUDGET_ENV: &str = "MOMENTFORGE_BUDGET";

/// Limits on brute-force enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Largest group order any enumeration may touch.
    pub max_order: u64,
    /// Largest source order for kernel enumeration.
    pub max_kernel_source: u64,
    /// Largest number of maps (or search steps) a single enumeration may visit.
    pub max_maps: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_order: 1024,
            max_kernel_source: 256,
            max_maps: 1 << 24,
        }
    }
}

impl Budget {
    pub fn parse(text: &str) -> Result<Self> {
        let mut budget = Budget::default();
        let fields: Vec<&str> = text.split(',').map(str::trim).collect();
        if fields.len() > 3 || fields.iter().any(|f| f.is_empty()) {
            return Err(Error::input(format!("malformed budget {text:?}")));
        }
        let slots = [
            &mut budget.max_order,
            &mut budget.max_kernel_source,
            &mut budget.max_maps,
        ];
        for (slot, field) in slots.into_iter().zip(&fields) {
            *slot = field
                .parse()
                .map_err(|_| Error::input(format!("malformed budget field {field:?}")))?;
        }
        Ok(budget)
    }

    /// Defaults, overridden by `MOMENTFORGE_BUDGET` when set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(BUDGET_ENV) {
            Ok(text) => Budget::parse(&text),
            Err(_) => Ok(Budget::default()),
        }
    }
}

/// A finitely supported measure on isomorphism classes of finite abelian groups.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Measure {
    masses: BTreeMap<FinAbGroup, Rational>,
}

#[derive(Serialize, Deserialize)]
struct MassEntry {
    group: FinAbGroup,
    #[serde(with = "rational::serde_str")]
    value: Rational,
}

#[derive(Serialize, Deserialize)]
struct MeasureJson {
    masses: Vec<MassEntry>,
}

impl Measure {
    pub fn new(masses: impl IntoIterator<Item = (FinAbGroup, Rational)>) -> Result<Self> {
        let mut out = Measure::default();
        for (g, q) in masses {
            out.add(g, q)?;
        }
        Ok(out)
    }

    pub fn point(g: FinAbGroup) -> Self {
        Measure {
            masses: BTreeMap::from([(g, Rational::from_integer(1.into()))]),
        }
    }

    /// Adds mass at `g`; zero masses are not stored.
    pub fn add(&mut self, g: FinAbGroup, q: Rational) -> Result<()> {
        if q.is_negative() {
            return Err(Error::input(format!(
                "negative mass {} at {g}",
                rational::format(&q)
            )));
        }
        if !q.is_zero() {
            *self.masses.entry(g).or_insert_with(Rational::zero) += q;
        }
        Ok(())
    }

    pub fn mass(&self, g: &FinAbGroup) -> Rational {
        self.masses.get(g).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = (&FinAbGroup, &Rational)> {
        self.masses.iter()
    }

    pub fn total(&self) -> Rational {
        self.masses.values().sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let masses = self
            .masses
            .iter()
            .map(|(g, q)| MassEntry {
                group: g.clone(),
                value: q.clone(),
            })
            .collect();
        serde_json::to_value(MeasureJson { masses }).expect("measure serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: MeasureJson = serde_json::from_str(text)?;
        Measure::new(raw.masses.into_iter().map(|e| (e.group, e.value)))
    }
}

/// Exponent vector of `A/IA = ⊕_p A/pA` over a basis of prime fields.
pub fn semisimplify(a: &FinAbGroup, basis: &TypeBasis) -> Result<MultiIndex> {
    let primes = basis_primes(basis)?;
    if let Some(p) = a.primes().find(|p| !primes.contains(p)) {
        return Err(Error::input(format!(
            "{a} has a {p}-part but F_{p} is not in the basis"
        )));
    }
    Ok(MultiIndex(primes.iter().map(|&p| a.rank(p)).collect()))
}

/// `prod F_{p_i}^{k_i}` for a basis of prime fields.
pub fn semisimple_group(basis: &TypeBasis, k: &MultiIndex) -> Result<FinAbGroup> {
    let primes = basis_primes(basis)?;
    if k.len() != primes.len() {
        return Err(Error::input("multi-index length does not match the basis"));
    }
    let comps = primes
        .iter()
        .zip(&k.0)
        .filter(|(_, &e)| e > 0)
        .map(|(&p, &e)| (p, vec![1; e as usize]))
        .collect();
    FinAbGroup::new(comps)
}

/// The primes of a basis made of distinct prime fields `F_p`.
pub fn basis_primes(basis: &TypeBasis) -> Result<Vec<u64>> {
    let mut primes = Vec::with_capacity(basis.len());
    for t in basis.types() {
        let p = t
            .prime()
            .ok_or_else(|| Error::input(format!("basis entry {t} is not a prime field F_p")))?;
        if primes.contains(&p) {
            return Err(Error::input(format!("F_{p} appears twice in the basis")));
        }
        primes.push(p);
    }
    Ok(primes)
}
