//! Moment inversion with certified brackets.
//!
//! For one simple type, `S_r = sum_{k<=r} c_k M_k` overshoots the mass at the
//! trivial object when `r` is even and undershoots when `r` is odd, for any
//! nonnegative measure with moments `M_k`. Several types are eliminated one
//! after another; from the second stage on the inputs are intervals and each
//! truncated sum is evaluated at the endpoint that keeps the inequality valid.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qseries::{inversion_coefficient, SimpleType};
use crate::rational::{self, Rational};
use crate::surjcount::{MultiIndex, TypeBasis};

/// A certified interval `[lower, upper]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bracket {
    #[serde(with = "rational::serde_str")]
    pub lower: Rational,
    #[serde(with = "rational::serde_str")]
    pub upper: Rational,
}

impl Bracket {
    pub fn new(lower: Rational, upper: Rational) -> Result<Self> {
        if lower > upper {
            return Err(Error::input(format!(
                "empty bracket [{}, {}]: the moments are not those of a nonnegative measure",
                rational::format(&lower),
                rational::format(&upper)
            )));
        }
        Ok(Bracket { lower, upper })
    }

    pub fn point(x: Rational) -> Self {
        Bracket {
            lower: x.clone(),
            upper: x,
        }
    }

    pub fn width(&self) -> Rational {
        &self.upper - &self.lower
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lower <= x && x <= &self.upper
    }

    pub fn is_point(&self) -> bool {
        self.lower == self.upper
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lower + &self.upper) / Rational::from_integer(2.into())
    }

    pub fn scale(&self, factor: &Rational) -> Bracket {
        debug_assert!(!factor.is_negative());
        Bracket {
            lower: &self.lower * factor,
            upper: &self.upper * factor,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("bracket serialises")
    }

    pub fn render(&self) -> String {
        format!(
            "[{}, {}] ~ [{:.10}, {:.10}]",
            rational::format(&self.lower),
            rational::format(&self.upper),
            rational::to_f64(&self.lower),
            rational::to_f64(&self.upper)
        )
    }
}

/// Moments `sum_e Sur(prod G_i^{e_i}, prod G_i^{k_i}) μ(e)` for every `k`
/// in the box `[0, bound]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentTable {
    basis: TypeBasis,
    bound: MultiIndex,
    values: BTreeMap<MultiIndex, Rational>,
}

#[derive(Serialize, Deserialize)]
struct MomentEntry {
    k: MultiIndex,
    #[serde(with = "rational::serde_str")]
    value: Rational,
}

#[derive(Serialize, Deserialize)]
struct MomentTableJson {
    basis: TypeBasis,
    bound: MultiIndex,
    moments: Vec<MomentEntry>,
}

impl MomentTable {
    pub fn new(
        basis: TypeBasis,
        bound: MultiIndex,
        values: BTreeMap<MultiIndex, Rational>,
    ) -> Result<Self> {
        if bound.len() != basis.len() {
            return Err(Error::input(format!(
                "bound {bound} has {} entries for a basis of {} types",
                bound.len(),
                basis.len()
            )));
        }
        for (k, v) in &values {
            if !k.le(&bound) {
                return Err(Error::input(format!(
                    "moment index {k} lies outside the bound {bound}"
                )));
            }
            if v.is_negative() {
                return Err(Error::input(format!("moment at {k} is negative")));
            }
        }
        if let Some(missing) = MultiIndex::box_iter(&bound).find(|k| !values.contains_key(k)) {
            return Err(Error::input(format!("moment at {missing} is missing")));
        }
        Ok(MomentTable {
            basis,
            bound,
            values,
        })
    }

    /// Builds a table from a function of the index.
    pub fn from_fn(
        basis: TypeBasis,
        bound: MultiIndex,
        mut f: impl FnMut(&MultiIndex) -> Rational,
    ) -> Result<Self> {
        let values = MultiIndex::box_iter(&bound).map(|k| {
            let v = f(&k);
            (k, v)
        });
        let values = values.collect();
        MomentTable::new(basis, bound, values)
    }

    pub fn basis(&self) -> &TypeBasis {
        &self.basis
    }

    pub fn bound(&self) -> &MultiIndex {
        &self.bound
    }

    pub fn get(&self, k: &MultiIndex) -> Option<&Rational> {
        self.values.get(k)
    }

    pub fn values(&self) -> &BTreeMap<MultiIndex, Rational> {
        &self.values
    }

    /// The same moments with the basis coordinates permuted: new coordinate
    /// `i` is old coordinate `order[i]`.
    pub fn reorder(&self, order: &[usize]) -> Result<Self> {
        let m = self.basis.len();
        let mut sorted = order.to_vec();
        sorted.sort_unstable();
        if sorted != (0..m).collect::<Vec<_>>() {
            return Err(Error::input(format!(
                "{order:?} is not a permutation of 0..{m}"
            )));
        }
        let permute = |v: &MultiIndex| MultiIndex(order.iter().map(|&i| v.0[i]).collect());
        let basis = TypeBasis(order.iter().map(|&i| self.basis.0[i]).collect());
        let values = self
            .values
            .iter()
            .map(|(k, v)| (permute(k), v.clone()))
            .collect();
        MomentTable::new(basis, permute(&self.bound), values)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let moments = self
            .values
            .iter()
            .map(|(k, v)| MomentEntry {
                k: k.clone(),
                value: v.clone(),
            })
            .collect();
        let raw = MomentTableJson {
            basis: self.basis.clone(),
            bound: self.bound.clone(),
            moments,
        };
        serde_json::to_value(raw).expect("moment table serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: MomentTableJson = serde_json::from_str(text)?;
        let mut values = BTreeMap::new();
        for e in raw.moments {
            if values.insert(e.k.clone(), e.value).is_some() {
                return Err(Error::input(format!("moment at {} listed twice", e.k)));
            }
        }
        MomentTable::new(raw.basis, raw.bound, values)
    }
}

fn single_type(moments: &MomentTable) -> Result<SimpleType> {
    match moments.basis().types() {
        [t] => Ok(*t),
        other => Err(Error::input(format!(
            "expected a one-type table, got {} types",
            other.len()
        ))),
    }
}

fn check_depth(r: u32, available: u32) -> Result<()> {
    if r > available {
        return Err(Error::input(format!(
            "truncation {r} needs moments up to k = {r}, but only {available} are available"
        )));
    }
    Ok(())
}

/// `S_r = sum_{k=0}^{r} c_k M_k` for a one-type table.
pub fn partial_sum(moments: &MomentTable, r: u32) -> Result<Rational> {
    Ok(partial_sums(moments, r)?.pop().expect("at least S_0"))
}

/// `[S_0, ..., S_r]`.
pub fn partial_sums(moments: &MomentTable, r: u32) -> Result<Vec<Rational>> {
    let t = single_type(moments)?;
    check_depth(r, moments.bound().0[0])?;
    let mut acc = Rational::zero();
    Ok((0..=r)
        .map(|k| {
            acc += inversion_coefficient(t, k) * &moments.values[&MultiIndex(vec![k])];
            acc.clone()
        })
        .collect())
}

/// Bracket on the mass at the trivial object from one-type moments.
pub fn invert_zero(moments: &MomentTable, r_max: u32) -> Result<Bracket> {
    let t = single_type(moments)?;
    check_depth(r_max, moments.bound().0[0])?;
    let inputs: Vec<Bracket> = (0..=r_max)
        .map(|k| Bracket::point(moments.values[&MultiIndex(vec![k])].clone()))
        .collect();
    invert_interval(t, &inputs)
}

/// The one-type step on interval-valued moments `inputs[k] ∋ M_k`.
///
/// Upper bounds come from even truncations evaluated at the largest
/// admissible moments (`hi` where `c_k > 0`, `lo` where `c_k < 0`), lower bounds
/// from odd truncations at the smallest, floored at 0.
pub fn invert_interval(t: SimpleType, inputs: &[Bracket]) -> Result<Bracket> {
    let mut hi_sum = Rational::zero();
    let mut lo_sum = Rational::zero();
    let mut upper: Option<Rational> = None;
    let mut lower = Rational::zero();
    for (k, m) in inputs.iter().enumerate() {
        let c = inversion_coefficient(t, k as u32);
        if c.is_positive() {
            hi_sum += &c * &m.upper;
            lo_sum += &c * &m.lower;
        } else {
            hi_sum += &c * &m.lower;
            lo_sum += &c * &m.upper;
        }
        if k % 2 == 0 {
            if upper.as_ref().is_none_or(|u| hi_sum < *u) {
                upper = Some(hi_sum.clone());
            }
        } else if lo_sum > lower {
            lower = lo_sum.clone();
        }
    }
    let upper = upper.ok_or_else(|| Error::input("no moments supplied"))?;
    Bracket::new(lower, upper)
}

/// Bracket on `μ(0, ..., 0)` from multi-type moments, eliminating the basis
/// types in order. `r_max[i]` is the truncation used for type `i`.
pub fn multi_invert_zero(moments: &MomentTable, r_max: &MultiIndex) -> Result<Bracket> {
    let m = moments.basis().len();
    if r_max.len() != m {
        return Err(Error::input(format!(
            "r_max {r_max} does not match a basis of {m} types"
        )));
    }
    for (&r, &b) in r_max.0.iter().zip(&moments.bound().0) {
        check_depth(r, b)?;
    }
    if m == 0 {
        return Ok(Bracket::point(moments.values[&MultiIndex(vec![])].clone()));
    }
    // stage state: brackets indexed by the not-yet-eliminated coordinates
    let mut current: BTreeMap<Vec<u32>, Bracket> = MultiIndex::box_iter(r_max)
        .map(|k| {
            let v = moments.values[&k].clone();
            (k.0, Bracket::point(v))
        })
        .collect();
    for (j, &t) in moments.basis().types().iter().enumerate() {
        let rest = MultiIndex(r_max.0[j + 1..].to_vec());
        let mut next = BTreeMap::new();
        for tail in MultiIndex::box_iter(&rest) {
            let inputs: Vec<Bracket> = (0..=r_max.0[j])
                .map(|kj| {
                    let mut key = vec![kj];
                    key.extend_from_slice(&tail.0);
                    current[&key].clone()
                })
                .collect();
            next.insert(tail.0, invert_interval(t, &inputs)?);
        }
        current = next;
    }
    Ok(current.remove(&Vec::new()).expect("all types eliminated"))
}
