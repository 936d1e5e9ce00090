//! The oracle suite behind `momentforge verify`: every closed form checked
//! against an independent enumeration, plus randomized bracket soundness.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::finab::{
    enumerate_groups, extension_classes, hom_count, oracle, Budget, FinAbGroup, Measure,
};
use crate::inversion::{invert_zero, multi_invert_zero, partial_sums, MomentTable};
use crate::localize::{reconstruct_probability, required_order_bound, ModuleMomentTable};
use crate::nonab_oracle::sur_a5_bruteforce;
use crate::qseries::{q_binomial, SimpleType};
use crate::rational::{self, Rational};
use crate::surjcount::{sur_product, sur_single, MultiIndex, TypeBasis};

#[derive(Debug, Clone, Copy, Default)]
pub struct VerifyOptions {
    /// Skip the slowest enumerations and shrink the random trials.
    pub quick: bool,
    pub seed: u64,
    pub budget: Budget,
}

#[derive(Debug)]
pub struct Outcome {
    pub name: &'static str,
    pub result: Result<String>,
    pub elapsed: Duration,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.result.is_ok()
    }
}

type Check = fn(&VerifyOptions) -> Result<String>;

const CHECKS: [(&str, Check); 8] = [
    (
        "abelian surjections vs matrix enumeration",
        abelian_vs_matrices,
    ),
    (
        "product splitting vs homomorphism enumeration",
        product_splitting,
    ),
    ("A5 surjections vs permutation enumeration", a5_surjections),
    (
        "q-binomial recurrence and telescoping identity",
        q_identities,
    ),
    ("bracket soundness on random measures", bracket_soundness),
    ("Euler constant bracket", euler_constant),
    ("extension-sum identity", extension_sum_identity),
    ("end-to-end reconstruction", end_to_end),
];

pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|(name, _)| *name).collect()
}

pub fn run_suite(options: &VerifyOptions) -> Vec<Outcome> {
    CHECKS
        .iter()
        .map(|(name, check)| {
            let start = Instant::now();
            let result = check(options);
            Outcome {
                name,
                result,
                elapsed: start.elapsed(),
            }
        })
        .collect()
}

fn fail(msg: String) -> Error {
    Error::consistency(msg)
}

fn abelian_vs_matrices(_: &VerifyOptions) -> Result<String> {
    let mut n = 0;
    for h in [2u64, 3] {
        for e in 0..=4 {
            for k in 0..=4 {
                let formula = sur_single(SimpleType::abelian(h)?, e, k);
                let listed = BigInt::from(oracle::matrix_surjection_count(h, e, k)?);
                if formula != listed {
                    return Err(fail(format!(
                        "h={h} e={e} k={k}: formula {formula}, enumeration {listed}"
                    )));
                }
                n += 1;
            }
        }
    }
    Ok(format!("{n} cases"))
}

fn product_splitting(options: &VerifyOptions) -> Result<String> {
    let basis = TypeBasis::primes(&[2, 3])?;
    let group = |k: &MultiIndex| crate::finab::semisimple_group(&basis, k);
    let bound = MultiIndex(vec![2, 2]);
    let mut n = 0;
    for e in MultiIndex::box_iter(&bound) {
        for k in MultiIndex::box_iter(&bound) {
            let product = sur_product(&basis, &e, &k)?;
            let listed = oracle::sur_bruteforce(&group(&e)?, &group(&k)?, &options.budget)?;
            if product != listed {
                return Err(fail(format!(
                    "e={e} k={k}: product {product}, enumeration {listed}"
                )));
            }
            n += 1;
        }
    }
    Ok(format!("{n} cases"))
}

fn a5_surjections(options: &VerifyOptions) -> Result<String> {
    let t = SimpleType::non_abelian(120)?;
    let mut n = 0;
    for e in 0..=2 {
        for k in 0..=2 {
            if options.quick && e == 2 && k == 2 {
                continue;
            }
            let formula = sur_single(t, e, k);
            let listed = sur_a5_bruteforce(e, k)?;
            if formula != listed {
                return Err(fail(format!(
                    "e={e} k={k}: formula {formula}, enumeration {listed}"
                )));
            }
            n += 1;
        }
    }
    Ok(format!("{n} cases"))
}

fn q_identities(_: &VerifyOptions) -> Result<String> {
    let mut n = 0;
    for h in [2u64, 3, 5] {
        let hb = BigInt::from(h);
        for e in 1..=8u32 {
            for k in 1..=8u32 {
                let lhs = q_binomial(e, k, h);
                let rhs = q_binomial(e - 1, k - 1, h) + hb.pow(k) * q_binomial(e - 1, k, h);
                if lhs != rhs {
                    return Err(fail(format!("recurrence fails at h={h} e={e} k={k}")));
                }
                n += 1;
            }
            let mut sum = BigInt::zero();
            for r in 0..=8u32 {
                let sign = if r % 2 == 0 {
                    BigInt::one()
                } else {
                    -BigInt::one()
                };
                sum += &sign * q_binomial(e, r, h) * hb.pow(r * r.saturating_sub(1) / 2);
                let closed = &sign * q_binomial(e - 1, r, h) * hb.pow(r * (r + 1) / 2);
                if sum != closed {
                    return Err(fail(format!("telescoping fails at h={h} e={e} r={r}")));
                }
                n += 1;
            }
        }
    }
    Ok(format!("{n} identities"))
}

fn random_mass(rng: &mut ChaCha8Rng) -> Rational {
    Rational::new(rng.gen_range(0..20).into(), rng.gen_range(1..12).into())
}

/// Moments `sum_e Sur(e, k) m(e)` of a finitely supported one-type measure.
pub fn one_type_moments(t: SimpleType, masses: &[Rational], bound: u32) -> Result<MomentTable> {
    MomentTable::from_fn(TypeBasis(vec![t]), MultiIndex(vec![bound]), |k| {
        masses
            .iter()
            .enumerate()
            .map(|(e, m)| m * Rational::from_integer(sur_single(t, e as u32, k.0[0])))
            .sum()
    })
}

fn bracket_soundness(options: &VerifyOptions) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let trials = if options.quick { 40 } else { 200 };
    let types = [
        SimpleType::abelian(2)?,
        SimpleType::abelian(3)?,
        SimpleType::abelian(4)?,
        SimpleType::non_abelian(120)?,
    ];
    for trial in 0..trials {
        let t = types[trial % types.len()];
        let support = rng.gen_range(1..=8);
        let masses: Vec<Rational> = (0..support).map(|_| random_mass(&mut rng)).collect();
        let r_max = rng.gen_range(0..=10);
        let table = one_type_moments(t, &masses, r_max)?;
        let m0 = &masses[0];
        for (r, s) in partial_sums(&table, r_max)?.iter().enumerate() {
            if (r % 2 == 0 && s < m0) || (r % 2 == 1 && s > m0) {
                return Err(fail(format!(
                    "trial {trial}: partial sum {r} on the wrong side for {t}"
                )));
            }
        }
        if !invert_zero(&table, r_max)?.contains(m0) {
            return Err(fail(format!("trial {trial}: bracket misses m(0) for {t}")));
        }
        let basis = TypeBasis::primes(&[2, 3])?;
        let mut joint = BTreeMap::new();
        for e in MultiIndex::box_iter(&MultiIndex(vec![2, 2])) {
            if rng.gen_bool(0.6) {
                joint.insert(e, random_mass(&mut rng));
            }
        }
        let bound = MultiIndex(vec![rng.gen_range(0..=5), rng.gen_range(0..=5)]);
        let table = MomentTable::from_fn(basis.clone(), bound.clone(), |k| {
            joint
                .iter()
                .map(|(e, m)| m * Rational::from_integer(sur_product(&basis, e, k).unwrap()))
                .sum()
        })?;
        let zero = joint
            .get(&MultiIndex(vec![0, 0]))
            .cloned()
            .unwrap_or_else(Rational::zero);
        if !multi_invert_zero(&table, &bound)?.contains(&zero) {
            return Err(fail(format!(
                "trial {trial}: two-type bracket misses m(0,0)"
            )));
        }
    }
    Ok(format!("{trials} one-type and {trials} two-type measures"))
}

/// `prod_{k=1}^{terms} (1 - h^{-k})`.
pub fn euler_product(h: u64, terms: u32) -> Rational {
    (1..=terms)
        .map(|k| Rational::one() - Rational::new(BigInt::one(), BigInt::from(h).pow(k)))
        .product()
}

fn euler_constant(_: &VerifyOptions) -> Result<String> {
    let table = MomentTable::from_fn(TypeBasis::primes(&[2])?, MultiIndex(vec![12]), |_| {
        Rational::one()
    })?;
    let b = invert_zero(&table, 12)?;
    let target = euler_product(2, 30);
    let tol = Rational::new(1.into(), 1_000_000_000.into());
    let width = rational::to_f64(&b.width());
    if width >= 1e-6 || b.lower > &target + &tol || b.upper < &target - &tol {
        return Err(fail(format!(
            "bracket {} against {}",
            b.render(),
            rational::to_f64(&target)
        )));
    }
    Ok(format!("width {width:.2e}"))
}

fn extension_sum_identity(options: &VerifyOptions) -> Result<String> {
    let order_limit = if options.quick { 24 } else { 72 };
    let groups: Vec<FinAbGroup> = enumerate_groups(&BTreeSet::from([2, 3]), 72)?
        .into_iter()
        .filter(|g| 72 % g.order() == 0)
        .collect();
    let mut sur_cache: BTreeMap<(FinAbGroup, FinAbGroup), BigInt> = BTreeMap::new();
    let mut sur = |a: &FinAbGroup, b: &FinAbGroup| -> Result<BigInt> {
        if let Some(v) = sur_cache.get(&(a.clone(), b.clone())) {
            return Ok(v.clone());
        }
        let v = oracle::sur_bruteforce(a, b, &options.budget)?;
        sur_cache.insert((a.clone(), b.clone()), v.clone());
        Ok(v)
    };
    let mut cases = 0;
    for x in groups.iter().filter(|x| x.order() <= order_limit) {
        for m in &groups {
            if x.order() % m.order() != 0 {
                continue;
            }
            let census = oracle::kernel_census(x, m, &options.budget)?;
            for n in groups
                .iter()
                .filter(|n| n.is_semisimple() && n.order() * m.order() <= 72)
            {
                let mut direct = BigInt::zero();
                for (kernel, count) in &census {
                    direct += sur(kernel, n)? * count;
                }
                let table = extension_classes(n, m)?;
                let mut via_ext = BigInt::zero();
                for (middle, classes) in table.entries() {
                    via_ext += classes * sur(x, middle)?;
                }
                let hom = hom_count(m, n);
                if &via_ext % &hom != BigInt::zero() || via_ext / &hom != direct {
                    return Err(fail(format!("X={x} M={m} N={n}: kernels give {direct}")));
                }
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} triples"))
}

/// A random measure on at most `size` groups of order dividing 72.
pub fn random_measure(rng: &mut ChaCha8Rng, size: usize) -> Result<Measure> {
    let groups: Vec<FinAbGroup> = enumerate_groups(&BTreeSet::from([2, 3]), 72)?
        .into_iter()
        .filter(|g| 72 % g.order() == 0)
        .collect();
    let mut mu = Measure::default();
    for _ in 0..size {
        let g = groups[rng.gen_range(0..groups.len())].clone();
        mu.add(
            g,
            Rational::new(rng.gen_range(1..10).into(), rng.gen_range(1..50).into()),
        )?;
    }
    Ok(mu)
}

fn end_to_end(options: &VerifyOptions) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed ^ 0x5eed);
    let mu = random_measure(&mut rng, 12)?;
    let basis = TypeBasis::primes(&[2, 3])?;
    let r_max = MultiIndex(vec![4, 3]);
    let m_limit = if options.quick { 12 } else { 24 };
    let targets = enumerate_groups(&BTreeSet::from([2, 3]), m_limit)?;
    let largest = targets.last().expect("trivial group is listed");
    let bound = required_order_bound(largest, &basis, &r_max)?;
    let table = ModuleMomentTable::from_measure(&mu, BTreeSet::from([2, 3]), bound)?;
    for m in &targets {
        let b = reconstruct_probability(&table, m, &basis, &r_max)?;
        let truth = mu.mass(m);
        if !b.is_point() || b.lower != truth {
            return Err(fail(format!(
                "M={m}: bracket {} but mass {}",
                b.render(),
                rational::format(&truth)
            )));
        }
    }
    Ok(format!(
        "{} targets, support {}",
        targets.len(),
        mu.support().count()
    ))
}
