//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on failure.
//!
//! Runs without the libtest harness so the lines are always shown.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use momentforge::finab::{
    enumerate_groups, extension_classes, hom_count, oracle, Budget, FinAbGroup, Measure,
};
use momentforge::inversion::{invert_zero, multi_invert_zero, partial_sums, MomentTable};
use momentforge::localize::{reconstruct_probability, ModuleMomentTable};
use momentforge::nonab_oracle::sur_a5_bruteforce;
use momentforge::qseries::{q_binomial, SimpleType};
use momentforge::rational::{self, Rational};
use momentforge::sampler::{self, SamplerConfig};
use momentforge::surjcount::{sur_product, sur_single, MultiIndex, TypeBasis};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Reduces `v` against an echelon basis of `(pivot column, row)` pairs with
/// unit pivots; returns the new basis entry if `v` is independent.
fn reduce(mut v: [u64; 4], basis: &[(usize, [u64; 4])], p: u64) -> Option<(usize, [u64; 4])> {
    for (c, b) in basis {
        let f = v[*c];
        for j in 0..4 {
            v[j] = (v[j] + (p - f) * b[j]) % p;
        }
    }
    let c = (0..4).find(|&j| v[j] != 0)?;
    let inv = (1..p).find(|&x| v[c] * x % p == 1).unwrap();
    for x in v.iter_mut() {
        *x = *x * inv % p;
    }
    Some((c, v))
}

/// Full-rank `k x e` matrices over `F_p` (`e <= 4`): rows are listed one at a
/// time and a row dependent on the earlier ones ends that branch.
fn surjective_matrices(p: u64, e: u32, k: u32) -> u64 {
    let vectors: Vec<[u64; 4]> = (0..p.pow(e))
        .map(|mut idx| {
            let mut v = [0u64; 4];
            for x in v.iter_mut().take(e as usize) {
                *x = idx % p;
                idx /= p;
            }
            v
        })
        .collect();
    fn rows(vectors: &[[u64; 4]], basis: &mut Vec<(usize, [u64; 4])>, left: u32, p: u64) -> u64 {
        if left == 0 {
            return 1;
        }
        let mut count = 0;
        for v in vectors {
            if let Some(entry) = reduce(*v, basis, p) {
                basis.push(entry);
                count += rows(vectors, basis, left - 1, p);
                basis.pop();
            }
        }
        count
    }
    rows(&vectors, &mut Vec::new(), k, p)
}

fn criterion_1() -> Outcome {
    let mut cases = 0;
    for h in [2u64, 3] {
        for e in 0..=4 {
            for k in 0..=4 {
                let formula = sur_single(SimpleType::abelian(h).unwrap(), e, k);
                let listed = BigInt::from(surjective_matrices(h, e, k));
                ensure(formula == listed, || {
                    format!("h={h} e={e} k={k}: {formula} vs {listed}")
                })?;
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} cases"))
}

fn criterion_2() -> Outcome {
    let basis = TypeBasis::primes(&[2, 3]).unwrap();
    let group = |k: &MultiIndex| {
        FinAbGroup::elementary(2, k.0[0])
            .unwrap()
            .direct_sum(&FinAbGroup::elementary(3, k.0[1]).unwrap())
            .unwrap()
    };
    let budget = Budget::default();
    let bound = MultiIndex(vec![2, 2]);
    let mut cases = 0;
    for e in MultiIndex::box_iter(&bound) {
        for k in MultiIndex::box_iter(&bound) {
            let product = sur_product(&basis, &e, &k).unwrap();
            let listed = oracle::sur_bruteforce(&group(&e), &group(&k), &budget).unwrap();
            ensure(product == listed, || {
                format!("e={e} k={k}: {product} vs {listed}")
            })?;
            cases += 1;
        }
    }
    Ok(format!("{cases} cases"))
}

fn criterion_3() -> Outcome {
    let t = SimpleType::non_abelian(120).unwrap();
    for e in 0..=2 {
        for k in 0..=2 {
            let formula = sur_single(t, e, k);
            let listed = sur_a5_bruteforce(e, k).unwrap();
            ensure(formula == listed, || {
                format!("e={e} k={k}: {formula} vs {listed}")
            })?;
        }
    }
    for (e, k, v) in [(1, 1, 120), (2, 1, 240), (2, 2, 28800)] {
        ensure(sur_single(t, e, k) == BigInt::from(v), || {
            format!("({e},{k}) != {v}")
        })?;
    }
    Ok("9 cases".into())
}

fn criterion_4() -> Outcome {
    let mut n = 0;
    for h in [2u64, 3, 5] {
        let hb = BigInt::from(h);
        for e in 0..=8u32 {
            for k in 0..=8u32 {
                if e >= 1 && k >= 1 {
                    let rhs = q_binomial(e - 1, k - 1, h) + hb.pow(k) * q_binomial(e - 1, k, h);
                    ensure(q_binomial(e, k, h) == rhs, || {
                        format!("recurrence h={h} e={e} k={k}")
                    })?;
                    n += 1;
                }
            }
            if e == 0 {
                continue;
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
                ensure(sum == closed, || format!("telescoping h={h} e={e} r={r}"))?;
                n += 1;
            }
        }
    }
    Ok(format!("{n} identities"))
}

fn random_mass(rng: &mut ChaCha8Rng) -> Rational {
    q(rng.gen_range(0..30), rng.gen_range(1..17))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let types = [
        SimpleType::abelian(2).unwrap(),
        SimpleType::abelian(3).unwrap(),
        SimpleType::abelian(9).unwrap(),
        SimpleType::non_abelian(120).unwrap(),
    ];
    for trial in 0..100 {
        let t = types[trial % 4];
        let masses: Vec<Rational> = (0..rng.gen_range(1..=8))
            .map(|_| random_mass(&mut rng))
            .collect();
        let r_max = rng.gen_range(0..=10u32);
        let table = MomentTable::from_fn(TypeBasis(vec![t]), MultiIndex(vec![r_max]), |k| {
            masses
                .iter()
                .enumerate()
                .map(|(e, m)| m * Rational::from_integer(sur_single(t, e as u32, k.0[0])))
                .sum()
        })
        .unwrap();
        let m0 = &masses[0];
        for (r, s) in partial_sums(&table, r_max).unwrap().iter().enumerate() {
            let ok = if r % 2 == 0 { s >= m0 } else { s <= m0 };
            ensure(ok, || {
                format!("one-type trial {trial}: S_{r} on the wrong side")
            })?;
        }
        let b = invert_zero(&table, r_max).unwrap();
        ensure(b.contains(m0), || {
            format!("one-type trial {trial}: {} misses m(0)", b.render())
        })?;
    }
    let bases = [
        TypeBasis::primes(&[2, 3]).unwrap(),
        TypeBasis(vec![
            SimpleType::abelian(4).unwrap(),
            SimpleType::non_abelian(120).unwrap(),
        ]),
    ];
    for trial in 0..100 {
        let basis = &bases[trial % 2];
        let mut m = BTreeMap::new();
        for e in MultiIndex::box_iter(&MultiIndex(vec![2, 2])) {
            if rng.gen_bool(0.5) {
                m.insert(e, random_mass(&mut rng));
            }
        }
        let bound = MultiIndex(vec![rng.gen_range(0..=6), rng.gen_range(0..=6)]);
        let table = MomentTable::from_fn(basis.clone(), bound.clone(), |k| {
            m.iter()
                .map(|(e, v)| v * Rational::from_integer(sur_product(basis, e, k).unwrap()))
                .sum()
        })
        .unwrap();
        let truth = m
            .get(&MultiIndex(vec![0, 0]))
            .cloned()
            .unwrap_or_else(Rational::zero);
        let b = multi_invert_zero(&table, &bound).unwrap();
        ensure(b.contains(&truth), || {
            format!("two-type trial {trial}: {} misses m(0,0)", b.render())
        })?;
    }
    Ok("100 one-type and 100 two-type measures".into())
}

fn criterion_6() -> Outcome {
    let table = MomentTable::from_fn(
        TypeBasis::primes(&[2]).unwrap(),
        MultiIndex(vec![12]),
        |_| Rational::one(),
    )
    .unwrap();
    let b = invert_zero(&table, 12).unwrap();
    let reference: Rational = (1..=30u32)
        .map(|k| Rational::one() - Rational::new(BigInt::one(), BigInt::from(2).pow(k)))
        .product();
    let tol = q(1, 1_000_000_000);
    ensure(b.width() < q(1, 1_000_000), || {
        format!("width of {}", b.render())
    })?;
    ensure(
        b.lower <= &reference + &tol && b.upper >= &reference - &tol,
        || b.render(),
    )?;
    let float = 0.2887880951f64;
    ensure(
        (rational::to_f64(&b.midpoint()) - float).abs() < 1e-9,
        || b.render(),
    )?;
    Ok(format!(
        "{} vs {:.10}",
        b.render(),
        rational::to_f64(&reference)
    ))
}

fn criterion_7() -> Outcome {
    let budget = Budget::default();
    let groups: Vec<FinAbGroup> = enumerate_groups(&BTreeSet::from([2, 3]), 72)
        .unwrap()
        .into_iter()
        .filter(|g| 72 % g.order() == 0)
        .collect();
    let semisimple: Vec<&FinAbGroup> = groups.iter().filter(|g| g.is_semisimple()).collect();
    let mut tables = BTreeMap::new();
    for m in &groups {
        for n in semisimple.iter().filter(|n| n.order() * m.order() <= 72) {
            let brute =
                oracle::extension_table_bruteforce(n, m, &budget).map_err(|e| e.to_string())?;
            let structured = extension_classes(n, m).unwrap();
            ensure(brute.entries() == structured.entries(), || {
                format!("tables differ for N={n} M={m}")
            })?;
            tables.insert(((*n).clone(), m.clone()), brute);
        }
    }
    let mut cases = 0;
    for x in &groups {
        for m in groups.iter().filter(|m| x.order() % m.order() == 0) {
            for n in semisimple.iter().filter(|n| n.order() * m.order() <= 72) {
                let pairs =
                    oracle::kernel_pair_count(x, m, n, &budget).map_err(|e| e.to_string())?;
                let mut sum = BigInt::zero();
                for (middle, classes) in tables[&((*n).clone(), m.clone())].entries() {
                    sum += classes * oracle::sur_bruteforce(x, middle, &budget).unwrap();
                }
                let hom = hom_count(m, n);
                ensure(&sum % &hom == BigInt::zero() && sum / &hom == pairs, || {
                    format!("X={x} M={m} N={n}: {pairs} kernel pairs")
                })?;
                cases += 1;
            }
        }
    }
    Ok(format!("{cases} triples over {} groups X", groups.len()))
}

fn criterion_8() -> Outcome {
    let budget = Budget::default();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let divisors: Vec<FinAbGroup> = enumerate_groups(&BTreeSet::from([2, 3]), 72)
        .unwrap()
        .into_iter()
        .filter(|g| 72 % g.order() == 0)
        .collect();
    let mut mu = Measure::default();
    while mu.support().count() < 12 {
        let g = divisors[rng.gen_range(0..divisors.len())].clone();
        mu.add(g, q(rng.gen_range(1..20), rng.gen_range(1..40)))
            .unwrap();
    }
    let basis = TypeBasis::primes(&[2, 3]).unwrap();
    let r_max = MultiIndex(vec![4, 3]);
    // middles of extensions of M (|M| <= 24) by F_2^4 x F_3^3
    let bound = 24 * 16 * 27;
    let table = ModuleMomentTable::from_fn(BTreeSet::from([2, 3]), bound, |target| {
        mu.support()
            .filter(|(x, _)| x.order() % target.order() == 0)
            .map(|(x, m)| {
                m * Rational::from_integer(oracle::sur_bruteforce(x, target, &budget).unwrap())
            })
            .sum()
    })
    .unwrap();
    let targets = enumerate_groups(&BTreeSet::from([2, 3]), 24).unwrap();
    for m in &targets {
        let b = reconstruct_probability(&table, m, &basis, &r_max).unwrap();
        let truth = mu.mass(m);
        ensure(b.is_point() && b.lower == truth, || {
            format!(
                "M={m}: {} but mu(M) = {}",
                b.render(),
                rational::format(&truth)
            )
        })?;
    }
    Ok(format!("{} targets, all point brackets", targets.len()))
}

/// Sample mean and standard error of `Sur(X, Z/2) = 2^rank - 1`.
fn moment_at_z2(draws: &[FinAbGroup]) -> (f64, f64) {
    let ys: Vec<f64> = draws
        .iter()
        .map(|g| (1u64 << g.rank(2)) as f64 - 1.0)
        .collect();
    let t = ys.len() as f64;
    let mean = ys.iter().sum::<f64>() / t;
    let var = ys.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / (t - 1.0);
    (mean, (var / t).sqrt())
}

fn criterion_9() -> Outcome {
    let mut notes = Vec::new();
    for (attempt, seed) in [(1, 90210u64), (2, 31337)] {
        let config = SamplerConfig {
            p: 2,
            cap: 3,
            n: 8,
            extra_cols: 0,
            seed,
            count: 100_000,
        };
        let draws = sampler::sample_groups(&config).unwrap();
        let (mean, se) = moment_at_z2(&draws);
        let z = (mean - 1.0).abs() / se;
        let records =
            sampler::convergence_report(&config, &[100_000], &[FinAbGroup::trivial()], 10).unwrap();
        let mid = rational::to_f64(&records[0].bracket.midpoint());
        let close = (mid - 0.288788).abs() < 0.02;
        notes.push(format!(
            "seed {seed}: moment {mean:.5} ({z:.2} sigma), midpoint {mid:.5}"
        ));
        if z <= 3.0 && close {
            return Ok(notes.join("; "));
        }
        if z > 5.0 || !close || attempt == 2 {
            return Err(notes.join("; "));
        }
        println!("  criterion 9: {:.2} sigma deviation, rerunning once", z);
    }
    unreachable!()
}

fn main() {
    let criteria: [Criterion; 9] = [
        (
            "abelian surjection formula vs matrix enumeration",
            criterion_1,
            Duration::from_secs(10),
        ),
        (
            "product splitting vs brute force",
            criterion_2,
            Duration::from_secs(30),
        ),
        (
            "non-abelian formula vs A5 enumeration",
            criterion_3,
            Duration::from_secs(120),
        ),
        ("q-binomial identities", criterion_4, Duration::from_secs(1)),
        ("bracketing soundness", criterion_5, Duration::from_secs(60)),
        (
            "Euler constant bracket",
            criterion_6,
            Duration::from_secs(1),
        ),
        (
            "extension-sum identity",
            criterion_7,
            Duration::from_secs(300),
        ),
        (
            "end-to-end exact reconstruction",
            criterion_8,
            Duration::from_secs(300),
        ),
        ("sampler convergence", criterion_9, Duration::from_secs(300)),
    ];
    let mut failures = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > *limit => {
                Err(format!("{detail}; took {elapsed:.1?}, limit {limit:?}"))
            }
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS {}. {name}: {detail} [{elapsed:.2?}]", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL {}. {name}: {detail} [{elapsed:.2?}]", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
