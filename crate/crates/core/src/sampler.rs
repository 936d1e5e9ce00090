//! Cokernels of uniformly random integer matrices reduced mod `p^cap`.
//!
//! Draw `i` under seed `s` is a pure function of `(s, i)`: each draw seeds its
//! own ChaCha stream, so the sample sequence does not depend on the number of
//! worker threads.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finab::{automorphism_count, sur_count, FinAbGroup, Measure};
use crate::inversion::Bracket;
use crate::localize::{reconstruct_probability, required_order_bound, ModuleMomentTable};
use crate::qseries::is_prime;
use crate::rational::{self, Rational};
use crate::smith::cokernel_exponents;
use crate::surjcount::{MultiIndex, TypeBasis};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub p: u64,
    /// Arithmetic is done modulo `p^cap`.
    pub cap: u32,
    /// Number of rows.
    pub n: usize,
    /// Columns beyond `n`.
    pub extra_cols: usize,
    pub seed: u64,
    pub count: u64,
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if !is_prime(self.p) {
            return Err(Error::input(format!(
                "sampler prime {} is not prime",
                self.p
            )));
        }
        if self.cap == 0 {
            return Err(Error::input("exponent cap must be at least 1"));
        }
        if self
            .p
            .checked_pow(self.cap)
            .is_none_or(|m| m > u32::MAX as u64)
        {
            return Err(Error::input(format!(
                "{}^{} is too large a modulus",
                self.p, self.cap
            )));
        }
        Ok(())
    }
}

/// The cokernel for draw `draw_index`. Cyclic factors of exponent `cap`
/// stand for anything of exponent at least `cap`.
pub fn sample_cokernel(config: &SamplerConfig, draw_index: u64) -> FinAbGroup {
    let modulus = config.p.pow(config.cap);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(draw_index);
    let cols = config.n + config.extra_cols;
    let mut matrix: Vec<Vec<u64>> = (0..config.n)
        .map(|_| (0..cols).map(|_| rng.gen_range(0..modulus)).collect())
        .collect();
    let exponents = cokernel_exponents(&mut matrix, config.p, config.cap);
    FinAbGroup::from_partition(config.p, &exponents).expect("cokernel exponents form a partition")
}

/// Draws `0..config.count`, in draw order.
pub fn sample_groups(config: &SamplerConfig) -> Result<Vec<FinAbGroup>> {
    config.validate()?;
    Ok((0..config.count)
        .into_par_iter()
        .map(|i| sample_cokernel(config, i))
        .collect())
}

/// The uniform probability measure on a list of draws.
pub fn empirical_measure(draws: &[FinAbGroup]) -> Measure {
    let mut counts: BTreeMap<&FinAbGroup, u64> = BTreeMap::new();
    for g in draws {
        *counts.entry(g).or_insert(0) += 1;
    }
    let t = draws.len() as u64;
    let masses = counts
        .into_iter()
        .map(|(g, c)| (g.clone(), Rational::new(c.into(), t.into())));
    Measure::new(masses).expect("frequencies are nonnegative")
}

pub fn sample_measure(config: &SamplerConfig) -> Result<Measure> {
    Ok(empirical_measure(&sample_groups(config)?))
}

/// `∫ Sur(X, target) dμ(X)`.
pub fn moment(mu: &Measure, target: &FinAbGroup) -> Rational {
    mu.support()
        .map(|(x, q)| q * Rational::from_integer(sur_count(x, target)))
        .sum()
}

/// The moments of `μ` at every group on `primes` of order at most `order_bound`.
pub fn empirical_moments(
    mu: &Measure,
    primes: BTreeSet<u64>,
    order_bound: u64,
) -> Result<ModuleMomentTable> {
    ModuleMomentTable::from_measure(mu, primes, order_bound)
}

/// Limiting mass of `M` for cokernels of `n x (n+u)` matrices over the
/// `p`-adic integers as `n -> ∞`: `|M|^{-u} / |Aut M| * prod_{k>u} (1 - p^{-k})`,
/// with the product cut after 30 factors.
pub fn reference_mass(p: u64, extra_cols: usize, m: &FinAbGroup) -> f64 {
    let u = extra_cols as u32;
    let tail: Rational = (u + 1..=u + 30)
        .map(|k| Rational::from_integer(1.into()) - Rational::new(1.into(), BigInt::from(p).pow(k)))
        .product();
    let weight = Rational::new(
        1.into(),
        BigInt::from(m.order()).pow(u) * automorphism_count(m),
    );
    rational::to_f64(&(tail * weight))
}

/// One line of a convergence report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub t: u64,
    pub group: FinAbGroup,
    #[serde(with = "rational::serde_str")]
    pub frequency: Rational,
    pub bracket: Bracket,
    pub reference: f64,
}

fn check_target(config: &SamplerConfig, m: &FinAbGroup) -> Result<()> {
    if m.primes().any(|q| q != config.p) {
        return Err(Error::input(format!(
            "target {m} is not a {}-group",
            config.p
        )));
    }
    if m.exponent_at(config.p) >= config.cap {
        return Err(Error::input(format!(
            "target {m} has exponent p^{} but samples are truncated at p^{}; use a target of exponent below the cap",
            m.exponent_at(config.p),
            config.cap
        )));
    }
    Ok(())
}

/// For every prefix length `t` in `counts` and every target, the observed
/// frequency of the target among the first `t` draws and the bracket
/// reconstructed from the exact moments of that empirical measure.
///
/// `config.count` is ignored; the largest `t` decides how many draws are made.
pub fn convergence_report(
    config: &SamplerConfig,
    counts: &[u64],
    targets: &[FinAbGroup],
    r_max: u32,
) -> Result<Vec<ReportRecord>> {
    config.validate()?;
    if counts.is_empty() || counts.contains(&0) || counts.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::input(
            "sample counts must be positive and strictly increasing",
        ));
    }
    for m in targets {
        check_target(config, m)?;
    }
    let basis = TypeBasis::primes(&[config.p])?;
    let r = MultiIndex(vec![r_max]);
    let mut order_bound = 1;
    for m in targets {
        order_bound = order_bound.max(required_order_bound(m, &basis, &r)?);
    }
    let draws = sample_groups(&SamplerConfig {
        count: *counts.last().unwrap(),
        ..*config
    })?;
    let mut records = Vec::new();
    for &t in counts {
        let mu = empirical_measure(&draws[..t as usize]);
        let table = empirical_moments(&mu, BTreeSet::from([config.p]), order_bound)?;
        for m in targets {
            records.push(ReportRecord {
                t,
                group: m.clone(),
                frequency: mu.mass(m),
                bracket: reconstruct_probability(&table, m, &basis, &r)?,
                reference: reference_mass(config.p, config.extra_cols, m),
            });
        }
    }
    Ok(records)
}

pub fn write_jsonl(records: &[ReportRecord], out: &mut impl Write) -> Result<()> {
    for r in records {
        let line = serde_json::to_string(r)?;
        writeln!(out, "{line}").map_err(|e| Error::input(format!("cannot write report: {e}")))?;
    }
    Ok(())
}

pub fn write_csv(records: &[ReportRecord], out: &mut impl Write) -> Result<()> {
    let io = |e: std::io::Error| Error::input(format!("cannot write report: {e}"));
    writeln!(out, "t,group,frequency,lower,upper,reference").map_err(io)?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.t,
            r.group,
            rational::to_f64(&r.frequency),
            rational::to_f64(&r.bracket.lower),
            rational::to_f64(&r.bracket.upper),
            r.reference
        )
        .map_err(io)?;
    }
    Ok(())
}
