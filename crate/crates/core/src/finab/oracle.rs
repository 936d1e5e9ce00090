//! Brute-force counting by explicit enumeration of homomorphisms.
//!
//! A homomorphism out of `Z/n_1 x ... x Z/n_r` is a tuple of generator images
//! `b_i` with `n_i b_i = 0`. Every count here walks those tuples; nothing
//! relies on the closed forms in `group`.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use num_bigint::BigInt;
use num_traits::Zero;

use super::elements::{ElementSpace, Subset};
use super::ext::ExtensionTable;
use super::{enumerate_groups, Budget, FinAbGroup};
use crate::error::{Error, Result};
use crate::rational::Rational;

fn check_order(g: &FinAbGroup, limit: u64, what: &str) -> Result<()> {
    if g.order() > limit {
        return Err(Error::budget(format!(
            "{what} {g} has order {} above the enumeration limit {limit}",
            g.order()
        )));
    }
    Ok(())
}

/// Calls `visit` with the generator images of every homomorphism `src -> dst`.
pub fn for_each_hom(
    src: &FinAbGroup,
    dst: &FinAbGroup,
    budget: &Budget,
    mut visit: impl FnMut(&ElementSpace, &[usize]),
) -> Result<()> {
    check_order(src, budget.max_order, "source")?;
    check_order(dst, budget.max_order, "target")?;
    let src_space = ElementSpace::new(src);
    let dst_space = ElementSpace::new(dst);
    let candidates: Vec<Vec<usize>> = src_space
        .moduli()
        .iter()
        .map(|&n| {
            (0..dst_space.size())
                .filter(|&b| dst_space.killed_by(b, n))
                .collect()
        })
        .collect();
    let total = candidates
        .iter()
        .try_fold(1u64, |acc, c| acc.checked_mul(c.len() as u64))
        .unwrap_or(u64::MAX);
    if total > budget.max_maps {
        return Err(Error::budget(format!(
            "{total} homomorphisms {src} -> {dst} exceed the map limit {}",
            budget.max_maps
        )));
    }
    let mut choice = vec![0usize; candidates.len()];
    let mut images: Vec<usize> = candidates.iter().map(|c| c[0]).collect();
    loop {
        visit(&dst_space, &images);
        // odometer
        let mut i = 0;
        loop {
            if i == choice.len() {
                return Ok(());
            }
            choice[i] += 1;
            if choice[i] < candidates[i].len() {
                images[i] = candidates[i][choice[i]];
                break;
            }
            choice[i] = 0;
            images[i] = candidates[i][0];
            i += 1;
        }
    }
}

fn evaluate(src: &ElementSpace, dst: &ElementSpace, images: &[usize], x: usize) -> usize {
    src.digits(x)
        .iter()
        .zip(images)
        .fold(0, |acc, (&d, &img)| dst.add(acc, dst.scale(img, d)))
}

fn kernel(src: &ElementSpace, dst: &ElementSpace, images: &[usize]) -> Subset {
    let mut k = Subset::empty(src.size());
    for x in 0..src.size() {
        if evaluate(src, dst, images, x) == 0 {
            k.insert(x);
        }
    }
    k
}

/// Isomorphism type of a subgroup, read off from how many members are
/// killed by each `p^j`.
pub fn subgroup_type(space: &ElementSpace, members: &Subset) -> Result<FinAbGroup> {
    let orders: Vec<u64> = members.iter().map(|x| space.order_of(x)).collect();
    let mut primes = BTreeSet::new();
    for &n in space.moduli() {
        if let Some(p) = crate::qseries::prime_power_base(n) {
            primes.insert(p);
        }
    }
    let mut comps = BTreeMap::new();
    for p in primes {
        // conjugate[j-1] = number of parts >= j
        let mut conjugate = Vec::new();
        let mut prev = 1usize;
        let mut pj = 1u64;
        loop {
            pj *= p;
            let killed = orders.iter().filter(|&&o| pj.is_multiple_of(o)).count();
            if killed == prev {
                break;
            }
            let ratio = killed / prev;
            let mut parts = 0u32;
            let mut r = ratio;
            while r > 1 {
                r /= p as usize;
                parts += 1;
            }
            conjugate.push(parts);
            prev = killed;
        }
        let len = conjugate.first().copied().unwrap_or(0);
        let parts: Vec<u32> = (0..len)
            .map(|i| conjugate.iter().filter(|&&c| c > i).count() as u32)
            .collect();
        comps.insert(p, parts);
    }
    FinAbGroup::new(comps)
}

/// Number of surjective homomorphisms `a -> b`.
///
/// Generator images are chosen one at a time; the tree of partial choices is
/// walked with memoisation on the subgroup spanned so far, so every
/// homomorphism is still counted individually by its image tuple.
pub fn sur_bruteforce(a: &FinAbGroup, b: &FinAbGroup, budget: &Budget) -> Result<BigInt> {
    if b.order() > a.order() {
        return Ok(BigInt::zero());
    }
    check_order(a, budget.max_order, "source")?;
    check_order(b, budget.max_order, "target")?;
    let src = ElementSpace::new(a);
    let dst = ElementSpace::new(b);
    let candidates: Vec<Vec<usize>> = src
        .moduli()
        .iter()
        .map(|&n| (0..dst.size()).filter(|&y| dst.killed_by(y, n)).collect())
        .collect();
    let full = dst.size();
    // level -> span -> number of image prefixes reaching it
    let mut frontier: HashMap<Subset, BigInt> = HashMap::from([(dst.span(&[]), BigInt::from(1))]);
    let mut work = 0u64;
    for cands in &candidates {
        work = work.saturating_add(frontier.len() as u64 * cands.len() as u64);
        if work > budget.max_maps {
            return Err(Error::budget(format!(
                "surjection search {a} -> {b} exceeds the map limit {}",
                budget.max_maps
            )));
        }
        let mut next: HashMap<Subset, BigInt> = HashMap::new();
        for (span, ways) in &frontier {
            let mut by_span: HashMap<Subset, u64> = HashMap::new();
            for &y in cands {
                *by_span.entry(dst.extend(span, y)).or_insert(0) += 1;
            }
            for (s, c) in by_span {
                *next.entry(s).or_insert_with(BigInt::zero) += ways * c;
            }
        }
        frontier = next;
    }
    Ok(frontier
        .into_iter()
        .filter(|(s, _)| s.len() == full)
        .map(|(_, c)| c)
        .sum())
}

/// Number of homomorphisms `a -> b`: the product over generators of the
/// number of elements of `b` killed by that generator's order.
pub fn hom_count_bruteforce(a: &FinAbGroup, b: &FinAbGroup, budget: &Budget) -> Result<BigInt> {
    check_order(a, budget.max_order, "source")?;
    check_order(b, budget.max_order, "target")?;
    let src = ElementSpace::new(a);
    let dst = ElementSpace::new(b);
    Ok(src
        .moduli()
        .iter()
        .map(|&n| BigInt::from((0..dst.size()).filter(|&y| dst.killed_by(y, n)).count()))
        .product())
}

/// `|Aut(a)|` as the number of bijective endomorphisms.
pub fn aut_count(a: &FinAbGroup, budget: &Budget) -> Result<BigInt> {
    sur_bruteforce(a, a, budget)
}

/// For every surjection `π: x -> m`, the isomorphism type of `ker π`, with
/// multiplicities.
pub fn kernel_census(
    x: &FinAbGroup,
    m: &FinAbGroup,
    budget: &Budget,
) -> Result<BTreeMap<FinAbGroup, u64>> {
    check_order(x, budget.max_kernel_source, "kernel source")?;
    let mut census = BTreeMap::new();
    if m.order() > x.order() {
        return Ok(census);
    }
    let src = ElementSpace::new(x);
    let full = m.order() as usize;
    let mut failure = None;
    for_each_hom(x, m, budget, |dst, images| {
        if failure.is_some() || dst.span(images).len() != full {
            return;
        }
        match subgroup_type(&src, &kernel(&src, dst, images)) {
            Ok(k) => *census.entry(k).or_insert(0) += 1,
            Err(e) => failure = Some(e),
        }
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(census),
    }
}

/// Number of pairs `(π: x ->> m, f: ker π ->> n)` for semisimple `n`.
pub fn kernel_pair_count(
    x: &FinAbGroup,
    m: &FinAbGroup,
    n: &FinAbGroup,
    budget: &Budget,
) -> Result<BigInt> {
    if !n.is_semisimple() {
        return Err(Error::input(format!("{n} is not semisimple")));
    }
    let mut total = BigInt::zero();
    for (k, count) in kernel_census(x, m, budget)? {
        total += sur_bruteforce(&k, n, budget)? * count;
    }
    Ok(total)
}

/// All subgroups of `space` whose order is `order`, grown one element at a
/// time from the trivial subgroup using only elements whose order divides
/// `exponent`.
pub fn subgroups_of_order(space: &ElementSpace, order: usize, exponent: u64) -> Vec<Subset> {
    let pool: Vec<usize> = (1..space.size())
        .filter(|&y| space.killed_by(y, exponent))
        .collect();
    let mut seen: HashSet<Subset> = HashSet::new();
    let mut layer = vec![space.span(&[])];
    seen.insert(layer[0].clone());
    let mut found = Vec::new();
    while !layer.is_empty() {
        let mut next = Vec::new();
        for s in layer {
            if s.len() == order {
                found.push(s);
                continue;
            }
            for &y in &pool {
                if s.contains(y) {
                    continue;
                }
                let t = space.extend(&s, y);
                if order.is_multiple_of(t.len()) && seen.insert(t.clone()) {
                    next.push(t);
                }
            }
        }
        layer = next;
    }
    found
}

/// Isomorphism type of `space / k`, from how many cosets are killed by each
/// prime power.
pub fn quotient_type(space: &ElementSpace, k: &Subset) -> Result<FinAbGroup> {
    let mut comps = BTreeMap::new();
    let mut primes = BTreeSet::new();
    for &n in space.moduli() {
        if let Some(p) = crate::qseries::prime_power_base(n) {
            primes.insert(p);
        }
    }
    for p in primes {
        let mut conjugate = Vec::new();
        let mut prev = 1usize;
        let mut pj = 1u64;
        loop {
            pj *= p;
            let killed = (0..space.size())
                .filter(|&x| k.contains(space.scale(x, pj)))
                .count()
                / k.len();
            if killed == prev {
                break;
            }
            let mut parts = 0u32;
            let mut r = killed / prev;
            while r > 1 {
                r /= p as usize;
                parts += 1;
            }
            conjugate.push(parts);
            prev = killed;
        }
        let len = conjugate.first().copied().unwrap_or(0);
        let parts: Vec<u32> = (0..len)
            .map(|i| conjugate.iter().filter(|&&c| c > i).count() as u32)
            .collect();
        comps.insert(p, parts);
    }
    FinAbGroup::new(comps)
}

/// Extension classes `0 -> n -> M' -> m -> 0` grouped by middle, by orbit
/// counting: `P(n, M', m) |Hom(m, n)| / |Aut(M')|`, where `P` counts pairs
/// `(ι: n -> M', π: M' -> m)` with `ι` injective, `π` onto and
/// `im ι = ker π`. Such pairs are a subgroup `K = im ι` of type `n` with
/// `M'/K` of type `m`, an isomorphism `n -> K` and one `M'/K -> m`.
pub fn extension_table_bruteforce(
    n: &FinAbGroup,
    m: &FinAbGroup,
    budget: &Budget,
) -> Result<ExtensionTable> {
    if !n.is_semisimple() {
        return Err(Error::input(format!("{n} is not semisimple")));
    }
    let order = n
        .order()
        .checked_mul(m.order())
        .ok_or_else(|| Error::budget("extension order overflows"))?;
    if order > budget.max_order {
        return Err(Error::budget(format!(
            "|N||M| = {order} above the enumeration limit {}",
            budget.max_order
        )));
    }
    let primes: BTreeSet<u64> = n.primes().chain(m.primes()).collect();
    let hom_mn = hom_count_bruteforce(m, n, budget)?;
    let aut_n = aut_count(n, budget)?;
    let aut_m = aut_count(m, budget)?;
    let exponent: u64 = n.cyclic_moduli().into_iter().fold(1, num_integer::lcm);
    let mut entries = BTreeMap::new();
    for middle in enumerate_groups(&primes, order)? {
        if middle.order() != order {
            continue;
        }
        let space = ElementSpace::new(&middle);
        let mut matching = 0u64;
        for k in subgroups_of_order(&space, n.order() as usize, exponent) {
            if subgroup_type(&space, &k)? == *n && quotient_type(&space, &k)? == *m {
                matching += 1;
            }
        }
        if matching == 0 {
            continue;
        }
        let pairs = BigInt::from(matching) * &aut_n * &aut_m;
        let aut = aut_count(&middle, budget)?;
        let classes = Rational::new(pairs * &hom_mn, aut);
        if !classes.is_integer() {
            return Err(Error::consistency(format!(
                "extension class count for middle {middle} of {n} by {m} is {classes}, not an integer"
            )));
        }
        entries.insert(middle, classes.to_integer());
    }
    Ok(ExtensionTable::new(n.clone(), m.clone(), entries))
}

/// Number of surjective `k x e` matrices over the prime field `F_h`: the
/// rows are chosen one at a time and each prefix of independent rows is
/// visited, with its span listed element by element. The last row is any
/// vector outside the span of the others.
pub fn matrix_surjection_count(h: u64, e: u32, k: u32) -> Result<u64> {
    if !crate::qseries::is_prime(h) {
        return Err(Error::input(format!(
            "matrix oracle needs a prime field, got {h}"
        )));
    }
    let size = (h as u128)
        .checked_pow(e)
        .filter(|&s| s <= 1 << 16)
        .ok_or_else(|| Error::budget(format!("F_{h}^{e} is too large to list")))?
        as usize;
    let space = ElementSpace::new(&FinAbGroup::elementary(h, e)?);
    fn extend(space: &ElementSpace, span: &Subset, rows_left: u32) -> u64 {
        match rows_left {
            0 => return 1,
            1 => return (space.size() - span.len()) as u64,
            _ => {}
        }
        (0..space.size())
            .filter(|&v| !span.contains(v))
            .map(|v| extend(space, &space.extend(span, v), rows_left - 1))
            .sum()
    }
    let mut zero = Subset::empty(size);
    zero.insert(0);
    Ok(extend(&space, &zero, k))
}
