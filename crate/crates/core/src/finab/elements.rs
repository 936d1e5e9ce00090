//! Explicit element arithmetic for brute-force enumeration.
//!
//! Elements of `Z/n_1 x ... x Z/n_r` are encoded as mixed-radix indices,
//! least significant digit first.

use super::FinAbGroup;

#[derive(Debug, Clone)]
pub struct ElementSpace {
    moduli: Vec<u64>,
    size: usize,
}

impl ElementSpace {
    pub fn new(group: &FinAbGroup) -> Self {
        let moduli = group.cyclic_moduli();
        let size = moduli.iter().product::<u64>() as usize;
        ElementSpace { moduli, size }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn digits(&self, mut x: usize) -> Vec<u64> {
        self.moduli
            .iter()
            .map(|&n| {
                let d = x as u64 % n;
                x /= n as usize;
                d
            })
            .collect()
    }

    pub fn encode(&self, digits: &[u64]) -> usize {
        let mut idx = 0usize;
        let mut stride = 1usize;
        for (&d, &n) in digits.iter().zip(&self.moduli) {
            idx += (d % n) as usize * stride;
            stride *= n as usize;
        }
        idx
    }

    /// Index of the `i`-th canonical generator.
    pub fn generator(&self, i: usize) -> usize {
        self.moduli[..i].iter().product::<u64>() as usize
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        let (mut a, mut b) = (a, b);
        let mut out = 0usize;
        let mut stride = 1usize;
        for &n in &self.moduli {
            let n = n as usize;
            out += ((a % n + b % n) % n) * stride;
            a /= n;
            b /= n;
            stride *= n;
        }
        out
    }

    pub fn scale(&self, a: usize, c: u64) -> usize {
        let mut a = a;
        let mut out = 0usize;
        let mut stride = 1usize;
        for &n in &self.moduli {
            let d = (a as u64 % n) * (c % n) % n;
            out += d as usize * stride;
            a /= n as usize;
            stride *= n as usize;
        }
        out
    }

    /// Whether `m * x = 0`.
    pub fn killed_by(&self, x: usize, m: u64) -> bool {
        self.scale(x, m) == 0
    }

    /// Additive order of `x`.
    pub fn order_of(&self, x: usize) -> u64 {
        let mut order = 1u64;
        let mut y = x;
        while y != 0 {
            y = self.add(y, x);
            order += 1;
        }
        order
    }

    /// `s + <y>` for a subgroup `s`.
    pub fn extend(&self, s: &Subset, y: usize) -> Subset {
        if s.contains(y) {
            return s.clone();
        }
        let mut out = s.clone();
        let members: Vec<usize> = s.iter().collect();
        let mut m = y;
        while !s.contains(m) {
            for &x in &members {
                out.insert(self.add(x, m));
            }
            m = self.add(m, y);
        }
        out
    }

    /// Subgroup generated by `gens`, as a membership set.
    pub fn span(&self, gens: &[usize]) -> Subset {
        let mut set = Subset::empty(self.size);
        set.insert(0);
        let mut members = vec![0usize];
        for &g in gens {
            if set.contains(g) {
                continue;
            }
            let mut multiples = vec![0usize];
            let mut y = g;
            while y != 0 {
                multiples.push(y);
                y = self.add(y, g);
            }
            let current = members.clone();
            for &s in &current {
                for &m in &multiples[1..] {
                    let z = self.add(s, m);
                    if set.insert(z) {
                        members.push(z);
                    }
                }
            }
        }
        set
    }
}

/// A set of element indices stored as a bitset.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subset {
    words: Vec<u64>,
    count: usize,
}

impl Subset {
    pub fn empty(universe: usize) -> Self {
        Subset {
            words: vec![0; universe.div_ceil(64)],
            count: 0,
        }
    }

    pub fn insert(&mut self, x: usize) -> bool {
        let (w, b) = (x / 64, x % 64);
        let fresh = self.words[w] & (1 << b) == 0;
        if fresh {
            self.words[w] |= 1 << b;
            self.count += 1;
        }
        fresh
    }

    pub fn contains(&self, x: usize) -> bool {
        self.words[x / 64] & (1 << (x % 64)) != 0
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &bits)| {
            (0..64)
                .filter(move |b| bits & (1 << b) != 0)
                .map(move |b| w * 64 + b)
        })
    }
}
