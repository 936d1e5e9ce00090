//! Diagonalisation over `Z/p^c`, a local ring: pivot on an entry of least
//! `p`-adic valuation, clear its column, repeat.

/// Cokernel of the map `Z^cols -> Z^rows` given by `matrix` (row-major,
/// entries reduced mod `p^cap`), as the weakly decreasing list of exponents
/// `a` of its cyclic factors `Z/p^a`. Factors of full size `p^cap` stand for
/// anything of exponent `>= cap`.
pub fn cokernel_exponents(matrix: &mut [Vec<u64>], p: u64, cap: u32) -> Vec<u32> {
    let modulus = p.pow(cap) as u128;
    let rows = matrix.len();
    let cols = matrix.first().map_or(0, Vec::len);
    let valuation = |x: u64| -> u32 {
        if x == 0 {
            return cap;
        }
        let mut v = 0;
        let mut y = x;
        while y.is_multiple_of(p) {
            y /= p;
            v += 1;
        }
        v
    };
    let mut exponents = Vec::with_capacity(rows);
    let mut t = 0;
    while t < rows.min(cols) {
        let mut best: Option<(u32, usize, usize)> = None;
        for (i, row) in matrix.iter().enumerate().skip(t) {
            for (j, &x) in row.iter().enumerate().skip(t) {
                let v = valuation(x);
                if v < cap && best.is_none_or(|(bv, _, _)| v < bv) {
                    best = Some((v, i, j));
                }
            }
            if matches!(best, Some((0, _, _))) {
                break;
            }
        }
        let Some((v, i, j)) = best else { break };
        matrix.swap(t, i);
        for row in matrix.iter_mut() {
            row.swap(t, j);
        }
        let pv = p.pow(v) as u128;
        let unit = matrix[t][t] as u128 / pv;
        let unit_inv = inverse_mod(unit, modulus);
        let pivot_row = matrix[t].clone();
        for row in matrix.iter_mut().skip(t + 1) {
            let x = row[t] as u128;
            if x == 0 {
                continue;
            }
            let factor = (x / pv) * unit_inv % modulus;
            for (dst, &src) in row.iter_mut().zip(&pivot_row).skip(t) {
                let sub = factor * src as u128 % modulus;
                *dst = ((*dst as u128 + modulus - sub) % modulus) as u64;
            }
        }
        // Column operations would only touch row t, which is now done.
        exponents.push(v);
        t += 1;
    }
    exponents.extend(std::iter::repeat_n(cap, rows - t));
    exponents.retain(|&a| a > 0);
    exponents.sort_unstable_by(|a, b| b.cmp(a));
    exponents
}

fn inverse_mod(a: u128, m: u128) -> u128 {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1, "pivot unit not invertible");
    old_s.rem_euclid(m as i128) as u128
}
