//! Certificate complexity and block sensitivity by exhaustive search.

use super::{BoolFnError, BooleanFunction, Result};
use crate::bits::Bits;
use rayon::prelude::*;

/// Arity cap for certificate complexity (subcube dynamic program over `3^N` cubes).
pub const CERTIFICATE_CAP: usize = 16;
/// Arity cap for block sensitivity (minimal sensitive blocks over `2^N` masks per input).
pub const BS_CAP: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Zero,
    One,
    Max,
}

impl Side {
    fn admits(self, value: bool) -> bool {
        match self {
            Side::Zero => !value,
            Side::One => value,
            Side::Max => true,
        }
    }
}

const EMPTY: u8 = 3;
const MIXED: u8 = 2;

/// `C_x(f)` for every input index (`u8::MAX` outside the domain).
///
/// Subcubes are indexed in base 3 with digit 2 marking a free variable. The
/// first pass labels each subcube constant-0, constant-1, mixed, or empty
/// (no domain point); the second takes, for each subcube, the smallest fixed
/// set among constant subcubes containing it.
pub fn certificate_sizes(f: &BooleanFunction) -> Result<Vec<u8>> {
    let f = &f.fast();
    let n = f.arity();
    if n > CERTIFICATE_CAP {
        return Err(BoolFnError::TooLarge { what: "certificate complexity", arity: n, cap: CERTIFICATE_CAP });
    }
    let pow3: Vec<usize> = (0..=n).map(|i| 3usize.pow(i as u32)).collect();
    let cubes = pow3[n];
    let mut label = vec![EMPTY; cubes];
    let mut digits = vec![0u8; n];
    for c in 0..cubes {
        if c > 0 {
            // odometer increment
            let mut i = 0;
            while digits[i] == 2 {
                digits[i] = 0;
                i += 1;
            }
            digits[i] += 1;
        }
        match digits.iter().position(|&d| d == 2) {
            None => {
                let x = digits.iter().enumerate().fold(0u64, |acc, (i, &d)| acc | ((d as u64) << i));
                label[c] = match f.value_at(x) {
                    None => EMPTY,
                    Some(v) => v as u8,
                };
            }
            Some(i) => {
                let (a, b) = (label[c - 2 * pow3[i]], label[c - pow3[i]]);
                label[c] = match (a, b) {
                    (EMPTY, o) | (o, EMPTY) => o,
                    (x, y) if x == y => x,
                    _ => MIXED,
                };
            }
        }
    }
    let mut best = vec![u8::MAX; cubes];
    for c in (0..cubes).rev() {
        let mut rem = c;
        let mut cnt = 0u8;
        let mut m = u8::MAX;
        for &p in pow3.iter().take(n) {
            let d = rem % 3;
            rem /= 3;
            if d != 2 {
                cnt += 1;
                m = m.min(best[c + (2 - d) * p]);
            }
        }
        if label[c] == 0 || label[c] == 1 {
            m = m.min(cnt);
        }
        best[c] = m;
    }
    let mut out = vec![u8::MAX; 1 << n];
    for (x, slot) in out.iter_mut().enumerate() {
        if f.value_at(x as u64).is_some() {
            let c: usize = (0..n).filter(|i| (x >> i) & 1 == 1).map(|i| pow3[i]).sum();
            *slot = best[c];
        }
    }
    Ok(out)
}

/// `C_0`, `C_1` or `C(f)`; a side with no inputs has complexity 0.
pub fn certificate_complexity(f: &BooleanFunction, side: Side) -> Result<usize> {
    let f = &f.fast();
    let sizes = certificate_sizes(f)?;
    Ok(sizes
        .iter()
        .enumerate()
        .filter(|&(x, &s)| s != u8::MAX && side.admits(f.value_at(x as u64).unwrap()))
        .map(|(_, &s)| s as usize)
        .max()
        .unwrap_or(0))
}

/// A smallest certifying index set for `x`, by increasing-size subset search
/// checked against every domain point.
pub fn min_certificate(f: &BooleanFunction, x: &Bits) -> Result<Vec<usize>> {
    let f = &f.fast();
    let n = f.arity();
    if n > CERTIFICATE_CAP {
        return Err(BoolFnError::TooLarge { what: "certificate search", arity: n, cap: CERTIFICATE_CAP });
    }
    let target = f.evaluate(x)?;
    let xv = x.to_u64();
    let opposite = f.inputs_with_value(!target)?;
    for size in 0..=n {
        for s in masks_of_size(n, size) {
            if opposite.iter().all(|&y| (y ^ xv) & s != 0) {
                return Ok((0..n).filter(|i| (s >> i) & 1 == 1).collect());
            }
        }
    }
    unreachable!("the full index set always certifies")
}

/// Masks over `n` bits with exactly `k` ones, in increasing numeric order.
pub(crate) fn masks_of_size(n: usize, k: usize) -> impl Iterator<Item = u64> {
    let limit: u64 = if n >= 64 { u64::MAX } else { 1u64 << n };
    let first: Option<u64> = if k > n { None } else if k == 0 { Some(0) } else { Some((1u64 << k) - 1) };
    std::iter::successors(first, move |&m| {
        if m == 0 {
            return None;
        }
        // Gosper's hack
        let c = m & m.wrapping_neg();
        let r = m + c;
        let next = (((r ^ m) >> 2) / c) | r;
        (next < limit && r != 0).then_some(next)
    })
}

/// Minimal sensitive blocks of `f` at `x`: masks `B` with `f(x⊕B) ≠ f(x)`
/// (inside the domain) and no sensitive proper subset.
fn minimal_sensitive_blocks(f: &BooleanFunction, x: u64) -> Vec<u64> {
    let n = f.arity();
    let fx = f.value_at(x).expect("x in domain");
    let size = 1usize << n;
    let mut down: Vec<bool> = (0..size).map(|b| b != 0 && f.value_at(x ^ b as u64).is_some_and(|v| v != fx)).collect();
    let sens = down.clone();
    for i in 0..n {
        let bit = 1usize << i;
        for b in 0..size {
            if b & bit != 0 && down[b ^ bit] {
                down[b] = true;
            }
        }
    }
    let mut out: Vec<u64> = (1..size)
        .filter(|&b| sens[b] && (0..n).all(|i| (b >> i) & 1 == 0 || !down[b ^ (1 << i)]))
        .map(|b| b as u64)
        .collect();
    out.sort_by_key(|b| (b.count_ones(), *b));
    out
}

/// A maximum family of pairwise disjoint sensitive blocks of `f` at `x`.
///
/// Branch and bound: the lowest undecided index is either covered by a
/// minimal block containing it or left unused; a branch is cut when the free
/// indices divided by the smallest block size cannot beat the incumbent.
pub fn max_disjoint_sensitive_blocks(f: &BooleanFunction, x: &Bits) -> Result<Vec<u64>> {
    let f = &f.fast();
    let n = f.arity();
    if n > BS_CAP {
        return Err(BoolFnError::TooLarge { what: "block sensitivity", arity: n, cap: BS_CAP });
    }
    f.evaluate(x)?;
    Ok(pack_blocks(n, &minimal_sensitive_blocks(f, x.to_u64())))
}

fn pack_blocks(n: usize, blocks: &[u64]) -> Vec<u64> {
    if blocks.is_empty() {
        return Vec::new();
    }
    let min_size = blocks.iter().map(|b| b.count_ones()).min().unwrap() as usize;
    let by_index: Vec<Vec<u64>> = (0..n).map(|i| blocks.iter().copied().filter(|b| (b >> i) & 1 == 1).collect()).collect();
    let covered: u64 = blocks.iter().fold(0, |a, b| a | b);
    let mut best = Vec::new();
    let mut current = Vec::new();
    search(covered, covered, &by_index, min_size, &mut current, &mut best);
    best
}

fn search(avail: u64, undecided: u64, by_index: &[Vec<u64>], min_size: usize, current: &mut Vec<u64>, best: &mut Vec<u64>) {
    if current.len() > best.len() {
        *best = current.clone();
    }
    if undecided == 0 {
        return;
    }
    if current.len() + (avail.count_ones() as usize) / min_size <= best.len() {
        return;
    }
    let i = undecided.trailing_zeros() as usize;
    for &b in &by_index[i] {
        if b & !avail == 0 {
            current.push(b);
            search(avail & !b, undecided & !b, by_index, min_size, current, best);
            current.pop();
        }
    }
    search(avail & !(1 << i), undecided & !(1 << i), by_index, min_size, current, best);
}

/// `bs_x(f)` when `x` is given, else `bs_b(f)` for the given side, else `bs(f)`.
pub fn block_sensitivity(f: &BooleanFunction, x: Option<&Bits>, side: Option<bool>) -> Result<usize> {
    let f = &f.fast();
    let n = f.arity();
    if n > BS_CAP {
        return Err(BoolFnError::TooLarge { what: "block sensitivity", arity: n, cap: BS_CAP });
    }
    if let Some(x) = x {
        return Ok(max_disjoint_sensitive_blocks(f, x)?.len());
    }
    let pts = f.points()?;
    Ok(pts
        .par_iter()
        .filter(|p| side.is_none_or(|s| s == p.1))
        .map(|p| pack_blocks(n, &minimal_sensitive_blocks(f, p.0)).len())
        .max()
        .unwrap_or(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn and(n: usize) -> BooleanFunction {
        BooleanFunction::from_fn(n, "and", move |x| x == (1 << n) - 1)
    }
    fn or(n: usize) -> BooleanFunction {
        BooleanFunction::from_fn(n, "or", |x| x != 0)
    }
    fn parity(n: usize) -> BooleanFunction {
        BooleanFunction::from_fn(n, "parity", |x| x.count_ones() % 2 == 1)
    }
    fn and_or_2x2() -> BooleanFunction {
        BooleanFunction::from_fn(4, "and-or", |x| x & 0b11 != 0 && x & 0b1100 != 0)
    }

    /// Independent oracle: C_x by trying every subset against every input.
    fn brute_cx(f: &BooleanFunction, x: u64) -> usize {
        let n = f.arity();
        let fx = f.value_at(x).unwrap();
        (0..1u64 << n)
            .filter(|&s| (0..1u64 << n).all(|y| (y ^ x) & s != 0 || f.value_at(y).is_none_or(|v| v == fx)))
            .map(|s| s.count_ones() as usize)
            .min()
            .unwrap()
    }

    /// Independent oracle: bs_x by trying every family of disjoint blocks greedily over all orders.
    fn brute_bs(f: &BooleanFunction, x: u64) -> usize {
        let n = f.arity();
        let fx = f.value_at(x).unwrap();
        let sens: Vec<u64> = (1..1u64 << n).filter(|&b| f.value_at(x ^ b).is_some_and(|v| v != fx)).collect();
        fn rec(sens: &[u64], used: u64, start: usize) -> usize {
            let mut best = 0;
            for k in start..sens.len() {
                if sens[k] & used == 0 {
                    best = best.max(1 + rec(sens, used | sens[k], k + 1));
                }
            }
            best
        }
        rec(&sens, 0, 0)
    }

    #[test]
    fn certificate_examples() {
        assert_eq!(certificate_complexity(&and(4), Side::One).unwrap(), 4);
        assert_eq!(certificate_complexity(&and(4), Side::Zero).unwrap(), 1);
        assert_eq!(certificate_complexity(&and_or_2x2(), Side::Zero).unwrap(), 2);
        assert_eq!(certificate_complexity(&and_or_2x2(), Side::One).unwrap(), 2);
        assert_eq!(certificate_complexity(&parity(3), Side::Max).unwrap(), 3);
    }

    #[test]
    fn block_sensitivity_examples() {
        assert_eq!(block_sensitivity(&parity(3), None, None).unwrap(), 3);
        assert_eq!(block_sensitivity(&or(4), Some(&Bits::zeros(4)), None).unwrap(), 4);
        assert_eq!(block_sensitivity(&and_or_2x2(), None, Some(false)).unwrap(), 2);
        assert_eq!(block_sensitivity(&and_or_2x2(), None, Some(true)).unwrap(), 2);
    }

    #[test]
    fn certificate_dp_matches_subset_oracle_on_random_tables() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in 1..=6 {
            for _ in 0..8 {
                let table: Vec<bool> = (0..1 << n).map(|_| rng.gen()).collect();
                let f = BooleanFunction::from_fn(n, "r", |x| table[x as usize]);
                let sizes = certificate_sizes(&f).unwrap();
                for x in 0..1u64 << n {
                    assert_eq!(sizes[x as usize] as usize, brute_cx(&f, x));
                    assert_eq!(min_certificate(&f, &Bits::from_u64(x, n)).unwrap().len(), brute_cx(&f, x));
                }
            }
        }
    }

    #[test]
    fn partial_function_certificates_ignore_out_of_domain_points() {
        // DJ_2: domain {00, 10, 01}
        let dj = BooleanFunction::from_partial_fn(2, "dj", |x| match x.count_ones() {
            0 => Some(false),
            1 => Some(true),
            _ => None,
        });
        let sizes = certificate_sizes(&dj).unwrap();
        assert_eq!(sizes[0], 2);
        assert_eq!(sizes[1], 1);
        assert_eq!(sizes[3], u8::MAX);
        for x in [0u64, 1, 2] {
            assert_eq!(sizes[x as usize] as usize, brute_cx(&dj, x));
        }
    }

    #[test]
    fn block_sensitivity_matches_exhaustive_packing() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for n in 1..=5 {
            for _ in 0..6 {
                let table: Vec<bool> = (0..1 << n).map(|_| rng.gen()).collect();
                let f = BooleanFunction::from_fn(n, "r", |x| table[x as usize]);
                for x in 0..1u64 << n {
                    let blocks = max_disjoint_sensitive_blocks(&f, &Bits::from_u64(x, n)).unwrap();
                    assert_eq!(blocks.len(), brute_bs(&f, x), "n={n} x={x}");
                    blocks.iter().try_fold(0u64, |a, b| (a & b == 0).then_some(a | b)).expect("blocks overlap");
                }
            }
        }
    }

    #[test]
    fn gosper_enumerates_binomial_counts() {
        for n in 0..8 {
            for k in 0..=n {
                let v: Vec<u64> = masks_of_size(n, k).collect();
                let want = (0..1u64 << n).filter(|m| m.count_ones() as usize == k).count();
                assert_eq!(v.len(), want, "n={n} k={k}");
                assert!(v.iter().all(|m| m.count_ones() as usize == k));
            }
        }
    }
}
