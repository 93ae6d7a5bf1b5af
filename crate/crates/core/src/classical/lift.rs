//! Lifting an outer input into k-SUM blocks, and the star-hitting game that
//! bounds how much of the lift a few queries can see.

use super::{ClassicalError, Result};
use crate::bits::Bits;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KsumLift {
    pub y: Bits,
    /// Per outer bit, the index of the sub-block holding `1 − x_i`.
    pub special: Vec<usize>,
    pub sub_blocks: usize,
    pub block_bits: usize,
}

impl KsumLift {
    /// Bits of `Y_i`.
    pub fn block(&self, i: usize) -> Bits {
        let len = self.sub_blocks * self.block_bits;
        self.y.slice(i * len, len)
    }
}

/// `Y_i` for each `x_i`: `k − 1` zero sub-blocks, then `1 − x_i` at a seeded
/// uniform position among the remaining `m − k + 1`, every other sub-block 1.
/// A zero k-sum needs all `k − 1` zeros plus a zero special block, given
/// `modulus > k`, so `k-SUM(Y_i) = x_i`.
pub fn build_ksum_lift(x: &Bits, sub_blocks: usize, k: usize, block_bits: usize, modulus: u64, seed: u64) -> Result<KsumLift> {
    if k == 0 || sub_blocks < k + 1 {
        return Err(ClassicalError::BadArgument(format!("need at least k+1 = {} sub-blocks, got {sub_blocks}", k + 1)));
    }
    if modulus <= k as u64 || block_bits == 0 || block_bits > 63 {
        return Err(ClassicalError::BadArgument(format!("modulus {modulus} must exceed k = {k} with 1..=63 block bits")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = sub_blocks * block_bits;
    let mut y = Bits::zeros(x.len() * len);
    let mut special = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let s = rng.gen_range(k - 1..sub_blocks);
        for j in k - 1..sub_blocks {
            let v = if j == s { !x.get(i) as u64 } else { 1 };
            y.write_uint(i * len + j * block_bits, block_bits, v);
        }
        special.push(s);
    }
    Ok(KsumLift { y, special, sub_blocks, block_bits })
}

/// Queries positions of `n` blocks of `m` characters, seeing only whether
/// each query hit the block's star.
pub trait StarStrategy {
    /// Next flat position `i·m + j`, or `None` to stop early.
    fn next(&mut self, n: usize, m: usize, history: &[(usize, bool)]) -> Option<usize>;
}

/// Scans positions in order; with `skip_on_hit` it leaves a block as soon
/// as its star is found.
#[derive(Debug, Clone, Default)]
pub struct GreedyScanner {
    pub skip_on_hit: bool,
}

impl StarStrategy for GreedyScanner {
    fn next(&mut self, n: usize, m: usize, history: &[(usize, bool)]) -> Option<usize> {
        let Some(&(last, hit)) = history.last() else {
            return (n * m > 0).then_some(0);
        };
        let next = if hit && self.skip_on_hit { (last / m + 1) * m } else { last + 1 };
        (next < n * m).then_some(next)
    }
}

/// Uniformly random positions, with repetition.
#[derive(Debug, Clone)]
pub struct RandomScanner(pub ChaCha8Rng);

impl StarStrategy for RandomScanner {
    fn next(&mut self, n: usize, m: usize, _: &[(usize, bool)]) -> Option<usize> {
        (n * m > 0).then(|| self.0.gen_range(0..n * m))
    }
}

/// Distinct star positions hit by at most `l` queries, the star of each
/// block placed uniformly by `seed`.
pub fn star_query_count(l: usize, n: usize, m: usize, strategy: &mut dyn StarStrategy, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let stars: Vec<usize> = (0..n).map(|i| i * m + rng.gen_range(0..m.max(1))).collect();
    let mut found = vec![false; n];
    let mut history = Vec::with_capacity(l);
    for _ in 0..l {
        let Some(q) = strategy.next(n, m, &history) else { break };
        let hit = q < n * m && stars[q / m] == q;
        if hit {
            found[q / m] = true;
        }
        history.push((q, hit));
    }
    found.iter().filter(|&&b| b).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::ksum::make_ksum;

    fn lift_values(x: &str, seed: u64) -> Vec<bool> {
        let x: Bits = x.parse().unwrap();
        let (m, k, bb, q) = (4, 2, 2, 4);
        let lift = build_ksum_lift(&x, m, k, bb, q, seed).unwrap();
        let f = make_ksum(m, k, bb, q).unwrap();
        (0..x.len()).map(|i| f.evaluate(&lift.block(i)).unwrap()).collect()
    }

    #[test]
    fn lift_reproduces_x() {
        for seed in 0..50 {
            assert_eq!(lift_values("101", seed), vec![true, false, true]);
            assert_eq!(lift_values("000", seed), vec![false; 3]);
        }
    }

    #[test]
    fn every_seed_and_input_lifts_correctly() {
        let (m, k, bb, q) = (5, 3, 2, 4);
        let f = make_ksum(m, k, bb, q).unwrap();
        for x in 0..16u64 {
            let x = Bits::from_u64(x, 4);
            for seed in 0..20 {
                let lift = build_ksum_lift(&x, m, k, bb, q, seed).unwrap();
                for i in 0..4 {
                    assert_eq!(f.evaluate(&lift.block(i)).unwrap(), x.get(i));
                }
            }
        }
    }

    #[test]
    fn special_index_is_uniform() {
        let (m, k) = (6, 2);
        let mut counts = [0usize; 6];
        for seed in 0..1000 {
            counts[build_ksum_lift(&"1".parse().unwrap(), m, k, 3, 4, seed).unwrap().special[0]] += 1;
        }
        assert_eq!(counts[0], 0);
        let expected = 1000.0 / 5.0;
        let chi2: f64 = counts[1..].iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        // 0.999 quantile of chi-square with 4 degrees of freedom.
        assert!(chi2 < 18.47, "chi2 = {chi2}, counts {counts:?}");
    }

    #[test]
    fn small_parameters_are_rejected() {
        assert!(build_ksum_lift(&"1".parse().unwrap(), 2, 2, 2, 4, 0).is_err());
        assert!(build_ksum_lift(&"1".parse().unwrap(), 4, 2, 2, 2, 0).is_err());
    }

    #[test]
    fn star_counts() {
        assert_eq!(star_query_count(0, 8, 8, &mut GreedyScanner::default(), 1), 0);
        let (n, m, l, trials) = (8, 8, 16, 10_000);
        let mut over = 0;
        let mut sum = 0usize;
        for seed in 0..trials {
            let c = star_query_count(l, n, m, &mut GreedyScanner { skip_on_hit: true }, seed);
            over += (c * m > 20 * l) as usize;
            sum += c;
        }
        assert!((over as f64 / trials as f64) <= 0.1);
        // Mean of about 3.5 with standard error under 0.02.
        assert!((sum as f64 / trials as f64) <= 2.0 * l as f64 / m as f64 + 0.05);
        let mut rnd = RandomScanner(ChaCha8Rng::seed_from_u64(9));
        assert!(star_query_count(l, n, m, &mut rnd, 3) <= l);
    }
}
