//! Pointer chasing at block granularity: the min(k, N/p)-round algorithm and
//! the chain-hiding adversary.

use super::strategy::{AdaptiveAnswerer, QueryStrategy, Step};
use super::{ClassicalError, Granularity, Result, Transcript};
use crate::bits::Bits;
use crate::constructions::pointer::pointer_input;

/// Follows the chain one block per round when `k ≤ ⌈N/p⌉`, otherwise reads
/// every block, `p` per round.
#[derive(Debug, Clone)]
pub struct PointerStrategy {
    n: usize,
    k: usize,
    p: usize,
}

pub fn pointer_det_algorithm(n_blocks: usize, k: usize, p: usize) -> Result<PointerStrategy> {
    if p == 0 {
        return Err(ClassicalError::ParallelismTooSmall { need: 1, got: 0 });
    }
    if n_blocks < 2 || !n_blocks.is_power_of_two() {
        return Err(ClassicalError::BadArgument(format!("pointer block count {n_blocks} is not a power of 2")));
    }
    Ok(PointerStrategy { n: n_blocks, k, p })
}

impl PointerStrategy {
    pub fn follows_chain(&self) -> bool {
        self.k <= self.n.div_ceil(self.p)
    }
}

impl QueryStrategy for PointerStrategy {
    fn parallelism(&self) -> usize {
        self.p
    }
    fn granularity(&self) -> Granularity {
        Granularity::Block
    }
    fn next(&mut self, t: &Transcript) -> Step {
        let known = t.known();
        if !self.follows_chain() && known.len() < self.n {
            let start = t.query_count();
            return Step::Query((start..self.n.min(start + self.p)).collect());
        }
        let mut at = 0usize;
        for _ in 0..self.k {
            match known.get(&at) {
                Some(&v) => at = v as usize,
                None => return Step::Query(vec![at]),
            }
        }
        Step::Answer(at & 1 == 1)
    }
}

/// Reveals the chain from block 0 at most one node per round. The revealed
/// tail's pointer, when queried, goes to a fresh block (never queried, not
/// on the chain); every other queried block points to a fresh block too, so
/// no answer points into the set queried so far.
#[derive(Debug, Clone)]
pub struct PointerAdversary {
    n: usize,
    k: usize,
    p: usize,
    budget: usize,
    labels: Vec<Option<usize>>,
    chain: Vec<usize>,
    rounds: usize,
}

/// Needs `budget < k` and `budget·p + k ≤ N`: the chain stays short of `k`
/// and fresh blocks remain for both completions.
pub fn pointer_adversary(n_blocks: usize, k: usize, p: usize, budget: usize) -> Result<PointerAdversary> {
    if budget >= k || budget * p + k > n_blocks {
        return Err(ClassicalError::BudgetExceeded(format!(
            "budget {budget} outside the hiding regime for N={n_blocks}, k={k}, p={p}"
        )));
    }
    if !n_blocks.is_power_of_two() {
        return Err(ClassicalError::BadArgument(format!("pointer block count {n_blocks} is not a power of 2")));
    }
    Ok(PointerAdversary { n: n_blocks, k, p, budget, labels: vec![None; n_blocks], chain: vec![0], rounds: 0 })
}

impl PointerAdversary {
    /// Hops of the chain from 0 revealed so far.
    pub fn revealed_chain(&self) -> usize {
        self.chain.len() - 1
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    fn used(&self, extra: &[usize]) -> Vec<bool> {
        let mut used = vec![false; self.n];
        for (i, l) in self.labels.iter().enumerate() {
            used[i] |= l.is_some();
        }
        for &c in self.chain.iter().chain(extra) {
            used[c] = true;
        }
        used
    }
}

impl AdaptiveAnswerer for PointerAdversary {
    fn answer(&mut self, indices: &[usize]) -> Result<Vec<u64>> {
        if self.rounds >= self.budget || indices.len() > self.p {
            return Err(ClassicalError::BudgetExceeded(format!(
                "round {} of {} queries with budget {} rounds of {}",
                self.rounds + 1,
                indices.len(),
                self.budget,
                self.p
            )));
        }
        let used = self.used(indices);
        let fresh = (0..self.n)
            .find(|&v| !used[v])
            .ok_or_else(|| ClassicalError::BudgetExceeded("no fresh block left".into()))?;
        let mut out = Vec::with_capacity(indices.len());
        for &q in indices {
            if self.labels[q].is_none() {
                self.labels[q] = Some(fresh);
                if Some(&q) == self.chain.last() {
                    self.chain.push(fresh);
                }
            }
            out.push(self.labels[q].expect("just set") as u64);
        }
        self.rounds += 1;
        Ok(out)
    }

    fn completion(&self, value: bool) -> Option<Bits> {
        let m = self.revealed_chain();
        let tail = *self.chain.last().expect("chain starts at 0");
        let mut labels = self.labels.clone();
        if m >= self.k {
            let at = self.chain[self.k];
            return ((at & 1 == 1) == value).then(|| pointer_input(&labels.iter().map(|l| l.unwrap_or(0)).collect::<Vec<_>>()));
        }
        let mut used = self.used(&[]);
        let mut at = tail;
        for _ in m + 1..self.k {
            let v = (0..self.n).find(|&v| !used[v])?;
            used[v] = true;
            labels[at] = Some(v);
            at = v;
        }
        labels[at] = Some(value as usize);
        Some(pointer_input(&labels.iter().map(|l| l.unwrap_or(0)).collect::<Vec<_>>()))
    }
}
