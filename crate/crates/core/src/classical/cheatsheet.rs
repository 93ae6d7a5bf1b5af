//! Cheat-sheet algorithm (solve the address copies, read one cell, verify)
//! and the adversary that hides the copies while zeroing every cell.

use super::solver::{TableAdversary, TableGame};
use super::strategy::{AdaptiveAnswerer, QueryStrategy, Step};
use super::{ClassicalError, Granularity, Result, Round, Transcript};
use crate::bits::Bits;
use crate::constructions::certificate::Certificate;
use crate::constructions::cheatsheet::CheatSheet;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    /// Per-copy strategies are deterministic; the result is exact.
    Det,
    /// Per-copy strategies get independent seeds derived from a master seed.
    Rand { seed: u64 },
}

/// Builds the strategy solving copy `i` of the inner function; the second
/// argument is that copy's seed (0 under [`Model::Det`]).
pub type InnerFactory<'a> = dyn Fn(usize, u64) -> Box<dyn QueryStrategy> + 'a;

enum Phase {
    Inner,
    Cell,
    Verify,
}

pub struct CheatSheetStrategy {
    cs: CheatSheet,
    p: usize,
    inner: Vec<Box<dyn QueryStrategy>>,
    local: Vec<Transcript>,
    /// Copy-local indices each unfinished copy asked in the last round.
    asked: Vec<Option<Vec<usize>>>,
    values: Vec<Option<bool>>,
    phase: Phase,
}

/// Needs `p ≥ M` (one cell per round) and `p ≥` the copies' combined
/// parallelism.
pub fn cheatsheet_parallel_algorithm(model: Model, cs: &CheatSheet, p: usize, inner: &InnerFactory) -> Result<CheatSheetStrategy> {
    let c = cs.layout.copies;
    let mut seeds = match model {
        Model::Det => None,
        Model::Rand { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
    };
    let inner: Vec<Box<dyn QueryStrategy>> =
        (0..c).map(|i| inner(i, seeds.as_mut().map_or(0, |r| r.next_u64()))).collect();
    if let Some(s) = inner.iter().find(|s| s.granularity() != Granularity::Bit) {
        return Err(ClassicalError::BadArgument(format!("inner strategies must query bits, got {}", s.granularity())));
    }
    let need = cs.layout.cell_size.max(inner.iter().map(|s| s.parallelism()).sum());
    if p < need {
        return Err(ClassicalError::ParallelismTooSmall { need, got: p });
    }
    let local = inner.iter().map(|s| Transcript::new(Granularity::Bit, s.parallelism())).collect();
    Ok(CheatSheetStrategy { cs: cs.clone(), p, inner, local, asked: vec![None; c], values: vec![None; c], phase: Phase::Inner })
}

impl CheatSheetStrategy {
    fn ell(&self) -> usize {
        self.values.iter().enumerate().fold(0, |acc, (i, v)| acc | (v.unwrap_or(false) as usize) << i)
    }
}

impl QueryStrategy for CheatSheetStrategy {
    fn parallelism(&self) -> usize {
        self.p
    }

    fn next(&mut self, t: &Transcript) -> Step {
        let layout = self.cs.layout;
        loop {
            match self.phase {
                Phase::Inner => {
                    let mut union = Vec::new();
                    for i in 0..layout.copies {
                        if let Some(q) = self.asked[i].take() {
                            let start = layout.copy_start(i);
                            let answers = q.iter().map(|&j| t.lookup(start + j).expect("asked last round")).collect();
                            let round = self.local[i].rounds.len();
                            self.local[i].rounds.push(Round { round, indices: q, answers });
                        }
                        if self.values[i].is_some() {
                            continue;
                        }
                        match self.inner[i].next(&self.local[i]) {
                            Step::Answer(v) => self.values[i] = Some(v),
                            Step::Query(q) => {
                                union.extend(q.iter().map(|&j| layout.copy_start(i) + j));
                                self.asked[i] = Some(q);
                            }
                        }
                    }
                    if !union.is_empty() {
                        return Step::Query(union);
                    }
                    self.phase = Phase::Cell;
                }
                Phase::Cell => {
                    self.phase = Phase::Verify;
                    let start = layout.cell_start(self.ell());
                    return Step::Query((start..start + layout.cell_size).collect());
                }
                Phase::Verify => {
                    let ell = self.ell();
                    let start = layout.cell_start(ell);
                    let cell = Bits::from_bools(
                        &(start..start + layout.cell_size).map(|b| t.lookup(b) == Some(1)).collect::<Vec<_>>(),
                    );
                    let Some(cert) = Certificate::decode(&cell, layout.address_len()) else { return Step::Answer(false) };
                    if !self.cs.certificate_verifies(&cert, ell) {
                        return Step::Answer(false);
                    }
                    let positions: Vec<usize> = cert.entries.iter().map(|&(i, _)| i).collect();
                    // Verification reads the asserted positions in its own round.
                    if t.rounds.last().is_none_or(|r| r.indices != positions) {
                        return Step::Query(positions);
                    }
                    return Step::Answer(cert.entries.iter().all(|&(i, v)| t.lookup(i) == Some(v as u64)));
                }
            }
        }
    }
}

/// Answers address bits through one [`TableAdversary`] per copy and every
/// cell bit with 0. Its budget is `D^{p∥}(inner) − 1` rounds.
pub struct CheatSheetAdversary {
    cs: CheatSheet,
    copies: Vec<TableAdversary<TableGame>>,
    cell_queries: HashSet<usize>,
    rounds: usize,
    budget: usize,
}

pub fn cheatsheet_det_adversary(cs: &CheatSheet, p: usize) -> Result<CheatSheetAdversary> {
    let copies: Vec<_> = (0..cs.layout.copies)
        .map(|_| TableAdversary::for_function(cs.inner(), p, Granularity::Bit))
        .collect::<Result<_>>()?;
    let budget = copies[0].budget();
    Ok(CheatSheetAdversary { cs: cs.clone(), copies, cell_queries: HashSet::new(), rounds: 0, budget })
}

impl CheatSheetAdversary {
    pub fn budget(&self) -> usize {
        self.budget
    }

    fn with_copies(&self, values: &[bool]) -> Option<(Vec<Bits>, Bits)> {
        let copies: Vec<Bits> = self.copies.iter().zip(values).map(|(a, &v)| a.completion(v)).collect::<Option<_>>()?;
        let mut x = Bits::zeros(self.cs.layout.arity());
        for (i, c) in copies.iter().enumerate() {
            x.write_slice(self.cs.layout.copy_start(i), c);
        }
        Some((copies, x))
    }
}

impl AdaptiveAnswerer for CheatSheetAdversary {
    fn answer(&mut self, indices: &[usize]) -> Result<Vec<u64>> {
        if self.rounds >= self.budget {
            return Err(ClassicalError::BudgetExceeded(format!("round {} with budget {}", self.rounds + 1, self.budget)));
        }
        let layout = self.cs.layout;
        let f = layout.inner_arity;
        let mut out = vec![0u64; indices.len()];
        for (c, adv) in self.copies.iter_mut().enumerate() {
            let slots: Vec<usize> =
                (0..indices.len()).filter(|&k| indices[k] < layout.address_len() && indices[k] / f == c).collect();
            if slots.is_empty() {
                continue;
            }
            let local: Vec<usize> = slots.iter().map(|&k| indices[k] % f).collect();
            for (k, a) in slots.into_iter().zip(adv.answer(&local)?) {
                out[k] = a;
            }
        }
        self.cell_queries.extend(indices.iter().copied().filter(|&i| i >= layout.address_len()));
        self.rounds += 1;
        Ok(out)
    }

    /// 0: any copy values with every cell zero. 1: the first cell index whose
    /// copies are realizable and whose certificate avoids every queried (and
    /// hence zero) cell bit set to 1.
    fn completion(&self, value: bool) -> Option<Bits> {
        let layout = self.cs.layout;
        let c = layout.copies;
        if !value {
            return (0..1usize << c).find_map(|ell| {
                let bits: Vec<bool> = (0..c).map(|i| ell >> i & 1 == 1).collect();
                self.with_copies(&bits).map(|(_, x)| x)
            });
        }
        for ell in 0..1usize << c {
            let bits: Vec<bool> = (0..c).map(|i| ell >> i & 1 == 1).collect();
            let Some((copies, mut x)) = self.with_copies(&bits) else { continue };
            let Ok((l, cert)) = self.cs.certificate_for(&copies) else { continue };
            let mut reversed = cert.clone();
            reversed.entries.reverse();
            for cand in [cert, reversed] {
                let Ok(enc) = cand.encode(layout.address_len(), layout.cell_size) else { continue };
                let start = layout.cell_start(l);
                if (0..layout.cell_size).all(|b| !enc.get(b) || !self.cell_queries.contains(&(start + b))) {
                    x.write_slice(start, &enc);
                    return Some(x);
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{consistent_with, exact_parallel_D, run_strategy, QuerySource, ReadAllStrategy};
    use crate::constructions::cheatsheet::CanonicalParams;
    use crate::constructions::dj::make_dj;
    use rand::seq::index::sample;
    use rand::Rng;

    fn toy() -> CheatSheet {
        CheatSheet::canonical(&make_dj(2).unwrap(), CanonicalParams::toy()).unwrap()
    }

    fn read_all(cs: &CheatSheet) -> impl Fn(usize, u64) -> Box<dyn QueryStrategy> + '_ {
        move |_, _| Box::new(ReadAllStrategy::new(cs.inner(), cs.layout.inner_arity, Granularity::Bit).unwrap())
    }

    #[test]
    fn det_is_exact_on_toy_suite_in_three_rounds() {
        let cs = toy();
        let f = cs.function();
        let p = cs.layout.cell_size;
        let mut corrupted_seen = 0;
        for x in cs.input_suite(5).unwrap() {
            let mut s = cheatsheet_parallel_algorithm(Model::Det, &cs, p, &read_all(&cs)).unwrap();
            let r = run_strategy(&mut s, QuerySource::Input(&x), &f).unwrap();
            assert_eq!(r.correct, Some(true), "{x}");
            assert!(r.transcript.round_count() <= 3);
            let cell_rounds = r.transcript.rounds.iter().filter(|r| r.indices.iter().any(|&i| i >= 8)).count();
            assert_eq!(cell_rounds, 1);
            corrupted_seen += (!r.transcript.answer.unwrap()) as usize;
        }
        assert!(corrupted_seen > 0);
    }

    #[test]
    fn too_little_parallelism_is_rejected() {
        let cs = toy();
        let err = cheatsheet_parallel_algorithm(Model::Det, &cs, cs.layout.cell_size - 1, &read_all(&cs)).err().unwrap();
        assert!(matches!(err, ClassicalError::ParallelismTooSmall { .. }));
    }

    /// Reads everything, then reports the wrong value with probability 1/10.
    struct Noisy {
        all: ReadAllStrategy,
        rng: ChaCha8Rng,
    }

    impl QueryStrategy for Noisy {
        fn parallelism(&self) -> usize {
            self.all.parallelism()
        }
        fn next(&mut self, t: &Transcript) -> Step {
            match self.all.next(t) {
                Step::Answer(v) => Step::Answer(v ^ self.rng.gen_bool(0.1)),
                q => q,
            }
        }
    }

    #[test]
    fn rand_model_succeeds_with_two_thirds() {
        let cs = toy();
        let f = cs.function();
        let factory = |_: usize, seed: u64| -> Box<dyn QueryStrategy> {
            Box::new(Noisy {
                all: ReadAllStrategy::new(cs.inner(), 8, Granularity::Bit).unwrap(),
                rng: ChaCha8Rng::seed_from_u64(seed),
            })
        };
        let (mut ok, mut total) = (0, 0);
        for (seed, x) in cs.input_suite(6).unwrap().into_iter().enumerate() {
            let mut s = cheatsheet_parallel_algorithm(Model::Rand { seed: seed as u64 }, &cs, cs.layout.cell_size, &factory).unwrap();
            ok += run_strategy(&mut s, QuerySource::Input(&x), &f).unwrap().correct.unwrap() as usize;
            total += 1;
        }
        assert!(ok as f64 / total as f64 >= 2.0 / 3.0, "{ok}/{total}");
    }

    struct RandomBits {
        n: usize,
        p: usize,
        rounds: usize,
        rng: ChaCha8Rng,
    }

    impl QueryStrategy for RandomBits {
        fn parallelism(&self) -> usize {
            self.p
        }
        fn next(&mut self, t: &Transcript) -> Step {
            if t.round_count() == self.rounds {
                return Step::Answer(false);
            }
            Step::Query(sample(&mut self.rng, self.n, self.p).into_vec())
        }
    }

    #[test]
    fn adversary_keeps_both_completions() {
        let cs = CheatSheet::canonical(&make_dj(2).unwrap(), CanonicalParams { copies: 2, ..CanonicalParams::toy() }).unwrap();
        let f = cs.function();
        let p = 2;
        let d = exact_parallel_D(cs.inner(), p, Granularity::Bit).unwrap();
        for seed in 0..500 {
            let mut adv = cheatsheet_det_adversary(&cs, p).unwrap();
            assert_eq!(adv.budget(), d - 1);
            let mut s = RandomBits { n: cs.layout.arity(), p, rounds: adv.budget(), rng: ChaCha8Rng::seed_from_u64(seed) };
            let r = run_strategy(&mut s, QuerySource::Answerer(&mut adv), &f).unwrap();
            for round in &r.transcript.rounds {
                for (&i, &a) in round.indices.iter().zip(&round.answers) {
                    assert!(i < cs.layout.address_len() || a == 0);
                }
            }
            for v in [false, true] {
                let x = adv.completion(v).unwrap_or_else(|| panic!("seed {seed}: no {v}-completion"));
                assert_eq!(f.evaluate(&x).unwrap(), v);
                assert!(consistent_with(&r.transcript, &x, 1));
            }
        }
    }
}
