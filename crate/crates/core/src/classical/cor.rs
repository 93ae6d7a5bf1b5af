//! Split adversary for COR(f, g): each half of the input is answered by its
//! own component adversary.

use super::strategy::AdaptiveAnswerer;
use super::Result;
use crate::bits::Bits;

pub struct CorAdversary {
    f_adv: Box<dyn AdaptiveAnswerer>,
    g_adv: Box<dyn AdaptiveAnswerer>,
    f_arity: usize,
    /// Per component, the local index sets it was asked, one entry per
    /// round in which it was asked anything.
    pub routed: [Vec<Vec<usize>>; 2],
}

/// Bit-granularity COR adversary; positions below `f_arity` go to `f_adv`.
pub fn cor_det_adversary(f_adv: Box<dyn AdaptiveAnswerer>, g_adv: Box<dyn AdaptiveAnswerer>, f_arity: usize) -> CorAdversary {
    CorAdversary { f_adv, g_adv, f_arity, routed: [Vec::new(), Vec::new()] }
}

impl AdaptiveAnswerer for CorAdversary {
    fn answer(&mut self, indices: &[usize]) -> Result<Vec<u64>> {
        let fq: Vec<usize> = indices.iter().copied().filter(|&i| i < self.f_arity).collect();
        let gq: Vec<usize> = indices.iter().filter(|&&i| i >= self.f_arity).map(|&i| i - self.f_arity).collect();
        let fa = if fq.is_empty() { Vec::new() } else { self.f_adv.answer(&fq)? };
        let ga = if gq.is_empty() { Vec::new() } else { self.g_adv.answer(&gq)? };
        let (mut fi, mut gi) = (fa.into_iter(), ga.into_iter());
        let out = indices
            .iter()
            .map(|&i| if i < self.f_arity { fi.next() } else { gi.next() }.expect("one answer per routed query"))
            .collect();
        for (side, q) in [fq, gq].into_iter().enumerate() {
            if !q.is_empty() {
                self.routed[side].push(q);
            }
        }
        Ok(out)
    }

    /// COR is defined where both halves agree, with that common value.
    fn completion(&self, value: bool) -> Option<Bits> {
        Some(self.f_adv.completion(value)?.concat(&self.g_adv.completion(value)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{
        consistent_with, exact_parallel_D, run_strategy, Granularity, QuerySource, QueryStrategy, Step, TableAdversary,
        Transcript,
    };
    use crate::constructions::{basic, cor::make_cor, dj::make_dj};
    use crate::BooleanFunction;
    use rand::seq::index::sample;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

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
    fn completions_disagree_while_budgets_hold() {
        let (f, g, p) = (basic::or(3).unwrap(), basic::and(3).unwrap(), 1);
        let cor = make_cor(&f, &g).unwrap();
        for seed in 0..300 {
            let fa = TableAdversary::for_function(&f, p, Granularity::Bit).unwrap();
            let ga = TableAdversary::for_function(&g, p, Granularity::Bit).unwrap();
            let budget = fa.budget().min(ga.budget());
            let mut adv = cor_det_adversary(Box::new(fa), Box::new(ga), 3);
            let mut s = RandomBits { n: 6, p, rounds: budget, rng: ChaCha8Rng::seed_from_u64(seed) };
            let r = run_strategy(&mut s, QuerySource::Answerer(&mut adv), &cor).unwrap();
            for v in [false, true] {
                let x = adv.completion(v).expect("both completions exist");
                assert_eq!(cor.evaluate(&x).unwrap(), v);
                assert!(consistent_with(&r.transcript, &x, 1));
            }
            assert!(adv.routed[0].iter().flatten().all(|&i| i < 3));
            assert!(adv.routed[1].iter().flatten().all(|&i| i < 3));
        }
    }

    #[test]
    fn cor_rounds_sandwich() {
        let fs: Vec<BooleanFunction> =
            vec![basic::and(2).unwrap(), basic::or(3).unwrap(), make_dj(2).unwrap(), basic::parity(2).unwrap(), make_dj(4).unwrap()];
        for f in &fs {
            for g in &fs {
                if f.arity() + g.arity() > 8 {
                    continue;
                }
                let cor = make_cor(f, g).unwrap();
                for p in 1..=2 {
                    let d = |h: &BooleanFunction| exact_parallel_D(h, p, Granularity::Bit).unwrap();
                    let m = d(f).min(d(g));
                    let dc = d(&cor);
                    assert!(m <= dc && dc <= 2 * m, "{} {} p={p}: {dc} vs min {m}", f.name(), g.name());
                }
            }
        }
    }
}
