//! Deterministic strategy for `f ∘ g`: play an optimal `q`-parallel strategy
//! for `f` with `q = max(1, ⌊p/M⌋)`, resolving each outer query by reading
//! the whole `g`-block, `p` bits per round.

use super::solver::{SolverStrategy, TableGame};
use super::strategy::{QueryStrategy, Step};
use super::{ClassicalError, Granularity, Result, Round, Transcript};
use crate::boolfn::BooleanFunction;

pub struct CompositionStrategy {
    outer: SolverStrategy<TableGame>,
    outer_transcript: Transcript,
    g: BooleanFunction,
    p: usize,
    pending: Vec<usize>,
}

pub fn composition_strategy(f: &BooleanFunction, g: &BooleanFunction, p: usize) -> Result<CompositionStrategy> {
    if p == 0 {
        return Err(ClassicalError::ParallelismTooSmall { need: 1, got: 0 });
    }
    let m = g.arity();
    let q = (p / m).max(1);
    Ok(CompositionStrategy {
        outer: SolverStrategy::for_function(f, q, Granularity::Bit)?,
        outer_transcript: Transcript::new(Granularity::Bit, q),
        g: g.fast(),
        p,
        pending: Vec::new(),
    })
}

impl CompositionStrategy {
    /// Rounds this strategy needs in the worst case, given `D^{q∥}(f)`.
    pub fn round_bound(outer_rounds: usize, m: usize, p: usize) -> usize {
        let q = (p / m).max(1);
        outer_rounds * (q * m).div_ceil(p)
    }
}

impl QueryStrategy for CompositionStrategy {
    fn parallelism(&self) -> usize {
        self.p
    }
    fn next(&mut self, t: &Transcript) -> Step {
        let m = self.g.arity();
        loop {
            if !self.pending.is_empty() {
                let known = t.known();
                let missing: Vec<usize> =
                    self.pending.iter().flat_map(|&j| j * m..(j + 1) * m).filter(|b| !known.contains_key(b)).collect();
                if !missing.is_empty() {
                    return Step::Query(missing.into_iter().take(self.p).collect());
                }
                // A g-block outside g's domain has no value; answer 0 there.
                let mut answers = Vec::with_capacity(self.pending.len());
                for &j in &self.pending {
                    let x = (0..m).fold(0u64, |acc, b| acc | known[&(j * m + b)] << b);
                    match self.g.value_at(x) {
                        Some(v) => answers.push(v as u64),
                        None => return Step::Answer(false),
                    }
                }
                let indices = std::mem::take(&mut self.pending);
                let round = self.outer_transcript.rounds.len();
                self.outer_transcript.rounds.push(Round { round, indices, answers });
            }
            match self.outer.next(&self.outer_transcript) {
                Step::Answer(v) => return Step::Answer(v),
                Step::Query(q) => self.pending = q,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::Bits;
    use crate::boolfn::compose;
    use crate::classical::{exact_parallel_D, run_strategy, QuerySource};
    use crate::constructions::{basic, dj::make_dj};

    #[test]
    fn composition_meets_the_bound() {
        let cases = [
            (basic::or(3).unwrap(), basic::and(2).unwrap()),
            (make_dj(4).unwrap(), basic::or(2).unwrap()),
            (basic::maj(3).unwrap(), basic::parity(3).unwrap()),
        ];
        for (f, g) in &cases {
            let h = compose(f, g).unwrap();
            let m = g.arity();
            for p in [1, m, 2 * m] {
                let q = (p / m).max(1);
                let bound = CompositionStrategy::round_bound(exact_parallel_D(f, q, Granularity::Bit).unwrap(), m, p);
                let mut worst = 0;
                for (x, v) in h.points().unwrap() {
                    let x = Bits::from_u64(x, h.arity());
                    let r = run_strategy(&mut composition_strategy(f, g, p).unwrap(), QuerySource::Input(&x), &h).unwrap();
                    assert_eq!(r.transcript.answer, Some(v));
                    worst = worst.max(r.transcript.round_count());
                }
                assert!(worst <= bound, "{} p={p}: {worst} > {bound}", h.name());
                if h.arity() <= 12 {
                    assert!(exact_parallel_D(&h, p, Granularity::Bit).unwrap() <= worst);
                }
            }
        }
    }
}
