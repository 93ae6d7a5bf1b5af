use super::{ClassicalError, Granularity, Result, Round, Transcript};
use crate::bits::Bits;
use crate::boolfn::{BoolFnError, BooleanFunction};

/// What a strategy does next.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    Query(Vec<usize>),
    Answer(bool),
}

/// A p-parallel query procedure. Randomized strategies carry their own seeded
/// RNG, so a fixed seed gives a deterministic strategy.
pub trait QueryStrategy {
    fn parallelism(&self) -> usize;
    fn granularity(&self) -> Granularity {
        Granularity::Bit
    }
    fn next(&mut self, transcript: &Transcript) -> Step;
}

/// Stateful responder, typically an adversary. Answers use the granularity
/// the answerer was built for.
pub trait AdaptiveAnswerer {
    fn answer(&mut self, indices: &[usize]) -> Result<Vec<u64>>;
    /// An input agreeing with every answer so far on which the function
    /// takes `value`, if one exists.
    fn completion(&self, value: bool) -> Option<Bits>;
}

pub enum QuerySource<'a> {
    Input(&'a Bits),
    Answerer(&'a mut dyn AdaptiveAnswerer),
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub transcript: Transcript,
    /// Whether the answer equals `f(x)`; `None` against an answerer.
    pub correct: Option<bool>,
}

/// Number of query positions of `f` at granularity `g`, and the block width.
pub(crate) fn positions(f: &BooleanFunction, g: Granularity) -> Result<(usize, usize)> {
    match g {
        Granularity::Bit => Ok((f.arity(), 1)),
        Granularity::Block => {
            let m = f
                .block_meta()
                .ok_or_else(|| ClassicalError::BadArgument(format!("{} has no block structure", f.name())))?;
            Ok((m.block_count, m.block_bits))
        }
    }
}

/// Value of position `i` of `x` at block width `w` (1 for bits).
pub(crate) fn read_position(x: &Bits, i: usize, w: usize) -> u64 {
    x.read_uint(i * w, w)
}

/// Whether `x` agrees with every answer of `t`.
pub fn consistent_with(t: &Transcript, x: &Bits, block_bits: usize) -> bool {
    t.rounds
        .iter()
        .all(|r| r.indices.iter().zip(&r.answers).all(|(&i, &a)| read_position(x, i, block_bits) == a))
}

/// Upper bound on rounds before a run is declared non-terminating.
fn round_limit(positions: usize) -> usize {
    4 * positions + 16
}

pub fn run_strategy(s: &mut dyn QueryStrategy, mut src: QuerySource, f: &BooleanFunction) -> Result<RunRecord> {
    let g = s.granularity();
    let (n, w) = positions(f, g)?;
    let p = s.parallelism();
    let truth = match &src {
        QuerySource::Input(x) => {
            if x.len() != f.arity() {
                return Err(BoolFnError::ArityMismatch { expected: f.arity(), got: x.len() }.into());
            }
            Some(f.evaluate(x)?)
        }
        QuerySource::Answerer(_) => None,
    };
    let mut t = Transcript::new(g, p);
    let limit = round_limit(n);
    loop {
        match s.next(&t) {
            Step::Answer(b) => {
                t.answer = Some(b);
                return Ok(RunRecord { correct: truth.map(|v| v == b), transcript: t });
            }
            Step::Query(indices) => {
                let round = t.rounds.len();
                if indices.len() > p {
                    return Err(ClassicalError::StrategyViolation { round, size: indices.len(), p });
                }
                if let Some(&index) = indices.iter().find(|&&i| i >= n) {
                    return Err(ClassicalError::IndexOutOfRange { index, positions: n });
                }
                if round >= limit {
                    return Err(ClassicalError::RoundLimit(limit));
                }
                let answers = match &mut src {
                    QuerySource::Input(x) => indices.iter().map(|&i| read_position(x, i, w)).collect(),
                    QuerySource::Answerer(a) => a.answer(&indices)?,
                };
                t.rounds.push(Round { round, indices, answers });
            }
        }
    }
}

/// Rebuilds the bits known from a bit- or block-granularity transcript.
pub(crate) fn known_bits(t: &Transcript, arity: usize, w: usize) -> (Bits, Bits) {
    let (mut mask, mut vals) = (Bits::zeros(arity), Bits::zeros(arity));
    for (i, a) in t.known() {
        for b in 0..w {
            mask.set(i * w + b, true);
            vals.set(i * w + b, (a >> b) & 1 == 1);
        }
    }
    (mask, vals)
}

/// The common value of every domain point agreeing with the known bits, or
/// `None` while two values (or none) remain. Enumerates the free bits.
pub(crate) fn forced_value(f: &BooleanFunction, mask: &Bits, vals: &Bits) -> Option<bool> {
    let free: Vec<usize> = (0..f.arity()).filter(|&i| !mask.get(i)).collect();
    let mut seen = [false, false];
    let mut x = vals.clone();
    for m in 0u64..(1u64 << free.len()) {
        for (k, &i) in free.iter().enumerate() {
            x.set(i, (m >> k) & 1 == 1);
        }
        if let Some(v) = f.value(&x) {
            seen[v as usize] = true;
            if seen[0] && seen[1] {
                return None;
            }
        }
    }
    match seen {
        [true, false] => Some(false),
        [false, true] => Some(true),
        _ => None,
    }
}

/// Reads every position, `p` per round, then evaluates; out-of-domain
/// inputs are answered 0.
#[derive(Debug, Clone)]
pub struct ReadAllStrategy {
    f: BooleanFunction,
    p: usize,
    granularity: Granularity,
}

impl ReadAllStrategy {
    pub fn new(f: &BooleanFunction, p: usize, granularity: Granularity) -> Result<Self> {
        if p == 0 {
            return Err(ClassicalError::ParallelismTooSmall { need: 1, got: 0 });
        }
        positions(f, granularity)?;
        Ok(ReadAllStrategy { f: f.clone(), p, granularity })
    }
}

impl QueryStrategy for ReadAllStrategy {
    fn parallelism(&self) -> usize {
        self.p
    }
    fn granularity(&self) -> Granularity {
        self.granularity
    }
    fn next(&mut self, t: &Transcript) -> Step {
        let (n, w) = positions(&self.f, self.granularity).expect("checked at construction");
        let asked = t.query_count();
        if asked < n {
            return Step::Query((asked..n.min(asked + self.p)).collect());
        }
        let (_, vals) = known_bits(t, self.f.arity(), w);
        Step::Answer(self.f.value(&vals).unwrap_or(false))
    }
}

/// Reads bits in index order, `p` per round, stopping as soon as the known
/// bits force the value. Needs arity small enough to enumerate free bits.
#[derive(Debug, Clone)]
pub struct SequentialStrategy {
    f: BooleanFunction,
    p: usize,
}

/// Free-bit enumeration cap for [`SequentialStrategy`].
const SEQUENTIAL_CAP: usize = 20;

impl SequentialStrategy {
    pub fn new(f: &BooleanFunction, p: usize) -> Result<Self> {
        if f.arity() > SEQUENTIAL_CAP {
            return Err(ClassicalError::TooLarge { what: "sequential strategy", size: f.arity(), cap: SEQUENTIAL_CAP });
        }
        if p == 0 {
            return Err(ClassicalError::ParallelismTooSmall { need: 1, got: 0 });
        }
        Ok(SequentialStrategy { f: f.fast(), p })
    }
}

impl QueryStrategy for SequentialStrategy {
    fn parallelism(&self) -> usize {
        self.p
    }
    fn next(&mut self, t: &Transcript) -> Step {
        let n = self.f.arity();
        let (mask, vals) = known_bits(t, n, 1);
        let asked = t.query_count();
        if let Some(v) = forced_value(&self.f, &mask, &vals) {
            return Step::Answer(v);
        }
        if asked >= n {
            return Step::Answer(false);
        }
        Step::Query((asked..n.min(asked + self.p)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::basic;

    #[test]
    fn read_all_and4_in_one_round() {
        let f = basic::and(4).unwrap();
        for x in 0..16u64 {
            let x = Bits::from_u64(x, 4);
            let r = run_strategy(&mut ReadAllStrategy::new(&f, 4, Granularity::Bit).unwrap(), QuerySource::Input(&x), &f)
                .unwrap();
            assert_eq!(r.transcript.round_count(), 1);
            assert_eq!(r.correct, Some(true));
        }
    }

    #[test]
    fn sequential_and4_worst_case_four_rounds() {
        let f = basic::and(4).unwrap();
        let worst = (0..16u64)
            .map(|x| {
                let x = Bits::from_u64(x, 4);
                let r = run_strategy(&mut SequentialStrategy::new(&f, 1).unwrap(), QuerySource::Input(&x), &f).unwrap();
                assert_eq!(r.correct, Some(true));
                r.transcript.round_count()
            })
            .max();
        assert_eq!(worst, Some(4));
    }

    struct Greedy(usize);
    impl QueryStrategy for Greedy {
        fn parallelism(&self) -> usize {
            self.0
        }
        fn next(&mut self, _: &Transcript) -> Step {
            Step::Query((0..self.0 + 1).collect())
        }
    }

    #[test]
    fn oversized_round_is_a_violation() {
        let f = basic::and(4).unwrap();
        let x = Bits::zeros(4);
        let err = run_strategy(&mut Greedy(2), QuerySource::Input(&x), &f).unwrap_err();
        assert_eq!(err, ClassicalError::StrategyViolation { round: 0, size: 3, p: 2 });
    }
}
