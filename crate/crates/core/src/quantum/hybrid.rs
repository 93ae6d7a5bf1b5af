//! Hybrid algorithms whose first round is a quantum oracle call and whose
//! later rounds read bits classically.
//!
//! The quantum round is simulated exactly: the harness reads the bits the
//! quantum query touches in superposition, computes the exact acceptance
//! probability and samples the measurements. The harness-counted width of
//! that round is therefore the full footprint of the queried registers.

use super::program::{run_program, AcceptRule, QuantumRoundProgram};
use super::{QuantumError, Result};
use crate::bits::Bits;
use crate::boolfn::BooleanFunction;
use crate::classical::{
    cheatsheet_parallel_algorithm, two_adaptive_rand_algorithm, CheatSheetStrategy, Model, OneRoundSolver, QueryStrategy,
    Step, Transcript, TwoAdaptiveRandStrategy,
};
use crate::constructions::{CheatSheet, TwoAdaptive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// A one-round quantum program answering an inner function, amplified by
/// `shots` side-by-side runs: it answers 1 when more than `threshold·shots`
/// runs accept.
///
/// With `blocks`, the program's oracle string is the block function applied
/// to consecutive blocks of the input (each query to it costs one block
/// read).
#[derive(Clone)]
pub struct QuantumSolver {
    program: QuantumRoundProgram,
    shots: usize,
    threshold: f64,
    blocks: Option<BooleanFunction>,
}

impl std::fmt::Debug for QuantumSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("QuantumSolver").field("shots", &self.shots).field("threshold", &self.threshold).finish()
    }
}

impl QuantumSolver {
    pub fn new(program: QuantumRoundProgram, shots: usize, threshold: f64) -> Result<Self> {
        if program.rounds() != 1 || program.accept == AcceptRule::Raw || shots == 0 {
            return Err(QuantumError::BadArgument("need a one-round program with an accept rule and at least one shot".into()));
        }
        // Dry run: layout and qubit cap are checked once here.
        run_program(&program, &Bits::zeros(program.input_len()))?;
        Ok(QuantumSolver { program, shots, threshold, blocks: None })
    }

    /// A single run of an exact program.
    pub fn exact(program: QuantumRoundProgram) -> Result<Self> {
        Self::new(program, 1, 0.5)
    }

    pub fn over_blocks(mut self, block_fn: &BooleanFunction) -> Self {
        self.blocks = Some(block_fn.fast());
        self
    }

    fn block_len(&self) -> usize {
        self.blocks.as_ref().map_or(1, |b| b.arity())
    }

    /// Bits of the solver's own input.
    pub fn arity(&self) -> usize {
        self.program.input_len() * self.block_len()
    }

    /// Queries one execution makes, counting each oracle-string query as a
    /// block read.
    pub fn declared_width(&self) -> usize {
        self.shots * self.program.parallelism() * self.block_len()
    }

    fn oracle_string(&self, x: &Bits) -> Option<Bits> {
        match &self.blocks {
            None => Some(x.clone()),
            Some(h) => {
                let w = h.arity();
                let bits: Option<Vec<bool>> = (0..x.len() / w).map(|j| h.value(&x.slice(j * w, w))).collect();
                bits.map(|b| Bits::from_bools(&b))
            }
        }
    }

    /// Acceptance probability of one run. Inputs whose blocks fall outside
    /// the block function's domain are treated as all-zero strings.
    pub fn accept_probability(&self, x: &Bits) -> f64 {
        let z = self.oracle_string(x).unwrap_or_else(|| Bits::zeros(self.program.input_len()));
        run_program(&self.program, &z).expect("validated by the dry run").accept_probability().expect("accept rule checked")
    }

    pub fn decide_with(&self, x: &Bits, rng: &mut impl Rng) -> bool {
        let q = self.accept_probability(x).clamp(0.0, 1.0);
        let accepted = (0..self.shots).filter(|_| rng.gen_bool(q)).count();
        accepted as f64 > self.threshold * self.shots as f64
    }
}

impl OneRoundSolver for QuantumSolver {
    fn arity(&self) -> usize {
        QuantumSolver::arity(self)
    }
    fn max_queries(&self) -> usize {
        QuantumSolver::arity(self)
    }
    fn plan(&self, _rng: &mut ChaCha8Rng) -> Vec<usize> {
        (0..QuantumSolver::arity(self)).collect()
    }
    fn decide(&self, seen: &[bool], rng: &mut ChaCha8Rng) -> bool {
        self.decide_with(&Bits::from_bools(seen), rng)
    }
}

/// One quantum round over a copy's bits, then the sampled answer.
pub struct QuantumInnerStrategy {
    solver: Arc<QuantumSolver>,
    rng: ChaCha8Rng,
}

impl QuantumInnerStrategy {
    pub fn new(solver: Arc<QuantumSolver>, seed: u64) -> Self {
        QuantumInnerStrategy { solver, rng: ChaCha8Rng::seed_from_u64(seed) }
    }
}

impl QueryStrategy for QuantumInnerStrategy {
    fn parallelism(&self) -> usize {
        self.solver.arity()
    }
    fn next(&mut self, t: &Transcript) -> Step {
        let n = self.solver.arity();
        match t.round_count() {
            0 => Step::Query((0..n).collect()),
            _ => {
                let x = Bits::from_bools(&(0..n).map(|i| t.lookup(i) == Some(1)).collect::<Vec<_>>());
                Step::Answer(self.solver.decide_with(&x, &mut self.rng))
            }
        }
    }
}

/// Quantum inner solve of every address copy, classical cell read,
/// classical certificate check: three rounds.
pub fn cheatsheet_quantum_3round(cs: &CheatSheet, solver: Arc<QuantumSolver>, p: usize, seed: u64) -> Result<CheatSheetStrategy> {
    if solver.arity() != cs.layout.inner_arity {
        return Err(QuantumError::LayoutMismatch(format!(
            "solver reads {} bits, copies have {}",
            solver.arity(),
            cs.layout.inner_arity
        )));
    }
    let need = cs.layout.copies * solver.declared_width();
    if p < need {
        return Err(QuantumError::ParallelismTooSmall { need, got: p });
    }
    let factory = move |_: usize, s: u64| -> Box<dyn QueryStrategy> { Box::new(QuantumInnerStrategy::new(solver.clone(), s)) };
    Ok(cheatsheet_parallel_algorithm(Model::Rand { seed }, cs, p, &factory)?)
}

/// Width of the first round: all of BC plus, per segment, every shot's
/// query to `IN[i]`, each costing one sub-segment.
pub fn two_adaptive_quantum_width(h: &TwoAdaptive, solver: &QuantumSolver) -> usize {
    let l = &h.layout;
    l.bc_len() + l.segments * solver.declared_width() * l.sub_len()
}

/// Round 1 estimates every `TG_i` with one amplified quantum solve of
/// `IN[i]` and reads all bicertificates; round 2 checks the certificates
/// and reads `DT` at the estimate.
pub fn two_adaptive_quantum(h: &TwoAdaptive, solver: Arc<QuantumSolver>, p: usize, seed: u64) -> Result<TwoAdaptiveRandStrategy> {
    let need = two_adaptive_quantum_width(h, &solver);
    if p < need {
        return Err(QuantumError::ParallelismTooSmall { need, got: p });
    }
    Ok(two_adaptive_rand_algorithm(h, solver, 1, p, seed)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{run_strategy, two_adaptive_hard_instance, QuerySource};
    use crate::constructions::{and_or, make_dj, make_forrelation, CanonicalParams, TwoAdaptiveParams};
    use crate::quantum::{dj_program, forrelation_program, FORRELATION_VOTE_THRESHOLD};

    fn dj_solver() -> Arc<QuantumSolver> {
        Arc::new(QuantumSolver::exact(dj_program(2).unwrap()).unwrap().over_blocks(&and_or(2, 2).unwrap()))
    }

    #[test]
    fn cheatsheet_quantum_accepts_yes_and_rejects_corruption_in_three_rounds() {
        for copies in [1, 2] {
            let cs = CheatSheet::canonical(&make_dj(2).unwrap(), CanonicalParams { copies, ..CanonicalParams::toy() }).unwrap();
            let f = cs.function();
            let p = cs.layout.cell_size.max(copies * cs.layout.inner_arity);
            let points = cs.inner().points().unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(4);
            let (mut yes, mut ok) = (0, 0);
            for trial in 0..300u64 {
                let zs: Vec<Bits> = (0..copies)
                    .map(|_| Bits::from_u64(points[rng.gen_range(0..points.len())].0, cs.layout.inner_arity))
                    .collect();
                let x = cs.yes_input(&zs).unwrap();
                assert!(f.evaluate(&x).unwrap());
                let mut s = cheatsheet_quantum_3round(&cs, dj_solver(), p, trial).unwrap();
                let r = run_strategy(&mut s, QuerySource::Input(&x), &f).unwrap();
                assert_eq!(r.transcript.round_count(), 3);
                assert!(r.transcript.rounds.iter().all(|round| round.indices.len() <= p));
                yes += 1;
                ok += r.correct.unwrap() as usize;
                // Corrupt the cell the copies point at.
                let ell = cs.evaluate_detail(&x).ell.unwrap();
                let mut bad = x.clone();
                let start = cs.layout.cell_start(ell);
                for b in 0..cs.layout.cell_size {
                    if rng.gen_bool(0.3) {
                        bad.flip(start + b);
                    }
                }
                if f.evaluate(&bad).unwrap() {
                    continue;
                }
                let mut s = cheatsheet_quantum_3round(&cs, dj_solver(), p, trial).unwrap();
                let r = run_strategy(&mut s, QuerySource::Input(&bad), &f).unwrap();
                assert_eq!(r.transcript.answer, Some(false));
            }
            assert!(ok as f64 >= 2.0 / 3.0 * yes as f64);
        }
    }

    #[test]
    fn cheatsheet_quantum_checks_parallelism() {
        let cs = CheatSheet::canonical(&make_dj(2).unwrap(), CanonicalParams::toy()).unwrap();
        assert!(matches!(cheatsheet_quantum_3round(&cs, dj_solver(), 1, 0), Err(QuantumError::ParallelismTooSmall { .. })));
    }

    fn forrelation_toy() -> (TwoAdaptive, Arc<QuantumSolver>, usize) {
        let h = TwoAdaptive::new(&make_forrelation(2).unwrap(), TwoAdaptiveParams::toy()).unwrap();
        let solver = Arc::new(QuantumSolver::new(forrelation_program(2), 15, FORRELATION_VOTE_THRESHOLD).unwrap());
        let p = two_adaptive_quantum_width(&h, &solver).max(h.layout.arity());
        (h, solver, p)
    }

    #[test]
    fn two_adaptive_quantum_succeeds_in_two_rounds() {
        let (h, solver, p) = forrelation_toy();
        let f = h.function();
        let trials = 2000;
        let mut ok = 0;
        for seed in 0..trials {
            let x = two_adaptive_hard_instance(&h, seed).unwrap();
            let mut s = two_adaptive_quantum(&h, solver.clone(), p, seed + 7_000_000).unwrap();
            let r = run_strategy(&mut s, QuerySource::Input(&x), &f).unwrap();
            assert_eq!(r.transcript.round_count(), 2);
            ok += r.correct.unwrap() as usize;
        }
        assert!(ok as f64 / trials as f64 >= 0.6, "{ok}/{trials}");
    }

    #[test]
    fn two_adaptive_quantum_rejects_uncertified_inputs() {
        let (h, solver, p) = forrelation_toy();
        let f = h.function();
        let l = h.layout;
        for seed in 0..100u64 {
            let mut x = two_adaptive_hard_instance(&h, seed).unwrap();
            for t in 0..l.dt_len() {
                x.set(l.dt_bit(t), true);
            }
            // Break one bicertificate by repeating a one-part location.
            let w = l.loc_bits();
            let start = l.bc_start((seed as usize) % l.segments, 0) + l.block_size * w;
            let first = x.read_uint(start, w);
            x.write_uint(start + w, w, first);
            assert!(!f.evaluate(&x).unwrap());
            let mut s = two_adaptive_quantum(&h, solver.clone(), p, seed).unwrap();
            assert_eq!(run_strategy(&mut s, QuerySource::Input(&x), &f).unwrap().transcript.answer, Some(false));
        }
    }
}
