//! Query programs: partitioned parallel Grover search, one-query
//! Forrelation and Deutsch–Jozsa, and parity of many one-round inner
//! programs.

use super::program::{run_program, AcceptRule, Gate, OracleMode, ProgramRun, QuantumRoundProgram, QuerySlot};
use super::state::{index_width, Register};
use super::{QuantumError, Result};
use crate::bits::Bits;
use crate::constructions::{AnaKind, AnaParams};
use rand::Rng;

/// `p` independent Grover searches over the blocks `jM..(j+1)M`, `M = N/p`,
/// each on its own index register, for `rounds` iterations. Measuring gives
/// one candidate per block; a final classical round checks them.
pub fn grover_parallel(n: usize, p: usize, rounds: usize) -> Result<QuantumRoundProgram> {
    if p == 0 || !n.is_multiple_of(p) {
        return Err(QuantumError::BadArgument(format!("p = {p} must divide N = {n}")));
    }
    let m = n / p;
    let w = index_width(m);
    let regs: Vec<Register> = (0..p).map(|j| Register::new(j * w, w)).collect();
    let mut prog = QuantumRoundProgram::new(p * w);
    for &reg in &regs {
        prog = prog.gate(Gate::Uniform { reg, m });
    }
    for _ in 0..rounds {
        prog = prog.query(OracleMode::Phase, regs.iter().enumerate().map(|(j, &r)| QuerySlot::phase(r, j * m, m)).collect());
        for &reg in &regs {
            prog = prog.gate(Gate::Diffusion { reg, m });
        }
    }
    Ok(prog.measure(0..p * w, AcceptRule::Raw))
}

/// Candidate `v` of block `j` in an outcome of [`grover_parallel`].
pub fn grover_candidates(outcome: u64, n: usize, p: usize) -> Vec<usize> {
    let m = n / p;
    let w = index_width(m);
    (0..p).map(|j| j * m + ((outcome as usize >> (j * w)) & ((1 << w) - 1))).collect()
}

/// Probability that some measured candidate is marked in `x`.
pub fn grover_success(run: &ProgramRun, x: &Bits, p: usize) -> f64 {
    run.distribution
        .iter()
        .enumerate()
        .filter(|&(o, _)| grover_candidates(o as u64, x.len(), p).into_iter().any(|i| i < x.len() && x.get(i)))
        .map(|(_, &q)| q)
        .sum()
}

/// One phase query to the `2^{n+1}`-bit table `X ⁀ Y`, indexed by the
/// control qubit and an `n`-qubit register: control `|+⟩`, `H^n`, query,
/// `H^n` on the control-0 branch, `H` on the control. Accepts on control 0,
/// with probability `(1 + Φ)/2`.
pub fn forrelation_program(n: usize) -> QuantumRoundProgram {
    let reg = Register::new(0, n);
    QuantumRoundProgram::new(n + 1)
        .gate(Gate::H(n))
        .gate(Gate::HLayer(reg))
        .query(OracleMode::Phase, vec![QuerySlot::phase(Register::new(0, n + 1), 0, 2 << n)])
        .gate(Gate::ControlledHLayer { control: n, value: false, targets: reg })
        .gate(Gate::H(n))
        .measure([n], AcceptRule::Outcome(0))
}

/// Deutsch–Jozsa on `n` bits (a power of 2): the all-zero string always
/// measures `0`, a balanced string never does. Accepts (balanced) on a
/// nonzero outcome.
pub fn dj_program(n: usize) -> Result<QuantumRoundProgram> {
    if !n.is_power_of_two() {
        return Err(QuantumError::BadArgument(format!("DJ program needs a power of 2, got {n}")));
    }
    let w = index_width(n);
    let reg = Register::new(0, w);
    Ok(QuantumRoundProgram::new(w)
        .gate(Gate::HLayer(reg))
        .query(OracleMode::Phase, vec![QuerySlot::phase(reg, 0, n)])
        .gate(Gate::HLayer(reg))
        .measure(0..w, AcceptRule::NotOutcome(0)))
}

/// Reads bit `i` into a target qubit.
pub fn single_bit_program(i: usize) -> QuantumRoundProgram {
    QuantumRoundProgram::new(1)
        .query(OracleMode::BitFlip, vec![QuerySlot::bit_flip(Register::new(0, 0), 0, i, 1)])
        .measure([0], AcceptRule::Outcome(1))
}

/// PARITY of `m` inner bits, each estimated by `reps` side-by-side runs of a
/// one-round inner program on its own slice of the input. A copy votes 1
/// when more than `threshold · reps` of its runs accept.
///
/// Copies share no qubits, so each is simulated on its own; the combined
/// program is available through [`ParityProgram::combined`].
#[derive(Debug, Clone)]
pub struct ParityProgram {
    pub copies: Vec<QuantumRoundProgram>,
    pub reps: usize,
    pub threshold: f64,
}

/// `copies[j]` reads input positions `base + j·inner_len ..`.
pub fn parity_parallel_program(
    m: usize,
    p: usize,
    inner: &QuantumRoundProgram,
    inner_len: usize,
    base: usize,
    reps: usize,
    threshold: f64,
) -> Result<ParityProgram> {
    if inner.accept == AcceptRule::Raw {
        return Err(QuantumError::BadArgument("inner program needs an accept rule".into()));
    }
    if inner.input_len() > inner_len {
        return Err(QuantumError::LayoutMismatch(format!("inner program reads {} of {inner_len} bits", inner.input_len())));
    }
    let need = reps * m * inner.parallelism();
    if p < need {
        return Err(QuantumError::ParallelismTooSmall { need, got: p });
    }
    let copies = (0..m).map(|j| inner.shifted(0, base + j * inner_len)).collect();
    Ok(ParityProgram { copies, reps, threshold })
}

impl ParityProgram {
    pub fn rounds(&self) -> usize {
        self.copies.iter().map(|c| c.rounds()).max().unwrap_or(0)
    }

    pub fn parallelism(&self) -> usize {
        self.reps * self.copies.iter().map(|c| c.parallelism()).sum::<usize>()
    }

    /// Every copy and repetition on disjoint qubits in one program.
    pub fn combined(&self) -> Result<QuantumRoundProgram> {
        let parts: Vec<_> = self.copies.iter().flat_map(|c| std::iter::repeat_n(c.clone(), self.reps)).collect();
        QuantumRoundProgram::parallel(&parts)
    }

    /// Exact acceptance probability of a single run of each copy.
    pub fn copy_accept(&self, x: &Bits) -> Result<Vec<f64>> {
        self.copies.iter().map(|c| Ok(run_program(c, x)?.accept_probability().expect("accept rule checked"))).collect()
    }

    /// `Pr[copy votes 1]` from its single-run acceptance `q`.
    pub fn vote_probability(&self, q: f64) -> f64 {
        let need = (self.threshold * self.reps as f64).floor() as usize + 1;
        (need..=self.reps).map(|k| binomial(self.reps, k) * q.powi(k as i32) * (1.0 - q).powi((self.reps - k) as i32)).sum()
    }

    /// Exact `Pr[output = 1]`.
    pub fn output_one_probability(&self, x: &Bits) -> Result<f64> {
        let bias: f64 = self.copy_accept(x)?.into_iter().map(|q| 1.0 - 2.0 * self.vote_probability(q)).product();
        Ok((1.0 - bias) / 2.0)
    }

    /// One sampled execution.
    pub fn sample(&self, x: &Bits, rng: &mut impl Rng) -> Result<bool> {
        let mut out = false;
        for q in self.copy_accept(x)? {
            let accepted = (0..self.reps).filter(|_| rng.gen_bool(q.clamp(0.0, 1.0))).count();
            out ^= accepted as f64 > self.threshold * self.reps as f64;
        }
        Ok(out)
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Acceptance threshold for bounded-error inner programs: Forrelation YES
/// accepts with probability at least 0.8, NO at most 0.505.
pub const FORRELATION_VOTE_THRESHOLD: f64 = 0.65;

/// Solves the `PARITY ∘ inner` half of an ANA instance in one round and
/// never queries the pointer half. `reps` is used for Forrelation inners;
/// Deutsch–Jozsa is exact with one run.
pub fn ana_quantum_program(params: AnaParams, reps: usize) -> Result<ParityProgram> {
    let inner_len = params.inner()?.arity();
    let (inner, reps, threshold) = match params.kind {
        AnaKind::Dj => (dj_program(params.inner_n)?, 1, 0.5),
        AnaKind::Forrelation => (forrelation_program(params.inner_n), reps, FORRELATION_VOTE_THRESHOLD),
    };
    let p = reps * params.m * inner.parallelism();
    parity_parallel_program(params.m, p, &inner, inner_len, params.pointer_arity(), reps, threshold)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::forrelation::{forrelation_input, forrelation_of_input};
    use crate::constructions::{make_ana, make_dj};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn grover_reads_everything_when_p_is_n() {
        let prog = grover_parallel(4, 4, 1).unwrap();
        for i in 0..4 {
            let x = Bits::from_u64(1 << i, 4);
            assert!((grover_success(&run_program(&prog, &x).unwrap(), &x, 4) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn grover_matches_rotation_angle() {
        for n in 1..=32usize {
            for p in (1..=n).filter(|p| n % p == 0) {
                let m = n / p;
                if p * index_width(m) > 20 {
                    continue;
                }
                let theta = (1.0 / m as f64).sqrt().asin();
                for r in 0..=5 {
                    let prog = grover_parallel(n, p, r).unwrap();
                    assert_eq!(prog.rounds(), r);
                    let marked = (7 * n + 3) / 11 % n;
                    let x = Bits::from_bools(&(0..n).map(|i| i == marked).collect::<Vec<_>>());
                    let run = run_program(&prog, &x).unwrap();
                    let want = ((2 * r + 1) as f64 * theta).sin().powi(2);
                    assert!((grover_success(&run, &x, p) - want).abs() < 1e-9, "N={n} p={p} r={r}");
                    assert!(run.trace.iter().all(|t| (t.norm - 1.0).abs() < 1e-9));
                }
            }
        }
    }

    #[test]
    fn grover_examples() {
        let x = Bits::from_bools(&(0..8).map(|i| i == 5).collect::<Vec<_>>());
        let run = run_program(&grover_parallel(8, 2, 1).unwrap(), &x).unwrap();
        assert!((grover_success(&run, &x, 2) - 1.0).abs() < 1e-12);
        let x = Bits::from_bools(&(0..16).map(|i| i == 9).collect::<Vec<_>>());
        let run = run_program(&grover_parallel(16, 4, 1).unwrap(), &x).unwrap();
        assert!((grover_success(&run, &x, 4) - 1.0).abs() < 1e-12);
        assert!(grover_parallel(10, 3, 1).is_err());
    }

    #[test]
    fn forrelation_acceptance_is_one_plus_phi_over_two() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for n in 1..=3 {
            let prog = forrelation_program(n);
            assert_eq!(prog.rounds(), 1);
            for _ in 0..50 {
                let x = Bits::from_bools(&(0..2 << n).map(|_| rng.gen_bool(0.5)).collect::<Vec<_>>());
                let phi = forrelation_of_input(&x, n);
                let acc = run_program(&prog, &x).unwrap().accept_probability().unwrap();
                assert!((acc - (1.0 + phi) / 2.0).abs() < 1e-9, "n={n}");
            }
        }
    }

    #[test]
    fn forrelation_examples() {
        let prog1 = forrelation_program(1);
        let ones = forrelation_input(&[1, 1], &[1, 1]);
        let acc = run_program(&prog1, &ones).unwrap().accept_probability().unwrap();
        assert!((acc - (1.0 + 0.5f64.sqrt()) / 2.0).abs() < 1e-9);
        let prog2 = forrelation_program(2);
        let no = forrelation_input(&[1, 1, 1, -1], &[1, -1, 1, 1]);
        assert!((run_program(&prog2, &no).unwrap().accept_probability().unwrap() - 0.5).abs() < 1e-9);
        let yes = forrelation_input(&[1, 1, 1, -1], &[1, 1, 1, -1]);
        assert!(run_program(&prog2, &yes).unwrap().accept_probability().unwrap() >= 0.8);
    }

    #[test]
    fn dj_is_exact() {
        let f = make_dj(4).unwrap();
        let prog = dj_program(4).unwrap();
        for (z, v) in f.points().unwrap() {
            let acc = run_program(&prog, &Bits::from_u64(z, 4)).unwrap().accept_probability().unwrap();
            assert!((acc - v as u8 as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn parity_of_single_bit_reads_is_exact() {
        let inner = single_bit_program(0);
        let prog = parity_parallel_program(2, 2, &inner, 1, 0, 1, 0.5).unwrap();
        assert_eq!(prog.rounds(), 1);
        assert_eq!(prog.parallelism(), 2);
        for x in 0..4u64 {
            let x = Bits::from_u64(x, 2);
            let want = x.count_ones() % 2 == 1;
            assert!((prog.output_one_probability(&x).unwrap() - want as u8 as f64).abs() < 1e-12);
        }
        assert_eq!(
            parity_parallel_program(2, 1, &inner, 1, 0, 1, 0.5).unwrap_err(),
            QuantumError::ParallelismTooSmall { need: 2, got: 1 }
        );
        let combined = prog.combined().unwrap();
        assert_eq!((combined.rounds(), combined.parallelism(), combined.qubits), (1, 2, 2));
    }

    #[test]
    fn parity_of_forrelation_has_advantage() {
        let yes = forrelation_input(&[1, 1, 1, -1], &[1, 1, 1, -1]);
        let no = forrelation_input(&[1, 1, 1, -1], &[1, -1, 1, 1]);
        let inner = forrelation_program(2);
        let prog = parity_parallel_program(2, 2 * 15, &inner, 8, 0, 15, FORRELATION_VOTE_THRESHOLD).unwrap();
        assert_eq!(prog.rounds(), 1);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (a, b) in [(&yes, &yes), (&yes, &no), (&no, &yes), (&no, &no)] {
            let x = a.concat(b);
            let want = (a == &no) ^ (b == &no);
            let shots = 2000;
            let ok = (0..shots).filter(|_| prog.sample(&x, &mut rng).unwrap() == want).count();
            assert!(ok as f64 / shots as f64 >= 0.6, "{ok}/{shots}");
            let exact = prog.output_one_probability(&x).unwrap();
            let exact_ok = if want { exact } else { 1.0 - exact };
            assert!(exact_ok >= 0.6);
        }
    }

    #[test]
    fn ana_program_ignores_the_pointer_half() {
        for params in [AnaParams::toy(AnaKind::Dj), AnaParams { inner_n: 2, ..AnaParams::toy(AnaKind::Forrelation) }] {
            let f = make_ana(params).unwrap();
            let prog = ana_quantum_program(params, 15).unwrap();
            assert_eq!(prog.rounds(), 1);
            let min_read = prog.copies.iter().flat_map(|c| &c.queries).flat_map(|q| &q.slots).map(|s| s.offset).min().unwrap();
            assert!(min_read >= params.pointer_arity());
            let inner = params.inner().unwrap();
            let points = inner.points().unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(2);
            let (mut yes, mut no) = (0, 0);
            for _ in 0..400 {
                let map: Vec<usize> = (0..params.pointer_blocks).map(|_| rng.gen_range(0..params.pointer_blocks)).collect();
                let mut x = crate::constructions::pointer_input(&map);
                for _ in 0..params.m {
                    x = x.concat(&Bits::from_u64(points[rng.gen_range(0..points.len())].0, inner.arity()));
                }
                let Some(v) = f.value(&x) else { continue };
                let acc = prog.output_one_probability(&x).unwrap();
                if v {
                    yes += 1;
                    assert!(acc >= 2.0 / 3.0, "{params:?}: {acc}");
                } else {
                    no += 1;
                    assert!(acc <= 1.0 / 3.0, "{params:?}: {acc}");
                }
            }
            assert!(yes > 0 && no > 0, "{params:?}: {yes} yes, {no} no");
        }
    }
}
