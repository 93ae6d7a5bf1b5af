//! Round-structured programs `U_0, O, U_1, O, …, U_k` and their exact
//! simulation.

use super::state::{diffusion, uniform_swap, Register, StateVector, DEFAULT_QUBIT_CAP};
use super::{QuantumError, Result};
use crate::bits::Bits;
use crate::scalar::Real;
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::fmt;
use std::sync::Arc;

/// Classical predicate or bijection on register values.
pub type ValueFn<R> = Arc<dyn Fn(usize) -> R + Send + Sync>;

#[derive(Clone)]
pub enum Gate {
    H(usize),
    X(usize),
    /// `H` on every qubit of the register.
    HLayer(Register),
    /// `H` on every target qubit in the branch where `control` reads `value`.
    ControlledHLayer { control: usize, value: bool, targets: Register },
    /// `|0⟩ ↔` uniform superposition over the first `m` register values.
    Uniform { reg: Register, m: usize },
    /// `2|u⟩⟨u| − I` for `u` uniform over the first `m` register values.
    Diffusion { reg: Register, m: usize },
    /// `−1` where the predicate holds on the register value.
    PhaseFn { reg: Register, name: String, f: ValueFn<bool> },
    /// Classical bijection on register values.
    Permute { reg: Register, name: String, f: ValueFn<usize> },
}

impl fmt::Debug for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())?;
        f.debug_list().entries(self.registers()).finish()
    }
}

impl Gate {
    pub fn name(&self) -> String {
        match self {
            Gate::H(_) => "h".into(),
            Gate::X(_) => "x".into(),
            Gate::HLayer(_) => "h-layer".into(),
            Gate::ControlledHLayer { value, .. } => format!("controlled-h-layer[{}]", *value as u8),
            Gate::Uniform { m, .. } => format!("uniform[{m}]"),
            Gate::Diffusion { m, .. } => format!("diffusion[{m}]"),
            Gate::PhaseFn { name, .. } => format!("phase[{name}]"),
            Gate::Permute { name, .. } => format!("permute[{name}]"),
        }
    }

    pub fn registers(&self) -> Vec<Register> {
        match self {
            Gate::H(q) | Gate::X(q) => vec![Register::new(*q, 1)],
            Gate::HLayer(r) => vec![*r],
            Gate::ControlledHLayer { control, targets, .. } => vec![Register::new(*control, 1), *targets],
            Gate::Uniform { reg, .. } | Gate::Diffusion { reg, .. } | Gate::PhaseFn { reg, .. } | Gate::Permute { reg, .. } => {
                vec![*reg]
            }
        }
    }

    fn shifted(&self, by: usize) -> Gate {
        match self {
            Gate::H(q) => Gate::H(q + by),
            Gate::X(q) => Gate::X(q + by),
            Gate::HLayer(r) => Gate::HLayer(r.shifted(by)),
            Gate::ControlledHLayer { control, value, targets } => {
                Gate::ControlledHLayer { control: control + by, value: *value, targets: targets.shifted(by) }
            }
            Gate::Uniform { reg, m } => Gate::Uniform { reg: reg.shifted(by), m: *m },
            Gate::Diffusion { reg, m } => Gate::Diffusion { reg: reg.shifted(by), m: *m },
            Gate::PhaseFn { reg, name, f } => Gate::PhaseFn { reg: reg.shifted(by), name: name.clone(), f: f.clone() },
            Gate::Permute { reg, name, f } => Gate::Permute { reg: reg.shifted(by), name: name.clone(), f: f.clone() },
        }
    }

    pub fn apply<T: Real>(&self, s: &mut StateVector<T>) -> Result<()> {
        for r in self.registers() {
            s.check_register(r)?;
        }
        match self {
            Gate::H(q) => s.apply_h(*q),
            Gate::X(q) => s.apply_x(*q),
            Gate::HLayer(r) => r.qubits().for_each(|q| s.apply_h(q)),
            Gate::ControlledHLayer { control, value, targets } => {
                if targets.qubits().contains(control) {
                    return Err(QuantumError::LayoutMismatch("control inside its target register".into()));
                }
                targets.qubits().for_each(|q| s.apply_controlled_h(*control, *value, q));
            }
            Gate::Uniform { reg, m } => {
                check_range(*reg, *m)?;
                s.apply_on_register(*reg, |a| uniform_swap(a, *m));
            }
            Gate::Diffusion { reg, m } => {
                check_range(*reg, *m)?;
                s.apply_on_register(*reg, |a| diffusion(a, *m));
            }
            Gate::PhaseFn { reg, f, .. } => s.apply_phase_where(|i| f(reg.value(i))),
            Gate::Permute { reg, f, .. } => {
                let size = 1usize << reg.width;
                let mut seen = vec![false; size];
                for v in 0..size {
                    let w = f(v);
                    if w >= size || std::mem::replace(&mut seen[w], true) {
                        return Err(QuantumError::LayoutMismatch(format!("{} is not a bijection", self.name())));
                    }
                }
                let mask = reg.mask();
                s.apply_permutation(|i| (i & !mask) | f(reg.value(i)) << reg.start);
            }
        }
        Ok(())
    }
}

fn check_range(reg: Register, m: usize) -> Result<()> {
    if m == 0 || m > 1 << reg.width {
        return Err(QuantumError::LayoutMismatch(format!("{m} values on a {}-qubit register", reg.width)));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleMode {
    /// `|i⟩|b⟩ ↦ |i⟩|b ⊕ x_i⟩`.
    BitFlip,
    /// `|i⟩ ↦ (−1)^{x_i}|i⟩`.
    Phase,
}

/// One of the `p` simultaneous queries: register value `v < len` addresses
/// input position `offset + v`; larger values are left alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QuerySlot {
    pub index: Register,
    /// Target qubit; required in bit-flip mode, ignored in phase mode.
    pub target: Option<usize>,
    pub offset: usize,
    pub len: usize,
}

impl QuerySlot {
    pub fn phase(index: Register, offset: usize, len: usize) -> Self {
        QuerySlot { index, target: None, offset, len }
    }

    pub fn bit_flip(index: Register, target: usize, offset: usize, len: usize) -> Self {
        QuerySlot { index, target: Some(target), offset, len }
    }

    fn shifted(&self, qubits: usize, positions: usize) -> Self {
        QuerySlot {
            index: self.index.shifted(qubits),
            target: self.target.map(|t| t + qubits),
            offset: self.offset + positions,
            len: self.len,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QueryLayer {
    pub mode: OracleMode,
    pub slots: Vec<QuerySlot>,
}

/// `O_x^{p∥}` for one input and one query layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelOracle<'a> {
    pub x: &'a Bits,
    pub layer: &'a QueryLayer,
}

impl<'a> ParallelOracle<'a> {
    pub fn new(x: &'a Bits, layer: &'a QueryLayer) -> Self {
        ParallelOracle { x, layer }
    }

    fn validate<T: Real>(&self, s: &StateVector<T>) -> Result<()> {
        let mut used = vec![false; s.qubits()];
        let mut claim = |q: usize| -> Result<()> {
            s.check_qubit(q)?;
            if self.layer.mode == OracleMode::BitFlip && std::mem::replace(&mut used[q], true) {
                return Err(QuantumError::LayoutMismatch(format!("qubit {q} used by two slots")));
            }
            Ok(())
        };
        for slot in &self.layer.slots {
            slot.index.qubits().try_for_each(&mut claim)?;
            match (self.layer.mode, slot.target) {
                (OracleMode::BitFlip, Some(t)) => claim(t)?,
                (OracleMode::BitFlip, None) => return Err(QuantumError::LayoutMismatch("bit-flip slot without target".into())),
                (OracleMode::Phase, _) => {}
            }
            if slot.len > 1 << slot.index.width {
                return Err(QuantumError::LayoutMismatch(format!("{} positions on a {}-qubit index", slot.len, slot.index.width)));
            }
            if slot.offset + slot.len > self.x.len() {
                return Err(QuantumError::LayoutMismatch(format!(
                    "slot reads {}..{} of a {}-bit input",
                    slot.offset,
                    slot.offset + slot.len,
                    self.x.len()
                )));
            }
        }
        Ok(())
    }

    fn bit(&self, slot: &QuerySlot, basis: usize) -> bool {
        let v = slot.index.value(basis);
        v < slot.len && self.x.get(slot.offset + v)
    }

    pub fn apply<T: Real>(&self, s: &mut StateVector<T>) -> Result<()> {
        self.validate(s)?;
        let slots = &self.layer.slots;
        match self.layer.mode {
            OracleMode::Phase => s.apply_phase_where(|i| slots.iter().filter(|sl| self.bit(sl, i)).count() % 2 == 1),
            OracleMode::BitFlip => s.apply_permutation(|i| {
                slots.iter().fold(i, |acc, sl| if self.bit(sl, i) { acc ^ 1 << sl.target.expect("validated") } else { acc })
            }),
        }
        Ok(())
    }
}

/// How a measured outcome turns into an accept/reject bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AcceptRule {
    Outcome(u64),
    NotOutcome(u64),
    /// The outcome itself is the result (e.g. search candidates).
    Raw,
}

/// `U_0, O, U_1, O, …, O, U_k`, then a computational-basis measurement.
#[derive(Debug, Clone)]
pub struct QuantumRoundProgram {
    pub qubits: usize,
    pub unitaries: Vec<Vec<Gate>>,
    pub queries: Vec<QueryLayer>,
    /// Bit `j` of an outcome is qubit `measured[j]`.
    pub measured: Vec<usize>,
    pub accept: AcceptRule,
}

impl QuantumRoundProgram {
    pub fn new(qubits: usize) -> Self {
        QuantumRoundProgram { qubits, unitaries: vec![Vec::new()], queries: Vec::new(), measured: Vec::new(), accept: AcceptRule::Raw }
    }

    /// Appends to the current unitary.
    pub fn gate(mut self, g: Gate) -> Self {
        self.unitaries.last_mut().expect("at least U_0").push(g);
        self
    }

    /// Ends the current unitary with an oracle call.
    pub fn query(mut self, mode: OracleMode, slots: Vec<QuerySlot>) -> Self {
        self.queries.push(QueryLayer { mode, slots });
        self.unitaries.push(Vec::new());
        self
    }

    pub fn measure(mut self, qubits: impl IntoIterator<Item = usize>, accept: AcceptRule) -> Self {
        self.measured = qubits.into_iter().collect();
        self.accept = accept;
        self
    }

    pub fn rounds(&self) -> usize {
        self.queries.len()
    }

    /// Most slots in one oracle call.
    pub fn parallelism(&self) -> usize {
        self.queries.iter().map(|q| q.slots.len()).max().unwrap_or(0)
    }

    /// Input length the slots address.
    pub fn input_len(&self) -> usize {
        self.queries.iter().flat_map(|q| &q.slots).map(|s| s.offset + s.len).max().unwrap_or(0)
    }

    /// Same program on qubits shifted by `qubits` and input positions by
    /// `positions`.
    pub fn shifted(&self, qubits: usize, positions: usize) -> Self {
        QuantumRoundProgram {
            qubits: self.qubits + qubits,
            unitaries: self.unitaries.iter().map(|u| u.iter().map(|g| g.shifted(qubits)).collect()).collect(),
            queries: self
                .queries
                .iter()
                .map(|q| QueryLayer { mode: q.mode, slots: q.slots.iter().map(|s| s.shifted(qubits, positions)).collect() })
                .collect(),
            measured: self.measured.iter().map(|q| q + qubits).collect(),
            accept: self.accept,
        }
    }

    /// Side-by-side composition on disjoint qubits; every part must make
    /// the same number of oracle calls in the same mode. Measurements are
    /// concatenated and the accept rule becomes [`AcceptRule::Raw`].
    pub fn parallel(parts: &[QuantumRoundProgram]) -> Result<Self> {
        let Some(first) = parts.first() else { return Ok(QuantumRoundProgram::new(0)) };
        let mut out = QuantumRoundProgram {
            qubits: 0,
            unitaries: vec![Vec::new(); first.rounds() + 1],
            queries: first.queries.iter().map(|q| QueryLayer { mode: q.mode, slots: Vec::new() }).collect(),
            measured: Vec::new(),
            accept: AcceptRule::Raw,
        };
        for part in parts {
            if part.rounds() != first.rounds() || part.queries.iter().zip(&first.queries).any(|(a, b)| a.mode != b.mode) {
                return Err(QuantumError::LayoutMismatch("parallel parts differ in rounds or oracle modes".into()));
            }
            let s = part.shifted(out.qubits, 0);
            for (u, v) in out.unitaries.iter_mut().zip(s.unitaries) {
                u.extend(v);
            }
            for (q, r) in out.queries.iter_mut().zip(s.queries) {
                q.slots.extend(r.slots);
            }
            out.measured.extend(s.measured);
            out.qubits += part.qubits;
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceEntry {
    pub step: usize,
    pub op: String,
    pub registers: Vec<Register>,
    pub norm: f64,
}

/// Exact outcome distribution of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ProgramRun {
    pub measured: Vec<usize>,
    pub accept: AcceptRule,
    pub distribution: Vec<f64>,
    pub trace: Vec<TraceEntry>,
}

impl ProgramRun {
    /// Probability the accept rule fires; `None` for [`AcceptRule::Raw`].
    pub fn accept_probability(&self) -> Option<f64> {
        match self.accept {
            AcceptRule::Outcome(o) => Some(self.distribution[o as usize]),
            AcceptRule::NotOutcome(o) => Some(1.0 - self.distribution[o as usize]),
            AcceptRule::Raw => None,
        }
    }

    /// Distribution of the measured bits at `positions` (indices into
    /// `measured`).
    pub fn marginal(&self, positions: &[usize]) -> Vec<f64> {
        let mut out = vec![0.0; 1 << positions.len()];
        for (o, &p) in self.distribution.iter().enumerate() {
            let k = positions.iter().enumerate().fold(0, |acc, (j, &b)| acc | (o >> b & 1) << j);
            out[k] += p;
        }
        out
    }

    pub fn sample(&self, shots: usize, seed: u64) -> Vec<u64> {
        let dist = WeightedIndex::new(&self.distribution).expect("a distribution has positive mass");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..shots).map(|_| dist.sample(&mut rng) as u64).collect()
    }

    /// `outcome,bits,probability` rows; `bits` lists measured qubits in
    /// order.
    pub fn distribution_csv(&self) -> String {
        let mut out = String::from("outcome,bits,probability\n");
        for (o, p) in self.distribution.iter().enumerate() {
            let bits: String = (0..self.measured.len()).map(|j| if o >> j & 1 == 1 { '1' } else { '0' }).collect();
            out.push_str(&format!("{o},{bits},{p}\n"));
        }
        out
    }

    pub fn trace_json_lines(&self) -> String {
        self.trace.iter().map(|t| serde_json::to_string(t).expect("plain data") + "\n").collect()
    }
}

pub fn run_program(prog: &QuantumRoundProgram, x: &Bits) -> Result<ProgramRun> {
    run_program_with::<f64>(prog, x, DEFAULT_QUBIT_CAP)
}

pub fn run_program_with<T: Real>(prog: &QuantumRoundProgram, x: &Bits, cap: usize) -> Result<ProgramRun> {
    if prog.unitaries.len() != prog.queries.len() + 1 {
        return Err(QuantumError::LayoutMismatch("unitary count must be oracle count + 1".into()));
    }
    let mut s = StateVector::<T>::new(prog.qubits, cap)?;
    for &q in &prog.measured {
        s.check_qubit(q)?;
    }
    let mut trace = Vec::new();
    let mut record = |op: String, registers: Vec<Register>, s: &StateVector<T>| {
        trace.push(TraceEntry { step: trace.len(), op, registers, norm: s.norm_sqr().to_f64_lossy() });
    };
    for (r, u) in prog.unitaries.iter().enumerate() {
        for g in u {
            g.apply(&mut s)?;
            record(g.name(), g.registers(), &s);
        }
        if let Some(layer) = prog.queries.get(r) {
            ParallelOracle::new(x, layer).apply(&mut s)?;
            let name = match layer.mode {
                OracleMode::BitFlip => "oracle[bit-flip]",
                OracleMode::Phase => "oracle[phase]",
            };
            record(name.into(), layer.slots.iter().map(|sl| sl.index).collect(), &s);
        }
    }
    Ok(ProgramRun { measured: prog.measured.clone(), accept: prog.accept, distribution: s.marginal(&prog.measured), trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::state::ParallelLayout;
    use proptest::prelude::*;

    fn layer(l: &ParallelLayout, n: usize, mode: OracleMode) -> QueryLayer {
        QueryLayer { mode, slots: (0..l.p).map(|j| QuerySlot::bit_flip(l.index(j), l.target(j), 0, n)).collect() }
    }

    #[test]
    fn zero_input_oracle_is_identity() {
        let l = ParallelLayout::for_input(8, 2, 0);
        let x = Bits::zeros(8);
        let q = layer(&l, 8, OracleMode::BitFlip);
        for basis in 0..1 << l.qubits() {
            let mut s = StateVector::<f64>::basis(l.qubits(), basis, 24).unwrap();
            ParallelOracle::new(&x, &q).apply(&mut s).unwrap();
            assert_eq!(s.probabilities()[basis], 1.0);
        }
    }

    #[test]
    fn bit_flip_writes_the_queried_bit() {
        let l = ParallelLayout::for_input(8, 1, 0);
        let x: Bits = "00010000".parse().unwrap();
        let q = layer(&l, 8, OracleMode::BitFlip);
        let mut s = StateVector::<f64>::basis(l.qubits(), 3, 24).unwrap();
        ParallelOracle::new(&x, &q).apply(&mut s).unwrap();
        assert_eq!(s.probabilities()[3 | 1 << l.target(0)], 1.0);
    }

    #[test]
    fn phase_mode_multiplies_by_parity_of_queried_bits() {
        let l = ParallelLayout::for_input(4, 2, 0);
        let x: Bits = "0110".parse().unwrap();
        let q = QueryLayer { mode: OracleMode::Phase, slots: (0..2).map(|j| QuerySlot::phase(l.index(j), 0, 4)).collect() };
        for (i, k) in [(0usize, 1usize), (1, 2), (1, 3), (0, 3)] {
            let basis = i | k << 2;
            let mut s = StateVector::<f64>::basis(l.qubits(), basis, 24).unwrap();
            ParallelOracle::new(&x, &q).apply(&mut s).unwrap();
            let sign = if x.get(i) ^ x.get(k) { -1.0 } else { 1.0 };
            assert_eq!(s.amplitudes()[basis].re, sign);
        }
    }

    #[test]
    fn layout_errors() {
        let x = Bits::zeros(4);
        let mut s = StateVector::<f64>::new(2, 24).unwrap();
        let shared = QueryLayer {
            mode: OracleMode::BitFlip,
            slots: vec![QuerySlot::bit_flip(Register::new(0, 1), 1, 0, 2), QuerySlot::bit_flip(Register::new(1, 1), 0, 0, 2)],
        };
        assert!(matches!(ParallelOracle::new(&x, &shared).apply(&mut s), Err(QuantumError::LayoutMismatch(_))));
        let long = QueryLayer { mode: OracleMode::Phase, slots: vec![QuerySlot::phase(Register::new(0, 2), 2, 4)] };
        assert!(matches!(ParallelOracle::new(&x, &long).apply(&mut s), Err(QuantumError::LayoutMismatch(_))));
    }

    #[test]
    fn empty_program_and_single_hadamard() {
        let run = run_program(&QuantumRoundProgram::new(3).measure(0..3, AcceptRule::Raw), &Bits::zeros(0)).unwrap();
        assert_eq!(run.distribution[0], 1.0);
        let h = QuantumRoundProgram::new(1).gate(Gate::H(0)).measure([0], AcceptRule::Outcome(1));
        let run = run_program(&h, &Bits::zeros(0)).unwrap();
        assert!((run.distribution[0] - 0.5).abs() < 1e-12 && (run.distribution[1] - 0.5).abs() < 1e-12);
        assert_eq!(run.trace.len(), 1);
        assert!(run.distribution_csv().starts_with("outcome,bits,probability\n0,0,"));
        assert!(run.trace_json_lines().contains("\"op\":\"h\""));
    }

    #[test]
    fn cap_exceeded_is_reported() {
        let prog = QuantumRoundProgram::new(30);
        assert!(matches!(run_program(&prog, &Bits::zeros(0)), Err(QuantumError::CapExceeded { qubits: 30, cap: 24 })));
    }

    #[test]
    fn permute_rejects_non_bijections() {
        let g = Gate::Permute { reg: Register::new(0, 2), name: "const".into(), f: Arc::new(|_| 0) };
        let mut s = StateVector::<f64>::new(2, 24).unwrap();
        assert!(g.apply(&mut s).is_err());
        let g = Gate::Permute { reg: Register::new(0, 2), name: "inc".into(), f: Arc::new(|v| (v + 1) % 4) };
        g.apply(&mut s).unwrap();
        assert_eq!(s.probabilities()[1], 1.0);
    }

    fn random_state(qubits: usize, seed: u64) -> StateVector<f64> {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut s = StateVector::<f64>::new(qubits, 24).unwrap();
        let amps = s.amplitudes_mut();
        for a in amps.iter_mut() {
            *a = num_complex::Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        let n: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|a| *a /= n);
        s
    }

    proptest! {
        #[test]
        fn oracle_is_an_involution(x in 0u64..256, seed in any::<u64>(), phase in any::<bool>()) {
            let l = ParallelLayout::for_input(8, 2, 1);
            let x = Bits::from_u64(x, 8);
            let mode = if phase { OracleMode::Phase } else { OracleMode::BitFlip };
            let q = layer(&l, 8, mode);
            let mut s = random_state(l.qubits(), seed);
            let before = s.clone();
            ParallelOracle::new(&x, &q).apply(&mut s).unwrap();
            prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-9);
            ParallelOracle::new(&x, &q).apply(&mut s).unwrap();
            for (a, b) in s.amplitudes().iter().zip(before.amplitudes()) {
                prop_assert!((a - b).norm() < 1e-12);
            }
        }

        #[test]
        fn gates_preserve_norm(seed in any::<u64>(), m in 1usize..=8, q in 0usize..4) {
            let mut s = random_state(4, seed);
            let reg = Register::new(1, 3);
            let gates = [
                Gate::H(q),
                Gate::X(q),
                Gate::HLayer(reg),
                Gate::ControlledHLayer { control: 0, value: seed % 2 == 0, targets: reg },
                Gate::Uniform { reg, m },
                Gate::Diffusion { reg, m },
                Gate::PhaseFn { reg, name: "odd".into(), f: Arc::new(|v| v % 2 == 1) },
            ];
            for g in &gates {
                g.apply(&mut s).unwrap();
                prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-9, "{:?}", g);
            }
        }
    }
}
