//! Statevector simulation of p-parallel quantum query algorithms, the
//! quantum upper-bound programs, and hybrids mixing quantum and classical
//! rounds.

mod algorithms;
mod hybrid;
mod program;
mod state;

pub use crate::constructions::parity_reduction_instance;
pub use algorithms::{
    ana_quantum_program, dj_program, forrelation_program, grover_candidates, grover_parallel, grover_success,
    parity_parallel_program, single_bit_program, ParityProgram, FORRELATION_VOTE_THRESHOLD,
};
pub use hybrid::{cheatsheet_quantum_3round, two_adaptive_quantum, two_adaptive_quantum_width, QuantumInnerStrategy, QuantumSolver};
pub use program::{
    run_program, run_program_with, AcceptRule, Gate, OracleMode, ParallelOracle, ProgramRun, QuantumRoundProgram, QueryLayer,
    QuerySlot, TraceEntry, ValueFn,
};
pub use state::{index_width, ParallelLayout, Register, StateVector, DEFAULT_QUBIT_CAP};

use crate::boolfn::BoolFnError;
use crate::classical::ClassicalError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuantumError {
    #[error("{qubits} qubits exceed the cap of {cap}")]
    CapExceeded { qubits: usize, cap: usize },
    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),
    #[error("needs parallelism {need}, got {got}")]
    ParallelismTooSmall { need: usize, got: usize },
    #[error("{0}")]
    BadArgument(String),
    #[error(transparent)]
    BoolFn(#[from] BoolFnError),
    #[error(transparent)]
    Classical(#[from] ClassicalError),
}

pub type Result<T> = std::result::Result<T, QuantumError>;
