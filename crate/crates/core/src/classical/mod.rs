//! The p-parallel classical query model: running strategies against inputs
//! or adversaries, exact minimax round counts, and the explicit algorithms
//! and adversaries for the separating constructions.

mod cheatsheet;
mod composition;
mod cor;
mod distributional;
mod lift;
mod pointer;
mod solver;
mod strategy;
mod transcript;

pub use cheatsheet::{cheatsheet_det_adversary, cheatsheet_parallel_algorithm, CheatSheetAdversary, CheatSheetStrategy, InnerFactory, Model};
pub use composition::{composition_strategy, CompositionStrategy};
pub use cor::{cor_det_adversary, CorAdversary};
pub use distributional::distributional_success;
pub use lift::{build_ksum_lift, star_query_count, GreedyScanner, KsumLift, RandomScanner, StarStrategy};
pub use pointer::{pointer_adversary, pointer_det_algorithm, PointerAdversary, PointerStrategy};
pub use solver::{exact_parallel_D, Game, Outcome, PointerGame, Solver, SolverStrategy, TableAdversary, TableGame, BIT_SOLVER_CAP, BLOCK_SOLVER_CAP};
pub use strategy::{
    consistent_with, run_strategy, AdaptiveAnswerer, QuerySource, QueryStrategy, ReadAllStrategy, RunRecord, SequentialStrategy, Step,
};
pub use transcript::{Round, Transcript};

use crate::boolfn::BoolFnError;

/// Whether queries address single bits or whole `block_meta` blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Granularity {
    #[default]
    Bit,
    Block,
}

impl std::fmt::Display for Granularity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Granularity::Bit => "bit",
            Granularity::Block => "block",
        })
    }
}

impl std::str::FromStr for Granularity {
    type Err = ClassicalError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bit" => Ok(Granularity::Bit),
            "block" => Ok(Granularity::Block),
            _ => Err(ClassicalError::BadArgument(format!("unknown granularity `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClassicalError {
    #[error("round {round} queried {size} positions with parallelism {p}")]
    StrategyViolation { round: usize, size: usize, p: usize },
    #[error("query index {index} out of range for {positions} positions")]
    IndexOutOfRange { index: usize, positions: usize },
    #[error("answerer budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("parallelism {got} is below the required {need}")]
    ParallelismTooSmall { need: usize, got: usize },
    #[error("{what} needs size ≤ {cap}, got {size}")]
    TooLarge { what: &'static str, size: usize, cap: usize },
    #[error("strategy did not answer within {0} rounds")]
    RoundLimit(usize),
    #[error("{0}")]
    BadArgument(String),
    #[error(transparent)]
    BoolFn(#[from] BoolFnError),
}

pub type Result<T> = std::result::Result<T, ClassicalError>;
mod two_adaptive;
pub use two_adaptive::{
    dj_one_query_solver, two_adaptive_distributional_success, two_adaptive_hard_instance, two_adaptive_rand_algorithm,
    DjOneQuery, OneRoundSolver, TwoAdaptiveRandStrategy,
};
