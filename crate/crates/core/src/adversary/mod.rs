//! Parallel adversary lower bounds: witness matrices, their restriction
//! to index sets, and the bounds built from them.

mod bounds;
mod matrix;
mod read_once;

pub use bounds::{
    barrier_bound, comb_adv_bound, comb_adv_bound_with, nn_lower_bound, nn_lower_bound_with, parallel_adv_ratio,
    parallel_adv_ratio_with, symmetric_adversary, symmetric_bound_formula, tensor_adversary, weight_profile, AdvRatio,
    CombBound, NnBound, RelationWeights, SetSearch, SymmetricAdversary, EXACT_SET_CAP,
};
pub use matrix::{gamma_s, reassemble_blocks, split_domain, AdversaryMatrix, Block, NnAdversary};
pub use read_once::{read_once_restrict, ReadOnceFormula};

use crate::boolfn::BoolFnError;
use crate::linalg::LinalgError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AdversaryError {
    #[error("not an adversary matrix: {0}")]
    NotAdversary(String),
    #[error("weights sit on pairs at Hamming distance other than 1")]
    NotNearestNeighbor,
    #[error("the relation is empty")]
    EmptyRelation,
    #[error("the function is constant")]
    ConstantFunction,
    #[error("the function is not symmetric")]
    NotSymmetric,
    #[error("{what} {size} exceeds the cap of {cap}")]
    TooLarge { what: &'static str, size: usize, cap: usize },
    #[error("{0}")]
    BadArgument(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    BoolFn(#[from] BoolFnError),
}

pub type Result<T> = std::result::Result<T, AdversaryError>;
