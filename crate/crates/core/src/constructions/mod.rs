//! Builders for every function family of the workbench, plus certificates,
//! cheat-sheet and 2-Adaptive layouts and their instance builders.

pub mod basic;
pub mod certificate;
pub mod cheatsheet;
pub mod cor;
pub mod dj;
pub mod forrelation;
pub mod ksum;
pub mod pointer;
pub mod registry;
pub mod two_adaptive;
pub mod witness;

pub use basic::{and, and_or, constant, maj, or, parity, threshold};
pub use certificate::{CertChecker, Certificate, CompositionCertChecker, ExhaustiveChecker};
pub use cheatsheet::{
    make_canonical_cheatsheet, make_cheatsheet, CanonicalParams, CheatSheet, CheatSheetEval, CheatSheetLayout, INPUT_SUITE_ADDRESS_CAP,
};
pub use cor::{make_ana, make_cor, AnaKind, AnaParams};
pub use dj::make_dj;
pub use forrelation::{forrelation_of_input, forrelation_value, fwht, make_forrelation};
pub use ksum::{make_bkk, make_block_ksum, make_ksum, BkkParams};
pub use pointer::{follow_pointer, make_pointer, parity_reduction_instance, pointer_input};
pub use registry::{build_generator, GENERATORS};
pub use two_adaptive::{
    build_two_adaptive_instance, make_two_adaptive, Bicertificate, TwoAdaptive, TwoAdaptiveEval, TwoAdaptiveLayout,
    TwoAdaptiveParams,
};
pub use witness::{build_block_sensitivity_witness, verify_witness, BsWitness, FlipCase, SensitiveBlock};

use crate::boolfn::BooleanFunction;

/// Builders return table-backed functions up to this arity.
pub const EAGER_TABLE_ARITY: usize = 16;

fn finish(f: BooleanFunction) -> BooleanFunction {
    if f.arity() <= EAGER_TABLE_ARITY {
        f.materialize().expect("within the table cap")
    } else {
        f
    }
}
