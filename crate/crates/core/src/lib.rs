//! Parallel query complexity workbench: boolean functions and their
//! measures, function constructions, classical and quantum parallel query
//! algorithms, and adversary lower bounds.

pub mod adversary;
pub mod bits;
pub mod boolfn;
pub mod classical;
pub mod constructions;
pub mod linalg;
pub mod quantum;
pub mod scalar;
pub mod verify;

pub use bits::Bits;
pub use boolfn::BooleanFunction;

pub type AdversaryMatrixF64 = adversary::AdversaryMatrix<f64>;
pub type AdversaryMatrixF32 = adversary::AdversaryMatrix<f32>;
pub type StateVectorF64 = quantum::StateVector<f64>;
pub type StateVectorF32 = quantum::StateVector<f32>;
