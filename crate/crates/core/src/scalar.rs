//! Generic real scalars for the numeric parts of the workbench.

use num_traits as nt;
use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Floating point type usable by the eigensolvers, adversary matrices and the
/// statevector simulator.
pub trait Real:
    nt::Float + nt::FloatConst + nt::FromPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    const ZERO: Self;
    const ONE: Self;
    /// Relative residual targeted by the iterative eigensolver.
    const SOLVER_TOLERANCE: Self;

    fn of(x: f64) -> Self;
    fn to_f64_lossy(self) -> f64;
}

macro_rules! impl_real {
    ($f:ty, $tol:expr) => {
        impl Real for $f {
            const ZERO: Self = 0.0;
            const ONE: Self = 1.0;
            const SOLVER_TOLERANCE: Self = $tol;

            #[inline]
            fn of(x: f64) -> Self {
                x as $f
            }

            #[inline]
            fn to_f64_lossy(self) -> f64 {
                self as f64
            }
        }
    };
}

impl_real!(f32, 1e-6);
impl_real!(f64, 1e-12);
