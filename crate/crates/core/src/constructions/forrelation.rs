//! Forrelation between a sign table and the Walsh–Hadamard transform of
//! another.
//!
//! Input layout for `n`: bits `0..2^n` encode `X`, bits `2^n..2^{n+1}` encode
//! `Y`, with bit 0 meaning `+1` and bit 1 meaning `−1`.

use super::finish;
use crate::bits::Bits;
use crate::boolfn::{BoolFnError, BooleanFunction, GeneratorSpec, Result};
use crate::scalar::Real;

/// NO instances satisfy `|Φ| ≤ FORRELATION_NO_MAX`.
pub const FORRELATION_NO_MAX: f64 = 0.01;
/// YES instances satisfy `Φ ≥ FORRELATION_YES_MIN`.
pub const FORRELATION_YES_MIN: f64 = 0.6;
/// Slack on the promise thresholds so floating rounding cannot drop a point.
const PROMISE_SLACK: f64 = 1e-12;
/// Largest `n` accepted by [`make_forrelation`].
pub const FORRELATION_MAX_N: usize = 20;

/// In-place unnormalized Walsh–Hadamard transform; length must be a power of 2.
pub fn fwht<T: Real>(a: &mut [T]) {
    let n = a.len();
    assert!(n.is_power_of_two(), "transform length must be a power of 2");
    let mut h = 1;
    while h < n {
        for start in (0..n).step_by(2 * h) {
            for i in start..start + h {
                let (u, v) = (a[i], a[i + h]);
                a[i] = u + v;
                a[i + h] = u - v;
            }
        }
        h *= 2;
    }
}

/// `Φ = 2^{-3n/2} Σ_{x,y} X(x) (−1)^{x·y} Y(y)` via one transform of `X`.
pub fn forrelation_value<T: Real>(x: &[T], y: &[T]) -> T {
    assert_eq!(x.len(), y.len());
    let mut hx = x.to_vec();
    fwht(&mut hx);
    let n = x.len().trailing_zeros() as f64;
    let s: T = hx.iter().zip(y).map(|(&a, &b)| a * b).sum();
    s / T::of(2f64.powf(1.5 * n))
}

/// `±1` table from `len` bits starting at `offset`.
pub fn sign_table<T: Real>(bits: &Bits, offset: usize, len: usize) -> Vec<T> {
    (0..len).map(|i| if bits.get(offset + i) { -T::ONE } else { T::ONE }).collect()
}

/// `Φ` of a full Forrelation input of size `2^{n+1}`.
pub fn forrelation_of_input(x: &Bits, n: usize) -> f64 {
    let size = 1usize << n;
    forrelation_value::<f64>(&sign_table(x, 0, size), &sign_table(x, size, size))
}

/// Forrelation input from two `±1` tables.
pub fn forrelation_input(xs: &[i8], ys: &[i8]) -> Bits {
    assert_eq!(xs.len(), ys.len());
    let mut out = Bits::zeros(2 * xs.len());
    for (i, &s) in xs.iter().chain(ys).enumerate() {
        out.set(i, s < 0);
    }
    out
}

pub fn forrelation_promise(phi: f64) -> Option<bool> {
    if phi.abs() <= FORRELATION_NO_MAX + PROMISE_SLACK {
        Some(false)
    } else if phi >= FORRELATION_YES_MIN - PROMISE_SLACK {
        Some(true)
    } else {
        None
    }
}

/// Partial function: 0 when `|Φ| ≤ 1/100`, 1 when `Φ ≥ 3/5`.
pub fn make_forrelation(n: usize) -> Result<BooleanFunction> {
    if n == 0 || n > FORRELATION_MAX_N {
        return Err(BoolFnError::BadParam { name: "n".into(), reason: format!("must lie in 1..={FORRELATION_MAX_N}") });
    }
    let spec = GeneratorSpec::new("forrelation").param("n", n);
    let f = BooleanFunction::generator(2 << n, spec, false, move |x| forrelation_promise(forrelation_of_input(x, n)));
    Ok(finish(f))
}
