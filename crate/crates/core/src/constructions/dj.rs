use super::finish;
use crate::boolfn::{BoolFnError, BooleanFunction, GeneratorSpec, Result};

/// Deutsch–Jozsa promise: 0 on the all-zero string, 1 on strings of weight
/// `n/2`, undefined elsewhere.
pub fn make_dj(n: usize) -> Result<BooleanFunction> {
    if n == 0 || !n.is_multiple_of(2) {
        return Err(BoolFnError::BadParam { name: "n".into(), reason: "must be positive and even".into() });
    }
    let f = BooleanFunction::generator(n, GeneratorSpec::new("dj").param("n", n), false, move |x| match x.count_ones() {
        0 => Some(false),
        w if 2 * w == n => Some(true),
        _ => None,
    });
    Ok(finish(f))
}
