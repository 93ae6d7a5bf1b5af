use super::finish;
use crate::bits::Bits;
use crate::boolfn::{BlockMeta, BoolFnError, BooleanFunction, GeneratorSpec, Result};

fn total(arity: usize, spec: GeneratorSpec, f: impl Fn(&Bits) -> bool + Send + Sync + 'static) -> BooleanFunction {
    finish(BooleanFunction::generator(arity, spec, true, move |x| Some(f(x))))
}

fn positive(name: &str, n: usize) -> Result<()> {
    if n == 0 {
        return Err(BoolFnError::BadParam { name: name.into(), reason: "must be positive".into() });
    }
    Ok(())
}

pub fn and(n: usize) -> Result<BooleanFunction> {
    positive("n", n)?;
    Ok(total(n, GeneratorSpec::new("and").param("n", n), move |x| x.count_ones() == n))
}

pub fn or(n: usize) -> Result<BooleanFunction> {
    positive("n", n)?;
    Ok(total(n, GeneratorSpec::new("or").param("n", n), |x| !x.is_zero()))
}

pub fn parity(n: usize) -> Result<BooleanFunction> {
    positive("n", n)?;
    Ok(total(n, GeneratorSpec::new("parity").param("n", n), |x| x.count_ones() % 2 == 1))
}

/// Strict majority: more ones than zeros.
pub fn maj(n: usize) -> Result<BooleanFunction> {
    positive("n", n)?;
    Ok(total(n, GeneratorSpec::new("maj").param("n", n), move |x| 2 * x.count_ones() > n))
}

/// 1 iff at least `t` input bits are 1.
pub fn threshold(n: usize, t: usize) -> Result<BooleanFunction> {
    positive("n", n)?;
    if t > n + 1 {
        return Err(BoolFnError::BadParam { name: "t".into(), reason: format!("must be at most n + 1 = {}", n + 1) });
    }
    Ok(total(n, GeneratorSpec::new("threshold").param("n", n).param("t", t), move |x| x.count_ones() >= t))
}

pub fn constant(n: usize, value: bool) -> Result<BooleanFunction> {
    Ok(total(n, GeneratorSpec::new("const").param("n", n).param("value", value as u8), move |_| value))
}

/// AND over `blocks` blocks of the OR of each block's `block_size` bits.
/// Output 1 iff every block contains a 1; an all-zero block certifies 0.
pub fn and_or(blocks: usize, block_size: usize) -> Result<BooleanFunction> {
    positive("blocks", blocks)?;
    positive("block-size", block_size)?;
    let spec = GeneratorSpec::new("and-or").param("blocks", blocks).param("block-size", block_size);
    let f = total(blocks * block_size, spec, move |x| {
        (0..blocks).all(|b| (0..block_size).any(|j| x.get(b * block_size + j)))
    });
    Ok(f.with_block_meta(BlockMeta { block_bits: block_size, block_count: blocks }))
}
