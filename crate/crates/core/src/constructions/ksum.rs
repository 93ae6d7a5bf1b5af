//! k-SUM, Block k-SUM and their composition.
//!
//! A block's bits are read as a little-endian unsigned integer reduced modulo
//! the modulus.

use super::finish;
use crate::bits::Bits;
use crate::boolfn::{BlockMeta, BoolFnError, BooleanFunction, GeneratorSpec, Result};

fn bad(name: &str, reason: impl Into<String>) -> BoolFnError {
    BoolFnError::BadParam { name: name.into(), reason: reason.into() }
}

fn check_common(blocks: usize, k: usize, block_bits: usize, modulus: u64) -> Result<()> {
    if blocks == 0 {
        return Err(bad("blocks", "must be positive"));
    }
    if k == 0 || k > blocks {
        return Err(bad("k", format!("must lie in 1..={blocks}")));
    }
    if block_bits == 0 || block_bits > 63 {
        return Err(bad("block-bits", "must lie in 1..=63"));
    }
    if modulus < 2 {
        return Err(bad("modulus", "must be at least 2"));
    }
    Ok(())
}

pub fn block_value(x: &Bits, block: usize, block_bits: usize, modulus: u64) -> u64 {
    x.read_uint(block * block_bits, block_bits) % modulus
}

/// Whether some `k` of `values` (distinct positions) sum to 0 mod `modulus`.
///
/// `reach[j]` is the set of residues attainable with exactly `j` picks among
/// the values seen so far.
pub fn has_zero_ksum(values: &[u64], k: usize, modulus: u64) -> bool {
    if k > values.len() {
        return false;
    }
    let m = modulus as usize;
    let mut reach = vec![vec![false; m]; k + 1];
    reach[0][0] = true;
    for &v in values {
        for j in (1..=k).rev() {
            let (lo, hi) = reach.split_at_mut(j);
            for r in 0..m {
                if lo[j - 1][r] {
                    hi[0][(r + v as usize) % m] = true;
                }
            }
        }
    }
    reach[k][0]
}

fn ksum_eval(x: &Bits, offset: usize, blocks: usize, k: usize, block_bits: usize, modulus: u64) -> bool {
    let values: Vec<u64> =
        (0..blocks).map(|b| x.read_uint(offset + b * block_bits, block_bits) % modulus).collect();
    has_zero_ksum(&values, k, modulus)
}

pub fn make_ksum(blocks: usize, k: usize, block_bits: usize, modulus: u64) -> Result<BooleanFunction> {
    check_common(blocks, k, block_bits, modulus)?;
    let spec = GeneratorSpec::new("ksum")
        .param("blocks", blocks)
        .param("k", k)
        .param("block-bits", block_bits)
        .param("modulus", modulus);
    let f = BooleanFunction::generator(blocks * block_bits, spec, true, move |x| {
        Some(ksum_eval(x, 0, blocks, k, block_bits, modulus))
    });
    Ok(finish(f).with_block_meta(BlockMeta { block_bits, block_count: blocks }))
}

fn block_ksum_eval(x: &Bits, blocks: usize, k: usize, block_bits: usize, modulus: u64) -> bool {
    let half = block_bits / 2;
    let mut balanced = Vec::new();
    for b in 0..blocks {
        let w = x.slice(b * block_bits, block_bits).count_ones();
        if w == half {
            balanced.push(x.read_uint(b * block_bits, block_bits) % modulus);
        } else if w < half {
            return false;
        }
    }
    has_zero_ksum(&balanced, k, modulus)
}

/// 1 iff some `k` balanced blocks (equal ones and zeros) sum to 0 and every
/// unbalanced block has more ones than zeros.
pub fn make_block_ksum(blocks: usize, k: usize, block_bits: usize, modulus: u64) -> Result<BooleanFunction> {
    check_common(blocks, k, block_bits, modulus)?;
    if !block_bits.is_multiple_of(2) {
        return Err(bad("block-bits", "must be even"));
    }
    let spec = GeneratorSpec::new("block-ksum")
        .param("blocks", blocks)
        .param("k", k)
        .param("block-bits", block_bits)
        .param("modulus", modulus);
    let f = BooleanFunction::generator(blocks * block_bits, spec, true, move |x| {
        Some(block_ksum_eval(x, blocks, k, block_bits, modulus))
    });
    Ok(finish(f).with_block_meta(BlockMeta { block_bits, block_count: blocks }))
}

/// Parameters of Block-k-SUM ∘ k-SUM. The outer function reads one bit per
/// inner k-SUM instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BkkParams {
    pub k: usize,
    pub outer_blocks: usize,
    pub outer_block_bits: usize,
    pub outer_modulus: u64,
    pub inner_blocks: usize,
    pub inner_block_bits: usize,
    pub inner_modulus: u64,
}

impl BkkParams {
    /// Desk-scale instance: `n` outer blocks of 2 bits, each bit an inner
    /// 2-SUM over `n` blocks of 2 bits, all mod 4. `n = 2` gives 16 bits.
    pub fn desk(n: usize) -> Self {
        BkkParams {
            k: 2,
            outer_blocks: n,
            outer_block_bits: 2,
            outer_modulus: 4,
            inner_blocks: n,
            inner_block_bits: 2,
            inner_modulus: 4,
        }
    }

    pub fn inner_arity(&self) -> usize {
        self.inner_blocks * self.inner_block_bits
    }

    pub fn outer_arity(&self) -> usize {
        self.outer_blocks * self.outer_block_bits
    }
}

pub fn make_bkk(p: BkkParams) -> Result<BooleanFunction> {
    check_common(p.outer_blocks, p.k, p.outer_block_bits, p.outer_modulus)?;
    check_common(p.inner_blocks, p.k, p.inner_block_bits, p.inner_modulus)?;
    if !p.outer_block_bits.is_multiple_of(2) {
        return Err(bad("outer-block-bits", "must be even"));
    }
    let spec = GeneratorSpec::new("bkk")
        .param("k", p.k)
        .param("outer-blocks", p.outer_blocks)
        .param("outer-block-bits", p.outer_block_bits)
        .param("outer-modulus", p.outer_modulus)
        .param("inner-blocks", p.inner_blocks)
        .param("inner-block-bits", p.inner_block_bits)
        .param("inner-modulus", p.inner_modulus);
    let (ni, no) = (p.inner_arity(), p.outer_arity());
    let f = BooleanFunction::generator(ni * no, spec, true, move |x| {
        let mut outer = Bits::zeros(no);
        for t in 0..no {
            outer.set(t, ksum_eval(x, t * ni, p.inner_blocks, p.k, p.inner_block_bits, p.inner_modulus));
        }
        Some(block_ksum_eval(&outer, p.outer_blocks, p.k, p.outer_block_bits, p.outer_modulus))
    });
    Ok(finish(f))
}
