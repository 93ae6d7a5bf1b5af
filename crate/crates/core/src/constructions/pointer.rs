//! Pointer chasing over `N = 2^n` blocks of `n` bits; block `i` holds the
//! little-endian label `X(i)`.

use super::finish;
use crate::bits::Bits;
use crate::boolfn::{BlockMeta, BoolFnError, BooleanFunction, GeneratorSpec, Result};

pub fn pointer_label_bits(n_blocks: usize) -> usize {
    n_blocks.trailing_zeros() as usize
}

/// `X^hops(start)`.
pub fn follow_pointer(x: &Bits, n_blocks: usize, start: usize, hops: usize) -> usize {
    let w = pointer_label_bits(n_blocks);
    (0..hops).fold(start, |at, _| x.read_uint(at * w, w) as usize)
}

/// Input whose block `i` points to `map[i]`.
pub fn pointer_input(map: &[usize]) -> Bits {
    let n = map.len();
    assert!(n.is_power_of_two() && n >= 2);
    let w = pointer_label_bits(n);
    let mut x = Bits::zeros(n * w);
    for (i, &t) in map.iter().enumerate() {
        assert!(t < n);
        x.write_uint(i * w, w, t as u64);
    }
    x
}

/// Last bit of `X^k(0)`.
pub fn make_pointer(n_blocks: usize, k: usize) -> Result<BooleanFunction> {
    if n_blocks < 2 || !n_blocks.is_power_of_two() {
        return Err(BoolFnError::BadParam { name: "n".into(), reason: "block count must be a power of 2, at least 2".into() });
    }
    let w = pointer_label_bits(n_blocks);
    let spec = GeneratorSpec::new("pointer").param("n", n_blocks).param("k", k);
    let f = BooleanFunction::generator(n_blocks * w, spec, true, move |x| Some(follow_pointer(x, n_blocks, 0, k) & 1 == 1));
    Ok(finish(f).with_block_meta(BlockMeta { block_bits: w, block_count: n_blocks }))
}

/// Pointer input whose chain from 0 encodes the parity of `x`: node `2i` and
/// `2i+1` lead to `2i+2` and `2i+3`, swapped when `x_i = 1`, so after
/// `|x|` hops the label's last bit is the parity. Remaining blocks point to 0.
pub fn parity_reduction_instance(x: &Bits, n_blocks: usize) -> Result<Bits> {
    let half = x.len();
    if n_blocks < 2 * half + 2 || !n_blocks.is_power_of_two() {
        return Err(BoolFnError::BadParam {
            name: "n".into(),
            reason: format!("need a power of 2 with at least {} blocks", 2 * half + 2),
        });
    }
    let mut map = vec![0usize; n_blocks];
    for i in 0..half {
        let (even, odd) = (2 * i + 2, 2 * i + 3);
        if x.get(i) {
            map[2 * i] = odd;
            map[2 * i + 1] = even;
        } else {
            map[2 * i] = even;
            map[2 * i + 1] = odd;
        }
    }
    Ok(pointer_input(&map))
}
