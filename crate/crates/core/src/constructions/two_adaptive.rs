//! The 2-Adaptive-F layout: address (ADD), bicertificate (BC) and data (DT)
//! regions.
//!
//! ADD has `s` segments, each holding `n = arity(f)` sub-segments of
//! `AND_B ∘ OR_W` inputs (`B` blocks of `W` bits). `IN[i,j]` is the AND∘OR
//! value of sub-segment `(i,j)`, `IN[i]` their concatenation, and
//! `TG[i] = f(IN[i])`. `TG` read little-endian (`TG[0]` lowest) addresses one
//! of the `2^s` DT bits. BC stores one bicertificate per sub-segment as
//! `W + B` locations of `⌈log2(B·W)⌉` bits: the zero part (one whole block)
//! then the one part (one location per block).

use super::certificate::Certificate;
use super::{finish, registry};
use crate::bits::Bits;
use crate::boolfn::{BoolFnError, BooleanFunction, GeneratorSpec, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwoAdaptiveParams {
    pub segments: usize,
    pub blocks: usize,
    pub block_size: usize,
}

impl TwoAdaptiveParams {
    /// Asymptotic proportions for base parameter `n`: `3⌈log2 n⌉` segments of
    /// `AND_n ∘ OR_n` sub-segments.
    pub fn full_scale(n: usize) -> Self {
        let log = (usize::BITS - n.saturating_sub(1).leading_zeros()).max(1) as usize;
        TwoAdaptiveParams { segments: 3 * log, blocks: n, block_size: n }
    }

    /// Desk scale: 6 segments (64 DT cells) of 2×2 AND∘OR sub-segments.
    pub fn toy() -> Self {
        TwoAdaptiveParams { segments: 6, blocks: 2, block_size: 2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwoAdaptiveLayout {
    pub f_arity: usize,
    pub segments: usize,
    pub blocks: usize,
    pub block_size: usize,
}

impl TwoAdaptiveLayout {
    pub fn new(f_arity: usize, p: TwoAdaptiveParams) -> Result<Self> {
        let bad = |name: &str, reason: &str| BoolFnError::BadParam { name: name.into(), reason: reason.into() };
        if f_arity == 0 {
            return Err(bad("inner", "needs positive arity"));
        }
        if p.segments == 0 || p.segments > 24 {
            return Err(bad("segments", "must lie in 1..=24"));
        }
        if p.blocks == 0 || p.block_size == 0 {
            return Err(bad("blocks", "blocks and block size must be positive"));
        }
        Ok(TwoAdaptiveLayout { f_arity, segments: p.segments, blocks: p.blocks, block_size: p.block_size })
    }

    pub fn sub_len(&self) -> usize {
        self.blocks * self.block_size
    }

    pub fn sub_count(&self) -> usize {
        self.segments * self.f_arity
    }

    pub fn add_len(&self) -> usize {
        self.sub_count() * self.sub_len()
    }

    pub fn loc_bits(&self) -> usize {
        Certificate::index_bits(self.sub_len())
    }

    pub fn bc_sub_len(&self) -> usize {
        (self.block_size + self.blocks) * self.loc_bits()
    }

    pub fn bc_len(&self) -> usize {
        self.sub_count() * self.bc_sub_len()
    }

    pub fn dt_len(&self) -> usize {
        1 << self.segments
    }

    pub fn arity(&self) -> usize {
        self.add_len() + self.bc_len() + self.dt_len()
    }

    pub fn add_start(&self, i: usize, j: usize) -> usize {
        (i * self.f_arity + j) * self.sub_len()
    }

    pub fn add_block_start(&self, i: usize, j: usize, k: usize) -> usize {
        self.add_start(i, j) + k * self.block_size
    }

    pub fn bc_start(&self, i: usize, j: usize) -> usize {
        self.add_len() + (i * self.f_arity + j) * self.bc_sub_len()
    }

    pub fn dt_start(&self) -> usize {
        self.add_len() + self.bc_len()
    }

    pub fn dt_bit(&self, t: usize) -> usize {
        self.dt_start() + t
    }

    /// CSV with header `region,i,j,k,bit_start,bit_len`; fields that do not
    /// apply are empty.
    pub fn offset_map_csv(&self) -> String {
        let mut out = String::from("region,i,j,k,bit_start,bit_len\n");
        for i in 0..self.segments {
            for j in 0..self.f_arity {
                for k in 0..self.blocks {
                    let _ = writeln!(out, "add,{i},{j},{k},{},{}", self.add_block_start(i, j, k), self.block_size);
                }
            }
        }
        for i in 0..self.segments {
            for j in 0..self.f_arity {
                let _ = writeln!(out, "bc,{i},{j},,{},{}", self.bc_start(i, j), self.bc_sub_len());
            }
        }
        let _ = writeln!(out, "dt,,,,{},{}", self.dt_start(), self.dt_len());
        out
    }
}

/// A zero part (block `zero_block`) and a one part (`picks[k]` within block
/// `k`); locations are sub-segment local.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bicertificate {
    pub zero_block: usize,
    pub picks: Vec<usize>,
}

impl Bicertificate {
    pub fn zero_part(&self, block_size: usize) -> Vec<usize> {
        (0..block_size).map(|l| self.zero_block * block_size + l).collect()
    }

    pub fn one_part(&self, block_size: usize) -> Vec<usize> {
        self.picks.iter().enumerate().map(|(k, &l)| k * block_size + l).collect()
    }

    /// The one location shared by both parts.
    pub fn intersection(&self, block_size: usize) -> usize {
        self.zero_block * block_size + self.picks[self.zero_block]
    }

    /// Every valid bicertificate, `B·W^B` of them, in a fixed order.
    pub fn all(blocks: usize, block_size: usize) -> Vec<Bicertificate> {
        let mut out = Vec::new();
        let combos = block_size.pow(blocks as u32);
        for zero_block in 0..blocks {
            for code in 0..combos {
                let picks = (0..blocks).map(|k| code / block_size.pow(k as u32) % block_size).collect();
                out.push(Bicertificate { zero_block, picks });
            }
        }
        out
    }

    pub fn random(blocks: usize, block_size: usize, rng: &mut impl Rng) -> Bicertificate {
        Bicertificate { zero_block: rng.gen_range(0..blocks), picks: (0..blocks).map(|_| rng.gen_range(0..block_size)).collect() }
    }

    /// Canonical encoding: zero part ascending, then one part in block order.
    pub fn encode(&self, layout: &TwoAdaptiveLayout) -> Bits {
        let w = layout.loc_bits();
        let mut out = Bits::zeros(layout.bc_sub_len());
        let locs = self.zero_part(layout.block_size).into_iter().chain(self.one_part(layout.block_size));
        for (e, loc) in locs.enumerate() {
            out.write_uint(e * w, w, loc as u64);
        }
        out
    }

    /// Accepts the parts in any order; `None` unless the zero part is exactly
    /// one block and the one part has exactly one location per block.
    pub fn decode(bits: &Bits, layout: &TwoAdaptiveLayout) -> Option<Bicertificate> {
        let (w, bw, nb) = (layout.loc_bits(), layout.block_size, layout.blocks);
        let locs: Vec<usize> = (0..bw + nb).map(|e| bits.read_uint(e * w, w) as usize).collect();
        if locs.iter().any(|&l| l >= layout.sub_len()) {
            return None;
        }
        let (zero, one) = locs.split_at(bw);
        let zero_block = zero[0] / bw;
        let mut seen = vec![false; bw];
        for &l in zero {
            if l / bw != zero_block || std::mem::replace(&mut seen[l % bw], true) {
                return None;
            }
        }
        let mut picks = vec![usize::MAX; nb];
        for &l in one {
            let k = l / bw;
            if picks[k] != usize::MAX {
                return None;
            }
            picks[k] = l % bw;
        }
        Some(Bicertificate { zero_block, picks })
    }

    /// `Some(b)` when the sub-segment matches the `b`-certificate part.
    pub fn certified_value(&self, sub: &Bits, block_size: usize) -> Option<bool> {
        if self.zero_part(block_size).into_iter().all(|l| !sub.get(l)) {
            Some(false)
        } else if self.one_part(block_size).into_iter().all(|l| sub.get(l)) {
            Some(true)
        } else {
            None
        }
    }

    /// Sub-segment forced by the bicertificate with `IN = value` at the
    /// intersection point.
    pub fn forced_sub_segment(&self, block_size: usize, blocks: usize, value: bool) -> Bits {
        let mut sub = Bits::zeros(blocks * block_size);
        for l in self.one_part(block_size) {
            sub.set(l, true);
        }
        sub.set(self.intersection(block_size), value);
        sub
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoAdaptiveEval {
    pub bicerts_valid: bool,
    pub all_certified: bool,
    /// `IN[i]` per segment.
    pub in_values: Vec<Bits>,
    pub tg: Option<usize>,
    pub output: bool,
}

#[derive(Clone)]
pub struct TwoAdaptive {
    pub layout: TwoAdaptiveLayout,
    f: BooleanFunction,
    spec: GeneratorSpec,
}

impl TwoAdaptive {
    pub fn new(f: &BooleanFunction, p: TwoAdaptiveParams) -> Result<Self> {
        let layout = TwoAdaptiveLayout::new(f.arity(), p)?;
        let spec = match f.generator_spec() {
            Some(s) => GeneratorSpec::new("two-adaptive").param("inner", registry::to_inline(s)),
            None => GeneratorSpec::new(format!("two-adaptive({})", f.name())),
        }
        .param("segments", p.segments)
        .param("blocks", p.blocks)
        .param("block-size", p.block_size);
        Ok(TwoAdaptive { layout, f: f.fast(), spec })
    }

    pub fn inner(&self) -> &BooleanFunction {
        &self.f
    }

    pub fn sub_segment(&self, x: &Bits, i: usize, j: usize) -> Bits {
        x.slice(self.layout.add_start(i, j), self.layout.sub_len())
    }

    pub fn bicertificate(&self, x: &Bits, i: usize, j: usize) -> Option<Bicertificate> {
        Bicertificate::decode(&x.slice(self.layout.bc_start(i, j), self.layout.bc_sub_len()), &self.layout)
    }

    pub fn and_or(&self, sub: &Bits) -> bool {
        let (b, w) = (self.layout.blocks, self.layout.block_size);
        (0..b).all(|k| (0..w).any(|l| sub.get(k * w + l)))
    }

    pub fn evaluate_detail(&self, x: &Bits) -> TwoAdaptiveEval {
        let l = &self.layout;
        let mut bicerts_valid = true;
        let mut all_certified = true;
        let mut in_values = Vec::with_capacity(l.segments);
        for i in 0..l.segments {
            let mut seg = Bits::zeros(l.f_arity);
            for j in 0..l.f_arity {
                let sub = self.sub_segment(x, i, j);
                let v = self.and_or(&sub);
                seg.set(j, v);
                match self.bicertificate(x, i, j) {
                    None => bicerts_valid = false,
                    Some(bc) => {
                        if bc.certified_value(&sub, l.block_size) != Some(v) {
                            all_certified = false;
                        }
                    }
                }
            }
            in_values.push(seg);
        }
        let tg = in_values
            .iter()
            .enumerate()
            .try_fold(0usize, |acc, (i, z)| self.f.value(z).map(|b| acc | ((b as usize) << i)));
        let output = bicerts_valid && all_certified && tg.is_some_and(|t| x.get(l.dt_bit(t)));
        TwoAdaptiveEval { bicerts_valid, all_certified, in_values, tg, output }
    }

    /// Input whose sub-segments are forced by the given bicertificates
    /// (indexed `i·n + j`), with `IN[i] = in_values[i]` and DT as given.
    pub fn instance_from_parts(&self, in_values: &[Bits], bicerts: &[Bicertificate], dt: &Bits) -> Bits {
        let l = &self.layout;
        assert_eq!(in_values.len(), l.segments);
        assert_eq!(bicerts.len(), l.sub_count());
        assert_eq!(dt.len(), l.dt_len());
        let mut x = Bits::zeros(l.arity());
        for i in 0..l.segments {
            for j in 0..l.f_arity {
                let bc = &bicerts[i * l.f_arity + j];
                x.write_slice(l.add_start(i, j), &bc.forced_sub_segment(l.block_size, l.blocks, in_values[i].get(j)));
                x.write_slice(l.bc_start(i, j), &bc.encode(l));
            }
        }
        x.write_slice(l.dt_start(), dt);
        x
    }

    /// Hard-distribution instance with uniformly random bicertificates drawn
    /// from `ChaCha8Rng::seed_from_u64(seed)`.
    pub fn build_instance(&self, in_values: &[Bits], dt: &Bits, seed: u64) -> Bits {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bicerts: Vec<Bicertificate> =
            (0..self.layout.sub_count()).map(|_| Bicertificate::random(self.layout.blocks, self.layout.block_size, &mut rng)).collect();
        self.instance_from_parts(in_values, &bicerts, dt)
    }

    pub fn function(&self) -> BooleanFunction {
        let me = self.clone();
        let f = BooleanFunction::generator(self.layout.arity(), self.spec.clone(), true, move |x| Some(me.evaluate_detail(x).output));
        let f = finish(f);
        if self.spec.name.contains('(') {
            f.without_spec()
        } else {
            f
        }
    }
}

pub fn make_two_adaptive(f: &BooleanFunction, p: TwoAdaptiveParams) -> Result<BooleanFunction> {
    Ok(TwoAdaptive::new(f, p)?.function())
}

pub fn build_two_adaptive_instance(h: &TwoAdaptive, in_values: &[Bits], dt: &Bits, seed: u64) -> Bits {
    h.build_instance(in_values, dt, seed)
}
