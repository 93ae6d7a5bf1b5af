//! Inputs of canonical cheat sheets with many disjoint sensitive blocks.
//!
//! Every address copy is built from `h`-inputs of maximal block sensitivity
//! whose `h`-values spell an in-domain `g`-input, and the indexed cell holds
//! a valid certificate. Flipping an `h`-sensitive block of one `h`-input
//! flips one bit of that copy's `g`-input, after which the copy leaves the
//! domain, changes output (the indexed cell moves to a zero cell), or keeps
//! its output with the stored certificate no longer matching.

use super::cheatsheet::CheatSheet;
use crate::bits::Bits;
use crate::boolfn::{block_sensitivity, max_disjoint_sensitive_blocks, BoolFnError, BooleanFunction, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FlipCase {
    /// The copy's `g`-input leaves the domain.
    OutOfDomain,
    /// `g` changes value, so the indexed cell changes.
    OutputChanged,
    /// `g` keeps its value but the certificate stops matching.
    CertificateBroken,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SensitiveBlock {
    pub positions: Vec<usize>,
    pub copy: usize,
    pub inner_block: usize,
    pub case: FlipCase,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BsWitness {
    pub input: Bits,
    pub blocks: Vec<SensitiveBlock>,
}

/// An `h`-input with value `b` and the largest `bs_x(h)`; ties go to the
/// smallest index.
fn best_h_input(h: &BooleanFunction, b: bool) -> Result<(u64, usize)> {
    let mut best: Option<(u64, usize)> = None;
    for x in h.inputs_with_value(b)? {
        let bs = block_sensitivity(h, Some(&Bits::from_u64(x, h.arity())), None)?;
        if best.is_none_or(|(_, s)| bs > s) {
            best = Some((x, bs));
        }
    }
    best.ok_or_else(|| BoolFnError::ConstructionFailed(format!("h never takes value {}", b as u8)))
}

/// Witness for a canonical cheat sheet, given one in-domain `g`-input per
/// copy. Fails when some required `h`-side has block sensitivity below
/// `min_bs`, or if a listed flip does not drop the output to 0.
pub fn build_block_sensitivity_witness(cs: &CheatSheet, z: &[Bits], min_bs: usize) -> Result<BsWitness> {
    let (g, h) = cs.parts().ok_or_else(|| BoolFnError::ConstructionFailed("needs a canonical cheat sheet".into()))?;
    let (gn, hn) = (g.arity(), h.arity());
    if z.len() != cs.layout.copies {
        return Err(BoolFnError::ArityMismatch { expected: cs.layout.copies, got: z.len() });
    }
    let mut side = [None, None];
    let mut copies = Vec::with_capacity(z.len());
    for zi in z {
        if zi.len() != gn || g.value(zi).is_none() {
            return Err(BoolFnError::ConstructionFailed(format!("g-input {zi} is not in the domain")));
        }
        let mut x = Bits::zeros(gn * hn);
        for j in 0..gn {
            let b = zi.get(j);
            let (hx, bs) = match side[b as usize] {
                Some(v) => v,
                None => *side[b as usize].insert(best_h_input(h, b)?),
            };
            if bs < min_bs {
                return Err(BoolFnError::ConstructionFailed(format!("bs_{}(h) = {bs} is below {min_bs}", b as u8)));
            }
            x.write_uint(j * hn, hn, hx);
        }
        copies.push(x);
    }
    let input = cs.yes_input(&copies)?;
    debug_assert!(cs.evaluate_detail(&input).output);

    let mut blocks = Vec::new();
    for (c, zi) in z.iter().enumerate() {
        for j in 0..gn {
            let local = copies[c].slice(j * hn, hn);
            let mut flipped_z = zi.clone();
            flipped_z.flip(j);
            let case = match g.value(&flipped_z) {
                None => FlipCase::OutOfDomain,
                Some(v) if Some(v) != g.value(zi) => FlipCase::OutputChanged,
                Some(_) => FlipCase::CertificateBroken,
            };
            for mask in max_disjoint_sensitive_blocks(h, &local)? {
                let positions: Vec<usize> =
                    (0..hn).filter(|t| (mask >> t) & 1 == 1).map(|t| cs.layout.copy_start(c) + j * hn + t).collect();
                let mut y = input.clone();
                positions.iter().for_each(|&p| y.flip(p));
                if cs.evaluate_detail(&y).output {
                    return Err(BoolFnError::ConstructionFailed(format!("flipping {positions:?} kept output 1")));
                }
                blocks.push(SensitiveBlock { positions, copy: c, inner_block: j, case });
            }
        }
    }
    Ok(BsWitness { input, blocks })
}

/// Re-checks a witness by flip-and-evaluate: output 1, blocks pairwise
/// disjoint, every flip gives 0.
pub fn verify_witness(f: &BooleanFunction, w: &BsWitness) -> Result<bool> {
    if !f.evaluate(&w.input)? {
        return Ok(false);
    }
    let mut used = vec![false; f.arity()];
    for b in &w.blocks {
        for &p in &b.positions {
            if std::mem::replace(&mut used[p], true) {
                return Ok(false);
            }
        }
        let mut y = w.input.clone();
        b.positions.iter().for_each(|&p| y.flip(p));
        if f.evaluate(&y)? {
            return Ok(false);
        }
    }
    Ok(true)
}
