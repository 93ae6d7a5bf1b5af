//! Adversary matrices in bipartite form: rows are 0-inputs, columns are
//! 1-inputs. The symmetric `|D| × |D|` form is `[[0, Γ], [Γᵀ, 0]]` and has
//! the same norm.

use super::{AdversaryError, Result};
use crate::bits::Bits;
use crate::boolfn::{BooleanFunction, Restriction, SPECTRAL_CAP};
use crate::linalg::{spectral_norm, SparseMatrix};
use crate::scalar::Real;
use std::collections::HashMap;

#[derive(Debug, Clone, PartialEq)]
pub struct AdversaryMatrix<T: Real> {
    arity: usize,
    zeros: Vec<u64>,
    ones: Vec<u64>,
    matrix: SparseMatrix<T>,
}

impl<T: Real> AdversaryMatrix<T> {
    /// Entries index `zeros × ones`.
    pub fn new(arity: usize, zeros: Vec<u64>, ones: Vec<u64>, entries: impl IntoIterator<Item = (usize, usize, T)>) -> Result<Self> {
        let entries: Vec<_> = entries.into_iter().collect();
        for &(r, c, v) in &entries {
            if r >= zeros.len() || c >= ones.len() {
                return Err(AdversaryError::NotAdversary(format!("entry ({r},{c}) outside {}x{}", zeros.len(), ones.len())));
            }
            if !v.is_finite() {
                return Err(AdversaryError::NotAdversary(format!("entry ({r},{c}) is not finite")));
            }
        }
        let matrix = SparseMatrix::from_triplets(zeros.len(), ones.len(), entries);
        Ok(AdversaryMatrix { arity, zeros, ones, matrix })
    }

    /// From weighted input pairs in either orientation; every pair must be
    /// in the domain with different values. Repeated pairs add up.
    pub fn from_pairs(f: &BooleanFunction, pairs: impl IntoIterator<Item = (u64, u64, T)>) -> Result<Self> {
        let (zeros, ones) = split_domain(f)?;
        let (zi, oi) = (index_of(&zeros), index_of(&ones));
        let mut entries = Vec::new();
        for (x, y, w) in pairs {
            let (r, c) = match (zi.get(&x), oi.get(&y), zi.get(&y), oi.get(&x)) {
                (Some(&r), Some(&c), _, _) | (_, _, Some(&r), Some(&c)) => (r, c),
                _ => {
                    return Err(AdversaryError::NotAdversary(format!(
                        "pair ({x:#x}, {y:#x}) is not a 0-input/1-input pair of {}",
                        f.name()
                    )))
                }
            };
            entries.push((r, c, w));
        }
        Self::new(f.arity(), zeros, ones, entries)
    }

    /// `A_f` on the domain: weight 1 on every sensitive edge.
    pub fn adjacency(f: &BooleanFunction) -> Result<Self> {
        let (zeros, ones) = split_domain(f)?;
        let oi = index_of(&ones);
        let entries = zeros
            .iter()
            .enumerate()
            .flat_map(|(r, &x)| (0..f.arity()).map(move |i| (r, x ^ (1 << i))))
            .filter_map(|(r, y)| oi.get(&y).map(|&c| (r, c, T::ONE)))
            .collect::<Vec<_>>();
        Self::new(f.arity(), zeros, ones, entries)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn zeros(&self) -> &[u64] {
        &self.zeros
    }

    pub fn ones(&self) -> &[u64] {
        &self.ones
    }

    pub fn matrix(&self) -> &SparseMatrix<T> {
        &self.matrix
    }

    pub fn nnz(&self) -> usize {
        self.matrix.nnz()
    }

    /// Nonzero entries as `(0-input, 1-input, weight)`.
    pub fn pairs(&self) -> impl Iterator<Item = (u64, u64, T)> + '_ {
        self.matrix.triplets().map(|(r, c, v)| (self.zeros[r], self.ones[c], v))
    }

    /// Symmetric-form entry `Γ[x, y]`.
    pub fn entry(&self, x: u64, y: u64) -> T {
        let find = |a: &[u64], v: u64| a.binary_search(&v).ok();
        match (find(&self.zeros, x), find(&self.ones, y), find(&self.zeros, y), find(&self.ones, x)) {
            (Some(r), Some(c), _, _) | (_, _, Some(r), Some(c)) => self.matrix.get(r, c),
            _ => T::ZERO,
        }
    }

    pub fn norm(&self) -> Result<T> {
        Ok(spectral_norm(&self.matrix)?)
    }

    /// `Γ_S`: entries with `x_S ≠ y_S`, `S` given as a mask.
    pub fn restrict_to(&self, s: u64) -> Self {
        let matrix = self.matrix.filter(|r, c, _| (self.zeros[r] ^ self.ones[c]) & s != 0);
        AdversaryMatrix { arity: self.arity, zeros: self.zeros.clone(), ones: self.ones.clone(), matrix }
    }

    pub fn is_nearest_neighbor(&self) -> bool {
        self.pairs().all(|(x, y, _)| (x ^ y).count_ones() == 1)
    }

    /// `row-input-hex,col-input-hex,weight` per nonzero entry, rows being
    /// 0-inputs.
    pub fn to_csv(&self) -> String {
        let hex = |v: u64| Bits::from_u64(v, self.arity).to_hex();
        let mut out = String::from("row,col,weight\n");
        for (x, y, w) in self.pairs() {
            out.push_str(&format!("{},{},{}\n", hex(x), hex(y), w));
        }
        out
    }
}

/// `Γ_S` for an index set.
pub fn gamma_s<T: Real>(g: &AdversaryMatrix<T>, s: &[usize]) -> AdversaryMatrix<T> {
    g.restrict_to(s.iter().fold(0u64, |m, &i| m | 1 << i))
}

pub fn split_domain(f: &BooleanFunction) -> Result<(Vec<u64>, Vec<u64>)> {
    if f.arity() > SPECTRAL_CAP {
        return Err(AdversaryError::TooLarge { what: "adversary matrix arity", size: f.arity(), cap: SPECTRAL_CAP });
    }
    let points = f.points()?;
    let side = |b: bool| points.iter().filter(|p| p.1 == b).map(|p| p.0).collect::<Vec<_>>();
    Ok((side(false), side(true)))
}

fn index_of(v: &[u64]) -> HashMap<u64, usize> {
    v.iter().enumerate().map(|(i, &x)| (x, i)).collect()
}

/// An adversary matrix supported on Hamming-distance-1 pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct NnAdversary<T: Real>(AdversaryMatrix<T>);

/// One diagonal block of `Γ_S`: the `2^p × 2^p` symmetric matrix on the
/// completions of one assignment to the complement of `S`, indexed by the
/// free bits in `restriction.free` order.
#[derive(Debug, Clone)]
pub struct Block<T: Real> {
    pub matrix: SparseMatrix<T>,
    pub restriction: Restriction,
}

impl<T: Real> NnAdversary<T> {
    pub fn new(g: AdversaryMatrix<T>) -> Result<Self> {
        if !g.is_nearest_neighbor() {
            return Err(AdversaryError::NotNearestNeighbor);
        }
        Ok(NnAdversary(g))
    }

    pub fn matrix(&self) -> &AdversaryMatrix<T> {
        &self.0
    }

    /// Splits `Γ_S` into `2^{N−p}` blocks, one per assignment of the
    /// complement (in increasing order), each checked to be an adversary
    /// matrix for its restriction of `f`.
    pub fn block_decompose(&self, f: &BooleanFunction, s: &[usize]) -> Result<Vec<Block<T>>> {
        let n = self.0.arity;
        if f.arity() != n {
            return Err(AdversaryError::BadArgument(format!("function arity {} vs matrix arity {n}", f.arity())));
        }
        let mut free = s.to_vec();
        free.sort_unstable();
        free.dedup();
        let s_mask = free.iter().fold(0u64, |m, &i| m | 1 << i);
        let rest: Vec<usize> = (0..n).filter(|i| s_mask >> i & 1 == 0).collect();
        // Local coordinates of an input: (assignment index, free-bit index).
        let local = |x: u64| {
            let a = rest.iter().enumerate().fold(0usize, |acc, (t, &i)| acc | ((x >> i & 1) as usize) << t);
            let z = free.iter().enumerate().fold(0usize, |acc, (j, &i)| acc | ((x >> i & 1) as usize) << j);
            (a, z)
        };
        let mut trips: Vec<Vec<(usize, usize, T)>> = vec![Vec::new(); 1 << rest.len()];
        for (x, y, w) in self.0.pairs() {
            if (x ^ y) & s_mask == 0 {
                continue;
            }
            let ((a, zx), (b, zy)) = (local(x), local(y));
            debug_assert_eq!(a, b, "a nearest-neighbor pair differing inside S shares its assignment");
            trips[a].push((zx, zy, w));
            trips[a].push((zy, zx, w));
        }
        let size = 1usize << free.len();
        trips
            .into_iter()
            .enumerate()
            .map(|(a, t)| {
                let fixed: Vec<(usize, bool)> = rest.iter().enumerate().map(|(k, &i)| (i, a >> k & 1 == 1)).collect();
                let restriction = Restriction::new(f, &free, &fixed)?;
                let g = restriction.function();
                for &(z, z2, _) in &t {
                    match (g.value_at(z as u64), g.value_at(z2 as u64)) {
                        (Some(u), Some(v)) if u != v => {}
                        _ => return Err(AdversaryError::NotAdversary(format!("block {a} entry ({z},{z2}) joins equal values"))),
                    }
                }
                Ok(Block { matrix: SparseMatrix::from_triplets(size, size, t), restriction })
            })
            .collect()
    }
}

/// Symmetric-form entries `(x, y, w)` of `Γ_S` rebuilt from its blocks.
pub fn reassemble_blocks<T: Real>(blocks: &[Block<T>]) -> Vec<(u64, u64, T)> {
    let mut out: Vec<(u64, u64, T)> = blocks
        .iter()
        .flat_map(|b| b.matrix.triplets().map(|(z, z2, w)| (b.restriction.complete_index(z as u64), b.restriction.complete_index(z2 as u64), w)))
        .collect();
    out.sort_by_key(|a| (a.0, a.1));
    out
}
