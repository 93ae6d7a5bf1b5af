//! Lower-bound quantities: the parallel adversary ratio of a witness
//! matrix, the nearest-neighbor restriction bound, the combinatorial bound
//! and its certificate barrier, Kronecker witnesses for COR and the
//! symmetric-function witness.

use super::matrix::{AdversaryMatrix, NnAdversary};
use super::{AdversaryError, Result};
use crate::boolfn::{certificate_complexity, masks_of_size, spectral_sensitivity, BooleanFunction, Restriction, Side};
use crate::scalar::Real;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::HashMap;

/// Largest number of index sets (or restrictions) enumerated exactly.
pub const EXACT_SET_CAP: usize = 100_000;

/// How the maximization over `|S| = p` is carried out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SetSearch {
    /// Exact when at most [`EXACT_SET_CAP`] candidates, else 4096 samples
    /// under seed 0.
    #[default]
    Auto,
    Exact,
    /// Heuristic: the maximum over sampled candidates only lower-bounds the
    /// true maximum, so the resulting ratio is not a certified bound.
    Sampled { samples: usize, seed: u64 },
}

const AUTO_SAMPLES: usize = 4096;

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Candidate `p`-subsets as masks and whether they are all of them.
fn candidate_sets(n: usize, p: usize, search: SetSearch, multiplier: usize) -> (Vec<u64>, bool) {
    let total = binomial(n, p).saturating_mul(multiplier);
    let sampled = |samples: usize, seed: u64| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sets = (0..samples).map(|_| sample(&mut rng, n, p).into_iter().fold(0u64, |m, i| m | 1 << i)).collect();
        (sets, false)
    };
    match search {
        SetSearch::Exact => (masks_of_size(n, p).collect(), true),
        SetSearch::Auto if total <= EXACT_SET_CAP => (masks_of_size(n, p).collect(), true),
        SetSearch::Auto => sampled(AUTO_SAMPLES / multiplier.max(1) + 1, 0),
        SetSearch::Sampled { samples, seed } => sampled(samples, seed),
    }
}

fn mask_indices(m: u64) -> Vec<usize> {
    (0..64).filter(|i| m >> i & 1 == 1).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdvRatio<T> {
    /// `‖Γ‖ / max_S ‖Γ_S‖` (0 when `Γ = 0`).
    pub ratio: T,
    pub norm: T,
    pub max_restricted_norm: T,
    pub best_set: Vec<usize>,
    pub sets_examined: usize,
    /// Whether every `p`-subset was examined; otherwise the ratio is
    /// heuristic.
    pub exhaustive: bool,
}

pub fn parallel_adv_ratio<T: Real>(g: &AdversaryMatrix<T>, p: usize) -> Result<AdvRatio<T>> {
    parallel_adv_ratio_with(g, p, SetSearch::Auto)
}

pub fn parallel_adv_ratio_with<T: Real>(g: &AdversaryMatrix<T>, p: usize, search: SetSearch) -> Result<AdvRatio<T>> {
    let n = g.arity();
    let p = p.min(n);
    let norm = g.norm()?;
    let (sets, exhaustive) = candidate_sets(n, p, search, 1);
    let norms: Vec<(T, u64)> = sets.par_iter().map(|&s| Ok((g.restrict_to(s).norm()?, s))).collect::<Result<_>>()?;
    // First maximum in candidate order.
    let (max_norm, best) = norms.iter().fold((T::ZERO, 0u64), |acc, &(v, s)| if v > acc.0 { (v, s) } else { acc });
    let ratio = if max_norm > T::ZERO { norm / max_norm } else { T::ZERO };
    Ok(AdvRatio { ratio, norm, max_restricted_norm: max_norm, best_set: mask_indices(best), sets_examined: sets.len(), exhaustive })
}

#[derive(Debug, Clone)]
pub struct NnBound<T> {
    /// `λ(f) / max_g λ(g)` over `p`-restrictions `g` (0 when `λ(f) = 0`).
    pub bound: T,
    pub lambda: T,
    pub max_restricted_lambda: T,
    pub best: Option<Restriction>,
    pub restrictions_examined: usize,
    pub exhaustive: bool,
}

pub fn nn_lower_bound<T: Real>(f: &BooleanFunction, p: usize) -> Result<NnBound<T>> {
    nn_lower_bound_with(f, p, SetSearch::Auto)
}

/// Restrictions are enumerated per free set; a sampled search samples free
/// sets and keeps every assignment of each.
pub fn nn_lower_bound_with<T: Real>(f: &BooleanFunction, p: usize, search: SetSearch) -> Result<NnBound<T>> {
    let f = f.fast();
    let n = f.arity();
    let p = p.min(n);
    let lambda = spectral_sensitivity::<T>(&f)?;
    let (sets, exhaustive) = candidate_sets(n, p, search, 1 << (n - p));
    let mut cache: HashMap<Vec<Option<bool>>, T> = HashMap::new();
    let (mut best_val, mut best, mut examined) = (T::ZERO, None, 0usize);
    for s in sets {
        let free = mask_indices(s);
        let rest: Vec<usize> = (0..n).filter(|i| s >> i & 1 == 0).collect();
        for a in 0..1u64 << rest.len() {
            let fixed: Vec<(usize, bool)> = rest.iter().enumerate().map(|(t, &i)| (i, a >> t & 1 == 1)).collect();
            let r = Restriction::new(&f, &free, &fixed)?;
            let key: Vec<Option<bool>> = (0..1u64 << p).map(|z| f.value_at(r.complete_index(z))).collect();
            let l = match cache.get(&key) {
                Some(&l) => l,
                None => {
                    let l = spectral_sensitivity::<T>(&r.function())?;
                    cache.insert(key, l);
                    l
                }
            };
            examined += 1;
            if best.is_none() || l > best_val {
                best_val = l;
                best = Some(r);
            }
        }
    }
    let bound = if best_val > T::ZERO { lambda / best_val } else { T::ZERO };
    Ok(NnBound { bound, lambda, max_restricted_lambda: best_val, best, restrictions_examined: examined, exhaustive })
}

/// A 0/1 relation `R ⊆ X × Y` with `f` constant on `X`, constant on `Y`,
/// and different between them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationWeights {
    pub arity: usize,
    pub xs: Vec<u64>,
    pub ys: Vec<u64>,
    /// `(index into xs, index into ys)`, no repeats.
    pub pairs: Vec<(usize, usize)>,
}

impl RelationWeights {
    pub fn new(f: &BooleanFunction, xs: Vec<u64>, ys: Vec<u64>, pairs: Vec<(usize, usize)>) -> Result<Self> {
        let value = |v: u64| f.value_at(v).ok_or_else(|| AdversaryError::NotAdversary(format!("{v:#x} is outside the domain")));
        let (Some(&x0), Some(&y0)) = (xs.first(), ys.first()) else { return Err(AdversaryError::EmptyRelation) };
        let (vx, vy) = (value(x0)?, value(y0)?);
        if vx == vy {
            return Err(AdversaryError::NotAdversary("X and Y share an output".into()));
        }
        for &x in &xs {
            if value(x)? != vx {
                return Err(AdversaryError::NotAdversary(format!("{x:#x} breaks the X output")));
            }
        }
        for &y in &ys {
            if value(y)? != vy {
                return Err(AdversaryError::NotAdversary(format!("{y:#x} breaks the Y output")));
            }
        }
        let mut pairs = pairs;
        pairs.sort_unstable();
        pairs.dedup();
        if pairs.is_empty() {
            return Err(AdversaryError::EmptyRelation);
        }
        if pairs.iter().any(|&(i, j)| i >= xs.len() || j >= ys.len()) {
            return Err(AdversaryError::BadArgument("relation index out of range".into()));
        }
        Ok(RelationWeights { arity: f.arity(), xs, ys, pairs })
    }

    /// `X` and `Y` are the projections of the pairs, oriented by the first
    /// pair.
    pub fn from_relation(f: &BooleanFunction, rel: &[(u64, u64)]) -> Result<Self> {
        let mut xs: Vec<u64> = rel.iter().map(|r| r.0).collect();
        let mut ys: Vec<u64> = rel.iter().map(|r| r.1).collect();
        xs.sort_unstable();
        xs.dedup();
        ys.sort_unstable();
        ys.dedup();
        let pairs =
            rel.iter().map(|&(x, y)| (xs.binary_search(&x).expect("listed"), ys.binary_search(&y).expect("listed"))).collect();
        Self::new(f, xs, ys, pairs)
    }

    pub fn w_x(&self, i: usize) -> usize {
        self.pairs.iter().filter(|p| p.0 == i).count()
    }

    pub fn w_y(&self, j: usize) -> usize {
        self.pairs.iter().filter(|p| p.1 == j).count()
    }

    /// `Σ_y w(x, y)` over `y` with `x_S ≠ y_S`.
    pub fn w_x_s(&self, i: usize, s: u64) -> usize {
        self.pairs.iter().filter(|p| p.0 == i && (self.xs[i] ^ self.ys[p.1]) & s != 0).count()
    }

    pub fn w_y_s(&self, j: usize, s: u64) -> usize {
        self.pairs.iter().filter(|p| p.1 == j && (self.xs[p.0] ^ self.ys[j]) & s != 0).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CombBound {
    /// `√(m·m' / (ℓ·ℓ'))`.
    pub bound: f64,
    pub m: usize,
    pub m_prime: usize,
    pub l: usize,
    pub l_prime: usize,
    pub exhaustive: bool,
}

/// `ℓ` and `ℓ'` are maximized over `|S| = min(p, N)`, which suffices since
/// `w_{x,S}` only grows with `S`.
pub fn comb_adv_bound(rw: &RelationWeights, p: usize) -> Result<CombBound> {
    comb_adv_bound_with(rw, p, SetSearch::Auto)
}

pub fn comb_adv_bound_with(rw: &RelationWeights, p: usize, search: SetSearch) -> Result<CombBound> {
    let n = rw.arity;
    let p = p.min(n);
    let m = (0..rw.xs.len()).map(|i| rw.w_x(i)).min().ok_or(AdversaryError::EmptyRelation)?;
    let m_prime = (0..rw.ys.len()).map(|j| rw.w_y(j)).min().ok_or(AdversaryError::EmptyRelation)?;
    // Per S, ℓ_S = max_x w_{x,S}; count differing pairs in one sweep.
    let (sets, exhaustive) = candidate_sets(n, p, search, 1);
    let (mut l, mut l_prime) = (0usize, 0usize);
    let mut per_x = vec![0usize; rw.xs.len()];
    let mut per_y = vec![0usize; rw.ys.len()];
    for s in sets {
        per_x.iter_mut().for_each(|c| *c = 0);
        per_y.iter_mut().for_each(|c| *c = 0);
        for &(i, j) in &rw.pairs {
            if (rw.xs[i] ^ rw.ys[j]) & s != 0 {
                per_x[i] += 1;
                per_y[j] += 1;
            }
        }
        l = l.max(per_x.iter().copied().max().unwrap_or(0));
        l_prime = l_prime.max(per_y.iter().copied().max().unwrap_or(0));
    }
    let bound = if l == 0 || l_prime == 0 { 0.0 } else { ((m * m_prime) as f64 / (l * l_prime) as f64).sqrt() };
    Ok(CombBound { bound, m, m_prime, l, l_prime, exhaustive })
}

/// `√(⌈C_0/p⌉·⌈C_1/p⌉)`, the most the combinatorial bound can give for a
/// total function.
pub fn barrier_bound(f: &BooleanFunction, p: usize) -> Result<f64> {
    if p == 0 {
        return Err(AdversaryError::BadArgument("p must be positive".into()));
    }
    let c0 = certificate_complexity(f, Side::Zero)?;
    let c1 = certificate_complexity(f, Side::One)?;
    Ok(((c0.div_ceil(p) * c1.div_ceil(p)) as f64).sqrt())
}

/// `Γ_f ⊗ Γ_g` as an adversary matrix for `COR(f, g)`. A COR input is
/// `x ⁀ y` (index `x | y << arity(f)`); row `(x₀, y₀)` is
/// `r_f·|X_g| + r_g` and column `(x₁, y₁)` is `c_f·|Y_g| + c_g`, so rows
/// are exactly COR's 0-inputs and columns its 1-inputs.
pub fn tensor_adversary<T: Real>(gf: &AdversaryMatrix<T>, gg: &AdversaryMatrix<T>) -> Result<AdversaryMatrix<T>> {
    let shift = gf.arity();
    if shift + gg.arity() > 64 {
        return Err(AdversaryError::TooLarge { what: "tensor arity", size: shift + gg.arity(), cap: 64 });
    }
    let join = |a: &[u64], b: &[u64]| a.iter().flat_map(|&x| b.iter().map(move |&y| x | y << shift)).collect::<Vec<_>>();
    let (zeros, ones) = (join(gf.zeros(), gg.zeros()), join(gf.ones(), gg.ones()));
    let (zg, og) = (gg.zeros().len(), gg.ones().len());
    let entries: Vec<(usize, usize, T)> = gf
        .matrix()
        .triplets()
        .flat_map(|(r1, c1, v1)| gg.matrix().triplets().map(move |(r2, c2, v2)| (r1 * zg + r2, c1 * og + c2, v1 * v2)))
        .collect();
    // Row and column lists must be sorted for lookups; reorder consistently.
    sorted(shift + gg.arity(), zeros, ones, entries)
}

fn sorted<T: Real>(arity: usize, zeros: Vec<u64>, ones: Vec<u64>, entries: Vec<(usize, usize, T)>) -> Result<AdversaryMatrix<T>> {
    let order = |v: &[u64]| {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by_key(|&i| v[i]);
        let mut rank = vec![0; v.len()];
        for (k, &i) in idx.iter().enumerate() {
            rank[i] = k;
        }
        (idx.iter().map(|&i| v[i]).collect::<Vec<_>>(), rank)
    };
    let ((zs, zr), (os, or)) = (order(&zeros), order(&ones));
    AdversaryMatrix::new(arity, zs, os, entries.into_iter().map(|(r, c, v)| (zr[r], or[c], v)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricAdversary<T: Real> {
    pub t: usize,
    /// The weights sit at `(N−t−1, N−t)` instead of `(t, t+1)`: the witness
    /// for the complemented function, mapped back.
    pub complemented: bool,
    pub matrix: NnAdversary<T>,
}

/// Weight profile `f_0..f_N` of a symmetric total function.
pub fn weight_profile(f: &BooleanFunction) -> Result<Vec<bool>> {
    let n = f.arity();
    let mut profile: Vec<Option<bool>> = vec![None; n + 1];
    for x in 0..1u64 << n {
        let v = f.value_at(x).ok_or(AdversaryError::NotSymmetric)?;
        let w = x.count_ones() as usize;
        if *profile[w].get_or_insert(v) != v {
            return Err(AdversaryError::NotSymmetric);
        }
    }
    Ok(profile.into_iter().map(|v| v.expect("every weight occurs")).collect())
}

/// `t_f ≤ N/2` closest to `N/2` with `f_t ≠ f_{t+1}` or
/// `f_{N−t} ≠ f_{N−t−1}`, and the weight-`(t, t+1)` nearest-neighbor
/// matrix (on the mirrored weights when only the second condition holds).
pub fn symmetric_adversary<T: Real>(f: &BooleanFunction) -> Result<SymmetricAdversary<T>> {
    let n = f.arity();
    if n > crate::boolfn::SPECTRAL_CAP {
        return Err(AdversaryError::TooLarge { what: "symmetric adversary arity", size: n, cap: crate::boolfn::SPECTRAL_CAP });
    }
    let prof = weight_profile(f)?;
    let low = |t: usize| t < n && prof[t] != prof[t + 1];
    let high = |t: usize| t < n && prof[n - t] != prof[n - t - 1];
    let t = (0..=n / 2).rev().find(|&t| low(t) || high(t)).ok_or(AdversaryError::ConstantFunction)?;
    let complemented = !low(t);
    let lower = if complemented { n - t - 1 } else { t };
    let pairs = (0..1u64 << n)
        .filter(|x| x.count_ones() as usize == lower)
        .flat_map(|x| (0..n).filter(move |i| x >> i & 1 == 0).map(move |i| (x, x | 1 << i, T::ONE)));
    let g = AdversaryMatrix::from_pairs(f, pairs)?;
    Ok(SymmetricAdversary { t, complemented, matrix: NnAdversary::new(g)? })
}

/// `√(N·t/(p·min(p, t)))` with `t` floored at 1, the order of the
/// symmetric-function bound.
pub fn symmetric_bound_formula(n: usize, t: usize, p: usize) -> f64 {
    let t = t.max(1) as f64;
    let p = p.max(1) as f64;
    (n as f64 * t / (p * p.min(t))).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::gamma_s;
    use crate::constructions::{and, and_or, maj, or, parity, threshold};
    use proptest::prelude::*;
    use rand::Rng;

    fn random_total(n: usize, seed: u64) -> BooleanFunction {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let table: Vec<bool> = (0..1 << n).map(|_| rng.gen_bool(0.5)).collect();
        BooleanFunction::from_fn(n, "random", move |x| table[x as usize])
    }

    #[test]
    fn ratio_examples() {
        let f = or(4).unwrap();
        let a = AdversaryMatrix::<f64>::adjacency(&f).unwrap();
        assert!((parallel_adv_ratio(&a, 4).unwrap().ratio - 1.0).abs() < 1e-9);
        let r1 = parallel_adv_ratio(&a, 1).unwrap();
        assert!((r1.ratio - 2.0).abs() < 1e-9 && r1.exhaustive && r1.sets_examined == 4);
        let ao = and_or(2, 2).unwrap();
        let a = AdversaryMatrix::<f64>::adjacency(&ao).unwrap();
        let r = parallel_adv_ratio(&a, 2).unwrap();
        let nn = nn_lower_bound::<f64>(&ao, 2).unwrap();
        assert!(r.ratio >= nn.bound * (1.0 - 1e-9));
    }

    #[test]
    fn nn_bound_examples() {
        let b = nn_lower_bound::<f64>(&or(4).unwrap(), 1).unwrap();
        assert!((b.lambda - 2.0).abs() < 1e-9 && (b.max_restricted_lambda - 1.0).abs() < 1e-9 && (b.bound - 2.0).abs() < 1e-9);
        let b = nn_lower_bound::<f64>(&parity(4).unwrap(), 2).unwrap();
        assert!((b.lambda - 4.0).abs() < 1e-9 && (b.max_restricted_lambda - 2.0).abs() < 1e-9 && (b.bound - 2.0).abs() < 1e-9);
        assert_eq!(b.restrictions_examined, 6 * 4);
        let c = BooleanFunction::from_fn(3, "zero", |_| false);
        assert_eq!(nn_lower_bound::<f64>(&c, 1).unwrap().bound, 0.0);
    }

    #[test]
    fn comb_examples() {
        let f = or(8).unwrap();
        let rel: Vec<(u64, u64)> = (0..8).map(|i| (0, 1 << i)).collect();
        let rw = RelationWeights::from_relation(&f, &rel).unwrap();
        let b = comb_adv_bound(&rw, 2).unwrap();
        assert_eq!((b.m, b.m_prime, b.l, b.l_prime), (8, 1, 2, 1));
        assert!((b.bound - 2.0).abs() < 1e-12);
        assert!((comb_adv_bound(&rw, 8).unwrap().bound - 1.0).abs() < 1e-12);
        let single = RelationWeights::from_relation(&f, &[(0, 1)]).unwrap();
        assert!((comb_adv_bound(&single, 3).unwrap().bound - 1.0).abs() < 1e-12);
        assert_eq!(RelationWeights::from_relation(&f, &[]).unwrap_err(), AdversaryError::EmptyRelation);
        assert!(RelationWeights::from_relation(&f, &[(1, 2)]).is_err());
    }

    #[test]
    fn barrier_examples() {
        assert!((barrier_bound(&and_or(2, 2).unwrap(), 2).unwrap() - 1.0).abs() < 1e-12);
        assert!((barrier_bound(&and(4).unwrap(), 2).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        let f = maj(5).unwrap();
        let c0 = certificate_complexity(&f, Side::Zero).unwrap();
        let c1 = certificate_complexity(&f, Side::One).unwrap();
        assert!((barrier_bound(&f, 1).unwrap() - ((c0 * c1) as f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn barrier_holds_for_every_relation_on_small_functions() {
        // Every relation between the 0- and 1-inputs of every 2-bit function.
        for table in 1..15u64 {
            let f = BooleanFunction::from_fn(2, "t", move |x| table >> x & 1 == 1);
            let zeros: Vec<u64> = (0..4).filter(|&x| table >> x & 1 == 0).collect();
            let ones: Vec<u64> = (0..4).filter(|&x| table >> x & 1 == 1).collect();
            let all: Vec<(u64, u64)> = zeros.iter().flat_map(|&x| ones.iter().map(move |&y| (x, y))).collect();
            for rmask in 1..1u64 << all.len() {
                let rel: Vec<(u64, u64)> = (0..all.len()).filter(|k| rmask >> k & 1 == 1).map(|k| all[k]).collect();
                let rw = RelationWeights::from_relation(&f, &rel).unwrap();
                for p in 1..=2 {
                    let b = comb_adv_bound(&rw, p).unwrap().bound;
                    assert!(b <= barrier_bound(&f, p).unwrap() + 1e-9, "table {table:04b} rel {rmask:b} p {p}");
                }
            }
        }
    }

    #[test]
    fn symmetric_examples() {
        assert_eq!(symmetric_adversary::<f64>(&maj(3).unwrap()).unwrap().t, 1);
        let s = symmetric_adversary::<f64>(&or(4).unwrap()).unwrap();
        assert_eq!((s.t, s.complemented), (0, false));
        let r = parallel_adv_ratio(s.matrix.matrix(), 1).unwrap();
        assert!((r.ratio - 2.0).abs() < 1e-9);
        // AND: only the mirrored condition holds at t = 0.
        let s = symmetric_adversary::<f64>(&and(4).unwrap()).unwrap();
        assert_eq!((s.t, s.complemented), (0, true));
        assert!((s.matrix.matrix().norm().unwrap() - 2.0).abs() < 1e-9);
        // Threshold 2 of 6 flips between weights 1 and 2; threshold 3 flips
        // at the middle, where the mirrored condition picks t = 3.
        assert_eq!(symmetric_adversary::<f64>(&threshold(6, 2).unwrap()).unwrap().t, 1);
        let s = symmetric_adversary::<f64>(&threshold(6, 3).unwrap()).unwrap();
        assert_eq!((s.t, s.complemented), (3, true));
        let c = BooleanFunction::from_fn(3, "one", |_| true);
        assert_eq!(symmetric_adversary::<f64>(&c).unwrap_err(), AdversaryError::ConstantFunction);
        assert_eq!(symmetric_adversary::<f64>(&and_or(2, 2).unwrap()).unwrap_err(), AdversaryError::NotSymmetric);
        assert!((symmetric_bound_formula(16, 0, 4) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn tensor_examples() {
        let (f, g) = (or(2).unwrap(), and(2).unwrap());
        let gf = AdversaryMatrix::<f64>::adjacency(&f).unwrap();
        let gg = AdversaryMatrix::<f64>::adjacency(&g).unwrap();
        let t = tensor_adversary(&gf, &gg).unwrap();
        assert!((t.norm().unwrap() - gf.norm().unwrap() * gg.norm().unwrap()).abs() < 1e-9);
        let cor = crate::constructions::make_cor(&f, &g).unwrap();
        // Rows and columns are COR's 0- and 1-inputs.
        assert!(t.zeros().iter().all(|&z| cor.value_at(z) == Some(false)));
        assert!(t.ones().iter().all(|&z| cor.value_at(z) == Some(true)));
        // (Γf ⊗ Γg)_i = (Γf)_i ⊗ Γg for i in the f part, and Γf ⊗ (Γg)_j in the g part.
        for i in 0..4 {
            let lhs = gamma_s(&t, &[i]);
            let rhs = if i < 2 {
                tensor_adversary(&gamma_s(&gf, &[i]), &gg).unwrap()
            } else {
                tensor_adversary(&gf, &gamma_s(&gg, &[i - 2])).unwrap()
            };
            assert_eq!(lhs.pairs().collect::<Vec<_>>(), rhs.pairs().collect::<Vec<_>>());
        }
    }

    fn min_ratio(g: &AdversaryMatrix<f64>) -> f64 {
        parallel_adv_ratio(g, 1).unwrap().ratio
    }

    #[test]
    fn tensor_min_ratio_is_the_smaller_one() {
        for seed in 0..6 {
            let f = random_total(3, seed);
            let g = random_total(2, seed + 100);
            if f.is_constant().unwrap() || g.is_constant().unwrap() {
                continue;
            }
            let gf = AdversaryMatrix::<f64>::adjacency(&f).unwrap();
            let gg = AdversaryMatrix::<f64>::adjacency(&g).unwrap();
            let t = tensor_adversary(&gf, &gg).unwrap();
            assert!((min_ratio(&t) - min_ratio(&gf).min(min_ratio(&gg))).abs() < 1e-9, "seed {seed}");
        }
    }

    #[test]
    fn adjacency_ratio_at_one_is_lambda() {
        for n in 2..=10 {
            for seed in 0..3 {
                let f = random_total(n, seed * 31 + n as u64);
                if f.is_constant().unwrap() {
                    continue;
                }
                let a = AdversaryMatrix::<f64>::adjacency(&f).unwrap();
                let lambda = spectral_sensitivity::<f64>(&f).unwrap();
                assert!((parallel_adv_ratio(&a, 1).unwrap().ratio - lambda).abs() < 1e-9, "n={n} seed={seed}");
            }
        }
    }

    #[test]
    fn sampled_search_is_flagged() {
        let a = AdversaryMatrix::<f64>::adjacency(&or(6).unwrap()).unwrap();
        let r = parallel_adv_ratio_with(&a, 3, SetSearch::Sampled { samples: 5, seed: 1 }).unwrap();
        assert!(!r.exhaustive && r.sets_examined == 5);
        assert!(r.ratio >= parallel_adv_ratio(&a, 3).unwrap().ratio - 1e-9);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn ratio_is_monotone_and_dominates_nn_bound(n in 2usize..=6, seed in any::<u64>()) {
            let f = random_total(n, seed);
            prop_assume!(!f.is_constant().unwrap());
            let a = AdversaryMatrix::<f64>::adjacency(&f).unwrap();
            let mut prev = f64::INFINITY;
            for p in 1..=n {
                let r = parallel_adv_ratio(&a, p).unwrap().ratio;
                prop_assert!(r <= prev * (1.0 + 1e-9));
                prev = r;
                let nn = nn_lower_bound::<f64>(&f, p).unwrap().bound;
                prop_assert!(nn <= r * (1.0 + 1e-6));
            }
        }

        #[test]
        fn barrier_holds_for_random_relations(n in 2usize..=8, seed in any::<u64>(), p in 1usize..=4) {
            let f = random_total(n, seed);
            prop_assume!(!f.is_constant().unwrap());
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabc);
            let zeros = f.inputs_with_value(false).unwrap();
            let ones = f.inputs_with_value(true).unwrap();
            let rel: Vec<(u64, u64)> = (0..rng.gen_range(1..40))
                .map(|_| (zeros[rng.gen_range(0..zeros.len())], ones[rng.gen_range(0..ones.len())]))
                .collect();
            let rw = RelationWeights::from_relation(&f, &rel).unwrap();
            for i in 0..rw.xs.len() {
                prop_assert!(rw.w_x_s(i, rng.gen()) <= rw.w_x(i));
            }
            prop_assert!(comb_adv_bound(&rw, p).unwrap().bound <= barrier_bound(&f, p).unwrap() + 1e-9);
        }

        #[test]
        fn blocks_rebuild_gamma_s(n in 2usize..=6, seed in any::<u64>(), smask in any::<u64>()) {
            let f = random_total(n, seed);
            let nn = NnAdversary::new(AdversaryMatrix::<f64>::adjacency(&f).unwrap()).unwrap();
            let s: Vec<usize> = (0..n).filter(|i| smask >> i & 1 == 1).collect();
            let blocks = nn.block_decompose(&f, &s).unwrap();
            prop_assert_eq!(blocks.len(), 1 << (n - s.len()));
            let gs = gamma_s(nn.matrix(), &s);
            let mut want: Vec<(u64, u64, f64)> = gs.pairs().flat_map(|(x, y, w)| [(x, y, w), (y, x, w)]).collect();
            want.sort_by_key(|a| (a.0, a.1));
            prop_assert_eq!(crate::adversary::reassemble_blocks(&blocks), want);
        }
    }
}
