//! 2-Adaptive-F: the randomized two-round algorithm, the hard input
//! distribution and its exact best deterministic success.

use super::strategy::{QueryStrategy, Step};
use super::{ClassicalError, Result, Transcript};
use crate::bits::Bits;
use crate::constructions::two_adaptive::{Bicertificate, TwoAdaptive};
use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

/// A one-round randomized algorithm for the inner function.
pub trait OneRoundSolver: Send + Sync {
    fn arity(&self) -> usize;
    /// Most positions a single plan reads.
    fn max_queries(&self) -> usize;
    fn plan(&self, rng: &mut ChaCha8Rng) -> Vec<usize>;
    fn decide(&self, seen: &[bool], rng: &mut ChaCha8Rng) -> bool;
}

/// One uniformly random bit of a Deutsch–Jozsa input: a 1 proves
/// "balanced"; a 0 answers 0 with probability 2/3. Correct with probability
/// 2/3 on every domain point.
#[derive(Debug, Clone, Copy)]
pub struct DjOneQuery {
    n: usize,
}

pub fn dj_one_query_solver(n: usize) -> DjOneQuery {
    DjOneQuery { n }
}

impl OneRoundSolver for DjOneQuery {
    fn arity(&self) -> usize {
        self.n
    }
    fn max_queries(&self) -> usize {
        1
    }
    fn plan(&self, rng: &mut ChaCha8Rng) -> Vec<usize> {
        vec![rng.gen_range(0..self.n)]
    }
    fn decide(&self, seen: &[bool], rng: &mut ChaCha8Rng) -> bool {
        seen[0] || rng.gen_bool(1.0 / 3.0)
    }
}

/// Round 1: `reps` independent solver runs per segment, each reading the
/// whole sub-segments behind the inner bits it plans, plus all of BC.
/// Round 2: the certificate locations of every valid bicertificate, and DT
/// at the majority estimate of TG. Answers DT there if the certificates
/// confirm the estimate, else 0.
pub struct TwoAdaptiveRandStrategy {
    h: TwoAdaptive,
    solver: Arc<dyn OneRoundSolver>,
    reps: usize,
    p: usize,
    rng: ChaCha8Rng,
    /// Per segment, per repetition: planned inner positions.
    plans: Vec<Vec<Vec<usize>>>,
    estimate: Option<usize>,
}

pub fn two_adaptive_rand_algorithm(
    h: &TwoAdaptive,
    solver: Arc<dyn OneRoundSolver>,
    reps: usize,
    p: usize,
    seed: u64,
) -> Result<TwoAdaptiveRandStrategy> {
    let l = &h.layout;
    if solver.arity() != l.f_arity {
        return Err(ClassicalError::BadArgument(format!("solver arity {} vs inner arity {}", solver.arity(), l.f_arity)));
    }
    let per_segment = (reps * solver.max_queries()).min(l.f_arity);
    let round1 = l.bc_len() + l.segments * per_segment * l.sub_len();
    let round2 = l.sub_count() * (l.blocks + l.block_size) + 1;
    let need = round1.max(round2);
    if p < need {
        return Err(ClassicalError::ParallelismTooSmall { need, got: p });
    }
    Ok(TwoAdaptiveRandStrategy {
        h: h.clone(),
        solver,
        reps,
        p,
        rng: ChaCha8Rng::seed_from_u64(seed),
        plans: Vec::new(),
        estimate: None,
    })
}

impl TwoAdaptiveRandStrategy {
    fn bicert(&self, t: &Transcript, i: usize, j: usize) -> Option<Bicertificate> {
        let l = &self.h.layout;
        let start = l.bc_start(i, j);
        let bits = Bits::from_bools(&(0..l.bc_sub_len()).map(|b| t.lookup(start + b) == Some(1)).collect::<Vec<_>>());
        Bicertificate::decode(&bits, l)
    }

    fn round_one(&mut self) -> Step {
        let l = self.h.layout;
        let mut q = BTreeSet::new();
        self.plans = (0..l.segments)
            .map(|i| {
                (0..self.reps)
                    .map(|_| {
                        let plan = self.solver.plan(&mut self.rng);
                        for &j in &plan {
                            q.extend(l.add_start(i, j)..l.add_start(i, j) + l.sub_len());
                        }
                        plan
                    })
                    .collect()
            })
            .collect();
        q.extend(l.add_len()..l.add_len() + l.bc_len());
        Step::Query(q.into_iter().collect())
    }

    fn round_two(&mut self, t: &Transcript) -> Step {
        let l = self.h.layout;
        let mut tg = 0usize;
        for i in 0..l.segments {
            let votes = (0..self.reps)
                .filter(|&r| {
                    let seen: Vec<bool> = self.plans[i][r]
                        .iter()
                        .map(|&j| {
                            let sub = Bits::from_bools(
                                &(0..l.sub_len()).map(|b| t.lookup(l.add_start(i, j) + b) == Some(1)).collect::<Vec<_>>(),
                            );
                            self.h.and_or(&sub)
                        })
                        .collect();
                    self.solver.decide(&seen, &mut self.rng)
                })
                .count();
            tg |= ((2 * votes > self.reps) as usize) << i;
        }
        self.estimate = Some(tg);
        let mut q = BTreeSet::new();
        for i in 0..l.segments {
            for j in 0..l.f_arity {
                if let Some(bc) = self.bicert(t, i, j) {
                    let start = l.add_start(i, j);
                    q.extend(bc.zero_part(l.block_size).into_iter().chain(bc.one_part(l.block_size)).map(|x| start + x));
                }
            }
        }
        q.insert(l.dt_bit(tg));
        Step::Query(q.into_iter().collect())
    }

    fn decide(&self, t: &Transcript) -> bool {
        let l = self.h.layout;
        let mut tg = 0usize;
        for i in 0..l.segments {
            let mut z = Bits::zeros(l.f_arity);
            for j in 0..l.f_arity {
                let Some(bc) = self.bicert(t, i, j) else { return false };
                let start = l.add_start(i, j);
                let read = |x: usize| t.lookup(start + x) == Some(1);
                let v = if bc.zero_part(l.block_size).into_iter().all(|x| !read(x)) {
                    false
                } else if bc.one_part(l.block_size).into_iter().all(read) {
                    true
                } else {
                    return false;
                };
                z.set(j, v);
            }
            match self.h.inner().value(&z) {
                Some(b) => tg |= (b as usize) << i,
                None => return false,
            }
        }
        let est = self.estimate.expect("set in round two");
        tg == est && t.lookup(l.dt_bit(est)) == Some(1)
    }
}

impl QueryStrategy for TwoAdaptiveRandStrategy {
    fn parallelism(&self) -> usize {
        self.p
    }
    fn next(&mut self, t: &Transcript) -> Step {
        match t.round_count() {
            0 => self.round_one(),
            1 => self.round_two(t),
            _ => Step::Answer(self.decide(t)),
        }
    }
}

/// Draws from the hard distribution: each `IN[i]` is a uniform 0-input of
/// the inner function with probability 1/2, else a uniform 1-input;
/// bicertificates and DT are uniform.
pub fn two_adaptive_hard_instance(h: &TwoAdaptive, seed: u64) -> Result<Bits> {
    let l = &h.layout;
    let sides = [h.inner().inputs_with_value(false)?, h.inner().inputs_with_value(true)?];
    if sides.iter().any(|s| s.is_empty()) {
        return Err(ClassicalError::BadArgument("inner function is constant".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let in_values: Vec<Bits> = (0..l.segments)
        .map(|_| {
            let side = &sides[rng.gen_bool(0.5) as usize];
            Bits::from_u64(side[rng.gen_range(0..side.len())], l.f_arity)
        })
        .collect();
    let dt = Bits::from_bools(&(0..l.dt_len()).map(|_| rng.gen_bool(0.5)).collect::<Vec<_>>());
    Ok(h.build_instance(&in_values, &dt, rng.gen()))
}

/// Cap on local configurations of one segment.
const CONFIG_CAP: usize = 1 << 16;
/// Cap on the bits of one segment (ADD and BC).
const SEGMENT_BITS_CAP: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Pos {
    Seg(usize, usize),
    Dt(usize),
}

/// Exact per-segment likelihoods under the hard distribution. Segments are
/// independent and identically distributed, so one table serves all.
struct SegmentModel {
    /// (local bits, TG bit, probability).
    configs: Vec<(u64, bool, f64)>,
    cache: HashMap<(u64, u64), [f64; 2]>,
}

impl SegmentModel {
    fn new(h: &TwoAdaptive) -> Result<(Self, usize)> {
        let l = h.layout;
        let local_len = l.f_arity * (l.sub_len() + l.bc_sub_len());
        if local_len > SEGMENT_BITS_CAP {
            return Err(ClassicalError::TooLarge { what: "segment bits", size: local_len, cap: SEGMENT_BITS_CAP });
        }
        let bcs = Bicertificate::all(l.blocks, l.block_size);
        let sides = [h.inner().inputs_with_value(false)?, h.inner().inputs_with_value(true)?];
        let count = (sides[0].len() + sides[1].len()).saturating_mul(bcs.len().saturating_pow(l.f_arity as u32));
        if count > CONFIG_CAP {
            return Err(ClassicalError::TooLarge { what: "segment configurations", size: count, cap: CONFIG_CAP });
        }
        let mut configs = Vec::with_capacity(count);
        for (b, side) in sides.iter().enumerate() {
            for &z in side {
                for picks in (0..l.f_arity).map(|_| 0..bcs.len()).multi_cartesian_product() {
                    let mut bits = 0u64;
                    for (j, &c) in picks.iter().enumerate() {
                        let sub = bcs[c].forced_sub_segment(l.block_size, l.blocks, z >> j & 1 == 1);
                        bits |= sub.to_u64() << (j * l.sub_len());
                        let enc = bcs[c].encode(&l);
                        bits |= enc.to_u64() << (l.f_arity * l.sub_len() + j * l.bc_sub_len());
                    }
                    let prob = 0.5 / side.len() as f64 / (bcs.len() as f64).powi(l.f_arity as i32);
                    configs.push((bits, b == 1, prob));
                }
            }
        }
        Ok((SegmentModel { configs, cache: HashMap::new() }, local_len))
    }

    /// `[P(TG_i = 0, obs), P(TG_i = 1, obs)]` for local observations.
    fn joint(&mut self, mask: u64, val: u64) -> [f64; 2] {
        let configs = &self.configs;
        *self.cache.entry((mask, val)).or_insert_with(|| {
            let mut out = [0.0; 2];
            for &(bits, tg, p) in configs {
                if bits & mask == val {
                    out[tg as usize] += p;
                }
            }
            out
        })
    }
}

struct Expectimax {
    model: SegmentModel,
    segments: usize,
    positions: Vec<Pos>,
    p: usize,
}

impl Expectimax {
    /// `max_b P(out = b, obs)`, with `out = DT[TG]` since the distribution
    /// satisfies every condition.
    fn terminal(&mut self, obs: &[(Pos, bool)]) -> f64 {
        let mut seg = vec![(0u64, 0u64); self.segments];
        let mut cells = Vec::new();
        for &(pos, v) in obs {
            match pos {
                Pos::Seg(i, b) => {
                    seg[i].0 |= 1 << b;
                    seg[i].1 |= (v as u64) << b;
                }
                Pos::Dt(t) => cells.push((t, v)),
            }
        }
        let probs: Vec<[f64; 2]> = seg.iter().map(|&(m, v)| self.model.joint(m, v)).collect();
        let scale = 0.5f64.powi(cells.len() as i32);
        let p_obs = scale * probs.iter().map(|q| q[0] + q[1]).product::<f64>();
        let diff = scale
            * cells
                .iter()
                .map(|&(t, v)| {
                    let prod: f64 = probs.iter().enumerate().map(|(i, q)| q[t >> i & 1]).product();
                    if v {
                        prod
                    } else {
                        -prod
                    }
                })
                .sum::<f64>();
        (p_obs + diff.abs()) / 2.0
    }

    fn value(&mut self, obs: &mut Vec<(Pos, bool)>, rounds: usize) -> f64 {
        if rounds == 0 {
            return self.terminal(obs);
        }
        let free: Vec<Pos> = self.positions.iter().copied().filter(|q| obs.iter().all(|o| o.0 != *q)).collect();
        let mut best = 0.0f64;
        for q in free.into_iter().combinations(self.p) {
            best = best.max(self.answers(obs, &q, rounds - 1));
        }
        best
    }

    fn answers(&mut self, obs: &mut Vec<(Pos, bool)>, q: &[Pos], rounds: usize) -> f64 {
        let mut total = 0.0;
        for a in 0..1usize << q.len() {
            let base = obs.len();
            obs.extend(q.iter().enumerate().map(|(j, &pos)| (pos, a >> j & 1 == 1)));
            total += self.value(obs, rounds);
            obs.truncate(base);
        }
        total
    }

    /// Value of a first round that reads no DT cell, when one round is left:
    /// the best second round reads a single DT cell at the most likely TG,
    /// so the gain is `½·Π_i max_b P(TG_i = b, obs_i)`.
    fn dt_free_first_round(&mut self, q: &[Pos]) -> f64 {
        let mut total = 0.0;
        for a in 0..1usize << q.len() {
            let mut seg = vec![(0u64, 0u64); self.segments];
            for (j, &pos) in q.iter().enumerate() {
                let Pos::Seg(i, b) = pos else { unreachable!("DT-free round") };
                seg[i].0 |= 1 << b;
                seg[i].1 |= ((a >> j & 1) as u64) << b;
            }
            let probs: Vec<[f64; 2]> = seg.iter().map(|&(m, v)| self.model.joint(m, v)).collect();
            let p_obs: f64 = probs.iter().map(|x| x[0] + x[1]).product();
            let best: f64 = probs.iter().map(|x| x[0].max(x[1])).product();
            total += (p_obs + best) / 2.0;
        }
        total
    }
}

/// Exact best success of a deterministic `p`-parallel `k`-round strategy
/// against [`two_adaptive_hard_instance`]'s distribution, for `p ≤ 2` and
/// `k ≤ 2`.
///
/// The output is `DT[TG]`, so with DT cells `T` observed the success is
/// `½ + ½·Σ_obs 2^{−|T|}·|Σ_{t∈T} ±Π_i P(TG_i = t_i, obs_i)|`. First
/// rounds reading DT cells are enumerated up to segment permutations (which
/// act on DT by permuting address bits); DT-free first rounds use the
/// closed form of [`Expectimax::dt_free_first_round`].
pub fn two_adaptive_distributional_success(h: &TwoAdaptive, p: usize, k: usize) -> Result<f64> {
    if p == 0 || p > 2 {
        return Err(ClassicalError::TooLarge { what: "distributional parallelism", size: p, cap: 2 });
    }
    if k > 2 {
        return Err(ClassicalError::TooLarge { what: "distributional rounds", size: k, cap: 2 });
    }
    let (model, local_len) = SegmentModel::new(h)?;
    let s = h.layout.segments;
    let seg_positions: Vec<Pos> = (0..s).flat_map(|i| (0..local_len).map(move |b| Pos::Seg(i, b))).collect();
    let positions: Vec<Pos> = seg_positions.iter().copied().chain((0..1usize << s).map(Pos::Dt)).collect();
    let mut e = Expectimax { model, segments: s, positions, p };
    if k < 2 {
        return Ok(e.value(&mut Vec::new(), k));
    }
    let mut best = 0.0f64;
    for q in seg_positions.iter().copied().combinations(p) {
        best = best.max(e.dt_free_first_round(&q));
    }
    // First rounds with DT cells, one per segment-permutation class.
    let ones = |c: usize| (1usize << c) - 1;
    let mut firsts: Vec<Vec<Pos>> = Vec::new();
    if p == 1 {
        firsts.extend((0..=s).map(|c| vec![Pos::Dt(ones(c))]));
    } else {
        for b in 0..local_len {
            for t0 in 0..2 {
                for c in 0..s {
                    firsts.push(vec![Pos::Seg(0, b), Pos::Dt(t0 | ones(c) << 1)]);
                }
            }
        }
        // Column patterns of (t, t'): n00 segments 00, then n01, n10, n11.
        for n00 in 0..=s {
            for n01 in 0..=s - n00 {
                for n10 in 0..=s - n00 - n01 {
                    let n11 = s - n00 - n01 - n10;
                    if n01 + n10 == 0 {
                        continue;
                    }
                    let t = (ones(n10) << (n00 + n01)) | (ones(n11) << (n00 + n01 + n10));
                    let u = (ones(n01) << n00) | (ones(n11) << (n00 + n01 + n10));
                    firsts.push(vec![Pos::Dt(t), Pos::Dt(u)]);
                }
            }
        }
    }
    for q in firsts {
        best = best.max(e.answers(&mut Vec::new(), &q, 1));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{run_strategy, QuerySource};
    use crate::constructions::dj::make_dj;
    use crate::constructions::two_adaptive::TwoAdaptiveParams;

    fn toy() -> TwoAdaptive {
        TwoAdaptive::new(&make_dj(2).unwrap(), TwoAdaptiveParams::toy()).unwrap()
    }

    fn strategy(h: &TwoAdaptive, seed: u64) -> TwoAdaptiveRandStrategy {
        two_adaptive_rand_algorithm(h, Arc::new(dj_one_query_solver(2)), 9, h.layout.arity(), seed).unwrap()
    }

    #[test]
    fn succeeds_on_hard_instances() {
        let h = toy();
        let f = h.function();
        let trials = 2000;
        let mut ok = 0;
        for seed in 0..trials {
            let x = two_adaptive_hard_instance(&h, seed).unwrap();
            let r = run_strategy(&mut strategy(&h, seed + 1_000_000), QuerySource::Input(&x), &f).unwrap();
            assert_eq!(r.transcript.round_count(), 2);
            ok += r.correct.unwrap() as usize;
        }
        assert!(ok as f64 / trials as f64 >= 0.6, "{ok}/{trials}");
    }

    #[test]
    fn violations_answer_zero() {
        let h = toy();
        let f = h.function();
        let l = h.layout;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for seed in 0..200u64 {
            let mut x = two_adaptive_hard_instance(&h, seed).unwrap();
            // All DT ones, so any 0 answer comes from the violation.
            for t in 0..l.dt_len() {
                x.set(l.dt_bit(t), true);
            }
            match seed % 3 {
                // Invalid bicertificate: a repeated one-part location.
                0 => {
                    let (i, j) = (rng.gen_range(0..l.segments), rng.gen_range(0..l.f_arity));
                    let w = l.loc_bits();
                    let start = l.bc_start(i, j) + l.block_size * w;
                    let first = x.read_uint(start, w);
                    x.write_uint(start + w, w, first);
                }
                // Uncertified: set a zero-part bit of a 0 sub-segment.
                1 => {
                    let ev = h.evaluate_detail(&x);
                    let (i, j) = (0..l.segments)
                        .flat_map(|i| (0..l.f_arity).map(move |j| (i, j)))
                        .find(|&(i, j)| !ev.in_values[i].get(j))
                        .unwrap();
                    let bc = h.bicertificate(&x, i, j).unwrap();
                    let z = bc.zero_part(l.block_size)[0];
                    x.set(l.add_start(i, j) + z, true);
                    // Keep the AND∘OR value 0 by clearing another block.
                    let other = (bc.zero_block + 1) % l.blocks;
                    for b in 0..l.block_size {
                        x.set(l.add_block_start(i, j, other) + b, false);
                    }
                }
                // IN outside the domain: make a segment 11 with valid certificates.
                _ => {
                    let mut ins = h.evaluate_detail(&x).in_values;
                    ins[0] = "11".parse().unwrap();
                    let dt = Bits::ones(l.dt_len());
                    x = h.build_instance(&ins, &dt, seed);
                }
            }
            assert!(!f.evaluate(&x).unwrap(), "seed {seed}");
            let r = run_strategy(&mut strategy(&h, seed), QuerySource::Input(&x), &f).unwrap();
            assert_eq!(r.transcript.answer, Some(false), "seed {seed}");
        }
    }

    #[test]
    fn same_seed_same_transcript() {
        let h = toy();
        let f = h.function();
        let x = two_adaptive_hard_instance(&h, 11).unwrap();
        let a = run_strategy(&mut strategy(&h, 5), QuerySource::Input(&x), &f).unwrap();
        let b = run_strategy(&mut strategy(&h, 5), QuerySource::Input(&x), &f).unwrap();
        assert_eq!(a.transcript, b.transcript);
    }

    #[test]
    fn segment_model_matches_sampling() {
        let h = toy();
        let (mut m, len) = SegmentModel::new(&h).unwrap();
        assert_eq!(m.configs.len(), 192);
        assert_eq!(len, 24);
        let total: f64 = m.configs.iter().map(|c| c.2).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(m.joint(0, 0), [0.5, 0.5]);
        // Every config is consistent with the function's own evaluation.
        let l = h.layout;
        for seed in 0..50 {
            let x = two_adaptive_hard_instance(&h, seed).unwrap();
            let ev = h.evaluate_detail(&x);
            assert!(ev.bicerts_valid && ev.all_certified && ev.tg.is_some());
            let mut local = 0u64;
            for j in 0..l.f_arity {
                local |= h.sub_segment(&x, 0, j).to_u64() << (j * l.sub_len());
                let bc = x.slice(l.bc_start(0, j), l.bc_sub_len()).to_u64();
                local |= bc << (l.f_arity * l.sub_len() + j * l.bc_sub_len());
            }
            let tg0 = ev.tg.unwrap() & 1 == 1;
            assert!(m.configs.iter().any(|&(b, t, _)| b == local && t == tg0));
        }
    }

    #[test]
    fn closed_form_matches_enumeration() {
        let h = toy();
        let (model, len) = SegmentModel::new(&h).unwrap();
        let s = h.layout.segments;
        let positions: Vec<Pos> =
            (0..s).flat_map(|i| (0..len).map(move |b| Pos::Seg(i, b))).chain((0..1 << s).map(Pos::Dt)).collect();
        let mut e = Expectimax { model, segments: s, positions, p: 1 };
        for q in [vec![Pos::Seg(0, 3)], vec![Pos::Seg(2, 17)], vec![Pos::Seg(5, 0)]] {
            let closed = e.dt_free_first_round(&q);
            let full = e.answers(&mut Vec::new(), &q, 1);
            assert!((closed - full).abs() < 1e-12, "{q:?}: {closed} vs {full}");
        }
    }

    #[test]
    fn hard_distribution_keeps_success_near_half() {
        let h = toy();
        assert!((two_adaptive_distributional_success(&h, 2, 0).unwrap() - 0.5).abs() < 1e-12);
        let s1 = two_adaptive_distributional_success(&h, 1, 2).unwrap();
        let s2 = two_adaptive_distributional_success(&h, 2, 2).unwrap();
        assert!(s1 > 0.5 && s1 <= s2 && s2 <= 0.55, "p=1: {s1}, p=2: {s2}");
    }
}
