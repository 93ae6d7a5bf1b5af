use super::{params, Check, Grid, Recorder, Result, SuiteReport, VerifyError};
use crate::adversary::{
    barrier_bound, comb_adv_bound, gamma_s, parallel_adv_ratio, symmetric_adversary, symmetric_bound_formula, AdversaryMatrix,
    NnAdversary, RelationWeights,
};
use crate::bits::Bits;
use crate::boolfn::{block_sensitivity, masks_of_size, spectral_sensitivity, BooleanFunction};
use crate::classical::{
    build_ksum_lift, cheatsheet_parallel_algorithm, dj_one_query_solver, exact_parallel_D, run_strategy, star_query_count,
    two_adaptive_distributional_success, two_adaptive_hard_instance, two_adaptive_rand_algorithm, GreedyScanner, Granularity, Model,
    QuerySource, QueryStrategy, RandomScanner, ReadAllStrategy, RunRecord, StarStrategy,
};
use crate::constructions::{
    and, and_or, build_block_sensitivity_witness, make_cor, make_dj, make_forrelation, make_ksum, make_pointer, maj, or, parity,
    threshold, verify_witness, CanonicalParams, CheatSheet, FlipCase, TwoAdaptive, TwoAdaptiveParams,
};
use crate::linalg::spectral_norm;
use crate::quantum::{
    cheatsheet_quantum_3round, dj_program, forrelation_program, grover_parallel, grover_success, run_program, two_adaptive_quantum,
    two_adaptive_quantum_width, QuantumSolver, FORRELATION_VOTE_THRESHOLD,
};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use std::collections::BTreeSet;
use std::sync::Arc;

const EXACT: f64 = 1e-9;

type SuiteBody = fn(&Grid, &mut ChaCha8Rng, &mut Recorder) -> Result<()>;

pub(super) fn run(id: &str, grid: &Grid, seed: u64) -> Result<SuiteReport> {
    let mut rec = Recorder::new(id);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (keys, body): (&[&str], SuiteBody) = match id {
        "spectral-witness" => (&["max-arity", "random"], spectral_witness),
        "block-diag" => (&["count", "N", "sizes"], block_diag),
        "barrier" => (&["max-arity", "random"], barrier),
        "pointer-bounds" => (&["N", "k", "p"], pointer_bounds),
        "cor-sandwich" => (&["fns", "p"], cor_sandwich),
        "forrelation" => (&["n", "instances"], forrelation),
        "grover" => (&["N", "p", "r"], grover),
        "cheatsheet-upper" => (&["copies"], cheatsheet_upper),
        "two-adaptive" => (&["trials"], two_adaptive),
        "bs-witness" => (&[], bs_witness),
        "ksum-lift" => (&["max-len", "seeds"], ksum_lift),
        "star-lemma" => (&["trials", "n", "m", "l"], star_lemma),
        "symmetric" => (&["max-n", "p"], symmetric),
        _ => return Err(VerifyError::UnknownSuite(id.into())),
    };
    grid.check_keys(id, keys)?;
    body(grid, &mut rng, &mut rec)?;
    Ok(rec.finish(seed, grid))
}

fn random_total(n: usize, rng: &mut impl Rng) -> BooleanFunction {
    loop {
        let table: Vec<bool> = (0..1usize << n).map(|_| rng.gen_bool(0.5)).collect();
        if table.iter().any(|&b| b) && table.iter().any(|&b| !b) {
            return BooleanFunction::from_fn(n, "random", move |x| table[x as usize]);
        }
    }
}

fn spectral_witness(grid: &Grid, rng: &mut ChaCha8Rng, rec: &mut Recorder) -> Result<()> {
    let max = grid.usize_or("max-arity", 10)?.clamp(2, crate::boolfn::SPECTRAL_CAP);
    let random = grid.usize_or("random", 50)?;
    let mut corpus: Vec<(String, BooleanFunction)> = Vec::new();
    for n in 2..=max {
        corpus.push((format!("and{n}"), and(n)?));
        corpus.push((format!("or{n}"), or(n)?));
        corpus.push((format!("parity{n}"), parity(n)?));
        corpus.push((format!("maj{n}"), maj(n)?));
    }
    for (b, s) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
        if b * s <= max {
            corpus.push((format!("and-or{b}x{s}"), and_or(b, s)?));
        }
    }
    for i in 0..random {
        corpus.push((format!("random{i:03}"), random_total(2 + i % (max - 1), rng)));
    }
    for (name, f) in corpus {
        let a = AdversaryMatrix::<f64>::adjacency(&f)?;
        let ratio = parallel_adv_ratio(&a, 1)?.ratio;
        let lambda = spectral_sensitivity::<f64>(&f)?;
        rec.check(params([("fn", json!(name)), ("arity", json!(f.arity()))]), ratio, Check::Eq(lambda), EXACT);
    }
    Ok(())
}

/// Random positive weights on a random subset of the sensitive edges of a
/// random total function.
fn random_nn(n: usize, rng: &mut ChaCha8Rng) -> Result<(BooleanFunction, NnAdversary<f64>)> {
    loop {
        let f = random_total(n, rng);
        let mut pairs = Vec::new();
        for x in 0..1u64 << n {
            for i in 0..n {
                let y = x | 1 << i;
                if y != x && f.value_at(x) != f.value_at(y) && rng.gen_bool(0.8) {
                    pairs.push((x, y, rng.gen_range(0.25..2.0)));
                }
            }
        }
        if !pairs.is_empty() {
            let g = AdversaryMatrix::from_pairs(&f, pairs)?;
            return Ok((f, NnAdversary::new(g)?));
        }
    }
}

fn block_diag(grid: &Grid, rng: &mut ChaCha8Rng, rec: &mut Recorder) -> Result<()> {
    let count = grid.usize_or("count", 20)?;
    let sizes = grid.list_or("N", &[4, 5, 6])?;
    let subset_sizes = grid.list_or("sizes", &[1, 2, 3])?;
    for i in 0..count {
        let n = sizes[i % sizes.len()];
        let (f, nn) = random_nn(n, rng)?;
        for &s in subset_sizes.iter().filter(|&&s| s >= 1 && s <= n) {
            let (mut worst, mut bad_shape) = (0.0f64, 0usize);
            for mask in masks_of_size(n, s) {
                let set: Vec<usize> = (0..n).filter(|j| mask >> j & 1 == 1).collect();
                let blocks = nn.block_decompose(&f, &set)?;
                bad_shape += (blocks.len() != 1 << (n - s)) as usize;
                bad_shape += blocks.iter().filter(|b| b.matrix.rows() != 1 << s || b.matrix.cols() != 1 << s).count();
                let mut max_block = 0.0f64;
                for b in &blocks {
                    max_block = max_block.max(spectral_norm(&b.matrix)?);
                }
                worst = worst.max((max_block - gamma_s(nn.matrix(), &set).norm()?).abs());
            }
            let case = |check: &str| params([("instance", json!(i)), ("N", json!(n)), ("size", json!(s)), ("check", json!(check))]);
            rec.check(case("shape"), bad_shape as f64, Check::Eq(0.0), 0.0);
            rec.check(case("max-block-norm-gap"), worst, Check::AtMost(0.0), EXACT);
        }
    }
    Ok(())
}

/// Largest `comb − barrier` over a family of relations, tracked per `p`.
struct BarrierGroup {
    worst: Vec<f64>,
    relations: usize,
    functions: usize,
}

impl BarrierGroup {
    fn new(n: usize) -> Self {
        BarrierGroup { worst: vec![f64::NEG_INFINITY; n + 1], relations: 0, functions: 0 }
    }

    fn add(&mut self, f: &BooleanFunction, relations: &[Vec<(u64, u64)>]) -> Result<()> {
        let n = f.arity();
        let barriers: Vec<f64> = (1..=n).map(|p| barrier_bound(f, p)).collect::<std::result::Result<_, _>>()?;
        for rel in relations {
            let rw = RelationWeights::from_relation(f, rel)?;
            for p in 1..=n {
                let gap = comb_adv_bound(&rw, p)?.bound - barriers[p - 1];
                self.worst[p] = self.worst[p].max(gap);
            }
        }
        self.relations += relations.len();
        self.functions += 1;
        Ok(())
    }

    fn report(&self, rec: &mut Recorder, arity: usize, family: &str) {
        for (p, &gap) in self.worst.iter().enumerate().skip(1) {
            if self.relations == 0 {
                continue;
            }
            let case = params([
                ("arity", json!(arity)),
                ("family", json!(family)),
                ("p", json!(p)),
                ("functions", json!(self.functions)),
                ("relations", json!(self.relations)),
            ]);
            rec.check(case, gap, Check::AtMost(0.0), EXACT);
        }
    }
}

fn split(f: &BooleanFunction) -> Result<(Vec<u64>, Vec<u64>)> {
    Ok((f.inputs_with_value(false)?, f.inputs_with_value(true)?))
}

fn full_relation(f: &BooleanFunction) -> Result<Vec<(u64, u64)>> {
    let (xs, ys) = split(f)?;
    Ok(xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y))).collect())
}

fn nn_relation(f: &BooleanFunction) -> Result<Vec<(u64, u64)>> {
    let (xs, _) = split(f)?;
    Ok(xs
        .iter()
        .flat_map(|&x| (0..f.arity()).map(move |i| (x, x ^ 1 << i)))
        .filter(|&(_, y)| f.value_at(y) == Some(true))
        .collect())
}

/// Every nonempty subset of `X × Y`.
fn all_relations(f: &BooleanFunction) -> Result<Vec<Vec<(u64, u64)>>> {
    let full = full_relation(f)?;
    Ok((1..1u64 << full.len()).map(|m| (0..full.len()).filter(|k| m >> k & 1 == 1).map(|k| full[k]).collect()).collect())
}

/// Total functions on `n ≤ 3` bits by table index, constants skipped.
fn all_functions(n: usize) -> impl Iterator<Item = BooleanFunction> {
    let size = 1u64 << (1 << n);
    (1..size - 1).map(move |t| BooleanFunction::from_fn(n, format!("table{t}"), move |x| t >> x & 1 == 1))
}

const ALL_RELATIONS_PAIR_CAP: usize = 12;

fn barrier(grid: &Grid, rng: &mut ChaCha8Rng, rec: &mut Recorder) -> Result<()> {
    let max = grid.usize_or("max-arity", 6)?.clamp(1, 8);
    let random = grid.usize_or("random", 10)?;
    for n in 1..=max {
        let mut every = BarrierGroup::new(n);
        let mut full = BarrierGroup::new(n);
        let mut nn = BarrierGroup::new(n);
        let corpus: Vec<BooleanFunction> = if n <= 3 {
            all_functions(n).collect()
        } else {
            let mut c = vec![and(n)?, or(n)?, parity(n)?, maj(n)?, threshold(n, n / 2)?];
            c.extend((0..random).map(|_| random_total(n, rng)));
            c
        };
        for f in &corpus {
            let (xs, ys) = split(f)?;
            if xs.len() * ys.len() <= ALL_RELATIONS_PAIR_CAP {
                every.add(f, &all_relations(f)?)?;
            }
            full.add(f, &[full_relation(f)?])?;
            nn.add(f, &[nn_relation(f)?])?;
        }
        every.report(rec, n, "all-relations");
        full.report(rec, n, "full");
        nn.report(rec, n, "nearest-neighbor");
    }
    // Star relation of OR and the one-zero-block relation of AND∘OR.
    for n in 2..=max.max(2) {
        let f = or(n)?;
        let mut g = BarrierGroup::new(n);
        g.add(&f, &[(0..n).map(|i| (0, 1 << i)).collect()])?;
        g.report(rec, n, "or-star");
    }
    let ao = and_or(2, 2)?;
    let mut g = BarrierGroup::new(4);
    let one_hot = |b: u64| [1u64, 2].map(|v| v << (2 * b));
    let ones: Vec<u64> = one_hot(0).iter().flat_map(|&a| one_hot(1).map(|b| a | b)).collect();
    let rel: Vec<(u64, u64)> = ones.iter().flat_map(|&y| (0..4).map(move |i| (y & !(1 << i), y))).filter(|&(x, _)| ao.value_at(x) == Some(false)).collect();
    g.add(&ao, &[rel])?;
    g.report(rec, 4, "and-or-witness");
    rec.check(params([("fn", json!("and-or2x2")), ("p", json!(2)), ("family", json!("barrier-value"))]), barrier_bound(&ao, 2)?, Check::Eq(1.0), 0.0);
    Ok(())
}

fn pointer_bounds(grid: &Grid, _: &mut ChaCha8Rng, rec: &mut Recorder) -> Result<()> {
    for n in grid.list_or("N", &[4, 8])? {
        for k in grid.list_or("k", &[1, 2, 4])? {
            for p in grid.list_or("p", &[1, 2, 4])? {
                if p == 0 || n % p != 0 {
                    continue;
                }
                let d = exact_parallel_D(&make_pointer(n, k)?, p, Granularity::Block)?;
                let case = params([("N", json!(n)), ("k", json!(k)), ("p", json!(p))]);
                rec.check(case, d as f64, Check::Eq(k.min(n / p) as f64), 0.0);
            }
        }
    }
    Ok(())
}

fn component(name: &str) -> Result<BooleanFunction> {
    Ok(match name {
        "and" => and(2)?,
        "or" => or(2)?,
        "parity" => parity(2)?,
        "dj" => make_dj(2)?,
        _ => return Err(VerifyError::BadParam { key: "fns".into(), value: name.into(), reason: "expected and, or, parity or dj".into() }),
    })
}

fn cor_sandwich(grid: &Grid, _: &mut ChaCha8Rng, rec: &mut Recorder) -> Result<()> {
    let names = grid.str_list_or("fns", &["and", "or", "parity", "dj"]);
    let fns: Vec<BooleanFunction> = names.iter().map(|n| component(n)).collect::<Result<_>>()?;
    for p in grid.list_or("p", &[1, 2])? {
        let d = |h: &BooleanFunction| exact_parallel_D(h, p, Granularity::Bit);
        let ds: Vec<usize> = fns.iter().map(d).collect::<std::result::Result<_, _>>()?;
        for (i, f) in fns.iter().enumerate() {
            for (j, g) in fns.iter().enumerate() {
                let m = ds[i].min(ds[j]) as f64;
                let dc = d(&make_cor(f, g)?)? as f64;
                let case = params([("f", json!(names[i])), ("g", json!(names[j])), ("p", json!(p))]);
                rec.check(case, dc, Check::Within { lower: m, upper: 2.0 * m }, 0.0);
            }
        }
    }
    Ok(())
}

/// `Φ = 2^{−3n/2} Σ_{x,y} X(x)·(−1)^{x·y}·Y(y)` by the double sum.
fn forrelation_direct(xs: &[f64], ys: &[f64], n: usize) -> f64 {
    let size = 1usize << n;
    let mut s = 0.0;
    for x in 0..size {
        for y in 0..size {
            let sign = if (x & y).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            s += xs[x] * sign * ys[y];
        }
    }
    s / (size as f64).powf(1.5)
}

fn forrelation(grid: &Grid, rng: &mut ChaCha8Rng, rec: &mut Recorder) -> Result<()> {
    let instances = grid.usize_or("instances", 50)?;
    for n in grid.list_or("n", &[1, 2, 3])? {
        let prog = forrelation_program(n);
        for i in 0..instances {
            let bits = Bits::from_bools(&(0..2usize << n).map(|_| rng.gen_bool(0.5)).collect::<Vec<_>>());
            let sign = |k: usize| if bits.get(k) { -1.0 } else { 1.0 };
            let xs: Vec<f64> = (0..1 << n).map(sign).collect();
            let ys: Vec<f64> = (0..1 << n).map(|k| sign(k + (1 << n))).collect();
            let phi = forrelation_direct(&xs, &ys, n);
            let acc = run_program(&prog, &bits)?.accept_probability().expect("accept rule set");
            rec.check(params([("n", json!(n)), ("instance", json!(i))]), acc, Check::Eq((1.0 + phi) / 2.0), EXACT);
        }
    }
    Ok(())
}

fn grover(grid: &Grid, rng: &mut ChaCha8Rng, rec: &mut Recorder) -> Result<()> {
    let ns = grid.list_or("N", &(2..=32).collect::<Vec<_>>())?;
    let rs = grid.list_or("r", &[0, 1, 2, 3, 4, 5])?;
    for n in ns {
        let ps = grid.list_or("p", &(1..=n).filter(|p| n % p == 0).collect::<Vec<_>>())?;
        for p in ps.into_iter().filter(|&p| p >= 1 && n % p == 0) {
            let marked = rng.gen_range(0..n);
            let mut x = Bits::zeros(n);
            x.set(marked, true);
            for &r in &rs {
                let run = run_program(&grover_parallel(n, p, r)?, &x)?;
                let closed = ((2 * r + 1) as f64 * (p as f64 / n as f64).sqrt().asin()).sin().powi(2);
                let case = params([("N", json!(n)), ("p", json!(p)), ("r", json!(r)), ("marked", json!(marked))]);
                rec.check(case, grover_success(&run, &x, p), Check::Eq(closed), EXACT);
            }
        }
    }
    Ok(())
}

fn tally(runs: &[RunRecord]) -> (f64, f64) {
    let ok = runs.iter().filter(|r| r.correct == Some(true)).count();
    let rounds = runs.iter().map(|r| r.transcript.round_count()).max().unwrap_or(0);
    (ok as f64 / runs.len().max(1) as f64, rounds as f64)
}

fn cheatsheet_upper(grid: &Grid, rng: &mut ChaCha8Rng, rec: &mut Recorder) -> Result<()> {
    let copies = grid.usize_or("copies", 1)?;
    let cs = CheatSheet::canonical(&make_dj(2)?, CanonicalParams { copies, ..CanonicalParams::toy() })?;
    let f = cs.function();
    let l = cs.layout;
    let p = l.cell_size.max(copies * l.inner_arity);
    let suite = cs.input_suite(rng.next_u64())?;
    let read_all = |_: usize, _: u64| -> Box<dyn QueryStrategy> {
        Box::new(ReadAllStrategy::new(cs.inner(), l.inner_arity, Granularity::Bit).expect("inner fits"))
    };
    let det: Vec<RunRecord> = suite
        .iter()
        .map(|x| {
            let mut s = cheatsheet_parallel_algorithm(Model::Det, &cs, p, &read_all)?;
            Ok(run_strategy(&mut s, QuerySource::Input(x), &f)?)
        })
        .collect::<Result<_>>()?;
    let solver = Arc::new(QuantumSolver::exact(dj_program(2)?)?.over_blocks(&and_or(2, 2)?));
    let base = rng.next_u64();
    let quantum: Vec<RunRecord> = suite
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let mut s = cheatsheet_quantum_3round(&cs, solver.clone(), p, base.wrapping_add(i as u64))?;
            Ok(run_strategy(&mut s, QuerySource::Input(x), &f)?)
        })
        .collect::<Result<_>>()?;
    let case = |alg: &str, what: &str| {
        params([("algorithm", json!(alg)), ("check", json!(what)), ("copies", json!(copies)), ("inputs", json!(suite.len())), ("p", json!(p))])
    };
    let (acc, rounds) = tally(&det);
    rec.check(case("deterministic", "accuracy"), acc, Check::Eq(1.0), 0.0);
    rec.check(case("deterministic", "rounds"), rounds, Check::AtMost(3.0), 0.0);
    let (acc, rounds) = tally(&quantum);
    rec.check(case("quantum", "accuracy"), acc, Check::AtLeast(2.0 / 3.0), 0.0);
    rec.check(case("quantum", "rounds"), rounds, Check::AtMost(3.0), 0.0);
    Ok(())
}

fn two_adaptive(grid: &Grid, rng: &mut ChaCha8Rng, rec: &mut Recorder) -> Result<()> {
    let trials = grid.usize_or("trials", 2000)?;
    let dj = TwoAdaptive::new(&make_dj(2)?, TwoAdaptiveParams::toy())?;
    let fr = TwoAdaptive::new(&make_forrelation(2)?, TwoAdaptiveParams::toy())?;
    let solver = Arc::new(QuantumSolver::new(forrelation_program(2), 15, FORRELATION_VOTE_THRESHOLD)?);
    let qp = two_adaptive_quantum_width(&fr, &solver).max(fr.layout.arity());
    let one_query = Arc::new(dj_one_query_solver(2));
    let (mut rand_runs, mut quantum_runs) = (Vec::new(), Vec::new());
    for _ in 0..trials {
        let x = two_adaptive_hard_instance(&dj, rng.next_u64())?;
        let mut s = two_adaptive_rand_algorithm(&dj, one_query.clone(), 9, dj.layout.arity(), rng.next_u64())?;
        rand_runs.push(run_strategy(&mut s, QuerySource::Input(&x), &dj.function())?);
        let x = two_adaptive_hard_instance(&fr, rng.next_u64())?;
        let mut s = two_adaptive_quantum(&fr, solver.clone(), qp, rng.next_u64())?;
        quantum_runs.push(run_strategy(&mut s, QuerySource::Input(&x), &fr.function())?);
    }
    let case = |alg: &str, what: &str, p: usize| {
        params([("algorithm", json!(alg)), ("check", json!(what)), ("p", json!(p)), ("trials", json!(trials))])
    };
    for (alg, runs, p) in [("randomized-dj", &rand_runs, dj.layout.arity()), ("quantum-forrelation", &quantum_runs, qp)] {
        let (acc, rounds) = tally(runs);
        rec.check(case(alg, "success", p), acc, Check::AtLeast(0.6), 0.0);
        rec.check(case(alg, "rounds", p), rounds, Check::Eq(2.0), 0.0);
    }
    for p in [1, 2] {
        let s = two_adaptive_distributional_success(&dj, p, 2)?;
        let case = params([("algorithm", json!("best-deterministic-dj")), ("check", json!("distributional")), ("p", json!(p)), ("rounds", json!(2))]);
        rec.check(case, s, Check::AtMost(0.55), 0.0);
    }
    Ok(())
}

/// Domain `{00, 10, 01}` (bit 0 first) with value 1 only on `01`: from
/// `10` and `00` the three single-bit flips leave the domain, change the
/// value, or keep it.
pub(crate) fn skewed_outer() -> BooleanFunction {
    BooleanFunction::from_partial_fn(2, "skewed", |z| match z {
        0 | 1 => Some(false),
        2 => Some(true),
        _ => None,
    })
}

fn bs_witness(_: &Grid, _: &mut ChaCha8Rng, rec: &mut Recorder) -> Result<()> {
    let h = and_or(2, 2)?;
    let bs = block_sensitivity(&h, None, None)?;
    let mut cases_seen = BTreeSet::new();
    let toys: Vec<(&str, BooleanFunction, CanonicalParams, Vec<Vec<&str>>)> = vec![
        ("dj2", make_dj(2)?, CanonicalParams::toy(), vec![vec!["00"], vec!["10"], vec!["01"]]),
        ("skewed", skewed_outer(), CanonicalParams { copies: 2, pin_all_blocks: true, ..CanonicalParams::toy() }, vec![vec!["10", "00"]]),
    ];
    for (name, g, p, zs) in toys {
        let cs = CheatSheet::canonical(&g, p)?;
        let f = cs.function();
        for z in zs {
            let z_bits: Vec<Bits> = z.iter().map(|s| s.parse().expect("literal bit strings")).collect();
            if z_bits.iter().any(|zi| g.value(zi).is_none()) {
                continue;
            }
            let w = build_block_sensitivity_witness(&cs, &z_bits, bs)?;
            cases_seen.extend(w.blocks.iter().map(|b| b.case));
            let case = |what: &str| params([("outer", json!(name)), ("z", json!(z.join("|"))), ("check", json!(what))]);
            let need = (bs * g.arity() * p.copies) as f64;
            rec.check(case("blocks"), w.blocks.len() as f64, Check::AtLeast(need), 0.0);
            rec.check(case("verified"), verify_witness(&f, &w)? as u8 as f64, Check::Eq(1.0), 0.0);
        }
    }
    let all = [FlipCase::OutOfDomain, FlipCase::OutputChanged, FlipCase::CertificateBroken];
    let seen = all.iter().filter(|c| cases_seen.contains(c)).count();
    rec.check(params([("check", json!("flip-cases"))]), seen as f64, Check::Eq(3.0), 0.0);
    Ok(())
}

fn ksum_lift(grid: &Grid, _: &mut ChaCha8Rng, rec: &mut Recorder) -> Result<()> {
    let max_len = grid.usize_or("max-len", 6)?;
    let seeds = grid.usize_or("seeds", 100)? as u64;
    // Sub-blocks, k, bits per sub-block, modulus.
    let (m, k, bb, q) = (4, 2, 2, 4);
    let f = make_ksum(m, k, bb, q)?;
    for len in 1..=max_len {
        let mut wrong = 0usize;
        for x in 0..1u64 << len {
            let x = Bits::from_u64(x, len);
            for seed in 0..seeds {
                let lift = build_ksum_lift(&x, m, k, bb, q, seed)?;
                wrong += (0..len).filter(|&i| f.evaluate(&lift.block(i)).ok() != Some(x.get(i))).count();
            }
        }
        let case = params([("len", json!(len)), ("seeds", json!(seeds)), ("sub-blocks", json!(m)), ("k", json!(k))]);
        rec.check(case, wrong as f64, Check::Eq(0.0), 0.0);
    }
    Ok(())
}

fn star_lemma(grid: &Grid, rng: &mut ChaCha8Rng, rec: &mut Recorder) -> Result<()> {
    let trials = grid.usize_or("trials", 10_000)?;
    // The threshold 20l/m must sit below min(n, l) or the case is vacuous.
    let (n, m, l) = (grid.usize_or("n", 64)?, grid.usize_or("m", 32)?, grid.usize_or("l", 64)?);
    let mut strategies: Vec<(&str, Box<dyn StarStrategy>)> = vec![
        ("greedy", Box::new(GreedyScanner { skip_on_hit: false })),
        ("greedy-skip", Box::new(GreedyScanner { skip_on_hit: true })),
        ("random", Box::new(RandomScanner(ChaCha8Rng::seed_from_u64(rng.next_u64())))),
    ];
    for (name, s) in strategies.iter_mut() {
        let base = rng.next_u64();
        let over = (0..trials as u64).filter(|t| star_query_count(l, n, m, s.as_mut(), base.wrapping_add(*t)) * m > 20 * l).count();
        let case = params([("strategy", json!(name)), ("n", json!(n)), ("m", json!(m)), ("l", json!(l)), ("trials", json!(trials))]);
        rec.check(case, over as f64 / trials.max(1) as f64, Check::AtMost(0.1 + 0.02), 0.0);
    }
    Ok(())
}

fn symmetric(grid: &Grid, _: &mut ChaCha8Rng, rec: &mut Recorder) -> Result<()> {
    let max = grid.usize_or("max-n", 12)?.min(crate::boolfn::SPECTRAL_CAP);
    let ps = grid.list_or("p", &[1, 2, 4])?;
    for n in 1..=max {
        let mut fns = vec![(format!("maj{n}"), maj(n)?)];
        fns.extend((1..=n).map(|t| Ok((format!("threshold{n}-{t}"), threshold(n, t)?))).collect::<Result<Vec<_>>>()?);
        for (name, f) in fns {
            let s = symmetric_adversary::<f64>(&f)?;
            for &p in &ps {
                let ratio = parallel_adv_ratio(s.matrix.matrix(), p)?.ratio;
                let bound = 0.5 * symmetric_bound_formula(n, s.t, p);
                let case = params([("fn", json!(name)), ("p", json!(p)), ("t", json!(s.t))]);
                rec.check(case, ratio, Check::AtLeast(bound), EXACT);
            }
        }
    }
    Ok(())
}
