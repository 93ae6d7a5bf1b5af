//! Exact minimax over p-parallel query games.
//!
//! `can_finish(s, r)` decides whether some strategy forces the output from
//! state `s` within `r` more rounds. It is monotone in `r`, so the memo keeps
//! the largest failing and smallest succeeding round count per state.
//! Query sets of the full size `min(p, unknown)` suffice since extra queries
//! never hurt; candidates are tried in lexicographic order, which makes the
//! extracted strategies deterministic.

use super::strategy::{positions, AdaptiveAnswerer, QueryStrategy, Step};
use super::{ClassicalError, Granularity, Result, Transcript};
use crate::bits::Bits;
use crate::boolfn::BooleanFunction;
use crate::constructions::pointer::pointer_input;
use itertools::Itertools;
use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;

/// Bit-granularity solver cap.
pub const BIT_SOLVER_CAP: usize = 12;
/// Block-granularity solver cap.
pub const BLOCK_SOLVER_CAP: usize = 8;
/// Largest subcube table a [`TableGame`] allocates.
const CUBE_CAP: usize = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Forced(bool),
    Open,
    /// No domain point agrees with the answers.
    Inconsistent,
}

/// A query game: positions over a finite alphabet, partially revealed.
pub trait Game {
    type State: Clone + Eq + Hash + Debug;
    fn positions(&self) -> usize;
    fn alphabet(&self) -> usize;
    fn root(&self) -> Self::State;
    fn known_value(&self, s: &Self::State, i: usize) -> Option<u64>;
    fn is_known(&self, s: &Self::State, i: usize) -> bool {
        self.known_value(s, i).is_some()
    }
    fn assign(&self, s: &Self::State, i: usize, v: u64) -> Self::State;
    fn outcome(&self, s: &Self::State) -> Outcome;
    /// A full input agreeing with `s` with output `value`.
    fn complete(&self, s: &Self::State, value: bool) -> Option<Bits>;
}

const ONLY1: u8 = 1;
const MIXED: u8 = 2;
const EMPTY: u8 = 3;

fn combine(a: u8, b: u8) -> u8 {
    match (a, b) {
        (EMPTY, x) | (x, EMPTY) => x,
        (x, y) if x == y => x,
        _ => MIXED,
    }
}

fn admits(label: u8, value: bool) -> bool {
    label == MIXED || label == value as u8
}

/// Game over an explicit table. A state is a subcube written in base
/// `alphabet + 1`, digit `alphabet` meaning unknown; every subcube's label
/// (which outputs its domain points take) is precomputed.
#[derive(Debug, Clone)]
pub struct TableGame {
    arity: usize,
    width: usize,
    alphabet: usize,
    pow: Vec<usize>,
    labels: Vec<u8>,
}

impl TableGame {
    pub fn new(f: &BooleanFunction, granularity: Granularity) -> Result<Self> {
        let (n, w) = positions(f, granularity)?;
        match granularity {
            Granularity::Bit if n > BIT_SOLVER_CAP => {
                return Err(ClassicalError::TooLarge { what: "bit-granularity solver", size: n, cap: BIT_SOLVER_CAP })
            }
            Granularity::Block if n > BLOCK_SOLVER_CAP => {
                return Err(ClassicalError::TooLarge { what: "block-granularity solver", size: n, cap: BLOCK_SOLVER_CAP })
            }
            _ => {}
        }
        let a = 1usize << w;
        let base = a + 1;
        let total = (0..n).try_fold(1usize, |acc, _| acc.checked_mul(base).filter(|&t| t <= CUBE_CAP));
        let total = total.ok_or(ClassicalError::TooLarge { what: "subcube table", size: usize::MAX, cap: CUBE_CAP })?;
        let f = f.fast();
        let pow: Vec<usize> = (0..n).scan(1usize, |acc, _| Some(std::mem::replace(acc, *acc * base))).collect();
        let mut labels = vec![EMPTY; total];
        let mut digits = vec![0usize; n];
        for c in 0..total {
            labels[c] = match digits.iter().position(|&d| d == a) {
                None => {
                    let x = digits.iter().enumerate().fold(0u64, |acc, (j, &d)| acc | (d as u64) << (j * w));
                    f.value_at(x).map_or(EMPTY, |v| v as u8)
                }
                Some(i) => (0..a).fold(EMPTY, |acc, v| combine(acc, labels[c - (a - v) * pow[i]])),
            };
            for d in digits.iter_mut() {
                *d += 1;
                if *d < base {
                    break;
                }
                *d = 0;
            }
        }
        Ok(TableGame { arity: f.arity(), width: w, alphabet: a, pow, labels })
    }

    fn digit(&self, s: usize, i: usize) -> usize {
        (s / self.pow[i]) % (self.alphabet + 1)
    }
}

impl Game for TableGame {
    type State = usize;
    fn positions(&self) -> usize {
        self.pow.len()
    }
    fn alphabet(&self) -> usize {
        self.alphabet
    }
    fn root(&self) -> usize {
        self.pow.iter().map(|p| p * self.alphabet).sum()
    }
    fn known_value(&self, s: &usize, i: usize) -> Option<u64> {
        let d = self.digit(*s, i);
        (d != self.alphabet).then_some(d as u64)
    }
    fn assign(&self, s: &usize, i: usize, v: u64) -> usize {
        debug_assert!(!self.is_known(s, i));
        s - (self.alphabet - v as usize) * self.pow[i]
    }
    fn outcome(&self, s: &usize) -> Outcome {
        match self.labels[*s] {
            EMPTY => Outcome::Inconsistent,
            MIXED => Outcome::Open,
            v => Outcome::Forced(v == ONLY1),
        }
    }
    fn complete(&self, s: &usize, value: bool) -> Option<Bits> {
        if !admits(self.labels[*s], value) {
            return None;
        }
        let mut c = *s;
        for i in 0..self.positions() {
            if !self.is_known(&c, i) {
                c = (0..self.alphabet as u64)
                    .map(|v| self.assign(&c, i, v))
                    .find(|&t| admits(self.labels[t], value))
                    .expect("a nonempty cube has a nonempty child");
            }
        }
        let mut x = Bits::zeros(self.arity);
        for i in 0..self.positions() {
            x.write_uint(i * self.width, self.width, self.digit(c, i) as u64);
        }
        Some(x)
    }
}

/// Pointer chasing at block granularity, without a table: a state packs one
/// 4-bit label per block, 15 meaning unknown.
#[derive(Debug, Clone)]
pub struct PointerGame {
    n: usize,
    k: usize,
}

const UNKNOWN: u64 = 15;

impl PointerGame {
    pub fn new(n_blocks: usize, k: usize) -> Result<Self> {
        if n_blocks > BLOCK_SOLVER_CAP {
            return Err(ClassicalError::TooLarge { what: "pointer solver", size: n_blocks, cap: BLOCK_SOLVER_CAP });
        }
        Ok(PointerGame { n: n_blocks, k })
    }

    fn label(&self, s: u64, i: usize) -> u64 {
        (s >> (4 * i)) & 15
    }

    /// Output set reachable from `at` with `hops` left, as a 2-bit mask,
    /// branching over labels of unknown blocks (each fixed once per path).
    fn reach(&self, s: u64, at: usize, hops: usize) -> u8 {
        if hops == 0 {
            return 1 << (at & 1);
        }
        match self.label(s, at) {
            UNKNOWN => {
                let mut m = 0;
                for v in 0..self.n as u64 {
                    m |= self.reach(self.assign(&s, at, v), v as usize, hops - 1);
                    if m == 3 {
                        break;
                    }
                }
                m
            }
            v => self.reach(s, v as usize, hops - 1),
        }
    }

    fn realize(&self, s: u64, at: usize, hops: usize, value: bool) -> Option<u64> {
        if hops == 0 {
            return ((at & 1 == 1) == value).then_some(s);
        }
        match self.label(s, at) {
            UNKNOWN => (0..self.n as u64).find_map(|v| self.realize(self.assign(&s, at, v), v as usize, hops - 1, value)),
            v => self.realize(s, v as usize, hops - 1, value),
        }
    }
}

impl Game for PointerGame {
    type State = u64;
    fn positions(&self) -> usize {
        self.n
    }
    fn alphabet(&self) -> usize {
        self.n
    }
    fn root(&self) -> u64 {
        (0..self.n).fold(0, |acc, i| acc | UNKNOWN << (4 * i))
    }
    fn known_value(&self, s: &u64, i: usize) -> Option<u64> {
        let l = self.label(*s, i);
        (l != UNKNOWN).then_some(l)
    }
    fn assign(&self, s: &u64, i: usize, v: u64) -> u64 {
        (s & !(15 << (4 * i))) | v << (4 * i)
    }
    fn outcome(&self, s: &u64) -> Outcome {
        match self.reach(*s, 0, self.k) {
            1 => Outcome::Forced(false),
            2 => Outcome::Forced(true),
            _ => Outcome::Open,
        }
    }
    fn complete(&self, s: &u64, value: bool) -> Option<Bits> {
        let s = self.realize(*s, 0, self.k, value)?;
        let map: Vec<usize> =
            (0..self.n).map(|i| if self.is_known(&s, i) { self.label(s, i) as usize } else { 0 }).collect();
        Some(pointer_input(&map))
    }
}

/// Memoized `can_finish` over a game at parallelism `p`.
#[derive(Debug, Clone)]
pub struct Solver<G: Game> {
    pub game: G,
    p: usize,
    /// (largest failing r + 1, smallest succeeding r); 0 and `u8::MAX` mean unknown.
    memo: HashMap<G::State, (u8, u8)>,
}

impl<G: Game> Solver<G> {
    pub fn new(game: G, p: usize) -> Result<Self> {
        if p == 0 {
            return Err(ClassicalError::ParallelismTooSmall { need: 1, got: 0 });
        }
        Ok(Solver { game, p, memo: HashMap::new() })
    }

    pub fn parallelism(&self) -> usize {
        self.p
    }

    fn unknown(&self, s: &G::State) -> Vec<usize> {
        (0..self.game.positions()).filter(|&i| !self.game.is_known(s, i)).collect()
    }

    pub fn can_finish(&mut self, s: &G::State, r: usize) -> bool {
        if self.game.outcome(s) != Outcome::Open {
            return true;
        }
        if r == 0 {
            return false;
        }
        let unknown = self.unknown(s);
        if unknown.len() <= r * self.p {
            return true;
        }
        if let Some(&(fail, ok)) = self.memo.get(s) {
            if r < fail as usize {
                return false;
            }
            if r >= ok as usize {
                return true;
            }
        }
        let found = self.first_query(s, &unknown, r).is_some();
        let e = self.memo.entry(s.clone()).or_insert((0, u8::MAX));
        if found {
            e.1 = e.1.min(r as u8);
        } else {
            e.0 = e.0.max(r as u8 + 1);
        }
        found
    }

    fn first_query(&mut self, s: &G::State, unknown: &[usize], r: usize) -> Option<Vec<usize>> {
        let size = self.p.min(unknown.len());
        unknown.iter().copied().combinations(size).find(|q| self.all_answers_finish(s, q, r - 1))
    }

    /// Every consistent answer to `q` leaves a state finishable in `r` rounds.
    fn all_answers_finish(&mut self, s: &G::State, q: &[usize], r: usize) -> bool {
        let Some((&i, rest)) = q.split_first() else {
            return self.can_finish(s, r);
        };
        (0..self.game.alphabet() as u64).all(|v| {
            let t = self.game.assign(s, i, v);
            self.game.outcome(&t) == Outcome::Inconsistent || self.all_answers_finish(&t, rest, r)
        })
    }

    /// Exact remaining rounds from `s`.
    pub fn rounds_needed(&mut self, s: &G::State) -> usize {
        (0..).find(|&r| self.can_finish(s, r)).expect("reading everything always finishes")
    }

    /// Lexicographically smallest optimal query set; `None` once forced.
    pub fn best_query(&mut self, s: &G::State) -> Option<Vec<usize>> {
        let r = self.rounds_needed(s);
        if r == 0 {
            return None;
        }
        let unknown = self.unknown(s);
        self.first_query(s, &unknown, r)
    }

    fn state_of(&self, t: &Transcript) -> G::State {
        t.known().into_iter().fold(self.game.root(), |s, (i, v)| {
            if self.game.is_known(&s, i) {
                s
            } else {
                self.game.assign(&s, i, v)
            }
        })
    }
}

fn pointer_spec(f: &BooleanFunction) -> Option<(usize, usize)> {
    let spec = f.generator_spec().filter(|s| s.name == "pointer")?;
    Some((spec.get_usize("n").ok()?, spec.get_usize("k").ok()?))
}

/// Exact D^{p∥}(f) at the given granularity. Pointer chasing at block
/// granularity uses [`PointerGame`]; everything else a [`TableGame`].
#[allow(non_snake_case)]
pub fn exact_parallel_D(f: &BooleanFunction, p: usize, granularity: Granularity) -> Result<usize> {
    if let (Granularity::Block, Some((n, k))) = (granularity, pointer_spec(f)) {
        let mut s = Solver::new(PointerGame::new(n, k)?, p)?;
        let root = s.game.root();
        return Ok(s.rounds_needed(&root));
    }
    let mut s = Solver::new(TableGame::new(f, granularity)?, p)?;
    let root = s.game.root();
    Ok(s.rounds_needed(&root))
}

/// Plays the solver's optimal strategy.
pub struct SolverStrategy<G: Game> {
    solver: Solver<G>,
    granularity: Granularity,
}

impl<G: Game> SolverStrategy<G> {
    pub fn new(solver: Solver<G>, granularity: Granularity) -> Self {
        SolverStrategy { solver, granularity }
    }
}

impl SolverStrategy<TableGame> {
    pub fn for_function(f: &BooleanFunction, p: usize, granularity: Granularity) -> Result<Self> {
        Ok(SolverStrategy::new(Solver::new(TableGame::new(f, granularity)?, p)?, granularity))
    }
}

impl<G: Game> QueryStrategy for SolverStrategy<G> {
    fn parallelism(&self) -> usize {
        self.solver.p
    }
    fn granularity(&self) -> Granularity {
        self.granularity
    }
    fn next(&mut self, t: &Transcript) -> Step {
        let s = self.solver.state_of(t);
        match self.solver.game.outcome(&s) {
            Outcome::Forced(v) => Step::Answer(v),
            Outcome::Inconsistent => Step::Answer(false),
            Outcome::Open => Step::Query(self.solver.best_query(&s).expect("open states need a query")),
        }
    }
}

/// Adversary that answers each round to maximize the exact rounds still
/// needed. Against `|Q| ≤ p` this drops the value by at most one per round,
/// so the output stays open for `D^{p∥} − 1` rounds, its budget.
pub struct TableAdversary<G: Game> {
    solver: Solver<G>,
    state: G::State,
    rounds: usize,
    budget: usize,
}

impl<G: Game> TableAdversary<G> {
    pub fn new(game: G, p: usize) -> Result<Self> {
        let mut solver = Solver::new(game, p)?;
        let state = solver.game.root();
        let d = solver.rounds_needed(&state);
        Ok(TableAdversary { solver, state, rounds: 0, budget: d.saturating_sub(1) })
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn is_open(&self) -> bool {
        self.solver.game.outcome(&self.state) == Outcome::Open
    }

    fn best_answer(&mut self, s: &G::State, q: &[usize]) -> Option<(usize, G::State)> {
        let Some((&i, rest)) = q.split_first() else {
            return Some((self.solver.rounds_needed(s), s.clone()));
        };
        if self.solver.game.is_known(s, i) {
            return self.best_answer(s, rest);
        }
        let mut best: Option<(usize, G::State)> = None;
        for v in 0..self.solver.game.alphabet() as u64 {
            let t = self.solver.game.assign(s, i, v);
            if self.solver.game.outcome(&t) == Outcome::Inconsistent {
                continue;
            }
            if let Some(c) = self.best_answer(&t, rest) {
                if best.as_ref().is_none_or(|b| c.0 > b.0) {
                    best = Some(c);
                }
            }
        }
        best
    }
}

impl TableAdversary<TableGame> {
    pub fn for_function(f: &BooleanFunction, p: usize, granularity: Granularity) -> Result<Self> {
        TableAdversary::new(TableGame::new(f, granularity)?, p)
    }
}

impl<G: Game> AdaptiveAnswerer for TableAdversary<G> {
    fn answer(&mut self, indices: &[usize]) -> Result<Vec<u64>> {
        if self.rounds >= self.budget {
            return Err(ClassicalError::BudgetExceeded(format!("round {} with budget {}", self.rounds + 1, self.budget)));
        }
        let s = self.state.clone();
        let (_, next) = self.best_answer(&s, indices).expect("consistent states have a consistent answer");
        self.state = next;
        self.rounds += 1;
        Ok(indices.iter().map(|&i| self.solver.game.known_value(&self.state, i).expect("answered positions are known")).collect())
    }

    fn completion(&self, value: bool) -> Option<Bits> {
        self.solver.game.complete(&self.state, value)
    }
}
