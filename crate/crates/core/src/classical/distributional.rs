//! Best deterministic success against an explicit input distribution.

use super::solver::BIT_SOLVER_CAP;
use super::{ClassicalError, Result};
use crate::boolfn::{BoolFnError, BooleanFunction};
use itertools::Itertools;
use std::collections::HashMap;

struct Expectimax {
    pow: Vec<usize>,
    p: usize,
    /// Per base-3 subcube (digit 2 = unknown): mass of points with output 0 and 1.
    mass: Vec<[f64; 2]>,
    memo: HashMap<(usize, usize), f64>,
}

impl Expectimax {
    fn value(&mut self, c: usize, r: usize) -> f64 {
        let [m0, m1] = self.mass[c];
        let unknown: Vec<usize> = (0..self.pow.len()).filter(|&i| (c / self.pow[i]) % 3 == 2).collect();
        if r == 0 || m0 == 0.0 || m1 == 0.0 || unknown.is_empty() {
            return m0.max(m1);
        }
        if let Some(&v) = self.memo.get(&(c, r)) {
            return v;
        }
        let size = self.p.min(unknown.len());
        let mut best = 0.0f64;
        for q in unknown.iter().copied().combinations(size) {
            let mut total = 0.0;
            for a in 0..1usize << q.len() {
                let child = q.iter().enumerate().fold(c, |acc, (j, &i)| acc - (2 - (a >> j & 1)) * self.pow[i]);
                total += self.value(child, r - 1);
            }
            best = best.max(total);
        }
        self.memo.insert((c, r), best);
        best
    }
}

/// Max over deterministic `p`-parallel `k`-round strategies of
/// `Pr[answer = f(x)]` for `x` drawn from `dist` (point, probability).
pub fn distributional_success(f: &BooleanFunction, dist: &[(u64, f64)], p: usize, k: usize) -> Result<f64> {
    let n = f.arity();
    if n > BIT_SOLVER_CAP {
        return Err(ClassicalError::TooLarge { what: "distributional solver", size: n, cap: BIT_SOLVER_CAP });
    }
    if p == 0 {
        return Err(ClassicalError::ParallelismTooSmall { need: 1, got: 0 });
    }
    let pow: Vec<usize> = (0..n).map(|i| 3usize.pow(i as u32)).collect();
    let total = 3usize.pow(n as u32);
    let mut mass = vec![[0.0f64; 2]; total];
    for &(x, w) in dist {
        if w < 0.0 || x >> n != 0 {
            return Err(ClassicalError::BadArgument(format!("bad distribution entry ({x}, {w})")));
        }
        let v = f.value_at(x).ok_or(BoolFnError::OutOfDomain)?;
        let c: usize = (0..n).map(|i| ((x >> i & 1) as usize) * pow[i]).sum();
        mass[c][v as usize] += w;
    }
    // Cubes in increasing order: the first unknown digit splits into two
    // smaller codes.
    for c in 0..total {
        if let Some(i) = (0..n).find(|&i| (c / pow[i]) % 3 == 2) {
            let (a, b) = (mass[c - 2 * pow[i]], mass[c - pow[i]]);
            mass[c] = [a[0] + b[0], a[1] + b[1]];
        }
    }
    let mut e = Expectimax { pow, p, mass, memo: HashMap::new() };
    Ok(e.value(total - 1, k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{exact_parallel_D, Granularity};
    use crate::constructions::{basic, dj::make_dj};

    fn uniform(f: &BooleanFunction) -> Vec<(u64, f64)> {
        let pts = f.points().unwrap();
        let w = 1.0 / pts.len() as f64;
        pts.into_iter().map(|(x, _)| (x, w)).collect()
    }

    #[test]
    fn dj2_examples() {
        let f = make_dj(2).unwrap();
        let d = uniform(&f);
        assert_eq!(distributional_success(&f, &d, 2, 1).unwrap(), 1.0);
        assert!((distributional_success(&f, &d, 2, 0).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        // One bit: seeing a 1 settles it, seeing 0 leaves 00 vs one balanced point.
        assert!((distributional_success(&f, &d, 1, 1).unwrap() - 1.0).abs() > 1e-9);
    }

    #[test]
    fn enough_rounds_always_succeed() {
        for f in [basic::maj(5).unwrap(), basic::parity(4).unwrap(), make_dj(4).unwrap()] {
            let d = uniform(&f);
            for p in 1..=3 {
                let dp = exact_parallel_D(&f, p, Granularity::Bit).unwrap();
                assert!((distributional_success(&f, &d, p, dp).unwrap() - 1.0).abs() < 1e-12);
                if dp > 0 {
                    assert!(distributional_success(&f, &d, p, dp - 1).unwrap() < 1.0 - 1e-12);
                }
            }
        }
    }

    #[test]
    fn parity_is_hopeless_without_all_bits() {
        let f = basic::parity(4).unwrap();
        let s = distributional_success(&f, &uniform(&f), 1, 3).unwrap();
        assert!((s - 0.5).abs() < 1e-12);
    }
}
