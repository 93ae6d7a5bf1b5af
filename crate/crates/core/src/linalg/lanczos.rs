use super::{axpy, dot, norm2, tridiagonal_eigen, LinalgError, SymmetricOperator};
use crate::scalar::Real;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct EigenOptions<T> {
    /// Target bound on `residual / max|θ|` for both extreme Ritz pairs.
    pub tolerance: T,
    /// Krylov basis size before an explicit restart.
    pub max_basis: usize,
    pub max_restarts: usize,
    /// Ritz values are recomputed every `check_every` steps.
    pub check_every: usize,
    pub seed: u64,
}

impl<T: Real> Default for EigenOptions<T> {
    fn default() -> Self {
        EigenOptions { tolerance: T::SOLVER_TOLERANCE, max_basis: 320, max_restarts: 20, check_every: 8, seed: 0x1a2c_705e }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremes<T> {
    pub min: T,
    pub max: T,
    /// Larger of the two residual bounds, relative to `max(|min|, |max|)`.
    pub residual: T,
    pub iterations: usize,
}

/// Smallest and largest eigenvalue of a symmetric operator by Lanczos with full
/// reorthogonalization.
///
/// The start vector is pseudo-random under a fixed seed, so runs are
/// deterministic while generically overlapping every eigenspace. A breakdown
/// (`β ≈ 0`) means the Krylov space is invariant and the Ritz values are exact.
/// When the basis cap is reached the iteration restarts from the sum of the two
/// extreme Ritz vectors.
pub fn extreme_eigenvalues<T: Real, Op: SymmetricOperator<T> + ?Sized>(
    op: &Op,
    opts: &EigenOptions<T>,
) -> Result<Extremes<T>, LinalgError> {
    let n = op.dim();
    if n == 0 {
        return Ok(Extremes { min: T::ZERO, max: T::ZERO, residual: T::ZERO, iterations: 0 });
    }
    let max_basis = opts.max_basis.max(2).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut start: Vec<T> = (0..n).map(|_| T::of(rng.gen_range(-1.0..1.0))).collect();
    let mut total_iters = 0usize;
    let mut last_residual = T::infinity();

    for _restart in 0..=opts.max_restarts {
        let s = norm2(&start);
        start.iter_mut().for_each(|v| *v = *v / s);
        let mut basis: Vec<Vec<T>> = vec![start.clone()];
        let mut alpha: Vec<T> = Vec::new();
        let mut beta: Vec<T> = Vec::new();
        let mut w = vec![T::ZERO; n];
        let mut scale = T::ZERO;

        loop {
            let j = basis.len() - 1;
            op.apply(&basis[j], &mut w);
            total_iters += 1;
            let a = dot(&w, &basis[j]);
            axpy(-a, &basis[j], &mut w);
            if j > 0 {
                axpy(-beta[j - 1], &basis[j - 1], &mut w);
            }
            for _ in 0..2 {
                for v in &basis {
                    let c = dot(&w, v);
                    axpy(-c, v, &mut w);
                }
            }
            let b = norm2(&w);
            alpha.push(a);
            scale = scale.max(a.abs()).max(b);
            let breakdown = b <= T::epsilon() * T::of(64.0) * scale.max(T::min_positive_value());
            let full = basis.len() == max_basis;
            if breakdown || full || (j + 1).is_multiple_of(opts.check_every) {
                let ritz = ritz_extremes(&alpha, &beta, full && !breakdown && max_basis < n)?;
                let mag = ritz.min.abs().max(ritz.max.abs()).max(T::min_positive_value());
                let residual = if breakdown { T::ZERO } else { b * ritz.last_min.abs().max(ritz.last_max.abs()) / mag };
                last_residual = residual;
                if breakdown || residual <= opts.tolerance || basis.len() == n {
                    return Ok(Extremes { min: ritz.min, max: ritz.max, residual, iterations: total_iters });
                }
                if full {
                    // restart from the extreme Ritz vectors
                    let (ymin, ymax) = ritz.vectors.expect("vectors requested at restart");
                    let mut next = vec![T::ZERO; n];
                    for (k, v) in basis.iter().enumerate() {
                        axpy(ymin[k] + ymax[k], v, &mut next);
                    }
                    if norm2(&next) == T::ZERO {
                        for (k, v) in basis.iter().enumerate() {
                            axpy(ymax[k], v, &mut next);
                        }
                    }
                    start = next;
                    break;
                }
            }
            beta.push(b);
            let inv = T::ONE / b;
            basis.push(w.iter().map(|&x| x * inv).collect());
        }
    }
    Err(LinalgError::NoConvergence { iterations: total_iters, residual: last_residual.to_f64_lossy() })
}

struct Ritz<T> {
    min: T,
    max: T,
    last_min: T,
    last_max: T,
    vectors: Option<(Vec<T>, Vec<T>)>,
}

fn ritz_extremes<T: Real>(alpha: &[T], beta: &[T], want_vectors: bool) -> Result<Ritz<T>, LinalgError> {
    let m = alpha.len();
    let mut d = alpha.to_vec();
    let mut e: Vec<T> = beta.iter().copied().take(m.saturating_sub(1)).collect();
    e.resize(m, T::ZERO);
    let mut tracked: Vec<Vec<T>> = if want_vectors {
        (0..m).map(|i| (0..m).map(|j| if i == j { T::ONE } else { T::ZERO }).collect()).collect()
    } else {
        let mut last = vec![T::ZERO; m];
        last[m - 1] = T::ONE;
        vec![last]
    };
    tridiagonal_eigen(&mut d, &mut e, &mut tracked)
        .map_err(|_| LinalgError::NoConvergence { iterations: m, residual: f64::NAN })?;
    let (imin, imax) = d.iter().enumerate().fold((0, 0), |(lo, hi), (k, &v)| {
        (if v < d[lo] { k } else { lo }, if v > d[hi] { k } else { hi })
    });
    let last_row = tracked.last().unwrap();
    let (last_min, last_max) = (last_row[imin], last_row[imax]);
    let vectors = want_vectors.then(|| {
        let col = |c: usize| tracked.iter().map(|row| row[c]).collect::<Vec<T>>();
        (col(imin), col(imax))
    });
    Ok(Ritz { min: d[imin], max: d[imax], last_min, last_max, vectors })
}
