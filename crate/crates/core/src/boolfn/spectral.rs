//! Sensitivity graph and spectral sensitivity.

use super::{BoolFnError, BooleanFunction, Result};
use crate::linalg::{spectral_norm, SparseMatrix};
use crate::scalar::Real;

/// Arity cap for λ (`2^N`-dimensional sparse eigenproblem).
pub const SPECTRAL_CAP: usize = 14;

/// Adjacency matrix of the graph on `{0,1}^N` joining inputs at Hamming
/// distance 1 whose outputs differ; rows and columns are input indices and
/// out-of-domain points are isolated.
pub fn sensitivity_graph<T: Real>(f: &BooleanFunction) -> Result<SparseMatrix<T>> {
    let f = &f.fast();
    let n = f.arity();
    if n > SPECTRAL_CAP {
        return Err(BoolFnError::TooLarge { what: "sensitivity graph", arity: n, cap: SPECTRAL_CAP });
    }
    let size = 1usize << n;
    let values: Vec<Option<bool>> = (0..size as u64).map(|x| f.value_at(x)).collect();
    let mut trips = Vec::new();
    for x in 0..size {
        let Some(vx) = values[x] else { continue };
        for i in 0..n {
            let y = x ^ (1 << i);
            if values[y].is_some_and(|vy| vy != vx) {
                trips.push((x, y, T::ONE));
            }
        }
    }
    Ok(SparseMatrix::from_triplets(size, size, trips))
}

/// `λ(f) = ‖A_f‖`.
pub fn spectral_sensitivity<T: Real>(f: &BooleanFunction) -> Result<T> {
    Ok(spectral_norm(&sensitivity_graph::<T>(f)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn dense_lambda(f: &BooleanFunction) -> f64 {
        let a = sensitivity_graph::<f64>(f).unwrap();
        let n = a.rows();
        let m = DMatrix::from_fn(n, n, |r, c| a.get(r, c));
        m.symmetric_eigenvalues().iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }

    #[test]
    fn examples() {
        let c = BooleanFunction::from_fn(3, "const", |_| false);
        assert_eq!(spectral_sensitivity::<f64>(&c).unwrap(), 0.0);
        let or2 = BooleanFunction::from_fn(2, "or", |x| x != 0);
        assert!((spectral_sensitivity::<f64>(&or2).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        let par2 = BooleanFunction::from_fn(2, "parity", |x| x.count_ones() % 2 == 1);
        assert!((spectral_sensitivity::<f64>(&par2).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn agrees_with_dense_eigendecomposition_up_to_arity_8() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for n in 1..=8 {
            for _ in 0..4 {
                let bias: f64 = rng.gen_range(0.05..0.95);
                let table: Vec<bool> = (0..1 << n).map(|_| rng.gen_bool(bias)).collect();
                let f = BooleanFunction::from_fn(n, "r", |x| table[x as usize]);
                let got = spectral_sensitivity::<f64>(&f).unwrap();
                let want = dense_lambda(&f);
                assert!((got - want).abs() <= 1e-9 * want.max(1.0), "n={n}: {got} vs {want}");
            }
        }
    }
}
