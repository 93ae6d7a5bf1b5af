use crate::scalar::Real;

/// All eigenvalues of a dense symmetric matrix by cyclic Jacobi rotations,
/// sorted ascending. Intended for cross-checks at small dimension.
pub fn dense_symmetric_eigenvalues<T: Real>(a: &[Vec<T>]) -> Vec<T> {
    let n = a.len();
    let mut m: Vec<Vec<T>> = a.to_vec();
    for _sweep in 0..100 {
        let off: T = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| m[i][j] * m[i][j]).sum();
        let scale: T = (0..n).map(|i| m[i][i] * m[i][i]).sum::<T>() + off;
        if off <= T::epsilon() * T::epsilon() * scale || off == T::ZERO {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q] == T::ZERO {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (T::of(2.0) * m[p][q]);
                let t = {
                    let sign = if theta >= T::ZERO { T::ONE } else { -T::ONE };
                    sign / (theta.abs() + (theta * theta + T::ONE).sqrt())
                };
                let c = T::ONE / (t * t + T::ONE).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut ev: Vec<T> = (0..n).map(|i| m[i][i]).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ev
}

/// Largest singular value of a dense (possibly rectangular) matrix via `MᵀM`.
pub fn dense_spectral_norm<T: Real>(a: &[Vec<T>]) -> T {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    if rows == 0 || cols == 0 {
        return T::ZERO;
    }
    let mut g = vec![vec![T::ZERO; cols]; cols];
    for i in 0..cols {
        for j in i..cols {
            let v: T = (0..rows).map(|r| a[r][i] * a[r][j]).sum();
            g[i][j] = v;
            g[j][i] = v;
        }
    }
    let ev = dense_symmetric_eigenvalues(&g);
    ev.last().copied().unwrap_or(T::ZERO).max(T::ZERO).sqrt()
}
