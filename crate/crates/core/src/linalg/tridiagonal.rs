use crate::scalar::Real;

/// Implicit QL eigenvalue iteration for a symmetric tridiagonal matrix.
///
/// `diag` holds the diagonal and is overwritten with the eigenvalues (unsorted).
/// `offdiag[i]` couples `i` and `i + 1`; its last entry is ignored and the slice
/// is clobbered. Every row of `tracked` is rotated along with the eigenvector
/// basis: pass identity rows to get full eigenvectors (as columns), or a single
/// unit row `e_{m-1}` to get only their last components.
pub fn tridiagonal_eigen<T: Real>(diag: &mut [T], offdiag: &mut [T], tracked: &mut [Vec<T>]) -> Result<(), usize> {
    let m = diag.len();
    assert_eq!(offdiag.len(), m);
    if m == 0 {
        return Ok(());
    }
    offdiag[m - 1] = T::ZERO;
    let two = T::of(2.0);
    for l in 0..m {
        let mut iter = 0;
        loop {
            let mut mm = l;
            while mm + 1 < m {
                let dd = diag[mm].abs() + diag[mm + 1].abs();
                if offdiag[mm].abs() <= T::epsilon() * dd {
                    break;
                }
                mm += 1;
            }
            if mm == l {
                break;
            }
            iter += 1;
            if iter > 64 {
                return Err(l);
            }
            let mut g = (diag[l + 1] - diag[l]) / (two * offdiag[l]);
            let mut r = g.hypot(T::ONE);
            let signed_r = if g >= T::ZERO { r.abs() } else { -r.abs() };
            g = diag[mm] - diag[l] + offdiag[l] / (g + signed_r);
            let (mut s, mut c, mut p) = (T::ONE, T::ONE, T::ZERO);
            let mut i = mm;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * offdiag[i];
                let b = c * offdiag[i];
                r = f.hypot(g);
                offdiag[i + 1] = r;
                if r == T::ZERO {
                    diag[i + 1] = diag[i + 1] - p;
                    offdiag[mm] = T::ZERO;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + two * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
                for row in tracked.iter_mut() {
                    let f = row[i + 1];
                    row[i + 1] = s * row[i] + c * f;
                    row[i] = c * row[i] - s * f;
                }
            }
            if deflated {
                continue;
            }
            diag[l] = diag[l] - p;
            offdiag[l] = g;
            offdiag[mm] = T::ZERO;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_graph_eigenvalues() {
        // P_4 adjacency: eigenvalues 2 cos(kπ/5), k = 1..4.
        let mut d = vec![0.0f64; 4];
        let mut e = vec![1.0, 1.0, 1.0, 0.0];
        let mut z: Vec<Vec<f64>> = (0..4).map(|i| (0..4).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        tridiagonal_eigen(&mut d, &mut e, &mut z).unwrap();
        let mut got = d.clone();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut want: Vec<f64> = (1..=4).map(|k| 2.0 * (k as f64 * std::f64::consts::PI / 5.0).cos()).collect();
        want.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 1e-13);
        }
        // columns of z are unit eigenvectors
        for col in 0..4 {
            let n: f64 = (0..4).map(|r| z[r][col] * z[r][col]).sum();
            assert!((n - 1.0).abs() < 1e-12);
        }
    }
}
