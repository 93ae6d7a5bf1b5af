use crate::scalar::Real;

/// A linear operator known to be symmetric.
pub trait SymmetricOperator<T: Real> {
    fn dim(&self) -> usize;
    /// `y ← A x`.
    fn apply(&self, x: &[T], y: &mut [T]);
}

/// Compressed sparse row matrix. Duplicate coordinates are summed at build time
/// and explicit zeros are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix<T> {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    values: Vec<T>,
}

impl<T: Real> SparseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, row_ptr: vec![0; rows + 1], col_idx: Vec::new(), values: Vec::new() }
    }

    pub fn from_triplets(rows: usize, cols: usize, triplets: impl IntoIterator<Item = (usize, usize, T)>) -> Self {
        let mut t: Vec<(usize, usize, T)> = triplets.into_iter().collect();
        for &(r, c, _) in &t {
            assert!(r < rows && c < cols, "triplet ({r},{c}) outside {rows}x{cols}");
        }
        t.sort_by_key(|a| (a.0, a.1));
        let mut merged: Vec<(usize, usize, T)> = Vec::with_capacity(t.len());
        for (r, c, v) in t {
            match merged.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 = last.2 + v,
                _ => merged.push((r, c, v)),
            }
        }
        merged.retain(|e| e.2 != T::ZERO);
        let mut row_ptr = vec![0usize; rows + 1];
        for &(r, _, _) in &merged {
            row_ptr[r + 1] += 1;
        }
        for r in 0..rows {
            row_ptr[r + 1] += row_ptr[r];
        }
        SparseMatrix {
            rows,
            cols,
            row_ptr,
            col_idx: merged.iter().map(|e| e.1 as u32).collect(),
            values: merged.iter().map(|e| e.2).collect(),
        }
    }

    pub fn from_dense(a: &[Vec<T>]) -> Self {
        let rows = a.len();
        let cols = a.first().map_or(0, |r| r.len());
        let trip = a
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().enumerate().map(move |(c, &v)| (r, c, v)));
        Self::from_triplets(rows, cols, trip)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.col_idx[span.clone()].binary_search(&(c as u32)) {
            Ok(k) => self.values[span.start + k],
            Err(_) => T::ZERO,
        }
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.rows).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.col_idx[k] as usize, self.values[k]))
        })
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (self.col_idx[k] as usize, self.values[k]))
    }

    /// Keeps the entries accepted by `keep`; the shape is unchanged.
    pub fn filter(&self, mut keep: impl FnMut(usize, usize, T) -> bool) -> Self {
        let mut row_ptr = Vec::with_capacity(self.rows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for r in 0..self.rows {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.col_idx[k];
                if keep(r, c as usize, self.values[k]) {
                    col_idx.push(c);
                    values.push(self.values[k]);
                }
            }
            row_ptr.push(col_idx.len());
        }
        SparseMatrix { rows: self.rows, cols: self.cols, row_ptr, col_idx, values }
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.cols, self.rows, self.triplets().map(|(r, c, v)| (c, r, v)))
    }

    /// Exact structural and numerical symmetry.
    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && self.triplets().all(|(r, c, v)| self.get(c, r) == v)
    }

    pub fn mul_vec(&self, x: &[T], y: &mut [T]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(y.len(), self.rows);
        for (r, yr) in y.iter_mut().enumerate() {
            let mut acc = T::ZERO;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc = acc + self.values[k] * x[self.col_idx[k] as usize];
            }
            *yr = acc;
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let mut d = vec![vec![T::ZERO; self.cols]; self.rows];
        for (r, c, v) in self.triplets() {
            d[r][c] = v;
        }
        d
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        let mut out = self.clone();
        for v in &mut out.values {
            *v = f(*v);
        }
        out
    }
}

impl<T: Real> SymmetricOperator<T> for SparseMatrix<T> {
    fn dim(&self) -> usize {
        self.rows
    }

    fn apply(&self, x: &[T], y: &mut [T]) {
        self.mul_vec(x, y)
    }
}

/// The symmetric embedding `[[0, M], [Mᵀ, 0]]` whose eigenvalues are `±σ_i(M)`.
pub struct Bipartite<'a, T> {
    m: &'a SparseMatrix<T>,
    mt: &'a SparseMatrix<T>,
}

impl<'a, T: Real> Bipartite<'a, T> {
    pub fn new(m: &'a SparseMatrix<T>, mt: &'a SparseMatrix<T>) -> Self {
        debug_assert_eq!((m.rows(), m.cols()), (mt.cols(), mt.rows()));
        Bipartite { m, mt }
    }
}

impl<T: Real> SymmetricOperator<T> for Bipartite<'_, T> {
    fn dim(&self) -> usize {
        self.m.rows() + self.m.cols()
    }

    fn apply(&self, x: &[T], y: &mut [T]) {
        let (r, c) = (self.m.rows(), self.m.cols());
        let (top, bottom) = y.split_at_mut(r);
        self.m.mul_vec(&x[r..r + c], top);
        self.mt.mul_vec(&x[..r], bottom);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_merge_and_zeros_drop() {
        let m = SparseMatrix::<f64>::from_triplets(2, 2, [(0, 1, 1.0), (0, 1, 2.0), (1, 0, 0.0)]);
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(0, 1), 3.0);
        assert_eq!(m.get(1, 0), 0.0);
    }

    #[test]
    fn filter_keeps_shape() {
        let m = SparseMatrix::<f64>::from_dense(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        let f = m.filter(|r, c, _| r != c);
        assert_eq!((f.rows(), f.cols(), f.nnz()), (2, 2, 2));
        assert_eq!(f.to_dense(), vec![vec![0.0, 2.0], vec![3.0, 0.0]]);
    }
}
