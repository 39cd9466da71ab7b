use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

/// Dense matrix stored column-major, so that `column(j)` is a contiguous slice.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    /// Builds from column-major storage.
    pub fn from_column_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, actual: data.len() });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for j in 0..cols {
            for i in 0..rows {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn column(&self, j: usize) -> &[T] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn column_mut(&mut self, j: usize) -> &mut [T] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn as_column_major(&self) -> &[T] {
        &self.data
    }

    pub(crate) fn into_column_major(self) -> Vec<T> {
        self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, actual: rhs.rows });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for j in 0..rhs.cols {
            let dst = &mut out.data[j * self.rows..(j + 1) * self.rows];
            for (k, &b) in rhs.column(j).iter().enumerate() {
                if b == T::zero() {
                    continue;
                }
                axpy(b, self.column(k), dst);
            }
        }
        Ok(out)
    }

    /// Submatrix keeping the listed rows and columns, in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])])
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
    }

    /// Largest absolute entrywise difference; `None` on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> Option<T> {
        if self.rows != other.rows || self.cols != other.cols {
            return None;
        }
        Some(
            self.data
                .iter()
                .zip(&other.data)
                .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs())),
        )
    }

    /// Frobenius norm.
    pub fn norm(&self) -> T {
        self.data.iter().map(|&x| x * x).sum::<T>().sqrt()
    }

    pub fn is_symmetric(&self, tol: T) -> bool {
        self.is_square()
            && (0..self.rows).all(|j| (0..j).all(|i| (self[(i, j)] - self[(j, i)]).abs() <= tol))
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[j * self.rows + i]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[j * self.rows + i]
    }
}

#[inline]
pub(crate) fn axpy<T: Real>(a: T, x: &[T], y: &mut [T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi = *yi + a * xi;
    }
}

/// Dot product with four independent partial sums.
#[inline]
pub(crate) fn dot<T: Real>(x: &[T], y: &[T]) -> T {
    let n = x.len().min(y.len());
    let (x, y) = (&x[..n], &y[..n]);
    let mut acc = [T::zero(); 4];
    let chunks = n / 4;
    for c in 0..chunks {
        let k = 4 * c;
        acc[0] = acc[0] + x[k] * y[k];
        acc[1] = acc[1] + x[k + 1] * y[k + 1];
        acc[2] = acc[2] + x[k + 2] * y[k + 2];
        acc[3] = acc[3] + x[k + 3] * y[k + 3];
    }
    let mut tail = T::zero();
    for k in 4 * chunks..n {
        tail = tail + x[k] * y[k];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Real symmetric matrix storing only the lower triangle, so symmetry is exact.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix<T> {
    n: usize,
    lower: Vec<T>,
}

#[inline]
fn packed(i: usize, j: usize) -> usize {
    let (r, c) = if i >= j { (i, j) } else { (j, i) };
    r * (r + 1) / 2 + c
}

impl<T: Real> SymmetricMatrix<T> {
    pub fn zeros(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "matrix dimension must be at least 1"));
        }
        Ok(Self { n, lower: vec![T::zero(); n * (n + 1) / 2] })
    }

    /// Builds from the lower triangle given row by row: (0,0), (1,0), (1,1), (2,0), ...
    pub fn from_lower(n: usize, lower: Vec<T>) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "matrix dimension must be at least 1"));
        }
        if lower.len() != n * (n + 1) / 2 {
            return Err(Error::DimensionMismatch { expected: n * (n + 1) / 2, actual: lower.len() });
        }
        Ok(Self { n, lower })
    }

    /// Symmetrizes `(m + mᵀ)/2`.
    pub fn from_dense(m: &Matrix<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch { expected: m.rows(), actual: m.cols() });
        }
        let n = m.rows();
        let half = T::lit(0.5);
        let mut out = Self::zeros(n)?;
        for i in 0..n {
            for j in 0..=i {
                out.lower[packed(i, j)] = half * (m[(i, j)] + m[(j, i)]);
            }
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.lower[packed(i, j)]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.lower[packed(i, j)] = v;
    }

    pub fn lower_triangle(&self) -> &[T] {
        &self.lower
    }

    pub fn to_dense(&self) -> Matrix<T> {
        Matrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    pub fn trace(&self) -> T {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Adds `shift` to every diagonal entry.
    pub fn shift_diagonal(&mut self, shift: T) {
        for i in 0..self.n {
            let k = packed(i, i);
            self.lower[k] = self.lower[k] + shift;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.lower.iter().all(|x| x.is_finite())
    }

    /// Frobenius norm.
    pub fn norm(&self) -> T {
        let mut s = T::zero();
        for i in 0..self.n {
            for j in 0..=i {
                let v = self.get(i, j);
                s = s + if i == j { v * v } else { T::lit(2.0) * v * v };
            }
        }
        s.sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packed_storage_is_symmetric() {
        let mut s = SymmetricMatrix::<f64>::zeros(3).unwrap();
        s.set(0, 2, 5.0);
        assert_eq!(s.get(2, 0), 5.0);
        let d = s.to_dense();
        assert!(d.is_symmetric(0.0));
        assert_eq!(d[(0, 2)], 5.0);
    }

    #[test]
    fn rejects_empty() {
        assert!(SymmetricMatrix::<f64>::zeros(0).is_err());
        assert!(SymmetricMatrix::<f64>::from_lower(2, vec![1.0; 2]).is_err());
    }

    #[test]
    fn matmul_against_hand_product() {
        let a = Matrix::from_fn(2, 3, |i, j| (i * 3 + j) as f64);
        let b = Matrix::from_fn(3, 2, |i, j| (i + j) as f64);
        let c = a.matmul(&b).unwrap();
        // [[0,1,2],[3,4,5]] * [[0,1],[1,2],[2,3]]
        assert_eq!(c[(0, 0)], 5.0);
        assert_eq!(c[(0, 1)], 8.0);
        assert_eq!(c[(1, 0)], 14.0);
        assert_eq!(c[(1, 1)], 26.0);
        assert!(b.matmul(&b).is_err());
    }

    #[test]
    fn dot_handles_tails() {
        let x: Vec<f64> = (0..7).map(|i| i as f64).collect();
        assert_eq!(dot(&x, &x), 91.0);
    }
}
