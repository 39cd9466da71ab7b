//! Dense symmetric eigensolver: Householder tridiagonalization followed by
//! implicit QL with Wilkinson-style shifts (the classic tred2/tql2 pair).
//!
//! Storage is column-major throughout, so both the reflector updates and the
//! Givens rotations of the QL sweep run over contiguous slices.

use super::matrix::{axpy, dot, Matrix, SymmetricMatrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_QL_ITERATIONS: usize = 60;

/// Eigenvalues ascending, eigenvectors as the matching columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricEigen<T> {
    pub values: Vec<T>,
    pub vectors: Matrix<T>,
}

impl<T: Real> SymmetricEigen<T> {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `V diag(values) Vᵀ`.
    pub fn reconstruct(&self) -> Matrix<T> {
        let n = self.dim();
        let mut out = Matrix::zeros(n, n);
        for (a, &lambda) in self.values.iter().enumerate() {
            let v = self.vectors.column(a);
            for j in 0..n {
                let s = lambda * v[j];
                if s != T::zero() {
                    axpy(s, v, out.column_mut(j));
                }
            }
        }
        out
    }
}

/// Full eigendecomposition with deterministic signs: the first component of
/// each eigenvector whose magnitude exceeds 1e-12 is positive.
pub fn eigendecompose_symmetric<T: Real>(m: &SymmetricMatrix<T>) -> Result<SymmetricEigen<T>> {
    if !m.is_finite() {
        return Err(Error::NonFinite("eigendecompose_symmetric"));
    }
    let n = m.dim();
    let mut v = m.to_dense().into_column_major();
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    tridiagonalize(&mut v, n, &mut d, &mut e, true);
    ql_implicit(&mut d, &mut e, Some(&mut v), n)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).expect("finite eigenvalues"));
    let values = order.iter().map(|&a| d[a]).collect();
    let mut vectors = Matrix::zeros(n, n);
    let tiny = T::lit(1e-12);
    for (dst, &src) in order.iter().enumerate() {
        let col = &v[src * n..(src + 1) * n];
        let flip = col.iter().find(|x| x.abs() > tiny).is_some_and(|&x| x < T::zero());
        for (o, &x) in vectors.column_mut(dst).iter_mut().zip(col) {
            *o = if flip { -x } else { x };
        }
    }
    Ok(SymmetricEigen { values, vectors })
}

/// Eigenvalues only, ascending. Skips the transformation accumulation.
pub fn symmetric_eigenvalues<T: Real>(m: &SymmetricMatrix<T>) -> Result<Vec<T>> {
    if !m.is_finite() {
        return Err(Error::NonFinite("symmetric_eigenvalues"));
    }
    let n = m.dim();
    let mut v = m.to_dense().into_column_major();
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    tridiagonalize(&mut v, n, &mut d, &mut e, false);
    ql_implicit(&mut d, &mut e, None, n)?;
    d.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    Ok(d)
}

/// Householder reduction to tridiagonal form. On return `d` holds the
/// diagonal and `e[1..]` the subdiagonal; with `accumulate` the buffer `v`
/// (column-major, `v[c*n + r]` is row `r`, column `c`) holds the orthogonal
/// transformation.
fn tridiagonalize<T: Real>(v: &mut [T], n: usize, d: &mut [T], e: &mut [T], accumulate: bool) {
    let zero = T::zero();
    for j in 0..n {
        d[j] = v[j * n + n - 1];
    }
    for i in (1..n).rev() {
        let scale = d[..i].iter().fold(zero, |s, x| s + x.abs());
        let mut h = zero;
        if scale == zero {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[j * n + i - 1];
                v[j * n + i] = zero;
                v[i * n + j] = zero;
            }
        } else {
            for dk in d[..i].iter_mut() {
                *dk = *dk / scale;
                h = h + *dk * *dk;
            }
            let f = d[i - 1];
            let mut g = h.sqrt();
            if f > zero {
                g = -g;
            }
            e[i] = scale * g;
            h = h - f * g;
            d[i - 1] = f - g;
            for ej in e[..i].iter_mut() {
                *ej = zero;
            }
            for j in 0..i {
                let f = d[j];
                v[i * n + j] = f;
                let col = &v[j * n..j * n + i];
                let mut g = e[j] + col[j] * f;
                for k in j + 1..i {
                    g = g + col[k] * d[k];
                    e[k] = e[k] + col[k] * f;
                }
                e[j] = g;
            }
            let mut f = zero;
            for j in 0..i {
                e[j] = e[j] / h;
                f = f + e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] = e[j] - hh * d[j];
            }
            for j in 0..i {
                let f = d[j];
                let g = e[j];
                let col = &mut v[j * n..j * n + i];
                for k in j..i {
                    col[k] = col[k] - (f * e[k] + g * d[k]);
                }
                d[j] = v[j * n + i - 1];
                v[j * n + i] = zero;
            }
        }
        d[i] = h;
    }

    if !accumulate {
        for j in 0..n {
            d[j] = v[j * n + j];
        }
        e[0] = zero;
        return;
    }

    for i in 0..n.saturating_sub(1) {
        v[i * n + n - 1] = v[i * n + i];
        v[i * n + i] = T::one();
        let h = d[i + 1];
        if h != zero {
            for k in 0..=i {
                d[k] = v[(i + 1) * n + k] / h;
            }
            for j in 0..=i {
                let (head, tail) = v.split_at_mut((i + 1) * n);
                let reflector = &tail[..=i];
                let col = &mut head[j * n..j * n + i + 1];
                let g = dot(reflector, col);
                axpy(-g, &d[..=i], col);
            }
        }
        for k in 0..=i {
            v[(i + 1) * n + k] = zero;
        }
    }
    for j in 0..n {
        d[j] = v[j * n + n - 1];
        v[j * n + n - 1] = zero;
    }
    v[(n - 1) * n + n - 1] = T::one();
    e[0] = zero;
}

/// Implicit QL on the tridiagonal `(d, e)`; rotations are applied to the
/// columns of `v` when given.
fn ql_implicit<T: Real>(d: &mut [T], e: &mut [T], mut v: Option<&mut [T]>, n: usize) -> Result<()> {
    let zero = T::zero();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = zero;

    let eps = T::epsilon();
    let mut f = zero;
    let mut tst1 = zero;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_ITERATIONS {
                    return Err(Error::NoConvergence { index: l, iterations: MAX_QL_ITERATIONS });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (T::lit(2.0) * e[l]);
                let mut r = p.hypot(T::one());
                if p < zero {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d[l + 2..n].iter_mut() {
                    *di = *di - h;
                }
                f = f + h;

                p = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = zero;
                let mut s2 = zero;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(v) = v.as_deref_mut() {
                        let (left, right) = v.split_at_mut((i + 1) * n);
                        let vi = &mut left[i * n..];
                        let vi1 = &mut right[..n];
                        for (a, b) in vi.iter_mut().zip(vi1.iter_mut()) {
                            let hk = *b;
                            *b = s * *a + c * hk;
                            *a = c * *a - s * hk;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] = d[l] + f;
        e[l] = zero;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::goe::sample_goe;
    use crate::rng::Seed;
    use proptest::prelude::*;

    fn orthonormality_error(v: &Matrix<f64>) -> f64 {
        let vtv = v.transpose().matmul(v).unwrap();
        vtv.max_abs_diff(&Matrix::identity(v.rows())).unwrap()
    }

    #[test]
    fn identity_has_unit_spectrum() {
        let mut m = SymmetricMatrix::<f64>::zeros(3).unwrap();
        for i in 0..3 {
            m.set(i, i, 1.0);
        }
        let eig = eigendecompose_symmetric(&m).unwrap();
        assert_eq!(eig.values, vec![1.0, 1.0, 1.0]);
        assert!(orthonormality_error(&eig.vectors) < 1e-14);
    }

    #[test]
    fn two_by_two_swap_matrix() {
        // [[0,1],[1,0]]: eigenvalues ∓1 with vectors (1, ∓1)/√2.
        let m = SymmetricMatrix::from_lower(2, vec![0.0f64, 1.0, 0.0]).unwrap();
        let eig = eigendecompose_symmetric(&m).unwrap();
        assert!((eig.values[0] + 1.0).abs() < 1e-14);
        assert!((eig.values[1] - 1.0).abs() < 1e-14);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let v0 = eig.vectors.column(0);
        let v1 = eig.vectors.column(1);
        assert!((v0[0] - r).abs() < 1e-14 && (v0[1] + r).abs() < 1e-14);
        assert!((v1[0] - r).abs() < 1e-14 && (v1[1] - r).abs() < 1e-14);
    }

    #[test]
    fn one_by_one() {
        let m = SymmetricMatrix::from_lower(1, vec![-3.5]).unwrap();
        let eig = eigendecompose_symmetric(&m).unwrap();
        assert_eq!(eig.values, vec![-3.5]);
        assert_eq!(eig.vectors[(0, 0)], 1.0);
    }

    #[test]
    fn random_six_reconstructs() {
        let m = sample_goe::<f64>(6, 1.0, Seed(3)).unwrap();
        let eig = eigendecompose_symmetric(&m).unwrap();
        let diff = eig.reconstruct().max_abs_diff(&m.to_dense()).unwrap();
        assert!(diff < 1e-10, "reconstruction error {diff}");
        assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn residuals_and_signs_on_larger_sample() {
        let m = sample_goe::<f64>(120, 0.7, Seed(11)).unwrap();
        let eig = eigendecompose_symmetric(&m).unwrap();
        let dense = m.to_dense();
        let scale = m.norm();
        for a in 0..120 {
            let v = eig.vectors.column(a);
            for i in 0..120 {
                let mv: f64 = (0..120).map(|j| dense[(i, j)] * v[j]).sum();
                assert!((mv - eig.values[a] * v[i]).abs() < 1e-10 * scale);
            }
            let first = v.iter().find(|x| x.abs() > 1e-12).unwrap();
            assert!(*first > 0.0);
        }
        assert!(orthonormality_error(&eig.vectors) < 1e-10);
        let vals = symmetric_eigenvalues(&m).unwrap();
        for (a, b) in vals.iter().zip(&eig.values) {
            assert!((a - b).abs() < 1e-10 * scale);
        }
    }

    #[test]
    fn degenerate_and_zero_blocks() {
        // Block-diagonal with a zero row exercises the `scale == 0` branch.
        let mut m = SymmetricMatrix::<f64>::zeros(5).unwrap();
        m.set(0, 0, 2.0);
        m.set(1, 1, 2.0);
        m.set(3, 2, 1.0);
        let eig = eigendecompose_symmetric(&m).unwrap();
        let diff = eig.reconstruct().max_abs_diff(&m.to_dense()).unwrap();
        assert!(diff < 1e-14);
        assert!(orthonormality_error(&eig.vectors) < 1e-14);
    }

    #[test]
    fn rejects_non_finite() {
        let m = SymmetricMatrix::from_lower(2, vec![f64::NAN, 0.0, 1.0]).unwrap();
        assert!(matches!(eigendecompose_symmetric(&m), Err(Error::NonFinite(_))));
    }

    #[test]
    fn single_precision_instantiation() {
        let m = sample_goe::<f32>(16, 1.0, Seed(5)).unwrap();
        let eig = eigendecompose_symmetric(&m).unwrap();
        let diff = eig.reconstruct().max_abs_diff(&m.to_dense()).unwrap();
        assert!(diff < 1e-4);
    }

    proptest! {
        #[test]
        fn decomposition_is_orthonormal_and_exact(n in 1usize..24, seed in any::<u64>(), sigma in 0.01f64..100.0) {
            let m = sample_goe::<f64>(n, sigma, Seed(seed)).unwrap();
            let eig = eigendecompose_symmetric(&m).unwrap();
            prop_assert!(orthonormality_error(&eig.vectors) < 1e-10);
            let diff = eig.reconstruct().max_abs_diff(&m.to_dense()).unwrap();
            prop_assert!(diff < 1e-10 * m.norm().max(1.0));
        }
    }
}
