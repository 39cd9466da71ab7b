//! Gaussian orthogonal ensemble sampling, the semicircle law, and the dense
//! symmetric eigensolver used by every other module.

mod eigen;
mod matrix;

pub use eigen::{eigendecompose_symmetric, symmetric_eigenvalues, SymmetricEigen};
pub use matrix::{Matrix, SymmetricMatrix};
pub(crate) use matrix::axpy;

use crate::error::{invalid, Result};
use crate::rng::{normal, Seed};
use crate::scalar::Real;

/// GOE sample: off-diagonal entries `N(0, σ²)`, diagonal entries `N(0, 2σ²)`.
///
/// With this convention the spectrum follows the semicircle of radius
/// `2√n·σ` and the eigenvector matrix is Haar-distributed on O(n).
pub fn sample_goe<T: Real>(n: usize, sigma: T, seed: Seed) -> Result<SymmetricMatrix<T>> {
    if n == 0 {
        return Err(invalid("n", "must be at least 1"));
    }
    if !(sigma > T::zero()) || !sigma.is_finite() {
        return Err(invalid("sigma", format!("must be finite and positive, got {sigma}")));
    }
    let mut rng = seed.rng();
    let diag_sigma = sigma * T::SQRT_2();
    let mut lower = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for _ in 0..i {
            lower.push(sigma * normal::<T, _>(&mut rng));
        }
        lower.push(diag_sigma * normal::<T, _>(&mut rng));
    }
    SymmetricMatrix::from_lower(n, lower)
}

/// Wigner semicircle on `[-R, R]` with density `2/(πR²)·√(R²−λ²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemicircleLaw<T> {
    radius: T,
}

impl<T: Real> SemicircleLaw<T> {
    pub fn new(radius: T) -> Result<Self> {
        if !(radius > T::zero()) || !radius.is_finite() {
            return Err(invalid("radius", format!("must be finite and positive, got {radius}")));
        }
        Ok(Self { radius })
    }

    /// Radius `2√n·σ` of the GOE spectrum.
    pub fn for_goe(n: usize, sigma: T) -> Result<Self> {
        Self::new(T::lit(2.0) * T::from_usize_lossy(n).sqrt() * sigma)
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn pdf(&self, lambda: T) -> T {
        let r = self.radius;
        if lambda.abs() >= r {
            return T::zero();
        }
        T::lit(2.0) / (T::PI() * r * r) * (r * r - lambda * lambda).sqrt()
    }

    pub fn cdf(&self, lambda: T) -> T {
        let r = self.radius;
        if lambda <= -r {
            return T::zero();
        }
        if lambda >= r {
            return T::one();
        }
        let x = lambda / r;
        T::lit(0.5) + (x * (T::one() - x * x).sqrt() + x.asin()) / T::PI()
    }

    /// `k`-th moment: zero for odd `k`, `Catalan(k/2)·(R/2)^k` for even `k`.
    pub fn moment(&self, k: u32) -> T {
        if k % 2 == 1 {
            return T::zero();
        }
        let p = k / 2;
        let half_r = self.radius / T::lit(2.0);
        catalan::<T>(p) * half_r.powi(k as i32)
    }

    /// Kolmogorov distance `sup |F_emp − F|` between the empirical CDF of
    /// `samples` and this law.
    pub fn kolmogorov_distance(&self, samples: &[T]) -> T {
        let mut s: Vec<T> = samples.to_vec();
        s.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
        let n = T::from_usize_lossy(s.len());
        s.iter().enumerate().fold(T::zero(), |worst, (i, &x)| {
            let f = self.cdf(x);
            let lo = T::from_usize_lossy(i) / n;
            let hi = T::from_usize_lossy(i + 1) / n;
            worst.max((f - lo).abs()).max((hi - f).abs())
        })
    }
}

/// Normalized semicircle density; zero outside `[-R, R]`.
pub fn semicircle_pdf<T: Real>(lambda: T, radius: T) -> Result<T> {
    Ok(SemicircleLaw::new(radius)?.pdf(lambda))
}

pub fn semicircle_moment<T: Real>(k: u32, radius: T) -> Result<T> {
    Ok(SemicircleLaw::new(radius)?.moment(k))
}

fn catalan<T: Real>(p: u32) -> T {
    // C_{p+1} = C_p · 2(2p+1)/(p+2)
    (0..p).fold(T::one(), |c, q| {
        c * T::lit(2.0 * (2 * q + 1) as f64) / T::lit((q + 2) as f64)
    })
}
