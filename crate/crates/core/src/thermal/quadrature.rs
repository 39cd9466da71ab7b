use crate::error::{invalid, Result};
use crate::scalar::Real;

/// Gauss–Chebyshev rule of the second kind, rescaled so that
/// `Σ_k w_k f(R x_k) ≈ ∫ P(λ) f(λ) dλ` for the normalized semicircle `P` of
/// any radius `R`. Nodes `x_k = cos(kπ/(n+1))`, weights
/// `∝ sin²(kπ/(n+1))`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevRule<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
    total: T,
}

impl<T: Real> ChebyshevRule<T> {
    pub fn new(order: usize) -> Result<Self> {
        if order < 2 {
            return Err(invalid("order", format!("quadrature order must be at least 2, got {order}")));
        }
        let step = T::PI() / T::from_usize_lossy(order + 1);
        let mut nodes = Vec::with_capacity(order);
        let mut weights: Vec<T> = Vec::with_capacity(order);
        for k in 1..=order {
            let theta = step * T::from_usize_lossy(k);
            nodes.push(theta.cos());
            let s = theta.sin();
            weights.push(s * s);
        }
        let total = weights.iter().copied().sum();
        Ok(Self { nodes, weights, total })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Semicircle average of `f` over `[-radius, radius]`.
    ///
    /// Divides by the computed weight sum rather than pre-normalizing, which
    /// keeps constant integrands exact (`0.5` averages to exactly `0.5`).
    pub fn semicircle_average(&self, radius: T, mut f: impl FnMut(T) -> T) -> T {
        let s: T = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(radius * x))
            .sum();
        s / self.total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_tiny_order() {
        assert!(ChebyshevRule::<f64>::new(1).is_err());
        assert!(ChebyshevRule::<f64>::new(2).is_ok());
    }

    #[test]
    fn integrates_polynomial_moments_exactly() {
        // Degree ≤ 2n−1 is exact: semicircle moments (R/2)^{2p}·Catalan(p).
        let rule = ChebyshevRule::<f64>::new(8).unwrap();
        let r = 3.0;
        let catalan = [1.0, 1.0, 2.0, 5.0, 14.0, 42.0];
        for (p, c) in catalan.iter().enumerate() {
            let got = rule.semicircle_average(r, |x| x.powi(2 * p as i32));
            let want = c * (r / 2.0f64).powi(2 * p as i32);
            assert!((got - want).abs() < 1e-12 * want.max(1.0), "p = {p}: {got} vs {want}");
            let odd = rule.semicircle_average(r, |x| x.powi(2 * p as i32 + 1));
            assert!(odd.abs() < 1e-12 * want.max(1.0));
        }
        assert_eq!(rule.semicircle_average(r, |_| 0.5), 0.5);
    }
}
