//! Gibbs-ensemble side: Fermi occupations, semicircle-averaged occupation
//! moments `[n_β]` and `[(n_β)²]` with their closed-form limits, thermal
//! correlation matrices, and the filling → inverse-temperature map.

mod bessel;
mod quadrature;

pub use bessel::{bessel_i1, bessel_i1_scaled, ln_bessel_i1};
pub use quadrature::ChebyshevRule;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::model::{CorrelationMatrix, FreeFermionModel, ModelParams};
use crate::scalar::Real;

pub const DEFAULT_QUADRATURE_ORDER: usize = 256;

/// Semicircle averages of the Fermi occupation and its square at inverse
/// temperature `beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalAverages<T> {
    pub beta: T,
    pub n_mean: T,
    pub n_sq_mean: T,
}

impl<T: Real> ThermalAverages<T> {
    /// Ensemble variance `[(n_β)²] − [n_β]²` of a single-mode occupation.
    pub fn n_variance(&self) -> T {
        self.n_sq_mean - self.n_mean * self.n_mean
    }
}

/// `1/(e^{βE} + 1)` without overflow for any `βE`.
pub fn fermi_occupation<T: Real>(energy: T, beta: T) -> T {
    if energy == T::zero() || beta == T::zero() {
        return T::lit(0.5);
    }
    let x = beta * energy;
    if x > T::zero() {
        let e = (-x).exp();
        e / (T::one() + e)
    } else {
        T::one() / (T::one() + x.exp())
    }
}

fn check_beta<T: Real>(beta: T) -> Result<()> {
    if !(beta >= T::zero()) || beta.is_infinite() {
        return Err(invalid("beta", format!("must be finite and non-negative, got {beta}")));
    }
    Ok(())
}

/// `[n_β]` and `[(n_β)²]` by Gauss–Chebyshev quadrature of the given order.
pub fn avg_occupation<T: Real>(params: &ModelParams<T>, beta: T, order: usize) -> Result<ThermalAverages<T>> {
    params.validate()?;
    check_beta(beta)?;
    let rule = ChebyshevRule::new(order)?;
    Ok(averages_with_rule(&rule, params, beta))
}

fn averages_with_rule<T: Real>(rule: &ChebyshevRule<T>, params: &ModelParams<T>, beta: T) -> ThermalAverages<T> {
    let r = params.radius();
    let alpha = params.alpha;
    let n_mean = rule.semicircle_average(r, |lambda| fermi_occupation(alpha + lambda, beta));
    let n_sq_mean = rule.semicircle_average(r, |lambda| {
        let n = fermi_occupation(alpha + lambda, beta);
        n * n
    });
    ThermalAverages { beta, n_mean, n_sq_mean }
}

/// Linearized high-temperature forms `1/2 − αβ/4` and `1/4 − αβ/4`; valid for `αβ ≪ 1`.
pub fn avg_occupation_high_t<T: Real>(params: &ModelParams<T>, beta: T) -> ThermalAverages<T> {
    let x = params.alpha * beta / T::lit(4.0);
    ThermalAverages { beta, n_mean: T::lit(0.5) - x, n_sq_mean: T::lit(0.25) - x }
}

/// Boltzmann-limit closed forms
/// `[n_β] = 2e^{−αβ} I₁(βR)/(βR)` and `[(n_β)²] = e^{−2αβ} I₁(2βR)/(βR)`,
/// evaluated in log space. Accurate to relative `O(e^{−β(α−R)})`.
pub fn avg_occupation_low_t<T: Real>(params: &ModelParams<T>, beta: T) -> Result<ThermalAverages<T>> {
    params.validate()?;
    if !(beta > T::zero()) || beta.is_infinite() {
        return Err(invalid("beta", format!("must be finite and positive, got {beta}")));
    }
    let x = beta * params.radius();
    let ab = params.alpha * beta;
    let n_mean = (T::LN_2() - ab + ln_bessel_i1(x) - x.ln()).exp();
    let n_sq_mean = (-(ab + ab) + ln_bessel_i1(x + x) - x.ln()).exp();
    Ok(ThermalAverages { beta, n_mean, n_sq_mean })
}

/// Leading large-`βR` asymptotics of the Boltzmann forms:
/// `√(2/(πβR))·e^{−β(α−R)}/(βR)` and `e^{−2β(α−R)}/(βR·√(4πβR))`.
pub fn avg_occupation_low_t_leading<T: Real>(params: &ModelParams<T>, beta: T) -> Result<ThermalAverages<T>> {
    params.validate()?;
    if !(beta > T::zero()) {
        return Err(invalid("beta", format!("must be positive, got {beta}")));
    }
    let r = params.radius();
    let x = beta * r;
    let gap = beta * (params.alpha - r);
    let n_mean = (T::lit(2.0) / (T::PI() * x)).sqrt() * (-gap).exp() / x;
    let n_sq_mean = (-(gap + gap)).exp() / (x * (T::lit(4.0) * T::PI() * x).sqrt());
    Ok(ThermalAverages { beta, n_mean, n_sq_mean })
}

/// `C^β = Σ_a ψ^a (ψ^a)ᵀ n_β(E_a)`.
///
/// When every mode has the same occupation `n`, completeness of the
/// eigenbasis gives `n·I` exactly, which is returned without rounding.
pub fn thermal_correlation_matrix<T: Real>(model: &FreeFermionModel<T>, beta: T) -> Result<CorrelationMatrix<T>> {
    check_beta(beta)?;
    let weights: Vec<T> = model.energies().iter().map(|&e| fermi_occupation(e, beta)).collect();
    let n = model.n();
    if weights.iter().all(|&w| w == weights[0]) {
        let w = weights[0];
        let m = crate::goe::Matrix::from_fn(n, n, |i, j| if i == j { w } else { T::zero() });
        return CorrelationMatrix::from_matrix(m);
    }
    Ok(CorrelationMatrix::from_weighted_modes(model.eigvecs(), weights.into_iter().enumerate()))
}

/// Inverse temperature `β ≥ 0` with `[n_β] = filling`, for `filling ∈ (0, 1/2]`.
///
/// `[n_β]` is strictly decreasing in `β` because the spectrum is positive, so
/// bisection on a doubling bracket `[0, β_max]`, `β_max` starting at `1/α`,
/// converges to machine precision.
pub fn effective_beta<T: Real>(params: &ModelParams<T>, filling: T) -> Result<T> {
    effective_beta_with_order(params, filling, DEFAULT_QUADRATURE_ORDER)
}

pub fn effective_beta_with_order<T: Real>(params: &ModelParams<T>, filling: T, order: usize) -> Result<T> {
    params.validate()?;
    let half = T::lit(0.5);
    if !(filling > T::zero()) || filling > half {
        return Err(invalid(
            "filling",
            format!("must lie in (0, 1/2]; fillings above 1/2 need negative temperature, got {filling}"),
        ));
    }
    if filling == half {
        return Ok(T::zero());
    }
    let rule = ChebyshevRule::new(order)?;
    let n_at = |b: T| averages_with_rule(&rule, params, b).n_mean;

    let mut lo = T::zero();
    let mut hi = T::one() / params.alpha;
    let mut doublings = 0;
    while n_at(hi) > filling {
        lo = hi;
        hi = hi + hi;
        doublings += 1;
        if doublings > 2000 || hi.is_infinite() {
            return Err(invalid("filling", format!("no finite temperature reaches filling {filling}")));
        }
    }
    for _ in 0..400 {
        let mid = lo + (hi - lo) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if n_at(mid) > filling {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Return whichever end of the final bracket is closer in filling.
    if (n_at(lo) - filling).abs() <= (n_at(hi) - filling).abs() {
        Ok(lo)
    } else {
        Ok(hi)
    }
}
