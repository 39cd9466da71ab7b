//! Modified Bessel function of the first kind, order one.

use crate::scalar::Real;

/// Power series below this argument, asymptotic expansion above.
pub const SERIES_CUTOFF: f64 = 15.0;

/// `I_1(x)`. Odd in `x`; overflows to infinity past `x ≈ 713` in `f64`, use
/// [`bessel_i1_scaled`] or [`ln_bessel_i1`] there.
pub fn bessel_i1<T: Real>(x: T) -> T {
    let ax = x.abs();
    let v = if ax < T::lit(SERIES_CUTOFF) {
        series(ax)
    } else {
        ax.exp() * asymptotic_scaled(ax)
    };
    if x < T::zero() {
        -v
    } else {
        v
    }
}

/// `e^{-|x|} I_1(x)`, finite for all finite `x`.
pub fn bessel_i1_scaled<T: Real>(x: T) -> T {
    let ax = x.abs();
    let v = if ax < T::lit(SERIES_CUTOFF) {
        series(ax) * (-ax).exp()
    } else {
        asymptotic_scaled(ax)
    };
    if x < T::zero() {
        -v
    } else {
        v
    }
}

/// `ln I_1(x)` for `x > 0`.
pub fn ln_bessel_i1<T: Real>(x: T) -> T {
    if x < T::lit(SERIES_CUTOFF) {
        series(x).ln()
    } else {
        x + asymptotic_scaled(x).ln()
    }
}

/// `Σ_k (x/2)^{2k+1} / (k! (k+1)!)`; all terms positive.
fn series<T: Real>(x: T) -> T {
    let half = x / T::lit(2.0);
    let q = half * half;
    let mut term = half;
    let mut sum = term;
    let mut k = 1usize;
    while k < 500 {
        term = term * q / T::from_usize_lossy(k * (k + 1));
        sum = sum + term;
        if term <= sum * T::epsilon() {
            break;
        }
        k += 1;
    }
    sum
}

/// `e^{-x} I_1(x) ≈ (2πx)^{-1/2} Σ_k c_k x^{-k}` with
/// `c_k = c_{k-1}·(−(4 − (2k−1)²))/(8k)`, truncated at the smallest term.
fn asymptotic_scaled<T: Real>(x: T) -> T {
    let eight_x = T::lit(8.0) * x;
    let mut term = T::one();
    let mut sum = T::one();
    for k in 1..200usize {
        let odd = T::from_usize_lossy(2 * k - 1);
        let next = term * (odd * odd - T::lit(4.0)) / (T::from_usize_lossy(k) * eight_x);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum = sum + term;
        if term.abs() <= sum.abs() * T::epsilon() {
            break;
        }
    }
    sum / (T::lit(2.0) * T::PI() * x).sqrt()
}
