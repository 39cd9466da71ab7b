//! Subsystem entanglement entropies from correlation matrices, the analytic
//! single- and multi-particle predictions, and an exact reduced-density-matrix
//! oracle on the full Fock space for small `N`.
//!
//! Entropies are in nats.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::goe::{symmetric_eigenvalues, SymmetricMatrix};
use crate::model::{CorrelationMatrix, EigenstateSpec, FreeFermionModel};
use crate::random_fock::ParticleStatistics;
use crate::scalar::Real;

/// Largest `N` accepted by the Fock-space oracle.
pub const EXACT_MAX_SITES: usize = 12;

const PROBABILITY_SLACK: f64 = 1e-12;

/// Sorted set of distinct site indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subsystem {
    indices: Vec<usize>,
}

impl Subsystem {
    /// Sorts `indices`; rejects duplicates and sites `≥ n`.
    pub fn new(mut indices: Vec<usize>, n: usize) -> Result<Self> {
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("subsystem", "site indices must be distinct"));
        }
        if let Some(&last) = indices.last() {
            if last >= n {
                return Err(invalid("subsystem", format!("site {last} out of range for N = {n}")));
            }
        }
        Ok(Self { indices })
    }

    /// Contiguous block `start..start + m`.
    pub fn block(start: usize, m: usize, n: usize) -> Result<Self> {
        if start + m > n {
            return Err(invalid("subsystem", format!("block {start}..{} exceeds N = {n}", start + m)));
        }
        Ok(Self { indices: (start..start + m).collect() })
    }

    /// Sites whose bit is set in `mask`.
    pub fn from_mask(mask: u64, n: usize) -> Result<Self> {
        if n < 64 && mask >> n != 0 {
            return Err(invalid("subsystem", format!("mask {mask:#b} has bits beyond N = {n}")));
        }
        Ok(Self { indices: (0..n.min(64)).filter(|&i| mask >> i & 1 == 1).collect() })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Number of sites `m`.
    pub fn m(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn is_valid_for(&self, n: usize) -> bool {
        self.indices.last().is_none_or(|&i| i < n)
    }

    pub fn complement(&self, n: usize) -> Self {
        let mut out = Vec::with_capacity(n.saturating_sub(self.m()));
        let mut it = self.indices.iter().peekable();
        for i in 0..n {
            if it.peek() == Some(&&i) {
                it.next();
            } else {
                out.push(i);
            }
        }
        Self { indices: out }
    }

    fn check(&self, n: usize) -> Result<()> {
        if self.is_valid_for(n) {
            Ok(())
        } else {
            Err(invalid("subsystem", format!("sites exceed N = {n}")))
        }
    }
}

/// Entropies for a list of subsystem sizes, with standard errors (zero for a
/// single shot).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyProfile<T> {
    pub sizes: Vec<usize>,
    pub entropies: Vec<T>,
    pub errors: Vec<T>,
}

impl<T: Real> EntropyProfile<T> {
    pub fn new(sizes: Vec<usize>, entropies: Vec<T>, errors: Vec<T>) -> Result<Self> {
        if entropies.len() != sizes.len() {
            return Err(Error::DimensionMismatch { expected: sizes.len(), actual: entropies.len() });
        }
        if errors.len() != sizes.len() {
            return Err(Error::DimensionMismatch { expected: sizes.len(), actual: errors.len() });
        }
        if entropies.iter().any(|&s| !(s >= -T::lit(PROBABILITY_SLACK))) {
            return Err(invalid("entropies", "entropies must be non-negative"));
        }
        Ok(Self { sizes, entropies, errors })
    }

    /// Entropy of the leading block `0..m` for every `m` in `sizes`.
    pub fn single_shot(c: &CorrelationMatrix<T>, sizes: &[usize]) -> Result<Self> {
        let n = c.dim();
        let entropies = sizes
            .iter()
            .map(|&m| entanglement_entropy(c, &Subsystem::block(0, m, n)?))
            .collect::<Result<Vec<_>>>()?;
        Self::new(sizes.to_vec(), entropies, vec![T::zero(); sizes.len()])
    }
}

/// `−p ln p − (1−p) ln(1−p)` with `0 ln 0 = 0`. Accepts `p` within `1e-12`
/// of `[0, 1]` and clamps it.
pub fn binary_entropy<T: Real>(p: T) -> Result<T> {
    let slack = T::lit(PROBABILITY_SLACK);
    if !(p >= -slack && p <= T::one() + slack) {
        return Err(invalid("p", format!("probability must lie in [0, 1], got {p}")));
    }
    Ok(binary_entropy_clamped(p))
}

fn binary_entropy_clamped<T: Real>(p: T) -> T {
    if !(p > T::zero()) || p >= T::one() {
        return T::zero();
    }
    -(p * p.ln()) - (T::one() - p) * (-p).ln_1p()
}

/// Peschel entropy `−Σ_k [λ_k ln λ_k + (1−λ_k) ln(1−λ_k)]` over the
/// eigenvalues of `C` restricted to `sub`, each clamped to `[0, 1]`.
pub fn entanglement_entropy<T: Real>(c: &CorrelationMatrix<T>, sub: &Subsystem) -> Result<T> {
    sub.check(c.dim())?;
    if sub.is_empty() {
        return Ok(T::zero());
    }
    let restricted = c.restrict(sub.indices());
    let values = symmetric_eigenvalues(&restricted)?;
    Ok(values
        .into_iter()
        .map(|v| binary_entropy_clamped(v.max(T::zero()).min(T::one())))
        .sum())
}

/// Many-body state `Π_{a∈𝒜} d_a†|0⟩` with `d_a† = Σ_i ψ^a_i c_i†`, as `2^N`
/// amplitudes indexed by occupation mask. Operators are applied
/// right-to-left, so the highest mode acts first.
pub fn fock_state<T: Real>(
    model: &FreeFermionModel<T>,
    spec: &EigenstateSpec,
    stats: ParticleStatistics,
) -> Result<Vec<T>> {
    let n = model.n();
    if n > EXACT_MAX_SITES {
        return Err(invalid("n", format!("Fock-space oracle supports N ≤ {EXACT_MAX_SITES}, got {n}")));
    }
    if !spec.is_valid_for(n) {
        return Err(invalid("spec", format!("occupied modes exceed N = {n}")));
    }
    let dim = 1usize << n;
    let mut state = vec![T::zero(); dim];
    state[0] = T::one();
    for &a in spec.occupied().iter().rev() {
        let psi = model.mode(a);
        let mut next = vec![T::zero(); dim];
        for (mask, &amp) in state.iter().enumerate() {
            if amp == T::zero() {
                continue;
            }
            for (i, &coef) in psi.iter().enumerate() {
                if let Some((target, sign)) = stats.create(mask as u32, i) {
                    let v = coef * amp;
                    let t = target as usize;
                    next[t] = if sign < 0 { next[t] - v } else { next[t] + v };
                }
            }
        }
        state = next;
    }
    Ok(state)
}

/// Von Neumann entropy of the reduced density matrix of the eigenstate on
/// `sub`, computed on the full Fock space. `N ≤ 12`.
pub fn exact_reduced_entropy<T: Real>(
    model: &FreeFermionModel<T>,
    spec: &EigenstateSpec,
    sub: &Subsystem,
) -> Result<T> {
    exact_reduced_entropy_with(model, spec, sub, ParticleStatistics::Fermion)
}

pub fn exact_reduced_entropy_with<T: Real>(
    model: &FreeFermionModel<T>,
    spec: &EigenstateSpec,
    sub: &Subsystem,
    stats: ParticleStatistics,
) -> Result<T> {
    let n = model.n();
    sub.check(n)?;
    let state = fock_state(model, spec, stats)?;
    reduced_state_entropy(&state, n, sub, stats)
}

/// Entanglement entropy of a normalized `2^n`-amplitude state across
/// `sub | complement`.
///
/// Amplitudes are reshaped into `M[a, b]` after reordering every creation
/// string so that sites of `sub` come first; for fermions that reordering
/// contributes `(−1)^{#(b < a, both occupied)}`. The entropy follows from the
/// spectrum of the smaller Gram matrix `MMᵀ` or `MᵀM`.
pub fn reduced_state_entropy<T: Real>(
    state: &[T],
    n: usize,
    sub: &Subsystem,
    stats: ParticleStatistics,
) -> Result<T> {
    if state.len() != 1usize << n {
        return Err(Error::DimensionMismatch { expected: 1usize << n, actual: state.len() });
    }
    sub.check(n)?;
    let a_sites = sub.indices();
    let b_sites = sub.complement(n);
    let b_sites = b_sites.indices();
    let (da, db) = (1usize << a_sites.len(), 1usize << b_sites.len());

    // Column-major M: entry (a, b) at a + da·b.
    let mut m = vec![T::zero(); da * db];
    for (mask, &amp) in state.iter().enumerate() {
        if amp == T::zero() {
            continue;
        }
        let a = compress(mask, a_sites);
        let b = compress(mask, b_sites);
        let negative = stats == ParticleStatistics::Fermion && reorder_parity(mask, a_sites, b_sites);
        m[a + da * b] = if negative { -amp } else { amp };
    }

    let (small, large) = if da <= db { (da, db) } else { (db, da) };
    let at = |s: usize, l: usize| if da <= db { m[s + da * l] } else { m[l + da * s] };
    let mut lower: Vec<T> = Vec::with_capacity(small * (small + 1) / 2);
    for i in 0..small {
        for j in 0..=i {
            lower.push((0..large).map(|l| at(i, l) * at(j, l)).sum());
        }
    }
    let gram = SymmetricMatrix::from_lower(small, lower)?;
    let values = symmetric_eigenvalues(&gram)?;
    Ok(values
        .into_iter()
        .filter(|&v| v > T::zero())
        .map(|v| -(v * v.ln()))
        .sum::<T>()
        .max(T::zero()))
}

fn compress(mask: usize, sites: &[usize]) -> usize {
    sites.iter().enumerate().fold(0, |acc, (k, &s)| acc | ((mask >> s & 1) << k))
}

/// Parity of the number of pairs `(b, a)` with `b < a`, both occupied,
/// `a ∈ A`, `b ∈ B`.
fn reorder_parity(mask: usize, a_sites: &[usize], b_sites: &[usize]) -> bool {
    let mut swaps = 0usize;
    for &a in a_sites {
        if mask >> a & 1 == 0 {
            continue;
        }
        swaps += b_sites.iter().take_while(|&&b| b < a).filter(|&&b| mask >> b & 1 == 1).count();
    }
    swaps % 2 == 1
}

/// Ensemble entropy of `m ≤ N/2` sites in a single-particle eigenstate:
/// `−(m/N) ln(m/N) − (1−m/N) ln(1−m/N) − 1/(2(N−m))`.
pub fn predicted_entropy_single<T: Real>(n: usize, m: usize) -> Result<T> {
    if m == 0 || 2 * m > n {
        return Err(invalid("m", format!("need 1 ≤ m ≤ N/2, got m = {m} with N = {n}")));
    }
    let nf = T::from_usize_lossy(n);
    let f = T::from_usize_lossy(m) / nf;
    Ok(binary_entropy_clamped(f) - T::one() / (T::lit(2.0) * (nf - T::from_usize_lossy(m))))
}

/// Ensemble entropy of `m ≲ N_p` sites in an `N_p`-particle eigenstate:
/// `m·S₁ − m²/(2(N−N_p))` with `S₁` the binary entropy of the filling
/// `N_p/N`. The validity bound `m ≲ N_p` is not enforced.
pub fn predicted_entropy_multi<T: Real>(n: usize, np: usize, m: usize) -> Result<T> {
    if np == 0 || np >= n {
        return Err(invalid("np", format!("need 1 ≤ N_p ≤ N − 1, got {np} with N = {n}")));
    }
    if m == 0 {
        return Err(invalid("m", "subsystem size must be at least 1"));
    }
    let nf = T::from_usize_lossy(n);
    let s1 = binary_entropy_clamped(T::from_usize_lossy(np) / nf);
    let mf = T::from_usize_lossy(m);
    Ok(mf * s1 - mf * mf / (T::lit(2.0) * (nf - T::from_usize_lossy(np))))
}
