//! Fixed-particle-number Fock sectors, fermionic hopping operators, and the
//! fully random sector comparison: Haar eigenvectors and GOE sector
//! Hamiltonians.
//!
//! Occupation masks use bit `i` for site `i`. The Jordan–Wigner string puts
//! site 0 leftmost, so `c_i†` acting on a mask picks up
//! `(−1)^{#occupied sites below i}`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::goe::{eigendecompose_symmetric, sample_goe, Matrix, SymmetricEigen, SymmetricMatrix};
use crate::model::{CorrelationMatrix, ModelParams};
use crate::rng::{normal, Seed};
use crate::scalar::Real;

/// Largest number of sites a mask can hold.
pub const MAX_SITES: usize = 24;
/// Default bound on the number of basis states in a sector.
pub const DEFAULT_SECTOR_CAP: usize = 1_000_000;
/// Bound on the sector dimension for dense sector Hamiltonians.
pub const DENSE_SECTOR_CAP: usize = 2000;

/// Exchange statistics used when applying ladder operators. Hard-core bosons
/// drop the Jordan–Wigner string; everything else is identical.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParticleStatistics {
    #[default]
    Fermion,
    HardcoreBoson,
}

impl ParticleStatistics {
    /// Sign of moving a ladder operator on `site` past the occupied sites below it.
    pub fn string_sign(self, mask: u32, site: usize) -> i8 {
        match self {
            ParticleStatistics::HardcoreBoson => 1,
            ParticleStatistics::Fermion => {
                let below = mask & ((1u32 << site) - 1);
                if below.count_ones().is_multiple_of(2) {
                    1
                } else {
                    -1
                }
            }
        }
    }

    /// `c_i†|mask⟩`, absent when `i` is occupied.
    pub fn create(self, mask: u32, i: usize) -> Option<(u32, i8)> {
        let bit = 1u32 << i;
        if mask & bit != 0 {
            return None;
        }
        Some((mask | bit, self.string_sign(mask, i)))
    }

    /// `c_j|mask⟩`, absent when `j` is empty.
    pub fn annihilate(self, mask: u32, j: usize) -> Option<(u32, i8)> {
        let bit = 1u32 << j;
        if mask & bit == 0 {
            return None;
        }
        Some((mask & !bit, self.string_sign(mask, j)))
    }

    /// `c_i† c_j |mask⟩`.
    pub fn hop(self, mask: u32, i: usize, j: usize) -> Option<(u32, i8)> {
        let (m1, s1) = self.annihilate(mask, j)?;
        let (m2, s2) = self.create(m1, i)?;
        Some((m2, s1 * s2))
    }
}

/// Fermionic `c_i† c_j` on an occupation mask: the new mask and its sign, or
/// `None` when the result vanishes.
///
/// ```
/// use ethf_core::random_fock::hopping_element;
/// assert_eq!(hopping_element(0b011, 2, 0), Some((0b110, -1)));
/// assert_eq!(hopping_element(0b010, 2, 0), None);
/// ```
pub fn hopping_element(state: u32, i: usize, j: usize) -> Option<(u32, i8)> {
    ParticleStatistics::Fermion.hop(state, i, j)
}

/// Exact binomial coefficient, `None` on `u128` overflow.
pub fn binomial(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for t in 0..k {
        // r·(n−t) is divisible by t+1 after the multiplication.
        r = r.checked_mul((n - t) as u128)? / (t as u128 + 1);
    }
    Some(r)
}

/// All occupation masks of `n` sites with `np` particles, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockSector {
    n: usize,
    np: usize,
    basis: Vec<u32>,
}

impl FockSector {
    pub fn build(n: usize, np: usize) -> Result<Self> {
        Self::build_with_cap(n, np, DEFAULT_SECTOR_CAP)
    }

    pub fn build_with_cap(n: usize, np: usize, cap: usize) -> Result<Self> {
        if n == 0 || n > MAX_SITES {
            return Err(invalid("n", format!("sector needs 1 ≤ N ≤ {MAX_SITES}, got {n}")));
        }
        if np > n {
            return Err(invalid("np", format!("particle number {np} exceeds N = {n}")));
        }
        let dim = binomial(n, np).expect("N ≤ 24 cannot overflow");
        if dim > cap as u128 {
            return Err(Error::SectorTooLarge { dim, cap });
        }
        let mut basis = Vec::with_capacity(dim as usize);
        if np == 0 {
            basis.push(0);
        } else {
            // Gosper's hack: next larger integer with the same popcount.
            let limit = 1u64 << n;
            let mut v: u64 = (1u64 << np) - 1;
            while v < limit {
                basis.push(v as u32);
                let c = v & v.wrapping_neg();
                let r = v + c;
                v = (((r ^ v) >> 2) / c) | r;
            }
        }
        debug_assert_eq!(basis.len() as u128, dim);
        Ok(Self { n, np, basis })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn particles(&self) -> usize {
        self.np
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[u32] {
        &self.basis
    }

    pub fn state(&self, index: usize) -> u32 {
        self.basis[index]
    }

    /// Position of `mask` in the basis.
    pub fn index_of(&self, mask: u32) -> Option<usize> {
        self.basis.binary_search(&mask).ok()
    }
}

/// Sparse `c_i† c_j` restricted to one sector. Each column holds at most one
/// entry, stored as `(row, col, ±1)` sorted by column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorOperator {
    dim: usize,
    i: usize,
    j: usize,
    entries: Vec<(usize, usize, i8)>,
}

impl SectorOperator {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sites(&self) -> (usize, usize) {
        (self.i, self.j)
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, usize, i8)] {
        &self.entries
    }

    pub fn trace(&self) -> i64 {
        self.entries.iter().filter(|e| e.0 == e.1).map(|e| e.2 as i64).sum()
    }

    pub fn transpose(&self) -> Self {
        let mut entries: Vec<_> = self.entries.iter().map(|&(r, c, s)| (c, r, s)).collect();
        entries.sort_unstable_by_key(|e| (e.1, e.0));
        Self { dim: self.dim, i: self.j, j: self.i, entries }
    }

    pub fn to_dense<T: Real>(&self) -> Matrix<T> {
        let mut m = Matrix::zeros(self.dim, self.dim);
        for &(r, c, s) in &self.entries {
            m[(r, c)] = T::lit(s as f64);
        }
        m
    }

    /// `ψᵀ M ψ`.
    pub fn quadratic_form<T: Real>(&self, psi: &[T]) -> Result<T> {
        if psi.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, actual: psi.len() });
        }
        Ok(self
            .entries
            .iter()
            .map(|&(r, c, s)| {
                let v = psi[r] * psi[c];
                if s < 0 {
                    -v
                } else {
                    v
                }
            })
            .sum())
    }
}

fn check_site(n: usize, name: &'static str, site: usize) -> Result<()> {
    if site >= n {
        return Err(invalid(name, format!("site {site} out of range for N = {n}")));
    }
    Ok(())
}

/// `c_i† c_j` in `sector` with fermionic signs.
pub fn sector_number_operator(sector: &FockSector, i: usize, j: usize) -> Result<SectorOperator> {
    sector_operator_with(sector, i, j, ParticleStatistics::Fermion)
}

pub fn sector_operator_with(
    sector: &FockSector,
    i: usize,
    j: usize,
    stats: ParticleStatistics,
) -> Result<SectorOperator> {
    check_site(sector.n, "i", i)?;
    check_site(sector.n, "j", j)?;
    let mut entries = Vec::new();
    for (col, &mask) in sector.basis.iter().enumerate() {
        if let Some((target, sign)) = stats.hop(mask, i, j) {
            let row = sector.index_of(target).expect("hopping conserves particle number");
            entries.push((row, col, sign));
        }
    }
    Ok(SectorOperator { dim: sector.dim(), i, j, entries })
}

/// Uniform random unit vector: normalized i.i.d. standard Gaussians.
pub fn sample_haar_vector<T: Real>(dim: usize, seed: Seed) -> Result<Vec<T>> {
    if dim == 0 {
        return Err(invalid("dim", "must be at least 1"));
    }
    let mut rng = seed.rng();
    loop {
        let v: Vec<T> = (0..dim).map(|_| normal::<T, _>(&mut rng)).collect();
        let norm = v.iter().map(|&x| x * x).sum::<T>().sqrt();
        if norm > T::zero() {
            return Ok(v.into_iter().map(|x| x / norm).collect());
        }
    }
}

/// `C^r_ij = ⟨ψ| c_i† c_j |ψ⟩` for a sector state `ψ`.
pub fn random_state_correlation<T: Real>(sector: &FockSector, psi: &[T]) -> Result<CorrelationMatrix<T>> {
    random_state_correlation_with(sector, psi, ParticleStatistics::Fermion)
}

pub fn random_state_correlation_with<T: Real>(
    sector: &FockSector,
    psi: &[T],
    stats: ParticleStatistics,
) -> Result<CorrelationMatrix<T>> {
    if psi.len() != sector.dim() {
        return Err(Error::DimensionMismatch { expected: sector.dim(), actual: psi.len() });
    }
    let n = sector.n;
    let mut c = Matrix::zeros(n, n);
    for (k, &mask) in sector.basis.iter().enumerate() {
        let amp = psi[k];
        if amp == T::zero() {
            continue;
        }
        for j in 0..n {
            if mask & (1 << j) == 0 {
                continue;
            }
            c[(j, j)] = c[(j, j)] + amp * amp;
            // Each connected pair of basis states is visited once, through the
            // hop that moves a particle upward.
            for i in j + 1..n {
                if let Some((target, sign)) = stats.hop(mask, i, j) {
                    let t = sector.index_of(target).expect("hopping conserves particle number");
                    let v = psi[t] * amp;
                    c[(i, j)] = c[(i, j)] + if sign < 0 { -v } else { v };
                }
            }
        }
    }
    for j in 0..n {
        for i in j + 1..n {
            c[(j, i)] = c[(i, j)];
        }
    }
    CorrelationMatrix::from_matrix(c)
}

/// Spectrum and eigenvectors of `N_p·α·1 + GOE(dim, η̄)` on the sector.
pub fn sample_sector_hamiltonian<T: Real>(
    sector: &FockSector,
    alpha: T,
    etabar: T,
    seed: Seed,
) -> Result<SymmetricEigen<T>> {
    let dim = sector.dim();
    if dim > DENSE_SECTOR_CAP {
        return Err(Error::SectorTooLarge { dim: dim as u128, cap: DENSE_SECTOR_CAP });
    }
    if !alpha.is_finite() {
        return Err(invalid("alpha", format!("must be finite, got {alpha}")));
    }
    if !(etabar >= T::zero()) || !etabar.is_finite() {
        return Err(invalid("etabar", format!("must be finite and non-negative, got {etabar}")));
    }
    let shift = T::from_usize_lossy(sector.np) * alpha;
    let mut h = if etabar == T::zero() {
        SymmetricMatrix::zeros(dim)?
    } else {
        sample_goe(dim, etabar, seed)?
    };
    h.shift_diagonal(shift);
    eigendecompose_symmetric(&h)
}

/// `η̄ = η·√(N_p·N / C(N, N_p))`, which equates the sector energy variance
/// `C(N,N_p)·η̄²` with the free-fermion value `N_p·N·η²`.
pub fn match_etabar<T: Real>(params: &ModelParams<T>, np: usize) -> Result<T> {
    params.validate()?;
    let n = params.n;
    if np == 0 || np >= n {
        return Err(invalid("np", format!("need 1 ≤ N_p ≤ N − 1, got {np} with N = {n}")));
    }
    let dim = binomial_f64(n, np);
    Ok(params.eta * T::lit((np as f64 * n as f64 / dim).sqrt()))
}

fn binomial_f64(n: usize, k: usize) -> f64 {
    match binomial(n, k) {
        Some(b) => b as f64,
        None => {
            let k = k.min(n - k);
            (0..k).map(|t| ((n - t) as f64 / (t + 1) as f64).ln()).sum::<f64>().exp()
        }
    }
}

/// Gaussian-amplitude sector law `C(N−2, N_p−1) / C(N, N_p)²` for the
/// off-diagonal variance of `C^r`.
pub fn sector_offdiag_variance(n: usize, np: usize) -> Result<f64> {
    check_sector_counts(n, np)?;
    let d = binomial_f64(n, np);
    Ok(hop_pairs(n, np) / (d * d))
}

/// Exact finite-dimension value of the same variance for Haar-random unit
/// vectors: `C(N−2, N_p−1) / (d(d+2))`, `d = C(N, N_p)`.
pub fn sector_offdiag_variance_haar(n: usize, np: usize) -> Result<f64> {
    check_sector_counts(n, np)?;
    let d = binomial_f64(n, np);
    Ok(hop_pairs(n, np) / (d * (d + 2.0)))
}

fn hop_pairs(n: usize, np: usize) -> f64 {
    if np == 0 {
        0.0
    } else {
        binomial_f64(n - 2, np - 1)
    }
}

fn check_sector_counts(n: usize, np: usize) -> Result<()> {
    if n < 2 {
        return Err(invalid("n", format!("off-diagonal entries need N ≥ 2, got {n}")));
    }
    if np > n {
        return Err(invalid("np", format!("particle number {np} exceeds N = {n}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), Some(6));
        assert_eq!(binomial(8, 3), Some(56));
        assert_eq!(binomial(3, 5), Some(0));
        assert_eq!(binomial(60, 30), Some(118264581564861424));
        assert!(binomial(200, 100).is_none());
        assert!((binomial_f64(200, 100) / 9.054851465610328e58 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn sector_construction() {
        let s = FockSector::build(2, 1).unwrap();
        assert_eq!(s.basis(), &[0b01, 0b10]);
        assert_eq!(FockSector::build(4, 2).unwrap().dim(), 6);
        for np in 0..=10 {
            let a = FockSector::build(10, np).unwrap();
            let b = FockSector::build(10, 10 - np).unwrap();
            assert_eq!(a.dim(), b.dim());
            assert!(a.basis().windows(2).all(|w| w[0] < w[1]));
            assert!(a.basis().iter().all(|m| m.count_ones() as usize == np));
            for (k, &m) in a.basis().iter().enumerate() {
                assert_eq!(a.index_of(m), Some(k));
            }
        }
        assert_eq!(FockSector::build(5, 0).unwrap().basis(), &[0]);
        assert_eq!(FockSector::build(24, 24).unwrap().basis(), &[(1 << 24) - 1]);
        assert!(matches!(FockSector::build(24, 12), Err(Error::SectorTooLarge { .. })));
        assert!(FockSector::build_with_cap(24, 12, 3_000_000).is_ok());
        assert!(FockSector::build(25, 1).is_err());
        assert!(FockSector::build(3, 4).is_err());
    }

    #[test]
    fn hopping_examples() {
        assert_eq!(hopping_element(0b100, 1, 0), None);
        assert_eq!(hopping_element(0b101, 2, 2), Some((0b101, 1)));
        assert_eq!(hopping_element(0b011, 2, 0), Some((0b110, -1)));
        assert_eq!(hopping_element(0b011, 1, 0), None);
        // Hop across two occupied sites: even string.
        assert_eq!(hopping_element(0b0111, 3, 0), Some((0b1110, 1)));
        assert_eq!(ParticleStatistics::HardcoreBoson.hop(0b011, 2, 0), Some((0b110, 1)));
    }

    /// Brute-force `c_i†c_j` from explicit Jordan–Wigner matrices on the full
    /// `2^n` space: `c_k = Z ⊗ … ⊗ Z ⊗ σ⁻ ⊗ 1 ⊗ …` with site 0 leftmost.
    fn jw_dense(n: usize, i: usize, j: usize) -> Vec<Vec<f64>> {
        let dim = 1usize << n;
        let lower = |k: usize| {
            let mut m = vec![vec![0.0; dim]; dim];
            for s in 0..dim {
                if s & (1 << k) != 0 {
                    let z: i32 = (0..k).map(|q| ((s >> q) & 1) as i32).sum();
                    m[s & !(1 << k)][s] = if z % 2 == 0 { 1.0 } else { -1.0 };
                }
            }
            m
        };
        let ci = lower(i);
        let cj = lower(j);
        let mut out = vec![vec![0.0; dim]; dim];
        for r in 0..dim {
            for c in 0..dim {
                // (c_i)ᵀ c_j
                out[r][c] = (0..dim).map(|k| ci[k][r] * cj[k][c]).sum();
            }
        }
        out
    }

    #[test]
    fn hopping_matches_explicit_jordan_wigner_matrices() {
        let n = 4;
        for i in 0..n {
            for j in 0..n {
                let m = jw_dense(n, i, j);
                for s in 0..(1u32 << n) {
                    let col: Vec<(usize, f64)> = (0..16).filter(|&r| m[r][s as usize] != 0.0).map(|r| (r, m[r][s as usize])).collect();
                    match hopping_element(s, i, j) {
                        None => assert!(col.is_empty()),
                        Some((t, sign)) => assert_eq!(col, vec![(t as usize, sign as f64)]),
                    }
                }
            }
        }
    }

    #[test]
    fn operator_counts_and_hermiticity() {
        for n in 2..=10 {
            for np in 0..=n {
                let s = FockSector::build(n, np).unwrap();
                for i in 0..n {
                    let d = sector_number_operator(&s, i, i).unwrap();
                    assert_eq!(d.trace() as u128, if np == 0 { 0 } else { binomial(n - 1, np - 1).unwrap() });
                    for j in 0..n {
                        if i == j {
                            continue;
                        }
                        let op = sector_number_operator(&s, i, j).unwrap();
                        let want = if np == 0 { 0 } else { binomial(n - 2, np - 1).unwrap() };
                        assert_eq!(op.nnz() as u128, want, "N={n} Np={np} i={i} j={j}");
                        if n <= 8 {
                            assert_eq!(op.transpose(), sector_number_operator(&s, j, i).unwrap());
                        }
                    }
                }
            }
        }
        let s = FockSector::build(3, 1).unwrap();
        assert!(sector_number_operator(&s, 3, 0).is_err());
    }

    #[test]
    fn number_operators_commute() {
        let s = FockSector::build(6, 3).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let a = sector_number_operator(&s, i, i).unwrap().to_dense::<f64>();
                let b = sector_number_operator(&s, j, j).unwrap().to_dense::<f64>();
                let ab = a.matmul(&b).unwrap();
                let ba = b.matmul(&a).unwrap();
                assert_eq!(ab.max_abs_diff(&ba), Some(0.0));
            }
        }
    }

    #[test]
    fn haar_vectors() {
        let v = sample_haar_vector::<f64>(1, Seed(4)).unwrap();
        assert_eq!(v[0].abs(), 1.0);
        let v = sample_haar_vector::<f64>(100, Seed(5)).unwrap();
        assert!((v.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(sample_haar_vector::<f64>(0, Seed(0)).is_err());

        let dim = 64;
        let draws = 10_000;
        let sq: Vec<f64> = (0..draws).map(|k| sample_haar_vector::<f64>(dim, Seed(6).child(k)).unwrap()[3].powi(2)).collect();
        let mean = sq.iter().sum::<f64>() / draws as f64;
        let var = sq.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (draws - 1) as f64;
        let se = (var / draws as f64).sqrt();
        assert!((mean - 1.0 / dim as f64).abs() < 4.0 * se, "{mean} ± {se}");
    }

    #[test]
    fn correlation_from_sector_state() {
        let s = FockSector::build(6, 2).unwrap();
        let psi = sample_haar_vector::<f64>(s.dim(), Seed(9)).unwrap();
        let c = random_state_correlation(&s, &psi).unwrap();
        assert!((c.trace() - 2.0).abs() < 1e-12);
        for i in 0..6 {
            for j in 0..6 {
                let q = sector_number_operator(&s, i, j).unwrap().quadratic_form(&psi).unwrap();
                assert!((c.get(i, j) - q).abs() < 1e-14);
            }
        }
        let empty = FockSector::build(4, 0).unwrap();
        let c0 = random_state_correlation(&empty, &[1.0f64]).unwrap();
        assert_eq!(c0.as_matrix().max_abs(), 0.0);
        assert!(random_state_correlation(&s, &psi[1..]).is_err());
    }

    #[test]
    fn sector_hamiltonian() {
        let s = FockSector::build(8, 3).unwrap();
        let flat = sample_sector_hamiltonian(&s, 2.0f64, 0.0, Seed(1)).unwrap();
        assert!(flat.values.iter().all(|&e| e == 6.0));
        let h = sample_sector_hamiltonian(&s, 2.0f64, 0.5, Seed(2)).unwrap();
        let mean = h.values.iter().sum::<f64>() / 56.0;
        assert!((mean - 6.0).abs() < 0.5);
        assert!(h.values.iter().all(|&e| (e - 6.0).abs() < 1.3 * 2.0 * 56f64.sqrt() * 0.5));
        assert!(sample_sector_hamiltonian(&s, 2.0f64, -1.0, Seed(2)).is_err());
        let big = FockSector::build(14, 7).unwrap();
        assert!(sample_sector_hamiltonian(&big, 1.0f64, 1.0, Seed(0)).is_err());
    }

    #[test]
    fn sector_energy_variance() {
        // Pooled over realizations, the spectrum variance is C(N,Np)·η̄².
        let s = FockSector::build(8, 3).unwrap();
        let etabar = 0.7;
        let mut all = Vec::new();
        for k in 0..200 {
            all.extend(sample_sector_hamiltonian(&s, 1.0f64, etabar, Seed(11).child(k)).unwrap().values);
        }
        let mean = all.iter().sum::<f64>() / all.len() as f64;
        let var = all.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / all.len() as f64;
        assert!((mean - 3.0).abs() < 0.2);
        let want = 56.0 * etabar * etabar;
        assert!((var / want - 1.0).abs() < 0.1, "{var} vs {want}");
    }

    #[test]
    fn etabar_matching() {
        let p2 = ModelParams::new(2, 10.0f64, 1.5).unwrap();
        assert!((match_etabar(&p2, 1).unwrap() - 1.5).abs() < 1e-15);
        let p8 = ModelParams::new(8, 10.0f64, 1.0).unwrap();
        let e = match_etabar(&p8, 3).unwrap();
        assert!((e - (24.0f64 / 56.0).sqrt()).abs() < 1e-15);
        assert!((56.0 * e * e - 24.0).abs() < 1e-12);
        assert!(match_etabar(&p8, 0).is_err());
        assert!(match_etabar(&p8, 8).is_err());
    }

    #[test]
    fn sector_laws() {
        assert!((sector_offdiag_variance(8, 3).unwrap() - 15.0 / 3136.0).abs() < 1e-18);
        assert!((sector_offdiag_variance_haar(8, 3).unwrap() - 15.0 / 3248.0).abs() < 1e-18);
        assert!((sector_offdiag_variance(2, 1).unwrap() - 0.25).abs() < 1e-18);
        assert!((sector_offdiag_variance_haar(2, 1).unwrap() - 0.125).abs() < 1e-18);
        assert_eq!(sector_offdiag_variance(4, 0).unwrap(), 0.0);
    }
}
