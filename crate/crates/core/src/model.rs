//! One realization of the random quadratic Hamiltonian
//! `H = α Σ c_i†c_i + η Σ c_i† V_ij c_j`, its many-body eigenstates (labelled
//! by occupied single-particle modes), and their exact correlation matrices.

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::goe::{axpy, eigendecompose_symmetric, sample_goe, Matrix, SemicircleLaw, SymmetricMatrix};
use crate::rng::Seed;
use crate::scalar::Real;

/// Ensemble parameters `(N, α, η)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams<T> {
    pub n: usize,
    pub alpha: T,
    pub eta: T,
}

impl<T: Real> ModelParams<T> {
    /// Validates `N ≥ 1`, `α, η > 0` and `α > 2√N·η` (positive single-particle spectrum).
    pub fn new(n: usize, alpha: T, eta: T) -> Result<Self> {
        let p = Self { n, alpha, eta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(invalid("n", "number of sites must be at least 1"));
        }
        if !(self.alpha > T::zero()) || !self.alpha.is_finite() {
            return Err(invalid("alpha", format!("must be finite and positive, got {}", self.alpha)));
        }
        if !(self.eta > T::zero()) || !self.eta.is_finite() {
            return Err(invalid("eta", format!("must be finite and positive, got {}", self.eta)));
        }
        let r = self.radius();
        if !(self.alpha > r) {
            return Err(invalid(
                "alpha",
                format!("must exceed the semicircle radius 2√N·η = {r}, got {}", self.alpha),
            ));
        }
        Ok(())
    }

    /// Semicircle radius `R = 2√N·η`.
    pub fn radius(&self) -> T {
        T::lit(2.0) * T::from_usize_lossy(self.n).sqrt() * self.eta
    }

    pub fn semicircle(&self) -> SemicircleLaw<T> {
        SemicircleLaw::new(self.radius()).expect("validated parameters have positive radius")
    }
}

/// Single-particle energies `E_a = α + ε_a` (ascending) with eigenvectors `ψ^a` as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeFermionModel<T> {
    params: ModelParams<T>,
    energies: Vec<T>,
    eigvecs: Matrix<T>,
    trace_coupling: T,
}

impl<T: Real> FreeFermionModel<T> {
    pub fn params(&self) -> &ModelParams<T> {
        &self.params
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn energies(&self) -> &[T] {
        &self.energies
    }

    pub fn eigvecs(&self) -> &Matrix<T> {
        &self.eigvecs
    }

    /// Mode `a` as a vector over sites.
    pub fn mode(&self, a: usize) -> &[T] {
        self.eigvecs.column(a)
    }

    /// Trace of the sampled coupling matrix `ηV`.
    pub fn coupling_trace(&self) -> T {
        self.trace_coupling
    }

    /// True when some single-particle energy is not strictly positive, i.e. the
    /// sample fluctuated past the semicircle edge. Such realizations are kept
    /// but flagged.
    pub fn has_nonpositive_energy(&self) -> bool {
        self.energies.first().is_some_and(|&e| e <= T::zero())
    }
}

/// Samples `ηV` from the GOE and diagonalizes `α·1 + ηV`.
pub fn build_model<T: Real>(params: ModelParams<T>, seed: Seed) -> Result<FreeFermionModel<T>> {
    params.validate()?;
    let coupling: SymmetricMatrix<T> = sample_goe(params.n, params.eta, seed)?;
    let trace_coupling = coupling.trace();
    let eig = eigendecompose_symmetric(&coupling)?;
    let energies = eig.values.iter().map(|&e| params.alpha + e).collect();
    Ok(FreeFermionModel { params, energies, eigvecs: eig.vectors, trace_coupling })
}

/// Set of occupied single-particle modes labelling one many-body eigenstate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EigenstateSpec {
    occupied: Vec<usize>,
}

impl EigenstateSpec {
    /// Sorts the indices; they must be distinct and below `n`.
    pub fn new(mut occupied: Vec<usize>, n: usize) -> Result<Self> {
        occupied.sort_unstable();
        if occupied.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("occupied", "mode indices must be distinct"));
        }
        if let Some(&last) = occupied.last() {
            if last >= n {
                return Err(invalid("occupied", format!("mode index {last} out of range for N = {n}")));
            }
        }
        Ok(Self { occupied })
    }

    pub fn vacuum() -> Self {
        Self { occupied: Vec::new() }
    }

    pub fn filled(n: usize) -> Self {
        Self { occupied: (0..n).collect() }
    }

    pub fn occupied(&self) -> &[usize] {
        &self.occupied
    }

    /// Particle number `N_p`.
    pub fn particles(&self) -> usize {
        self.occupied.len()
    }

    pub fn is_valid_for(&self, n: usize) -> bool {
        self.occupied.last().is_none_or(|&a| a < n)
    }

    fn check(&self, n: usize) -> Result<()> {
        if self.is_valid_for(n) {
            Ok(())
        } else {
            Err(invalid("spec", format!("occupied modes exceed N = {n}")))
        }
    }
}

/// Uniformly random `np`-subset of `0..n`.
pub fn sample_occupation(n: usize, np: usize, seed: Seed) -> Result<EigenstateSpec> {
    if n == 0 {
        return Err(invalid("n", "number of sites must be at least 1"));
    }
    if np > n {
        return Err(invalid("np", format!("particle number {np} exceeds N = {n}")));
    }
    let mut rng = seed.rng();
    let mut occupied = index::sample(&mut rng, n, np).into_vec();
    occupied.sort_unstable();
    Ok(EigenstateSpec { occupied })
}

/// `Σ_{a∈𝒜} E_a`.
pub fn eigenstate_energy<T: Real>(model: &FreeFermionModel<T>, spec: &EigenstateSpec) -> Result<T> {
    spec.check(model.n())?;
    Ok(spec.occupied.iter().map(|&a| model.energies[a]).sum())
}

/// Two-point function `C_ij = ⟨c_i†c_j⟩`, real symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix<T> {
    entries: Matrix<T>,
}

impl<T: Real> CorrelationMatrix<T> {
    /// Wraps a square matrix; requires exact symmetry.
    pub fn from_matrix(entries: Matrix<T>) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::DimensionMismatch { expected: entries.rows(), actual: entries.cols() });
        }
        if !entries.is_symmetric(T::zero()) {
            return Err(invalid("entries", "correlation matrix must be symmetric"));
        }
        Ok(Self { entries })
    }

    /// `Σ_a w_a ψ^a (ψ^a)ᵀ` over the listed modes. The lower triangle is
    /// accumulated and mirrored, so the result is exactly symmetric.
    pub(crate) fn from_weighted_modes(
        vectors: &Matrix<T>,
        modes: impl Iterator<Item = (usize, T)>,
    ) -> Self {
        let n = vectors.rows();
        let mut entries = Matrix::zeros(n, n);
        for (a, w) in modes {
            if w == T::zero() {
                continue;
            }
            let psi = vectors.column(a);
            for j in 0..n {
                let s = w * psi[j];
                if s != T::zero() {
                    axpy(s, &psi[j..], &mut entries.column_mut(j)[j..]);
                }
            }
        }
        for j in 0..n {
            for i in j + 1..n {
                entries[(j, i)] = entries[(i, j)];
            }
        }
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.rows()
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries[(i, j)]
    }

    pub fn as_matrix(&self) -> &Matrix<T> {
        &self.entries
    }

    pub fn trace(&self) -> T {
        self.entries.trace()
    }

    /// Restriction to the given sites (rows and columns). `sites` must be non-empty.
    pub fn restrict(&self, sites: &[usize]) -> SymmetricMatrix<T> {
        let m = sites.len();
        assert!(m > 0, "restriction to an empty site list");
        let mut lower = Vec::with_capacity(m * (m + 1) / 2);
        for i in 0..m {
            for j in 0..=i {
                lower.push(self.entries[(sites[i], sites[j])]);
            }
        }
        SymmetricMatrix::from_lower(m, lower).expect("packed length matches")
    }

    /// `max |C² − C|`; zero for a pure Gaussian eigenstate.
    pub fn idempotency_error(&self) -> T {
        let sq = self.entries.matmul(&self.entries).expect("square");
        sq.max_abs_diff(&self.entries).expect("same shape")
    }

    /// Diagonal entries.
    pub fn diagonal(&self) -> Vec<T> {
        (0..self.dim()).map(|i| self.entries[(i, i)]).collect()
    }

    /// Strictly-upper-triangular entries `C_ij`, `i < j`, row-major order.
    pub fn off_diagonal(&self) -> Vec<T> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                out.push(self.entries[(i, j)]);
            }
        }
        out
    }

    /// `I − C`.
    pub fn complement(&self) -> Self {
        let n = self.dim();
        Self { entries: Matrix::from_fn(n, n, |i, j| {
            let id = if i == j { T::one() } else { T::zero() };
            id - self.entries[(i, j)]
        }) }
    }
}

/// Pure-eigenstate correlations `C_ij = Σ_{a∈𝒜} ψ^a_i ψ^a_j`: a rank-`N_p` projector.
pub fn correlation_matrix<T: Real>(
    model: &FreeFermionModel<T>,
    spec: &EigenstateSpec,
) -> Result<CorrelationMatrix<T>> {
    spec.check(model.n())?;
    Ok(CorrelationMatrix::from_weighted_modes(
        &model.eigvecs,
        spec.occupied.iter().map(|&a| (a, T::one())),
    ))
}

/// Particle-hole partner: the complementary occupation set.
pub fn particle_hole_complement(spec: &EigenstateSpec, n: usize) -> Result<EigenstateSpec> {
    spec.check(n)?;
    let mut occupied = Vec::with_capacity(n - spec.particles());
    let mut it = spec.occupied.iter().peekable();
    for a in 0..n {
        if it.peek() == Some(&&a) {
            it.next();
        } else {
            occupied.push(a);
        }
    }
    Ok(EigenstateSpec { occupied })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(n: usize) -> ModelParams<f64> {
        ModelParams::new(n, 4.0 * (n as f64).sqrt() + 1.0, 1.0).unwrap()
    }

    #[test]
    fn params_enforce_positive_spectrum_condition() {
        assert!(ModelParams::new(16, 8.0, 1.0).is_err()); // R = 8
        assert!(ModelParams::new(16, 8.01, 1.0).is_ok());
        assert!(ModelParams::new(0, 1.0, 1.0).is_err());
        assert!(ModelParams::new(4, 5.0, 0.0).is_err());
        assert!(ModelParams::new(4, f64::NAN, 1.0).is_err());
        assert_eq!(ModelParams::new(16, 20.0, 1.0).unwrap().radius(), 8.0);
    }

    #[test]
    fn single_site_model_is_alpha_plus_diagonal_draw() {
        let p = ModelParams::new(1, 3.0, 0.5).unwrap();
        let m = build_model(p, Seed(4)).unwrap();
        let g = sample_goe::<f64>(1, 0.5, Seed(4)).unwrap().get(0, 0);
        assert_eq!(m.energies(), &[3.0 + g]);
        assert_eq!(m.mode(0), &[1.0]);
    }

    #[test]
    fn model_is_deterministic_and_sorted() {
        let p = params(64);
        let a = build_model(p, Seed(10)).unwrap();
        let b = build_model(p, Seed(10)).unwrap();
        assert_eq!(a, b);
        assert!(a.energies().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn spectrum_sits_inside_support_around_alpha() {
        let p = ModelParams::new(64, 20.0, 1.0).unwrap();
        let m = build_model(p, Seed(77)).unwrap();
        let r = p.radius();
        assert!(m.energies().iter().all(|&e| e > 20.0 - 2.0 * r && e < 20.0 + 2.0 * r));
        let mean = m.energies().iter().sum::<f64>() / 64.0;
        // Mean eigenvalue = trace/N has standard deviation η√(2/N).
        assert!((mean - 20.0).abs() < 3.0 * (1.0f64 * 64f64.sqrt()) / 64f64.sqrt());
        assert!(!m.has_nonpositive_energy());
    }

    #[test]
    fn occupation_edge_cases() {
        assert_eq!(sample_occupation(5, 0, Seed(1)).unwrap(), EigenstateSpec::vacuum());
        assert_eq!(sample_occupation(5, 5, Seed(1)).unwrap(), EigenstateSpec::filled(5));
        assert!(sample_occupation(5, 6, Seed(1)).is_err());
        assert_eq!(sample_occupation(9, 4, Seed(3)).unwrap(), sample_occupation(9, 4, Seed(3)).unwrap());
    }

    #[test]
    fn occupation_sampling_is_uniform_over_subsets() {
        // Enumeration oracle: the six 2-subsets of {0,1,2,3}.
        let subsets: Vec<Vec<usize>> =
            (0..4).flat_map(|a| (a + 1..4).map(move |b| vec![a, b])).collect();
        assert_eq!(subsets.len(), 6);
        let draws = 60_000u64;
        let mut counts = vec![0u64; 6];
        for k in 0..draws {
            let s = sample_occupation(4, 2, Seed(123).child(k)).unwrap();
            let idx = subsets.iter().position(|x| x.as_slice() == s.occupied()).unwrap();
            counts[idx] += 1;
        }
        let p = 1.0 / 6.0;
        let sd = (draws as f64 * p * (1.0 - p)).sqrt();
        for c in counts {
            assert!((c as f64 - draws as f64 * p).abs() < 3.0 * sd, "count {c}");
        }
    }

    #[test]
    fn spec_validation() {
        assert!(EigenstateSpec::new(vec![1, 1], 4).is_err());
        assert!(EigenstateSpec::new(vec![4], 4).is_err());
        assert_eq!(EigenstateSpec::new(vec![3, 0], 4).unwrap().occupied(), &[0, 3]);
    }

    #[test]
    fn energy_of_vacuum_and_filled_states() {
        let p = params(12);
        let m = build_model(p, Seed(5)).unwrap();
        assert_eq!(eigenstate_energy(&m, &EigenstateSpec::vacuum()).unwrap(), 0.0);
        let full = eigenstate_energy(&m, &EigenstateSpec::filled(12)).unwrap();
        let expect = 12.0 * p.alpha + m.coupling_trace();
        assert!((full - expect).abs() < 1e-10 * expect.abs());
        assert!(eigenstate_energy(&m, &EigenstateSpec::filled(13)).is_err());
    }

    #[test]
    fn single_mode_energy_moments() {
        // One mode per realization: mean α, variance = semicircle second moment Nη².
        let p = ModelParams::new(16, 20.0, 1.0).unwrap();
        let reps = 4000u64;
        let energies: Vec<f64> = (0..reps)
            .map(|k| {
                let seed = Seed(31).child(k);
                let m = build_model(p, seed.child(0)).unwrap();
                let s = sample_occupation(16, 1, seed.child(1)).unwrap();
                eigenstate_energy(&m, &s).unwrap()
            })
            .collect();
        let mean = energies.iter().sum::<f64>() / reps as f64;
        let var = energies.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
        let se_mean = (var / reps as f64).sqrt();
        assert!((mean - 20.0).abs() < 4.0 * se_mean, "mean {mean}");
        // GOE with this diagonal convention has E[tr V²]/N = (N+1)η².
        let exact = 17.0;
        assert!((var / 16.0 - 1.0).abs() < 0.1, "variance {var}");
        assert!((var - exact).abs() < 4.0 * exact * (2.0 / reps as f64).sqrt(), "variance {var}");
    }

    #[test]
    fn correlation_of_vacuum_and_filled() {
        let m = build_model(params(10), Seed(8)).unwrap();
        let c0 = correlation_matrix(&m, &EigenstateSpec::vacuum()).unwrap();
        assert_eq!(c0.as_matrix().max_abs(), 0.0);
        let c1 = correlation_matrix(&m, &EigenstateSpec::filled(10)).unwrap();
        assert!(c1.as_matrix().max_abs_diff(&Matrix::identity(10)).unwrap() < 1e-12);
    }

    #[test]
    fn complement_is_involutive_and_sums_to_identity() {
        let n = 8;
        let m = build_model(params(n), Seed(19)).unwrap();
        assert_eq!(particle_hole_complement(&EigenstateSpec::vacuum(), n).unwrap(), EigenstateSpec::filled(n));
        for k in 0..20 {
            let np = (k % (n as u64 + 1)) as usize;
            let s = sample_occupation(n, np, Seed(k)).unwrap();
            let c = particle_hole_complement(&s, n).unwrap();
            assert_eq!(particle_hole_complement(&c, n).unwrap(), s);
            let sum = correlation_matrix(&m, &s).unwrap().as_matrix().clone();
            let other = correlation_matrix(&m, &c).unwrap();
            let total = Matrix::from_fn(n, n, |i, j| sum[(i, j)] + other.get(i, j));
            assert!(total.max_abs_diff(&Matrix::identity(n)).unwrap() < 1e-12);
            let via_map = correlation_matrix(&m, &s).unwrap().complement();
            assert!(via_map.as_matrix().max_abs_diff(other.as_matrix()).unwrap() < 1e-12);
        }
    }

    #[test]
    fn eigenvector_entries_follow_haar_moments() {
        // [ψ^a_i] = 0 and [(ψ^a_i)²] = 1/N, using entry (0, a) across realizations.
        let n = 32;
        let p = params(n);
        let reps = 600u64;
        let mut first = Vec::new();
        let mut second = Vec::new();
        for k in 0..reps {
            let m = build_model(p, Seed(900).child(k)).unwrap();
            // Sign fixing biases the first component of each vector; use an interior site.
            let x = m.mode((k % n as u64) as usize)[n / 2];
            first.push(x);
            second.push(x * x);
        }
        let stats = |v: &[f64]| {
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (v.len() - 1) as f64;
            (mean, (var / v.len() as f64).sqrt())
        };
        let (m1, se1) = stats(&first);
        let (m2, se2) = stats(&second);
        assert!(m1.abs() < 4.0 * se1, "{m1} ± {se1}");
        assert!((m2 - 1.0 / n as f64).abs() < 4.0 * se2, "{m2} ± {se2}");
    }

    proptest! {
        #[test]
        fn projector_and_trace_invariants(n in 1usize..40, seed in any::<u64>(), frac in 0.0f64..=1.0) {
            let np = ((n as f64) * frac).round() as usize;
            let m = build_model(params(n), Seed(seed)).unwrap();
            let s = sample_occupation(n, np, Seed(seed).child(1)).unwrap();
            let c = correlation_matrix(&m, &s).unwrap();
            prop_assert!((c.trace() - np as f64).abs() < 1e-10);
            prop_assert!(c.idempotency_error() < 1e-10);
            prop_assert!(c.as_matrix().is_symmetric(0.0));
        }
    }
}
