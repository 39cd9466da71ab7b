//! Monte Carlo ensembles over model realizations. Every measured quantity is
//! paired with its analytic prediction and a z-score in a report.
//!
//! Realization `r` draws all of its randomness from `seed.child(r)`, and
//! per-realization results are combined in index order, so reports do not
//! depend on how many worker threads run them.

mod report;
mod stats;

pub use report::{
    format_float, EnsembleReport, PredictionSource, Record, ReportMeta, CSV_HEADER, SCHEMA_VERSION,
    Z_FLAG_THRESHOLD,
};
pub use stats::{merge_accumulators, variance_with_stderr, StatAccumulator};

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entanglement::{entanglement_entropy, predicted_entropy_multi, predicted_entropy_single, Subsystem};
use crate::error::{invalid, Result};
use crate::model::{
    build_model, correlation_matrix, eigenstate_energy, sample_occupation, CorrelationMatrix, FreeFermionModel,
    ModelParams,
};
use crate::random_fock::{
    binomial, match_etabar, random_state_correlation_with, sample_haar_vector, sample_sector_hamiltonian,
    sector_offdiag_variance, sector_offdiag_variance_haar, FockSector, ParticleStatistics, DENSE_SECTOR_CAP,
};
use crate::rng::Seed;
use crate::thermal::{
    avg_occupation, avg_occupation_low_t, effective_beta, fermi_occupation, thermal_correlation_matrix,
    ThermalAverages, DEFAULT_QUADRATURE_ORDER,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    EthCorrelators,
    EntropyScan,
    ThermalCompare,
    RandomFockCompare,
    SpectrumStats,
}

impl Mode {
    pub const ALL: [Mode; 5] = [
        Mode::EthCorrelators,
        Mode::EntropyScan,
        Mode::ThermalCompare,
        Mode::RandomFockCompare,
        Mode::SpectrumStats,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mode::EthCorrelators => "eth-correlators",
            Mode::EntropyScan => "entropy-scan",
            Mode::ThermalCompare => "thermal-compare",
            Mode::RandomFockCompare => "random-fock-compare",
            Mode::SpectrumStats => "spectrum-stats",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| {
            let names: Vec<_> = Mode::ALL.iter().map(|m| m.name()).collect();
            invalid("mode", format!("unknown mode `{s}`; expected one of {}", names.join(", ")))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub params: ModelParams<f64>,
    /// Particle number `N_p`.
    pub np: usize,
    pub realizations: usize,
    /// Subsystem sizes for entropy scans.
    pub sizes: Vec<usize>,
    /// Inverse temperature; when absent it is matched to the filling `N_p/N`.
    pub beta: Option<f64>,
    pub seed: Seed,
    /// Occupation sets drawn per realization in entropy scans.
    pub mode_choices: usize,
    /// Drop realizations with a non-positive single-particle energy.
    pub exclude_nonpositive: bool,
    pub statistics: ParticleStatistics,
}

impl ExperimentConfig {
    pub fn new(mode: Mode, params: ModelParams<f64>, np: usize, realizations: usize, seed: Seed) -> Self {
        Self {
            mode,
            params,
            np,
            realizations,
            sizes: Vec::new(),
            beta: None,
            seed,
            mode_choices: 1,
            exclude_nonpositive: true,
            statistics: ParticleStatistics::Fermion,
        }
    }

    pub fn with_sizes(mut self, sizes: Vec<usize>) -> Self {
        self.sizes = sizes;
        self
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = Some(beta);
        self
    }

    pub fn with_mode_choices(mut self, k: usize) -> Self {
        self.mode_choices = k;
        self
    }

    pub fn with_statistics(mut self, statistics: ParticleStatistics) -> Self {
        self.statistics = statistics;
        self
    }

    pub fn filling(&self) -> f64 {
        self.np as f64 / self.params.n as f64
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        let n = self.params.n;
        if self.realizations == 0 {
            return Err(invalid("realizations", "must be at least 1"));
        }
        if self.np > n {
            return Err(invalid("np", format!("particle number {} exceeds N = {n}", self.np)));
        }
        if let Some(&m) = self.sizes.iter().find(|&&m| m > n) {
            return Err(invalid("sizes", format!("subsystem size {m} exceeds N = {n}")));
        }
        if self.mode == Mode::EntropyScan && self.sizes.is_empty() {
            return Err(invalid("sizes", "entropy scans need at least one subsystem size"));
        }
        if self.mode_choices == 0 {
            return Err(invalid("mode_choices", "must be at least 1"));
        }
        if let Some(b) = self.beta {
            if !(b >= 0.0) || !b.is_finite() {
                return Err(invalid("beta", format!("must be finite and non-negative, got {b}")));
            }
        }
        Ok(())
    }

    fn expect_mode(&self, mode: Mode) -> Result<()> {
        if self.mode != mode {
            return Err(invalid("mode", format!("configuration is for `{}`, not `{mode}`", self.mode)));
        }
        self.validate()
    }

    /// Configured `β`, or the one whose average occupation equals the filling.
    pub fn resolve_beta(&self) -> Result<f64> {
        match self.beta {
            Some(b) => Ok(b),
            None => effective_beta(&self.params, self.filling()).map_err(|_| {
                invalid(
                    "beta",
                    format!(
                        "filling N_p/N = {} has no non-negative temperature; pass beta explicitly or use 0 < N_p ≤ N/2",
                        self.filling()
                    ),
                )
            }),
        }
    }
}

/// Dispatches on `cfg.mode`.
pub fn run(cfg: &ExperimentConfig) -> Result<EnsembleReport> {
    match cfg.mode {
        Mode::EthCorrelators => run_eth_correlators(cfg),
        Mode::EntropyScan => run_entropy_scan(cfg),
        Mode::ThermalCompare => run_thermal_compare(cfg),
        Mode::RandomFockCompare => run_random_fock_compare(cfg),
        Mode::SpectrumStats => run_spectrum_stats(cfg),
    }
}

/// Per-realization results in index order, and the number of excluded realizations.
fn over_realizations<S, F>(cfg: &ExperimentConfig, f: F) -> Result<(Vec<S>, u64)>
where
    S: Send,
    F: Fn(&FreeFermionModel<f64>, Seed) -> Result<S> + Sync,
{
    let results: Vec<Option<S>> = (0..cfg.realizations as u64)
        .into_par_iter()
        .map(|r| {
            let seed = cfg.seed.child(r);
            let model = build_model(cfg.params, seed.child(0))?;
            if cfg.exclude_nonpositive && model.has_nonpositive_energy() {
                return Ok(None);
            }
            f(&model, seed).map(Some)
        })
        .collect::<Result<_>>()?;
    let excluded = results.iter().filter(|s| s.is_none()).count() as u64;
    Ok((results.into_iter().flatten().collect(), excluded))
}

fn finish(cfg: &ExperimentConfig, records: Vec<Record>, used: usize, excluded: u64, start: Instant) -> EnsembleReport {
    EnsembleReport {
        meta: ReportMeta {
            schema_version: SCHEMA_VERSION.to_string(),
            generator: concat!("ethf ", env!("CARGO_PKG_VERSION")).to_string(),
            config: cfg.clone(),
            seed: cfg.seed.0,
            wall_time_seconds: start.elapsed().as_secs_f64(),
            realizations_used: used as u64,
            excluded_realizations: excluded,
        },
        records,
    }
}

fn acc<T>(samples: &[T], f: impl Fn(&T) -> f64) -> StatAccumulator {
    StatAccumulator::from_samples(samples.iter().map(f))
}

fn offdiag_mean_square(c: &CorrelationMatrix<f64>) -> f64 {
    let off = c.off_diagonal();
    off.iter().map(|x| x * x).sum::<f64>() / off.len() as f64
}

fn diag_mean(c: &CorrelationMatrix<f64>) -> f64 {
    c.trace() / c.dim() as f64
}

/// Exact Haar value of `[(C^Ψ_ij)²]`, `i ≠ j`: `N_p(N−N_p)/(N(N+2)(N−1))`.
pub fn pure_offdiag_variance_haar(n: usize, np: usize) -> f64 {
    let (n, np) = (n as f64, np as f64);
    np * (n - np) / (n * (n + 2.0) * (n - 1.0))
}

/// Haar value of `[(C^β_ij)²]`, `i ≠ j`, with the spectral sums replaced by
/// their semicircle averages: `N([(n_β)²] − [n_β]²)/((N−1)(N+2))`.
pub fn thermal_offdiag_variance_haar(n: usize, avg: &ThermalAverages<f64>) -> f64 {
    let nf = n as f64;
    nf * avg.n_variance() / ((nf - 1.0) * (nf + 2.0))
}

/// Exact variance of `Σ_{a∈𝒜} E_a` over the GOE and uniform `N_p`-subsets:
/// `N_p(N−N_p)/(N−1)·(N+1−2/N)η² + 2N_p²η²/N`.
pub fn energy_variance_exact(n: usize, np: usize, eta: f64) -> f64 {
    if n == 1 {
        return (np * np) as f64 * 2.0 * eta * eta;
    }
    let (nf, p) = (n as f64, np as f64);
    p * (nf - p) / (nf - 1.0) * (nf + 1.0 - 2.0 / nf) * eta * eta + 2.0 * p * p * eta * eta / nf
}

struct EthSample {
    pure_diag: f64,
    pure_off: f64,
    thermal_diag: f64,
    thermal_off: f64,
    max_abs: f64,
    frobenius: f64,
}

/// Pure-eigenstate versus thermal correlation matrices at the matched `β`.
pub fn run_eth_correlators(cfg: &ExperimentConfig) -> Result<EnsembleReport> {
    cfg.expect_mode(Mode::EthCorrelators)?;
    let start = Instant::now();
    let (n, np) = (cfg.params.n, cfg.np);
    let beta = cfg.resolve_beta()?;
    let avg = avg_occupation(&cfg.params, beta, DEFAULT_QUADRATURE_ORDER)?;

    let (samples, excluded) = over_realizations(cfg, |model, seed| {
        let spec = sample_occupation(n, np, seed.child(1))?;
        let cp = correlation_matrix(model, &spec)?;
        let cb = thermal_correlation_matrix(model, beta)?;
        let has_off = n > 1;
        let diff = cp.as_matrix().max_abs_diff(cb.as_matrix()).expect("same shape");
        let frob = cp
            .as_matrix()
            .as_column_major()
            .iter()
            .zip(cb.as_matrix().as_column_major())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        Ok(EthSample {
            pure_diag: diag_mean(&cp),
            pure_off: if has_off { offdiag_mean_square(&cp) } else { 0.0 },
            thermal_diag: diag_mean(&cb),
            thermal_off: if has_off { offdiag_mean_square(&cb) } else { 0.0 },
            max_abs: diff,
            frobenius: frob / (n as f64).sqrt(),
        })
    })?;

    let nf = n as f64;
    let filling = np as f64 / nf;
    let beta_note = if cfg.beta.is_some() { "configured" } else { "matched to the filling" };
    let mut records = vec![
        Record::from_estimate("beta", 1, beta, 0.0, 0.0).note(beta_note),
        Record::from_accumulator("purec_diag_mean", &acc(&samples, |s| s.pure_diag))
            .predict(filling, PredictionSource::Purec),
    ];
    if n > 1 {
        records.push(
            Record::from_accumulator("purec_offdiag_variance", &acc(&samples, |s| s.pure_off))
                .predict(filling / nf, PredictionSource::Purec)
                .reference(pure_offdiag_variance_haar(n, np)),
        );
    }
    records.push(
        Record::from_accumulator("thermalc_diag_mean", &acc(&samples, |s| s.thermal_diag))
            .predict(avg.n_mean, PredictionSource::N),
    );
    if n > 1 {
        records.push(
            Record::from_accumulator("thermalc_offdiag_variance", &acc(&samples, |s| s.thermal_off))
                .predict(avg.n_sq_mean / nf, PredictionSource::Thermalc)
                .reference(thermal_offdiag_variance_haar(n, &avg)),
        );
    }
    records.push(
        Record::from_accumulator("eth_diag_mean_difference", &acc(&samples, |s| s.pure_diag - s.thermal_diag))
            .predict(0.0, PredictionSource::Thermalc),
    );
    records.push(Record::from_accumulator("eth_max_abs_difference", &acc(&samples, |s| s.max_abs)));
    records.push(Record::from_accumulator("eth_frobenius_difference_per_site", &acc(&samples, |s| s.frobenius)));
    Ok(finish(cfg, records, samples.len(), excluded, start))
}

/// Prediction for the entropy of `m` sites in an `N_p`-particle eigenstate.
///
/// Uses the particle-hole symmetry `N_p → N − N_p` and, for pure states,
/// `S(A) = S(complement)` to bring `(N_p, m)` into the range where a formula
/// applies. Returns `None` past `m ≳ N_p`.
pub fn entropy_prediction(n: usize, np: usize, m: usize) -> (Option<f64>, PredictionSource, Option<String>) {
    let np_eff = np.min(n - np);
    let m_eff = m.min(n - m);
    let mut notes = Vec::new();
    if np_eff != np {
        notes.push(format!("particle-hole: N_p → {np_eff}"));
    }
    if m_eff != m {
        notes.push(format!("complement: m → {m_eff}"));
    }
    let join = |mut notes: Vec<String>, extra: Option<&str>| {
        if let Some(e) = extra {
            notes.push(e.to_string());
        }
        (!notes.is_empty()).then(|| notes.join("; "))
    };
    if np_eff == 0 {
        return (None, PredictionSource::None, join(notes, Some("product state: entropy vanishes")));
    }
    if m_eff == 0 {
        return (None, PredictionSource::None, join(notes, Some("whole system: pure state")));
    }
    if np_eff == 1 {
        let v = predicted_entropy_single(n, m_eff).expect("1 ≤ m_eff ≤ N/2");
        return (Some(v), PredictionSource::Ent1, join(notes, None));
    }
    match m_eff.cmp(&np_eff) {
        std::cmp::Ordering::Greater => {
            (None, PredictionSource::None, join(notes, Some("m > N_p: outside the extensive regime")))
        }
        ord => {
            let v = predicted_entropy_multi(n, np_eff, m_eff).expect("1 ≤ N_p ≤ N − 1");
            let boundary = (ord == std::cmp::Ordering::Equal).then_some("m = N_p boundary");
            (Some(v), PredictionSource::Entmany, join(notes, boundary))
        }
    }
}

/// Entanglement entropy of random contiguous blocks of each size in `sizes`.
pub fn run_entropy_scan(cfg: &ExperimentConfig) -> Result<EnsembleReport> {
    cfg.expect_mode(Mode::EntropyScan)?;
    let start = Instant::now();
    let (n, np) = (cfg.params.n, cfg.np);
    let choices = cfg.mode_choices;

    let (samples, excluded) = over_realizations(cfg, |model, seed| {
        let mut means = vec![0.0; cfg.sizes.len()];
        for c in 0..choices as u64 {
            let spec = sample_occupation(n, np, seed.child(1).child(c))?;
            let corr = correlation_matrix(model, &spec)?;
            let mut rng = seed.child(2).child(c).rng();
            for (k, &m) in cfg.sizes.iter().enumerate() {
                let start = rng.random_range(0..=n - m);
                means[k] += entanglement_entropy(&corr, &Subsystem::block(start, m, n)?)?;
            }
        }
        Ok(means.into_iter().map(|s| s / choices as f64).collect::<Vec<f64>>())
    })?;

    let mut records = Vec::with_capacity(cfg.sizes.len());
    for (k, &m) in cfg.sizes.iter().enumerate() {
        let mut rec = Record::from_accumulator("entropy", &acc(&samples, |s| s[k])).at(m as f64);
        let (pred, source, note) = entropy_prediction(n, np, m);
        if let Some(p) = pred {
            rec = rec.predict(p, source);
        }
        if let Some(note) = note {
            rec = rec.note(note);
        }
        records.push(rec);
    }
    Ok(finish(cfg, records, samples.len(), excluded, start))
}

struct ThermalSample {
    n_mean: f64,
    n_sq_mean: f64,
    diag: f64,
    off: f64,
}

/// Spectrum-averaged Fermi occupations and thermal correlators against the
/// semicircle averages.
pub fn run_thermal_compare(cfg: &ExperimentConfig) -> Result<EnsembleReport> {
    cfg.expect_mode(Mode::ThermalCompare)?;
    let start = Instant::now();
    let n = cfg.params.n;
    let beta = cfg.resolve_beta()?;
    let avg = avg_occupation(&cfg.params, beta, DEFAULT_QUADRATURE_ORDER)?;
    let closed = if beta > 0.0 { Some(avg_occupation_low_t(&cfg.params, beta)?) } else { None };

    let (samples, excluded) = over_realizations(cfg, |model, _| {
        let occ: Vec<f64> = model.energies().iter().map(|&e| fermi_occupation(e, beta)).collect();
        let cb = thermal_correlation_matrix(model, beta)?;
        Ok(ThermalSample {
            n_mean: occ.iter().sum::<f64>() / n as f64,
            n_sq_mean: occ.iter().map(|x| x * x).sum::<f64>() / n as f64,
            diag: diag_mean(&cb),
            off: if n > 1 { offdiag_mean_square(&cb) } else { 0.0 },
        })
    })?;

    let beta_note = if cfg.beta.is_some() { "configured" } else { "matched to the filling" };
    let mut n_rec =
        Record::from_accumulator("occupation_mean", &acc(&samples, |s| s.n_mean)).predict(avg.n_mean, PredictionSource::N);
    let mut nn_rec = Record::from_accumulator("occupation_sq_mean", &acc(&samples, |s| s.n_sq_mean))
        .predict(avg.n_sq_mean, PredictionSource::Nn);
    if let Some(c) = closed {
        n_rec = n_rec.reference(c.n_mean).note("reference: Boltzmann closed form");
        nn_rec = nn_rec.reference(c.n_sq_mean).note("reference: Boltzmann closed form");
    }
    let mut records = vec![Record::from_estimate("beta", 1, beta, 0.0, 0.0).note(beta_note), n_rec, nn_rec];
    records.push(
        Record::from_accumulator("thermalc_diag_mean", &acc(&samples, |s| s.diag)).predict(avg.n_mean, PredictionSource::N),
    );
    if n > 1 {
        records.push(
            Record::from_accumulator("thermalc_offdiag_variance", &acc(&samples, |s| s.off))
                .predict(avg.n_sq_mean / n as f64, PredictionSource::Thermalc)
                .reference(thermal_offdiag_variance_haar(n, &avg)),
        );
    }
    Ok(finish(cfg, records, samples.len(), excluded, start))
}

struct FockSample {
    haar_diag: f64,
    haar_off: f64,
    sector_off: Option<f64>,
    sector_energy_mean: Option<f64>,
    sector_energy_spread: Option<f64>,
    free_off: f64,
}

/// Correlators of fully random sector states (Haar vectors and eigenvectors
/// of GOE sector Hamiltonians) next to the free-fermion eigenstates.
pub fn run_random_fock_compare(cfg: &ExperimentConfig) -> Result<EnsembleReport> {
    cfg.expect_mode(Mode::RandomFockCompare)?;
    let start = Instant::now();
    let (n, np) = (cfg.params.n, cfg.np);
    let sector = FockSector::build(n, np)?;
    let dim = sector.dim();
    let dense = dim <= DENSE_SECTOR_CAP;
    let etabar = if np >= 1 && np < n { match_etabar(&cfg.params, np)? } else { cfg.params.eta };
    let alpha = cfg.params.alpha;
    let center = np as f64 * alpha;
    let stats = cfg.statistics;

    let (samples, excluded) = over_realizations(cfg, |model, seed| {
        let has_off = n > 1;
        let psi = sample_haar_vector::<f64>(dim, seed.child(2))?;
        let cr = random_state_correlation_with(&sector, &psi, stats)?;
        let (mut sector_off, mut e_mean, mut e_spread) = (None, None, None);
        if dense {
            let eig = sample_sector_hamiltonian(&sector, alpha, etabar, seed.child(3))?;
            let k = seed.child(4).rng().random_range(0..dim);
            let cs = random_state_correlation_with(&sector, eig.vectors.column(k), stats)?;
            sector_off = has_off.then(|| offdiag_mean_square(&cs));
            e_mean = Some(eig.values.iter().sum::<f64>() / dim as f64);
            e_spread = Some(eig.values.iter().map(|e| (e - center) * (e - center)).sum::<f64>() / dim as f64);
        }
        let spec = sample_occupation(n, np, seed.child(1))?;
        let cp = correlation_matrix(model, &spec)?;
        Ok(FockSample {
            haar_diag: diag_mean(&cr),
            haar_off: if has_off { offdiag_mean_square(&cr) } else { 0.0 },
            sector_off,
            sector_energy_mean: e_mean,
            sector_energy_spread: e_spread,
            free_off: if has_off { offdiag_mean_square(&cp) } else { 0.0 },
        })
    })?;

    let nf = n as f64;
    let mut records = vec![
        Record::from_estimate("sector_dimension", 1, dim as f64, 0.0, 0.0),
        Record::from_accumulator("random_haar_diag_mean", &acc(&samples, |s| s.haar_diag))
            .predict(np as f64 / nf, PredictionSource::RanC),
    ];
    if n > 1 {
        let law = sector_offdiag_variance(n, np)?;
        let haar = sector_offdiag_variance_haar(n, np)?;
        let haar_acc = acc(&samples, |s| s.haar_off);
        records.push(
            Record::from_accumulator("random_haar_offdiag_variance", &haar_acc)
                .predict(law, PredictionSource::RanC)
                .reference(haar),
        );
        if dense {
            records.push(
                Record::from_accumulator("random_sector_offdiag_variance", &acc(&samples, |s| s.sector_off.unwrap_or(0.0)))
                    .predict(law, PredictionSource::RanC)
                    .reference(haar),
            );
            records.push(
                Record::from_accumulator(
                    "random_sector_minus_haar_offdiag_variance",
                    &acc(&samples, |s| s.sector_off.unwrap_or(0.0) - s.haar_off),
                )
                .predict(0.0, PredictionSource::RanC),
            );
        }
        let free_acc = acc(&samples, |s| s.free_off);
        let free_pred = np as f64 / (nf * nf);
        let free_haar = pure_offdiag_variance_haar(n, np);
        records.push(
            Record::from_accumulator("free_offdiag_variance", &free_acc)
                .predict(free_pred, PredictionSource::Purec)
                .reference(free_haar),
        );
        if haar_acc.mean() > 0.0 && law > 0.0 {
            // Delta-method standard error of a ratio of independent means.
            let ratio = free_acc.mean() / haar_acc.mean();
            let rel = ((free_acc.stderr() / free_acc.mean()).powi(2) + (haar_acc.stderr() / haar_acc.mean()).powi(2)).sqrt();
            records.push(
                Record::from_estimate("free_to_random_variance_ratio", haar_acc.count(), ratio, 0.0, ratio * rel)
                    .predict(free_pred / law, PredictionSource::RanC)
                    .reference(free_haar / haar),
            );
        }
    }
    if dense {
        let binom = binomial(n, np).expect("sector exists") as f64;
        records.push(
            Record::from_accumulator("sector_energy_mean", &acc(&samples, |s| s.sector_energy_mean.unwrap_or(0.0)))
                .predict(center, PredictionSource::RanE),
        );
        let var_rec = Record::from_accumulator("sector_energy_variance", &acc(&samples, |s| s.sector_energy_spread.unwrap_or(0.0)));
        let var_rec = if np == 0 || np == n {
            var_rec.note("single state: no spread")
        } else {
            var_rec.predict(binom * etabar * etabar, PredictionSource::RanE).reference((binom + 1.0) * etabar * etabar)
        };
        records.push(var_rec.note(format!("etabar = {}", format_float(etabar))));
    }
    Ok(finish(cfg, records, samples.len(), excluded, start))
}

/// Eigenstate energies `Σ_{a∈𝒜} E_a` over fresh realizations and occupation sets.
pub fn run_spectrum_stats(cfg: &ExperimentConfig) -> Result<EnsembleReport> {
    cfg.expect_mode(Mode::SpectrumStats)?;
    let start = Instant::now();
    let (n, np) = (cfg.params.n, cfg.np);
    let (energies, excluded) = over_realizations(cfg, |model, seed| {
        let spec = sample_occupation(n, np, seed.child(1))?;
        eigenstate_energy(model, &spec)
    })?;
    let p = &cfg.params;
    let mean_acc = StatAccumulator::from_samples(energies.iter().copied());
    let (var, var_se) = variance_with_stderr(&energies);
    let records = vec![
        Record::from_accumulator("energy_mean", &mean_acc).predict(np as f64 * p.alpha, PredictionSource::E),
        Record::from_estimate("energy_variance", energies.len() as u64, var, var_se * var_se * energies.len() as f64, var_se)
            .predict(np as f64 * n as f64 * p.eta * p.eta, PredictionSource::E)
            .reference(energy_variance_exact(n, np, p.eta)),
    ];
    Ok(finish(cfg, records, energies.len(), excluded, start))
}
