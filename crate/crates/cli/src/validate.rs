//! Self-checks of the numerical core against brute-force oracles.

use ethf_core::entanglement::{entanglement_entropy, exact_reduced_entropy_with, fock_state, Subsystem};
use ethf_core::model::{build_model, correlation_matrix, sample_occupation, ModelParams};
use ethf_core::random_fock::{binomial, sector_operator_with, FockSector, ParticleStatistics};
use ethf_core::thermal::{avg_occupation, avg_occupation_low_t};
use ethf_core::Seed;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Level {
    Fast,
    Full,
}

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Self { name, passed, detail }
    }
}

struct Plan {
    oracle_sites: Vec<usize>,
    states_per_size: u64,
    projector_sites: Vec<usize>,
}

impl Level {
    fn plan(self) -> Plan {
        match self {
            Level::Fast => Plan { oracle_sites: vec![4, 6, 8], states_per_size: 3, projector_sites: vec![16, 64] },
            Level::Full => {
                Plan { oracle_sites: vec![4, 6, 8, 10], states_per_size: 8, projector_sites: vec![16, 64, 256] }
            }
        }
    }
}

fn oracle_params(n: usize) -> Result<ModelParams<f64>, CliError> {
    Ok(ModelParams::new(n, 4.0 * (n as f64).sqrt(), 1.0)?)
}

fn peschel_vs_exact(plan: &Plan, stats: ParticleStatistics, seed: Seed) -> Result<Check, CliError> {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for (k, &n) in plan.oracle_sites.iter().enumerate() {
        let s = seed.child(k as u64);
        let model = build_model(oracle_params(n)?, s.child(0))?;
        for r in 0..plan.states_per_size {
            let np = 1 + (r as usize) % (n - 1);
            let spec = sample_occupation(n, np, s.child(1 + r))?;
            let c = correlation_matrix(&model, &spec)?;
            for mask in 1..(1u64 << n) - 1 {
                let sub = Subsystem::from_mask(mask, n)?;
                let peschel = entanglement_entropy(&c, &sub)?;
                let exact = exact_reduced_entropy_with(&model, &spec, &sub, stats)?;
                worst = worst.max((peschel - exact).abs());
                cases += 1;
            }
        }
    }
    Ok(Check::new(
        "entropy-vs-fock-oracle",
        worst < 1e-8,
        format!("{cases} bipartitions, max |ΔS| = {worst:.2e} (< 1e-8)"),
    ))
}

fn correlator_vs_fock(plan: &Plan, stats: ParticleStatistics, seed: Seed) -> Result<Check, CliError> {
    let mut worst: f64 = 0.0;
    for (k, &n) in plan.oracle_sites.iter().enumerate() {
        let s = seed.child(100 + k as u64);
        let model = build_model(oracle_params(n)?, s.child(0))?;
        let spec = sample_occupation(n, n / 2, s.child(1))?;
        let state = fock_state(&model, &spec, stats)?;
        let c = correlation_matrix(&model, &spec)?;
        for i in 0..n {
            for j in 0..n {
                let mut v = 0.0;
                for (mask, &amp) in state.iter().enumerate() {
                    if let Some((target, sign)) = stats.hop(mask as u32, i, j) {
                        v += f64::from(sign) * state[target as usize] * amp;
                    }
                }
                worst = worst.max((v - c.get(i, j)).abs());
            }
        }
    }
    Ok(Check::new(
        "correlator-vs-fock-oracle",
        worst < 1e-10,
        format!("⟨c_i† c_j⟩ on N ∈ {:?}, max deviation {worst:.2e} (< 1e-10)", plan.oracle_sites),
    ))
}

fn projector(plan: &Plan, seed: Seed) -> Result<Check, CliError> {
    let mut worst_idem: f64 = 0.0;
    let mut worst_trace: f64 = 0.0;
    for (k, &n) in plan.projector_sites.iter().enumerate() {
        let s = seed.child(200 + k as u64);
        let model = build_model(ModelParams::new(n, 4.0 * (n as f64).sqrt(), 1.0)?, s.child(0))?;
        let spec = sample_occupation(n, n / 4, s.child(1))?;
        let c = correlation_matrix(&model, &spec)?;
        worst_idem = worst_idem.max(c.idempotency_error());
        worst_trace = worst_trace.max((c.trace() - (n / 4) as f64).abs());
    }
    Ok(Check::new(
        "projector",
        worst_idem < 1e-10 && worst_trace < 1e-9,
        format!("max |C² − C| = {worst_idem:.2e}, max |tr C − N_p| = {worst_trace:.2e}"),
    ))
}

fn quadrature_vs_bessel() -> Result<Check, CliError> {
    let p = ModelParams::new(16, 20.0, 1.0)?;
    let gap = p.alpha - p.radius();
    let mut worst: f64 = 0.0;
    let mut points = 0;
    for k in 0..20 {
        let beta = 0.01 * 500f64.powf(k as f64 / 19.0);
        if (-beta * gap).exp() >= 1e-3 {
            continue;
        }
        let q = avg_occupation(&p, beta, 256)?;
        let b = avg_occupation_low_t(&p, beta)?;
        worst = worst.max((q.n_mean / b.n_mean - 1.0).abs());
        points += 1;
    }
    Ok(Check::new(
        "quadrature-vs-bessel",
        points > 0 && worst < 1e-3,
        format!("{points} low-temperature points, max relative deviation {worst:.2e} (< 1e-3)"),
    ))
}

fn nnz_law(plan: &Plan, stats: ParticleStatistics) -> Result<Check, CliError> {
    let mut violations = 0;
    let mut sectors = 0;
    let n_max = *plan.oracle_sites.last().unwrap_or(&8);
    for n in 2..=n_max {
        for np in 0..=n {
            let sector = FockSector::build(n, np)?;
            sectors += 1;
            for i in 0..n {
                for j in 0..n {
                    let op = sector_operator_with(&sector, i, j, stats)?;
                    let want = match (np, i == j) {
                        (0, _) => 0,
                        (_, true) => binomial(n - 1, np - 1).unwrap_or(0),
                        (_, false) => binomial(n - 2, np - 1).unwrap_or(0),
                    };
                    let mut forward = op.entries().to_vec();
                    let mut back = sector_operator_with(&sector, j, i, stats)?.transpose().entries().to_vec();
                    forward.sort_unstable();
                    back.sort_unstable();
                    let hermitian = forward == back;
                    if op.nnz() as u128 != want || !hermitian {
                        violations += 1;
                    }
                }
            }
        }
    }
    Ok(Check::new(
        "sector-nnz-law",
        violations == 0,
        format!("{sectors} sectors up to N = {n_max}: {violations} operators violate nnz or hermiticity"),
    ))
}

fn hopping_sign(stats: ParticleStatistics) -> Check {
    let got = stats.hop(0b011, 2, 0);
    Check::new(
        "hopping-sign",
        got == Some((0b110, -1)),
        format!("c_2† c_0 |011⟩ = {got:?} (expected Some((6, -1)))"),
    )
}

pub fn run_checks(level: Level, stats: ParticleStatistics, seed: Seed) -> Result<Vec<Check>, CliError> {
    let plan = level.plan();
    Ok(vec![
        hopping_sign(stats),
        nnz_law(&plan, stats)?,
        correlator_vs_fock(&plan, stats, seed)?,
        peschel_vs_exact(&plan, stats, seed)?,
        projector(&plan, seed)?,
        quadrature_vs_bessel()?,
    ])
}
