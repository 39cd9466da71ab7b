//! `ethf`: ensemble runs, closed-form predictions and self-validation for
//! random free-fermion models.

mod config;
mod error;
mod validate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ethf_core::experiments::{entropy_prediction, energy_variance_exact, run, EnsembleReport, Mode};
use ethf_core::model::ModelParams;
use ethf_core::random_fock::ParticleStatistics;
use ethf_core::thermal::{
    avg_occupation, avg_occupation_high_t, avg_occupation_low_t, effective_beta_with_order, DEFAULT_QUADRATURE_ORDER,
};
use ethf_core::Seed;

use config::{parse_statistics, Settings};
use error::CliError;
use validate::{run_checks, Level};

#[derive(Debug, Parser)]
#[command(name = "ethf", version, about = "Eigenstate thermalization in random free-fermion models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a Monte Carlo ensemble and write report.json plus one CSV per quantity.
    Run(RunArgs),
    /// Print closed-form predictions without sampling.
    Predict(PredictArgs),
    /// Check the numerical core against brute-force oracles.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Config file of `key = value` lines; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (0 = all cores). Defaults to $ETHF_WORKERS.
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    mode: Option<Mode>,
    /// Number of sites N.
    #[arg(long)]
    n: Option<usize>,
    /// Number of particles N_p.
    #[arg(long)]
    np: Option<usize>,
    /// Filling N_p / N, rounded to the nearest particle number.
    #[arg(long)]
    filling: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    /// Inverse temperature; by default matched to the filling.
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    #[arg(long)]
    realizations: Option<usize>,
    /// Comma-separated subsystem sizes.
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    /// Occupation sets drawn per realization in the entropy scan.
    #[arg(long)]
    mode_choices: Option<usize>,
    /// Keep realizations with a non-positive single-particle energy.
    #[arg(long)]
    include_nonpositive: bool,
    #[arg(long, hide = true, value_parser = parse_statistics)]
    statistics: Option<ParticleStatistics>,
}

impl RunArgs {
    fn flags(&self) -> Settings {
        Settings {
            mode: self.mode,
            seed: self.seed,
            n: self.n,
            np: self.np,
            filling: self.filling,
            alpha: self.alpha,
            eta: self.eta,
            beta: self.beta,
            realizations: self.realizations,
            sizes: self.sizes.clone(),
            mode_choices: self.mode_choices,
            out: self.out.clone(),
            workers: self.workers,
            statistics: self.statistics,
            include_nonpositive: self.include_nonpositive.then_some(true),
        }
    }
}

#[derive(Debug, Args)]
struct PredictArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    eta: f64,
    #[arg(long)]
    np: Option<usize>,
    /// Filling N_p / N; also solved for the matching β.
    #[arg(long)]
    filling: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    /// Comma-separated subsystem sizes for entropy predictions.
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    /// Gauss-Chebyshev order for the semicircle averages.
    #[arg(long, default_value_t = DEFAULT_QUADRATURE_ORDER)]
    order: usize,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[arg(long, value_enum, default_value_t = Level::Fast)]
    level: Level,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, hide = true, value_parser = parse_statistics, default_value = "fermion")]
    statistics: ParticleStatistics,
}

fn fmt_opt(v: Option<f64>, prec: usize) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{v:.prec$e}"))
}

fn print_summary(report: &EnsembleReport) {
    println!("{:<44} {:>6} {:>14} {:>14} {:>8}  flag", "quantity", "x", "measured", "predicted", "z");
    for r in &report.records {
        let x = r.x.map_or_else(|| "-".to_string(), |x| format!("{x}"));
        let z = r.z.map_or_else(|| "-".to_string(), |z| format!("{z:+.2}"));
        let flag = if r.flagged { "!" } else { "" };
        println!(
            "{:<44} {:>6} {:>14} {:>14} {:>8}  {flag}",
            r.quantity,
            x,
            format!("{:.6e}", r.mean),
            fmt_opt(r.predicted, 6),
            z
        );
    }
    let flagged = report.flagged().count();
    println!(
        "realizations used: {}, excluded: {}, flagged records: {flagged}",
        report.meta.realizations_used, report.meta.excluded_realizations
    );
}

fn cmd_run(args: RunArgs) -> Result<(), CliError> {
    let file = match &args.config {
        Some(path) => Settings::from_file(path)?,
        None => Settings::default(),
    };
    let manifest = file.overlay(args.flags()).into_manifest()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(manifest.workers)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {} workers: {e}", manifest.workers)))?;
    let report = pool.install(|| run(&manifest.config))?;
    let written = report
        .write_to_dir(&manifest.out)
        .map_err(|e| CliError::Config(format!("cannot write to {}: {e}", manifest.out.display())))?;
    print_summary(&report);
    for path in written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_predict(args: PredictArgs) -> Result<(), CliError> {
    let p = ModelParams::new(args.n, args.alpha, args.eta)?;
    let n = args.n;
    let np = match (args.np, args.filling) {
        (Some(np), Some(f)) if (np as f64 / n as f64 - f).abs() > 0.5 / n as f64 => {
            return Err(CliError::Config(format!("np = {np} does not match filling = {f}")));
        }
        (Some(np), _) => Some(np),
        (None, Some(f)) if (0.0..=1.0).contains(&f) => Some((f * n as f64).round() as usize),
        (None, Some(f)) => return Err(CliError::Config(format!("`filling` must lie in [0, 1], got {f}"))),
        (None, None) => None,
    };
    if let Some(np) = np {
        if np > n {
            return Err(CliError::Config(format!("np = {np} exceeds n = {n}")));
        }
    }

    println!("N = {n}, α = {}, η = {}, R = {:.12e}", p.alpha, p.eta, p.radius());
    println!("single-particle energy mean: {:.12e}", p.alpha);
    println!("single-particle energy variance: {:.12e}", p.radius() * p.radius() / 4.0);
    if let Some(np) = np {
        println!("N_p = {np}, filling = {:.12e}", np as f64 / n as f64);
        println!("eigenstate energy mean: {:.12e}", np as f64 * p.alpha);
        println!("eigenstate energy variance (N_p η² N): {:.12e}", (np * n) as f64 * p.eta * p.eta);
        println!("eigenstate energy variance (exact finite N): {:.12e}", energy_variance_exact(n, np, p.eta));
    }

    let filling = args.filling.or(np.map(|np| np as f64 / n as f64));
    let beta = match (args.beta, filling) {
        (Some(b), _) => Some(b),
        (None, Some(f)) => {
            let beta = effective_beta_with_order(&p, f, args.order)?;
            println!("effective β for filling {f}: {beta:.12e}");
            Some(beta)
        }
        (None, None) => None,
    };
    if let Some(beta) = beta {
        let q = avg_occupation(&p, beta, args.order)?;
        println!("β = {beta:.12e}");
        println!("[n_β] quadrature: {:.12e}", q.n_mean);
        println!("[n_β²] quadrature: {:.12e}", q.n_sq_mean);
        let ab = p.alpha * beta;
        if ab.abs() < 1.0 {
            let h = avg_occupation_high_t(&p, beta);
            println!("[n_β] high-T (αβ = {ab:.3e}): {:.12e}", h.n_mean);
            println!("[n_β²] high-T (αβ = {ab:.3e}): {:.12e}", h.n_sq_mean);
        }
        let boltzmann = (-beta * (p.alpha - p.radius())).exp();
        if beta > 0.0 && boltzmann <= (-1f64).exp() {
            println!("e^(−β(α−R)) = {boltzmann:.3e}");
            let b = avg_occupation_low_t(&p, beta)?;
            println!("[n_β] Boltzmann closed form: {:.12e} (quadrature − closed form = {:.3e})", b.n_mean, q.n_mean - b.n_mean);
            println!("[n_β²] Boltzmann closed form: {:.12e} (quadrature − closed form = {:.3e})", b.n_sq_mean, q.n_sq_mean - b.n_sq_mean);
        }
    }

    if let Some(sizes) = &args.sizes {
        let np = np.ok_or_else(|| CliError::Config("entropy predictions need `np` or `filling`".into()))?;
        for &m in sizes {
            if m == 0 || m > n {
                return Err(CliError::Config(format!("subsystem size m = {m} must lie in 1..={n}")));
            }
            let (value, source, note) = entropy_prediction(n, np, m);
            let note = note.map(|s| format!(" ({s})")).unwrap_or_default();
            println!("entropy m = {m}: {} [{}]{note}", fmt_opt(value, 12), source.tag());
        }
    }
    Ok(())
}

fn cmd_validate(args: ValidateArgs) -> Result<(), CliError> {
    let checks = run_checks(args.level, args.statistics, Seed(args.seed))?;
    let mut failed = Vec::new();
    for c in &checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        if !c.passed {
            failed.push(c.name);
        }
    }
    if failed.is_empty() {
        println!("all {} checks passed", checks.len());
        Ok(())
    } else {
        Err(CliError::Validation(failed.join(", ")))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Validate(a) => cmd_validate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ethf: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
