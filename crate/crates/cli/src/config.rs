//! Flat `key = value` configuration files and their merge with command-line flags.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use ethf_core::experiments::{ExperimentConfig, Mode};
use ethf_core::model::ModelParams;
use ethf_core::random_fock::ParticleStatistics;
use ethf_core::Seed;

use crate::error::CliError;

pub const DEFAULT_REALIZATIONS: usize = 100;
pub const DEFAULT_OUT_DIR: &str = "ethf-out";
pub const WORKERS_ENV: &str = "ETHF_WORKERS";

/// Every setting a run accepts. Absent fields fall back to the next source:
/// flags, then the config file, then defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub mode: Option<Mode>,
    pub seed: Option<u64>,
    pub n: Option<usize>,
    pub np: Option<usize>,
    pub filling: Option<f64>,
    pub alpha: Option<f64>,
    pub eta: Option<f64>,
    pub beta: Option<f64>,
    pub realizations: Option<usize>,
    pub sizes: Option<Vec<usize>>,
    pub mode_choices: Option<usize>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub statistics: Option<ParticleStatistics>,
    pub include_nonpositive: Option<bool>,
}

/// Resolved run: the experiment plus where and how to execute it.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub config: ExperimentConfig,
    pub out: PathBuf,
    /// Worker threads; `0` means one per available core.
    pub workers: usize,
}

pub fn parse_sizes(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<usize>().map_err(|e| format!("bad size `{t}`: {e}")))
        .collect()
}

pub fn parse_statistics(s: &str) -> Result<ParticleStatistics, String> {
    match s {
        "fermion" => Ok(ParticleStatistics::Fermion),
        "hardcore-boson" => Ok(ParticleStatistics::HardcoreBoson),
        other => Err(format!("unknown statistics `{other}`; expected fermion or hardcore-boson")),
    }
}

fn parse<T: FromStr>(key: &str, value: &str, origin: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    value.parse::<T>().map_err(|e| CliError::Config(format!("{origin}: `{key}`: cannot parse `{value}`: {e}")))
}

impl Settings {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config file {}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Parses `key = value` lines; blank lines and `#` comments are ignored.
    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        let mut s = Settings::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = format!("{origin}:{}", lineno + 1);
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| CliError::Config(format!("{at}: expected `key = value`, got `{line}`")))?;
            let key = key.replace('-', "_");
            match key.as_str() {
                "mode" => s.mode = Some(parse(&key, value, &at)?),
                "seed" => s.seed = Some(parse(&key, value, &at)?),
                "n" => s.n = Some(parse(&key, value, &at)?),
                "np" => s.np = Some(parse(&key, value, &at)?),
                "filling" => s.filling = Some(parse(&key, value, &at)?),
                "alpha" => s.alpha = Some(parse(&key, value, &at)?),
                "eta" => s.eta = Some(parse(&key, value, &at)?),
                "beta" => s.beta = Some(parse(&key, value, &at)?),
                "realizations" => s.realizations = Some(parse(&key, value, &at)?),
                "sizes" => s.sizes = Some(parse_sizes(value).map_err(|e| CliError::Config(format!("{at}: {e}")))?),
                "mode_choices" => s.mode_choices = Some(parse(&key, value, &at)?),
                "out" => s.out = Some(PathBuf::from(value)),
                "workers" => s.workers = Some(parse(&key, value, &at)?),
                "statistics" => {
                    s.statistics = Some(parse_statistics(value).map_err(|e| CliError::Config(format!("{at}: {e}")))?)
                }
                "include_nonpositive" => s.include_nonpositive = Some(parse(&key, value, &at)?),
                other => return Err(CliError::Config(format!("{at}: unknown key `{other}`"))),
            }
        }
        Ok(s)
    }

    /// Fields set in `flags` replace those in `self`.
    pub fn overlay(self, flags: Settings) -> Settings {
        Settings {
            mode: flags.mode.or(self.mode),
            seed: flags.seed.or(self.seed),
            n: flags.n.or(self.n),
            np: flags.np.or(self.np),
            filling: flags.filling.or(self.filling),
            alpha: flags.alpha.or(self.alpha),
            eta: flags.eta.or(self.eta),
            beta: flags.beta.or(self.beta),
            realizations: flags.realizations.or(self.realizations),
            sizes: flags.sizes.or(self.sizes),
            mode_choices: flags.mode_choices.or(self.mode_choices),
            out: flags.out.or(self.out),
            workers: flags.workers.or(self.workers),
            statistics: flags.statistics.or(self.statistics),
            include_nonpositive: flags.include_nonpositive.or(self.include_nonpositive),
        }
    }

    pub fn into_manifest(self) -> Result<RunManifest, CliError> {
        let missing = |field: &str| CliError::Config(format!("missing required setting `{field}`"));
        let mode = self.mode.ok_or_else(|| missing("mode"))?;
        let seed = self.seed.ok_or_else(|| missing("seed"))?;
        let n = self.n.ok_or_else(|| missing("n"))?;
        let alpha = self.alpha.ok_or_else(|| missing("alpha"))?;
        let eta = self.eta.unwrap_or(1.0);
        let params = ModelParams::new(n, alpha, eta)?;
        let np = match (self.np, self.filling) {
            (Some(_), Some(_)) => return Err(CliError::Config("set either `np` or `filling`, not both".into())),
            (Some(np), None) => np,
            (None, Some(f)) => {
                if !(0.0..=1.0).contains(&f) {
                    return Err(CliError::Config(format!("`filling` must lie in [0, 1], got {f}")));
                }
                (f * n as f64).round() as usize
            }
            (None, None) => return Err(missing("np")),
        };
        let mut config = ExperimentConfig::new(
            mode,
            params,
            np,
            self.realizations.unwrap_or(DEFAULT_REALIZATIONS),
            Seed(seed),
        );
        config.sizes = self.sizes.unwrap_or_default();
        config.beta = self.beta;
        config.mode_choices = self.mode_choices.unwrap_or(1);
        config.statistics = self.statistics.unwrap_or_default();
        config.exclude_nonpositive = !self.include_nonpositive.unwrap_or(false);
        config.validate()?;
        let workers = match self.workers {
            Some(w) => w,
            None => match std::env::var(WORKERS_ENV) {
                Ok(v) => v
                    .trim()
                    .parse()
                    .map_err(|e| CliError::Config(format!("{WORKERS_ENV}: cannot parse `{v}`: {e}")))?,
                Err(_) => 0,
            },
        };
        Ok(RunManifest { config, out: self.out.unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR)), workers })
    }
}
