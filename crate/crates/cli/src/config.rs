//! Run configuration: flags over an explicit config file over the config
//! saved in the output directory over built-in defaults.

use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context};
use clap::{Args, ValueEnum};
use mertens_core::{MertensParams, Mode, ReductionParams, Sign};
use serde::{Deserialize, Serialize};

/// File name of the resolved configuration inside the output directory.
pub const SAVED_CONFIG: &str = "config.toml";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PruningKind {
    None,
    LinearBeta,
}

/// Every tunable, as optional flags. The same struct is read from TOML.
#[derive(Args, Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct ConfigArgs {
    /// TOML file with any of the options below (flags take precedence).
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Zero data file ("gamma alpha psi" per line, optionally gzipped).
    #[arg(long, value_name = "FILE")]
    pub zeros: Option<PathBuf>,
    #[arg(long, value_parser = parse_mode)]
    pub mode: Option<Mode>,
    #[arg(long, value_parser = parse_sign)]
    pub sign: Option<Sign>,
    /// Number of zeros in the lattice.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub nu: Option<u32>,
    #[arg(long)]
    pub nu_y: Option<u32>,
    #[arg(long)]
    pub nu_t: Option<u32>,
    #[arg(long)]
    pub radius_scale: Option<f64>,
    /// Only zeros below this height enter the dataset (default 14000 for hp,
    /// 74000 for hstr, every zero for qn).
    #[arg(long)]
    pub height_cutoff: Option<f64>,
    /// Minimum significant digits per zero record (default ceil(nu log10 2) + 8).
    #[arg(long)]
    pub precision_digits: Option<usize>,
    #[arg(long)]
    pub beta_start: Option<usize>,
    #[arg(long)]
    pub beta_end: Option<usize>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub svp_timeout_secs: Option<f64>,
    #[arg(long)]
    pub gso_precision: Option<u32>,
    #[arg(long, value_enum)]
    pub pruning: Option<PruningKind>,
    /// Node budget of the candidate enumeration; reaching it marks the run incomplete.
    #[arg(long)]
    pub node_cap: Option<u64>,
    /// Keep only the closest point of each coset of the first basis vector.
    #[arg(long)]
    pub dedup_b1: Option<bool>,
    /// Stop the enumeration after this many candidates.
    #[arg(long)]
    pub limit: Option<usize>,
    /// Evaluation precision in bits.
    #[arg(long)]
    pub eval_precision: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Worker threads for evaluation (default: all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse()
}

fn parse_sign(s: &str) -> Result<Sign, String> {
    s.parse()
}

/// The resolved configuration, saved as `config.toml` in every run directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct RunConfig {
    pub zeros: Option<PathBuf>,
    pub mode: Mode,
    pub sign: Sign,
    pub n: usize,
    pub nu: u32,
    pub nu_y: u32,
    pub nu_t: u32,
    pub radius_scale: f64,
    pub height_cutoff: Option<f64>,
    pub precision_digits: Option<usize>,
    pub beta_start: usize,
    pub beta_end: usize,
    pub delta: f64,
    pub svp_timeout_secs: Option<f64>,
    pub gso_precision: Option<u32>,
    pub pruning: PruningKind,
    pub node_cap: Option<u64>,
    pub dedup_b1: bool,
    pub limit: Option<usize>,
    pub eval_precision: u32,
    pub seed: u64,
    pub out: PathBuf,
    pub jobs: Option<usize>,
}

impl Default for RunConfig {
    /// The N = 120 recipe for `h_P`.
    fn default() -> Self {
        RunConfig {
            zeros: None,
            mode: Mode::Hp,
            sign: Sign::Negative,
            n: 120,
            nu: 130,
            nu_y: 100,
            nu_t: 15,
            radius_scale: 1.23,
            height_cutoff: None,
            precision_digits: None,
            beta_start: 20,
            beta_end: 83,
            delta: 0.99,
            svp_timeout_secs: None,
            gso_precision: None,
            pruning: PruningKind::LinearBeta,
            node_cap: None,
            dedup_b1: true,
            limit: None,
            eval_precision: mertens_core::evaluator::DEFAULT_PRECISION_BITS,
            seed: 0,
            out: PathBuf::from("run"),
            jobs: None,
        }
    }
}

macro_rules! overlay {
    ($base:expr, $layer:expr; $($field:ident),*) => {
        $( if let Some(v) = $layer.$field.clone() { $base.$field = v.into(); } )*
    };
}

impl ConfigArgs {
    fn from_file(path: &Path) -> anyhow::Result<ConfigArgs> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    fn apply(&self, cfg: &mut RunConfig) {
        overlay!(cfg, self; mode, sign, n, nu, nu_y, nu_t, radius_scale, beta_start, beta_end, delta,
            pruning, dedup_b1, eval_precision, seed, out);
        overlay!(cfg, self; zeros, height_cutoff, precision_digits, svp_timeout_secs, gso_precision, node_cap, limit, jobs);
    }

    /// Defaults, then the saved config of the output directory, then `--config`, then flags.
    pub fn resolve(&self) -> anyhow::Result<RunConfig> {
        let explicit = match &self.config {
            Some(p) => Some(ConfigArgs::from_file(p)?),
            None => None,
        };
        let out = self
            .out
            .clone()
            .or_else(|| explicit.as_ref().and_then(|e| e.out.clone()))
            .unwrap_or_else(|| RunConfig::default().out);
        let mut cfg = match std::fs::read_to_string(out.join(SAVED_CONFIG)) {
            Ok(text) => toml::from_str(&text).with_context(|| format!("parsing {}", out.join(SAVED_CONFIG).display()))?,
            Err(_) => RunConfig::default(),
        };
        if let Some(e) = &explicit {
            e.apply(&mut cfg);
        }
        self.apply(&mut cfg);
        cfg.out = out;
        cfg.validate()?;
        Ok(cfg)
    }
}

impl RunConfig {
    pub fn validate(&self) -> anyhow::Result<()> {
        self.mertens_params().validate()?;
        if !(self.delta > 0.25 && self.delta < 1.0) {
            bail!("delta {} must lie in (1/4, 1)", self.delta);
        }
        if self.beta_start < 2 || self.beta_start > self.beta_end {
            bail!("need 2 <= beta-start <= beta-end, got {}..{}", self.beta_start, self.beta_end);
        }
        if self.beta_end > self.n + 1 {
            bail!("beta-end {} exceeds the lattice dimension {}", self.beta_end, self.n + 1);
        }
        if self.eval_precision < 32 {
            bail!("eval-precision must be at least 32 bits");
        }
        if let Some(h) = self.height_cutoff {
            if !(h > 0.0 && h.is_finite()) {
                bail!("height-cutoff must be positive");
            }
        }
        if self.jobs == Some(0) {
            bail!("jobs must be at least 1");
        }
        Ok(())
    }

    pub fn mertens_params(&self) -> MertensParams {
        MertensParams {
            n: self.n,
            nu: self.nu,
            nu_y: self.nu_y,
            nu_t: self.nu_t,
            radius_scale: self.radius_scale,
            mode: self.mode,
            sign: self.sign,
        }
    }

    pub fn reduction_params(&self) -> ReductionParams {
        ReductionParams {
            delta: self.delta,
            beta_start: self.beta_start,
            beta_end: self.beta_end,
            svp_timeout: self.svp_timeout_secs.map(Duration::from_secs_f64),
            gso_precision: self.gso_precision,
            ..Default::default()
        }
    }

    pub fn min_digits(&self) -> usize {
        self.precision_digits
            .unwrap_or_else(|| self.mertens_params().required_digits())
    }

    /// Height cutoff for the dataset; `None` keeps every ingested zero.
    pub fn cutoff(&self) -> Option<f64> {
        self.height_cutoff.or(match self.mode {
            Mode::Hp => Some(14_000.0),
            Mode::Hstr => Some(74_000.0),
            Mode::Qn => None,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
