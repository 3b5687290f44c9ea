//! Command-line surface and config-file merging.
//!
//! Every experiment takes the same flag set; per-experiment defaults fill
//! whatever is left unset. A flat key=value config file can supply values
//! too, with explicit flags winning over the file.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(
    name = "spectralab",
    version,
    about = "Spectral approximation experiments on model manifolds",
    propagate_version = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Eigenvalue counts against closed forms and dyadic normalized growth.
    Weyl(RawArgs),
    /// Log-log growth rate of the eigenvalue sequence.
    Growth(RawArgs),
    /// Telescoping check of the dyadic partition of unity.
    Partition(RawArgs),
    /// Kernel localization constants across scales.
    KernelDecay(RawArgs),
    /// Scaled kernel cross-section norms across scales.
    CrossSection(RawArgs),
    /// Discrete Young convolution bound on random inputs.
    Young(RawArgs),
    /// Per-band multiplier norms against the predicted decay.
    BandNorms(RawArgs),
    /// Approximation rate of the low-pass operator family.
    ApproxRate(RawArgs),
    /// Besov norm checks on closed-form families.
    Besov(RawArgs),
    /// Norm-growth ratios of spectral polynomials across degrees.
    Nikolskii(RawArgs),
    /// Projection residuals of polynomial restrictions on the sphere.
    PolySpan(RawArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Weyl(_) => "weyl",
            Command::Growth(_) => "growth",
            Command::Partition(_) => "partition",
            Command::KernelDecay(_) => "kernel-decay",
            Command::CrossSection(_) => "cross-section",
            Command::Young(_) => "young",
            Command::BandNorms(_) => "band-norms",
            Command::ApproxRate(_) => "approx-rate",
            Command::Besov(_) => "besov",
            Command::Nikolskii(_) => "nikolskii",
            Command::PolySpan(_) => "poly-span",
        }
    }

    pub fn args(&self) -> &RawArgs {
        match self {
            Command::Weyl(a)
            | Command::Growth(a)
            | Command::Partition(a)
            | Command::KernelDecay(a)
            | Command::CrossSection(a)
            | Command::Young(a)
            | Command::BandNorms(a)
            | Command::ApproxRate(a)
            | Command::Besov(a)
            | Command::Nikolskii(a)
            | Command::PolySpan(a) => a,
        }
    }
}

#[derive(Args, Debug, Clone, Default)]
pub struct RawArgs {
    /// Manifold: circle, torus2, or sphere2.
    #[arg(long)]
    pub model: Option<String>,

    /// Source exponent p in [1, inf].
    #[arg(long)]
    pub p: Option<f64>,

    /// Target exponent q in [1, inf].
    #[arg(long)]
    pub q: Option<f64>,

    /// Smoothness r; doubles as the derivative order (nikolskii) and the
    /// polynomial degree (poly-span).
    #[arg(long)]
    pub r: Option<f64>,

    /// Besov smoothness, or the Young convolution exponent.
    #[arg(long)]
    pub alpha: Option<f64>,

    /// Largest spectral parameter of a dyadic sweep.
    #[arg(long = "omega-max")]
    pub omega_max: Option<f64>,

    /// Smallest dyadic level (growth: log2 of the first index).
    #[arg(long = "m-min")]
    pub m_min: Option<u32>,

    /// Largest dyadic level (growth: log2 of the last index; partition and
    /// band-norms: the band count).
    #[arg(long = "m-max")]
    pub m_max: Option<u32>,

    /// Comma-separated kernel scales; for besov, the fine index (first
    /// entry).
    #[arg(long = "t-list")]
    pub t_list: Option<String>,

    /// Quadrature/sampling resolution (partition: sample count).
    #[arg(long)]
    pub resolution: Option<usize>,

    /// Seed for randomized families.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Tolerance applied to this experiment's pass/fail flag.
    #[arg(long)]
    pub tol: Option<f64>,

    /// Output format: json or csv.
    #[arg(long)]
    pub format: Option<String>,

    /// Output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Flat key=value config file; explicit flags win over file entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl RawArgs {
    /// Fills unset fields from the config file, if one was given. Keys use
    /// the flag spellings (e.g. omega-max). Unknown keys and unparsable
    /// values are rejected.
    pub fn merged_with_file(&self) -> Result<RawArgs, String> {
        let mut out = self.clone();
        let Some(path) = &self.config else { return Ok(out) };
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("config file {}: {e}", path.display()))?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(format!(
                    "config file {} line {}: expected key=value",
                    path.display(),
                    lineno + 1
                ));
            };
            let (key, value) = (key.trim(), value.trim());
            let parse_err = |what: &str| {
                format!("config file {} line {}: bad {what} value '{value}'", path.display(), lineno + 1)
            };
            match key {
                "model" => {
                    out.model.get_or_insert_with(|| value.to_string());
                }
                "p" => {
                    out.p.get_or_insert(value.parse().map_err(|_| parse_err("p"))?);
                }
                "q" => {
                    out.q.get_or_insert(value.parse().map_err(|_| parse_err("q"))?);
                }
                "r" => {
                    out.r.get_or_insert(value.parse().map_err(|_| parse_err("r"))?);
                }
                "alpha" => {
                    out.alpha.get_or_insert(value.parse().map_err(|_| parse_err("alpha"))?);
                }
                "omega-max" => {
                    out.omega_max
                        .get_or_insert(value.parse().map_err(|_| parse_err("omega-max"))?);
                }
                "m-min" => {
                    out.m_min.get_or_insert(value.parse().map_err(|_| parse_err("m-min"))?);
                }
                "m-max" => {
                    out.m_max.get_or_insert(value.parse().map_err(|_| parse_err("m-max"))?);
                }
                "t-list" => {
                    out.t_list.get_or_insert_with(|| value.to_string());
                }
                "resolution" => {
                    out.resolution
                        .get_or_insert(value.parse().map_err(|_| parse_err("resolution"))?);
                }
                "seed" => {
                    out.seed.get_or_insert(value.parse().map_err(|_| parse_err("seed"))?);
                }
                "tol" => {
                    out.tol.get_or_insert(value.parse().map_err(|_| parse_err("tol"))?);
                }
                "format" => {
                    out.format.get_or_insert_with(|| value.to_string());
                }
                "out" => {
                    out.out.get_or_insert_with(|| PathBuf::from(value));
                }
                other => {
                    return Err(format!("config file {}: unknown key '{other}'", path.display()))
                }
            }
        }
        Ok(out)
    }
}

/// Parses a comma-separated list of positive scales.
pub fn parse_t_list(text: &str) -> Result<Vec<f64>, String> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let v: f64 = part.parse().map_err(|_| format!("bad t-list entry '{part}'"))?;
        if !(v > 0.0) {
            return Err(format!("t-list entries must be positive, got {v}"));
        }
        out.push(v);
    }
    if out.is_empty() {
        return Err("t-list is empty".to_string());
    }
    Ok(out)
}
