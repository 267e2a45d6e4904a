//! Resolved run configuration: a JSON file, then command-line overrides.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use whr_algebra::Rat;
use whr_core::config::{parse_g, parse_params, parse_rat};
use whr_core::{Caps, Param, WeightConfig, WeightSpec};

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum BackendChoice {
    /// Pick from the ramification locus.
    Auto,
    Rational,
    Quadratic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct RunConfig {
    pub weight: WeightConfig,
    pub backend: BackendChoice,
    /// Decimal digits for the numeric reports.
    pub digits: usize,
    pub threads: usize,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            weight: WeightConfig::new(
                WeightSpec::Coeffs(vec![Rat::one()]),
                vec![Param::Symbol("s1".into()), Param::Value(Rat::new(1, 2))],
            ),
            backend: BackendChoice::Auto,
            digits: 128,
            threads: 1,
            out: None,
            format: None,
        }
    }
}

/// Flags shared by every subcommand.
#[derive(Args, Clone, Debug, Default)]
pub struct ConfigArgs {
    /// JSON configuration file; flags below override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// G(z) as a polynomial with G(0) = 1, e.g. "(1+z)(1+2z)".
    #[arg(long = "g", global = true)]
    pub g: Option<String>,
    /// Roots c_i of G(z) = Π(1 + c_i z), comma separated.
    #[arg(long, global = true, conflicts_with = "g")]
    pub roots: Option<String>,
    /// Keep M roots of G as symbols c1..cM.
    #[arg(long, global = true, conflicts_with_all = ["g", "roots"])]
    pub symbolic_roots: Option<usize>,
    /// Flow parameters s_1, s_2, ...: numbers or symbol names, e.g. "s1,1/2".
    #[arg(long = "s", global = true)]
    pub s: Option<String>,
    /// Truncation order in γ.
    #[arg(long, global = true)]
    pub gamma: Option<i32>,
    /// Truncation order in x.
    #[arg(long, global = true)]
    pub x_cap: Option<i32>,
    /// Lowest β exponent kept.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub beta_floor: Option<i32>,
    /// Highest β exponent kept.
    #[arg(long, global = true)]
    pub beta_cap: Option<i32>,
    /// Maximal number of weighted branch points d.
    #[arg(long, global = true)]
    pub d: Option<u32>,
    /// Largest degree N for the enumerative oracle.
    #[arg(long, global = true)]
    pub oracle_n: Option<u32>,
    /// Local expansion order for the recursion kernel.
    #[arg(long, global = true)]
    pub jet_order: Option<usize>,
    /// Coefficient field for the recursion.
    #[arg(long, global = true, value_enum)]
    pub backend: Option<BackendChoice>,
    /// Decimal digits for numeric reports.
    #[arg(long, global = true)]
    pub digits: Option<usize>,
    /// Upper bound on worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write the artifact here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format; defaults per command.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

fn rat_list(text: &str) -> CliResult<Vec<Rat>> {
    text.split(',').map(|t| Ok(parse_rat(t)?)).collect()
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("plain data")
    }

    pub fn resolve(args: &ConfigArgs) -> CliResult<Self> {
        let mut cfg = match &args.config {
            Some(p) => Self::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(g) = &args.g {
            let p = parse_g(g)?;
            cfg.weight.weight = WeightSpec::Coeffs(p.coeffs().iter().skip(1).cloned().collect());
        }
        if let Some(r) = &args.roots {
            cfg.weight.weight = WeightSpec::Roots(rat_list(r)?);
        }
        if let Some(m) = args.symbolic_roots {
            cfg.weight.weight = WeightSpec::SymbolicRoots(m);
        }
        if let Some(s) = &args.s {
            cfg.weight.s = if s.trim().is_empty() { vec![] } else { parse_params(s)? };
        }
        let caps = &mut cfg.weight.caps;
        macro_rules! set {
            ($field:ident, $arg:expr) => {
                if let Some(v) = $arg {
                    caps.$field = v;
                }
            };
        }
        set!(gamma, args.gamma);
        set!(x, args.x_cap);
        set!(beta_floor, args.beta_floor);
        set!(beta_cap, args.beta_cap);
        set!(d, args.d);
        set!(oracle_n, args.oracle_n);
        if args.jet_order.is_some() {
            caps.jet_order = args.jet_order;
        }
        if let Some(b) = args.backend {
            cfg.backend = b;
        }
        if let Some(d) = args.digits {
            cfg.digits = d;
        }
        if let Some(t) = args.threads {
            cfg.threads = t;
        }
        if args.out.is_some() {
            cfg.out = args.out.clone();
        }
        if args.format.is_some() {
            cfg.format = args.format;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        let c: &Caps = &self.weight.caps;
        let bad = |what: &str| Err(CliError::Usage(format!("{what} must be positive")));
        if c.gamma <= 0 {
            return bad("--gamma");
        }
        if c.x <= 0 {
            return bad("--x-cap");
        }
        if c.beta_cap < 0 {
            return Err(CliError::Usage("--beta-cap must be non-negative".into()));
        }
        if c.oracle_n == 0 {
            return bad("--oracle-n");
        }
        if c.jet_order == Some(0) {
            return bad("--jet-order");
        }
        if self.digits == 0 {
            return bad("--digits");
        }
        if self.threads == 0 {
            return bad("--threads");
        }
        if self.weight.m() == 0 {
            return Err(CliError::Usage("G must have positive degree".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let args = ConfigArgs {
            g: Some("(1+z)(1+2z)".into()),
            s: Some("s1,1/3".into()),
            gamma: Some(5),
            jet_order: Some(14),
            ..ConfigArgs::default()
        };
        let cfg = RunConfig::resolve(&args).unwrap();
        let text = serde_json::to_string(&cfg.to_json()).unwrap();
        assert_eq!(RunConfig::from_json(&text).unwrap(), cfg);
        assert_eq!(cfg.weight.m(), 2);
        assert_eq!(cfg.weight.caps.gamma, 5);
    }

    #[test]
    fn rejects_bad_input() {
        let bad_g = ConfigArgs {
            g: Some("2+z".into()),
            ..ConfigArgs::default()
        };
        assert_eq!(RunConfig::resolve(&bad_g).unwrap_err().exit_code(), 2);
        let bad_cap = ConfigArgs {
            gamma: Some(0),
            ..ConfigArgs::default()
        };
        assert_eq!(RunConfig::resolve(&bad_cap).unwrap_err().exit_code(), 2);
    }
}
