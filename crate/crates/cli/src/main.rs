//! `whr`: weighted Hurwitz numbers, tau functions, correlators, spectral
//! curves and topological recursion from the command line.

mod commands;
mod error;
mod run_config;
mod validate;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use commands::{Artifact, CorrelatorArgs, CurveArgs, HurwitzArgs, TauArgs, TopRecArgs};
use error::CliResult;
use run_config::{ConfigArgs, Format, RunConfig};
use validate::{Profile, Suite};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "whr", version, about = "Weighted Hurwitz numbers and their spectral curves")]
struct Cli {
    #[command(flatten)]
    config: ConfigArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Pure, connected or weighted Hurwitz numbers and the constellation census.
    Hurwitz(HurwitzArgs),
    /// Power-sum coefficients of the hypergeometric tau function.
    Tau(TauArgs),
    /// Multicurrent correlators W_n.
    Correlators(CorrelatorArgs),
    /// Spectral curve data and ramification locus.
    Curve(CurveArgs),
    /// Stable forms ω_{g,n} by topological recursion.
    Toprec(TopRecArgs),
    /// Run an invariant suite.
    Validate {
        #[command(subcommand)]
        suite: Suite,
        #[arg(long, value_enum, default_value_t = Profile::Quick, global = true)]
        profile: Profile,
    },
}

fn run(cli: &Cli) -> CliResult<(RunConfig, Artifact)> {
    let cfg = RunConfig::resolve(&cli.config)?;
    let artifact = match &cli.command {
        Command::Hurwitz(a) => commands::cmd_hurwitz(&cfg, a)?,
        Command::Tau(a) => commands::cmd_tau(&cfg, a)?,
        Command::Correlators(a) => commands::cmd_correlators(&cfg, a)?,
        Command::Curve(a) => commands::cmd_curve(&cfg, a)?,
        Command::Toprec(a) => commands::cmd_toprec(&cfg, a)?,
        Command::Validate { suite, profile } => validate::cmd_validate(&cfg, suite, *profile)?,
    };
    Ok((cfg, artifact))
}

fn render(cfg: &RunConfig, a: &Artifact) -> CliResult<String> {
    let format = cfg.format.unwrap_or(a.default_format);
    Ok(match (format, &a.text) {
        (Format::Text, Some(t)) => format!("{}\n", t.trim_end()),
        _ => {
            let doc = json!({
                "schema-version": SCHEMA_VERSION,
                "command": a.command,
                "config": cfg.to_json(),
                "passed": a.passed,
                "result": a.result,
            });
            format!("{}\n", serde_json::to_string_pretty(&doc)?)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = run(&cli).and_then(|(cfg, a)| {
        let text = render(&cfg, &a)?;
        match &cfg.out {
            Some(p) => std::fs::write(p, text)?,
            None => std::io::stdout().write_all(text.as_bytes())?,
        }
        Ok(a.passed)
    });
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("whr: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
