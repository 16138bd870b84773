use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::Command;
use crate::config::{Format, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "qcap", version, about = "Depolarizing-channel capacities, decompositions and inequality checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Closed-form S_min, ν_p and χ* against brute-force optimization.
    Measures(GridArgs),
    /// Convex decomposition into uniform dephasers and its supporting identities.
    Decompose(GridArgs),
    /// Randomized inequality suite.
    Verify(VerifyArgs),
    /// Closed-form, Blahut-Arimoto and numerical Holevo capacities.
    Capacity(GridArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    /// Comma-separated subset of checks to run.
    #[arg(long, value_delimiter = ',')]
    pub checks: Option<Vec<String>>,
    /// Re-run the records of a saved report and compare.
    #[arg(long, value_name = "WITNESS_FILE")]
    pub replay: Option<PathBuf>,
    /// Print the registered checks and exit.
    #[arg(long)]
    pub list: bool,
}

#[derive(Debug, Args, Default)]
pub struct GridArgs {
    /// TOML or JSON file with the same fields as the flags. Flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub dims: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub lambdas: Option<Vec<f64>>,
    #[arg(long = "p-grid", value_delimiter = ',')]
    pub p_grid: Option<Vec<f64>>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Tolerance override, `check=value`. Repeatable.
    #[arg(long = "tol", value_parser = parse_tolerance)]
    pub tolerances: Vec<(String, f64)>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Report entropy-like values in bits.
    #[arg(long)]
    pub bits: bool,
    /// Treat optimizer non-convergence as failure.
    #[arg(long)]
    pub strict: bool,
    /// Allow λ outside the completely positive range.
    #[arg(long)]
    pub unchecked_lambda: bool,
}

fn parse_tolerance(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected check=value, got {s:?}"))?;
    let v: f64 = value.parse().map_err(|e| format!("bad tolerance {value:?}: {e}"))?;
    Ok((name.to_string(), v))
}

impl GridArgs {
    pub fn into_config(self) -> anyhow::Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(v) = self.dims {
            cfg.dims = v;
        }
        if let Some(v) = self.lambdas {
            cfg.lambdas = v;
        }
        if let Some(v) = self.p_grid {
            cfg.p_grid = v;
        }
        if let Some(v) = self.trials {
            cfg.trials = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.restarts {
            cfg.restarts = v;
        }
        cfg.tolerances.extend(self.tolerances);
        if self.out.is_some() {
            cfg.out = self.out;
        }
        if let Some(v) = self.format {
            cfg.format = v;
        }
        cfg.bits |= self.bits;
        cfg.strict |= self.strict;
        cfg.unchecked_lambda |= self.unchecked_lambda;
        Ok(cfg)
    }
}

impl Sub {
    pub fn command(&self) -> Command {
        match self {
            Sub::Measures(_) => Command::Measures,
            Sub::Decompose(_) => Command::Decompose,
            Sub::Verify(_) => Command::Verify,
            Sub::Capacity(_) => Command::Capacity,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_is_well_formed() {
        Cli::command().debug_assert();
    }

    #[test]
    fn flags_override_defaults() {
        let cli = Cli::try_parse_from([
            "qcap", "verify", "--dims", "2,4", "--lambdas", "-0.1,0.5", "--p-grid", "2",
            "--seed", "7", "--tol", "lieb-thirring=1e-9", "--checks", "cp-witness,lieb-thirring",
        ])
        .unwrap();
        let Sub::Verify(v) = cli.command else { panic!("expected verify") };
        assert_eq!(v.checks.as_deref().unwrap(), ["cp-witness", "lieb-thirring"]);
        let cfg = v.grid.into_config().unwrap();
        assert_eq!(cfg.dims, [2, 4]);
        assert_eq!(cfg.lambdas, [-0.1, 0.5]);
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.tolerance("lieb-thirring", 0.0), 1e-9);
        assert_eq!(cfg.trials, RunConfig::default().trials);
    }

    #[test]
    fn bad_tolerance_is_a_usage_error() {
        assert!(Cli::try_parse_from(["qcap", "measures", "--tol", "nope"]).is_err());
        assert!(Cli::try_parse_from(["qcap", "measures", "--format", "xml"]).is_err());
    }
}
