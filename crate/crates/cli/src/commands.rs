use std::path::Path;

use anyhow::{bail, Context};

use crate::checks::{Registry, CAPACITY_SUITE, DECOMPOSE_SUITE, MEASURES_SUITE, VERIFY_SUITE};
use crate::config::RunConfig;
use crate::report::{Record, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Measures,
    Decompose,
    Verify,
    Capacity,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Measures => "measures",
            Command::Decompose => "decompose",
            Command::Verify => "verify",
            Command::Capacity => "capacity",
        }
    }

    pub fn suite(self) -> &'static [&'static str] {
        match self {
            Command::Measures => MEASURES_SUITE,
            Command::Decompose => DECOMPOSE_SUITE,
            Command::Verify => VERIFY_SUITE,
            Command::Capacity => CAPACITY_SUITE,
        }
    }
}

/// Runs a command's checks. `verify` honours `cfg.checks`.
pub fn run(cmd: Command, cfg: &RunConfig, registry: &Registry) -> anyhow::Result<Report> {
    cfg.validate()?;
    let names: Vec<&str> = if cmd == Command::Verify && !cfg.checks.is_empty() {
        cfg.checks.iter().map(String::as_str).collect()
    } else {
        cmd.suite().to_vec()
    };
    let records = registry.run(&names, cfg)?;
    Ok(Report::assemble(cmd.name(), cfg, records))
}

pub fn cmd_measures(cfg: &RunConfig) -> anyhow::Result<Report> {
    run(Command::Measures, cfg, &Registry::standard())
}

pub fn cmd_decompose(cfg: &RunConfig) -> anyhow::Result<Report> {
    run(Command::Decompose, cfg, &Registry::standard())
}

pub fn cmd_verify(cfg: &RunConfig) -> anyhow::Result<Report> {
    run(Command::Verify, cfg, &Registry::standard())
}

pub fn cmd_capacity(cfg: &RunConfig) -> anyhow::Result<Report> {
    run(Command::Capacity, cfg, &Registry::standard())
}

/// Outcome of re-running the records of a saved report.
#[derive(Debug)]
pub struct Replay {
    pub report: Report,
    /// Checks whose recomputed record differs from the saved one.
    pub mismatches: Vec<String>,
}

impl Replay {
    pub fn identical(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Re-runs the failed records of `path`, or every record if none failed,
/// under the report's own config.
pub fn replay(path: &Path, registry: &Registry) -> anyhow::Result<Replay> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let saved: Report = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    if saved.config.bits {
        bail!("replay needs a report written in nats; rerun without --bits");
    }
    let failed: Vec<&Record> = saved.records.iter().filter(|r| !r.pass).collect();
    let targets = if failed.is_empty() { saved.records.iter().collect() } else { failed };
    let mut records = Vec::with_capacity(targets.len());
    let mut mismatches = Vec::new();
    for rec in targets {
        let again = registry.replay(rec, &saved.config)?;
        if &again != rec {
            mismatches.push(format!("{} {:?}", rec.check, rec.index));
        }
        records.push(again);
    }
    Ok(Replay {
        report: Report::assemble(&saved.command, &saved.config, records),
        mismatches,
    })
}
