use std::fs;
use std::io::{self, Write};
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;

use qcap_cli::args::{Cli, Sub};
use qcap_cli::commands::{self, Command};
use qcap_cli::{exit, Registry, Report, RunConfig};

fn emit(report: &Report, cfg: &RunConfig, command: Command) -> anyhow::Result<()> {
    match cfg.output_path(command.name()) {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            }
            let mut file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
            report.write_to(cfg.format, &mut file)?;
            eprintln!("wrote {}", path.display());
        }
        None => report.write_to(cfg.format, &mut io::stdout().lock())?,
    }
    let s = &report.summary;
    eprintln!(
        "{}: {}/{} passed, {} failed, {} warnings",
        report.command, s.passed, s.total, s.failed, s.warnings
    );
    Ok(())
}

fn run(cli: Cli) -> Result<u8, (u8, anyhow::Error)> {
    let usage = |e: anyhow::Error| (exit::USAGE, e);
    let command = cli.command.command();
    let registry = Registry::standard();
    let (grid, checks) = match cli.command {
        Sub::Verify(v) => {
            if v.list {
                let mut out = io::stdout().lock();
                for name in registry.names() {
                    let anchor = registry.get(name).map(|c| c.anchor()).unwrap_or_default();
                    writeln!(out, "{name}\t{anchor}").map_err(|e| usage(e.into()))?;
                }
                return Ok(exit::PASS);
            }
            if let Some(path) = v.replay {
                let replay = commands::replay(&path, &registry).map_err(usage)?;
                let cfg = RunConfig {
                    format: v.grid.format.unwrap_or(replay.report.config.format),
                    out: v.grid.out.clone(),
                    ..replay.report.config.clone()
                };
                emit(&replay.report, &cfg, Command::Verify).map_err(usage)?;
                if replay.identical() {
                    eprintln!("replay: {} records reproduced exactly", replay.report.records.len());
                } else {
                    eprintln!("replay: values differ for {}", replay.mismatches.join(", "));
                    return Ok(exit::CHECK_FAILED);
                }
                return Ok(if replay.report.all_passed() { exit::PASS } else { exit::CHECK_FAILED });
            }
            (v.grid, v.checks)
        }
        Sub::Measures(g) | Sub::Decompose(g) | Sub::Capacity(g) => (g, None),
    };
    let mut cfg = grid.into_config().map_err(usage)?;
    if let Some(c) = checks {
        cfg.checks = c;
    }
    cfg.validate().map_err(usage)?;
    registry
        .select(&cfg.checks.iter().map(String::as_str).collect::<Vec<_>>())
        .map_err(usage)?;
    let report = commands::run(command, &cfg, &registry).map_err(|e| (exit::CHECK_FAILED, e))?;
    emit(&report, &cfg, command).map_err(usage)?;
    Ok(if report.all_passed() { exit::PASS } else { exit::CHECK_FAILED })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::PASS };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err((code, e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}
