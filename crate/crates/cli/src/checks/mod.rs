//! Named verification strategies behind one trait.

use std::collections::BTreeMap;

use anyhow::{anyhow, bail};
use rayon::prelude::*;
use serde_json::Value;

use qcap::random::{derive_seed, label_hash};

use crate::config::RunConfig;
use crate::report::{InputDigest, Quantity, Record, Witness};

mod capacity;
mod decompose;
mod entropy;
mod measures;
mod norms;
mod trace;

/// One point of a check's parameter grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub index: Vec<usize>,
    pub params: BTreeMap<String, Value>,
    pub seed: u64,
}

impl Cell {
    pub fn new(check: &str, root: u64, index: Vec<usize>, params: &[(&str, Value)]) -> Self {
        let mut path = vec![label_hash(check)];
        path.extend(index.iter().map(|&i| i as u64));
        Self {
            seed: derive_seed(root, &path),
            index,
            params: params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
        }
    }

    pub fn usize(&self, key: &str) -> anyhow::Result<usize> {
        self.params
            .get(key)
            .and_then(Value::as_u64)
            .map(|v| v as usize)
            .ok_or_else(|| anyhow!("cell is missing integer parameter {key}"))
    }

    pub fn f64(&self, key: &str) -> anyhow::Result<f64> {
        self.params
            .get(key)
            .and_then(Value::as_f64)
            .ok_or_else(|| anyhow!("cell is missing numeric parameter {key}"))
    }

    pub fn trial_seed(&self, trial: usize) -> u64 {
        derive_seed(self.seed, &[trial as u64])
    }
}

/// What a cell computed, before it is stamped into a [`Record`].
#[derive(Debug, Default)]
pub struct Outcome {
    pub values: BTreeMap<String, Quantity>,
    pub slack: Option<Quantity>,
    pub pass: bool,
    pub warning: Option<String>,
    pub witness: Option<Witness>,
}

impl Outcome {
    pub fn value(mut self, key: &str, q: Quantity) -> Self {
        self.values.insert(key.to_string(), q);
        self
    }
}

pub trait Check: Send + Sync {
    fn name(&self) -> &'static str;
    fn anchor(&self) -> &'static str;
    fn cells(&self, cfg: &RunConfig) -> Vec<Cell>;
    /// Runs one cell. Must depend only on the cell and `cfg`.
    fn run_cell(&self, cell: &Cell, cfg: &RunConfig, digest: &mut InputDigest) -> anyhow::Result<Outcome>;

    fn record(&self, cell: &Cell, cfg: &RunConfig) -> anyhow::Result<Record> {
        let mut digest = InputDigest::new(self.name(), &cell.params, cell.seed);
        let out = self.run_cell(cell, cfg, &mut digest)?;
        Ok(Record {
            check: self.name().to_string(),
            anchor: self.anchor().to_string(),
            index: cell.index.clone(),
            params: cell.params.clone(),
            seed: cell.seed,
            inputs_digest: digest.finish(),
            values: out.values,
            slack: out.slack,
            pass: out.pass,
            warning: out.warning,
            witness: out.witness,
        })
    }

    /// All cells, in parallel. Order of the result is not meaningful.
    fn run(&self, cfg: &RunConfig) -> anyhow::Result<Vec<Record>> {
        self.cells(cfg).par_iter().map(|c| self.record(c, cfg)).collect()
    }
}

pub struct Registry {
    checks: BTreeMap<&'static str, Box<dyn Check>>,
}

impl Registry {
    pub fn empty() -> Self {
        Self {
            checks: BTreeMap::new(),
        }
    }

    pub fn with(mut self, check: impl Check + 'static) -> Self {
        self.checks.insert(check.name(), Box::new(check));
        self
    }

    /// Every check the tool knows.
    pub fn standard() -> Self {
        Self::empty()
            .with(measures::ClosedForms)
            .with(decompose::Decomposition)
            .with(decompose::TwoBlock)
            .with(decompose::AveragedPhase)
            .with(decompose::Census)
            .with(decompose::QubitFourTerm)
            .with(capacity::CapacityChain)
            .with(capacity::CapacityMonotone)
            .with(trace::CpWitness)
            .with(trace::LiebThirring)
            .with(trace::DephasedBlockBound)
            .with(trace::SpectrumIdentity)
            .with(norms::UnitaryInvariance)
            .with(norms::Multiplicativity)
            .with(norms::Derivative)
            .with(entropy::RelativeEntropyBound)
            .with(entropy::EntropyLowerBound)
            .with(entropy::ChiAdditivity)
    }

    pub fn get(&self, name: &str) -> Option<&dyn Check> {
        self.checks.get(name).map(|c| c.as_ref())
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.checks.keys().copied()
    }

    pub fn select(&self, names: &[&str]) -> anyhow::Result<Vec<&dyn Check>> {
        names
            .iter()
            .map(|n| {
                self.get(n).ok_or_else(|| {
                    anyhow!(
                        "unknown check {n:?}; registered: {}",
                        self.names().collect::<Vec<_>>().join(", ")
                    )
                })
            })
            .collect()
    }

    pub fn run(&self, names: &[&str], cfg: &RunConfig) -> anyhow::Result<Vec<Record>> {
        let mut out = Vec::new();
        for check in self.select(names)? {
            out.extend(check.run(cfg)?);
        }
        Ok(out)
    }

    /// Recomputes a recorded cell from its parameters and seed.
    pub fn replay(&self, rec: &Record, cfg: &RunConfig) -> anyhow::Result<Record> {
        let Some(check) = self.get(&rec.check) else {
            bail!("record names unknown check {:?}", rec.check);
        };
        let cell = Cell {
            index: rec.index.clone(),
            params: rec.params.clone(),
            seed: rec.seed,
        };
        check.record(&cell, cfg)
    }
}

/// Checks run by `verify` when `--checks` is not given.
pub const VERIFY_SUITE: &[&str] = &[
    "cp-witness",
    "lieb-thirring",
    "dephased-block-bound",
    "spectrum-identity",
    "unitary-invariance",
    "norm-multiplicativity",
    "derivative-identity",
    "relative-entropy-bound",
    "entropy-lower-bound",
    "chi-additivity",
];

pub const MEASURES_SUITE: &[&str] = &["closed-forms"];

pub const DECOMPOSE_SUITE: &[&str] = &[
    "decomposition",
    "two-block-identity",
    "averaged-phase",
    "phase-census",
    "qubit-four-term",
];

pub const CAPACITY_SUITE: &[&str] = &["capacity-chain", "capacity-monotone"];

/// `(d, λ)` pairs of the config grid with their indices.
pub(crate) fn dim_lambda_cells(check: &str, cfg: &RunConfig) -> Vec<Cell> {
    let mut cells = Vec::new();
    for (i, &d) in cfg.dims.iter().enumerate() {
        for (j, &l) in cfg.lambdas.iter().enumerate() {
            cells.push(Cell::new(check, cfg.seed, vec![i, j], &[("d", d.into()), ("lambda", l.into())]));
        }
    }
    cells
}

/// Only the `(d, λ)` cells with `λ` in `[lo(d), hi(d)]`.
pub(crate) fn in_range_cells(
    check: &str,
    cfg: &RunConfig,
    range: impl Fn(usize) -> (f64, f64),
) -> Vec<Cell> {
    dim_lambda_cells(check, cfg)
        .into_iter()
        .filter(|c| {
            let (d, l) = (c.usize("d").unwrap_or(0), c.f64("lambda").unwrap_or(f64::NAN));
            let (lo, hi) = range(d);
            (lo..=hi).contains(&l)
        })
        .collect()
}

/// `(d, d', λ[, p])` cells with `λ` in `range(d)`.
pub(crate) fn bipartite_cells(
    check: &str,
    cfg: &RunConfig,
    with_p: bool,
    range: impl Fn(usize) -> (f64, f64),
) -> Vec<Cell> {
    let mut cells = Vec::new();
    for (i, &d) in cfg.dims.iter().enumerate() {
        let (lo, hi) = range(d);
        for (j, &dp) in cfg.dims.iter().enumerate() {
            for (k, &l) in cfg.lambdas.iter().enumerate() {
                if !(lo..=hi).contains(&l) {
                    continue;
                }
                let base: [(&str, Value); 3] = [("d", d.into()), ("d_prime", dp.into()), ("lambda", l.into())];
                if with_p {
                    for (m, &p) in cfg.p_grid.iter().enumerate() {
                        let mut params = base.to_vec();
                        params.push(("p", p.into()));
                        cells.push(Cell::new(check, cfg.seed, vec![i, j, k, m], &params));
                    }
                } else {
                    cells.push(Cell::new(check, cfg.seed, vec![i, j, k], &base));
                }
            }
        }
    }
    cells
}

/// Tracks the smallest slack over a cell's trials and the trial that hit it.
pub(crate) struct Worst<T> {
    pub slack: f64,
    pub trial: usize,
    pub item: Option<T>,
}

impl<T> Worst<T> {
    pub fn new() -> Self {
        Self {
            slack: f64::INFINITY,
            trial: 0,
            item: None,
        }
    }

    pub fn offer(&mut self, slack: f64, trial: usize, item: impl FnOnce() -> T) {
        if slack < self.slack || self.item.is_none() {
            self.slack = slack;
            self.trial = trial;
            self.item = Some(item());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anchors;

    #[test]
    fn suites_are_registered_with_known_anchors() {
        let reg = Registry::standard();
        for name in VERIFY_SUITE
            .iter()
            .chain(MEASURES_SUITE)
            .chain(DECOMPOSE_SUITE)
            .chain(CAPACITY_SUITE)
        {
            let check = reg.get(name).unwrap_or_else(|| panic!("{name} not registered"));
            assert!(anchors::is_registered(check.anchor()));
        }
        assert_eq!(
            reg.names().count(),
            VERIFY_SUITE.len() + MEASURES_SUITE.len() + DECOMPOSE_SUITE.len() + CAPACITY_SUITE.len()
        );
        assert!(reg.select(&["nope"]).is_err());
    }

    #[test]
    fn cell_seeds_differ() {
        let a = Cell::new("x", 0, vec![0, 1], &[]);
        let b = Cell::new("x", 0, vec![1, 0], &[]);
        let c = Cell::new("y", 0, vec![0, 1], &[]);
        assert_ne!(a.seed, b.seed);
        assert_ne!(a.seed, c.seed);
        assert_eq!(a, Cell::new("x", 0, vec![0, 1], &[]));
    }
}
