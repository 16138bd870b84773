use qcap::channel::channel_distance;
use qcap::decomposition::{
    averaged_projection_defect, diophantine_solutions, full_decomposition, lemma5_decompose,
    lemma6_decompose, qubit, IDENTITY_TOL,
};
use qcap::depolarizing::lambda_range;
use qcap::random::{random_density_matrix, rng_from_seed};
use qcap::DepolarizingChannel;

use super::{in_range_cells, Cell, Check, Outcome, Worst};
use crate::anchors;
use crate::config::RunConfig;
use crate::report::{InputDigest, MatrixDump, Quantity, Witness};

const WEIGHT_TOL: f64 = 1e-12;

pub struct Decomposition;

impl Check for Decomposition {
    fn name(&self) -> &'static str {
        "decomposition"
    }

    fn anchor(&self) -> &'static str {
        anchors::CONVEX_DECOMPOSITION
    }

    fn cells(&self, cfg: &RunConfig) -> Vec<Cell> {
        in_range_cells(self.name(), cfg, lambda_range)
    }

    fn run_cell(&self, cell: &Cell, cfg: &RunConfig, _: &mut InputDigest) -> anyhow::Result<Outcome> {
        let (d, lambda) = (cell.usize("d")?, cell.f64("lambda")?);
        let dec = full_decomposition(d, lambda)?;
        let expected = 2 * d * d * (d + 1);
        let dist = dec.reconstruction_distance();
        let wsum = dec.weight_sum();
        let tol = cfg.tolerance(self.name(), IDENTITY_TOL);
        let pass = dist < tol && (wsum - 1.0).abs() < WEIGHT_TOL && dec.all_uniform() && dec.len() == expected;
        let out = Outcome {
            slack: Some(Quantity::plain(tol - dist)),
            pass,
            warning: (!dec.is_convex()).then(|| "negative weights: mixture is affine, not convex".to_string()),
            ..Outcome::default()
        };
        Ok(out
            .value("terms", Quantity::plain(dec.len() as f64))
            .value("expected_terms", Quantity::plain(expected as f64))
            .value("reconstruction_distance", Quantity::plain(dist))
            .value("weight_sum", Quantity::plain(wsum))
            .value("min_weight", Quantity::plain(dec.min_weight()))
            .value("all_uniform", Quantity::plain(f64::from(u8::from(dec.all_uniform())))))
    }
}

pub struct TwoBlock;

impl Check for TwoBlock {
    fn name(&self) -> &'static str {
        "two-block-identity"
    }

    fn anchor(&self) -> &'static str {
        anchors::TWO_BLOCK_IDENTITY
    }

    fn cells(&self, cfg: &RunConfig) -> Vec<Cell> {
        in_range_cells(self.name(), cfg, lambda_range)
    }

    fn run_cell(&self, cell: &Cell, cfg: &RunConfig, _: &mut InputDigest) -> anyhow::Result<Outcome> {
        let (d, lambda) = (cell.usize("d")?, cell.f64("lambda")?);
        let stage_one = lemma5_decompose(d, lambda)?;
        let stage_two = lemma6_decompose(d, lambda)?;
        let worst = stage_one.distance.max(stage_two.distance);
        let tol = cfg.tolerance(self.name(), IDENTITY_TOL);
        let out = Outcome {
            slack: Some(Quantity::plain(tol - worst)),
            pass: worst < tol,
            ..Outcome::default()
        };
        Ok(out
            .value("depolarizing_from_intermediate", Quantity::plain(stage_one.distance))
            .value("intermediate_from_dephasers", Quantity::plain(stage_two.distance)))
    }
}

/// `(1/2d) Σ_a Σ_k E ρ E = Tr(ρ) I + ρ − diag ρ` on random states.
pub struct AveragedPhase;

impl Check for AveragedPhase {
    fn name(&self) -> &'static str {
        "averaged-phase"
    }

    fn anchor(&self) -> &'static str {
        anchors::AVERAGED_PHASE
    }

    fn cells(&self, cfg: &RunConfig) -> Vec<Cell> {
        cfg.dims
            .iter()
            .enumerate()
            .map(|(i, &d)| Cell::new(self.name(), cfg.seed, vec![i], &[("d", d.into())]))
            .collect()
    }

    fn run_cell(&self, cell: &Cell, cfg: &RunConfig, digest: &mut InputDigest) -> anyhow::Result<Outcome> {
        let d = cell.usize("d")?;
        let tol = cfg.tolerance(self.name(), IDENTITY_TOL);
        let mut worst = Worst::new();
        for t in 0..cfg.trials {
            let rho = random_density_matrix(d, &mut rng_from_seed(cell.trial_seed(t)));
            digest.matrix(rho.matrix());
            let defect = averaged_projection_defect(rho.matrix())?;
            worst.offer(tol - defect, t, || rho.clone());
        }
        let pass = worst.slack > 0.0;
        Ok(Outcome {
            slack: Some(Quantity::plain(worst.slack)),
            pass,
            witness: (!pass).then(|| Witness {
                trial: worst.trial,
                seed: cell.trial_seed(worst.trial),
                matrices: vec![MatrixDump::new("rho", worst.item.as_ref().expect("trials > 0").matrix())],
            }),
            ..Outcome::default()
        }
        .value("max_defect", Quantity::plain(tol - worst.slack))
        .value("trials", Quantity::plain(cfg.trials as f64)))
    }
}

pub struct Census;

impl Check for Census {
    fn name(&self) -> &'static str {
        "phase-census"
    }

    fn anchor(&self) -> &'static str {
        anchors::PHASE_CENSUS
    }

    fn cells(&self, cfg: &RunConfig) -> Vec<Cell> {
        cfg.dims
            .iter()
            .enumerate()
            .map(|(i, &d)| Cell::new(self.name(), cfg.seed, vec![i], &[("d", d.into())]))
            .collect()
    }

    fn run_cell(&self, cell: &Cell, _: &RunConfig, _: &mut InputDigest) -> anyhow::Result<Outcome> {
        let census = diophantine_solutions(cell.usize("d")?)?;
        Ok(Outcome {
            pass: census.matches_expected(),
            ..Outcome::default()
        }
        .value("solutions", Quantity::plain(census.count() as f64))
        .value("expected_trivial", Quantity::plain(census.expected_trivial as f64))
        .value("nontrivial", Quantity::plain(census.nontrivial as f64))
        .value("shifted_branch", Quantity::plain(census.shifted_branch as f64)))
    }
}

pub struct QubitFourTerm;

impl Check for QubitFourTerm {
    fn name(&self) -> &'static str {
        "qubit-four-term"
    }

    fn anchor(&self) -> &'static str {
        anchors::QUBIT_FOUR_TERM
    }

    fn cells(&self, cfg: &RunConfig) -> Vec<Cell> {
        in_range_cells(self.name(), cfg, lambda_range)
            .into_iter()
            .filter(|c| c.usize("d").ok() == Some(2))
            .collect()
    }

    fn run_cell(&self, cell: &Cell, cfg: &RunConfig, _: &mut InputDigest) -> anyhow::Result<Outcome> {
        let lambda = cell.f64("lambda")?;
        let mix = qubit::four_channel_decomposition(lambda)?;
        let dist = channel_distance(&DepolarizingChannel::new(2, lambda)?, &mix);
        let tol = cfg.tolerance(self.name(), IDENTITY_TOL);
        Ok(Outcome {
            slack: Some(Quantity::plain(tol - dist)),
            pass: dist < tol,
            ..Outcome::default()
        }
        .value("terms", Quantity::plain(mix.len() as f64))
        .value("reconstruction_distance", Quantity::plain(dist)))
    }
}
