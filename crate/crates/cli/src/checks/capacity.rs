use qcap::capacity::{
    holevo_quantity, shannon_capacity_fixed, transition_matrix, Ensemble, HolevoOptions, Povm,
    SHANNON_AGREEMENT_TOL,
};
use qcap::depolarizing::lambda_range;
use qcap::DepolarizingChannel;

use super::{in_range_cells, Cell, Check, Outcome};
use crate::anchors;
use crate::config::RunConfig;
use crate::report::{InputDigest, Quantity};

/// Numerical Holevo quantity against the closed form.
const HOLEVO_TOL: f64 = 1e-6;
const PRIOR_TOL: f64 = 1e-8;

/// Closed form, Blahut-Arimoto on the basis code, and the numerical Holevo
/// quantity for each `(d, λ)`.
pub struct CapacityChain;

impl Check for CapacityChain {
    fn name(&self) -> &'static str {
        "capacity-chain"
    }

    fn anchor(&self) -> &'static str {
        anchors::CAPACITY_CHAIN
    }

    fn cells(&self, cfg: &RunConfig) -> Vec<Cell> {
        in_range_cells(self.name(), cfg, lambda_range)
    }

    fn run_cell(&self, cell: &Cell, cfg: &RunConfig, _: &mut InputDigest) -> anyhow::Result<Outcome> {
        let (d, lambda) = (cell.usize("d")?, cell.f64("lambda")?);
        let ch = DepolarizingChannel::new(d, lambda)?;
        let closed = ch.chi_star_closed();
        let via_entropy = (d as f64).ln() - ch.s_min_closed();
        let t = transition_matrix(&ch, &Ensemble::basis(d), &Povm::basis(d))?;
        let ba = shannon_capacity_fixed(&t);
        let prior_dev = ba.prior.iter().map(|p| (p - 1.0 / d as f64).abs()).fold(0.0, f64::max);
        let holevo = holevo_quantity(
            &ch,
            &HolevoOptions {
                seed: cell.seed,
                ..HolevoOptions::default()
            },
        )?;

        let shannon_tol = cfg.tolerance(self.name(), SHANNON_AGREEMENT_TOL);
        let margins = [
            shannon_tol - (ba.capacity - closed).abs(),
            shannon_tol - (via_entropy - closed).abs(),
            PRIOR_TOL - prior_dev,
            HOLEVO_TOL - (holevo.chi - closed).abs(),
        ];
        let slack = margins.into_iter().fold(f64::INFINITY, f64::min);
        let mut pass = slack > 0.0 && ba.monotone;
        let mut warning = None;
        if !holevo.converged {
            warning = Some(format!("Holevo optimizer not certified (gap {:e})", holevo.gap));
            pass &= !cfg.strict;
        }
        Ok(Outcome {
            slack: Some(Quantity::plain(slack)),
            pass,
            warning,
            ..Outcome::default()
        }
        .value("chi_closed", Quantity::nats(closed))
        .value("ln_d_minus_s_min", Quantity::nats(via_entropy))
        .value("shannon", Quantity::nats(ba.capacity))
        .value("holevo_numeric", Quantity::nats(holevo.chi))
        .value("holevo_certificate_gap", Quantity::nats(holevo.gap))
        .value("shannon_minus_closed", Quantity::nats(ba.capacity - closed))
        .value("holevo_minus_closed", Quantity::nats(holevo.chi - closed))
        .value("holevo_minus_shannon", Quantity::nats(holevo.chi - ba.capacity))
        .value("prior_max_deviation", Quantity::plain(prior_dev))
        .value("blahut_arimoto_iterations", Quantity::plain(ba.iterations as f64)))
    }
}

/// `χ*(Δ_λ)` nondecreasing in `λ` on `[0, 1]`, over the configured grid
/// and a dense 101-point grid.
pub struct CapacityMonotone;

const DENSE: usize = 101;

impl Check for CapacityMonotone {
    fn name(&self) -> &'static str {
        "capacity-monotone"
    }

    fn anchor(&self) -> &'static str {
        anchors::CAPACITY_CHAIN
    }

    fn cells(&self, cfg: &RunConfig) -> Vec<Cell> {
        cfg.dims
            .iter()
            .enumerate()
            .map(|(i, &d)| Cell::new(self.name(), cfg.seed, vec![i], &[("d", d.into())]))
            .collect()
    }

    fn run_cell(&self, cell: &Cell, cfg: &RunConfig, _: &mut InputDigest) -> anyhow::Result<Outcome> {
        let d = cell.usize("d")?;
        let mut grid: Vec<f64> = cfg.lambdas.iter().copied().filter(|l| (0.0..=1.0).contains(l)).collect();
        grid.extend((0..DENSE).map(|i| i as f64 / (DENSE - 1) as f64));
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        let chi = grid
            .iter()
            .map(|&l| Ok(DepolarizingChannel::new(d, l)?.chi_star_closed()))
            .collect::<anyhow::Result<Vec<f64>>>()?;
        let min_step = chi.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        Ok(Outcome {
            slack: Some(Quantity::nats(min_step)),
            pass: min_step >= 0.0,
            ..Outcome::default()
        }
        .value("grid_points", Quantity::plain(grid.len() as f64))
        .value("min_increment", Quantity::nats(min_step))
        .value("chi_at_one", Quantity::nats(chi[chi.len() - 1])))
    }
}
