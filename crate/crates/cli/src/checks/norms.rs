use qcap::bounds::{
    diagonalizing_unitary, lemma1_invariance_check, product_norm_check, product_output_norm,
    INVARIANCE_TOL, PRODUCT_BOUND_TOL,
};
use qcap::channel::KrausChannel;
use qcap::depolarizing::lambda_range;
use qcap::optimize::{max_output_p_norm, SphereOptions};
use qcap::random::{
    derive_seed, haar_unitary, random_bipartite_state, random_channel, random_pure_state, rng_from_seed,
};
use qcap::{BipartiteState, DensityMatrix, DepolarizingChannel, QuantumChannel};

use super::{bipartite_cells, in_range_cells, Cell, Check, Outcome, Worst};
use crate::anchors;
use crate::config::RunConfig;
use crate::report::{InputDigest, MatrixDump, Quantity, Witness};

/// Equality at product maximizers.
const SATURATION_TOL: f64 = 1e-6;
const DERIVATIVE_STEP: f64 = 1e-5;
const DERIVATIVE_TOL: f64 = 1e-5;

/// The partner channel `Ψ` of a bipartite cell, drawn from the cell seed.
pub(crate) fn partner(cell: &Cell, dp: usize, digest: &mut InputDigest) -> anyhow::Result<KrausChannel> {
    let psi = random_channel(dp, dp, dp, &mut rng_from_seed(derive_seed(cell.seed, &[u64::MAX])))?;
    for k in psi.kraus() {
        digest.matrix(k);
    }
    Ok(psi)
}

pub(crate) fn dump_channel(psi: &KrausChannel) -> Vec<MatrixDump> {
    psi.kraus()
        .iter()
        .enumerate()
        .map(|(i, k)| MatrixDump::new(&format!("kraus_{i}"), k))
        .collect()
}

/// Even trials draw a mixed state, odd trials a pure (generally entangled) one.
pub(crate) fn trial_state(d: usize, dp: usize, trial: usize, seed: u64) -> BipartiteState {
    let mut rng = rng_from_seed(seed);
    if trial.is_multiple_of(2) {
        random_bipartite_state(d, dp, &mut rng)
    } else {
        let psi = random_pure_state(d * dp, &mut rng);
        BipartiteState::new(d, dp, DensityMatrix::from(&psi)).expect("dimensions agree")
    }
}

pub struct UnitaryInvariance;

impl Check for UnitaryInvariance {
    fn name(&self) -> &'static str {
        "unitary-invariance"
    }

    fn anchor(&self) -> &'static str {
        anchors::UNITARY_INVARIANCE
    }

    fn cells(&self, cfg: &RunConfig) -> Vec<Cell> {
        bipartite_cells(self.name(), cfg, true, lambda_range)
    }

    fn run_cell(&self, cell: &Cell, cfg: &RunConfig, digest: &mut InputDigest) -> anyhow::Result<Outcome> {
        let (d, dp, lambda, p) = (cell.usize("d")?, cell.usize("d_prime")?, cell.f64("lambda")?, cell.f64("p")?);
        let dep = DepolarizingChannel::new(d, lambda)?;
        let psi = partner(cell, dp, digest)?;
        let tol = cfg.tolerance(self.name(), INVARIANCE_TOL);
        let mut worst = Worst::new();
        for t in 0..cfg.trials {
            let seed = cell.trial_seed(t);
            let tau = trial_state(d, dp, t, seed);
            let haar = haar_unitary(d, &mut rng_from_seed(seed ^ 1));
            digest.matrix(tau.matrix());
            digest.matrix(&haar);
            let dev = [haar, diagonalizing_unitary(&tau)]
                .iter()
                .map(|u| Ok(lemma1_invariance_check(&dep, &psi, &tau, u, p)?.deviation()))
                .collect::<anyhow::Result<Vec<f64>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            worst.offer(tol - dev, t, || tau.matrix().clone());
        }
        let pass = worst.slack >= 0.0;
        let tau = worst.item.expect("trials > 0");
        Ok(Outcome {
            slack: Some(Quantity::plain(worst.slack)),
            pass,
            witness: (!pass).then(|| {
                let mut matrices = vec![MatrixDump::new("tau12", &tau)];
                matrices.extend(dump_channel(&psi));
                Witness {
                    trial: worst.trial,
                    seed: cell.trial_seed(worst.trial),
                    matrices,
                }
            }),
            ..Outcome::default()
        }
        .value("max_deviation", Quantity::plain(tol - worst.slack)))
    }
}

/// `‖(Δ⊗Ψ)(τ)‖_p ≤ ν_p(Δ)ν_p(Ψ)` over random inputs, with equality at the
/// product of maximizers.
pub struct Multiplicativity;

impl Check for Multiplicativity {
    fn name(&self) -> &'static str {
        "norm-multiplicativity"
    }

    fn anchor(&self) -> &'static str {
        anchors::NORM_MULTIPLICATIVITY
    }

    fn cells(&self, cfg: &RunConfig) -> Vec<Cell> {
        bipartite_cells(self.name(), cfg, true, lambda_range)
    }

    fn run_cell(&self, cell: &Cell, cfg: &RunConfig, digest: &mut InputDigest) -> anyhow::Result<Outcome> {
        let (d, dp, lambda, p) = (cell.usize("d")?, cell.usize("d_prime")?, cell.f64("lambda")?, cell.f64("p")?);
        let dep = DepolarizingChannel::new(d, lambda)?;
        let psi = partner(cell, dp, digest)?;
        let opt = max_output_p_norm(
            &psi,
            p,
            &SphereOptions::with_seed(derive_seed(cell.seed, &[0])).restarts(cfg.restarts),
        )?;
        let nu_dep = dep.nu_p_closed(p)?;
        let rhs = nu_dep * opt.value;
        let tol = cfg.tolerance(self.name(), PRODUCT_BOUND_TOL);

        let mut worst = Worst::new();
        let mut max_lhs: f64 = 0.0;
        for t in 0..cfg.trials {
            let tau = trial_state(d, dp, t, cell.trial_seed(t));
            digest.matrix(tau.matrix());
            let chk = product_norm_check(&dep, &psi, &tau, p, opt.value)?;
            max_lhs = max_lhs.max(chk.lhs);
            worst.offer(chk.rhs + tol - chk.lhs, t, || tau.matrix().clone());
        }
        let product = BipartiteState::product(
            &DensityMatrix::basis_projector(d, 0),
            &DensityMatrix::from(&opt.state),
        );
        let at_product = product_output_norm(&dep, &psi, &product, p)?;
        let saturation = (at_product - rhs).abs();

        let slack = worst.slack.min(SATURATION_TOL - saturation);
        let pass = slack >= 0.0;
        let tau = worst.item.expect("trials > 0");
        Ok(Outcome {
            slack: Some(Quantity::plain(slack)),
            pass,
            witness: (!pass).then(|| {
                let mut matrices = vec![MatrixDump::new("tau12", &tau)];
                matrices.extend(dump_channel(&psi));
                Witness {
                    trial: worst.trial,
                    seed: cell.trial_seed(worst.trial),
                    matrices,
                }
            }),
            ..Outcome::default()
        }
        .value("max_lhs", Quantity::plain(max_lhs))
        .value("nu_p_depolarizing", Quantity::plain(nu_dep))
        .value("nu_p_partner", Quantity::plain(opt.value))
        .value("rhs", Quantity::plain(rhs))
        .value("product_input_norm", Quantity::plain(at_product))
        .value("saturation_gap", Quantity::plain(saturation))
        .value("partner_dim", Quantity::plain(psi.dim_in() as f64)))
    }
}

/// Central difference of `ν_p(Δ_λ)` at `p = 1` against `S_min`.
pub struct Derivative;

impl Check for Derivative {
    fn name(&self) -> &'static str {
        "derivative-identity"
    }

    fn anchor(&self) -> &'static str {
        anchors::DERIVATIVE_IDENTITY
    }

    fn cells(&self, cfg: &RunConfig) -> Vec<Cell> {
        in_range_cells(self.name(), cfg, lambda_range)
    }

    fn run_cell(&self, cell: &Cell, cfg: &RunConfig, _: &mut InputDigest) -> anyhow::Result<Outcome> {
        let ch = DepolarizingChannel::new(cell.usize("d")?, cell.f64("lambda")?)?;
        let h = DERIVATIVE_STEP;
        let fd = -(ch.pure_output_p_norm(1.0 + h) - ch.pure_output_p_norm(1.0 - h)) / (2.0 * h);
        let s_min = ch.s_min_closed();
        let tol = cfg.tolerance(self.name(), DERIVATIVE_TOL);
        let dev = (fd - s_min).abs();
        Ok(Outcome {
            slack: Some(Quantity::nats(tol - dev)),
            pass: dev < tol,
            ..Outcome::default()
        }
        .value("finite_difference", Quantity::nats(fd))
        .value("s_min_closed", Quantity::nats(s_min))
        .value("step", Quantity::plain(h)))
    }
}
