use rand::Rng;

use qcap::bounds::diagonalizing_unitary;
use qcap::capacity::{
    chi_additivity_check, entropy_lower_bound_check, holevo_quantity, lemma7_check, HolevoOptions,
    ADDITIVITY_TOL, ENTROPY_BOUND_TOL, LEMMA7_TOL,
};
use qcap::channel::KrausChannel;
use qcap::decomposition::{chirp_count, phase_family};
use qcap::linalg::CMatrix;
use qcap::random::{derive_seed, random_channel, rng_from_seed};
use qcap::{depolarizing, phase_damping, BipartiteState, DensityMatrix, DepolarizingChannel, QuantumChannel};

use super::norms::{dump_channel, partner, trial_state};
use super::{bipartite_cells, Cell, Check, Outcome, Worst};
use crate::anchors;
use crate::config::RunConfig;
use crate::report::{InputDigest, MatrixDump, Quantity, Witness};

const SATURATION_TOL: f64 = 1e-6;

fn witness_with(cell: &Cell, trial: usize, tau: &CMatrix, psi: &KrausChannel) -> Witness {
    let mut matrices = vec![MatrixDump::new("tau12", tau)];
    matrices.extend(dump_channel(psi));
    Witness {
        trial,
        seed: cell.trial_seed(trial),
        matrices,
    }
}

/// Relative entropy of `(Δ⊗Ψ)(τ)` against `I/d ⊗ Ψ(ω*)`, where `ω*` comes
/// from a certified Holevo run on `Ψ`.
pub struct RelativeEntropyBound;

impl Check for RelativeEntropyBound {
    fn name(&self) -> &'static str {
        "relative-entropy-bound"
    }

    fn anchor(&self) -> &'static str {
        anchors::RELATIVE_ENTROPY_BOUND
    }

    fn cells(&self, cfg: &RunConfig) -> Vec<Cell> {
        bipartite_cells(self.name(), cfg, false, depolarizing::lambda_range)
    }

    fn run_cell(&self, cell: &Cell, cfg: &RunConfig, digest: &mut InputDigest) -> anyhow::Result<Outcome> {
        let (d, dp, lambda) = (cell.usize("d")?, cell.usize("d_prime")?, cell.f64("lambda")?);
        let dep = DepolarizingChannel::new(d, lambda)?;
        let psi = partner(cell, dp, digest)?;
        let holevo = holevo_quantity(&psi, &HolevoOptions::with_seed(derive_seed(cell.seed, &[1])))?;
        let tol = cfg.tolerance(self.name(), LEMMA7_TOL);

        let mut worst = Worst::new();
        for t in 0..cfg.trials {
            let tau = trial_state(d, dp, t, cell.trial_seed(t));
            digest.matrix(tau.matrix());
            let chk = lemma7_check(&dep, &psi, &tau, &holevo)?;
            worst.offer(chk.rhs + tol - chk.lhs, t, || tau.matrix().clone());
        }

        // A basis state times the heaviest ensemble member should attain the bound.
        let heaviest = holevo
            .weights
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let product = BipartiteState::product(
            &DensityMatrix::basis_projector(d, 0),
            &DensityMatrix::from(&holevo.states[heaviest]),
        );
        let sat = lemma7_check(&dep, &psi, &product, &holevo)?;
        let saturation = (sat.rhs - sat.lhs).abs();

        let slack = worst.slack.min(SATURATION_TOL - saturation);
        let mut pass = slack >= 0.0;
        let mut warning = None;
        if !holevo.converged {
            warning = Some(format!("Holevo run on the partner not certified (gap {:e})", holevo.gap));
            pass &= !cfg.strict;
        }
        let tau = worst.item.expect("trials > 0");
        Ok(Outcome {
            slack: Some(Quantity::nats(slack)),
            pass,
            warning,
            witness: (slack < 0.0).then(|| witness_with(cell, worst.trial, &tau, &psi)),
            ..Outcome::default()
        }
        .value("bound", Quantity::nats(sat.rhs))
        .value("product_input_value", Quantity::nats(sat.lhs))
        .value("saturation_gap", Quantity::nats(saturation))
        .value("partner_chi", Quantity::nats(holevo.chi))
        .value("partner_certificate_gap", Quantity::nats(holevo.gap)))
    }
}

/// Entropy lower bound for a uniform dephaser times a random channel, on
/// inputs whose first marginal is diagonal.
pub struct EntropyLowerBound;

impl Check for EntropyLowerBound {
    fn name(&self) -> &'static str {
        "entropy-lower-bound"
    }

    fn anchor(&self) -> &'static str {
        anchors::ENTROPY_LOWER_BOUND
    }

    fn cells(&self, cfg: &RunConfig) -> Vec<Cell> {
        bipartite_cells(self.name(), cfg, false, phase_damping::lambda_range)
    }

    fn run_cell(&self, cell: &Cell, cfg: &RunConfig, digest: &mut InputDigest) -> anyhow::Result<Outcome> {
        let (d, dp, lambda) = (cell.usize("d")?, cell.usize("d_prime")?, cell.f64("lambda")?);
        let psi = partner(cell, dp, digest)?;
        let tol = cfg.tolerance(self.name(), ENTROPY_BOUND_TOL);
        let mut worst = Worst::new();
        for t in 0..cfg.trials {
            let seed = cell.trial_seed(t);
            let a = rng_from_seed(seed ^ 1).random_range(1..=chirp_count(d));
            let ph = phase_family(d, lambda, a)?;
            let raw = trial_state(d, dp, t, seed);
            let tau = raw.conjugate_first(&diagonalizing_unitary(&raw))?;
            digest.matrix(tau.matrix());
            let chk = entropy_lower_bound_check(&ph, &psi, &tau)?.check;
            worst.offer(chk.rhs + tol - chk.lhs, t, || tau.matrix().clone());
        }
        let pass = worst.slack >= 0.0;
        let tau = worst.item.expect("trials > 0");
        Ok(Outcome {
            slack: Some(Quantity::nats(worst.slack)),
            pass,
            witness: (!pass).then(|| witness_with(cell, worst.trial, &tau, &psi)),
            ..Outcome::default()
        }
        .value("trials", Quantity::plain(cfg.trials as f64)))
    }
}

/// Partner channels for the additivity check.
const PARTNERS: [&str; 3] = ["identity", "depolarizing", "random"];
const PARTNER_DIM: usize = 2;

/// `χ*(Δ⊗Ψ) = χ*(Δ) + χ*(Ψ)` for qubit partners, with each side bracketed by
/// its certificate.
pub struct ChiAdditivity;

impl Check for ChiAdditivity {
    fn name(&self) -> &'static str {
        "chi-additivity"
    }

    fn anchor(&self) -> &'static str {
        anchors::CHI_ADDITIVITY
    }

    fn cells(&self, cfg: &RunConfig) -> Vec<Cell> {
        let mut cells = Vec::new();
        for (i, &d) in cfg.dims.iter().enumerate() {
            let (lo, hi) = depolarizing::lambda_range(d);
            for (j, &l) in cfg.lambdas.iter().enumerate() {
                if !(lo..=hi).contains(&l) || d * PARTNER_DIM > qcap::capacity::MAX_PRODUCT_DIM {
                    continue;
                }
                for (k, kind) in PARTNERS.iter().enumerate() {
                    cells.push(Cell::new(
                        self.name(),
                        cfg.seed,
                        vec![i, j, k],
                        &[("d", d.into()), ("lambda", l.into()), ("partner", (*kind).into())],
                    ));
                }
            }
        }
        cells
    }

    fn run_cell(&self, cell: &Cell, cfg: &RunConfig, digest: &mut InputDigest) -> anyhow::Result<Outcome> {
        let (d, lambda) = (cell.usize("d")?, cell.f64("lambda")?);
        let dep = DepolarizingChannel::new(d, lambda)?;
        let kind = cell.params.get("partner").and_then(|v| v.as_str()).unwrap_or_default();
        let mut rng = rng_from_seed(derive_seed(cell.seed, &[u64::MAX]));
        let mut mu = None;
        let psi: Box<dyn QuantumChannel> = match kind {
            "identity" => Box::new(KrausChannel::identity(PARTNER_DIM)),
            "depolarizing" => {
                let m: f64 = rng.random_range(0.0..=1.0);
                mu = Some(m);
                Box::new(DepolarizingChannel::new(PARTNER_DIM, m)?)
            }
            "random" => Box::new(random_channel(PARTNER_DIM, PARTNER_DIM, PARTNER_DIM, &mut rng)?),
            other => anyhow::bail!("unknown partner kind {other:?}"),
        };
        for k in psi.kraus_operators() {
            digest.matrix(&k);
        }
        let rep = chi_additivity_check(&dep, psi.as_ref(), &HolevoOptions::with_seed(cell.seed))?;
        let tol = cfg.tolerance(self.name(), ADDITIVITY_TOL);
        // Certified bracket for χ*(Δ⊗Ψ) − χ*(Δ) − χ*(Ψ).
        let upper = rep.chi_product.upper_bound() - rep.chi_dep.chi - rep.chi_psi.chi;
        let lower = rep.chi_product.chi - rep.chi_dep.upper_bound() - rep.chi_psi.upper_bound();
        let slack = (tol - upper).min(tol + lower);
        let mut pass = slack >= 0.0;
        let mut warning = None;
        if !rep.converged() {
            warning = Some("a Holevo run did not reach its certificate tolerance".to_string());
            pass &= !cfg.strict;
        }
        let mut out = Outcome {
            slack: Some(Quantity::nats(slack)),
            pass,
            warning,
            witness: (slack < 0.0).then(|| Witness {
                trial: 0,
                seed: cell.seed,
                matrices: KrausChannel::new(psi.kraus_operators())
                    .map(|k| dump_channel(&k))
                    .unwrap_or_default(),
            }),
            ..Outcome::default()
        }
        .value("chi_product", Quantity::nats(rep.chi_product.chi))
        .value("chi_depolarizing", Quantity::nats(rep.chi_dep.chi))
        .value("chi_depolarizing_closed", Quantity::nats(rep.chi_dep_closed))
        .value("chi_partner", Quantity::nats(rep.chi_psi.chi))
        .value("gap", Quantity::nats(rep.gap()))
        .value("gap_certified_upper", Quantity::nats(upper))
        .value("gap_certified_lower", Quantity::nats(lower))
        .value("product_certificate_gap", Quantity::nats(rep.chi_product.gap));
        if let Some(m) = mu {
            out = out.value("mu", Quantity::plain(m));
        }
        Ok(out)
    }
}
