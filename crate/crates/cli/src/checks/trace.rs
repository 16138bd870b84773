use rand::Rng;

use qcap::bounds::{
    block_factorize, lemma3_bound, lieb_thirring_check, spectrum_identity_check, LEMMA3_TOL,
    LIEB_THIRRING_TOL,
};
use qcap::channel::choi_min_eigenvalue;
use qcap::decomposition::{chirp_count, phase_family};
use qcap::linalg::{cr, CMatrix};
use qcap::random::{random_bipartite_state, random_psd, rng_from_seed};
use qcap::{depolarizing, phase_damping, DepolarizingChannel, PhaseDampingChannel};

use super::{bipartite_cells, dim_lambda_cells, Cell, Check, Outcome, Worst};
use crate::anchors;
use crate::config::RunConfig;
use crate::report::{InputDigest, MatrixDump, Quantity, Witness};

const CHOI_TOL: f64 = 1e-10;
const SPECTRUM_TOL: f64 = 1e-9;
const BLOCK_TOL: f64 = 1e-10;

fn witness(cell: &Cell, trial: usize, named: &[(&str, &CMatrix)]) -> Witness {
    Witness {
        trial,
        seed: cell.trial_seed(trial),
        matrices: named.iter().map(|(n, m)| MatrixDump::new(n, m)).collect(),
    }
}

/// Choi spectrum agrees with the stated parameter ranges. With
/// `--unchecked-lambda` this probes values outside them.
pub struct CpWitness;

impl Check for CpWitness {
    fn name(&self) -> &'static str {
        "cp-witness"
    }

    fn anchor(&self) -> &'static str {
        anchors::CP_RANGE
    }

    fn cells(&self, cfg: &RunConfig) -> Vec<Cell> {
        dim_lambda_cells(self.name(), cfg)
    }

    fn run_cell(&self, cell: &Cell, cfg: &RunConfig, _: &mut InputDigest) -> anyhow::Result<Outcome> {
        let (d, lambda) = (cell.usize("d")?, cell.f64("lambda")?);
        let tol = cfg.tolerance(self.name(), CHOI_TOL);
        let dep = choi_min_eigenvalue(&DepolarizingChannel::new_unchecked(d, lambda));
        let basis = PhaseDampingChannel::computational(d, 0.0)?.basis().to_vec();
        let deph = choi_min_eigenvalue(&PhaseDampingChannel::new_unchecked(basis, lambda)?);
        let in_range = |(lo, hi): (f64, f64)| (lo..=hi).contains(&lambda);
        let dep_in = in_range(depolarizing::lambda_range(d));
        let deph_in = in_range(phase_damping::lambda_range(d));
        // Inside the range the Choi matrix must be PSD; outside it must not be.
        let agrees = |min_eig: f64, inside: bool| (min_eig >= -tol) == inside;
        let pass = agrees(dep, dep_in) && agrees(deph, deph_in);
        Ok(Outcome {
            pass,
            warning: (!dep_in).then(|| format!("lambda outside the depolarizing range for d = {d}")),
            ..Outcome::default()
        }
        .value("choi_min_depolarizing", Quantity::plain(dep))
        .value("choi_min_dephasing", Quantity::plain(deph))
        .value("depolarizing_in_range", Quantity::plain(f64::from(u8::from(dep_in))))
        .value("dephasing_in_range", Quantity::plain(f64::from(u8::from(deph_in)))))
    }
}

/// Trace-normalized random PSD pairs.
pub struct LiebThirring;

impl Check for LiebThirring {
    fn name(&self) -> &'static str {
        "lieb-thirring"
    }

    fn anchor(&self) -> &'static str {
        anchors::LIEB_THIRRING
    }

    fn cells(&self, cfg: &RunConfig) -> Vec<Cell> {
        let mut cells = Vec::new();
        for (i, &d) in cfg.dims.iter().enumerate() {
            for (k, &p) in cfg.p_grid.iter().enumerate() {
                cells.push(Cell::new(self.name(), cfg.seed, vec![i, k], &[("dim", d.into()), ("p", p.into())]));
            }
        }
        cells
    }

    fn run_cell(&self, cell: &Cell, cfg: &RunConfig, digest: &mut InputDigest) -> anyhow::Result<Outcome> {
        let (d, p) = (cell.usize("dim")?, cell.f64("p")?);
        let tol = cfg.tolerance(self.name(), LIEB_THIRRING_TOL);
        let mut worst = Worst::new();
        let mut max_ratio: f64 = 0.0;
        for t in 0..cfg.trials {
            let mut rng = rng_from_seed(cell.trial_seed(t));
            let normalize = |m: CMatrix| {
                let tr = m.trace().re;
                m / cr(tr)
            };
            let a = normalize(random_psd(d, &mut rng));
            let b = normalize(random_psd(d, &mut rng));
            digest.matrix(&a);
            digest.matrix(&b);
            let chk = lieb_thirring_check(&a, &b, p)?;
            max_ratio = max_ratio.max(chk.lhs / chk.rhs);
            worst.offer(chk.rhs + tol - chk.lhs, t, || (a.clone(), b.clone()));
        }
        let pass = worst.slack >= 0.0;
        let (a, b) = worst.item.expect("trials > 0");
        Ok(Outcome {
            slack: Some(Quantity::plain(worst.slack)),
            pass,
            witness: (!pass).then(|| witness(cell, worst.trial, &[("A", &a), ("B", &b)])),
            ..Outcome::default()
        }
        .value("max_lhs_over_rhs", Quantity::plain(max_ratio))
        .value("trials", Quantity::plain(cfg.trials as f64)))
    }
}

/// Output norm of a uniform dephaser on half of a random bipartite state.
pub struct DephasedBlockBound;

impl Check for DephasedBlockBound {
    fn name(&self) -> &'static str {
        "dephased-block-bound"
    }

    fn anchor(&self) -> &'static str {
        anchors::DEPHASED_BLOCK_BOUND
    }

    fn cells(&self, cfg: &RunConfig) -> Vec<Cell> {
        bipartite_cells(self.name(), cfg, true, phase_damping::lambda_range)
    }

    fn run_cell(&self, cell: &Cell, cfg: &RunConfig, digest: &mut InputDigest) -> anyhow::Result<Outcome> {
        let (d, dp, lambda, p) = (cell.usize("d")?, cell.usize("d_prime")?, cell.f64("lambda")?, cell.f64("p")?);
        let tol = cfg.tolerance(self.name(), LEMMA3_TOL);
        let mut worst = Worst::new();
        for t in 0..cfg.trials {
            let mut rng = rng_from_seed(cell.trial_seed(t));
            let a = rng.random_range(1..=chirp_count(d));
            let ch = phase_family(d, lambda, a)?;
            let rho = random_bipartite_state(d, dp, &mut rng);
            digest.matrix(ch.basis_matrix());
            digest.matrix(rho.matrix());
            let chk = lemma3_bound(&ch, &rho, p)?;
            worst.offer(chk.rhs + tol - chk.lhs, t, || (ch.basis_matrix().clone(), rho.matrix().clone()));
        }
        let pass = worst.slack >= 0.0;
        let (basis, rho) = worst.item.expect("trials > 0");
        Ok(Outcome {
            slack: Some(Quantity::plain(worst.slack)),
            pass,
            witness: (!pass).then(|| witness(cell, worst.trial, &[("basis", &basis), ("rho12", &rho)])),
            ..Outcome::default()
        }
        .value("trials", Quantity::plain(cfg.trials as f64)))
    }
}

/// Spectrum and block identities behind the dephased bound, for every `p`.
pub struct SpectrumIdentity;

impl Check for SpectrumIdentity {
    fn name(&self) -> &'static str {
        "spectrum-identity"
    }

    fn anchor(&self) -> &'static str {
        anchors::SPECTRUM_IDENTITY
    }

    fn cells(&self, cfg: &RunConfig) -> Vec<Cell> {
        bipartite_cells(self.name(), cfg, false, phase_damping::lambda_range)
    }

    fn run_cell(&self, cell: &Cell, cfg: &RunConfig, digest: &mut InputDigest) -> anyhow::Result<Outcome> {
        let (d, dp, lambda) = (cell.usize("d")?, cell.usize("d_prime")?, cell.f64("lambda")?);
        let tol = cfg.tolerance(self.name(), SPECTRUM_TOL);
        let (mut spec, mut recon, mut asym) = (0.0f64, 0.0f64, 0.0f64);
        let mut worst = Worst::new();
        for t in 0..cfg.trials {
            let mut rng = rng_from_seed(cell.trial_seed(t));
            let a = rng.random_range(1..=chirp_count(d));
            let ch = phase_family(d, lambda, a)?;
            let rho = random_bipartite_state(d, dp, &mut rng);
            digest.matrix(rho.matrix());
            let id = spectrum_identity_check(&ch, &rho)?;
            let fact = block_factorize(&rho);
            let a_max = cfg
                .p_grid
                .iter()
                .map(|&p| fact.power_trace_asymmetry(p))
                .fold(0.0, f64::max);
            spec = spec.max(id.spectrum_deviation);
            recon = recon.max(id.reconstruction_deviation);
            asym = asym.max(a_max);
            let margin = (tol - id.spectrum_deviation)
                .min(BLOCK_TOL - id.reconstruction_deviation)
                .min(BLOCK_TOL - a_max);
            worst.offer(margin, t, || rho.matrix().clone());
        }
        let pass = worst.slack >= 0.0;
        let rho = worst.item.expect("trials > 0");
        Ok(Outcome {
            slack: Some(Quantity::plain(worst.slack)),
            pass,
            witness: (!pass).then(|| witness(cell, worst.trial, &[("rho12", &rho)])),
            ..Outcome::default()
        }
        .value("max_spectrum_deviation", Quantity::plain(spec))
        .value("max_reconstruction_deviation", Quantity::plain(recon))
        .value("max_power_trace_asymmetry", Quantity::plain(asym)))
    }
}
