use qcap::capacity::{holevo_quantity, HolevoOptions};
use qcap::depolarizing::lambda_range;
use qcap::optimize::{max_output_p_norm, min_output_entropy, SphereOptions};
use qcap::random::derive_seed;
use qcap::DepolarizingChannel;

use super::{in_range_cells, Cell, Check, Outcome};
use crate::anchors;
use crate::config::RunConfig;
use crate::report::{InputDigest, Quantity};

/// Closed forms against brute-force optimization, one cell per `(d, λ, p)`.
pub struct ClosedForms;

const TOL: f64 = 1e-6;

impl Check for ClosedForms {
    fn name(&self) -> &'static str {
        "closed-forms"
    }

    fn anchor(&self) -> &'static str {
        anchors::CLOSED_FORMS
    }

    fn cells(&self, cfg: &RunConfig) -> Vec<Cell> {
        let mut cells = Vec::new();
        for base in in_range_cells(self.name(), cfg, lambda_range) {
            for (k, &p) in cfg.p_grid.iter().enumerate() {
                let mut index = base.index.clone();
                index.push(k);
                let params: Vec<(&str, serde_json::Value)> = vec![
                    ("d", base.params["d"].clone()),
                    ("lambda", base.params["lambda"].clone()),
                    ("p", p.into()),
                ];
                cells.push(Cell::new(self.name(), cfg.seed, index, &params));
            }
        }
        cells
    }

    fn run_cell(&self, cell: &Cell, cfg: &RunConfig, _: &mut InputDigest) -> anyhow::Result<Outcome> {
        let (d, lambda, p) = (cell.usize("d")?, cell.f64("lambda")?, cell.f64("p")?);
        let ch = DepolarizingChannel::new(d, lambda)?;
        let sphere = |label: u64| SphereOptions::with_seed(derive_seed(cell.seed, &[label])).restarts(cfg.restarts);

        let s_min = ch.s_min_closed();
        let s_num = min_output_entropy(&ch, &sphere(0)).value;
        let nu = ch.nu_p_closed(p)?;
        let nu_num = max_output_p_norm(&ch, p, &sphere(1))?.value;
        let chi = ch.chi_star_closed();
        let holevo = holevo_quantity(
            &ch,
            &HolevoOptions {
                seed: derive_seed(cell.seed, &[2]),
                ..HolevoOptions::default()
            },
        )?;

        let gaps = [s_num - s_min, nu_num - nu, holevo.chi - chi];
        let worst = gaps.iter().map(|g| g.abs()).fold(0.0, f64::max);
        let tol = cfg.tolerance(self.name(), TOL);
        let out = Outcome {
            slack: Some(Quantity::plain(tol - worst)),
            pass: worst < tol,
            warning: (!holevo.converged).then(|| format!("Holevo certificate gap {:e}", holevo.gap)),
            ..Outcome::default()
        };
        Ok(out
            .value("s_min_closed", Quantity::nats(s_min))
            .value("s_min_numeric", Quantity::nats(s_num))
            .value("nu_p_closed", Quantity::plain(nu))
            .value("nu_p_numeric", Quantity::plain(nu_num))
            .value("chi_closed", Quantity::nats(chi))
            .value("chi_numeric", Quantity::nats(holevo.chi))
            .value("chi_certified_upper", Quantity::nats(holevo.upper_bound()))
            .value("s_min_gap", Quantity::nats(gaps[0]))
            .value("nu_p_gap", Quantity::plain(gaps[1]))
            .value("chi_gap", Quantity::nats(gaps[2]))
            .value("restarts", Quantity::plain(cfg.restarts as f64)))
    }
}
