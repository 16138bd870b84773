use crate::bounds::conditional_states;
use crate::channel::{tensor_channel, QuantumChannel};
use crate::depolarizing::DepolarizingChannel;
use crate::error::{ensure_dim, Error, Result};
use crate::inequality::InequalityCheck;
use crate::linalg::{cr, eigvalsh, hermitize, max_abs_diff, off_diagonal_max, CMatrix};
use crate::measures::{relative_entropy, spectral_entropy};
use crate::phase_damping::{is_uniform_channel, PhaseDampingChannel};
use crate::random::derive_seed;
use crate::state::{BipartiteState, DensityMatrix, Subsystem};

use super::holevo::{holevo_quantity, HolevoOptions, HolevoResult};

pub const LEMMA7_TOL: f64 = 1e-6;
pub const ENTROPY_BOUND_TOL: f64 = 1e-8;
pub const ADDITIVITY_TOL: f64 = 1e-4;
/// Largest product input dimension handed to the Holevo optimizer.
pub const MAX_PRODUCT_DIM: usize = 12;
const DIAGONAL_TOL: f64 = 1e-10;

fn entropy_of(m: &CMatrix) -> f64 {
    spectral_entropy(&eigvalsh(&hermitize(m)).into_iter().map(|v| v.max(0.0)).collect::<Vec<_>>())
}

/// `S((Δ⊗Ψ)(τ12) ‖ I/d ⊗ Ψ(ω*)) ≤ χ*(Δ) + χ*(Ψ)`, with `Ψ(ω*)` and
/// `χ*(Ψ)` taken from a Holevo run on `Ψ`.
pub fn lemma7_check(
    dep: &DepolarizingChannel,
    psi: &dyn QuantumChannel,
    tau12: &BipartiteState,
    psi_holevo: &HolevoResult,
) -> Result<InequalityCheck> {
    ensure_dim(dep.dim(), tau12.dim1())?;
    ensure_dim(psi.dim_in(), tau12.dim2())?;
    ensure_dim(psi.dim_out(), psi_holevo.output_average.dim())?;
    let out = tensor_channel(dep, psi).apply(tau12.state())?;
    let reference = DensityMatrix::maximally_mixed(dep.dim()).tensor(&psi_holevo.output_average);
    let lhs = relative_entropy(&out, &reference);
    let rhs = dep.chi_star_closed() + psi_holevo.chi;
    Ok(InequalityCheck::new(lhs, rhs, LEMMA7_TOL))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyLowerBound {
    pub check: InequalityCheck,
    /// `x_i = Tr τ2^{(i)}`.
    pub x: Vec<f64>,
    /// `max |Σ_i τ2^{(i)} − τ2|`.
    pub marginal_defect: f64,
}

impl EntropyLowerBound {
    pub fn x_uniform(&self) -> bool {
        let d = self.x.len() as f64;
        self.x.iter().all(|x| (x - 1.0 / d).abs() < 1e-10)
    }
}

/// `S((Φ⊗Ψ)(τ12)) ≥ ln d − χ*(Δ_λ) + (1/d) Σ_i S(Ψ(d τ2^{(i)}))` for a uniform
/// dephaser `Φ_λ` and `τ1` diagonal. Reported as `rhs ≤ lhs`, so the returned
/// check has `lhs` = the bound and `rhs` = the entropy.
pub fn entropy_lower_bound_check(
    ph: &PhaseDampingChannel,
    psi: &dyn QuantumChannel,
    tau12: &BipartiteState,
) -> Result<EntropyLowerBound> {
    let d = ph.dim();
    ensure_dim(d, tau12.dim1())?;
    ensure_dim(psi.dim_in(), tau12.dim2())?;
    if !is_uniform_channel(ph) {
        return Err(Error::Precondition("phase-damping channel is not uniform".into()));
    }
    let tau1 = tau12.reduced(Subsystem::Second);
    let off = off_diagonal_max(tau1.matrix());
    if off > DIAGONAL_TOL {
        return Err(Error::Precondition(format!(
            "first marginal is not diagonal (largest off-diagonal {off:e})"
        )));
    }
    let cond = conditional_states(tau12, &ph.projectors())?;
    let x: Vec<f64> = cond.iter().map(|c| c.trace().re).collect();
    let mut sum = CMatrix::zeros(tau12.dim2(), tau12.dim2());
    for c in &cond {
        sum += c;
    }
    let marginal_defect = max_abs_diff(&sum, tau12.reduced(Subsystem::First).matrix());

    let entropy = entropy_of(&tensor_channel(ph, psi).apply_matrix(tau12.matrix()));
    let chi_dep = DepolarizingChannel::new_unchecked(d, ph.lambda()).chi_star_closed();
    let avg: f64 = cond
        .iter()
        .map(|c| entropy_of(&psi.apply_matrix(&(c * cr(d as f64)))))
        .sum::<f64>()
        / d as f64;
    let bound = -chi_dep + (d as f64).ln() + avg;
    Ok(EntropyLowerBound {
        check: InequalityCheck::new(bound, entropy, ENTROPY_BOUND_TOL),
        x,
        marginal_defect,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdditivityReport {
    pub chi_product: HolevoResult,
    pub chi_dep: HolevoResult,
    pub chi_psi: HolevoResult,
    pub chi_dep_closed: f64,
}

impl AdditivityReport {
    /// `χ*(Δ⊗Ψ) − χ*(Δ) − χ*(Ψ)` from the optimizer values.
    pub fn gap(&self) -> f64 {
        self.chi_product.chi - self.chi_dep.chi - self.chi_psi.chi
    }

    pub fn converged(&self) -> bool {
        self.chi_product.converged && self.chi_dep.converged && self.chi_psi.converged
    }

    pub fn holds(&self) -> bool {
        self.gap().abs() <= ADDITIVITY_TOL
    }
}

pub fn chi_additivity_check(
    dep: &DepolarizingChannel,
    psi: &dyn QuantumChannel,
    opts: &HolevoOptions,
) -> Result<AdditivityReport> {
    let din = dep.dim() * psi.dim_in();
    if din > MAX_PRODUCT_DIM {
        return Err(Error::Domain(format!(
            "product input dimension {din} exceeds {MAX_PRODUCT_DIM}"
        )));
    }
    let with_seed = |label: u64| HolevoOptions {
        seed: derive_seed(opts.seed, &[label]),
        ..opts.clone()
    };
    let product = tensor_channel(dep, psi);
    Ok(AdditivityReport {
        chi_product: holevo_quantity(&product, &with_seed(0))?,
        chi_dep: holevo_quantity(dep, &with_seed(1))?,
        chi_psi: holevo_quantity(psi, &with_seed(2))?,
        chi_dep_closed: dep.chi_star_closed(),
    })
}

#[cfg(test)]
mod tests {
    use super::super::{holevo_of_ensemble, opwsw_certificate, Ensemble};
    use super::*;
    use crate::channel::KrausChannel;
    use crate::decomposition::psi_basis;
    use crate::random::{haar_unitary, random_bipartite_state, random_channel, random_pure_state, rng_from_seed};

    #[test]
    fn holevo_of_ensemble_examples() {
        let dep = DepolarizingChannel::new(3, 0.4).unwrap();
        let single = Ensemble::new(vec![(1.0, DensityMatrix::basis_projector(3, 1))]).unwrap();
        assert_eq!(holevo_of_ensemble(&dep, &single).unwrap(), 0.0);
        let basis = holevo_of_ensemble(&dep, &Ensemble::basis(3)).unwrap();
        assert!((basis - dep.chi_star_closed()).abs() < 1e-13);
        let mut rng = rng_from_seed(2);
        for _ in 0..20 {
            let items = (0..4)
                .map(|_| (0.25, DensityMatrix::from(&random_pure_state(3, &mut rng))))
                .collect();
            let e = Ensemble::new(items).unwrap();
            let chi = holevo_of_ensemble(&dep, &e).unwrap();
            assert!(chi >= 0.0 && chi <= dep.chi_star_closed() + 1e-9);
        }
    }

    #[test]
    fn holevo_quantity_depolarizing() {
        for (d, lambda) in [(2, 0.5), (3, 0.3)] {
            let dep = DepolarizingChannel::new(d, lambda).unwrap();
            let res = holevo_quantity(&dep, &HolevoOptions::with_seed(7)).unwrap();
            assert!(res.converged, "gap {}", res.gap);
            assert!((res.chi - dep.chi_star_closed()).abs() < 1e-6);
        }
    }

    #[test]
    fn holevo_identity_is_ln_d() {
        let res = holevo_quantity(&KrausChannel::identity(3), &HolevoOptions::with_seed(1)).unwrap();
        assert!((res.chi - 3f64.ln()).abs() < 1e-7, "{}", res.chi);
    }

    #[test]
    fn omega_star_is_maximally_mixed() {
        let dep = DepolarizingChannel::new(2, 0.5).unwrap();
        let opts = HolevoOptions {
            gap_tol: 1e-13,
            ..HolevoOptions::with_seed(3)
        };
        let res = holevo_quantity(&dep, &opts).unwrap();
        let mixed = DensityMatrix::maximally_mixed(2);
        let dev = max_abs_diff(res.omega_star.matrix(), mixed.matrix());
        assert!(dev < 1e-6, "omega* deviation {dev}, gap {}", res.gap);
    }

    #[test]
    fn unitary_covariance() {
        let mut rng = rng_from_seed(5);
        let dep = DepolarizingChannel::new(2, 0.6).unwrap();
        let u = haar_unitary(2, &mut rng);
        let k: Vec<CMatrix> = dep.kraus_operators().iter().map(|k| &u * k).collect();
        let rotated = KrausChannel::new(k).unwrap();
        let res = holevo_quantity(&rotated, &HolevoOptions::with_seed(5)).unwrap();
        assert!((res.chi - dep.chi_star_closed()).abs() < 1e-6);
    }

    #[test]
    fn certificate_examples() {
        let dep = DepolarizingChannel::new(2, 0.5).unwrap();
        let c = opwsw_certificate(&dep, &DensityMatrix::maximally_mixed(2), 8, 1).unwrap();
        assert!((c.value - dep.chi_star_closed()).abs() < 1e-10);
        let off = opwsw_certificate(&dep, &DensityMatrix::basis_projector(2, 0), 8, 1).unwrap();
        assert!(off.value > dep.chi_star_closed() + 1e-3);
        let id = KrausChannel::identity(3);
        let c = opwsw_certificate(&id, &DensityMatrix::maximally_mixed(3), 8, 1).unwrap();
        assert!((c.value - 3f64.ln()).abs() < 1e-10);
        assert!(matches!(
            opwsw_certificate(&id, &DensityMatrix::basis_projector(3, 0), 4, 1),
            Err(Error::Support(_))
        ));
    }

    #[test]
    fn lemma7_random_and_saturated() {
        let mut rng = rng_from_seed(9);
        let dep = DepolarizingChannel::new(2, 0.4).unwrap();
        let psi = random_channel(2, 2, 2, &mut rng).unwrap();
        let hol = holevo_quantity(&psi, &HolevoOptions::with_seed(9)).unwrap();
        for _ in 0..20 {
            let tau = random_bipartite_state(2, 2, &mut rng);
            assert!(lemma7_check(&dep, &psi, &tau, &hol).unwrap().holds());
        }
        let tau = BipartiteState::product(&DensityMatrix::basis_projector(2, 0), &DensityMatrix::from(&hol.witness));
        let c = lemma7_check(&dep, &psi, &tau, &hol).unwrap();
        assert!((c.lhs - c.rhs).abs() < 1e-6, "{} vs {}", c.lhs, c.rhs);
        let mixed = lemma7_check(&dep, &psi, &BipartiteState::maximally_mixed(2, 2), &hol).unwrap();
        assert!(mixed.slack() > 0.0);
    }

    #[test]
    fn entropy_lower_bound_examples() {
        let mut rng = rng_from_seed(11);
        let psi = random_channel(2, 2, 2, &mut rng).unwrap();
        for lambda in [1.0, 0.5, 0.0] {
            let ph = PhaseDampingChannel::new(psi_basis(3, 2).unwrap(), lambda).unwrap();
            for _ in 0..5 {
                let tau = random_bipartite_state(3, 2, &mut rng);
                let u = crate::bounds::diagonalizing_unitary(&tau);
                let tau = tau.conjugate_first(&u).unwrap();
                let r = entropy_lower_bound_check(&ph, &psi, &tau).unwrap();
                assert!(r.check.holds(), "slack {}", r.check.slack());
                assert!(r.x_uniform());
                assert!(r.marginal_defect < 1e-12);
            }
        }
        let comp = PhaseDampingChannel::computational(2, 0.5).unwrap();
        let tau = BipartiteState::maximally_mixed(2, 2);
        assert!(entropy_lower_bound_check(&comp, &psi, &tau).is_err());
    }

    #[test]
    fn additivity_with_identity() {
        let dep = DepolarizingChannel::new(2, 0.5).unwrap();
        let r = chi_additivity_check(&dep, &KrausChannel::identity(2), &HolevoOptions::with_seed(4)).unwrap();
        assert!(r.holds(), "gap {}", r.gap());
        assert!(chi_additivity_check(&dep, &KrausChannel::identity(7), &HolevoOptions::default()).is_err());
    }
}
