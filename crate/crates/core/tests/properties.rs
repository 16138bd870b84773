use proptest::prelude::*;

use qcap::bounds::{block_factorize, conditional_states, spectrum_identity_check};
use qcap::capacity::{
    holevo_of_ensemble, holevo_quantity, shannon_capacity_fixed, transition_matrix, Ensemble,
    HolevoOptions, Povm,
};
use qcap::channel::{choi_min_eigenvalue, KrausChannel};
use qcap::decomposition::{averaged_projection_defect, full_decomposition, phase_family};
use qcap::depolarizing::lambda_range;
use qcap::linalg::{hermitian_defect, max_abs_diff, min_eigenvalue, outer};
use qcap::measures::{relative_entropy, schatten_p_norm, von_neumann_entropy};
use qcap::phase_damping::is_uniform_channel;
use qcap::random::{
    haar_unitary, random_bipartite_state, random_channel, random_density_matrix, random_pure_state,
    rng_from_seed,
};
use qcap::state::partial_trace;
use qcap::{
    BipartiteState, DensityMatrix, DepolarizingChannel, PhaseDampingChannel, QuantumChannel,
    Subsystem,
};

fn valid_state(rho: &DensityMatrix) -> bool {
    let m = rho.matrix();
    (m.trace().re - 1.0).abs() < 1e-10 && min_eigenvalue(m) > -1e-10 && hermitian_defect(m) < 1e-12
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn depolarized_states_are_valid(seed in any::<u64>(), d in 2usize..=5, t in 0.0f64..=1.0) {
        let (lo, hi) = lambda_range(d);
        let ch = DepolarizingChannel::new(d, lo + t * (hi - lo)).unwrap();
        let mut rng = rng_from_seed(seed);
        let rho = random_density_matrix(d, &mut rng);
        prop_assert!(valid_state(&ch.depolarize(&rho).unwrap()));
        prop_assert!(choi_min_eigenvalue(&ch) > -1e-10);
    }

    #[test]
    fn p_norm_nonincreasing_in_p(seed in any::<u64>(), d in 2usize..=6) {
        let rho = random_density_matrix(d, &mut rng_from_seed(seed));
        let norms: Vec<f64> = [1.0, 1.5, 2.0, 3.0, 5.0]
            .iter()
            .map(|&p| schatten_p_norm(rho.matrix(), p).unwrap())
            .collect();
        prop_assert!(norms.windows(2).all(|w| w[1] <= w[0] + 1e-14));
    }

    #[test]
    fn p_norm_derivative_is_entropy(seed in any::<u64>(), d in 2usize..=5) {
        let rho = random_density_matrix(d, &mut rng_from_seed(seed));
        let h = 1e-4;
        let spec = rho.eigenvalues();
        let norm = |p: f64| spec.iter().filter(|x| **x > 0.0).map(|x| x.powf(p)).sum::<f64>().powf(1.0 / p);
        let fd = (norm(1.0 + h) - norm(1.0 - h)) / (2.0 * h);
        prop_assert!((fd + von_neumann_entropy(&rho)).abs() < 1e-5);
    }

    #[test]
    fn klein_inequality(seed in any::<u64>(), d in 2usize..=5) {
        let mut rng = rng_from_seed(seed);
        let rho = random_density_matrix(d, &mut rng);
        let omega = random_density_matrix(d, &mut rng);
        prop_assert!(relative_entropy(&rho, &omega) >= -1e-12);
    }

    #[test]
    fn partial_trace_undoes_tensor(seed in any::<u64>(), d1 in 2usize..=4, d2 in 2usize..=4) {
        let mut rng = rng_from_seed(seed);
        let rho = random_density_matrix(d1, &mut rng);
        let sigma = random_density_matrix(d2, &mut rng);
        let joint = BipartiteState::product(&rho, &sigma);
        let back = partial_trace(&joint, Subsystem::Second);
        prop_assert!(max_abs_diff(back.matrix(), rho.matrix()) < 1e-12);
    }

    #[test]
    fn pure_outputs_attain_nu_p(seed in any::<u64>(), d in 2usize..=5, l in 0.0f64..=1.0, p in 1.0f64..6.0) {
        let ch = DepolarizingChannel::new(d, l).unwrap();
        let psi = random_pure_state(d, &mut rng_from_seed(seed));
        let out = ch.depolarize(&(&psi).into()).unwrap();
        let norm = schatten_p_norm(out.matrix(), p).unwrap();
        prop_assert!((norm - ch.nu_p_closed(p).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn phase_damping_scales_off_diagonal(seed in any::<u64>(), d in 2usize..=5, l in -0.25f64..=1.0) {
        let mut rng = rng_from_seed(seed);
        let u = haar_unitary(d, &mut rng);
        let ch = PhaseDampingChannel::computational(d, l).unwrap().rotated(&u).unwrap();
        let rho = random_density_matrix(d, &mut rng);
        let out = ch.phase_damp(&rho).unwrap();
        let b = ch.basis_matrix();
        let (rin, rout) = (b.adjoint() * rho.matrix() * b, b.adjoint() * out.matrix() * b);
        for i in 0..d {
            for j in 0..d {
                let factor = if i == j { 1.0 } else { l };
                prop_assert!((rout[(i, j)] - rin[(i, j)] * factor).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn complete_dephasing_is_idempotent(seed in any::<u64>(), d in 2usize..=5) {
        let mut rng = rng_from_seed(seed);
        let ch = PhaseDampingChannel::computational(d, 0.0).unwrap().rotated(&haar_unitary(d, &mut rng)).unwrap();
        let rho = random_density_matrix(d, &mut rng);
        let once = ch.phase_damp(&rho).unwrap();
        let twice = ch.phase_damp(&once).unwrap();
        prop_assert!(max_abs_diff(once.matrix(), twice.matrix()) < 1e-12);
    }

    #[test]
    fn averaged_projection_identity(seed in any::<u64>(), d in 2usize..=5) {
        let rho = random_density_matrix(d, &mut rng_from_seed(seed));
        prop_assert!(averaged_projection_defect(rho.matrix()).unwrap() < 1e-10);
    }

    #[test]
    fn spectrum_and_block_identities(seed in any::<u64>(), d in 2usize..=3, dp in 2usize..=3, l in 0.0f64..=1.0, p in 1.0f64..4.0) {
        let mut rng = rng_from_seed(seed);
        let rho12 = random_bipartite_state(d, dp, &mut rng);
        let ch = phase_family(d, l, 1 + (seed as usize) % (2 * d * d)).unwrap();
        let id = spectrum_identity_check(&ch, &rho12).unwrap();
        prop_assert!(id.spectrum_deviation < 1e-9);
        prop_assert!(id.reconstruction_deviation < 1e-12);
        prop_assert!(block_factorize(&rho12).power_trace_asymmetry(p) < 1e-10);
        let conds = conditional_states(&rho12, &ch.projectors()).unwrap();
        prop_assert_eq!(conds.len(), d);
    }
}

proptest! {
    #![proptest_config(config(16))]

    #[test]
    fn decomposition_terms_are_uniform_channels(d in 2usize..=4, l in 0.0f64..=1.0) {
        let dec = full_decomposition(d, l).unwrap();
        prop_assert!((dec.weight_sum() - 1.0).abs() < 1e-12);
        prop_assert!(dec.min_weight() >= 0.0);
        prop_assert!(dec.terms.iter().all(|t| is_uniform_channel(&t.channel)));
        prop_assert!(dec.reconstruction_distance() < 1e-10);
        let t = &dec.terms[dec.len() - 1];
        let conj = KrausChannel::new(t.channel.kraus_operators()).unwrap().conjugated_by(&t.unitary).unwrap();
        prop_assert!(conj.tp_residual() < 1e-10);
        prop_assert!(choi_min_eigenvalue(&conj) > -1e-10);
    }

    #[test]
    fn holevo_bounds_shannon(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let ch = random_channel(2, 2, 2, &mut rng).unwrap();
        let states: Vec<(f64, DensityMatrix)> = (0..3)
            .map(|_| (1.0 / 3.0, DensityMatrix::from(&random_pure_state(2, &mut rng))))
            .collect();
        let u = haar_unitary(2, &mut rng);
        let povm = Povm::new((0..2).map(|i| outer(&u.column(i).into_owned())).collect()).unwrap();
        let ens = Ensemble::new(states).unwrap();
        let t = transition_matrix(&ch, &ens, &povm).unwrap();
        let cap = shannon_capacity_fixed(&t);
        prop_assert!(cap.monotone);
        let chi = holevo_quantity(&ch, &HolevoOptions::with_seed(seed)).unwrap();
        prop_assert!(cap.capacity <= chi.chi + 1e-6);
        prop_assert!(holevo_of_ensemble(&ch, &ens).unwrap() <= chi.upper_bound() + 1e-9);
        prop_assert!(holevo_of_ensemble(&ch, &ens).unwrap() >= 0.0);
    }
}

#[test]
fn choi_witness_outside_range() {
    for d in 2..=4 {
        let (lo, _) = lambda_range(d);
        assert!(choi_min_eigenvalue(&DepolarizingChannel::new_unchecked(d, lo)) > -1e-10);
        assert!(choi_min_eigenvalue(&DepolarizingChannel::new_unchecked(d, lo - 0.01)) < -1e-6);
        let lo = -1.0 / (d as f64 - 1.0);
        let ph = PhaseDampingChannel::new_unchecked(PhaseDampingChannel::computational(d, 0.0).unwrap().basis().to_vec(), lo).unwrap();
        assert!(choi_min_eigenvalue(&ph) > -1e-10);
        let ph = PhaseDampingChannel::new_unchecked(ph.basis().to_vec(), lo - 0.01).unwrap();
        assert!(choi_min_eigenvalue(&ph) < -1e-6);
    }
}

#[test]
fn uniform_dephasers_are_unital() {
    for d in 2..=5 {
        let ch = phase_family(d, 0.3, 2).unwrap();
        let mm = DensityMatrix::maximally_mixed(d);
        let out = ch.phase_damp(&mm).unwrap();
        assert!(max_abs_diff(out.matrix(), mm.matrix()) < 1e-12);
    }
}
