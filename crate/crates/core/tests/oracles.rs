//! Reference values computed outside this crate with numpy.

use qcap::capacity::{
    mutual_information, shannon_capacity_depolarizing, shannon_capacity_fixed, transition_matrix,
    ClassicalChannelMatrix, Ensemble, Povm,
};
use qcap::decomposition::{diophantine_solutions, full_decomposition};
use qcap::linalg::{cr, max_abs_diff, CMatrix};
use qcap::measures::{relative_entropy, schatten_p_norm, von_neumann_entropy};
use qcap::{DensityMatrix, DepolarizingChannel, PhaseDampingChannel, PureState, QuantumChannel};

const LN2: f64 = std::f64::consts::LN_2;

fn diag(p: &[f64]) -> DensityMatrix {
    DensityMatrix::diagonal(p).unwrap()
}

#[test]
fn entropy_and_norm_values() {
    let rho = diag(&[0.75, 0.25]);
    assert!((von_neumann_entropy(&rho) - 0.5623351446188083).abs() < 1e-14);
    assert!((schatten_p_norm(rho.matrix(), 2.0).unwrap() - 0.7905694150420949).abs() < 1e-14);
    let rel = relative_entropy(&rho, &DensityMatrix::maximally_mixed(2));
    assert!((rel - 0.13081203594113697).abs() < 1e-14);
}

#[test]
fn depolarizing_closed_forms() {
    let d2 = DepolarizingChannel::new(2, 0.5).unwrap();
    assert!((d2.s_min_closed() - 0.5623351446188083).abs() < 1e-14);
    assert!((d2.chi_star_closed() - 0.130812035941137).abs() < 1e-14);
    let d3 = DepolarizingChannel::new(3, 0.5).unwrap();
    assert!((d3.nu_p_closed(2.0).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-14);
    let d3 = DepolarizingChannel::new(3, 0.6).unwrap();
    assert!((d3.chi_star_closed() - 0.33385786910069015).abs() < 1e-14);

    let out = d2.apply(&(&PureState::basis(2, 0)).into()).unwrap();
    assert!(max_abs_diff(out.matrix(), diag(&[0.75, 0.25]).matrix()) < 1e-15);
}

#[test]
fn trivial_endpoints() {
    for d in 2..=4 {
        let id = DepolarizingChannel::new(d, 1.0).unwrap();
        assert!(id.s_min_closed().abs() < 1e-15);
        assert!((id.chi_star_closed() - (d as f64).ln()).abs() < 1e-15);
        assert!((id.nu_p_closed(3.0).unwrap() - 1.0).abs() < 1e-15);
        let full = DepolarizingChannel::new(d, 0.0).unwrap();
        assert!((full.s_min_closed() - (d as f64).ln()).abs() < 1e-14);
        assert!(full.chi_star_closed().abs() < 1e-14);
    }
}

#[test]
fn phase_damping_entrywise() {
    let ch = PhaseDampingChannel::computational(2, 0.5).unwrap();
    let rho = DensityMatrix::new(CMatrix::from_element(2, 2, cr(0.5))).unwrap();
    let out = ch.phase_damp(&rho).unwrap();
    let expected = CMatrix::from_row_slice(2, 2, &[cr(0.5), cr(0.25), cr(0.25), cr(0.5)]);
    assert!(max_abs_diff(out.matrix(), &expected) < 1e-15);
}

#[test]
fn classical_capacities() {
    let bsc = ClassicalChannelMatrix::from_rows(&[vec![0.75, 0.25], vec![0.25, 0.75]]).unwrap();
    assert!((mutual_information(&[0.5, 0.5], &bsc).unwrap() - 0.130812035941137).abs() < 1e-14);
    let cap = shannon_capacity_fixed(&bsc);
    assert!((cap.capacity - 0.130812035941137).abs() < 1e-9);

    let s: f64 = 0.3;
    let z = ClassicalChannelMatrix::from_rows(&[vec![1.0, 0.0], vec![s, 1.0 - s]]).unwrap();
    let cap = shannon_capacity_fixed(&z);
    assert!((cap.capacity - 0.3491326435657886).abs() < 1e-9);
    assert!(cap.monotone);

    let dep = DepolarizingChannel::new(2, 0.5).unwrap();
    let t = transition_matrix(&dep, &Ensemble::basis(2), &Povm::basis(2)).unwrap();
    assert!((t.get(0, 0) - 0.75).abs() < 1e-15 && (t.get(0, 1) - 0.25).abs() < 1e-15);
    let sh = shannon_capacity_depolarizing(&dep).unwrap();
    assert!((sh.capacity - (LN2 - 0.5623351446188083)).abs() < 1e-9);
}

#[test]
fn census_counts() {
    let expected = [6, 15, 28, 45, 66, 91, 120, 153, 190, 231, 276];
    for (d, n) in (2..=12).zip(expected) {
        let census = diophantine_solutions(d).unwrap();
        assert_eq!(census.count(), n, "d = {d}");
        assert!(census.matches_expected());
    }
}

#[test]
fn decomposition_term_counts() {
    for d in 2..=5 {
        let dec = full_decomposition(d, 0.5).unwrap();
        assert_eq!(dec.len(), 2 * d * d * (d + 1));
    }
    assert_eq!(full_decomposition(2, 0.3).unwrap().len(), 24);
}

#[test]
fn derivative_values() {
    // Central differences of ν_p at p = 1 from the reference script.
    let table = [
        (2, 0.25, 0.6615632382855896),
        (3, 0.5, 0.8675632286958556),
        (4, 0.75, 0.6885673695444793),
    ];
    for (d, l, fd) in table {
        let ch = DepolarizingChannel::new(d, l).unwrap();
        let h = 1e-5;
        let ours = -(ch.pure_output_p_norm(1.0 + h) - ch.pure_output_p_norm(1.0 - h)) / (2.0 * h);
        assert!((ours - fd).abs() < 1e-8, "d={d} λ={l}: {ours} vs {fd}");
        assert!((fd - ch.s_min_closed()).abs() < 1e-5);
    }
}
