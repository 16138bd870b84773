//! Spectral measures: von Neumann entropy, Schatten norms, relative entropy.
//!
//! All logarithms are natural (nats). [`nats_to_bits`] is the only unit
//! conversion and is meant for display.

use crate::error::{Error, Result};
use crate::linalg::{clip_psd, eigh, eigvalsh, hermitian_defect, CMatrix, TAU_PSD};
use crate::state::DensityMatrix;

/// Tolerance used to decide that a PSD-looking input really is one.
pub const PSD_INPUT_TOL: f64 = 1e-10;

/// `−Σ x ln x` with `0 ln 0 = 0`.
pub fn spectral_entropy(spectrum: &[f64]) -> f64 {
    -spectrum
        .iter()
        .map(|&x| clip_psd(x))
        .filter(|&x| x > 0.0)
        .map(|x| x * x.ln())
        .sum::<f64>()
}

/// `S(ρ) = −Tr ρ ln ρ` in nats.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    spectral_entropy(&rho.eigenvalues()).max(0.0)
}

/// `(Σ x^p)^{1/p}` over a spectrum, without a domain check on `p`.
///
/// Used directly only for finite differences straddling `p = 1`.
pub fn spectral_p_norm(spectrum: &[f64], p: f64) -> f64 {
    spectrum
        .iter()
        .map(|&x| clip_psd(x))
        .filter(|&x| x > 0.0)
        .map(|x| x.powf(p))
        .sum::<f64>()
        .powf(1.0 / p)
}

pub(crate) fn check_p(p: f64) -> Result<()> {
    if p.is_finite() && p >= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("p-norm requires p >= 1, got {p}")))
    }
}

/// Schatten `p`-norm `(Tr A^p)^{1/p}` of a PSD matrix.
pub fn schatten_p_norm(a: &CMatrix, p: f64) -> Result<f64> {
    check_p(p)?;
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: a.ncols(),
        });
    }
    let scale = a.iter().map(|z| z.norm()).fold(1.0, f64::max);
    if hermitian_defect(a) > PSD_INPUT_TOL * scale {
        return Err(Error::InvalidState("schatten_p_norm needs a Hermitian matrix".into()));
    }
    let spectrum = eigvalsh(a);
    if spectrum[0] < -PSD_INPUT_TOL * scale {
        return Err(Error::NotPsd(spectrum[0]));
    }
    Ok(spectral_p_norm(&spectrum, p))
}

/// `Tr ρ(ln ρ − ln ω)`.
///
/// Returns `f64::INFINITY` when `ρ` has weight outside the support of `ω`.
pub fn relative_entropy(rho: &DensityMatrix, omega: &DensityMatrix) -> f64 {
    assert_eq!(rho.dim(), omega.dim(), "relative_entropy: dimension mismatch");
    let neg_entropy = -spectral_entropy(&rho.eigenvalues());
    match cross_log_term(rho.matrix(), omega.matrix()) {
        Some(cross) => (neg_entropy - cross).max(0.0),
        None => f64::INFINITY,
    }
}

/// `Tr ρ ln ω`, or `None` if `ρ` has weight on the kernel of `ω`.
pub(crate) fn cross_log_term(rho: &CMatrix, omega: &CMatrix) -> Option<f64> {
    let (w, vecs) = eigh(omega);
    let mut acc = 0.0;
    for (k, &wk) in w.iter().enumerate() {
        let v = vecs.column(k);
        let weight = (v.adjoint() * rho * v)[(0, 0)].re;
        if wk <= TAU_PSD {
            if weight > TAU_PSD {
                return None;
            }
        } else {
            acc += weight * wk.ln();
        }
    }
    Some(acc)
}

pub fn nats_to_bits(nats: f64) -> f64 {
    nats / std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::real_diagonal;

    #[test]
    fn entropy_examples() {
        assert_eq!(von_neumann_entropy(&DensityMatrix::basis_projector(3, 0)), 0.0);
        let mixed = DensityMatrix::maximally_mixed(3);
        assert!((von_neumann_entropy(&mixed) - 3f64.ln()).abs() < 1e-14);
        let rho = DensityMatrix::diagonal(&[0.75, 0.25]).unwrap();
        // −0.75 ln 0.75 − 0.25 ln 0.25, computed independently
        assert!((von_neumann_entropy(&rho) - 0.562_335_144_618_808_3).abs() < 1e-14);
    }

    #[test]
    fn schatten_examples() {
        let id = CMatrix::identity(2, 2);
        assert!((schatten_p_norm(&id, 2.0).unwrap() - 2f64.sqrt()).abs() < 1e-14);
        let rho = real_diagonal(&[0.75, 0.25]);
        assert!((schatten_p_norm(&rho, 1.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((schatten_p_norm(&rho, 2.0).unwrap() - 0.790_569_415_042_094_9).abs() < 1e-14);
    }

    #[test]
    fn schatten_rejects_small_p_and_indefinite() {
        let rho = real_diagonal(&[0.75, 0.25]);
        assert!(matches!(schatten_p_norm(&rho, 0.5), Err(Error::Domain(_))));
        let bad = real_diagonal(&[1.0, -0.5]);
        assert!(matches!(schatten_p_norm(&bad, 2.0), Err(Error::NotPsd(_))));
    }

    #[test]
    fn relative_entropy_examples() {
        let rho = DensityMatrix::diagonal(&[0.75, 0.25]).unwrap();
        assert!(relative_entropy(&rho, &rho).abs() < 1e-14);
        let pure = DensityMatrix::basis_projector(2, 0);
        let mixed = DensityMatrix::maximally_mixed(2);
        assert!((relative_entropy(&pure, &mixed) - 2f64.ln()).abs() < 1e-14);
        assert!((relative_entropy(&rho, &mixed) - 0.130_812_035_941_137).abs() < 1e-14);
    }

    #[test]
    fn relative_entropy_support_violation_is_infinite() {
        let mixed = DensityMatrix::maximally_mixed(2);
        let pure = DensityMatrix::basis_projector(2, 0);
        assert_eq!(relative_entropy(&mixed, &pure), f64::INFINITY);
    }

    #[test]
    fn bits_conversion() {
        assert!((nats_to_bits(2f64.ln()) - 1.0).abs() < 1e-15);
    }
}
