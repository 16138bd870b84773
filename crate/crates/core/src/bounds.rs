//! Trace inequalities behind the `p`-norm bound for `Φ_λ ⊗ I`.
//!
//! A bipartite state is split as `√ρ12 = (V_1 … V_d)` into column blocks of
//! width `d'`, so the `(i, j)` block of `ρ12` is `V_i* V_j`. With
//! `C = d Φ_λ(θθ*)` (the matrix with ones on the diagonal and `λ` elsewhere),
//! `(Φ_λ ⊗ I)(ρ12) = W* (C ⊗ I) W` for `W = blockdiag(V_i)`. Its nonzero
//! spectrum is that of `A^{1/2} B A^{1/2}` with `A = W W*` and `B = C ⊗ I`.

use crate::channel::{tensor_channel, KrausChannel, QuantumChannel};
use crate::decomposition::theta;
use crate::depolarizing::DepolarizingChannel;
use crate::error::{ensure_dim, Error, Result};
use crate::inequality::{EqualityCheck, InequalityCheck};
use crate::linalg::{
    cr, eigh, eigvalsh, hermitize, identity, kron, max_abs_diff, min_eigenvalue, psd_power,
    psd_sqrt, trace_power, CMatrix,
};
use crate::measures::{check_p, schatten_p_norm, PSD_INPUT_TOL};
use crate::phase_damping::PhaseDampingChannel;
use crate::state::{partial_trace_matrix, BipartiteState, Subsystem};

pub const LIEB_THIRRING_TOL: f64 = 1e-10;
pub const LEMMA3_TOL: f64 = 1e-9;
pub const INVARIANCE_TOL: f64 = 1e-10;
pub const PRODUCT_BOUND_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct BlockFactorization {
    pub d: usize,
    pub d_prime: usize,
    /// `V_1, …, V_d`, each `d·d' × d'`.
    pub blocks: Vec<CMatrix>,
}

/// Column-block split of `√ρ12` along the computational basis of factor 1.
pub fn block_factorize(rho12: &BipartiteState) -> BlockFactorization {
    let (d, dp) = (rho12.dim1(), rho12.dim2());
    let root = psd_sqrt(rho12.matrix());
    let blocks = (0..d)
        .map(|i| root.columns(i * dp, dp).into_owned())
        .collect();
    BlockFactorization {
        d,
        d_prime: dp,
        blocks,
    }
}

impl BlockFactorization {
    /// `ρ2^{(i)} = V_i* V_i`.
    pub fn conditional_blocks(&self) -> Vec<CMatrix> {
        self.blocks.iter().map(|v| v.adjoint() * v).collect()
    }

    /// `V_i V_i*`, the diagonal blocks of `A`.
    pub fn outer_blocks(&self) -> Vec<CMatrix> {
        self.blocks.iter().map(|v| v * v.adjoint()).collect()
    }

    /// Rebuilds `ρ12` from the Gram blocks `V_i* V_j`.
    pub fn reassemble(&self) -> CMatrix {
        let (d, dp) = (self.d, self.d_prime);
        let mut m = CMatrix::zeros(d * dp, d * dp);
        for i in 0..d {
            for j in 0..d {
                let block = self.blocks[i].adjoint() * &self.blocks[j];
                m.view_mut((i * dp, j * dp), (dp, dp)).copy_from(&block);
            }
        }
        m
    }

    /// `W = blockdiag(V_1, …, V_d)`.
    pub fn w_matrix(&self) -> CMatrix {
        let (d, dp) = (self.d, self.d_prime);
        let rows = d * dp;
        let mut w = CMatrix::zeros(d * rows, d * dp);
        for (i, v) in self.blocks.iter().enumerate() {
            w.view_mut((i * rows, i * dp), (rows, dp)).copy_from(v);
        }
        w
    }

    /// `A = W W* = blockdiag(V_i V_i*)`.
    pub fn a_matrix(&self) -> CMatrix {
        let w = self.w_matrix();
        &w * w.adjoint()
    }

    /// `max_i |Tr(V_i V_i*)^p − Tr(V_i* V_i)^p|`.
    pub fn power_trace_asymmetry(&self, p: f64) -> f64 {
        self.blocks
            .iter()
            .map(|v| (trace_power(&(v * v.adjoint()), p) - trace_power(&(v.adjoint() * v), p)).abs())
            .fold(0.0, f64::max)
    }
}

/// `B = d Φ_λ(θθ*) ⊗ I_{dd'}`.
pub fn b_matrix(d: usize, d_prime: usize, lambda: f64) -> CMatrix {
    kron(&scaled_theta_image(d, lambda), &identity(d * d_prime))
}

/// `d Φ_λ(θθ*)` for the computational-basis dephaser: ones on the diagonal,
/// `λ` off it.
fn scaled_theta_image(d: usize, lambda: f64) -> CMatrix {
    CMatrix::from_fn(d, d, |i, j| if i == j { cr(1.0) } else { cr(lambda) })
}

/// `Tr_1[(E_i ⊗ I) ρ12]` for each projector `E_i`.
pub fn conditional_states(rho12: &BipartiteState, projectors: &[CMatrix]) -> Result<Vec<CMatrix>> {
    let (d, dp) = (rho12.dim1(), rho12.dim2());
    let id2 = identity(dp);
    projectors
        .iter()
        .map(|e| {
            ensure_dim(d, e.nrows())?;
            let m = kron(e, &id2) * rho12.matrix();
            Ok(partial_trace_matrix(&m, d, dp, Subsystem::First))
        })
        .collect()
}

fn check_psd(m: &CMatrix, what: &str) -> Result<()> {
    let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let lo = min_eigenvalue(m);
    if lo < -PSD_INPUT_TOL * scale {
        return Err(Error::Precondition(format!("{what} is not PSD (min eigenvalue {lo:e})")));
    }
    Ok(())
}

/// `Tr(A^{1/2} B A^{1/2})^p ≤ Tr(A^p B^p)`.
pub fn lieb_thirring_check(a: &CMatrix, b: &CMatrix, p: f64) -> Result<InequalityCheck> {
    check_p(p)?;
    ensure_dim(a.nrows(), b.nrows())?;
    check_psd(a, "A")?;
    check_psd(b, "B")?;
    let ra = psd_sqrt(a);
    let inner = hermitize(&(&ra * b * &ra));
    let lhs = trace_power(&inner, p);
    let rhs = (psd_power(a, p) * psd_power(b, p)).trace().re;
    Ok(InequalityCheck::new(lhs, rhs, LIEB_THIRRING_TOL))
}

/// `‖(Φ_λ ⊗ I)(ρ12)‖_p ≤ d^{1−1/p} ν_p(Δ_λ) [Σ_i Tr(ρ2^{(i)})^p]^{1/p}`,
/// with `ρ2^{(i)}` taken along the channel's own basis.
pub fn lemma3_bound(ch: &PhaseDampingChannel, rho12: &BipartiteState, p: f64) -> Result<InequalityCheck> {
    check_p(p)?;
    let d = ch.dim();
    ensure_dim(d, rho12.dim1())?;
    let joint = tensor_channel(ch, &KrausChannel::identity(rho12.dim2()));
    let out = hermitize(&joint.apply_matrix(rho12.matrix()));
    let lhs = schatten_p_norm(&out, p)?;
    let sum: f64 = conditional_states(rho12, &ch.projectors())?
        .iter()
        .map(|r| trace_power(r, p))
        .sum();
    let nu = DepolarizingChannel::new_unchecked(d, ch.lambda()).pure_output_p_norm(p);
    let rhs = (d as f64).powf(1.0 - 1.0 / p) * nu * sum.powf(1.0 / p);
    Ok(InequalityCheck::new(lhs, rhs, LEMMA3_TOL))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalCheck {
    /// Diagonal of `d^p (Φ_λ(θθ*))^p`.
    pub entries: Vec<f64>,
    /// `(1−λ)^p + [(dλ+1−λ)^p − (1−λ)^p]/d`.
    pub closed_form: f64,
    /// `d^{p−1} ν_p(Δ_λ)^p`.
    pub nu_form: f64,
    pub max_deviation: f64,
}

impl DiagonalCheck {
    pub fn holds(&self) -> bool {
        self.max_deviation < 1e-10 * self.closed_form.abs().max(1.0)
    }
}

pub fn b_matrix_diagonal_check(d: usize, lambda: f64, p: f64) -> Result<DiagonalCheck> {
    check_p(p)?;
    let ch = PhaseDampingChannel::computational(d, lambda)?;
    let image = ch.apply_matrix(&theta(d).projector());
    let m = psd_power(&image, p) * cr((d as f64).powf(p));
    let entries: Vec<f64> = (0..d).map(|i| m[(i, i)].re).collect();
    let q = 1.0 - lambda;
    let closed_form = q.powf(p) + ((d as f64 * lambda + q).powf(p) - q.powf(p)) / d as f64;
    let nu = DepolarizingChannel::new_unchecked(d, lambda).pure_output_p_norm(p);
    let nu_form = (d as f64).powf(p - 1.0) * nu.powf(p);
    let max_deviation = entries
        .iter()
        .map(|e| (e - closed_form).abs())
        .chain(std::iter::once((nu_form - closed_form).abs()))
        .fold(0.0, f64::max);
    Ok(DiagonalCheck {
        entries,
        closed_form,
        nu_form,
        max_deviation,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumIdentity {
    /// Largest gap between sorted spectra of `(Φ⊗I)(ρ12)` and
    /// `A^{1/2} B A^{1/2}` (the latter trimmed to its top `dd'` eigenvalues).
    pub spectrum_deviation: f64,
    /// Entrywise gap between `W*(C⊗I)W` and `(Φ⊗I)(ρ12)`, both in the
    /// channel's basis.
    pub reconstruction_deviation: f64,
    /// Everything beyond the top `dd'` eigenvalues of `A^{1/2} B A^{1/2}`.
    pub padding_max: f64,
}

pub fn spectrum_identity_check(ch: &PhaseDampingChannel, rho12: &BipartiteState) -> Result<SpectrumIdentity> {
    let (d, dp) = (rho12.dim1(), rho12.dim2());
    ensure_dim(ch.dim(), d)?;
    // Work in the channel's basis, where it is the computational dephaser.
    let rotated = rho12.conjugate_first(&ch.basis_matrix().adjoint())?;
    let comp = PhaseDampingChannel::computational(d, ch.lambda())?;
    let direct = hermitize(
        &tensor_channel(&comp, &KrausChannel::identity(dp)).apply_matrix(rotated.matrix()),
    );
    let fact = block_factorize(&rotated);
    let w = fact.w_matrix();
    let b = b_matrix(d, dp, ch.lambda());
    let rebuilt = w.adjoint() * &b * &w;
    let reconstruction_deviation = max_abs_diff(&rebuilt, &direct);

    let a = &w * w.adjoint();
    let ra = psd_sqrt(&a);
    let big = eigvalsh(&hermitize(&(&ra * &b * &ra)));
    let small = eigvalsh(&direct);
    let n = small.len();
    let tail = &big[big.len() - n..];
    let spectrum_deviation = tail
        .iter()
        .zip(&small)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    let padding_max = big[..big.len() - n].iter().map(|x| x.abs()).fold(0.0, f64::max);
    Ok(SpectrumIdentity {
        spectrum_deviation,
        reconstruction_deviation,
        padding_max,
    })
}

/// `‖(φ ⊗ ψ)(τ12)‖_p`.
pub fn product_output_norm(
    phi: &dyn QuantumChannel,
    psi: &dyn QuantumChannel,
    tau12: &BipartiteState,
    p: f64,
) -> Result<f64> {
    ensure_dim(phi.dim_in(), tau12.dim1())?;
    ensure_dim(psi.dim_in(), tau12.dim2())?;
    let out = hermitize(&tensor_channel(phi, psi).apply_matrix(tau12.matrix()));
    schatten_p_norm(&out, p)
}

/// `U` with `U τ1 U*` diagonal, for `τ1` the first marginal.
pub fn diagonalizing_unitary(tau12: &BipartiteState) -> CMatrix {
    let (_, vecs) = eigh(tau12.reduced(Subsystem::Second).matrix());
    vecs.adjoint()
}

/// `‖(Δ⊗Ψ)(τ12)‖_p = ‖(Δ⊗Ψ)((U⊗I)τ12(U*⊗I))‖_p`.
pub fn lemma1_invariance_check(
    dep: &DepolarizingChannel,
    psi: &dyn QuantumChannel,
    tau12: &BipartiteState,
    u: &CMatrix,
    p: f64,
) -> Result<EqualityCheck> {
    check_p(p)?;
    let before = product_output_norm(dep, psi, tau12, p)?;
    let after = product_output_norm(dep, psi, &tau12.conjugate_first(u)?, p)?;
    Ok(EqualityCheck::new(before, after, INVARIANCE_TOL))
}

/// `‖(Δ_λ⊗Ψ)(τ12)‖_p ≤ ν_p(Δ_λ) ν_p(Ψ)`, with `ν_p(Ψ)` supplied.
pub fn product_norm_check(
    dep: &DepolarizingChannel,
    psi: &dyn QuantumChannel,
    tau12: &BipartiteState,
    p: f64,
    nu_psi: f64,
) -> Result<InequalityCheck> {
    let lhs = product_output_norm(dep, psi, tau12, p)?;
    Ok(InequalityCheck::new(lhs, dep.nu_p_closed(p)? * nu_psi, PRODUCT_BOUND_TOL))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::off_diagonal_max;
    use crate::random::{haar_unitary, random_bipartite_state, random_channel, random_density_matrix, random_psd, rng_from_seed};
    use crate::state::DensityMatrix;

    #[test]
    fn factorization_invariants() {
        let mut rng = rng_from_seed(1);
        for (d, dp) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
            let rho = random_bipartite_state(d, dp, &mut rng);
            let f = block_factorize(&rho);
            assert_eq!(f.blocks.len(), d);
            assert_eq!(f.blocks[0].shape(), (d * dp, dp));
            assert!(max_abs_diff(&f.reassemble(), rho.matrix()) < 1e-10);
            let projs: Vec<CMatrix> = (0..d).map(|i| DensityMatrix::basis_projector(d, i).into_matrix()).collect();
            let cond = conditional_states(&rho, &projs).unwrap();
            let mut total = 0.0;
            for (a, b) in f.conditional_blocks().iter().zip(&cond) {
                assert!(max_abs_diff(a, b) < 1e-10);
                total += a.trace().re;
            }
            assert!((total - 1.0).abs() < 1e-12);
            assert!(f.power_trace_asymmetry(2.5) < 1e-10);
        }
    }

    #[test]
    fn product_diagonal_blocks() {
        let rho = DensityMatrix::diagonal(&[0.6, 0.3, 0.1]).unwrap();
        let mut rng = rng_from_seed(2);
        let sigma = random_density_matrix(2, &mut rng);
        let f = block_factorize(&BipartiteState::product(&rho, &sigma));
        for (i, blk) in f.conditional_blocks().iter().enumerate() {
            let expected = sigma.matrix() * cr([0.6, 0.3, 0.1][i]);
            assert!(max_abs_diff(blk, &expected) < 1e-12);
        }
    }

    #[test]
    fn lieb_thirring_trivial_cases() {
        let id = identity(3);
        let c = lieb_thirring_check(&id, &id, 2.7).unwrap();
        assert!((c.lhs - 3.0).abs() < 1e-12 && (c.rhs - 3.0).abs() < 1e-12);
        let mut rng = rng_from_seed(3);
        let a = random_psd(4, &mut rng);
        let b = random_psd(4, &mut rng);
        let one = lieb_thirring_check(&a, &b, 1.0).unwrap();
        assert!((one.lhs - one.rhs).abs() < 1e-10 * one.rhs.abs().max(1.0));
        let mut neg = id.clone();
        neg[(0, 0)] = cr(-1.0);
        assert!(lieb_thirring_check(&neg, &id, 2.0).is_err());
    }

    #[test]
    fn lemma3_maximally_mixed_at_identity() {
        for (d, dp) in [(2, 2), (3, 2), (2, 3)] {
            let ch = PhaseDampingChannel::computational(d, 1.0).unwrap();
            let rho = BipartiteState::maximally_mixed(d, dp);
            for p in [1.5, 2.0, 3.0] {
                let c = lemma3_bound(&ch, &rho, p).unwrap();
                let expected = ((d * dp) as f64).powf(1.0 / p - 1.0);
                assert!((c.lhs - expected).abs() < 1e-12);
                assert!(c.holds());
            }
        }
    }

    #[test]
    fn lemma3_random_rotated_basis() {
        let mut rng = rng_from_seed(4);
        let u = haar_unitary(3, &mut rng);
        let ch = PhaseDampingChannel::computational(3, 0.4).unwrap().rotated(&u).unwrap();
        for _ in 0..10 {
            let rho = random_bipartite_state(3, 2, &mut rng);
            assert!(lemma3_bound(&ch, &rho, 2.0).unwrap().holds());
        }
    }

    #[test]
    fn diagonal_closed_form() {
        let c = b_matrix_diagonal_check(3, 0.5, 2.0).unwrap();
        assert!((c.closed_form - 1.5).abs() < 1e-15);
        assert!(c.holds());
        for d in 2..=5 {
            let one = b_matrix_diagonal_check(d, 1.0, 2.5).unwrap();
            assert!((one.closed_form - (d as f64).powf(1.5)).abs() < 1e-10);
            assert!(one.holds());
            let zero = b_matrix_diagonal_check(d, 0.0, 3.0).unwrap();
            assert!((zero.closed_form - 1.0).abs() < 1e-12);
            assert!(zero.holds());
        }
    }

    #[test]
    fn spectrum_identity_random() {
        let mut rng = rng_from_seed(5);
        let u = haar_unitary(2, &mut rng);
        let ch = PhaseDampingChannel::computational(2, 0.3).unwrap().rotated(&u).unwrap();
        let rho = random_bipartite_state(2, 3, &mut rng);
        let s = spectrum_identity_check(&ch, &rho).unwrap();
        assert!(s.spectrum_deviation < 1e-9);
        assert!(s.reconstruction_deviation < 1e-10);
        assert!(s.padding_max < 1e-9);
    }

    #[test]
    fn invariance_and_diagonalization() {
        let mut rng = rng_from_seed(6);
        let dep = DepolarizingChannel::new(3, 0.6).unwrap();
        let psi = random_channel(2, 2, 2, &mut rng).unwrap();
        let tau = random_bipartite_state(3, 2, &mut rng);
        assert!(lemma1_invariance_check(&dep, &psi, &tau, &identity(3), 2.0).unwrap().holds());
        let u = diagonalizing_unitary(&tau);
        let rotated = tau.conjugate_first(&u).unwrap();
        assert!(off_diagonal_max(rotated.reduced(Subsystem::Second).matrix()) < 1e-12);
        assert!(lemma1_invariance_check(&dep, &psi, &tau, &u, 3.0).unwrap().holds());
    }
}
