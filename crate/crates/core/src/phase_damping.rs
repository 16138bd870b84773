//! Phase-damping channels `Φ_λ(ρ) = λρ + (1−λ) Σ E_i ρ E_i` attached to an
//! orthonormal basis, and the uniformity predicates on vectors and channels.

use crate::channel::QuantumChannel;
use crate::error::{ensure_dim, Error, Result};
use crate::linalg::{c, cr, identity, max_abs_diff, off_diagonal_max, CMatrix, C64};
use crate::state::{DensityMatrix, PureState};

/// Tolerance for orthonormality of the stored basis.
pub const BASIS_TOL: f64 = 1e-10;
/// Tolerance on `max |v_i| − min |v_i|` for a uniform vector.
pub const UNIFORM_TOL: f64 = 1e-10;

/// Closed interval of `λ` for which `Φ_λ` is completely positive.
pub fn lambda_range(dim: usize) -> (f64, f64) {
    (-1.0 / (dim as f64 - 1.0), 1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDampingChannel {
    lambda: f64,
    basis: Vec<PureState>,
    /// Basis vectors as columns.
    basis_matrix: CMatrix,
}

impl PhaseDampingChannel {
    pub fn new(basis: Vec<PureState>, lambda: f64) -> Result<Self> {
        let ch = Self::new_unchecked(basis, lambda)?;
        let (lo, hi) = lambda_range(ch.dim());
        if !(lambda >= lo && lambda <= hi) {
            return Err(Error::Domain(format!(
                "lambda {lambda} outside [{lo}, {hi}] for d = {}",
                ch.dim()
            )));
        }
        Ok(ch)
    }

    /// Validates the basis but not the `λ` range.
    pub fn new_unchecked(basis: Vec<PureState>, lambda: f64) -> Result<Self> {
        let dim = basis.len();
        if dim < 2 {
            return Err(Error::Domain(format!("phase damping needs d >= 2, got {dim}")));
        }
        for v in &basis {
            ensure_dim(dim, v.dim())?;
        }
        let basis_matrix = CMatrix::from_fn(dim, dim, |r, col| basis[col].amplitudes()[r]);
        let gram = basis_matrix.adjoint() * &basis_matrix;
        let defect = max_abs_diff(&gram, &identity(dim));
        if defect > BASIS_TOL {
            return Err(Error::Precondition(format!(
                "basis is not orthonormal (Gram defect {defect:e})"
            )));
        }
        Ok(Self {
            lambda,
            basis,
            basis_matrix,
        })
    }

    pub fn computational(dim: usize, lambda: f64) -> Result<Self> {
        Self::new((0..dim).map(|i| PureState::basis(dim, i)).collect(), lambda)
    }

    /// Dephaser in the discrete Fourier basis.
    pub fn fourier(dim: usize, lambda: f64) -> Result<Self> {
        let n = dim as f64;
        let basis = (0..dim)
            .map(|k| {
                let v = nalgebra::DVector::from_fn(dim, |j, _| {
                    let t = 2.0 * std::f64::consts::PI * (j * k) as f64 / n;
                    c(t.cos(), t.sin()) / cr(n.sqrt())
                });
                PureState::normalized(v)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(basis, lambda)
    }

    /// Same `λ`, basis rotated to `{U|ψ_i⟩}`.
    pub fn rotated(&self, u: &CMatrix) -> Result<Self> {
        let basis = self
            .basis
            .iter()
            .map(|v| PureState::normalized(u * v.amplitudes()))
            .collect::<Result<Vec<_>>>()?;
        Self::new_unchecked(basis, self.lambda)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn basis(&self) -> &[PureState] {
        &self.basis
    }

    pub fn basis_matrix(&self) -> &CMatrix {
        &self.basis_matrix
    }

    /// `E_i = |ψ_i⟩⟨ψ_i|`.
    pub fn projectors(&self) -> Vec<CMatrix> {
        self.basis.iter().map(PureState::projector).collect()
    }

    pub fn phase_damp(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        ensure_dim(self.dim(), rho.dim())?;
        DensityMatrix::new(crate::linalg::hermitize(&self.apply_matrix(rho.matrix())))
    }

    /// `Σ E_i m E_i`, computed as `B diag(B* m B) B*`.
    fn pinch(&self, m: &CMatrix) -> CMatrix {
        let b = &self.basis_matrix;
        let in_basis = b.adjoint() * m * b;
        b * crate::linalg::diag_part(&in_basis) * b.adjoint()
    }
}

impl QuantumChannel for PhaseDampingChannel {
    fn dim_in(&self) -> usize {
        self.dim()
    }

    fn dim_out(&self) -> usize {
        self.dim()
    }

    fn apply_matrix(&self, m: &CMatrix) -> CMatrix {
        m * cr(self.lambda) + self.pinch(m) * cr(1.0 - self.lambda)
    }

    fn adjoint_apply_matrix(&self, x: &CMatrix) -> CMatrix {
        self.apply_matrix(x)
    }

    fn kraus_operators(&self) -> Vec<CMatrix> {
        if self.lambda >= 0.0 {
            let mut ops = vec![identity(self.dim()) * cr(self.lambda.sqrt())];
            let w = cr((1.0 - self.lambda).sqrt());
            ops.extend(self.projectors().into_iter().map(|e| e * w));
            ops
        } else {
            crate::channel::kraus_from_choi(&self.choi_matrix(), self.dim(), self.dim())
        }
    }
}

/// All entries share one modulus, within [`UNIFORM_TOL`].
pub fn is_uniform_vector(v: &PureState) -> bool {
    let (lo, hi) = v
        .amplitudes()
        .iter()
        .map(|z| z.norm())
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), m| (lo.min(m), hi.max(m)));
    hi - lo < UNIFORM_TOL
}

/// Every basis vector of the channel is uniform.
pub fn is_uniform_channel(ch: &PhaseDampingChannel) -> bool {
    ch.basis().iter().all(is_uniform_vector)
}

/// `⟨ψ|D|ψ⟩` for uniform `ψ` and diagonal `D`; equals `Tr D / d`.
pub fn uniform_diag_expectation(psi: &PureState, d_mat: &CMatrix) -> Result<C64> {
    ensure_dim(psi.dim(), d_mat.nrows())?;
    if !is_uniform_vector(psi) {
        return Err(Error::Precondition("vector is not uniform".into()));
    }
    if off_diagonal_max(d_mat) > 0.0 {
        return Err(Error::Precondition("matrix is not diagonal".into()));
    }
    let v = psi.amplitudes();
    let value = (v.adjoint() * d_mat * v)[(0, 0)];
    let expected = d_mat.trace() / cr(psi.dim() as f64);
    let scale = d_mat.iter().map(|z| z.norm()).fold(1.0, f64::max);
    if (value - expected).norm() > 1e-10 * scale {
        return Err(Error::Precondition(format!(
            "⟨ψ|D|ψ⟩ = {value} differs from Tr D/d = {expected}"
        )));
    }
    Ok(value)
}
