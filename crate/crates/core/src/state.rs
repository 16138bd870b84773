//! Density matrices, pure states and bipartite states.

use crate::error::{ensure_dim, Error, Result};
use crate::linalg::{
    clip_psd, cr, eigvalsh, hermitian_defect, hermitize, kron, outer, CMatrix, CVector, TAU_PSD,
};

pub const TAU_HERM: f64 = 1e-12;
pub const TAU_TRACE: f64 = 1e-10;
pub const TAU_NORM: f64 = 1e-12;

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates the state invariants and stores the Hermitian part.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::InvalidState(format!(
                "expected a non-empty square matrix, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let defect = hermitian_defect(&matrix);
        if defect > TAU_HERM {
            return Err(Error::InvalidState(format!("not Hermitian (defect {defect:e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TAU_TRACE || tr.im.abs() > TAU_TRACE {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let matrix = hermitize(&matrix);
        let min = eigvalsh(&matrix)[0];
        if min < -TAU_PSD {
            return Err(Error::NotPsd(min));
        }
        Ok(Self { matrix })
    }

    /// Normalizes a PSD matrix by its trace before validating.
    pub fn from_psd(matrix: CMatrix) -> Result<Self> {
        let tr = matrix.trace().re;
        if tr.is_nan() || tr <= 0.0 {
            return Err(Error::InvalidState(format!("trace {tr} is not positive")));
        }
        Self::new(hermitize(&(matrix / cr(tr))))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim, dim) / cr(dim as f64),
        }
    }

    /// `|i⟩⟨i|` in the computational basis.
    pub fn basis_projector(dim: usize, i: usize) -> Self {
        Self::from(&PureState::basis(dim, i))
    }

    /// Real diagonal state; entries must be a probability vector.
    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        Self::new(crate::linalg::real_diagonal(probs))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Eigenvalues in ascending order, roundoff negatives clipped to zero.
    pub fn eigenvalues(&self) -> Vec<f64> {
        eigvalsh(&self.matrix).into_iter().map(clip_psd).collect()
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            matrix: kron(&self.matrix, &other.matrix),
        }
    }

    /// `U ρ U*`.
    pub fn conjugate(&self, u: &CMatrix) -> Result<DensityMatrix> {
        ensure_dim(self.dim(), u.ncols())?;
        DensityMatrix::new(hermitize(&(u * &self.matrix * u.adjoint())))
    }
}

impl From<&PureState> for DensityMatrix {
    fn from(psi: &PureState) -> Self {
        DensityMatrix {
            matrix: outer(psi.amplitudes()),
        }
    }
}

/// Unit vector in `C^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: CVector,
}

impl PureState {
    pub fn new(amplitudes: CVector) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidState("empty amplitude vector".into()));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > TAU_NORM {
            return Err(Error::InvalidState(format!("norm is {norm}, expected 1")));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if !norm.is_finite() || norm <= 0.0 {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        Ok(Self {
            amplitudes: amplitudes / cr(norm),
        })
    }

    pub fn basis(dim: usize, i: usize) -> Self {
        Self {
            amplitudes: crate::linalg::basis_vector(dim, i),
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn projector(&self) -> CMatrix {
        outer(&self.amplitudes)
    }
}

/// Which tensor factor of a bipartite system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

/// State on `C^d ⊗ C^d'`.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    dim1: usize,
    dim2: usize,
    state: DensityMatrix,
}

impl BipartiteState {
    pub fn new(dim1: usize, dim2: usize, state: DensityMatrix) -> Result<Self> {
        ensure_dim(dim1 * dim2, state.dim())?;
        Ok(Self { dim1, dim2, state })
    }

    pub fn from_matrix(dim1: usize, dim2: usize, matrix: CMatrix) -> Result<Self> {
        Self::new(dim1, dim2, DensityMatrix::new(matrix)?)
    }

    pub fn product(first: &DensityMatrix, second: &DensityMatrix) -> Self {
        Self {
            dim1: first.dim(),
            dim2: second.dim(),
            state: first.tensor(second),
        }
    }

    pub fn maximally_mixed(dim1: usize, dim2: usize) -> Self {
        Self {
            dim1,
            dim2,
            state: DensityMatrix::maximally_mixed(dim1 * dim2),
        }
    }

    pub fn dim1(&self) -> usize {
        self.dim1
    }

    pub fn dim2(&self) -> usize {
        self.dim2
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn matrix(&self) -> &CMatrix {
        self.state.matrix()
    }

    /// Reduced state after tracing out `traced`.
    pub fn reduced(&self, traced: Subsystem) -> DensityMatrix {
        partial_trace(self, traced)
    }

    /// `(U ⊗ I) τ (U* ⊗ I)`.
    pub fn conjugate_first(&self, u: &CMatrix) -> Result<BipartiteState> {
        ensure_dim(self.dim1, u.nrows())?;
        let full = kron(u, &CMatrix::identity(self.dim2, self.dim2));
        Ok(Self {
            dim1: self.dim1,
            dim2: self.dim2,
            state: self.state.conjugate(&full)?,
        })
    }
}

/// Partial trace of a bipartite state over the `traced` factor.
pub fn partial_trace(rho12: &BipartiteState, traced: Subsystem) -> DensityMatrix {
    let m = partial_trace_matrix(rho12.matrix(), rho12.dim1, rho12.dim2, traced);
    DensityMatrix {
        matrix: hermitize(&m),
    }
}

/// Partial trace of an arbitrary `d1·d2`-square matrix.
pub fn partial_trace_matrix(m: &CMatrix, d1: usize, d2: usize, traced: Subsystem) -> CMatrix {
    assert_eq!(m.nrows(), d1 * d2, "partial_trace_matrix: dimension mismatch");
    match traced {
        Subsystem::Second => CMatrix::from_fn(d1, d1, |i, j| {
            (0..d2).map(|k| m[(i * d2 + k, j * d2 + k)]).sum()
        }),
        Subsystem::First => CMatrix::from_fn(d2, d2, |a, b| {
            (0..d1).map(|k| m[(k * d2 + a, k * d2 + b)]).sum()
        }),
    }
}
