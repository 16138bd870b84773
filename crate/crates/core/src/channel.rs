//! Completely positive trace-preserving maps.
//!
//! Every concrete channel implements [`QuantumChannel`]. The trait carries the
//! linear action on arbitrary matrices (not only states), its Heisenberg-picture
//! adjoint, and defaults for the superoperator, Choi matrix and a Kraus set.
//!
//! Superoperator convention: column `i·d_in + j` holds the row-major
//! flattening of `Φ(|i⟩⟨j|)`. Choi convention: `J = Σ_ij |i⟩⟨j| ⊗ Φ(|i⟩⟨j|)`.

use crate::error::{ensure_dim, Error, Result};
use crate::linalg::{cr, eigh, frobenius_distance, identity, kron, matrix_unit, CMatrix, TAU_PSD};
use crate::state::{BipartiteState, DensityMatrix};

/// Trace-preservation tolerance for Kraus sets.
pub const TAU_TP: f64 = 1e-10;

pub trait QuantumChannel: Send + Sync {
    fn dim_in(&self) -> usize;

    fn dim_out(&self) -> usize;

    /// Linear action on any `d_in × d_in` matrix.
    fn apply_matrix(&self, m: &CMatrix) -> CMatrix;

    /// Heisenberg-picture action `Φ*(X)` on a `d_out × d_out` matrix.
    fn adjoint_apply_matrix(&self, x: &CMatrix) -> CMatrix {
        let mut acc = CMatrix::zeros(self.dim_in(), self.dim_in());
        for k in self.kraus_operators() {
            acc += k.adjoint() * x * &k;
        }
        acc
    }

    /// A Kraus set for the map. The default diagonalizes the Choi matrix.
    fn kraus_operators(&self) -> Vec<CMatrix> {
        kraus_from_choi(&self.choi_matrix(), self.dim_in(), self.dim_out())
    }

    fn superoperator(&self) -> CMatrix {
        let (din, dout) = (self.dim_in(), self.dim_out());
        let mut s = CMatrix::zeros(dout * dout, din * din);
        for i in 0..din {
            for j in 0..din {
                let out = self.apply_matrix(&matrix_unit(din, i, j));
                for r in 0..dout {
                    for c in 0..dout {
                        s[(r * dout + c, i * din + j)] = out[(r, c)];
                    }
                }
            }
        }
        s
    }

    fn choi_matrix(&self) -> CMatrix {
        let (din, dout) = (self.dim_in(), self.dim_out());
        let mut choi = CMatrix::zeros(din * dout, din * dout);
        for i in 0..din {
            for j in 0..din {
                let out = self.apply_matrix(&matrix_unit(din, i, j));
                for r in 0..dout {
                    for c in 0..dout {
                        choi[(i * dout + r, j * dout + c)] = out[(r, c)];
                    }
                }
            }
        }
        choi
    }

    /// Applies the map to a state and validates the output.
    fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        ensure_dim(self.dim_in(), rho.dim())?;
        DensityMatrix::new(crate::linalg::hermitize(&self.apply_matrix(rho.matrix())))
    }

    fn to_kraus_channel(&self) -> KrausChannel {
        KrausChannel {
            dim_in: self.dim_in(),
            dim_out: self.dim_out(),
            kraus: self.kraus_operators(),
        }
    }
}

/// Generic channel stored as a Kraus list `{K_i}` with `Σ K_i* K_i = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<CMatrix>,
}

impl KrausChannel {
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidState("empty Kraus list".into()))?;
        let (dim_out, dim_in) = first.shape();
        for k in &kraus {
            ensure_dim(dim_out, k.nrows())?;
            ensure_dim(dim_in, k.ncols())?;
        }
        let residual = tp_residual(&kraus, dim_in);
        if residual > TAU_TP {
            return Err(Error::NotTracePreserving(residual));
        }
        Ok(Self {
            dim_in,
            dim_out,
            kraus,
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim_in: dim,
            dim_out: dim,
            kraus: vec![identity(dim)],
        }
    }

    /// `ρ ↦ U ρ U*`.
    pub fn unitary(u: CMatrix) -> Result<Self> {
        Self::new(vec![u])
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    /// `‖Σ K* K − I‖_F`.
    pub fn tp_residual(&self) -> f64 {
        tp_residual(&self.kraus, self.dim_in)
    }

    /// `U* Φ(·) U` for a unitary on the output space.
    pub fn conjugated_by(&self, u: &CMatrix) -> Result<Self> {
        ensure_dim(self.dim_out, u.nrows())?;
        Self::new(self.kraus.iter().map(|k| u.adjoint() * k).collect())
    }
}

fn tp_residual(kraus: &[CMatrix], dim_in: usize) -> f64 {
    let mut acc = CMatrix::zeros(dim_in, dim_in);
    for k in kraus {
        acc += k.adjoint() * k;
    }
    frobenius_distance(&acc, &identity(dim_in))
}

impl QuantumChannel for KrausChannel {
    fn dim_in(&self) -> usize {
        self.dim_in
    }

    fn dim_out(&self) -> usize {
        self.dim_out
    }

    fn apply_matrix(&self, m: &CMatrix) -> CMatrix {
        let mut acc = CMatrix::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            acc += k * m * k.adjoint();
        }
        acc
    }

    fn adjoint_apply_matrix(&self, x: &CMatrix) -> CMatrix {
        let mut acc = CMatrix::zeros(self.dim_in, self.dim_in);
        for k in &self.kraus {
            acc += k.adjoint() * x * k;
        }
        acc
    }

    fn kraus_operators(&self) -> Vec<CMatrix> {
        self.kraus.clone()
    }
}

/// Kraus operators read off the eigendecomposition of a PSD Choi matrix.
pub fn kraus_from_choi(choi: &CMatrix, dim_in: usize, dim_out: usize) -> Vec<CMatrix> {
    let (vals, vecs) = eigh(choi);
    let scale = vals.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    vals.iter()
        .enumerate()
        .filter(|(_, &mu)| mu > TAU_PSD * scale * 1e-2)
        .map(|(idx, &mu)| {
            let s = mu.sqrt();
            CMatrix::from_fn(dim_out, dim_in, |r, i| vecs[(i * dim_out + r, idx)] * cr(s))
        })
        .collect()
}

/// `φ ⊗ ψ` as the Kraus set of all pairwise tensor products.
pub fn tensor_channel(phi: &dyn QuantumChannel, psi: &dyn QuantumChannel) -> KrausChannel {
    let a = phi.kraus_operators();
    let b = psi.kraus_operators();
    let mut kraus = Vec::with_capacity(a.len() * b.len());
    for ka in &a {
        for kb in &b {
            kraus.push(kron(ka, kb));
        }
    }
    KrausChannel {
        dim_in: phi.dim_in() * psi.dim_in(),
        dim_out: phi.dim_out() * psi.dim_out(),
        kraus,
    }
}

/// `Σ K_i ρ K_i*`, validated.
pub fn apply_channel(psi: &dyn QuantumChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    psi.apply(rho)
}

/// `(φ ⊗ ψ)(ρ12)` as a bipartite state.
pub fn apply_product(
    phi: &dyn QuantumChannel,
    psi: &dyn QuantumChannel,
    rho12: &BipartiteState,
) -> Result<BipartiteState> {
    ensure_dim(phi.dim_in(), rho12.dim1())?;
    ensure_dim(psi.dim_in(), rho12.dim2())?;
    let out = tensor_channel(phi, psi).apply(rho12.state())?;
    BipartiteState::new(phi.dim_out(), psi.dim_out(), out)
}

/// Frobenius distance between superoperators; the channel-equality metric.
pub fn channel_distance(a: &dyn QuantumChannel, b: &dyn QuantumChannel) -> f64 {
    if a.dim_in() != b.dim_in() || a.dim_out() != b.dim_out() {
        return f64::INFINITY;
    }
    frobenius_distance(&a.superoperator(), &b.superoperator())
}

/// Smallest eigenvalue of the Choi matrix; nonnegative iff the map is CP.
pub fn choi_min_eigenvalue(ch: &dyn QuantumChannel) -> f64 {
    crate::linalg::min_eigenvalue(&ch.choi_matrix())
}
