//! The `d`-dimensional depolarizing channel `Δ_λ(ρ) = λρ + (1−λ) Tr(ρ) I/d`.
//!
//! Complete positivity holds exactly for `−1/(d²−1) ≤ λ ≤ 1`. The checked
//! constructor enforces that range; [`DepolarizingChannel::new_unchecked`]
//! exists so the boundary itself can be probed through the Choi matrix.

use std::f64::consts::PI;

use crate::channel::QuantumChannel;
use crate::error::{ensure_dim, Error, Result};
use crate::linalg::{c, cr, identity, CMatrix};
use crate::measures::{check_p, spectral_entropy, spectral_p_norm};
use crate::state::DensityMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepolarizingChannel {
    dim: usize,
    lambda: f64,
}

/// Closed interval of `λ` for which `Δ_λ` is completely positive.
pub fn lambda_range(dim: usize) -> (f64, f64) {
    let d2 = (dim * dim) as f64;
    (-1.0 / (d2 - 1.0), 1.0)
}

impl DepolarizingChannel {
    pub fn new(dim: usize, lambda: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Domain(format!("depolarizing channel needs d >= 2, got {dim}")));
        }
        let (lo, hi) = lambda_range(dim);
        if !(lambda >= lo && lambda <= hi) {
            return Err(Error::Domain(format!(
                "lambda {lambda} outside [{lo}, {hi}] for d = {dim}"
            )));
        }
        Ok(Self { dim, lambda })
    }

    /// No range check; the map need not be completely positive.
    pub fn new_unchecked(dim: usize, lambda: f64) -> Self {
        Self { dim, lambda }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `λρ + ((1−λ)/d) I`.
    pub fn depolarize(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        ensure_dim(self.dim, rho.dim())?;
        DensityMatrix::new(self.apply_matrix(rho.matrix()))
    }

    fn top(&self) -> f64 {
        self.lambda + (1.0 - self.lambda) / self.dim as f64
    }

    fn rest(&self) -> f64 {
        (1.0 - self.lambda) / self.dim as f64
    }

    /// Output spectrum of any pure input, as `(eigenvalue, multiplicity)`.
    pub fn pure_output_spectrum(&self) -> Vec<(f64, usize)> {
        vec![(self.top(), 1), (self.rest(), self.dim - 1)]
    }

    fn pure_output_eigenvalues(&self) -> Vec<f64> {
        let mut v = vec![self.rest(); self.dim - 1];
        v.push(self.top());
        v
    }

    /// Minimal output entropy in nats.
    pub fn s_min_closed(&self) -> f64 {
        spectral_entropy(&self.pure_output_eigenvalues())
    }

    /// Maximal output `p`-norm.
    pub fn nu_p_closed(&self, p: f64) -> Result<f64> {
        check_p(p)?;
        Ok(self.pure_output_p_norm(p))
    }

    /// `p`-norm of the pure-input output spectrum without the `p ≥ 1` check,
    /// for finite differences around `p = 1`.
    pub fn pure_output_p_norm(&self, p: f64) -> f64 {
        spectral_p_norm(&self.pure_output_eigenvalues(), p)
    }

    /// Holevo quantity `ln d − S_min`, in nats.
    pub fn chi_star_closed(&self) -> f64 {
        (self.dim as f64).ln() - self.s_min_closed()
    }

    /// The `d²` Weyl operators `X^a Z^b`, `a, b ∈ 0..d`.
    pub fn weyl_operators(dim: usize) -> Vec<CMatrix> {
        let omega = 2.0 * PI / dim as f64;
        let shift = CMatrix::from_fn(dim, dim, |r, col| {
            if r == (col + 1) % dim {
                cr(1.0)
            } else {
                cr(0.0)
            }
        });
        let clock = CMatrix::from_fn(dim, dim, |r, col| {
            if r == col {
                let t = omega * r as f64;
                c(t.cos(), t.sin())
            } else {
                cr(0.0)
            }
        });
        let mut ops = Vec::with_capacity(dim * dim);
        let mut xa = identity(dim);
        for _ in 0..dim {
            let mut zb = identity(dim);
            for _ in 0..dim {
                ops.push(&xa * &zb);
                zb = &zb * &clock;
            }
            xa = &xa * &shift;
        }
        ops
    }
}

impl QuantumChannel for DepolarizingChannel {
    fn dim_in(&self) -> usize {
        self.dim
    }

    fn dim_out(&self) -> usize {
        self.dim
    }

    fn apply_matrix(&self, m: &CMatrix) -> CMatrix {
        m * cr(self.lambda) + identity(self.dim) * (m.trace() * cr(self.rest()))
    }

    fn adjoint_apply_matrix(&self, x: &CMatrix) -> CMatrix {
        self.apply_matrix(x)
    }

    /// Weyl Kraus set: `√(λ + (1−λ)/d²) I` and `√((1−λ)/d²) W_ab` otherwise.
    fn kraus_operators(&self) -> Vec<CMatrix> {
        let d2 = (self.dim * self.dim) as f64;
        let w0 = (self.lambda + (1.0 - self.lambda) / d2).max(0.0).sqrt();
        let w = ((1.0 - self.lambda) / d2).max(0.0).sqrt();
        Self::weyl_operators(self.dim)
            .into_iter()
            .enumerate()
            .map(|(i, op)| op * cr(if i == 0 { w0 } else { w }))
            .collect()
    }
}
