//! Classical information carried by a channel: ensembles, measurements, the
//! induced classical channel and its Shannon capacity, and the Holevo
//! quantity with its relative-entropy certificate.
//!
//! Everything is in nats.

mod additivity;
mod holevo;

pub use additivity::{
    chi_additivity_check, entropy_lower_bound_check, lemma7_check, AdditivityReport,
    EntropyLowerBound, ADDITIVITY_TOL, ENTROPY_BOUND_TOL, LEMMA7_TOL, MAX_PRODUCT_DIM,
};
pub use holevo::{
    holevo_of_ensemble, holevo_quantity, opwsw_certificate, Certificate, HolevoOptions,
    HolevoResult,
};

use nalgebra::DMatrix;

use crate::channel::QuantumChannel;
use crate::depolarizing::DepolarizingChannel;
use crate::error::{ensure_dim, Error, Result};
use crate::linalg::{frobenius_distance, identity, min_eigenvalue, CMatrix};
use crate::state::DensityMatrix;

pub const PROB_TOL: f64 = 1e-12;
pub const POVM_TOL: f64 = 1e-10;
pub const STOCHASTIC_TOL: f64 = 1e-10;
/// Blahut-Arimoto stopping rule on the capacity bracket.
pub const BA_GAP: f64 = 1e-9;
/// Agreement required between the Blahut-Arimoto value and `ln d − S_min`.
pub const SHANNON_AGREEMENT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    items: Vec<(f64, DensityMatrix)>,
}

impl Ensemble {
    pub fn new(items: Vec<(f64, DensityMatrix)>) -> Result<Self> {
        let first = items
            .first()
            .ok_or_else(|| Error::InvalidState("empty ensemble".into()))?;
        let dim = first.1.dim();
        let mut total = 0.0;
        for (p, rho) in &items {
            ensure_dim(dim, rho.dim())?;
            if p.is_nan() || *p < 0.0 {
                return Err(Error::InvalidState(format!("negative probability {p}")));
            }
            total += p;
        }
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidState(format!("probabilities sum to {total}")));
        }
        Ok(Self { items })
    }

    /// Uniform weights on the computational basis projectors.
    pub fn basis(dim: usize) -> Self {
        let w = 1.0 / dim as f64;
        Self {
            items: (0..dim).map(|i| (w, DensityMatrix::basis_projector(dim, i))).collect(),
        }
    }

    pub fn items(&self) -> &[(f64, DensityMatrix)] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.items[0].1.dim()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.items.iter().map(|(p, _)| *p).collect()
    }

    /// `ρ̄ = Σ π_i ρ_i`.
    pub fn average(&self) -> DensityMatrix {
        let mut acc = CMatrix::zeros(self.dim(), self.dim());
        for (p, rho) in &self.items {
            acc += rho.matrix() * crate::linalg::cr(*p);
        }
        DensityMatrix::from_psd(acc).expect("convex combination of states")
    }

    /// Same states, new weights.
    pub fn reweighted(&self, probs: &[f64]) -> Result<Self> {
        ensure_dim(self.len(), probs.len())?;
        Self::new(probs.iter().copied().zip(self.items.iter().map(|(_, r)| r.clone())).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    elements: Vec<CMatrix>,
}

impl Povm {
    pub fn new(elements: Vec<CMatrix>) -> Result<Self> {
        let first = elements
            .first()
            .ok_or_else(|| Error::InvalidState("empty POVM".into()))?;
        let dim = first.nrows();
        let mut total = CMatrix::zeros(dim, dim);
        for e in &elements {
            ensure_dim(dim, e.nrows())?;
            ensure_dim(dim, e.ncols())?;
            let lo = min_eigenvalue(e);
            if lo < -POVM_TOL {
                return Err(Error::NotPsd(lo));
            }
            total += e;
        }
        let defect = frobenius_distance(&total, &identity(dim));
        if defect > POVM_TOL {
            return Err(Error::InvalidState(format!(
                "POVM elements sum to identity only up to {defect:e}"
            )));
        }
        Ok(Self { elements })
    }

    /// Projective measurement in the computational basis.
    pub fn basis(dim: usize) -> Self {
        Self {
            elements: (0..dim)
                .map(|i| DensityMatrix::basis_projector(dim, i).into_matrix())
                .collect(),
        }
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    pub fn dim(&self) -> usize {
        self.elements[0].nrows()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Row-stochastic transition matrix `p_ij = P(Y = j | X = i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalChannelMatrix {
    probs: DMatrix<f64>,
}

impl ClassicalChannelMatrix {
    pub fn new(probs: DMatrix<f64>) -> Result<Self> {
        if probs.nrows() == 0 || probs.ncols() == 0 {
            return Err(Error::NotStochastic("empty matrix".into()));
        }
        for (i, row) in probs.row_iter().enumerate() {
            if let Some(v) = row.iter().find(|v| v.is_nan() || **v < -PROB_TOL) {
                return Err(Error::NotStochastic(format!("row {i} has entry {v}")));
            }
            let s: f64 = row.sum();
            if (s - 1.0).abs() > STOCHASTIC_TOL {
                return Err(Error::NotStochastic(format!("row {i} sums to {s}")));
            }
        }
        Ok(Self {
            probs: probs.map(|v| v.max(0.0)),
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::NotStochastic("ragged rows".into()));
        }
        Self::new(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
    }

    pub fn rows(&self) -> usize {
        self.probs.nrows()
    }

    pub fn cols(&self) -> usize {
        self.probs.ncols()
    }

    pub fn probs(&self) -> &DMatrix<f64> {
        &self.probs
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.probs[(i, j)]
    }
}

/// `p_ij = Tr[Ψ(ρ_i) E_j]`.
pub fn transition_matrix(
    psi: &dyn QuantumChannel,
    e: &Ensemble,
    m: &Povm,
) -> Result<ClassicalChannelMatrix> {
    ensure_dim(psi.dim_in(), e.dim())?;
    ensure_dim(psi.dim_out(), m.dim())?;
    let outputs: Vec<CMatrix> = e.items().iter().map(|(_, r)| psi.apply_matrix(r.matrix())).collect();
    let probs = DMatrix::from_fn(outputs.len(), m.len(), |i, j| {
        (&outputs[i] * &m.elements()[j]).trace().re
    });
    ClassicalChannelMatrix::new(probs)
}

fn xlogx_ratio(p: f64, q: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        p * (p / q).ln()
    }
}

fn output_distribution(prior: &[f64], t: &ClassicalChannelMatrix) -> Vec<f64> {
    (0..t.cols())
        .map(|j| prior.iter().enumerate().map(|(i, p)| p * t.get(i, j)).sum())
        .collect()
}

/// `I(X;Y)` for the joint law `π_i p_ij`, with `0 ln 0 = 0`.
pub fn mutual_information(prior: &[f64], t: &ClassicalChannelMatrix) -> Result<f64> {
    ensure_dim(t.rows(), prior.len())?;
    let total: f64 = prior.iter().sum();
    if (total - 1.0).abs() > PROB_TOL || prior.iter().any(|p| p.is_nan() || *p < 0.0) {
        return Err(Error::InvalidState(format!("prior sums to {total}")));
    }
    let q = output_distribution(prior, t);
    let mut acc = 0.0;
    for (i, &pi) in prior.iter().enumerate() {
        if pi == 0.0 {
            continue;
        }
        for (j, &qj) in q.iter().enumerate() {
            acc += pi * xlogx_ratio(t.get(i, j), qj);
        }
    }
    Ok(acc.max(0.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShannonCapacity {
    pub capacity: f64,
    pub prior: Vec<f64>,
    /// Final `upper − lower` bracket.
    pub gap: f64,
    pub iterations: usize,
    /// The mutual information never decreased between iterates.
    pub monotone: bool,
}

pub const BA_MAX_ITERS: usize = 200_000;

/// Blahut-Arimoto from the uniform prior. Stops when the bracket
/// `ln max_i c_i − ln Σ π_i c_i` drops below [`BA_GAP`].
pub fn shannon_capacity_fixed(t: &ClassicalChannelMatrix) -> ShannonCapacity {
    let n = t.rows();
    let mut prior = vec![1.0 / n as f64; n];
    let mut last_mi = f64::NEG_INFINITY;
    let mut monotone = true;
    let mut iterations = 0;
    loop {
        let q = output_distribution(&prior, t);
        let c: Vec<f64> = (0..n)
            .map(|i| (0..t.cols()).map(|j| xlogx_ratio(t.get(i, j), q[j])).sum::<f64>().exp())
            .collect();
        let mean: f64 = prior.iter().zip(&c).map(|(p, ci)| p * ci).sum();
        let lower = mean.ln();
        let upper = c.iter().copied().fold(f64::NEG_INFINITY, f64::max).ln();
        let mi = mutual_information(&prior, t).unwrap_or(lower);
        if mi < last_mi - 1e-13 {
            monotone = false;
        }
        last_mi = mi;
        let gap = upper - lower;
        if gap < BA_GAP || iterations >= BA_MAX_ITERS {
            return ShannonCapacity {
                capacity: mi,
                prior,
                gap,
                iterations,
                monotone,
            };
        }
        for (p, ci) in prior.iter_mut().zip(&c) {
            *p *= ci / mean;
        }
        let s: f64 = prior.iter().sum();
        prior.iter_mut().for_each(|p| *p /= s);
        iterations += 1;
    }
}

/// Basis ensemble and basis measurement through `Δ_λ`, checked against the
/// closed form `ln d − S_min`.
pub fn shannon_capacity_depolarizing(ch: &DepolarizingChannel) -> Result<ShannonCapacity> {
    let d = ch.dim();
    let t = transition_matrix(ch, &Ensemble::basis(d), &Povm::basis(d))?;
    let res = shannon_capacity_fixed(&t);
    let closed = ch.chi_star_closed();
    if (res.capacity - closed).abs() > SHANNON_AGREEMENT_TOL {
        return Err(Error::Inconsistent(format!(
            "Blahut-Arimoto gives {} but ln d − S_min = {closed}",
            res.capacity
        )));
    }
    Ok(res)
}
