//! Convex decomposition of `Δ_λ` into uniform phase-damping channels.
//!
//! Two stages. First `Δ_λ` is a mixture of the intermediate channel `Ω_λ` and
//! its conjugates by powers of the clock matrix `G`. Then `Ω_λ` is the uniform
//! average of the `2d²` dephasers `Φ_λ^{(a)}` whose bases are
//! `{G^k H^a |θ⟩}_k`. Composing the two gives `2d²(d+1)` terms.
//!
//! Indices `k ∈ 1..=d` and `a ∈ 1..=2d²` are 1-based everywhere in this module.

use std::f64::consts::PI;

use crate::channel::{channel_distance, QuantumChannel};
use crate::depolarizing::DepolarizingChannel;
use crate::error::{Error, Result};
use crate::linalg::{
    c, cr, diag_part, identity, matrix_power, max_abs_diff, CMatrix, CVector,
};
use crate::phase_damping::{is_uniform_channel, PhaseDampingChannel};
use crate::state::{DensityMatrix, PureState};

/// Threshold on superoperator Frobenius distance for channel equality.
pub const IDENTITY_TOL: f64 = 1e-10;

/// Diagonal clock matrix, `G_kk = exp(2πik/d)` for `k = 1..=d`.
pub fn build_g(d: usize) -> CMatrix {
    let entries: Vec<_> = (1..=d)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / d as f64;
            c(t.cos(), t.sin())
        })
        .collect();
    crate::linalg::diagonal(&entries)
}

/// Diagonal chirp matrix, `H_kk = exp(2πik²/(2d²))` for `k = 1..=d`.
pub fn build_h(d: usize) -> CMatrix {
    let entries: Vec<_> = (1..=d)
        .map(|k| {
            let t = 2.0 * PI * (k * k) as f64 / (2 * d * d) as f64;
            c(t.cos(), t.sin())
        })
        .collect();
    crate::linalg::diagonal(&entries)
}

/// `|θ⟩ = (1, …, 1)/√d`.
pub fn theta(d: usize) -> PureState {
    PureState::normalized(CVector::from_element(d, cr(1.0))).expect("nonzero")
}

/// Number of chirp indices, `2d²`.
pub fn chirp_count(d: usize) -> usize {
    2 * d * d
}

/// `|ψ_{k,a}⟩ = G^k H^a |θ⟩`.
pub fn psi_state(d: usize, k: usize, a: usize) -> Result<PureState> {
    if d < 2 {
        return Err(Error::Domain(format!("need d >= 2, got {d}")));
    }
    if !(1..=d).contains(&k) {
        return Err(Error::IndexOutOfRange(format!("k = {k} not in 1..={d}")));
    }
    if !(1..=chirp_count(d)).contains(&a) {
        return Err(Error::IndexOutOfRange(format!("a = {a} not in 1..={}", chirp_count(d))));
    }
    // G and H are diagonal, so the phases can be written down directly.
    let dd = d as f64;
    let v = CVector::from_fn(d, |row, _| {
        let x = (row + 1) as f64;
        let t = 2.0 * PI * (k as f64 * x / dd + a as f64 * x * x / (2.0 * dd * dd));
        c(t.cos(), t.sin()) / cr(dd.sqrt())
    });
    PureState::normalized(v)
}

/// The orthonormal basis `{ψ_{k,a}}_{k=1..d}` for fixed `a`.
pub fn psi_basis(d: usize, a: usize) -> Result<Vec<PureState>> {
    (1..=d).map(|k| psi_state(d, k, a)).collect()
}

/// `Φ_λ^{(a)}`: the dephaser in the basis `{ψ_{k,a}}_k`.
pub fn phase_family(d: usize, lambda: f64, a: usize) -> Result<PhaseDampingChannel> {
    PhaseDampingChannel::new(psi_basis(d, a)?, lambda)
}

/// `Ω_λ(ρ) = Δ_λ(ρ) + ((1−λ)/d)(ρ − diag ρ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaChannel {
    dim: usize,
    lambda: f64,
}

impl OmegaChannel {
    /// Accepts the phase-damping range `−1/(d−1) ≤ λ ≤ 1`.
    pub fn new(dim: usize, lambda: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Domain(format!("need d >= 2, got {dim}")));
        }
        let (lo, hi) = crate::phase_damping::lambda_range(dim);
        if !(lambda >= lo && lambda <= hi) {
            return Err(Error::Domain(format!(
                "lambda {lambda} outside [{lo}, {hi}] for d = {dim}"
            )));
        }
        Ok(Self { dim, lambda })
    }

    pub fn new_unchecked(dim: usize, lambda: f64) -> Self {
        Self { dim, lambda }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Second algebraic form: `(λ + (1−λ)/d) ρ + ((1−λ)/d)(Tr(ρ) I − diag ρ)`.
    pub fn apply_mixed_form(&self, m: &CMatrix) -> CMatrix {
        let d = self.dim as f64;
        let a = self.lambda + (1.0 - self.lambda) / d;
        let b = (1.0 - self.lambda) / d;
        m * cr(a) + (identity(self.dim) * m.trace() - diag_part(m)) * cr(b)
    }
}

impl QuantumChannel for OmegaChannel {
    fn dim_in(&self) -> usize {
        self.dim
    }

    fn dim_out(&self) -> usize {
        self.dim
    }

    fn apply_matrix(&self, m: &CMatrix) -> CMatrix {
        let dep = DepolarizingChannel::new_unchecked(self.dim, self.lambda);
        let b = (1.0 - self.lambda) / self.dim as f64;
        dep.apply_matrix(m) + (m - diag_part(m)) * cr(b)
    }

    fn adjoint_apply_matrix(&self, x: &CMatrix) -> CMatrix {
        self.apply_matrix(x)
    }
}

pub fn omega_apply(om: &OmegaChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    om.apply(rho)
}

/// Outcome of an operator identity verified at the superoperator level.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub dim: usize,
    pub lambda: f64,
    /// Frobenius distance between the two sides.
    pub distance: f64,
    pub passed: bool,
}

impl IdentityReport {
    fn new(dim: usize, lambda: f64, distance: f64) -> Self {
        Self {
            dim,
            lambda,
            distance,
            passed: distance < IDENTITY_TOL,
        }
    }
}

/// A weighted sum `Σ w_n U_n* Φ_n(·) U_n` of channels. Weights may be signed.
pub struct ChannelMixture {
    dim: usize,
    terms: Vec<(f64, CMatrix, Box<dyn QuantumChannel>)>,
}

impl ChannelMixture {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            terms: Vec::new(),
        }
    }

    pub fn push(&mut self, weight: f64, unitary: CMatrix, channel: Box<dyn QuantumChannel>) {
        self.terms.push((weight, unitary, channel));
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

impl QuantumChannel for ChannelMixture {
    fn dim_in(&self) -> usize {
        self.dim
    }

    fn dim_out(&self) -> usize {
        self.dim
    }

    fn apply_matrix(&self, m: &CMatrix) -> CMatrix {
        let mut acc = CMatrix::zeros(self.dim, self.dim);
        for (w, u, ch) in &self.terms {
            acc += (u.adjoint() * ch.apply_matrix(m) * u) * cr(*w);
        }
        acc
    }

    fn adjoint_apply_matrix(&self, x: &CMatrix) -> CMatrix {
        let mut acc = CMatrix::zeros(self.dim, self.dim);
        for (w, u, ch) in &self.terms {
            acc += ch.adjoint_apply_matrix(&(u * x * u.adjoint())) * cr(*w);
        }
        acc
    }
}

fn stage_one_weights(d: usize, lambda: f64) -> Result<(f64, f64)> {
    let denom = 1.0 + (d as f64 - 1.0) * lambda;
    if denom.abs() < 1e-12 {
        return Err(Error::SingularWeight(format!(
            "1 + (d−1)λ vanishes at d = {d}, λ = {lambda}"
        )));
    }
    Ok((lambda * d as f64 / denom, (1.0 - lambda) / denom))
}

/// `Δ_λ = (λd/(1+(d−1)λ)) Ω_λ + ((1−λ)/(1+(d−1)λ)) (1/d) Σ_k G*^k Ω_λ G^k`.
pub fn lemma5_decompose(d: usize, lambda: f64) -> Result<IdentityReport> {
    let (w_omega, w_conj) = stage_one_weights(d, lambda)?;
    let dep = DepolarizingChannel::new_unchecked(d, lambda);
    let omega = OmegaChannel::new_unchecked(d, lambda);
    let g = build_g(d);
    let mut mix = ChannelMixture::new(d);
    mix.push(w_omega, identity(d), Box::new(omega));
    for k in 1..=d {
        mix.push(w_conj / d as f64, matrix_power(&g, k), Box::new(omega));
    }
    Ok(IdentityReport::new(d, lambda, channel_distance(&dep, &mix)))
}

/// `Ω_λ = (1/2d²) Σ_a Φ_λ^{(a)}`.
pub fn lemma6_decompose(d: usize, lambda: f64) -> Result<IdentityReport> {
    let omega = OmegaChannel::new(d, lambda)?;
    let n = chirp_count(d);
    let mut mix = ChannelMixture::new(d);
    for a in 1..=n {
        mix.push(1.0 / n as f64, identity(d), Box::new(phase_family(d, lambda, a)?));
    }
    Ok(IdentityReport::new(d, lambda, channel_distance(&omega, &mix)))
}

/// `(1/d) Σ_k G*^k m G^k`; equals `diag(m)`.
pub fn clock_twirl(m: &CMatrix) -> CMatrix {
    let d = m.nrows();
    let g = build_g(d);
    let mut acc = CMatrix::zeros(d, d);
    let mut gk = identity(d);
    for _ in 1..=d {
        gk = &gk * &g;
        acc += gk.adjoint() * m * &gk;
    }
    acc / cr(d as f64)
}

/// Max entry of `(1/2d) Σ_a Σ_k E_{k,a} ρ E_{k,a} − (Tr(ρ) I + ρ − diag ρ)`.
pub fn averaged_projection_defect(rho: &CMatrix) -> Result<f64> {
    let d = rho.nrows();
    let mut acc = CMatrix::zeros(d, d);
    for a in 1..=chirp_count(d) {
        for psi in psi_basis(d, a)? {
            let e = psi.projector();
            acc += &e * rho * &e;
        }
    }
    acc /= cr(2.0 * d as f64);
    let expected = identity(d) * rho.trace() + rho - diag_part(rho);
    Ok(max_abs_diff(&acc, &expected))
}

/// Exhaustive census of the phase-cancellation conditions behind the
/// averaging identity.
#[derive(Debug, Clone, PartialEq)]
pub struct DiophantineCensus {
    pub d: usize,
    /// All `(x, y, u, v)` with `x+v−y−u ∈ {0, ±d}` and
    /// `x²+v²−y²−u² ≡ 0 (mod 2d²)`.
    pub solutions: Vec<[usize; 4]>,
    /// Solutions lying in the `x+v−y−u = ±d` branches.
    pub shifted_branch: usize,
    /// Solutions not of the form `x=y, u=v` or `x=u, y=v`.
    pub nontrivial: usize,
    /// `2d² − d`.
    pub expected_trivial: usize,
}

impl DiophantineCensus {
    pub fn count(&self) -> usize {
        self.solutions.len()
    }

    /// The solution set is exactly the trivial family.
    pub fn matches_expected(&self) -> bool {
        self.nontrivial == 0 && self.shifted_branch == 0 && self.count() == self.expected_trivial
    }
}

pub const MAX_DIOPHANTINE_D: usize = 16;

pub fn diophantine_solutions(d: usize) -> Result<DiophantineCensus> {
    if !(1..=MAX_DIOPHANTINE_D).contains(&d) {
        return Err(Error::Domain(format!(
            "exhaustive enumeration supports 1 <= d <= {MAX_DIOPHANTINE_D}, got {d}"
        )));
    }
    let di = d as i64;
    let modulus = 2 * di * di;
    let mut solutions = Vec::new();
    let (mut shifted_branch, mut nontrivial) = (0, 0);
    for x in 1..=di {
        for y in 1..=di {
            for u in 1..=di {
                for v in 1..=di {
                    let linear = x + v - y - u;
                    if linear != 0 && linear.abs() != di {
                        continue;
                    }
                    if (x * x + v * v - y * y - u * u).rem_euclid(modulus) != 0 {
                        continue;
                    }
                    if linear != 0 {
                        shifted_branch += 1;
                    }
                    if !((x == y && u == v) || (x == u && y == v)) {
                        nontrivial += 1;
                    }
                    solutions.push([x as usize, y as usize, u as usize, v as usize]);
                }
            }
        }
    }
    Ok(DiophantineCensus {
        d,
        solutions,
        shifted_branch,
        nontrivial,
        expected_trivial: 2 * d * d - d,
    })
}

/// One term `c_n U_n* Φ^{(n)}(·) U_n`.
#[derive(Debug, Clone)]
pub struct DecompositionTerm {
    pub weight: f64,
    pub unitary: CMatrix,
    pub channel: PhaseDampingChannel,
    /// Power of `G` in the conjugation, `None` for the unconjugated block.
    pub k: Option<usize>,
    pub a: usize,
}

/// Mixture of conjugated uniform dephasers that reproduces `Δ_λ`.
#[derive(Debug, Clone)]
pub struct ConvexDecomposition {
    pub dim: usize,
    pub lambda: f64,
    pub terms: Vec<DecompositionTerm>,
}

impl ConvexDecomposition {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn weight_sum(&self) -> f64 {
        self.terms.iter().map(|t| t.weight).sum()
    }

    pub fn min_weight(&self) -> f64 {
        self.terms.iter().map(|t| t.weight).fold(f64::INFINITY, f64::min)
    }

    /// All weights nonnegative. False for `λ < 0`, where the identity still
    /// holds but with signed weights.
    pub fn is_convex(&self) -> bool {
        self.min_weight() >= 0.0
    }

    pub fn all_uniform(&self) -> bool {
        self.terms.iter().all(|t| is_uniform_channel(&t.channel))
    }

    /// Superoperator distance to `Δ_λ`.
    pub fn reconstruction_distance(&self) -> f64 {
        channel_distance(&DepolarizingChannel::new_unchecked(self.dim, self.lambda), self)
    }
}

impl QuantumChannel for ConvexDecomposition {
    fn dim_in(&self) -> usize {
        self.dim
    }

    fn dim_out(&self) -> usize {
        self.dim
    }

    fn apply_matrix(&self, m: &CMatrix) -> CMatrix {
        let mut acc = CMatrix::zeros(self.dim, self.dim);
        for t in &self.terms {
            acc += (t.unitary.adjoint() * t.channel.apply_matrix(m) * &t.unitary) * cr(t.weight);
        }
        acc
    }

    fn adjoint_apply_matrix(&self, x: &CMatrix) -> CMatrix {
        let mut acc = CMatrix::zeros(self.dim, self.dim);
        for t in &self.terms {
            acc += t
                .channel
                .adjoint_apply_matrix(&(&t.unitary * x * t.unitary.adjoint()))
                * cr(t.weight);
        }
        acc
    }
}

/// The `2d²(d+1)`-term decomposition of `Δ_λ`.
///
/// Weights are nonnegative for `λ ∈ [0, 1]`; below zero they turn signed and
/// [`ConvexDecomposition::is_convex`] reports it.
pub fn full_decomposition(d: usize, lambda: f64) -> Result<ConvexDecomposition> {
    DepolarizingChannel::new(d, lambda)?;
    let (w_omega, w_conj) = stage_one_weights(d, lambda)?;
    let n = chirp_count(d);
    let families = (1..=n)
        .map(|a| phase_family(d, lambda, a))
        .collect::<Result<Vec<_>>>()?;
    let g = build_g(d);
    let mut terms = Vec::with_capacity(n * (d + 1));
    for (idx, ch) in families.iter().enumerate() {
        terms.push(DecompositionTerm {
            weight: w_omega / n as f64,
            unitary: identity(d),
            channel: ch.clone(),
            k: None,
            a: idx + 1,
        });
    }
    for k in 1..=d {
        let gk = matrix_power(&g, k);
        for (idx, ch) in families.iter().enumerate() {
            terms.push(DecompositionTerm {
                weight: w_conj / (d * n) as f64,
                unitary: gk.clone(),
                channel: ch.clone(),
                k: Some(k),
                a: idx + 1,
            });
        }
    }
    Ok(ConvexDecomposition {
        dim: d,
        lambda,
        terms,
    })
}

/// The two-dimensional case written with Pauli-type matrices.
pub mod qubit {
    use super::*;

    pub fn sigma_x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[cr(0.0), cr(1.0), cr(1.0), cr(0.0)])
    }

    pub fn sigma_y() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[cr(0.0), c(0.0, -1.0), c(0.0, 1.0), cr(0.0)])
    }

    pub fn sigma_z() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[cr(1.0), cr(0.0), cr(0.0), cr(-1.0)])
    }

    fn eighth_root(sign: f64) -> num_complex::Complex64 {
        let t = sign * PI / 4.0;
        c(t.cos(), t.sin())
    }

    /// `τ = [[0, e^{iπ/4}], [e^{−iπ/4}, 0]]`.
    pub fn tau() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[cr(0.0), eighth_root(1.0), eighth_root(-1.0), cr(0.0)])
    }

    /// `τ̄ = [[0, e^{−iπ/4}], [e^{iπ/4}, 0]]`.
    pub fn tau_bar() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[cr(0.0), eighth_root(-1.0), eighth_root(1.0), cr(0.0)])
    }

    /// `ρ ↦ λ₊ρ + λ₋ PρP` with `λ± = (1±λ)/2`, for a Hermitian unitary `P`.
    pub struct PauliDephaser {
        pub lambda: f64,
        pub pauli: CMatrix,
    }

    impl QuantumChannel for PauliDephaser {
        fn dim_in(&self) -> usize {
            2
        }

        fn dim_out(&self) -> usize {
            2
        }

        fn apply_matrix(&self, m: &CMatrix) -> CMatrix {
            let plus = (1.0 + self.lambda) / 2.0;
            let minus = (1.0 - self.lambda) / 2.0;
            m * cr(plus) + (&self.pauli * m * &self.pauli) * cr(minus)
        }
    }

    /// `Δ_λ(ρ)` in the `λ±` parametrization.
    pub fn depolarize_entries(lambda: f64, rho: &CMatrix) -> CMatrix {
        let (p, m) = ((1.0 + lambda) / 2.0, (1.0 - lambda) / 2.0);
        let (a, b, off) = (rho[(0, 0)], rho[(1, 1)], rho[(0, 1)]);
        CMatrix::from_row_slice(
            2,
            2,
            &[a * p + b * m, off * lambda, off.conj() * lambda, a * m + b * p],
        )
    }

    /// `Ω_λ(ρ)` in the `λ±` parametrization: off-diagonals scale by `λ₊`.
    pub fn omega_entries(lambda: f64, rho: &CMatrix) -> CMatrix {
        let (p, m) = ((1.0 + lambda) / 2.0, (1.0 - lambda) / 2.0);
        let (a, b, off) = (rho[(0, 0)], rho[(1, 1)], rho[(0, 1)]);
        CMatrix::from_row_slice(2, 2, &[a * p + b * m, off * p, off.conj() * p, a * m + b * p])
    }

    /// `Δ_λ` from four dephasers: `Ω_λ = ½(Φ^{(2)} + Φ^{(4)})` plus the
    /// `σ_z` conjugates.
    pub fn four_channel_decomposition(lambda: f64) -> Result<ChannelMixture> {
        let (w_omega, w_conj) = stage_one_weights(2, lambda)?;
        let g = build_g(2);
        let mut mix = ChannelMixture::new(2);
        for a in [2usize, 4] {
            let ch = phase_family(2, lambda, a)?;
            mix.push(w_omega / 2.0 + w_conj / 4.0, identity(2), Box::new(ch.clone()));
            mix.push(w_conj / 4.0, g.clone(), Box::new(ch));
        }
        Ok(mix)
    }
}
