//! Projected gradient ascent on the unit sphere with random restarts.
//!
//! Used for channel functionals that are convex in the output state, so their
//! maximum over all inputs sits at a pure input: `Tr Ψ(ψψ*)^p`, `−S(Ψ(ψψ*))`
//! and `S(Ψ(ψψ*) ‖ σ)`. An objective hands back its value and a vector `g`
//! with `df = 2 Re⟨g, dψ⟩`; for the channel functionals `g = Xψ` with
//! `X = Ψ*(∇)`. The ascent direction is the tangent part `g − ⟨ψ, g⟩ψ`.

use rayon::prelude::*;

use crate::channel::QuantumChannel;
use crate::error::{Error, Result};
use crate::linalg::{cr, eigh, from_spectrum, hermitize, outer, CMatrix, CVector};
use crate::measures::{check_p, spectral_entropy};
use crate::random::{derive_seed, random_pure_state, rng_from_seed};
use crate::state::PureState;

/// Eigenvalue floor used inside matrix logarithms of output states.
pub const LOG_FLOOR: f64 = 1e-18;

pub trait SphereObjective: Sync {
    fn dim(&self) -> usize;

    /// Value at unit `ψ` and the vector `g` described in the module docs.
    fn evaluate(&self, psi: &CVector) -> (f64, CVector);

    fn value(&self, psi: &CVector) -> f64 {
        self.evaluate(psi).0
    }
}

#[derive(Debug, Clone)]
pub struct SphereOptions {
    pub restarts: usize,
    pub max_iters: usize,
    /// Stop once the tangent gradient norm drops below this.
    pub grad_tol: f64,
    pub initial_step: f64,
    pub seed: u64,
    /// Extra starting points, run before the random restarts.
    pub warm_starts: Vec<CVector>,
}

impl Default for SphereOptions {
    fn default() -> Self {
        Self {
            restarts: 64,
            max_iters: 5000,
            grad_tol: 1e-8,
            initial_step: 0.5,
            seed: 0,
            warm_starts: Vec::new(),
        }
    }
}

impl SphereOptions {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn restarts(mut self, n: usize) -> Self {
        self.restarts = n;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AscentRun {
    pub value: f64,
    pub point: CVector,
    pub grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SphereResult {
    pub value: f64,
    pub state: PureState,
    pub grad_norm: f64,
    pub converged: bool,
    /// Index of the winning start (warm starts first).
    pub best_start: usize,
    pub starts: usize,
    pub total_iterations: usize,
    pub seed: u64,
}

pub(crate) fn tangent_gradient(g: &CVector, psi: &CVector) -> CVector {
    g - psi * psi.dotc(g)
}

fn normalize(v: CVector) -> CVector {
    let n = v.norm();
    v / cr(n)
}

/// Single ascent from `start` with step growth 1.5x on success and halving on
/// failure.
pub fn ascend(obj: &dyn SphereObjective, start: CVector, opts: &SphereOptions) -> AscentRun {
    let mut psi = normalize(start);
    let (mut value, g) = obj.evaluate(&psi);
    let mut grad = tangent_gradient(&g, &psi);
    let mut step = opts.initial_step;
    let mut iterations = 0;
    while iterations < opts.max_iters {
        let g_norm = grad.norm();
        if g_norm.is_nan() || g_norm < opts.grad_tol {
            break;
        }
        iterations += 1;
        let mut accepted = false;
        while step > 1e-16 {
            let trial = normalize(&psi + &grad * cr(step));
            let (v, gt) = obj.evaluate(&trial);
            let trial_grad = tangent_gradient(&gt, &trial);
            // Near the optimum the value change falls below roundoff; then a
            // shrinking gradient is the only usable signal.
            let flat = v >= value - 4.0 * f64::EPSILON * value.abs().max(1.0);
            if v > value || (flat && trial_grad.norm() < g_norm) {
                psi = trial;
                value = v;
                grad = trial_grad;
                step *= 1.5;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let grad_norm = grad.norm();
    AscentRun {
        value,
        point: psi,
        grad_norm,
        iterations,
        converged: grad_norm < opts.grad_tol,
    }
}

/// Best of the warm starts plus `opts.restarts` seeded random starts. Runs in
/// parallel; the reduction is by value with ties going to the lower index, so
/// the result does not depend on scheduling.
pub fn maximize_on_sphere(obj: &dyn SphereObjective, opts: &SphereOptions) -> SphereResult {
    let dim = obj.dim();
    let warm = opts.warm_starts.len();
    let total = warm + opts.restarts;
    assert!(total > 0, "need at least one start");
    let runs: Vec<AscentRun> = (0..total)
        .into_par_iter()
        .map(|i| {
            let start = if i < warm {
                opts.warm_starts[i].clone()
            } else {
                let mut rng = rng_from_seed(derive_seed(opts.seed, &[(i - warm) as u64]));
                random_pure_state(dim, &mut rng).amplitudes().clone()
            };
            ascend(obj, start, opts)
        })
        .collect();
    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.value > runs[best].value {
            best = i;
        }
    }
    let total_iterations = runs.iter().map(|r| r.iterations).sum();
    let r = &runs[best];
    SphereResult {
        value: r.value,
        state: PureState::normalized(r.point.clone()).expect("unit vector"),
        grad_norm: r.grad_norm,
        converged: r.converged,
        best_start: best,
        starts: total,
        total_iterations,
        seed: opts.seed,
    }
}

fn output_eigh(ch: &dyn QuantumChannel, psi: &CVector) -> (Vec<f64>, CMatrix) {
    let sigma = hermitize(&ch.apply_matrix(&outer(psi)));
    let (vals, vecs) = eigh(&sigma);
    (vals.into_iter().map(|v| v.max(0.0)).collect(), vecs)
}

/// `ψ ↦ Tr Ψ(ψψ*)^p`.
pub struct OutputPNorm<'a> {
    pub channel: &'a dyn QuantumChannel,
    pub p: f64,
}

impl SphereObjective for OutputPNorm<'_> {
    fn dim(&self) -> usize {
        self.channel.dim_in()
    }

    fn evaluate(&self, psi: &CVector) -> (f64, CVector) {
        let (vals, vecs) = output_eigh(self.channel, psi);
        let value = vals.iter().map(|v| v.powf(self.p)).sum();
        let deriv: Vec<f64> = vals.iter().map(|v| self.p * v.powf(self.p - 1.0)).collect();
        let x = self.channel.adjoint_apply_matrix(&from_spectrum(&deriv, &vecs));
        (value, hermitize(&x) * psi)
    }
}

/// `ψ ↦ −S(Ψ(ψψ*))`.
pub struct OutputNegEntropy<'a> {
    pub channel: &'a dyn QuantumChannel,
}

impl SphereObjective for OutputNegEntropy<'_> {
    fn dim(&self) -> usize {
        self.channel.dim_in()
    }

    fn evaluate(&self, psi: &CVector) -> (f64, CVector) {
        let (vals, vecs) = output_eigh(self.channel, psi);
        let logs: Vec<f64> = vals.iter().map(|v| v.max(LOG_FLOOR).ln()).collect();
        let x = self.channel.adjoint_apply_matrix(&from_spectrum(&logs, &vecs));
        (-spectral_entropy(&vals), hermitize(&x) * psi)
    }
}

/// `ψ ↦ S(Ψ(ψψ*) ‖ σ)` for a fixed reference `σ`, given as `ln σ`.
pub struct OutputRelativeEntropy<'a> {
    pub channel: &'a dyn QuantumChannel,
    pub log_reference: CMatrix,
}

impl<'a> OutputRelativeEntropy<'a> {
    /// Fails with [`Error::Support`] when `σ` is rank deficient.
    pub fn new(channel: &'a dyn QuantumChannel, reference: &CMatrix) -> Result<Self> {
        let (vals, vecs) = eigh(reference);
        let scale = vals.last().copied().unwrap_or(0.0).max(1.0);
        if vals[0] <= 1e-14 * scale {
            return Err(Error::Support(format!(
                "reference state is rank deficient (smallest eigenvalue {:e})",
                vals[0]
            )));
        }
        let logs: Vec<f64> = vals.iter().map(|v| v.ln()).collect();
        Ok(Self {
            channel,
            log_reference: from_spectrum(&logs, &vecs),
        })
    }
}

impl SphereObjective for OutputRelativeEntropy<'_> {
    fn dim(&self) -> usize {
        self.channel.dim_in()
    }

    fn evaluate(&self, psi: &CVector) -> (f64, CVector) {
        let (vals, vecs) = output_eigh(self.channel, psi);
        let logs: Vec<f64> = vals.iter().map(|v| v.max(LOG_FLOOR).ln()).collect();
        let log_sigma = from_spectrum(&logs, &vecs);
        let sigma = from_spectrum(&vals, &vecs);
        let cross = (&sigma * &self.log_reference).trace().re;
        let value = -spectral_entropy(&vals) - cross;
        let x = self.channel.adjoint_apply_matrix(&(log_sigma - &self.log_reference));
        (value, hermitize(&x) * psi)
    }
}

/// Numerical `ν_p(Ψ)` with the maximizing input.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputOptimum {
    pub value: f64,
    pub state: PureState,
    pub search: SphereResult,
}

pub fn max_output_p_norm(ch: &dyn QuantumChannel, p: f64, opts: &SphereOptions) -> Result<OutputOptimum> {
    check_p(p)?;
    let search = maximize_on_sphere(&OutputPNorm { channel: ch, p }, opts);
    Ok(OutputOptimum {
        value: search.value.max(0.0).powf(1.0 / p),
        state: search.state.clone(),
        search,
    })
}

/// Numerical `S_min(Ψ)` with the minimizing input.
pub fn min_output_entropy(ch: &dyn QuantumChannel, opts: &SphereOptions) -> OutputOptimum {
    let search = maximize_on_sphere(&OutputNegEntropy { channel: ch }, opts);
    OutputOptimum {
        value: (-search.value).max(0.0),
        state: search.state.clone(),
        search,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::KrausChannel;
    use crate::depolarizing::DepolarizingChannel;
    use crate::linalg::real_diagonal;
    use crate::random::random_channel;

    #[test]
    fn gradient_matches_finite_difference() {
        let mut rng = rng_from_seed(3);
        let ch = random_channel(3, 2, 3, &mut rng).unwrap();
        let psi = random_pure_state(3, &mut rng).amplitudes().clone();
        let raw = random_pure_state(3, &mut rng).amplitudes().clone();
        let dir = &raw - &psi * psi.dotc(&raw);
        let sigma = real_diagonal(&[0.7, 0.3]);
        let objs: Vec<Box<dyn SphereObjective>> = vec![
            Box::new(OutputPNorm { channel: &ch, p: 2.5 }),
            Box::new(OutputNegEntropy { channel: &ch }),
            Box::new(OutputRelativeEntropy::new(&ch, &sigma).unwrap()),
        ];
        for obj in &objs {
            let (_, g) = obj.evaluate(&psi);
            // Tangent direction, so the trace of the output is fixed to first order.
            let h = 1e-6;
            let plus = obj.value(&(&psi + &dir * cr(h)));
            let minus = obj.value(&(&psi - &dir * cr(h)));
            let fd = (plus - minus) / (2.0 * h);
            let analytic = 2.0 * g.dotc(&dir).re;
            assert!((fd - analytic).abs() < 1e-5, "fd {fd} analytic {analytic}");
        }
    }

    #[test]
    fn depolarizing_values_match_closed_forms() {
        let ch = DepolarizingChannel::new(3, 0.4).unwrap();
        let opts = SphereOptions::with_seed(5).restarts(8);
        let nu = max_output_p_norm(&ch, 2.0, &opts).unwrap();
        assert!((nu.value - ch.nu_p_closed(2.0).unwrap()).abs() < 1e-12);
        let smin = min_output_entropy(&ch, &opts);
        assert!((smin.value - ch.s_min_closed()).abs() < 1e-12);
    }

    #[test]
    fn identity_channel_is_pure() {
        let id = KrausChannel::identity(3);
        let opts = SphereOptions::with_seed(1).restarts(4);
        assert!((max_output_p_norm(&id, 3.0, &opts).unwrap().value - 1.0).abs() < 1e-12);
        assert!(min_output_entropy(&id, &opts).value.abs() < 1e-12);
    }

    #[test]
    fn result_independent_of_thread_schedule() {
        let mut rng = rng_from_seed(17);
        let ch = random_channel(3, 3, 2, &mut rng).unwrap();
        let opts = SphereOptions::with_seed(99).restarts(16);
        let a = max_output_p_norm(&ch, 2.0, &opts).unwrap();
        let b = max_output_p_norm(&ch, 2.0, &opts).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn random_channel_ascent_converges() {
        let mut rng = rng_from_seed(23);
        let ch = random_channel(2, 2, 2, &mut rng).unwrap();
        let opts = SphereOptions::with_seed(4).restarts(16);
        let res = max_output_p_norm(&ch, 2.0, &opts).unwrap();
        assert!(res.search.converged, "grad norm {}", res.search.grad_norm);
        // No random pure input beats the optimum.
        for _ in 0..200 {
            let psi = random_pure_state(2, &mut rng);
            let v = OutputPNorm { channel: &ch, p: 2.0 }.value(psi.amplitudes()).sqrt();
            assert!(v <= res.value + 1e-12);
        }
    }

    #[test]
    fn rank_deficient_reference_rejected() {
        let id = KrausChannel::identity(2);
        assert!(matches!(
            OutputRelativeEntropy::new(&id, &real_diagonal(&[1.0, 0.0])),
            Err(Error::Support(_))
        ));
    }
}
