use crate::channel::QuantumChannel;
use crate::error::{ensure_dim, Error, Result};
use crate::linalg::{cr, eigh, from_spectrum, hermitize, outer, CMatrix, CVector};
use crate::measures::spectral_entropy;
use crate::optimize::{
    ascend, maximize_on_sphere, OutputRelativeEntropy, SphereObjective, SphereOptions, LOG_FLOOR,
};
use crate::random::derive_seed;
use crate::state::{DensityMatrix, PureState};

use super::Ensemble;

/// `S(Ψ(ρ̄)) − Σ π_i S(Ψ(ρ_i))`.
pub fn holevo_of_ensemble(psi: &dyn QuantumChannel, e: &Ensemble) -> Result<f64> {
    ensure_dim(psi.dim_in(), e.dim())?;
    let avg_out = psi.apply_matrix(e.average().matrix());
    let mut chi = output_entropy(&avg_out);
    for (p, rho) in e.items() {
        if *p > 0.0 {
            chi -= p * output_entropy(&psi.apply_matrix(rho.matrix()));
        }
    }
    Ok(chi.max(0.0))
}

fn output_entropy(m: &CMatrix) -> f64 {
    let (vals, _) = eigh(&hermitize(m));
    spectral_entropy(&vals.into_iter().map(|v| v.max(0.0)).collect::<Vec<_>>())
}

#[derive(Debug, Clone)]
pub struct HolevoOptions {
    pub seed: u64,
    /// Stop once the relative-entropy certificate gap is below this.
    pub gap_tol: f64,
    /// Random starting ensembles for the first ascent.
    pub restarts: usize,
    /// Iteration cap for each ascent.
    pub max_iters: usize,
    /// Certificate rounds (each may inject a witness and re-ascend).
    pub max_rounds: usize,
    /// Ensemble size; `None` means `d_in²`.
    pub ensemble_size: Option<usize>,
    /// Random restarts for each certificate search.
    pub certificate_restarts: usize,
}

impl Default for HolevoOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            gap_tol: 1e-7,
            restarts: 4,
            max_iters: 20_000,
            max_rounds: 12,
            ensemble_size: None,
            certificate_restarts: 16,
        }
    }
}

impl HolevoOptions {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HolevoResult {
    /// Holevo quantity of the returned ensemble; a lower bound on `χ*`.
    pub chi: f64,
    /// `sup_ρ S(Ψ(ρ) ‖ Ψ(ω*)) − χ`; `χ + gap` is an upper bound on `χ*`.
    pub gap: f64,
    pub converged: bool,
    pub states: Vec<PureState>,
    pub weights: Vec<f64>,
    /// Average input `ω* = Σ π_i ψ_i ψ_i*`.
    pub omega_star: DensityMatrix,
    /// `Ψ(ω*)`.
    pub output_average: DensityMatrix,
    /// Maximizer of `S(Ψ(ρ) ‖ Ψ(ω*))` from the last certificate.
    pub witness: PureState,
    /// Certificate rounds used.
    pub rounds: usize,
    /// Ascent iterations summed over all starts and rounds.
    pub iterations: usize,
    pub seed: u64,
}

impl HolevoResult {
    pub fn upper_bound(&self) -> f64 {
        self.chi + self.gap
    }

    pub fn ensemble(&self) -> Ensemble {
        Ensemble::new(
            self.weights
                .iter()
                .zip(&self.states)
                .map(|(p, s)| (*p, DensityMatrix::from(s)))
                .collect(),
        )
        .expect("normalized weights")
    }
}

fn floored_log(vals: &[f64], vecs: &CMatrix) -> CMatrix {
    let logs: Vec<f64> = vals.iter().map(|v| v.max(LOG_FLOOR).ln()).collect();
    from_spectrum(&logs, vecs)
}

fn xlnx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

/// The Holevo quantity as a function of stacked amplitude vectors
/// `v_i = √π_i ψ_i` on the unit sphere of `C^{n·d}`:
/// `χ = S(Σ σ_i) + Σ_i (Tr σ_i ln σ_i − t_i ln t_i)` with `σ_i = Ψ(v_i v_i*)`
/// and `t_i = ‖v_i‖²`. Its gradient block is
/// `[Ψ*(ln σ_i − ln σ̄) − (ln t_i + 1)] v_i`.
struct EnsembleObjective<'a> {
    channel: &'a dyn QuantumChannel,
    members: usize,
}

struct Outputs {
    sigma: Vec<CMatrix>,
    log_sigma: Vec<CMatrix>,
    neg_entropy: Vec<f64>,
    avg: CMatrix,
}

impl EnsembleObjective<'_> {
    fn din(&self) -> usize {
        self.channel.dim_in()
    }

    fn block(&self, v: &CVector, i: usize) -> CVector {
        v.rows(i * self.din(), self.din()).into_owned()
    }

    fn outputs(&self, v: &CVector) -> Outputs {
        let dout = self.channel.dim_out();
        let mut out = Outputs {
            sigma: Vec::with_capacity(self.members),
            log_sigma: Vec::with_capacity(self.members),
            neg_entropy: Vec::with_capacity(self.members),
            avg: CMatrix::zeros(dout, dout),
        };
        for i in 0..self.members {
            let sigma = hermitize(&self.channel.apply_matrix(&outer(&self.block(v, i))));
            let (vals, vecs) = eigh(&sigma);
            let vals: Vec<f64> = vals.into_iter().map(|x| x.max(0.0)).collect();
            out.neg_entropy.push(vals.iter().map(|&x| xlnx(x)).sum());
            out.log_sigma.push(floored_log(&vals, &vecs));
            out.avg += &sigma;
            out.sigma.push(sigma);
        }
        out
    }
}

impl SphereObjective for EnsembleObjective<'_> {
    fn dim(&self) -> usize {
        self.members * self.din()
    }

    fn evaluate(&self, v: &CVector) -> (f64, CVector) {
        let din = self.din();
        let out = self.outputs(v);
        let (avals, avecs) = eigh(&out.avg);
        let avals: Vec<f64> = avals.into_iter().map(|x| x.max(0.0)).collect();
        let log_avg = floored_log(&avals, &avecs);
        let mut value = -avals.iter().map(|&x| xlnx(x)).sum::<f64>();
        let mut grad = CVector::zeros(v.len());
        for i in 0..self.members {
            let vi = self.block(v, i);
            let t = vi.norm_squared();
            value += out.neg_entropy[i] - xlnx(t);
            if t > 0.0 {
                let x = self.channel.adjoint_apply_matrix(&(&out.log_sigma[i] - &log_avg));
                let g = hermitize(&x) * &vi - &vi * cr(t.max(LOG_FLOOR).ln() + 1.0);
                grad.rows_mut(i * din, din).copy_from(&g);
            }
        }
        (value, grad)
    }
}

fn split(v: &CVector, din: usize, members: usize) -> (Vec<f64>, Vec<CVector>) {
    (0..members)
        .map(|i| {
            let b = v.rows(i * din, din).into_owned();
            let t = b.norm_squared();
            let dir = if t > 0.0 {
                &b / cr(t.sqrt())
            } else {
                crate::linalg::basis_vector(din, 0)
            };
            (t, dir)
        })
        .unzip()
}

fn join(weights: &[f64], states: &[CVector]) -> CVector {
    let din = states[0].len();
    let mut v = CVector::zeros(din * states.len());
    for (i, (w, s)) in weights.iter().zip(states).enumerate() {
        v.rows_mut(i * din, din).copy_from(&(s * cr(w.max(0.0).sqrt())));
    }
    let n = v.norm();
    v / cr(n)
}

/// Blahut-Arimoto reweighting `π_i ∝ π_i exp S(σ_i ‖ σ̄)` with the states held
/// fixed. Never lowers `χ`.
fn reweight(ch: &dyn QuantumChannel, states: &[CVector], weights: &mut [f64], rounds: usize) {
    let outs: Vec<(CMatrix, f64)> = states
        .iter()
        .map(|s| {
            let sigma = hermitize(&ch.apply_matrix(&outer(s)));
            let ne = eigh(&sigma).0.into_iter().map(|x| xlnx(x.max(0.0))).sum();
            (sigma, ne)
        })
        .collect();
    for _ in 0..rounds {
        let mut avg = CMatrix::zeros(outs[0].0.nrows(), outs[0].0.nrows());
        for ((sigma, _), w) in outs.iter().zip(weights.iter()) {
            avg += sigma * cr(*w);
        }
        let (vals, vecs) = eigh(&hermitize(&avg));
        let log_avg = floored_log(&vals, &vecs);
        let div: Vec<f64> = outs
            .iter()
            .map(|(sigma, ne)| ne - (sigma * &log_avg).trace().re)
            .collect();
        let top = div.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for (w, d) in weights.iter_mut().zip(&div) {
            *w *= (d - top).exp();
        }
        let s: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= s);
    }
}

/// Sup of `S(Ψ(ρ) ‖ Ψ(ω))` over pure inputs, with the maximizer.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub value: f64,
    pub witness: PureState,
    pub restarts: usize,
    pub seed: u64,
}

fn certify_output(
    ch: &dyn QuantumChannel,
    reference: &CMatrix,
    warm: Vec<CVector>,
    restarts: usize,
    seed: u64,
) -> Result<Certificate> {
    let obj = OutputRelativeEntropy::new(ch, reference)?;
    let opts = SphereOptions {
        restarts,
        seed,
        warm_starts: warm,
        ..SphereOptions::default()
    };
    let res = maximize_on_sphere(&obj, &opts);
    Ok(Certificate {
        value: res.value,
        witness: res.state,
        restarts: res.starts,
        seed,
    })
}

/// `sup_ρ S(Ψ(ρ) ‖ Ψ(ω))` over pure `ρ`, by restarts and sphere ascent.
pub fn opwsw_certificate(
    psi: &dyn QuantumChannel,
    omega: &DensityMatrix,
    restarts: usize,
    seed: u64,
) -> Result<Certificate> {
    ensure_dim(psi.dim_in(), omega.dim())?;
    let reference = hermitize(&psi.apply_matrix(omega.matrix()));
    certify_output(psi, &reference, Vec::new(), restarts, seed)
}

/// Maximizes the Holevo quantity over ensembles of pure states and certifies
/// the result.
///
/// Weights and states are optimized together as one point
/// `(√π_1 ψ_1, …, √π_n ψ_n)` on a sphere, by the same projected ascent used
/// for output norms. Each round then reweights with Blahut-Arimoto and
/// computes the certificate `sup_ρ S(Ψ(ρ) ‖ σ̄) − χ`, where `σ̄` is the average
/// output. If that gap is above tolerance, the certificate's maximizer
/// replaces the lightest member and the ascent resumes.
pub fn holevo_quantity(psi: &dyn QuantumChannel, opts: &HolevoOptions) -> Result<HolevoResult> {
    let din = psi.dim_in();
    let members = opts.ensemble_size.unwrap_or(din * din).max(1);
    if opts.restarts == 0 || opts.max_rounds == 0 {
        return Err(Error::Domain("restarts and max_rounds must be positive".into()));
    }
    let obj = EnsembleObjective { channel: psi, members };
    let sphere = SphereOptions {
        restarts: opts.restarts,
        max_iters: opts.max_iters,
        grad_tol: 1e-10,
        seed: derive_seed(opts.seed, &[0]),
        ..SphereOptions::default()
    };
    let first = maximize_on_sphere(&obj, &sphere);
    let mut iterations = first.total_iterations;
    let mut v = first.state.amplitudes().clone();

    let mut gap = f64::INFINITY;
    let mut converged = false;
    let mut witness = None;
    let mut rounds = 0;
    let (mut weights, mut states) = split(&v, din, members);
    while rounds < opts.max_rounds {
        rounds += 1;
        reweight(psi, &states, &mut weights, 200);
        v = join(&weights, &states);
        let avg = obj.outputs(&v).avg;
        let chi = obj.value(&v);
        let warm = states
            .iter()
            .zip(&weights)
            .filter(|(_, w)| **w > 1e-12)
            .map(|(s, _)| s.clone())
            .collect();
        let seed = derive_seed(opts.seed, &[1, rounds as u64]);
        let cert = match certify_output(psi, &avg, warm, opts.certificate_restarts, seed) {
            Ok(c) => c,
            Err(Error::Support(_)) => {
                // Rank-deficient average: spread weight and keep ascending.
                weights.iter_mut().for_each(|w| *w = 1.0 / members as f64);
                let run = ascend(&obj, join(&weights, &states), &sphere);
                iterations += run.iterations;
                (weights, states) = split(&run.point, din, members);
                continue;
            }
            Err(e) => return Err(e),
        };
        gap = (cert.value - chi).max(0.0);
        let w = cert.witness.amplitudes().clone();
        witness = Some(cert.witness);
        if gap < opts.gap_tol {
            converged = true;
            break;
        }
        let lightest = weights
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, &x)| if x < acc.1 { (i, x) } else { acc })
            .0;
        states[lightest] = w;
        weights[lightest] = weights[lightest].max(1.0 / (4 * members) as f64);
        let run = ascend(&obj, join(&weights, &states), &sphere);
        iterations += run.iterations;
        (weights, states) = split(&run.point, din, members);
    }

    let v = join(&weights, &states);
    let chi = obj.value(&v);
    let mut omega = CMatrix::zeros(din, din);
    for (s, w) in states.iter().zip(&weights) {
        omega += outer(s) * cr(*w);
    }
    let witness = match witness {
        Some(w) => w,
        None => PureState::normalized(states[0].clone())?,
    };
    Ok(HolevoResult {
        chi,
        gap,
        converged,
        states: states
            .into_iter()
            .map(PureState::normalized)
            .collect::<Result<Vec<_>>>()?,
        output_average: DensityMatrix::from_psd(obj.outputs(&v).avg)?,
        weights,
        omega_star: DensityMatrix::from_psd(omega)?,
        witness,
        rounds,
        iterations,
        seed: opts.seed,
    })
}
