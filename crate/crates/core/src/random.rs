//! Seeded random inputs: Ginibre states, Haar unitaries, Stinespring channels.
//!
//! The generator is ChaCha8, so a seed yields the same stream on every
//! platform and run. Independent per-trial streams come from [`derive_seed`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channel::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::{c, hermitize, CMatrix, CVector};
use crate::state::{BipartiteState, DensityMatrix, PureState};

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Child seed for a path of labels below `root`.
pub fn derive_seed(root: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(root), |acc, &label| splitmix64(acc ^ splitmix64(label)))
}

/// FNV-1a hash, used to turn check names into seed labels.
pub fn label_hash(label: &str) -> u64 {
    label
        .bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> num_complex::Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im)
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// `G G* / Tr(G G*)` for a square Ginibre `G`.
pub fn random_density_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    let g = ginibre(dim, dim, rng);
    DensityMatrix::from_psd(hermitize(&(&g * g.adjoint()))).expect("Gram matrix is a valid state")
}

/// Uniformly distributed unit vector.
pub fn random_pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> PureState {
    let v = CVector::from_fn(dim, |_, _| complex_normal(rng));
    PureState::normalized(v).expect("Gaussian vector is nonzero")
}

/// Unnormalized random PSD matrix `G G*`.
pub fn random_psd<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(dim, dim, rng);
    hermitize(&(&g * g.adjoint()))
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of
/// `diag(R)` moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    random_isometry(dim, dim, rng)
}

/// Haar-distributed isometry `C^cols → C^rows` (`rows ≥ cols`).
pub fn random_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    assert!(rows >= cols, "isometry needs rows >= cols");
    let g = ginibre(rows, cols, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..cols {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        for i in 0..rows {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Stinespring sample: a Haar isometry into `C^dim_out ⊗ C^env_dim` followed
/// by tracing out the environment.
pub fn random_channel<R: Rng + ?Sized>(
    dim_in: usize,
    dim_out: usize,
    env_dim: usize,
    rng: &mut R,
) -> Result<KrausChannel> {
    if dim_in == 0 || dim_out == 0 || env_dim == 0 {
        return Err(Error::Domain("channel dimensions must be >= 1".into()));
    }
    if dim_out * env_dim < dim_in {
        return Err(Error::Domain(format!(
            "no isometry from C^{dim_in} into C^{dim_out}⊗C^{env_dim}"
        )));
    }
    let v = random_isometry(dim_out * env_dim, dim_in, rng);
    let kraus = (0..env_dim)
        .map(|e| CMatrix::from_fn(dim_out, dim_in, |o, i| v[(o * env_dim + e, i)]))
        .collect();
    KrausChannel::new(kraus)
}

pub fn random_bipartite_state<R: Rng + ?Sized>(
    dim1: usize,
    dim2: usize,
    rng: &mut R,
) -> BipartiteState {
    BipartiteState::new(dim1, dim2, random_density_matrix(dim1 * dim2, rng))
        .expect("dimensions agree by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{min_eigenvalue, unitarity_defect};

    #[test]
    fn fixed_seed_is_bit_identical() {
        let a = random_density_matrix(4, &mut rng_from_seed(42));
        let b = random_density_matrix(4, &mut rng_from_seed(42));
        assert_eq!(a, b);
        let u = haar_unitary(3, &mut rng_from_seed(7));
        let v = haar_unitary(3, &mut rng_from_seed(7));
        assert_eq!(u, v);
    }

    #[test]
    fn random_channel_is_trace_preserving() {
        let mut rng = rng_from_seed(3);
        for (din, dout, env) in [(2, 2, 2), (3, 2, 2), (2, 3, 1), (3, 3, 3)] {
            let ch = random_channel(din, dout, env, &mut rng).unwrap();
            assert!(ch.tp_residual() < 1e-10);
        }
        assert!(random_channel(4, 1, 2, &mut rng).is_err());
    }

    #[test]
    fn random_states_are_psd() {
        let mut rng = rng_from_seed(9);
        for dim in 1..=6 {
            let rho = random_density_matrix(dim, &mut rng);
            assert!(min_eigenvalue(rho.matrix()) >= -1e-12);
        }
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = rng_from_seed(1);
        for dim in 1..=6 {
            assert!(unitarity_defect(&haar_unitary(dim, &mut rng)) < 1e-12);
        }
    }

    #[test]
    fn derived_seeds_differ() {
        let a = derive_seed(1, &[label_hash("lieb-thirring"), 0]);
        let b = derive_seed(1, &[label_hash("lieb-thirring"), 1]);
        let c = derive_seed(2, &[label_hash("lieb-thirring"), 0]);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, derive_seed(1, &[label_hash("lieb-thirring"), 0]));
    }
}
