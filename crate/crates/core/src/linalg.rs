//! Dense complex linear algebra helpers.
//!
//! Everything spectral goes through [`eigh`], a thin wrapper around nalgebra's
//! Hermitian eigensolver that returns eigenvalues in ascending order.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Eigenvalues in `[-TAU_PSD, 0]` are treated as exact zeros.
pub const TAU_PSD: f64 = 1e-10;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> CMatrix {
    CMatrix::zeros(rows, cols)
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn trace(a: &CMatrix) -> C64 {
    a.trace()
}

/// Largest entry modulus of `a - a*`.
pub fn hermitian_defect(a: &CMatrix) -> f64 {
    if !a.is_square() {
        return f64::INFINITY;
    }
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `(a + a*) / 2`.
pub fn hermitize(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()) * cr(0.5)
}

/// Hermitian eigendecomposition. Eigenvalues ascend; eigenvectors are the
/// matching columns of the returned matrix.
pub fn eigh(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = hermitize(a).symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Eigenvalues only, ascending.
pub fn eigvalsh(a: &CMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = hermitize(a).symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn min_eigenvalue(a: &CMatrix) -> f64 {
    eigvalsh(a).first().copied().unwrap_or(f64::NAN)
}

/// Clip eigenvalues that are negative only through roundoff.
#[inline]
pub fn clip_psd(x: f64) -> f64 {
    if x < 0.0 {
        0.0
    } else {
        x
    }
}

/// Hermitian functional calculus: `V f(Λ) V*`.
pub fn apply_fn(a: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (vals, vecs) = eigh(a);
    from_spectrum(&vals.iter().map(|&x| f(x)).collect::<Vec<_>>(), &vecs)
}

pub fn from_spectrum(vals: &[f64], vecs: &CMatrix) -> CMatrix {
    let mut scaled = vecs.clone();
    for (j, &v) in vals.iter().enumerate() {
        for z in scaled.column_mut(j).iter_mut() {
            *z *= v;
        }
    }
    scaled * vecs.adjoint()
}

/// `a^p` for PSD `a`, with roundoff-negative eigenvalues clipped to zero.
pub fn psd_power(a: &CMatrix, p: f64) -> CMatrix {
    apply_fn(a, |x| {
        let x = clip_psd(x);
        if x == 0.0 {
            0.0
        } else {
            x.powf(p)
        }
    })
}

pub fn psd_sqrt(a: &CMatrix) -> CMatrix {
    apply_fn(a, |x| clip_psd(x).sqrt())
}

/// Natural logarithm of a PSD matrix with eigenvalues floored at `floor`.
pub fn psd_log(a: &CMatrix, floor: f64) -> CMatrix {
    apply_fn(a, |x| x.max(floor).ln())
}

pub fn frobenius_norm(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn frobenius_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "frobenius_distance: shape mismatch");
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// Largest entry modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "max_abs_diff: shape mismatch");
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Diagonal part of a square matrix.
pub fn diag_part(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    CMatrix::from_fn(n, n, |i, j| if i == j { a[(i, i)] } else { cr(0.0) })
}

pub fn diagonal(entries: &[C64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_column_slice(entries))
}

pub fn real_diagonal(entries: &[f64]) -> CMatrix {
    let e: Vec<C64> = entries.iter().map(|&x| cr(x)).collect();
    diagonal(&e)
}

/// `|v⟩⟨v|`.
pub fn outer(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

/// Computational basis vector `|i⟩` (0-based).
pub fn basis_vector(dim: usize, i: usize) -> CVector {
    let mut v = CVector::zeros(dim);
    v[i] = cr(1.0);
    v
}

/// Matrix unit `|i⟩⟨j|`.
pub fn matrix_unit(dim: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(dim, dim);
    m[(i, j)] = cr(1.0);
    m
}

/// Integer power of a square matrix by repeated squaring.
pub fn matrix_power(a: &CMatrix, mut exp: usize) -> CMatrix {
    let mut result = identity(a.nrows());
    let mut base = a.clone();
    while exp > 0 {
        if exp & 1 == 1 {
            result = &result * &base;
        }
        base = &base * &base;
        exp >>= 1;
    }
    result
}

/// `‖U U* − I‖_F`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    frobenius_distance(&(u * u.adjoint()), &identity(u.nrows()))
}

/// `max_{i,j} |a_ij|` over off-diagonal entries.
pub fn off_diagonal_max(a: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            if i != j {
                worst = worst.max(a[(i, j)].norm());
            }
        }
    }
    worst
}

/// `Tr(a^p)` for PSD `a`, from its spectrum.
pub fn trace_power(a: &CMatrix, p: f64) -> f64 {
    eigvalsh(a)
        .into_iter()
        .map(clip_psd)
        .filter(|&x| x > 0.0)
        .map(|x| x.powf(p))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigh_reconstructs_and_sorts() {
        let a = CMatrix::from_row_slice(
            3,
            3,
            &[cr(2.0), c(0.0, 1.0), cr(0.0), c(0.0, -1.0), cr(2.0), cr(0.5), cr(0.0), cr(0.5), cr(1.0)],
        );
        let (vals, vecs) = eigh(&a);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        let back = from_spectrum(&vals, &vecs);
        assert!(max_abs_diff(&back, &a) < 1e-12);
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let g = CMatrix::from_row_slice(2, 2, &[cr(1.0), c(0.3, 0.2), cr(0.1), cr(0.7)]);
        let a = &g * g.adjoint();
        let s = psd_sqrt(&a);
        assert!(max_abs_diff(&(&s * &s), &a) < 1e-12);
    }

    #[test]
    fn kron_of_identities_is_identity() {
        assert_eq!(kron(&identity(2), &identity(3)), identity(6));
    }

    #[test]
    fn matrix_power_matches_repeated_product() {
        let a = CMatrix::from_row_slice(2, 2, &[cr(0.0), cr(1.0), cr(1.0), cr(1.0)]);
        let p5 = matrix_power(&a, 5);
        // Fibonacci numbers
        assert_eq!(p5[(0, 1)], cr(5.0));
        assert_eq!(p5[(1, 1)], cr(8.0));
    }
}
