//! Hermitian eigendecomposition and singular values by cyclic Jacobi rotations.
//!
//! The matrices in this crate are small (at most a few hundred rows) and the
//! downstream checks compare reconstructions at 1e-9 or tighter, so the
//! Jacobi method is a good fit: it is simple, backward stable and delivers
//! eigenvectors that are orthonormal to working precision.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::scalar::Real;

const MAX_SWEEPS: usize = 100;

/// Spectral decomposition `m = sum_n values[n] |vectors[n]><vectors[n]|`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition<T> {
    /// Eigenvalues sorted in descending order.
    pub values: Vec<T>,
    /// Orthonormal eigenvectors, `vectors[n]` belongs to `values[n]`.
    pub vectors: Vec<Vec<Complex<T>>>,
}

impl<T: Real> EigenDecomposition<T> {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `sum_n lambda_n |e_n><e_n|`.
    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        let n = self.dim();
        let mut out = ComplexMatrix::zeros(n, n);
        for (&lambda, v) in self.values.iter().zip(&self.vectors) {
            for r in 0..n {
                let vr = v[r] * lambda;
                for c in 0..n {
                    out[(r, c)] = out[(r, c)] + vr * v[c].conj();
                }
            }
        }
        out
    }

    /// Gram matrix of the eigenvectors, `G[i][j] = <e_i|e_j>`.
    pub fn gram(&self) -> ComplexMatrix<T> {
        let n = self.dim();
        ComplexMatrix::from_fn(n, n, |i, j| inner(&self.vectors[i], &self.vectors[j]))
    }
}

fn inner<T: Real>(u: &[Complex<T>], v: &[Complex<T>]) -> Complex<T> {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// Plane rotation that zeroes the `(p, q)` element of a Hermitian 2x2 block
/// `[[app, apq], [conj(apq), aqq]]`. Returns `(c, s, phase)` with
/// `phase = apq / |apq|`; the unitary acting on columns `p, q` is
/// `[[c, s], [-s * conj(phase), c * conj(phase)]]`.
fn jacobi_rotation<T: Real>(app: T, aqq: T, apq: Complex<T>) -> (T, T, Complex<T>) {
    let mag = apq.norm();
    let phase = apq / mag;
    let theta = (aqq - app) / (T::lit(2.0) * mag);
    let t = if theta.is_infinite() {
        T::zero()
    } else {
        let sign = if theta >= T::zero() { T::one() } else { -T::one() };
        sign / (theta.abs() + (theta * theta + T::one()).sqrt())
    };
    let c = T::one() / (t * t + T::one()).sqrt();
    (c, t * c, phase)
}

/// Applies the rotation from [`jacobi_rotation`] to columns `p, q` of a
/// row-major `rows x n` buffer.
fn rotate_columns<T: Real>(
    buf: &mut [Complex<T>],
    n: usize,
    p: usize,
    q: usize,
    c: T,
    s: T,
    phase: Complex<T>,
) {
    let pc = phase.conj();
    for row in buf.chunks_exact_mut(n) {
        let (xp, xq) = (row[p], row[q]);
        row[p] = xp * c - xq * pc * s;
        row[q] = xp * s + xq * pc * c;
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues come back sorted descending. Each eigenvector is rotated by a
/// global phase so that its largest-magnitude entry (first one on ties) is
/// real and nonnegative. Degenerate eigenspaces get an arbitrary orthonormal
/// basis.
pub fn hermitian_eig<T: Real>(m: &ComplexMatrix<T>, tol: T) -> Result<EigenDecomposition<T>> {
    let deviation = m.hermitian_deviation().ok_or_else(|| {
        Error::Dimension(format!("eigendecomposition needs a square matrix, got {}x{}", m.rows(), m.cols()))
    })?;
    if deviation.is_nan() || deviation > tol {
        return Err(Error::NotHermitian {
            deviation: deviation.to_f64().unwrap_or(f64::NAN),
            tol: tol.to_f64().unwrap_or(f64::NAN),
        });
    }
    let n = m.rows();
    let half = T::lit(0.5);
    // Work on the exactly Hermitian part.
    let mut a: Vec<Complex<T>> = ComplexMatrix::from_fn(n, n, |r, c| {
        if r == c {
            Complex::new(m[(r, r)].re, T::zero())
        } else {
            (m[(r, c)] + m[(c, r)].conj()) * half
        }
    })
    .into_entries();
    let mut v = ComplexMatrix::<T>::identity(n).into_entries();

    let scale = a.iter().map(|z| z.norm_sqr()).sum::<T>();
    let eps = T::epsilon();
    for _ in 0..MAX_SWEEPS {
        let off: T = (0..n)
            .flat_map(|r| (0..n).filter(move |&c| c != r).map(move |c| (r, c)))
            .map(|(r, c)| a[r * n + c].norm_sqr())
            .sum();
        if off <= eps * eps * scale || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.norm() <= T::min_positive_value() {
                    continue;
                }
                let (c, s, phase) = jacobi_rotation(a[p * n + p].re, a[q * n + q].re, apq);
                // A <- A U, then A <- U^dagger A.
                rotate_columns(&mut a, n, p, q, c, s, phase);
                for k in 0..n {
                    let (xp, xq) = (a[p * n + k], a[q * n + k]);
                    a[p * n + k] = xp * c - xq * phase * s;
                    a[q * n + k] = xp * s + xq * phase * c;
                }
                a[p * n + q] = Complex::zero();
                a[q * n + p] = Complex::zero();
                a[p * n + p].im = T::zero();
                a[q * n + q].im = T::zero();
                rotate_columns(&mut v, n, p, q, c, s, phase);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[j * n + j]
            .re
            .partial_cmp(&a[i * n + i].re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });
    let values = order.iter().map(|&i| a[i * n + i].re).collect();
    let vectors = order
        .iter()
        .map(|&i| {
            let mut col: Vec<Complex<T>> = (0..n).map(|r| v[r * n + i]).collect();
            canonicalize_phase(&mut col);
            col
        })
        .collect();
    Ok(EigenDecomposition { values, vectors })
}

/// Multiplies `v` by the global phase that makes its largest-magnitude entry
/// real and nonnegative.
pub fn canonicalize_phase<T: Real>(v: &mut [Complex<T>]) {
    let mut best = 0;
    let mut best_mag = T::zero();
    for (i, z) in v.iter().enumerate() {
        let mag = z.norm();
        if mag > best_mag {
            best = i;
            best_mag = mag;
        }
    }
    if best_mag > T::zero() {
        let rot = v[best].conj() / best_mag;
        for z in v.iter_mut() {
            *z = *z * rot;
        }
        v[best] = Complex::new(best_mag, T::zero());
    }
}

/// Singular values in descending order (one-sided Jacobi).
pub fn singular_values<T: Real>(m: &ComplexMatrix<T>) -> Vec<T> {
    // Orthogonalize the columns of the taller orientation.
    let w = if m.rows() >= m.cols() { m.clone() } else { m.adjoint() };
    let n = w.cols();
    let mut buf = w.into_entries();
    let eps = T::epsilon();
    let col_dot = |buf: &[Complex<T>], i: usize, j: usize| -> Complex<T> {
        buf.chunks_exact(n).map(|row| row[i].conj() * row[j]).sum()
    };
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = col_dot(&buf, p, p).re;
                let beta = col_dot(&buf, q, q).re;
                let gamma = col_dot(&buf, p, q);
                if gamma.norm() <= eps * (alpha * beta).sqrt() || gamma.is_zero() {
                    continue;
                }
                rotated = true;
                let (c, s, phase) = jacobi_rotation(alpha, beta, gamma);
                rotate_columns(&mut buf, n, p, q, c, s, phase);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<T> = (0..n).map(|i| col_dot(&buf, i, i).re.sqrt()).collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

/// Relative rank cutoff shared by the channel conversions and the sparsity
/// report: `1e-10 * dim * largest`.
pub fn rank_cutoff<T: Real>(dim: usize, largest: T) -> T {
    T::lit(1e-10) * T::from_usize(dim).unwrap_or_else(T::one) * largest.abs()
}

/// Number of singular values above `max(tol, rank_cutoff)`.
pub fn numerical_rank<T: Real>(m: &ComplexMatrix<T>, tol: T) -> usize {
    let sv = singular_values(m);
    let largest = sv.first().copied().unwrap_or_else(T::zero);
    let cut = tol.max(rank_cutoff(m.rows().max(m.cols()), largest));
    sv.iter().filter(|&&s| s > cut).count()
}
