//! Random states, unitaries and CP trace-preserving channels used by the
//! verification routines.

use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::channel::KrausSet;
use crate::eigen::hermitian_eig;
use crate::error::Result;
use crate::matrix::ComplexMatrix;
use crate::scalar::Real;

/// Standard complex Gaussian, `E|z|^2 = 1`.
pub fn complex_gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T>
where
    StandardNormal: Distribution<T>,
{
    let h = T::FRAC_1_SQRT_2();
    Complex::new(StandardNormal.sample(rng) * h, StandardNormal.sample(rng) * h)
}

/// `n x n` matrix of independent standard complex Gaussians.
pub fn random_matrix<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix<T>
where
    StandardNormal: Distribution<T>,
{
    ComplexMatrix::from_fn(n, n, |_, _| complex_gaussian(rng))
}

/// Density matrix `G G^dagger / tr(G G^dagger)` with Gaussian `G`.
pub fn random_density<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix<T>
where
    StandardNormal: Distribution<T>,
{
    let g = random_matrix::<T, R>(d, rng);
    let rho = g.matmul(&g.adjoint()).expect("square");
    let tr = rho.trace().re;
    let mut rho = rho.map(|z| z / tr);
    // exact Hermitian symmetry
    for r in 0..d {
        rho[(r, r)].im = T::zero();
        for c in r + 1..d {
            rho[(c, r)] = rho[(r, c)].conj();
        }
    }
    rho
}

/// Haar-ish random unitary from Gram-Schmidt on a Gaussian matrix.
pub fn random_unitary<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix<T>
where
    StandardNormal: Distribution<T>,
{
    let g = random_matrix::<T, R>(n, rng);
    let mut cols: Vec<Vec<Complex<T>>> = Vec::with_capacity(n);
    for c in 0..n {
        let mut v = g.column(c);
        for q in &cols {
            let proj: Complex<T> = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, qx) in v.iter_mut().zip(q) {
                *x = *x - proj * qx;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        cols.push(v.into_iter().map(|z| z / norm).collect());
    }
    ComplexMatrix::from_fn(n, n, |r, c| cols[c][r])
}

/// CP trace-preserving channel with `r` Kraus operators on dimension `d`.
///
/// Stacks `r` Gaussian `d x d` blocks into `G` and normalizes
/// `K_n = G_n (G^dagger G)^{-1/2}`, which makes `sum K_n^dagger K_n = I`.
pub fn random_kraus_set<T: Real, R: Rng + ?Sized>(d: usize, r: usize, rng: &mut R) -> Result<KrausSet<T>>
where
    StandardNormal: Distribution<T>,
{
    let blocks: Vec<ComplexMatrix<T>> = (0..r).map(|_| random_matrix(d, rng)).collect();
    let mut s = ComplexMatrix::<T>::zeros(d, d);
    for g in &blocks {
        s = &s + &g.adjoint().matmul(g)?;
    }
    let eig = hermitian_eig(&s, T::lit(1e-6) * s.max_abs())?;
    let mut inv_sqrt = ComplexMatrix::<T>::zeros(d, d);
    for (&mu, v) in eig.values.iter().zip(&eig.vectors) {
        inv_sqrt = &inv_sqrt + &ComplexMatrix::outer(v, v).scale_real(T::one() / mu.sqrt());
    }
    let ops = blocks.iter().map(|g| g.matmul(&inv_sqrt)).collect::<Result<Vec<_>>>()?;
    KrausSet::new(ops)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_objects_have_their_defining_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for d in [2, 4, 8] {
            let rho = random_density::<f64, _>(d, &mut rng);
            assert!((rho.trace().re - 1.0).abs() < 1e-12);
            assert!(rho.is_hermitian(0.0));
            let u = random_unitary::<f64, _>(d, &mut rng);
            assert!(u.adjoint().matmul(&u).unwrap().approx_eq(&ComplexMatrix::identity(d), 1e-12));
            for r in 1..=3 {
                let ks = random_kraus_set::<f64, _>(d, r, &mut rng).unwrap();
                assert_eq!(ks.len(), r);
                assert!(ks.is_trace_preserving(1e-10));
            }
        }
    }
}
