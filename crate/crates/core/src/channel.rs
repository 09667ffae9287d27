//! The three channel representations and the conversions between them.
//!
//! Conventions (all row-major):
//!
//! * `DynamicalMatrix`: `E(rho)[r][s] = sum B[(r d + r'), (s d + s')] rho[r'][s']`,
//!   so a Kraus set maps to `B = sum_n vec(K_n) vec(K_n)^dagger`.
//! * `KrausSet`: `E(rho) = sum_n K_n rho K_n^dagger`.
//! * `ChiMatrix`: `E(rho) = (1/t^2) sum_ij chi[i][j] lambda_i rho lambda_j^dagger` in
//!   the trace-coefficient convention, where `chi = sum_n L_n L~_n` with
//!   `L_n[j] = tr(K_n lambda_j)`. The orthonormal convention stores `chi / t^2`
//!   and drops the prefactor.

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::basis::{BasisKind, OperatorBasis};
use crate::eigen::{hermitian_eig, rank_cutoff};
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::scalar::Real;

/// Scaling convention of a process matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum ChiConvention {
    /// Raw trace coefficients `tr(K lambda_j)`; matches hand-computed examples.
    #[default]
    #[serde(rename = "trace")]
    TraceCoefficient,
    /// Expansion coefficients `tr(K lambda_j) / t`, i.e. the trace-coefficient
    /// matrix divided by `t^2`.
    #[serde(rename = "ortho")]
    Orthonormal,
}

impl std::fmt::Display for ChiConvention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ChiConvention::TraceCoefficient => "trace",
            ChiConvention::Orthonormal => "ortho",
        })
    }
}

fn check_density_shape<T: Real>(d: usize, rho: &ComplexMatrix<T>) -> Result<()> {
    if rho.rows() != d || rho.cols() != d {
        return Err(Error::Dimension(format!(
            "channel acts on {d}x{d} matrices, got {}x{}",
            rho.rows(),
            rho.cols()
        )));
    }
    Ok(())
}

fn exact_sqrt(n: usize) -> Option<usize> {
    let r = (n as f64).sqrt().round() as usize;
    (r * r == n).then_some(r)
}

fn lift_superop_dim<T: Real>(m: &ComplexMatrix<T>, what: &str) -> Result<usize> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("{what} must be square, got {}x{}", m.rows(), m.cols())));
    }
    exact_sqrt(m.rows()).ok_or_else(|| {
        Error::Dimension(format!("{what} size {} is not a perfect square", m.rows()))
    })
}

/// Dynamical (Sudarshan/Choi-type) matrix `B` of a map on `d x d` matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicalMatrix<T> {
    dim: usize,
    matrix: ComplexMatrix<T>,
}

impl<T: Real> DynamicalMatrix<T> {
    /// Wraps a `d^2 x d^2` matrix. Hermiticity is checked by the consumers
    /// that need it.
    pub fn new(matrix: ComplexMatrix<T>) -> Result<Self> {
        let dim = lift_superop_dim(&matrix, "dynamical matrix")?;
        Ok(Self { dim, matrix })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.matrix
    }

    pub fn is_completely_positive(&self, tol: T) -> bool {
        is_completely_positive(self, tol)
    }
}

/// Ordered Kraus operators together with their trace-preservation defect
/// `max |sum K^dagger K - I|`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet<T> {
    dim: usize,
    operators: Vec<ComplexMatrix<T>>,
    tp_defect: T,
}

impl<T: Real> KrausSet<T> {
    pub fn new(operators: Vec<ComplexMatrix<T>>) -> Result<Self> {
        let first = operators
            .first()
            .ok_or_else(|| Error::Dimension("Kraus set must contain at least one operator".into()))?;
        let dim = first.rows();
        for (n, k) in operators.iter().enumerate() {
            if k.rows() != dim || k.cols() != dim {
                return Err(Error::Dimension(format!(
                    "Kraus operator {n} is {}x{}, expected {dim}x{dim}",
                    k.rows(),
                    k.cols()
                )));
            }
        }
        let mut gram = ComplexMatrix::<T>::zeros(dim, dim);
        for k in &operators {
            gram = &gram + &k.adjoint().matmul(k)?;
        }
        let tp_defect = gram.max_abs_diff(&ComplexMatrix::identity(dim))?;
        Ok(Self {
            dim,
            operators,
            tp_defect,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn operators(&self) -> &[ComplexMatrix<T>] {
        &self.operators
    }

    pub fn into_operators(self) -> Vec<ComplexMatrix<T>> {
        self.operators
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn tp_defect(&self) -> T {
        self.tp_defect
    }

    pub fn is_trace_preserving(&self, tol: T) -> bool {
        self.tp_defect <= tol
    }

    /// Kraus set `K'_n = sum_m u[n][m] K_m`, which describes the same map
    /// whenever `u` is unitary.
    pub fn mix(&self, u: &ComplexMatrix<T>) -> Result<Self> {
        let r = self.len();
        if u.rows() != r || u.cols() != r {
            return Err(Error::Dimension(format!(
                "mixing matrix must be {r}x{r}, got {}x{}",
                u.rows(),
                u.cols()
            )));
        }
        let ops = (0..r)
            .map(|n| {
                let mut acc = ComplexMatrix::zeros(self.dim, self.dim);
                for (m, k) in self.operators.iter().enumerate() {
                    acc = &acc + &k.scale(u[(n, m)]);
                }
                acc
            })
            .collect();
        Self::new(ops)
    }
}

/// Process matrix over a named operator basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiMatrix<T> {
    dim: usize,
    matrix: ComplexMatrix<T>,
    basis_kind: BasisKind,
    convention: ChiConvention,
}

impl<T: Real> ChiMatrix<T> {
    pub fn new(matrix: ComplexMatrix<T>, basis_kind: BasisKind, convention: ChiConvention) -> Result<Self> {
        let dim = lift_superop_dim(&matrix, "chi matrix")?;
        Ok(Self {
            dim,
            matrix,
            basis_kind,
            convention,
        })
    }

    /// Dimension `d` of the system the channel acts on (`chi` is `d^2 x d^2`).
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn dim_sq(&self) -> usize {
        self.dim * self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn basis_kind(&self) -> BasisKind {
        self.basis_kind
    }

    pub fn convention(&self) -> ChiConvention {
        self.convention
    }

    /// Rescales into `target`, using the basis normalization `t`.
    pub fn to_convention(&self, target: ChiConvention, basis: &OperatorBasis<T>) -> Result<Self> {
        self.check_basis(basis)?;
        let t2 = basis.normalization() * basis.normalization();
        let matrix = match (self.convention, target) {
            (a, b) if a == b => self.matrix.clone(),
            (ChiConvention::TraceCoefficient, ChiConvention::Orthonormal) => self.matrix.map(|z| z / t2),
            _ => self.matrix.scale_real(t2),
        };
        Ok(Self {
            matrix,
            convention: target,
            ..*self
        })
    }

    fn check_basis(&self, basis: &OperatorBasis<T>) -> Result<()> {
        if basis.kind() != self.basis_kind || basis.dim() != self.dim {
            return Err(Error::Convention(format!(
                "chi was built over a {} basis of dimension {}, got a {} basis of dimension {}",
                self.basis_kind,
                self.dim,
                basis.kind(),
                basis.dim()
            )));
        }
        Ok(())
    }
}

/// Trace coefficients of one operator against a basis.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector<T> {
    /// `tr(K lambda_j)` for every basis element (a column of the outer product).
    pub entries: Vec<Complex<T>>,
    /// `tr(K^dagger lambda_j)`, which equals `conj(entries[j])` for Hermitian bases.
    pub conjugate_row: Vec<Complex<T>>,
}

impl<T: Real> CoefficientVector<T> {
    /// `entries * conjugate_row` as a `d^2 x d^2` matrix.
    pub fn outer(&self) -> ComplexMatrix<T> {
        let n = self.entries.len();
        ComplexMatrix::from_fn(n, n, |i, j| self.entries[i] * self.conjugate_row[j])
    }
}

/// `E(rho)[r][s] = sum_{r', s'} B[(r r'), (s s')] rho[r'][s']`.
pub fn apply_dynamical<T: Real>(b: &DynamicalMatrix<T>, rho: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let d = b.dim;
    check_density_shape(d, rho)?;
    let m = &b.matrix;
    Ok(ComplexMatrix::from_fn(d, d, |r, s| {
        let mut acc = Complex::zero();
        for rp in 0..d {
            let row = m.row(r * d + rp);
            for sp in 0..d {
                acc = acc + row[s * d + sp] * rho[(rp, sp)];
            }
        }
        acc
    }))
}

/// Canonical Kraus operators `K_n = sqrt(lambda_n) mat(e_n)` from the
/// eigenvectors of `B` whose eigenvalue clears the rank cutoff.
pub fn kraus_from_dynamical<T: Real>(b: &DynamicalMatrix<T>, tol: T) -> Result<KrausSet<T>> {
    let eig = hermitian_eig(&b.matrix, tol)?;
    let ops = psd_factors(&eig.values, &eig.vectors, tol)?
        .map(|(weight, v)| ComplexMatrix::mat(&v.iter().map(|z| z * weight).collect::<Vec<_>>(), b.dim))
        .collect::<Result<Vec<_>>>()?;
    if ops.is_empty() {
        return Err(Error::Domain("dynamical matrix is zero; it has no Kraus operators".into()));
    }
    KrausSet::new(ops)
}

/// Yields `(sqrt(mu), vector)` for every eigenpair above the rank cutoff and
/// fails on any eigenvalue below `-tol`.
fn psd_factors<'a, T: Real>(
    values: &'a [T],
    vectors: &'a [Vec<Complex<T>>],
    tol: T,
) -> Result<impl Iterator<Item = (T, &'a Vec<Complex<T>>)> + 'a> {
    if let Some(&low) = values.last() {
        if low < -tol {
            return Err(Error::NotCompletelyPositive {
                eigenvalue: low.to_f64().unwrap_or(f64::NAN),
                tol: tol.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    let largest = values.first().copied().unwrap_or_else(T::zero);
    let cut = tol.max(rank_cutoff(values.len(), largest));
    Ok(values
        .iter()
        .zip(vectors)
        .filter(move |(&mu, _)| mu > cut)
        .map(|(&mu, v)| (mu.sqrt(), v)))
}

/// `B = sum_n vec(K_n) vec(K_n)^dagger`.
pub fn dynamical_from_kraus<T: Real>(ks: &KrausSet<T>) -> DynamicalMatrix<T> {
    let n = ks.dim * ks.dim;
    let mut m = ComplexMatrix::zeros(n, n);
    for k in &ks.operators {
        let v = k.entries();
        for (r, &vr) in v.iter().enumerate() {
            if vr.is_zero() {
                continue;
            }
            for (c, &vc) in v.iter().enumerate() {
                m[(r, c)] = m[(r, c)] + vr * vc.conj();
            }
        }
    }
    DynamicalMatrix { dim: ks.dim, matrix: m }
}

/// `sum_n K_n rho K_n^dagger`.
pub fn apply_kraus<T: Real>(ks: &KrausSet<T>, rho: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    check_density_shape(ks.dim, rho)?;
    let mut out = ComplexMatrix::zeros(ks.dim, ks.dim);
    for k in &ks.operators {
        out = &out + &k.matmul(rho)?.matmul(&k.adjoint())?;
    }
    Ok(out)
}

/// `entries[j] = tr(k lambda_j)` and `conjugate_row[j] = tr(k^dagger lambda_j)`.
pub fn coefficient_vector<T: Real>(k: &ComplexMatrix<T>, basis: &OperatorBasis<T>) -> Result<CoefficientVector<T>> {
    if k.rows() != basis.dim() || k.cols() != basis.dim() {
        return Err(Error::Dimension(format!(
            "operator is {}x{}, basis acts on dimension {}",
            k.rows(),
            k.cols(),
            basis.dim()
        )));
    }
    let kd = k.adjoint();
    let mut entries = Vec::with_capacity(basis.len());
    let mut conjugate_row = Vec::with_capacity(basis.len());
    for lam in basis.elements() {
        entries.push(k.trace_of_product(lam)?);
        conjugate_row.push(kd.trace_of_product(lam)?);
    }
    Ok(CoefficientVector {
        entries,
        conjugate_row,
    })
}

/// `tr(k^T lambda_j)` for every basis element. For real `k` this coincides
/// with the conjugate row of [`coefficient_vector`]; for complex `k` it does not.
pub fn transpose_coefficients<T: Real>(k: &ComplexMatrix<T>, basis: &OperatorBasis<T>) -> Result<Vec<Complex<T>>> {
    let kt = k.transpose();
    basis.elements().iter().map(|lam| crate::basis::trace_coefficient(&kt, lam)).collect()
}

/// Process matrix `chi = sum_n L_n L~_n`, rescaled by `1/t^2` for the
/// orthonormal convention.
pub fn chi_from_kraus<T: Real>(
    ks: &KrausSet<T>,
    basis: &OperatorBasis<T>,
    convention: ChiConvention,
) -> Result<ChiMatrix<T>> {
    let n = basis.len();
    let mut chi = ComplexMatrix::zeros(n, n);
    for k in &ks.operators {
        let cv = coefficient_vector(k, basis)?;
        for (i, &li) in cv.entries.iter().enumerate() {
            if li.is_zero() {
                continue;
            }
            for (j, &lj) in cv.conjugate_row.iter().enumerate() {
                chi[(i, j)] = chi[(i, j)] + li * lj;
            }
        }
    }
    if convention == ChiConvention::Orthonormal {
        let t2 = basis.normalization() * basis.normalization();
        chi = chi.map(|z| z / t2);
    }
    Ok(ChiMatrix {
        dim: ks.dim,
        matrix: chi,
        basis_kind: basis.kind(),
        convention,
    })
}

/// Nonzero entries of a matrix as `(row, col, value)`.
fn support<T: Real>(m: &ComplexMatrix<T>) -> Vec<(usize, usize, Complex<T>)> {
    let d = m.cols();
    m.entries()
        .iter()
        .enumerate()
        .filter(|(_, z)| !z.is_zero())
        .map(|(i, &z)| (i / d, i % d, z))
        .collect()
}

/// `(1/t^2) sum_ij chi[i][j] lambda_i rho lambda_j^dagger` (trace-coefficient)
/// or `sum_ij chi[i][j] lambda_i rho lambda_j^dagger` (orthonormal).
pub fn apply_chi<T: Real>(
    chi: &ChiMatrix<T>,
    basis: &OperatorBasis<T>,
    rho: &ComplexMatrix<T>,
) -> Result<ComplexMatrix<T>> {
    chi.check_basis(basis)?;
    let d = chi.dim;
    check_density_shape(d, rho)?;
    let supports: Vec<_> = basis.elements().iter().map(support).collect();
    let mut out = ComplexMatrix::zeros(d, d);
    for (i, sup_i) in supports.iter().enumerate() {
        // q = sum_j chi[i][j] lambda_j^dagger
        let mut q = ComplexMatrix::zeros(d, d);
        let mut any = false;
        for (j, sup_j) in supports.iter().enumerate() {
            let w = chi.matrix[(i, j)];
            if w.is_zero() {
                continue;
            }
            any = true;
            for &(a, b, v) in sup_j {
                q[(b, a)] = q[(b, a)] + w * v.conj();
            }
        }
        if !any {
            continue;
        }
        // lambda_i rho
        let mut lr = ComplexMatrix::zeros(d, d);
        for &(a, b, v) in sup_i {
            for c in 0..d {
                lr[(a, c)] = lr[(a, c)] + v * rho[(b, c)];
            }
        }
        out = &out + &lr.matmul(&q)?;
    }
    if chi.convention == ChiConvention::TraceCoefficient {
        let t2 = basis.normalization() * basis.normalization();
        out = out.map(|z| z / t2);
    }
    Ok(out)
}

/// Kraus operators from the eigendecomposition of `chi`:
/// `K_n = sqrt(mu_n) sum_i (v_n)_i lambda_i`, divided by `t` in the
/// trace-coefficient convention.
pub fn kraus_from_chi<T: Real>(chi: &ChiMatrix<T>, basis: &OperatorBasis<T>, tol: T) -> Result<KrausSet<T>> {
    chi.check_basis(basis)?;
    let eig = hermitian_eig(&chi.matrix, tol)?;
    let scale = match chi.convention {
        ChiConvention::TraceCoefficient => T::one() / basis.normalization(),
        ChiConvention::Orthonormal => T::one(),
    };
    let d = chi.dim;
    let ops: Vec<_> = psd_factors(&eig.values, &eig.vectors, tol)?
        .map(|(weight, v)| {
            let mut k = ComplexMatrix::zeros(d, d);
            for (coef, lam) in v.iter().zip(basis.elements()) {
                if !coef.is_zero() {
                    k = &k + &lam.scale(coef * (weight * scale));
                }
            }
            k
        })
        .collect();
    if ops.is_empty() {
        return Err(Error::Domain("chi matrix is zero; it has no Kraus operators".into()));
    }
    KrausSet::new(ops)
}

/// Dynamical matrix of the channel described by `chi`.
pub fn dynamical_from_chi<T: Real>(chi: &ChiMatrix<T>, basis: &OperatorBasis<T>, tol: T) -> Result<DynamicalMatrix<T>> {
    Ok(dynamical_from_kraus(&kraus_from_chi(chi, basis, tol)?))
}

/// Process matrix of the channel described by `b`.
pub fn chi_from_dynamical<T: Real>(
    b: &DynamicalMatrix<T>,
    basis: &OperatorBasis<T>,
    convention: ChiConvention,
    tol: T,
) -> Result<ChiMatrix<T>> {
    chi_from_kraus(&kraus_from_dynamical(b, tol)?, basis, convention)
}

pub fn is_trace_preserving<T: Real>(ks: &KrausSet<T>, tol: T) -> bool {
    ks.is_trace_preserving(tol)
}

/// Hermitian within `tol` with no eigenvalue below `-tol`.
pub fn is_completely_positive<T: Real>(b: &DynamicalMatrix<T>, tol: T) -> bool {
    hermitian_eig(&b.matrix, tol)
        .map(|e| e.values.last().is_none_or(|&low| low >= -tol))
        .unwrap_or(false)
}

/// `sum_n ||K_n||_F^2`, which equals `tr(B)`.
pub fn total_weight<T: Real>(ks: &KrausSet<T>) -> T {
    ks.operators.iter().map(ComplexMatrix::frobenius_norm_sqr).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{gell_mann_basis, pauli_tensor_basis};
    use crate::random::{random_density, random_kraus_set, random_matrix, random_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type M = ComplexMatrix<f64>;
    type C = Complex<f64>;

    const TOL: f64 = 1e-9;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn real(rows: &[&[f64]]) -> M {
        M::from_real_rows(rows).unwrap()
    }

    fn m1m2(a1: f64, a2: f64) -> KrausSet<f64> {
        KrausSet::new(vec![real(&[&[a1, 0.0], &[0.0, 0.0]]), real(&[&[0.0, a2], &[0.0, 0.0]])]).unwrap()
    }

    fn l1l2(a1: f64, a2: f64) -> KrausSet<f64> {
        KrausSet::new(vec![real(&[&[a1, 0.0], &[0.0, 0.0]]), real(&[&[0.0, 0.0], &[0.0, a2]])]).unwrap()
    }

    fn identity_channel() -> DynamicalMatrix<f64> {
        let v = M::identity(2).vec().unwrap();
        DynamicalMatrix::new(M::outer(&v, &v)).unwrap()
    }

    fn pauli1() -> OperatorBasis<f64> {
        pauli_tensor_basis(1).unwrap()
    }

    #[test]
    fn identity_dynamical_matrix_is_identity_channel() {
        let b = identity_channel();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rho = random_density(2, &mut rng);
        assert!(apply_dynamical(&b, &rho).unwrap().approx_eq(&rho, 1e-15));
        let zero = DynamicalMatrix::new(M::zeros(4, 4)).unwrap();
        assert_eq!(apply_dynamical(&zero, &rho).unwrap(), M::zeros(2, 2));
        assert!(matches!(apply_dynamical(&b, &M::zeros(3, 3)), Err(Error::Dimension(_))));
    }

    #[test]
    fn reset_channel_through_every_representation() {
        let ks = m1m2(1.0, 1.0);
        assert!(ks.is_trace_preserving(TOL));
        let rho = real(&[&[0.3, 0.2], &[0.2, 0.7]]);
        let reset = real(&[&[1.0, 0.0], &[0.0, 0.0]]);
        assert!(apply_kraus(&ks, &rho).unwrap().approx_eq(&reset, 1e-15));
        let b = dynamical_from_kraus(&ks);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rho = random_density(2, &mut rng);
        assert!(apply_dynamical(&b, &rho).unwrap().approx_eq(&reset, 1e-14));
        let chi = chi_from_kraus(&ks, &pauli1(), ChiConvention::TraceCoefficient).unwrap();
        assert!(apply_chi(&chi, &pauli1(), &rho).unwrap().approx_eq(&reset, 1e-14));
    }

    #[test]
    fn dephasing_kills_coherences() {
        let h = 0.5f64.sqrt();
        let ks = KrausSet::new(vec![M::identity(2).scale_real(h), real(&[&[h, 0.0], &[0.0, -h]])]).unwrap();
        assert!(is_trace_preserving(&ks, TOL));
        let rho = real(&[&[0.5, 0.5], &[0.5, 0.5]]);
        assert!(apply_kraus(&ks, &rho).unwrap().approx_eq(&real(&[&[0.5, 0.0], &[0.0, 0.5]]), 1e-15));
    }

    #[test]
    fn kraus_of_identity_dynamical_matrix() {
        let ks = kraus_from_dynamical(&identity_channel(), TOL).unwrap();
        assert_eq!(ks.len(), 1);
        assert!(ks.operators()[0].approx_eq(&M::identity(2), 1e-14));
    }

    #[test]
    fn negative_spectrum_is_not_cp() {
        let b = DynamicalMatrix::new(M::diagonal(&[c(1.0, 0.0), c(0.5, 0.0), c(0.0, 0.0), c(-0.1, 0.0)])).unwrap();
        assert!(matches!(kraus_from_dynamical(&b, TOL), Err(Error::NotCompletelyPositive { .. })));
        assert!(!is_completely_positive(&b, TOL));
        assert!(is_completely_positive(&identity_channel(), TOL));
    }

    #[test]
    fn dynamical_from_kraus_examples() {
        let b = dynamical_from_kraus(&KrausSet::new(vec![M::identity(2)]).unwrap());
        assert_eq!(b, identity_channel());
        let b = dynamical_from_kraus(&m1m2(1.0, 1.0));
        assert!(b.matrix().is_hermitian(0.0));
        assert_eq!(b.matrix().trace(), c(2.0, 0.0));
        let eig = hermitian_eig(b.matrix(), TOL).unwrap();
        assert_eq!(eig.values.iter().filter(|&&l| l > TOL).count(), 2);
        assert!(eig.values.iter().all(|&l| l >= -TOL));
    }

    #[test]
    fn dynamical_round_trip_on_random_cp_maps() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for trial in 0..100 {
            let d = [2, 4][trial % 2];
            let r = 1 + trial % 3;
            let ks = random_kraus_set(d, r, &mut rng).unwrap();
            let b = dynamical_from_kraus(&ks);
            let back = kraus_from_dynamical(&b, TOL).unwrap();
            assert_eq!(back.len(), r);
            assert!(dynamical_from_kraus(&back).matrix().max_abs_diff(b.matrix()).unwrap() <= 1e-8);
            assert!((b.matrix().trace().re - total_weight(&ks)).abs() <= 1e-10);
        }
    }

    #[test]
    fn coefficient_vector_examples() {
        let a2 = 0.7;
        let cv = coefficient_vector(&real(&[&[0.0, a2], &[0.0, 0.0]]), &pauli1()).unwrap();
        assert_eq!(cv.entries, vec![c(0.0, 0.0), c(a2, 0.0), c(0.0, a2), c(0.0, 0.0)]);
        let cv = coefficient_vector(&M::identity(2), &pauli1()).unwrap();
        assert_eq!(cv.entries, vec![c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(coefficient_vector(&M::identity(3), &pauli1()), Err(Error::Dimension(_))));
    }

    #[test]
    fn conjugate_row_is_conjugate_of_entries() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for trial in 0..100 {
            let (d, basis) = if trial % 2 == 0 {
                (4, pauli_tensor_basis::<f64>(2).unwrap())
            } else {
                (3, gell_mann_basis(3).unwrap())
            };
            let k = random_matrix(d, &mut rng);
            let cv = coefficient_vector(&k, &basis).unwrap();
            for (e, r) in cv.entries.iter().zip(&cv.conjugate_row) {
                assert!((e.conj() - r).norm() < 1e-12);
            }
            // The transpose form agrees only for real operators.
            let kr = k.map(|z| c(z.re, 0.0));
            let cvr = coefficient_vector(&kr, &basis).unwrap();
            let tr = transpose_coefficients(&kr, &basis).unwrap();
            for (a, b) in cvr.conjugate_row.iter().zip(&tr) {
                assert!((a - b).norm() < 1e-12);
            }
        }
        // i E_01: tr(K sigma_y) = -1 but tr(K^T sigma_y) = +1.
        let k = M::single_entry(2, 2, 0, 1, c(0.0, 1.0));
        let cv = coefficient_vector(&k, &pauli1()).unwrap();
        let tr = transpose_coefficients(&k, &pauli1()).unwrap();
        assert_eq!(cv.entries[2], c(-1.0, 0.0));
        assert_eq!(cv.conjugate_row[2], c(-1.0, 0.0));
        assert_eq!(tr[2], c(1.0, 0.0));
    }

    fn chi1(a1: f64, a2: f64) -> M {
        let (p, q) = (a1 * a1, a2 * a2);
        M::from_rows(&[
            vec![c(p, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(p, 0.0)],
            vec![c(0.0, 0.0), c(q, 0.0), c(0.0, -q), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, q), c(q, 0.0), c(0.0, 0.0)],
            vec![c(p, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(p, 0.0)],
        ])
        .unwrap()
    }

    fn chi2(a1: f64, a2: f64) -> M {
        let (s, t) = (a1 * a1 + a2 * a2, a1 * a1 - a2 * a2);
        let mut m = M::zeros(4, 4);
        m[(0, 0)] = c(s, 0.0);
        m[(3, 3)] = c(s, 0.0);
        m[(0, 3)] = c(t, 0.0);
        m[(3, 0)] = c(t, 0.0);
        m
    }

    #[test]
    fn worked_examples_match_printed_chi() {
        for (a1, a2) in [(2.0, 3.0), (1.0, 1.0), (0.8, 0.6)] {
            let x1 = chi_from_kraus(&m1m2(a1, a2), &pauli1(), ChiConvention::TraceCoefficient).unwrap();
            assert!(x1.matrix().approx_eq(&chi1(a1, a2), 1e-12));
            let x2 = chi_from_kraus(&l1l2(a1, a2), &pauli1(), ChiConvention::TraceCoefficient).unwrap();
            assert!(x2.matrix().approx_eq(&chi2(a1, a2), 1e-12));
        }
        let xi = chi_from_kraus(&KrausSet::new(vec![M::identity(2)]).unwrap(), &pauli1(), ChiConvention::TraceCoefficient)
            .unwrap();
        let mut want = M::zeros(4, 4);
        want[(0, 0)] = c(4.0, 0.0);
        assert_eq!(xi.matrix(), &want);
    }

    #[test]
    fn conventions_differ_by_t_squared() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for basis in [pauli_tensor_basis::<f64>(2).unwrap(), gell_mann_basis(4).unwrap()] {
            let ks = random_kraus_set(4, 2, &mut rng).unwrap();
            let tc = chi_from_kraus(&ks, &basis, ChiConvention::TraceCoefficient).unwrap();
            let on = chi_from_kraus(&ks, &basis, ChiConvention::Orthonormal).unwrap();
            let t2 = basis.normalization().powi(2);
            assert_eq!(on.matrix().scale_real(t2), *tc.matrix());
            assert_eq!(tc.to_convention(ChiConvention::Orthonormal, &basis).unwrap(), on);
            let rho = random_density(4, &mut rng);
            let a = apply_chi(&tc, &basis, &rho).unwrap();
            let b = apply_chi(&on, &basis, &rho).unwrap();
            assert!(a.approx_eq(&b, 1e-12));
        }
    }

    #[test]
    fn apply_chi_rejects_mismatched_basis() {
        let chi = chi_from_kraus(&m1m2(1.0, 1.0), &pauli1(), ChiConvention::TraceCoefficient).unwrap();
        let gm = gell_mann_basis(2).unwrap();
        let rho = M::identity(2).scale_real(0.5);
        assert!(matches!(apply_chi(&chi, &gm, &rho), Err(Error::Convention(_))));
        assert!(matches!(kraus_from_chi(&chi, &pauli_tensor_basis(2).unwrap(), TOL), Err(Error::Convention(_))));
    }

    #[test]
    fn identity_chi_round_trip() {
        let chi = chi_from_kraus(&KrausSet::new(vec![M::identity(2)]).unwrap(), &pauli1(), ChiConvention::TraceCoefficient)
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let rho = random_density(2, &mut rng);
        assert!(apply_chi(&chi, &pauli1(), &rho).unwrap().approx_eq(&rho, 1e-15));
        let ks = kraus_from_chi(&chi, &pauli1(), TOL).unwrap();
        assert_eq!(ks.len(), 1);
        assert!(ks.operators()[0].approx_eq(&M::identity(2), 1e-14));
    }

    #[test]
    fn chi1_round_trip_through_kraus() {
        let chi = chi_from_kraus(&m1m2(1.0, 1.0), &pauli1(), ChiConvention::TraceCoefficient).unwrap();
        let ks = kraus_from_chi(&chi, &pauli1(), TOL).unwrap();
        assert_eq!(ks.len(), 2);
        let back = chi_from_kraus(&ks, &pauli1(), ChiConvention::TraceCoefficient).unwrap();
        assert!(back.matrix().max_abs_diff(chi.matrix()).unwrap() <= 1e-8);
    }

    #[test]
    fn negative_chi_is_not_cp() {
        let chi = ChiMatrix::new(
            M::diagonal(&[c(1.0, 0.0), c(0.2, 0.0), c(0.0, 0.0), c(-0.05, 0.0)]),
            BasisKind::PauliTensor,
            ChiConvention::TraceCoefficient,
        )
        .unwrap();
        assert!(matches!(kraus_from_chi(&chi, &pauli1(), TOL), Err(Error::NotCompletelyPositive { .. })));
    }

    #[test]
    fn trace_preservation_flags() {
        assert!(!m1m2(0.8, 0.6).is_trace_preserving(TOL));
        let s = m1m2(0.8, 0.6);
        assert!((s.tp_defect() - 0.64).abs() < 1e-15);
    }

    #[test]
    fn unitary_mixing_leaves_chi_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let basis = pauli_tensor_basis::<f64>(2).unwrap();
        for r in 1..=3 {
            let ks = random_kraus_set(4, r, &mut rng).unwrap();
            let u = random_unitary(r, &mut rng);
            let mixed = ks.mix(&u).unwrap();
            let a = chi_from_kraus(&ks, &basis, ChiConvention::TraceCoefficient).unwrap();
            let b = chi_from_kraus(&mixed, &basis, ChiConvention::TraceCoefficient).unwrap();
            assert!(a.matrix().max_abs_diff(b.matrix()).unwrap() <= 1e-9);
        }
    }

    #[test]
    fn chi_is_hermitian_psd() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let basis = pauli_tensor_basis(2).unwrap();
        for _ in 0..20 {
            let ops = (0..2).map(|_| random_matrix(4, &mut rng)).collect();
            let ks = KrausSet::new(ops).unwrap();
            let chi = chi_from_kraus(&ks, &basis, ChiConvention::TraceCoefficient).unwrap();
            assert!(chi.matrix().is_hermitian(1e-12));
            let eig = hermitian_eig(chi.matrix(), 1e-9).unwrap();
            assert!(*eig.values.last().unwrap() >= -1e-9);
        }
    }

    #[test]
    fn shape_validation() {
        assert!(KrausSet::<f64>::new(vec![]).is_err());
        assert!(KrausSet::new(vec![M::identity(2), M::identity(3)]).is_err());
        assert!(DynamicalMatrix::new(M::zeros(3, 3)).is_err());
        assert!(ChiMatrix::new(M::zeros(5, 5), BasisKind::GellMann, ChiConvention::Orthonormal).is_err());
    }
}
