//! Operator bases for the process matrix: n-fold Pauli tensor products and
//! generalized Gell-Mann (SU(d) generator) sets.
//!
//! Every basis here is Hermitian and trace-orthogonal with a common
//! normalization `t`, i.e. `tr(lambda_i^dagger lambda_j) = t * delta_ij`.

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::scalar::Real;

/// Largest number of basis elements (`d^2`) built unless the caller raises it.
pub const DEFAULT_MAX_ELEMENTS: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKind {
    #[serde(rename = "pauli")]
    PauliTensor,
    #[serde(rename = "gellmann")]
    GellMann,
}

impl std::fmt::Display for BasisKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BasisKind::PauliTensor => "pauli",
            BasisKind::GellMann => "gellmann",
        })
    }
}

impl BasisKind {
    /// Pauli tensors when `d` is a power of two, Gell-Mann otherwise.
    pub fn default_for(d: usize) -> Self {
        if d >= 2 && d.is_power_of_two() {
            BasisKind::PauliTensor
        } else {
            BasisKind::GellMann
        }
    }
}

/// Ordered, trace-orthogonal operator basis of `d x d` matrices.
#[derive(Debug, Clone)]
pub struct OperatorBasis<T> {
    dim: usize,
    elements: Vec<ComplexMatrix<T>>,
    kind: BasisKind,
    normalization: T,
}

impl<T: Real> OperatorBasis<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[ComplexMatrix<T>] {
        &self.elements
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    /// The `t` in `tr(lambda_i^dagger lambda_j) = t * delta_ij`.
    pub fn normalization(&self) -> T {
        self.normalization
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// `G[i][j] = tr(lambda_i^dagger lambda_j)`.
    pub fn gram(&self) -> ComplexMatrix<T> {
        let adj: Vec<_> = self.elements.iter().map(ComplexMatrix::adjoint).collect();
        let n = self.len();
        ComplexMatrix::from_fn(n, n, |i, j| {
            adj[i].trace_of_product(&self.elements[j]).expect("basis elements share a shape")
        })
    }

    /// Builds the basis named by `kind` for dimension `d`.
    pub fn for_kind(kind: BasisKind, d: usize) -> Result<Self> {
        match kind {
            BasisKind::PauliTensor => {
                if d < 2 || !d.is_power_of_two() {
                    return Err(Error::Dimension(format!(
                        "Pauli tensor basis needs a power-of-two dimension, got {d}"
                    )));
                }
                pauli_tensor_basis(d.trailing_zeros() as usize)
            }
            BasisKind::GellMann => gell_mann_basis(d),
        }
    }
}

fn re<T: Real>(x: f64) -> Complex<T> {
    Complex::new(T::lit(x), T::zero())
}

/// Single-qubit Paulis in the order I, X, Y, Z.
pub fn paulis<T: Real>() -> [ComplexMatrix<T>; 4] {
    let (o, z, i) = (Complex::<T>::one(), Complex::<T>::zero(), Complex::<T>::i());
    let m = |e: [Complex<T>; 4]| ComplexMatrix::new(2, 2, e.to_vec()).expect("2x2");
    [
        m([o, z, z, o]),
        m([z, o, o, z]),
        m([z, -i, i, z]),
        m([o, z, z, -o]),
    ]
}

/// All `4^n` n-fold tensor products of I, X, Y, Z.
///
/// Element `k` is `sigma_{k_0} ⊗ ... ⊗ sigma_{k_{n-1}}` where `k_0 k_1 ...`
/// are the base-4 digits of `k`, most significant first (I=0, X=1, Y=2, Z=3).
pub fn pauli_tensor_basis<T: Real>(n_qubits: usize) -> Result<OperatorBasis<T>> {
    pauli_tensor_basis_capped(n_qubits, DEFAULT_MAX_ELEMENTS)
}

pub fn pauli_tensor_basis_capped<T: Real>(n_qubits: usize, max_elements: usize) -> Result<OperatorBasis<T>> {
    if n_qubits == 0 {
        return Err(Error::Dimension("Pauli tensor basis needs at least one qubit".into()));
    }
    let requested = 4usize
        .checked_pow(n_qubits as u32)
        .ok_or(Error::SizeCap { requested: usize::MAX, cap: max_elements })?;
    if requested > max_elements {
        return Err(Error::SizeCap { requested, cap: max_elements });
    }
    let single = paulis::<T>();
    let mut elements = vec![ComplexMatrix::<T>::identity(1)];
    for _ in 0..n_qubits {
        elements = elements
            .iter()
            .flat_map(|prefix| single.iter().map(move |p| prefix.kron(p)))
            .collect();
    }
    let d = 1usize << n_qubits;
    Ok(OperatorBasis {
        dim: d,
        elements,
        kind: BasisKind::PauliTensor,
        normalization: T::from_usize(d).expect("dimension fits"),
    })
}

/// Generalized Gell-Mann basis for dimension `d`: `sqrt(2/d) I` followed by
/// the `d^2 - 1` SU(d) generators, all with `tr(lambda_i lambda_j) = 2 delta_ij`.
///
/// Generators are ordered as in the standard SU(3) convention: for each
/// `k = 1..d`, the symmetric and antisymmetric pair for every `j < k`, then
/// the diagonal generator `diag(1, .., 1, -k, 0, ..) * sqrt(2 / (k (k + 1)))`.
/// At `d = 2` this is exactly I, X, Y, Z.
pub fn gell_mann_basis<T: Real>(d: usize) -> Result<OperatorBasis<T>> {
    if d < 2 {
        return Err(Error::Dimension(format!("Gell-Mann basis needs d >= 2, got {d}")));
    }
    if d * d > DEFAULT_MAX_ELEMENTS {
        return Err(Error::SizeCap { requested: d * d, cap: DEFAULT_MAX_ELEMENTS });
    }
    let mut elements = Vec::with_capacity(d * d);
    elements.push(ComplexMatrix::identity(d).scale_real((T::lit(2.0) / T::from_usize(d).unwrap()).sqrt()));
    let i = Complex::<T>::i();
    for k in 1..d {
        for j in 0..k {
            let mut sym = ComplexMatrix::zeros(d, d);
            sym[(j, k)] = Complex::one();
            sym[(k, j)] = Complex::one();
            elements.push(sym);
            let mut anti = ComplexMatrix::zeros(d, d);
            anti[(j, k)] = -i;
            anti[(k, j)] = i;
            elements.push(anti);
        }
        let kf = k as f64;
        let norm = (2.0 / (kf * (kf + 1.0))).sqrt();
        let mut diag = ComplexMatrix::zeros(d, d);
        for l in 0..k {
            diag[(l, l)] = re(norm);
        }
        diag[(k, k)] = re(-kf * norm);
        elements.push(diag);
    }
    Ok(OperatorBasis {
        dim: d,
        elements,
        kind: BasisKind::GellMann,
        normalization: T::lit(2.0),
    })
}

/// `tr(k * lambda)`.
pub fn trace_coefficient<T: Real>(k: &ComplexMatrix<T>, lambda: &ComplexMatrix<T>) -> Result<Complex<T>> {
    if !k.is_square() || k.rows() != lambda.rows() || k.cols() != lambda.cols() {
        return Err(Error::Dimension(format!(
            "trace coefficient needs equal square shapes, got {}x{} and {}x{}",
            k.rows(),
            k.cols(),
            lambda.rows(),
            lambda.cols()
        )));
    }
    k.trace_of_product(lambda)
}
