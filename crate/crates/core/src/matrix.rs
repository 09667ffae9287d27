//! Dense complex matrices and the row-major `vec`/`mat` reshaping pair.
//!
//! Everything in the crate (density matrices, Kraus operators, dynamical
//! matrices, process matrices, basis elements) is carried by
//! [`ComplexMatrix`]. Entries are stored row-major, and `vec` stacks rows so
//! that element `r * d + c` of `vec(m)` is `m[(r, c)]`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix<T> {
    rows: usize,
    cols: usize,
    entries: Vec<Complex<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex<T>>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            entries: vec![Complex::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                entries.push(f(r, c));
            }
        }
        Self {
            rows,
            cols,
            entries,
        }
    }

    /// Builds a matrix from nested rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<Complex<T>>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::new(n_rows, n_cols, rows.concat())
    }

    /// Builds a matrix from nested rows of real numbers.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<Complex<T>>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex::new(T::lit(x), T::zero())).collect())
            .collect();
        Self::from_rows(&rows)
    }

    /// Diagonal matrix with the given entries.
    pub fn diagonal(diag: &[Complex<T>]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// Matrix with a single nonzero `value` at `(row, col)`.
    pub fn single_entry(rows: usize, cols: usize, row: usize, col: usize, value: Complex<T>) -> Self {
        let mut m = Self::zeros(rows, cols);
        m[(row, col)] = value;
        m
    }

    /// `u v^dagger` for two column vectors.
    pub fn outer(u: &[Complex<T>], v: &[Complex<T>]) -> Self {
        Self::from_fn(u.len(), v.len(), |r, c| u[r] * v[c].conj())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    #[inline]
    pub fn entries(&self) -> &[Complex<T>] {
        &self.entries
    }

    #[inline]
    pub fn entries_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.entries
    }

    pub fn into_entries(self) -> Vec<Complex<T>> {
        self.entries
    }

    pub fn row(&self, r: usize) -> &[Complex<T>] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Complex<T>> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.map(|z| z * s)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Matrix product; fails on inner dimension mismatch.
    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            let out_row = &mut out.entries[r * rhs.cols..(r + 1) * rhs.cols];
            for (k, &a) in self.row(r).iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(rhs.row(k)) {
                    *o = *o + a * b;
                }
            }
        }
        Ok(out)
    }

    /// `tr(self * rhs)` without forming the product.
    pub fn trace_of_product(&self, rhs: &Self) -> Result<Complex<T>> {
        if self.cols != rhs.rows || self.rows != rhs.cols {
            return Err(Error::Dimension(format!(
                "trace of product needs transposed shapes, got {}x{} and {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut acc = Complex::zero();
        for r in 0..self.rows {
            for (c, &a) in self.row(r).iter().enumerate() {
                if !a.is_zero() {
                    acc = acc + a * rhs[(c, r)];
                }
            }
        }
        Ok(acc)
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &Self) -> Self {
        Self::from_fn(self.rows * rhs.rows, self.cols * rhs.cols, |r, c| {
            self[(r / rhs.rows, c / rhs.cols)] * rhs[(r % rhs.rows, c % rhs.cols)]
        })
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "shape mismatch: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        self.check_same_shape(other)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), T::max))
    }

    /// Tolerance-parameterized equality in the max norm.
    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        self.max_abs_diff(other).is_ok_and(|d| d <= tol)
    }

    pub fn max_abs(&self) -> T {
        self.entries.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    pub fn frobenius_norm_sqr(&self) -> T {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `max |m - m^dagger|`; `None` for non-square matrices.
    pub fn hermitian_deviation(&self) -> Option<T> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut dev = T::zero();
        for r in 0..n {
            for c in r..n {
                dev = dev.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        Some(dev)
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.hermitian_deviation().is_some_and(|d| d <= tol)
    }

    /// Number of entries with modulus above `tol`.
    pub fn count_nonzero(&self, tol: T) -> usize {
        self.entries.iter().filter(|z| z.norm() > tol).count()
    }

    /// Row-major stacking into a vector of length `rows * cols`.
    pub fn vec(&self) -> Result<Vec<Complex<T>>> {
        if !self.is_square() {
            return Err(Error::Dimension(format!(
                "vec expects a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        Ok(self.entries.clone())
    }

    /// Inverse of [`ComplexMatrix::vec`]: fills a `d x d` matrix row by row.
    pub fn mat(v: &[Complex<T>], d: usize) -> Result<Self> {
        if d == 0 || v.len() != d * d {
            return Err(Error::Dimension(format!(
                "mat needs a vector of length {}^2 = {}, got {}",
                d,
                d * d,
                v.len()
            )));
        }
        Ok(Self {
            rows: d,
            cols: d,
            entries: v.to_vec(),
        })
    }

    /// Converts the scalar type, e.g. `f64` to `f32`.
    pub fn cast<U: Real>(&self) -> ComplexMatrix<U> {
        let conv = |x: T| U::from_f64(x.to_f64().unwrap_or(f64::NAN)).unwrap_or_else(U::nan);
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .map(|z| Complex::new(conv(z.re), conv(z.im)))
                .collect(),
        }
    }
}

/// Free-function form of [`ComplexMatrix::vec`].
pub fn vec<T: Real>(m: &ComplexMatrix<T>) -> Result<Vec<Complex<T>>> {
    m.vec()
}

/// Free-function form of [`ComplexMatrix::mat`].
pub fn mat<T: Real>(v: &[Complex<T>], d: usize) -> Result<ComplexMatrix<T>> {
    ComplexMatrix::mat(v, d)
}

impl<T> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Complex<T> {
        debug_assert!(r < self.rows && c < self.cols);
        &self.entries[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex<T> {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.entries[r * self.cols + c]
    }
}

// The arithmetic operators panic on shape mismatch like slice indexing does;
// use `matmul` and `max_abs_diff` for fallible variants.

impl<T: Real> Add for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn add(self, rhs: Self) -> ComplexMatrix<T> {
        self.check_same_shape(rhs).expect("matrix addition");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<T: Real> Sub for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn sub(self, rhs: Self) -> ComplexMatrix<T> {
        self.check_same_shape(rhs).expect("matrix subtraction");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<T: Real> Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;

    fn mul(self, rhs: Self) -> ComplexMatrix<T> {
        self.matmul(rhs).expect("matrix product")
    }
}

impl<T: fmt::Debug> fmt::Debug for ComplexMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for row in self.entries.chunks(self.cols) {
            write!(f, "  ")?;
            for z in row {
                write!(f, "({:?}, {:?}) ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

// JSON schema: {"rows": R, "cols": C, "entries": [[re, im], ...]} row-major.

#[derive(Serialize, Deserialize)]
struct MatrixRepr<T> {
    rows: usize,
    cols: usize,
    entries: Vec<[T; 2]>,
}

impl<T: Real + Serialize> Serialize for ComplexMatrix<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixRepr {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de, T: Real + Deserialize<'de>> Deserialize<'de> for ComplexMatrix<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = MatrixRepr::<T>::deserialize(deserializer)?;
        let entries = repr.entries.into_iter().map(|[re, im]| Complex::new(re, im)).collect();
        ComplexMatrix::new(repr.rows, repr.cols, entries).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type C = Complex<f64>;

    fn c(re: f64, im: f64) -> C {
        Complex::new(re, im)
    }

    #[test]
    fn vec_stacks_rows() {
        let (a, b, cc, d) = (c(1.0, 0.5), c(2.0, 0.0), c(0.0, -3.0), c(4.0, 1.0));
        let m = ComplexMatrix::from_rows(&[vec![a, b], vec![cc, d]]).unwrap();
        assert_eq!(m.vec().unwrap(), vec![a, b, cc, d]);
        let id = ComplexMatrix::<f64>::identity(2);
        assert_eq!(id.vec().unwrap(), vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn mat_fills_rows_of_length_d() {
        let v = vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)];
        let m = mat(&v, 2).unwrap();
        assert_eq!(m[(0, 1)], c(2.0, 0.0));
        assert_eq!(m[(1, 0)], c(3.0, 0.0));
        let id = mat(&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], 2).unwrap();
        assert_eq!(id, ComplexMatrix::identity(2));
    }

    #[test]
    fn vec_rejects_non_square_and_mat_rejects_bad_length() {
        let m = ComplexMatrix::<f64>::zeros(2, 3);
        assert!(matches!(m.vec(), Err(Error::Dimension(_))));
        assert!(matches!(mat(&[c(1.0, 0.0); 5], 2), Err(Error::Dimension(_))));
        assert!(matches!(mat::<f64>(&[], 0), Err(Error::Dimension(_))));
    }

    #[test]
    fn trace_of_product_matches_full_product() {
        let a = ComplexMatrix::from_fn(3, 3, |r, cc| c(r as f64 + 1.0, cc as f64 - 1.0));
        let b = ComplexMatrix::from_fn(3, 3, |r, cc| c((r * cc) as f64, 0.5));
        let full = a.matmul(&b).unwrap().trace();
        assert!((a.trace_of_product(&b).unwrap() - full).norm() < 1e-12);
    }

    #[test]
    fn kron_of_identities() {
        let i2 = ComplexMatrix::<f64>::identity(2);
        assert_eq!(i2.kron(&i2), ComplexMatrix::identity(4));
    }

    #[test]
    fn json_round_trip() {
        let m = ComplexMatrix::from_fn(2, 3, |r, cc| c(r as f64, -(cc as f64)));
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"rows":2,"cols":3,"entries":[[0.0,-0.0],[0.0,-1.0],[0.0,-2.0],[1.0,-0.0],[1.0,-1.0],[1.0,-2.0]]}"#);
        let back: ComplexMatrix<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        let bad = r#"{"rows":2,"cols":2,"entries":[[1.0,0.0]]}"#;
        assert!(serde_json::from_str::<ComplexMatrix<f64>>(bad).is_err());
    }

    fn arb_complex() -> impl Strategy<Value = C> {
        (-10.0..10.0f64, -10.0..10.0f64).prop_map(|(re, im)| c(re, im))
    }

    proptest! {
        #[test]
        fn vec_mat_are_exact_inverses(d in 1usize..6, seed in proptest::collection::vec(arb_complex(), 25)) {
            let v: Vec<C> = seed.into_iter().take(d * d).collect();
            let m = mat(&v, d).unwrap();
            prop_assert_eq!(m.vec().unwrap(), v.clone());
            prop_assert_eq!(mat(&m.vec().unwrap(), d).unwrap(), m);
        }
    }
}
