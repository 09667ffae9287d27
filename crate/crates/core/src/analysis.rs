//! Sparsity, rank and distinct-entry statistics of matrices and channels.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::basis::OperatorBasis;
use crate::channel::KrausSet;
use crate::eigen::numerical_rank;
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparsityReport<T> {
    /// Entries with modulus above the tolerance.
    pub nnz: usize,
    pub rank: usize,
    /// Matrix dimension (rows; the matrices analyzed here are square).
    pub dim: usize,
    /// Distinct nonzero absolute values after tolerance clustering.
    pub distinct_nonzero_abs: usize,
    /// Cluster representatives in ascending order, zero excluded.
    pub distinct_abs_values: Vec<T>,
    /// Distinct count when zero is counted as a value of its own.
    pub includes_zero_variant: usize,
}

impl<T: Real> SparsityReport<T> {
    /// Two-column text table.
    pub fn render(&self) -> String {
        let vals: Vec<String> = self.distinct_abs_values.iter().map(|v| format!("{v:.6}")).collect();
        let rows = [
            ("dimension", self.dim.to_string()),
            ("nonzero entries", self.nnz.to_string()),
            ("rank", self.rank.to_string()),
            ("distinct nonzero abs values", self.distinct_nonzero_abs.to_string()),
            ("distinct abs values incl. zero", self.includes_zero_variant.to_string()),
            ("values", format!("[{}]", vals.join(", "))),
        ];
        rows.iter().map(|(k, v)| format!("{k:<32}{v}\n")).collect()
    }
}

/// Result of [`distinct_abs_entries`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistinctValues<T> {
    pub count: usize,
    /// Smallest member of every cluster, ascending.
    pub values: Vec<T>,
}

pub fn sparsity_report<T: Real>(m: &ComplexMatrix<T>, tol: T) -> SparsityReport<T> {
    let nonzero = distinct_abs_entries(m, tol, false);
    let with_zero = distinct_abs_entries(m, tol, true);
    SparsityReport {
        nnz: m.count_nonzero(tol),
        rank: numerical_rank(m, tol),
        dim: m.rows(),
        distinct_nonzero_abs: nonzero.count,
        distinct_abs_values: nonzero.values,
        includes_zero_variant: with_zero.count,
    }
}

/// Counts the distinct absolute values among the entries of `m`.
///
/// Moduli at or below `tol` are zeros and are skipped unless `include_zero`.
/// The remaining moduli are sorted and swept once: a value opens a new cluster
/// when it exceeds the current cluster's first value by more than `tol`.
pub fn distinct_abs_entries<T: Real>(m: &ComplexMatrix<T>, tol: T, include_zero: bool) -> DistinctValues<T> {
    let mut mags: Vec<T> = m.entries().iter().map(|z| z.norm()).collect();
    mags.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let zeros = mags.iter().take_while(|&&x| x <= tol).count();
    let mut values = Vec::new();
    if include_zero && zeros > 0 {
        values.push(T::zero());
    }
    let mut rep: Option<T> = None;
    for &x in &mags[zeros..] {
        if rep.is_none_or(|r| x - r > tol) {
            rep = Some(x);
            values.push(x);
        }
    }
    DistinctValues {
        count: values.len(),
        values,
    }
}

/// Same count as [`distinct_abs_entries`] without allocating the value list
/// twice; returns `(nonzero_count, has_zero)`.
pub(crate) fn distinct_abs_count<T: Real>(entries: &[Complex<T>], tol: T, scratch: &mut Vec<T>) -> (usize, bool) {
    scratch.clear();
    scratch.extend(entries.iter().map(|z| z.norm()));
    scratch.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let zeros = scratch.iter().take_while(|&&x| x <= tol).count();
    let mut count = 0;
    let mut rep: Option<T> = None;
    for &x in &scratch[zeros..] {
        if rep.is_none_or(|r| x - r > tol) {
            rep = Some(x);
            count += 1;
        }
    }
    (count, zeros > 0)
}

/// Probability that exactly one of the `d` entries picked out by a Pauli
/// tensor is nonzero, when each of the `d^2` entries is nonzero with
/// probability `r / d^2`: `d (1 - r/d^2)^(d-1) (r/d^2)`.
pub fn single_contributor_probability<T: Real>(d: usize, r: usize) -> Result<T> {
    if d == 0 {
        return Err(Error::Domain("dimension must be positive".into()));
    }
    let d2 = d * d;
    if r > d2 {
        return Err(Error::Domain(format!("r = {r} exceeds d^2 = {d2}")));
    }
    let p = T::from_usize(r).unwrap() / T::from_usize(d2).unwrap();
    Ok(T::from_usize(d).unwrap() * (T::one() - p).powi(d as i32 - 1) * p)
}

/// Reference bound `r^2` on the number of distinct process-matrix entries
/// for a rank-`r` map.
pub fn distinct_entry_bound(r: usize) -> usize {
    r * r
}

/// Distinct nonzero trace coefficients `tr(K_n lambda_i)` over every operator
/// and basis element. Values within `tol` (max of real/imag distance) of an
/// earlier value are merged into it; the result is sorted by `(re, im)`.
pub fn trace_value_set<T: Real>(ks: &KrausSet<T>, basis: &OperatorBasis<T>, tol: T) -> Result<Vec<Complex<T>>> {
    let mut set: Vec<Complex<T>> = Vec::new();
    for k in ks.operators() {
        for lam in basis.elements() {
            let v = crate::basis::trace_coefficient(k, lam)?;
            if v.norm() <= tol {
                continue;
            }
            if !set.iter().any(|s| (s.re - v.re).abs() <= tol && (s.im - v.im).abs() <= tol) {
                set.push(v);
            }
        }
    }
    set.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
    });
    Ok(set)
}
