//! Round-trip and representation-equivalence checks for a single channel.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::analysis::{distinct_abs_entries, distinct_entry_bound};
use crate::basis::{BasisKind, OperatorBasis};
use crate::channel::{
    apply_chi, apply_dynamical, apply_kraus, chi_from_kraus, dynamical_from_kraus, kraus_from_chi,
    kraus_from_dynamical, ChiConvention,
};
use crate::document::{Channel, Representation};
use crate::error::Result;
use crate::montecarlo::substream;
use crate::random::random_density;

/// Round trips must land within this distance (max norm).
pub const ROUND_TRIP_TOL: f64 = 1e-8;
/// The three actions on a density matrix must agree within this distance.
pub const EQUIVALENCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub representation: Representation,
    pub dim: usize,
    pub kraus_rank: usize,
    pub trace_preserving: bool,
    pub tp_defect: f64,
    pub completely_positive: bool,
    pub dynamical_round_trip_error: f64,
    pub chi_round_trip_error: f64,
    pub max_equivalence_error: f64,
    pub states_checked: usize,
    pub chi_basis: BasisKind,
    pub chi_convention: ChiConvention,
    pub distinct_nonzero_abs: usize,
    pub distinct_abs_values: Vec<f64>,
    pub includes_zero_variant: usize,
    pub bound: usize,
    pub passed: bool,
}

impl VerificationReport {
    pub fn render(&self) -> String {
        let mut s = String::new();
        let yn = |b: bool| if b { "yes" } else { "no" };
        writeln!(s, "representation: {:?}", self.representation).unwrap();
        writeln!(s, "dimension: {}", self.dim).unwrap();
        writeln!(s, "kraus rank: {}", self.kraus_rank).unwrap();
        writeln!(s, "trace preserving: {} (defect {:.3e})", yn(self.trace_preserving), self.tp_defect).unwrap();
        writeln!(s, "completely positive: {}", yn(self.completely_positive)).unwrap();
        writeln!(s, "B -> Kraus -> B error: {:.3e}", self.dynamical_round_trip_error).unwrap();
        writeln!(s, "chi -> Kraus -> chi error: {:.3e}", self.chi_round_trip_error).unwrap();
        writeln!(
            s,
            "max disagreement of B / Kraus / chi actions over {} states: {:.3e}",
            self.states_checked, self.max_equivalence_error
        )
        .unwrap();
        writeln!(s, "chi basis: {} ({} convention)", self.chi_basis, self.chi_convention).unwrap();
        writeln!(s, "distinct nonzero abs values: {}", self.distinct_nonzero_abs).unwrap();
        let vals: Vec<String> = self.distinct_abs_values.iter().map(|v| format!("{v:.6}")).collect();
        writeln!(s, "values: [{}]", vals.join(", ")).unwrap();
        writeln!(s, "distinct abs values including zero: {}", self.includes_zero_variant).unwrap();
        writeln!(s, "reference bound r^2: {}", self.bound).unwrap();
        writeln!(s, "result: {}", if self.passed { "PASS" } else { "FAIL" }).unwrap();
        s
    }
}

/// Runs every conversion on `channel` and checks that the three
/// representations act identically on `states` random density matrices.
///
/// The chi side uses the channel's own basis and convention when it is given
/// as chi, otherwise the Pauli basis (or Gell-Mann when `d` is not a power of
/// two) in the trace-coefficient convention.
pub fn verify_channel(channel: &Channel, tol: f64, seed: u64, states: usize) -> Result<VerificationReport> {
    let d = channel.dim();
    let (kind, convention) = match channel {
        Channel::Chi(c) => (c.basis_kind(), c.convention()),
        _ => (BasisKind::default_for(d), ChiConvention::TraceCoefficient),
    };
    let basis = OperatorBasis::<f64>::for_kind(kind, d)?;

    let kraus = channel.to_kraus(tol)?;
    let b = channel.to_dynamical(tol)?;
    let chi = channel.to_chi(kind, convention, tol)?;

    let canonical = kraus_from_dynamical(&b, tol)?;
    let b_back = dynamical_from_kraus(&canonical);
    let dynamical_round_trip_error = b_back.matrix().max_abs_diff(b.matrix())?;
    let chi_back = chi_from_kraus(&kraus_from_chi(&chi, &basis, tol)?, &basis, convention)?;
    let chi_round_trip_error = chi_back.matrix().max_abs_diff(chi.matrix())?;

    let mut rng = substream(seed, 0);
    let mut max_equivalence_error = 0.0f64;
    for _ in 0..states {
        let rho = random_density::<f64, _>(d, &mut rng);
        let via_kraus = apply_kraus(&kraus, &rho)?;
        let via_b = apply_dynamical(&b, &rho)?;
        let via_chi = apply_chi(&chi, &basis, &rho)?;
        max_equivalence_error = max_equivalence_error
            .max(via_kraus.max_abs_diff(&via_b)?)
            .max(via_kraus.max_abs_diff(&via_chi)?)
            .max(via_b.max_abs_diff(&via_chi)?);
    }

    let nonzero = distinct_abs_entries(chi.matrix(), tol, false);
    let with_zero = distinct_abs_entries(chi.matrix(), tol, true);
    let passed = dynamical_round_trip_error <= ROUND_TRIP_TOL
        && chi_round_trip_error <= ROUND_TRIP_TOL
        && max_equivalence_error <= EQUIVALENCE_TOL;
    Ok(VerificationReport {
        representation: channel.representation(),
        dim: d,
        kraus_rank: canonical.len(),
        trace_preserving: kraus.is_trace_preserving(tol),
        tp_defect: kraus.tp_defect(),
        completely_positive: b.is_completely_positive(tol),
        dynamical_round_trip_error,
        chi_round_trip_error,
        max_equivalence_error,
        states_checked: states,
        chi_basis: kind,
        chi_convention: convention,
        distinct_nonzero_abs: nonzero.count,
        distinct_abs_values: nonzero.values,
        includes_zero_variant: with_zero.count,
        bound: distinct_entry_bound(canonical.len()),
        passed,
    })
}
