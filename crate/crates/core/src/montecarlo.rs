//! Random sparse trace-preserving Kraus ensembles and the distinct-entry
//! histogram experiment.
//!
//! Each realization draws its own RNG substream `(seed, realization index)`,
//! so a run is bit-identical regardless of how realizations are scheduled.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{distinct_abs_count, distinct_entry_bound};
use crate::basis::{BasisKind, OperatorBasis};
use crate::channel::{chi_from_kraus, ChiConvention, KrausSet};
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::random::complex_gaussian;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub dim: usize,
    /// Number of Kraus operators.
    pub rank: usize,
    pub nnz_per_kraus: usize,
    pub realizations: u64,
    pub seed: u64,
    pub tol: f64,
    pub basis_kind: BasisKind,
    pub convention: ChiConvention,
    pub include_zero: bool,
    pub max_rejections_per_draw: u64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            dim: 8,
            rank: 3,
            nnz_per_kraus: 3,
            realizations: 10_000,
            seed: 0,
            tol: 1e-9,
            basis_kind: BasisKind::PauliTensor,
            convention: ChiConvention::TraceCoefficient,
            include_zero: false,
            max_rejections_per_draw: 1_000_000,
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.dim < 2 {
            return bad(format!("dim must be at least 2, got {}", self.dim));
        }
        if self.basis_kind == BasisKind::PauliTensor && !self.dim.is_power_of_two() {
            return bad(format!("Pauli basis needs a power-of-two dim, got {}", self.dim));
        }
        if self.rank == 0 {
            return bad("rank must be at least 1".into());
        }
        if self.nnz_per_kraus == 0 || self.nnz_per_kraus > self.dim * self.dim {
            return bad(format!(
                "nnz_per_kraus must lie in 1..={}, got {}",
                self.dim * self.dim,
                self.nnz_per_kraus
            ));
        }
        if self.realizations == 0 {
            return bad("realizations must be at least 1".into());
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return bad(format!("tol must be positive, got {}", self.tol));
        }
        if self.max_rejections_per_draw == 0 {
            return bad("max_rejections_per_draw must be at least 1".into());
        }
        Ok(())
    }
}

/// RNG for one realization.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// An accepted draw and the number of attempts it took (including itself).
#[derive(Debug, Clone)]
pub struct SparseDraw<T> {
    pub kraus: KrausSet<T>,
    pub attempts: u64,
}

/// Rejection sampler for sparse trace-preserving Kraus sets.
///
/// A draw places `nnz` entries per operator uniformly without replacement and
/// fills them with standard complex Gaussians. It is accepted when
/// `S = sum K^dagger K` is diagonal with a positive diagonal; each operator is
/// then multiplied by `S^{-1/2}` on the right, which rescales columns and
/// keeps the sparsity pattern. `S` is (almost surely) diagonal iff no operator has
/// two entries in one row, and its diagonal is positive iff every
/// column holds an entry of some operator, so the pattern is screened before
/// values are drawn.
#[derive(Debug, Clone, Copy)]
pub struct SparseKrausSampler {
    pub dim: usize,
    pub rank: usize,
    pub nnz: usize,
    pub tol: f64,
    pub max_attempts: u64,
}

struct Entry<T> {
    row: usize,
    col: usize,
    value: Complex<T>,
}

impl SparseKrausSampler {
    pub fn from_config(cfg: &SimulationConfig) -> Self {
        Self {
            dim: cfg.dim,
            rank: cfg.rank,
            nnz: cfg.nnz_per_kraus,
            tol: cfg.tol,
            max_attempts: cfg.max_rejections_per_draw,
        }
    }

    /// Why no draw can ever be accepted, if that is the case.
    pub fn infeasibility(&self) -> Option<String> {
        let (d, r, s) = (self.dim, self.rank, self.nnz);
        if r * s.min(d) < d {
            return Some(format!(
                "sum K^dagger K has rank at most {} < {d}, so no trace-preserving set of \
                 {r} operators with {s} nonzeros exists in dimension {d}",
                r * s.min(d)
            ));
        }
        if s > d {
            return Some(format!(
                "{s} nonzeros in a {d}x{d} operator always share a row, so sum K^dagger K is never diagonal"
            ));
        }
        None
    }

    pub fn sample<T: Real, R: Rng + ?Sized>(&self, rng: &mut R) -> Result<SparseDraw<T>>
    where
        StandardNormal: Distribution<T>,
    {
        if let Some(reason) = self.infeasibility() {
            return Err(Error::EnsembleExhausted {
                realization: 0,
                attempts: 0,
                reason,
            });
        }
        let d = self.dim;
        let tol = T::lit(self.tol);
        let mut row_used = vec![false; d];
        let mut col_hit = vec![false; d];
        let mut positions: Vec<Vec<usize>> = vec![Vec::with_capacity(self.nnz); self.rank];
        for attempt in 1..=self.max_attempts {
            // (1) positions
            col_hit.iter_mut().for_each(|h| *h = false);
            let mut pattern_ok = true;
            for op in positions.iter_mut() {
                op.clear();
                op.extend(sample(rng, d * d, self.nnz));
                row_used.iter_mut().for_each(|u| *u = false);
                for &p in op.iter() {
                    let (row, col) = (p / d, p % d);
                    pattern_ok &= !std::mem::replace(&mut row_used[row], true);
                    col_hit[col] = true;
                }
            }
            if !pattern_ok || col_hit.iter().any(|h| !h) {
                continue;
            }
            // (2) values
            let ops: Vec<Vec<Entry<T>>> = positions
                .iter()
                .map(|op| {
                    op.iter()
                        .map(|&p| Entry {
                            row: p / d,
                            col: p % d,
                            value: complex_gaussian(rng),
                        })
                        .collect()
                })
                .collect();
            // (3) S = sum K^dagger K
            let mut s = ComplexMatrix::<T>::zeros(d, d);
            for op in &ops {
                for a in op {
                    for b in op {
                        if a.row == b.row {
                            s[(a.col, b.col)] = s[(a.col, b.col)] + a.value.conj() * b.value;
                        }
                    }
                }
            }
            // (4) accept only a diagonal S with positive diagonal
            let diagonal = (0..d).all(|j| (0..d).all(|k| j == k || s[(j, k)].norm() <= tol));
            if !diagonal || (0..d).any(|j| s[(j, j)].re <= tol) {
                continue;
            }
            let inv_sqrt: Vec<T> = (0..d).map(|j| T::one() / s[(j, j)].re.sqrt()).collect();
            let mut survived = true;
            let matrices: Vec<ComplexMatrix<T>> = ops
                .iter()
                .map(|op| {
                    let mut k = ComplexMatrix::zeros(d, d);
                    for e in op {
                        let v = e.value * inv_sqrt[e.col];
                        survived &= v.norm() > tol;
                        k[(e.row, e.col)] = v;
                    }
                    k
                })
                .collect();
            if !survived {
                continue;
            }
            return Ok(SparseDraw {
                kraus: KrausSet::new(matrices)?,
                attempts: attempt,
            });
        }
        Err(Error::EnsembleExhausted {
            realization: 0,
            attempts: self.max_attempts,
            reason: format!("no admissible draw within {} attempts", self.max_attempts),
        })
    }
}

/// One trace-preserving Kraus set of `r` operators with `nnz` nonzeros each.
pub fn random_sparse_kraus_set<T: Real, R: Rng + ?Sized>(
    d: usize,
    r: usize,
    nnz: usize,
    rng: &mut R,
) -> Result<KrausSet<T>>
where
    StandardNormal: Distribution<T>,
{
    let defaults = SimulationConfig::default();
    let sampler = SparseKrausSampler {
        dim: d,
        rank: r,
        nnz,
        tol: defaults.tol,
        max_attempts: defaults.max_rejections_per_draw,
    };
    Ok(sampler.sample(rng)?.kraus)
}

/// How realizations are scheduled. The result does not depend on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    Sequential,
    /// Rayon's global pool.
    #[default]
    Global,
    Threads(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramResult {
    /// distinct count -> frequency, counted per `config_echo.include_zero`.
    pub bins: BTreeMap<usize, u64>,
    /// The same realizations counted with the opposite zero convention.
    pub alternate_bins: BTreeMap<usize, u64>,
    pub realizations_completed: u64,
    /// Accepted draws over total draws.
    pub acceptance_rate: f64,
    pub total_draws: u64,
    /// Most frequent count (smallest on ties).
    pub mode: usize,
    /// `r^2`.
    pub bound: usize,
    /// Share of realizations whose count is at most `bound`.
    pub fraction_within_bound: f64,
    pub config_echo: SimulationConfig,
}

impl HistogramResult {
    pub fn frequency(&self, count: usize) -> u64 {
        self.bins.get(&count).copied().unwrap_or(0)
    }
}

struct Realization {
    count: usize,
    has_zero: bool,
    attempts: u64,
}

fn realize<T: Real>(
    cfg: &SimulationConfig,
    sampler: &SparseKrausSampler,
    basis: &OperatorBasis<T>,
    index: u64,
    scratch: &mut Vec<T>,
) -> Result<Realization>
where
    StandardNormal: Distribution<T>,
{
    let mut rng = substream(cfg.seed, index);
    let draw = sampler.sample::<T, _>(&mut rng).map_err(|e| match e {
        Error::EnsembleExhausted { attempts, reason, .. } => Error::EnsembleExhausted {
            realization: index,
            attempts,
            reason,
        },
        other => other,
    })?;
    let chi = chi_from_kraus(&draw.kraus, basis, cfg.convention)?;
    let (count, has_zero) = distinct_abs_count(chi.matrix().entries(), T::lit(cfg.tol), scratch);
    Ok(Realization {
        count,
        has_zero,
        attempts: draw.attempts,
    })
}

/// Runs the experiment in double precision on rayon's global pool.
pub fn run_histogram(cfg: &SimulationConfig) -> Result<HistogramResult> {
    run_histogram_with::<f64>(cfg, Parallelism::Global)
}

pub fn run_histogram_with<T: Real>(cfg: &SimulationConfig, parallelism: Parallelism) -> Result<HistogramResult>
where
    StandardNormal: Distribution<T>,
{
    cfg.validate()?;
    let basis = OperatorBasis::<T>::for_kind(cfg.basis_kind, cfg.dim)?;
    let sampler = SparseKrausSampler::from_config(cfg);
    if let Some(reason) = sampler.infeasibility() {
        return Err(Error::EnsembleExhausted {
            realization: 0,
            attempts: 0,
            reason,
        });
    }
    let one = |i: u64, scratch: &mut Vec<T>| realize(cfg, &sampler, &basis, i, scratch);
    let outcomes: Vec<Result<Realization>> = match parallelism {
        Parallelism::Sequential => {
            let mut scratch = Vec::new();
            (0..cfg.realizations).map(|i| one(i, &mut scratch)).collect()
        }
        Parallelism::Global => (0..cfg.realizations)
            .into_par_iter()
            .map_init(Vec::new, |scratch, i| one(i, scratch))
            .collect(),
        Parallelism::Threads(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
            pool.install(|| {
                (0..cfg.realizations)
                    .into_par_iter()
                    .map_init(Vec::new, |scratch, i| one(i, scratch))
                    .collect()
            })
        }
    };

    // Merge in index order; the first failing realization wins.
    let mut bins = BTreeMap::new();
    let mut alternate_bins = BTreeMap::new();
    let mut total_draws = 0u64;
    for outcome in outcomes {
        let r = outcome?;
        let (with_zero, without_zero) = (r.count + usize::from(r.has_zero), r.count);
        let (primary, other) = if cfg.include_zero {
            (with_zero, without_zero)
        } else {
            (without_zero, with_zero)
        };
        *bins.entry(primary).or_insert(0) += 1;
        *alternate_bins.entry(other).or_insert(0) += 1;
        total_draws += r.attempts;
    }
    let mode = bins
        .iter()
        .fold((0usize, 0u64), |best, (&k, &f)| if f > best.1 { (k, f) } else { best })
        .0;
    let bound = distinct_entry_bound(cfg.rank);
    let within: u64 = bins.range(..=bound).map(|(_, f)| f).sum();
    Ok(HistogramResult {
        bins,
        alternate_bins,
        realizations_completed: cfg.realizations,
        acceptance_rate: cfg.realizations as f64 / total_draws as f64,
        total_draws,
        mode,
        bound,
        fraction_within_bound: within as f64 / cfg.realizations as f64,
        config_echo: cfg.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Json,
    Svg,
}

impl std::str::FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            "svg" => Ok(Self::Svg),
            other => Err(Error::Format(format!("unsupported histogram format '{other}' (csv, json, svg)"))),
        }
    }
}

pub fn export_histogram(h: &HistogramResult, format: ExportFormat) -> Result<Vec<u8>> {
    if h.bins.is_empty() || h.realizations_completed == 0 {
        return Err(Error::Format("histogram has no realizations".into()));
    }
    match format {
        ExportFormat::Csv => {
            let mut out = String::from("distinct_count,frequency\n");
            for (k, f) in &h.bins {
                writeln!(out, "{k},{f}").unwrap();
            }
            Ok(out.into_bytes())
        }
        ExportFormat::Json => {
            let mut bytes = serde_json::to_vec_pretty(h).map_err(|e| Error::Format(e.to_string()))?;
            bytes.push(b'\n');
            Ok(bytes)
        }
        ExportFormat::Svg => Ok(render_svg(h).into_bytes()),
    }
}

pub fn import_histogram_json(bytes: &[u8]) -> Result<HistogramResult> {
    serde_json::from_slice(bytes).map_err(|e| Error::Format(e.to_string()))
}

fn render_svg(h: &HistogramResult) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const LEFT: f64 = 70.0;
    const RIGHT: f64 = 20.0;
    const TOP: f64 = 40.0;
    const BOTTOM: f64 = 50.0;

    let lo = *h.bins.keys().next().unwrap();
    let hi = (*h.bins.keys().next_back().unwrap()).max(h.bound);
    let lo = lo.min(h.bound);
    let slots = (hi - lo + 1) as f64;
    let slot_w = (W - LEFT - RIGHT) / slots;
    let fmax = *h.bins.values().max().unwrap() as f64;
    let plot_h = H - TOP - BOTTOM;
    let x_of = |k: usize| LEFT + (k - lo) as f64 * slot_w;

    let cfg = &h.config_echo;
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">d = {}, rank = {}, nnz = {}, {} realizations</text>"#,
        W / 2.0,
        cfg.dim,
        cfg.rank,
        cfg.nnz_per_kraus,
        h.realizations_completed
    )
    .unwrap();
    for (&k, &f) in &h.bins {
        let bh = f as f64 / fmax * plot_h;
        writeln!(
            s,
            r#"<rect class="bar" x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="steelblue"><title>{k}: {f}</title></rect>"#,
            x_of(k) + 0.1 * slot_w,
            TOP + plot_h - bh,
            0.8 * slot_w,
            bh
        )
        .unwrap();
    }
    let bx = x_of(h.bound) + 0.5 * slot_w;
    writeln!(
        s,
        r#"<line class="bound" x1="{bx:.2}" y1="{TOP}" x2="{bx:.2}" y2="{:.2}" stroke="crimson" stroke-width="2" stroke-dasharray="6 4"/>"#,
        TOP + plot_h
    )
    .unwrap();
    writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" fill="crimson">r² = {}</text>"#,
        bx + 4.0,
        TOP + 14.0,
        h.bound
    )
    .unwrap();
    // axes
    writeln!(
        s,
        r#"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="black"/>"#,
        W - RIGHT,
        y = TOP + plot_h
    )
    .unwrap();
    writeln!(s, r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{:.2}" stroke="black"/>"#, TOP + plot_h).unwrap();
    let step = ((slots / 20.0).ceil() as usize).max(1);
    for k in (lo..=hi).step_by(step) {
        writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{k}</text>"#,
            x_of(k) + 0.5 * slot_w,
            TOP + plot_h + 16.0
        )
        .unwrap();
    }
    writeln!(s, r#"<text x="{LEFT}" y="{:.2}" text-anchor="end" dx="-6">{}</text>"#, TOP + 4.0, fmax as u64).unwrap();
    writeln!(s, r#"<text x="{LEFT}" y="{:.2}" text-anchor="end" dx="-6">0</text>"#, TOP + plot_h).unwrap();
    writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">distinct |chi| entries</text>"#,
        LEFT + (W - LEFT - RIGHT) / 2.0,
        H - 12.0
    )
    .unwrap();
    writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">frequency</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    )
    .unwrap();
    s.push_str("</svg>\n");
    s
}
