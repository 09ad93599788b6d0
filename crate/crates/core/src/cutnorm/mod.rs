//! The two cut-type norms.
//!
//! `‖A‖_□` maximizes `|Σ(A[X,Y])| / (mn)` over all index-set pairs, and
//! `‖A‖_⊡` maximizes `|Σ(A[X,Y])| / √(|X||Y|)` over nonempty pairs. Exact
//! evaluation enumerates subsets of the cheaper dimension in reflected
//! Gray order with incremental column sums; rows that repeat (possibly
//! negated — blow-ups and block constructions produce many) collapse into
//! signed multiplicity digits, which shrinks the state space from `2^m` to
//! `Π (p_g + q_g + 1)`. Lower-bound searches (local search, angle grid)
//! are available above the exact limits and are labeled uncertified.

mod exact_complex;
mod exact_real;
mod grouping;
mod heuristic;

use crate::error::{Error, Result};
use crate::matrix::{IndexSet, Matrix};
use crate::report::{matrix_digest, BoundReport, Provenance};
use crate::scalar::{Real, C};
use serde::Serialize;

pub use heuristic::cut_norm_heuristic;

/// Which of the two norms to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    Square,
    Boxdot,
}

/// How a [`CutNormResult`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    Anneal,
    AngleGrid,
}

/// A norm value together with the witness pair achieving it.
#[derive(Debug, Clone)]
pub struct CutNormResult<T: Real> {
    pub value: T,
    pub witness_x: IndexSet,
    pub witness_y: IndexSet,
    pub method: Method,
    /// True only when the method guarantees optimality.
    pub certified: bool,
}

/// Feasibility limits for the exact searches.
#[derive(Debug, Clone)]
pub struct ExactConfig {
    /// Cap on enumerated states for real matrices (after row collapse).
    /// The default `2^22` admits any real matrix with `min(m,n) ≤ 22`.
    pub max_states: u64,
    /// Complex exact search enumerates both sides; cap on `m + n` bits.
    pub complex_max_state_bits: u32,
    /// Complex exact search additionally requires `min(m,n)` at most this.
    pub complex_min_dim: usize,
    /// Rotation count for the angle-grid method.
    pub angle_count: usize,
}

impl Default for ExactConfig {
    fn default() -> Self {
        ExactConfig {
            max_states: 1 << 22,
            complex_max_state_bits: 27,
            complex_min_dim: 13,
            angle_count: 720,
        }
    }
}

impl ExactConfig {
    /// Raise the real-matrix state cap to `2^bits`.
    pub fn with_state_bits(mut self, bits: u32) -> Self {
        self.max_states = 1u64 << bits;
        self
    }
}

/// Exact `‖A‖_□` with a maximizing pair. Refuses inputs over the exact
/// limit, pointing at the heuristic.
pub fn cut_norm_exact<T: Real>(a: &Matrix<T>) -> Result<CutNormResult<T>> {
    cut_norm_exact_with(a, &ExactConfig::default())
}

pub fn cut_norm_exact_with<T: Real>(a: &Matrix<T>, cfg: &ExactConfig) -> Result<CutNormResult<T>> {
    if a.is_real() {
        exact_real::run(a, NormKind::Square, cfg)
    } else {
        exact_complex::run(a, NormKind::Square, cfg)
    }
}

/// Exact `‖A‖_⊡` with a maximizing nonempty pair.
pub fn boxdot_norm_exact<T: Real>(a: &Matrix<T>) -> Result<CutNormResult<T>> {
    boxdot_norm_exact_with(a, &ExactConfig::default())
}

pub fn boxdot_norm_exact_with<T: Real>(
    a: &Matrix<T>,
    cfg: &ExactConfig,
) -> Result<CutNormResult<T>> {
    if a.is_real() {
        exact_real::run(a, NormKind::Boxdot, cfg)
    } else {
        exact_complex::run(a, NormKind::Boxdot, cfg)
    }
}

/// Exact norm by whichever engine applies.
pub fn norm_exact_with<T: Real>(
    a: &Matrix<T>,
    kind: NormKind,
    cfg: &ExactConfig,
) -> Result<CutNormResult<T>> {
    match kind {
        NormKind::Square => cut_norm_exact_with(a, cfg),
        NormKind::Boxdot => boxdot_norm_exact_with(a, cfg),
    }
}

/// Certified-false lower bound via a dense grid of rotations `e^{iθ}`:
/// for each angle the real-part matrix is solved exactly with the real
/// closed form, and the best witness is re-scored on the complex input.
pub fn cut_norm_angle_grid<T: Real>(
    a: &Matrix<T>,
    kind: NormKind,
    cfg: &ExactConfig,
) -> Result<CutNormResult<T>> {
    let angles = cfg.angle_count.max(1);
    let mut best: Option<(T, IndexSet, IndexSet)> = None;
    for k in 0..angles {
        let theta = T::of(2.0 * std::f64::consts::PI) * T::from_usize(k).unwrap()
            / T::from_usize(angles).unwrap();
        let (c, s) = (theta.cos(), theta.sin());
        // Re(e^{iθ} a) = cos θ · re(a) − sin θ · im(a)
        let rotated = Matrix::from_fn(a.rows(), a.cols(), |i, j| {
            let z = a.entry(i, j);
            C::new(c * z.re - s * z.im, T::zero())
        })?;
        let r = exact_real::run(&rotated, kind, cfg)?;
        let better = match &best {
            None => true,
            Some((v, _, _)) => r.value > *v,
        };
        if better {
            best = Some((r.value, r.witness_x, r.witness_y));
        }
    }
    let (_, x, y) = best.expect("at least one angle");
    let value = evaluate_witness(a, &x, &y, kind)?;
    Ok(CutNormResult {
        value,
        witness_x: x,
        witness_y: y,
        method: Method::AngleGrid,
        certified: false,
    })
}

/// Objective value of `kind` at a specific witness pair, recomputed with
/// compensated summation. Used by every result constructor so the reported
/// value always matches its witnesses.
pub fn evaluate_witness<T: Real>(
    a: &Matrix<T>,
    x: &IndexSet,
    y: &IndexSet,
    kind: NormKind,
) -> Result<T> {
    let num = a.submatrix_sum(x, y)?.norm();
    match kind {
        NormKind::Square => {
            let mn = T::from_usize(a.rows() * a.cols()).unwrap();
            Ok(num / mn)
        }
        NormKind::Boxdot => {
            let k = x.len() * y.len();
            if k == 0 {
                return Ok(T::zero());
            }
            Ok(num / T::from_usize(k).unwrap().sqrt())
        }
    }
}

/// The bilinear-form bound `|⟨Ax, y⟩| ≤ c ‖x‖_∞ ‖y‖_∞ ‖A‖_□ mn` with
/// `c = 4` when matrix and vectors are all real and `c = 16` otherwise.
/// Requires the exact cut-norm: a lower bound would make the right side
/// unsound, so oversized inputs are refused.
pub fn bilinear_form_bound_check<T: Real>(
    a: &Matrix<T>,
    x: &[C<T>],
    y: &[C<T>],
    cfg: &ExactConfig,
) -> Result<BoundReport> {
    if x.len() != a.cols() || y.len() != a.rows() {
        return Err(Error::Dimension(format!(
            "need x of length {} and y of length {}",
            a.cols(),
            a.rows()
        )));
    }
    let norm = cut_norm_exact_with(a, cfg)?;
    let ax = a.matvec(x)?;
    let mut acc = crate::matrix::KahanSumC::new();
    for (axi, yi) in ax.iter().zip(y) {
        // Inner product conjugate-linear in the second argument.
        acc.add(*axi * yi.conj());
    }
    let lhs = acc.value().norm();
    let all_real = a.is_real()
        && x.iter().all(|z| z.im == T::zero())
        && y.iter().all(|z| z.im == T::zero());
    let constant = if all_real { 4.0 } else { 16.0 };
    let xinf = x.iter().map(|z| z.norm()).fold(T::zero(), T::max);
    let yinf = y.iter().map(|z| z.norm()).fold(T::zero(), T::max);
    let mn = T::from_usize(a.rows() * a.cols()).unwrap();
    let rhs = T::of(constant) * xinf * yinf * norm.value * mn;
    Ok(BoundReport::new(
        "le1",
        lhs.to64(),
        rhs.to64(),
        constant,
        matrix_digest(a),
        Provenance::method("exact"),
    ))
}
