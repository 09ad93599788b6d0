//! Exact cut-type norms of complex matrices.
//!
//! The inner closed form over column sets breaks down for complex column
//! sums (a max-modulus subset-sum remains), so both sides are enumerated:
//! X over the smaller dimension in the outer loop, Y in a full binary Gray
//! walk per X with an O(1) complex accumulator update per step.

use super::{evaluate_witness, CutNormResult, ExactConfig, Method, NormKind};
use crate::error::{Error, Result};
use crate::graycode::binary_gray;
use crate::matrix::{IndexSet, Matrix};
use crate::parallel;
use crate::scalar::{Real, C};
use rayon::prelude::*;

/// Column sums are refreshed on this grid of outer indices; chunk
/// boundaries align to it so results are chunking-independent.
const REFRESH_X: u64 = 64;

#[derive(Clone, Copy)]
struct Best<T: Real> {
    /// |Σ|² at the witness.
    num2: T,
    /// |X||Y| as a scalar (1 for the □ norm where it is not used).
    cost: T,
    x_mask: u64,
    y_mask: u64,
    set: bool,
}

impl<T: Real> Best<T> {
    fn beats(&self, other: &Best<T>) -> bool {
        if !other.set {
            return self.set;
        }
        if !self.set {
            return false;
        }
        // Compare num2/cost without dividing.
        let lhs = self.num2 * other.cost;
        let rhs = other.num2 * self.cost;
        if lhs != rhs {
            return lhs > rhs;
        }
        (self.x_mask, self.y_mask) < (other.x_mask, other.y_mask)
    }
}

pub(super) fn run<T: Real>(
    a: &Matrix<T>,
    kind: NormKind,
    cfg: &ExactConfig,
) -> Result<CutNormResult<T>> {
    let transposed = a.rows() > a.cols();
    let (m, n) = if transposed {
        (a.cols(), a.rows())
    } else {
        (a.rows(), a.cols())
    };
    if m > cfg.complex_min_dim {
        return Err(Error::Guard(format!(
            "complex exact enumeration limited to min(m,n) ≤ {}; \
             use cut_norm_heuristic or the angle-grid method",
            cfg.complex_min_dim
        )));
    }
    if (m + n) as u32 > cfg.complex_max_state_bits {
        return Err(Error::Guard(format!(
            "complex exact enumeration needs 2^{} states, above the 2^{} limit; \
             use cut_norm_heuristic or the angle-grid method",
            m + n,
            cfg.complex_max_state_bits
        )));
    }

    let rows: Vec<Vec<C<T>>> = (0..m)
        .map(|i| {
            (0..n)
                .map(|j| if transposed { a.entry(j, i) } else { a.entry(i, j) })
                .collect()
        })
        .collect();

    let x_total = 1u64 << m;
    let chunks = parallel::aligned_chunks(x_total, REFRESH_X, parallel::pool().current_num_threads() * 4);
    let best = if chunks.len() == 1 {
        walk(&rows, n, kind, 0, x_total)
    } else {
        parallel::run(|| {
            chunks
                .into_par_iter()
                .map(|(lo, hi)| walk(&rows, n, kind, lo, hi))
                .reduce_with(|a, b| if b.beats(&a) { b } else { a })
                .expect("at least one chunk")
        })
    };

    let (xu, yu) = if transposed {
        (a.cols(), a.rows())
    } else {
        (a.rows(), a.cols())
    };
    let xs = IndexSet::from_mask(xu, best.x_mask)?;
    let ys = IndexSet::from_mask(yu, best.y_mask)?;
    let (wx, wy) = if transposed { (ys, xs) } else { (xs, ys) };
    let value = evaluate_witness(a, &wx, &wy, kind)?;
    Ok(CutNormResult {
        value,
        witness_x: wx,
        witness_y: wy,
        method: Method::Exact,
        certified: true,
    })
}

fn column_sums<T: Real>(rows: &[Vec<C<T>>], x_mask: u64, s: &mut [C<T>]) {
    for v in s.iter_mut() {
        *v = C::new(T::zero(), T::zero());
    }
    for (i, row) in rows.iter().enumerate() {
        if (x_mask >> i) & 1 == 1 {
            for (v, z) in s.iter_mut().zip(row) {
                *v = *v + *z;
            }
        }
    }
}

fn walk<T: Real>(rows: &[Vec<C<T>>], n: usize, kind: NormKind, lo: u64, hi: u64) -> Best<T> {
    let zero = C::new(T::zero(), T::zero());
    let mut s = vec![zero; n];
    let mut x_mask = binary_gray(lo);
    column_sums(rows, x_mask, &mut s);

    let mut best = match kind {
        // The empty pair is a legal □ witness with value 0.
        NormKind::Square => Best {
            num2: T::zero(),
            cost: T::one(),
            x_mask: 0,
            y_mask: 0,
            set: true,
        },
        NormKind::Boxdot => Best {
            num2: T::zero(),
            cost: T::one(),
            x_mask: 0,
            y_mask: 0,
            set: false,
        },
    };

    let boxdot = kind == NormKind::Boxdot;
    let y_total = 1u64 << n;
    for xi in lo..hi {
        if xi != lo && xi % REFRESH_X == 0 {
            x_mask = binary_gray(xi);
            column_sums(rows, x_mask, &mut s);
        }
        let xk = x_mask.count_ones();
        if !(boxdot && xk == 0) {
            let xk_t = T::from_u32(xk.max(1)).unwrap();
            let mut t = zero;
            let mut y_mask = 0u64;
            let mut yk = 0u32;
            for yi in 1..y_total {
                let b = yi.trailing_zeros();
                let bit = 1u64 << b;
                y_mask ^= bit;
                if y_mask & bit != 0 {
                    t = t + s[b as usize];
                    yk += 1;
                } else {
                    t = t - s[b as usize];
                    yk -= 1;
                }
                if boxdot && yk == 0 {
                    continue;
                }
                let cand = Best {
                    num2: t.norm_sqr(),
                    cost: if boxdot {
                        xk_t * T::from_u32(yk).unwrap()
                    } else {
                        T::one()
                    },
                    x_mask,
                    y_mask,
                    set: true,
                };
                if cand.beats(&best) {
                    best = cand;
                }
            }
        }
        if xi + 1 < hi {
            let rb = (xi + 1).trailing_zeros();
            let bit = 1u64 << rb;
            x_mask ^= bit;
            let row = &rows[rb as usize];
            if x_mask & bit != 0 {
                for (v, z) in s.iter_mut().zip(row) {
                    *v = *v + *z;
                }
            } else {
                for (v, z) in s.iter_mut().zip(row) {
                    *v = *v - *z;
                }
            }
        }
    }
    best
}
