//! Exact cut-type norms of real matrices.
//!
//! The search walks coefficient tuples over collapsed row groups in
//! reflected Gray order, maintaining column sums incrementally (one row
//! operation per step). The inner maximum over column sets is closed-form:
//! for the □ norm the best Y is the positive (or negative) columns, giving
//! an O(1) candidate from running aggregates; for the ⊡ norm the best Y is
//! a top-ℓ prefix of the sorted column sums, evaluated lazily behind the
//! Cauchy-Schwarz bound √(Σ s_j² / |X|) so most states skip the sort.
//!
//! Determinism does not depend on chunking or thread count: incremental
//! state is recomputed from scratch at every step index divisible by 2^16,
//! chunk boundaries sit on that same grid, and merges order candidates by
//! value, then smallest witness mask.

use super::grouping::{group_rows, Grouping};
use super::{evaluate_witness, CutNormResult, ExactConfig, Method, NormKind};
use crate::error::{Error, Result};
use crate::graycode::MixedRadixGray;
use crate::matrix::{mask_order, IndexSet, KahanSum, Matrix};
use crate::parallel;
use crate::scalar::Real;
use rayon::prelude::*;
use std::cmp::Ordering;

const REFRESH: u64 = 1 << 16;

struct Ctx<T: Real> {
    grouping: Grouping<T>,
    /// Real parts of the representative rows.
    reps: Vec<Vec<T>>,
    /// Entry sum of each representative row.
    rsum: Vec<T>,
    radices: Vec<u32>,
    n: usize,
    /// inv_sqrt[k] = 1/√k, k ≥ 1.
    inv_sqrt: Vec<T>,
}

impl<T: Real> Ctx<T> {
    fn coeffs(&self, digits: &[u32]) -> Vec<i64> {
        digits
            .iter()
            .enumerate()
            .map(|(g, &d)| self.grouping.coefficient(g, d))
            .collect()
    }

    fn rows_for(&self, digits: &[u32]) -> Vec<usize> {
        self.grouping.realize(&self.coeffs(digits))
    }

    /// Fresh column sums for a coefficient tuple.
    fn column_sums(&self, digits: &[u32], s: &mut [T]) {
        for v in s.iter_mut() {
            *v = T::zero();
        }
        for (g, &d) in digits.iter().enumerate() {
            let c = self.grouping.coefficient(g, d);
            if c != 0 {
                let cf = T::from_i64(c).unwrap();
                for (v, r) in s.iter_mut().zip(&self.reps[g]) {
                    *v = *v + cf * *r;
                }
            }
        }
    }
}

#[derive(Clone)]
struct Cand<T: Real> {
    val: T,
    digits: Vec<u32>,
    /// Materialized row set, filled on demand for tie-breaks.
    rows: Option<Vec<usize>>,
}

impl<T: Real> Cand<T> {
    fn none() -> Self {
        Cand {
            val: T::neg_infinity(),
            digits: Vec::new(),
            rows: None,
        }
    }

    fn rows<'s>(&'s mut self, ctx: &Ctx<T>) -> &'s [usize] {
        if self.rows.is_none() {
            self.rows = Some(ctx.rows_for(&self.digits));
        }
        self.rows.as_deref().unwrap()
    }
}

/// Keep the better of two candidates: larger value, ties to the smaller
/// row mask.
fn merge<T: Real>(ctx: &Ctx<T>, mut a: Cand<T>, mut b: Cand<T>) -> Cand<T> {
    if b.val > a.val {
        return b;
    }
    if b.val < a.val || b.digits == a.digits {
        return a;
    }
    let ord = mask_order(b.rows(ctx), a.rows(ctx));
    if ord == Ordering::Less {
        b
    } else {
        a
    }
}

pub(super) fn run<T: Real>(
    a: &Matrix<T>,
    kind: NormKind,
    cfg: &ExactConfig,
) -> Result<CutNormResult<T>> {
    debug_assert!(a.is_real());
    // Enumerate whichever side collapses to fewer states.
    let by_rows = group_rows(a, false);
    let by_cols = group_rows(a, true);
    let card_r = by_rows.cardinality();
    let card_c = by_cols.cardinality();
    let (grouping, transposed, card) = match (card_r, card_c) {
        (Some(r), Some(c)) if r <= c => (by_rows, false, r),
        (_, Some(c)) => (by_cols, true, c),
        (Some(r), None) => (by_rows, false, r),
        (None, None) => {
            return Err(Error::Guard(
                "matrix too large for exact enumeration; use cut_norm_heuristic".into(),
            ))
        }
    };
    if card > cfg.max_states {
        return Err(Error::Guard(format!(
            "exact enumeration needs {card} states, above the configured limit {}; \
             use cut_norm_heuristic or raise the limit",
            cfg.max_states
        )));
    }

    if grouping.reps.is_empty() {
        // Identically zero matrix.
        return zero_matrix_result(a, kind);
    }

    let n = if transposed { a.rows() } else { a.cols() };
    let reps: Vec<Vec<T>> = grouping.reps.iter().map(|r| r.iter().map(|z| z.re).collect()).collect();
    let rsum = reps.iter().map(|r| r.iter().copied().sum()).collect();
    let max_cost: usize = grouping
        .plus
        .iter()
        .zip(&grouping.minus)
        .map(|(p, m)| p.len().max(m.len()))
        .sum();
    let inv_len = n.max(max_cost) + 1;
    let inv_sqrt = (0..inv_len)
        .map(|k| {
            if k == 0 {
                T::zero()
            } else {
                T::one() / T::from_usize(k).unwrap().sqrt()
            }
        })
        .collect();
    let ctx = Ctx {
        radices: grouping.radices(),
        grouping,
        reps,
        rsum,
        n,
        inv_sqrt,
    };

    let seed = match kind {
        NormKind::Square => Cand::none(),
        NormKind::Boxdot => boxdot_seed_candidates(&ctx),
    };

    let chunk_count = parallel::pool().current_num_threads() * 4;
    let chunks = parallel::aligned_chunks(card, REFRESH, chunk_count);
    let best = if chunks.len() == 1 {
        walk_chunk(&ctx, kind, 0, card, seed)
    } else {
        parallel::run(|| {
            chunks
                .into_par_iter()
                .map(|(lo, hi)| walk_chunk(&ctx, kind, lo, hi, seed.clone()))
                .reduce_with(|x, y| merge(&ctx, x, y))
                .expect("at least one chunk")
        })
    };

    finish(a, transposed, kind, &ctx, best)
}

fn zero_matrix_result<T: Real>(a: &Matrix<T>, kind: NormKind) -> Result<CutNormResult<T>> {
    let (x, y) = match kind {
        NormKind::Square => (IndexSet::empty(a.rows()), IndexSet::empty(a.cols())),
        NormKind::Boxdot => (
            IndexSet::from_members(a.rows(), vec![0])?,
            IndexSet::from_members(a.cols(), vec![0])?,
        ),
    };
    Ok(CutNormResult {
        value: T::zero(),
        witness_x: x,
        witness_y: y,
        method: Method::Exact,
        certified: true,
    })
}

fn walk_chunk<T: Real>(ctx: &Ctx<T>, kind: NormKind, lo: u64, hi: u64, seed: Cand<T>) -> Cand<T> {
    match kind {
        NormKind::Square => walk_square(ctx, lo, hi, seed),
        NormKind::Boxdot => walk_boxdot(ctx, lo, hi, seed),
    }
}

fn walk_square<T: Real>(ctx: &Ctx<T>, lo: u64, hi: u64, seed: Cand<T>) -> Cand<T> {
    let n = ctx.n;
    let half = T::of(0.5);
    let mut walk = MixedRadixGray::starting_at(ctx.radices.clone(), lo);
    let mut s = vec![T::zero(); n];
    let mut best = seed;

    let mut l = T::zero();
    let mut stot = T::zero();
    let fresh = |ctx: &Ctx<T>, digits: &[u32], s: &mut [T], l: &mut T, stot: &mut T| {
        ctx.column_sums(digits, s);
        *l = s.iter().map(|v| v.abs()).sum();
        *stot = s.iter().copied().sum();
    };
    fresh(ctx, walk.digits(), &mut s, &mut l, &mut stot);

    let mut idx = lo;
    loop {
        if idx != lo && idx % REFRESH == 0 {
            fresh(ctx, walk.digits(), &mut s, &mut l, &mut stot);
        }
        // max over Y of |Σ(A[X,Y])| = max(P, -N) = (Σ|s_j| + |Σ s_j|) / 2
        let val = (l + stot.abs()) * half;
        if val > best.val {
            best = Cand {
                val,
                digits: walk.digits().to_vec(),
                rows: None,
            };
        } else if val == best.val && walk.digits() != &best.digits[..] {
            let mut cand = Cand {
                val,
                digits: walk.digits().to_vec(),
                rows: None,
            };
            if mask_order(cand.rows(ctx), best.rows(ctx)) == Ordering::Less {
                best = cand;
            }
        }

        if idx + 1 >= hi {
            break;
        }
        let st = walk.step().expect("within range");
        let d = if st.delta > 0 { T::one() } else { -T::one() };
        let rep = &ctx.reps[st.digit];
        let mut dl = T::zero();
        for (v, r) in s.iter_mut().zip(rep) {
            let old = *v;
            let new = old + d * *r;
            dl += new.abs() - old.abs();
            *v = new;
        }
        l += dl;
        stot += d * ctx.rsum[st.digit];
        idx += 1;
    }
    best
}

fn walk_boxdot<T: Real>(ctx: &Ctx<T>, lo: u64, hi: u64, seed: Cand<T>) -> Cand<T> {
    let n = ctx.n;
    let mut walk = MixedRadixGray::starting_at(ctx.radices.clone(), lo);
    let mut s = vec![T::zero(); n];
    let mut scratch = vec![T::zero(); n];
    let mut best = seed;
    let mut bv2 = if best.val > T::zero() {
        best.val * best.val
    } else {
        T::of(-1.0)
    };

    let mut q = T::zero();
    let mut cost: i64 = 0;
    let fresh = |ctx: &Ctx<T>, digits: &[u32], s: &mut [T], q: &mut T, cost: &mut i64| {
        ctx.column_sums(digits, s);
        *q = s.iter().map(|v| *v * *v).sum();
        *cost = digits
            .iter()
            .enumerate()
            .map(|(g, &d)| ctx.grouping.coefficient(g, d).abs())
            .sum();
    };
    fresh(ctx, walk.digits(), &mut s, &mut q, &mut cost);

    let mut idx = lo;
    loop {
        if idx != lo && idx % REFRESH == 0 {
            fresh(ctx, walk.digits(), &mut s, &mut q, &mut cost);
        }
        if cost > 0 {
            let cost_t = T::from_i64(cost).unwrap();
            // Cauchy-Schwarz: objective ≤ √(Σ s_j² / |X|); skip the sort
            // unless this state could beat the incumbent.
            if q >= bv2 * cost_t {
                scratch.copy_from_slice(&s);
                scratch.sort_unstable_by(|x, y| y.partial_cmp(x).expect("finite sums"));
                let inner = inner_max(&scratch, &ctx.inv_sqrt);
                let val = inner * ctx.inv_sqrt[cost as usize];
                if val > best.val {
                    best = Cand {
                        val,
                        digits: walk.digits().to_vec(),
                        rows: None,
                    };
                    bv2 = val * val;
                } else if val == best.val && walk.digits() != &best.digits[..] {
                    let mut cand = Cand {
                        val,
                        digits: walk.digits().to_vec(),
                        rows: None,
                    };
                    if mask_order(cand.rows(ctx), best.rows(ctx)) == Ordering::Less {
                        best = cand;
                    }
                }
            }
        }

        if idx + 1 >= hi {
            break;
        }
        let st = walk.step().expect("within range");
        let d = if st.delta > 0 { T::one() } else { -T::one() };
        let rep = &ctx.reps[st.digit];
        let mut dq = T::zero();
        for (v, r) in s.iter_mut().zip(rep) {
            let dr = d * *r;
            let old = *v;
            let new = old + dr;
            dq += dr * (old + new);
            *v = new;
        }
        q += dq;
        let c_new = ctx.grouping.coefficient(st.digit, walk.digits()[st.digit]);
        let c_old = c_new - i64::from(st.delta);
        cost += c_new.abs() - c_old.abs();
        idx += 1;
    }
    best
}

/// Best prefix objective over a descending-sorted column-sum vector:
/// max over ℓ and sign of (±prefix_ℓ)/√ℓ. Never negative: the better of
/// the two directions at ℓ = 1 is |extreme element| ≥ 0.
pub(crate) fn inner_max<T: Real>(sorted_desc: &[T], inv_sqrt: &[T]) -> T {
    let n = sorted_desc.len();
    let mut best = T::zero();
    let mut run = T::zero();
    for (i, v) in sorted_desc.iter().enumerate() {
        run += *v;
        let cand = run * inv_sqrt[i + 1];
        if cand > best {
            best = cand;
        }
    }
    run = T::zero();
    for l in 1..=n {
        run += sorted_desc[n - l];
        let cand = -run * inv_sqrt[l];
        if cand > best {
            best = cand;
        }
    }
    best
}

/// Deterministic seed candidates for the ⊡ pruning bound: the full row
/// set, each signed singleton, and every row prefix. All are real states,
/// so seeding only tightens the bound.
fn boxdot_seed_candidates<T: Real>(ctx: &Ctx<T>) -> Cand<T> {
    let g = &ctx.grouping;
    let mut digit_sets: Vec<Vec<i64>> = Vec::new();
    let full: Vec<i64> = g
        .plus
        .iter()
        .zip(&g.minus)
        .map(|(p, m)| p.len() as i64 - m.len() as i64)
        .collect();
    digit_sets.push(full);
    for gi in 0..g.reps.len() {
        let mut c = vec![0i64; g.reps.len()];
        if !g.plus[gi].is_empty() {
            c[gi] = 1;
            digit_sets.push(c.clone());
            c[gi] = 0;
        }
        if !g.minus[gi].is_empty() {
            c[gi] = -1;
            digit_sets.push(c);
        }
    }
    for k in 1..=g.row_count {
        let rows: Vec<usize> = (0..k).collect();
        digit_sets.push(g.project(&rows));
    }

    let mut s = vec![T::zero(); ctx.n];
    let mut best = Cand::none();
    for coeffs in digit_sets {
        let cost: i64 = coeffs.iter().map(|c| c.abs()).sum();
        if cost == 0 {
            continue;
        }
        let digits: Vec<u32> = coeffs
            .iter()
            .zip(&ctx.grouping.minus)
            .map(|(&c, m)| (c + m.len() as i64) as u32)
            .collect();
        ctx.column_sums(&digits, &mut s);
        let mut sorted = s.clone();
        sorted.sort_unstable_by(|x, y| y.partial_cmp(x).expect("finite sums"));
        let val = inner_max(&sorted, &ctx.inv_sqrt) * ctx.inv_sqrt[cost as usize];
        let cand = Cand {
            val,
            digits,
            rows: None,
        };
        best = merge(ctx, best, cand);
    }
    best
}

/// Turn the winning state into witness sets and re-score it with
/// compensated summation on the original matrix.
fn finish<T: Real>(
    a: &Matrix<T>,
    transposed: bool,
    kind: NormKind,
    ctx: &Ctx<T>,
    mut best: Cand<T>,
) -> Result<CutNormResult<T>> {
    let rows = best.rows(ctx).to_vec();
    let n = ctx.n;

    // Fresh compensated column sums over the chosen rows.
    let mut sums = vec![KahanSum::<T>::new(); n];
    for &i in &rows {
        let rfetch = |j: usize| {
            if transposed {
                a.entry(j, i).re
            } else {
                a.entry(i, j).re
            }
        };
        for (j, acc) in sums.iter_mut().enumerate() {
            acc.add(rfetch(j));
        }
    }
    let s: Vec<T> = sums.iter().map(|k| k.value()).collect();

    let y = match kind {
        NormKind::Square => {
            let pos: Vec<usize> = (0..n).filter(|&j| s[j] > T::zero()).collect();
            let neg: Vec<usize> = (0..n).filter(|&j| s[j] < T::zero()).collect();
            let vp: T = pos.iter().map(|&j| s[j]).sum();
            let vn: T = -neg.iter().map(|&j| s[j]).sum::<T>();
            match vp.partial_cmp(&vn).expect("finite") {
                Ordering::Greater => pos,
                Ordering::Less => neg,
                Ordering::Equal => {
                    if mask_order(&pos, &neg) == Ordering::Greater {
                        neg
                    } else {
                        pos
                    }
                }
            }
        }
        NormKind::Boxdot => {
            let pick = |descending: bool| -> (T, Vec<usize>) {
                let mut order: Vec<usize> = (0..n).collect();
                if descending {
                    order.sort_by(|&i, &j| {
                        s[j].partial_cmp(&s[i]).expect("finite").then(i.cmp(&j))
                    });
                } else {
                    order.sort_by(|&i, &j| {
                        s[i].partial_cmp(&s[j]).expect("finite").then(i.cmp(&j))
                    });
                }
                let mut run = T::zero();
                let mut best_v = T::neg_infinity();
                let mut best_l = 1usize;
                for l in 1..=n {
                    run += s[order[l - 1]];
                    let v = if descending { run } else { -run } * ctx.inv_sqrt[l];
                    if v > best_v {
                        best_v = v;
                        best_l = l;
                    }
                }
                let mut set = order[..best_l].to_vec();
                set.sort_unstable();
                (best_v, set)
            };
            let (vp, yp) = pick(true);
            let (vn, yn) = pick(false);
            match vp.partial_cmp(&vn).expect("finite") {
                Ordering::Greater => yp,
                Ordering::Less => yn,
                Ordering::Equal => {
                    if mask_order(&yp, &yn) == Ordering::Greater {
                        yn
                    } else {
                        yp
                    }
                }
            }
        }
    };

    let (xu, yu) = if transposed {
        (a.cols(), a.rows())
    } else {
        (a.rows(), a.cols())
    };
    let xs = IndexSet::from_members(xu, rows)?;
    let ys = IndexSet::from_members(yu, y)?;
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
