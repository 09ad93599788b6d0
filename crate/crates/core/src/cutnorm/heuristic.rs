//! Random-restart local search producing certified-false lower bounds.
//!
//! Moves are single membership flips. For real matrices only X is searched
//! and the best Y is re-derived in closed form after every move; for
//! complex matrices X and Y bits are flipped jointly. Strict improvements
//! only, restart on local optimum, deterministic for a fixed seed: restart
//! r draws from stream r of a counter-based generator, and the merge
//! prefers (larger value, smaller restart index).

use super::{evaluate_witness, CutNormResult, Method, NormKind};
use crate::matrix::{IndexSet, KahanSum, Matrix};
use crate::parallel;
use crate::scalar::{Real, C};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub fn cut_norm_heuristic<T: Real>(
    a: &Matrix<T>,
    kind: NormKind,
    seed: u64,
    restarts: u32,
) -> CutNormResult<T> {
    let restarts = restarts.max(1);
    let runs: Vec<(T, Vec<bool>, Vec<bool>)> = parallel::run(|| {
        (0..restarts)
            .into_par_iter()
            .map(|r| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(u64::from(r));
                if a.is_real() {
                    search_real(a, kind, &mut rng)
                } else {
                    search_complex(a, kind, &mut rng)
                }
            })
            .collect()
    });
    let (mut bi, mut bv) = (0usize, runs[0].0);
    for (i, run) in runs.iter().enumerate().skip(1) {
        if run.0 > bv {
            bv = run.0;
            bi = i;
        }
    }
    let (_, x, y) = &runs[bi];
    let wx = IndexSet::from_members(
        a.rows(),
        x.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect(),
    )
    .expect("in range");
    let wy = IndexSet::from_members(
        a.cols(),
        y.iter().enumerate().filter(|(_, &b)| b).map(|(j, _)| j).collect(),
    )
    .expect("in range");
    let value = evaluate_witness(a, &wx, &wy, kind).expect("witness within shape");
    CutNormResult {
        value,
        witness_x: wx,
        witness_y: wy,
        method: Method::Anneal,
        certified: false,
    }
}

/// Closed-form inner objective for real column sums, and the Y realizing
/// it. Numerator scale only; the caller divides as the norm requires.
fn real_inner<T: Real>(s: &[T], kind: NormKind, xk: usize) -> (T, Vec<bool>) {
    let n = s.len();
    match kind {
        NormKind::Square => {
            let mut p = T::zero();
            let mut nn = T::zero();
            for &v in s {
                if v > T::zero() {
                    p += v;
                } else {
                    nn += v;
                }
            }
            let neg = -nn;
            let positive = p >= neg;
            let y: Vec<bool> = s
                .iter()
                .map(|&v| if positive { v > T::zero() } else { v < T::zero() })
                .collect();
            (if positive { p } else { neg }, y)
        }
        NormKind::Boxdot => {
            if xk == 0 {
                return (T::zero(), vec![false; n]);
            }
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&i, &j| s[j].partial_cmp(&s[i]).expect("finite").then(i.cmp(&j)));
            let xk_t = T::from_usize(xk).unwrap();
            let mut best = (T::neg_infinity(), 0usize, true);
            let mut run = T::zero();
            for l in 1..=n {
                run += s[order[l - 1]];
                let v = run / (xk_t * T::from_usize(l).unwrap()).sqrt();
                if v > best.0 {
                    best = (v, l, true);
                }
            }
            run = T::zero();
            for l in 1..=n {
                run += s[order[n - l]];
                let v = -run / (xk_t * T::from_usize(l).unwrap()).sqrt();
                if v > best.0 {
                    best = (v, l, false);
                }
            }
            let mut y = vec![false; n];
            let (v, l, from_top) = best;
            if from_top {
                for &j in &order[..l] {
                    y[j] = true;
                }
            } else {
                for &j in &order[n - l..] {
                    y[j] = true;
                }
            }
            (v, y)
        }
    }
}

fn search_real<T: Real>(
    a: &Matrix<T>,
    kind: NormKind,
    rng: &mut ChaCha8Rng,
) -> (T, Vec<bool>, Vec<bool>) {
    let (m, n) = a.shape();
    let mut x: Vec<bool> = (0..m).map(|_| rng.gen_bool(0.5)).collect();
    let col_sums = |x: &[bool]| -> Vec<T> {
        let mut acc = vec![KahanSum::<T>::new(); n];
        for (i, &inx) in x.iter().enumerate() {
            if inx {
                for (j, k) in acc.iter_mut().enumerate() {
                    k.add(a.entry(i, j).re);
                }
            }
        }
        acc.iter().map(|k| k.value()).collect()
    };
    let mut s = col_sums(&x);
    let mut xk = x.iter().filter(|&&b| b).count();
    let mut val = real_inner(&s, kind, xk).0;
    loop {
        let mut improved = false;
        for i in 0..m {
            let d = if x[i] { -T::one() } else { T::one() };
            let s_new: Vec<T> = s
                .iter()
                .enumerate()
                .map(|(j, &v)| v + d * a.entry(i, j).re)
                .collect();
            let xk_new = if x[i] { xk - 1 } else { xk + 1 };
            let v_new = real_inner(&s_new, kind, xk_new).0;
            if v_new > val {
                x[i] = !x[i];
                s = s_new;
                xk = xk_new;
                val = v_new;
                improved = true;
            }
        }
        if !improved {
            break;
        }
    }
    let (v, y) = real_inner(&s, kind, xk);
    (final_scale(a, kind, v, xk), x, y_guard(kind, y, &s))
}

/// For the ⊡ norm an empty X means value 0 with an arbitrary singleton; for
/// the □ norm empty sets are fine as is.
fn y_guard<T: Real>(kind: NormKind, mut y: Vec<bool>, _s: &[T]) -> Vec<bool> {
    if kind == NormKind::Boxdot && !y.iter().any(|&b| b) {
        y[0] = true;
    }
    y
}

fn final_scale<T: Real>(a: &Matrix<T>, kind: NormKind, v: T, _xk: usize) -> T {
    match kind {
        NormKind::Square => v / T::from_usize(a.rows() * a.cols()).unwrap(),
        NormKind::Boxdot => v,
    }
}

fn search_complex<T: Real>(
    a: &Matrix<T>,
    kind: NormKind,
    rng: &mut ChaCha8Rng,
) -> (T, Vec<bool>, Vec<bool>) {
    let (m, n) = a.shape();
    let boxdot = kind == NormKind::Boxdot;
    let mut x: Vec<bool> = (0..m).map(|_| rng.gen_bool(0.5)).collect();
    let mut y: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
    if boxdot {
        if !x.iter().any(|&b| b) {
            x[rng.gen_range(0..m)] = true;
        }
        if !y.iter().any(|&b| b) {
            y[rng.gen_range(0..n)] = true;
        }
    }

    let objective = |x: &[bool], y: &[bool]| -> T {
        let xk = x.iter().filter(|&&b| b).count();
        let yk = y.iter().filter(|&&b| b).count();
        if boxdot && (xk == 0 || yk == 0) {
            return T::neg_infinity();
        }
        let mut acc = C::new(T::zero(), T::zero());
        for (i, &inx) in x.iter().enumerate() {
            if inx {
                for (j, &iny) in y.iter().enumerate() {
                    if iny {
                        acc = acc + a.entry(i, j);
                    }
                }
            }
        }
        let num = acc.norm();
        if boxdot {
            num / T::from_usize(xk * yk).unwrap().sqrt()
        } else {
            num / T::from_usize(m * n).unwrap()
        }
    };

    let mut val = objective(&x, &y);
    loop {
        let mut improved = false;
        for i in 0..m {
            x[i] = !x[i];
            let v = objective(&x, &y);
            if v > val {
                val = v;
                improved = true;
            } else {
                x[i] = !x[i];
            }
        }
        for j in 0..n {
            y[j] = !y[j];
            let v = objective(&x, &y);
            if v > val {
                val = v;
                improved = true;
            } else {
                y[j] = !y[j];
            }
        }
        if !improved {
            break;
        }
    }
    (val, x, y)
}
