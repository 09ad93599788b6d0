//! Cut-distances between matrices.
//!
//! Same-size distances minimize the cut-norm of a permuted difference:
//! `δ̂_□` conjugates Hermitian matrices by one permutation, `δ̂_⊟` applies
//! independent row and column permutations. Different sizes go through
//! all-ones blow-ups, giving a nonincreasing-in-spirit sequence of upper
//! bounds on the limiting pre-metrics `δ_□` and `δ_⊟`.
//!
//! Exact search enumerates permutations in lexicographic rank order (with
//! a cheap probe bound pruning most of them), chunked across workers with
//! a deterministic (value, rank) merge. The annealed search follows a
//! documented schedule: geometric cooling at 0.995 per proposal, random
//! transposition proposals, 200·n² proposals per restart, best of
//! restarts, everything driven by per-restart seed streams; candidates are
//! scored by the heuristic norm and the final witness is re-scored exactly
//! when the size permits, which is what `certified_value` records.

use crate::blowup::{blowup_rect, blowup_square};
use crate::cutnorm::{cut_norm_exact_with, cut_norm_heuristic, ExactConfig, NormKind};
use crate::error::{Error, Result};
use crate::matrix::{KahanSumC, Matrix};
use crate::parallel;
use crate::scalar::{Real, C};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// A bijection on `[0, n)`; `apply` relabels index `i` to `map[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            map: (0..n).collect(),
        }
    }

    pub fn from_map(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &v in &map {
            if v >= n || seen[v] {
                return Err(Error::Precondition("not a bijection".into()));
            }
            seen[v] = true;
        }
        Ok(Permutation { map })
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.map.len()];
        for (i, &v) in self.map.iter().enumerate() {
            inv[v] = i;
        }
        Permutation { map: inv }
    }

    /// 1-based image list for reports.
    pub fn one_based(&self) -> Vec<usize> {
        self.map.iter().map(|&v| v + 1).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceMethod {
    Exact,
    Anneal,
}

/// How to run a distance search; `Auto` follows the documented policy
/// (exact at k = 1 when the size guard allows, annealed otherwise).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMethod {
    Exact,
    Anneal,
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    /// The exact minimum over permutations at this blow-up level.
    ExactAtK,
    /// A certified or heuristic upper bound at this blow-up level.
    UpperBound,
}

#[derive(Debug, Clone)]
pub struct DistanceResult<T: Real> {
    pub value: T,
    pub perm_p: Permutation,
    pub perm_q: Option<Permutation>,
    pub blowup_k: usize,
    pub method: DistanceMethod,
    pub bound_kind: BoundKind,
    /// True when the reported value is an exactly computed cut-norm of the
    /// witnessed difference (required for downstream eigenvalue bounds).
    pub certified_value: bool,
}

#[derive(Debug, Clone)]
pub struct DistanceConfig {
    pub seed: u64,
    pub restarts: u32,
    /// Exact δ̂_□ enumerates n! permutations up to this n.
    pub exact_guard: usize,
    /// Exact δ̂_⊟ enumerates m!·n! pairs up to this product.
    pub exact_pair_guard: u64,
    /// Complex-entried pairs pay 2^(m+n) per norm; tighter exact guard.
    pub exact_complex_guard: usize,
    pub cooling: f64,
    pub proposals_per_n2: usize,
    pub norm_cfg: ExactConfig,
}

impl Default for DistanceConfig {
    fn default() -> Self {
        DistanceConfig {
            seed: 0,
            restarts: 4,
            exact_guard: 9,
            exact_pair_guard: 10_000_000,
            exact_complex_guard: 6,
            cooling: 0.995,
            proposals_per_n2: 200,
            norm_cfg: ExactConfig::default(),
        }
    }
}

/// `δ̂_□(A,B) = min over P of ‖A − PBP^{-1}‖_□` for Hermitian same-size
/// matrices.
pub fn delta_hat_square<T: Real>(
    a: &Matrix<T>,
    b: &Matrix<T>,
    method: SearchMethod,
    cfg: &DistanceConfig,
) -> Result<DistanceResult<T>> {
    if a.shape() != b.shape() || !a.is_square() {
        return Err(Error::Dimension(
            "δ̂_□ needs two square matrices of the same size".into(),
        ));
    }
    if !a.is_hermitian() || !b.is_hermitian() {
        return Err(Error::Precondition("δ̂_□ is defined for Hermitian matrices".into()));
    }
    let n = a.rows();
    let complex = !(a.is_real() && b.is_real());
    let exact_ok =
        n <= cfg.exact_guard && (!complex || n <= cfg.exact_complex_guard);
    match method {
        SearchMethod::Exact if !exact_ok => Err(Error::Guard(format!(
            "exact δ̂_□ enumeration limited to n ≤ {} (complex: {}); use the annealed search",
            cfg.exact_guard, cfg.exact_complex_guard
        ))),
        SearchMethod::Exact => exact_square(a, b, cfg),
        SearchMethod::Anneal => anneal_search(a, b, false, cfg),
        SearchMethod::Auto => {
            if exact_ok {
                exact_square(a, b, cfg)
            } else {
                anneal_search(a, b, false, cfg)
            }
        }
    }
}

/// `δ̂_⊟(A,B) = min over (P,Q) of ‖A − PBQ‖_□` for same-shape matrices.
pub fn delta_hat_boxminus<T: Real>(
    a: &Matrix<T>,
    b: &Matrix<T>,
    method: SearchMethod,
    cfg: &DistanceConfig,
) -> Result<DistanceResult<T>> {
    if a.shape() != b.shape() {
        return Err(Error::Dimension("δ̂_⊟ needs matrices of the same shape".into()));
    }
    let (m, n) = a.shape();
    let complex = !(a.is_real() && b.is_real());
    let pairs = (factorial(m) as u128).saturating_mul(factorial(n) as u128);
    let exact_ok = pairs <= cfg.exact_pair_guard as u128
        && (!complex || m + n <= 2 * cfg.exact_complex_guard);
    match method {
        SearchMethod::Exact if !exact_ok => Err(Error::Guard(format!(
            "exact δ̂_⊟ enumeration limited to m!·n! ≤ {}; use the annealed search",
            cfg.exact_pair_guard
        ))),
        SearchMethod::Exact => exact_boxminus(a, b, cfg),
        SearchMethod::Anneal => anneal_search(a, b, true, cfg),
        SearchMethod::Auto => {
            if exact_ok {
                exact_boxminus(a, b, cfg)
            } else {
                anneal_search(a, b, true, cfg)
            }
        }
    }
}

/// Upper bounds on `δ_□(A,B)`: the sequence `δ̂_□(A^(km), B^(kn))` for
/// k = 1..k_max. Exact search applies at k = 1 within the guard; higher
/// levels anneal.
pub fn delta_square_estimate<T: Real>(
    a: &Matrix<T>,
    b: &Matrix<T>,
    k_max: usize,
    method: SearchMethod,
    cfg: &DistanceConfig,
) -> Result<Vec<DistanceResult<T>>> {
    if !a.is_hermitian() || !b.is_hermitian() {
        return Err(Error::Precondition("δ_□ estimates need Hermitian inputs".into()));
    }
    let (n, m) = (a.rows(), b.rows());
    let mut out = Vec::new();
    for k in 1..=k_max.max(1) {
        let ab = blowup_square(a, k * m)?;
        let bb = blowup_square(b, k * n)?;
        let level_method = match method {
            SearchMethod::Exact => SearchMethod::Exact,
            SearchMethod::Anneal => SearchMethod::Anneal,
            SearchMethod::Auto => {
                if k == 1 {
                    SearchMethod::Auto
                } else {
                    SearchMethod::Anneal
                }
            }
        };
        let mut r = delta_hat_square(&ab, &bb, level_method, cfg)?;
        r.blowup_k = k;
        out.push(r);
    }
    Ok(out)
}

/// Upper bounds on `δ_⊟(A,B)`: the sequence `δ̂_⊟(A^(kr,ks), B^(km,kn))`.
pub fn delta_boxminus_estimate<T: Real>(
    a: &Matrix<T>,
    b: &Matrix<T>,
    k_max: usize,
    method: SearchMethod,
    cfg: &DistanceConfig,
) -> Result<Vec<DistanceResult<T>>> {
    let (m, n) = a.shape();
    let (r, s) = b.shape();
    let mut out = Vec::new();
    for k in 1..=k_max.max(1) {
        let ab = blowup_rect(a, k * r, k * s)?;
        let bb = blowup_rect(b, k * m, k * n)?;
        let level_method = match method {
            SearchMethod::Exact => SearchMethod::Exact,
            SearchMethod::Anneal => SearchMethod::Anneal,
            SearchMethod::Auto => {
                if k == 1 {
                    SearchMethod::Auto
                } else {
                    SearchMethod::Anneal
                }
            }
        };
        let mut res = delta_hat_boxminus(&ab, &bb, level_method, cfg)?;
        res.blowup_k = k;
        out.push(res);
    }
    Ok(out)
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Permutation of rank `r` in lexicographic order, by factorial-base
/// digits.
fn unrank_permutation(n: usize, mut r: u64) -> Vec<usize> {
    let mut avail: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(n);
    for pos in (0..n).rev() {
        let f = factorial(pos);
        let d = (r / f) as usize;
        r %= f;
        out.push(avail.remove(d));
    }
    out
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| p[i] < p[i + 1]) else {
        return false;
    };
    let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).unwrap();
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

/// Cheap lower bounds on the cut-norm of a difference: the full sum, every
/// row sum, every column sum, and every single entry are all submatrix
/// sums. Used to skip permutations that cannot improve the incumbent.
fn probe_lower_bound<T: Real>(diff: &[C<T>], m: usize, n: usize) -> T {
    let mut best2 = T::zero();
    let mut total = C::new(T::zero(), T::zero());
    let mut col: Vec<C<T>> = vec![C::new(T::zero(), T::zero()); n];
    for i in 0..m {
        let mut row = C::new(T::zero(), T::zero());
        for j in 0..n {
            let z = diff[i * n + j];
            row = row + z;
            col[j] = col[j] + z;
            best2 = best2.max(z.norm_sqr());
        }
        total = total + row;
        best2 = best2.max(row.norm_sqr());
    }
    for z in col {
        best2 = best2.max(z.norm_sqr());
    }
    best2 = best2.max(total.norm_sqr());
    best2.sqrt() / T::from_usize(m * n).unwrap()
}

/// Value-only exact cut-norm of a small difference matrix, on the raw
/// buffer. Enumerates the smaller side; real inputs use the closed-form
/// inner maximum, complex inputs enumerate both sides.
fn cut_norm_value_small<T: Real>(diff: &[C<T>], m: usize, n: usize) -> T {
    let is_real = diff.iter().all(|z| z.im == T::zero());
    let mn = T::from_usize(m * n).unwrap();
    // Work over the smaller dimension as "rows".
    let (rows, cols, fetch): (usize, usize, &dyn Fn(usize, usize) -> C<T>) = if m <= n {
        (m, n, &|i, j| diff[i * n + j])
    } else {
        (n, m, &|i, j| diff[j * n + i])
    };
    if is_real {
        let mut s = vec![T::zero(); cols];
        let mut l = T::zero();
        let mut tot = T::zero();
        let mut best = T::zero();
        let half = T::of(0.5);
        for step in 0..(1u64 << rows) {
            let val = (l + tot.abs()) * half;
            if val > best {
                best = val;
            }
            if step + 1 == 1 << rows {
                break;
            }
            let rb = (step + 1).trailing_zeros() as usize;
            let mask_after = crate::graycode::binary_gray(step + 1);
            let d = if (mask_after >> rb) & 1 == 1 {
                T::one()
            } else {
                -T::one()
            };
            for (j, v) in s.iter_mut().enumerate() {
                let old = *v;
                let new = old + d * fetch(rb, j).re;
                l += new.abs() - old.abs();
                tot += new - old;
                *v = new;
            }
        }
        best / mn
    } else {
        let zero = C::new(T::zero(), T::zero());
        let mut s = vec![zero; cols];
        let mut best2 = T::zero();
        for xi in 0..(1u64 << rows) {
            let mut t = zero;
            let mut y_mask = 0u64;
            for yi in 1..(1u64 << cols) {
                let b = yi.trailing_zeros();
                let bit = 1u64 << b;
                y_mask ^= bit;
                if y_mask & bit != 0 {
                    t = t + s[b as usize];
                } else {
                    t = t - s[b as usize];
                }
                let n2 = t.norm_sqr();
                if n2 > best2 {
                    best2 = n2;
                }
            }
            if xi + 1 == 1 << rows {
                break;
            }
            let rb = (xi + 1).trailing_zeros() as usize;
            let mask_after = crate::graycode::binary_gray(xi + 1);
            let add = (mask_after >> rb) & 1 == 1;
            for (j, v) in s.iter_mut().enumerate() {
                if add {
                    *v = *v + fetch(rb, j);
                } else {
                    *v = *v - fetch(rb, j);
                }
            }
        }
        best2.sqrt() / mn
    }
}

fn exact_square<T: Real>(
    a: &Matrix<T>,
    b: &Matrix<T>,
    cfg: &DistanceConfig,
) -> Result<DistanceResult<T>> {
    let n = a.rows();
    let total = factorial(n);
    let chunk = (total.div_ceil(parallel::pool().current_num_threads() as u64 * 4)).max(1);
    let mut starts = Vec::new();
    let mut lo = 0;
    while lo < total {
        starts.push((lo, (lo + chunk).min(total)));
        lo += chunk;
    }
    let best = parallel::run(|| {
        starts
            .into_par_iter()
            .map(|(lo, hi)| {
                let mut perm = unrank_permutation(n, lo);
                let mut best: (T, u64, Vec<usize>) = (T::infinity(), u64::MAX, Vec::new());
                let mut diff = vec![C::new(T::zero(), T::zero()); n * n];
                for rank in lo..hi {
                    for i in 0..n {
                        for j in 0..n {
                            diff[i * n + j] = a.entry(i, j) - b.entry(perm[i], perm[j]);
                        }
                    }
                    if probe_lower_bound(&diff, n, n) <= best.0 {
                        let v = cut_norm_value_small(&diff, n, n);
                        if v < best.0 {
                            best = (v, rank, perm.clone());
                        }
                    }
                    if rank + 1 < hi {
                        next_permutation(&mut perm);
                    }
                }
                best
            })
            .reduce_with(|x, y| match x.0.partial_cmp(&y.0).expect("finite") {
                std::cmp::Ordering::Less => x,
                std::cmp::Ordering::Greater => y,
                std::cmp::Ordering::Equal => {
                    if x.1 <= y.1 {
                        x
                    } else {
                        y
                    }
                }
            })
            .expect("at least one chunk")
    });

    let perm = Permutation::from_map(best.2)?;
    let relabeled = b.relabeled(perm.map())?;
    let exact = cut_norm_exact_with(&a.sub(&relabeled)?, &cfg.norm_cfg)?;
    Ok(DistanceResult {
        value: exact.value,
        perm_p: perm,
        perm_q: None,
        blowup_k: 1,
        method: DistanceMethod::Exact,
        bound_kind: BoundKind::ExactAtK,
        certified_value: true,
    })
}

fn exact_boxminus<T: Real>(
    a: &Matrix<T>,
    b: &Matrix<T>,
    cfg: &DistanceConfig,
) -> Result<DistanceResult<T>> {
    let (m, n) = a.shape();
    let row_total = factorial(m);
    let chunk = (row_total.div_ceil(parallel::pool().current_num_threads() as u64 * 4)).max(1);
    let mut spans = Vec::new();
    let mut lo = 0;
    while lo < row_total {
        spans.push((lo, (lo + chunk).min(row_total)));
        lo += chunk;
    }
    type BestPair<T> = (T, (u64, u64), Vec<usize>, Vec<usize>);
    let best: BestPair<T> = parallel::run(|| {
        spans
            .into_par_iter()
            .map(|(lo, hi)| {
                let mut rperm = unrank_permutation(m, lo);
                let mut best: BestPair<T> =
                    (T::infinity(), (u64::MAX, u64::MAX), Vec::new(), Vec::new());
                let mut diff = vec![C::new(T::zero(), T::zero()); m * n];
                for rrank in lo..hi {
                    let mut cperm: Vec<usize> = (0..n).collect();
                    let mut crank = 0u64;
                    loop {
                        for i in 0..m {
                            for j in 0..n {
                                diff[i * n + j] = a.entry(i, j) - b.entry(rperm[i], cperm[j]);
                            }
                        }
                        if probe_lower_bound(&diff, m, n) <= best.0 {
                            let v = cut_norm_value_small(&diff, m, n);
                            if v < best.0 {
                                best = (v, (rrank, crank), rperm.clone(), cperm.clone());
                            }
                        }
                        if !next_permutation(&mut cperm) {
                            break;
                        }
                        crank += 1;
                    }
                    if rrank + 1 < hi {
                        next_permutation(&mut rperm);
                    }
                }
                best
            })
            .reduce_with(|x, y| match x.0.partial_cmp(&y.0).expect("finite") {
                std::cmp::Ordering::Less => x,
                std::cmp::Ordering::Greater => y,
                std::cmp::Ordering::Equal => {
                    if x.1 <= y.1 {
                        x
                    } else {
                        y
                    }
                }
            })
            .expect("at least one chunk")
    });

    let rp = Permutation::from_map(best.2)?;
    let cp = Permutation::from_map(best.3)?;
    let relabeled = b.relabeled_rect(rp.map(), cp.map())?;
    let exact = cut_norm_exact_with(&a.sub(&relabeled)?, &cfg.norm_cfg)?;
    Ok(DistanceResult {
        value: exact.value,
        perm_p: rp,
        perm_q: Some(cp),
        blowup_k: 1,
        method: DistanceMethod::Exact,
        bound_kind: BoundKind::ExactAtK,
        certified_value: true,
    })
}

/// Annealed search over permutations (one for the □ case, a row/column
/// pair for the ⊟ case).
fn anneal_search<T: Real>(
    a: &Matrix<T>,
    b: &Matrix<T>,
    rect: bool,
    cfg: &DistanceConfig,
) -> Result<DistanceResult<T>> {
    let (m, n) = a.shape();
    let size = m.max(n);
    let proposals = cfg.proposals_per_n2 * size * size;

    let score_heuristic = |rp: &[usize], cp: &[usize], seed: u64| -> Result<T> {
        let relabeled = if rect {
            b.relabeled_rect(rp, cp)?
        } else {
            b.relabeled(rp)?
        };
        let diff = a.sub(&relabeled)?;
        Ok(cut_norm_heuristic(&diff, NormKind::Square, seed, 1).value)
    };

    let restarts = cfg.restarts.max(1);
    let runs: Result<Vec<(T, Vec<usize>, Vec<usize>)>> = parallel::run(|| {
        (0..restarts)
            .into_par_iter()
            .map(|r| -> Result<(T, Vec<usize>, Vec<usize>)> {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(0x5EED_0000 + u64::from(r));
                let mut rp: Vec<usize> = (0..m).collect();
                let mut cp: Vec<usize> = (0..n).collect();
                // Random starting relabeling.
                for i in (1..m).rev() {
                    rp.swap(i, rng.gen_range(0..=i));
                }
                if rect {
                    for j in (1..n).rev() {
                        cp.swap(j, rng.gen_range(0..=j));
                    }
                }
                let mut eval_counter = 0u64;
                let mut next_seed = |rng: &mut ChaCha8Rng| {
                    let _ = rng;
                    eval_counter += 1;
                    cfg.seed
                        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
                        .wrapping_add(u64::from(r) << 32)
                        .wrapping_add(eval_counter)
                };
                let s0 = next_seed(&mut rng);
                let mut cur = score_heuristic(&rp, &cp, s0)?;
                let mut best = (cur, rp.clone(), cp.clone());
                if cur == T::zero() {
                    return Ok(best);
                }
                let mut temp = cur.to64();
                for _ in 0..proposals {
                    let flip_rows = !rect || rng.gen_bool(0.5);
                    let (i, j) = {
                        let k = if flip_rows { m } else { n };
                        if k < 2 {
                            continue;
                        }
                        let i = rng.gen_range(0..k);
                        let mut j = rng.gen_range(0..k - 1);
                        if j >= i {
                            j += 1;
                        }
                        (i, j)
                    };
                    if flip_rows {
                        rp.swap(i, j);
                    } else {
                        cp.swap(i, j);
                    }
                    let sd = next_seed(&mut rng);
                    let cand = score_heuristic(&rp, &cp, sd)?;
                    let delta = (cand - cur).to64();
                    let accept = delta <= 0.0
                        || (temp > 0.0 && rng.gen_range(0.0..1.0) < (-delta / temp).exp());
                    if accept {
                        cur = cand;
                        if cur < best.0 {
                            best = (cur, rp.clone(), cp.clone());
                            if cur == T::zero() {
                                break;
                            }
                        }
                    } else if flip_rows {
                        rp.swap(i, j);
                    } else {
                        cp.swap(i, j);
                    }
                    temp *= cfg.cooling;
                }
                Ok(best)
            })
            .collect()
    });
    let runs = runs?;

    // Deterministic merge: smallest value, then lexicographically smallest
    // permutation pair.
    let mut winner = 0usize;
    for i in 1..runs.len() {
        let (wv, wr, wc) = (&runs[winner].0, &runs[winner].1, &runs[winner].2);
        let (cv, cr, cc) = (&runs[i].0, &runs[i].1, &runs[i].2);
        let better = match cv.partial_cmp(wv).expect("finite") {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => (cr, cc) < (wr, wc),
        };
        if better {
            winner = i;
        }
    }
    let (_, rp, cp) = &runs[winner];
    let rp = Permutation::from_map(rp.clone())?;
    let cp_perm = Permutation::from_map(cp.clone())?;

    // Re-score the final witness exactly when feasible; otherwise an
    // intensified heuristic value (still a valid lower bound of the
    // witnessed norm, hence an uncertified distance estimate).
    let relabeled = if rect {
        b.relabeled_rect(rp.map(), cp_perm.map())?
    } else {
        b.relabeled(rp.map())?
    };
    let diff = a.sub(&relabeled)?;
    let (value, certified) = match cut_norm_exact_with(&diff, &cfg.norm_cfg) {
        Ok(r) => (r.value, true),
        Err(Error::Guard(_)) => (
            cut_norm_heuristic(&diff, NormKind::Square, cfg.seed, cfg.restarts.max(8)).value,
            false,
        ),
        Err(e) => return Err(e),
    };

    Ok(DistanceResult {
        value,
        perm_p: rp,
        perm_q: if rect { Some(cp_perm) } else { None },
        blowup_k: 1,
        method: DistanceMethod::Anneal,
        bound_kind: BoundKind::UpperBound,
        certified_value: certified,
    })
}

/// Recompute the cut-norm of the witnessed difference (the invariant
/// every [`DistanceResult`] must satisfy).
pub fn rescore_witness<T: Real>(
    a: &Matrix<T>,
    b: &Matrix<T>,
    result: &DistanceResult<T>,
    cfg: &DistanceConfig,
) -> Result<T> {
    let relabeled = match &result.perm_q {
        Some(q) => b.relabeled_rect(result.perm_p.map(), q.map())?,
        None => b.relabeled(result.perm_p.map())?,
    };
    let diff = a.sub(&relabeled)?;
    if result.certified_value {
        Ok(cut_norm_exact_with(&diff, &cfg.norm_cfg)?.value)
    } else {
        Ok(cut_norm_heuristic(&diff, NormKind::Square, cfg.seed, cfg.restarts.max(8)).value)
    }
}

/// Sum of the permuted difference, used by digest-style consistency checks.
pub fn difference_total<T: Real>(a: &Matrix<T>, b: &Matrix<T>, p: &Permutation) -> Result<C<T>> {
    let relabeled = b.relabeled(p.map())?;
    let diff = a.sub(&relabeled)?;
    let mut acc = KahanSumC::new();
    for z in diff.entries() {
        acc.add(*z);
    }
    Ok(acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::C64;
    use cutspec_oracle as oracle;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type M = Matrix<f64>;

    fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> M {
        let mut e = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in i..n {
                let v = C64::new(rng.gen_range(-1.0..1.0), 0.0);
                e[i * n + j] = v;
                e[j * n + i] = v;
            }
        }
        M::new(n, n, e).unwrap().with_hermitian_flag(0.0).unwrap()
    }

    #[test]
    fn unrank_matches_lexicographic_enumeration() {
        let all = oracle::permutations(5);
        for (rank, want) in all.iter().enumerate() {
            assert_eq!(&unrank_permutation(5, rank as u64), want);
        }
    }

    #[test]
    fn small_norm_helper_matches_engine() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        for _ in 0..40 {
            let m = rng.gen_range(1..=4);
            let n = rng.gen_range(1..=4);
            let complex = rng.gen_bool(0.5);
            let a = M::from_fn(m, n, |_, _| {
                C64::new(
                    rng.gen_range(-1.0..1.0),
                    if complex { rng.gen_range(-1.0..1.0) } else { 0.0 },
                )
            })
            .unwrap();
            let lean = cut_norm_value_small(a.entries(), m, n);
            let full = cut_norm_exact_with(&a, &ExactConfig::default()).unwrap().value;
            assert!((lean - full).abs() <= 1e-12 * full.max(1.0), "{lean} vs {full}");
        }
    }

    #[test]
    fn distance_to_self_is_zero_with_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(52);
        let a = random_symmetric(&mut rng, 4);
        let r = delta_hat_square(&a, &a, SearchMethod::Exact, &DistanceConfig::default()).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.perm_p.map(), &[0, 1, 2, 3]);
        assert_eq!(r.bound_kind, BoundKind::ExactAtK);
    }

    #[test]
    fn distance_to_relabeling_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let a = random_symmetric(&mut rng, 5);
        let p = Permutation::from_map(vec![2, 0, 4, 1, 3]).unwrap();
        let b = a.relabeled(p.map()).unwrap().with_hermitian_flag(0.0).unwrap();
        let r = delta_hat_square(&a, &b, SearchMethod::Exact, &DistanceConfig::default()).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn exact_square_matches_bruteforce() {
        let mut rng = ChaCha8Rng::seed_from_u64(54);
        for _ in 0..8 {
            let n = rng.gen_range(2..=4);
            let a = random_symmetric(&mut rng, n);
            let b = random_symmetric(&mut rng, n);
            let r = delta_hat_square(&a, &b, SearchMethod::Exact, &DistanceConfig::default())
                .unwrap();
            let da = oracle::Dense::new(n, n, a.entries().to_vec());
            let db = oracle::Dense::new(n, n, b.entries().to_vec());
            let want = oracle::delta_hat_square_bruteforce(&da, &db);
            assert!((r.value - want).abs() <= 1e-12 * want.max(1.0));
        }
    }

    #[test]
    fn exact_boxminus_matches_bruteforce() {
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        for _ in 0..6 {
            let m = rng.gen_range(2..=3);
            let n = rng.gen_range(2..=3);
            let a = M::from_fn(m, n, |_, _| C64::new(rng.gen_range(-1.0..1.0), 0.0)).unwrap();
            let b = M::from_fn(m, n, |_, _| C64::new(rng.gen_range(-1.0..1.0), 0.0)).unwrap();
            let r = delta_hat_boxminus(&a, &b, SearchMethod::Exact, &DistanceConfig::default())
                .unwrap();
            let da = oracle::Dense::new(m, n, a.entries().to_vec());
            let db = oracle::Dense::new(m, n, b.entries().to_vec());
            let want = oracle::delta_hat_boxminus_bruteforce(&da, &db);
            assert!((r.value - want).abs() <= 1e-12 * want.max(1.0));
        }
    }

    #[test]
    fn boxminus_at_most_square_for_hermitian_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(56);
        for _ in 0..6 {
            let n = rng.gen_range(2..=4);
            let a = random_symmetric(&mut rng, n);
            let b = random_symmetric(&mut rng, n);
            let cfg = DistanceConfig::default();
            let sq = delta_hat_square(&a, &b, SearchMethod::Exact, &cfg).unwrap();
            let bm = delta_hat_boxminus(&a, &b, SearchMethod::Exact, &cfg).unwrap();
            assert!(bm.value <= sq.value + 1e-9);
        }
    }

    #[test]
    fn symmetry_of_distances() {
        let mut rng = ChaCha8Rng::seed_from_u64(57);
        let cfg = DistanceConfig::default();
        for _ in 0..5 {
            let n = rng.gen_range(2..=4);
            let a = random_symmetric(&mut rng, n);
            let b = random_symmetric(&mut rng, n);
            let ab = delta_hat_square(&a, &b, SearchMethod::Exact, &cfg).unwrap();
            let ba = delta_hat_square(&b, &a, SearchMethod::Exact, &cfg).unwrap();
            assert!((ab.value - ba.value).abs() < 1e-12);
        }
    }

    #[test]
    fn anneal_never_beats_exact_and_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(58);
        let mut cfg = DistanceConfig::default();
        cfg.proposals_per_n2 = 20;
        cfg.restarts = 2;
        for _ in 0..4 {
            let n = rng.gen_range(2..=4);
            let a = random_symmetric(&mut rng, n);
            let b = random_symmetric(&mut rng, n);
            let exact = delta_hat_square(&a, &b, SearchMethod::Exact, &cfg).unwrap();
            let ann1 = delta_hat_square(&a, &b, SearchMethod::Anneal, &cfg).unwrap();
            let ann2 = delta_hat_square(&a, &b, SearchMethod::Anneal, &cfg).unwrap();
            assert!(ann1.value >= exact.value - 1e-9);
            assert_eq!(ann1.value, ann2.value);
            assert_eq!(ann1.perm_p.map(), ann2.perm_p.map());
            assert!(ann1.certified_value);
        }
    }

    #[test]
    fn estimate_sequence_on_blowup_pair_reaches_zero() {
        // B and A = B^(2): the k = 1 level compares B^(2)^(m)-aligned
        // copies that contain an exact relabeling with zero difference.
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        let b = random_symmetric(&mut rng, 2);
        let a = blowup_square(&b, 2).unwrap();
        let cfg = DistanceConfig::default();
        let seq = delta_square_estimate(&a, &b, 1, SearchMethod::Auto, &cfg).unwrap();
        assert_eq!(seq.len(), 1);
        assert_eq!(seq[0].value, 0.0);
        assert_eq!(seq[0].blowup_k, 1);
    }

    #[test]
    fn estimate_is_exact_bruteforce_at_tiny_sizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(60);
        let a = random_symmetric(&mut rng, 2);
        let b = random_symmetric(&mut rng, 3);
        let cfg = DistanceConfig::default();
        let seq = delta_square_estimate(&a, &b, 1, SearchMethod::Auto, &cfg).unwrap();
        assert_eq!(seq[0].method, DistanceMethod::Exact);
        // Oracle: brute force over all 720 permutations of the size-6
        // blow-ups.
        let ab = blowup_square(&a, 3).unwrap();
        let bb = blowup_square(&b, 2).unwrap();
        let da = oracle::Dense::new(6, 6, ab.entries().to_vec());
        let db = oracle::Dense::new(6, 6, bb.entries().to_vec());
        let want = oracle::delta_hat_square_bruteforce(&da, &db);
        assert!((seq[0].value - want).abs() <= 1e-12 * want.max(1.0));
    }

    #[test]
    fn triangle_inequality_at_fixed_size() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let cfg = DistanceConfig::default();
        for _ in 0..5 {
            let n = rng.gen_range(2..=4);
            let a = random_symmetric(&mut rng, n);
            let b = random_symmetric(&mut rng, n);
            let c = random_symmetric(&mut rng, n);
            let ab = delta_hat_square(&a, &b, SearchMethod::Exact, &cfg).unwrap().value;
            let ac = delta_hat_square(&a, &c, SearchMethod::Exact, &cfg).unwrap().value;
            let cb = delta_hat_square(&c, &b, SearchMethod::Exact, &cfg).unwrap().value;
            assert!(ab <= ac + cb + 1e-9);
        }
    }

    #[test]
    fn guards_and_preconditions() {
        let a = M::ones(12, 12);
        let b = M::ones(12, 12);
        assert!(matches!(
            delta_hat_square(&a, &b, SearchMethod::Exact, &DistanceConfig::default()),
            Err(Error::Guard(_))
        ));
        let ns = M::from_real(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!(matches!(
            delta_hat_square(&ns, &ns, SearchMethod::Exact, &DistanceConfig::default()),
            Err(Error::Precondition(_))
        ));
        let r = M::ones(2, 3);
        let s = M::ones(3, 2);
        assert!(delta_hat_boxminus(&r, &s, SearchMethod::Exact, &DistanceConfig::default()).is_err());
    }
}
