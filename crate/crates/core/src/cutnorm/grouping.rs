//! Row collapse for the exact searches.
//!
//! Two index sets whose symmetric difference is a set of rows canceling in
//! pairs produce the same column sums; the one with fewer rows never has
//! the smaller objective (the □ denominator ignores |X|, the ⊡ denominator
//! grows with it). So rows that are bitwise equal up to sign collapse into
//! one group carrying a signed multiplicity, and the search runs over
//! coefficient tuples `c_g ∈ [-q_g, p_g]` instead of raw subsets.

use crate::matrix::Matrix;
use crate::scalar::{Real, C};
use std::collections::HashMap;

pub(super) struct Grouping<T: Real> {
    /// Sign-canonical representative rows.
    pub reps: Vec<Vec<C<T>>>,
    /// Original row indices equal to the representative, ascending.
    pub plus: Vec<Vec<usize>>,
    /// Original row indices equal to its negation, ascending.
    pub minus: Vec<Vec<usize>>,
    /// Identically zero rows; never part of a minimal witness.
    pub zero_rows: Vec<usize>,
    pub row_count: usize,
}

impl<T: Real> Grouping<T> {
    pub fn radices(&self) -> Vec<u32> {
        self.plus
            .iter()
            .zip(&self.minus)
            .map(|(p, m)| (p.len() + m.len() + 1) as u32)
            .collect()
    }

    pub fn cardinality(&self) -> Option<u64> {
        let mut total = 1u64;
        for r in self.radices() {
            total = total.checked_mul(u64::from(r))?;
        }
        Some(total)
    }

    /// Gray digit -> signed coefficient for group `g`.
    #[inline]
    pub fn coefficient(&self, g: usize, digit: u32) -> i64 {
        i64::from(digit) - self.minus[g].len() as i64
    }

    /// Rows realizing coefficient tuple `coeffs` with minimal cardinality:
    /// the first `|c|` members of the matching sign list.
    pub fn realize(&self, coeffs: &[i64]) -> Vec<usize> {
        let mut rows = Vec::new();
        for (g, &c) in coeffs.iter().enumerate() {
            if c > 0 {
                rows.extend_from_slice(&self.plus[g][..c as usize]);
            } else if c < 0 {
                rows.extend_from_slice(&self.minus[g][..(-c) as usize]);
            }
        }
        rows.sort_unstable();
        rows
    }

    /// Coefficient tuple representing an arbitrary row set, after sign
    /// cancellation. Zero rows are dropped.
    pub fn project(&self, rows: &[usize]) -> Vec<i64> {
        let mut member_of: HashMap<usize, (usize, i64)> = HashMap::new();
        for (g, list) in self.plus.iter().enumerate() {
            for &r in list {
                member_of.insert(r, (g, 1));
            }
        }
        for (g, list) in self.minus.iter().enumerate() {
            for &r in list {
                member_of.insert(r, (g, -1));
            }
        }
        let mut coeffs = vec![0i64; self.reps.len()];
        for &r in rows {
            if let Some(&(g, s)) = member_of.get(&r) {
                coeffs[g] += s;
            }
        }
        coeffs
    }
}

fn row_key<T: Real>(row: &[C<T>]) -> (Vec<u64>, i8) {
    // Sign canonical form: first nonzero component positive. Keys use the
    // f64 bit pattern (exact for f32 upcasts) with -0.0 normalized.
    let mut sign = 0i8;
    for z in row {
        if z.re != T::zero() {
            sign = if z.re > T::zero() { 1 } else { -1 };
            break;
        }
        if z.im != T::zero() {
            sign = if z.im > T::zero() { 1 } else { -1 };
            break;
        }
    }
    let s = if sign == 0 { T::one() } else if sign > 0 { T::one() } else { -T::one() };
    let mut key = Vec::with_capacity(row.len() * 2);
    for z in row {
        let re = z.re * s;
        let im = z.im * s;
        key.push((if re == T::zero() { 0.0 } else { re.to64() }).to_bits());
        key.push((if im == T::zero() { 0.0 } else { im.to64() }).to_bits());
    }
    (key, sign)
}

/// Group the rows of `a` (or of its transpose) by sign-canonical content.
pub(super) fn group_rows<T: Real>(a: &Matrix<T>, transposed: bool) -> Grouping<T> {
    let (rows, cols) = if transposed {
        (a.cols(), a.rows())
    } else {
        (a.rows(), a.cols())
    };
    let fetch = |i: usize| -> Vec<C<T>> {
        (0..cols)
            .map(|j| {
                if transposed {
                    a.entry(j, i)
                } else {
                    a.entry(i, j)
                }
            })
            .collect()
    };
    let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut g = Grouping {
        reps: Vec::new(),
        plus: Vec::new(),
        minus: Vec::new(),
        zero_rows: Vec::new(),
        row_count: rows,
    };
    for i in 0..rows {
        let row = fetch(i);
        let (key, sign) = row_key(&row);
        if sign == 0 {
            g.zero_rows.push(i);
            continue;
        }
        let gid = *index.entry(key).or_insert_with(|| {
            let canonical: Vec<C<T>> = if sign > 0 {
                row.clone()
            } else {
                row.iter().map(|z| -z).collect()
            };
            g.reps.push(canonical);
            g.plus.push(Vec::new());
            g.minus.push(Vec::new());
            g.reps.len() - 1
        });
        if sign > 0 {
            g.plus[gid].push(i);
        } else {
            g.minus[gid].push(i);
        }
    }
    g
}
