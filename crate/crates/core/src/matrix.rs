//! Dense complex matrices with cached aggregates, index sets over rows or
//! columns, and compensated submatrix sums.
//!
//! A [`Matrix`] is immutable after construction; derived data (aggregates,
//! row prefix tables) is computed lazily behind `OnceLock` so concurrent
//! first use is idempotent. Indices are 0-based internally; report layers
//! add 1 for human-facing output.

use crate::error::{Error, Result};
use crate::scalar::{Real, C};
use std::sync::OnceLock;

/// Neumaier-compensated accumulator. Subset sums get compared against
/// analytic equalities, so plain accumulation is not good enough.
#[derive(Clone, Copy, Debug)]
pub struct KahanSum<T: Real> {
    sum: T,
    comp: T,
}

impl<T: Real> KahanSum<T> {
    pub fn new() -> Self {
        KahanSum {
            sum: T::zero(),
            comp: T::zero(),
        }
    }

    #[inline]
    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp = self.comp + ((self.sum - t) + x);
        } else {
            self.comp = self.comp + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum + self.comp
    }
}

impl<T: Real> Default for KahanSum<T> {
    fn default() -> Self {
        Self::new()
    }
}

/// Compensated sum of complex terms (real and imaginary parts tracked
/// separately).
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSumC<T: Real> {
    re: KahanSum<T>,
    im: KahanSum<T>,
}

impl<T: Real> KahanSumC<T> {
    pub fn new() -> Self {
        KahanSumC {
            re: KahanSum::new(),
            im: KahanSum::new(),
        }
    }

    #[inline]
    pub fn add(&mut self, z: C<T>) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> C<T> {
        C::new(self.re.value(), self.im.value())
    }
}

/// Elementary aggregates of a matrix, computed once per matrix.
#[derive(Clone, Copy, Debug)]
pub struct Aggregates<T: Real> {
    /// `max |a_ij|`
    pub inf_norm: T,
    /// Frobenius norm
    pub frobenius: T,
    /// Sum of all entries
    pub total_sum: C<T>,
    /// `total_sum / (m n)`
    pub density: C<T>,
}

/// Dense complex matrix in row-major order.
#[derive(Debug)]
pub struct Matrix<T: Real> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
    hermitian: bool,
    aggregates: OnceLock<Aggregates<T>>,
    // prefix[i * (cols + 1) + q] = sum of the first q entries of row i.
    prefix: OnceLock<Vec<C<T>>>,
}

impl<T: Real> Clone for Matrix<T> {
    fn clone(&self) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.clone(),
            hermitian: self.hermitian,
            aggregates: OnceLock::new(),
            prefix: OnceLock::new(),
        }
    }
}

impl<T: Real> PartialEq for Matrix<T> {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.data == other.data
    }
}

impl<T: Real> Matrix<T> {
    /// Build a matrix from row-major complex entries. Rejects empty
    /// dimensions, wrong entry counts, and non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<C<T>>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Numerical("matrix entries must be finite".into()));
        }
        Ok(Matrix {
            rows,
            cols,
            data,
            hermitian: false,
            aggregates: OnceLock::new(),
            prefix: OnceLock::new(),
        })
    }

    pub fn from_real(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        Self::new(
            rows,
            cols,
            data.into_iter().map(|x| C::new(x, T::zero())).collect(),
        )
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::new(rows, cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::new(rows, cols, vec![C::new(T::zero(), T::zero()); rows * cols])
            .expect("positive dimensions")
    }

    /// The all-ones matrix `J_{m,n}`.
    pub fn ones(rows: usize, cols: usize) -> Self {
        let mut m = Self::new(rows, cols, vec![C::new(T::one(), T::zero()); rows * cols])
            .expect("positive dimensions");
        m.hermitian = rows == cols;
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> C<T> {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[C<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[C<T>] {
        &self.data
    }

    /// True when every entry has zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == T::zero())
    }

    /// The Hermitian flag set at construction or ingest time.
    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// Whether `a_ij = conj(a_ji)` for all pairs, within `tol` entrywise.
    pub fn hermitian_within(&self, tol: T) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            for j in i..self.cols {
                let d = self.entry(i, j) - self.entry(j, i).conj();
                if d.re.abs() > tol || d.im.abs() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// Set the Hermitian flag after verifying the symmetry within `tol`
    /// (use `T::zero()` for exactly constructed matrices, `1e-12` for
    /// ingested ones).
    pub fn with_hermitian_flag(mut self, tol: T) -> Result<Self> {
        if !self.hermitian_within(tol) {
            return Err(Error::Precondition(
                "matrix is not Hermitian within the requested tolerance".into(),
            ));
        }
        self.hermitian = true;
        Ok(self)
    }

    /// Set the Hermitian flag without checking; for constructors that
    /// guarantee the symmetry structurally.
    pub(crate) fn assume_hermitian(mut self) -> Self {
        debug_assert!(self.hermitian_within(T::of(1e-12)));
        self.hermitian = true;
        self
    }

    pub fn transpose(&self) -> Matrix<T> {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.entry(i, j));
            }
        }
        let mut m = Matrix::new(self.cols, self.rows, data).expect("same entry count");
        m.hermitian = false;
        m
    }

    pub fn conj_transpose(&self) -> Matrix<T> {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.entry(i, j).conj());
            }
        }
        let mut m = Matrix::new(self.cols, self.rows, data).expect("same entry count");
        m.hermitian = self.hermitian;
        m
    }

    pub fn scale(&self, c: C<T>) -> Matrix<T> {
        let data = self.data.iter().map(|&z| z * c).collect();
        let mut m = Matrix::new(self.rows, self.cols, data).expect("same entry count");
        m.hermitian = self.hermitian && c.im == T::zero();
        m
    }

    pub fn add(&self, other: &Matrix<T>) -> Result<Matrix<T>> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Matrix<T>) -> Result<Matrix<T>> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Matrix<T>, f: impl Fn(C<T>, C<T>) -> C<T>) -> Result<Matrix<T>> {
        if self.shape() != other.shape() {
            return Err(Error::Dimension(format!(
                "shape mismatch: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f(a, b))
            .collect();
        let mut m = Matrix::new(self.rows, self.cols, data)?;
        m.hermitian = self.hermitian && other.hermitian;
        Ok(m)
    }

    /// Matrix-vector product `A x`.
    pub fn matvec(&self, x: &[C<T>]) -> Result<Vec<C<T>>> {
        if x.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector length {} does not match {} columns",
                x.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = KahanSumC::new();
                for (j, &xj) in x.iter().enumerate() {
                    acc.add(self.entry(i, j) * xj);
                }
                acc.value()
            })
            .collect())
    }

    /// The submatrix `A[X, Y]` as a new matrix. Empty selections are a
    /// dimension error because matrices here always have positive size.
    pub fn submatrix(&self, x: &IndexSet, y: &IndexSet) -> Result<Matrix<T>> {
        self.check_sets(x, y)?;
        if x.len() == 0 || y.len() == 0 {
            return Err(Error::Dimension("submatrix selection must be nonempty".into()));
        }
        let xs: Vec<usize> = x.members().collect();
        let ys: Vec<usize> = y.members().collect();
        let mut data = Vec::with_capacity(xs.len() * ys.len());
        for &i in &xs {
            for &j in &ys {
                data.push(self.entry(i, j));
            }
        }
        Matrix::new(xs.len(), ys.len(), data)
    }

    fn check_sets(&self, x: &IndexSet, y: &IndexSet) -> Result<()> {
        if x.universe() != self.rows {
            return Err(Error::Dimension(format!(
                "row index set is over [{}], matrix has {} rows",
                x.universe(),
                self.rows
            )));
        }
        if y.universe() != self.cols {
            return Err(Error::Dimension(format!(
                "column index set is over [{}], matrix has {} columns",
                y.universe(),
                self.cols
            )));
        }
        Ok(())
    }

    /// `Σ(A[X, Y])`: the sum of entries with row in `X` and column in `Y`.
    /// Empty sets give 0. Column-prefix sets use the lazily built per-row
    /// prefix table, costing `O(|X|)`; general sets accumulate entrywise
    /// with compensation.
    pub fn submatrix_sum(&self, x: &IndexSet, y: &IndexSet) -> Result<C<T>> {
        self.check_sets(x, y)?;
        if x.len() == 0 || y.len() == 0 {
            return Ok(C::new(T::zero(), T::zero()));
        }
        if let Some(q) = y.as_prefix() {
            let pref = self.prefix_table();
            let stride = self.cols + 1;
            let mut acc = KahanSumC::new();
            for i in x.members() {
                acc.add(pref[i * stride + q]);
            }
            return Ok(acc.value());
        }
        let mut acc = KahanSumC::new();
        for i in x.members() {
            let row = self.row(i);
            for j in y.members() {
                acc.add(row[j]);
            }
        }
        Ok(acc.value())
    }

    fn prefix_table(&self) -> &[C<T>] {
        self.prefix.get_or_init(|| {
            let stride = self.cols + 1;
            let mut pref = Vec::with_capacity(self.rows * stride);
            for i in 0..self.rows {
                let mut acc = KahanSumC::new();
                pref.push(C::new(T::zero(), T::zero()));
                for j in 0..self.cols {
                    acc.add(self.entry(i, j));
                    pref.push(acc.value());
                }
            }
            pref
        })
    }

    /// `(|A|_∞, ‖A‖_F, Σ(A), ρ(A))`, cached after first use. The total sum
    /// uses the same summation order as `submatrix_sum` over full sets.
    pub fn aggregates(&self) -> &Aggregates<T> {
        self.aggregates.get_or_init(|| {
            let mut inf = T::zero();
            let mut frob = KahanSum::new();
            for z in &self.data {
                let a = z.norm();
                if a > inf {
                    inf = a;
                }
                frob.add(z.norm_sqr());
            }
            let total = self
                .submatrix_sum(&IndexSet::full(self.rows), &IndexSet::full(self.cols))
                .expect("full sets are valid");
            let mn = T::from_usize(self.rows * self.cols).expect("size fits scalar");
            Aggregates {
                inf_norm: inf,
                frobenius: frob.value().sqrt(),
                total_sum: total,
                density: total / C::new(mn, T::zero()),
            }
        })
    }

    /// `|A|_∞`
    pub fn max_abs(&self) -> T {
        self.aggregates().inf_norm
    }

    /// Relabel a square matrix by `perm`: `result[i][j] = A[p(i)][p(j)]`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Matrix<T>> {
        if !self.is_square() || perm.len() != self.rows {
            return Err(Error::Dimension(
                "relabeling needs a square matrix and a permutation of its size".into(),
            ));
        }
        let mut m = Matrix::from_fn(self.rows, self.cols, |i, j| self.entry(perm[i], perm[j]))?;
        m.hermitian = self.hermitian;
        Ok(m)
    }

    /// Apply independent row and column relabelings:
    /// `result[i][j] = A[rp(i)][cp(j)]`.
    pub fn relabeled_rect(&self, row_perm: &[usize], col_perm: &[usize]) -> Result<Matrix<T>> {
        if row_perm.len() != self.rows || col_perm.len() != self.cols {
            return Err(Error::Dimension(
                "row/column permutations must match the matrix shape".into(),
            ));
        }
        Matrix::from_fn(self.rows, self.cols, |i, j| {
            self.entry(row_perm[i], col_perm[j])
        })
    }

    /// Real parts of all entries, row-major. Callers that take a fast
    /// real-only path check `is_real` first.
    pub fn real_entries(&self) -> Vec<T> {
        self.data.iter().map(|z| z.re).collect()
    }
}

/// A subset of `[0, universe)`, stored as a bitmask when the universe fits
/// in 64 bits and as a sorted index list otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexSet {
    universe: usize,
    repr: SetRepr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum SetRepr {
    Mask(u64),
    List(Vec<usize>),
}

impl IndexSet {
    pub fn empty(universe: usize) -> Self {
        if universe <= 64 {
            IndexSet {
                universe,
                repr: SetRepr::Mask(0),
            }
        } else {
            IndexSet {
                universe,
                repr: SetRepr::List(Vec::new()),
            }
        }
    }

    pub fn full(universe: usize) -> Self {
        Self::from_sorted(universe, (0..universe).collect()).expect("full set is valid")
    }

    /// Build from member indices; duplicates and out-of-range indices are
    /// rejected. Input need not be sorted.
    pub fn from_members(universe: usize, mut members: Vec<usize>) -> Result<Self> {
        members.sort_unstable();
        Self::from_sorted(universe, members)
    }

    fn from_sorted(universe: usize, members: Vec<usize>) -> Result<Self> {
        if let Some(&last) = members.last() {
            if last >= universe {
                return Err(Error::Dimension(format!(
                    "index {last} out of range for universe [{universe}]"
                )));
            }
        }
        if members.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Dimension("duplicate index in set".into()));
        }
        if universe <= 64 {
            let mut mask = 0u64;
            for &i in &members {
                mask |= 1 << i;
            }
            Ok(IndexSet {
                universe,
                repr: SetRepr::Mask(mask),
            })
        } else {
            Ok(IndexSet {
                universe,
                repr: SetRepr::List(members),
            })
        }
    }

    pub fn from_mask(universe: usize, mask: u64) -> Result<Self> {
        if universe > 64 {
            return Err(Error::Dimension("mask form only for universes up to 64".into()));
        }
        if universe < 64 && mask >> universe != 0 {
            return Err(Error::Dimension("mask has bits outside the universe".into()));
        }
        Ok(IndexSet {
            universe,
            repr: SetRepr::Mask(mask),
        })
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn len(&self) -> usize {
        match &self.repr {
            SetRepr::Mask(m) => m.count_ones() as usize,
            SetRepr::List(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, i: usize) -> bool {
        match &self.repr {
            SetRepr::Mask(m) => i < 64 && (m >> i) & 1 == 1,
            SetRepr::List(v) => v.binary_search(&i).is_ok(),
        }
    }

    /// Ascending member iterator.
    pub fn members(&self) -> Box<dyn Iterator<Item = usize> + '_> {
        match &self.repr {
            SetRepr::Mask(m) => {
                let mask = *m;
                Box::new((0..64).filter(move |i| (mask >> i) & 1 == 1))
            }
            SetRepr::List(v) => Box::new(v.iter().copied()),
        }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.members().collect()
    }

    /// `Some(q)` when the set is exactly `{0, 1, …, q-1}`.
    pub fn as_prefix(&self) -> Option<usize> {
        let k = self.len();
        if self.members().enumerate().all(|(pos, i)| pos == i) {
            Some(k)
        } else {
            None
        }
    }

    /// 1-based members, for reports.
    pub fn one_based(&self) -> Vec<usize> {
        self.members().map(|i| i + 1).collect()
    }

    /// Order sets as binary numbers with bit `i` = membership of index `i`;
    /// used for the reproducible witness tie-break (smallest mask wins).
    pub fn mask_cmp(&self, other: &IndexSet) -> std::cmp::Ordering {
        mask_order(&self.to_vec(), &other.to_vec())
    }
}

/// Bitmask order on sorted index slices: the highest differing index
/// decides, and the set containing it is the larger.
pub(crate) fn mask_order(a: &[usize], b: &[usize]) -> std::cmp::Ordering {
    debug_assert!(a.windows(2).all(|w| w[0] < w[1]));
    debug_assert!(b.windows(2).all(|w| w[0] < w[1]));
    let mut ia = a.iter().rev();
    let mut ib = b.iter().rev();
    loop {
        match (ia.next(), ib.next()) {
            (None, None) => return std::cmp::Ordering::Equal,
            (None, Some(_)) => return std::cmp::Ordering::Less,
            (Some(_), None) => return std::cmp::Ordering::Greater,
            (Some(x), Some(y)) if x == y => continue,
            (Some(x), Some(y)) => return x.cmp(y),
        }
    }
}
