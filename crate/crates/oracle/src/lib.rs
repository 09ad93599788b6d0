//! Naive reference implementations for cross-checking the main crate.
//!
//! Everything here trades speed for obviousness: plain double loops, full
//! subset enumeration over both dimensions, textbook Jacobi sweeps. None of
//! it shares code with the optimized paths it is used to verify.

use num_complex::Complex;

pub type C64 = Complex<f64>;

/// Row-major dense view used by the oracles; deliberately minimal.
#[derive(Clone, Debug)]
pub struct Dense {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<C64>,
}

impl Dense {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Dense { rows, cols, data }
    }

    pub fn from_real(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        Self::new(
            rows,
            cols,
            data.into_iter().map(|x| Complex::new(x, 0.0)).collect(),
        )
    }

    pub fn at(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }
}

/// Plain double-loop submatrix sum.
pub fn submatrix_sum(a: &Dense, x: &[usize], y: &[usize]) -> C64 {
    let mut s = Complex::new(0.0, 0.0);
    for &i in x {
        for &j in y {
            s += a.at(i, j);
        }
    }
    s
}

/// `(inf_norm, frobenius, total_sum, density)` by naive loops.
pub fn aggregates(a: &Dense) -> (f64, f64, C64, C64) {
    let mut inf: f64 = 0.0;
    let mut fr = 0.0;
    let mut tot = Complex::new(0.0, 0.0);
    for z in &a.data {
        inf = inf.max(z.norm());
        fr += z.norm_sqr();
        tot += z;
    }
    let mn = (a.rows * a.cols) as f64;
    (inf, fr.sqrt(), tot, tot / mn)
}

fn subsets(n: usize) -> impl Iterator<Item = u64> {
    assert!(n <= 24, "oracle enumeration is for small matrices only");
    0..(1u64 << n)
}

fn mask_members(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| (mask >> i) & 1 == 1).collect()
}

/// Exhaustive cut-norm: max over all subset pairs of |Σ(A[X,Y])| / (mn).
/// Ties prefer the smallest X mask, then the smallest Y mask.
pub fn cut_norm_bruteforce(a: &Dense) -> (f64, u64, u64) {
    let mut best = (f64::NEG_INFINITY, 0u64, 0u64);
    for xm in subsets(a.rows) {
        let x = mask_members(xm);
        for ym in subsets(a.cols) {
            let y = mask_members(ym);
            let v = submatrix_sum(a, &x, &y).norm();
            if v > best.0 {
                best = (v, xm, ym);
            }
        }
    }
    (best.0 / (a.rows * a.cols) as f64, best.1, best.2)
}

/// Exhaustive ⊡-norm: max over nonempty subset pairs of
/// |Σ(A[X,Y])| / sqrt(|X||Y|).
pub fn boxdot_norm_bruteforce(a: &Dense) -> (f64, u64, u64) {
    let mut best = (f64::NEG_INFINITY, 0u64, 0u64);
    for xm in subsets(a.rows).skip(1) {
        let x = mask_members(xm);
        for ym in subsets(a.cols).skip(1) {
            let y = mask_members(ym);
            let v = submatrix_sum(a, &x, &y).norm() / ((x.len() * y.len()) as f64).sqrt();
            if v > best.0 {
                best = (v, xm, ym);
            }
        }
    }
    (best.0, best.1, best.2)
}

/// Exact ⊡-norm of an entrywise positive matrix whose entries decrease
/// along rows and along columns. For such matrices an exchange argument
/// confines the optimum to prefix pairs [p] x [q], so an O(n^2) scan over
/// prefix rectangles is exhaustive. Used for witnesses too large for full
/// subset enumeration.
pub fn boxdot_norm_positive_monotone(a: &Dense) -> f64 {
    for z in &a.data {
        assert!(z.im == 0.0 && z.re > 0.0, "requires a positive real matrix");
    }
    for i in 0..a.rows {
        for j in 0..a.cols {
            if i + 1 < a.rows {
                assert!(a.at(i + 1, j).re <= a.at(i, j).re, "rows must be decreasing");
            }
            if j + 1 < a.cols {
                assert!(a.at(i, j + 1).re <= a.at(i, j).re, "columns must be decreasing");
            }
        }
    }
    let mut best = f64::NEG_INFINITY;
    let mut row_sum = vec![0.0f64; a.cols];
    for p in 1..=a.rows {
        for (j, rs) in row_sum.iter_mut().enumerate() {
            *rs += a.at(p - 1, j).re;
        }
        let mut s = 0.0;
        for q in 1..=a.cols {
            s += row_sum[q - 1];
            let v = s / ((p * q) as f64).sqrt();
            if v > best {
                best = v;
            }
        }
    }
    best
}

/// All permutations of [0, n) in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    assert!(n <= 9, "oracle permutation enumeration is for tiny sizes");
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        // next_permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
    out
}

/// Build the permutation matrix P with P[i][p[i]] = 1.
pub fn perm_matrix(p: &[usize]) -> Dense {
    let n = p.len();
    let mut data = vec![Complex::new(0.0, 0.0); n * n];
    for (i, &pi) in p.iter().enumerate() {
        data[i * n + pi] = Complex::new(1.0, 0.0);
    }
    Dense::new(n, n, data)
}

pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    assert_eq!(a.cols, b.rows);
    let mut data = vec![Complex::new(0.0, 0.0); a.rows * b.cols];
    for i in 0..a.rows {
        for k in 0..a.cols {
            let aik = a.at(i, k);
            for j in 0..b.cols {
                data[i * b.cols + j] += aik * b.at(k, j);
            }
        }
    }
    Dense::new(a.rows, b.cols, data)
}

pub fn sub(a: &Dense, b: &Dense) -> Dense {
    assert_eq!((a.rows, a.cols), (b.rows, b.cols));
    Dense::new(
        a.rows,
        a.cols,
        a.data.iter().zip(&b.data).map(|(x, y)| x - y).collect(),
    )
}

/// δ̂_□ by brute force: min over all permutation matrices P of the
/// brute-force cut-norm of A - P B P^{-1}, built by explicit matrix
/// products.
pub fn delta_hat_square_bruteforce(a: &Dense, b: &Dense) -> f64 {
    assert_eq!(a.rows, a.cols);
    assert_eq!((a.rows, a.cols), (b.rows, b.cols));
    let mut best = f64::INFINITY;
    for p in permutations(a.rows) {
        let pm = perm_matrix(&p);
        let pinv = perm_matrix(&invert(&p));
        let conj = matmul(&matmul(&pm, b), &pinv);
        let (v, _, _) = cut_norm_bruteforce(&sub(a, &conj));
        if v < best {
            best = v;
        }
    }
    best
}

/// δ̂_⊟ by brute force over independent row/column permutation pairs.
pub fn delta_hat_boxminus_bruteforce(a: &Dense, b: &Dense) -> f64 {
    assert_eq!((a.rows, a.cols), (b.rows, b.cols));
    let mut best = f64::INFINITY;
    for p in permutations(a.rows) {
        let pb = matmul(&perm_matrix(&p), b);
        for q in permutations(a.cols) {
            let pbq = matmul(&pb, &perm_matrix(&q));
            let (v, _, _) = cut_norm_bruteforce(&sub(a, &pbq));
            if v < best {
                best = v;
            }
        }
    }
    best
}

pub fn invert(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &pi) in p.iter().enumerate() {
        inv[pi] = i;
    }
    inv
}

/// Eigenvalues of a real symmetric matrix by textbook cyclic Jacobi,
/// returned in descending order.
pub fn sym_eigenvalues(a: &Dense) -> Vec<f64> {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    let mut m: Vec<f64> = a.data.iter().map(|z| z.re).collect();
    for z in &a.data {
        assert!(z.im == 0.0, "oracle eigensolver takes real symmetric input");
    }
    let at = |m: &Vec<f64>, i: usize, j: usize| m[i * n + j];
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                off += at(&m, i, j).powi(2);
            }
        }
        let scale: f64 = m.iter().map(|x| x * x).sum::<f64>().max(1e-300);
        if off <= 1e-26 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = at(&m, p, q);
                if apq == 0.0 {
                    continue;
                }
                let app = at(&m, p, p);
                let aqq = at(&m, q, q);
                let tau = (aqq - app) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = at(&m, k, p);
                    let akq = at(&m, k, q);
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = at(&m, p, k);
                    let aqk = at(&m, q, k);
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| at(&m, i, i)).collect();
    eig.sort_by(|a, b| b.partial_cmp(a).unwrap());
    eig
}

/// Eigenvalues of a complex Hermitian matrix via the real symmetric
/// embedding [[Re, -Im], [Im, Re]], whose spectrum is that of A with
/// every eigenvalue doubled in multiplicity.
pub fn hermitian_eigenvalues(a: &Dense) -> Vec<f64> {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    let mut big = vec![0.0f64; 4 * n * n];
    let stride = 2 * n;
    for i in 0..n {
        for j in 0..n {
            let z = a.at(i, j);
            big[i * stride + j] = z.re;
            big[i * stride + (n + j)] = -z.im;
            big[(n + i) * stride + j] = z.im;
            big[(n + i) * stride + (n + j)] = z.re;
        }
    }
    let eig = sym_eigenvalues(&Dense::from_real(2 * n, 2 * n, big));
    // Every eigenvalue appears twice; take every other one.
    eig.into_iter().step_by(2).collect()
}

/// Singular values via the Hermitian oracle applied to A* A.
pub fn singular_values(a: &Dense) -> Vec<f64> {
    let n = a.cols;
    let mut g = vec![Complex::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            let mut s = Complex::new(0.0, 0.0);
            for k in 0..a.rows {
                s += a.at(k, i).conj() * a.at(k, j);
            }
            g[i * n + j] = s;
        }
    }
    let eig = hermitian_eigenvalues(&Dense::new(n, n, g));
    let mut sv: Vec<f64> = eig.into_iter().map(|x| x.max(0.0).sqrt()).collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv.truncate(a.rows.min(a.cols));
    sv
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bruteforce_cut_norm_of_ones() {
        let j = Dense::from_real(2, 3, vec![1.0; 6]);
        let (v, xm, ym) = cut_norm_bruteforce(&j);
        assert!((v - 1.0).abs() < 1e-15);
        assert_eq!(xm, 0b11);
        assert_eq!(ym, 0b111);
    }

    #[test]
    fn bruteforce_boxdot_of_ones() {
        let j = Dense::from_real(2, 2, vec![1.0; 4]);
        let (v, _, _) = boxdot_norm_bruteforce(&j);
        assert!((v - 2.0).abs() < 1e-15);
    }

    #[test]
    fn sym_eigenvalues_of_diag() {
        let d = Dense::from_real(3, 3, vec![3.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 2.0]);
        let e = sym_eigenvalues(&d);
        assert!((e[0] - 3.0).abs() < 1e-12);
        assert!((e[1] - 2.0).abs() < 1e-12);
        assert!((e[2] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn sym_eigenvalues_of_ones() {
        let j = Dense::from_real(3, 3, vec![1.0; 9]);
        let e = sym_eigenvalues(&j);
        assert!((e[0] - 3.0).abs() < 1e-10);
        assert!(e[1].abs() < 1e-10);
        assert!(e[2].abs() < 1e-10);
    }

    #[test]
    fn hermitian_embedding() {
        // [[2, i], [-i, 2]] has eigenvalues 3 and 1.
        let a = Dense::new(
            2,
            2,
            vec![
                Complex::new(2.0, 0.0),
                Complex::new(0.0, 1.0),
                Complex::new(0.0, -1.0),
                Complex::new(2.0, 0.0),
            ],
        );
        let e = hermitian_eigenvalues(&a);
        assert!((e[0] - 3.0).abs() < 1e-10, "{e:?}");
        assert!((e[1] - 1.0).abs() < 1e-10, "{e:?}");
    }

    #[test]
    fn singular_values_of_ones() {
        let j = Dense::from_real(2, 3, vec![1.0; 6]);
        let sv = singular_values(&j);
        assert!((sv[0] - 6.0f64.sqrt()).abs() < 1e-10);
        assert!(sv[1].abs() < 1e-8);
    }

    #[test]
    fn permutation_count_and_order() {
        let ps = permutations(3);
        assert_eq!(ps.len(), 6);
        assert_eq!(ps[0], vec![0, 1, 2]);
        assert_eq!(ps[5], vec![2, 1, 0]);
    }

    #[test]
    fn positive_monotone_boxdot_matches_bruteforce() {
        let n = 5usize;
        let h = Dense::from_real(
            n,
            n,
            (0..n * n)
                .map(|k| {
                    let (i, j) = (k / n + 1, k % n + 1);
                    1.0 / ((i * j) as f64).sqrt()
                })
                .collect(),
        );
        let fast = boxdot_norm_positive_monotone(&h);
        let (slow, _, _) = boxdot_norm_bruteforce(&h);
        assert!((fast - slow).abs() < 1e-12, "{fast} vs {slow}");
    }
}
