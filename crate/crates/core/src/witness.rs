//! Matrix families with known extremal behaviour, used as fixtures across
//! the inequality and acceptance suites.

use crate::error::Result;
use crate::matrix::Matrix;
use crate::scalar::{Real, C};

/// Symmetric `(2n+1) x (2n+1)` star pattern: the first row and column hold
/// `n` entries `+1` then `n` entries `-1`, everything else is zero. Its top
/// singular value is `√(2n)` while `(2n+1)² ‖·‖_□ = 2n`.
pub fn star_witness<T: Real>(n: usize) -> Result<Matrix<T>> {
    assert!(n >= 1);
    let size = 2 * n + 1;
    let m = Matrix::from_fn(size, size, |i, j| {
        let v = if i == 0 && (1..=2 * n).contains(&j) {
            if j <= n {
                T::one()
            } else {
                -T::one()
            }
        } else if j == 0 && (1..=2 * n).contains(&i) {
            if i <= n {
                T::one()
            } else {
                -T::one()
            }
        } else {
            T::zero()
        };
        C::new(v, T::zero())
    })?;
    Ok(m.assume_hermitian())
}

/// Positive symmetric matrix `a_ij = (ij)^{-1/2}` (1-based indices): its
/// top singular value exceeds `ln n` while its ⊡-norm stays below 4.
pub fn hilbertish_witness<T: Real>(n: usize) -> Result<Matrix<T>> {
    assert!(n >= 1);
    let m = Matrix::from_fn(n, n, |i, j| {
        let prod = T::from_usize((i + 1) * (j + 1)).unwrap();
        C::new(T::one() / prod.sqrt(), T::zero())
    })?;
    Ok(m.assume_hermitian())
}

/// `2n x 2n` block matrix `[[J+B, J-B], [J-B, J+B]]` with `B` the
/// hilbertish witness: density exactly 1, top eigenvalue `2n` on the
/// all-ones vector, and a second eigenvalue of `2 Σ 1/i`.
pub fn ceml_block_witness<T: Real>(n: usize) -> Result<Matrix<T>> {
    assert!(n >= 1);
    let b = hilbertish_witness::<T>(n)?;
    let m = Matrix::from_fn(2 * n, 2 * n, |i, j| {
        let bi = i % n;
        let bj = j % n;
        let bval = b.entry(bi, bj).re;
        let same_block = (i < n) == (j < n);
        let v = if same_block {
            T::one() + bval
        } else {
            T::one() - bval
        };
        C::new(v, T::zero())
    })?;
    Ok(m.assume_hermitian())
}

/// Harmonic number `Σ_{i=1..n} 1/i`.
pub fn harmonic<T: Real>(n: usize) -> T {
    let mut s = T::zero();
    for i in 1..=n {
        s += T::one() / T::from_usize(i).unwrap();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cutnorm::{boxdot_norm_exact, cut_norm_exact};
    use crate::spectral::{hermitian_eigenvalues, singular_values};

    #[test]
    fn star_structure() {
        let a = star_witness::<f64>(1).unwrap();
        assert_eq!(a.rows(), 3);
        assert_eq!(a.entry(0, 0).re, 0.0);
        assert_eq!(a.entry(0, 1).re, 1.0);
        assert_eq!(a.entry(0, 2).re, -1.0);
        assert!(a.is_hermitian());

        for n in [2usize, 5, 9] {
            let a = star_witness::<f64>(n).unwrap();
            let nonzero = a.entries().iter().filter(|z| z.re != 0.0).count();
            assert_eq!(nonzero, 4 * n);
        }
    }

    #[test]
    fn star_sigma1_is_sqrt_2n() {
        for n in 1..=12 {
            let a = star_witness::<f64>(n).unwrap();
            let s = singular_values(&a, false).unwrap();
            assert!(
                (s.values[0] - (2.0 * n as f64).sqrt()).abs() < 1e-9,
                "n={n}"
            );
        }
    }

    #[test]
    fn star_cut_norm_identity_small() {
        for n in 1..=5 {
            let a = star_witness::<f64>(n).unwrap();
            let r = cut_norm_exact(&a).unwrap();
            let side = (2 * n + 1) as f64;
            assert!((r.value * side * side - 2.0 * n as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn hilbertish_monotone_and_bounded() {
        let a = hilbertish_witness::<f64>(12).unwrap();
        for i in 0..12 {
            for j in 0..11 {
                assert!(a.entry(i, j).re > a.entry(i, j + 1).re);
                assert!(a.entry(j, i).re > a.entry(j + 1, i).re);
            }
        }
        let r = boxdot_norm_exact(&a).unwrap();
        assert!(r.value < 4.0);

        // σ1 ≥ s_n via the (i s_n)^{-1/2} test vector, hence > ln n.
        let s = singular_values(&a, false).unwrap();
        let sn = harmonic::<f64>(12);
        assert!(s.values[0] >= sn - 1e-9);
        assert!(sn > (12f64).ln());
    }

    #[test]
    fn ceml_block_density_and_eigenvector() {
        for n in [3usize, 6] {
            let a = ceml_block_witness::<f64>(n).unwrap();
            assert!((a.aggregates().density.re - 1.0).abs() < 1e-12);
            assert!(a.aggregates().density.im == 0.0);

            // (1, 2^{-1/2}, …, n^{-1/2}, -1, …, -n^{-1/2}) has eigenvalue 2 s_n.
            let w: Vec<C<f64>> = (0..2 * n)
                .map(|i| {
                    let base = 1.0 / (((i % n) + 1) as f64).sqrt();
                    C::new(if i < n { base } else { -base }, 0.0)
                })
                .collect();
            let aw = a.matvec(&w).unwrap();
            let lam = 2.0 * harmonic::<f64>(n);
            for i in 0..2 * n {
                assert!((aw[i].re - lam * w[i].re).abs() < 1e-10);
                assert!(aw[i].im.abs() < 1e-12);
            }

            let e = hermitian_eigenvalues(&a).unwrap();
            assert!((e.values[0] - 2.0 * n as f64).abs() < 1e-9);
            assert!(e.values[1] >= lam - 1e-8);
        }
    }
}
