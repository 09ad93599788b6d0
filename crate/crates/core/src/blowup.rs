//! Kronecker blow-ups by all-ones blocks and their spectral laws.
//!
//! `A^(p)` replaces each entry with a constant `p×p` block (square,
//! Hermitian-preserving); `A^(p,q)` uses `p×q` blocks. Eigenvalues of a
//! Hermitian blow-up are `k·μ_i` plus zeros; singular values of the
//! rectangular blow-up are `√(pq)·σ_i` plus zeros. The checkers verify the
//! multiset laws numerically and report the worst deviation.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::report::{matrix_digest, BoundReport, Provenance};
use crate::scalar::Real;
use crate::spectral::{hermitian_eigenvalues, singular_values};

/// Blow-ups above this entry count are refused; the distance searches need
/// materialized matrices and anything bigger is out of desk range.
pub const MAX_BLOWUP_ENTRIES: usize = 10_000_000;

fn guard_size(entries: usize) -> Result<()> {
    if entries > MAX_BLOWUP_ENTRIES {
        return Err(Error::Guard(format!(
            "blow-up would materialize {entries} entries (limit {MAX_BLOWUP_ENTRIES})"
        )));
    }
    Ok(())
}

/// `A^(p) = A ⊗ J_p` for square `A`; propagates the Hermitian flag.
pub fn blowup_square<T: Real>(a: &Matrix<T>, p: usize) -> Result<Matrix<T>> {
    if !a.is_square() {
        return Err(Error::Precondition("square blow-up needs a square matrix".into()));
    }
    if p == 0 {
        return Err(Error::Precondition("blow-up factor must be positive".into()));
    }
    let n = a.rows();
    guard_size(n * p * n * p)?;
    let m = Matrix::from_fn(n * p, n * p, |i, j| a.entry(i / p, j / p))?;
    Ok(if a.is_hermitian() {
        m.with_hermitian_flag(T::zero()).expect("blow-up preserves symmetry")
    } else {
        m
    })
}

/// `A^(p,q) = A ⊗ J_{p,q}`.
pub fn blowup_rect<T: Real>(a: &Matrix<T>, p: usize, q: usize) -> Result<Matrix<T>> {
    if p == 0 || q == 0 {
        return Err(Error::Precondition("blow-up factors must be positive".into()));
    }
    guard_size(a.rows() * p * a.cols() * q)?;
    Matrix::from_fn(a.rows() * p, a.cols() * q, |i, j| a.entry(i / p, j / q))
}

/// Verify that the eigenvalues of `A^(k)` are `{k μ_i(A)}` plus `(k-1)n`
/// zeros, as multisets, within `1e-8 · k · ‖A‖_F`.
pub fn check_blowup_spectrum_hermitian<T: Real>(a: &Matrix<T>, k: usize) -> Result<BoundReport> {
    if !a.is_hermitian() {
        return Err(Error::Precondition("needs a Hermitian matrix".into()));
    }
    let n = a.rows();
    let blown = blowup_square(a, k)?;
    let got = hermitian_eigenvalues(&blown)?.values;
    let base = hermitian_eigenvalues(a)?.values;
    let kf = T::from_usize(k).unwrap();
    let mut expect: Vec<T> = base.iter().map(|&m| kf * m).collect();
    expect.extend(std::iter::repeat(T::zero()).take((k - 1).max(0) * n));
    expect.sort_by(|a, b| b.partial_cmp(a).expect("finite"));

    let tol = T::of(1e-8) * kf * a.aggregates().frobenius;
    let worst = multiset_deviation(&got, &expect);
    let mut rep = BoundReport::new(
        "pro1",
        worst.to64(),
        tol.to64(),
        1.0,
        matrix_digest(a),
        Provenance {
            method: "eigensolver".into(),
            k: Some(k as u64),
            seed: None,
        },
    );
    rep = rep.with_detail("max_deviation", worst.to64());
    Ok(rep)
}

/// Verify that the singular values of `A^(p,q)` are `{√(pq) σ_i(A)}`
/// padded with zeros.
pub fn check_blowup_spectrum_rect<T: Real>(a: &Matrix<T>, p: usize, q: usize) -> Result<BoundReport> {
    let blown = blowup_rect(a, p, q)?;
    let got = singular_values(&blown, false)?.values;
    let base = singular_values(a, false)?.values;
    let scale = T::from_usize(p * q).unwrap().sqrt();
    let mut expect: Vec<T> = base.iter().map(|&s| scale * s).collect();
    expect.resize(got.len(), T::zero());
    expect.sort_by(|a, b| b.partial_cmp(a).expect("finite"));

    let tol = T::of(1e-8) * scale * a.aggregates().frobenius;
    let worst = multiset_deviation(&got, &expect);
    Ok(BoundReport::new(
        "pro2",
        worst.to64(),
        tol.to64(),
        1.0,
        matrix_digest(a),
        Provenance {
            method: "svd".into(),
            k: Some((p * q) as u64),
            seed: None,
        },
    )
    .with_detail("p", p as u64)
    .with_detail("q", q as u64))
}

/// The extremal-eigenvalue proportionality chains for Hermitian blow-ups:
/// for every i,
/// `0 ≤ μ_i(A^(k))/(kn) − μ_i(A)/n ≤ ‖A‖_F/(n√(n−i+1))` and the mirrored
/// tail chain `0 ≥ μ_{kn−i+1}(A^(k))/(kn) − μ_{n−i+1}(A)/n ≥ −…` (the
/// published tail indexing and its `tn` denominator contain typos; this is
/// the reading consistent with applying the head chain to `−A`).
pub fn check_blowup_eigen_ratio<T: Real>(a: &Matrix<T>, k: usize) -> Result<BoundReport> {
    if !a.is_hermitian() {
        return Err(Error::Precondition("needs a Hermitian matrix".into()));
    }
    if k < 2 {
        return Err(Error::Precondition("blow-up ratio check needs k ≥ 2".into()));
    }
    let n = a.rows();
    let nf = T::from_usize(n).unwrap();
    let kn = T::from_usize(k * n).unwrap();
    let blown = blowup_square(a, k)?;
    let mu_blown = hermitian_eigenvalues(&blown)?.values;
    let mu = hermitian_eigenvalues(a)?.values;
    let frob = a.aggregates().frobenius;
    let tol = T::of(crate::report::REL_TOL);

    // Track the most violated side; report the worst signed slack.
    let mut worst_violation = T::neg_infinity();
    let mut holds = true;
    for i in 1..=n {
        let bound = frob / (nf * T::from_usize(n - i + 1).unwrap().sqrt());
        let head = mu_blown[i - 1] / kn - mu[i - 1] / nf;
        // 0 ≤ head ≤ bound
        for violation in [-head, head - bound] {
            if violation > worst_violation {
                worst_violation = violation;
            }
            if violation > tol * bound.max(T::one()) {
                holds = false;
            }
        }
        let tail = mu_blown[k * n - i] / kn - mu[n - i] / nf;
        // -bound ≤ tail ≤ 0
        for violation in [tail, -bound - tail] {
            if violation > worst_violation {
                worst_violation = violation;
            }
            if violation > tol * bound.max(T::one()) {
                holds = false;
            }
        }
    }

    let mut rep = BoundReport::new(
        "prop",
        worst_violation.to64(),
        0.0,
        1.0,
        matrix_digest(a),
        Provenance {
            method: "eigensolver".into(),
            k: Some(k as u64),
            seed: None,
        },
    );
    rep.holds = holds;
    rep = rep.with_detail("worst_violation", worst_violation.to64());
    Ok(rep)
}

fn multiset_deviation<T: Real>(got: &[T], expect: &[T]) -> T {
    debug_assert_eq!(got.len(), expect.len());
    got.iter()
        .zip(expect)
        .map(|(g, e)| (*g - *e).abs())
        .fold(T::zero(), T::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::C64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type M = Matrix<f64>;

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> M {
        let mut entries = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in i..n {
                if i == j {
                    entries[i * n + j] = C64::new(rng.gen_range(-1.0..1.0), 0.0);
                } else {
                    let z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    entries[i * n + j] = z;
                    entries[j * n + i] = z.conj();
                }
            }
        }
        M::new(n, n, entries).unwrap().with_hermitian_flag(0.0).unwrap()
    }

    #[test]
    fn scalar_blowup_is_constant_block() {
        let a = M::from_real(1, 1, vec![2.0]).unwrap();
        let b = blowup_square(&a, 3).unwrap();
        assert_eq!(b.shape(), (3, 3));
        assert!(b.entries().iter().all(|z| z.re == 2.0 && z.im == 0.0));
    }

    #[test]
    fn blowup_by_one_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let a = random_hermitian(&mut rng, 4);
        assert_eq!(blowup_square(&a, 1).unwrap(), a);
        assert_eq!(blowup_rect(&a, 1, 1).unwrap(), a);
    }

    #[test]
    fn blowup_entries_replicate() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let a = M::from_fn(3, 4, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
        .unwrap();
        let (p, q) = (2, 3);
        let b = blowup_rect(&a, p, q).unwrap();
        for i in 0..3 * p {
            for j in 0..4 * q {
                assert_eq!(b.entry(i, j), a.entry(i / p, j / q));
            }
        }
        // Frobenius scales by sqrt(pq).
        let scale = ((p * q) as f64).sqrt();
        assert!(
            (b.aggregates().frobenius - scale * a.aggregates().frobenius).abs()
                < 1e-12 * a.aggregates().frobenius
        );
    }

    #[test]
    fn composition_of_blowups() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let a = random_hermitian(&mut rng, 3);
        let b1 = blowup_square(&blowup_square(&a, 2).unwrap(), 3).unwrap();
        let b2 = blowup_square(&a, 6).unwrap();
        assert_eq!(b1, b2);
    }

    #[test]
    fn ones_blowup_eigenvalues() {
        // J_2 blown by 2 has eigenvalues {4, 0, 0, 0}.
        let j = M::ones(2, 2);
        let b = blowup_square(&j, 2).unwrap();
        let e = hermitian_eigenvalues(&b).unwrap().values;
        assert!((e[0] - 4.0).abs() < 1e-10);
        for &v in &e[1..] {
            assert!(v.abs() < 1e-10);
        }
        let rep = check_blowup_spectrum_hermitian(&j, 2).unwrap();
        assert!(rep.holds);
    }

    #[test]
    fn rect_blowup_singular_values_of_ones() {
        let j = M::ones(2, 2);
        let rep = check_blowup_spectrum_rect(&j, 2, 2).unwrap();
        assert!(rep.holds);
        let b = blowup_rect(&j, 2, 2).unwrap();
        let s = singular_values(&b, false).unwrap().values;
        assert!((s[0] - 4.0).abs() < 1e-10);
    }

    #[test]
    fn spectrum_laws_hold_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        for _ in 0..25 {
            let n = rng.gen_range(1..=4);
            let a = random_hermitian(&mut rng, n);
            let k = rng.gen_range(2..=3);
            assert!(check_blowup_spectrum_hermitian(&a, k).unwrap().holds);

            let m = rng.gen_range(1..=3);
            let c = M::from_fn(m, rng.gen_range(1..=5), |_, _| {
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            })
            .unwrap();
            let (p, q) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
            assert!(check_blowup_spectrum_rect(&c, p, q).unwrap().holds);
        }
    }

    #[test]
    fn zero_matrix_spectrum_law() {
        let z = M::zeros(3, 3).with_hermitian_flag(0.0).unwrap();
        assert!(check_blowup_spectrum_hermitian(&z, 3).unwrap().holds);
    }

    #[test]
    fn eigen_ratio_chains() {
        // Identity: positive eigenvalues scale exactly, head difference 0.
        let id = M::from_fn(3, 3, |i, j| C64::new(if i == j { 1.0 } else { 0.0 }, 0.0))
            .unwrap()
            .with_hermitian_flag(0.0)
            .unwrap();
        assert!(check_blowup_eigen_ratio(&id, 2).unwrap().holds);

        // All-negative spectrum exercises the other branch of the proof.
        let neg = id.scale(C64::new(-1.0, 0.0));
        assert!(check_blowup_eigen_ratio(&neg, 2).unwrap().holds);

        let mut rng = ChaCha8Rng::seed_from_u64(45);
        for _ in 0..30 {
            let n = rng.gen_range(2..=5);
            let a = random_hermitian(&mut rng, n);
            for k in 2..=3 {
                let rep = check_blowup_eigen_ratio(&a, k).unwrap();
                assert!(rep.holds, "n={n} k={k}: {rep:?}");
            }
        }
    }

    #[test]
    fn oversized_blowup_refused() {
        let a = M::ones(200, 200);
        assert!(matches!(
            blowup_square(&a, 100),
            Err(Error::Guard(_))
        ));
    }
}
