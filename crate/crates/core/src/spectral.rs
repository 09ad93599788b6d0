//! Singular values, Hermitian eigenvalues, and rank-one deflation.
//!
//! Solvers are in-repo Jacobi iterations: these sizes do not justify an
//! external dependency and the repo stays self-verifying. The SVD is
//! one-sided (rotations orthogonalize column pairs), the eigensolver is
//! cyclic two-sided with a phase step that makes each pivot real.

use crate::error::{Error, Result};
use crate::matrix::{KahanSum, Matrix};
use crate::scalar::{Real, C};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectralKind {
    Singular,
    Hermitian,
}

/// Spectrum sorted descending, with optional orthonormal vector lists
/// (columns, one per value).
#[derive(Debug, Clone)]
pub struct SpectralSummary<T: Real> {
    pub kind: SpectralKind,
    pub values: Vec<T>,
    pub left: Option<Vec<Vec<C<T>>>>,
    pub right: Option<Vec<Vec<C<T>>>>,
}

const MAX_SWEEPS: usize = 64;

fn jacobi_tol<T: Real>() -> T {
    T::of(1e-13).max(T::epsilon() * T::of(4.0))
}

/// Full singular spectrum of `A` via one-sided Jacobi; `σ_1 ≥ … ≥ σ_r ≥ 0`
/// with `r = min(m,n)`. Vectors satisfy `A v_i = σ_i u_i`.
pub fn singular_values<T: Real>(a: &Matrix<T>, want_vectors: bool) -> Result<SpectralSummary<T>> {
    // One-sided Jacobi wants at least as many rows as columns; for wide
    // inputs decompose the conjugate transpose and swap the vector roles.
    if a.rows() >= a.cols() {
        let (values, u, v) = one_sided_jacobi(a, want_vectors)?;
        Ok(SpectralSummary {
            kind: SpectralKind::Singular,
            values,
            left: u,
            right: v,
        })
    } else {
        let (values, u, v) = one_sided_jacobi(&a.conj_transpose(), want_vectors)?;
        Ok(SpectralSummary {
            kind: SpectralKind::Singular,
            values,
            left: v,
            right: u,
        })
    }
}

type JacobiOutput<T> = (Vec<T>, Option<Vec<Vec<C<T>>>>, Option<Vec<Vec<C<T>>>>);

fn one_sided_jacobi<T: Real>(a: &Matrix<T>, want_vectors: bool) -> Result<JacobiOutput<T>> {
    let (m, n) = a.shape();
    debug_assert!(m >= n);
    let zero = C::new(T::zero(), T::zero());
    let one = C::new(T::one(), T::zero());
    // Columns of the working matrix.
    let mut w: Vec<Vec<C<T>>> = (0..n)
        .map(|j| (0..m).map(|i| a.entry(i, j)).collect())
        .collect();
    let mut v: Vec<Vec<C<T>>> = (0..n)
        .map(|j| {
            let mut col = vec![zero; n];
            col[j] = one;
            col
        })
        .collect();

    let tol = jacobi_tol::<T>();
    // Columns driven below roundoff of the input scale are numerically
    // zero; pairing them orthogonalizes noise and never settles.
    let fnorm = a.aggregates().frobenius;
    let zero_cut2 = (fnorm * T::epsilon()) * (fnorm * T::epsilon());
    let mut converged = false;
    let mut worst = T::zero();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        worst = T::zero();
        for p in 0..n {
            for q in p + 1..n {
                let mut alpha = T::zero();
                let mut beta = T::zero();
                let mut gamma = zero;
                for i in 0..m {
                    alpha += w[p][i].norm_sqr();
                    beta += w[q][i].norm_sqr();
                    gamma = gamma + w[p][i].conj() * w[q][i];
                }
                if alpha <= zero_cut2 || beta <= zero_cut2 {
                    continue;
                }
                let g = gamma.norm();
                let scale = (alpha * beta).sqrt();
                let rel = g / scale;
                if rel > worst {
                    worst = rel;
                }
                if rel <= tol {
                    continue;
                }
                rotated = true;
                // Phase that makes <w_p, w_q> real positive, then a real
                // rotation zeroing the Gram off-diagonal.
                let u = gamma / C::new(g, T::zero());
                let ubar = u.conj();
                let tau = (beta - alpha) / (T::of(2.0) * g);
                let t = tau.signum() / (tau.abs() + tau.hypot(T::one()));
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                let (cs, ss) = (C::new(c, T::zero()), C::new(s, T::zero()));
                for i in 0..m {
                    let wp = w[p][i];
                    let wq = w[q][i] * ubar;
                    w[p][i] = cs * wp - ss * wq;
                    w[q][i] = ss * wp + cs * wq;
                }
                for i in 0..n {
                    let vp = v[p][i];
                    let vq = v[q][i] * ubar;
                    v[p][i] = cs * vp - ss * vq;
                    v[q][i] = ss * vp + cs * vq;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Numerical(format!(
            "one-sided Jacobi did not converge in {MAX_SWEEPS} sweeps \
             (worst relative off-diagonal {:e})",
            worst.to64()
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<T> = w
        .iter()
        .map(|col| col.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt())
        .collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).expect("finite").then(i.cmp(&j)));
    let values: Vec<T> = order.iter().map(|&j| norms[j]).collect();

    if !want_vectors {
        return Ok((values, None, None));
    }

    let cutoff = values.first().copied().unwrap_or(T::zero()) * T::epsilon() * T::of(16.0);
    let mut left: Vec<Vec<C<T>>> = Vec::with_capacity(n);
    for (rank, &j) in order.iter().enumerate() {
        if norms[j] > cutoff && norms[j] > T::zero() {
            let inv = T::one() / norms[j];
            left.push(w[j].iter().map(|z| z.scale(inv)).collect());
        } else {
            left.push(complete_orthonormal(&left[..rank], m));
        }
    }
    let right: Vec<Vec<C<T>>> = order.iter().map(|&j| v[j].clone()).collect();
    Ok((values, Some(left), Some(right)))
}

/// A unit vector orthogonal to the given orthonormal columns, by
/// Gram-Schmidt over standard basis vectors.
fn complete_orthonormal<T: Real>(existing: &[Vec<C<T>>], dim: usize) -> Vec<C<T>> {
    let zero = C::new(T::zero(), T::zero());
    for seed in 0..dim {
        let mut cand = vec![zero; dim];
        cand[seed] = C::new(T::one(), T::zero());
        for col in existing {
            let mut dot = zero;
            for i in 0..dim {
                dot = dot + col[i].conj() * cand[i];
            }
            for i in 0..dim {
                cand[i] = cand[i] - col[i] * dot;
            }
        }
        let norm = cand.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if norm > T::of(0.5) {
            let inv = T::one() / norm;
            return cand.iter().map(|z| z.scale(inv)).collect();
        }
    }
    unreachable!("fewer than dim orthonormal columns always leave room");
}

/// Eigenvalues of a Hermitian matrix, descending. Requires the Hermitian
/// flag; use `Matrix::with_hermitian_flag` after construction or ingest.
pub fn hermitian_eigenvalues<T: Real>(a: &Matrix<T>) -> Result<SpectralSummary<T>> {
    if !a.is_hermitian() {
        return Err(Error::Precondition(
            "hermitian_eigenvalues requires the Hermitian flag".into(),
        ));
    }
    let n = a.rows();
    let mut h: Vec<C<T>> = a.entries().to_vec();
    let frob = a.aggregates().frobenius;
    // With every pivot at most tol·‖A‖_F/n, the off-diagonal mass is below
    // the 1e-12 ‖A‖_F target.
    let tol_elem = jacobi_tol::<T>() * frob / T::from_usize(n).unwrap();

    let at = |h: &Vec<C<T>>, i: usize, j: usize| h[i * n + j];
    let mut converged = frob == T::zero();
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let b = at(&h, p, q);
                let g = b.norm();
                if g <= tol_elem {
                    continue;
                }
                rotated = true;
                let u = b / C::new(g, T::zero());
                let ubar = u.conj();
                // Make the pivot real: scale column q by conj(u), row q by u.
                for i in 0..n {
                    h[i * n + q] = h[i * n + q] * ubar;
                }
                for j in 0..n {
                    h[q * n + j] = h[q * n + j] * u;
                }
                let app = at(&h, p, p).re;
                let aqq = at(&h, q, q).re;
                let tau = (aqq - app) / (T::of(2.0) * g);
                let t = tau.signum() / (tau.abs() + tau.hypot(T::one()));
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                let (cs, ss) = (C::new(c, T::zero()), C::new(s, T::zero()));
                for i in 0..n {
                    let aip = at(&h, i, p);
                    let aiq = at(&h, i, q);
                    h[i * n + p] = cs * aip - ss * aiq;
                    h[i * n + q] = ss * aip + cs * aiq;
                }
                for j in 0..n {
                    let apj = at(&h, p, j);
                    let aqj = at(&h, q, j);
                    h[p * n + j] = cs * apj - ss * aqj;
                    h[q * n + j] = ss * apj + cs * aqj;
                }
            }
        }
        if !rotated {
            converged = true;
        }
    }
    if !converged {
        let mut off = T::zero();
        for p in 0..n {
            for q in p + 1..n {
                off += at(&h, p, q).norm_sqr();
            }
        }
        return Err(Error::Numerical(format!(
            "Hermitian Jacobi did not converge in {MAX_SWEEPS} sweeps \
             (off-diagonal mass {:e})",
            (off + off).sqrt().to64()
        )));
    }
    let mut values: Vec<T> = (0..n).map(|i| at(&h, i, i).re).collect();
    values.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    Ok(SpectralSummary {
        kind: SpectralKind::Hermitian,
        values,
        left: None,
        right: None,
    })
}

/// `A` minus its best rank-one approximation `σ_1 · u ⊗ conj(v)` from the
/// top singular pair, the convention under which `σ_1(A - R) = σ_2(A)`.
/// A zero matrix is returned unchanged.
pub fn top_deflation<T: Real>(a: &Matrix<T>) -> Result<Matrix<T>> {
    let svd = singular_values(a, true)?;
    let sigma1 = svd.values[0];
    if sigma1 == T::zero() {
        return Ok(a.clone());
    }
    let u = &svd.left.as_ref().expect("vectors requested")[0];
    let v = &svd.right.as_ref().expect("vectors requested")[0];
    Matrix::from_fn(a.rows(), a.cols(), |i, j| {
        a.entry(i, j) - u[i] * v[j].conj().scale(sigma1)
    })
}

/// `σ_1`, convenience for the bounds module.
pub fn operator_norm<T: Real>(a: &Matrix<T>) -> Result<T> {
    Ok(singular_values(a, false)?.values[0])
}

/// Frobenius distance between `A` and `Σ σ_i u_i ⊗ conj(v_i)`; the
/// reconstruction test behind the vector invariants.
pub fn reconstruction_error<T: Real>(a: &Matrix<T>, svd: &SpectralSummary<T>) -> T {
    let u = svd.left.as_ref().expect("need vectors");
    let v = svd.right.as_ref().expect("need vectors");
    let mut err = KahanSum::<T>::new();
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let mut rec = C::new(T::zero(), T::zero());
            for (k, sigma) in svd.values.iter().enumerate() {
                rec = rec + (u[k][i] * v[k][j].conj()).scale(*sigma);
            }
            err.add((a.entry(i, j) - rec).norm_sqr());
        }
    }
    err.value().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::C64;
    use cutspec_oracle as oracle;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type M = Matrix<f64>;

    fn random_complex(rng: &mut ChaCha8Rng, m: usize, n: usize) -> M {
        M::from_fn(m, n, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
        .unwrap()
    }

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
    fn ones_matrix_is_rank_one() {
        let j = M::ones(3, 5);
        let s = singular_values(&j, false).unwrap();
        assert!((s.values[0] - 15.0f64.sqrt()).abs() < 1e-12);
        for &v in &s.values[1..] {
            assert!(v.abs() < 1e-12);
        }
    }

    #[test]
    fn singular_values_match_gram_eigen_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..30 {
            let m = rng.gen_range(1..=6);
            let n = rng.gen_range(1..=6);
            let a = random_complex(&mut rng, m, n);
            let s = singular_values(&a, false).unwrap();
            let d = oracle::Dense::new(m, n, a.entries().to_vec());
            let expect = oracle::singular_values(&d);
            assert_eq!(s.values.len(), expect.len());
            for (got, want) in s.values.iter().zip(&expect) {
                assert!(
                    (got - want).abs() <= 1e-8 * want.max(1.0),
                    "{got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn vectors_reconstruct_and_map_correctly() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..10 {
            let m = rng.gen_range(2..=6);
            let n = rng.gen_range(2..=6);
            let a = random_complex(&mut rng, m, n);
            let s = singular_values(&a, true).unwrap();
            let err = reconstruction_error(&a, &s);
            assert!(err <= 1e-8 * a.aggregates().frobenius.max(1e-30));
            // A v_i = σ_i u_i
            let u = s.left.as_ref().unwrap();
            let v = s.right.as_ref().unwrap();
            for k in 0..s.values.len() {
                let av = a.matvec(&v[k]).unwrap();
                for i in 0..m {
                    let d = av[i] - u[k][i].scale(s.values[k]);
                    assert!(d.norm() < 1e-8 * s.values[0].max(1.0));
                }
            }
        }
    }

    #[test]
    fn hermitian_eigenvalues_match_oracle_and_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..25 {
            let n = rng.gen_range(1..=6);
            let a = random_hermitian(&mut rng, n);
            let e = hermitian_eigenvalues(&a).unwrap();
            let d = oracle::Dense::new(n, n, a.entries().to_vec());
            let expect = oracle::hermitian_eigenvalues(&d);
            for (got, want) in e.values.iter().zip(&expect) {
                assert!((got - want).abs() <= 1e-8 * want.abs().max(1.0));
            }
            let trace: f64 = (0..n).map(|i| a.entry(i, i).re).sum();
            let sum: f64 = e.values.iter().sum();
            assert!((trace - sum).abs() <= 1e-9 * trace.abs().max(1.0));
            let frob2: f64 = a.aggregates().frobenius.powi(2);
            let sq: f64 = e.values.iter().map(|v| v * v).sum();
            assert!((frob2 - sq).abs() <= 1e-9 * frob2.max(1.0));
        }
    }

    #[test]
    fn identity_and_ones_eigenvalues() {
        let id = M::from_fn(4, 4, |i, j| C64::new(if i == j { 1.0 } else { 0.0 }, 0.0))
            .unwrap()
            .with_hermitian_flag(0.0)
            .unwrap();
        let e = hermitian_eigenvalues(&id).unwrap();
        assert_eq!(e.values, vec![1.0; 4]);

        let j = M::ones(5, 5);
        let e = hermitian_eigenvalues(&j).unwrap();
        assert!((e.values[0] - 5.0).abs() < 1e-10);
        for &v in &e.values[1..] {
            assert!(v.abs() < 1e-10);
        }
    }

    #[test]
    fn non_hermitian_input_is_rejected() {
        let a = M::from_real(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!(matches!(
            hermitian_eigenvalues(&a),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn hermitian_abs_eigenvalues_equal_singular_values() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        for _ in 0..10 {
            let n = rng.gen_range(2..=6);
            let a = random_hermitian(&mut rng, n);
            let mut abs_eig: Vec<f64> = hermitian_eigenvalues(&a)
                .unwrap()
                .values
                .iter()
                .map(|v| v.abs())
                .collect();
            abs_eig.sort_by(|x, y| y.partial_cmp(x).unwrap());
            let sv = singular_values(&a, false).unwrap().values;
            for (e, s) in abs_eig.iter().zip(&sv) {
                assert!((e - s).abs() <= 1e-8 * s.max(1.0));
            }
        }
    }

    #[test]
    fn deflation_drops_top_direction() {
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        for _ in 0..15 {
            let m = rng.gen_range(2..=5);
            let n = rng.gen_range(2..=4);
            let a = random_complex(&mut rng, m, n);
            let s = singular_values(&a, false).unwrap();
            let d = top_deflation(&a).unwrap();
            let sd = singular_values(&d, false).unwrap();
            let want = if s.values.len() > 1 { s.values[1] } else { 0.0 };
            assert!(
                (sd.values[0] - want).abs() <= 1e-8 * want.max(1e-12),
                "σ1(deflated)={} vs σ2={want}",
                sd.values[0]
            );
        }
    }

    #[test]
    fn deflation_of_rank_one_is_zero() {
        let j = M::ones(3, 3);
        let d = top_deflation(&j).unwrap();
        assert!(d.aggregates().frobenius < 1e-10);

        let diag = M::from_real(2, 2, vec![3.0, 0.0, 0.0, 1.0]).unwrap();
        let d = top_deflation(&diag).unwrap();
        let s = singular_values(&d, false).unwrap();
        assert!((s.values[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn deflation_of_zero_matrix_is_identity_operation() {
        let z = M::zeros(3, 4);
        let d = top_deflation(&z).unwrap();
        assert_eq!(d, z);
    }

    #[test]
    fn weyl_and_lipschitz_singular_value_inequalities() {
        let mut rng = ChaCha8Rng::seed_from_u64(36);
        for _ in 0..25 {
            let m = rng.gen_range(2..=5);
            let n = rng.gen_range(2..=5);
            let x = random_complex(&mut rng, m, n);
            let y = random_complex(&mut rng, m, n);
            let sx = singular_values(&x, false).unwrap().values;
            let sy = singular_values(&y, false).unwrap().values;
            let sum = singular_values(&x.add(&y).unwrap(), false).unwrap().values;
            let diff = singular_values(&x.sub(&y).unwrap(), false).unwrap().values;
            if sum.len() > 1 {
                assert!(sum[1] <= sx[0] + sy[1] + 1e-9);
            }
            for i in 0..sx.len() {
                assert!((sx[i] - sy[i]).abs() <= diff[0] + 1e-9);
            }
        }
    }

    #[test]
    fn wide_and_tall_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let a = random_complex(&mut rng, 3, 6);
        let sa = singular_values(&a, true).unwrap();
        let sat = singular_values(&a.conj_transpose(), true).unwrap();
        for (x, y) in sa.values.iter().zip(&sat.values) {
            assert!((x - y).abs() < 1e-10);
        }
        let err = reconstruction_error(&a, &sa);
        assert!(err < 1e-9 * a.aggregates().frobenius);
    }
}
