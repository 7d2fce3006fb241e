//! Dense symmetric linear algebra: bottom eigenpairs and Schur complements.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Above this size the bottom eigenpair is found by shifted inverse
/// iteration instead of a full dense decomposition.
pub const DENSE_EIGEN_LIMIT: usize = 512;

/// Smallest eigenvalue of a symmetric matrix and a unit eigenvector.
#[derive(Debug, Clone)]
pub struct Eigenpair<T: Scalar> {
    pub value: T,
    pub vector: DVector<T>,
}

/// Lower Gershgorin bound on the spectrum of `a`.
pub fn gershgorin_lower<T: Scalar>(a: &DMatrix<T>) -> T {
    let n = a.nrows();
    (0..n)
        .map(|i| {
            let off = (0..n)
                .filter(|&j| j != i)
                .fold(T::zero(), |s, j| s + a[(i, j)].magnitude());
            a[(i, i)] - off
        })
        .fold(T::lit(f64::MAX), |m, v| m.min(v))
}

fn inf_norm<T: Scalar>(a: &DMatrix<T>) -> T {
    a.row_iter()
        .map(|r| r.iter().fold(T::zero(), |s, &v| s + v.magnitude()))
        .fold(T::zero(), |m, v| m.max(v))
}

fn shifted<T: Scalar>(a: &DMatrix<T>, sigma: T) -> DMatrix<T> {
    let mut b = a.clone();
    for i in 0..a.nrows() {
        b[(i, i)] -= sigma;
    }
    b
}

/// Bottom eigenpair of the symmetric matrix `a`.
pub fn bottom_eigenpair<T: Scalar>(a: &DMatrix<T>) -> Result<Eigenpair<T>> {
    let n = a.nrows();
    if n == 0 {
        return Err(Error::InvalidInput("empty matrix".into()));
    }
    if n <= DENSE_EIGEN_LIMIT {
        return Ok(dense_bottom(a));
    }
    inverse_iteration(a)
}

/// Bottom eigenpair from a full dense decomposition.
pub fn dense_bottom<T: Scalar>(a: &DMatrix<T>) -> Eigenpair<T> {
    let eig = SymmetricEigen::new(a.clone());
    let (k, _) =
        eig.eigenvalues
            .iter()
            .enumerate()
            .fold((0, T::lit(f64::MAX)), |(bk, bv), (k, &v)| {
                if v < bv {
                    (k, v)
                } else {
                    (bk, bv)
                }
            });
    Eigenpair {
        value: eig.eigenvalues[k],
        vector: eig.eigenvectors.column(k).into_owned(),
    }
}

/// Inverse iteration with Cholesky-tested shifts kept below the bottom of
/// the spectrum, so the iteration can only converge to the smallest
/// eigenvalue. Shifts move toward the current Rayleigh quotient; a failed
/// factorization means the trial shift overshot and it is pulled back.
pub fn inverse_iteration<T: Scalar>(a: &DMatrix<T>) -> Result<Eigenpair<T>> {
    let n = a.nrows();
    let norm = inf_norm(a).max(T::unit_roundoff());
    let target = T::lit(1e-10) * norm;
    let mut sigma = gershgorin_lower(a) - T::lit(1e-3) * norm;
    let mut chol = Cholesky::new(shifted(a, sigma))
        .ok_or_else(|| Error::NoConvergence("shift below Gershgorin bound not definite".into()))?;
    let mut v = DVector::from_element(n, T::one() / T::lit(n as f64).sqrt());
    let mut rho = (v.transpose() * a * &v)[(0, 0)];
    for _ in 0..60 {
        for _ in 0..8 {
            let w = chol.solve(&v);
            v = &w / w.norm();
        }
        let av = a * &v;
        rho = v.dot(&av);
        let resid = (&av - &v * rho).norm();
        if resid <= target {
            return Ok(Eigenpair {
                value: rho,
                vector: v,
            });
        }
        // the bottom eigenvalue lies in [rho - resid, rho] once v is close;
        // aim just below that interval
        let mut step = T::lit(0.9);
        loop {
            let trial = sigma + step * (rho - resid - sigma);
            if trial <= sigma {
                break;
            }
            if let Some(c) = Cholesky::new(shifted(a, trial)) {
                sigma = trial;
                chol = c;
                break;
            }
            step *= T::lit(0.5);
            if step < T::lit(1e-6) {
                break;
            }
        }
    }
    let resid = (a * &v - &v * rho).norm();
    if resid <= T::lit(1e-7) * norm {
        return Ok(Eigenpair {
            value: rho,
            vector: v,
        });
    }
    Err(Error::NoConvergence(format!(
        "inverse iteration residual {resid} after 480 solves"
    )))
}

/// `A_SS - A_SF A_FF⁻¹ A_FS` for the symmetric positive definite block
/// `A_FF`, together with the factor used, so harmonic extensions can be
/// recovered.
pub fn schur_complement<T: Scalar>(a: &DMatrix<T>, keep: &[usize]) -> Result<DMatrix<T>> {
    let n = a.nrows();
    let mut inside = vec![false; n];
    for &s in keep {
        inside[s] = true;
    }
    let drop: Vec<usize> = (0..n).filter(|&x| !inside[x]).collect();
    let ass = a.select_rows(keep).select_columns(keep);
    if drop.is_empty() {
        return Ok(ass);
    }
    let aff = a.select_rows(&drop).select_columns(&drop);
    let afs = a.select_rows(&drop).select_columns(keep);
    let chol = Cholesky::new(aff).ok_or(Error::NotTransient)?;
    let x = chol.solve(&afs);
    let mut out = ass - afs.transpose() * x;
    // restore exact symmetry lost to roundoff
    for i in 0..out.nrows() {
        for j in (i + 1)..out.ncols() {
            let s = (out[(i, j)] + out[(j, i)]) * T::lit(0.5);
            out[(i, j)] = s;
            out[(j, i)] = s;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn laplacian_1d(n: usize, shift: f64) -> DMatrix<f64> {
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                2.0 - shift
            } else if i.abs_diff(j) == 1 {
                -1.0
            } else {
                0.0
            }
        })
    }

    #[test]
    fn inverse_iteration_matches_closed_form() {
        // eigenvalues of the Dirichlet path Laplacian: 2 - 2cos(kπ/(n+1))
        let n = 600;
        let exact = 2.0 - 2.0 * (std::f64::consts::PI / (n as f64 + 1.0)).cos();
        let pair = bottom_eigenpair(&laplacian_1d(n, 0.0)).unwrap();
        assert!((pair.value - exact).abs() < 1e-10);
        let shifted = bottom_eigenpair(&laplacian_1d(n, 0.5)).unwrap();
        assert!((shifted.value - (exact - 0.5)).abs() < 1e-10);
    }

    #[test]
    fn schur_complement_of_path() {
        // eliminating the middle of a 3-path leaves a series resistor
        let a = laplacian_1d(3, 0.0);
        let s = schur_complement(&a, &[0, 2]).unwrap();
        let expect = DMatrix::from_row_slice(2, 2, &[1.5, -0.5, -0.5, 1.5]);
        assert!((s - expect).norm() < 1e-15);
    }

    proptest! {
        #[test]
        fn iterative_and_dense_agree(entries in proptest::collection::vec(-1.0f64..1.0, 40 * 40)) {
            let n = 40;
            let b = DMatrix::from_column_slice(n, n, &entries);
            let a = &b + b.transpose();
            let d = dense_bottom(&a);
            let it = inverse_iteration(&a).unwrap();
            prop_assert!((d.value - it.value).abs() <= 1e-8 * (1.0 + d.value.abs()));
        }
    }
}
