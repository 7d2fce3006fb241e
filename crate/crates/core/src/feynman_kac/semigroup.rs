//! The Schrödinger semigroup `exp(−t H^μ)` of a finite model.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::forms::{assemble_operator, DiscreteModel, PotentialMeasure};

/// Eigendecomposition of `M^{-1/2} Q^μ M^{-1/2}`, reusable across times.
#[derive(Debug, Clone)]
pub struct Semigroup {
    eigen: SymmetricEigen<f64, nalgebra::Dyn>,
    sqrt_m: Vec<f64>,
}

impl Semigroup {
    pub fn new(model: &DiscreteModel<f64>, mu: &PotentialMeasure<f64>) -> Result<Self> {
        let op = assemble_operator(model, mu)?;
        let sqrt_m = model.measure().iter().map(|m| m.sqrt()).collect();
        Ok(Semigroup {
            eigen: SymmetricEigen::new(op.symmetrized()),
            sqrt_m,
        })
    }

    /// `exp(−t H^μ) f = M^{-1/2} V e^{−tΛ} Vᵀ M^{1/2} f`.
    pub fn apply(&self, t: f64, f: &[f64]) -> Result<Vec<f64>> {
        let n = self.sqrt_m.len();
        if f.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: f.len(),
            });
        }
        let v = &self.eigen.eigenvectors;
        let g = DVector::from_iterator(n, f.iter().zip(&self.sqrt_m).map(|(a, s)| a * s));
        let mut c = v.transpose() * g;
        for (ci, &l) in c.iter_mut().zip(self.eigen.eigenvalues.iter()) {
            *ci *= (-t * l).exp();
        }
        let u = v * c;
        Ok(u.iter().zip(&self.sqrt_m).map(|(a, s)| a / s).collect())
    }

    pub fn matrix(&self, t: f64) -> DMatrix<f64> {
        let n = self.sqrt_m.len();
        let v = &self.eigen.eigenvectors;
        let e = DMatrix::from_diagonal(&self.eigen.eigenvalues.map(|l| (-t * l).exp()));
        let s = v * e * v.transpose();
        DMatrix::from_fn(n, n, |i, j| s[(i, j)] * self.sqrt_m[j] / self.sqrt_m[i])
    }
}

pub fn semigroup_apply(
    model: &DiscreteModel<f64>,
    mu: &PotentialMeasure<f64>,
    t: f64,
    f: &[f64],
) -> Result<Vec<f64>> {
    Semigroup::new(model, mu)?.apply(t, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `exp(A)` by Taylor series after scaling `A` below norm 1/2, then squaring.
    fn expm_taylor(a: &DMatrix<f64>) -> DMatrix<f64> {
        let n = a.nrows();
        let norm = a.abs().row_sum().max();
        let squarings = if norm > 0.5 {
            (norm / 0.5).log2().ceil() as i32
        } else {
            0
        };
        let b = a / 2f64.powi(squarings);
        let mut term = DMatrix::identity(n, n);
        let mut sum = term.clone();
        for k in 1..30 {
            term = &term * &b / k as f64;
            sum += &term;
        }
        for _ in 0..squarings {
            sum = &sum * &sum;
        }
        sum
    }

    fn model() -> (DiscreteModel<f64>, PotentialMeasure<f64>) {
        let edges = [
            (0, 1, 1.0),
            (1, 2, 0.5),
            (2, 3, 2.0),
            (0, 3, 0.25),
            (1, 3, 0.7),
        ];
        let m =
            DiscreteModel::from_edges(vec![1.0, 2.0, 0.5, 1.5], &edges, vec![0.3, 0.0, 0.0, 0.1])
                .unwrap();
        let mu = PotentialMeasure::new(vec![0.0, 0.4, 0.2, 0.0]).unwrap();
        (m, mu)
    }

    #[test]
    fn eigen_semigroup_matches_taylor_oracle() {
        let (m, mu) = model();
        let h = assemble_operator(&m, &mu).unwrap().to_dense();
        let sg = Semigroup::new(&m, &mu).unwrap();
        for t in [0.1, 1.0, 3.0] {
            let oracle = expm_taylor(&(-t * &h));
            assert!((sg.matrix(t) - &oracle).abs().max() < 1e-12 * oracle.abs().max());
            let f = [1.0, -0.5, 2.0, 0.25];
            let u = sg.apply(t, &f).unwrap();
            let o = &oracle * DVector::from_column_slice(&f);
            for i in 0..4 {
                assert!((u[i] - o[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn semigroup_property_and_identity() {
        let (m, mu) = model();
        let sg = Semigroup::new(&m, &mu).unwrap();
        let p = sg.matrix(0.7) * sg.matrix(1.1);
        assert!((p - sg.matrix(1.8)).abs().max() < 1e-12);
        assert!((sg.matrix(0.0) - DMatrix::identity(4, 4)).abs().max() < 1e-12);
    }
}
