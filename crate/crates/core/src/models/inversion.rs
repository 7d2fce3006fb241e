//! The inversion `T x = x / |x|²` and the correspondence it induces between
//! the `δ` and `δ̂ = d − α − δ` transformed stable forms.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::special::check_parameters;
use crate::error::{Error, Result};

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn invert(x: &[f64]) -> Result<Vec<f64>> {
    let r2: f64 = x.iter().map(|v| v * v).sum();
    if r2 == 0.0 {
        return Err(Error::InvalidInput(
            "inversion is undefined at the origin".into(),
        ));
    }
    Ok(x.iter().map(|v| v / r2).collect())
}

/// Kernel of the `δ`-transformed form, `|x − y|^{−d−α} |x|^{−δ} |y|^{−δ}`.
pub fn transformed_kernel(d: usize, alpha: f64, delta: f64, x: &[f64], y: &[f64]) -> f64 {
    let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    norm(&diff).powf(-(d as f64) - alpha) * norm(x).powf(-delta) * norm(y).powf(-delta)
}

/// Differential of `T` at `x`: `(I − 2 x̂ x̂ᵀ) / |x|²`.
pub fn jacobian(x: &[f64]) -> DMatrix<f64> {
    let d = x.len();
    let r2: f64 = x.iter().map(|v| v * v).sum();
    DMatrix::from_fn(d, d, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        (id - 2.0 * x[i] * x[j] / r2) / r2
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct InversionReport {
    pub d: usize,
    pub alpha: f64,
    pub delta: f64,
    pub delta_hat: f64,
    pub n_pairs: usize,
    /// `|Tx−Ty|^{d+α}|Tx|^δ|Ty|^δ` against `|x−y|^{d+α}|x|^{−d−α−δ}|y|^{−d−α−δ}`.
    pub kernel_identity: f64,
    /// `k_δ(Tx, Ty) |x|^{−2d} |y|^{−2d}` against `k_{δ̂}(x, y)`.
    pub pushforward: f64,
    /// `|T(Tx) − x| / |x|`.
    pub involution: f64,
    /// `|det DT(x)|` against `|x|^{−2d}`.
    pub jacobian: f64,
    /// `m^δ(Tx) |det DT(x)|` against `|x|^{−2δ̂−2α}`, i.e. `m^{δ̂}` up to the
    /// time change `|x|^{−2α}`.
    pub measure: f64,
    /// Points on the unit sphere are fixed.
    pub unit_sphere: f64,
}

impl InversionReport {
    pub fn max_error(&self) -> f64 {
        [
            self.kernel_identity,
            self.pushforward,
            self.involution,
            self.jacobian,
            self.measure,
            self.unit_sphere,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Random point with log-uniform radius in `[e^{−3}, e^{3}]` and uniform
/// direction.
fn sample_point(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let n = norm(&v);
        if n > 1e-3 && n <= 1.0 {
            let r = rng.random_range(-3.0f64..3.0).exp();
            return v.iter().map(|c| c * r / n).collect();
        }
    }
}

/// Checks the inversion identities on `n_pairs` random pairs.
pub fn inversion_map_check(
    d: usize,
    alpha: f64,
    delta: f64,
    n_pairs: usize,
    seed: u64,
) -> Result<InversionReport> {
    check_parameters(d, alpha, delta)?;
    let df = d as f64;
    let delta_hat = df - alpha - delta;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = InversionReport {
        d,
        alpha,
        delta,
        delta_hat,
        n_pairs,
        kernel_identity: 0.0,
        pushforward: 0.0,
        involution: 0.0,
        jacobian: 0.0,
        measure: 0.0,
        unit_sphere: 0.0,
    };
    let p = df + alpha;
    for _ in 0..n_pairs {
        let x = sample_point(&mut rng, d);
        let y = sample_point(&mut rng, d);
        let (tx, ty) = (invert(&x)?, invert(&y)?);
        let (rx, ry) = (norm(&x), norm(&y));
        let dxy: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
        let dt: Vec<f64> = tx.iter().zip(&ty).map(|(a, b)| a - b).collect();
        if norm(&dxy) < 1e-9 * (rx + ry) {
            continue;
        }

        let lhs = norm(&dt).powf(p) * norm(&tx).powf(delta) * norm(&ty).powf(delta);
        let rhs = norm(&dxy).powf(p) * rx.powf(-p - delta) * ry.powf(-p - delta);
        report.kernel_identity = report.kernel_identity.max(rel(lhs, rhs));

        let pushed =
            transformed_kernel(d, alpha, delta, &tx, &ty) * rx.powf(-2.0 * df) * ry.powf(-2.0 * df);
        let target = transformed_kernel(d, alpha, delta_hat, &x, &y);
        report.pushforward = report.pushforward.max(rel(pushed, target));

        let back = invert(&tx)?;
        let err: Vec<f64> = back.iter().zip(&x).map(|(a, b)| a - b).collect();
        report.involution = report.involution.max(norm(&err) / rx);

        let det = jacobian(&x).determinant().abs();
        report.jacobian = report.jacobian.max(rel(det, rx.powf(-2.0 * df)));

        let m_tx = norm(&tx).powf(-2.0 * delta) * det;
        report.measure = report
            .measure
            .max(rel(m_tx, rx.powf(-2.0 * delta_hat - 2.0 * alpha)));

        let unit: Vec<f64> = x.iter().map(|v| v / rx).collect();
        let tu = invert(&unit)?;
        let err: Vec<f64> = tu.iter().zip(&unit).map(|(a, b)| a - b).collect();
        report.unit_sphere = report.unit_sphere.max(norm(&err));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identities_hold_in_every_dimension() {
        for (d, alpha, delta) in [(1, 0.5, 0.1), (2, 1.0, 0.25), (3, 1.5, 1.2)] {
            let rep = inversion_map_check(d, alpha, delta, 2000, 7).unwrap();
            assert!(rep.max_error() < 1e-12, "{rep:?}");
        }
    }

    #[test]
    fn jacobian_is_a_scaled_reflection() {
        let x = [0.6, -0.8, 2.0];
        let j = jacobian(&x);
        let r2 = 0.36 + 0.64 + 4.0;
        // (r² J)² = I for a reflection
        let refl = &j * r2;
        let sq = &refl * &refl;
        assert!((sq - DMatrix::identity(3, 3)).norm() < 1e-14);
        assert!(invert(&[0.0, 0.0]).is_err());
    }
}
