//! Spectral bottoms `λ(μ)`, `γ(μ)`, ground states and the
//! subcritical / critical / supercritical trichotomy.
//!
//! `λ(μ) = inf { E(u) : Σ μ u² = 1 }` and `γ(μ) = inf { E^μ(u) : Σ m u² = 1 }`.
//! The two are linked by `λ(μ) ≥ 1 ⟺ γ(μ) ≥ 0`, and `λ` is homogeneous of
//! degree −1 in `μ`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::extrapolate::aitken;
use crate::forms::{assemble_operator, form_matrix, DiscreteModel, Exhaustion, PotentialMeasure};
use crate::linalg::{bottom_eigenpair, schur_complement};
use crate::scalar::Scalar;

pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Subcritical,
    Critical,
    Supercritical,
    Indeterminate,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralReport<T: Scalar> {
    /// `+∞` when `μ ≡ 0`.
    pub lambda: T,
    pub gamma: T,
    /// Minimizer of `E^μ(u)/‖u‖²_m`, present when `γ ≥ −tol`.
    pub ground_state: Option<Vec<T>>,
    /// `‖H^μ φ‖_m` for the unit ground state.
    pub residual: T,
    /// `‖H^μ φ − γ φ‖_m`, the accuracy of the eigensolve.
    pub eigen_residual: T,
    pub verdict: Verdict,
    pub tol: T,
}

fn infinity<T: Scalar>() -> T {
    T::lit(f64::INFINITY)
}

/// `λ(μ)`: the smallest generalized eigenvalue of `(Q, diag μ)` after the
/// states outside `supp μ` are eliminated by a harmonic Schur complement.
pub fn lambda_mu<T: Scalar>(model: &DiscreteModel<T>, mu: &PotentialMeasure<T>) -> Result<T> {
    let q = form_matrix(model, &PotentialMeasure::zeros(model.n_states()))?;
    let support = mu.support();
    if support.is_empty() {
        return Ok(infinity());
    }
    if !model.has_killing() {
        // constants have zero energy and positive μ-mass
        return Ok(T::zero());
    }
    let reduced = schur_complement(&q, &support)?;
    let s: Vec<T> = support
        .iter()
        .map(|&x| T::one() / mu.weights()[x].sqrt())
        .collect();
    let k = s.len();
    let pencil = DMatrix::from_fn(k, k, |i, j| reduced[(i, j)] * s[i] * s[j]);
    let pair = bottom_eigenpair(&pencil)?;
    Ok(pair.value.max(T::zero()))
}

/// Bottom eigenpair of `H^μ` on `L²(m)`, as `(γ, φ)` with `‖φ‖_m = 1` and
/// the largest-magnitude entry of `φ` positive.
fn bottom_of_operator<T: Scalar>(
    model: &DiscreteModel<T>,
    mu: &PotentialMeasure<T>,
) -> Result<(T, Vec<T>)> {
    let op = assemble_operator(model, mu)?;
    let pair = bottom_eigenpair(&op.symmetrized())?;
    let mut phi: Vec<T> = pair
        .vector
        .iter()
        .zip(model.measure())
        .map(|(&v, &m)| v / m.sqrt())
        .collect();
    let norm = op.inner(&phi, &phi).sqrt();
    let lead =
        phi.iter().copied().fold(
            T::zero(),
            |a, v| if v.magnitude() > a.magnitude() { v } else { a },
        );
    let sign = if lead < T::zero() {
        -T::one()
    } else {
        T::one()
    };
    for v in phi.iter_mut() {
        *v *= sign / norm;
    }
    Ok((pair.value, phi))
}

/// `γ(μ)`, the bottom of the spectrum of `H^μ` in `L²(m)`.
pub fn gamma_mu<T: Scalar>(model: &DiscreteModel<T>, mu: &PotentialMeasure<T>) -> Result<T> {
    Ok(bottom_of_operator(model, mu)?.0)
}

/// Ground state of `E^μ`: the positive minimizer of `E^μ(u)/‖u‖²_m`.
/// Refused with [`Error::Supercritical`] when `γ < −tol`.
pub fn ground_state<T: Scalar>(
    model: &DiscreteModel<T>,
    mu: &PotentialMeasure<T>,
    tol: T,
) -> Result<Vec<T>> {
    let (gamma, phi) = bottom_of_operator(model, mu)?;
    if gamma < -tol {
        return Err(Error::Supercritical {
            gamma: gamma.as_f64(),
        });
    }
    Ok(phi)
}

fn m_norm<T: Scalar>(v: &[T], m: &[T]) -> T {
    v.iter()
        .zip(m)
        .fold(T::zero(), |a, (&x, &w)| a + x * x * w)
        .sqrt()
}

/// The verdict implied by `λ`, the residual and the tolerance band.
pub fn verdict_for<T: Scalar>(lambda: T, residual: T, tol: T) -> Verdict {
    if lambda > T::one() + tol {
        Verdict::Subcritical
    } else if lambda < T::one() - tol {
        Verdict::Supercritical
    } else if residual <= tol {
        Verdict::Critical
    } else {
        Verdict::Indeterminate
    }
}

pub fn classify<T: Scalar>(
    model: &DiscreteModel<T>,
    mu: &PotentialMeasure<T>,
    tol: T,
) -> Result<SpectralReport<T>> {
    if !(tol > T::zero()) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    let lambda = lambda_mu(model, mu)?;
    let (gamma, phi) = bottom_of_operator(model, mu)?;
    let op = assemble_operator(model, mu)?;
    let h_phi = op.apply(&phi);
    let residual = m_norm(&h_phi, model.measure());
    let shifted: Vec<T> = h_phi
        .iter()
        .zip(&phi)
        .map(|(&a, &b)| a - gamma * b)
        .collect();
    let eigen_residual = m_norm(&shifted, model.measure());
    let verdict = verdict_for(lambda, residual, tol);
    Ok(SpectralReport {
        lambda,
        gamma,
        ground_state: if gamma >= -tol { Some(phi) } else { None },
        residual,
        eigen_residual,
        verdict,
        tol,
    })
}

/// Per-level `λ` across an exhaustion with its Aitken limit.
#[derive(Debug, Clone, Serialize)]
pub struct LevelSpectrum {
    pub lambdas: Vec<f64>,
    pub extrapolated: Option<f64>,
}

/// `λ(μ_n)` on every level of an exhaustion, `mus[n]` living on level `n`.
pub fn lambda_levels<T: Scalar>(
    exhaustion: &Exhaustion<T>,
    mus: &[PotentialMeasure<T>],
) -> Result<LevelSpectrum> {
    if mus.len() != exhaustion.n_levels() {
        return Err(Error::DimensionMismatch {
            expected: exhaustion.n_levels(),
            got: mus.len(),
        });
    }
    let lambdas = exhaustion
        .levels()
        .iter()
        .zip(mus)
        .map(|(m, mu)| lambda_mu(m, mu).map(|l| l.as_f64()))
        .collect::<Result<Vec<_>>>()?;
    let extrapolated = aitken(&lambdas);
    Ok(LevelSpectrum {
        lambdas,
        extrapolated,
    })
}

/// `λ(μ)` by the Rayleigh quotient of an explicit test vector, an upper
/// bound for the true value.
pub fn rayleigh_lambda<T: Scalar>(
    model: &DiscreteModel<T>,
    mu: &PotentialMeasure<T>,
    u: &[T],
) -> Result<T> {
    let e = crate::forms::dirichlet_energy(model, u)?;
    let mass = mu
        .weights()
        .iter()
        .zip(u)
        .fold(T::zero(), |a, (&w, &x)| a + w * x * x);
    if mass == T::zero() {
        return Ok(infinity());
    }
    Ok(e / mass)
}
