//! Stable random variables.
//!
//! All laws are normalized so that a unit increment has characteristic
//! function `exp(−|θ|^α)`, i.e. it is the time-one law of the process with
//! generator `−(−Δ)^{α/2}`. An increment over `Δt` is then `Δt^{1/α}` times a
//! unit one.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::error::{Error, Result};

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::InvalidInput(format!(
            "stable index alpha = {alpha} outside (0, 2]"
        )));
    }
    Ok(())
}

/// Positive `a`-stable variable with Laplace transform `exp(−s^a)`,
/// `0 < a ≤ 1` (Kanter's representation).
pub fn sample_positive_stable<R: Rng + ?Sized>(a: f64, rng: &mut R) -> f64 {
    if a >= 1.0 {
        return 1.0;
    }
    let u = PI * rng.random::<f64>();
    let e: f64 = rng.sample(Exp1);
    let head = (a * u).sin() / u.sin().powf(1.0 / a);
    let tail = (((1.0 - a) * u).sin() / e).powf((1.0 - a) / a);
    head * tail
}

/// Symmetric `α`-stable scalar by the Chambers–Mallows–Stuck transform.
/// At `α = 2` this is `N(0, 2)`.
pub fn sample_symmetric_stable<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    let v = PI * (rng.random::<f64>() - 0.5);
    let w: f64 = rng.sample(Exp1);
    if alpha == 1.0 {
        return v.tan();
    }
    let v = v.clamp(-FRAC_PI_2 + 1e-300, FRAC_PI_2 - 1e-300);
    (alpha * v).sin() / v.cos().powf(1.0 / alpha)
        * (((1.0 - alpha) * v).cos() / w).powf((1.0 - alpha) / alpha)
}

/// Rotation invariant `α`-stable vector in `ℝ^d` scaled by `scale`:
/// a Gaussian `N(0, 2I)` subordinated by a positive `(α/2)`-stable variance.
/// This is the increment of the isotropic process whose jump kernel is
/// proportional to `|x − y|^{−d−α}`.
pub fn sample_stable_increment<R: Rng + ?Sized>(
    d: usize,
    alpha: f64,
    scale: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    check_alpha(alpha)?;
    let a = sample_positive_stable(alpha / 2.0, rng);
    let s = scale * (2.0 * a).sqrt();
    Ok((0..d)
        .map(|_| {
            let g: f64 = rng.sample(StandardNormal);
            s * g
        })
        .collect())
}

/// `d` independent symmetric `α`-stable components. Its jump kernel lives on
/// the coordinate axes, so it is not the process of the stable models for
/// `d > 1`; kept for componentwise experiments.
pub fn sample_componentwise_increment<R: Rng + ?Sized>(
    d: usize,
    alpha: f64,
    scale: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    check_alpha(alpha)?;
    Ok((0..d)
        .map(|_| scale * sample_symmetric_stable(alpha, rng))
        .collect())
}
