//! One-dimensional diffusions on `(0, ∞)` given by a scale function `S`
//! with `S(0+) = 0` and `S(∞) = ∞`, so that `R(x, y) = S(x) ∧ S(y)`.
//!
//! The truncation to a grid `x_0 < … < x_{N−1}` is the resistor ladder with
//! conductances `1/(S(x_{i+1}) − S(x_i))`, grounded at 0 through the
//! conductance `1/S(x_0)` and reflecting at the right end. Its Green kernel
//! is exactly `S(x_i) ∧ S(x_j)`.

use serde::{Deserialize, Serialize};

use super::stable::RadialPower;
use crate::error::{Error, Result};
use crate::forms::{DiscreteModel, PotentialMeasure};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scale", rename_all = "lowercase")]
pub enum Scale {
    /// `S(x) = x^p`.
    Pow { p: f64 },
}

impl Scale {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Scale::Pow { p } => x.powf(p),
        }
    }

    /// Hardy constant `c` with `ν = c x^{−(p+1)} dx` for the potential
    /// `x^{−(p+2)/2} dx`.
    pub fn hardy_coefficient(&self) -> f64 {
        match *self {
            Scale::Pow { p } => p / 4.0,
        }
    }
}

/// `n` nodes spaced geometrically on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometricGrid {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl GeometricGrid {
    pub fn nodes(&self) -> Result<Vec<f64>> {
        if !(self.lo > 0.0 && self.hi > self.lo && self.n >= 3) {
            return Err(Error::InvalidInput(format!(
                "geometric grid needs 0 < lo < hi and n >= 3, got {self:?}"
            )));
        }
        let q = (self.hi / self.lo).ln() / (self.n - 1) as f64;
        let mut x: Vec<f64> = (0..self.n)
            .map(|i| self.lo * (q * i as f64).exp())
            .collect();
        x[self.n - 1] = self.hi;
        Ok(x)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiffusionRecipe {
    #[serde(flatten)]
    pub scale: Scale,
    pub grid: GeometricGrid,
    /// Density of `μ`; defaults to `x^{−(p+2)/2}`, the critical choice.
    #[serde(default)]
    pub mu: Option<RadialPower>,
}

impl DiffusionRecipe {
    pub fn density(&self) -> RadialPower {
        self.mu.unwrap_or(match self.scale {
            Scale::Pow { p } => RadialPower {
                coefficient: 1.0,
                exponent: (p + 2.0) / 2.0,
            },
        })
    }
}

#[derive(Debug, Clone)]
pub struct DiffusionSystem {
    pub nodes: Vec<f64>,
    pub scale: Vec<f64>,
    /// Dual cell boundaries: cell `i` is `[edges[i], edges[i + 1]]`.
    pub edges: Vec<f64>,
    pub model: DiscreteModel<f64>,
    pub mu: PotentialMeasure<f64>,
}

impl DiffusionSystem {
    /// The closed-form kernel `S(x_i) ∧ S(x_j)`.
    pub fn green_kernel(&self) -> impl Fn(usize, usize) -> f64 + '_ {
        move |i, j| self.scale[i].min(self.scale[j])
    }
}

/// `∫_a^b c x^{−e} dx`, `b` possibly infinite.
fn power_integral(c: f64, e: f64, a: f64, b: f64) -> f64 {
    if e == 1.0 {
        return c * (b / a).ln();
    }
    let f = |x: f64| x.powf(1.0 - e) / (1.0 - e);
    if b.is_infinite() {
        // convergent only for e > 1, where x^{1−e} → 0
        return -c * f(a);
    }
    c * (f(b) - f(a))
}

pub fn build_diffusion_model(recipe: &DiffusionRecipe) -> Result<DiffusionSystem> {
    let x = recipe.grid.nodes()?;
    let n = x.len();
    let s: Vec<f64> = x.iter().map(|&v| recipe.scale.eval(v)).collect();
    if !(s[0] > 0.0) {
        return Err(Error::InvalidInput(
            "S must be positive at the first node".into(),
        ));
    }
    if let Some(i) = s.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput(format!(
            "S is not increasing at node {}",
            i + 1
        )));
    }
    let mut edges = vec![0.0];
    edges.extend(x.windows(2).map(|w| (w[0] * w[1]).sqrt()));
    edges.push(x[n - 1]);
    let m: Vec<f64> = edges.windows(2).map(|w| w[1] - w[0]).collect();
    let cond: Vec<(usize, usize, f64)> = (0..n - 1)
        .map(|i| (i, i + 1, 1.0 / (s[i + 1] - s[i])))
        .collect();
    let mut kill = vec![0.0; n];
    kill[0] = 1.0 / s[0];
    let model = DiscreteModel::from_edges(m, &cond, kill)?;

    let rho = recipe.density();
    let p = match recipe.scale {
        Scale::Pow { p } => p,
    };
    if rho.exponent <= 1.0 || rho.exponent >= p + 1.0 {
        return Err(Error::InvalidInput(format!(
            "mu = x^-{} needs 1 < exponent < p + 1 for a finite potential",
            rho.exponent
        )));
    }
    let mut w = Vec::with_capacity(n);
    for i in 0..n {
        let (a, b) = (edges[i], edges[i + 1]);
        let mass = if i == 0 {
            // R(x_0, y) = S(y) for y < x_0: fold ∫_0^{e} S dμ into the node
            let k = 1.0 + p - rho.exponent;
            rho.coefficient * b.powf(k) / k / s[0]
        } else if i == n - 1 {
            // R(x_{N−1}, y) = S(x_{N−1}) = R(x_i, x_{N−1}) for y beyond the grid
            power_integral(rho.coefficient, rho.exponent, a, f64::INFINITY)
        } else {
            power_integral(rho.coefficient, rho.exponent, a, b)
        };
        w.push(mass);
    }
    let mu = PotentialMeasure::new(w)?;
    Ok(DiffusionSystem {
        nodes: x,
        scale: s,
        edges,
        model,
        mu,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::special::integrate_graded;
    use crate::potential::{green_potential, GreenOperator};

    fn recipe(p: f64, n: usize) -> DiffusionRecipe {
        DiffusionRecipe {
            scale: Scale::Pow { p },
            grid: GeometricGrid {
                lo: 1e-2,
                hi: 1e2,
                n,
            },
            mu: None,
        }
    }

    #[test]
    fn discrete_kernel_is_scale_minimum() {
        for p in [1.0, 0.5, 2.0] {
            let sys = build_diffusion_model(&recipe(p, 12)).unwrap();
            let r = GreenOperator::new(&sys.model).unwrap().kernel().unwrap();
            let k = sys.green_kernel();
            for i in 0..12 {
                for j in 0..12 {
                    assert!((r[(i, j)] - k(i, j)).abs() <= 1e-9 * k(i, j), "p = {p}");
                }
            }
        }
    }

    #[test]
    fn potential_matches_closed_form() {
        // S = x, μ = x^{−3/2}: Rμ(x) = 4 √x; the tail and the first cell are
        // folded into the end nodes so the discrete value is exact up to the
        // cell integrals
        let sys = build_diffusion_model(&recipe(1.0, 200)).unwrap();
        let g = GreenOperator::new(&sys.model).unwrap();
        let r = green_potential(&g, &sys.mu).unwrap();
        for (i, &x) in sys.nodes.iter().enumerate() {
            let exact = 4.0 * x.sqrt();
            assert!(
                (r[i] - exact).abs() < 2e-3 * exact,
                "node {i}: {} vs {exact}",
                r[i]
            );
        }
    }

    #[test]
    fn cell_masses_by_quadrature() {
        let sys = build_diffusion_model(&recipe(1.5, 20)).unwrap();
        let e = 1.75;
        for i in 1..19 {
            let (a, b) = (sys.edges[i], sys.edges[i + 1]);
            let q = quadrature::integrate(|x: f64| x.powf(-e), a, b, 1e-14).integral;
            assert!((sys.mu.weights()[i] - q).abs() < 1e-10 * q);
        }
    }

    #[test]
    fn kh_condition_holds_for_power_scales() {
        // sup_r μ((r, ∞)) ∫_0^r S dμ for S = x^p, μ = x^{−(p+2)/2}: the product is
        // scale invariant, so it is the same finite constant for every r
        for p in [0.5, 1.0, 3.0] {
            let e = (p + 2.0) / 2.0;
            let vals: Vec<f64> = [0.1, 1.0, 10.0]
                .iter()
                .map(|&r: &f64| {
                    let tail = integrate_graded(
                        |w: f64| (r / w).powf(-e) * r / (w * w),
                        0.0,
                        1.0,
                        4.0,
                        1e-13,
                    );
                    let head = integrate_graded(|x: f64| x.powf(p - e), 0.0, r, 4.0, 1e-13);
                    tail * head
                })
                .collect();
            let exact = 4.0 / (p * p);
            for v in vals {
                assert!((v - exact).abs() < 1e-8 * exact, "p = {p}: {v}");
            }
        }
    }

    #[test]
    fn rejects_non_integrable_potentials() {
        let mut r = recipe(1.0, 10);
        r.mu = Some(RadialPower {
            coefficient: 1.0,
            exponent: 2.5,
        });
        assert!(build_diffusion_model(&r).is_err());
    }
}
