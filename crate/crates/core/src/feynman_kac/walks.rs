//! Path engines: the continuous-time chain of a finite model and the
//! isotropic stable walk on a ball.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use super::sampler::sample_stable_increment;
use crate::error::{Error, Result};
use crate::forms::{DiscreteModel, PotentialMeasure};

/// Paths whose additive functional exceeds this are rejected: `e^{700}` is
/// within a factor 10⁴ of `f64::MAX`.
pub const WEIGHT_GUARD: f64 = 700.0;

/// Outcome of one path on `[0, t]`, together with the same path seen on the
/// grid of twice the step (for the step-halving bias estimate).
#[derive(Debug, Clone, Copy)]
pub struct PathRecord<S> {
    pub end: S,
    pub additive: f64,
    pub alive: bool,
    pub additive_coarse: f64,
    pub alive_coarse: bool,
}

pub trait PathSampler: Sync {
    type State: Copy + Send + Sync;

    /// Time step used on `[0, t]`; zero for exact engines.
    fn dt(&self, t: f64) -> f64;

    fn sample(
        &self,
        start: Self::State,
        t: f64,
        rng: &mut ChaCha8Rng,
    ) -> Result<PathRecord<Self::State>>;
}

fn guard(a: f64) -> Result<()> {
    if a > WEIGHT_GUARD {
        return Err(Error::ExplodingWeights {
            additive_functional: a,
        });
    }
    Ok(())
}

/// The Markov chain generated by `−H` for `H = M⁻¹(L_J + k)`, i.e. jumps
/// `x → y` at rate `J(x,y)/m(x)` and death at rate `k(x)/m(x)`, carrying the
/// potential `V = μ/m`. Paths are simulated exactly (Gillespie), so the
/// additive functional has no discretization error.
#[derive(Debug, Clone)]
pub struct ChainWalk {
    potential: Vec<f64>,
    total_rate: Vec<f64>,
    /// Per state: cumulative rates over `targets`, then the killing rate.
    cumulative: Vec<Vec<f64>>,
    targets: Vec<Vec<usize>>,
}

impl ChainWalk {
    pub fn new(model: &DiscreteModel<f64>, mu: &PotentialMeasure<f64>) -> Result<Self> {
        let n = model.n_states();
        if mu.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: mu.len(),
            });
        }
        let m = model.measure();
        let j = model.jump();
        let mut cumulative = Vec::with_capacity(n);
        let mut targets = Vec::with_capacity(n);
        let mut total_rate = Vec::with_capacity(n);
        for x in 0..n {
            let mut acc = 0.0;
            let mut cum = Vec::new();
            let mut tg = Vec::new();
            for y in 0..n {
                let w = j[(x, y)];
                if y != x && w > 0.0 {
                    acc += w / m[x];
                    cum.push(acc);
                    tg.push(y);
                }
            }
            acc += model.kill()[x] / m[x];
            cum.push(acc);
            total_rate.push(acc);
            cumulative.push(cum);
            targets.push(tg);
        }
        let potential = mu.weights().iter().zip(m).map(|(w, m)| w / m).collect();
        Ok(ChainWalk {
            potential,
            total_rate,
            cumulative,
            targets,
        })
    }

    pub fn n_states(&self) -> usize {
        self.potential.len()
    }

    /// `V = μ/m`.
    pub fn potential(&self) -> &[f64] {
        &self.potential
    }
}

impl PathSampler for ChainWalk {
    type State = usize;

    fn dt(&self, _t: f64) -> f64 {
        0.0
    }

    fn sample(&self, start: usize, t: f64, rng: &mut ChaCha8Rng) -> Result<PathRecord<usize>> {
        let mut x = start;
        let mut s = 0.0;
        let mut a = 0.0;
        let mut alive = true;
        loop {
            let q = self.total_rate[x];
            let hold = if q > 0.0 {
                let e: f64 = rng.sample(Exp1);
                e / q
            } else {
                f64::INFINITY
            };
            if s + hold >= t {
                a += self.potential[x] * (t - s);
                break;
            }
            a += self.potential[x] * hold;
            guard(a)?;
            s += hold;
            let u = q * rng.random::<f64>();
            let cum = &self.cumulative[x];
            let k = cum.partition_point(|&c| c <= u).min(cum.len() - 1);
            if k == cum.len() - 1 {
                alive = false;
                break;
            }
            x = self.targets[x][k];
        }
        guard(a)?;
        Ok(PathRecord {
            end: x,
            additive: a,
            alive,
            additive_coarse: a,
            alive_coarse: alive,
        })
    }
}

/// `min(c |x|^{−p}, cap)`, the truncated Hardy potential.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TruncatedPower {
    pub coefficient: f64,
    pub exponent: f64,
    pub cap: f64,
}

impl TruncatedPower {
    pub fn eval(&self, x: &[f64; 3]) -> f64 {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        if r == 0.0 {
            return self.cap;
        }
        (self.coefficient * r.powf(-self.exponent)).min(self.cap)
    }
}

type Field = dyn Fn(&[f64; 3]) -> f64 + Send + Sync;

/// Isotropic `α`-stable process on `ℝ^d` (generator `−(−Δ)^{α/2}`), killed on
/// leaving the open ball of radius `radius`, sampled on a uniform grid with
/// exact stable increments. The additive functional is the trapezoid sum of
/// the potential along the grid.
pub struct StableWalk {
    pub d: usize,
    pub alpha: f64,
    pub radius: f64,
    /// Step as a fraction of the horizon.
    pub dt_fraction: f64,
    potential: Box<Field>,
}

impl std::fmt::Debug for StableWalk {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("StableWalk")
            .field("d", &self.d)
            .field("alpha", &self.alpha)
            .field("radius", &self.radius)
            .field("dt_fraction", &self.dt_fraction)
            .finish_non_exhaustive()
    }
}

pub const DEFAULT_DT_FRACTION: f64 = 1e-3;

impl StableWalk {
    pub fn new<V>(d: usize, alpha: f64, radius: f64, potential: V) -> Result<Self>
    where
        V: Fn(&[f64; 3]) -> f64 + Send + Sync + 'static,
    {
        if !(1..=3).contains(&d) {
            return Err(Error::InvalidInput(format!(
                "dimension d = {d} outside 1..=3"
            )));
        }
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::InvalidInput(format!(
                "alpha = {alpha} outside (0, 2)"
            )));
        }
        if !(radius > 0.0) {
            return Err(Error::InvalidInput(format!(
                "radius = {radius} must be positive"
            )));
        }
        Ok(StableWalk {
            d,
            alpha,
            radius,
            dt_fraction: DEFAULT_DT_FRACTION,
            potential: Box::new(potential),
        })
    }

    pub fn with_dt_fraction(mut self, fraction: f64) -> Self {
        self.dt_fraction = fraction;
        self
    }

    fn steps(&self) -> usize {
        let n = (1.0 / self.dt_fraction).round().max(2.0) as usize;
        n + n % 2
    }

    fn inside(&self, x: &[f64; 3]) -> bool {
        x[0] * x[0] + x[1] * x[1] + x[2] * x[2] < self.radius * self.radius
    }
}

impl PathSampler for StableWalk {
    type State = [f64; 3];

    fn dt(&self, t: f64) -> f64 {
        t / self.steps() as f64
    }

    fn sample(
        &self,
        start: [f64; 3],
        t: f64,
        rng: &mut ChaCha8Rng,
    ) -> Result<PathRecord<[f64; 3]>> {
        let n = self.steps();
        let dt = t / n as f64;
        let scale = dt.powf(1.0 / self.alpha);
        let mut x = start;
        let v0 = if self.inside(&x) {
            (self.potential)(&x)
        } else {
            0.0
        };
        let (mut alive, mut alive_c) = (self.inside(&x), self.inside(&x));
        let (mut a, mut a_c) = (0.0, 0.0);
        let (mut v_prev, mut v_even) = (v0, v0);
        for k in 1..=n {
            let xi = sample_stable_increment(self.d, self.alpha, scale, rng)?;
            for (c, dx) in x.iter_mut().zip(&xi) {
                *c += dx;
            }
            let inside = self.inside(&x);
            let v = if inside { (self.potential)(&x) } else { 0.0 };
            if alive {
                if inside {
                    a += 0.5 * dt * (v_prev + v);
                    guard(a)?;
                } else {
                    alive = false;
                }
            }
            if k % 2 == 0 {
                if alive_c {
                    if inside {
                        a_c += dt * (v_even + v);
                    } else {
                        alive_c = false;
                    }
                }
                v_even = v;
            }
            v_prev = v;
            if !alive && !alive_c {
                break;
            }
        }
        Ok(PathRecord {
            end: x,
            additive: a,
            alive,
            additive_coarse: a_c,
            alive_coarse: alive_c,
        })
    }
}
