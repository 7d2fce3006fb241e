//! Energies of the radial cut-offs `φ_n` in the `δ`-transformed stable form,
//!
//! ```text
//! ∬ (φ_n(x) − φ_n(y))² |x − y|^{−d−α} |x|^{−δ} |y|^{−δ} dx dy,
//! ```
//!
//! where `φ_n(x) = f_n(|x|)` for `|x| ≥ 1` and `f_n(1/|x|)` inside the unit
//! ball, with `f_n = 1` on `[0, n]`, `(2n − t)/n` on `[n, 2n]` and 0 beyond.
//!
//! For radial functions the angular integrals reduce the energy to
//! `∫∫ r^{d−1−δ} s^{d−1−δ} (g(r) − g(s))² K_d(r, s) dr ds` with
//! `K_d(r, s) = ∫_{S^{d−1}} ∫_{S^{d−1}} |rθ − sη|^{−d−α} dθ dη`.

use std::f64::consts::PI;
use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;
use serde::Serialize;

use super::special::{check_parameters, gamma, integrate_graded};
use crate::error::Result;

/// Target absolute error of the inner and outer quadratures.
const INNER_TOL: f64 = 1e-13;
const OUTER_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy)]
pub struct CutOff {
    pub n: f64,
}

impl CutOff {
    pub fn f(&self, t: f64) -> f64 {
        let n = self.n;
        if t <= n {
            1.0
        } else if t <= 2.0 * n {
            (2.0 * n - t) / n
        } else {
            0.0
        }
    }

    /// Radial profile `g(r) = φ_n(x)` for `|x| = r`.
    pub fn g(&self, r: f64) -> f64 {
        if r >= 1.0 {
            self.f(r)
        } else {
            self.f(1.0 / r)
        }
    }

    /// `g(r) − g(s)` for `s = r + t`, exact in `t` when both radii lie on the
    /// same taper; plain subtraction loses all digits as `t → 0`.
    fn gap(&self, r: f64, s: f64, t: f64) -> f64 {
        let n = self.n;
        let outer = |x: f64| x > n && x < 2.0 * n;
        let inner = |x: f64| x > 0.5 / n && x < 1.0 / n;
        if outer(r) && outer(s) {
            t / n
        } else if inner(r) && inner(s) {
            -t / (r * s * n)
        } else {
            self.g(r) - self.g(s)
        }
    }

    fn kinks(&self) -> [f64; 6] {
        let n = self.n;
        [0.5 / n, 1.0 / n, 1.0, n, 2.0 * n, 3.0 * n]
    }
}

fn gl8() -> &'static [(f64, f64)] {
    static GL: OnceLock<GaussLegendre> = OnceLock::new();
    GL.get_or_init(|| GaussLegendre::new(NonZeroUsize::new(8).unwrap()))
        .as_node_weight_pairs()
}

/// `∫_0^{π/2} (cos²ψ + c² sin²ψ)^q dψ` on panels graded toward `π/2`,
/// where the integrand varies on the scale `c`.
fn angular(c: f64, q: f64) -> f64 {
    if c < 1e-12 {
        return 0.5 * PI.sqrt() * gamma(q + 0.5) / gamma(q + 1.0);
    }
    let mut edges = vec![0.0];
    let mut t = c;
    while t < 0.5 * PI {
        edges.push(t);
        t *= 2.0;
    }
    edges.push(0.5 * PI);
    let nodes = gl8();
    let mut s = 0.0;
    // t is the distance from π/2, so cos ψ = sin t
    for w in edges.windows(2) {
        let half = 0.5 * (w[1] - w[0]);
        let mid = 0.5 * (w[0] + w[1]);
        for &(z, wt) in nodes {
            let t = mid + half * z;
            let (st, ct) = t.sin_cos();
            s += half * wt * (st * st + c * c * ct * ct).powf(q);
        }
    }
    s
}

/// Doubled spherical integral `K_d(r, s)` of `|rθ − sη|^{−d−α}`.
pub fn radial_kernel(d: usize, alpha: f64, r: f64, s: f64) -> f64 {
    kernel_with_gap(d, alpha, r, s, (r - s).abs())
}

/// `K_d(r, s)` given `a = |r − s|` separately, so that callers can keep the
/// gap exact near the diagonal.
fn kernel_with_gap(d: usize, alpha: f64, r: f64, s: f64, a: f64) -> f64 {
    let p = (d as f64 + alpha) / 2.0;
    let b = r + s;
    match d {
        1 => 2.0 * (a.powf(-1.0 - alpha) + b.powf(-1.0 - alpha)),
        2 => {
            // |rθ − sη|² = a² cos²(φ/2) + b² sin²(φ/2); the substitution
            // tan(φ/2) = (a/b) tan ψ removes the near-singularity at a = 0
            let c = a / b;
            2.0 * PI * 4.0 * c * a.powf(-2.0 * p) * angular(c, p - 1.0)
        }
        _ => {
            // b^q − a^q with b − a = 2 min(r, s), without cancellation when r ≪ s
            let q = 2.0 - 2.0 * p;
            let diff = a.powf(q) * (q * (2.0 * r.min(s) / a).ln_1p()).exp_m1();
            8.0 * PI * PI * diff / (2.0 * r * s * (1.0 - p))
        }
    }
}

/// `∫_a^b f` split at `cuts`; an infinite `b` is mapped onto `(0, 1]` by
/// `s = c / w` from the last cut `c > 0`, graded by `w = u^tail_k`. Pieces
/// ending at a point of `singular` are graded toward it.
fn integrate_pieces<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    cuts: &[f64],
    singular: &[f64],
    tail_k: f64,
    tol: f64,
) -> f64 {
    let mut pts: Vec<f64> = cuts.iter().copied().filter(|&c| c > a && c < b).collect();
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.dedup();
    let mut edges = vec![a];
    edges.extend(pts);
    let mut total = 0.0;
    if b.is_finite() {
        edges.push(b);
    }
    for w in edges.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi <= lo {
            continue;
        }
        let width = hi - lo;
        let below = singular
            .iter()
            .copied()
            .filter(|&p| p < lo && lo - p < width)
            .fold(f64::NAN, f64::max);
        let above = singular
            .iter()
            .copied()
            .filter(|&p| p > hi && p - hi < width)
            .fold(f64::NAN, f64::min);
        total += if singular.contains(&lo) {
            integrate_graded(&f, lo, hi, 4.0, tol)
        } else if singular.contains(&hi) {
            -integrate_graded(&f, hi, lo, 4.0, tol)
        } else if below.is_finite() {
            // a singularity just outside the piece: integrate in log distance
            let g = |v: f64| {
                let e = v.exp();
                f(below + e) * e
            };
            quadrature::integrate(g, (lo - below).ln(), (hi - below).ln(), tol).integral
        } else if above.is_finite() {
            let g = |v: f64| {
                let e = v.exp();
                f(above - e) * e
            };
            quadrature::integrate(g, (above - hi).ln(), (above - lo).ln(), tol).integral
        } else {
            integrate_graded(&f, lo, hi, 1.0, tol)
        };
    }
    if b.is_infinite() {
        let c = *edges.last().unwrap();
        assert!(c > 0.0, "tail mapping needs a positive cut");
        total += integrate_graded(|w: f64| f(c / w) * c / (w * w), 0.0, 1.0, tail_k, tol);
    }
    total
}

#[derive(Debug, Clone, Serialize)]
pub struct TestFunctionEnergy {
    pub n: usize,
    /// `{|x| ≤ 1/n} × {|y| ≥ 1}`.
    pub i1: f64,
    /// `{1/n ≤ |x| ≤ 1} × {|y| ≥ n}`.
    pub i2: f64,
    /// `{1 ≤ |x| ≤ 3n} × {|y| ≥ 3n}`.
    pub ii1: f64,
    /// `{1 ≤ |x| ≤ |y| ≤ 3n}`.
    pub ii2: f64,
    /// `2 (I1 + I2 + 2 II1 + 2 II2)`.
    pub total: f64,
    /// The same energy integrated over the whole space in one piece.
    pub direct_total: f64,
    /// Contributions of `{|x|,|y| ≤ 1}` and `{|x|,|y| ≥ 1}`, equal by the
    /// inversion symmetry at `δ = δ*`.
    pub inner_block: f64,
    pub outer_block: f64,
}

struct Integrand {
    d: usize,
    alpha: f64,
    delta: f64,
    cut: CutOff,
    /// The integrand decays like `s^{−1−α−δ}`; grading the mapped tail by
    /// this power makes it vanish linearly at `w = 0`.
    tail_k: f64,
}

impl Integrand {
    fn weight(&self, r: f64) -> f64 {
        r.powf(self.d as f64 - 1.0 - self.delta)
    }

    /// Integrand at `(r, r + t)`.
    fn at(&self, r: f64, t: f64) -> f64 {
        let s = r + t;
        let diff = self.cut.gap(r, s, t);
        if diff == 0.0 {
            return 0.0;
        }
        self.weight(r)
            * self.weight(s)
            * diff
            * diff
            * kernel_with_gap(self.d, self.alpha, r, s, t.abs())
    }

    /// `∫_{s0}^{s1} integrand(r, s) ds`.
    fn inner(&self, r: f64, s0: f64, s1: f64) -> f64 {
        if s1 <= s0 {
            return 0.0;
        }
        // inner variable t = s − r; the diagonal t = 0 is a weak singularity
        // once α > 1, the origin s = 0 one when d = 1
        let mut cuts: Vec<f64> = self.cut.kinks().iter().map(|k| k - r).collect();
        cuts.extend([0.0, r]);
        integrate_pieces(
            |t| self.at(r, t),
            s0 - r,
            s1 - r,
            &cuts,
            &[0.0, -r],
            self.tail_k,
            INNER_TOL,
        )
    }

    fn region(&self, r0: f64, r1: f64, s_range: impl Fn(f64) -> (f64, f64)) -> f64 {
        integrate_pieces(
            |r| {
                let (s0, s1) = s_range(r);
                self.inner(r, s0, s1)
            },
            r0,
            r1,
            &self.cut.kinks(),
            &[0.0],
            self.tail_k,
            OUTER_TOL,
        )
    }
}

/// Regional energies of `φ_n`. Intended for `δ = δ*`, where the inversion
/// symmetry makes the decomposition exact.
pub fn test_function_energy(
    d: usize,
    alpha: f64,
    delta: f64,
    n: usize,
) -> Result<TestFunctionEnergy> {
    check_parameters(d, alpha, delta)?;
    if n == 0 {
        return Err(crate::error::Error::InvalidInput(
            "n must be at least 1".into(),
        ));
    }
    let nf = n as f64;
    let it = Integrand {
        d,
        alpha,
        delta,
        cut: CutOff { n: nf },
        tail_k: (2.0 / (alpha + delta)).max(1.0),
    };
    let inf = f64::INFINITY;
    let i1 = it.region(0.0, 1.0 / nf, |_| (1.0, inf));
    let i2 = it.region(1.0 / nf, 1.0, |_| (nf, inf));
    let ii1 = it.region(1.0, 3.0 * nf, |_| (3.0 * nf, inf));
    let ii2 = it.region(1.0, 3.0 * nf, |r| (r, 3.0 * nf));
    let total = 2.0 * (i1 + i2 + 2.0 * ii1 + 2.0 * ii2);
    let direct_total = it.region(0.0, inf, |_| (0.0, inf));
    let inner_block = it.region(0.0, 1.0, |_| (0.0, 1.0));
    let outer_block = it.region(1.0, inf, |_| (1.0, inf));
    Ok(TestFunctionEnergy {
        n,
        i1,
        i2,
        ii1,
        ii2,
        total,
        direct_total,
        inner_block,
        outer_block,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cut_off_values() {
        let c = CutOff { n: 3.0 };
        assert_eq!(c.g(1.0), 1.0);
        assert_eq!(c.g(3.0), 1.0);
        assert_eq!(c.g(4.5), 0.5);
        assert_eq!(c.g(6.0), 0.0);
        assert_eq!(c.g(1.0 / 4.5), c.g(4.5));
        assert_eq!(c.g(0.1), 0.0);
    }

    /// Brute-force spherical average for the kernel oracle.
    fn kernel_by_quadrature(d: usize, alpha: f64, r: f64, s: f64) -> f64 {
        let p = d as f64 + alpha;
        match d {
            2 => {
                let f = |phi: f64| (r * r + s * s - 2.0 * r * s * phi.cos()).powf(-p / 2.0);
                2.0 * PI * 2.0 * quadrature::integrate(f, 0.0, PI, 1e-14).integral
            }
            3 => {
                let f = |b: f64| (r * r + s * s - 2.0 * r * s * b.cos()).powf(-p / 2.0) * b.sin();
                4.0 * PI * 2.0 * PI * quadrature::integrate(f, 0.0, PI, 1e-14).integral
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn radial_kernels_match_spherical_quadrature() {
        for (d, alpha) in [(2usize, 1.0), (2, 0.4), (3, 1.5)] {
            for (r, s) in [(1.0, 2.0), (0.3, 0.5), (5.0, 1.0), (1.0, 1.3)] {
                let k = radial_kernel(d, alpha, r, s);
                let q = kernel_by_quadrature(d, alpha, r, s);
                assert!(
                    (k - q).abs() < 1e-10 * q,
                    "d={d} α={alpha} r={r} s={s}: {k} vs {q}"
                );
            }
        }
    }

    #[test]
    fn angular_integral_limits() {
        // c = 1: the integrand is 1
        assert!((angular(1.0, 0.5) - 0.5 * PI).abs() < 1e-14);
        // q = 1/2: complete elliptic integral E(1 − c²) → 1 as c → 0
        assert!((angular(1e-13, 0.5) - 1.0).abs() < 1e-12);
        assert!((angular(1e-6, 0.5) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn decomposition_matches_direct_integral() {
        let e = test_function_energy(2, 1.0, 0.5, 2).unwrap();
        assert!(
            (e.total - e.direct_total).abs() < 1e-8 * e.direct_total,
            "{e:?}"
        );
        assert!(
            (e.inner_block - e.outer_block).abs() < 1e-8 * e.outer_block,
            "{e:?}"
        );
    }

    #[test]
    fn inner_integral_matches_multiprecision_value() {
        // ∫ over s of the d = 3, α = 3/2, δ = 3/4 integrand at r = 0.7, n = 1,
        // evaluated with 40-digit tanh-sinh quadrature
        let it = Integrand {
            d: 3,
            alpha: 1.5,
            delta: 0.75,
            cut: CutOff { n: 1.0 },
            tail_k: 1.0,
        };
        let v = it.inner(0.7, 0.0, f64::INFINITY);
        let exact = 273.086_337_102_902_396_3;
        assert!((v - exact).abs() < 1e-10 * exact, "{v}");
    }
}
