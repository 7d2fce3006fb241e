//! Truncations of the fractional Laplacian `(−Δ)^{α/2}` on a ball, with
//! Hardy potentials and the `|x|^{−δ}` transformed forms.
//!
//! Nodes are the points of the grid `hℤ^d` (shifted by `h/2` in every
//! coordinate unless `offset` is off, in which case the origin is dropped)
//! inside the open ball of radius `L`. Each node carries its cell volume `v`,
//! and
//!
//! ```text
//! J[x][y] = A v_x v_y / |x − y|^{d+α},
//! k(x)    = A v_x ∫_{|y| > R} |x − y|^{−d−α} dy,
//! ```
//!
//! where `R` is the outer radius of the truncation; the exterior integral
//! is the Dirichlet condition. Optional far-field shells extend the
//! truncation geometrically beyond `L` (`d ≤ 2`), which removes most of the
//! boundary bias for scale-invariant potentials.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::special::{kappa, stable_constant};
use crate::error::{Error, Result};
use crate::forms::{h_transform_parts, DiscreteModel, Exhaustion, PotentialMeasure};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StableRecipe {
    pub d: usize,
    pub alpha: f64,
    pub delta: f64,
    pub h: f64,
    /// Radius `L` of the ball holding the grid.
    #[serde(rename = "L", alias = "radius")]
    pub radius: f64,
    #[serde(default = "default_offset")]
    pub offset: bool,
    /// Number of geometric octaves `[L 2^k, L 2^{k+1}]` of far-field shells.
    #[serde(default)]
    pub far_field_octaves: usize,
}

fn default_offset() -> bool {
    true
}

/// Radial density `c |x|^{−p}` of a potential measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialPower {
    pub coefficient: f64,
    pub exponent: f64,
}

impl RadialPower {
    pub fn eval(&self, r: f64) -> f64 {
        self.coefficient * r.powf(-self.exponent)
    }
}

/// Radial subshells per far-field octave.
pub const FAR_FIELD_SUBSHELLS: usize = 4;

impl StableRecipe {
    pub fn validate(&self) -> Result<()> {
        let d = self.d as f64;
        if !(1..=3).contains(&self.d) {
            return Err(Error::InvalidInput(format!("d = {} outside 1..=3", self.d)));
        }
        if !(self.alpha > 0.0 && self.alpha < 2.0_f64.min(d)) {
            return Err(Error::InvalidInput(format!(
                "alpha = {} must satisfy 0 < alpha < min(2, d)",
                self.alpha
            )));
        }
        if !(self.delta >= 0.0 && self.delta <= d - self.alpha) {
            return Err(Error::InvalidInput(format!(
                "delta = {} outside [0, d - alpha]",
                self.delta
            )));
        }
        if !(self.h > 0.0 && self.radius.is_finite() && self.radius / self.h >= 4.0) {
            return Err(Error::InvalidInput(format!(
                "need h > 0 and L/h >= 4, got h = {}, L = {}",
                self.h, self.radius
            )));
        }
        if self.far_field_octaves > 0 && self.d > 2 {
            return Err(Error::InvalidInput(
                "far-field shells are implemented for d <= 2".into(),
            ));
        }
        Ok(())
    }

    /// Hardy potential `κ(δ) |x|^{−α}`.
    pub fn hardy_density(&self) -> Result<RadialPower> {
        Ok(RadialPower {
            coefficient: kappa(self.delta, self.d, self.alpha)?,
            exponent: self.alpha,
        })
    }

    /// `|x|^{−(d+α)/2}`, whose Green potential is critical.
    pub fn critical_density(&self) -> RadialPower {
        RadialPower {
            coefficient: 1.0,
            exponent: (self.d as f64 + self.alpha) / 2.0,
        }
    }
}

/// Node set of a stable truncation.
#[derive(Debug, Clone)]
pub struct StableGrid {
    pub d: usize,
    pub points: Vec<[f64; 3]>,
    pub radii: Vec<f64>,
    pub volumes: Vec<f64>,
    /// Integer lattice index of grid nodes; far-field nodes have none.
    pub cells: Vec<Option<[i64; 3]>>,
    pub n_grid: usize,
    /// Radius beyond which the exterior condition applies.
    pub outer_radius: f64,
    pub h: f64,
    pub offset: bool,
}

impl StableGrid {
    pub fn n_states(&self) -> usize {
        self.points.len()
    }

    /// Index of every lattice cell.
    pub fn cell_index(&self) -> HashMap<[i64; 3], usize> {
        self.cells
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.map(|c| (c, i)))
            .collect()
    }
}

/// Lattice coordinate of index `k`: `(k + 1/2) h` on the offset grid and
/// `k h` otherwise.
fn coord(k: i64, h: f64, offset: bool) -> f64 {
    if offset {
        (k as f64 + 0.5) * h
    } else {
        k as f64 * h
    }
}

/// Squared radius in units of `h²/4` (offset) or `h²` (plain), exact in
/// integers so equal radii share one key.
fn radius_key(c: &[i64; 3], d: usize, offset: bool) -> i64 {
    c[..d]
        .iter()
        .map(|&k| {
            if offset {
                (2 * k + 1) * (2 * k + 1)
            } else {
                k * k
            }
        })
        .sum()
}

fn key_radius(key: i64, h: f64, offset: bool) -> f64 {
    if offset {
        (key as f64).sqrt() * h / 2.0
    } else {
        (key as f64).sqrt() * h
    }
}

pub fn stable_grid(recipe: &StableRecipe) -> Result<StableGrid> {
    recipe.validate()?;
    let d = recipe.d;
    let h = recipe.h;
    let off = recipe.offset;
    let n = (recipe.radius / h).ceil() as i64 + 1;
    let range: Vec<i64> = (-n..=n).collect();
    let axis = |i: usize| if i < d { range.clone() } else { vec![0] };
    let v = h.powi(d as i32);
    let mut points = Vec::new();
    let mut radii = Vec::new();
    let mut cells = Vec::new();
    for &a in &axis(0) {
        for &b in &axis(1) {
            for &c in &axis(2) {
                let mut cell = [a, b, c];
                for (i, k) in cell.iter_mut().enumerate() {
                    if i >= d {
                        *k = 0;
                    }
                }
                let key = radius_key(&cell, d, off);
                if key == 0 {
                    continue;
                }
                let r = key_radius(key, h, off);
                if r >= recipe.radius {
                    continue;
                }
                let mut p = [0.0; 3];
                for i in 0..d {
                    p[i] = coord(cell[i], h, off);
                }
                points.push(p);
                radii.push(r);
                cells.push(Some(cell));
            }
        }
    }
    let n_grid = points.len();
    let mut volumes = vec![v; n_grid];
    let mut outer = recipe.radius;
    for oct in 0..recipe.far_field_octaves {
        let r0 = recipe.radius * 2f64.powi(oct as i32);
        let r1 = 2.0 * r0;
        for j in 0..FAR_FIELD_SUBSHELLS {
            let ra = r0 + (r1 - r0) * j as f64 / FAR_FIELD_SUBSHELLS as f64;
            let rb = r0 + (r1 - r0) * (j + 1) as f64 / FAR_FIELD_SUBSHELLS as f64;
            let rm = 0.5 * (ra + rb);
            if d == 1 {
                for s in [1.0, -1.0] {
                    points.push([s * rm, 0.0, 0.0]);
                    radii.push(rm);
                    volumes.push(rb - ra);
                    cells.push(None);
                }
            } else {
                let nt = ((2.0 * PI * rm / (rb - ra)).round() as usize).max(4);
                let area = 0.5 * (rb * rb - ra * ra) * 2.0 * PI / nt as f64;
                for s in 0..nt {
                    let th = 2.0 * PI * (s as f64 + 0.5) / nt as f64;
                    points.push([rm * th.cos(), rm * th.sin(), 0.0]);
                    radii.push(rm);
                    volumes.push(area);
                    cells.push(None);
                }
            }
        }
        outer = r1;
    }
    if points.is_empty() {
        return Err(Error::Construction("grid has no nodes".into()));
    }
    Ok(StableGrid {
        d,
        points,
        radii,
        volumes,
        cells,
        n_grid,
        outer_radius: outer,
        h,
        offset: off,
    })
}

fn gl(n: usize) -> &'static [(f64, f64)] {
    static GL16: OnceLock<GaussLegendre> = OnceLock::new();
    static GL64: OnceLock<GaussLegendre> = OnceLock::new();
    static GL8: OnceLock<GaussLegendre> = OnceLock::new();
    let cell = match n {
        8 => &GL8,
        16 => &GL16,
        64 => &GL64,
        _ => unreachable!("unsupported Gauss-Legendre order {n}"),
    };
    cell.get_or_init(|| GaussLegendre::new(NonZeroUsize::new(n).unwrap()))
        .as_node_weight_pairs()
}

/// Panels of the ray variable `v ∈ (0, 1]`, graded toward `v = 0` (the far
/// end of the ray).
const RAY_PANELS: [f64; 6] = [0.0, 1e-6, 1e-4, 1e-2, 0.1, 1.0];

/// `∫_{t0}^∞ t^{−1−α} |x + t θ|^{−δ} dt` for a unit direction at angle `β`
/// to `x`, where `t0` is the exit distance from the ball of radius `big_r`.
/// The substitution `t = t0 v^{−1/α}` makes the `δ = 0` integrand constant.
fn ray_integral(rho: f64, cos_b: f64, big_r: f64, alpha: f64, delta: f64) -> f64 {
    let sin2 = (1.0 - cos_b * cos_b).max(0.0);
    let t0 = -rho * cos_b + (big_r * big_r - rho * rho * sin2).sqrt();
    let base = t0.powf(-alpha) / alpha;
    if delta == 0.0 {
        return base;
    }
    let nodes = gl(64);
    let mut s = 0.0;
    for w in RAY_PANELS.windows(2) {
        let (a, b) = (w[0], w[1]);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for &(z, wt) in nodes {
            let v = mid + half * z;
            let t = t0 * v.powf(-1.0 / alpha);
            let r2 = rho * rho + 2.0 * rho * t * cos_b + t * t;
            s += half * wt * r2.powf(-0.5 * delta);
        }
    }
    base * s
}

/// `∫_{|y| > R} |x − y|^{−d−α} |y|^{−δ} dy` for `|x| = rho < R`.
pub fn exterior_integral(d: usize, alpha: f64, delta: f64, rho: f64, big_r: f64) -> f64 {
    if d == 1 {
        return ray_integral(rho, 1.0, big_r, alpha, delta)
            + ray_integral(rho, -1.0, big_r, alpha, delta);
    }
    // angle β ∈ [0, π] from x; panels double in width away from β = 0 where
    // the exit distance is shortest
    let w0 = (PI / 8.0).min(((big_r - rho) / big_r).max(1e-9));
    let mut edges = vec![0.0];
    let mut e = w0;
    while e < PI {
        edges.push(e);
        e *= 2.0;
    }
    edges.push(PI);
    let nodes = gl(16);
    let mut total = 0.0;
    for w in edges.windows(2) {
        let half = 0.5 * (w[1] - w[0]);
        let mid = 0.5 * (w[0] + w[1]);
        for &(z, wt) in nodes {
            let b = mid + half * z;
            let f = ray_integral(rho, b.cos(), big_r, alpha, delta);
            total += half * wt * if d == 2 { f } else { f * b.sin() };
        }
    }
    if d == 2 {
        2.0 * total
    } else {
        2.0 * PI * total
    }
}

/// Exterior integrals for every node, computed once per distinct radius.
fn exterior_per_node(grid: &StableGrid, alpha: f64, delta: f64) -> Vec<f64> {
    let mut uniq: Vec<u64> = grid.radii.iter().map(|r| r.to_bits()).collect();
    uniq.sort_unstable();
    uniq.dedup();
    let values: Vec<f64> = uniq
        .par_iter()
        .map(|&bits| {
            exterior_integral(
                grid.d,
                alpha,
                delta,
                f64::from_bits(bits),
                grid.outer_radius,
            )
        })
        .collect();
    let table: HashMap<u64, f64> = uniq.into_iter().zip(values).collect();
    grid.radii.iter().map(|r| table[&r.to_bits()]).collect()
}

fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// `A v_x v_y |x − y|^{−d−α}` scaled by `w_x w_y`.
fn jump_matrix(grid: &StableGrid, alpha: f64, weight: &[f64]) -> Result<DMatrix<f64>> {
    let a = stable_constant(grid.d, alpha)?;
    let n = grid.n_states();
    let p = grid.d as f64 + alpha;
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|x| {
            (0..n)
                .map(|y| {
                    if x == y {
                        0.0
                    } else {
                        let r = dist(&grid.points[x], &grid.points[y]);
                        a * grid.volumes[x] * grid.volumes[y] * r.powf(-p) * weight[x] * weight[y]
                    }
                })
                .collect()
        })
        .collect();
    let mut j = DMatrix::from_fn(n, n, |x, y| rows[x][y]);
    // exact symmetry regardless of the order of floating point operations
    for x in 0..n {
        for y in (x + 1)..n {
            j[(y, x)] = j[(x, y)];
        }
    }
    if j.iter().any(|w| !w.is_finite()) {
        return Err(Error::Construction(format!(
            "jump weights overflow at h = {}; increase the spacing",
            grid.h
        )));
    }
    Ok(j)
}

/// `∫_cell c |y|^{−p} dy` over the lattice cell of every grid node; far-field
/// nodes use the midpoint value times the shell volume.
pub fn cell_masses(grid: &StableGrid, density: RadialPower) -> Result<Vec<f64>> {
    let d = grid.d;
    if density.exponent >= d as f64 {
        return Err(Error::InvalidInput(format!(
            "|x|^-{} is not locally integrable in d = {d}",
            density.exponent
        )));
    }
    let h = grid.h;
    let corner = corner_cell_integral(d, h, density.exponent);
    let masses = (0..grid.n_states())
        .into_par_iter()
        .map(|i| {
            let p = &grid.points[i];
            if grid.cells[i].is_none() {
                return grid.volumes[i] * density.eval(grid.radii[i]);
            }
            let touches_origin = (0..d).all(|k| (p[k].abs() - 0.5 * h).abs() < 1e-12 * h);
            let raw = if grid.offset && touches_origin {
                corner
            } else {
                let lo: Vec<f64> = (0..d).map(|k| p[k] - 0.5 * h).collect();
                cube_integral(d, &lo, h, density.exponent, 0)
            };
            density.coefficient * raw
        })
        .collect();
    Ok(masses)
}

/// `∫_{[0,h]^d} |y|^{−p} dy` from scale invariance: the cube of side `2h`
/// holds `2^{d−p}` times as much as the corner cube, and the rest of it
/// consists of `2^d − 1` cells away from the singularity.
fn corner_cell_integral(d: usize, h: f64, p: f64) -> f64 {
    let mut others = 0.0;
    for mask in 1..(1usize << d) {
        let lo: Vec<f64> = (0..d)
            .map(|k| if mask >> k & 1 == 1 { h } else { 0.0 })
            .collect();
        others += cube_integral(d, &lo, h, p, 0);
    }
    others / (2f64.powf(d as f64 - p) - 1.0)
}

/// Tensor Gauss–Legendre on a cube not containing the origin, bisected
/// while the cube is close to the origin relative to its size.
fn cube_integral(d: usize, lo: &[f64], side: f64, p: f64, depth: usize) -> f64 {
    let near = (0..d)
        .map(|k| {
            let (a, b) = (lo[k], lo[k] + side);
            if a > 0.0 {
                a
            } else if b < 0.0 {
                -b
            } else {
                0.0
            }
        })
        .map(|t| t * t)
        .sum::<f64>()
        .sqrt();
    if near < 2.0 * side && depth < 24 {
        let half = 0.5 * side;
        let mut s = 0.0;
        for mask in 0..(1usize << d) {
            let sub: Vec<f64> = (0..d)
                .map(|k| lo[k] + if mask >> k & 1 == 1 { half } else { 0.0 })
                .collect();
            if near == 0.0 && (0..d).all(|k| sub[k] == 0.0 || sub[k] + half == 0.0) {
                // sub-cube with a corner at the origin
                s += corner_cell_integral(d, half, p);
            } else {
                s += cube_integral(d, &sub, half, p, depth + 1);
            }
        }
        return s;
    }
    let nodes = gl(8);
    let half = 0.5 * side;
    let mut s = 0.0;
    let mut idx = [0usize; 3];
    let total = nodes.len().pow(d as u32);
    for flat in 0..total {
        let mut f = flat;
        for k in 0..d {
            idx[k] = f % nodes.len();
            f /= nodes.len();
        }
        let mut r2 = 0.0;
        let mut w = 1.0;
        for k in 0..d {
            let (z, wt) = nodes[idx[k]];
            let y = lo[k] + half * (1.0 + z);
            r2 += y * y;
            w *= half * wt;
        }
        s += w * r2.powf(-0.5 * p);
    }
    s
}

/// A stable truncation with its grid and potential.
#[derive(Debug, Clone)]
pub struct StableSystem {
    pub grid: StableGrid,
    pub model: DiscreteModel<f64>,
    pub mu: PotentialMeasure<f64>,
}

/// The untransformed truncation with the potential `density`.
pub fn build_stable_system(recipe: &StableRecipe, density: RadialPower) -> Result<StableSystem> {
    let grid = stable_grid(recipe)?;
    let a = stable_constant(recipe.d, recipe.alpha)?;
    let ones = vec![1.0; grid.n_states()];
    let jump = jump_matrix(&grid, recipe.alpha, &ones)?;
    let ext = exterior_per_node(&grid, recipe.alpha, 0.0);
    let kill: Vec<f64> = ext
        .iter()
        .zip(&grid.volumes)
        .map(|(e, v)| a * v * e)
        .collect();
    let model = DiscreteModel::new(grid.volumes.clone(), jump, kill)?;
    let mu = PotentialMeasure::new(cell_masses(&grid, density)?)?;
    Ok(StableSystem { grid, model, mu })
}

/// The truncation of `E^{(α)}` together with the Hardy potential
/// `κ(δ) |x|^{−α}`.
pub fn build_stable_model(
    recipe: &StableRecipe,
) -> Result<(DiscreteModel<f64>, PotentialMeasure<f64>)> {
    let s = build_stable_system(recipe, recipe.hardy_density()?)?;
    Ok((s.model, s.mu))
}

/// The `|x|^{−δ}` transform, built directly: `m^δ = v |x|^{−2δ}`,
/// `J^δ = J |x|^{−δ} |y|^{−δ}` and
/// `k^δ(x) = A v |x|^{−δ} ∫_{|y|>R} |x − y|^{−d−α} |y|^{−δ} dy`, the part of
/// the transformed jump kernel leaving the truncation.
pub fn build_transformed_model(recipe: &StableRecipe) -> Result<DiscreteModel<f64>> {
    Ok(build_transformed_system(recipe)?.1)
}

pub fn build_transformed_system(recipe: &StableRecipe) -> Result<(StableGrid, DiscreteModel<f64>)> {
    let grid = stable_grid(recipe)?;
    let a = stable_constant(recipe.d, recipe.alpha)?;
    let w: Vec<f64> = grid.radii.iter().map(|r| r.powf(-recipe.delta)).collect();
    let jump = jump_matrix(&grid, recipe.alpha, &w)?;
    let ext = exterior_per_node(&grid, recipe.alpha, recipe.delta);
    let n = grid.n_states();
    let kill: Vec<f64> = (0..n)
        .map(|i| a * grid.volumes[i] * w[i] * ext[i])
        .collect();
    let measure: Vec<f64> = (0..n).map(|i| grid.volumes[i] * w[i] * w[i]).collect();
    let model = DiscreteModel::new(measure, jump, kill)?;
    Ok((grid, model))
}

/// Field-by-field comparison of the directly built transform with the
/// discrete h-transform of the stable model by `h = |x|^{−δ}`.
#[derive(Debug, Clone, Serialize)]
pub struct TransformComparison {
    /// `max |ΔJ| / max J`.
    pub jump: f64,
    /// `max |Δm| / max m`.
    pub measure: f64,
    /// `max |Δk| / max (k scale)`: discretization error of the Hardy
    /// identity plus the truncation.
    pub kill: f64,
    /// Number of states where the discrete h-transform has negative killing.
    pub negative_kill: usize,
}

pub fn compare_transform(recipe: &StableRecipe) -> Result<TransformComparison> {
    let s = build_stable_system(recipe, recipe.hardy_density()?)?;
    let (grid, direct) = build_transformed_system(recipe)?;
    let h: Vec<f64> = grid.radii.iter().map(|r| r.powf(-recipe.delta)).collect();
    let parts = h_transform_parts(&s.model, &s.mu, &h)?;
    let rel = |a: &[f64], b: &[f64]| {
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        a.iter()
            .zip(b)
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
            / scale
    };
    let jump = rel(parts.jump.as_slice(), direct.jump().as_slice());
    let measure = rel(&parts.measure, direct.measure());
    let kscale = parts.kill_scale.iter().fold(0.0f64, |m, v| m.max(*v));
    let kill = parts
        .kill
        .iter()
        .zip(direct.kill())
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
        / kscale;
    let negative_kill = parts.kill.iter().filter(|&&k| k < 0.0).count();
    Ok(TransformComparison {
        jump,
        measure,
        kill,
        negative_kill,
    })
}

/// Nested truncations with the same spacing and growing radii, plus the
/// core set `{|x| ≤ core_radius}` in level 0.
pub fn stable_exhaustion(
    recipe: &StableRecipe,
    radii: &[f64],
    transformed: bool,
    core_radius: f64,
) -> Result<(Exhaustion<f64>, Vec<StableGrid>)> {
    if recipe.far_field_octaves > 0 {
        return Err(Error::InvalidInput(
            "exhaustions use plain truncations without far-field shells".into(),
        ));
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) || radii.is_empty() {
        return Err(Error::InvalidInput("exhaustion radii must increase".into()));
    }
    let mut models = Vec::new();
    let mut grids = Vec::new();
    for &r in radii {
        let rec = StableRecipe {
            radius: r,
            ..recipe.clone()
        };
        if transformed {
            let (g, m) = build_transformed_system(&rec)?;
            grids.push(g);
            models.push(m);
        } else {
            let s = build_stable_system(&rec, rec.hardy_density()?)?;
            grids.push(s.grid);
            models.push(s.model);
        }
    }
    let maps = grids
        .windows(2)
        .map(|w| {
            let big = w[1].cell_index();
            w[0].cells
                .iter()
                .map(|c| big[&c.expect("grid node")])
                .collect()
        })
        .collect();
    let core: Vec<usize> = (0..grids[0].n_states())
        .filter(|&i| grids[0].radii[i] <= core_radius)
        .collect();
    Ok((Exhaustion::new(models, maps, core)?, grids))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::lambda_mu;

    fn recipe(d: usize, alpha: f64, delta: f64, h: f64, l: f64) -> StableRecipe {
        StableRecipe {
            d,
            alpha,
            delta,
            h,
            radius: l,
            offset: true,
            far_field_octaves: 0,
        }
    }

    #[test]
    fn rejects_bad_recipes() {
        assert!(recipe(2, 2.0, 0.0, 0.5, 4.0).validate().is_err());
        assert!(recipe(1, 1.0, 0.0, 0.5, 4.0).validate().is_err());
        assert!(recipe(2, 1.0, 1.5, 0.5, 4.0).validate().is_err());
        assert!(recipe(2, 1.0, 0.5, 2.0, 4.0).validate().is_err());
        assert!(recipe(2, 1.0, 0.5, 1.0, 4.0).validate().is_ok());
    }

    #[test]
    fn grid_counts_and_origin_exclusion() {
        let g = stable_grid(&recipe(1, 0.5, 0.0, 1.0, 4.0)).unwrap();
        assert_eq!(g.n_states(), 8);
        let mut plain = recipe(2, 1.0, 0.0, 1.0, 4.0);
        plain.offset = false;
        let g = stable_grid(&plain).unwrap();
        assert!(g.radii.iter().all(|&r| r > 0.0 && r < 4.0));
        // 45 lattice points in the open disc of radius 4, minus the origin
        assert_eq!(g.n_states(), 44);
    }

    #[test]
    fn exterior_integral_of_centered_ball() {
        // ∫_{|y|>R} |y|^{−d−α} dy = ω_{d−1} R^{−α}/α
        for (d, omega) in [(1usize, 2.0), (2, 2.0 * PI), (3, 4.0 * PI)] {
            let v = exterior_integral(d, 0.5, 0.0, 0.0, 3.0);
            let exact = omega * 3f64.powf(-0.5) / 0.5;
            assert!((v - exact).abs() < 1e-12 * exact, "d = {d}");
            // with the |y|^{−δ} weight the exponent becomes α + δ
            let w = exterior_integral(d, 0.5, 0.3, 0.0, 3.0);
            let exact = omega * 3f64.powf(-0.8) / 0.8;
            assert!((w - exact).abs() < 1e-9 * exact, "d = {d}: {w} vs {exact}");
        }
    }

    #[test]
    fn exterior_integral_off_center_by_quadrature() {
        // d = 1: ∫_{R}^∞ (y − x)^{−1−α} y^{−δ} dy + ∫_{R}^∞ (y + x)^{−1−α} y^{−δ} dy
        let (alpha, delta, x, big_r) = (0.7, 0.4, 2.5, 3.0);
        let f = |y: f64| {
            (y - x).powf(-1.0 - alpha) * y.powf(-delta)
                + (y + x).powf(-1.0 - alpha) * y.powf(-delta)
        };
        // y = R / w maps (R, ∞) onto (0, 1)
        let g = |w: f64| f(big_r / w) * big_r / (w * w);
        let exact = quadrature::integrate(g, 0.0, 1.0, 1e-13).integral;
        let v = exterior_integral(1, alpha, delta, x, big_r);
        assert!((v - exact).abs() < 1e-8 * exact, "{v} vs {exact}");
    }

    #[test]
    fn corner_cell_matches_closed_form() {
        // d = 1: ∫_0^h y^{−p} dy = h^{1−p}/(1−p)
        let c = corner_cell_integral(1, 0.5, 0.5);
        let exact = 0.5f64.powf(0.5) / 0.5;
        assert!((c - exact).abs() < 1e-12 * exact);
        // d = 2, p = 1: ∫_{[0,1]²} 1/|y| = 2 asinh(1)
        let c = corner_cell_integral(2, 1.0, 1.0);
        let exact = 2.0 * 1f64.asinh();
        assert!((c - exact).abs() < 1e-10 * exact, "{c} vs {exact}");
    }

    #[test]
    fn jump_weights_are_symmetric_and_translation_covariant() {
        let s = build_stable_system(
            &recipe(2, 1.0, 0.0, 0.5, 3.0),
            RadialPower {
                coefficient: 1.0,
                exponent: 1.0,
            },
        )
        .unwrap();
        let idx = s.grid.cell_index();
        let j = s.model.jump();
        let w = |a: [i64; 3], b: [i64; 3]| j[(idx[&a], idx[&b])];
        assert_eq!(w([0, 0, 0], [1, 2, 0]), w([1, 2, 0], [0, 0, 0]));
        assert_eq!(w([0, 0, 0], [1, 2, 0]), w([-2, -1, 0], [-1, 1, 0]));
    }

    #[test]
    fn transformed_model_at_zero_delta_is_the_stable_model() {
        let r = recipe(2, 1.0, 0.0, 0.5, 3.0);
        let (plain, _) = build_stable_model(&r).unwrap();
        let t = build_transformed_model(&r).unwrap();
        assert_eq!(plain, t);
    }

    #[test]
    fn off_critical_hardy_potential_is_subcritical() {
        let r = recipe(1, 0.5, 0.2 * 0.5, 0.25, 4.0);
        let (model, mu) = build_stable_model(&r).unwrap();
        assert!(lambda_mu(&model, &mu).unwrap() > 1.0);
    }

    #[test]
    fn transform_fields_coincide() {
        let mut r = recipe(2, 1.0, 0.25, 0.5, 2.5);
        r.delta = 0.25;
        let cmp = compare_transform(&r).unwrap();
        assert!(cmp.jump <= 1e-12 && cmp.measure <= 1e-12, "{cmp:?}");
    }
}
