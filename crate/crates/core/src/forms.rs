//! Finite truncations of regular Dirichlet forms and the Schrödinger forms
//! built on top of them.
//!
//! A [`DiscreteModel`] is the energy
//!
//! ```text
//! E(u) = 1/2 Σ_x Σ_y J[x][y] (u(x) - u(y))² + Σ_x k(x) u(x)²
//! ```
//!
//! on `L²(m)`. Everything here works in the *form* convention: the symmetric
//! form matrix `Q` satisfies `uᵀ Q u = E(u)`, and the operator acting on
//! `L²(m)` is `H = diag(m)⁻¹ Q`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::{max_abs, Scalar};

/// Finite state space with reference measure, symmetric jump weights and
/// killing weights.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteModel<T: Scalar> {
    measure: Vec<T>,
    jump: DMatrix<T>,
    kill: Vec<T>,
}

impl<T: Scalar> DiscreteModel<T> {
    /// Validates and builds a model. The jump matrix must be exactly
    /// symmetric with a zero diagonal, and its edge graph connected.
    pub fn new(measure: Vec<T>, jump: DMatrix<T>, kill: Vec<T>) -> Result<Self> {
        let n = measure.len();
        if n == 0 {
            return Err(Error::InvalidInput("model needs at least one state".into()));
        }
        if jump.nrows() != n || jump.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: jump.nrows().max(jump.ncols()),
            });
        }
        if kill.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: kill.len(),
            });
        }
        for (x, &mx) in measure.iter().enumerate() {
            if !(mx > T::zero()) || !mx.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "measure must be positive and finite, m[{x}] = {mx}"
                )));
            }
        }
        for (x, &kx) in kill.iter().enumerate() {
            if kx < T::zero() || !kx.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "killing must be nonnegative and finite, k[{x}] = {kx}"
                )));
            }
        }
        for x in 0..n {
            if jump[(x, x)] != T::zero() {
                return Err(Error::InvalidInput(format!("J[{x}][{x}] must be zero")));
            }
            for y in (x + 1)..n {
                let w = jump[(x, y)];
                if w != jump[(y, x)] {
                    return Err(Error::InvalidInput(format!(
                        "J is not symmetric at ({x}, {y})"
                    )));
                }
                if w < T::zero() || !w.is_finite() {
                    return Err(Error::InvalidInput(format!(
                        "J[{x}][{y}] = {w} must be nonnegative and finite"
                    )));
                }
            }
        }
        let components = count_components(&jump);
        if components != 1 {
            return Err(Error::Disconnected { components });
        }
        Ok(Self {
            measure,
            jump,
            kill,
        })
    }

    /// Builds a model from an explicit edge list `(x, y, w)`; repeated edges
    /// accumulate.
    pub fn from_edges(measure: Vec<T>, edges: &[(usize, usize, T)], kill: Vec<T>) -> Result<Self> {
        let n = measure.len();
        let mut jump = DMatrix::zeros(n, n);
        for &(x, y, w) in edges {
            if x >= n || y >= n {
                return Err(Error::InvalidInput(format!(
                    "edge ({x}, {y}) out of range for {n} states"
                )));
            }
            if x == y {
                return Err(Error::InvalidInput(format!("self loop at state {x}")));
            }
            jump[(x, y)] += w;
            jump[(y, x)] += w;
        }
        Self::new(measure, jump, kill)
    }

    pub fn n_states(&self) -> usize {
        self.measure.len()
    }

    pub fn measure(&self) -> &[T] {
        &self.measure
    }

    pub fn jump(&self) -> &DMatrix<T> {
        &self.jump
    }

    pub fn kill(&self) -> &[T] {
        &self.kill
    }

    /// True when some state carries killing, i.e. the form is transient.
    pub fn has_killing(&self) -> bool {
        self.kill.iter().any(|&k| k > T::zero())
    }

    /// Edge list `(x, y, w)` with `x < y`, row-major.
    pub fn edges(&self) -> Vec<(usize, usize, T)> {
        let n = self.n_states();
        let mut out = Vec::new();
        for x in 0..n {
            for y in (x + 1)..n {
                let w = self.jump[(x, y)];
                if w > T::zero() {
                    out.push((x, y, w));
                }
            }
        }
        out
    }

    /// Total jump weight leaving each state, `Σ_y J[x][y]`.
    pub fn degree(&self) -> Vec<T> {
        (0..self.n_states())
            .map(|x| self.jump.row(x).iter().fold(T::zero(), |a, &w| a + w))
            .collect()
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n_states() {
            return Err(Error::DimensionMismatch {
                expected: self.n_states(),
                got: len,
            });
        }
        Ok(())
    }
}

fn count_components<T: Scalar>(jump: &DMatrix<T>) -> usize {
    let n = jump.nrows();
    let mut seen = vec![false; n];
    let mut components = 0;
    let mut stack = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        components += 1;
        seen[start] = true;
        stack.push(start);
        while let Some(x) = stack.pop() {
            // column access is contiguous in nalgebra's column-major layout
            for (y, &w) in jump.column(x).iter().enumerate() {
                if w > T::zero() && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    components
}

/// Nonnegative vertex masses `μ({x})` of the Schrödinger potential measure.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialMeasure<T: Scalar> {
    weights: Vec<T>,
}

impl<T: Scalar> PotentialMeasure<T> {
    pub fn new(weights: Vec<T>) -> Result<Self> {
        for (x, &w) in weights.iter().enumerate() {
            if w < T::zero() || !w.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "potential weights must be nonnegative and finite, mu[{x}] = {w}"
                )));
            }
        }
        Ok(Self { weights })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            weights: vec![T::zero(); n],
        }
    }

    /// Unit mass at `x`.
    pub fn point_mass(n: usize, x: usize) -> Self {
        let mut weights = vec![T::zero(); n];
        weights[x] = T::one();
        Self { weights }
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.weights.iter().all(|&w| w == T::zero())
    }

    /// `c · μ`; `c` must be nonnegative.
    pub fn scaled(&self, c: T) -> Result<Self> {
        Self::new(self.weights.iter().map(|&w| w * c).collect())
    }

    /// States with positive mass.
    pub fn support(&self) -> Vec<usize> {
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > T::zero())
            .map(|(x, _)| x)
            .collect()
    }
}

/// Nested truncations `G_0 ⊂ G_1 ⊂ …` with explicit embeddings.
#[derive(Debug, Clone)]
pub struct Exhaustion<T: Scalar> {
    levels: Vec<DiscreteModel<T>>,
    maps: Vec<Vec<usize>>,
    core: Vec<usize>,
}

impl<T: Scalar> Exhaustion<T> {
    /// `maps[i][x]` is the index in level `i + 1` of state `x` of level `i`.
    /// `core` lists states of level 0 kept in every level.
    pub fn new(
        levels: Vec<DiscreteModel<T>>,
        maps: Vec<Vec<usize>>,
        core: Vec<usize>,
    ) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidInput(
                "exhaustion needs at least one level".into(),
            ));
        }
        if maps.len() + 1 != levels.len() {
            return Err(Error::InvalidInput(format!(
                "{} levels need {} index maps, got {}",
                levels.len(),
                levels.len() - 1,
                maps.len()
            )));
        }
        for (i, map) in maps.iter().enumerate() {
            let (small, big) = (&levels[i], &levels[i + 1]);
            if map.len() != small.n_states() {
                return Err(Error::DimensionMismatch {
                    expected: small.n_states(),
                    got: map.len(),
                });
            }
            let mut hit = vec![false; big.n_states()];
            for &y in map {
                if y >= big.n_states() || hit[y] {
                    return Err(Error::InvalidInput(format!(
                        "index map {i} is not injective into level {}",
                        i + 1
                    )));
                }
                hit[y] = true;
            }
            let tol = T::lit(1e-12);
            let agree = |a: T, b: T| (a - b).magnitude() <= tol * a.magnitude().max(b.magnitude());
            for (x, &bx) in map.iter().enumerate() {
                if !agree(small.measure()[x], big.measure()[bx]) {
                    return Err(Error::InvalidInput(format!(
                        "measure disagrees between levels {i} and {} at state {x}",
                        i + 1
                    )));
                }
                for (y, &by) in map.iter().enumerate().skip(x + 1) {
                    if !agree(small.jump()[(x, y)], big.jump()[(bx, by)]) {
                        return Err(Error::InvalidInput(format!(
                            "jump weights disagree between levels {i} and {} at ({x}, {y})",
                            i + 1
                        )));
                    }
                }
            }
        }
        if core.is_empty() {
            return Err(Error::InvalidInput("core set K is empty".into()));
        }
        if core.iter().any(|&x| x >= levels[0].n_states()) {
            return Err(Error::InvalidInput("core set K must lie in level 0".into()));
        }
        Ok(Self { levels, maps, core })
    }

    pub fn levels(&self) -> &[DiscreteModel<T>] {
        &self.levels
    }

    pub fn n_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn core(&self) -> &[usize] {
        &self.core
    }

    pub fn maps(&self) -> &[Vec<usize>] {
        &self.maps
    }

    /// Index map from level `from` into level `to >= from`.
    pub fn embedding(&self, from: usize, to: usize) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.levels[from].n_states()).collect();
        for map in &self.maps[from..to] {
            for i in idx.iter_mut() {
                *i = map[*i];
            }
        }
        idx
    }

    /// Core set expressed in the indices of `level`.
    pub fn core_in(&self, level: usize) -> Vec<usize> {
        let emb = self.embedding(0, level);
        self.core.iter().map(|&x| emb[x]).collect()
    }
}

/// `E(u) = Σ_{x<y} J[x][y](u(x)-u(y))² + Σ k(x)u(x)²`, summed row-major over
/// `x < y` so the value is reproducible bit for bit.
pub fn dirichlet_energy<T: Scalar>(model: &DiscreteModel<T>, u: &[T]) -> Result<T> {
    model.check_len(u.len())?;
    let n = model.n_states();
    let mut total = T::zero();
    for x in 0..n {
        let ux = u[x];
        let mut row = T::zero();
        for y in (x + 1)..n {
            let w = model.jump[(x, y)];
            if w != T::zero() {
                let d = ux - u[y];
                row += w * d * d;
            }
        }
        total += row;
    }
    for x in 0..n {
        total += model.kill[x] * u[x] * u[x];
    }
    Ok(total)
}

/// `E^μ(u) = E(u) - Σ μ(x) u(x)²`. May be negative.
pub fn schrodinger_energy<T: Scalar>(
    model: &DiscreteModel<T>,
    mu: &PotentialMeasure<T>,
    u: &[T],
) -> Result<T> {
    model.check_len(mu.len())?;
    let e = dirichlet_energy(model, u)?;
    let pot = mu
        .weights
        .iter()
        .zip(u)
        .fold(T::zero(), |acc, (&w, &ux)| acc + w * ux * ux);
    Ok(e - pot)
}

/// Symmetric form matrix `Q^μ = L_J + diag(k) - diag(μ)` with
/// `uᵀ Q^μ u = E^μ(u)`.
pub fn form_matrix<T: Scalar>(
    model: &DiscreteModel<T>,
    mu: &PotentialMeasure<T>,
) -> Result<DMatrix<T>> {
    model.check_len(mu.len())?;
    let mut q = -model.jump.clone();
    let deg = model.degree();
    for x in 0..model.n_states() {
        q[(x, x)] = deg[x] + model.kill[x] - mu.weights[x];
    }
    Ok(q)
}

/// The Schrödinger operator `H^μ = diag(m)⁻¹ Q^μ` on `L²(m)`.
///
/// `H^μ` is self-adjoint for the `m`-weighted inner product, so
/// `⟨u, H^μ u⟩_m = E^μ(u)`.
#[derive(Debug, Clone)]
pub struct SchrodingerOperator<T: Scalar> {
    form: DMatrix<T>,
    measure: Vec<T>,
}

impl<T: Scalar> SchrodingerOperator<T> {
    pub fn form(&self) -> &DMatrix<T> {
        &self.form
    }

    pub fn measure(&self) -> &[T] {
        &self.measure
    }

    /// `(H^μ u)(x) = (Q^μ u)(x) / m(x)`.
    pub fn apply(&self, u: &[T]) -> Vec<T> {
        let v = &self.form * DVector::from_column_slice(u);
        v.iter().zip(&self.measure).map(|(&a, &m)| a / m).collect()
    }

    /// `⟨u, v⟩_m`.
    pub fn inner(&self, u: &[T], v: &[T]) -> T {
        u.iter()
            .zip(v)
            .zip(&self.measure)
            .fold(T::zero(), |acc, ((&a, &b), &m)| acc + a * b * m)
    }

    /// Dense matrix of `H^μ` (not symmetric unless `m` is constant).
    pub fn to_dense(&self) -> DMatrix<T> {
        let mut h = self.form.clone();
        for (x, &m) in self.measure.iter().enumerate() {
            h.row_mut(x).iter_mut().for_each(|v| *v /= m);
        }
        h
    }

    /// `M^{-1/2} Q M^{-1/2}`, the symmetric matrix similar to `H^μ`.
    pub fn symmetrized(&self) -> DMatrix<T> {
        let s: Vec<T> = self.measure.iter().map(|&m| T::one() / m.sqrt()).collect();
        let n = s.len();
        DMatrix::from_fn(n, n, |i, j| self.form[(i, j)] * s[i] * s[j])
    }
}

pub fn assemble_operator<T: Scalar>(
    model: &DiscreteModel<T>,
    mu: &PotentialMeasure<T>,
) -> Result<SchrodingerOperator<T>> {
    Ok(SchrodingerOperator {
        form: form_matrix(model, mu)?,
        measure: model.measure.clone(),
    })
}

/// Measure, jump weights and (signed, unchecked) killing of an h-transform.
#[derive(Debug, Clone)]
pub struct TransformParts<T: Scalar> {
    pub measure: Vec<T>,
    pub jump: DMatrix<T>,
    pub kill: Vec<T>,
    /// Per-state magnitude used to judge the sign of `kill`.
    pub kill_scale: Vec<T>,
}

/// Computes the h-transform without validating excessiveness of `h`.
pub fn h_transform_parts<T: Scalar>(
    model: &DiscreteModel<T>,
    mu: &PotentialMeasure<T>,
    h: &[T],
) -> Result<TransformParts<T>> {
    model.check_len(h.len())?;
    model.check_len(mu.len())?;
    if let Some(x) = h.iter().position(|&v| !(v > T::zero()) || !v.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "h must be strictly positive and finite, h[{x}] = {}",
            h[x]
        )));
    }
    let n = model.n_states();
    let measure: Vec<T> = (0..n).map(|x| h[x] * h[x] * model.measure[x]).collect();
    let jump = DMatrix::from_fn(n, n, |x, y| h[x] * h[y] * model.jump[(x, y)]);
    let mut kill = Vec::with_capacity(n);
    let mut kill_scale = Vec::with_capacity(n);
    for x in 0..n {
        let mut flow = T::zero();
        let mut scale = T::zero();
        for y in 0..n {
            let w = model.jump[(x, y)];
            if w != T::zero() {
                flow += w * (h[x] - h[y]);
                scale += w * (h[x] + h[y]);
            }
        }
        let diag = (model.kill[x] - mu.weights[x]) * h[x];
        kill.push(h[x] * (flow + diag));
        kill_scale.push(h[x] * (scale + (model.kill[x] + mu.weights[x]) * h[x]));
    }
    Ok(TransformParts {
        measure,
        jump,
        kill,
        kill_scale,
    })
}

/// Relative tolerance below which a negative transformed killing weight is
/// treated as roundoff.
pub const EXCESSIVE_TOL: f64 = 1e-10;

/// h-transform of `(E^μ, L²(m))`: the model with `m' = h²m`,
/// `J'[x][y] = h(x)h(y)J[x][y]` and `k'(x) = h(x)(Q^μ h)(x)`, so that
/// `E'(u) = E^μ(hu)` for every `u`.
///
/// Fails with [`Error::NotExcessive`] when `H^μ h` is negative somewhere,
/// i.e. `h` is not `E^μ`-excessive.
pub fn h_transform<T: Scalar>(
    model: &DiscreteModel<T>,
    mu: &PotentialMeasure<T>,
    h: &[T],
) -> Result<DiscreteModel<T>> {
    let parts = h_transform_parts(model, mu, h)?;
    let tol = T::lit(EXCESSIVE_TOL);
    let bad: Vec<usize> = parts
        .kill
        .iter()
        .zip(&parts.kill_scale)
        .enumerate()
        .filter(|(_, (&k, &s))| k < -tol * s)
        .map(|(x, _)| x)
        .collect();
    if !bad.is_empty() {
        return Err(Error::NotExcessive { states: bad });
    }
    let kill = parts.kill.into_iter().map(|k| k.max(T::zero())).collect();
    DiscreteModel::new(parts.measure, parts.jump, kill)
}

/// Largest absolute entry over all fields of two models, for comparisons.
pub fn max_field_difference<T: Scalar>(a: &DiscreteModel<T>, b: &DiscreteModel<T>) -> Result<T> {
    a.check_len(b.n_states())?;
    let dm = max_abs(a.measure.iter().zip(&b.measure).map(|(&x, &y)| x - y));
    let dk = max_abs(a.kill.iter().zip(&b.kill).map(|(&x, &y)| x - y));
    let dj = max_abs((&a.jump - &b.jump).iter().copied());
    Ok(dm.max(dk).max(dj))
}
