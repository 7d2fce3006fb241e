//! Green operators, potentials, capacities and the critical construction
//! `ν = μ / Rμ`.
//!
//! On a truncation with killing, the 0-order Green operator is `H(0)⁻¹`; its
//! kernel relative to `m` is `R = Q⁻¹`, so `Rμ(x) = Σ_y Q⁻¹[x][y] μ({y})`.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::extrapolate::{aitken, increment_ratio};
use crate::forms::{
    assemble_operator, dirichlet_energy, form_matrix, DiscreteModel, Exhaustion, PotentialMeasure,
};
use crate::scalar::Scalar;
use crate::spectral::lambda_mu;

/// Largest model for which [`GreenOperator::kernel`] materializes `R`.
pub const DENSE_KERNEL_LIMIT: usize = 4096;

/// Cholesky factorization of the form matrix of a transient truncation.
#[derive(Debug, Clone)]
pub struct GreenOperator<T: Scalar> {
    chol: Cholesky<T, Dyn>,
    measure: Vec<T>,
}

impl<T: Scalar> GreenOperator<T> {
    /// Fails with [`Error::NotTransient`] when `Q` is singular, i.e. the
    /// truncation has no killing.
    pub fn new(model: &DiscreteModel<T>) -> Result<Self> {
        let q = form_matrix(model, &PotentialMeasure::zeros(model.n_states()))?;
        let chol = Cholesky::new(q).ok_or(Error::NotTransient)?;
        Ok(Self {
            chol,
            measure: model.measure().to_vec(),
        })
    }

    pub fn n_states(&self) -> usize {
        self.measure.len()
    }

    /// `Σ_y R(x, y) w(y)` for vertex masses `w`.
    pub fn apply_masses(&self, w: &[T]) -> Vec<T> {
        self.chol
            .solve(&DVector::from_column_slice(w))
            .iter()
            .copied()
            .collect()
    }

    /// `R f = H(0)⁻¹ f` for a function `f` on `L²(m)`.
    pub fn apply(&self, f: &[T]) -> Vec<T> {
        let w: Vec<T> = f.iter().zip(&self.measure).map(|(&a, &m)| a * m).collect();
        self.apply_masses(&w)
    }

    /// Dense kernel `R(x, y)`; refused above [`DENSE_KERNEL_LIMIT`] states.
    pub fn kernel(&self) -> Result<DMatrix<T>> {
        let n = self.n_states();
        if n > DENSE_KERNEL_LIMIT {
            return Err(Error::InvalidInput(format!(
                "dense Green kernel limited to {DENSE_KERNEL_LIMIT} states, model has {n}"
            )));
        }
        Ok(self.chol.inverse())
    }
}

/// `Rμ`, strictly positive on an irreducible transient truncation.
pub fn green_potential<T: Scalar>(
    g: &GreenOperator<T>,
    mu: &PotentialMeasure<T>,
) -> Result<Vec<T>> {
    if mu.len() != g.n_states() {
        return Err(Error::DimensionMismatch {
            expected: g.n_states(),
            got: mu.len(),
        });
    }
    Ok(g.apply_masses(mu.weights()))
}

/// `ν = μ / Rμ`, so that `Q^ν Rμ = 0` at every state.
pub fn nu_from_mu<T: Scalar>(
    g: &GreenOperator<T>,
    mu: &PotentialMeasure<T>,
) -> Result<PotentialMeasure<T>> {
    let r = green_potential(g, mu)?;
    nu_from_potential(mu, &r)
}

fn nu_from_potential<T: Scalar>(mu: &PotentialMeasure<T>, r: &[T]) -> Result<PotentialMeasure<T>> {
    let mut nu = Vec::with_capacity(r.len());
    for (x, (&w, &rx)) in mu.weights().iter().zip(r).enumerate() {
        if w == T::zero() {
            nu.push(T::zero());
        } else if !(rx > T::zero()) || !rx.is_finite() {
            return Err(Error::VanishingPotential { state: x });
        } else {
            nu.push(w / rx);
        }
    }
    PotentialMeasure::new(nu)
}

/// Equilibrium data of one exhaustion level.
#[derive(Debug, Clone, Serialize)]
pub struct CapacityLevel {
    pub n_states: usize,
    pub capacity: f64,
    /// `min u` and `max u` of the equilibrium potential (0 ≤ u ≤ 1).
    pub potential_min: f64,
    pub potential_max: f64,
}

/// Equilibrium potential of `k` in `model`: `u = 1` on `k`, harmonic
/// elsewhere, zero outside the truncation through the killing.
pub fn equilibrium_potential<T: Scalar>(model: &DiscreteModel<T>, k: &[usize]) -> Result<Vec<T>> {
    let n = model.n_states();
    if k.is_empty() {
        return Err(Error::InvalidInput(
            "capacity needs a nonempty set K".into(),
        ));
    }
    let mut in_k = vec![false; n];
    for &x in k {
        if x >= n {
            return Err(Error::InvalidInput(format!("state {x} of K out of range")));
        }
        in_k[x] = true;
    }
    let free: Vec<usize> = (0..n).filter(|&x| !in_k[x]).collect();
    let mut u = vec![T::zero(); n];
    for &x in k {
        u[x] = T::one();
    }
    if free.is_empty() {
        return Ok(u);
    }
    let q = form_matrix(model, &PotentialMeasure::zeros(n))?;
    let qff = q.select_rows(&free).select_columns(&free);
    let rhs = DVector::from_iterator(
        free.len(),
        free.iter()
            .map(|&f| -k.iter().fold(T::zero(), |s, &x| s + q[(f, x)])),
    );
    let chol = Cholesky::new(qff).ok_or(Error::NotTransient)?;
    let sol = chol.solve(&rhs);
    for (i, &f) in free.iter().enumerate() {
        u[f] = sol[i];
    }
    Ok(u)
}

/// `cap(K) = E(u_K)` in one model.
pub fn capacity_of<T: Scalar>(model: &DiscreteModel<T>, k: &[usize]) -> Result<CapacityLevel> {
    let u = equilibrium_potential(model, k)?;
    let cap = dirichlet_energy(model, &u)?;
    let (lo, hi) = u.iter().fold((f64::MAX, f64::MIN), |(lo, hi), &v| {
        (lo.min(v.as_f64()), hi.max(v.as_f64()))
    });
    Ok(CapacityLevel {
        n_states: model.n_states(),
        capacity: cap.as_f64(),
        potential_min: lo,
        potential_max: hi,
    })
}

/// Capacity of `k` (indices in level 0) on every level of the exhaustion.
/// Levels are solved independently and in parallel.
pub fn capacity<T: Scalar>(exhaustion: &Exhaustion<T>, k: &[usize]) -> Result<Vec<CapacityLevel>> {
    if k.is_empty() {
        return Err(Error::InvalidInput(
            "capacity needs a nonempty set K".into(),
        ));
    }
    if k.iter().any(|&x| x >= exhaustion.levels()[0].n_states()) {
        return Err(Error::InvalidInput("K must lie in level 0".into()));
    }
    (0..exhaustion.n_levels())
        .into_par_iter()
        .map(|level| {
            let emb = exhaustion.embedding(0, level);
            let kk: Vec<usize> = k.iter().map(|&x| emb[x]).collect();
            capacity_of(&exhaustion.levels()[level], &kk)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Recurrence {
    Recurrent,
    Transient,
    Indeterminate,
}

#[derive(Debug, Clone, Serialize)]
pub struct RecurrenceReport {
    pub verdict: Recurrence,
    /// Extrapolated capacity limit (absolute units).
    pub limit: f64,
    /// Geometric ratio of the increments of `1/cap`.
    pub increment_ratio: Option<f64>,
    /// Tolerance, relative to the first capacity.
    pub tol: f64,
}

pub const DEFAULT_RECURRENCE_TOL: f64 = 0.05;

/// Recurrence verdict from a nonincreasing capacity sequence.
///
/// Capacities are normalized by the first value and extrapolated through
/// their reciprocals `y = 1/cap`, which grow without bound exactly when the
/// capacity vanishes. With `ρ` the geometric ratio of the increments of `y`,
/// `ρ ≥ 1` means `y → ∞` (limit 0); otherwise the geometric tail gives
/// `y_∞ = y_last + Δy_last ρ / (1 − ρ)`. For three levels this is Aitken's
/// Δ² on `y`.
///
/// Recurrent when the relative limit is at most `tol`; Transient when the
/// last value and the limit are at least `10 tol` and the increments shrink
/// geometrically; Indeterminate otherwise.
pub fn recurrence_verdict(caps: &[f64], tol: f64) -> Result<RecurrenceReport> {
    if caps.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "recurrence verdict needs at least 3 levels, got {}",
            caps.len()
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    let s0 = caps[0];
    if !(s0 > 0.0) || caps.iter().any(|c| !c.is_finite() || *c < 0.0) {
        return Err(Error::InvalidInput(
            "capacities must be finite, nonnegative, first positive".into(),
        ));
    }
    for (i, w) in caps.windows(2).enumerate() {
        if w[1] > w[0] * (1.0 + 1e-12) {
            return Err(Error::NonMonotone { index: i + 1 });
        }
    }
    let rel: Vec<f64> = caps.iter().map(|c| c / s0).collect();
    let last = *rel.last().unwrap();
    if last == 0.0 {
        return Ok(RecurrenceReport {
            verdict: Recurrence::Recurrent,
            limit: 0.0,
            increment_ratio: None,
            tol,
        });
    }
    let y: Vec<f64> = rel.iter().map(|c| 1.0 / c).collect();
    let ratio = increment_ratio(&y);
    let limit_rel = match ratio {
        Some(r) if r < 1.0 => {
            let k = y.len();
            let dy = y[k - 1] - y[k - 2];
            1.0 / (y[k - 1] + dy * r / (1.0 - r))
        }
        Some(_) => 0.0,
        // a flat reciprocal sequence: nothing left to extrapolate
        None if y.windows(2).all(|w| w[1] == w[0]) => last,
        None => {
            return Ok(RecurrenceReport {
                verdict: Recurrence::Indeterminate,
                limit: last * s0,
                increment_ratio: None,
                tol,
            })
        }
    };
    let geometric = ratio.map_or(true, |r| r < 1.0);
    let verdict = if limit_rel <= tol {
        Recurrence::Recurrent
    } else if last >= 10.0 * tol && geometric && limit_rel >= 10.0 * tol {
        Recurrence::Transient
    } else {
        Recurrence::Indeterminate
    };
    Ok(RecurrenceReport {
        verdict,
        limit: limit_rel * s0,
        increment_ratio: ratio,
        tol,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct KHReport {
    /// `c_n = Σ_{K_n × K_nᶜ} R(x, y) μ(x) μ(y)` for every non-final level.
    pub cross_energies: Vec<f64>,
    pub sup: f64,
    pub bounded: bool,
    /// `max_{K_n} Rμ` on the largest truncation.
    pub potential_max: Vec<f64>,
    pub locally_bounded: bool,
}

/// Relative spread below which the cross energies count as stabilized.
pub const KH_SPREAD: f64 = 0.05;

/// Cross-energy test of the K_H class. `K_n` is the image of level `n` in
/// the largest level, whose Green kernel is used throughout; `mu` lives on
/// the largest level. The last level is omitted since its complement is
/// empty.
pub fn kh_test<T: Scalar>(
    exhaustion: &Exhaustion<T>,
    mu: &PotentialMeasure<T>,
) -> Result<KHReport> {
    let top = exhaustion.n_levels() - 1;
    let model = &exhaustion.levels()[top];
    if mu.len() != model.n_states() {
        return Err(Error::DimensionMismatch {
            expected: model.n_states(),
            got: mu.len(),
        });
    }
    let g = GreenOperator::new(model)?;
    let r_mu = green_potential(&g, mu)?;
    let n = model.n_states();
    let mut cross = Vec::new();
    let mut pmax = Vec::new();
    for level in 0..top {
        let mut in_k = vec![false; n];
        for x in exhaustion.embedding(level, top) {
            in_k[x] = true;
        }
        let outside: Vec<T> = (0..n)
            .map(|x| if in_k[x] { T::zero() } else { mu.weights()[x] })
            .collect();
        let r_out = g.apply_masses(&outside);
        let c = (0..n)
            .filter(|&x| in_k[x])
            .fold(0.0, |s, x| s + mu.weights()[x].as_f64() * r_out[x].as_f64());
        cross.push(c.max(0.0));
        let pm = (0..n)
            .filter(|&x| in_k[x])
            .fold(0.0f64, |s, x| s.max(r_mu[x].as_f64()));
        pmax.push(pm);
    }
    let sup = cross.iter().copied().fold(0.0, f64::max);
    let bounded = stabilized(&cross);
    let locally_bounded = pmax.iter().all(|v| v.is_finite());
    Ok(KHReport {
        cross_energies: cross,
        sup,
        bounded,
        potential_max: pmax,
        locally_bounded,
    })
}

fn stabilized(seq: &[f64]) -> bool {
    if seq.iter().all(|&c| c == 0.0) {
        return true;
    }
    if seq.len() < 3 {
        return false;
    }
    let tail = &seq[seq.len() - 3..];
    let hi = tail.iter().copied().fold(f64::MIN, f64::max);
    let lo = tail.iter().copied().fold(f64::MAX, f64::min);
    hi.is_finite() && (hi - lo) <= KH_SPREAD * hi
}

/// Certificate data for one truncation.
#[derive(Debug, Clone, Serialize)]
pub struct LevelCertificate {
    pub n_states: usize,
    /// `max_x |(H^ν Rμ)(x)| / max_x (μ/m)(x)`.
    pub residual: f64,
    pub lambda_nu: f64,
    /// `λ(c ν)` for the probe factor `c`.
    pub lambda_scaled: f64,
    /// `ν(x)/m(x)`, the density of `ν`.
    pub nu_density: Vec<f64>,
    pub potential: Vec<f64>,
}

/// Factor used to probe optimality: the Hardy inequality must fail for
/// `c ν` with `c > 1`.
pub const OPTIMALITY_PROBE: f64 = 1.1;

pub fn level_certificate<T: Scalar>(
    model: &DiscreteModel<T>,
    mu: &PotentialMeasure<T>,
) -> Result<LevelCertificate> {
    let g = GreenOperator::new(model)?;
    let r = green_potential(&g, mu)?;
    let nu = nu_from_potential(mu, &r)?;
    let op = assemble_operator(model, &nu)?;
    let hr = op.apply(&r);
    let scale = mu
        .weights()
        .iter()
        .zip(model.measure())
        .fold(0.0f64, |s, (&w, &m)| s.max((w / m).as_f64()));
    let residual = hr.iter().fold(0.0f64, |s, v| s.max(v.as_f64().abs())) / scale;
    let lambda_nu = lambda_mu(model, &nu)?.as_f64();
    let lambda_scaled = lambda_mu(model, &nu.scaled(T::lit(OPTIMALITY_PROBE))?)?.as_f64();
    Ok(LevelCertificate {
        n_states: model.n_states(),
        residual,
        lambda_nu,
        lambda_scaled,
        nu_density: nu
            .weights()
            .iter()
            .zip(model.measure())
            .map(|(&w, &m)| (w / m).as_f64())
            .collect(),
        potential: r.iter().map(|v| v.as_f64()).collect(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CriticalityCertificate {
    pub levels: Vec<LevelCertificate>,
    pub extrapolated_lambda: Option<f64>,
    /// (a) `Rμ` is `ν`-harmonic on every level.
    pub harmonic: bool,
    /// (b) the Hardy inequality `λ(ν) ≥ 1 − tol` on every level.
    pub hardy: bool,
    /// (c) `λ(ν) → 1` and `λ(c ν) < 1`.
    pub optimal: bool,
    pub tol: f64,
    pub limit_tol: f64,
}

impl CriticalityCertificate {
    pub fn passed(&self) -> bool {
        self.harmonic && self.hardy && self.optimal
    }
}

/// Tolerance on the extrapolated `λ(ν)` for the optimality check.
pub const DEFAULT_LIMIT_TOL: f64 = 0.02;

/// Checks that `Rμ` is a ground state of `E^ν` with `ν = μ/Rμ` on every
/// truncation `(model, μ)` of a sequence, and that the Hardy constant 1 is
/// attained in the limit.
pub fn criticality_certificate<T: Scalar>(
    levels: &[(DiscreteModel<T>, PotentialMeasure<T>)],
    tol: f64,
    limit_tol: f64,
) -> Result<CriticalityCertificate> {
    if levels.is_empty() {
        return Err(Error::InvalidInput(
            "certificate needs at least one level".into(),
        ));
    }
    let certs = levels
        .iter()
        .map(|(m, mu)| level_certificate(m, mu))
        .collect::<Result<Vec<_>>>()?;
    let lambdas: Vec<f64> = certs.iter().map(|c| c.lambda_nu).collect();
    let extrapolated = aitken(&lambdas).or_else(|| lambdas.last().copied());
    let harmonic = certs.iter().all(|c| c.residual <= tol);
    let hardy = lambdas.iter().all(|&l| l >= 1.0 - tol);
    let optimal = extrapolated.is_some_and(|l| (l - 1.0).abs() <= limit_tol)
        && certs.iter().all(|c| c.lambda_scaled < 1.0);
    Ok(CriticalityCertificate {
        levels: certs,
        extrapolated_lambda: extrapolated,
        harmonic,
        hardy,
        optimal,
        tol,
        limit_tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::schrodinger_energy;
    use crate::spectral::{classify, Verdict};
    use proptest::prelude::*;

    /// Path on states 1..=n with unit conductances, grounded through a unit
    /// conductance at 0; reflecting at n.
    fn grounded_path(n: usize) -> DiscreteModel<f64> {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1, 1.0)).collect();
        let mut kill = vec![0.0; n];
        kill[0] = 1.0;
        DiscreteModel::from_edges(vec![1.0; n], &edges, kill).unwrap()
    }

    #[test]
    fn path_green_kernel_is_min() {
        let n = 6;
        let g = GreenOperator::new(&grounded_path(n)).unwrap();
        let r = g.kernel().unwrap();
        for i in 0..n {
            for j in 0..n {
                assert!((r[(i, j)] - (i.min(j) + 1) as f64).abs() < 1e-12);
            }
        }
        let col = green_potential(&g, &PotentialMeasure::point_mass(n, 3)).unwrap();
        for i in 0..n {
            assert!((col[i] - r[(i, 3)]).abs() < 1e-12);
        }
    }

    #[test]
    fn recurrent_truncation_has_no_green_operator() {
        let model =
            DiscreteModel::from_edges(vec![1.0, 1.0], &[(0, 1, 1.0)], vec![0.0, 0.0]).unwrap();
        assert!(matches!(
            GreenOperator::new(&model),
            Err(Error::NotTransient)
        ));
    }

    #[test]
    fn point_mass_nu() {
        let model = grounded_path(4);
        let g = GreenOperator::new(&model).unwrap();
        let nu = nu_from_mu(&g, &PotentialMeasure::point_mass(4, 2)).unwrap();
        assert!((nu.weights()[2] - 1.0 / 3.0).abs() < 1e-14);
        assert_eq!(nu.weights()[0], 0.0);
    }

    #[test]
    fn compact_mu_gives_exactly_critical_pair() {
        let model = grounded_path(8);
        let mu = PotentialMeasure::new(vec![0.0, 0.5, 1.0, 0.0, 0.2, 0.0, 0.0, 0.0]).unwrap();
        let g = GreenOperator::new(&model).unwrap();
        let nu = nu_from_mu(&g, &mu).unwrap();
        let report = classify(&model, &nu, 1e-8).unwrap();
        assert_eq!(report.verdict, Verdict::Critical);
        let r = green_potential(&g, &mu).unwrap();
        let phi = report.ground_state.unwrap();
        let ratio = r[0] / phi[0];
        for (a, b) in r.iter().zip(&phi) {
            assert!((a / b - ratio).abs() <= 1e-8 * ratio);
        }
        // the h-transform by the ground state has no killing left
        let t = crate::forms::h_transform(&model, &nu, &r).unwrap();
        let kmax = t.kill().iter().fold(0.0f64, |a, &b| a.max(b));
        assert!(kmax <= 1e-10 * t.degree().iter().fold(0.0f64, |a, &b| a.max(b)));
    }

    #[test]
    fn unit_path_capacity_is_series_conductance() {
        // K = {0}, grounded right after the last state: cap = 1/(L+1)
        let levels: Vec<DiscreteModel<f64>> = [2usize, 4, 8, 16]
            .iter()
            .map(|&n| {
                let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1, 1.0)).collect();
                let mut kill = vec![0.0; n];
                kill[n - 1] = 1.0;
                DiscreteModel::from_edges(vec![1.0; n], &edges, kill).unwrap()
            })
            .collect();
        let maps: Vec<Vec<usize>> = levels[..3]
            .iter()
            .map(|m| (0..m.n_states()).collect())
            .collect();
        // consecutive levels disagree in killing only, which is allowed
        let ex = Exhaustion::new(levels, maps, vec![0]).unwrap();
        let caps = capacity(&ex, &[0]).unwrap();
        for (c, n) in caps.iter().zip([2.0, 4.0, 8.0, 16.0]) {
            assert!((c.capacity - 1.0 / n).abs() < 1e-13);
            assert!(c.potential_min >= 0.0 && c.potential_max <= 1.0);
        }
        let seq: Vec<f64> = caps.iter().map(|c| c.capacity).collect();
        assert_eq!(
            recurrence_verdict(&seq, DEFAULT_RECURRENCE_TOL)
                .unwrap()
                .verdict,
            Recurrence::Recurrent
        );
    }

    #[test]
    fn verdict_examples() {
        let harmonic = [1.0, 0.5, 1.0 / 3.0, 0.25];
        assert_eq!(
            recurrence_verdict(&harmonic, 0.05).unwrap().verdict,
            Recurrence::Recurrent
        );
        let geometric = [1.0, 0.9, 0.89, 0.889];
        let rep = recurrence_verdict(&geometric, 0.05).unwrap();
        assert_eq!(rep.verdict, Recurrence::Transient);
        assert!((rep.limit - 8.0 / 9.0).abs() < 1e-3);
        assert!(matches!(
            recurrence_verdict(&[1.0, 0.5, 0.6], 0.05),
            Err(Error::NonMonotone { index: 2 })
        ));
        assert!(recurrence_verdict(&[1.0, 0.5], 0.05).is_err());
    }

    #[test]
    fn cross_energy_vanishes_for_compact_mu() {
        let levels: Vec<DiscreteModel<f64>> = [3usize, 5, 7, 9]
            .iter()
            .map(|&n| grounded_path(n))
            .collect();
        let maps: Vec<Vec<usize>> = levels[..3]
            .iter()
            .map(|m| (0..m.n_states()).collect())
            .collect();
        let ex = Exhaustion::new(levels, maps, vec![0]).unwrap();
        let mut w = vec![0.0; 9];
        w[1] = 1.0;
        w[2] = 0.5;
        let rep = kh_test(&ex, &PotentialMeasure::new(w).unwrap()).unwrap();
        assert!(rep.cross_energies.iter().all(|&c| c == 0.0));
        assert!(rep.bounded && rep.locally_bounded);
    }

    fn random_path(weights: &[f64], kill: &[f64]) -> DiscreteModel<f64> {
        let n = kill.len();
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1, weights[i])).collect();
        let mut k = kill.to_vec();
        k[0] += 0.1;
        DiscreteModel::from_edges(vec![1.0; n], &edges, k).unwrap()
    }

    proptest! {
        #[test]
        fn green_identity_and_positivity(
            w in proptest::collection::vec(0.1f64..3.0, 9),
            k in proptest::collection::vec(0.0f64..0.3, 10),
            mu in proptest::collection::vec(0.0f64..1.0, 10),
        ) {
            let model = random_path(&w, &k);
            let g = GreenOperator::new(&model).unwrap();
            let mu = PotentialMeasure::new(mu).unwrap();
            let r = green_potential(&g, &mu).unwrap();
            let op = assemble_operator(&model, &PotentialMeasure::zeros(10)).unwrap();
            let hr = op.apply(&r);
            let norm = mu.weights().iter().fold(0.0f64, |a, &b| a.max(b));
            for x in 0..10 {
                prop_assert!((hr[x] - mu.weights()[x] / model.measure()[x]).abs() <= 1e-10 * (1.0 + norm));
            }
            let kern = g.kernel().unwrap();
            for x in 0..10 {
                for y in 0..10 {
                    prop_assert!(kern[(x, y)] > 0.0);
                    prop_assert!((kern[(x, y)] - kern[(y, x)]).abs() <= 1e-12 * kern[(x, x)]);
                }
            }
        }

        #[test]
        fn cross_energy_bounds_truncated_potential_energy(
            w in proptest::collection::vec(0.1f64..3.0, 9),
            k in proptest::collection::vec(0.0f64..0.3, 10),
            mu in proptest::collection::vec(0.01f64..1.0, 10),
            cut in 1usize..9,
        ) {
            let model = random_path(&w, &k);
            let g = GreenOperator::new(&model).unwrap();
            let mu = PotentialMeasure::new(mu).unwrap();
            let nu = nu_from_mu(&g, &mu).unwrap();
            let inside: Vec<f64> = (0..10).map(|x| if x < cut { mu.weights()[x] } else { 0.0 }).collect();
            let outside: Vec<f64> = (0..10).map(|x| if x < cut { 0.0 } else { mu.weights()[x] }).collect();
            let r_k = g.apply_masses(&inside);
            let e = schrodinger_energy(&model, &nu, &r_k).unwrap();
            let r_out = g.apply_masses(&outside);
            let cross: f64 = (0..cut).map(|x| mu.weights()[x] * r_out[x]).sum();
            prop_assert!(e <= cross * (1.0 + 1e-10) + 1e-12);
        }

        #[test]
        fn equilibrium_potential_obeys_maximum_principle(
            w in proptest::collection::vec(0.1f64..3.0, 9),
            k in proptest::collection::vec(0.0f64..0.3, 10),
            core in 0usize..10,
        ) {
            let model = random_path(&w, &k);
            let u = equilibrium_potential(&model, &[core]).unwrap();
            prop_assert!(u.iter().all(|&v| (-1e-14..=1.0 + 1e-14).contains(&v)));
        }
    }
}
