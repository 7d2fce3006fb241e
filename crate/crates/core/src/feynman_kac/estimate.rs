//! Feynman–Kac estimators `E_x[e^{A_t} f(X_t); t < ζ]` over batches of
//! independent paths.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::walks::{PathRecord, PathSampler};
use crate::error::{Error, Result};

/// Paths from one start point. Path `i` draws from ChaCha8 stream
/// `stream + i` of `seed`, so a batch is reproducible whatever the thread
/// count.
#[derive(Debug, Clone)]
pub struct PathBatch<S> {
    pub seed: u64,
    pub n_paths: usize,
    pub dt: f64,
    pub horizon: f64,
    pub start: S,
    pub end: Vec<S>,
    pub additive: Vec<f64>,
    pub alive: Vec<bool>,
    pub additive_coarse: Vec<f64>,
    pub alive_coarse: Vec<bool>,
}

pub fn path_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn simulate_batch<P: PathSampler>(
    sampler: &P,
    start: P::State,
    t: f64,
    n_paths: usize,
    seed: u64,
    stream: u64,
) -> Result<PathBatch<P::State>> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "horizon t = {t} must be finite and nonnegative"
        )));
    }
    if n_paths < 2 {
        return Err(Error::InvalidInput(
            "need at least two paths for a standard error".into(),
        ));
    }
    let records: Vec<PathRecord<P::State>> = (0..n_paths as u64)
        .into_par_iter()
        .map(|i| sampler.sample(start, t, &mut path_rng(seed, stream + i)))
        .collect::<Result<_>>()?;
    Ok(PathBatch {
        seed,
        n_paths,
        dt: sampler.dt(t),
        horizon: t,
        start,
        end: records.iter().map(|r| r.end).collect(),
        additive: records.iter().map(|r| r.additive).collect(),
        alive: records.iter().map(|r| r.alive).collect(),
        additive_coarse: records.iter().map(|r| r.additive_coarse).collect(),
        alive_coarse: records.iter().map(|r| r.alive_coarse).collect(),
    })
}

fn mean_and_stderr(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Estimate, standard error, and the step-halving difference
/// `|E[w_Δt − w_2Δt]|` used as the discretization bias allowance.
pub fn batch_estimate<S>(batch: &PathBatch<S>, f: &(dyn Fn(&S) -> f64 + Sync)) -> (f64, f64, f64) {
    let fine: Vec<f64> = (0..batch.n_paths)
        .map(|i| {
            if batch.alive[i] {
                batch.additive[i].exp() * f(&batch.end[i])
            } else {
                0.0
            }
        })
        .collect();
    let coarse: Vec<f64> = (0..batch.n_paths)
        .map(|i| {
            if batch.alive_coarse[i] {
                batch.additive_coarse[i].exp() * f(&batch.end[i])
            } else {
                0.0
            }
        })
        .collect();
    let (m, se) = mean_and_stderr(&fine);
    let diff: Vec<f64> = fine.iter().zip(&coarse).map(|(a, b)| a - b).collect();
    let (bias, _) = mean_and_stderr(&diff);
    (m, se, bias.abs())
}

#[derive(Debug, Clone, Serialize)]
pub struct FkEstimate {
    pub estimate: Vec<f64>,
    pub stderr: Vec<f64>,
    pub bias: Vec<f64>,
    pub n_paths: usize,
    pub dt: f64,
    pub t: f64,
    pub seed: u64,
}

/// Streams of start point `j` begin at `j · 2³²`.
const STREAMS_PER_START: u64 = 1 << 32;

pub fn feynman_kac_estimate<P: PathSampler>(
    sampler: &P,
    starts: &[P::State],
    f: &(dyn Fn(&P::State) -> f64 + Sync),
    t: f64,
    n_paths: usize,
    seed: u64,
) -> Result<FkEstimate> {
    let mut out = FkEstimate {
        estimate: Vec::with_capacity(starts.len()),
        stderr: Vec::with_capacity(starts.len()),
        bias: Vec::with_capacity(starts.len()),
        n_paths,
        dt: sampler.dt(t),
        t,
        seed,
    };
    for (j, &x) in starts.iter().enumerate() {
        let batch = simulate_batch(sampler, x, t, n_paths, seed, j as u64 * STREAMS_PER_START)?;
        let (m, se, b) = batch_estimate(&batch, f);
        out.estimate.push(m);
        out.stderr.push(se);
        out.bias.push(b);
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct ExcessivenessReport {
    /// `p^μ_t h(x) / h(x)` per probe.
    pub ratio: Vec<f64>,
    pub stderr: Vec<f64>,
    pub bias: Vec<f64>,
    /// Probes with `ratio > 1 + 3·stderr + bias`.
    pub violations: Vec<usize>,
    pub n_paths: usize,
    pub dt: f64,
    pub t: f64,
    pub seed: u64,
}

impl ExcessivenessReport {
    pub fn excessive(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn excessiveness_check<P: PathSampler>(
    sampler: &P,
    probes: &[P::State],
    h: &(dyn Fn(&P::State) -> f64 + Sync),
    t: f64,
    n_paths: usize,
    seed: u64,
) -> Result<ExcessivenessReport> {
    for (i, p) in probes.iter().enumerate() {
        let v = h(p);
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "h must be positive at probe {i}, got {v}"
            )));
        }
    }
    let est = feynman_kac_estimate(sampler, probes, h, t, n_paths, seed)?;
    let scale: Vec<f64> = probes.iter().map(|p| h(p)).collect();
    let ratio: Vec<f64> = est
        .estimate
        .iter()
        .zip(&scale)
        .map(|(e, s)| e / s)
        .collect();
    let stderr: Vec<f64> = est.stderr.iter().zip(&scale).map(|(e, s)| e / s).collect();
    let bias: Vec<f64> = est.bias.iter().zip(&scale).map(|(e, s)| e / s).collect();
    let violations = (0..probes.len())
        .filter(|&i| ratio[i] > 1.0 + 3.0 * stderr[i] + bias[i])
        .collect();
    Ok(ExcessivenessReport {
        ratio,
        stderr,
        bias,
        violations,
        n_paths,
        dt: est.dt,
        t,
        seed,
    })
}
