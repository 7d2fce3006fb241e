//! The nine tasks. Each returns the JSON result, a summary, a table and the
//! status that decides the exit code.

use serde_json::{json, Value};

use criticality::extrapolate::aitken;
use criticality::feynman_kac::{
    feynman_kac_estimate, ChainWalk, FkEstimate, StableWalk, TruncatedPower,
};
use criticality::io::{model_from_json, model_to_json};
use criticality::models::stable::cell_masses;
use criticality::models::{
    build_diffusion_model, build_stable_model, build_stable_system, delta_star, kappa, kappa_star,
    stable_exhaustion, GeometricGrid, RadialPower, Scale, StableRecipe,
};
use criticality::potential::{
    capacity, criticality_certificate, kh_test, nu_from_mu, recurrence_verdict, GreenOperator,
    Recurrence,
};
use criticality::spectral::{classify, lambda_mu, Verdict};
use criticality::{Model, Potential};

use crate::config::{Recipe, RunConfig, StablePotential, StableSpec, Task, TestFunction, Walk};
use crate::report::{cell, Status, Table};
use crate::CliError;

pub struct Output {
    pub status: Status,
    pub result: Value,
    pub summary: Vec<(String, String)>,
    pub table: Table,
}

/// A built model with node coordinates (state indices for file models).
struct Loaded {
    model: Model,
    mu: Potential,
    points: Vec<[f64; 3]>,
    d: usize,
}

fn stable_density(spec: &StableSpec, recipe: &StableRecipe) -> Result<RadialPower, CliError> {
    Ok(match spec.potential {
        StablePotential::Hardy => recipe.hardy_density()?,
        StablePotential::Critical => recipe.critical_density(),
    })
}

fn load_stable(spec: &StableSpec, recipe: &StableRecipe) -> Result<Loaded, CliError> {
    let sys = build_stable_system(recipe, stable_density(spec, recipe)?)?;
    Ok(Loaded {
        points: sys.grid.points.clone(),
        d: recipe.d,
        model: sys.model,
        mu: sys.mu,
    })
}

/// Reads a model file: either a bare model document or `{model, mu}`.
pub fn read_model_file(path: &std::path::Path) -> Result<(Vec<u8>, Value), CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Io(format!("cannot read model {}: {e}", path.display())))?;
    let value: Value = serde_json::from_slice(&bytes)
        .map_err(|e| CliError::Config(format!("model {} is not JSON: {e}", path.display())))?;
    Ok((bytes, value))
}

fn load(config: &RunConfig) -> Result<Loaded, CliError> {
    match &config.recipe {
        Recipe::Stable(spec) => load_stable(spec, &spec.recipe),
        Recipe::Diffusion(spec) => {
            let sys = build_diffusion_model(&spec.recipe()?)?;
            Ok(Loaded {
                points: sys.nodes.iter().map(|&x| [x, 0.0, 0.0]).collect(),
                d: 1,
                model: sys.model,
                mu: sys.mu,
            })
        }
        Recipe::Model(spec) => {
            let (_, value) = read_model_file(&spec.path)?;
            let doc = value.get("model").unwrap_or(&value);
            let model: Model = model_from_json(doc)?;
            let weights = match (&spec.mu, value.get("mu")) {
                (Some(w), _) => w.clone(),
                (None, Some(w)) => serde_json::from_value(w.clone()).map_err(|e| {
                    CliError::Config(format!(
                        "mu in {} is not a list of numbers: {e}",
                        spec.path.display()
                    ))
                })?,
                (None, None) => vec![0.0; model.n_states()],
            };
            let mu = Potential::new(weights)?;
            Ok(Loaded {
                points: (0..model.n_states())
                    .map(|i| [i as f64, 0.0, 0.0])
                    .collect(),
                d: 1,
                model,
                mu,
            })
        }
    }
}

fn coords(p: &[f64; 3], d: usize) -> Vec<String> {
    (0..3)
        .map(|k| if k < d { cell(p[k]) } else { String::new() })
        .collect()
}

fn norm(p: &[f64; 3]) -> f64 {
    (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt()
}

fn verdict_status(v: Verdict) -> Status {
    if v == Verdict::Indeterminate {
        Status::Indeterminate
    } else {
        Status::Ok
    }
}

pub fn run_task(task: Task, config: &RunConfig) -> Result<Output, CliError> {
    match task {
        Task::Build => build(config),
        Task::Spectrum => spectrum(config),
        Task::Classify => classify_task(config),
        Task::Capacity => capacity_task(config),
        Task::Khtest => khtest(config),
        Task::CriticalCert => critical_cert(config),
        Task::Hardy => hardy(config),
        Task::Simulate => simulate(config),
        Task::Sweep => sweep(config),
    }
}

fn build(config: &RunConfig) -> Result<Output, CliError> {
    let l = load(config)?;
    let mut table = Table::new(&["state", "x", "y", "z", "m", "mu", "kill"]);
    for i in 0..l.model.n_states() {
        let mut row = vec![i.to_string()];
        row.extend(coords(&l.points[i], l.d));
        row.extend([
            cell(l.model.measure()[i]),
            cell(l.mu.weights()[i]),
            cell(l.model.kill()[i]),
        ]);
        table.push(row);
    }
    Ok(Output {
        status: Status::Ok,
        summary: vec![
            ("states".into(), l.model.n_states().to_string()),
            ("edges".into(), l.model.edges().len().to_string()),
            ("mu mass".into(), cell(l.mu.weights().iter().sum())),
        ],
        result: json!({
            "model": model_to_json(&l.model),
            "mu": l.mu.weights(),
            "points": l.points.iter().map(|p| &p[..l.d]).collect::<Vec<_>>(),
        }),
        table,
    })
}

fn spectrum(config: &RunConfig) -> Result<Output, CliError> {
    let l = load(config)?;
    let rep = classify(&l.model, &l.mu, config.tolerances.classify)?;
    let mut table = Table::new(&["state", "x", "y", "z", "mu_density", "ground_state"]);
    for i in 0..l.model.n_states() {
        let mut row = vec![i.to_string()];
        row.extend(coords(&l.points[i], l.d));
        row.push(cell(l.mu.weights()[i] / l.model.measure()[i]));
        row.push(
            rep.ground_state
                .as_ref()
                .map_or(String::new(), |g| cell(g[i])),
        );
        table.push(row);
    }
    Ok(Output {
        status: verdict_status(rep.verdict),
        summary: vec![
            ("lambda".into(), cell(rep.lambda)),
            ("gamma".into(), cell(rep.gamma)),
            ("verdict".into(), format!("{:?}", rep.verdict)),
            ("residual".into(), cell(rep.residual)),
        ],
        result: json!({
            "lambda": rep.lambda,
            "gamma": rep.gamma,
            "verdict": rep.verdict,
            "residual": rep.residual,
            "eigen_residual": rep.eigen_residual,
            "tol": rep.tol,
        }),
        table,
    })
}

fn stable_levels(spec: &StableSpec, radii: &[f64]) -> Result<Vec<(f64, Loaded)>, CliError> {
    radii
        .iter()
        .map(|&r| {
            let rec = StableRecipe {
                radius: r,
                ..spec.recipe.clone()
            };
            load_stable(spec, &rec).map(|l| (r, l))
        })
        .collect()
}

fn classify_task(config: &RunConfig) -> Result<Output, CliError> {
    let tol = config.tolerances.classify;
    let levels: Vec<(f64, Loaded)> = match (&config.recipe, config.exhaustion.levels.is_empty()) {
        (Recipe::Stable(spec), false) => stable_levels(spec, &config.exhaustion.levels)?,
        _ => {
            let l = load(config)?;
            let size = match &config.recipe {
                Recipe::Stable(s) => s.recipe.radius,
                _ => l.model.n_states() as f64,
            };
            vec![(size, l)]
        }
    };
    let mut table = Table::new(&[
        "level", "size", "n_states", "lambda", "gamma", "residual", "verdict",
    ]);
    let mut per_level = Vec::new();
    let mut lambdas = Vec::new();
    let mut last = Verdict::Indeterminate;
    for (k, (size, l)) in levels.iter().enumerate() {
        let rep = classify(&l.model, &l.mu, tol)?;
        table.push(vec![
            k.to_string(),
            cell(*size),
            l.model.n_states().to_string(),
            cell(rep.lambda),
            cell(rep.gamma),
            cell(rep.residual),
            format!("{:?}", rep.verdict),
        ]);
        per_level.push(json!({
            "size": size,
            "n_states": l.model.n_states(),
            "lambda": rep.lambda,
            "gamma": rep.gamma,
            "residual": rep.residual,
            "verdict": rep.verdict,
        }));
        lambdas.push(rep.lambda);
        last = rep.verdict;
    }
    let extrapolated = aitken(&lambdas);
    Ok(Output {
        status: verdict_status(last),
        summary: vec![
            ("verdict".into(), format!("{last:?}")),
            (
                "lambda".into(),
                cell(*lambdas.last().expect("at least one level")),
            ),
            (
                "extrapolated lambda".into(),
                extrapolated.map_or("n/a".into(), cell),
            ),
        ],
        result: json!({
            "verdict": last,
            "levels": per_level,
            "extrapolated_lambda": extrapolated,
            "tol": tol,
        }),
        table,
    })
}

fn stable_spec(config: &RunConfig) -> Result<&StableSpec, CliError> {
    match &config.recipe {
        Recipe::Stable(s) => Ok(s),
        _ => Err(CliError::Config("this task needs kind = \"stable\"".into())),
    }
}

fn capacity_task(config: &RunConfig) -> Result<Output, CliError> {
    let spec = stable_spec(config)?;
    let ex_spec = &config.exhaustion;
    let (ex, grids) = stable_exhaustion(
        &spec.recipe,
        &ex_spec.levels,
        ex_spec.transformed,
        ex_spec.core_radius,
    )?;
    let levels = capacity(&ex, ex.core())?;
    let caps: Vec<f64> = levels.iter().map(|c| c.capacity).collect();
    let rep = recurrence_verdict(&caps, config.tolerances.recurrence)?;
    let mut table = Table::new(&[
        "level",
        "radius",
        "n_states",
        "capacity",
        "potential_min",
        "potential_max",
    ]);
    for (k, c) in levels.iter().enumerate() {
        table.push(vec![
            k.to_string(),
            cell(ex_spec.levels[k]),
            c.n_states.to_string(),
            cell(c.capacity),
            cell(c.potential_min),
            cell(c.potential_max),
        ]);
    }
    Ok(Output {
        status: if rep.verdict == Recurrence::Indeterminate {
            Status::Indeterminate
        } else {
            Status::Ok
        },
        summary: vec![
            ("verdict".into(), format!("{:?}", rep.verdict)),
            ("capacity limit".into(), cell(rep.limit)),
            ("core states".into(), ex.core().len().to_string()),
            (
                "largest level".into(),
                grids.last().map_or(0, |g| g.n_states()).to_string(),
            ),
        ],
        result: json!({
            "verdict": rep.verdict,
            "limit": rep.limit,
            "increment_ratio": rep.increment_ratio,
            "tol": rep.tol,
            "levels": levels,
        }),
        table,
    })
}

fn khtest(config: &RunConfig) -> Result<Output, CliError> {
    let spec = stable_spec(config)?;
    let ex_spec = &config.exhaustion;
    let (ex, grids) = stable_exhaustion(&spec.recipe, &ex_spec.levels, false, ex_spec.core_radius)?;
    let top = grids.last().expect("at least two levels");
    let mu = Potential::new(cell_masses(top, stable_density(spec, &spec.recipe)?)?)?;
    let rep = kh_test(&ex, &mu)?;
    let mut table = Table::new(&[
        "level",
        "radius",
        "n_states",
        "cross_energy",
        "potential_max",
    ]);
    for (k, c) in rep.cross_energies.iter().enumerate() {
        table.push(vec![
            k.to_string(),
            cell(ex_spec.levels[k]),
            grids[k].n_states().to_string(),
            cell(*c),
            rep.potential_max.get(k).map_or(String::new(), |&p| cell(p)),
        ]);
    }
    Ok(Output {
        status: Status::Ok,
        summary: vec![
            ("bounded".into(), rep.bounded.to_string()),
            ("sup cross energy".into(), cell(rep.sup)),
            ("locally bounded".into(), rep.locally_bounded.to_string()),
        ],
        result: serde_json::to_value(&rep).expect("report serializes"),
        table,
    })
}

/// Central windows of a geometric grid with the given node counts.
fn diffusion_windows(grid: &GeometricGrid, counts: &[f64]) -> Result<Vec<GeometricGrid>, CliError> {
    let x = grid.nodes()?;
    counts
        .iter()
        .map(|&c| {
            let n = c as usize;
            if c != n as f64 || n < 3 || n > grid.n || (grid.n - n) % 2 != 0 {
                return Err(CliError::Config(format!(
                    "diffusion level {c} must be an integer node count in 3..={} with the parity of {}",
                    grid.n, grid.n
                )));
            }
            let cut = (grid.n - n) / 2;
            Ok(GeometricGrid {
                lo: x[cut],
                hi: x[grid.n - 1 - cut],
                n,
            })
        })
        .collect()
}

fn critical_cert(config: &RunConfig) -> Result<Output, CliError> {
    let levels: Vec<(Model, Potential)> = match &config.recipe {
        Recipe::Stable(spec) => stable_levels(spec, &config.exhaustion.levels)?
            .into_iter()
            .map(|(_, l)| (l.model, l.mu))
            .collect(),
        Recipe::Diffusion(spec) => {
            let base = spec.recipe()?;
            diffusion_windows(&base.grid, &config.exhaustion.levels)?
                .into_iter()
                .map(|grid| {
                    let sys = build_diffusion_model(&criticality::models::DiffusionRecipe {
                        grid,
                        ..base.clone()
                    })?;
                    Ok((sys.model, sys.mu))
                })
                .collect::<Result<_, CliError>>()?
        }
        Recipe::Model(_) => {
            return Err(CliError::Config(
                "critical-cert needs a stable or diffusion recipe".into(),
            ));
        }
    };
    let t = &config.tolerances;
    let cert = criticality_certificate(&levels, t.classify, t.limit)?;
    let mut table = Table::new(&[
        "level",
        "size",
        "n_states",
        "residual",
        "lambda_nu",
        "lambda_scaled",
    ]);
    for (k, c) in cert.levels.iter().enumerate() {
        table.push(vec![
            k.to_string(),
            cell(config.exhaustion.levels[k]),
            c.n_states.to_string(),
            cell(c.residual),
            cell(c.lambda_nu),
            cell(c.lambda_scaled),
        ]);
    }
    let levels_json: Vec<Value> = cert
        .levels
        .iter()
        .map(|c| {
            json!({
                "n_states": c.n_states,
                "residual": c.residual,
                "lambda_nu": c.lambda_nu,
                "lambda_scaled": c.lambda_scaled,
            })
        })
        .collect();
    Ok(Output {
        status: if cert.passed() {
            Status::Ok
        } else {
            Status::Indeterminate
        },
        summary: vec![
            ("passed".into(), cert.passed().to_string()),
            ("harmonic".into(), cert.harmonic.to_string()),
            ("hardy".into(), cert.hardy.to_string()),
            ("optimal".into(), cert.optimal.to_string()),
            (
                "extrapolated lambda".into(),
                cert.extrapolated_lambda.map_or("n/a".into(), cell),
            ),
        ],
        result: json!({
            "passed": cert.passed(),
            "harmonic": cert.harmonic,
            "hardy": cert.hardy,
            "optimal": cert.optimal,
            "extrapolated_lambda": cert.extrapolated_lambda,
            "probe_factor": criticality::potential::OPTIMALITY_PROBE,
            "tol": cert.tol,
            "limit_tol": cert.limit_tol,
            "levels": levels_json,
        }),
        table,
    })
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// Fits `ν = c r^{−e}` on the bulk of the grid.
fn hardy(config: &RunConfig) -> Result<Output, CliError> {
    let l = load(config)?;
    // exponent of ν, bulk nodes and the closed-form constant when known
    let (exponent, bulk, expected): (f64, Vec<usize>, Option<f64>) = match &config.recipe {
        Recipe::Diffusion(spec) => {
            let r = spec.recipe()?;
            let Scale::Pow { p } = r.scale;
            let n = l.model.n_states();
            (
                p + 1.0,
                (1..n - 1).collect(),
                r.mu.is_none().then(|| r.scale.hardy_coefficient()),
            )
        }
        Recipe::Stable(spec) => {
            let rec = &spec.recipe;
            let sys = build_stable_system(rec, stable_density(spec, rec)?)?;
            let bulk = (0..sys.grid.n_grid)
                .filter(|&i| (0.5..=rec.radius / 2.0).contains(&sys.grid.radii[i]))
                .collect();
            let expected = match spec.potential {
                StablePotential::Critical => Some(kappa_star(rec.d, rec.alpha)?),
                StablePotential::Hardy => None,
            };
            (rec.alpha, bulk, expected)
        }
        Recipe::Model(_) => {
            return Err(CliError::Config(
                "hardy needs a stable or diffusion recipe".into(),
            ))
        }
    };
    let g = GreenOperator::new(&l.model)?;
    let nu = nu_from_mu(&g, &l.mu)?;
    let lambda_nu = lambda_mu(&l.model, &nu)?;
    let mut table = Table::new(&["state", "r", "nu_density", "constant"]);
    let mut consts = Vec::with_capacity(bulk.len());
    for &i in &bulk {
        let r = norm(&l.points[i]);
        let dens = nu.weights()[i] / l.model.measure()[i];
        let c = dens * r.powf(exponent);
        consts.push(c);
        table.push(vec![i.to_string(), cell(r), cell(dens), cell(c)]);
    }
    let (lo, hi) = consts
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &c| {
            (a.min(c), b.max(c))
        });
    let constant = median(consts);
    let rel = expected.map(|e| (constant - e).abs() / e);
    let mut summary = vec![
        ("constant".into(), cell(constant)),
        ("range".into(), format!("[{}, {}]", cell(lo), cell(hi))),
        ("lambda(nu)".into(), cell(lambda_nu)),
    ];
    if let (Some(e), Some(r)) = (expected, rel) {
        summary.push(("expected".into(), cell(e)));
        summary.push(("relative error".into(), cell(r)));
    }
    Ok(Output {
        status: Status::Ok,
        summary,
        result: json!({
            "constant": constant,
            "constant_min": lo,
            "constant_max": hi,
            "exponent": exponent,
            "expected": expected,
            "relative_error": rel,
            "lambda_nu": lambda_nu,
            "bulk_nodes": bulk.len(),
        }),
        table,
    })
}

fn nearest(points: &[[f64; 3]], p: &[f64; 3]) -> usize {
    let dist = |q: &[f64; 3]| (0..3).map(|k| (q[k] - p[k]).powi(2)).sum::<f64>();
    (0..points.len())
        .min_by(|&a, &b| dist(&points[a]).total_cmp(&dist(&points[b])))
        .expect("model has states")
}

fn pad(p: &[f64], d: usize) -> Result<[f64; 3], CliError> {
    if p.len() != d {
        return Err(CliError::Config(format!(
            "probe {p:?} has {} coordinates, expected {d}",
            p.len()
        )));
    }
    let mut q = [0.0; 3];
    q[..d].copy_from_slice(p);
    Ok(q)
}

fn simulate(config: &RunConfig) -> Result<Output, CliError> {
    let s = config.simulate.as_ref().expect("validated");
    let seed = config.seed.expect("validated");
    let delta = match &config.recipe {
        Recipe::Stable(spec) => Some(spec.recipe.delta),
        _ => None,
    };
    let weight = |p: &[f64; 3]| -> f64 {
        match s.f {
            TestFunction::One => 1.0,
            TestFunction::Decay => 1.0 / (1.0 + norm(p)),
            TestFunction::H => norm(p).powf(-delta.unwrap_or(0.0)),
        }
    };
    if s.f == TestFunction::H && delta.is_none() {
        return Err(CliError::Config(
            "f = \"h\" (|x|^-delta) needs kind = \"stable\"".into(),
        ));
    }
    let (est, starts, d): (FkEstimate, Vec<[f64; 3]>, usize) = match s.walk {
        Walk::Chain => {
            let l = load(config)?;
            let probes = s
                .probes
                .iter()
                .map(|p| pad(p, l.d).map(|q| nearest(&l.points, &q)))
                .collect::<Result<Vec<_>, _>>()?;
            let walk = ChainWalk::new(&l.model, &l.mu)?;
            let f: Vec<f64> = l.points.iter().map(&weight).collect();
            let est = feynman_kac_estimate(&walk, &probes, &|&x| f[x], s.t, s.n_paths, seed)?;
            (est, probes.iter().map(|&i| l.points[i]).collect(), l.d)
        }
        Walk::Continuum => {
            let spec = stable_spec(config)?;
            let rec = &spec.recipe;
            let density = stable_density(spec, rec)?;
            let v = TruncatedPower {
                coefficient: density.coefficient,
                exponent: density.exponent,
                cap: s.cap,
            };
            let walk =
                StableWalk::new(rec.d, rec.alpha, s.radius.unwrap_or(rec.radius), move |x| {
                    v.eval(x)
                })?
                .with_dt_fraction(s.dt_fraction);
            let starts = s
                .probes
                .iter()
                .map(|p| pad(p, rec.d))
                .collect::<Result<Vec<_>, _>>()?;
            let est = feynman_kac_estimate(&walk, &starts, &weight, s.t, s.n_paths, seed)?;
            (est, starts, rec.d)
        }
    };
    let ratio: Option<Vec<f64>> = (s.f == TestFunction::H).then(|| {
        est.estimate
            .iter()
            .zip(&starts)
            .map(|(e, p)| e / weight(p))
            .collect()
    });
    let mut header = vec!["probe", "x", "y", "z", "estimate", "stderr", "bias"];
    if ratio.is_some() {
        header.push("ratio");
    }
    let mut table = Table::new(&header);
    for (k, p) in starts.iter().enumerate() {
        let mut row = vec![k.to_string()];
        row.extend(coords(p, d));
        row.extend([
            cell(est.estimate[k]),
            cell(est.stderr[k]),
            cell(est.bias[k]),
        ]);
        if let Some(r) = &ratio {
            row.push(cell(r[k]));
        }
        table.push(row);
    }
    Ok(Output {
        status: Status::Ok,
        summary: vec![
            ("walk".into(), format!("{:?}", s.walk).to_lowercase()),
            ("paths".into(), est.n_paths.to_string()),
            ("dt".into(), cell(est.dt)),
            ("seed".into(), seed.to_string()),
        ],
        result: json!({
            "estimate": est.estimate,
            "stderr": est.stderr,
            "bias": est.bias,
            "ratio": ratio,
            "n_paths": est.n_paths,
            "dt": est.dt,
            "t": est.t,
            "seed": est.seed,
            "probes": starts.iter().map(|p| &p[..d]).collect::<Vec<_>>(),
        }),
        table,
    })
}

fn sweep(config: &RunConfig) -> Result<Output, CliError> {
    let spec = stable_spec(config)?;
    let rec = &spec.recipe;
    let top = rec.d as f64 - rec.alpha;
    let (deltas, with_lambda) = match &config.sweep {
        Some(s) if !s.deltas.is_empty() => (s.deltas.clone(), s.lambda),
        Some(s) => (linspace(top, s.points), s.lambda),
        None => (linspace(top, 11), true),
    };
    let ks = kappa_star(rec.d, rec.alpha)?;
    let mut table = Table::new(&["delta", "kappa", "kappa_ratio", "lambda"]);
    let mut rows = Vec::with_capacity(deltas.len());
    for &delta in &deltas {
        let k = kappa(delta, rec.d, rec.alpha)?;
        let lambda = if with_lambda {
            let (model, mu) = build_stable_model(&StableRecipe {
                delta,
                ..rec.clone()
            })?;
            Some(lambda_mu(&model, &mu)?)
        } else {
            None
        };
        table.push(vec![
            cell(delta),
            cell(k),
            cell(k / ks),
            lambda.map_or(String::new(), cell),
        ]);
        rows.push(json!({"delta": delta, "kappa": k, "kappa_ratio": k / ks, "lambda": lambda}));
    }
    let argmin = deltas
        .iter()
        .zip(&rows)
        .filter_map(|(&d, r)| r["lambda"].as_f64().map(|l| (d, l)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(d, _)| d);
    Ok(Output {
        status: Status::Ok,
        summary: vec![
            ("points".into(), deltas.len().to_string()),
            ("kappa*".into(), cell(ks)),
            ("delta*".into(), cell(delta_star(rec.d, rec.alpha))),
            ("argmin lambda".into(), argmin.map_or("n/a".into(), cell)),
        ],
        result: json!({
            "kappa_star": ks,
            "delta_star": delta_star(rec.d, rec.alpha),
            "argmin_lambda": argmin,
            "rows": rows,
        }),
        table,
    })
}

/// `n` evenly spaced points of `[0, top]`; a single point sits at the middle.
fn linspace(top: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![top / 2.0],
        _ => (0..n).map(|i| top * i as f64 / (n - 1) as f64).collect(),
    }
}
