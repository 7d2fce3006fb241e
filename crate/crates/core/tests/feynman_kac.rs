use criticality::feynman_kac::*;
use criticality::forms::{DiscreteModel, PotentialMeasure};
use criticality::potential::{green_potential, nu_from_mu, GreenOperator};
use criticality::Error;

fn chain_model() -> DiscreteModel<f64> {
    let m = vec![1.0, 0.5, 2.0, 1.0, 1.5, 0.8];
    let edges = [
        (0, 1, 1.0),
        (1, 2, 0.7),
        (2, 3, 1.2),
        (3, 4, 0.4),
        (4, 5, 0.9),
        (0, 3, 0.3),
    ];
    DiscreteModel::from_edges(m, &edges, vec![0.5, 0.0, 0.0, 0.0, 0.0, 0.2]).unwrap()
}

fn mu() -> PotentialMeasure<f64> {
    PotentialMeasure::new(vec![0.0, 0.2, 0.5, 0.1, 0.0, 0.3]).unwrap()
}

#[test]
fn chain_matches_matrix_semigroup() {
    let model = chain_model();
    let mu = mu();
    let walk = ChainWalk::new(&model, &mu).unwrap();
    let f = [1.0, 2.0, 0.5, 0.0, 1.0, 3.0];
    let t = 0.8;
    let starts: Vec<usize> = (0..6).collect();
    let est = feynman_kac_estimate(&walk, &starts, &|&x| f[x], t, 40_000, 11).unwrap();
    let exact = semigroup_apply(&model, &mu, t, &f).unwrap();
    for x in 0..6 {
        assert_eq!(est.bias[x], 0.0);
        assert!(
            (est.estimate[x] - exact[x]).abs() < 3.0 * est.stderr[x],
            "state {x}: {} ± {} vs {}",
            est.estimate[x],
            est.stderr[x],
            exact[x]
        );
    }
}

#[test]
fn survival_without_potential_is_a_probability() {
    let model = chain_model();
    let walk = ChainWalk::new(&model, &PotentialMeasure::zeros(6)).unwrap();
    let est = feynman_kac_estimate(&walk, &[0, 2, 5], &|_| 1.0, 2.0, 5000, 3).unwrap();
    for &p in &est.estimate {
        assert!((0.0..=1.0).contains(&p));
    }
}

#[test]
fn constant_potential_is_a_deterministic_factor() {
    let model = chain_model();
    let c = 0.7;
    let t = 1.3;
    let zero = ChainWalk::new(&model, &PotentialMeasure::zeros(6)).unwrap();
    let cm = PotentialMeasure::new(model.measure().iter().map(|m| c * m).collect()).unwrap();
    let konst = ChainWalk::new(&model, &cm).unwrap();
    let f = |x: &usize| 1.0 + *x as f64;
    let a = feynman_kac_estimate(&zero, &[1, 4], &f, t, 4000, 9).unwrap();
    let b = feynman_kac_estimate(&konst, &[1, 4], &f, t, 4000, 9).unwrap();
    for i in 0..2 {
        let scaled = (c * t).exp() * a.estimate[i];
        assert!((b.estimate[i] - scaled).abs() < 1e-12 * scaled);
    }

    // the same on the stable walk, where paths never leave a huge ball
    let w0 = StableWalk::new(2, 1.2, 1e9, |_| 0.0)
        .unwrap()
        .with_dt_fraction(0.01);
    let wc = StableWalk::new(2, 1.2, 1e9, move |_| c)
        .unwrap()
        .with_dt_fraction(0.01);
    let g = |x: &[f64; 3]| 1.0 / (1.0 + x[0] * x[0] + x[1] * x[1]);
    let a = feynman_kac_estimate(&w0, &[[0.5, 0.0, 0.0]], &g, t, 2000, 5).unwrap();
    let b = feynman_kac_estimate(&wc, &[[0.5, 0.0, 0.0]], &g, t, 2000, 5).unwrap();
    let scaled = (c * t).exp() * a.estimate[0];
    assert!((b.estimate[0] - scaled).abs() < 1e-12 * scaled);
}

#[test]
fn estimates_are_reproducible_and_nonnegative() {
    let model = chain_model();
    let walk = ChainWalk::new(&model, &mu()).unwrap();
    let f = |x: &usize| (*x % 3) as f64;
    let a = feynman_kac_estimate(&walk, &[0, 3], &f, 1.0, 3000, 77).unwrap();
    let b = feynman_kac_estimate(&walk, &[0, 3], &f, 1.0, 3000, 77).unwrap();
    assert_eq!(a.estimate, b.estimate);
    assert_eq!(a.stderr, b.stderr);
    assert!(a.estimate.iter().all(|&v| v >= 0.0));

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(3)
        .build()
        .unwrap();
    let c = pool.install(|| feynman_kac_estimate(&walk, &[0, 3], &f, 1.0, 3000, 77).unwrap());
    assert_eq!(a.estimate, c.estimate);

    let walk = StableWalk::new(1, 0.8, 5.0, |x| 0.1 * x[0].abs())
        .unwrap()
        .with_dt_fraction(0.02);
    let g = |x: &[f64; 3]| x[0].abs();
    let a = feynman_kac_estimate(&walk, &[[1.0, 0.0, 0.0]], &g, 0.5, 500, 4).unwrap();
    let c =
        pool.install(|| feynman_kac_estimate(&walk, &[[1.0, 0.0, 0.0]], &g, 0.5, 500, 4).unwrap());
    assert_eq!(a.estimate, c.estimate);
    assert!(a.estimate[0] >= 0.0);
}

#[test]
fn stderr_scales_like_inverse_root_paths() {
    let model = chain_model();
    let walk = ChainWalk::new(&model, &mu()).unwrap();
    let f = |x: &usize| *x as f64;
    let se: Vec<f64> = [2000, 8000, 32000]
        .iter()
        .map(|&n| {
            feynman_kac_estimate(&walk, &[2], &f, 1.0, n, 21)
                .unwrap()
                .stderr[0]
        })
        .collect();
    for w in se.windows(2) {
        let r = w[0] / w[1];
        assert!((r - 2.0).abs() < 0.2 * 2.0, "ratio {r}");
    }
}

#[test]
fn semigroup_property_by_restart() {
    let model = chain_model();
    let mu = mu();
    let walk = ChainWalk::new(&model, &mu).unwrap();
    let f = [0.0, 1.0, 2.0, 1.0, 0.0, 1.0];
    let (t1, t2) = (0.4, 0.6);
    let n = 20_000;
    let all: Vec<usize> = (0..6).collect();
    let inner = feynman_kac_estimate(&walk, &all, &|&x| f[x], t2, n, 100).unwrap();
    let u = inner.estimate.clone();
    let restart = feynman_kac_estimate(&walk, &[2], &|&x| u[x], t1, n, 200).unwrap();
    let direct = feynman_kac_estimate(&walk, &[2], &|&x| f[x], t1 + t2, n, 300).unwrap();
    // the restart inherits the error of u through a weight of at most
    // exp(t1 max V)
    let vmax = walk.potential().iter().cloned().fold(0.0, f64::max);
    let carried = (t1 * vmax).exp() * inner.stderr.iter().cloned().fold(0.0, f64::max);
    let combined = (restart.stderr[0].powi(2) + direct.stderr[0].powi(2) + carried.powi(2)).sqrt();
    assert!(
        (restart.estimate[0] - direct.estimate[0]).abs() < 3.0 * combined,
        "{} vs {} (± {combined})",
        restart.estimate[0],
        direct.estimate[0]
    );
}

#[test]
fn green_potentials_are_excessive() {
    let model = chain_model();
    let mu = PotentialMeasure::new(vec![0.0, 0.0, 1.0, 0.5, 0.0, 0.0]).unwrap();
    let g = GreenOperator::new(&model).unwrap();
    let r = green_potential(&g, &mu).unwrap();
    let nu = nu_from_mu(&g, &mu).unwrap();
    let h = |x: &usize| r[*x];
    let probes: Vec<usize> = (0..6).collect();

    // H^ν Rμ = 0: invariant up to noise
    let walk = ChainWalk::new(&model, &nu).unwrap();
    let rep = excessiveness_check(&walk, &probes, &h, 1.0, 20_000, 8).unwrap();
    assert!(rep.excessive(), "{rep:?}");
    for i in 0..6 {
        assert!((rep.ratio[i] - 1.0).abs() < 3.0 * rep.stderr[i]);
    }

    // H^{ν/2} Rμ = μ/(2m) ≥ 0: strictly excessive
    let half = nu.scaled(0.5).unwrap();
    let walk = ChainWalk::new(&model, &half).unwrap();
    let rep = excessiveness_check(&walk, &probes, &h, 1.0, 20_000, 8).unwrap();
    assert!(rep.excessive(), "{rep:?}");
    let exact = semigroup_apply(&model, &half, 1.0, &r).unwrap();
    for i in 0..6 {
        assert!(exact[i] <= r[i]);
        assert!((rep.ratio[i] - exact[i] / r[i]).abs() < 3.0 * rep.stderr[i]);
    }
}

#[test]
fn exploding_weights_are_reported() {
    let model = chain_model();
    let big = PotentialMeasure::new(model.measure().iter().map(|m| 1000.0 * m).collect()).unwrap();
    let walk = ChainWalk::new(&model, &big).unwrap();
    let err = feynman_kac_estimate(&walk, &[0], &|_| 1.0, 1.0, 10, 1).unwrap_err();
    assert!(matches!(err, Error::ExplodingWeights { .. }));
}
