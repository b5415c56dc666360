//! The invariant suite behind `verify`.

use std::time::Instant;

use greedy_kernel::diagnostics::rate_fit;
use greedy_kernel::diagnostics::{certify, factor_bound, gram_diagnostics, INEQUALITY_TOL};
use greedy_kernel::greedy::run_state;
use greedy_kernel::oracle::{
    fgreedy_errors, fp_eval, fp_h1_norm, fp_h2_norm, min_power_linf, optimal_points,
};
use greedy_kernel::{
    gram, Beta, Domain, GreedyConfig, GreedyState, KernelSpec, PointSet, TargetFunction,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::commands::bb_fgreedy;
use crate::config::ExperimentConfig;
use crate::shipped;
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Known not to hold as stated; reported but excluded from the exit status.
    pub known_red: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self {
            name: name.into(),
            passed,
            known_red: false,
            detail,
        }
    }

    /// Whether this check should fail the suite.
    pub fn blocking(&self) -> bool {
        !self.passed && !self.known_red
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Flip the sign of the Newton-basis correction (mutation fixture).
    pub inject_sign_flip: bool,
}

/// Uniform points in `(0,1)^dim`.
pub fn random_points(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> PointSet {
    let coords = (0..n * dim)
        .map(|_| rng.random_range(f64::EPSILON..1.0))
        .collect();
    PointSet::new(dim, coords).expect("finite coordinates")
}

/// Adds every point of `pts` in order and returns the pivots `P_{X_{i-1}}(x_i)`.
pub fn pivots_in_order(
    kernel: &KernelSpec,
    pts: &PointSet,
    flip: bool,
) -> greedy_kernel::Result<Vec<f64>> {
    let zeros = vec![0.0; pts.len()];
    let target = TargetFunction::new(zeros.clone(), zeros, None)?;
    let mut state = GreedyState::new(kernel, pts, pts, &target)?.with_power_tol(0.0);
    if flip {
        state = state.inject_sign_flip();
    }
    for i in 0..pts.len() {
        state.add_point(i)?;
    }
    Ok(state.pivot_power().to_vec())
}

/// Relative deviation `|Π P - sqrt(det A)| / sqrt(det A)` for one point set.
pub fn determinant_deviation(kernel: &KernelSpec, pts: &PointSet, flip: bool) -> Result<f64> {
    let d = gram_diagnostics(&gram(kernel, pts)?)?;
    let pivots = match pivots_in_order(kernel, pts, flip) {
        Ok(p) => p,
        Err(greedy_kernel::Error::NumericalBreakdown { .. }) => return Ok(f64::INFINITY),
        Err(e) => return Err(e.into()),
    };
    let log_prod: f64 = pivots.iter().map(|p| p.ln()).sum();
    Ok(((log_prod - 0.5 * d.log_det).exp() - 1.0).abs())
}

/// `(n, deviation)` over `sets` seeded random sets with `n` uniform in `n_range`.
pub fn determinant_sweep(
    kernel: &KernelSpec,
    seed: u64,
    sets: usize,
    n_range: std::ops::RangeInclusive<usize>,
    flip: bool,
) -> Vec<(usize, Result<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..sets)
        .map(|_| {
            let n = rng.random_range(n_range.clone());
            let pts = random_points(&mut rng, n, kernel.dim());
            (n, determinant_deviation(kernel, &pts, flip))
        })
        .collect()
}

fn kernel_checks(seed: u64) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kernels = [
        KernelSpec::brownian_bridge(),
        KernelSpec::iterated_brownian_bridge(),
        KernelSpec::gaussian(1.0, 3)?,
        KernelSpec::matern(0.5, 0.5, 2)?,
        KernelSpec::matern(1.5, 0.5, 2)?,
        KernelSpec::matern(2.5, 0.5, 2)?,
    ];
    let mut bad = Vec::new();
    for k in &kernels {
        for _ in 0..5 {
            let n = rng.random_range(2..=12);
            let pts = random_points(&mut rng, n, k.dim());
            let a = gram(k, &pts)?;
            let m = a.matrix();
            if m != &m.transpose() || m.clone().cholesky().is_none() {
                bad.push(k.family().name());
            }
        }
    }
    Ok(Check::new(
        "kernel-symmetric-positive-definite",
        bad.is_empty(),
        format!("30 random Gram matrices, failures: {bad:?}"),
    ))
}

fn determinant_check(opts: VerifyOptions) -> Result<Vec<Check>> {
    let kernel = KernelSpec::gaussian(1.0, 3)?;
    let sweep = determinant_sweep(&kernel, opts.seed, 20, 2..=30, opts.inject_sign_flip);
    let mut worst = 0.0f64;
    for (_, r) in &sweep {
        worst = worst.max(*r.as_ref().map_err(Clone::clone)?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5eed);
    let mut uncertainty = f64::NEG_INFINITY;
    for _ in 0..20 {
        let n = rng.random_range(2..=30);
        let pts = random_points(&mut rng, n, 3);
        let d = gram_diagnostics(&gram(&kernel, &pts)?)?;
        uncertainty = uncertainty.max(d.lambda_min - (d.log_det / n as f64).exp());
    }
    Ok(vec![
        Check::new(
            "determinant-identity",
            worst <= 1e-8,
            format!("20 Gaussian sets in (0,1)^3, max relative deviation {worst:.3e}"),
        ),
        Check::new(
            "uncertainty-relation",
            uncertainty <= 1e-12,
            format!("max lambda_min - det^(1/n) = {uncertainty:.3e}"),
        ),
    ])
}

fn dense_check(flip: bool) -> Result<Check> {
    let kernel = KernelSpec::brownian_bridge();
    let cands = Domain::open_unit(1).grid(401)?;
    let eval = Domain::open_unit(1).grid(801)?;
    let f = |x: &[f64]| fp_eval(1.5, x[0]);
    let target = TargetFunction::from_fn(&cands, &eval, f, None)?;
    let mut state = GreedyState::new(&kernel, &cands, &eval, &target)?;
    if flip {
        state = state.inject_sign_flip();
    }
    let config = GreedyConfig::strong(Beta::F_P_GREEDY, 40);
    let (_, state) = greedy_kernel::greedy::drive(state, &config)?;
    let x = cands.subset(state.selected());
    let a = gram(&kernel, &x)?.matrix().clone();
    let fx = nalgebra::DVector::from_iterator(x.len(), x.iter().map(f));
    let alpha = a
        .lu()
        .solve(&fx)
        .unwrap_or_else(|| nalgebra::DVector::from_element(x.len(), f64::NAN));
    let mut worst = 0.0f64;
    for (k, z) in eval.iter().enumerate() {
        let interp: f64 = x
            .iter()
            .zip(alpha.iter())
            .map(|(xi, a)| a * kernel.value(z, xi))
            .sum();
        let dev = (f(z) - interp - state.residual_eval()[k]).abs();
        worst = worst.max(if dev.is_nan() { f64::INFINITY } else { dev });
    }
    Ok(Check::new(
        "newton-matches-dense-solve",
        worst <= 1e-8,
        format!("40 points, max deviation {worst:.3e}"),
    ))
}

fn bb_oracle_check() -> Result<Check> {
    // dyadic-aligned grid: the closed forms hold exactly
    let res = bb_fgreedy(1025, 2049, 127)?;
    let mut worst = 0.0f64;
    for n in 1..=127u64 {
        let (l, h) = fgreedy_errors(n)?;
        let s = res.snapshot(n as usize - 1);
        worst = worst.max(((s.linf_residual - l) / l).abs());
        worst = worst.max(((s.native_residual.unwrap_or(f64::NAN) - h) / h).abs());
    }
    let worst = if worst.is_nan() { f64::INFINITY } else { worst };
    Ok(Check::new(
        "bb-closed-form-errors",
        worst <= 1e-6,
        format!("127 points on j/1024, max relative deviation {worst:.3e}"),
    ))
}

fn run_checks() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let mut worst: Option<(String, String, f64)> = None;
    let mut all_passed = true;
    let mut monotone = true;
    let mut exact_nodes = true;
    for (name, src) in shipped::BB_RUNS {
        let mut cfg = ExperimentConfig::parse(src)?;
        cfg.grids.candidates = 1001;
        cfg.grids.evals = 2001;
        let exp = cfg.build()?;
        let (res, state) = run_state(
            &exp.kernel,
            &exp.candidates,
            &exp.eval_grid,
            &exp.target,
            &exp.greedy,
        )?;
        for r in certify(&res, &exp.greedy) {
            all_passed &= r.passed;
            if worst.as_ref().is_none_or(|w| r.max_violation > w.2) {
                worst = Some((name.to_string(), r.name.clone(), r.max_violation));
            }
        }
        monotone &= (1..=res.len())
            .all(|n| res.snapshot(n).max_power <= res.snapshot(n - 1).max_power + 1e-15);
        exact_nodes &= state
            .selected()
            .iter()
            .all(|&i| state.residual()[i] == 0.0 && state.power2()[i] == 0.0);
        exact_nodes &= res.clamp_violations == 0 && !res.native_deficit;
    }
    let (wn, wc, wv) = worst.unwrap_or_default();
    out.push(Check::new(
        "run-certificates",
        all_passed,
        format!("10 shipped runs, largest violation {wv:.3e} ({wc} in {wn}), tolerance {INEQUALITY_TOL:e}"),
    ));
    out.push(Check::new(
        "power-nonincreasing",
        monotone,
        "max power over the eval grid, 10 runs".into(),
    ));
    out.push(Check::new(
        "interpolation-at-nodes",
        exact_nodes,
        "residual and power vanish at selected points".into(),
    ));
    Ok(out)
}

fn factor_check() -> Check {
    let start = Instant::now();
    let mut margin = f64::INFINITY;
    let mut limit = (f64::INFINITY, f64::NEG_INFINITY);
    for n in 1..=10_000usize {
        let v = factor_bound(n);
        let root = (n as f64).sqrt();
        margin = margin.min(5f64.sqrt() * root - v);
        if n >= 1000 {
            limit = (limit.0.min(v / root), limit.1.max(v / root));
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let cap = (2.0 * std::f64::consts::PI / std::f64::consts::E).sqrt() + 0.01;
    Check::new(
        "factor-bound",
        margin >= 0.0 && limit.1 < cap && elapsed < 1.0,
        format!(
            "min margin {margin:.4}, ratio in [{:.5}, {:.5}] for n >= 1000, {elapsed:.3} s",
            limit.0, limit.1
        ),
    )
}

fn membership_check() -> Check {
    let ok = fp_h1_norm(0.5).is_err()
        && fp_h2_norm(1.5).is_err()
        && fp_h1_norm(0.51).is_ok()
        && fp_h2_norm(1.51).is_ok();
    Check::new(
        "fp-membership-domain",
        ok,
        "p <= 1/2 (k1) and p <= 3/2 (k2) rejected".into(),
    )
}

fn simpson(a: f64, b: f64, panels: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = (b - a) / panels as f64;
    let mut s = f(a) + f(b);
    for k in 1..panels {
        s += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

fn quadrature_checks(seed: u64) -> Result<Vec<Check>> {
    let k1 = KernelSpec::brownian_bridge();
    let k2 = KernelSpec::iterated_brownian_bridge();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let (x, y): (f64, f64) = (rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
        // the integrand has kinks at x and y: integrate piecewise
        let mut cuts = [0.0, x.min(y), x.max(y), 1.0];
        cuts.sort_by(f64::total_cmp);
        let conv: f64 = cuts
            .windows(2)
            .map(|w| {
                simpson(w[0], w[1], 200, |z| {
                    k1.value(&[x], &[z]) * k1.value(&[z], &[y])
                })
            })
            .sum();
        worst = worst.max((conv - k2.value(&[x], &[y])).abs());
    }
    // ∫ f_p'^2 with q = x(1-x): f_p' = 4^p p q^{p-1} (1-2x); smooth for p >= 1
    let mut norm_dev = 0.0f64;
    for p in [1.0, 2.0, 3.0] {
        let e = 16f64.powf(p)
            * p
            * p
            * simpson(0.0, 1.0, 20_000, |x| {
                (x * (1.0 - x)).powf(2.0 * p - 2.0) * (1.0 - 2.0 * x).powi(2)
            });
        norm_dev = norm_dev.max((e.sqrt() / fp_h1_norm(p)? - 1.0).abs());
    }
    for p in [2.0, 4.0] {
        let e = 16f64.powf(p)
            * p
            * p
            * simpson(0.0, 1.0, 20_000, |x| {
                let q = x * (1.0 - x);
                (q.powf(p - 2.0) * ((p - 1.0) * (1.0 - 2.0 * x).powi(2) - 2.0 * q)).powi(2)
            });
        norm_dev = norm_dev.max((e.sqrt() / fp_h2_norm(p)? - 1.0).abs());
    }
    Ok(vec![
        Check::new(
            "iterated-bridge-convolution",
            worst <= 1e-6,
            format!("20 random pairs, max deviation {worst:.3e}"),
        ),
        Check::new(
            "fp-norm-quadrature",
            norm_dev <= 1e-7,
            format!("p in 1, 2, 3 (H1) and 2, 4 (H2), max rel {norm_dev:.3e}"),
        ),
    ])
}

/// Pointwise error bound and orthogonal decomposition along one run, every step.
fn stepwise_checks() -> Result<Vec<Check>> {
    let kernel = KernelSpec::brownian_bridge();
    let cands = Domain::open_unit(1).grid(1001)?;
    let eval = Domain::open_unit(1).grid(2001)?;
    let norm = fp_h1_norm(1.5)?;
    let target = TargetFunction::from_fn(&cands, &eval, |x| fp_eval(1.5, x[0]), Some(norm))?;
    let mut state = GreedyState::new(&kernel, &cands, &eval, &target)?;
    let config = GreedyConfig::strong(Beta::F_GREEDY, 80);
    let (mut bound, mut decomposition, mut monotone) =
        (f64::NEG_INFINITY, 0.0f64, f64::NEG_INFINITY);
    for n in 0..config.max_points {
        let sel = greedy_kernel::greedy::select(&state, &config, n)?;
        let before = state.power2_eval().to_vec();
        state.add_point(sel.index)?;
        for (k, r) in state.residual_eval().iter().enumerate() {
            bound = bound.max(r.abs() - state.power2_eval()[k].sqrt() * norm);
            monotone = monotone.max(state.power2_eval()[k] - before[k]);
        }
        if (n + 1) % 20 == 0 {
            // ‖I f‖² from a dense solve; the native residual is ‖f‖² minus it
            let x = cands.subset(state.selected());
            let a = gram(&kernel, &x)?.matrix().clone();
            let fx =
                nalgebra::DVector::from_iterator(x.len(), x.iter().map(|z| fp_eval(1.5, z[0])));
            let alpha = a
                .clone()
                .lu()
                .solve(&fx)
                .unwrap_or_else(|| fx.map(|_| f64::NAN));
            let dense = alpha.dot(&(&a * &alpha));
            let d = ((state.interp_norm2() - dense) / (norm * norm)).abs();
            decomposition = decomposition.max(if d.is_nan() { f64::INFINITY } else { d });
        }
    }
    Ok(vec![
        Check::new(
            "pointwise-error-bound",
            bound <= 1e-9,
            format!("80 steps on 2001 eval points, max |r| - P ‖f‖ = {bound:.3e}"),
        ),
        Check::new(
            "power-pointwise-monotone",
            monotone <= 1e-12,
            format!("max increase of P^2 {monotone:.3e}"),
        ),
        Check::new(
            "orthogonal-decomposition",
            decomposition <= 1e-10,
            format!("Σc² against a dense solve every 20 steps, max rel {decomposition:.3e}"),
        ),
    ])
}

fn p_greedy_checks() -> Result<Vec<Check>> {
    let kernel = KernelSpec::brownian_bridge();
    let cands = Domain::open_unit(1).grid(2001)?;
    let eval = Domain::open_unit(1).grid(4001)?;
    let config = GreedyConfig::strong(Beta::P_GREEDY, 100);
    let a = TargetFunction::from_fn(&cands, &eval, |x| x[0] * (1.0 - x[0]), None)?;
    let b = TargetFunction::from_fn(&cands, &eval, |x| (9.0 * x[0]).sin(), None)?;
    let ra = greedy_kernel::run(&kernel, &cands, &eval, &a, &config)?;
    let rb = greedy_kernel::run(&kernel, &cands, &eval, &b, &config)?;
    let lower = (1..=ra.len())
        .map(|n| ra.snapshot(n).max_power / min_power_linf(n))
        .fold(f64::INFINITY, f64::min);
    Ok(vec![
        Check::new(
            "p-greedy-target-independent",
            ra.selected() == rb.selected(),
            "100 points, two targets".into(),
        ),
        Check::new(
            "power-lower-bound",
            lower >= 0.9,
            format!("min ‖P‖∞ / ((n+1)^(-1/2)/2) = {lower:.4} for n <= 100"),
        ),
    ])
}

fn eigen_scaling_check() -> Result<Check> {
    let kernel = KernelSpec::brownian_bridge();
    let ns: Vec<usize> = (8..=60).collect();
    let mut roots = Vec::with_capacity(ns.len());
    for &n in &ns {
        let d = gram_diagnostics(&gram(&kernel, &optimal_points(n))?)?;
        roots.push((d.log_det / n as f64).exp());
    }
    let fit = rate_fit(&ns, &roots, (8, 60))?;
    let mut c = Check::new(
        "quasi-uniform-eigen-scaling",
        (fit.slope + 1.0).abs() <= 0.1,
        format!("det(A)^(1/n) slope {:.4} over [8, 60]; exact value (n+1)^(-(n+1)/n) reaches -1 only as n -> inf", fit.slope),
    );
    c.known_red = true;
    Ok(c)
}

/// Runs the whole suite.
pub fn run_verify(opts: VerifyOptions) -> Result<Vec<Check>> {
    let mut checks = vec![kernel_checks(opts.seed)?];
    checks.extend(determinant_check(opts)?);
    checks.push(dense_check(opts.inject_sign_flip)?);
    checks.push(bb_oracle_check()?);
    checks.extend(run_checks()?);
    checks.extend(stepwise_checks()?);
    checks.extend(p_greedy_checks()?);
    checks.extend(quadrature_checks(opts.seed)?);
    checks.push(factor_check());
    checks.push(membership_check());
    checks.push(eigen_scaling_check()?);
    Ok(checks)
}

pub fn print_table(checks: &[Check]) {
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    for c in checks {
        let status = match (c.passed, c.known_red) {
            (true, _) => "PASS",
            (false, true) => "KNOWN-RED",
            (false, false) => "FAIL",
        };
        println!("{status:9}  {:width$}  {}", c.name, c.detail);
    }
}
