//! The `run`, `reproduce-bb` and `reproduce-fp` subcommands.

use std::path::{Path, PathBuf};

use greedy_kernel::diagnostics::{
    certify, gram_reports, rate_fit, standard_window, InequalityReport, RateFit,
};
use greedy_kernel::greedy::{run_state, ErrorSnapshot};
use greedy_kernel::oracle::{
    fgreedy_errors, fp_eval, fp_h1_norm, fp_h2_norm, optimal_errors, ratio_bounds,
};
use greedy_kernel::{
    gram, Beta, Domain, GreedyConfig, KernelSpec, RunResult, StopReason, TargetFunction,
};
use serde::Serialize;

use crate::config::{Experiment, ExperimentConfig};
use crate::output::{ensure_dir, num, opt_num, write_csv, write_json};
use crate::{HarnessError, Result};

/// Command-line overrides of config values.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub candidates: Option<usize>,
    pub evals: Option<usize>,
    pub max_points: Option<usize>,
    pub seed: Option<u64>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ExperimentConfig) {
        if let Some(o) = &self.out {
            cfg.output.dir = o.clone();
        }
        if let Some(c) = self.candidates {
            cfg.grids.candidates = c;
        }
        if let Some(e) = self.evals {
            cfg.grids.evals = e;
        }
        if let Some(m) = self.max_points {
            cfg.greedy.max_points = m;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
    }
}

/// A rate fit of one emitted series; `fit` is absent when the series is too
/// short or hits zero inside the window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedFit {
    pub series: String,
    pub fit: Option<RateFit>,
    pub note: Option<String>,
}

pub fn named_fit(series: &str, ns: &[usize], values: &[f64]) -> NamedFit {
    let window = standard_window(ns.iter().copied().max().unwrap_or(0));
    match rate_fit(ns, values, window) {
        Ok(f) => NamedFit {
            series: series.into(),
            fit: Some(f),
            note: None,
        },
        Err(e) => NamedFit {
            series: series.into(),
            fit: None,
            note: Some(e.to_string()),
        },
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub kernel: KernelSpec,
    pub seed: u64,
    pub candidates: usize,
    pub evals: usize,
    pub points: usize,
    pub stop_reason: StopReason,
    pub native_norm: Option<f64>,
    pub clamp_violations: usize,
    pub native_deficit: bool,
    pub inequalities: Vec<InequalityReport>,
    pub gram: Vec<InequalityReport>,
    pub rate_fits: Vec<NamedFit>,
}

impl RunReport {
    pub fn failures(&self) -> impl Iterator<Item = &InequalityReport> {
        self.inequalities
            .iter()
            .chain(&self.gram)
            .filter(|r| !r.passed)
    }
}

/// Runs one experiment and assembles its report.
pub fn execute(exp: &Experiment, seed: u64) -> Result<(RunResult, RunReport)> {
    let (res, state) = run_state(
        &exp.kernel,
        &exp.candidates,
        &exp.eval_grid,
        &exp.target,
        &exp.greedy,
    )?;
    let inequalities = certify(&res, &exp.greedy);
    let selected = exp.candidates.subset(state.selected());
    let gram = if selected.is_empty() {
        Vec::new()
    } else {
        gram_reports(&gram(&exp.kernel, &selected)?, state.pivot_power(), 1e-8)
    };
    let ns: Vec<usize> = (1..=res.len()).collect();
    let series = |f: fn(&ErrorSnapshot) -> Option<f64>| -> Vec<f64> {
        ns.iter()
            .map(|&n| f(res.snapshot(n)).unwrap_or(f64::NAN))
            .collect()
    };
    let mut rate_fits = vec![
        named_fit("linf_residual", &ns, &series(|s| Some(s.linf_residual))),
        named_fit("max_power", &ns, &series(|s| Some(s.max_power))),
    ];
    if res.native_norm.is_some() {
        rate_fits.push(named_fit(
            "native_residual",
            &ns,
            &series(|s| s.native_residual),
        ));
    }
    let report = RunReport {
        kernel: exp.kernel.clone(),
        seed,
        candidates: exp.candidates.len(),
        evals: exp.eval_grid.len(),
        points: res.len(),
        stop_reason: res.stop_reason,
        native_norm: res.native_norm,
        clamp_violations: res.clamp_violations,
        native_deficit: res.native_deficit,
        inequalities,
        gram,
        rate_fits,
    };
    Ok((res, report))
}

pub fn records_header(dim: usize) -> Vec<String> {
    let mut h = vec!["n".to_string()];
    if dim == 1 {
        h.push("x".into());
    } else {
        h.extend((1..=dim).map(|k| format!("x{k}")));
    }
    for c in [
        "eta",
        "linf_residual",
        "max_power",
        "native_residual",
        "interp_norm",
        "stop_reason",
    ] {
        h.push(c.into());
    }
    h
}

pub fn records_rows(res: &RunResult) -> Vec<Vec<String>> {
    res.records
        .iter()
        .map(|r| {
            let mut row = vec![r.n.to_string()];
            row.extend(r.point.iter().map(|&v| num(v)));
            row.extend([
                num(r.eta_value),
                num(r.errors.linf_residual),
                num(r.errors.max_power),
                opt_num(r.errors.native_residual),
                num(r.errors.interp_norm),
                r.stop_reason
                    .map(|s| s.as_str().to_string())
                    .unwrap_or_default(),
            ]);
            row
        })
        .collect()
}

/// `run <config>`: writes `records.csv` and `reports.json`.
pub fn cmd_run(config_path: &Path, overrides: &Overrides) -> Result<RunReport> {
    let mut cfg = ExperimentConfig::load(config_path)?;
    overrides.apply(&mut cfg);
    for w in cfg.warnings() {
        eprintln!("warning: {w}");
    }
    let exp = cfg.build()?;
    let (res, report) = execute(&exp, cfg.seed)?;
    let dir = &cfg.output.dir;
    ensure_dir(dir)?;
    write_csv(
        &dir.join("records.csv"),
        &records_header(exp.kernel.dim()),
        &records_rows(&res),
    )?;
    write_json(&dir.join("reports.json"), &report)?;
    Ok(report)
}

/// f-greedy (β = 1) on `x(1-x)` with the Brownian bridge kernel in `(0,1)`.
pub fn bb_fgreedy(candidates: usize, evals: usize, max_points: usize) -> Result<RunResult> {
    let domain = Domain::open_unit(1);
    let cands = domain.grid(candidates)?;
    let eval = domain.grid(evals)?;
    let kernel = KernelSpec::brownian_bridge();
    let norm = fp_h1_norm(1.0)? / 4.0;
    let target = TargetFunction::from_fn(&cands, &eval, |x| x[0] * (1.0 - x[0]), Some(norm))?;
    Ok(greedy_kernel::run(
        &kernel,
        &cands,
        &eval,
        &target,
        &GreedyConfig::strong(Beta::F_GREEDY, max_points),
    )?)
}

#[derive(Debug, Clone, Serialize)]
pub struct FigureFits {
    pub fits: Vec<NamedFit>,
}

pub const FIG2_HEADER: [&str; 11] = [
    "n",
    "greedy_linf",
    "greedy_native",
    "greedy_ratio",
    "greedy_linf_exact",
    "greedy_native_exact",
    "optimal_linf",
    "optimal_native",
    "optimal_ratio",
    "ratio_lower",
    "ratio_upper",
];

/// `reproduce-bb`: measured f-greedy errors of `r_n` next to the closed forms
/// and the equally spaced optimum, for `n = 1..=max_points`.
pub fn cmd_reproduce_bb(
    out: &Path,
    candidates: usize,
    evals: usize,
    max_points: usize,
) -> Result<FigureFits> {
    let res = bb_fgreedy(candidates, evals, max_points)?;
    let mut rows = Vec::new();
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); 6];
    let ns: Vec<usize> = (1..=res.len()).collect();
    for &n in &ns {
        let s = res.snapshot(n);
        let native = s.native_residual.unwrap_or(f64::NAN);
        let (gl, gh) = fgreedy_errors(n as u64 + 1)?;
        let (ol, oh) = optimal_errors(n);
        let (lo, hi) = ratio_bounds(n)?;
        let vals = [
            s.linf_residual,
            native,
            s.linf_residual / native,
            gl,
            gh,
            ol,
            oh,
            ol / oh,
            lo,
            hi,
        ];
        for (c, v) in cols
            .iter_mut()
            .zip([vals[0], vals[1], vals[2], vals[5], vals[6], vals[7]])
        {
            c.push(v);
        }
        let mut row = vec![n.to_string()];
        row.extend(vals.iter().map(|&v| num(v)));
        rows.push(row);
    }
    ensure_dir(out)?;
    let header: Vec<String> = FIG2_HEADER.iter().map(|s| s.to_string()).collect();
    write_csv(&out.join("fig2_bb.csv"), &header, &rows)?;
    let names = [
        "greedy_linf",
        "greedy_native",
        "greedy_ratio",
        "optimal_linf",
        "optimal_native",
        "optimal_ratio",
    ];
    let fits = FigureFits {
        fits: names
            .iter()
            .zip(&cols)
            .map(|(name, c)| named_fit(name, &ns, c))
            .collect(),
    };
    write_json(&out.join("fig2_bb_fits.json"), &fits)?;
    Ok(fits)
}

pub const FP_HEADER: [&str; 8] = [
    "p",
    "n",
    "x",
    "linf_residual",
    "native_residual",
    "ratio",
    "linf_residual_candidates",
    "ratio_candidates",
];

pub const DENSITY_HEADER: [&str; 5] = ["p", "bin_lower", "bin_upper", "count", "density"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FpKernel {
    K1,
    K2,
}

impl FpKernel {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "k1" => Ok(Self::K1),
            "k2" => Ok(Self::K2),
            _ => Err(HarnessError::Config(format!(
                "kernel must be k1 or k2, got {s:?}"
            ))),
        }
    }

    pub fn spec(self) -> KernelSpec {
        match self {
            Self::K1 => KernelSpec::brownian_bridge(),
            Self::K2 => KernelSpec::iterated_brownian_bridge(),
        }
    }

    pub fn native_norm(self, p: f64) -> Result<f64> {
        Ok(match self {
            Self::K1 => fp_h1_norm(p)?,
            Self::K2 => fp_h2_norm(p)?,
        })
    }

    pub fn default_ps(self) -> Vec<f64> {
        match self {
            Self::K1 => vec![0.51, 3.0],
            Self::K2 => vec![1.51, 4.0],
        }
    }

    pub fn stem(self) -> &'static str {
        match self {
            Self::K1 => "fig3_k1",
            Self::K2 => "fig4_k2",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FpSeries {
    pub p: f64,
    pub stop_reason: StopReason,
    #[serde(skip)]
    pub points: Vec<f64>,
    #[serde(skip)]
    pub linf: Vec<f64>,
    #[serde(skip)]
    pub native: Vec<f64>,
    /// Sup over the candidate grid, the discrete domain of the selection.
    #[serde(skip)]
    pub linf_candidates: Vec<f64>,
    pub fits: Vec<NamedFit>,
}

impl FpSeries {
    pub fn fit(&self, series: &str) -> Option<&RateFit> {
        self.fits
            .iter()
            .find(|f| f.series == series)
            .and_then(|f| f.fit.as_ref())
    }
}

/// f-greedy on `f_p` with the bridge (`k1`) or iterated bridge (`k2`) kernel.
pub fn fp_series(
    kernel: FpKernel,
    p: f64,
    candidates: usize,
    evals: usize,
    max_points: usize,
) -> Result<FpSeries> {
    let norm = kernel.native_norm(p)?;
    let spec = kernel.spec();
    let domain = Domain::open_unit(1);
    let cands = domain.grid(candidates)?;
    let eval = domain.grid(evals)?;
    let target = TargetFunction::from_fn(&cands, &eval, |x| fp_eval(p, x[0]), Some(norm))?;
    let mut config = GreedyConfig::strong(Beta::F_GREEDY, max_points);
    // adjacent grid nodes are too close: the grid cannot resolve further
    config.min_separation = 1.5 / (candidates - 1) as f64;
    let res = greedy_kernel::run(&spec, &cands, &eval, &target, &config)?;
    let ns: Vec<usize> = (1..=res.len()).collect();
    let linf: Vec<f64> = ns.iter().map(|&n| res.snapshot(n).linf_residual).collect();
    let native: Vec<f64> = ns
        .iter()
        .map(|&n| res.snapshot(n).native_residual.unwrap_or(f64::NAN))
        .collect();
    let linf_candidates: Vec<f64> = ns
        .iter()
        .map(|&n| res.snapshot(n).linf_residual_candidates)
        .collect();
    let ratio: Vec<f64> = linf.iter().zip(&native).map(|(l, h)| l / h).collect();
    let ratio_candidates: Vec<f64> = linf_candidates
        .iter()
        .zip(&native)
        .map(|(l, h)| l / h)
        .collect();
    let fits = vec![
        named_fit("linf_residual", &ns, &linf),
        named_fit("native_residual", &ns, &native),
        named_fit("ratio", &ns, &ratio),
        named_fit("linf_residual_candidates", &ns, &linf_candidates),
        named_fit("ratio_candidates", &ns, &ratio_candidates),
    ];
    Ok(FpSeries {
        p,
        stop_reason: res.stop_reason,
        points: res.records.iter().map(|r| r.point[0]).collect(),
        linf,
        native,
        linf_candidates,
        fits,
    })
}

/// Counts of `points` in `bins` equal subintervals of `(0,1)`.
pub fn histogram(points: &[f64], bins: usize) -> Vec<usize> {
    let mut counts = vec![0; bins];
    for &x in points {
        let b = ((x * bins as f64) as usize).min(bins - 1);
        counts[b] += 1;
    }
    counts
}

/// `reproduce-fp`: error series, ratios, fits and point density per `p`.
pub fn cmd_reproduce_fp(
    out: &Path,
    kernel: FpKernel,
    ps: &[f64],
    candidates: usize,
    evals: usize,
    max_points: usize,
    bins: usize,
) -> Result<Vec<FpSeries>> {
    if bins == 0 {
        return Err(HarnessError::Config("bins must be >= 1".into()));
    }
    for &p in ps {
        kernel.native_norm(p)?;
    }
    let all: Vec<FpSeries> = ps
        .iter()
        .map(|&p| fp_series(kernel, p, candidates, evals, max_points))
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    let mut density = Vec::new();
    for s in &all {
        for (k, x) in s.points.iter().enumerate() {
            rows.push(vec![
                num(s.p),
                (k + 1).to_string(),
                num(*x),
                num(s.linf[k]),
                num(s.native[k]),
                num(s.linf[k] / s.native[k]),
                num(s.linf_candidates[k]),
                num(s.linf_candidates[k] / s.native[k]),
            ]);
        }
        let counts = histogram(&s.points, bins);
        let width = 1.0 / bins as f64;
        for (b, &c) in counts.iter().enumerate() {
            let d = c as f64 / (s.points.len().max(1) as f64 * width);
            density.push(vec![
                num(s.p),
                num(b as f64 * width),
                num((b + 1) as f64 * width),
                c.to_string(),
                num(d),
            ]);
        }
    }
    ensure_dir(out)?;
    let stem = kernel.stem();
    let header = FP_HEADER.map(String::from);
    write_csv(&out.join(format!("{stem}.csv")), &header, &rows)?;
    let header = DENSITY_HEADER.map(String::from);
    write_csv(&out.join(format!("{stem}_density.csv")), &header, &density)?;
    write_json(&out.join(format!("{stem}_fits.json")), &all)?;
    Ok(all)
}
