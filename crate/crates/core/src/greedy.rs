//! The β-greedy selection rule, its weak variants, and the run loop.
//!
//! With `r_n = f - I_{X_n} f` the criterion is
//! `η_β(x) = |r_n(x)|^β P_{X_n}(x)^{1-β}` for finite β and `|r_n(x)| / P_{X_n}(x)`
//! for β = ∞. A weak selection accepts any candidate with
//! `η_β(x) >= γ_n max_z η_β(z)`, the maximum being taken over the candidate
//! grid (the discrete stand-in for the supremum over the domain).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::domain::{sq_dist, PointSet};
use crate::error::{Error, Result};
use crate::interp::{GreedyState, TargetFunction, DEFAULT_POWER_TOL};
use crate::kernel::KernelSpec;

/// Exponent of the selection rule, `β ∈ [0, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Beta {
    Finite(f64),
    Infinity,
}

impl Beta {
    pub const P_GREEDY: Beta = Beta::Finite(0.0);
    pub const F_P_GREEDY: Beta = Beta::Finite(0.5);
    pub const F_GREEDY: Beta = Beta::Finite(1.0);
    pub const F_OVER_P_GREEDY: Beta = Beta::Infinity;

    pub fn new(beta: f64) -> Result<Self> {
        if beta == f64::INFINITY {
            Ok(Beta::Infinity)
        } else if beta.is_finite() && beta >= 0.0 {
            Ok(Beta::Finite(beta))
        } else {
            Err(Error::Config(format!(
                "beta must lie in [0, inf], got {beta}"
            )))
        }
    }

    /// `min(β, 1)`.
    pub fn min_one(self) -> f64 {
        match self {
            Beta::Finite(b) => b.min(1.0),
            Beta::Infinity => 1.0,
        }
    }

    /// `1 / max(β, 1)`, zero for β = ∞.
    pub fn inv_max_one(self) -> f64 {
        match self {
            Beta::Finite(b) => 1.0 / b.max(1.0),
            Beta::Infinity => 0.0,
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Beta::Finite(b) => b,
            Beta::Infinity => f64::INFINITY,
        }
    }
}

impl fmt::Display for Beta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Beta::Finite(b) => write!(f, "{b}"),
            Beta::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Beta {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Beta::Infinity),
            other => other
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("cannot parse beta `{other}`")))
                .and_then(Beta::new),
        }
    }
}

/// Weakness parameter as a function of the current number of points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GammaSchedule {
    Constant(f64),
    /// `γ_n = min(1, c n^{-p})`, with `n` clamped to at least one.
    PowerDecay {
        c: f64,
        p: f64,
    },
}

impl GammaSchedule {
    pub fn validate(&self) -> Result<()> {
        match *self {
            GammaSchedule::Constant(g) if g > 0.0 && g <= 1.0 => Ok(()),
            GammaSchedule::Constant(g) => Err(Error::Config(format!(
                "constant gamma must lie in (0, 1], got {g}"
            ))),
            GammaSchedule::PowerDecay { c, p }
                if c > 0.0 && c.is_finite() && p >= 0.0 && p.is_finite() =>
            {
                Ok(())
            }
            GammaSchedule::PowerDecay { c, p } => Err(Error::Config(format!(
                "power-decay gamma needs c > 0 and p >= 0, got c = {c}, p = {p}"
            ))),
        }
    }

    /// γ used to pick `x_{n+1}` from a set of `n` points.
    pub fn gamma(&self, n: usize) -> f64 {
        match *self {
            GammaSchedule::Constant(g) => g,
            GammaSchedule::PowerDecay { c, p } => (c * (n.max(1) as f64).powf(-p)).min(1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeakPolicy {
    /// Argmax of η, lowest index on ties.
    Maximizer,
    /// Lowest index with `η >= γ_n max η`.
    FirstAboveThreshold,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreedyConfig {
    pub beta: Beta,
    pub gamma: GammaSchedule,
    pub policy: WeakPolicy,
    pub max_points: usize,
    pub power_tol: f64,
    /// Stop once the next point would lie within this distance of a selected
    /// one (0 disables the rule).
    #[serde(default)]
    pub min_separation: f64,
}

impl GreedyConfig {
    /// Strong algorithm (`γ = 1`, maximizer) for a given β.
    pub fn strong(beta: Beta, max_points: usize) -> Self {
        Self {
            beta,
            gamma: GammaSchedule::Constant(1.0),
            policy: WeakPolicy::Maximizer,
            max_points,
            power_tol: DEFAULT_POWER_TOL,
            min_separation: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Beta::Finite(b) = self.beta {
            if !(b.is_finite() && b >= 0.0) {
                return Err(Error::Config(format!("beta must be >= 0, got {b}")));
            }
        }
        if !(self.power_tol.is_finite() && self.power_tol > 0.0) {
            return Err(Error::Config(format!(
                "power_tol must be positive, got {}",
                self.power_tol
            )));
        }
        if !(self.min_separation.is_finite() && self.min_separation >= 0.0) {
            return Err(Error::Config(format!(
                "min_separation must be >= 0, got {}",
                self.min_separation
            )));
        }
        self.gamma.validate()
    }
}

/// Elementwise selection criterion.
///
/// Zero-power entries are mapped to `-∞` when β > 1 (the ratio is 0/0
/// there); for β = 0 the residual is ignored entirely.
pub fn criterion(beta: Beta, residual: &[f64], power2: &[f64]) -> Vec<f64> {
    residual
        .iter()
        .zip(power2)
        .map(|(&r, &p2)| eta(beta, r, p2))
        .collect()
}

#[inline]
fn eta(beta: Beta, r: f64, p2: f64) -> f64 {
    let p = p2.max(0.0).sqrt();
    match beta {
        Beta::Finite(0.0) => p,
        Beta::Finite(1.0) => r.abs(),
        Beta::Finite(0.5) => (r.abs() * p).sqrt(),
        Beta::Finite(b) if b < 1.0 => r.abs().powf(b) * p.powf(1.0 - b),
        Beta::Finite(b) => {
            if p == 0.0 {
                f64::NEG_INFINITY
            } else {
                r.abs().powf(b) / p.powf(b - 1.0)
            }
        }
        Beta::Infinity => {
            if p == 0.0 {
                f64::NEG_INFINITY
            } else {
                r.abs() / p
            }
        }
    }
}

/// Outcome of one selection step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub index: usize,
    /// Criterion at the chosen candidate.
    pub eta: f64,
    /// Largest criterion over admissible candidates.
    pub eta_max: f64,
    pub gamma: f64,
}

/// Picks the next candidate for the state holding `n` points.
///
/// Admissible candidates are unselected with squared power above
/// `config.power_tol`.
pub fn select(state: &GreedyState<'_>, config: &GreedyConfig, n: usize) -> Result<Selection> {
    let power2 = state.power2();
    let residual = state.residual();
    let admissible = |i: usize| !state.is_selected(i) && power2[i] > config.power_tol;

    let mut best: Option<(usize, f64)> = None;
    for i in (0..power2.len()).filter(|&i| admissible(i)) {
        let e = eta(config.beta, residual[i], power2[i]);
        if best.is_none_or(|(_, m)| e > m) {
            best = Some((i, e));
        }
    }
    let (argmax, eta_max) = best.ok_or(Error::Exhausted)?;
    let gamma = config.gamma.gamma(n);
    let (index, chosen) = match config.policy {
        WeakPolicy::Maximizer => (argmax, eta_max),
        WeakPolicy::FirstAboveThreshold => {
            let threshold = gamma * eta_max;
            (0..power2.len())
                .filter(|&i| admissible(i))
                .map(|i| (i, eta(config.beta, residual[i], power2[i])))
                .find(|&(_, e)| e >= threshold)
                .unwrap_or((argmax, eta_max))
        }
    };
    Ok(Selection {
        index,
        eta: chosen,
        eta_max,
        gamma,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    MaxPoints,
    /// Every candidate has been selected.
    Exhausted,
    /// All unselected candidates have squared power below the tolerance.
    PowerBreakdown,
    /// The next point was closer than `min_separation` to a selected one.
    Resolution,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::MaxPoints => "max-points",
            StopReason::Exhausted => "exhausted",
            StopReason::PowerBreakdown => "power-breakdown",
            StopReason::Resolution => "resolution",
        }
    }
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Error quantities of the interpolant on a given point set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorSnapshot {
    /// `‖r_n‖_∞` over the evaluation grid.
    pub linf_residual: f64,
    /// `‖P_{X_n}‖_∞` over the evaluation grid.
    pub max_power: f64,
    /// `‖r_n‖_∞` over the candidate grid.
    pub linf_residual_candidates: f64,
    /// `‖P_{X_n}‖_∞` over the candidate grid.
    pub max_power_candidates: f64,
    pub native_residual: Option<f64>,
    pub interp_norm: f64,
}

impl ErrorSnapshot {
    pub fn of(state: &GreedyState<'_>) -> Self {
        let (linf_residual, max_power) = state.sup_errors();
        let (linf_residual_candidates, max_power_candidates) = state.sup_errors_candidates();
        Self {
            linf_residual,
            max_power,
            linf_residual_candidates,
            max_power_candidates,
            native_residual: state.residual_native_norm(),
            interp_norm: state.interpolant_norm(),
        }
    }
}

/// Per-iteration record; `n` counts the points selected so far.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub n: usize,
    pub index: usize,
    pub point: Vec<f64>,
    pub eta_value: f64,
    pub eta_max: f64,
    pub gamma: f64,
    /// `r_{n-1}(x_n)`.
    pub pivot_residual: f64,
    /// `P_{X_{n-1}}(x_n)`.
    pub pivot_power: f64,
    #[serde(flatten)]
    pub errors: ErrorSnapshot,
    pub stop_reason: Option<StopReason>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    /// Errors of the empty interpolant `r_0 = f`.
    pub initial: ErrorSnapshot,
    pub records: Vec<ErrorRecord>,
    pub stop_reason: StopReason,
    pub native_norm: Option<f64>,
    /// Squared-power values clamped from below `-1e-12`.
    pub clamp_violations: usize,
    /// Set when `‖f‖² - ‖I f‖²` went negative beyond round-off.
    pub native_deficit: bool,
}

impl RunResult {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Errors after `n` points, `n = 0..=len()`.
    pub fn snapshot(&self, n: usize) -> &ErrorSnapshot {
        if n == 0 {
            &self.initial
        } else {
            &self.records[n - 1].errors
        }
    }

    pub fn selected(&self) -> Vec<usize> {
        self.records.iter().map(|r| r.index).collect()
    }
}

/// Runs the greedy loop and returns the final state along with the records.
pub fn run_state<'a>(
    kernel: &'a KernelSpec,
    candidates: &'a PointSet,
    eval_grid: &'a PointSet,
    target: &TargetFunction,
    config: &GreedyConfig,
) -> Result<(RunResult, GreedyState<'a>)> {
    config.validate()?;
    if candidates.is_empty() || eval_grid.is_empty() {
        return Err(Error::InvalidInput(
            "candidate and evaluation grids must be nonempty".into(),
        ));
    }
    let state =
        GreedyState::new(kernel, candidates, eval_grid, target)?.with_power_tol(config.power_tol);
    drive(state, config)
}

/// Drives an already initialized state (possibly with a fault injected).
pub fn drive<'a>(
    mut state: GreedyState<'a>,
    config: &GreedyConfig,
) -> Result<(RunResult, GreedyState<'a>)> {
    let initial = ErrorSnapshot::of(&state);
    let mut records = Vec::with_capacity(config.max_points.min(state.candidates().len()));
    let stop_reason = loop {
        let n = state.n();
        if n >= config.max_points {
            break StopReason::MaxPoints;
        }
        let sel = match select(&state, config, n) {
            Ok(sel) => sel,
            Err(Error::Exhausted) => {
                break if n == state.candidates().len() {
                    StopReason::Exhausted
                } else {
                    StopReason::PowerBreakdown
                };
            }
            Err(e) => return Err(e),
        };
        if config.min_separation > 0.0 && too_close(&state, sel.index, config.min_separation) {
            break StopReason::Resolution;
        }
        match state.add_point(sel.index) {
            Ok(()) => {}
            Err(Error::NumericalBreakdown { .. }) => break StopReason::PowerBreakdown,
            Err(e) => return Err(e),
        }
        records.push(ErrorRecord {
            n: state.n(),
            index: sel.index,
            point: state.candidates().point(sel.index).to_vec(),
            eta_value: sel.eta,
            eta_max: sel.eta_max,
            gamma: sel.gamma,
            pivot_residual: *state.pivot_residual().last().unwrap_or(&0.0),
            pivot_power: *state.pivot_power().last().unwrap_or(&0.0),
            errors: ErrorSnapshot::of(&state),
            stop_reason: None,
        });
    };
    if let Some(last) = records.last_mut() {
        last.stop_reason = Some(stop_reason);
    }
    let result = RunResult {
        initial,
        records,
        stop_reason,
        native_norm: state.native_norm(),
        clamp_violations: state.clamp_violations(),
        native_deficit: state.native_deficit(),
    };
    Ok((result, state))
}

fn too_close(state: &GreedyState<'_>, idx: usize, min_separation: f64) -> bool {
    let cands = state.candidates();
    let x = cands.point(idx);
    let d2 = min_separation * min_separation;
    state
        .selected()
        .iter()
        .any(|&j| sq_dist(x, cands.point(j)) <= d2)
}

/// Runs the greedy loop: select, add, record, until a stop condition.
pub fn run(
    kernel: &KernelSpec,
    candidates: &PointSet,
    eval_grid: &PointSet,
    target: &TargetFunction,
    config: &GreedyConfig,
) -> Result<RunResult> {
    run_state(kernel, candidates, eval_grid, target, config).map(|(r, _)| r)
}
