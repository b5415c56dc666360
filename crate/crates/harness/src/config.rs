//! Experiment configuration files (TOML).
//!
//! ```toml
//! seed = 7
//!
//! [kernel]
//! family = "brownian-bridge"   # iterated-brownian-bridge | gaussian | matern
//! shape = 1.0                  # gaussian / matern
//! smoothness = 1.5             # matern: 0.5 | 1.5 | 2.5
//! dim = 1
//!
//! [target]
//! kind = "fp"                  # fp | expansion | tabulated
//! p = 1.0
//! normalized = true            # false drops the 4^p factor
//!
//! [grids]
//! candidates = 5001
//! evals = 10001
//!
//! [greedy]
//! beta = 1.0                   # or "inf"
//! gamma = 1.0                  # or { c = 1.0, p = 0.25 }
//! policy = "maximizer"         # or "first-above-threshold"
//! max_points = 127
//! min_separation = 0.0        # stop when points get closer than this
//!
//! [output]
//! dir = "out"
//! ```

use std::path::{Path, PathBuf};

use greedy_kernel::interp::DEFAULT_POWER_TOL;
use greedy_kernel::oracle::{fp_eval, fp_h1_norm, fp_h2_norm};
use greedy_kernel::{
    Beta, Domain, GammaSchedule, GreedyConfig, KernelFamily, KernelSpec, PointSet, TargetFunction,
    WeakPolicy,
};
use serde::{Deserialize, Serialize};

use crate::HarnessError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    pub kernel: KernelSection,
    #[serde(default)]
    pub domain: Option<DomainSection>,
    pub target: TargetSection,
    #[serde(default)]
    pub grids: GridSection,
    #[serde(default)]
    pub greedy: GreedySection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSection {
    pub family: String,
    #[serde(default = "one")]
    pub shape: f64,
    #[serde(default)]
    pub smoothness: Option<f64>,
    #[serde(default = "one_usize")]
    pub dim: usize,
    /// Rescale so that `max k(x,x) <= 1` on the evaluation grid.
    #[serde(default)]
    pub normalize: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSection {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Drop boundary nodes from the grids.
    #[serde(default = "yes")]
    pub open: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TargetSection {
    /// `f_p`, a product over coordinates in more than one dimension.
    Fp {
        p: f64,
        #[serde(default = "yes")]
        normalized: bool,
    },
    Expansion {
        centers: Vec<Vec<f64>>,
        coeffs: Vec<f64>,
    },
    /// Values on the candidate grid; the evaluation grid defaults to it.
    Tabulated {
        values: Vec<f64>,
        #[serde(default)]
        eval_values: Option<Vec<f64>>,
        #[serde(default)]
        native_norm: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    /// Nodes per dimension, boundary included before open faces are dropped.
    pub candidates: usize,
    pub evals: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            candidates: 5001,
            evals: 10001,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BetaValue {
    Number(f64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GammaValue {
    Constant(f64),
    PowerDecay { c: f64, p: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GreedySection {
    pub beta: BetaValue,
    #[serde(default = "gamma_one")]
    pub gamma: GammaValue,
    #[serde(default = "maximizer")]
    pub policy: WeakPolicy,
    pub max_points: usize,
    #[serde(default = "power_tol")]
    pub power_tol: f64,
    #[serde(default)]
    pub min_separation: f64,
}

impl Default for GreedySection {
    fn default() -> Self {
        Self {
            beta: BetaValue::Number(1.0),
            gamma: gamma_one(),
            policy: WeakPolicy::Maximizer,
            max_points: 127,
            power_tol: DEFAULT_POWER_TOL,
            min_separation: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
        }
    }
}

fn one() -> f64 {
    1.0
}
fn one_usize() -> usize {
    1
}
fn yes() -> bool {
    true
}
fn gamma_one() -> GammaValue {
    GammaValue::Constant(1.0)
}
fn maximizer() -> WeakPolicy {
    WeakPolicy::Maximizer
}
fn power_tol() -> f64 {
    DEFAULT_POWER_TOL
}

/// Everything a run needs, built from a validated config.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub kernel: KernelSpec,
    pub candidates: PointSet,
    pub eval_grid: PointSet,
    pub target: TargetFunction,
    pub greedy: GreedyConfig,
}

impl ExperimentConfig {
    /// Parses TOML text; every error names the offending line.
    pub fn parse(src: &str) -> Result<Self, HarnessError> {
        let cfg: Self = toml::from_str(src).map_err(|e| {
            let line = e.span().map(|s| line_of_offset(src, s.start));
            HarnessError::Parse {
                line,
                message: e.message().trim().to_string(),
            }
        })?;
        cfg.validate()
            .map_err(|(key, message)| HarnessError::Parse {
                line: line_of_key(src, key),
                message,
            })?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let src = std::fs::read_to_string(path).map_err(|e| HarnessError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Self::parse(&src)
    }

    fn validate(&self) -> Result<(), (&'static str, String)> {
        if self.grids.candidates < 2 {
            return Err((
                "candidates",
                format!(
                    "candidate count must be >= 2, got {}",
                    self.grids.candidates
                ),
            ));
        }
        if self.grids.evals < 2 {
            return Err((
                "evals",
                format!("eval count must be >= 2, got {}", self.grids.evals),
            ));
        }
        self.beta().map_err(|e| ("beta", e.to_string()))?;
        self.gamma()
            .validate()
            .map_err(|e| ("gamma", e.to_string()))?;
        if !(self.greedy.power_tol >= 0.0) {
            return Err(("power_tol", "power_tol must be >= 0".into()));
        }
        self.kernel_spec().map_err(|e| ("family", e.to_string()))?;
        if let TargetSection::Fp { p, .. } = self.target {
            self.fp_norm(p).map_err(|e| ("p", e.to_string()))?;
        }
        Ok(())
    }

    /// Warnings that do not stop a run.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.grids.evals < self.grids.candidates {
            w.push(format!(
                "eval count {} is below candidate count {}; sup errors are measured on a coarser grid",
                self.grids.evals, self.grids.candidates
            ));
        }
        w
    }

    pub fn beta(&self) -> Result<Beta, greedy_kernel::Error> {
        match &self.greedy.beta {
            BetaValue::Number(b) => Beta::new(*b),
            BetaValue::Text(s) => s.parse(),
        }
    }

    pub fn gamma(&self) -> GammaSchedule {
        match self.greedy.gamma {
            GammaValue::Constant(g) => GammaSchedule::Constant(g),
            GammaValue::PowerDecay { c, p } => GammaSchedule::PowerDecay { c, p },
        }
    }

    pub fn greedy_config(&self) -> Result<GreedyConfig, greedy_kernel::Error> {
        let config = GreedyConfig {
            beta: self.beta()?,
            gamma: self.gamma(),
            policy: self.greedy.policy,
            max_points: self.greedy.max_points,
            power_tol: self.greedy.power_tol,
            min_separation: self.greedy.min_separation,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn kernel_spec(&self) -> Result<KernelSpec, greedy_kernel::Error> {
        let k = &self.kernel;
        let family: KernelFamily = k.family.parse()?;
        let smoothness = match family {
            KernelFamily::Matern => Some(k.smoothness.unwrap_or(1.5)),
            _ => k.smoothness,
        };
        KernelSpec::new(family, k.shape, smoothness, k.dim, 1.0)
    }

    pub fn domain(&self) -> Result<Domain, greedy_kernel::Error> {
        match &self.domain {
            None => Ok(Domain::open_unit(self.kernel.dim)),
            Some(d) => {
                let open = vec![d.open; d.lower.len()];
                Domain::new(d.lower.clone(), d.upper.clone(), open.clone(), open)
            }
        }
    }

    /// Exact native norm of the `f_p` target, when known for this kernel.
    fn fp_norm(&self, p: f64) -> Result<Option<f64>, greedy_kernel::Error> {
        let family: KernelFamily = self.kernel.family.parse()?;
        let scale = match &self.target {
            TargetSection::Fp {
                normalized: false, ..
            } => 4f64.powf(-p),
            _ => 1.0,
        };
        Ok(match family {
            KernelFamily::BrownianBridge => Some(fp_h1_norm(p)? * scale),
            KernelFamily::IteratedBrownianBridge => Some(fp_h2_norm(p)? * scale),
            _ => None,
        })
    }

    pub fn build(&self) -> Result<Experiment, HarnessError> {
        let mut kernel = self.kernel_spec()?;
        let domain = self.domain()?;
        if domain.dim() != kernel.dim() {
            return Err(greedy_kernel::Error::DimensionMismatch {
                expected: kernel.dim(),
                got: domain.dim(),
            }
            .into());
        }
        let candidates = domain.grid(self.grids.candidates)?;
        let mut eval_grid = domain.grid(self.grids.evals)?;
        let target = match &self.target {
            TargetSection::Fp { p, normalized } => {
                let (p, scale) = (*p, if *normalized { 1.0 } else { 4f64.powf(-*p) });
                let f = |x: &[f64]| x.iter().map(|&xi| scale * fp_eval(p, xi)).product::<f64>();
                TargetFunction::from_fn(&candidates, &eval_grid, f, self.fp_norm(p)?)?
            }
            TargetSection::Expansion { centers, coeffs } => {
                let flat: Vec<f64> = centers.iter().flatten().copied().collect();
                if centers.iter().any(|c| c.len() != kernel.dim()) {
                    return Err(HarnessError::Config(
                        "expansion centers must match the kernel dimension".into(),
                    ));
                }
                let centers = PointSet::new(kernel.dim(), flat)?;
                TargetFunction::kernel_expansion(
                    &kernel,
                    &centers,
                    coeffs,
                    &candidates,
                    &eval_grid,
                )?
            }
            TargetSection::Tabulated {
                values,
                eval_values,
                native_norm,
            } => {
                let eval_values = match eval_values {
                    Some(v) => v.clone(),
                    None => {
                        eval_grid = candidates.clone();
                        values.clone()
                    }
                };
                TargetFunction::new(values.clone(), eval_values, *native_norm)?
            }
        };
        if self.kernel.normalize {
            let s = kernel.max_diag(&eval_grid);
            if s > 1.0 {
                kernel = kernel.normalize(&eval_grid);
            }
        }
        Ok(Experiment {
            kernel,
            candidates,
            eval_grid,
            target,
            greedy: self.greedy_config()?,
        })
    }
}

fn line_of_offset(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())].matches('\n').count() + 1
}

/// First line assigning `key`, for errors found after deserialization.
fn line_of_key(src: &str, key: &str) -> Option<usize> {
    src.lines()
        .position(|l| {
            let l = l.trim_start();
            l.strip_prefix(key)
                .is_some_and(|rest| rest.trim_start().starts_with('='))
        })
        .map(|i| i + 1)
}
