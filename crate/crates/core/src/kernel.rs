//! Kernel families, Gram assembly and the `k(x,x) <= 1` normalization.
//!
//! The two bridge kernels live on the unit interval:
//!
//! * Brownian bridge `k1(x,y) = min(x,y) - xy`, native space `H_0^1(0,1)`;
//! * its iterated version `k2(x,y) = ∫ k1(x,z) k1(z,y) dz
//!   = -(1/6) (min(x,y) - xy)(x² + y² - 2 max(x,y))`, native space `H_0^2(0,1)`.
//!
//! Gaussian and Matérn kernels are radial, `k(x,y) = φ(‖x-y‖ / shape)`, and
//! are defined on any `R^d`. Matérn smoothness is restricted to the closed
//! forms ν ∈ {1/2, 3/2, 5/2}.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::domain::{sq_dist, PointSet};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelFamily {
    BrownianBridge,
    IteratedBrownianBridge,
    Gaussian,
    Matern,
}

impl KernelFamily {
    pub fn name(self) -> &'static str {
        match self {
            KernelFamily::BrownianBridge => "brownian-bridge",
            KernelFamily::IteratedBrownianBridge => "iterated-brownian-bridge",
            KernelFamily::Gaussian => "gaussian",
            KernelFamily::Matern => "matern",
        }
    }

    fn is_bridge(self) -> bool {
        matches!(
            self,
            KernelFamily::BrownianBridge | KernelFamily::IteratedBrownianBridge
        )
    }
}

impl fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "brownian-bridge" | "bb" | "k1" => Ok(KernelFamily::BrownianBridge),
            "iterated-brownian-bridge" | "ibb" | "k2" => Ok(KernelFamily::IteratedBrownianBridge),
            "gaussian" | "gauss" => Ok(KernelFamily::Gaussian),
            "matern" => Ok(KernelFamily::Matern),
            other => Err(Error::Config(format!("unknown kernel family `{other}`"))),
        }
    }
}

const MATERN_NU: [f64; 3] = [0.5, 1.5, 2.5];

/// A strictly positive definite kernel together with its parameters.
///
/// Immutable once built; all evaluations are multiplied by `scale`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    family: KernelFamily,
    shape: f64,
    smoothness: Option<f64>,
    dim: usize,
    scale: f64,
}

impl KernelSpec {
    /// Generic constructor validating all parameters.
    pub fn new(
        family: KernelFamily,
        shape: f64,
        smoothness: Option<f64>,
        dim: usize,
        scale: f64,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Config("kernel dimension must be >= 1".into()));
        }
        if family.is_bridge() && dim != 1 {
            return Err(Error::Config(format!(
                "{family} kernel is only defined for d = 1"
            )));
        }
        if !(shape.is_finite() && shape > 0.0) {
            return Err(Error::Config(format!(
                "shape must be positive, got {shape}"
            )));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::Config(format!(
                "scale must be positive, got {scale}"
            )));
        }
        let smoothness = match family {
            KernelFamily::Matern => {
                let nu = smoothness
                    .ok_or_else(|| Error::Config("Matérn kernel needs a smoothness ν".into()))?;
                if !MATERN_NU.contains(&nu) {
                    return Err(Error::Config(format!(
                        "Matérn smoothness must be 0.5, 1.5 or 2.5, got {nu}"
                    )));
                }
                Some(nu)
            }
            _ => None,
        };
        Ok(Self {
            family,
            shape,
            smoothness,
            dim,
            scale,
        })
    }

    pub fn brownian_bridge() -> Self {
        Self {
            family: KernelFamily::BrownianBridge,
            shape: 1.0,
            smoothness: None,
            dim: 1,
            scale: 1.0,
        }
    }

    pub fn iterated_brownian_bridge() -> Self {
        Self {
            family: KernelFamily::IteratedBrownianBridge,
            shape: 1.0,
            smoothness: None,
            dim: 1,
            scale: 1.0,
        }
    }

    pub fn gaussian(shape: f64, dim: usize) -> Result<Self> {
        Self::new(KernelFamily::Gaussian, shape, None, dim, 1.0)
    }

    pub fn matern(nu: f64, shape: f64, dim: usize) -> Result<Self> {
        Self::new(KernelFamily::Matern, shape, Some(nu), dim, 1.0)
    }

    pub fn with_scale(mut self, scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::Config(format!(
                "scale must be positive, got {scale}"
            )));
        }
        self.scale = scale;
        Ok(self)
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn smoothness(&self) -> Option<f64> {
        self.smoothness
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Checked evaluation `scale * k(x, y)`.
    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.check_point(0, x)?;
        self.check_point(1, y)?;
        Ok(self.value(x, y))
    }

    /// Unchecked evaluation; callers validate points with [`KernelSpec::check_points`].
    #[inline]
    pub fn value(&self, x: &[f64], y: &[f64]) -> f64 {
        let raw = match self.family {
            KernelFamily::BrownianBridge => bridge(x[0], y[0]),
            KernelFamily::IteratedBrownianBridge => {
                let (a, b) = (x[0], y[0]);
                -(bridge(a, b) * (a * a + b * b - 2.0 * a.max(b))) / 6.0
            }
            KernelFamily::Gaussian => (-sq_dist(x, y) / (self.shape * self.shape)).exp(),
            KernelFamily::Matern => {
                let r = sq_dist(x, y).sqrt() / self.shape;
                match self.smoothness {
                    Some(1.5) => {
                        let s = 3f64.sqrt() * r;
                        (1.0 + s) * (-s).exp()
                    }
                    Some(2.5) => {
                        let s = 5f64.sqrt() * r;
                        (1.0 + s + s * s / 3.0) * (-s).exp()
                    }
                    _ => (-r).exp(),
                }
            }
        };
        self.scale * raw
    }

    #[inline]
    pub fn diag(&self, x: &[f64]) -> f64 {
        self.value(x, x)
    }

    fn check_point(&self, index: usize, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        if let Some(&value) = x.iter().find(|v| !v.is_finite()) {
            return Err(Error::OutsideDomain {
                kernel: self.family.name(),
                index,
                value,
            });
        }
        if self.family.is_bridge() && !(0.0..=1.0).contains(&x[0]) {
            return Err(Error::OutsideDomain {
                kernel: self.family.name(),
                index,
                value: x[0],
            });
        }
        Ok(())
    }

    /// Validates dimension and domain of every point.
    pub fn check_points(&self, pts: &PointSet) -> Result<()> {
        if pts.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: pts.dim(),
            });
        }
        for (i, x) in pts.iter().enumerate() {
            self.check_point(i, x)?;
        }
        Ok(())
    }

    /// Rescales so that the largest diagonal value on `grid` is at most one.
    ///
    /// Only the native-space norm changes: `‖f‖_{c k} = ‖f‖_k / sqrt(c)`.
    pub fn normalize(&self, grid: &PointSet) -> KernelSpec {
        let max_diag = grid.iter().map(|x| self.diag(x)).fold(0.0, f64::max);
        let mut out = self.clone();
        if max_diag > 1.0 {
            out.scale = self.scale / max_diag;
        }
        out
    }

    /// Largest `k(x,x)` over a point set.
    pub fn max_diag(&self, grid: &PointSet) -> f64 {
        grid.iter().map(|x| self.diag(x)).fold(0.0, f64::max)
    }
}

#[inline]
fn bridge(x: f64, y: f64) -> f64 {
    x.min(y) - x * y
}

/// Symmetric kernel matrix `A_ij = k(x_i, x_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix(DMatrix<f64>);

impl GramMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    /// Wraps an arbitrary symmetric matrix (e.g. for diagnostics tests).
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::InvalidInput(format!(
                "{}x{} matrix is not square",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(Self(m))
    }
}

/// Assembles the Gram matrix; only the lower triangle is evaluated and mirrored.
pub fn gram(kernel: &KernelSpec, pts: &PointSet) -> Result<GramMatrix> {
    kernel.check_points(pts)?;
    pts.check_distinct()?;
    let n = pts.len();
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = kernel.value(pts.point(i), pts.point(j));
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    Ok(GramMatrix(a))
}
