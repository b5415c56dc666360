//! Incremental kernel interpolation in the Newton basis.
//!
//! Adding a point `x_n` to `X_{n-1}` updates, on every grid point `x`,
//!
//! ```text
//! N_n(x)      = (k(x, x_n) - Σ_{j<n} N_j(x_n) N_j(x)) / P_{X_{n-1}}(x_n)
//! P²_{X_n}(x) = P²_{X_{n-1}}(x) - N_n(x)²
//! c_n         = r_{n-1}(x_n) / P_{X_{n-1}}(x_n)
//! r_n(x)      = r_{n-1}(x) - c_n N_n(x)
//! ```
//!
//! The Newton basis is orthonormal in the native space, so
//! `‖I_{X_n} f‖² = Σ c_i²` and, for `f` in the native space,
//! `‖f - I_{X_n} f‖² = ‖f‖² - Σ c_i²`.

use crate::domain::PointSet;
use crate::error::{Error, Result};
use crate::kernel::{gram, KernelSpec};

/// Squared-power values in `[-CLAMP_WINDOW, 0)` are round-off and become zero.
pub const CLAMP_WINDOW: f64 = 1e-12;

/// Default breakdown threshold on the squared power function.
pub const DEFAULT_POWER_TOL: f64 = 1e-13;

/// Target values on the candidate and evaluation grids.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetFunction {
    pub values: Vec<f64>,
    pub eval_values: Vec<f64>,
    /// Exact native-space norm, when known.
    pub native_norm: Option<f64>,
}

impl TargetFunction {
    pub fn new(values: Vec<f64>, eval_values: Vec<f64>, native_norm: Option<f64>) -> Result<Self> {
        if values.iter().chain(&eval_values).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("target values must be finite".into()));
        }
        if let Some(n) = native_norm {
            if !(n.is_finite() && n >= 0.0) {
                return Err(Error::InvalidInput(format!(
                    "native norm must be >= 0, got {n}"
                )));
            }
        }
        Ok(Self {
            values,
            eval_values,
            native_norm,
        })
    }

    /// Samples `f` on both grids.
    pub fn from_fn<F>(
        candidates: &PointSet,
        eval_grid: &PointSet,
        f: F,
        native_norm: Option<f64>,
    ) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64,
    {
        Self::new(
            candidates.iter().map(&f).collect(),
            eval_grid.iter().map(&f).collect(),
            native_norm,
        )
    }

    /// `f = Σ_j c_j k(·, z_j)`, whose squared native norm is `cᵀ A c`.
    pub fn kernel_expansion(
        kernel: &KernelSpec,
        centers: &PointSet,
        coeffs: &[f64],
        candidates: &PointSet,
        eval_grid: &PointSet,
    ) -> Result<Self> {
        if coeffs.len() != centers.len() {
            return Err(Error::LengthMismatch {
                what: "expansion coefficients",
                expected: centers.len(),
                got: coeffs.len(),
            });
        }
        let a = gram(kernel, centers)?;
        let c = nalgebra::DVector::from_column_slice(coeffs);
        let norm2 = c.dot(&(a.matrix() * &c)).max(0.0);
        kernel.check_points(candidates)?;
        kernel.check_points(eval_grid)?;
        let f = |x: &[f64]| -> f64 {
            centers
                .iter()
                .zip(coeffs)
                .map(|(z, cj)| cj * kernel.value(x, z))
                .sum()
        };
        Self::from_fn(candidates, eval_grid, f, Some(norm2.sqrt()))
    }
}

/// Evolving interpolation state on a candidate grid and an evaluation grid.
#[derive(Debug, Clone)]
pub struct GreedyState<'a> {
    kernel: &'a KernelSpec,
    candidates: &'a PointSet,
    eval_grid: &'a PointSet,
    native_norm: Option<f64>,
    power_tol: f64,

    selected: Vec<usize>,
    is_selected: Vec<bool>,
    newton: Vec<Vec<f64>>,
    newton_eval: Vec<Vec<f64>>,
    power2: Vec<f64>,
    power2_eval: Vec<f64>,
    residual: Vec<f64>,
    residual_eval: Vec<f64>,
    coeffs: Vec<f64>,
    pivot_power: Vec<f64>,
    pivot_residual: Vec<f64>,
    interp_norm2: f64,

    clamp_violations: usize,
    most_negative_power2: f64,
    flip_sign: bool,
}

impl<'a> GreedyState<'a> {
    /// Empty selection: `P²(x) = k(x,x)` and `r = f`.
    pub fn new(
        kernel: &'a KernelSpec,
        candidates: &'a PointSet,
        eval_grid: &'a PointSet,
        target: &TargetFunction,
    ) -> Result<Self> {
        if target.values.len() != candidates.len() {
            return Err(Error::LengthMismatch {
                what: "target values",
                expected: candidates.len(),
                got: target.values.len(),
            });
        }
        if target.eval_values.len() != eval_grid.len() {
            return Err(Error::LengthMismatch {
                what: "target evaluation values",
                expected: eval_grid.len(),
                got: target.eval_values.len(),
            });
        }
        kernel.check_points(candidates)?;
        kernel.check_points(eval_grid)?;
        candidates.check_distinct()?;
        Ok(Self {
            kernel,
            candidates,
            eval_grid,
            native_norm: target.native_norm,
            power_tol: DEFAULT_POWER_TOL,
            selected: Vec::new(),
            is_selected: vec![false; candidates.len()],
            newton: Vec::new(),
            newton_eval: Vec::new(),
            power2: candidates.iter().map(|x| kernel.diag(x)).collect(),
            power2_eval: eval_grid.iter().map(|x| kernel.diag(x)).collect(),
            residual: target.values.clone(),
            residual_eval: target.eval_values.clone(),
            coeffs: Vec::new(),
            pivot_power: Vec::new(),
            pivot_residual: Vec::new(),
            interp_norm2: 0.0,
            clamp_violations: 0,
            most_negative_power2: 0.0,
            flip_sign: false,
        })
    }

    pub fn with_power_tol(mut self, tol: f64) -> Self {
        self.power_tol = tol;
        self
    }

    /// Test fixture: flips the sign of the projection term in the Newton update.
    #[doc(hidden)]
    pub fn inject_sign_flip(mut self) -> Self {
        self.flip_sign = true;
        self
    }

    /// Adds candidate `idx` to the interpolation set.
    pub fn add_point(&mut self, idx: usize) -> Result<()> {
        let len = self.candidates.len();
        if idx >= len {
            return Err(Error::IndexOutOfRange { index: idx, len });
        }
        if self.is_selected[idx] {
            return Err(Error::AlreadySelected(idx));
        }
        let p2 = self.power2[idx];
        if !(p2 > self.power_tol) {
            return Err(Error::NumericalBreakdown {
                index: idx,
                value: p2,
            });
        }
        let pivot = p2.sqrt();
        let xn = self.candidates.point(idx);
        let at_pivot: Vec<f64> = self.newton.iter().map(|col| col[idx]).collect();
        let sign = if self.flip_sign { -1.0 } else { 1.0 };

        let mut basis = newton_column(
            self.kernel,
            self.candidates,
            xn,
            &self.newton,
            &at_pivot,
            pivot,
            sign,
        );
        // N_n vanishes on X_{n-1}; pin it so r and P² stay exactly zero there
        if !self.flip_sign {
            for &j in &self.selected {
                basis[j] = 0.0;
            }
        }
        let basis_eval = newton_column(
            self.kernel,
            self.eval_grid,
            xn,
            &self.newton_eval,
            &at_pivot,
            pivot,
            sign,
        );

        let r = self.residual[idx];
        let c = r / pivot;

        for (i, (res, pw)) in self
            .residual
            .iter_mut()
            .zip(self.power2.iter_mut())
            .enumerate()
        {
            *res -= c * basis[i];
            *pw -= basis[i] * basis[i];
        }
        for (i, (res, pw)) in self
            .residual_eval
            .iter_mut()
            .zip(self.power2_eval.iter_mut())
            .enumerate()
        {
            *res -= c * basis_eval[i];
            *pw -= basis_eval[i] * basis_eval[i];
        }
        self.residual[idx] = 0.0;
        self.power2[idx] = 0.0;
        self.clamp();

        self.newton.push(basis);
        self.newton_eval.push(basis_eval);
        self.coeffs.push(c);
        self.pivot_power.push(pivot);
        self.pivot_residual.push(r);
        self.interp_norm2 += c * c;
        self.selected.push(idx);
        self.is_selected[idx] = true;
        Ok(())
    }

    fn clamp(&mut self) {
        for v in self.power2.iter_mut().chain(self.power2_eval.iter_mut()) {
            if *v < 0.0 {
                if *v < -CLAMP_WINDOW {
                    self.clamp_violations += 1;
                }
                self.most_negative_power2 = self.most_negative_power2.min(*v);
                *v = 0.0;
            }
        }
    }

    pub fn kernel(&self) -> &KernelSpec {
        self.kernel
    }

    pub fn candidates(&self) -> &PointSet {
        self.candidates
    }

    pub fn eval_grid(&self) -> &PointSet {
        self.eval_grid
    }

    pub fn power_tol(&self) -> f64 {
        self.power_tol
    }

    pub fn native_norm(&self) -> Option<f64> {
        self.native_norm
    }

    pub fn selected(&self) -> &[usize] {
        &self.selected
    }

    pub fn is_selected(&self, idx: usize) -> bool {
        self.is_selected[idx]
    }

    pub fn n(&self) -> usize {
        self.selected.len()
    }

    /// Newton basis values, one vector per selected point, on the candidate grid.
    pub fn newton(&self) -> &[Vec<f64>] {
        &self.newton
    }

    pub fn newton_eval(&self) -> &[Vec<f64>] {
        &self.newton_eval
    }

    pub fn power2(&self) -> &[f64] {
        &self.power2
    }

    pub fn power2_eval(&self) -> &[f64] {
        &self.power2_eval
    }

    pub fn residual(&self) -> &[f64] {
        &self.residual
    }

    pub fn residual_eval(&self) -> &[f64] {
        &self.residual_eval
    }

    /// Newton coefficients `c_i = r_{i-1}(x_i) / P_{X_{i-1}}(x_i)`.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `P_{X_{i-1}}(x_i)` for every selection step.
    pub fn pivot_power(&self) -> &[f64] {
        &self.pivot_power
    }

    /// `r_{i-1}(x_i)` for every selection step.
    pub fn pivot_residual(&self) -> &[f64] {
        &self.pivot_residual
    }

    pub fn interp_norm2(&self) -> f64 {
        self.interp_norm2
    }

    /// Number of squared-power values that fell below `-CLAMP_WINDOW`.
    pub fn clamp_violations(&self) -> usize {
        self.clamp_violations
    }

    pub fn most_negative_power2(&self) -> f64 {
        self.most_negative_power2
    }

    /// `‖I_{X_n} f‖` in the native space.
    pub fn interpolant_norm(&self) -> f64 {
        self.interp_norm2.sqrt()
    }

    /// `‖f - I_{X_n} f‖` in the native space, when `‖f‖` is known.
    pub fn residual_native_norm(&self) -> Option<f64> {
        self.native_norm
            .map(|nf| (nf * nf - self.interp_norm2).max(0.0).sqrt())
    }

    /// True when `‖f‖² - ‖I f‖²` went negative beyond round-off.
    pub fn native_deficit(&self) -> bool {
        self.native_norm
            .is_some_and(|nf| nf * nf - self.interp_norm2 < -1e-10 * nf * nf)
    }

    /// `(max |r| , max P)` over the evaluation grid.
    pub fn sup_errors(&self) -> (f64, f64) {
        sup_pair(&self.residual_eval, &self.power2_eval)
    }

    /// `(max |r| , max P)` over the candidate grid.
    pub fn sup_errors_candidates(&self) -> (f64, f64) {
        sup_pair(&self.residual, &self.power2)
    }

    /// Interpolant values on the evaluation grid.
    pub fn interpolant_eval(&self, target: &TargetFunction) -> Vec<f64> {
        target
            .eval_values
            .iter()
            .zip(&self.residual_eval)
            .map(|(f, r)| f - r)
            .collect()
    }
}

fn sup_pair(residual: &[f64], power2: &[f64]) -> (f64, f64) {
    let r = residual.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let p = power2.iter().fold(0.0f64, |m, v| m.max(*v));
    (r, p.sqrt())
}

fn newton_column(
    kernel: &KernelSpec,
    grid: &PointSet,
    xn: &[f64],
    basis: &[Vec<f64>],
    at_pivot: &[f64],
    pivot: f64,
    sign: f64,
) -> Vec<f64> {
    let mut col: Vec<f64> = grid.iter().map(|x| kernel.value(x, xn)).collect();
    for (nj, &w) in basis.iter().zip(at_pivot) {
        let w = sign * w;
        for (v, b) in col.iter_mut().zip(nj) {
            *v -= w * b;
        }
    }
    let inv = 1.0 / pivot;
    col.iter_mut().for_each(|v| *v *= inv);
    col
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Domain;
    use approx::assert_relative_eq;

    fn grid(xs: &[f64]) -> PointSet {
        PointSet::from_1d(xs.to_vec()).unwrap()
    }

    fn quadratic(pts: &PointSet) -> Vec<f64> {
        pts.iter().map(|x| x[0] * (1.0 - x[0])).collect()
    }

    #[test]
    fn init_state_values() {
        let k = KernelSpec::brownian_bridge();
        let c = grid(&[0.25, 0.5]);
        let e = grid(&[0.5]);
        let t = TargetFunction::new(quadratic(&c), quadratic(&e), None).unwrap();
        let s = GreedyState::new(&k, &c, &e, &t).unwrap();
        assert_eq!(s.power2()[1], 0.25);
        assert_eq!(s.residual(), t.values.as_slice());
        assert_eq!(s.interpolant_norm(), 0.0);
        assert!(s.selected().is_empty());

        let g = KernelSpec::gaussian(0.3, 1).unwrap();
        let s = GreedyState::new(&g, &c, &e, &t).unwrap();
        assert!(s.power2().iter().all(|&p| p == 1.0));
    }

    #[test]
    fn misaligned_target() {
        let k = KernelSpec::brownian_bridge();
        let c = grid(&[0.25, 0.5]);
        let t = TargetFunction::new(vec![0.0], vec![0.0, 0.1], None).unwrap();
        assert!(matches!(
            GreedyState::new(&k, &c, &c, &t),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn one_step_by_hand() {
        let k = KernelSpec::brownian_bridge();
        let c = grid(&[0.25, 0.5, 0.75]);
        let t = TargetFunction::new(quadratic(&c), quadratic(&c), Some(1.0 / 3f64.sqrt())).unwrap();
        let mut s = GreedyState::new(&k, &c, &c, &t).unwrap();
        s.add_point(1).unwrap();
        assert_relative_eq!(s.coeffs()[0], 0.5, max_relative = 1e-15);
        assert_relative_eq!(s.interp_norm2(), 0.25, max_relative = 1e-15);
        assert_relative_eq!(s.interpolant_norm(), 0.5, max_relative = 1e-15);
        assert_eq!(s.power2()[1], 0.0);
        assert_eq!(s.residual()[1], 0.0);
        assert_relative_eq!(s.power2()[0], 0.125, max_relative = 1e-15);
        assert_relative_eq!(
            s.residual_native_norm().unwrap(),
            1.0 / 12f64.sqrt(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn add_point_errors() {
        let k = KernelSpec::brownian_bridge();
        let c = grid(&[0.0, 0.5]);
        let t = TargetFunction::new(quadratic(&c), quadratic(&c), None).unwrap();
        let mut s = GreedyState::new(&k, &c, &c, &t).unwrap();
        assert!(matches!(
            s.add_point(0),
            Err(Error::NumericalBreakdown { index: 0, .. })
        ));
        s.add_point(1).unwrap();
        assert_eq!(s.add_point(1), Err(Error::AlreadySelected(1)));
        assert!(matches!(s.add_point(7), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn empty_selection_norms() {
        let k = KernelSpec::brownian_bridge();
        let c = Domain::open_unit(1).grid(101).unwrap();
        let t = TargetFunction::from_fn(&c, &c, |x| x[0] * (1.0 - x[0]), Some(1.0 / 3f64.sqrt()))
            .unwrap();
        let s = GreedyState::new(&k, &c, &c, &t).unwrap();
        assert_eq!(s.residual_native_norm(), Some(1.0 / 3f64.sqrt()));
        let (linf, pmax) = s.sup_errors();
        assert_relative_eq!(linf, 0.25, max_relative = 1e-15);
        assert_relative_eq!(pmax, 0.5, max_relative = 1e-15);
    }

    #[test]
    fn f1_sup_error_before_selection() {
        let k = KernelSpec::brownian_bridge();
        let c = Domain::open_unit(1).grid(11).unwrap();
        let e = Domain::open_unit(1).grid(10001).unwrap();
        let t = TargetFunction::from_fn(&c, &e, |x| 4.0 * x[0] * (1.0 - x[0]), None).unwrap();
        let s = GreedyState::new(&k, &c, &e, &t).unwrap();
        assert_relative_eq!(s.sup_errors().0, 1.0, max_relative = 1e-15);
    }

    #[test]
    fn selecting_everything_interpolates() {
        let k = KernelSpec::iterated_brownian_bridge();
        let c = Domain::open_unit(1).grid(12).unwrap();
        let t = TargetFunction::from_fn(&c, &c, |x| (3.0 * x[0]).sin(), None).unwrap();
        let mut s = GreedyState::new(&k, &c, &c, &t).unwrap();
        for i in [4, 0, 9, 2, 7, 5, 1, 8, 3, 6] {
            s.add_point(i).unwrap();
        }
        assert!(s.sup_errors().0 < 1e-9);
    }

    #[test]
    fn kernel_expansion_is_reproduced() {
        let k = KernelSpec::brownian_bridge();
        let centers = grid(&[0.2, 0.6]);
        let c = Domain::open_unit(1).grid(11).unwrap();
        let t = TargetFunction::kernel_expansion(&k, &centers, &[1.5, -0.7], &c, &c).unwrap();
        let a = gram(&k, &centers).unwrap();
        let m = a.matrix();
        let expected = 1.5 * 1.5 * m[(0, 0)] - 2.0 * 1.5 * 0.7 * m[(0, 1)] + 0.49 * m[(1, 1)];
        assert_relative_eq!(
            t.native_norm.unwrap().powi(2),
            expected,
            max_relative = 1e-14
        );

        let mut s = GreedyState::new(&k, &c, &c, &t).unwrap();
        // 0.2 and 0.6 sit at indices 1 and 5 of the 0.1-spaced grid
        s.add_point(1).unwrap();
        s.add_point(5).unwrap();
        assert_relative_eq!(
            s.interpolant_norm(),
            t.native_norm.unwrap(),
            max_relative = 1e-12
        );
        assert!(s.residual_native_norm().unwrap() < 1e-6);
        assert!(s.sup_errors().0 < 1e-14);
    }
}
