//! Closed forms for the Brownian-bridge example and the `f_p` targets.
//!
//! With `k(x,y) = min(x,y) - xy` on `(0,1)` and `f(x) = x(1-x)`, interpolation
//! is piecewise-linear with zero boundary values, f-greedy bisects the
//! largest interval, and equally spaced points are L∞-optimal.

use statrs::function::gamma::ln_gamma;

use crate::domain::PointSet;
use crate::error::{Error, Result};

/// Dyadic position of the `n`-th f-greedy point: `n = 2^{ℓ-1} + i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BBIndex {
    pub ell: u32,
    pub i: u64,
}

impl BBIndex {
    /// Decomposes `n >= 1`.
    pub fn from_n(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("dyadic index needs n >= 1".into()));
        }
        let ell = 64 - n.leading_zeros();
        Ok(Self {
            ell,
            i: n - (1u64 << (ell - 1)),
        })
    }

    pub fn n(self) -> u64 {
        (1u64 << (self.ell - 1)) + self.i
    }
}

/// `{ i/(n+1) : 1 <= i <= n }`, the unique L∞-optimal points for `x(1-x)`.
pub fn optimal_points(n: usize) -> PointSet {
    let h = 1.0 / (n as f64 + 1.0);
    PointSet::from_1d((1..=n).map(|i| i as f64 * h).collect()).expect("finite coordinates")
}

/// `(‖r̄_n‖_∞, ‖r̄_n‖_H)` for the optimal `n`-point set.
pub fn optimal_errors(n: usize) -> (f64, f64) {
    let m = n as f64 + 1.0;
    (0.25 / (m * m), 1.0 / (m * 3f64.sqrt()))
}

/// The `k`-th f-greedy point, increasing within each dyadic level.
pub fn fgreedy_point(k: u64) -> Result<f64> {
    let b = BBIndex::from_n(k)?;
    Ok((2 * b.i + 1) as f64 / (1u64 << b.ell) as f64)
}

/// `(‖r_{n-1}‖_∞, ‖r_{n-1}‖_H)` for f-greedy, `n >= 1`.
pub fn fgreedy_errors(n: u64) -> Result<(f64, f64)> {
    let BBIndex { ell, i } = BBIndex::from_n(n)?;
    let ell = ell as i32;
    let linf = 2f64.powi(-2 * ell);
    let native2 = 2f64.powi(1 - 3 * ell) / 3.0 * (2f64.powi(ell + 1) - 3.0 * i as f64);
    Ok((linf, native2.sqrt()))
}

/// Bounds on `‖r_n‖_∞ / ‖r_n‖_H` for f-greedy, `n >= 1`.
pub fn ratio_bounds(n: usize) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::InvalidInput("ratio bounds need n >= 1".into()));
    }
    let m = n as f64 + 1.0;
    let s3 = 3f64.sqrt();
    Ok((s3 / (4.0 * 2f64.sqrt()) / m, s3 / m))
}

/// `inf_{|X| <= n} ‖P_X‖_∞ = (1/2)(n+1)^{-1/2}` for the Brownian bridge.
pub fn min_power_linf(n: usize) -> f64 {
    0.5 / (n as f64 + 1.0).sqrt()
}

/// `f_p(x) = 2^{2p} (x(1-x))^p`, normalized so that `f_p(1/2) = 1`.
pub fn fp_eval(p: f64, x: f64) -> f64 {
    (4.0 * x * (1.0 - x)).powf(p)
}

/// `‖f_p‖` in the native space of the Brownian bridge, `p > 1/2`.
pub fn fp_h1_norm(p: f64) -> Result<f64> {
    if !(p > 0.5 && p.is_finite()) {
        return Err(Error::OutOfDomain {
            what: "H1 norm of f_p",
            required: "p > 1/2",
            got: p,
        });
    }
    let log = (2.0 * p * std::f64::consts::PI.sqrt() / (2.0 * p - 1.0)).ln()
        + ln_gamma(2.0 * p + 1.0)
        - ln_gamma(2.0 * p + 0.5);
    Ok((0.5 * log).exp())
}

/// `‖f_p‖` in the native space of the iterated Brownian bridge, `p > 3/2`.
pub fn fp_h2_norm(p: f64) -> Result<f64> {
    if !(p > 1.5 && p.is_finite()) {
        return Err(Error::OutOfDomain {
            what: "H2 norm of f_p",
            required: "p > 3/2",
            got: p,
        });
    }
    let log = (48.0 * (p - 1.0) * p * p * std::f64::consts::PI.sqrt() / (2.0 * p - 3.0)).ln()
        + ln_gamma(2.0 * p - 1.0)
        - ln_gamma(2.0 * p - 0.5);
    Ok((0.5 * log).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn dyadic_bijection() {
        for n in 1..5000u64 {
            let b = BBIndex::from_n(n).unwrap();
            assert!(b.i < 1 << (b.ell - 1));
            assert_eq!(b.n(), n);
        }
        assert!(BBIndex::from_n(0).is_err());
    }

    #[test]
    fn optimal_point_sets() {
        assert_eq!(optimal_points(1).coords(), &[0.5]);
        assert_eq!(optimal_points(3).coords(), &[0.25, 0.5, 0.75]);
        assert!(optimal_points(0).is_empty());
    }

    #[test]
    fn optimal_error_values() {
        let s3 = 3f64.sqrt();
        assert_eq!(optimal_errors(0), (0.25, 1.0 / s3));
        let (l, h) = optimal_errors(1);
        assert_eq!(l, 1.0 / 16.0);
        assert_relative_eq!(h, 1.0 / (2.0 * s3), max_relative = 1e-15);
        let (l, h) = optimal_errors(3);
        assert_eq!(l, 1.0 / 64.0);
        assert_relative_eq!(h, 1.0 / (4.0 * s3), max_relative = 1e-15);
    }

    #[test]
    fn greedy_points() {
        assert_eq!(fgreedy_point(1).unwrap(), 0.5);
        assert_eq!(fgreedy_point(2).unwrap(), 0.25);
        assert_eq!(fgreedy_point(3).unwrap(), 0.75);
        assert_eq!(fgreedy_point(5).unwrap(), 0.375);
        assert_eq!(fgreedy_point(7).unwrap(), 0.875);
    }

    #[test]
    fn greedy_errors() {
        let (l, h) = fgreedy_errors(1).unwrap();
        assert_eq!(l, 0.25);
        assert_relative_eq!(h, 1.0 / 3f64.sqrt(), max_relative = 1e-15);
        let (l, h) = fgreedy_errors(2).unwrap();
        assert_eq!(l, 1.0 / 16.0);
        assert_relative_eq!(h, 1.0 / 12f64.sqrt(), max_relative = 1e-15);
        assert_eq!(fgreedy_errors(4).unwrap().0, 1.0 / 64.0);
    }

    /// Native norm of the bisection residual from interval widths: Σ h³/3.
    fn bisection_native(n_points: usize) -> f64 {
        let mut xs: Vec<f64> = (1..=n_points as u64)
            .map(|k| fgreedy_point(k).unwrap())
            .collect();
        xs.push(0.0);
        xs.push(1.0);
        xs.sort_by(f64::total_cmp);
        (xs.windows(2).map(|w| (w[1] - w[0]).powi(3)).sum::<f64>() / 3.0).sqrt()
    }

    #[test]
    fn greedy_native_matches_interval_sum() {
        for n in 1..=127u64 {
            let (_, h) = fgreedy_errors(n).unwrap();
            assert_relative_eq!(h, bisection_native(n as usize - 1), max_relative = 1e-13);
        }
    }

    #[test]
    fn greedy_meets_optimal_at_complete_levels() {
        for ell in 1..8 {
            let n = (1usize << ell) - 1;
            // r_n for f-greedy is the residual before point n+1
            let (_, h) = fgreedy_errors(n as u64 + 1).unwrap();
            assert_relative_eq!(h, optimal_errors(n).1, max_relative = 1e-14);
        }
    }

    #[test]
    fn ratio_bound_values() {
        let (lo, hi) = ratio_bounds(1).unwrap();
        assert_relative_eq!(lo, 0.153_093_108_923_949, max_relative = 1e-12);
        assert_relative_eq!(hi, 0.866_025_403_784_438_6, max_relative = 1e-12);
        let (lo, hi) = ratio_bounds(3).unwrap();
        assert_relative_eq!(lo, 0.076_546_554_461_974_5, max_relative = 1e-12);
        assert_relative_eq!(hi, 0.433_012_701_892_219_3, max_relative = 1e-12);
        for n in 1..1000 {
            let (lo, hi) = ratio_bounds(n).unwrap();
            assert!(lo < hi);
        }
    }

    #[test]
    fn min_power_values() {
        assert_eq!(min_power_linf(0), 0.5);
        assert_eq!(min_power_linf(3), 0.25);
        assert_relative_eq!(min_power_linf(99), 0.05, max_relative = 1e-15);
    }

    #[test]
    fn fp_values() {
        assert_eq!(fp_eval(1.0, 0.5), 1.0);
        assert_eq!(fp_eval(3.0, 0.5), 1.0);
        assert_relative_eq!(fp_eval(1.0, 0.25), 0.75, max_relative = 1e-15);
    }

    #[test]
    fn fp_norm_domains() {
        assert!(fp_h1_norm(0.5).is_err());
        assert!(fp_h2_norm(1.5).is_err());
        assert!(fp_h1_norm(50.0).unwrap().is_finite());
        assert!(fp_h2_norm(50.0).unwrap().is_finite());
    }

    #[test]
    fn fp_h1_of_quadratic() {
        // f_1 = 4x(1-x): ∫ (4 - 8x)² = 16/3
        assert_relative_eq!(
            fp_h1_norm(1.0).unwrap(),
            4.0 / 3f64.sqrt(),
            max_relative = 1e-13
        );
    }

    #[test]
    fn fp_h2_of_quartic() {
        // f_2 = 16 x²(1-x)², f_2'' = 16 (12x² - 12x + 2): ∫ f_2''² = 256 * 4/5
        assert_relative_eq!(
            fp_h2_norm(2.0).unwrap(),
            204.8f64.sqrt(),
            max_relative = 1e-13
        );
    }
}
