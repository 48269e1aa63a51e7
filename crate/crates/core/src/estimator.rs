//! The kernel trend estimator tau_hat, its exact error decomposition against
//! the deterministic trend, and the pointwise statistic gamma_dot.
//!
//! The double integral defining tau_hat collapses, via Fubini, to a single
//! weighted sum over path increments with weights
//!
//! ```text
//! W(s, t) = Phi_K(s / h) - Phi_K((s - t) / h)  in [0, 1],
//! ```
//!
//! so evaluation costs O(n) per eval time instead of O(n^2).

use serde::{Deserialize, Serialize};

use crate::dsl::FunctionSpec;
use crate::error::{Error, Result};
use crate::fbm::fgn_covariance;
use crate::grid::Grid;
use crate::kernels::KernelSpec;
use crate::reflect::ReflectedPath;
use crate::trend::TrendSolution;

/// Where each increment's weight is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IncrementConvention {
    Left,
    /// Midpoint halves the quadrature bias of the weight evaluation.
    #[default]
    Midpoint,
}

impl IncrementConvention {
    fn point(&self, grid: &Grid, j: usize) -> f64 {
        match self {
            IncrementConvention::Left => grid.time(j),
            IncrementConvention::Midpoint => 0.5 * (grid.time(j) + grid.time(j + 1)),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EstimatorConfig {
    pub kernel: KernelSpec,
    pub bandwidth: f64,
    pub eval_times: Vec<f64>,
    pub convention: IncrementConvention,
}

impl EstimatorConfig {
    pub fn new(
        kernel: KernelSpec,
        bandwidth: f64,
        eval_times: Vec<f64>,
        convention: IncrementConvention,
    ) -> Result<Self> {
        if !(bandwidth > 0.0) || !bandwidth.is_finite() {
            return Err(Error::NonPositiveBandwidth(bandwidth));
        }
        Ok(Self {
            kernel,
            bandwidth,
            eval_times,
            convention,
        })
    }

    /// The rate-optimal rule h = eps^{1/(2-H)}.
    pub fn with_power_bandwidth(
        kernel: KernelSpec,
        epsilon: f64,
        hurst: f64,
        eval_times: Vec<f64>,
        convention: IncrementConvention,
    ) -> Result<Self> {
        Self::new(kernel, power_bandwidth(epsilon, hurst), eval_times, convention)
    }

    /// Diagnostic ratio eps / h^{1-H}; the bandwidth assumption asks for this
    /// to vanish as eps -> 0, which a single pair cannot certify. Reported,
    /// not enforced.
    pub fn bandwidth_diagnostic(&self, epsilon: f64, hurst: f64) -> f64 {
        epsilon / self.bandwidth.powf(1.0 - hurst)
    }
}

pub fn power_bandwidth(epsilon: f64, hurst: f64) -> f64 {
    epsilon.powf(1.0 / (2.0 - hurst))
}

/// W(s, t) = ∫_0^t K_h(s - u) du, evaluated through the kernel CDF.
pub fn weight(s: f64, t: f64, kernel: &KernelSpec, h: f64) -> f64 {
    kernel.cdf(s / h) - kernel.cdf((s - t) / h)
}

/// Index range of increments whose weight can be nonzero for eval time `t`:
/// the weight vanishes outside s in [h A, t + h B].
fn active_range(
    grid: &Grid,
    kernel: &KernelSpec,
    h: f64,
    t: f64,
    convention: IncrementConvention,
) -> (usize, usize) {
    let (a, b) = kernel.support();
    let dt = grid.dt();
    let offset = match convention {
        IncrementConvention::Left => 0.0,
        IncrementConvention::Midpoint => 0.5,
    };
    let lo = ((h * a) / dt - offset).floor() - 1.0;
    let hi = ((t + h * b) / dt - offset).ceil() + 1.0;
    let lo = lo.max(0.0) as usize;
    let hi = (hi.max(0.0) as usize).min(grid.n());
    (lo, hi)
}

/// tau_hat at each requested eval time: a weighted sum of path increments,
/// linear in the path.
pub fn estimate_trend(path: &[f64], grid: &Grid, cfg: &EstimatorConfig) -> Result<Vec<f64>> {
    if path.len() != grid.n() + 1 {
        return Err(Error::MismatchedGrids(format!(
            "path has {} nodes, grid has {}",
            path.len(),
            grid.n() + 1
        )));
    }
    let h = cfg.bandwidth;
    let mut out = Vec::with_capacity(cfg.eval_times.len());
    for &t in &cfg.eval_times {
        if !(0.0..=grid.horizon() * (1.0 + 1e-12)).contains(&t) {
            return Err(Error::EvalTimeOutOfRange {
                t,
                horizon: grid.horizon(),
            });
        }
        let (lo, hi) = active_range(grid, &cfg.kernel, h, t, cfg.convention);
        let mut acc = 0.0;
        for j in lo..hi {
            let s = cfg.convention.point(grid, j);
            acc += weight(s, t, &cfg.kernel, h) * (path[j + 1] - path[j]);
        }
        out.push(acc);
    }
    Ok(out)
}

/// The five-way split of tau_hat(t) - tau(t). Components sum to the total
/// exactly (up to roundoff) because the scheme identity
/// dX = b(X) dt + eps dB + dY is algebraic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorDecomposition {
    /// drift mismatch along the noisy path
    pub alpha: f64,
    /// kernel-smoothing bias of the drift integral
    pub beta: f64,
    /// smoothed noise
    pub gamma: f64,
    /// reflection mismatch
    pub zeta: f64,
    /// kernel-smoothing bias of the reflection term
    pub eta: f64,
    /// tau_hat(t) - tau(t), computed independently of the split
    pub total: f64,
}

impl ErrorDecomposition {
    pub fn sum(&self) -> f64 {
        self.alpha + self.beta + self.gamma + self.zeta + self.eta
    }

    pub fn residual(&self) -> f64 {
        (self.sum() - self.total).abs()
    }
}

/// Decompose the estimation error at grid index `t_index`.
///
/// All arrays must live on one grid and the noisy path must come from the
/// catching-up scheme driven by `eps * fbm`.
pub fn decompose_error(
    noisy: &ReflectedPath,
    trend: &TrendSolution,
    fbm_values: &[f64],
    drift: &FunctionSpec,
    epsilon: f64,
    cfg: &EstimatorConfig,
    t_index: usize,
) -> Result<ErrorDecomposition> {
    let grid = noisy.grid;
    if trend.grid != grid {
        return Err(Error::MismatchedGrids(
            "noisy path and trend solution grids differ".into(),
        ));
    }
    if fbm_values.len() != grid.n() + 1 {
        return Err(Error::MismatchedGrids(format!(
            "fbm path has {} nodes, grid has {}",
            fbm_values.len(),
            grid.n() + 1
        )));
    }
    if t_index > grid.n() {
        return Err(Error::EvalTimeOutOfRange {
            t: t_index as f64,
            horizon: grid.n() as f64,
        });
    }

    let n = grid.n();
    let dt = grid.dt();
    let h = cfg.bandwidth;
    let t = grid.time(t_index);
    let x0 = trend.x0();

    let mut alpha = 0.0;
    let mut beta_smooth = 0.0;
    let mut gamma = 0.0;
    let mut zeta = 0.0;
    let mut eta_smooth = 0.0;
    let mut tau_hat = 0.0;

    for j in 0..n {
        let s = cfg.convention.point(&grid, j);
        let w = weight(s, t, &cfg.kernel, h);
        if w != 0.0 {
            let b_noisy = drift.eval(noisy.state[j])?;
            let b_trend = drift.eval(trend.state[j])?;
            alpha += w * (b_noisy - b_trend) * dt;
            beta_smooth += w * b_trend * dt;
            gamma += w * (fbm_values[j + 1] - fbm_values[j]);
            zeta += w
                * ((noisy.reflection[j + 1] - noisy.reflection[j])
                    - (trend.reflection[j + 1] - trend.reflection[j]));
            eta_smooth += w * (trend.reflection[j + 1] - trend.reflection[j]);
            tau_hat += w * (noisy.state[j + 1] - noisy.state[j]);
        }
    }
    gamma *= epsilon;

    // left Riemann sum of b over [0, t), matching the scheme's drift sum
    let mut drift_sum = 0.0;
    for j in 0..t_index {
        drift_sum += drift.eval(trend.state[j])? * dt;
    }
    let beta = beta_smooth - drift_sum;
    let eta = eta_smooth - (trend.reflection[t_index] - x0);
    let total = tau_hat - trend.trend[t_index];

    Ok(ErrorDecomposition {
        alpha,
        beta,
        gamma,
        zeta,
        eta,
        total,
    })
}

/// gamma_dot(t) = eps Σ_j K_h(s_j - t) dB_j: the mollified noise derivative.
/// Exactly Gaussian, being linear in the Gaussian increments.
pub fn gamma_dot(
    fbm_values: &[f64],
    grid: &Grid,
    kernel: &KernelSpec,
    h: f64,
    t: f64,
    epsilon: f64,
    convention: IncrementConvention,
) -> Result<f64> {
    if fbm_values.len() != grid.n() + 1 {
        return Err(Error::MismatchedGrids(format!(
            "fbm path has {} nodes, grid has {}",
            fbm_values.len(),
            grid.n() + 1
        )));
    }
    check_gamma_dot_support(kernel, h, t, grid.horizon())?;
    let mut acc = 0.0;
    for j in 0..grid.n() {
        let s = convention.point(grid, j);
        acc += kernel.pdf((s - t) / h) / h * (fbm_values[j + 1] - fbm_values[j]);
    }
    Ok(epsilon * acc)
}

/// The kernel window around `t` must sit inside the observation horizon.
pub fn check_gamma_dot_support(
    kernel: &KernelSpec,
    h: f64,
    t: f64,
    horizon: f64,
) -> Result<()> {
    let (a, b) = kernel.support();
    let lo = t + h * a;
    let hi = t + h * b;
    if lo < -1e-12 || hi > horizon * (1.0 + 1e-12) {
        return Err(Error::SupportViolation { t, lo, hi, horizon });
    }
    Ok(())
}

/// Exact variance of the discrete gamma_dot:
/// eps^2 Σ_{j,k} K_h(s_j - t) K_h(s_k - t) gamma_fgn(|j - k|).
pub fn gamma_dot_exact_variance(
    grid: &Grid,
    kernel: &KernelSpec,
    h: f64,
    t: f64,
    hurst: f64,
    epsilon: f64,
    convention: IncrementConvention,
) -> Result<f64> {
    check_gamma_dot_support(kernel, h, t, grid.horizon())?;
    let dt = grid.dt();
    let mut coeffs = Vec::new();
    let mut first = None;
    for j in 0..grid.n() {
        let s = convention.point(grid, j);
        let c = kernel.pdf((s - t) / h) / h;
        if c != 0.0 {
            if first.is_none() {
                first = Some(j);
            }
            coeffs.push(c);
        } else if first.is_some() {
            break;
        }
    }
    let m = coeffs.len();
    let mut cov = Vec::with_capacity(m);
    for lag in 0..m {
        cov.push(fgn_covariance(hurst, lag, dt)?);
    }
    let mut var = 0.0;
    for i in 0..m {
        for j in 0..m {
            var += coeffs[i] * coeffs[j] * cov[i.abs_diff(j)];
        }
    }
    Ok(epsilon * epsilon * var)
}
