//! Monte Carlo studies: risk curves and their log-log rate, the eps^2
//! scaling of the solution deviation, and the pointwise asymptotics of the
//! estimator.
//!
//! Determinism contract: replication r draws from the stream
//! (master_seed, r) only, and every aggregation is an ordered fold over
//! replication index, so reports are byte-identical for any worker count.
//! Within one replication the same fractional Brownian path drives every
//! epsilon (common random numbers), which stabilizes slope estimates.

use rayon::prelude::*;
use serde::Serialize;

use crate::dsl::FunctionSpec;
use crate::error::{Error, Result};
use crate::estimator::{
    decompose_error, estimate_trend, gamma_dot, gamma_dot_exact_variance, power_bandwidth,
    EstimatorConfig, IncrementConvention,
};
use crate::fbm::{FbmMethod, FbmSampler, SeedSpec, GENERATOR_NAME};
use crate::grid::Grid;
use crate::kernels::KernelSpec;
use crate::reflect::{solve_reflected, TubeGrid, TubeSpec};
use crate::trend::{solve_trend, ydot, TrendSolution};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BandwidthRule {
    /// h = eps^{1/(2-H)}, the rate-optimal choice.
    Power,
    Fixed(f64),
}

/// Full definition of a Monte Carlo experiment.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub hurst: f64,
    pub horizon: f64,
    pub steps: usize,
    pub x0: f64,
    pub drift: FunctionSpec,
    pub tube: TubeSpec,
    pub kernel: KernelSpec,
    pub epsilons: Vec<f64>,
    pub bandwidth: BandwidthRule,
    pub replications: usize,
    pub master_seed: u64,
    pub eval_times: Option<Vec<f64>>,
    pub convention: IncrementConvention,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.hurst > 0.5 && self.hurst < 1.0) {
            return Err(Error::HurstOutOfRange(self.hurst));
        }
        if self.epsilons.is_empty() {
            return Err(Error::InvalidConfig("epsilons must be non-empty".into()));
        }
        for w in self.epsilons.windows(2) {
            if !(w[1] < w[0]) {
                return Err(Error::InvalidConfig(format!(
                    "epsilons must be strictly decreasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        if self.epsilons.iter().any(|&e| !(e > 0.0)) {
            return Err(Error::InvalidConfig("epsilons must be positive".into()));
        }
        if self.replications < 2 {
            return Err(Error::InvalidConfig(format!(
                "replications must be at least 2, got {}",
                self.replications
            )));
        }
        if let BandwidthRule::Fixed(h) = self.bandwidth {
            if !(h > 0.0) {
                return Err(Error::NonPositiveBandwidth(h));
            }
        }
        Ok(())
    }

    pub fn bandwidth_for(&self, epsilon: f64) -> f64 {
        match self.bandwidth {
            BandwidthRule::Power => power_bandwidth(epsilon, self.hurst),
            BandwidthRule::Fixed(h) => h,
        }
    }
}

/// Everything shared across replications: the grid, the discretized tube,
/// the noiseless trend (solved once), the cached noise factorization and the
/// evaluation grid. Read-only once built.
pub struct Experiment {
    cfg: ExperimentConfig,
    grid: Grid,
    tube_grid: TubeGrid,
    trend: TrendSolution,
    sampler: FbmSampler,
    eval_times: Vec<f64>,
    eval_indices: Vec<usize>,
}

/// Outcome of one replication at one epsilon.
#[derive(Debug, Clone, PartialEq)]
pub struct RepRecord {
    pub rep_index: u64,
    pub epsilon: f64,
    /// sup over the eval grid of |tau_hat - tau|^2
    pub sup_sq_error: f64,
    /// squared error at each eval time
    pub pointwise_sq_error: Vec<f64>,
    /// sup over the full grid of |X_eps - x|^2
    pub sup_x_dev_sq: f64,
    /// sup over the full grid of |Y_eps - y|^2
    pub sup_y_dev_sq: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    /// 95% half-width (1.96 standard errors)
    pub ci_half_width: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RiskEntry {
    pub epsilon: f64,
    pub bandwidth: f64,
    pub risk: f64,
    pub std_error: f64,
    pub pointwise_risk: Vec<f64>,
    /// eps / h^{1-H}: the bandwidth-assumption diagnostic
    pub assumption_ratio: f64,
    /// h / dt: discretization headroom of the kernel window
    pub bandwidth_steps: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportMetadata {
    pub master_seed: u64,
    pub generator: &'static str,
    pub hurst: f64,
    pub horizon: f64,
    pub steps: usize,
    pub replications: usize,
    pub kernel: String,
    pub drift: String,
    pub tube_lower: String,
    pub tube_upper: String,
    pub eval_times: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RiskReport {
    pub entries: Vec<RiskEntry>,
    pub fit: SlopeFit,
    pub target_slope: f64,
    pub metadata: ReportMetadata,
}

#[derive(Debug, Clone, Serialize)]
pub struct Lemma4Entry {
    pub epsilon: f64,
    pub x_risk: f64,
    pub x_std_error: f64,
    pub y_risk: f64,
    pub y_std_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Lemma4Report {
    pub entries: Vec<Lemma4Entry>,
    pub x_fit: SlopeFit,
    /// None when some Y risk vanishes (no boundary contact in any
    /// replication), which makes the log-log fit undefined.
    pub y_fit: Option<SlopeFit>,
    pub target_slope: f64,
    pub metadata: ReportMetadata,
}

#[derive(Debug, Clone, Serialize)]
pub struct VarianceCheck {
    pub epsilon: f64,
    pub bandwidth: f64,
    /// exact discrete variance of the scaled gamma_dot over sigma2_{H,K}
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GaussianCheck {
    pub epsilon: f64,
    /// Kolmogorov-Smirnov distance of the scaled samples against the exact
    /// discrete Gaussian law
    pub ks_statistic: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticsReport {
    pub t: f64,
    pub sigma2: f64,
    pub variance_checks: Vec<VarianceCheck>,
    /// limit of the scaled deterministic bias components; absent when the
    /// kernel support starts left of zero, where the limit statement does
    /// not apply
    pub mu: Option<f64>,
    /// intercept of the Monte Carlo extrapolation
    pub mu_hat: Option<f64>,
    pub scaled_bias_means: Vec<(f64, f64)>,
    pub gaussian_checks: Vec<GaussianCheck>,
    pub metadata: ReportMetadata,
}

impl Experiment {
    pub fn prepare(cfg: ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let grid = Grid::new(cfg.steps, cfg.horizon)?;
        let tube_grid = cfg.tube.discretize(&grid)?;
        if cfg.x0 < tube_grid.lower[0] || cfg.x0 > tube_grid.upper[0] {
            return Err(Error::InitialStateOutsideTube {
                x0: cfg.x0,
                lower: tube_grid.lower[0],
                upper: tube_grid.upper[0],
            });
        }
        let trend = solve_trend(&cfg.drift, &tube_grid, cfg.x0)?;
        let sampler = FbmSampler::new(cfg.hurst, cfg.steps, cfg.horizon, FbmMethod::Cholesky)?;

        let eval_times = match &cfg.eval_times {
            Some(times) => times.clone(),
            None => default_eval_times(&cfg, &grid),
        };
        let mut snapped = Vec::with_capacity(eval_times.len());
        let mut eval_indices = Vec::with_capacity(eval_times.len());
        for &t in &eval_times {
            if !(0.0..=grid.horizon() * (1.0 + 1e-12)).contains(&t) {
                return Err(Error::EvalTimeOutOfRange {
                    t,
                    horizon: grid.horizon(),
                });
            }
            // evaluation happens on grid nodes so tau and the decomposition
            // are exact there
            let idx = ((t / grid.dt()).round() as usize).min(grid.n());
            eval_indices.push(idx);
            snapped.push(grid.time(idx));
        }
        Ok(Self {
            cfg,
            grid,
            tube_grid,
            trend,
            sampler,
            eval_times: snapped,
            eval_indices,
        })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.cfg
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn tube_grid(&self) -> &TubeGrid {
        &self.tube_grid
    }

    pub fn trend(&self) -> &TrendSolution {
        &self.trend
    }

    pub fn eval_times(&self) -> &[f64] {
        &self.eval_times
    }

    pub fn metadata(&self) -> ReportMetadata {
        ReportMetadata {
            master_seed: self.cfg.master_seed,
            generator: GENERATOR_NAME,
            hurst: self.cfg.hurst,
            horizon: self.cfg.horizon,
            steps: self.cfg.steps,
            replications: self.cfg.replications,
            kernel: self.cfg.kernel.family().name().to_string(),
            drift: self.cfg.drift.source().to_string(),
            tube_lower: self.cfg.tube.lower().source().to_string(),
            tube_upper: self.cfg.tube.upper().source().to_string(),
            eval_times: self.eval_times.clone(),
        }
    }

    pub fn eval_indices(&self) -> &[usize] {
        &self.eval_indices
    }

    /// The fractional Brownian path driving replication `rep`.
    pub fn sample_path(&self, rep: u64) -> crate::fbm::FbmPath {
        self.sampler.sample(SeedSpec::new(self.cfg.master_seed, rep))
    }

    /// Solve the noisy system driven by `epsilon * fbm`.
    pub fn solve_noisy(
        &self,
        fbm: &crate::fbm::FbmPath,
        epsilon: f64,
    ) -> Result<crate::reflect::ReflectedPath> {
        let noise: Vec<f64> = fbm.values.iter().map(|b| epsilon * b).collect();
        solve_reflected(&self.cfg.drift, &self.tube_grid, &noise, self.cfg.x0)
    }

    pub fn estimator_config(&self, epsilon: f64) -> Result<EstimatorConfig> {
        EstimatorConfig::new(
            self.cfg.kernel,
            self.cfg.bandwidth_for(epsilon),
            self.eval_times.clone(),
            self.cfg.convention,
        )
    }

    fn record_for(&self, path_values: &[f64], epsilon: f64, rep: u64) -> Result<RepRecord> {
        let noise: Vec<f64> = path_values.iter().map(|b| epsilon * b).collect();
        let noisy = solve_reflected(&self.cfg.drift, &self.tube_grid, &noise, self.cfg.x0)?;
        let est_cfg = self.estimator_config(epsilon)?;
        let tau_hat = estimate_trend(&noisy.state, &self.grid, &est_cfg)?;

        let mut sup_sq = 0.0_f64;
        let mut pointwise = Vec::with_capacity(self.eval_indices.len());
        for (i, &idx) in self.eval_indices.iter().enumerate() {
            let err = tau_hat[i] - self.trend.trend[idx];
            let sq = err * err;
            pointwise.push(sq);
            sup_sq = sup_sq.max(sq);
        }
        let mut sup_x = 0.0_f64;
        let mut sup_y = 0.0_f64;
        for k in 0..=self.grid.n() {
            let dx = noisy.state[k] - self.trend.state[k];
            let dy = noisy.reflection[k] - self.trend.reflection[k];
            sup_x = sup_x.max(dx * dx);
            sup_y = sup_y.max(dy * dy);
        }
        Ok(RepRecord {
            rep_index: rep,
            epsilon,
            sup_sq_error: sup_sq,
            pointwise_sq_error: pointwise,
            sup_x_dev_sq: sup_x,
            sup_y_dev_sq: sup_y,
        })
    }

    /// One replication at one epsilon. Deterministic in
    /// (config, epsilon, rep_index); the driving path depends on rep_index
    /// only, so all epsilons of one replication are coupled.
    pub fn run_replication(&self, epsilon: f64, rep: u64) -> Result<RepRecord> {
        let path = self.sampler.sample(SeedSpec::new(self.cfg.master_seed, rep));
        self.record_for(&path.values, epsilon, rep)
    }

    /// All epsilons of one replication, sharing one sampled path.
    fn run_replication_all(&self, rep: u64) -> Result<Vec<RepRecord>> {
        let path = self.sampler.sample(SeedSpec::new(self.cfg.master_seed, rep));
        self.cfg
            .epsilons
            .iter()
            .map(|&eps| self.record_for(&path.values, eps, rep))
            .collect()
    }

    fn all_records(&self) -> Result<Vec<Vec<RepRecord>>> {
        (0..self.cfg.replications as u64)
            .into_par_iter()
            .map(|rep| self.run_replication_all(rep))
            .collect()
    }

    /// Mean over replications of the sup-grid squared error, with its
    /// standard error.
    pub fn estimate_risk(&self, epsilon: f64) -> Result<(f64, f64)> {
        let sups: Vec<f64> = (0..self.cfg.replications as u64)
            .into_par_iter()
            .map(|rep| self.run_replication(epsilon, rep).map(|r| r.sup_sq_error))
            .collect::<Result<_>>()?;
        Ok(summarize(&sups))
    }

    /// The full risk sweep: per-epsilon risks and the fitted log-log slope
    /// against the target 2 / (2 - H).
    pub fn run_risk_sweep(&self) -> Result<RiskReport> {
        let records = self.all_records()?;
        let n_eps = self.cfg.epsilons.len();
        let mut entries = Vec::with_capacity(n_eps);
        for (e_idx, &eps) in self.cfg.epsilons.iter().enumerate() {
            let sups: Vec<f64> = records.iter().map(|r| r[e_idx].sup_sq_error).collect();
            let (risk, std_error) = summarize(&sups);
            let mut pointwise_risk = vec![0.0; self.eval_indices.len()];
            for rep in &records {
                for (i, &sq) in rep[e_idx].pointwise_sq_error.iter().enumerate() {
                    pointwise_risk[i] += sq;
                }
            }
            for v in &mut pointwise_risk {
                *v /= records.len() as f64;
            }
            let h = self.cfg.bandwidth_for(eps);
            entries.push(RiskEntry {
                epsilon: eps,
                bandwidth: h,
                risk,
                std_error,
                pointwise_risk,
                assumption_ratio: eps / h.powf(1.0 - self.cfg.hurst),
                bandwidth_steps: h / self.grid.dt(),
            });
        }
        let points: Vec<(f64, f64)> = entries.iter().map(|e| (e.epsilon, e.risk)).collect();
        let fit = rate_regression(&points)?;
        Ok(RiskReport {
            entries,
            fit,
            target_slope: 2.0 / (2.0 - self.cfg.hurst),
            metadata: self.metadata(),
        })
    }

    /// log-log slopes of E sup|X_eps - x|^2 and E sup|Y_eps - y|^2 against
    /// the eps^2 bound.
    pub fn lemma4_study(&self) -> Result<Lemma4Report> {
        let records = self.all_records()?;
        let mut entries = Vec::new();
        for (e_idx, &eps) in self.cfg.epsilons.iter().enumerate() {
            let xs: Vec<f64> = records.iter().map(|r| r[e_idx].sup_x_dev_sq).collect();
            let ys: Vec<f64> = records.iter().map(|r| r[e_idx].sup_y_dev_sq).collect();
            let (x_risk, x_se) = summarize(&xs);
            let (y_risk, y_se) = summarize(&ys);
            entries.push(Lemma4Entry {
                epsilon: eps,
                x_risk,
                x_std_error: x_se,
                y_risk,
                y_std_error: y_se,
            });
        }
        let x_points: Vec<(f64, f64)> =
            entries.iter().map(|e| (e.epsilon, e.x_risk)).collect();
        let x_fit = rate_regression(&x_points)?;
        let y_points: Vec<(f64, f64)> =
            entries.iter().map(|e| (e.epsilon, e.y_risk)).collect();
        let y_fit = rate_regression(&y_points).ok();
        Ok(Lemma4Report {
            entries,
            x_fit,
            y_fit,
            target_slope: 2.0,
            metadata: self.metadata(),
        })
    }

    /// Pointwise asymptotics at time `t`: the exact variance of the scaled
    /// gamma_dot against sigma2_{H,K}, the Monte Carlo extrapolation of the
    /// scaled bias against mu(t), and Gaussianity of the scaled samples.
    ///
    /// The bias-limit part needs a kernel supported on [A, B] with A >= 0;
    /// for two-sided kernels only the variance and Gaussianity checks run.
    pub fn asymptotic_study(&self, t: f64) -> Result<AsymptoticsReport> {
        let (supp_lo, _) = self.cfg.kernel.support();
        let bias_part = supp_lo >= 0.0;
        let t_index = self.grid.index_of(t)?;
        let hurst = self.cfg.hurst;
        let expo = 1.0 / (2.0 - hurst);
        let sigma2 = self.cfg.kernel.sigma2(hurst)?;

        // mu(t) = (b(x(t)) - b(x(0)) + ydot(t) - ydot(0)) ∫ K(u) u du.
        // ydot(0) is taken at the first interior stable index; errors at a
        // regime transition propagate, as the limit is undefined there.
        let mu = if bias_part {
            let ydot_t = ydot(&self.cfg.drift, &self.tube_grid, &self.trend, t_index)?;
            let ydot_0 = ydot(&self.cfg.drift, &self.tube_grid, &self.trend, 1)?;
            let b_t = self.cfg.drift.eval(self.trend.state[t_index])?;
            let b_0 = self.cfg.drift.eval(self.trend.state[0])?;
            Some((b_t - b_0 + ydot_t - ydot_0) * self.cfg.kernel.first_moment())
        } else {
            None
        };

        let mut variance_checks = Vec::new();
        for &eps in &self.cfg.epsilons {
            let h = self.cfg.bandwidth_for(eps);
            let exact = gamma_dot_exact_variance(
                &self.grid,
                &self.cfg.kernel,
                h,
                t,
                hurst,
                eps,
                self.cfg.convention,
            )?;
            let scaled = exact * eps.powf(-2.0 * expo);
            variance_checks.push(VarianceCheck {
                epsilon: eps,
                bandwidth: h,
                ratio: scaled / sigma2,
            });
        }

        // Monte Carlo samples of the scaled bias and of the scaled gamma_dot
        struct RepOut {
            scaled_bias: Vec<f64>,
            scaled_gdot: Vec<f64>,
        }
        let reps: Vec<RepOut> = (0..self.cfg.replications as u64)
            .into_par_iter()
            .map(|rep| -> Result<RepOut> {
                let path = self
                    .sampler
                    .sample(SeedSpec::new(self.cfg.master_seed, rep));
                let mut scaled_bias = Vec::with_capacity(self.cfg.epsilons.len());
                let mut scaled_gdot = Vec::with_capacity(self.cfg.epsilons.len());
                for &eps in &self.cfg.epsilons {
                    let h = self.cfg.bandwidth_for(eps);
                    if bias_part {
                        let noise: Vec<f64> =
                            path.values.iter().map(|b| eps * b).collect();
                        let noisy = solve_reflected(
                            &self.cfg.drift,
                            &self.tube_grid,
                            &noise,
                            self.cfg.x0,
                        )?;
                        let est_cfg = EstimatorConfig::new(
                            self.cfg.kernel,
                            h,
                            Vec::new(),
                            self.cfg.convention,
                        )?;
                        let d = decompose_error(
                            &noisy,
                            &self.trend,
                            &path.values,
                            &self.cfg.drift,
                            eps,
                            &est_cfg,
                            t_index,
                        )?;
                        scaled_bias.push((d.total - d.gamma) * eps.powf(-expo));
                    }
                    let g = gamma_dot(
                        &path.values,
                        &self.grid,
                        &self.cfg.kernel,
                        h,
                        t,
                        eps,
                        self.cfg.convention,
                    )?;
                    scaled_gdot.push(g * eps.powf(-expo));
                }
                Ok(RepOut {
                    scaled_bias,
                    scaled_gdot,
                })
            })
            .collect::<Result<_>>()?;

        let mut scaled_bias_means = Vec::new();
        let mu_hat = if bias_part {
            let mut hs = Vec::new();
            for (e_idx, &eps) in self.cfg.epsilons.iter().enumerate() {
                let mean = reps.iter().map(|r| r.scaled_bias[e_idx]).sum::<f64>()
                    / reps.len() as f64;
                scaled_bias_means.push((eps, mean));
                hs.push(self.cfg.bandwidth_for(eps));
            }
            // extrapolate to h = 0 with a two-parameter fit mean = mu + c h
            let ys: Vec<f64> = scaled_bias_means.iter().map(|p| p.1).collect();
            Some(intercept_fit(&hs, &ys))
        } else {
            None
        };

        let mut gaussian_checks = Vec::new();
        let threshold = 1.6276 / (reps.len() as f64).sqrt(); // KS at level 0.01
        for (e_idx, check) in variance_checks.iter().enumerate() {
            let sd = (check.ratio * sigma2).sqrt();
            let mut samples: Vec<f64> =
                reps.iter().map(|r| r.scaled_gdot[e_idx]).collect();
            samples.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
            let ks = ks_distance_normal(&samples, sd);
            gaussian_checks.push(GaussianCheck {
                epsilon: check.epsilon,
                ks_statistic: ks,
                threshold,
                pass: ks <= threshold,
            });
        }

        Ok(AsymptoticsReport {
            t: self.grid.time(t_index),
            sigma2,
            variance_checks,
            mu,
            mu_hat,
            scaled_bias_means,
            gaussian_checks,
            metadata: self.metadata(),
        })
    }
}

/// 64 interior eval points, clear of edge effects: margins of width
/// h_max * max(|A|, |B|) are excluded on both sides, h_max taken at the
/// largest epsilon so the grid is shared across the whole sweep.
fn default_eval_times(cfg: &ExperimentConfig, grid: &Grid) -> Vec<f64> {
    let (a, b) = cfg.kernel.support();
    let h_max = cfg
        .epsilons
        .iter()
        .map(|&e| cfg.bandwidth_for(e))
        .fold(0.0_f64, f64::max);
    let margin = (h_max * a.abs().max(b.abs())).min(0.45 * grid.horizon());
    let lo = margin;
    let hi = grid.horizon() - margin;
    let count = 64;
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

/// Sample mean and its standard error.
pub fn summarize(values: &[f64]) -> (f64, f64) {
    let r = values.len() as f64;
    let mean = values.iter().sum::<f64>() / r;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (r - 1.0);
    (mean, (var / r).sqrt())
}

/// Ordinary least squares of log risk on log epsilon.
pub fn rate_regression(points: &[(f64, f64)]) -> Result<SlopeFit> {
    if points.len() < 3 {
        return Err(Error::NotEnoughPoints {
            need: 3,
            got: points.len(),
        });
    }
    for &(_, risk) in points {
        if !(risk > 0.0) {
            return Err(Error::NonPositiveRisk(risk));
        }
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let dof = (n - 2.0).max(1.0);
    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let stderr = (rss / dof / sxx).sqrt();
    Ok(SlopeFit {
        slope,
        intercept,
        stderr,
        ci_half_width: 1.96 * stderr,
    })
}

fn intercept_fit(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    my - slope * mx
}

/// Kolmogorov-Smirnov distance of sorted samples against N(0, sd^2).
fn ks_distance_normal(sorted: &[f64], sd: f64) -> f64 {
    let n = sorted.len() as f64;
    let mut d = 0.0_f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = normal_cdf(x / sd);
        d = d.max((f - i as f64 / n).abs());
        d = d.max(((i + 1) as f64 / n - f).abs());
    }
    d
}

/// Standard normal CDF via the Abramowitz-Stegun 7.1.26 erf approximation;
/// absolute error below 1.5e-7, plenty for distance tests.
fn normal_cdf(z: f64) -> f64 {
    let x = z / std::f64::consts::SQRT_2;
    let t = 1.0 / (1.0 + 0.327_591_1 * x.abs());
    let poly = t
        * (0.254_829_592
            + t * (-0.284_496_736
                + t * (1.421_413_741 + t * (-1.453_152_027 + t * 1.061_405_429))));
    let erf_abs = 1.0 - poly * (-x * x).exp();
    let erf = if x >= 0.0 { erf_abs } else { -erf_abs };
    0.5 * (1.0 + erf)
}
