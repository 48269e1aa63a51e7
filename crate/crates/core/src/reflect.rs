//! Catching-up (projected Euler) scheme for the reflected system inside a
//! moving interval [l(t), u(t)].
//!
//! Each step projects the Euler predictor onto the current interval, which
//! keeps the state inside the constraint exactly and makes the discrete
//! Skorokhod decomposition
//!
//! ```text
//! X_k = sum_{j<k} b(X_j) dt + W_k + Y_k,   Y_0 = x0
//! ```
//!
//! an algebraic identity of the recursion.

use crate::dsl::FunctionSpec;
use crate::error::{Error, Result};
use crate::grid::Grid;

/// The moving constraint interval, defined by two C^1 boundary functions of
/// time. Derivatives are taken symbolically at construction.
#[derive(Debug, Clone)]
pub struct TubeSpec {
    lower: FunctionSpec,
    upper: FunctionSpec,
    lower_dot: crate::dsl::Expr,
    upper_dot: crate::dsl::Expr,
}

impl TubeSpec {
    pub fn new(lower: FunctionSpec, upper: FunctionSpec) -> Self {
        let lower_dot = lower.derivative();
        let upper_dot = upper.derivative();
        Self {
            lower,
            upper,
            lower_dot,
            upper_dot,
        }
    }

    pub fn lower(&self) -> &FunctionSpec {
        &self.lower
    }

    pub fn upper(&self) -> &FunctionSpec {
        &self.upper
    }

    /// Boundaries built from kinked primitives are only piecewise C^1; the
    /// classification and derivative formulas downstream assume better.
    pub fn c1_warnings(&self) -> Vec<String> {
        let mut warnings = Vec::new();
        for (name, f) in [("lower", &self.lower), ("upper", &self.upper)] {
            if !f.expr().is_smooth() {
                warnings.push(format!(
                    "{name} boundary `{}` uses abs/sign/min/max/clamp and may not be C^1",
                    f.source()
                ));
            }
        }
        warnings
    }

    /// Evaluate boundaries and their derivatives on the grid, checking the
    /// gap l(t) < u(t) at every node.
    pub fn discretize(&self, grid: &Grid) -> Result<TubeGrid> {
        let n = grid.n();
        let mut lower = Vec::with_capacity(n + 1);
        let mut upper = Vec::with_capacity(n + 1);
        let mut lower_dot = Vec::with_capacity(n + 1);
        let mut upper_dot = Vec::with_capacity(n + 1);
        let mut min_gap = f64::INFINITY;
        for k in 0..=n {
            let t = grid.time(k);
            let l = self.lower.eval(t)?;
            let u = self.upper.eval(t)?;
            if !(l < u) {
                return Err(Error::TubeGapViolation { t, lower: l, upper: u });
            }
            min_gap = min_gap.min(u - l);
            lower.push(l);
            upper.push(u);
            lower_dot.push(self.lower_dot.eval(t)?);
            upper_dot.push(self.upper_dot.eval(t)?);
        }
        let dt = grid.dt();
        let mut lip = 0.0_f64;
        for k in 0..n {
            lip = lip
                .max((lower[k + 1] - lower[k]).abs() / dt)
                .max((upper[k + 1] - upper[k]).abs() / dt);
        }
        Ok(TubeGrid {
            grid: *grid,
            lower,
            upper,
            lower_dot,
            upper_dot,
            min_gap,
            lip,
        })
    }
}

/// Grid samples of the tube boundaries, their derivatives, and the grid
/// Lipschitz constant of the multifunction.
#[derive(Debug, Clone)]
pub struct TubeGrid {
    grid: Grid,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub lower_dot: Vec<f64>,
    pub upper_dot: Vec<f64>,
    min_gap: f64,
    lip: f64,
}

impl TubeGrid {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn min_gap(&self) -> f64 {
        self.min_gap
    }

    /// max_k max(|dl|, |du|) / dt, the grid estimate of ||C||_Lip.
    pub fn lip(&self) -> f64 {
        self.lip
    }
}

/// min(max(x, lo), hi); realizes the normal-cone inclusion for an interval.
pub fn project_interval(x: f64, lo: f64, hi: f64) -> Result<f64> {
    if lo > hi {
        return Err(Error::EmptyInterval { lo, hi });
    }
    Ok(x.max(lo).min(hi))
}

/// Discrete Skorokhod decomposition produced by the scheme.
#[derive(Debug, Clone)]
pub struct ReflectedPath {
    pub grid: Grid,
    /// X: the constrained state, l(t_k) <= state[k] <= u(t_k).
    pub state: Vec<f64>,
    /// Y: the reflection term, finite 1-variation, reflection[0] = x0.
    pub reflection: Vec<f64>,
    /// W: the driving noise used (eps * B, or zeros).
    pub noise: Vec<f64>,
}

impl ReflectedPath {
    /// Largest violation of the telescoping identity
    /// X_k - (sum_{j<k} b(X_j) dt + W_k + Y_k); zero up to roundoff.
    pub fn decomposition_residual(&self, drift: &FunctionSpec) -> Result<f64> {
        let dt = self.grid.dt();
        let mut drift_sum = 0.0;
        let mut worst = 0.0_f64;
        for k in 0..self.state.len() {
            let lhs = self.state[k];
            let rhs = drift_sum + self.noise[k] + self.reflection[k];
            worst = worst.max((lhs - rhs).abs());
            if k < self.state.len() - 1 {
                drift_sum += drift.eval(self.state[k])? * dt;
            }
        }
        Ok(worst)
    }
}

/// Run the catching-up scheme:
/// X_{k+1} = proj_{[l_{k+1}, u_{k+1}]}(X_k + b(X_k) dt + dW_k), with the
/// reflection increment dY_k = X_{k+1} - predictor.
pub fn solve_reflected(
    drift: &FunctionSpec,
    tube: &TubeGrid,
    noise: &[f64],
    x0: f64,
) -> Result<ReflectedPath> {
    let grid = tube.grid;
    let n = grid.n();
    if noise.len() != n + 1 {
        return Err(Error::NoiseLengthMismatch {
            got: noise.len(),
            expected: n + 1,
        });
    }
    if noise[0] != 0.0 {
        return Err(Error::NoiseNonzeroStart(noise[0]));
    }
    if x0 < tube.lower[0] || x0 > tube.upper[0] {
        return Err(Error::InitialStateOutsideTube {
            x0,
            lower: tube.lower[0],
            upper: tube.upper[0],
        });
    }
    let dt = grid.dt();
    let mut state = Vec::with_capacity(n + 1);
    let mut reflection = Vec::with_capacity(n + 1);
    state.push(x0);
    reflection.push(x0);
    for k in 0..n {
        let x = state[k];
        let predictor = x + drift.eval(x)? * dt + (noise[k + 1] - noise[k]);
        let projected = project_interval(predictor, tube.lower[k + 1], tube.upper[k + 1])?;
        state.push(projected);
        // dY computed before adding, so no-contact steps leave Y bit-identical
        reflection.push(reflection[k] + (projected - predictor));
    }
    Ok(ReflectedPath {
        grid,
        state,
        reflection,
        noise: noise.to_vec(),
    })
}

/// Discrete 1-variation sum |dY_k|.
pub fn path_variation(values: &[f64]) -> f64 {
    values.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}
