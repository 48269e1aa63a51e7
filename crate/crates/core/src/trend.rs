//! The deterministic trend system: the noiseless sweeping solution (x, y),
//! the trend tau = x - x0, boundary-regime classification, and the
//! almost-everywhere derivative of the reflection term.

use serde::Serialize;

use crate::dsl::FunctionSpec;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::reflect::{solve_reflected, TubeGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Interior,
    Lower,
    Upper,
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::Interior => "interior",
            Regime::Lower => "lower",
            Regime::Upper => "upper",
        }
    }
}

/// Noiseless solution on the grid, with tau and per-node regime flags.
#[derive(Debug, Clone)]
pub struct TrendSolution {
    pub grid: Grid,
    /// x: the constrained deterministic state.
    pub state: Vec<f64>,
    /// y: the deterministic reflection term, y(0) = x0.
    pub reflection: Vec<f64>,
    /// tau_k = x_k - x0.
    pub trend: Vec<f64>,
    pub regime: Vec<Regime>,
    contact_tol: f64,
}

impl TrendSolution {
    pub fn x0(&self) -> f64 {
        self.reflection[0]
    }

    pub fn contact_tol(&self) -> f64 {
        self.contact_tol
    }
}

/// Default contact tolerance: one-step scheme displacement with headroom.
pub fn default_contact_tol(grid: &Grid, tube: &TubeGrid) -> f64 {
    10.0 * grid.dt() * (1.0 + tube.lip())
}

/// Solve the trend system (zero noise) and cross-check the two algebraically
/// equal forms of tau: x - x0 and the Riemann sum of b(x) plus y - x0.
pub fn solve_trend(drift: &FunctionSpec, tube: &TubeGrid, x0: f64) -> Result<TrendSolution> {
    solve_trend_with_tol(drift, tube, x0, default_contact_tol(tube.grid(), tube))
}

pub fn solve_trend_with_tol(
    drift: &FunctionSpec,
    tube: &TubeGrid,
    x0: f64,
    contact_tol: f64,
) -> Result<TrendSolution> {
    let grid = *tube.grid();
    let zeros = vec![0.0; grid.n() + 1];
    let path = solve_reflected(drift, tube, &zeros, x0)?;

    let trend: Vec<f64> = path.state.iter().map(|&x| x - x0).collect();

    // cross-check: tau = sum b(x_j) dt + y - x0 must agree with x - x0
    let dt = grid.dt();
    let mut drift_sum = 0.0;
    for k in 0..=grid.n() {
        let alt = drift_sum + path.reflection[k] - x0;
        if (alt - trend[k]).abs() > 1e-10 {
            return Err(Error::CrossCheckFailed(format!(
                "trend identity violated at index {k}: {} vs {}",
                alt, trend[k]
            )));
        }
        if k < grid.n() {
            drift_sum += drift.eval(path.state[k])? * dt;
        }
    }

    let mut regime = Vec::with_capacity(grid.n() + 1);
    for k in 0..=grid.n() {
        regime.push(classify_point(
            path.state[k],
            tube.lower[k],
            tube.upper[k],
            grid.time(k),
            contact_tol,
        )?);
    }

    Ok(TrendSolution {
        grid,
        state: path.state,
        reflection: path.reflection,
        trend,
        regime,
        contact_tol,
    })
}

fn classify_point(x: f64, lower: f64, upper: f64, t: f64, contact_tol: f64) -> Result<Regime> {
    let gap = upper - lower;
    if gap <= 2.0 * contact_tol {
        return Err(Error::GapTooSmallForTolerance {
            t,
            gap,
            tol: contact_tol,
        });
    }
    Ok(if x <= lower + contact_tol {
        Regime::Lower
    } else if x >= upper - contact_tol {
        Regime::Upper
    } else {
        Regime::Interior
    })
}

/// Classify one node of a solved trend against the tube, with an explicit
/// contact tolerance.
pub fn classify_regime(
    sol: &TrendSolution,
    tube: &TubeGrid,
    k: usize,
    contact_tol: f64,
) -> Result<Regime> {
    classify_point(
        sol.state[k],
        tube.lower[k],
        tube.upper[k],
        sol.grid.time(k),
        contact_tol,
    )
}

/// The a.e. derivative of y at a stable grid index: 0 in the interior,
/// l'(t) - b(l(t)) on the floor, u'(t) - b(u(t)) on the ceiling.
///
/// Errors at regime transitions (the derivative need not exist there) and
/// when the sign contradicts the normal cone, which means the classification
/// cannot describe a persistent regime.
pub fn ydot(
    drift: &FunctionSpec,
    tube: &TubeGrid,
    sol: &TrendSolution,
    k: usize,
) -> Result<f64> {
    let n = sol.grid.n();
    if k == 0 || k == n {
        return Err(Error::RegimeTransition { index: k });
    }
    let r = sol.regime[k];
    if sol.regime[k - 1] != r || sol.regime[k + 1] != r {
        return Err(Error::RegimeTransition { index: k });
    }
    const SIGN_TOL: f64 = 1e-10;
    match r {
        Regime::Interior => Ok(0.0),
        Regime::Lower => {
            let v = tube.lower_dot[k] - drift.eval(tube.lower[k])?;
            // -ydot must stay in R_- at the floor
            if v < -SIGN_TOL {
                return Err(Error::NormalConeInconsistency {
                    regime: "lower",
                    index: k,
                    ydot: v,
                });
            }
            Ok(v)
        }
        Regime::Upper => {
            let v = tube.upper_dot[k] - drift.eval(tube.upper[k])?;
            if v > SIGN_TOL {
                return Err(Error::NormalConeInconsistency {
                    regime: "upper",
                    index: k,
                    ydot: v,
                });
            }
            Ok(v)
        }
    }
}
