//! Uniform time grid on [0, T].

use serde::Serialize;

use crate::error::{Error, Result};

/// Uniform dissection of [0, T] into `n` steps (n + 1 nodes).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    n: usize,
    horizon: f64,
}

impl Grid {
    pub fn new(n: usize, horizon: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyGrid);
        }
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(Error::NonPositiveHorizon(horizon));
        }
        Ok(Self { n, horizon })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn dt(&self) -> f64 {
        self.horizon / self.n as f64
    }

    /// Node t_k = k T / n. Always computed the same way so callers agree bit-for-bit.
    pub fn time(&self, k: usize) -> f64 {
        (k as f64) * self.horizon / (self.n as f64)
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.n).map(|k| self.time(k)).collect()
    }

    /// Index of the grid node equal to `t`, within a relative tolerance of one
    /// part in 1e-9 of the step size.
    pub fn index_of(&self, t: f64) -> Result<usize> {
        if !(0.0..=self.horizon * (1.0 + 1e-12)).contains(&t) {
            return Err(Error::EvalTimeOutOfRange {
                t,
                horizon: self.horizon,
            });
        }
        let k = (t / self.dt()).round() as usize;
        let k = k.min(self.n);
        let nearest = self.time(k);
        if (t - nearest).abs() > 1e-9 * self.dt().max(1.0) {
            return Err(Error::TimeNotOnGrid { t, nearest });
        }
        Ok(k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_cover_the_horizon() {
        let g = Grid::new(8, 2.0).unwrap();
        assert_eq!(g.time(0), 0.0);
        assert_eq!(g.time(8), 2.0);
        assert_eq!(g.times().len(), 9);
        assert!((g.dt() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn index_lookup_rejects_offgrid_times() {
        let g = Grid::new(10, 1.0).unwrap();
        assert_eq!(g.index_of(0.5).unwrap(), 5);
        assert_eq!(g.index_of(1.0).unwrap(), 10);
        assert!(matches!(g.index_of(0.55), Err(Error::TimeNotOnGrid { .. })));
        assert!(matches!(
            g.index_of(1.5),
            Err(Error::EvalTimeOutOfRange { .. })
        ));
    }

    #[test]
    fn degenerate_grids_rejected() {
        assert!(Grid::new(0, 1.0).is_err());
        assert!(Grid::new(4, 0.0).is_err());
        assert!(Grid::new(4, -1.0).is_err());
    }
}
