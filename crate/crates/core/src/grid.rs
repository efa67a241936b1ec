use crate::error::{Error, Result};

/// Uniform grid t_i = i T / N, i = 0..=N.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t_end: f64,
    pub intervals: usize,
}

impl TimeGrid {
    pub fn new(t_end: f64, intervals: usize) -> Result<Self> {
        if !(t_end.is_finite() && t_end > 0.0) {
            return Err(Error::InvalidParams(format!("time horizon must be positive, got {t_end}")));
        }
        if intervals < 2 {
            return Err(Error::InvalidParams(format!("need at least 2 time intervals, got {intervals}")));
        }
        Ok(TimeGrid { t_end, intervals })
    }

    pub fn step(&self) -> f64 {
        self.t_end / self.intervals as f64
    }

    pub fn len(&self) -> usize {
        self.intervals + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn t(&self, i: usize) -> f64 {
        if i == self.intervals {
            self.t_end
        } else {
            i as f64 * self.step()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.t(i)).collect()
    }
}

/// Uniform grid x_j = j / M on [0, 1], j = 0..=M.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceGrid {
    pub intervals: usize,
}

impl SpaceGrid {
    pub fn new(intervals: usize) -> Result<Self> {
        if intervals < 2 {
            return Err(Error::InvalidParams(format!("need at least 2 space intervals, got {intervals}")));
        }
        Ok(SpaceGrid { intervals })
    }

    /// Fails unless the grid has at least two intervals per retained mode.
    pub fn check_resolves(&self, modes: usize) -> Result<()> {
        if self.intervals < 2 * modes {
            Err(Error::GridTooCoarse {
                m: self.intervals,
                k: modes,
            })
        } else {
            Ok(())
        }
    }

    pub fn step(&self) -> f64 {
        1.0 / self.intervals as f64
    }

    pub fn len(&self) -> usize {
        self.intervals + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn x(&self, j: usize) -> f64 {
        if j == self.intervals {
            1.0
        } else {
            j as f64 / self.intervals as f64
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.x(j)).collect()
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..self.len()).map(|j| f(self.x(j))).collect()
    }
}
