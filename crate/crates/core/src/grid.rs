//! Uniform frequency bins used to discretize delta-function force lines.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};

/// `count` bins of width `step` (rad/s), bin `i` centered on `start + i * step`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    pub start: f64,
    pub step: f64,
    pub count: usize,
}

impl FrequencyGrid {
    pub fn new(start: f64, step: f64, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::Shape("frequency grid needs at least one bin".into()));
        }
        if !start.is_finite() {
            return Err(Error::InvalidParameter {
                name: "start",
                value: start,
                reason: "must be finite",
            });
        }
        Ok(Self {
            start,
            step: ensure_positive("step", step)?,
            count,
        })
    }

    /// Grid of `count` bins centered on `center`.
    pub fn centered(center: f64, step: f64, count: usize) -> Result<Self> {
        Self::new(center - step * (count as f64 - 1.0) / 2.0, step, count)
    }

    pub fn center(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn centers(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(|i| self.center(i))
    }

    pub fn lower_edge(&self) -> f64 {
        self.start - 0.5 * self.step
    }

    pub fn upper_edge(&self) -> f64 {
        self.start + (self.count as f64 - 0.5) * self.step
    }

    /// Index of the bin containing `omega`; half-open `[lo, hi)` bins.
    pub fn bin_of(&self, omega: f64) -> Result<usize> {
        let lo = self.lower_edge();
        let hi = self.upper_edge();
        if !(omega >= lo && omega < hi) {
            return Err(Error::OutOfRange {
                value: omega,
                min: lo,
                max: hi,
            });
        }
        let idx = ((omega - lo) / self.step).floor() as usize;
        Ok(idx.min(self.count - 1))
    }
}
