//! Time grids on `[0, T]`, optionally refined near the horizon.
//!
//! Several information drifts have `∫ μ² dt` with an integrable singularity
//! at `T`. A grid built by [`make_grid`] is uniform on `[0, T - tail_cut]`
//! and then halves geometrically towards `T`: the points
//! `T - tail_cut · 2^{-j}`, `j = 1..=tail_levels`, followed by `T` itself.
//! Drift integrals stop at the last grid point strictly before `T`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    times: Vec<f64>,
    tail_cut: f64,
    tail_levels: u32,
}

impl TimeGrid {
    /// Wrap an explicit list of times. Must start at 0 and be strictly
    /// increasing.
    pub fn from_times(times: Vec<f64>, tail_cut: f64, tail_levels: u32) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::parameter("grid needs at least two points"));
        }
        if times[0] != 0.0 {
            return Err(Error::parameter("grid must start at 0"));
        }
        for w in times.windows(2) {
            if !(w[1] > w[0]) || !w[1].is_finite() {
                return Err(Error::parameter(format!(
                    "grid times must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        if tail_cut < 0.0 || tail_cut >= *times.last().unwrap() {
            return Err(Error::parameter("tail_cut must satisfy 0 <= tail_cut < T"));
        }
        Ok(TimeGrid {
            times,
            tail_cut,
            tail_levels,
        })
    }

    /// Uniform dyadic partition of [0, 1] with mesh `2^{-level}`.
    pub fn dyadic(level: u32) -> Self {
        let n = 1u64 << level;
        let h = 0.5f64.powi(level as i32);
        let mut times: Vec<f64> = (0..n).map(|i| i as f64 * h).collect();
        times.push(1.0);
        TimeGrid {
            times,
            tail_cut: 0.0,
            tail_levels: 0,
        }
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn tail_cut(&self) -> f64 {
        self.tail_cut
    }

    pub fn tail_levels(&self) -> u32 {
        self.tail_levels
    }

    /// Last grid point strictly before the horizon; drift integrals are
    /// accumulated up to here.
    pub fn last_interior(&self) -> f64 {
        self.times[self.times.len() - 2]
    }

    /// Index of [`Self::last_interior`].
    pub fn last_interior_index(&self) -> usize {
        self.times.len() - 2
    }
}

/// Uniform grid of `n` intervals on `[0, T - tail_cut]`, then `tail_levels`
/// geometrically halving intervals filling `(T - tail_cut, T]`, ending
/// exactly at `T`.
pub fn make_grid(horizon: f64, n: usize, tail_cut: f64, tail_levels: u32) -> Result<TimeGrid> {
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::parameter(format!("horizon must be > 0, got {horizon}")));
    }
    if n == 0 {
        return Err(Error::parameter("need n >= 1 uniform intervals"));
    }
    if tail_cut < 0.0 || tail_cut >= horizon {
        return Err(Error::parameter(format!(
            "tail_cut must satisfy 0 <= tail_cut < horizon, got {tail_cut}"
        )));
    }
    let base = horizon - tail_cut;
    let mut times: Vec<f64> = (0..n).map(|i| i as f64 * base / n as f64).collect();
    times.push(base);
    if tail_cut > 0.0 {
        for j in 1..=tail_levels {
            times.push(horizon - tail_cut * 0.5f64.powi(j as i32));
        }
        times.push(horizon);
    }
    TimeGrid::from_times(times, tail_cut, tail_levels)
}
