//! Reproducible Brownian path sampling.
//!
//! Each path derives its generator from `(master_seed, path_index)` as a
//! ChaCha substream, so a path depends only on its index — never on worker
//! assignment or evaluation order. Parallel fan-outs are bit-reproducible.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::grid::TimeGrid;

/// Identifies one path substream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub path_index: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, path_index: u64) -> Self {
        SeedSpec {
            master_seed,
            path_index,
        }
    }
}

/// Counter-style substream: the master seed keys the generator, the path
/// index selects a ChaCha stream.
pub fn path_rng(seed: SeedSpec) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.master_seed);
    rng.set_stream(seed.path_index);
    rng
}

/// A Brownian path on a grid together with its running maximum and an
/// optional second independent Brownian path (the noise process).
#[derive(Debug, Clone)]
pub struct SamplePath<'g> {
    pub grid: &'g TimeGrid,
    pub w: Vec<f64>,
    pub running_max: Vec<f64>,
    pub aux: Option<Vec<f64>>,
}

/// Time change for the auxiliary path: `Identity` samples it on the grid
/// itself; `Map` samples it at `clock(t_i)`, which must be non-negative and
/// non-decreasing along the grid.
pub enum AuxClock<'a> {
    Identity,
    Map(&'a dyn Fn(f64) -> f64),
}

/// Fill `w` and `running_max` with a Brownian path on `times`, drawing
/// increments from `rng` in grid order. Shared by [`sample_brownian`] and
/// the Monte Carlo runners so both observe identical streams.
pub fn fill_brownian(rng: &mut ChaCha8Rng, times: &[f64], w: &mut Vec<f64>, running_max: &mut Vec<f64>) {
    w.clear();
    running_max.clear();
    w.push(0.0);
    running_max.push(0.0);
    let mut cur = 0.0f64;
    let mut max = 0.0f64;
    for i in 1..times.len() {
        let dt = times[i] - times[i - 1];
        let z: f64 = rng.sample(StandardNormal);
        cur += dt.sqrt() * z;
        max = max.max(cur);
        w.push(cur);
        running_max.push(max);
    }
}

/// Sample a Brownian path (plus running maximum) on `grid`, deterministically
/// from `seed`. With `aux`, a second independent Brownian path is sampled at
/// the clock times; a decreasing clock is a parameter error.
pub fn sample_brownian<'g>(
    grid: &'g TimeGrid,
    seed: SeedSpec,
    aux: Option<AuxClock>,
) -> Result<SamplePath<'g>> {
    let times = grid.times();
    let mut rng = path_rng(seed);
    let mut w = Vec::with_capacity(times.len());
    let mut running_max = Vec::with_capacity(times.len());
    fill_brownian(&mut rng, times, &mut w, &mut running_max);

    let aux = match aux {
        None => None,
        Some(clock) => {
            let clocks: Vec<f64> = match clock {
                AuxClock::Identity => times.to_vec(),
                AuxClock::Map(f) => times.iter().map(|&t| f(t)).collect(),
            };
            for (i, pair) in clocks.windows(2).enumerate() {
                if !pair[0].is_finite() || pair[0] < 0.0 {
                    return Err(Error::parameter(format!(
                        "aux clock value {} at grid index {i} is not a non-negative time",
                        pair[0]
                    )));
                }
                if pair[1] < pair[0] {
                    return Err(Error::parameter(format!(
                        "aux clock decreases between grid indices {i} and {}: {} > {}",
                        i + 1,
                        pair[0],
                        pair[1]
                    )));
                }
            }
            let mut path = Vec::with_capacity(clocks.len());
            path.push(0.0);
            let mut cur = 0.0f64;
            for i in 1..clocks.len() {
                let dv = clocks[i] - clocks[i - 1];
                let z: f64 = rng.sample(StandardNormal);
                cur += dv.sqrt() * z;
                path.push(cur);
            }
            Some(path)
        }
    };

    Ok(SamplePath {
        grid,
        w,
        running_max,
        aux,
    })
}
