//! The utility-increment measure on the triangle `{0 ≤ s < t ≤ 1}` for the
//! dynamic-noise model: cell values, partition sums, the total mass, and
//! dyadic mesh-refinement studies.
//!
//! For a noise clock `g`, the measure assigns to the cell `[0,s] × (s,t]`
//! the mass `½ log((1-s+g(1-s)) / (1-t+g(1-s)))`; the step-enlargement sum
//! over a partition `Δ` is `Σ_i cell(s_i, s_{i+1})`, the insider's utility
//! increment when the extra information arrives in steps. Refining the
//! partition can only add mass, and the total is
//! `½ ∫₀¹ du / (1-u+g(1-u))`, which diverges for clocks growing at least
//! linearly near 0 (the insider then has infinite utility).

use rayon::prelude::*;
use serde::Serialize;

use crate::drift::NoiseClock;
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::numerics::pairwise_sum;
use crate::quadrature::quadrature;

/// Mass of the cell `[0,s] × (s,t]`; 0 when `s = t`, `f64::INFINITY` when
/// the denominator `1 - t + g(1-s)` vanishes (only possible at `t = 1`
/// with a vanishing clock).
pub fn pi_cell(g: &NoiseClock, s: f64, t: f64) -> Result<f64> {
    g.validate()?;
    if !(0.0..=1.0).contains(&s) || !(0.0..=1.0).contains(&t) || s > t {
        return Err(Error::parameter(format!(
            "cell needs 0 <= s <= t <= 1, got ({s}, {t})"
        )));
    }
    Ok(cell_value(g, s, t))
}

#[inline]
fn cell_value(g: &NoiseClock, s: f64, t: f64) -> f64 {
    if s == t {
        return 0.0;
    }
    let denom = (1.0 - t) + g.value(1.0 - s);
    if denom <= 0.0 {
        return f64::INFINITY;
    }
    // ½ log((1-s+g)/(1-t+g)) in cancellation-free form
    0.5 * ((t - s) / denom).ln_1p()
}

const CHUNK: usize = 8192;

/// Deterministic chunked parallel sum of `cell(i)` for `i` in `0..n`:
/// fixed-size chunks summed pairwise, chunk results combined pairwise in
/// index order, so the value is independent of the worker count.
fn deterministic_cell_sum<F: Fn(usize) -> f64 + Sync>(n: usize, cell: F) -> f64 {
    if n <= CHUNK {
        let vals: Vec<f64> = (0..n).map(cell).collect();
        return pairwise_sum(&vals);
    }
    let n_chunks = n.div_ceil(CHUNK);
    let partials: Vec<f64> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = ((c + 1) * CHUNK).min(n);
            let vals: Vec<f64> = (lo..hi).map(&cell).collect();
            pairwise_sum(&vals)
        })
        .collect();
    pairwise_sum(&partials)
}

/// Step-enlargement mass `Σ_i cell(s_i, s_{i+1})` over a partition of
/// `[0, 1]`. An infinite cell makes the sum `f64::INFINITY`.
pub fn pi_partition_sum(g: &NoiseClock, partition: &TimeGrid) -> Result<f64> {
    g.validate()?;
    if (partition.horizon() - 1.0).abs() > 1e-12 {
        return Err(Error::parameter("partition must cover [0, 1]"));
    }
    let times = partition.times();
    Ok(deterministic_cell_sum(times.len() - 1, |i| {
        cell_value(g, times[i], times[i + 1])
    }))
}

/// Partition sum on the uniform dyadic partition of mesh `2^-level`,
/// without materializing the grid. Bit-identical to
/// [`pi_partition_sum`] on [`TimeGrid::dyadic`].
pub fn pi_partition_sum_dyadic(g: &NoiseClock, level: u32) -> Result<f64> {
    g.validate()?;
    let n = 1usize << level;
    let h = 0.5f64.powi(level as i32);
    Ok(deterministic_cell_sum(n, |i| {
        let s = i as f64 * h;
        let t = if i + 1 == n { 1.0 } else { (i + 1) as f64 * h };
        cell_value(g, s, t)
    }))
}

/// Total mass of the measure, or a divergence flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum TotalMass {
    Finite { value: f64, error_bound: f64 },
    Divergent { shells_probed: u32 },
}

impl TotalMass {
    pub fn is_finite(&self) -> bool {
        matches!(self, TotalMass::Finite { .. })
    }

    pub fn value(&self) -> f64 {
        match *self {
            TotalMass::Finite { value, .. } => value,
            TotalMass::Divergent { .. } => f64::INFINITY,
        }
    }
}

const MAX_SHELLS: u32 = 4096;
const STAGNATION_RATIO: f64 = 0.999;
const STAGNATION_RUN: u32 = 16;

/// Total mass `½ ∫₀¹ du/(1-u+g(1-u))`, evaluated as `½ ∫₀¹ ds/(s+g(s))`.
///
/// The smooth body `[½, 1]` is integrated directly; the endpoint behavior
/// at `s = 0` is probed on dyadic shells `[2^{-k-1}, 2^{-k}]`. Shells that
/// stop decaying (ratio ≥ 0.999 over 16 consecutive probes, or a probe
/// budget of 4096 shells) flag the integral as divergent — a numeric
/// policy, exact for the power family where divergence means a clock
/// growing at least linearly near 0.
pub fn pi_total(g: &NoiseClock, tol: f64) -> Result<TotalMass> {
    g.validate()?;
    if !(tol > 0.0) {
        return Err(Error::parameter(format!("tolerance must be > 0, got {tol}")));
    }
    let f = |s: f64| 0.5 / (s + g.value(s));
    let body = quadrature(f, 0.5, 1.0, 0.25 * tol)?;
    let mut value = body.value;
    let mut error = body.error_bound;
    let mut prev_shell = f64::INFINITY;
    let mut stagnant = 0u32;
    for k in 1..=MAX_SHELLS {
        let hi = 0.5f64.powi(k as i32);
        let lo = 0.5 * hi;
        let shell_tol = (0.25 * tol * hi).max(1e-13 * prev_shell.min(1.0)).max(1e-300);
        let shell = quadrature(f, lo, hi, shell_tol)?;
        value += shell.value;
        error += shell.error_bound;
        let ratio = if prev_shell.is_finite() && prev_shell > 0.0 {
            shell.value / prev_shell
        } else {
            0.0
        };
        if ratio >= STAGNATION_RATIO {
            stagnant += 1;
            if stagnant >= STAGNATION_RUN {
                return Ok(TotalMass::Divergent { shells_probed: k });
            }
        } else {
            stagnant = 0;
        }
        // geometric remainder once the shells decay
        if shell.value < 0.25 * tol && ratio < 0.95 {
            let r = ratio.max(0.0);
            let remainder = shell.value * r / (1.0 - r);
            return Ok(TotalMass::Finite {
                value: value + remainder,
                error_bound: error + remainder,
            });
        }
        prev_shell = shell.value;
    }
    Ok(TotalMass::Divergent {
        shells_probed: MAX_SHELLS,
    })
}

/// Mass restricted to enlargement times in `[0, t_upper]`:
/// `½ ∫_{1-t_upper}^{1} ds/(s+g(s))`. Finite for every `t_upper < 1`; used
/// to compare against tail-truncated Monte Carlo drift energies.
pub fn pi_total_truncated(g: &NoiseClock, t_upper: f64, tol: f64) -> Result<f64> {
    g.validate()?;
    if !(0.0..1.0).contains(&t_upper) {
        return Err(Error::parameter(format!(
            "need 0 <= t_upper < 1, got {t_upper}"
        )));
    }
    if t_upper == 0.0 {
        return Ok(0.0);
    }
    let f = |s: f64| 0.5 / (s + g.value(s));
    Ok(quadrature(f, 1.0 - t_upper, 1.0, tol)?.value)
}

/// One dyadic refinement level of a mesh study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeshLevel {
    pub level: u32,
    pub mesh: f64,
    pub partition_sum: f64,
}

/// Partition sums on dyadic meshes `2^-k`, `k = 1..=k_max`, against the
/// quadrature value of the total mass.
#[derive(Debug, Clone, Serialize)]
pub struct MeshStudy {
    pub levels: Vec<MeshLevel>,
    pub limit_ref: TotalMass,
}

impl MeshStudy {
    pub fn final_sum(&self) -> f64 {
        self.levels.last().map(|l| l.partition_sum).unwrap_or(0.0)
    }

    pub fn gap(&self, level_index: usize) -> f64 {
        match self.limit_ref {
            TotalMass::Finite { value, .. } => value - self.levels[level_index].partition_sum,
            TotalMass::Divergent { .. } => f64::INFINITY,
        }
    }

    /// CSV rows `level,mesh,partition_sum,limit_ref,gap` (single header
    /// row; divergent totals print as `inf`).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,mesh,partition_sum,limit_ref,gap\n");
        let limit = match self.limit_ref {
            TotalMass::Finite { value, .. } => value.to_string(),
            TotalMass::Divergent { .. } => "inf".to_string(),
        };
        for (i, l) in self.levels.iter().enumerate() {
            let gap = self.gap(i);
            let gap_str = if gap.is_finite() {
                gap.to_string()
            } else {
                "inf".to_string()
            };
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                l.level, l.mesh, l.partition_sum, limit, gap_str
            ));
        }
        out
    }
}

/// Evaluate the partition sums on dyadic meshes `2^-k`, `k = 1..=k_max`.
/// Values are non-decreasing in `k` and bounded by the total mass.
pub fn mesh_study(g: &NoiseClock, k_max: u32) -> Result<MeshStudy> {
    if k_max == 0 {
        return Err(Error::parameter("mesh study needs k_max >= 1"));
    }
    let limit_ref = pi_total(g, 1e-9)?;
    let mut levels = Vec::with_capacity(k_max as usize);
    for k in 1..=k_max {
        levels.push(MeshLevel {
            level: k,
            mesh: 0.5f64.powi(k as i32),
            partition_sum: pi_partition_sum_dyadic(g, k)?,
        });
    }
    Ok(MeshStudy { levels, limit_ref })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    const SQRT: NoiseClock = NoiseClock::Sqrt;

    #[test]
    fn cell_examples() {
        assert_eq!(pi_cell(&SQRT, 0.3, 0.3).unwrap(), 0.0);
        // g(1) = 1: ½ log(2/1)
        assert!((pi_cell(&SQRT, 0.0, 1.0).unwrap() - 0.5 * LN_2).abs() < 1e-15);
        // ½ log(2/1.5)
        let v = pi_cell(&SQRT, 0.0, 0.5).unwrap();
        assert!((v - 0.143_841_036_225_890_46).abs() < 1e-15);
    }

    #[test]
    fn vanishing_clock_cell_is_infinite() {
        let zero = NoiseClock::Constant { level: 0.0 };
        assert_eq!(pi_cell(&zero, 0.5, 1.0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn cell_rejects_bad_interval() {
        assert!(pi_cell(&SQRT, 0.6, 0.4).is_err());
        assert!(pi_cell(&SQRT, -0.1, 0.5).is_err());
        assert!(pi_cell(&SQRT, 0.5, 1.1).is_err());
    }

    #[test]
    fn cell_matches_quadrature_of_frozen_integrand() {
        // cell(s,t) = ½ ∫_s^t du/(1-u+g(1-s)) exactly
        for (s, t) in [(0.0, 0.25), (0.1, 0.7), (0.5, 1.0), (0.9, 0.95)] {
            let gs = SQRT.value(1.0 - s);
            let q = quadrature(|u| 0.5 / (1.0 - u + gs), s, t, 1e-12).unwrap();
            let cell = pi_cell(&SQRT, s, t).unwrap();
            assert!((cell - q.value).abs() <= 1e-10, "({s},{t}): {cell} vs {}", q.value);
        }
    }

    #[test]
    fn partition_sum_examples() {
        let trivial = TimeGrid::dyadic(0);
        let v = pi_partition_sum(&SQRT, &trivial).unwrap();
        assert!((v - 0.5 * LN_2).abs() < 1e-15);

        let refined = pi_partition_sum(&SQRT, &TimeGrid::dyadic(1)).unwrap();
        assert!(refined > 0.5 * LN_2);
        assert!(refined <= LN_2);

        let unit = NoiseClock::Constant { level: 1.0 };
        let v = pi_partition_sum(&unit, &trivial).unwrap();
        assert!((v - 0.5 * LN_2).abs() < 1e-15);
    }

    #[test]
    fn dyadic_fast_path_matches_grid_path() {
        for k in [1u32, 5, 10] {
            let fast = pi_partition_sum_dyadic(&SQRT, k).unwrap();
            let slow = pi_partition_sum(&SQRT, &TimeGrid::dyadic(k)).unwrap();
            assert_eq!(fast, slow, "level {k}");
        }
    }

    #[test]
    fn total_mass_closed_forms() {
        // g = √: substitution v = √(1-u) gives ∫₀¹ dv/(1+v) = log 2
        match pi_total(&SQRT, 1e-10).unwrap() {
            TotalMass::Finite { value, .. } => {
                assert!((value - LN_2).abs() < 1e-8, "{value}");
            }
            other => panic!("expected finite, got {other:?}"),
        }
        // g ≡ 1: ½ ∫₀¹ du/(2-u) = ½ log 2
        let unit = NoiseClock::Constant { level: 1.0 };
        match pi_total(&unit, 1e-10).unwrap() {
            TotalMass::Finite { value, .. } => {
                assert!((value - 0.5 * LN_2).abs() < 1e-8, "{value}");
            }
            other => panic!("expected finite, got {other:?}"),
        }
        // g(y) = y: the linear clock has infinite mass
        let linear = NoiseClock::Power {
            coeff: 1.0,
            exponent: 1.0,
        };
        assert!(!pi_total(&linear, 1e-9).unwrap().is_finite());
    }

    #[test]
    fn power_family_finiteness_boundary() {
        for p in [0.25, 0.5, 0.75] {
            let g = NoiseClock::Power {
                coeff: 1.0,
                exponent: p,
            };
            assert!(pi_total(&g, 1e-8).unwrap().is_finite(), "p = {p}");
        }
        for p in [1.0, 1.5] {
            let g = NoiseClock::Power {
                coeff: 1.0,
                exponent: p,
            };
            assert!(!pi_total(&g, 1e-8).unwrap().is_finite(), "p = {p}");
        }
    }

    #[test]
    fn truncated_total() {
        assert_eq!(pi_total_truncated(&SQRT, 0.0, 1e-10).unwrap(), 0.0);
        // t_upper → 1 recovers the full mass
        let almost = pi_total_truncated(&SQRT, 1.0 - 1e-12, 1e-10).unwrap();
        assert!((almost - LN_2).abs() < 1e-5);
        assert!(pi_total_truncated(&SQRT, 1.0, 1e-10).is_err());
    }

    #[test]
    fn mesh_study_sqrt_converges_from_below() {
        let study = mesh_study(&SQRT, 12).unwrap();
        assert_eq!(study.levels.len(), 12);
        for w in study.levels.windows(2) {
            assert!(w[1].partition_sum >= w[0].partition_sum);
        }
        let total = study.limit_ref.value();
        assert!((total - LN_2).abs() < 1e-8);
        for (i, l) in study.levels.iter().enumerate() {
            assert!(
                l.partition_sum <= total + 1e-9,
                "level {} exceeds the total",
                l.level
            );
            assert!(study.gap(i) >= 0.0);
        }
        // The dyadic sums converge at rate O(√mesh); at mesh 2^-12 the gap
        // sits near 1.09e-2 (frozen by direct evaluation).
        let gap = study.gap(11);
        assert!((gap - 1.091_6e-2).abs() < 2e-4, "gap at level 12: {gap}");
    }

    #[test]
    fn mesh_study_divergent_case_grows_steadily() {
        let linear = NoiseClock::Power {
            coeff: 1.0,
            exponent: 1.0,
        };
        let study = mesh_study(&linear, 12).unwrap();
        assert!(!study.limit_ref.is_finite());
        // ~¼ log 2 ≈ 0.1733 per level once the asymptote sets in
        for w in study.levels.windows(2) {
            if w[0].level >= 2 {
                let inc = w[1].partition_sum - w[0].partition_sum;
                assert!(inc >= 0.15, "level {}: increment {inc}", w[1].level);
            }
        }
        // frozen by direct evaluation: S(2^12) = 2.36564
        assert!((study.final_sum() - 2.365_639_3).abs() < 1e-6);
    }

    #[test]
    fn csv_shape() {
        let study = mesh_study(&SQRT, 3).unwrap();
        let csv = study.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "level,mesh,partition_sum,limit_ref,gap");
        assert_eq!(csv.lines().count(), 4);
        let divergent = mesh_study(
            &NoiseClock::Power {
                coeff: 1.0,
                exponent: 1.0,
            },
            2,
        )
        .unwrap();
        assert!(divergent.to_csv().contains(",inf,"));
    }

    mod properties {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

            // refining a partition can only add mass
            #[test]
            fn refinement_monotonicity(
                splits in proptest::collection::vec(0.01f64..0.99, 1..6),
                extra in 0.01f64..0.99,
            ) {
                let mut pts: Vec<f64> = splits;
                pts.push(0.0);
                pts.push(1.0);
                pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
                pts.dedup();
                let coarse = TimeGrid::from_times(pts.clone(), 0.0, 0).unwrap();
                let mut fine_pts = pts.clone();
                if !fine_pts.contains(&extra) {
                    fine_pts.push(extra);
                    fine_pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
                }
                let fine = TimeGrid::from_times(fine_pts, 0.0, 0).unwrap();
                let g = NoiseClock::Sqrt;
                let c = pi_partition_sum(&g, &coarse).unwrap();
                let f = pi_partition_sum(&g, &fine).unwrap();
                prop_assert!(f >= c - 1e-12, "coarse {c} fine {f}");
            }

            #[test]
            fn cells_are_nonnegative(s in 0.0f64..1.0, dt in 0.0f64..1.0) {
                let t = (s + dt).min(1.0);
                let v = pi_cell(&NoiseClock::Sqrt, s, t).unwrap();
                prop_assert!(v >= 0.0);
            }
        }
    }
}
