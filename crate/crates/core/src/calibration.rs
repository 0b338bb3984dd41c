//! Empirically fitted absolute constants, frozen after a one-off calibration run
//! (`cargo run --release --example calibrate`), and the grids they were fitted on.
//! The grids avoid the held-out configurations used by the acceptance suite.

use crate::bodies::Body;
use crate::covering::{lemma4_implied_constant, CoverOptions, CoverSession};
use crate::error::Result;
use crate::functionals::{estimate_mean_norm, sample_sphere};
use crate::projections::{jl_concentration, JlReport};
use crate::rng::RngStream;

/// Constant `c` in the failure bound `√(π/2)·e^{−ε²k/c}` for random projections.
pub const JL_FAILURE_CONSTANT: f64 = 8.46;
/// Constant `c` in the regime conditions `ε > √(c/k)`, `N < e^{ε²k/c}`.
pub const JL_REGIME_CONSTANT: f64 = JL_FAILURE_CONSTANT;
/// Constant `c` in the p-convex covering bound `2e^{(cn/p)(2M̃_K/t)^p}`.
pub const LEMMA4_CONSTANT: f64 = 0.3074;

pub const JL_CALIBRATION_N: usize = 200;
pub const JL_CALIBRATION_EPSILONS: [f64; 6] = [0.2, 0.25, 0.4, 0.6, 0.7, 1.0];
pub const JL_CALIBRATION_RANKS: [usize; 5] = [25, 40, 75, 125, 175];
pub const JL_CALIBRATION_POINTS: [usize; 4] = [1, 5, 30, 200];
pub const JL_CALIBRATION_TRIALS: usize = 2000;
pub const JL_CALIBRATION_SEED: u64 = 0xCA11_B0A7;

/// Exponents `p` of the ℓ_p balls used to fit the covering constant.
pub const LEMMA4_CALIBRATION_P: [f64; 5] = [0.4, 0.5, 2.0 / 3.0, 0.75, 1.0];
pub const LEMMA4_CALIBRATION_SEEDS: [u64; 3] = [101, 202, 303];
pub const LEMMA4_CALIBRATION_CLOUD: usize = 100_000;
pub const LEMMA4_MEAN_NORM_SAMPLES: usize = 1_000_000;
/// Radii held out from the covering-constant fit.
pub const LEMMA4_HELD_OUT_T: [f64; 9] = [0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];

/// Radii `0.15, 0.16, …, 1.10` with the held-out radii removed.
pub fn lemma4_calibration_radii() -> Vec<f64> {
    (15..=110)
        .map(|i| i as f64 / 100.0)
        .filter(|t| LEMMA4_HELD_OUT_T.iter().all(|h| (h - t).abs() > 1e-9))
        .collect()
}

/// Smallest `c` with `f + 3σ ≤ √(π/2)·e^{−ε²k/c}`, where `σ = √(f(1−f)/T)` is the
/// binomial standard deviation of the observed failure rate. Cells without failures
/// constrain nothing and give 0.
pub fn jl_cell_constant(report: &JlReport) -> f64 {
    let f = report.empirical_failure;
    if f == 0.0 {
        return 0.0;
    }
    let sigma = (f * (1.0 - f) / report.trials as f64).sqrt();
    let upper = (f + 3.0 * sigma).min(1.0);
    let head = (std::f64::consts::PI / 2.0).sqrt();
    report.epsilon * report.epsilon * report.k as f64 / (head / upper).ln()
}

pub struct JlCalibration {
    pub constant: f64,
    pub cells: Vec<(JlReport, f64)>,
}

pub fn calibrate_jl(trials: usize, seed: u64) -> Result<JlCalibration> {
    let base = RngStream::new(seed);
    let mut cells = Vec::new();
    for &num_points in &JL_CALIBRATION_POINTS {
        let points = sample_sphere::<f64>(JL_CALIBRATION_N, num_points, base.fork(&format!("points-{num_points}")))?;
        for &k in &JL_CALIBRATION_RANKS {
            for &eps in &JL_CALIBRATION_EPSILONS {
                let report = jl_concentration(&points, k, eps, trials, base.fork(&format!("trials-{num_points}-{k}")))?;
                let c = jl_cell_constant(&report);
                cells.push((report, c));
            }
        }
    }
    let constant = cells.iter().map(|c| c.1).fold(0.0, f64::max);
    Ok(JlCalibration { constant, cells })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma4Cell {
    pub p: f64,
    pub t: f64,
    pub seed: u64,
    pub count: usize,
    pub mean_norm: f64,
    pub implied: f64,
}

pub struct Lemma4Calibration {
    pub constant: f64,
    pub cells: Vec<Lemma4Cell>,
}

/// Greedy covering counts of `K = B_p^2` by `tD` against `2e^{(cn/p)(2M̃_K/t)^p}`:
/// returns, per cell, the least `c` making the bound hold.
pub fn lemma4_cells(p: f64, radii: &[f64], cloud: usize, seed: u64) -> Result<Vec<Lemma4Cell>> {
    let n = 2;
    let k = Body::<f64>::lp_ball(p, n)?;
    let d = Body::<f64>::euclidean_ball(n)?;
    let stream = RngStream::new(seed);
    let mean_norm = estimate_mean_norm(&k, LEMMA4_MEAN_NORM_SAMPLES, stream.fork("mean-norm"))?.value;
    let mut session = CoverSession::new(&k, &d, cloud, stream.fork("cover"), CoverOptions::default())?;
    let mut cells = Vec::with_capacity(radii.len());
    for &t in radii {
        let count = session.cover(t)?.upper_count;
        let implied = lemma4_implied_constant(count, n, 2.0, mean_norm, t, p, 1.0);
        cells.push(Lemma4Cell { p, t, seed, count, mean_norm, implied });
    }
    Ok(cells)
}

pub fn calibrate_lemma4() -> Result<Lemma4Calibration> {
    let radii = lemma4_calibration_radii();
    let mut cells = Vec::new();
    for &p in &LEMMA4_CALIBRATION_P {
        for &seed in &LEMMA4_CALIBRATION_SEEDS {
            cells.extend(lemma4_cells(p, &radii, LEMMA4_CALIBRATION_CLOUD, seed)?);
        }
    }
    let constant = cells.iter().map(|c| c.implied).fold(0.0, f64::max);
    Ok(Lemma4Calibration { constant, cells })
}
