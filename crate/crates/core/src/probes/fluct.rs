use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::form_factors::ProbeCurve;
use crate::stats::linear_fit;

/// Fit of `t_fluct = α + β ln d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluctFit {
    pub alpha: f64,
    pub beta: f64,
    /// RMS residual of the fit.
    pub residual: f64,
    /// `(d, t_fluct)` pairs entering the fit.
    pub points: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillationReport {
    /// Indices of confirmed local extrema.
    pub turning_points: Vec<usize>,
    pub oscillates: bool,
}

/// Zigzag detector: an extremum counts once the curve has moved away from it by
/// more than `k_sigma · (σ_i + σ_j)`; two or more extrema mean oscillation.
pub fn detect_oscillation(curve: &ProbeCurve, k_sigma: f64) -> OscillationReport {
    let (m, s) = (&curve.mean, &curve.stderr);
    let threshold = |i: usize, j: usize| k_sigma * (s[i] + s[j]);
    let mut turning_points = Vec::new();
    let mut dir = 0i8;
    let mut ext = 0usize;
    for i in 1..m.len() {
        match dir {
            0 => {
                if m[i] - m[0] > threshold(i, 0) {
                    dir = 1;
                    ext = i;
                } else if m[0] - m[i] > threshold(i, 0) {
                    dir = -1;
                    ext = i;
                }
            }
            1 => {
                if m[i] >= m[ext] {
                    ext = i;
                } else if m[ext] - m[i] > threshold(i, ext) {
                    turning_points.push(ext);
                    dir = -1;
                    ext = i;
                }
            }
            _ => {
                if m[i] <= m[ext] {
                    ext = i;
                } else if m[i] - m[ext] > threshold(i, ext) {
                    turning_points.push(ext);
                    dir = 1;
                    ext = i;
                }
            }
        }
    }
    let oscillates = turning_points.len() >= 2;
    OscillationReport { turning_points, oscillates }
}

/// Last time at which `|mean − plateau| > k_sigma · stderr`.
pub fn fluctuation_time(curve: &ProbeCurve, plateau: f64, k_sigma: f64) -> Option<f64> {
    (0..curve.len())
        .rev()
        .find(|&i| (curve.mean[i] - plateau).abs() > k_sigma * curve.stderr[i])
        .map(|i| curve.times[i])
}

/// Fits `t_fluct = α + β ln d` to the 3σ fluctuation times of one curve per `d`.
pub fn fit_fluctuation_decay(curves: &[(usize, &ProbeCurve)], plateaus: &[f64]) -> Result<FluctFit> {
    if curves.len() != plateaus.len() {
        return Err(Error::InvalidParameter("need one plateau value per curve".into()));
    }
    let mut points = Vec::with_capacity(curves.len());
    for ((d, curve), &plateau) in curves.iter().zip(plateaus) {
        let t = fluctuation_time(curve, plateau, 3.0)
            .ok_or_else(|| Error::InsufficientData(format!("curve at d = {d} never leaves its plateau")))?;
        points.push((*d, t));
    }
    fit_log_law(points)
}

/// Least-squares `t = α + β ln d` through `(d, t)` pairs with at least three distinct `d`.
pub fn fit_log_law(points: Vec<(usize, f64)>) -> Result<FluctFit> {
    let mut distinct: Vec<usize> = points.iter().map(|p| p.0).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::InsufficientData("fluctuation fit needs >= 3 distinct d".into()));
    }
    let x: Vec<f64> = points.iter().map(|p| (p.0 as f64).ln()).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1).collect();
    let (alpha, beta, residual) = linear_fit(&x, &y);
    Ok(FluctFit { alpha, beta, residual, points })
}
