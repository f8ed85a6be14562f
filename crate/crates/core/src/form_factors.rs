//! Spectral form factors `c̃₂, c̃₃, c̃₄, Q(t)` evaluated from phase sums, their
//! ensemble averages, infinite-time values and the genericity predicate.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::ensembles::{sample_spectrum, EnsembleKind, Spectrum};
use crate::error::{Error, Result};
use crate::parallel::{map_indexed, pairwise_sum, RngSeed};
use crate::stats::Estimate;

/// Fraction of trailing grid points used for plateau estimates.
pub const TAIL_FRACTION: f64 = 0.2;

/// Largest `d` for which genericity beyond second order is checked.
pub const MAX_HIGH_ORDER_GENERIC_DIM: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FormFactorPoint {
    pub t: f64,
    pub c2: f64,
    pub c3: C64,
    pub c4: f64,
    pub q: f64,
    pub d: usize,
}

/// Phase sums `(tr U(t), tr U(2t))` for `U = e^{-iHt}`.
pub fn trace_phases(s: &Spectrum, t: f64) -> (C64, C64) {
    let mut tr = C64::new(0.0, 0.0);
    let mut tr2 = C64::new(0.0, 0.0);
    for &e in s.energies() {
        let (sin, cos) = (e * t).sin_cos();
        let z = C64::new(cos, -sin);
        tr += z;
        tr2 += z * z;
    }
    (tr, tr2)
}

pub fn form_factors_at(s: &Spectrum, t: f64) -> FormFactorPoint {
    let d = s.d() as f64;
    let (tr, tr2) = trace_phases(s, t);
    let abs2 = tr.norm_sqr();
    let c2 = abs2 / (d * d);
    let c3 = tr2 * tr.conj() * tr.conj() / (d * d * d);
    FormFactorPoint { t, c2, c3, c4: c2 * c2, q: abs2 - d, d: s.d() }
}

/// `lim_{T→∞} E_T c̃₄` for a generic spectrum: `(2d − 1)/d³`.
pub fn c4_plateau(d: usize) -> f64 {
    let d = d as f64;
    (2.0 * d - 1.0) / (d * d * d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormFactor {
    C2,
    C4,
    ReC3,
    ImC3,
    Q,
}

impl FormFactor {
    pub const ALL: [FormFactor; 5] = [FormFactor::C2, FormFactor::C4, FormFactor::ReC3, FormFactor::ImC3, FormFactor::Q];

    pub fn name(&self) -> &'static str {
        match self {
            FormFactor::C2 => "c2",
            FormFactor::C4 => "c4",
            FormFactor::ReC3 => "re_c3",
            FormFactor::ImC3 => "im_c3",
            FormFactor::Q => "q",
        }
    }

    pub fn of(&self, p: &FormFactorPoint) -> f64 {
        match self {
            FormFactor::C2 => p.c2,
            FormFactor::C4 => p.c4,
            FormFactor::ReC3 => p.c3.re,
            FormFactor::ImC3 => p.c3.im,
            FormFactor::Q => p.q,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridKind {
    Log,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub kind: GridKind,
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
}

impl TimeGrid {
    pub fn log(t_min: f64, t_max: f64, points: usize) -> Self {
        TimeGrid { kind: GridKind::Log, t_min, t_max, points }
    }

    pub fn linear(t_min: f64, t_max: f64, points: usize) -> Self {
        TimeGrid { kind: GridKind::Linear, t_min, t_max, points }
    }

    pub fn validate(&self) -> Result<()> {
        if self.points == 0 {
            return Err(Error::InvalidParameter("time_grid.points must be >= 1".into()));
        }
        if !(self.t_min.is_finite() && self.t_max.is_finite()) || self.t_max < self.t_min {
            return Err(Error::InvalidParameter("time_grid bounds must be finite with t_max >= t_min".into()));
        }
        if self.kind == GridKind::Log && self.t_min <= 0.0 {
            return Err(Error::InvalidParameter("time_grid.t_min must be > 0 for a log grid".into()));
        }
        Ok(())
    }

    pub fn times(&self) -> Result<Vec<f64>> {
        self.validate()?;
        if self.points == 1 {
            return Ok(vec![self.t_min]);
        }
        let n = (self.points - 1) as f64;
        Ok((0..self.points)
            .map(|i| {
                let f = i as f64 / n;
                match self.kind {
                    GridKind::Linear => self.t_min + f * (self.t_max - self.t_min),
                    GridKind::Log => (self.t_min.ln() + f * (self.t_max / self.t_min).ln()).exp(),
                }
            })
            .collect())
    }
}

/// Per-time statistics of a probe under ensemble averaging.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeCurve {
    pub label: String,
    pub times: Vec<f64>,
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    pub n_samples: Vec<usize>,
    /// Per-sample average over the trailing grid window, then averaged over samples.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tail: Option<Estimate>,
}

impl ProbeCurve {
    /// Build from `rows[sample][time]`.
    pub fn from_rows(label: impl Into<String>, times: &[f64], rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InsufficientData("a curve needs at least one sample".into()));
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != times.len()) {
            return Err(Error::DimensionMismatch { expected: times.len(), found: bad.len() });
        }
        let per_time: Vec<Estimate> = (0..times.len())
            .map(|j| Estimate::from_samples(&rows.iter().map(|r| r[j]).collect::<Vec<_>>()))
            .collect();
        let tail = tail_estimate(rows, TAIL_FRACTION);
        Ok(ProbeCurve {
            label: label.into(),
            times: times.to_vec(),
            mean: per_time.iter().map(|e| e.mean).collect(),
            stderr: per_time.iter().map(|e| e.stderr).collect(),
            n_samples: vec![rows.len(); times.len()],
            tail,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Trailing-window plateau test: window mean within `k` standard errors of `plateau`.
    pub fn at_plateau(&self, plateau: f64, k: f64) -> Option<bool> {
        self.tail.map(|e| e.within(plateau, k))
    }

    /// Index and value of the smallest mean after a centred moving average of `2·half + 1` points.
    pub fn smoothed_minimum(&self, half: usize) -> Option<(usize, f64)> {
        let s = moving_average(&self.mean, half);
        s.iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, v)| (i, *v))
    }
}

/// Centred moving average, shrinking the window at the ends.
pub fn moving_average(xs: &[f64], half: usize) -> Vec<f64> {
    let n = xs.len();
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(n);
            pairwise_sum(&xs[lo..hi]) / (hi - lo) as f64
        })
        .collect()
}

fn tail_estimate(rows: &[Vec<f64>], frac: f64) -> Option<Estimate> {
    let n = rows.first()?.len();
    let width = ((n as f64 * frac).ceil() as usize).clamp(1, n.max(1));
    if n == 0 {
        return None;
    }
    let per_sample: Vec<f64> = rows.iter().map(|r| pairwise_sum(&r[n - width..]) / width as f64).collect();
    Some(Estimate::from_samples(&per_sample))
}

/// One curve per form factor.
#[derive(Debug, Clone, PartialEq)]
pub struct FormFactorCurves {
    pub kind: EnsembleKind,
    pub d: usize,
    pub curves: Vec<(FormFactor, ProbeCurve)>,
}

impl FormFactorCurves {
    pub fn get(&self, which: FormFactor) -> &ProbeCurve {
        &self.curves.iter().find(|(f, _)| *f == which).expect("all form factors present").1
    }
}

/// Form factors at every grid time for `n_spectra` freshly sampled spectra.
///
/// Spectrum `i` is drawn from `seed.stream(i)`, so the result does not depend on
/// the worker count.
pub fn sample_form_factor_rows(
    kind: &EnsembleKind,
    d: usize,
    times: &[f64],
    n_spectra: usize,
    seed: RngSeed,
) -> Result<Vec<Vec<FormFactorPoint>>> {
    kind.validate()?;
    let rows = map_indexed(n_spectra, |i| -> Result<Vec<FormFactorPoint>> {
        let s = sample_spectrum(kind, d, &mut seed.stream(i as u64))?;
        Ok(times.iter().map(|&t| form_factors_at(&s, t)).collect())
    });
    rows.into_iter().collect()
}

pub fn ensemble_average_curve(
    kind: &EnsembleKind,
    d: usize,
    times: &[f64],
    n_spectra: usize,
    seed: RngSeed,
) -> Result<FormFactorCurves> {
    if n_spectra < 2 {
        return Err(Error::InvalidParameter("n_spectra must be >= 2".into()));
    }
    let rows = sample_form_factor_rows(kind, d, times, n_spectra, seed)?;
    let curves = FormFactor::ALL
        .iter()
        .map(|&f| {
            let vals: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|p| f.of(p)).collect()).collect();
            ProbeCurve::from_rows(f.name(), times, &vals).map(|c| (f, c))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FormFactorCurves { kind: *kind, d, curves })
}

/// Outcome of the genericity test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Genericity {
    pub generic: bool,
    /// Index tuple `(a_1..a_l, b_1..b_l)` with `Σ E_a = Σ E_b`, when not generic.
    pub witness: Option<Vec<usize>>,
}

/// No coincidence `Σ_{a∈I} E_a = Σ_{b∈J} E_b` between distinct multisets of
/// size `l ≤ l_max`, within `tol`.
pub fn is_generic(s: &Spectrum, l_max: usize, tol: f64) -> Result<Genericity> {
    if l_max == 0 {
        return Err(Error::InvalidParameter("l_max must be >= 1".into()));
    }
    if l_max > 2 && s.d() > MAX_HIGH_ORDER_GENERIC_DIM {
        return Err(Error::CombinatorialBlowup { order: l_max, d: s.d() });
    }
    let e = s.energies();
    for l in 1..=l_max {
        let mut sums: Vec<(f64, Vec<usize>)> = Vec::new();
        let mut current = Vec::with_capacity(l);
        collect_multisets(e, l, 0, &mut current, 0.0, &mut sums);
        sums.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in sums.windows(2) {
            if (w[1].0 - w[0].0).abs() <= tol {
                let mut witness = w[0].1.clone();
                witness.extend_from_slice(&w[1].1);
                return Ok(Genericity { generic: false, witness: Some(witness) });
            }
        }
    }
    Ok(Genericity { generic: true, witness: None })
}

fn collect_multisets(
    e: &[f64],
    remaining: usize,
    start: usize,
    current: &mut Vec<usize>,
    acc: f64,
    out: &mut Vec<(f64, Vec<usize>)>,
) {
    if remaining == 0 {
        out.push((acc, current.clone()));
        return;
    }
    for i in start..e.len() {
        current.push(i);
        collect_multisets(e, remaining - 1, i, current, acc + e[i], out);
        current.pop();
    }
}

/// `Σ_μ (m! / ∏_i μ_i!)²` over multisets `μ` of size `m` drawn from `d` labels:
/// the number of index assignments surviving the infinite-time average of `|tr U|^{2m}`
/// for a generic spectrum.
pub fn generic_trace_moment_count(d: usize, m: usize) -> f64 {
    let fact = |k: usize| (1..=k).map(|x| x as f64).product::<f64>();
    let mut total = 0.0;
    for part in partitions(m) {
        if part.len() > d {
            continue;
        }
        // number of multisets with this multiplicity shape
        let mut shape_count = (0..part.len()).map(|i| (d - i) as f64).product::<f64>();
        let mut run = 1;
        for i in 1..=part.len() {
            if i < part.len() && part[i] == part[i - 1] {
                run += 1;
            } else {
                shape_count /= fact(run);
                run = 1;
            }
        }
        let multinomial = fact(m) / part.iter().map(|&p| fact(p)).product::<f64>();
        total += shape_count * multinomial * multinomial;
    }
    total
}

/// Integer partitions of `m` in non-increasing order.
fn partitions(m: usize) -> Vec<Vec<usize>> {
    fn rec(rem: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rem == 0 {
            out.push(cur.clone());
            return;
        }
        for p in (1..=rem.min(max)).rev() {
            cur.push(p);
            rec(rem - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, m, &mut Vec::new(), &mut out);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeAveraged {
    C2,
    C4,
}

/// Default tolerance for level coincidences.
pub const GENERIC_TOL: f64 = 1e-12;

/// Infinite-time average by degeneracy counting; requires a generic spectrum.
pub fn infinite_time_average_c(s: &Spectrum, which: TimeAveraged) -> Result<f64> {
    let order = match which {
        TimeAveraged::C2 => 1,
        TimeAveraged::C4 => 2,
    };
    let g = is_generic(s, order, GENERIC_TOL)?;
    if !g.generic {
        return Err(Error::NonGeneric { order, witness: g.witness.unwrap_or_default() });
    }
    let d = s.d() as f64;
    Ok(match which {
        TimeAveraged::C2 => 1.0 / d,
        TimeAveraged::C4 => generic_trace_moment_count(s.d(), 2) / d.powi(4),
    })
}

/// Numeric long-time average of `f(point)` on a uniform grid over `[T/2, T]`,
/// `T = 100 / (smallest nonzero gap)`.
pub fn numeric_time_average<F>(s: &Spectrum, n_times: usize, f: F) -> Result<f64>
where
    F: Fn(&FormFactorPoint) -> f64 + Sync + Send,
{
    let gap = s
        .min_nonzero_gap(GENERIC_TOL)
        .ok_or_else(|| Error::InvalidParameter("spectrum has no nonzero gap".into()))?;
    let t_max = 100.0 / gap;
    numeric_window_average(s, 0.5 * t_max, t_max, n_times, f)
}

/// Average of `f` over a uniform grid of `n_times` points on `[t_lo, t_hi]`.
pub fn numeric_window_average<F>(s: &Spectrum, t_lo: f64, t_hi: f64, n_times: usize, f: F) -> Result<f64>
where
    F: Fn(&FormFactorPoint) -> f64 + Sync + Send,
{
    if n_times < 2 {
        return Err(Error::InvalidParameter("n_times must be >= 2".into()));
    }
    let step = (t_hi - t_lo) / (n_times - 1) as f64;
    let vals = map_indexed(n_times, |i| f(&form_factors_at(s, t_lo + step * i as f64)));
    Ok(pairwise_sum(&vals) / n_times as f64)
}

/// Degeneracy-counting value, falling back to the numeric long-time average with a
/// warning when the spectrum is not generic.
pub fn infinite_time_average_or_numeric(s: &Spectrum, which: TimeAveraged, n_times: usize) -> Result<f64> {
    match infinite_time_average_c(s, which) {
        Err(Error::NonGeneric { order, witness }) => {
            log::warn!("spectrum not generic at order {order} (witness {witness:?}); using numeric time average");
            numeric_time_average(s, n_times, |p| match which {
                TimeAveraged::C2 => p.c2,
                TimeAveraged::C4 => p.c4,
            })
        }
        other => other,
    }
}

/// Power-law exponent `b` of `y ∝ x^b` by least squares on logs; returns `(b, rms)`.
pub fn fit_power_law(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() < 2 || x.len() != y.len() {
        return Err(Error::InsufficientData("power-law fit needs >= 2 paired points".into()));
    }
    if x.iter().chain(y).any(|v| *v <= 0.0) {
        return Err(Error::InvalidParameter("power-law fit needs positive data".into()));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let (_, b, rms) = crate::stats::linear_fit(&lx, &ly);
    Ok((b, rms))
}
