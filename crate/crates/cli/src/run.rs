//! Experiment execution: one config in, curve files and a metadata sidecar out.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use twirlkit::clifford_moments::{
    build_q_projector, otoc4_asymptote, otoc4_asymptote_exhaustive_clifford, otoc4_asymptote_haar,
    otoc4_asymptote_weingarten_clifford, otoc4_doped_mc, AsymptoteKind, MAX_MOMENT_QUBITS, MAX_U_INFTY_DIM,
};
use twirlkit::ensembles::{sample_spectrum, unitary_from_spectrum, Spectrum};
use twirlkit::form_factors::{c4_plateau, form_factors_at, FormFactor, ProbeCurve};
use twirlkit::parallel::{map_indexed, worker_count, RngSeed};
use twirlkit::perm_algebra::TwirledChannel;
use twirlkit::probes::{
    balanced_split, frame_potential_closed_k1, frame_potential_lower_bound, frame_potential_mc_spectrum,
    haar_frame_potential, loschmidt_offset_reference, loschmidt_twirled_closed, loschmidt_twirled_mc,
    otoc4_offset_reference, otoc4_twirled_closed, otoc4_twirled_mc, renyi2_twirled_bound,
    renyi2_twirled_bound_exact, renyi2_twirled_mc, tmi_plateau, tmi_twirled_bound, tmi_twirled_bound_exact,
    tmi_twirled_mc, PureState,
};
use twirlkit::stats::Estimate;
use twirlkit::DenseOperator;

use crate::config::{ExperimentConfig, Probe};
use crate::output::{CurveSummary, CurveTable, OutputError, Staging};

/// Largest `d` for the exact Jensen entropy curve.
pub const MAX_JENSEN_ENTROPY_DIM: usize = 64;

const SPECTRUM_DOMAIN: u64 = 1;
const TWIRL_DOMAIN: u64 = 2;
const CIRCUIT_DOMAIN: u64 = 3;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Numerics(#[from] twirlkit::Error),
    #[error(transparent)]
    Output(#[from] OutputError),
}

/// Everything needed to replay and audit a run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub config: ExperimentConfig,
    pub version: String,
    pub wall_time_s: f64,
    pub workers: usize,
    pub files: Vec<String>,
    pub summaries: BTreeMap<String, CurveSummary>,
    /// Analytic reference lines (plateaus, Haar values).
    pub references: BTreeMap<String, f64>,
    /// Scalar results that are not curves.
    pub values: BTreeMap<String, Estimate>,
}

/// Curves and scalars produced by a probe, before anything touches disk.
#[derive(Debug, Default)]
pub struct ProbeOutput {
    pub curves: Vec<CurveTable>,
    pub references: BTreeMap<String, f64>,
    pub values: BTreeMap<String, Estimate>,
}

impl ProbeOutput {
    fn reference(&mut self, name: &str, value: f64) {
        self.references.insert(name.to_string(), value);
    }

    /// Adds a curve and records its trailing-window estimate as `<name>.tail`.
    fn add_curve(&mut self, name: String, curve: &ProbeCurve) {
        if let Some(tail) = curve.tail {
            self.values.insert(format!("{name}.tail"), tail);
        }
        self.curves.push(CurveTable::from_curve(name, curve));
    }
}

/// Runs `cfg` and writes into `out_dir` (or the config's `output`, or `.`).
pub fn run(cfg: &ExperimentConfig, out_dir: Option<&Path>) -> Result<RunRecord, RunError> {
    let started = Instant::now();
    let output = compute(cfg)?;
    let target: PathBuf = out_dir.map(Path::to_path_buf).or_else(|| cfg.output.clone()).unwrap_or_else(|| ".".into());
    let mut staging = Staging::new(&target)?;
    let mut files = Vec::new();
    let mut summaries = BTreeMap::new();
    for table in &output.curves {
        files.push(staging.write_curve(table)?);
        summaries.insert(table.name.clone(), table.summary());
    }
    let meta_name = format!("{}.meta.json", cfg.probe);
    files.push(meta_name.clone());
    let record = RunRecord {
        config: cfg.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        wall_time_s: started.elapsed().as_secs_f64(),
        workers: worker_count(),
        files,
        summaries,
        references: output.references,
        values: output.values,
    };
    staging.write_json(&meta_name, &record)?;
    staging.commit()?;
    Ok(record)
}

/// The numerical part of [`run`].
pub fn compute(cfg: &ExperimentConfig) -> Result<ProbeOutput, RunError> {
    let out = match cfg.probe {
        Probe::FormFactors => form_factor_probe(cfg)?,
        Probe::Otoc => otoc_probe(cfg)?,
        Probe::FramePotential => frame_probe(cfg)?,
        Probe::Loschmidt => echo_probe(cfg)?,
        Probe::Entanglement => entanglement_probe(cfg)?,
        Probe::Tmi => tmi_probe(cfg)?,
        Probe::CliffordAsymptote => asymptote_probe(cfg)?,
        Probe::DopedOtoc => doped_probe(cfg)?,
    };
    Ok(out)
}

fn spectrum_seed(cfg: &ExperimentConfig) -> RngSeed {
    cfg.seed().derive(SPECTRUM_DOMAIN, 0)
}

/// Seed of the twirl sample set for spectrum `i` at grid point `j`.
fn twirl_seed(cfg: &ExperimentConfig, i: usize, j: usize) -> RngSeed {
    cfg.seed().derive(TWIRL_DOMAIN, (i * cfg.time_grid.points + j) as u64)
}

/// Evaluates `point(spectrum_index, spectrum, grid_index, t)` for every spectrum and
/// time and averages each of its outputs over spectra.
fn spectral_curves<F>(cfg: &ExperimentConfig, names: &[&str], point: F) -> Result<ProbeOutput, RunError>
where
    F: Fn(usize, &Spectrum, usize, f64) -> twirlkit::Result<Vec<f64>> + Sync + Send,
{
    let times = cfg.time_grid.times()?;
    let seed = spectrum_seed(cfg);
    let d = cfg.dim();
    let per_spectrum = map_indexed(cfg.n_spectra, |i| -> twirlkit::Result<Vec<Vec<f64>>> {
        let s = sample_spectrum(&cfg.ensemble, d, &mut seed.stream(i as u64))?;
        times.iter().enumerate().map(|(j, &t)| point(i, &s, j, t)).collect()
    })
    .into_iter()
    .collect::<twirlkit::Result<Vec<_>>>()?;
    let mut out = ProbeOutput::default();
    for (c, name) in names.iter().enumerate() {
        let rows: Vec<Vec<f64>> = per_spectrum.iter().map(|r| r.iter().map(|v| v[c]).collect()).collect();
        let curve = ProbeCurve::from_rows(*name, &times, &rows)?;
        out.add_curve(format!("{}_{}", cfg.probe, name), &curve);
    }
    Ok(out)
}

fn form_factor_probe(cfg: &ExperimentConfig) -> Result<ProbeOutput, RunError> {
    let names: Vec<&str> = FormFactor::ALL.iter().map(|f| f.name()).collect();
    let mut out = spectral_curves(cfg, &names, |_, s, _, t| {
        let p = form_factors_at(s, t);
        Ok(FormFactor::ALL.iter().map(|f| f.of(&p)).collect())
    })?;
    let d = cfg.dim();
    out.reference("c4_plateau", c4_plateau(d));
    out.reference("c2_plateau", 1.0 / d as f64);
    Ok(out)
}

fn pauli_pair(cfg: &ExperimentConfig) -> Result<(DenseOperator, DenseOperator), RunError> {
    Ok((cfg.operator_a()?.to_dense()?, cfg.operator_b()?.to_dense()?))
}

fn otoc_probe(cfg: &ExperimentConfig) -> Result<ProbeOutput, RunError> {
    let (a, b) = pauli_pair(cfg)?;
    let mut names = vec!["twirled", "offset_reference"];
    if cfg.monte_carlo {
        names.push("mc");
    }
    let mut out = spectral_curves(cfg, &names, |i, s, j, t| {
        let ch = TwirledChannel::from_spectrum(s, t, 2)?;
        let mut v = vec![otoc4_twirled_closed(&ch, &a, &b)?, otoc4_offset_reference(&form_factors_at(s, t))];
        if cfg.monte_carlo {
            let u = unitary_from_spectrum(s, t)?;
            v.push(otoc4_twirled_mc(&u, &a, &b, cfg.n_twirl_samples, twirl_seed(cfg, i, j))?.mean);
        }
        Ok(v)
    })?;
    let d = cfg.dim();
    out.reference("offset", -1.0 / (d * d) as f64);
    out.reference("haar_asymptote", otoc4_asymptote(AsymptoteKind::Haar, d)?);
    out.reference("clifford_asymptote", otoc4_asymptote(AsymptoteKind::Clifford, d)?);
    Ok(out)
}

fn frame_probe(cfg: &ExperimentConfig) -> Result<ProbeOutput, RunError> {
    let k = cfg.k;
    let mut names = vec!["lower_bound"];
    if k == 1 {
        names.push("closed");
    }
    if cfg.monte_carlo {
        names.push("mc");
    }
    let mut out = spectral_curves(cfg, &names, |i, s, j, t| {
        let p = form_factors_at(s, t);
        let mut v = vec![frame_potential_lower_bound(&p, k)];
        if k == 1 {
            v.push(frame_potential_closed_k1(&p)?);
        }
        if cfg.monte_carlo {
            v.push(frame_potential_mc_spectrum(s, t, k, cfg.n_twirl_samples, twirl_seed(cfg, i, j))?.mean);
        }
        Ok(v)
    })?;
    let d = cfg.dim() as f64;
    out.reference("haar", haar_frame_potential(k));
    if k == 1 {
        // closed form at the generic plateau c̃₂ = 1/d, c̃₄ = (2d−1)/d³
        out.reference("long_time", 3.0 * d / (d + 1.0));
    }
    Ok(out)
}

fn echo_probe(cfg: &ExperimentConfig) -> Result<ProbeOutput, RunError> {
    let a = cfg.operator_a()?.to_dense()?;
    let mut names = vec!["twirled", "offset_reference"];
    if cfg.monte_carlo {
        names.push("mc");
    }
    let mut out = spectral_curves(cfg, &names, |i, s, j, t| {
        let ch = TwirledChannel::from_spectrum(s, t, 2)?;
        let mut v = vec![loschmidt_twirled_closed(&ch, &a)?, loschmidt_offset_reference(&form_factors_at(s, t))];
        if cfg.monte_carlo {
            let u = unitary_from_spectrum(s, t)?;
            v.push(loschmidt_twirled_mc(&u, &a, cfg.n_twirl_samples, twirl_seed(cfg, i, j))?.mean);
        }
        Ok(v)
    })?;
    let d = cfg.dim();
    out.reference("offset", 1.0 / (d * d) as f64);
    out.reference("c4_plateau", c4_plateau(d));
    Ok(out)
}

fn entanglement_probe(cfg: &ExperimentConfig) -> Result<ProbeOutput, RunError> {
    let d = cfg.dim();
    let split = balanced_split(d)?;
    let psi = PureState::basis(d, 0)?;
    let jensen = d <= MAX_JENSEN_ENTROPY_DIM;
    if !jensen {
        log::info!("skipping the exact Jensen entropy curve above d = {MAX_JENSEN_ENTROPY_DIM}");
    }
    let mut names = vec!["bound"];
    if jensen {
        names.push("jensen");
    }
    if cfg.monte_carlo {
        names.push("mc");
    }
    let mut out = spectral_curves(cfg, &names, |i, s, j, t| {
        let mut v = vec![renyi2_twirled_bound(&form_factors_at(s, t), 1.0, split)?];
        if jensen {
            v.push(renyi2_twirled_bound_exact(&TwirledChannel::from_spectrum(s, t, 2)?, &psi, split)?);
        }
        if cfg.monte_carlo {
            let u = unitary_from_spectrum(s, t)?;
            v.push(renyi2_twirled_mc(&u, &psi, split, cfg.n_twirl_samples, twirl_seed(cfg, i, j))?.mean);
        }
        Ok(v)
    })?;
    out.reference("late_time_bound", -(2.0 / (d as f64).sqrt()).ln());
    out.reference("max_entropy", 0.5 * (d as f64).ln());
    Ok(out)
}

fn tmi_probe(cfg: &ExperimentConfig) -> Result<ProbeOutput, RunError> {
    let d = cfg.dim();
    let split = balanced_split(d)?;
    let mut names = vec!["bound", "jensen"];
    if cfg.monte_carlo {
        names.push("mc");
    }
    let mut out = spectral_curves(cfg, &names, |i, s, j, t| {
        let ch = TwirledChannel::from_spectrum(s, t, 2)?;
        let mut v = vec![tmi_twirled_bound(&form_factors_at(s, t)), tmi_twirled_bound_exact(&ch, split)?];
        if cfg.monte_carlo {
            let u = unitary_from_spectrum(s, t)?;
            v.push(tmi_twirled_mc(&u, split, cfg.n_twirl_samples, twirl_seed(cfg, i, j))?.mean);
        }
        Ok(v)
    })?;
    out.reference("plateau", tmi_plateau(d));
    out.reference("minimum", -(d as f64).log2());
    Ok(out)
}

fn exact(value: f64) -> Estimate {
    Estimate { mean: value, stderr: 0.0, n: 1 }
}

fn asymptote_probe(cfg: &ExperimentConfig) -> Result<ProbeOutput, RunError> {
    let d = cfg.dim();
    let (a, b) = (cfg.operator_a()?, cfg.operator_b()?);
    let mut out = ProbeOutput::default();
    out.reference("clifford", otoc4_asymptote(AsymptoteKind::Clifford, d)?);
    out.reference("haar", otoc4_asymptote(AsymptoteKind::Haar, d)?);
    if cfg.qubits() <= MAX_MOMENT_QUBITS {
        out.values.insert("clifford_exhaustive".into(), exact(otoc4_asymptote_exhaustive_clifford(&a, &b)?));
        let data = build_q_projector(cfg.qubits())?;
        out.values.insert("clifford_weingarten".into(), exact(otoc4_asymptote_weingarten_clifford(&data, &a, &b)?));
    }
    if d <= MAX_U_INFTY_DIM {
        out.values.insert("haar_weingarten".into(), exact(otoc4_asymptote_haar(&a.to_dense()?, &b.to_dense()?)?));
    }
    Ok(out)
}

fn doped_probe(cfg: &ExperimentConfig) -> Result<ProbeOutput, RunError> {
    let (n, d) = (cfg.qubits(), cfg.dim());
    let (a, b) = (cfg.operator_a()?, cfg.operator_b()?);
    let mut table = CurveTable {
        name: format!("{}_otoc", cfg.probe),
        x_label: "k".into(),
        x: vec![],
        mean: vec![],
        stderr: vec![],
        n_samples: vec![],
    };
    let mut law = CurveTable { name: format!("{}_leading_order", cfg.probe), ..table.clone() };
    for (i, &k) in cfg.doping.iter().enumerate() {
        let seed = cfg.seed().derive(CIRCUIT_DOMAIN, i as u64);
        let e = otoc4_doped_mc(n, k, &a, &b, cfg.dopant, cfg.placement, cfg.n_twirl_samples, seed)?;
        table.x.push(k as f64);
        table.mean.push(e.mean);
        table.stderr.push(e.stderr);
        table.n_samples.push(e.n);
        law.x.push(k as f64);
        law.mean.push(otoc4_asymptote(AsymptoteKind::Doped(k), d)?);
        law.stderr.push(0.0);
        law.n_samples.push(1);
    }
    let mut out = ProbeOutput { curves: vec![table, law], ..Default::default() };
    out.reference("clifford", otoc4_asymptote(AsymptoteKind::Clifford, d)?);
    out.reference("haar", otoc4_asymptote(AsymptoteKind::Haar, d)?);
    Ok(out)
}
