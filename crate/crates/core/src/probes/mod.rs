//! Quantum-chaos probes, each available as an exact value for a given unitary, as
//! the closed-form isospectral twirl and as a Monte Carlo twirl over Haar
//! conjugations `G† U G`.

mod entanglement;
mod fluct;
mod frame;
mod loschmidt;
mod otoc;
mod tmi;

pub use entanglement::{
    balanced_split, reduced_purity, renyi2_entropy, renyi2_twirled_bound, renyi2_twirled_bound_exact,
    renyi2_twirled_mc, twirled_purity, BipartiteSplit, PureState, NORM_TOL,
};
pub use fluct::{detect_oscillation, fit_fluctuation_decay, fit_log_law, fluctuation_time, FluctFit, OscillationReport};
pub use frame::{
    frame_potential_closed_k1, frame_potential_lower_bound, frame_potential_mc, frame_potential_mc_spectrum,
    frame_potential_mc_two_sample, frame_potential_time_avg_bound, haar_frame_potential, MAX_FRAME_MC_DIM,
};
pub use loschmidt::{
    loschmidt_echo, loschmidt_exact, loschmidt_offset_reference, loschmidt_twirled_closed, loschmidt_twirled_mc,
    EchoMode,
};
pub use otoc::{
    otoc4_exact, otoc4_exact_complex, otoc4_offset_reference, otoc4_permutation_form, otoc4_twirled_closed,
    otoc4_twirled_mc, otoc4k_exact, otoc4k_permutation, otoc4k_permutation_form, otoc4k_twirled_mc, OtocFormula,
    MAX_OTOC8_DIM,
};
pub use tmi::{
    swap_traces, tmi_choi_route, tmi_plateau, tmi_renyi2, tmi_twirled_bound, tmi_twirled_bound_exact, tmi_twirled_mc,
    twirled_swap_traces, MAX_TMI_DIM,
};

use crate::ensembles::sample_haar_unitary;
use crate::error::{Error, Result};
use crate::operator::DenseOperator;
use crate::parallel::{map_indexed, RngSeed};
use crate::stats::Estimate;

/// `f(G† U G)` for `n` Haar samples; sample `i` uses `seed.stream(i)`.
pub fn haar_conjugated_samples<F>(u: &DenseOperator, n: usize, seed: RngSeed, f: F) -> Result<Vec<f64>>
where
    F: Fn(&DenseOperator) -> Result<f64> + Sync + Send,
{
    if n == 0 {
        return Err(Error::InvalidParameter("n_samples must be >= 1".into()));
    }
    map_indexed(n, |i| {
        let g = sample_haar_unitary(u.dim(), &mut seed.stream(i as u64));
        f(&g.adjoint().mul(u).mul(&g))
    })
    .into_iter()
    .collect()
}

pub fn haar_conjugated_estimate<F>(u: &DenseOperator, n: usize, seed: RngSeed, f: F) -> Result<Estimate>
where
    F: Fn(&DenseOperator) -> Result<f64> + Sync + Send,
{
    Ok(Estimate::from_samples(&haar_conjugated_samples(u, n, seed, f)?))
}

pub(crate) fn same_dim(ops: &[&DenseOperator]) -> Result<usize> {
    let d = ops[0].dim();
    match ops.iter().find(|o| o.dim() != d) {
        Some(bad) => Err(Error::DimensionMismatch { expected: d, found: bad.dim() }),
        None => Ok(d),
    }
}
