//! Fourth-moment Clifford averages: the Pauli projector `Q`, `S₄` irreps, generalized
//! Weingarten functions and the infinite-time OTOC asymptotes for Clifford, Haar and
//! doped-Clifford eigenbases.

mod asymptotes;
mod irreps;
mod twirl;

pub use asymptotes::{
    appendix_trace_table, build_u_infty, otoc4_asymptote, otoc4_asymptote_exhaustive_clifford,
    otoc4_asymptote_haar, otoc4_asymptote_weingarten_clifford, otoc4_doped_mc, trace_table_closed_form,
    u_infty_patterns, AsymptoteKind, TraceTableRow, MAX_U_INFTY_DIM,
};
pub use irreps::{Irrep, IrrepTable};
pub use twirl::{
    build_q_projector, exhaustive_clifford_twirl, generalized_weingarten, irrep_projector, CliffordMomentData,
    MAX_MOMENT_QUBITS,
};
