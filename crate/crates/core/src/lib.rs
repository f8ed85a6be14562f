//! Isospectral twirling of quantum-chaos probes.
//!
//! The crate is organised bottom-up:
//!
//! * [`operator`] and [`perm`] hold dense complex operators and symmetric-group elements,
//! * [`perm_algebra`] builds permutation operators, Weingarten tables and the
//!   isospectral twirling channel for two and four copies,
//! * [`ensembles`] samples spectra (GUE, GDE, Poisson), Haar unitaries, Clifford
//!   elements and doped Clifford circuits,
//! * [`form_factors`] evaluates spectral form factors and their ensemble averages,
//! * [`probes`] implements OTOCs, frame potentials, the Loschmidt echo, the
//!   2-Rényi entropy and the 2-Rényi tripartite mutual information,
//! * [`clifford_moments`] carries the fourth-moment Clifford machinery and the
//!   infinite-time OTOC laws.
//!
//! Monte Carlo loops go through [`parallel`], which derives one random stream per task
//! and reduces in index order, so results do not depend on the number of worker threads.

pub mod clifford_moments;
pub mod ensembles;
pub mod error;
pub mod form_factors;
pub mod operator;
pub mod oracles;
pub mod parallel;
pub mod perm;
pub mod perm_algebra;
pub mod probes;
pub mod stats;

pub use error::{Error, Result};
pub use operator::DenseOperator;
pub use perm::Perm;

pub use num_complex::Complex64 as C64;
