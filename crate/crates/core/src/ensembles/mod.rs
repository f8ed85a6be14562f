//! Random ensembles: spectra, Haar unitaries, Clifford elements, Pauli strings
//! and doped Clifford circuits.

mod clifford;
mod doped;
mod haar;
mod pauli;
mod spectrum;

pub use clifford::{
    clifford_coset_representatives, enumerate_clifford, is_clifford, sample_clifford, sample_clifford_seeded,
    sample_clifford_tableau, Tableau, MAX_ENUMERATION_QUBITS, MAX_SAMPLING_QUBITS,
};
pub use doped::{build_doped_circuit, build_doped_circuit_with, Dopant, DopedCircuit, Layer, Placement};
pub use haar::{sample_haar_unitary, sample_haar_unitary_seeded};
pub use pauli::{embed_single_qubit, pauli_operator, single_qubit_gate, PauliString, MAX_PAULI_QUBITS};
pub use spectrum::{
    sample_gde_spectrum, sample_gue_hamiltonian, sample_gue_spectrum, sample_poisson_spectrum, sample_spectrum,
    tridiagonal_eigenvalues, unitary_from_spectrum, EnsembleKind, EnsembleTag, Spectrum,
};
