use rand::Rng;
use serde::{Deserialize, Serialize};

use super::clifford::{sample_clifford_tableau, Tableau, MAX_SAMPLING_QUBITS};
use super::pauli::{embed_single_qubit, single_qubit_gate};
use crate::error::{Error, Result};
use crate::operator::DenseOperator;

/// Single-qubit non-Clifford gate inserted between Clifford layers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dopant {
    /// `diag(1, e^{iπ/4})`.
    T,
    /// `diag(1, e^{iθ})`; Clifford only for θ a multiple of π/2.
    Phase(f64),
}

impl Dopant {
    pub fn matrix(&self) -> DenseOperator {
        match self {
            Dopant::T => single_qubit_gate("T").expect("known gate"),
            Dopant::Phase(theta) => DenseOperator::from_diagonal(&[
                num_complex::Complex64::new(1.0, 0.0),
                num_complex::Complex64::from_polar(1.0, *theta),
            ]),
        }
    }
}

/// Which qubit each dopant acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Placement {
    #[default]
    Random,
    Fixed(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Layer {
    Clifford(Tableau),
    Dopant { qubit: usize, gate: Dopant },
}

/// `C_k K_k ⋯ C_1 K_1 C_0`, stored in application order (`C_0` first).
///
/// The leading Clifford layer makes the `k = 0` circuit a uniformly random
/// Clifford element.
#[derive(Debug, Clone, PartialEq)]
pub struct DopedCircuit {
    pub n_qubits: usize,
    pub k: usize,
    pub layers: Vec<Layer>,
}

impl DopedCircuit {
    pub fn dopant_count(&self) -> usize {
        self.layers.iter().filter(|l| matches!(l, Layer::Dopant { .. })).count()
    }

    /// Dense product of all layers.
    pub fn materialize(&self) -> Result<DenseOperator> {
        let mut u = DenseOperator::identity(1 << self.n_qubits);
        for layer in &self.layers {
            let step = match layer {
                Layer::Clifford(t) => t.to_dense()?,
                Layer::Dopant { qubit, gate } => embed_single_qubit(&gate.matrix(), *qubit, self.n_qubits)?,
            };
            u = step.mul(&u);
        }
        Ok(DenseOperator::new_unitary(u.into_matrix()).expect("product of unitaries"))
    }
}

/// Doped circuit with T-gate dopants on uniformly random qubits.
pub fn build_doped_circuit<R: Rng + ?Sized>(n_qubits: usize, k: usize, rng: &mut R) -> Result<DopedCircuit> {
    build_doped_circuit_with(n_qubits, k, Dopant::T, Placement::Random, rng)
}

pub fn build_doped_circuit_with<R: Rng + ?Sized>(
    n_qubits: usize,
    k: usize,
    dopant: Dopant,
    placement: Placement,
    rng: &mut R,
) -> Result<DopedCircuit> {
    if n_qubits == 0 || n_qubits > MAX_SAMPLING_QUBITS {
        return Err(Error::SizeGuard(format!(
            "doped circuits are limited to 1..={MAX_SAMPLING_QUBITS} qubits, got {n_qubits}"
        )));
    }
    if let Placement::Fixed(q) = placement {
        if q >= n_qubits {
            return Err(Error::InvalidParameter(format!("dopant qubit {q} out of range")));
        }
    }
    let mut layers = Vec::with_capacity(2 * k + 1);
    layers.push(Layer::Clifford(sample_clifford_tableau(n_qubits, rng)?));
    for _ in 0..k {
        let qubit = match placement {
            Placement::Random => rng.random_range(0..n_qubits),
            Placement::Fixed(q) => q,
        };
        layers.push(Layer::Dopant { qubit, gate: dopant });
        layers.push(Layer::Clifford(sample_clifford_tableau(n_qubits, rng)?));
    }
    Ok(DopedCircuit { n_qubits, k, layers })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::is_clifford;
    use crate::parallel::RngSeed;

    #[test]
    fn undoped_circuit_is_clifford() {
        let mut rng = RngSeed(1).stream(0);
        for n in 1..=3 {
            let c = build_doped_circuit(n, 0, &mut rng).unwrap();
            assert_eq!(c.dopant_count(), 0);
            assert!(is_clifford(&c.materialize().unwrap()).unwrap());
        }
    }

    #[test]
    fn single_dopant_breaks_clifford_property() {
        let mut rng = RngSeed(2).stream(0);
        for _ in 0..5 {
            let c = build_doped_circuit(2, 1, &mut rng).unwrap();
            assert_eq!(c.dopant_count(), 1);
            let u = c.materialize().unwrap();
            assert!(u.unitarity_deviation() <= 1e-10);
            assert!(!is_clifford(&u).unwrap());
        }
    }

    #[test]
    fn layer_count_and_guards() {
        let mut rng = RngSeed(3).stream(0);
        let c = build_doped_circuit(3, 4, &mut rng).unwrap();
        assert_eq!(c.layers.len(), 9);
        assert!(build_doped_circuit(6, 1, &mut rng).is_err());
        assert!(build_doped_circuit_with(2, 1, Dopant::T, Placement::Fixed(2), &mut rng).is_err());
    }

    #[test]
    fn clifford_phase_dopant_stays_clifford() {
        let mut rng = RngSeed(4).stream(0);
        let c = build_doped_circuit_with(2, 3, Dopant::Phase(std::f64::consts::FRAC_PI_2), Placement::Fixed(0), &mut rng)
            .unwrap();
        assert!(is_clifford(&c.materialize().unwrap()).unwrap());
    }
}
