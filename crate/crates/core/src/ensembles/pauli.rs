use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::operator::{check_dense_dim, DenseOperator};

/// Largest register for which Pauli strings are stored as bit masks.
pub const MAX_PAULI_QUBITS: usize = 32;

/// Hermitian Pauli string on `n` qubits, stored as x/z bit masks.
///
/// Qubit `j` (0-based, leftmost letter of the label) is the most significant
/// tensor factor. A qubit with both bits set carries `Y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: u64,
    z: u64,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        PauliString { n, x: 0, z: 0 }
    }

    pub fn from_bits(n: usize, x: u64, z: u64) -> Result<Self> {
        if n > MAX_PAULI_QUBITS {
            return Err(Error::SizeGuard(format!("Pauli strings support at most {MAX_PAULI_QUBITS} qubits")));
        }
        let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        if x & !mask != 0 || z & !mask != 0 {
            return Err(Error::InvalidParameter(format!("Pauli bits exceed {n} qubits")));
        }
        Ok(PauliString { n, x, z })
    }

    /// Parse a label over `{I, X, Y, Z}`.
    pub fn parse(label: &str) -> Result<Self> {
        let n = label.chars().count();
        if n == 0 || n > MAX_PAULI_QUBITS {
            return Err(Error::BadPauliLabel(label.to_string()));
        }
        let (mut x, mut z) = (0u64, 0u64);
        for (j, c) in label.chars().enumerate() {
            let (xb, zb) = match c.to_ascii_uppercase() {
                'I' => (0, 0),
                'X' => (1, 0),
                'Y' => (1, 1),
                'Z' => (0, 1),
                _ => return Err(Error::BadPauliLabel(label.to_string())),
            };
            x |= xb << j;
            z |= zb << j;
        }
        Ok(PauliString { n, x, z })
    }

    /// Single-letter Pauli `letter` on `qubit`, identity elsewhere.
    pub fn single(n: usize, qubit: usize, letter: char) -> Result<Self> {
        if qubit >= n {
            return Err(Error::InvalidParameter(format!("qubit {qubit} out of range for {n} qubits")));
        }
        let mut label = vec!['I'; n];
        label[qubit] = letter;
        Self::parse(&label.into_iter().collect::<String>())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_bits(&self) -> u64 {
        self.x
    }

    pub fn z_bits(&self) -> u64 {
        self.z
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Bit mask of qubits acted on non-trivially.
    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    pub fn weight(&self) -> u32 {
        self.support().count_ones()
    }

    pub fn overlaps(&self, other: &PauliString) -> bool {
        self.support() & other.support() != 0
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    pub fn label(&self) -> String {
        (0..self.n)
            .map(|j| match ((self.x >> j) & 1, (self.z >> j) & 1) {
                (0, 0) => 'I',
                (1, 0) => 'X',
                (1, 1) => 'Y',
                _ => 'Z',
            })
            .collect()
    }

    /// All `4^n` strings, ordered by `(x, z)` masks.
    pub fn all(n: usize) -> impl Iterator<Item = PauliString> {
        let size = 1u64 << n;
        (0..size).flat_map(move |x| (0..size).map(move |z| PauliString { n, x, z }))
    }

    /// Masks in computational-basis index bits (qubit `j` ↔ bit `n-1-j`).
    fn index_masks(&self) -> (usize, usize) {
        let mut xi = 0usize;
        let mut zi = 0usize;
        for j in 0..self.n {
            let bit = 1usize << (self.n - 1 - j);
            if (self.x >> j) & 1 == 1 {
                xi |= bit;
            }
            if (self.z >> j) & 1 == 1 {
                zi |= bit;
            }
        }
        (xi, zi)
    }

    /// `P|c⟩ = phase(c) |c ⊕ flip⟩`; returns `(flip, phase(c) for every c)`.
    pub fn sparse_form(&self) -> (usize, Vec<C64>) {
        let (xi, zi) = self.index_masks();
        let y_count = (self.x & self.z).count_ones();
        let base = i_power(y_count);
        let phases = (0..1usize << self.n)
            .map(|c| if (c & zi).count_ones() % 2 == 1 { -base } else { base })
            .collect();
        (xi, phases)
    }

    /// `P v` without materializing `P`.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let (flip, phases) = self.sparse_form();
        let mut out = vec![C64::new(0.0, 0.0); v.len()];
        for (c, &amp) in v.iter().enumerate() {
            out[c ^ flip] = phases[c] * amp;
        }
        out
    }

    /// `tr(P M)` in `O(d)`.
    pub fn trace_with(&self, m: &DenseOperator) -> C64 {
        let (flip, phases) = self.sparse_form();
        (0..m.dim()).map(|c| phases[c] * m.get(c, c ^ flip)).sum()
    }

    pub fn to_dense(&self) -> Result<DenseOperator> {
        let dim = check_dense_dim(1u128 << self.n)?;
        let (flip, phases) = self.sparse_form();
        let mut m = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
        for (c, ph) in phases.into_iter().enumerate() {
            m[(c ^ flip, c)] = ph;
        }
        Ok(DenseOperator::with_flags(m, true, true))
    }
}

fn i_power(k: u32) -> C64 {
    match k % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Dense Pauli operator for a label such as `"XI"` or `"ZYX"`.
pub fn pauli_operator(label: &str) -> Result<DenseOperator> {
    PauliString::parse(label)?.to_dense()
}

/// Named single-qubit gate: `I`, `X`, `Y`, `Z`, `H`, `S` or `T`.
pub fn single_qubit_gate(name: &str) -> Result<DenseOperator> {
    let o = C64::new(0.0, 0.0);
    let l = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let entries = match name.to_ascii_uppercase().as_str() {
        "I" => [l, o, o, l],
        "X" => [o, l, l, o],
        "Y" => [o, -i, i, o],
        "Z" => [l, o, o, -l],
        "H" => [h, h, h, -h],
        "S" => [l, o, o, i],
        "T" => [l, o, o, C64::from_polar(1.0, std::f64::consts::FRAC_PI_4)],
        other => return Err(Error::InvalidParameter(format!("unknown gate {other:?}"))),
    };
    Ok(DenseOperator::with_flags(DMatrix::from_row_slice(2, 2, &entries), true, false))
}

/// `I ⊗ … ⊗ g ⊗ … ⊗ I` with `g` on `qubit` (0 = most significant).
pub fn embed_single_qubit(g: &DenseOperator, qubit: usize, n: usize) -> Result<DenseOperator> {
    if qubit >= n || g.dim() != 2 {
        return Err(Error::InvalidParameter(format!("cannot place a 2x2 gate on qubit {qubit} of {n}")));
    }
    let dim = check_dense_dim(1u128 << n)?;
    let shift = n - 1 - qubit;
    let mut m = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
    for col in 0..dim {
        let b = (col >> shift) & 1;
        for a in 0..2 {
            let row = (col & !(1 << shift)) | (a << shift);
            m[(row, col)] = g.get(a, b);
        }
    }
    Ok(DenseOperator::with_flags(m, g.is_unitary_flagged(), g.is_hermitian_flagged()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anticommutation_pattern() {
        let xi = PauliString::parse("XI").unwrap();
        let zi = PauliString::parse("ZI").unwrap();
        let iz = PauliString::parse("IZ").unwrap();
        assert!(!xi.commutes_with(&zi));
        assert!(xi.commutes_with(&iz));
        let (a, b, c) = (pauli_operator("XI").unwrap(), pauli_operator("ZI").unwrap(), pauli_operator("IZ").unwrap());
        assert!(a.mul(&b).add(&b.mul(&a)).frobenius_norm() < 1e-14);
        assert!(a.commutes_with(&c, 1e-14));
    }

    #[test]
    fn dense_matches_kron_of_gates() {
        for label in ["XYZ", "YIZ", "ZZX", "IYI"] {
            let gates: Vec<DenseOperator> =
                label.chars().map(|c| single_qubit_gate(&c.to_string()).unwrap()).collect();
            let refs: Vec<&DenseOperator> = gates.iter().collect();
            let kron = DenseOperator::kron_all(&refs).unwrap();
            assert_eq!(pauli_operator(label).unwrap().max_abs_diff(&kron), 0.0, "{label}");
        }
    }

    #[test]
    fn sparse_apply_and_trace_match_dense() {
        let p = PauliString::parse("YXZ").unwrap();
        let dense = p.to_dense().unwrap();
        let v: Vec<C64> = (0..8).map(|k| C64::new(k as f64, 1.0 - k as f64)).collect();
        let expected = dense.matrix() * nalgebra::DVector::from_vec(v.clone());
        for (a, b) in p.apply(&v).iter().zip(expected.iter()) {
            assert!((a - b).norm() < 1e-14);
        }
        let m = pauli_operator("YXI").unwrap();
        assert!((p.trace_with(&m) - dense.trace_product(&m)).norm() < 1e-12);
    }

    #[test]
    fn labels_round_trip_and_reject_garbage() {
        assert_eq!(PauliString::parse("xyzi").unwrap().label(), "XYZI");
        assert!(PauliString::parse("XA").is_err());
        assert!(PauliString::parse("").is_err());
        assert_eq!(PauliString::all(2).count(), 16);
    }

    #[test]
    fn embedding_matches_kron() {
        let t = single_qubit_gate("T").unwrap();
        let id = DenseOperator::identity(2);
        let expected = DenseOperator::kron_all(&[&id, &t, &id]).unwrap();
        assert!(embed_single_qubit(&t, 1, 3).unwrap().max_abs_diff(&expected) < 1e-15);
    }
}
