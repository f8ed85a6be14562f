//! Clifford group elements as stabilizer tableaux.
//!
//! A tableau stores the conjugation images of the generators: row `j < n` is
//! `C X_j C†` and row `n + j` is `C Z_j C†`, each a signed Hermitian Pauli
//! string. Uniform sampling follows the Bravyi–Maslov canonical form.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;

use super::pauli::{PauliString, MAX_PAULI_QUBITS};
use crate::error::{Error, Result};
use crate::operator::{check_dense_dim, DenseOperator};
use crate::parallel::RngSeed;

/// Dense sampling limit.
pub const MAX_SAMPLING_QUBITS: usize = 5;
/// Exhaustive enumeration limit.
pub const MAX_ENUMERATION_QUBITS: usize = 2;

const PAULI_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tableau {
    n: usize,
    rows: Vec<PauliString>,
    signs: Vec<bool>,
}

impl Tableau {
    pub fn identity(n: usize) -> Self {
        let mut rows = Vec::with_capacity(2 * n);
        for j in 0..n {
            rows.push(PauliString::from_bits(n, 1 << j, 0).expect("in range"));
        }
        for j in 0..n {
            rows.push(PauliString::from_bits(n, 0, 1 << j).expect("in range"));
        }
        Tableau { n, rows, signs: vec![false; 2 * n] }
    }

    /// Build from explicit rows; the rows must satisfy the symplectic relations.
    pub fn from_rows(rows: Vec<PauliString>, signs: Vec<bool>) -> Result<Self> {
        let n = rows.len() / 2;
        if rows.len() != 2 * n || signs.len() != rows.len() || rows.iter().any(|r| r.n() != n) {
            return Err(Error::InvalidParameter("tableau needs 2n rows on n qubits".into()));
        }
        let t = Tableau { n, rows, signs };
        if !t.is_symplectic() {
            return Err(Error::InvalidParameter("tableau rows violate the symplectic relations".into()));
        }
        Ok(t)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `(C X_j C†)` as `(string, negative)`.
    pub fn x_image(&self, j: usize) -> (PauliString, bool) {
        (self.rows[j], self.signs[j])
    }

    /// `(C Z_j C†)` as `(string, negative)`.
    pub fn z_image(&self, j: usize) -> (PauliString, bool) {
        (self.rows[self.n + j], self.signs[self.n + j])
    }

    pub fn signs(&self) -> &[bool] {
        &self.signs
    }

    pub fn is_symplectic(&self) -> bool {
        let n = self.n;
        for a in 0..2 * n {
            for b in a + 1..2 * n {
                let should_anticommute = b == a + n && a < n;
                if self.rows[a].commutes_with(&self.rows[b]) == should_anticommute {
                    return false;
                }
            }
        }
        true
    }

    /// Same symplectic part with all signs cleared.
    pub fn unsigned(&self) -> Tableau {
        Tableau { n: self.n, rows: self.rows.clone(), signs: vec![false; 2 * self.n] }
    }

    /// Dense unitary, fixed up to a global phase.
    ///
    /// `C|0…0⟩` is the joint +1 eigenvector of the signed Z images, and
    /// `C|x⟩ = ∏_j (C X_j C†)^{x_j} C|0…0⟩`.
    pub fn to_dense(&self) -> Result<DenseOperator> {
        if self.n > MAX_SAMPLING_QUBITS {
            return Err(Error::SizeGuard(format!(
                "dense Clifford elements are limited to {MAX_SAMPLING_QUBITS} qubits"
            )));
        }
        let n = self.n;
        let dim = check_dense_dim(1u128 << n)?;
        let signed = |row: usize, v: &[C64]| -> Vec<C64> {
            let out = self.rows[row].apply(v);
            if self.signs[row] {
                out.into_iter().map(|z| -z).collect()
            } else {
                out
            }
        };
        // Stabilizer state: project basis vectors until one survives with weight ≥ 1/d.
        let mut psi = None;
        for c in 0..dim {
            let mut v = vec![C64::new(0.0, 0.0); dim];
            v[c] = C64::new(1.0, 0.0);
            for j in 0..n {
                let sv = signed(n + j, &v);
                v = v.iter().zip(&sv).map(|(a, b)| (a + b) * 0.5).collect();
            }
            let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm * norm >= 0.5 / dim as f64 {
                psi = Some(v.into_iter().map(|z| z / norm).collect::<Vec<_>>());
                break;
            }
        }
        let psi = psi.ok_or_else(|| Error::InvalidParameter("tableau has no stabilizer state".into()))?;
        let mut m = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
        for x in 0..dim {
            let mut v = psi.clone();
            for j in 0..n {
                // qubit j is bit n-1-j of the basis index
                if (x >> (n - 1 - j)) & 1 == 1 {
                    v = signed(j, &v);
                }
            }
            for (r, z) in v.into_iter().enumerate() {
                m[(r, x)] = z;
            }
        }
        Ok(DenseOperator::with_flags(m, true, false))
    }

    /// Recover the tableau of a dense unitary, or `None` when it is not Clifford.
    pub fn from_dense(u: &DenseOperator) -> Result<Option<Tableau>> {
        let dim = u.dim();
        if !dim.is_power_of_two() || dim < 2 {
            return Err(Error::InvalidParameter(format!("dimension {dim} is not a qubit register")));
        }
        let n = dim.trailing_zeros() as usize;
        if n > MAX_PAULI_QUBITS {
            return Err(Error::SizeGuard("register too large".into()));
        }
        let ud = u.adjoint();
        let mut rows = Vec::with_capacity(2 * n);
        let mut signs = Vec::with_capacity(2 * n);
        let generators = (0..n).map(|j| PauliString::from_bits(n, 1 << j, 0)).chain((0..n).map(|j| PauliString::from_bits(n, 0, 1 << j)));
        for g in generators {
            let image = u.mul(&g?.to_dense()?).mul(&ud);
            match pauli_decomposition_single(&image, n) {
                Some((p, neg)) => {
                    rows.push(p);
                    signs.push(neg);
                }
                None => return Ok(None),
            }
        }
        Ok(Some(Tableau { n, rows, signs }))
    }
}

/// If `m = ±P` for a Hermitian Pauli string `P`, return it.
fn pauli_decomposition_single(m: &DenseOperator, n: usize) -> Option<(PauliString, bool)> {
    let d = m.dim() as f64;
    let mut found = None;
    let mut weight = 0.0;
    for p in PauliString::all(n) {
        let c = p.trace_with(m) / d;
        let w = c.norm_sqr();
        weight += w;
        if (c.norm() - 1.0).abs() < PAULI_TOL && c.im.abs() < PAULI_TOL {
            found = Some((p, c.re < 0.0));
        }
    }
    if (weight - 1.0).abs() > PAULI_TOL {
        return None;
    }
    found
}

/// Whether conjugation by `u` maps every Pauli generator to a signed Pauli string.
pub fn is_clifford(u: &DenseOperator) -> Result<bool> {
    Ok(Tableau::from_dense(u)?.is_some())
}

fn random_bit<R: Rng + ?Sized>(rng: &mut R) -> bool {
    rng.random::<bool>()
}

type BitMatrix = Vec<Vec<u8>>;

fn zeros(r: usize, c: usize) -> BitMatrix {
    vec![vec![0; c]; r]
}

fn eye(n: usize) -> BitMatrix {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1;
    }
    m
}

fn matmul2(a: &BitMatrix, b: &BitMatrix) -> BitMatrix {
    let (r, k, c) = (a.len(), b.len(), b[0].len());
    let mut out = zeros(r, c);
    for i in 0..r {
        for l in 0..k {
            if a[i][l] == 1 {
                for j in 0..c {
                    out[i][j] ^= b[l][j];
                }
            }
        }
    }
    out
}

fn transpose(a: &BitMatrix) -> BitMatrix {
    let (r, c) = (a.len(), a[0].len());
    let mut out = zeros(c, r);
    for i in 0..r {
        for j in 0..c {
            out[j][i] = a[i][j];
        }
    }
    out
}

/// Inverse of a unit lower-triangular matrix over GF(2) by forward substitution.
fn inverse_unit_lower(a: &BitMatrix) -> BitMatrix {
    let n = a.len();
    let mut inv = eye(n);
    for i in 0..n {
        for j in 0..i {
            if a[i][j] == 1 {
                let src = inv[j].clone();
                for (dst, s) in inv[i].iter_mut().zip(src) {
                    *dst ^= s;
                }
            }
        }
    }
    inv
}

fn fill_lower<R: Rng + ?Sized>(m: &mut BitMatrix, symmetric: bool, rng: &mut R) {
    let n = m.len();
    for i in 0..n {
        for j in 0..i {
            let b = random_bit(rng) as u8;
            m[i][j] = b;
            if symmetric {
                m[j][i] = b;
            }
        }
    }
}

/// Quantum Mallows sample: Hadamard flags and a qubit permutation.
fn sample_qmallows<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (Vec<bool>, Vec<usize>) {
    let mut had = vec![false; n];
    let mut perm = vec![0usize; n];
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..n {
        let m = n - i;
        let eps = 4f64.powi(-(m as i32));
        let r: f64 = rng.random();
        let index = -((r + (1.0 - r) * eps).log2().ceil()) as i64;
        let index = index.max(0) as usize;
        had[i] = index < m;
        let k = if index < m { index } else { 2 * m - index - 1 };
        perm[i] = pool.remove(k);
    }
    (had, perm)
}

/// Uniformly random Clifford tableau (symplectic part and signs).
pub fn sample_clifford_tableau<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Tableau> {
    if n == 0 || n > MAX_PAULI_QUBITS {
        return Err(Error::SizeGuard(format!("Clifford sampling needs 1..={MAX_PAULI_QUBITS} qubits, got {n}")));
    }
    let (had, perm) = sample_qmallows(n, rng);
    // Draw order matches the reference construction: gamma1, gamma2, delta1, delta2.
    let mut gamma1 = zeros(n, n);
    let mut gamma2 = zeros(n, n);
    for i in 0..n {
        gamma1[i][i] = random_bit(rng) as u8;
    }
    for i in 0..n {
        gamma2[i][i] = random_bit(rng) as u8;
    }
    let mut delta1 = eye(n);
    let mut delta2 = eye(n);
    fill_lower(&mut gamma1, true, rng);
    fill_lower(&mut gamma2, true, rng);
    fill_lower(&mut delta1, false, rng);
    fill_lower(&mut delta2, false, rng);
    let build = |gamma: &BitMatrix, delta: &BitMatrix| {
        let prod = matmul2(gamma, delta);
        let inv_t = transpose(&inverse_unit_lower(delta));
        let mut table = zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                table[i][j] = delta[i][j];
                table[n + i][j] = prod[i][j];
                table[n + i][n + j] = inv_t[i][j];
            }
        }
        table
    };
    let table1 = build(&gamma1, &delta1);
    let table2 = build(&gamma2, &delta2);
    let mut table: BitMatrix = (0..2 * n)
        .map(|r| if r < n { table2[perm[r]].clone() } else { table2[n + perm[r - n]].clone() })
        .collect();
    for (i, &h) in had.iter().enumerate() {
        if h {
            table.swap(i, n + i);
        }
    }
    let symp = matmul2(&table1, &table);
    let mut rows = Vec::with_capacity(2 * n);
    for row in &symp {
        let (mut x, mut z) = (0u64, 0u64);
        for j in 0..n {
            x |= (row[j] as u64) << j;
            z |= (row[n + j] as u64) << j;
        }
        rows.push(PauliString::from_bits(n, x, z)?);
    }
    let signs = (0..2 * n).map(|_| random_bit(rng)).collect();
    let t = Tableau { n, rows, signs };
    debug_assert!(t.is_symplectic());
    Ok(t)
}

/// Uniformly random Clifford unitary (modulo global phase).
pub fn sample_clifford<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<DenseOperator> {
    if n > MAX_SAMPLING_QUBITS {
        return Err(Error::SizeGuard(format!("dense Clifford sampling is limited to {MAX_SAMPLING_QUBITS} qubits")));
    }
    sample_clifford_tableau(n, rng)?.to_dense()
}

pub fn sample_clifford_seeded(n: usize, seed: RngSeed) -> Result<DenseOperator> {
    sample_clifford(n, &mut seed.stream(0))
}

/// Every symplectic tableau with zero signs: one representative per coset of the Pauli group.
pub fn clifford_coset_representatives(n: usize) -> Result<Vec<Tableau>> {
    if n == 0 || n > MAX_ENUMERATION_QUBITS {
        return Err(Error::SizeGuard(format!(
            "Clifford enumeration is limited to 1..={MAX_ENUMERATION_QUBITS} qubits, got {n}"
        )));
    }
    let width = 2 * n;
    let row_count = 1u64 << width;
    let rows: Vec<PauliString> = (0..row_count)
        .filter(|&r| r != 0)
        .map(|r| PauliString::from_bits(n, r & ((1 << n) - 1), r >> n).expect("in range"))
        .collect();
    let mut out = Vec::new();
    let mut current: Vec<PauliString> = Vec::with_capacity(width);
    extend_symplectic(n, &rows, &mut current, &mut out);
    Ok(out)
}

fn extend_symplectic(n: usize, pool: &[PauliString], current: &mut Vec<PauliString>, out: &mut Vec<Tableau>) {
    let pos = current.len();
    if pos == 2 * n {
        out.push(Tableau { n, rows: current.clone(), signs: vec![false; 2 * n] });
        return;
    }
    for cand in pool {
        let ok = current.iter().enumerate().all(|(a, r)| {
            let should_anticommute = a < n && pos == a + n;
            r.commutes_with(cand) != should_anticommute
        });
        if ok {
            current.push(*cand);
            extend_symplectic(n, pool, current, out);
            current.pop();
        }
    }
}

/// Every Clifford element modulo global phase, as tableaux.
pub fn enumerate_clifford(n: usize) -> Result<Vec<Tableau>> {
    let reps = clifford_coset_representatives(n)?;
    let sign_patterns = 1u32 << (2 * n);
    let mut out = Vec::with_capacity(reps.len() * sign_patterns as usize);
    for rep in &reps {
        for s in 0..sign_patterns {
            let signs = (0..2 * n).map(|b| (s >> b) & 1 == 1).collect();
            out.push(Tableau { n, rows: rep.rows.clone(), signs });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn identity_tableau_is_identity() {
        for n in 1..=3 {
            let u = Tableau::identity(n).to_dense().unwrap();
            let id = DenseOperator::identity(1 << n);
            // global phase only
            let ph = u.get(0, 0);
            assert!(u.max_abs_diff(&id.scale(ph)) < 1e-12);
        }
    }

    #[test]
    fn group_orders() {
        assert_eq!(clifford_coset_representatives(1).unwrap().len(), 6);
        assert_eq!(enumerate_clifford(1).unwrap().len(), 24);
        assert_eq!(clifford_coset_representatives(2).unwrap().len(), 720);
        assert_eq!(enumerate_clifford(2).unwrap().len(), 11520);
        assert!(enumerate_clifford(3).is_err());
    }

    #[test]
    fn dense_round_trip_recovers_tableau() {
        for t in enumerate_clifford(1).unwrap() {
            let u = t.to_dense().unwrap();
            assert!(u.unitarity_deviation() < 1e-12);
            assert_eq!(Tableau::from_dense(&u).unwrap().unwrap(), t);
        }
        let mut rng = RngSeed(4).stream(0);
        for _ in 0..20 {
            let t = sample_clifford_tableau(3, &mut rng).unwrap();
            assert_eq!(Tableau::from_dense(&t.to_dense().unwrap()).unwrap().unwrap(), t);
        }
    }

    #[test]
    fn distinct_elements_are_distinct_modulo_phase() {
        let elems: Vec<DenseOperator> = enumerate_clifford(1).unwrap().iter().map(|t| t.to_dense().unwrap()).collect();
        for a in 0..elems.len() {
            for b in a + 1..elems.len() {
                let overlap = elems[a].adjoint().mul(&elems[b]).trace().norm();
                assert!((overlap - 2.0).abs() > 1e-6, "{a} and {b} coincide");
            }
        }
    }

    #[test]
    fn samples_are_symplectic_and_clifford() {
        let mut rng = RngSeed(5).stream(0);
        for n in 1..=4 {
            for _ in 0..10 {
                let t = sample_clifford_tableau(n, &mut rng).unwrap();
                assert!(t.is_symplectic());
                assert!(is_clifford(&t.to_dense().unwrap()).unwrap());
            }
        }
    }

    #[test]
    fn t_gate_is_not_clifford() {
        let t = super::super::pauli::single_qubit_gate("T").unwrap();
        assert!(!is_clifford(&t).unwrap());
        let h = super::super::pauli::single_qubit_gate("H").unwrap();
        assert!(is_clifford(&h).unwrap());
    }

    #[test]
    fn single_qubit_sampling_is_uniform() {
        let n_draws = 24_000usize;
        let mut counts: HashMap<Tableau, usize> = HashMap::new();
        let mut rng = RngSeed(6).stream(0);
        for _ in 0..n_draws {
            *counts.entry(sample_clifford_tableau(1, &mut rng).unwrap()).or_default() += 1;
        }
        assert_eq!(counts.len(), 24);
        let expected = n_draws as f64 / 24.0;
        let chi2: f64 = counts.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        // 23 degrees of freedom; 99.9% quantile ≈ 49.7
        assert!(chi2 < 49.7, "chi2 = {chi2}");
    }

    #[test]
    fn two_qubit_sampling_hits_many_cosets_evenly() {
        let n_draws = 72_000usize;
        let mut counts: HashMap<Tableau, usize> = HashMap::new();
        let mut rng = RngSeed(7).stream(0);
        for _ in 0..n_draws {
            *counts.entry(sample_clifford_tableau(2, &mut rng).unwrap().unsigned()).or_default() += 1;
        }
        assert_eq!(counts.len(), 720);
        let expected = n_draws as f64 / 720.0;
        let chi2: f64 = counts.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        // 719 degrees of freedom: mean 719, sd ≈ 37.9
        assert!(chi2 < 719.0 + 5.0 * 37.9, "chi2 = {chi2}");
    }

    #[test]
    fn gf2_inverse() {
        let mut rng = RngSeed(8).stream(0);
        for n in 1..6 {
            let mut a = eye(n);
            fill_lower(&mut a, false, &mut rng);
            assert_eq!(matmul2(&a, &inverse_unit_lower(&a)), eye(n));
        }
    }
}
