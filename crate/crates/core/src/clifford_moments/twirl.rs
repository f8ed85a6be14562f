use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::irreps::Irrep;
use crate::ensembles::{clifford_coset_representatives, PauliString, MAX_ENUMERATION_QUBITS};
use crate::error::{Error, Result};
use crate::operator::DenseOperator;
use crate::parallel::map_indexed;
use crate::perm::Perm;
use crate::perm_algebra::perm_operator;

/// Largest qubit count for the dense four-copy Clifford machinery (`d⁴ ≤ 256`).
pub const MAX_MOMENT_QUBITS: usize = 2;

/// Below this, `D^±_λ` counts as vanishing.
const VANISHING_DIM: f64 = 1e-8;

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

fn check_qubits(n: usize, limit: usize) -> Result<usize> {
    if n == 0 || n > limit {
        return Err(Error::SizeGuard(format!("four-copy Clifford operators are limited to 1..={limit} qubits, got {n}")));
    }
    Ok(1 << n)
}

/// `P^{⊗4}` as `(flip mask, phase per four-copy basis index)`.
fn fourfold_pauli(p: &PauliString) -> (usize, Vec<C64>) {
    let n = p.n();
    let (flip, phases) = p.sparse_form();
    let mask = (1 << n) - 1;
    let dim = 1usize << (4 * n);
    let flip4 = (0..4).fold(0, |acc, s| acc | flip << (s * n));
    let ph = (0..dim).map(|idx| (0..4).map(|s| phases[(idx >> (s * n)) & mask]).product()).collect();
    (flip4, ph)
}

/// `Q = d⁻² Σ_P P^{⊗4}`, `Q^⊥ = 1 − Q` and the irrep dimensions `D^±_λ` of their images.
#[derive(Debug, Clone)]
pub struct CliffordMomentData {
    pub n_qubits: usize,
    pub q: DenseOperator,
    pub q_perp: DenseOperator,
    /// `D^+_λ = tr(Q P_λ)`.
    pub d_plus: Vec<(Irrep, f64)>,
    /// `D^-_λ = tr(Q^⊥ P_λ)`.
    pub d_minus: Vec<(Irrep, f64)>,
}

pub fn build_q_projector(n_qubits: usize) -> Result<CliffordMomentData> {
    let d = check_qubits(n_qubits, MAX_MOMENT_QUBITS)?;
    let dim = d * d * d * d;
    let mut q = DMatrix::from_element(dim, dim, zero());
    let norm = 1.0 / (d * d) as f64;
    for p in PauliString::all(n_qubits) {
        let (flip4, ph) = fourfold_pauli(&p);
        for col in 0..dim {
            q[(col ^ flip4, col)] += ph[col] * norm;
        }
    }
    let q = DenseOperator::new(q);
    let q_perp = DenseOperator::identity(dim).sub(&q);
    let mut d_plus = Vec::with_capacity(5);
    let mut d_minus = Vec::with_capacity(5);
    for irrep in Irrep::ALL {
        let p = irrep_projector(irrep, d)?;
        d_plus.push((irrep, q.trace_product(&p).re));
        d_minus.push((irrep, q_perp.trace_product(&p).re));
    }
    Ok(CliffordMomentData { n_qubits, q, q_perp, d_plus, d_minus })
}

/// `P_λ = (d_λ/24) Σ_π χ^λ(π) T_π` on `(ℂ^d)^{⊗4}`.
pub fn irrep_projector(irrep: Irrep, d: usize) -> Result<DenseOperator> {
    let mut acc: Option<DMatrix<C64>> = None;
    let scale = irrep.dim() as f64 / 24.0;
    for p in Perm::all(4) {
        let chi = irrep.character(&p);
        if chi == 0 {
            continue;
        }
        let t = perm_operator(&p, d)?.into_matrix() * C64::new(scale * chi as f64, 0.0);
        acc = Some(match acc {
            Some(a) => a + t,
            None => t,
        });
    }
    Ok(DenseOperator::new(acc.expect("the identity has nonzero character")))
}

/// `W^±(πσ) = Σ_{λ: D^±_λ ≠ 0} (d_λ²/24²) χ^λ(πσ) / m^±_λ` with `m^±_λ = D^±_λ / d_λ`,
/// the multiplicity of `λ` inside the image of `Q` (resp. `Q^⊥`).
pub fn generalized_weingarten(pi: &Perm, sigma: &Perm, data: &CliffordMomentData) -> (f64, f64) {
    let g = pi.compose(sigma);
    let sum = |dims: &[(Irrep, f64)]| {
        dims.iter()
            .filter(|(_, dl)| dl.abs() > VANISHING_DIM)
            .map(|(l, dl)| {
                let multiplicity = dl / l.dim() as f64;
                (l.dim() * l.dim()) as f64 / 576.0 * l.character(&g) as f64 / multiplicity
            })
            .sum::<f64>()
    };
    (sum(&data.d_plus), sum(&data.d_minus))
}

impl CliffordMomentData {
    pub fn d(&self) -> usize {
        1 << self.n_qubits
    }

    /// Four-fold Clifford twirl through the generalized Weingarten functions:
    /// `Σ_{πσ} [W⁺(πσ) tr(X Q T_σ) Q T_π + W⁻(πσ) tr(X Q^⊥ T_σ) Q^⊥ T_π]`.
    pub fn twirl(&self, x: &DenseOperator) -> Result<DenseOperator> {
        let dim = self.q.dim();
        if x.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: x.dim() });
        }
        let perms = Perm::all(4);
        let ts: Vec<DenseOperator> = perms.iter().map(|p| perm_operator(p, self.d())).collect::<Result<_>>()?;
        let mut out = DMatrix::from_element(dim, dim, zero());
        for (proj, plus) in [(&self.q, true), (&self.q_perp, false)] {
            let proj_t: Vec<DenseOperator> = ts.iter().map(|t| proj.mul(t)).collect();
            let overlaps: Vec<C64> = proj_t.iter().map(|pt| x.trace_product(pt)).collect();
            for (i, pi) in perms.iter().enumerate() {
                let mut coef = zero();
                for (j, sigma) in perms.iter().enumerate() {
                    let (wp, wm) = generalized_weingarten(pi, sigma, self);
                    coef += overlaps[j] * if plus { wp } else { wm };
                }
                out += proj_t[i].matrix() * coef;
            }
        }
        Ok(DenseOperator::new(out))
    }
}

/// `R^{⊗copies} M` for a `d × d` matrix `R`.
fn apply_on_all_slots(m: &DMatrix<C64>, r: &DMatrix<C64>, d: usize, copies: usize) -> DMatrix<C64> {
    let dim = m.nrows();
    let mut cur = m.clone();
    for s in 0..copies {
        let w = d.pow((copies - 1 - s) as u32);
        let mut next = DMatrix::from_element(dim, dim, zero());
        for col in 0..dim {
            for row in 0..dim {
                let digit = (row / w) % d;
                let base = row - digit * w;
                let mut acc = zero();
                for a in 0..d {
                    acc += r[(digit, a)] * cur[(base + a * w, col)];
                }
                next[(row, col)] = acc;
            }
        }
        cur = next;
    }
    cur
}

/// `R^{⊗4} X R^{†⊗4}`.
fn conjugate_fourfold(x: &DMatrix<C64>, r: &DMatrix<C64>, d: usize) -> DMatrix<C64> {
    let left = apply_on_all_slots(x, r, d, 4);
    apply_on_all_slots(&left.adjoint(), r, d, 4).adjoint()
}

/// `d⁻² Σ_P P^{⊗4} X P^{†⊗4}`.
fn pauli_twirl_fourfold(x: &DMatrix<C64>, n: usize) -> DMatrix<C64> {
    let dim = x.nrows();
    let mut out = DMatrix::from_element(dim, dim, zero());
    let count = (1usize << (2 * n)) as f64;
    for p in PauliString::all(n) {
        let (flip4, ph) = fourfold_pauli(&p);
        for col in 0..dim {
            for row in 0..dim {
                out[(row, col)] += ph[row ^ flip4] * x[(row ^ flip4, col ^ flip4)] * ph[col ^ flip4].conj();
            }
        }
    }
    out / C64::new(count, 0.0)
}

/// Exact four-fold Clifford twirl `|𝒞|⁻¹ Σ_C C^{⊗4} X C^{†⊗4}` by enumeration: the Pauli
/// subgroup is averaged in closed form, then each coset representative is applied.
pub fn exhaustive_clifford_twirl(x: &DenseOperator, n_qubits: usize) -> Result<DenseOperator> {
    let d = check_qubits(n_qubits, MAX_ENUMERATION_QUBITS.min(MAX_MOMENT_QUBITS))?;
    let dim = d.pow(4);
    if x.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: x.dim() });
    }
    let pauli_avg = pauli_twirl_fourfold(x.matrix(), n_qubits);
    let reps: Vec<DMatrix<C64>> = clifford_coset_representatives(n_qubits)?
        .iter()
        .map(|t| t.to_dense().map(DenseOperator::into_matrix))
        .collect::<Result<_>>()?;
    let chunk = 16;
    let chunks = reps.len().div_ceil(chunk);
    let partial = map_indexed(chunks, |c| {
        let mut acc = DMatrix::from_element(dim, dim, zero());
        for r in &reps[c * chunk..((c + 1) * chunk).min(reps.len())] {
            acc += conjugate_fourfold(&pauli_avg, r, d);
        }
        acc
    });
    let total = partial.into_iter().fold(DMatrix::from_element(dim, dim, zero()), |a, b| a + b);
    Ok(DenseOperator::new(total / C64::new(reps.len() as f64, 0.0)))
}
