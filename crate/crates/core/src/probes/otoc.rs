use num_complex::Complex64 as C64;

use super::{haar_conjugated_estimate, same_dim};
use crate::error::{Error, Result};
use crate::form_factors::FormFactorPoint;
use crate::operator::DenseOperator;
use crate::parallel::RngSeed;
use crate::perm::Perm;
use crate::perm_algebra::{perm_trace, TwirledChannel};
use crate::stats::Estimate;

/// Size guard for the Monte Carlo 8-point OTOC.
pub const MAX_OTOC8_DIM: usize = 64;

/// `d⁻¹ tr(A†(t) B† A(t) B)` with `A(t) = U† A U`.
pub fn otoc4_exact_complex(u: &DenseOperator, a: &DenseOperator, b: &DenseOperator) -> Result<C64> {
    otoc4k_exact(u, &[a], &[b])
}

/// Real part of [`otoc4_exact_complex`]; the imaginary part vanishes for Hermitian `A`, `B`.
pub fn otoc4_exact(u: &DenseOperator, a: &DenseOperator, b: &DenseOperator) -> Result<f64> {
    Ok(otoc4_exact_complex(u, a, b)?.re)
}

/// `d⁻¹ tr(A_1†(t) B_1† ⋯ A_k†(t) B_k† A_1(t) B_1 ⋯ A_k(t) B_k)`.
pub fn otoc4k_exact(u: &DenseOperator, a_ops: &[&DenseOperator], b_ops: &[&DenseOperator]) -> Result<C64> {
    if a_ops.is_empty() || a_ops.len() != b_ops.len() {
        return Err(Error::InvalidParameter("need k >= 1 operators A_l and as many B_l".into()));
    }
    let mut all = vec![u];
    all.extend_from_slice(a_ops);
    all.extend_from_slice(b_ops);
    let d = same_dim(&all)?;
    let ud = u.adjoint();
    let evolved: Vec<DenseOperator> = a_ops.iter().map(|a| ud.mul(a).mul(u)).collect();
    let mut m = DenseOperator::identity(d);
    for (at, b) in evolved.iter().zip(b_ops) {
        m = m.mul(&at.adjoint()).mul(&b.adjoint());
    }
    for (at, b) in evolved.iter().zip(b_ops) {
        m = m.mul(at).mul(b);
    }
    Ok(m.trace() / d as f64)
}

/// The permutation of `S_{4k}` carrying the `4k`-point OTOC: the cycle
/// `(1, 4k, 4k−1, …, 2)` relabelled by the transpositions `(2l+2, 2k+2l+1)`,
/// `l = 0, …, k−1` (1-based slots).
pub fn otoc4k_permutation(k: usize) -> Result<Perm> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be >= 1".into()));
    }
    let n = 4 * k;
    let mut relabel: Vec<usize> = (0..=n).collect();
    for l in 0..k {
        relabel.swap(2 * l + 2, 2 * k + 2 * l + 1);
    }
    let mut cycle = vec![1];
    cycle.extend((2..=n).rev());
    let cycle: Vec<usize> = cycle.into_iter().map(|p| relabel[p]).collect();
    Perm::from_cycles(n, &[&cycle])
}

/// `tr(T̃_π (⊗_l 𝒜_l ⊗_l 𝓑_l) U^{⊗2k,2k})` with `𝒜_l = A_l† ⊗ A_l`.
pub fn otoc4k_permutation_form(
    u: &DenseOperator,
    a_ops: &[&DenseOperator],
    b_ops: &[&DenseOperator],
) -> Result<C64> {
    let k = a_ops.len();
    if k == 0 || b_ops.len() != k {
        return Err(Error::InvalidParameter("need k >= 1 operators A_l and as many B_l".into()));
    }
    let pi = otoc4k_permutation(k)?;
    let ud = u.adjoint();
    let slot_ops = probe_slots(a_ops, b_ops);
    let mats: Vec<DenseOperator> = slot_ops
        .iter()
        .enumerate()
        .map(|(j, o)| o.mul(if j < 2 * k { u } else { &ud }))
        .collect();
    let refs: Vec<&DenseOperator> = mats.iter().collect();
    let d = u.dim() as f64;
    Ok(perm_trace(&pi, &refs)? / d.powi(pi.cycle_count() as i32))
}

/// `[A_1†, A_1, …, A_k†, A_k, B_1†, B_1, …, B_k†, B_k]`.
fn probe_slots(a_ops: &[&DenseOperator], b_ops: &[&DenseOperator]) -> Vec<DenseOperator> {
    a_ops
        .iter()
        .chain(b_ops)
        .flat_map(|o| [o.adjoint(), (*o).clone()])
        .collect()
}

pub fn otoc4_permutation_form(u: &DenseOperator, a: &DenseOperator, b: &DenseOperator) -> Result<C64> {
    otoc4k_permutation_form(u, &[a], &[b])
}

/// `tr(T̃_{(1423)} (𝒜 ⊗ 𝓑) R̂⁽⁴⁾(U))`.
pub fn otoc4_twirled_closed(channel: &TwirledChannel, a: &DenseOperator, b: &DenseOperator) -> Result<f64> {
    if channel.table.k != 2 {
        return Err(Error::InvalidParameter("the 4-point OTOC needs the four-copy channel".into()));
    }
    let slots = probe_slots(&[a], &[b]);
    let refs: Vec<&DenseOperator> = slots.iter().collect();
    same_dim(&refs)?;
    if a.dim() != channel.table.d {
        return Err(Error::DimensionMismatch { expected: channel.table.d, found: a.dim() });
    }
    let tau = otoc4k_permutation(1)?;
    Ok(channel.expectation(&tau, &refs)?.re)
}

/// `c̃₄ − d⁻²`, the leading behaviour of the twirled OTOC for non-overlapping Paulis.
pub fn otoc4_offset_reference(p: &FormFactorPoint) -> f64 {
    p.c4 - 1.0 / (p.d as f64 * p.d as f64)
}

pub fn otoc4_twirled_mc(
    u: &DenseOperator,
    a: &DenseOperator,
    b: &DenseOperator,
    n: usize,
    seed: RngSeed,
) -> Result<Estimate> {
    same_dim(&[u, a, b])?;
    haar_conjugated_estimate(u, n, seed, |v| otoc4_exact(v, a, b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OtocFormula {
    /// Nested product of Heisenberg-evolved operators.
    Definition,
    /// Permutation trace with `U^{⊗2k,2k}`.
    Permutation,
}

/// Monte Carlo isospectral twirl of the `4k`-point OTOC.
pub fn otoc4k_twirled_mc(
    u: &DenseOperator,
    a_ops: &[&DenseOperator],
    b_ops: &[&DenseOperator],
    n: usize,
    seed: RngSeed,
    formula: OtocFormula,
) -> Result<Estimate> {
    if u.dim() > MAX_OTOC8_DIM && a_ops.len() > 1 {
        return Err(Error::SizeGuard(format!("higher-point OTOCs are limited to d <= {MAX_OTOC8_DIM}")));
    }
    haar_conjugated_estimate(u, n, seed, |v| {
        Ok(match formula {
            OtocFormula::Definition => otoc4k_exact(v, a_ops, b_ops)?.re,
            OtocFormula::Permutation => otoc4k_permutation_form(v, a_ops, b_ops)?.re,
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{pauli_operator, sample_haar_unitary};

    #[test]
    fn four_point_permutation_is_1423() {
        assert_eq!(otoc4k_permutation(1).unwrap(), Perm::parse(4, "(1423)").unwrap());
        assert_eq!(otoc4k_permutation(2).unwrap().cycle_count(), 1);
    }

    #[test]
    fn zero_time_values() {
        let id = DenseOperator::identity(4);
        let xi = pauli_operator("XI").unwrap();
        let ix = pauli_operator("IX").unwrap();
        assert!((otoc4_exact(&id, &xi, &ix).unwrap() - 1.0).abs() < 1e-14);
        assert!((otoc4_exact(&id, &xi, &xi).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn permutation_form_matches_definition() {
        let mut rng = RngSeed(1).stream(0);
        let u = sample_haar_unitary(4, &mut rng);
        let a = pauli_operator("XZ").unwrap();
        let b = pauli_operator("YI").unwrap();
        let direct = otoc4_exact_complex(&u, &a, &b).unwrap();
        assert!(direct.im.abs() < 1e-10);
        let perm = otoc4_permutation_form(&u, &a, &b).unwrap();
        assert!((direct - perm).norm() < 1e-10);
        let c = pauli_operator("ZZ").unwrap();
        let e = pauli_operator("IY").unwrap();
        let d8 = otoc4k_exact(&u, &[&a, &c], &[&b, &e]).unwrap();
        let p8 = otoc4k_permutation_form(&u, &[&a, &c], &[&b, &e]).unwrap();
        assert!((d8 - p8).norm() < 1e-10, "{d8} vs {p8}");
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let u = DenseOperator::identity(4);
        let a = pauli_operator("X").unwrap();
        assert!(matches!(otoc4_exact(&u, &a, &a), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn identity_operators_give_one() {
        let mut rng = RngSeed(2).stream(0);
        let u = sample_haar_unitary(4, &mut rng);
        let id = DenseOperator::identity(4);
        let est = otoc4k_twirled_mc(&u, &[&id, &id], &[&id, &id], 10, RngSeed(3), OtocFormula::Permutation).unwrap();
        assert!((est.mean - 1.0).abs() < 1e-12);
        let ch = TwirledChannel::isospectral(&u, 2).unwrap();
        assert!((otoc4_twirled_closed(&ch, &id, &id).unwrap() - 1.0).abs() < 1e-9);
    }
}
