use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::twirl::{generalized_weingarten, CliffordMomentData, MAX_MOMENT_QUBITS};
use crate::ensembles::{
    build_doped_circuit_with, enumerate_clifford, Dopant, PauliString, Placement, MAX_ENUMERATION_QUBITS,
    MAX_SAMPLING_QUBITS,
};
use crate::error::{Error, Result};
use crate::operator::DenseOperator;
use crate::parallel::{map_indexed, pairwise_sum, RngSeed};
use crate::perm::Perm;
use crate::perm_algebra::{decode, perm_operator, TwirledChannel, WeingartenTable};
use crate::stats::Estimate;

/// Largest `d` for the dense `U∞` operator.
pub const MAX_U_INFTY_DIM: usize = 16;

/// Index patterns surviving the infinite-time average of `U^{⊗2,2}`:
/// `(i,j,i,j)` and `(i,j,j,i)` for `i ≠ j`, and `(i,i,i,i)`.
pub fn u_infty_patterns(d: usize) -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(2 * d * d - d);
    for i in 0..d {
        for j in 0..d {
            out.push([i, j, i, j]);
            if i != j {
                out.push([i, j, j, i]);
            }
        }
    }
    out
}

/// Dense diagonal `U∞^{⊗2,2} = Σ_{i≠j}(Π_{ijij} + Π_{ijji}) + Σ_i Π_{iiii}`.
pub fn build_u_infty(d: usize) -> Result<DenseOperator> {
    if !(2..=MAX_U_INFTY_DIM).contains(&d) {
        return Err(Error::SizeGuard(format!("dense U∞ is limited to 2 <= d <= {MAX_U_INFTY_DIM}")));
    }
    let dim = d.pow(4);
    let mut diag = vec![C64::new(0.0, 0.0); dim];
    for x in u_infty_patterns(d) {
        diag[x.iter().fold(0, |acc, &v| acc * d + v)] = C64::new(1.0, 0.0);
    }
    let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag));
    Ok(DenseOperator::new_hermitian(m).expect("real diagonal"))
}

/// `⟨x| T_π (M_1 ⊗ … ⊗ M_4) |x⟩ = Π_t (M_t)_{x_{π(t)}, x_t}`.
fn diagonal_perm_element(pi: &Perm, ops: &[&DMatrix<C64>; 4], x: &[usize; 4]) -> C64 {
    (0..4).map(|t| ops[t][(x[pi.apply(t)], x[t])]).product()
}

/// `tr(T̃_{(1423)} (𝒜 ⊗ 𝓑) W^{⊗2,2} U∞ W^{†⊗2,2})` in `O(d²)`, via `Ã = W† A W`.
fn otoc_on_u_infty(w: &DMatrix<C64>, a: &DMatrix<C64>, b: &DMatrix<C64>, pi: &Perm) -> f64 {
    let d = w.nrows();
    let wd = w.adjoint();
    let at = &wd * a * w;
    let bt = &wd * b * w;
    let (atd, btd) = (at.adjoint(), bt.adjoint());
    let ops = [&atd, &at, &btd, &bt];
    let total: C64 = u_infty_patterns(d).iter().map(|x| diagonal_perm_element(pi, &ops, x)).sum();
    total.re / d as f64
}

fn otoc_perm() -> Perm {
    Perm::parse(4, "(1423)").expect("valid cycle")
}

fn non_overlapping(a: &PauliString, b: &PauliString) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch { expected: 1 << a.n(), found: 1 << b.n() });
    }
    if a.overlaps(b) {
        return Err(Error::OverlappingOperators { a: a.label(), b: b.label() });
    }
    Ok(())
}

/// Clifford-twirled infinite-time OTOC by averaging over every Clifford element.
pub fn otoc4_asymptote_exhaustive_clifford(a: &PauliString, b: &PauliString) -> Result<f64> {
    non_overlapping(a, b)?;
    let n = a.n();
    if n > MAX_ENUMERATION_QUBITS {
        return Err(Error::SizeGuard(format!("Clifford enumeration is limited to {MAX_ENUMERATION_QUBITS} qubits")));
    }
    let (am, bm) = (a.to_dense()?.into_matrix(), b.to_dense()?.into_matrix());
    let elements = enumerate_clifford(n)?;
    let pi = otoc_perm();
    let values = map_indexed(elements.len(), |i| {
        elements[i].to_dense().map(|w| otoc_on_u_infty(w.matrix(), &am, &bm, &pi))
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    Ok(pairwise_sum(&values) / values.len() as f64)
}

/// Same quantity through the generalized Weingarten functions:
/// `Σ_{πσ} W^±(πσ) tr(U∞ Q^{(⊥)} T_σ) tr(T̃_{(1423)} (𝒜⊗𝓑) Q^{(⊥)} T_π)`.
pub fn otoc4_asymptote_weingarten_clifford(
    data: &CliffordMomentData,
    a: &PauliString,
    b: &PauliString,
) -> Result<f64> {
    non_overlapping(a, b)?;
    let d = data.d();
    if a.n() != data.n_qubits {
        return Err(Error::DimensionMismatch { expected: d, found: 1 << a.n() });
    }
    let u_inf = build_u_infty(d)?;
    let (ad, bd) = (a.to_dense()?, b.to_dense()?);
    let probe = perm_operator(&otoc_perm(), d)?.mul(&DenseOperator::kron_all(&[&ad.adjoint(), &ad, &bd.adjoint(), &bd])?);
    let perms = Perm::all(4);
    let ts: Vec<DenseOperator> = perms.iter().map(|p| perm_operator(p, d)).collect::<Result<_>>()?;
    let mut total = 0.0;
    for (proj, plus) in [(&data.q, true), (&data.q_perp, false)] {
        let proj_t: Vec<DenseOperator> = ts.iter().map(|t| proj.mul(t)).collect();
        let u_side: Vec<f64> = proj_t.iter().map(|pt| u_inf.trace_product(pt).re).collect();
        let probe_side: Vec<f64> = proj_t.iter().map(|pt| probe.trace_product(pt).re / d as f64).collect();
        for (i, pi) in perms.iter().enumerate() {
            for (j, sigma) in perms.iter().enumerate() {
                let (wp, wm) = generalized_weingarten(pi, sigma, data);
                total += if plus { wp } else { wm } * u_side[j] * probe_side[i];
            }
        }
    }
    Ok(total)
}

/// Haar-twirled infinite-time OTOC via the unitary Weingarten calculus applied to `U∞`.
pub fn otoc4_asymptote_haar(a: &DenseOperator, b: &DenseOperator) -> Result<f64> {
    let d = a.dim();
    if b.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: b.dim() });
    }
    let table = WeingartenTable::new(2, d)?;
    let patterns = u_infty_patterns(d);
    let traces: Vec<C64> = table
        .perms
        .iter()
        .map(|p| {
            // tr(T_π U∞) counts patterns fixed by the slot permutation
            let fixed = patterns.iter().filter(|x| (0..4).all(|t| x[p.apply(t)] == x[t])).count();
            C64::new(fixed as f64 / (d as f64).powi(p.cycle_count() as i32), 0.0)
        })
        .collect();
    let channel = TwirledChannel::from_traces(table, &traces);
    let ad = a.adjoint();
    let bd = b.adjoint();
    Ok(channel.expectation(&otoc_perm(), &[&ad, a, &bd, b])?.re)
}

/// Which closed-form asymptote to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AsymptoteKind {
    Clifford,
    Haar,
    /// Leading-order law for `k` dopants.
    Doped(usize),
}

/// `2/(d+2)`, `1/((d+1)(d+3))`, or `(3/4)^k (2/d) + 1/d²`.
pub fn otoc4_asymptote(kind: AsymptoteKind, d: usize) -> Result<f64> {
    if d < 4 {
        return Err(Error::InvalidParameter(format!("OTOC asymptotes need d >= 4, got {d}")));
    }
    let df = d as f64;
    Ok(match kind {
        AsymptoteKind::Clifford => 2.0 / (df + 2.0),
        AsymptoteKind::Haar => 1.0 / ((df + 1.0) * (df + 3.0)),
        AsymptoteKind::Doped(k) => 0.75f64.powi(k as i32) * 2.0 / df + 1.0 / (df * df),
    })
}

/// Monte Carlo infinite-time OTOC for `k`-doped Clifford eigenbases: each sample
/// draws a doped circuit `C` and evaluates the OTOC on `C^{†⊗2,2} U∞ C^{⊗2,2}`.
#[allow(clippy::too_many_arguments)]
pub fn otoc4_doped_mc(
    n_qubits: usize,
    k: usize,
    a: &PauliString,
    b: &PauliString,
    dopant: Dopant,
    placement: Placement,
    n_samples: usize,
    seed: RngSeed,
) -> Result<Estimate> {
    non_overlapping(a, b)?;
    if a.n() != n_qubits {
        return Err(Error::DimensionMismatch { expected: 1 << n_qubits, found: 1 << a.n() });
    }
    if n_qubits > MAX_SAMPLING_QUBITS {
        return Err(Error::SizeGuard(format!("doped OTOC is limited to {MAX_SAMPLING_QUBITS} qubits")));
    }
    if n_samples == 0 {
        return Err(Error::InvalidParameter("n_samples must be >= 1".into()));
    }
    let (am, bm) = (a.to_dense()?.into_matrix(), b.to_dense()?.into_matrix());
    let pi = otoc_perm();
    let values = map_indexed(n_samples, |i| {
        let circuit = build_doped_circuit_with(n_qubits, k, dopant, placement, &mut seed.stream(i as u64))?;
        let c = circuit.materialize()?;
        Ok(otoc_on_u_infty(&c.adjoint().into_matrix(), &am, &bm, &pi))
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    Ok(Estimate::from_samples(&values))
}

/// One row of the trace table: `σ`, `tr(U∞ Q′ T_σ)` and the closed form, with `Q′ = Q − 1/d²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceTableRow {
    pub sigma: String,
    pub computed: f64,
    pub closed_form: f64,
}

/// `d² tr(U∞ Q′ T_σ)` in closed form.
pub fn trace_table_closed_form(sigma: &Perm, d: usize) -> Result<f64> {
    let d = d as f64;
    let base = d * (d - 1.0);
    let value = match sigma.to_string().as_str() {
        "e" => 2.0 * d * (d - 1.0).powi(2) + base,
        "(12)" | "(34)" => base,
        "(13)" | "(14)" | "(23)" | "(24)" => d * (d - 1.0).powi(2) + base,
        "(1234)" | "(1432)" | "(1243)" | "(1342)" => d * d * (d - 1.0) + base,
        "(1324)" | "(1423)" => base,
        "(12)(34)" => 2.0 * d * d * (d - 1.0) + base,
        "(13)(24)" | "(14)(23)" => d * d * (d - 1.0) + d * (d - 1.0).powi(2) + base,
        _ if sigma.cycle_type() == [3, 1] => base,
        other => return Err(Error::InvalidPerm(format!("{other} is not an element of S4"))),
    };
    Ok(value / (d * d))
}

pub fn appendix_trace_table(n_qubits: usize) -> Result<Vec<TraceTableRow>> {
    if n_qubits == 0 || n_qubits > MAX_MOMENT_QUBITS {
        return Err(Error::SizeGuard(format!("trace table is limited to 1..={MAX_MOMENT_QUBITS} qubits")));
    }
    let data = super::build_q_projector(n_qubits)?;
    let d = data.d();
    let dim = d.pow(4);
    let shift = 1.0 / (d * d) as f64;
    let mut in_u_infty = vec![false; dim];
    for x in u_infty_patterns(d) {
        in_u_infty[x.iter().fold(0, |acc, &v| acc * d + v)] = true;
    }
    let mut digits = vec![0usize; 4];
    let mut out = vec![0usize; 4];
    Perm::all(4)
        .iter()
        .map(|sigma| {
            // tr(U∞ Q′ T_σ) = Σ_{x ∈ U∞} Q′_{x, T_σ x}
            let mut acc = 0.0;
            for x in (0..dim).filter(|&x| in_u_infty[x]) {
                decode(x, d, &mut digits);
                for (j, &v) in digits.iter().enumerate() {
                    out[sigma.apply(j)] = v;
                }
                let y = out.iter().fold(0, |a, &v| a * d + v);
                acc += data.q.get(x, y).re - if x == y { shift } else { 0.0 };
            }
            Ok(TraceTableRow { sigma: sigma.to_string(), computed: acc, closed_form: trace_table_closed_form(sigma, d)? })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford_moments::build_q_projector;

    #[test]
    fn u_infty_counts_and_symmetry() {
        let u = build_u_infty(2).unwrap();
        assert!((u.trace().re - 6.0).abs() < 1e-12);
        let t = perm_operator(&Perm::parse(4, "(13)(24)").unwrap(), 3).unwrap();
        assert!(build_u_infty(3).unwrap().commutes_with(&t, 1e-12));
        assert!(build_u_infty(32).is_err());
    }

    #[test]
    fn pattern_sum_matches_dense_trace() {
        let mut rng = crate::parallel::RngSeed(11).stream(0);
        let w = crate::ensembles::sample_haar_unitary(4, &mut rng);
        let a = PauliString::parse("XI").unwrap().to_dense().unwrap();
        let b = PauliString::parse("IZ").unwrap().to_dense().unwrap();
        let w4 = DenseOperator::kron_all(&[&w, &w, &w, &w]).unwrap();
        let r = w4.mul(&build_u_infty(4).unwrap()).mul(&w4.adjoint());
        let probe = perm_operator(&otoc_perm(), 4)
            .unwrap()
            .mul(&DenseOperator::kron_all(&[&a.adjoint(), &a, &b.adjoint(), &b]).unwrap());
        let dense = probe.trace_product(&r).re / 4.0;
        let fast = otoc_on_u_infty(w.matrix(), a.matrix(), b.matrix(), &otoc_perm());
        assert!((dense - fast).abs() < 1e-12, "{dense} vs {fast}");
    }

    #[test]
    fn closed_form_asymptotes() {
        assert!((otoc4_asymptote(AsymptoteKind::Clifford, 4).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((otoc4_asymptote(AsymptoteKind::Haar, 4).unwrap() - 1.0 / 35.0).abs() < 1e-15);
        assert!((otoc4_asymptote(AsymptoteKind::Doped(0), 4).unwrap() - 0.5625).abs() < 1e-15);
    }

    #[test]
    fn trace_table_single_qubit() {
        for row in appendix_trace_table(1).unwrap() {
            assert!((row.computed - row.closed_form).abs() < 1e-9, "{row:?}");
        }
    }

    #[test]
    fn clifford_routes_agree() {
        let a = PauliString::parse("XI").unwrap();
        let b = PauliString::parse("IX").unwrap();
        let exhaustive = otoc4_asymptote_exhaustive_clifford(&a, &b).unwrap();
        assert!((exhaustive - 1.0 / 3.0).abs() < 1e-8, "{exhaustive}");
        let data = build_q_projector(2).unwrap();
        let via_w = otoc4_asymptote_weingarten_clifford(&data, &a, &b).unwrap();
        assert!((exhaustive - via_w).abs() < 1e-8, "{via_w}");
    }

    #[test]
    fn haar_asymptote() {
        let a = PauliString::parse("XI").unwrap().to_dense().unwrap();
        let b = PauliString::parse("IX").unwrap().to_dense().unwrap();
        assert!((otoc4_asymptote_haar(&a, &b).unwrap() - 1.0 / 35.0).abs() < 1e-9);
    }

    #[test]
    fn overlapping_operators_are_rejected() {
        let a = PauliString::parse("XI").unwrap();
        assert!(matches!(otoc4_asymptote_exhaustive_clifford(&a, &a), Err(Error::OverlappingOperators { .. })));
    }
}
