//! Brute-force reference computations.
//!
//! Everything here is deliberately naive: dense Kronecker products, explicit
//! basis relabeling and plain Monte Carlo over the Haar measure. These routines
//! back the unit tests and the `verify` suite and never call the trace-level
//! fast paths they are compared against.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::ensembles::sample_haar_unitary;
use crate::operator::DenseOperator;
use crate::parallel::{map_indexed, RngSeed};
use crate::perm::Perm;

/// Random complex matrix with iid standard complex Gaussian entries.
pub fn random_matrix<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DenseOperator {
    DenseOperator::new(DMatrix::from_fn(d, d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im)
    }))
}

fn matrix_unit(d: usize, a: usize, b: usize) -> DenseOperator {
    let mut m = DMatrix::from_element(d, d, C64::new(0.0, 0.0));
    m[(a, b)] = C64::new(1.0, 0.0);
    DenseOperator::new(m)
}

/// `T_π = Σ_i ⊗_m |i_{π⁻¹(m)}⟩⟨i_m|`, summed over all basis labels with Kronecker products.
pub fn perm_operator_by_relabeling(p: &Perm, d: usize) -> DenseOperator {
    let n = p.n();
    let inv = p.inverse();
    let total = d.pow(n as u32);
    let mut acc = DMatrix::from_element(total, total, C64::new(0.0, 0.0));
    let mut labels = vec![0usize; n];
    for _ in 0..total {
        let factors: Vec<DenseOperator> =
            (0..n).map(|m| matrix_unit(d, labels[inv.apply(m)], labels[m])).collect();
        let refs: Vec<&DenseOperator> = factors.iter().collect();
        let term = DenseOperator::kron_all(&refs).expect("oracle dimension");
        acc += term.matrix();
        // odometer increment
        for slot in (0..n).rev() {
            labels[slot] += 1;
            if labels[slot] < d {
                break;
            }
            labels[slot] = 0;
        }
    }
    DenseOperator::new(acc)
}

/// `tr(T_π A_1 ⊗ … ⊗ A_n)` from the dense Kronecker product.
pub fn dense_perm_trace(p: &Perm, ops: &[&DenseOperator]) -> C64 {
    let t = perm_operator_by_relabeling(p, ops[0].dim());
    let big = DenseOperator::kron_all(ops).expect("oracle dimension");
    t.trace_product(&big)
}

/// `tr(T̃_π T̃_σ)` for all pairs of `S_{2k}`, from dense permutation matrices.
pub fn dense_gram(k: usize, d: usize) -> DMatrix<f64> {
    let perms = Perm::all(2 * k);
    let ops: Vec<DenseOperator> = perms.iter().map(|p| perm_operator_by_relabeling(p, d)).collect();
    let traces: Vec<f64> = ops.iter().map(|o| o.trace().re).collect();
    let n = perms.len();
    DMatrix::from_fn(n, n, |a, b| ops[a].trace_product(&ops[b]).re / (traces[a] * traces[b]))
}

/// `U^{⊗k} ⊗ U^{†⊗k}` as a dense matrix.
pub fn tensor_power_kk(u: &DenseOperator, k: usize) -> DenseOperator {
    let ud = u.adjoint();
    let factors: Vec<&DenseOperator> = (0..2 * k).map(|i| if i < k { u } else { &ud }).collect();
    DenseOperator::kron_all(&factors).expect("oracle dimension")
}

/// Plain Monte Carlo estimate of `∫dG G^{†⊗2k} U^{⊗k,k} G^{⊗2k}`.
///
/// Samples are split into fixed chunks summed in index order, so the result does
/// not depend on the worker count.
pub fn mc_isospectral_twirl(u: &DenseOperator, k: usize, n: usize, seed: RngSeed) -> DenseOperator {
    let d = u.dim();
    let dim = d.pow(2 * k as u32);
    let chunk = 64usize;
    let n_chunks = n.div_ceil(chunk);
    let partial: Vec<DMatrix<C64>> = map_indexed(n_chunks, |c| {
        let mut acc = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
        for i in c * chunk..((c + 1) * chunk).min(n) {
            let mut rng = seed.stream(i as u64);
            let g = sample_haar_unitary(d, &mut rng);
            let v = g.adjoint().mul(u).mul(&g);
            acc += tensor_power_kk(&v, k).matrix();
        }
        acc
    });
    let mut total = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
    for p in partial {
        total += p;
    }
    DenseOperator::new(total / C64::new(n as f64, 0.0))
}

/// Average of `f(G† U G)` over `n` Haar samples, returned per sample in index order.
pub fn mc_conjugated_samples<F>(u: &DenseOperator, n: usize, seed: RngSeed, f: F) -> Vec<f64>
where
    F: Fn(&DenseOperator) -> f64 + Sync + Send,
{
    map_indexed(n, |i| {
        let mut rng = seed.stream(i as u64);
        let g = sample_haar_unitary(u.dim(), &mut rng);
        let v = g.adjoint().mul(u).mul(&g);
        f(&v)
    })
}
