//! Dense complex operators on `(C^d)^{⊗m}`.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Largest matrix dimension we are willing to materialize densely.
pub const MAX_DENSE_DIM: usize = 4096;

/// Absolute tolerance for exact algebra.
pub const EXACT_TOL: f64 = 1e-10;

/// A dense complex square matrix with optional structural flags.
///
/// The `unitary` and `hermitian` flags are only set by constructors that have
/// verified the property to [`EXACT_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    m: DMatrix<C64>,
    unitary: bool,
    hermitian: bool,
}

pub fn check_dense_dim(dim: u128) -> Result<usize> {
    if dim > MAX_DENSE_DIM as u128 {
        Err(Error::DimensionOverflow { dim, limit: MAX_DENSE_DIM as u128 })
    } else {
        Ok(dim as usize)
    }
}

impl DenseOperator {
    pub fn new(m: DMatrix<C64>) -> Self {
        assert!(m.is_square(), "operator must be square");
        DenseOperator { m, unitary: false, hermitian: false }
    }

    /// Wrap `m` and verify `m m† = 1`.
    pub fn new_unitary(m: DMatrix<C64>) -> Result<Self> {
        let mut op = Self::new(m);
        let dev = op.unitarity_deviation();
        if dev > EXACT_TOL {
            return Err(Error::NotUnitary { deviation: dev });
        }
        op.unitary = true;
        Ok(op)
    }

    /// Wrap `m` and verify `m = m†`.
    pub fn new_hermitian(m: DMatrix<C64>) -> Result<Self> {
        let mut op = Self::new(m);
        let dev = op.hermiticity_deviation();
        if dev > EXACT_TOL {
            return Err(Error::InvalidParameter(format!("operator not Hermitian ({dev:.3e})")));
        }
        op.hermitian = true;
        Ok(op)
    }

    pub(crate) fn with_flags(m: DMatrix<C64>, unitary: bool, hermitian: bool) -> Self {
        DenseOperator { m, unitary, hermitian }
    }

    pub fn identity(dim: usize) -> Self {
        Self::with_flags(DMatrix::identity(dim, dim), true, true)
    }

    pub fn zeros(dim: usize) -> Self {
        Self::with_flags(DMatrix::zeros(dim, dim), false, true)
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        let m = DMatrix::from_fn(n, n, |i, j| if i == j { diag[i] } else { C64::new(0.0, 0.0) });
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.m
    }

    pub fn is_unitary_flagged(&self) -> bool {
        self.unitary
    }

    pub fn is_hermitian_flagged(&self) -> bool {
        self.hermitian
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.m[(i, j)]
    }

    pub fn adjoint(&self) -> Self {
        Self::with_flags(self.m.adjoint(), self.unitary, self.hermitian)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::with_flags(&self.m * &other.m, self.unitary && other.unitary, false)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(&self.m * s)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(&self.m + &other.m)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(&self.m - &other.m)
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        Self::with_flags(
            self.m.kronecker(&other.m),
            self.unitary && other.unitary,
            self.hermitian && other.hermitian,
        )
    }

    /// Kronecker product of a list of factors, guarded by [`MAX_DENSE_DIM`].
    pub fn kron_all(ops: &[&DenseOperator]) -> Result<Self> {
        let dim: u128 = ops.iter().map(|o| o.dim() as u128).product();
        check_dense_dim(dim)?;
        let mut acc = ops[0].clone();
        for op in &ops[1..] {
            acc = acc.kron(op);
        }
        Ok(acc)
    }

    pub fn trace(&self) -> C64 {
        self.m.trace()
    }

    /// `tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> C64 {
        let n = self.dim();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            for k in 0..n {
                acc += self.m[(i, k)] * other.m[(k, i)];
            }
        }
        acc
    }

    /// `tr(M^m)`, with negative powers taken on the adjoint (unitary inverse).
    pub fn trace_power(&self, m: i64) -> C64 {
        if m == 0 {
            return C64::new(self.dim() as f64, 0.0);
        }
        let base = if m < 0 { self.m.adjoint() } else { self.m.clone() };
        let mut acc = base.clone();
        for _ in 1..m.unsigned_abs() {
            acc = &acc * &base;
        }
        acc.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn frobenius_distance(&self, other: &Self) -> f64 {
        self.m.iter().zip(other.m.iter()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry of `|U U† - 1|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let p = &self.m * self.m.adjoint();
        max_abs_diff_identity(&p)
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.dim();
        let mut dev = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                dev = dev.max((self.m[(i, j)] - self.m[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.m.iter().zip(other.m.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Operators commute to within `tol` in max-entry norm.
    pub fn commutes_with(&self, other: &Self, tol: f64) -> bool {
        let ab = &self.m * &other.m;
        let ba = &other.m * &self.m;
        ab.iter().zip(ba.iter()).all(|(x, y)| (x - y).norm() <= tol)
    }
}

fn max_abs_diff_identity(p: &DMatrix<C64>) -> f64 {
    let n = p.nrows();
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((p[(i, j)] - C64::new(target, 0.0)).norm());
        }
    }
    dev
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let a = DenseOperator::identity(2);
        let b = DenseOperator::identity(3);
        let k = a.kron(&b);
        assert_eq!(k.dim(), 6);
        assert!(k.max_abs_diff(&DenseOperator::identity(6)) == 0.0);
        assert!(k.is_unitary_flagged());
    }

    #[test]
    fn unitary_constructor_rejects_non_unitary() {
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(DenseOperator::new_unitary(m), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn dense_guard_trips() {
        assert!(check_dense_dim(4096).is_ok());
        assert!(matches!(check_dense_dim(4097), Err(Error::DimensionOverflow { .. })));
    }

    #[test]
    fn trace_product_matches_product_trace() {
        let a = DenseOperator::new(DMatrix::from_fn(3, 3, |i, j| c(i as f64, j as f64)));
        let b = DenseOperator::new(DMatrix::from_fn(3, 3, |i, j| c((i * j) as f64, 1.0)));
        let lhs = a.trace_product(&b);
        let rhs = a.mul(&b).trace();
        assert!((lhs - rhs).norm() < 1e-12);
    }
}
