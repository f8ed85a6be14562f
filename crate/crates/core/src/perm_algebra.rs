//! Permutation operators on tensor powers, Weingarten tables and the
//! isospectral twirling channel `R(U) = ∫dG G^{†⊗2k} U^{⊗k,k} G^{⊗2k}`.
//!
//! Basis convention: `T_π |i_1 … i_n⟩ = |i_{π⁻¹(1)} … i_{π⁻¹(n)}⟩`, i.e. the
//! content of slot `j` moves to slot `π(j)`. With this convention
//! `T_π T_σ = T_{π∘σ}` and, for a cycle `(c_0 c_1 … c_{L-1})` with
//! `c_{m+1} = π(c_m)`,
//!
//! ```text
//! tr(T_π A_1 ⊗ … ⊗ A_n) = ∏_cycles tr(A_{c_{L-1}} ⋯ A_{c_1} A_{c_0}).
//! ```
//!
//! Copies are ordered with slot 0 as the most significant tensor factor, matching
//! `A_1 ⊗ A_2 ⊗ …` as produced by [`DenseOperator::kron`].

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::ensembles::Spectrum;
use crate::error::{Error, Result};
use crate::operator::{check_dense_dim, DenseOperator};
use crate::perm::Perm;

/// Tolerance for results that pass through a matrix inverse.
pub const INVERSE_TOL: f64 = 1e-9;

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

/// Dense `T_π` acting on `(C^d)^{⊗n}`.
pub fn perm_operator(p: &Perm, d: usize) -> Result<DenseOperator> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("local dimension must be >= 2, got {d}")));
    }
    let n = p.n();
    let dim = check_dense_dim((d as u128).pow(n as u32))?;
    let mut m = DMatrix::from_element(dim, dim, zero());
    let mut digits = vec![0usize; n];
    let mut out = vec![0usize; n];
    for col in 0..dim {
        decode(col, d, &mut digits);
        for (j, &dj) in digits.iter().enumerate() {
            out[p.apply(j)] = dj;
        }
        m[(encode(&out, d), col)] = C64::new(1.0, 0.0);
    }
    Ok(DenseOperator::with_flags(m, true, p.compose(p).is_identity()))
}

pub(crate) fn decode(mut idx: usize, d: usize, digits: &mut [usize]) {
    for slot in (0..digits.len()).rev() {
        digits[slot] = idx % d;
        idx /= d;
    }
}

pub(crate) fn encode(digits: &[usize], d: usize) -> usize {
    digits.iter().fold(0, |acc, &x| acc * d + x)
}

/// `tr(T_π A_1 ⊗ … ⊗ A_n)` evaluated as a product of cycle traces.
pub fn perm_trace(p: &Perm, ops: &[&DenseOperator]) -> Result<C64> {
    if ops.len() != p.n() {
        return Err(Error::DimensionMismatch { expected: p.n(), found: ops.len() });
    }
    let d = ops[0].dim();
    if let Some(bad) = ops.iter().find(|o| o.dim() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: bad.dim() });
    }
    let mut total = C64::new(1.0, 0.0);
    for cycle in p.cycles() {
        total *= cycle_trace(&cycle, ops);
    }
    Ok(total)
}

fn cycle_trace(cycle: &[usize], ops: &[&DenseOperator]) -> C64 {
    match cycle.len() {
        1 => ops[cycle[0]].trace(),
        2 => ops[cycle[1]].trace_product(ops[cycle[0]]),
        _ => {
            let last = cycle.len() - 1;
            let mut acc = ops[cycle[last]].matrix().clone();
            for &c in cycle[1..last].iter().rev() {
                acc *= ops[c].matrix();
            }
            DenseOperator::new(acc).trace_product(ops[cycle[0]])
        }
    }
}

/// Gram matrix of rescaled permutation operators and its inverse.
///
/// `gram[π][σ] = tr(T̃_π T̃_σ) = d^{ℓ(πσ) − ℓ(π) − ℓ(σ)}` with `T̃_π = T_π / tr T_π`.
#[derive(Debug, Clone)]
pub struct WeingartenTable {
    pub k: usize,
    pub d: usize,
    pub perms: Vec<Perm>,
    pub gram: DMatrix<f64>,
    pub inverse: DMatrix<f64>,
    /// 2-norm condition number of `gram`.
    pub condition: f64,
}

impl WeingartenTable {
    pub fn new(k: usize, d: usize) -> Result<Self> {
        if !(1..=2).contains(&k) {
            return Err(Error::InvalidParameter(format!("Weingarten tables support k in {{1, 2}}, got {k}")));
        }
        if d < 2 * k {
            return Err(Error::SingularGram { k, d });
        }
        let perms = Perm::all(2 * k);
        let n = perms.len();
        let df = d as f64;
        let ell: Vec<i32> = perms.iter().map(|p| p.cycle_count() as i32).collect();
        let gram = DMatrix::from_fn(n, n, |a, b| {
            let prod = perms[a].compose(&perms[b]).cycle_count() as i32;
            df.powi(prod - ell[a] - ell[b])
        });
        let svd = gram.clone().svd(false, false);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        let condition = smax / smin;
        let inverse = gram.clone().lu().try_inverse().ok_or(Error::SingularGram { k, d })?;
        log::debug!("Weingarten table k={k} d={d}: condition number {condition:.3e}");
        Ok(WeingartenTable { k, d, perms, gram, inverse, condition })
    }

    pub fn index_of(&self, p: &Perm) -> Option<usize> {
        self.perms.iter().position(|q| q == p)
    }

    /// `d^{ℓ(π)}`, the trace of the unrescaled permutation operator.
    pub fn perm_dim(&self, idx: usize) -> f64 {
        (self.d as f64).powi(self.perms[idx].cycle_count() as i32)
    }

    /// Expansion weights `a_σ = Σ_π (Ω̃⁻¹)_{πσ} c̃_π` of the twirled operator on `T̃_σ`.
    pub fn weights(&self, coefficients: &[C64]) -> Vec<C64> {
        let n = self.perms.len();
        (0..n)
            .map(|s| (0..n).fold(zero(), |acc, p| acc + coefficients[p] * self.inverse[(p, s)]))
            .collect()
    }
}

/// `c̃_π(U) = tr(T̃_π U^{⊗k,k})` for all `π ∈ S_{2k}`, in `Perm::all(2k)` order.
pub fn twirl_coefficients(u: &DenseOperator, k: usize) -> Result<Vec<(Perm, C64)>> {
    let ud = u.adjoint();
    let ops: Vec<&DenseOperator> = (0..2 * k).map(|i| if i < k { u } else { &ud }).collect();
    let d = u.dim() as f64;
    Perm::all(2 * k)
        .into_iter()
        .map(|p| {
            let tr = perm_trace(&p, &ops)?;
            let scale = d.powi(p.cycle_count() as i32);
            Ok((p, tr / scale))
        })
        .collect()
}

/// `c̃_π(U)` for all `π ∈ S_{2k}` from the power traces `m ↦ tr(U^m)`.
///
/// Each cycle of `π` contributes `tr(U^{m})` with `m` the number of `U` slots
/// minus the number of `U†` slots it visits; this holds whenever all copies
/// commute, in particular for diagonal `U`.
pub fn coefficients_from_power_traces<F>(k: usize, d: usize, power_trace: F) -> Vec<C64>
where
    F: Fn(i64) -> C64,
{
    let df = d as f64;
    let mut cache: std::collections::BTreeMap<i64, C64> = std::collections::BTreeMap::new();
    Perm::all(2 * k)
        .iter()
        .map(|p| {
            let mut value = C64::new(1.0, 0.0);
            for cycle in p.cycles() {
                let m: i64 = cycle.iter().map(|&slot| if slot < k { 1 } else { -1 }).sum();
                let tr = *cache.entry(m).or_insert_with(|| if m == 0 { C64::new(df, 0.0) } else { power_trace(m) });
                value *= tr;
            }
            value / df.powi(p.cycle_count() as i32)
        })
        .collect()
}

/// Placement of the twirled operator relative to the probe operator in a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `tr(T̃_τ O R)`.
    Right,
    /// `tr(T̃_τ R O)`.
    Left,
}

/// The twirled operator `R(X)` in coefficient form, `R = Σ_σ a_σ T̃_σ`.
///
/// Expectation values against permutation-times-product operators are evaluated
/// at trace level, so `d` is only limited by `d × d` matrix products.
#[derive(Debug, Clone)]
pub struct TwirledChannel {
    pub table: WeingartenTable,
    pub weights: Vec<C64>,
}

impl TwirledChannel {
    /// Haar twirl of `X` given its rescaled permutation traces `tr(T̃_π X)` in table order.
    pub fn from_traces(table: WeingartenTable, traces: &[C64]) -> Self {
        let weights = table.weights(traces);
        TwirledChannel { table, weights }
    }

    /// Isospectral twirl of `U^{⊗k,k}`.
    pub fn isospectral(u: &DenseOperator, k: usize) -> Result<Self> {
        let table = WeingartenTable::new(k, u.dim())?;
        let coeffs: Vec<C64> = twirl_coefficients(u, k)?.into_iter().map(|(_, c)| c).collect();
        Ok(Self::from_traces(table, &coeffs))
    }

    /// `tr(R)`.
    pub fn trace(&self) -> C64 {
        self.weights.iter().sum()
    }

    /// Isospectral twirl of a diagonal unitary `e^{-iHt}` given only its spectrum.
    pub fn from_spectrum(s: &Spectrum, t: f64, k: usize) -> Result<Self> {
        let table = WeingartenTable::new(k, s.d())?;
        let coeffs = coefficients_from_power_traces(k, s.d(), |m| {
            s.energies().iter().map(|e| C64::from_polar(1.0, -(m as f64) * e * t)).sum()
        });
        Ok(Self::from_traces(table, &coeffs))
    }

    /// `tr(T̃_τ O R)` or `tr(T̃_τ R O)` given `trace_of(π) = tr(T_π O)`.
    pub fn expectation_with<F>(&self, tau: &Perm, side: Side, mut trace_of: F) -> Result<C64>
    where
        F: FnMut(&Perm) -> Result<C64>,
    {
        let d = self.table.d as f64;
        let tau_dim = d.powi(tau.cycle_count() as i32);
        let mut acc = zero();
        for (s, sigma) in self.table.perms.iter().enumerate() {
            // tr(T_τ O T_σ) = tr(T_{σ∘τ} O) and tr(T_τ T_σ O) = tr(T_{τ∘σ} O)
            let pi = match side {
                Side::Right => sigma.compose(tau),
                Side::Left => tau.compose(sigma),
            };
            acc += self.weights[s] * trace_of(&pi)? / (tau_dim * self.table.perm_dim(s));
        }
        Ok(acc)
    }

    /// `tr(T̃_τ (A_1 ⊗ … ⊗ A_{2k}) R)`.
    pub fn expectation(&self, tau: &Perm, ops: &[&DenseOperator]) -> Result<C64> {
        self.expectation_with(tau, Side::Right, |pi| perm_trace(pi, ops))
    }

    /// `tr(T̃_τ R (A_1 ⊗ … ⊗ A_{2k}))`.
    pub fn expectation_left(&self, tau: &Perm, ops: &[&DenseOperator]) -> Result<C64> {
        self.expectation_with(tau, Side::Left, |pi| perm_trace(pi, ops))
    }

    /// Dense `R`, guarded by the dense dimension limit.
    pub fn to_dense(&self) -> Result<DenseOperator> {
        let d = self.table.d;
        let dim = check_dense_dim((d as u128).pow(2 * self.table.k as u32))?;
        let mut m = DMatrix::from_element(dim, dim, zero());
        for (s, sigma) in self.table.perms.iter().enumerate() {
            let t = perm_operator(sigma, d)?;
            m += t.matrix() * (self.weights[s] / self.table.perm_dim(s));
        }
        Ok(DenseOperator::new(m))
    }
}

/// Dense isospectral twirl `R^{(2k)}(U)`.
pub fn isospectral_twirl(u: &DenseOperator, k: usize) -> Result<DenseOperator> {
    let d = u.dim();
    check_dense_dim((d as u128).pow(2 * k as u32))?;
    TwirledChannel::isospectral(u, k)?.to_dense()
}
