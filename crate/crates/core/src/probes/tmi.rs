//! 2-Rényi tripartite mutual information of a unitary channel, in bits.
//!
//! Inputs are split as `A ⊗ B` and outputs as `C ⊗ D` with `d_A = d_C`, `d_B = d_D`;
//! the split is given as `BipartiteSplit { d_a: d_C, d_b: d_D }`.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::{haar_conjugated_estimate, BipartiteSplit};
use crate::error::{Error, Result};
use crate::form_factors::FormFactorPoint;
use crate::operator::DenseOperator;
use crate::parallel::RngSeed;
use crate::perm::Perm;
use crate::perm_algebra::{Side, TwirledChannel};
use crate::stats::Estimate;

/// Size guard for exact TMI evaluation.
pub const MAX_TMI_DIM: usize = 256;

fn check(u: &DenseOperator, split: BipartiteSplit) -> Result<()> {
    if split.d() != u.dim() {
        return Err(Error::InvalidSplit(format!("{} x {} does not factor d = {}", split.d_a, split.d_b, u.dim())));
    }
    if u.dim() > MAX_TMI_DIM {
        return Err(Error::SizeGuard(format!("exact TMI is limited to d <= {MAX_TMI_DIM}")));
    }
    Ok(())
}

/// `(tr(T^U_C T_C), tr(T^U_C T_D)) / d²` with `T^U_C = U^{⊗2} T_C U^{†⊗2}`.
///
/// Expanding `T_C = Σ_{ab} X_{ab} ⊗ X_{ba}` with `X_{ab} = |a⟩⟨b| ⊗ 1_D` reduces both
/// traces to partial traces of `U X_{ab} U†`.
pub fn swap_traces(u: &DenseOperator, split: BipartiteSplit) -> Result<(f64, f64)> {
    check(u, split)?;
    let (dc, dd) = (split.d_a, split.d_b);
    let m = u.matrix();
    let block = |a: usize| m.columns(a * dd, dd).into_owned();
    let blocks: Vec<DMatrix<C64>> = (0..dc).map(block).collect();
    let mut y = Vec::with_capacity(dc * dc);
    let mut w = Vec::with_capacity(dc * dc);
    for a in 0..dc {
        for b in 0..dc {
            let mab = &blocks[a] * blocks[b].adjoint();
            y.push(DMatrix::from_fn(dc, dc, |f, e| (0..dd).map(|g| mab[(f * dd + g, e * dd + g)]).sum::<C64>()));
            w.push(DMatrix::from_fn(dd, dd, |g, h| (0..dc).map(|f| mab[(f * dd + g, f * dd + h)]).sum::<C64>()));
        }
    }
    let mut s_cc = C64::new(0.0, 0.0);
    let mut s_cd = C64::new(0.0, 0.0);
    for a in 0..dc {
        for b in 0..dc {
            s_cc += (&y[a * dc + b] * &y[b * dc + a]).trace();
            s_cd += (&w[a * dc + b] * &w[b * dc + a]).trace();
        }
    }
    let d2 = (u.dim() * u.dim()) as f64;
    Ok((s_cc.re / d2, s_cd.re / d2))
}

/// `I₃(2) = −3 log d + log tr(T^U_C T_C) + log tr(T^U_C T_D)`.
pub fn tmi_renyi2(u: &DenseOperator, split: BipartiteSplit) -> Result<f64> {
    let (x1, x2) = swap_traces(u, split)?;
    Ok((u.dim() as f64).log2() + x1.log2() + x2.log2())
}

/// `I₃(2)` from the Choi state `|U⟩ = d^{-1/2} Σ_{ab} |ab⟩ ⊗ U|ab⟩` as
/// `log d + log tr ρ_{AC}² + log tr ρ_{AD}²`.
pub fn tmi_choi_route(u: &DenseOperator, split: BipartiteSplit) -> Result<f64> {
    check(u, split)?;
    let (da, db) = (split.d_a, split.d_b);
    let d = u.dim();
    let scale = 1.0 / (d as f64).sqrt();
    let m = u.matrix();
    // amplitude of |a b⟩_in |c e⟩_out is u_{(c,e),(a,b)} / √d
    let amp = |a: usize, b: usize, c: usize, e: usize| m[(c * db + e, a * db + b)] * scale;
    let ac = DMatrix::from_fn(da * da, db * db, |r, col| amp(r / da, col / db, r % da, col % db));
    let ad = DMatrix::from_fn(da * db, db * da, |r, col| amp(r / db, col / da, col % da, r % db));
    let purity = |x: &DMatrix<C64>| (x * x.adjoint()).norm_squared();
    Ok((d as f64).log2() + purity(&ac).log2() + purity(&ad).log2())
}

fn split_perm_trace(pi: &Perm, c_perm: &Perm, d_perm: &Perm, split: BipartiteSplit) -> C64 {
    let dc = (split.d_a as f64).powi(pi.compose(c_perm).cycle_count() as i32);
    let dd = (split.d_b as f64).powi(pi.compose(d_perm).cycle_count() as i32);
    C64::new(dc * dd, 0.0)
}

/// `log d + log ⟨tr(T^U_C T_C)⟩_G/d² + log ⟨tr(T^U_C T_D)⟩_G/d²`, the Jensen upper
/// bound on the twirled TMI.
pub fn tmi_twirled_bound_exact(channel: &TwirledChannel, split: BipartiteSplit) -> Result<f64> {
    if channel.table.k != 2 {
        return Err(Error::InvalidParameter("the TMI needs the four-copy channel".into()));
    }
    if split.d() != channel.table.d {
        return Err(Error::InvalidSplit(format!("{} x {} does not factor d = {}", split.d_a, split.d_b, channel.table.d)));
    }
    let (x1, x2) = twirled_swap_traces(channel, split)?;
    Ok((split.d() as f64).log2() + x1.log2() + x2.log2())
}

/// Twirled counterpart of [`swap_traces`].
pub fn twirled_swap_traces(channel: &TwirledChannel, split: BipartiteSplit) -> Result<(f64, f64)> {
    let tau = Perm::parse(4, "(13)(24)")?;
    let id = Perm::identity(4);
    let c_pair = Perm::parse(4, "(12)(34)")?;
    let c_first = Perm::parse(4, "(12)")?;
    let d_second = Perm::parse(4, "(34)")?;
    let x1 = channel.expectation_with(&tau, Side::Left, |pi| Ok(split_perm_trace(pi, &c_pair, &id, split)))?;
    let x2 = channel.expectation_with(&tau, Side::Left, |pi| Ok(split_perm_trace(pi, &c_first, &d_second, split)))?;
    Ok((x1.re, x2.re))
}

/// `log₂(2 − 3c̃₄ + 2 Re c̃₃) + log₂(c̃₄ + (2 − c̃₄)/d)` for `d_C = d_D = √d`;
/// NaN where the first argument is not positive.
pub fn tmi_twirled_bound(p: &FormFactorPoint) -> f64 {
    let d = p.d as f64;
    (2.0 - 3.0 * p.c4 + 2.0 * p.c3.re).log2() + (p.c4 + (2.0 - p.c4) / d).log2()
}

/// `2 − log₂ d`.
pub fn tmi_plateau(d: usize) -> f64 {
    2.0 - (d as f64).log2()
}

pub fn tmi_twirled_mc(u: &DenseOperator, split: BipartiteSplit, n: usize, seed: RngSeed) -> Result<Estimate> {
    check(u, split)?;
    haar_conjugated_estimate(u, n, seed, |v| tmi_renyi2(v, split))
}
