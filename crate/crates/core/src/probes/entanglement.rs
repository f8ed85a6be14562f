use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use super::haar_conjugated_estimate;
use crate::error::{Error, Result};
use crate::form_factors::FormFactorPoint;
use crate::operator::DenseOperator;
use crate::parallel::RngSeed;
use crate::perm::Perm;
use crate::perm_algebra::{perm_trace, TwirledChannel};
use crate::stats::Estimate;

/// Norm tolerance for [`PureState`].
pub const NORM_TOL: f64 = 1e-12;

/// `𝓗 = 𝓗_A ⊗ 𝓗_B`; basis index `a·d_B + b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BipartiteSplit {
    pub d_a: usize,
    pub d_b: usize,
}

impl BipartiteSplit {
    pub fn new(d_a: usize, d_b: usize) -> Result<Self> {
        if d_a == 0 || d_b == 0 {
            return Err(Error::InvalidSplit(format!("empty factor in {d_a} x {d_b}")));
        }
        Ok(BipartiteSplit { d_a, d_b })
    }

    pub fn d(&self) -> usize {
        self.d_a * self.d_b
    }

    fn check(&self, d: usize) -> Result<()> {
        if self.d() != d {
            return Err(Error::InvalidSplit(format!("{} x {} does not factor d = {d}", self.d_a, self.d_b)));
        }
        Ok(())
    }
}

/// `d_A = d_B = √d`.
pub fn balanced_split(d: usize) -> Result<BipartiteSplit> {
    let r = (d as f64).sqrt().round() as usize;
    if r * r != d {
        return Err(Error::InvalidSplit(format!("d = {d} is not a perfect square")));
    }
    BipartiteSplit::new(r, r)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: DVector<C64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let v = DVector::from_vec(amplitudes);
        let norm = v.norm();
        if v.is_empty() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Unnormalized { norm });
        }
        Ok(PureState { amplitudes: v })
    }

    /// `|0⟩`, a product state for every split.
    pub fn basis(d: usize, index: usize) -> Result<Self> {
        if index >= d {
            return Err(Error::InvalidParameter(format!("basis index {index} out of range for d = {d}")));
        }
        let mut v = vec![C64::new(0.0, 0.0); d];
        v[index] = C64::new(1.0, 0.0);
        Self::new(v)
    }

    /// `Σ_i |i⟩_A |i⟩_B / √min(d_A, d_B)`.
    pub fn maximally_entangled(split: BipartiteSplit) -> Result<Self> {
        let m = split.d_a.min(split.d_b);
        let amp = C64::new(1.0 / (m as f64).sqrt(), 0.0);
        let mut v = vec![C64::new(0.0, 0.0); split.d()];
        for i in 0..m {
            v[i * split.d_b + i] = amp;
        }
        Self::new(v)
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn evolve(&self, u: &DenseOperator) -> Result<PureState> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: u.dim() });
        }
        Ok(PureState { amplitudes: u.matrix() * &self.amplitudes })
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> DenseOperator {
        DenseOperator::new(&self.amplitudes * self.amplitudes.adjoint())
    }

    /// `ψ_{ab}` as a `d_A × d_B` matrix.
    fn as_matrix(&self, split: BipartiteSplit) -> DMatrix<C64> {
        DMatrix::from_fn(split.d_a, split.d_b, |a, b| self.amplitudes[a * split.d_b + b])
    }
}

/// `tr ψ_A²`, clamped to at most 1 against roundoff.
pub fn reduced_purity(psi: &PureState, split: BipartiteSplit) -> Result<f64> {
    split.check(psi.dim())?;
    let m = psi.as_matrix(split);
    Ok((&m * m.adjoint()).norm_squared().min(1.0))
}

/// `−ln tr ψ_A(t)²` for `ψ(t) = U ψ`, or for `ψ` itself without `U`.
pub fn renyi2_entropy(psi: &PureState, split: BipartiteSplit, u: Option<&DenseOperator>) -> Result<f64> {
    let purity = match u {
        Some(u) => reduced_purity(&psi.evolve(u)?, split)?,
        None => reduced_purity(psi, split)?,
    };
    Ok(-purity.ln())
}

/// `−ln[2d^{−1/2} + c̃₄ (tr ψ_A² − 2d^{−1/2})]` for a balanced split.
pub fn renyi2_twirled_bound(p: &FormFactorPoint, purity0: f64, split: BipartiteSplit) -> Result<f64> {
    split.check(p.d)?;
    if split.d_a != split.d_b {
        return Err(Error::InvalidSplit("the closed-form bound needs d_A = d_B".into()));
    }
    let haar = 2.0 / (p.d as f64).sqrt();
    Ok(-(haar + p.c4 * (purity0 - haar)).ln())
}

/// `|a⟩⟨b|_A ⊗ 1_B`.
fn lift_a(split: BipartiteSplit, a: usize, b: usize) -> DenseOperator {
    let mut m = DMatrix::from_element(split.d(), split.d(), C64::new(0.0, 0.0));
    for j in 0..split.d_b {
        m[(a * split.d_b + j, b * split.d_b + j)] = C64::new(1.0, 0.0);
    }
    DenseOperator::new(m)
}

/// Isospectrally twirled purity `tr(T_{(13)(24)} R̂⁽⁴⁾(U) (ψ ⊗ ψ ⊗ T_A))`, where `T_A`
/// swaps the `A` factors of the last two copies.
pub fn twirled_purity(channel: &TwirledChannel, psi: &PureState, split: BipartiteSplit) -> Result<f64> {
    if channel.table.k != 2 {
        return Err(Error::InvalidParameter("purity needs the four-copy channel".into()));
    }
    split.check(psi.dim())?;
    if psi.dim() != channel.table.d {
        return Err(Error::DimensionMismatch { expected: channel.table.d, found: psi.dim() });
    }
    let rho = psi.projector();
    let lifts: Vec<Vec<DenseOperator>> =
        (0..split.d_a).map(|a| (0..split.d_a).map(|b| lift_a(split, a, b)).collect()).collect();
    let tau = Perm::parse(4, "(13)(24)")?;
    let value = channel.expectation_with(&tau, crate::perm_algebra::Side::Left, |pi| {
        let mut acc = C64::new(0.0, 0.0);
        for a in 0..split.d_a {
            for b in 0..split.d_a {
                acc += perm_trace(pi, &[&rho, &rho, &lifts[a][b], &lifts[b][a]])?;
            }
        }
        Ok(acc)
    })?;
    let d = psi.dim() as f64;
    Ok(value.re * d * d)
}

/// `−ln ⟨tr ψ_A(t)²⟩_G`, the Jensen lower bound on the twirled entropy.
pub fn renyi2_twirled_bound_exact(channel: &TwirledChannel, psi: &PureState, split: BipartiteSplit) -> Result<f64> {
    Ok(-twirled_purity(channel, psi, split)?.ln())
}

/// Monte Carlo `⟨S₂⟩_G` over Haar conjugations of `U`.
pub fn renyi2_twirled_mc(
    u: &DenseOperator,
    psi: &PureState,
    split: BipartiteSplit,
    n: usize,
    seed: RngSeed,
) -> Result<Estimate> {
    split.check(psi.dim())?;
    haar_conjugated_estimate(u, n, seed, |v| renyi2_entropy(psi, split, Some(v)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{sample_gue_spectrum, sample_haar_unitary, unitary_from_spectrum};
    use crate::form_factors::form_factors_at;
    use crate::probes::haar_conjugated_estimate;

    #[test]
    fn product_and_maximally_entangled_states() {
        let split = balanced_split(16).unwrap();
        let product = PureState::basis(16, 0).unwrap();
        assert!(renyi2_entropy(&product, split, None).unwrap().abs() < 1e-14);
        let bell = PureState::maximally_entangled(split).unwrap();
        assert!((renyi2_entropy(&bell, split, None).unwrap() - 4f64.ln()).abs() < 1e-12);
        let s = crate::ensembles::Spectrum::new((0..16).map(|i| i as f64).collect()).unwrap();
        let p0 = form_factors_at(&s, 0.0);
        assert_eq!(renyi2_twirled_bound(&p0, 1.0, split).unwrap(), 0.0);
    }

    #[test]
    fn unnormalized_state_is_rejected() {
        let v = vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)];
        assert!(matches!(PureState::new(v), Err(Error::Unnormalized { .. })));
        assert!(balanced_split(8).is_err());
    }

    #[test]
    fn twirled_purity_matches_monte_carlo() {
        let mut rng = RngSeed(1).stream(0);
        let u = sample_haar_unitary(4, &mut rng);
        let split = balanced_split(4).unwrap();
        let psi = PureState::basis(4, 1).unwrap();
        let ch = TwirledChannel::isospectral(&u, 2).unwrap();
        let closed = twirled_purity(&ch, &psi, split).unwrap();
        let mc = haar_conjugated_estimate(&u, 20_000, RngSeed(2), |v| reduced_purity(&psi.evolve(v)?, split)).unwrap();
        assert!(mc.within(closed, 3.0), "{closed} vs {mc:?}");
    }

    #[test]
    fn twirled_purity_at_zero_time_is_initial_purity() {
        let mut rng = RngSeed(3).stream(0);
        let s = sample_gue_spectrum(16, &mut rng).unwrap();
        let split = balanced_split(16).unwrap();
        let psi = PureState::basis(16, 5).unwrap();
        let ch = TwirledChannel::from_spectrum(&s, 0.0, 2).unwrap();
        assert!((twirled_purity(&ch, &psi, split).unwrap() - 1.0).abs() < 1e-9);
        let u = unitary_from_spectrum(&s, 0.0).unwrap();
        assert!(renyi2_entropy(&psi, split, Some(&u)).unwrap().abs() < 1e-12);
    }
}
