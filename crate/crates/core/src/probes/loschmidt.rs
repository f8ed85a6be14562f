use super::{haar_conjugated_estimate, same_dim};
use crate::error::{Error, Result};
use crate::form_factors::FormFactorPoint;
use crate::operator::{DenseOperator, EXACT_TOL};
use crate::parallel::RngSeed;
use crate::perm::Perm;
use crate::perm_algebra::TwirledChannel;
use crate::stats::Estimate;

/// How a Loschmidt echo value is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EchoMode {
    Exact,
    TwirledClosed,
    TwirledMc { n_samples: usize, seed: RngSeed },
}

fn require_unitary_perturbation(a: &DenseOperator) -> Result<()> {
    let deviation = a.unitarity_deviation();
    if deviation > EXACT_TOL {
        return Err(Error::NotUnitary { deviation });
    }
    Ok(())
}

/// `d⁻² |tr(U† A† U A)|²`: the echo for the isospectral perturbation `H + δH = A† H A`.
pub fn loschmidt_exact(u: &DenseOperator, a: &DenseOperator) -> Result<f64> {
    let d = same_dim(&[u, a])?;
    require_unitary_perturbation(a)?;
    let tr = u.adjoint().mul(&a.adjoint()).mul(u).trace_product(a);
    Ok(tr.norm_sqr() / (d * d) as f64)
}

/// `tr(T̃_{(14)(23)} 𝒜^{⊗2} R̂⁽⁴⁾(U))` with `𝒜 = A† ⊗ A`.
pub fn loschmidt_twirled_closed(channel: &TwirledChannel, a: &DenseOperator) -> Result<f64> {
    if channel.table.k != 2 {
        return Err(Error::InvalidParameter("the echo needs the four-copy channel".into()));
    }
    if a.dim() != channel.table.d {
        return Err(Error::DimensionMismatch { expected: channel.table.d, found: a.dim() });
    }
    require_unitary_perturbation(a)?;
    let ad = a.adjoint();
    let tau = Perm::parse(4, "(14)(23)")?;
    Ok(channel.expectation(&tau, &[&ad, a, &ad, a])?.re)
}

pub fn loschmidt_twirled_mc(u: &DenseOperator, a: &DenseOperator, n: usize, seed: RngSeed) -> Result<Estimate> {
    same_dim(&[u, a])?;
    require_unitary_perturbation(a)?;
    haar_conjugated_estimate(u, n, seed, |v| loschmidt_exact(v, a))
}

/// Echo in the requested mode; exact and closed-form values carry zero stderr.
pub fn loschmidt_echo(u: &DenseOperator, a: &DenseOperator, mode: EchoMode) -> Result<Estimate> {
    let exact = |value: f64| Estimate { mean: value, stderr: 0.0, n: 1 };
    match mode {
        EchoMode::Exact => loschmidt_exact(u, a).map(exact),
        EchoMode::TwirledClosed => {
            let channel = TwirledChannel::isospectral(u, 2)?;
            loschmidt_twirled_closed(&channel, a).map(exact)
        }
        EchoMode::TwirledMc { n_samples, seed } => loschmidt_twirled_mc(u, a, n_samples, seed),
    }
}

/// `c̃₄ + d⁻²`, the leading behaviour of the twirled echo for a Pauli perturbation.
pub fn loschmidt_offset_reference(p: &FormFactorPoint) -> f64 {
    p.c4 + 1.0 / (p.d as f64 * p.d as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{pauli_operator, sample_gue_spectrum, sample_haar_unitary, unitary_from_spectrum};

    #[test]
    fn unperturbed_echo_is_one() {
        let mut rng = RngSeed(1).stream(0);
        let u = sample_haar_unitary(8, &mut rng);
        let id = DenseOperator::identity(8);
        for mode in [EchoMode::Exact, EchoMode::TwirledClosed, EchoMode::TwirledMc { n_samples: 8, seed: RngSeed(2) }] {
            let v = loschmidt_echo(&u, &id, mode).unwrap();
            assert!((v.mean - 1.0).abs() < 1e-10, "{mode:?}: {v:?}");
        }
    }

    #[test]
    fn permutation_form_matches_definition_for_a_fixed_unitary() {
        let mut rng = RngSeed(3).stream(0);
        let u = sample_haar_unitary(4, &mut rng);
        let a = pauli_operator("XY").unwrap();
        let ad = a.adjoint();
        let ud = u.adjoint();
        let slots = [ad.mul(&u), a.mul(&u), ad.mul(&ud), a.mul(&ud)];
        let refs: Vec<&DenseOperator> = slots.iter().collect();
        let tau = Perm::parse(4, "(14)(23)").unwrap();
        let via_perm = crate::perm_algebra::perm_trace(&tau, &refs).unwrap() / 16.0;
        assert!((via_perm.re - loschmidt_exact(&u, &a).unwrap()).abs() < 1e-12);
        assert!(via_perm.im.abs() < 1e-12);
    }

    #[test]
    fn closed_form_matches_monte_carlo() {
        let mut rng = RngSeed(4).stream(0);
        let s = sample_gue_spectrum(8, &mut rng).unwrap();
        let u = unitary_from_spectrum(&s, 1.5).unwrap();
        let a = pauli_operator("XII").unwrap();
        let ch = TwirledChannel::from_spectrum(&s, 1.5, 2).unwrap();
        let closed = loschmidt_twirled_closed(&ch, &a).unwrap();
        let mc = loschmidt_twirled_mc(&u, &a, 4000, RngSeed(5)).unwrap();
        assert!(mc.within(closed, 3.0), "{closed} vs {mc:?}");
    }

    #[test]
    fn non_unitary_perturbation_is_rejected() {
        let u = DenseOperator::identity(2);
        let a = DenseOperator::identity(2).scale(num_complex::Complex64::new(2.0, 0.0));
        assert!(matches!(loschmidt_exact(&u, &a), Err(Error::NotUnitary { .. })));
    }
}
