use num_complex::Complex64 as C64;

use crate::ensembles::{sample_haar_unitary, Spectrum};
use crate::error::{Error, Result};
use crate::form_factors::{
    generic_trace_moment_count, is_generic, numeric_time_average, FormFactorPoint, GENERIC_TOL,
};
use crate::operator::DenseOperator;
use crate::parallel::{map_indexed, RngSeed};
use crate::stats::Estimate;

/// Size guard for the dense Monte Carlo frame potential.
pub const MAX_FRAME_MC_DIM: usize = 128;

/// `k!`, the Haar frame potential for `d ≥ k`.
pub fn haar_frame_potential(k: usize) -> f64 {
    (1..=k).map(|x| x as f64).product()
}

fn check_args(d: usize, k: usize, n: usize) -> Result<()> {
    if !(1..=2).contains(&k) {
        return Err(Error::InvalidParameter(format!("frame potential order must be 1 or 2, got {k}")));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("n_samples must be >= 1".into()));
    }
    if d > MAX_FRAME_MC_DIM {
        return Err(Error::SizeGuard(format!("frame potential MC is limited to d <= {MAX_FRAME_MC_DIM}")));
    }
    Ok(())
}

/// Monte Carlo `∫dG |tr(U† G† U G)|^{2k}`.
pub fn frame_potential_mc(u: &DenseOperator, k: usize, n: usize, seed: RngSeed) -> Result<Estimate> {
    check_args(u.dim(), k, n)?;
    let ud = u.adjoint();
    let xs = map_indexed(n, |i| {
        let g = sample_haar_unitary(u.dim(), &mut seed.stream(i as u64));
        ud.mul(&g.adjoint()).mul(u).mul(&g).trace().norm_sqr().powi(k as i32)
    });
    Ok(Estimate::from_samples(&xs))
}

/// [`frame_potential_mc`] for `U = e^{-iHt}` given the spectrum of `H`:
/// `tr(U† G† U G) = Σ_{ij} ū_i u_j |G_{ji}|²`.
pub fn frame_potential_mc_spectrum(s: &Spectrum, t: f64, k: usize, n: usize, seed: RngSeed) -> Result<Estimate> {
    let d = s.d();
    check_args(d, k, n)?;
    let phases: Vec<C64> = s.energies().iter().map(|e| C64::from_polar(1.0, -e * t)).collect();
    let xs = map_indexed(n, |i| {
        let g = sample_haar_unitary(d, &mut seed.stream(i as u64));
        let m = g.matrix();
        let mut tr = C64::new(0.0, 0.0);
        for col in 0..d {
            let mut inner = C64::new(0.0, 0.0);
            for row in 0..d {
                inner += phases[row] * m[(row, col)].norm_sqr();
            }
            tr += phases[col].conj() * inner;
        }
        tr.norm_sqr().powi(k as i32)
    });
    Ok(Estimate::from_samples(&xs))
}

/// The unreduced two-sample form `∫dG₁dG₂ |tr(G₁† U† G₁ G₂† U G₂)|^{2k}`.
pub fn frame_potential_mc_two_sample(u: &DenseOperator, k: usize, n: usize, seed: RngSeed) -> Result<Estimate> {
    check_args(u.dim(), k, n)?;
    let ud = u.adjoint();
    let xs = map_indexed(n, |i| {
        let mut rng = seed.stream(i as u64);
        let g1 = sample_haar_unitary(u.dim(), &mut rng);
        let g2 = sample_haar_unitary(u.dim(), &mut rng);
        let left = g1.adjoint().mul(&ud).mul(&g1);
        let right = g2.adjoint().mul(u).mul(&g2);
        left.trace_product(&right).norm_sqr().powi(k as i32)
    });
    Ok(Estimate::from_samples(&xs))
}

/// `d²/(d²−1) (d² c̃₄ − 2 c̃₂ + 1)`.
pub fn frame_potential_closed_k1(p: &FormFactorPoint) -> Result<f64> {
    if p.d < 2 {
        return Err(Error::InvalidParameter("frame potential needs d >= 2".into()));
    }
    let d2 = (p.d * p.d) as f64;
    Ok(d2 / (d2 - 1.0) * (d2 * p.c4 - 2.0 * p.c2 + 1.0))
}

/// `|tr U|^{4k} / d^{2k}`.
pub fn frame_potential_lower_bound(p: &FormFactorPoint, k: usize) -> f64 {
    let d = p.d as f64;
    (p.c2 * d).powi(2 * k as i32)
}

/// Infinite-time average of `d^{-2k} |tr U|^{4k}` by degeneracy counting, with a
/// numeric long-time average when the spectrum is not generic at order `2k`.
pub fn frame_potential_time_avg_bound(s: &Spectrum, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be >= 1".into()));
    }
    let d = s.d() as f64;
    let counted = match is_generic(s, 2 * k, GENERIC_TOL) {
        Ok(g) if g.generic => return Ok(generic_trace_moment_count(s.d(), 2 * k) / d.powi(2 * k as i32)),
        Ok(g) => format!("spectrum not generic at order {} (witness {:?})", 2 * k, g.witness.unwrap_or_default()),
        Err(Error::CombinatorialBlowup { order, d }) => format!("genericity at order {order} not checked for d = {d}"),
        Err(e) => return Err(e),
    };
    log::warn!("{counted}; using numeric time average");
    numeric_time_average(s, 20_000, |p| frame_potential_lower_bound(p, k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{sample_gue_spectrum, unitary_from_spectrum};
    use crate::form_factors::form_factors_at;

    #[test]
    fn zero_time_is_d_to_the_2k() {
        let id = DenseOperator::identity(8);
        for k in 1..=2 {
            let est = frame_potential_mc(&id, k, 5, RngSeed(1)).unwrap();
            assert!((est.mean - 8f64.powi(2 * k as i32)).abs() < 1e-6 * est.mean);
        }
        let s = Spectrum::new(vec![0.0, 1.0, 2.5, 4.0]).unwrap();
        let p = form_factors_at(&s, 0.0);
        assert!((frame_potential_closed_k1(&p).unwrap() - 16.0).abs() < 1e-12);
        assert!((frame_potential_lower_bound(&p, 1) - 16.0).abs() < 1e-12);
    }

    #[test]
    fn spectral_fast_path_matches_dense() {
        let mut rng = RngSeed(2).stream(0);
        let s = sample_gue_spectrum(8, &mut rng).unwrap();
        let u = unitary_from_spectrum(&s, 1.3).unwrap();
        let a = frame_potential_mc(&u, 2, 50, RngSeed(3)).unwrap();
        let b = frame_potential_mc_spectrum(&s, 1.3, 2, 50, RngSeed(3)).unwrap();
        assert!((a.mean - b.mean).abs() < 1e-9 * a.mean.max(1.0));
    }

    #[test]
    fn single_and_two_sample_forms_agree() {
        let mut rng = RngSeed(4).stream(0);
        let s = sample_gue_spectrum(8, &mut rng).unwrap();
        let u = unitary_from_spectrum(&s, 2.0).unwrap();
        let one = frame_potential_mc(&u, 1, 4000, RngSeed(5)).unwrap();
        let two = frame_potential_mc_two_sample(&u, 1, 4000, RngSeed(6)).unwrap();
        let sigma = (one.stderr.powi(2) + two.stderr.powi(2)).sqrt();
        assert!((one.mean - two.mean).abs() <= 3.0 * sigma, "{one:?} vs {two:?}");
    }

    #[test]
    fn time_average_counts_give_2k_factorial() {
        let mut rng = RngSeed(7).stream(0);
        let s = sample_gue_spectrum(64, &mut rng).unwrap();
        let v = frame_potential_time_avg_bound(&s, 1).unwrap();
        assert!((v - 2.0).abs() < 10.0 / 64.0);
        let s16 = sample_gue_spectrum(16, &mut rng).unwrap();
        let v2 = frame_potential_time_avg_bound(&s16, 2).unwrap();
        assert!((v2 - 24.0).abs() < 24.0 * 20.0 / 16.0, "{v2}");
    }

    #[test]
    fn order_and_size_guards() {
        let id = DenseOperator::identity(4);
        assert!(frame_potential_mc(&id, 3, 5, RngSeed(0)).is_err());
        assert!(frame_potential_mc(&DenseOperator::identity(256), 1, 5, RngSeed(0)).is_err());
    }
}
