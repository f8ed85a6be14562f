use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::operator::DenseOperator;
use crate::parallel::RngSeed;

/// Haar-random unitary: QR of a complex Ginibre matrix with the phases of
/// `diag(R)` divided out of `Q`.
pub fn sample_haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DenseOperator {
    let z = DMatrix::from_fn(d, d, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    });
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let rjj = r[(j, j)];
        let n = rjj.norm();
        let phase = if n > 0.0 { rjj / n } else { C64::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    DenseOperator::with_flags(q, true, false)
}

pub fn sample_haar_unitary_seeded(d: usize, seed: RngSeed) -> DenseOperator {
    sample_haar_unitary(d, &mut seed.stream(0))
}
